"""Character clustering: Lloyd k-means with k-means++ seeding, elbow
selection over the SSE curve, and Ward agglomerative merging.

Everything here is deterministic given its seed. Ties are broken by fixed
rules (lowest centroid index for assignments, lowest id pair for merges)
so that repeated runs and the from-scratch oracles in the test suite see
identical sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Gender
from .errors import CurveError, DimensionError, NonFiniteError

KMEANS_MAX_ITER = 300
DEFAULT_RESTARTS = 10


@dataclass(frozen=True)
class KMeansResult:
    assignments: list[int]
    centroids: np.ndarray
    sse: float
    iterations: int


@dataclass(frozen=True)
class Merge:
    id_a: int
    id_b: int
    cost: float
    new_size: int


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history; new clusters get ids n, n+1, ..."""

    n_points: int
    merges: list[Merge]


@dataclass(frozen=True)
class CompositionRow:
    cluster: int
    female: int
    male: int
    ratio: float  # male per female; inf when the cluster has no females
    expected_female: float
    deviation: float


def _as_matrix(points: Sequence[Sequence[float]]) -> np.ndarray:
    arr = np.asarray(points, dtype=object)
    if arr.ndim != 2:
        raise DimensionError("points must form a 2-D matrix with equal-length rows")
    mat = arr.astype(float)
    if not np.all(np.isfinite(mat)):
        raise NonFiniteError("points must be finite")
    return mat


def _sq_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]), dtype=float)
    first = int(rng.integers(n))
    centers[0] = points[first]
    closest = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = points[idx]
        closest = np.minimum(closest, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _repair_empty(
    points: np.ndarray, centers: np.ndarray, assign: np.ndarray, k: int
) -> np.ndarray:
    """Reseed each empty cluster with the point farthest from its centroid.

    Only points in clusters of size >= 2 are eligible, otherwise the steal
    would just move the hole to another cluster.
    """
    while True:
        counts = np.bincount(assign, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return assign
        j = int(empty[0])
        dist_to_own = ((points - centers[assign]) ** 2).sum(axis=1)
        eligible = counts[assign] >= 2
        farthest = int(np.argmax(np.where(eligible, dist_to_own, -np.inf)))
        assign[farthest] = j
        centers[j] = points[farthest]


def kmeans(
    points: Sequence[Sequence[float]],
    k: int,
    seed: int,
    max_iter: int = KMEANS_MAX_ITER,
) -> KMeansResult:
    """Lloyd iterations from a k-means++ start until assignments stabilize.

    Nearest-centroid ties go to the lowest centroid index; an emptied
    cluster is reseeded with the farthest point. SSE never increases
    across iterations (asserted).
    """
    X = _as_matrix(points)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp_init(X, k, rng)

    prev_assign: np.ndarray | None = None
    prev_sse = math.inf
    assign = np.zeros(n, dtype=int)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = _sq_distances(X, centers)
        assign = d2.argmin(axis=1)
        assign = _repair_empty(X, centers, assign, k)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        for j in range(k):
            centers[j] = X[assign == j].mean(axis=0)
        sse = float(((X - centers[assign]) ** 2).sum())
        if math.isfinite(prev_sse):
            assert sse <= prev_sse + 1e-9 * (1.0 + prev_sse)
        prev_assign, prev_sse = assign.copy(), sse

    sse = float(((X - centers[assign]) ** 2).sum())
    return KMeansResult(
        assignments=[int(a) for a in assign],
        centroids=centers,
        sse=sse,
        iterations=iterations,
    )


def _derived_seed(seed: int, k: int, restart: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(k, restart)).generate_state(1)[0])


def best_kmeans(
    points: Sequence[Sequence[float]],
    k: int,
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
) -> KMeansResult:
    """Best of ``restarts`` runs by SSE; ties keep the earliest restart."""
    best: KMeansResult | None = None
    for restart in range(restarts):
        result = kmeans(points, k, _derived_seed(seed, k, restart))
        if best is None or result.sse < best.sse:
            best = result
    assert best is not None
    return best


def sse_curve(
    points: Sequence[Sequence[float]],
    k_min: int,
    k_max: int,
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
) -> list[tuple[int, float]]:
    """Per-k minimum SSE over restarts, for elbow inspection."""
    X = _as_matrix(points)
    n = X.shape[0]
    if not 1 <= k_min <= k_max <= n:
        raise ValueError(f"need 1 <= k_min <= k_max <= {n}")
    return [(k, best_kmeans(X, k, seed, restarts).sse) for k in range(k_min, k_max + 1)]


def elbow_detect(curve: Sequence[tuple[int, float]]) -> int:
    """k with the largest second difference of SSE; ties pick the smaller k."""
    if len(curve) < 3:
        raise CurveError("elbow detection needs at least 3 curve points")
    ks = [k for k, _ in curve]
    sses = [s for _, s in curve]
    for prev_k, next_k in zip(ks, ks[1:]):
        if next_k != prev_k + 1:
            raise CurveError("curve points must cover consecutive k")
    best_k, best_val = ks[1], -math.inf
    for i in range(1, len(curve) - 1):
        val = sses[i - 1] - 2.0 * sses[i] + sses[i + 1]
        if val > best_val:
            best_k, best_val = ks[i], val
    return best_k


def ward_cluster(
    points: Sequence[Sequence[float]],
    k: int,
) -> tuple[Dendrogram, list[int]]:
    """Agglomerative merging that minimizes the within-cluster SSE increase.

    Singleton clusters start with ids 0..n-1; each merge creates id n+step.
    Pair costs are maintained with the Lance-Williams recurrence for the
    Ward criterion, so each recorded cost is the exact SSE increase of that
    merge. Cost ties resolve to the lowest (id_a, id_b) pair. Cutting the
    merge history at k clusters yields assignments labeled 0..k-1 in order
    of each cluster's smallest point index.
    """
    X = _as_matrix(points)
    n = X.shape[0]
    if n < 2:
        raise ValueError("ward_cluster needs at least 2 points")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    m = 2 * n - 1
    cost = np.full((m, m), np.inf)
    diff = X[:, None, :] - X[None, :, :]
    pair_sq = np.einsum("ijd,ijd->ij", diff, diff)
    cost[:n, :n] = 0.5 * pair_sq
    np.fill_diagonal(cost, np.inf)

    sizes = np.zeros(m, dtype=float)
    sizes[:n] = 1.0
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    active = set(range(n))

    def snapshot_assignments() -> list[int]:
        clusters = sorted((min(members[cid]), cid) for cid in active)
        label_of = {cid: label for label, (_, cid) in enumerate(clusters)}
        assignment = [0] * n
        for cid in active:
            for point in members[cid]:
                assignment[point] = label_of[cid]
        return assignment

    assignments = snapshot_assignments() if len(active) == k else None
    merges: list[Merge] = []
    for step in range(n - 1):
        flat = int(np.argmin(cost))
        i, j = divmod(flat, m)
        merge_cost = float(cost[i, j])
        new_id = n + step
        new_size = sizes[i] + sizes[j]

        ids = np.fromiter(
            (c for c in active if c != i and c != j), dtype=int, count=len(active) - 2
        )
        if ids.size:
            updated = (
                (sizes[i] + sizes[ids]) * cost[np.minimum(i, ids), np.maximum(i, ids)]
                + (sizes[j] + sizes[ids]) * cost[np.minimum(j, ids), np.maximum(j, ids)]
                - sizes[ids] * merge_cost
            ) / (new_size + sizes[ids])
            cost[np.minimum(ids, new_id), np.maximum(ids, new_id)] = updated
            cost[np.maximum(ids, new_id), np.minimum(ids, new_id)] = updated

        cost[i, :] = np.inf
        cost[:, i] = np.inf
        cost[j, :] = np.inf
        cost[:, j] = np.inf

        sizes[new_id] = new_size
        members[new_id] = members.pop(i) + members.pop(j)
        active.discard(i)
        active.discard(j)
        active.add(new_id)
        merges.append(Merge(id_a=i, id_b=j, cost=merge_cost, new_size=int(new_size)))
        if len(active) == k:
            assignments = snapshot_assignments()

    assert assignments is not None
    return Dendrogram(n_points=n, merges=merges), assignments


def composition_audit(
    assignments: Sequence[int],
    genders: Sequence[Gender | str],
    global_counts: tuple[int, int],
) -> list[CompositionRow]:
    """Per-cluster gender balance against the corpus-wide female share.

    ``global_counts`` is (female_total, male_total). The expected female
    count of a cluster scales its female+male size by the global female
    fraction; deviation is the absolute gap to the observed count.
    """
    if len(assignments) != len(genders):
        raise ValueError("assignments and genders must align")
    norm = [g.value if isinstance(g, Gender) else str(g).lower() for g in genders]
    global_female, global_male = global_counts
    total = global_female + global_male
    fraction = global_female / total if total else 0.0

    counts: dict[int, list[int]] = {}
    for cluster, gender in zip(assignments, norm):
        pair = counts.setdefault(int(cluster), [0, 0])
        if gender == "female":
            pair[0] += 1
        elif gender == "male":
            pair[1] += 1
    rows = []
    for cluster in sorted(counts):
        female, male = counts[cluster]
        if female > 0:
            ratio = male / female
        elif male > 0:
            ratio = math.inf
        else:
            ratio = math.nan
        expected = (female + male) * fraction
        rows.append(
            CompositionRow(
                cluster=cluster,
                female=female,
                male=male,
                ratio=ratio,
                expected_female=expected,
                deviation=abs(female - expected),
            )
        )
    return rows
