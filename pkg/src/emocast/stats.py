"""Nonparametric two-group statistics and descriptive summaries.

The group test is the Mann-Whitney U computed through average ranks, with
U1 counting the first group's pairwise wins plus half its ties. P-values
come from the two-sided normal approximation with tie-corrected variance
and a continuity correction, which is the standard regime for group sizes
in the hundreds or thousands; exact enumeration lives in the test suite as
an oracle for small inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Corpus, Gender
from .emotion import EMOTION_COLUMNS
from .errors import DegenerateError, NonFiniteError


@dataclass(frozen=True)
class UTestResult:
    u1: float
    u2: float
    z: float
    p_value: float
    n1: int
    n2: int


@dataclass(frozen=True)
class BoxSummary:
    """Five-number summary with whiskers at 1.5 IQR and explicit outliers."""

    min: float
    q1: float
    median: float
    q3: float
    max: float
    outliers: list[float]


@dataclass(frozen=True)
class TimeBinRow:
    """Character counts for one release-year bin; pct is female/(female+male)."""

    bin_start: int
    bin_end: int
    female: int
    male: int
    unknown: int
    female_pct: float | None


@dataclass(frozen=True)
class BatteryRow:
    emotion: str
    result: UTestResult | None
    higher_group: str  # group name, "tie", or "degenerate"


def _as_finite_array(values: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{what}: need at least one value")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{what}: values must be finite")
    return arr


def rank_with_ties(values: Sequence[float]) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of the ranks they span."""
    arr = _as_finite_array(values, "rank_with_ties")
    n = arr.size
    order = np.argsort(arr, kind="stable")
    sorted_vals = arr[order]
    starts = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1]])
    ends = np.r_[starts[1:], n]
    mean_ranks = (starts + 1 + ends) / 2.0
    ranks = np.empty(n, dtype=float)
    ranks[order] = np.repeat(mean_ranks, ends - starts)
    return ranks


def mann_whitney_u(group_a: Sequence[float], group_b: Sequence[float]) -> UTestResult:
    """Two-sided Mann-Whitney U via joint ranking.

    u1 is the number of (a, b) pairs where a wins, counting ties as half;
    u2 is its complement, so u1 + u2 = n1 * n2 exactly. Raises
    DegenerateError when every pooled value is identical (zero variance).
    """
    a = _as_finite_array(group_a, "mann_whitney_u group_a")
    b = _as_finite_array(group_b, "mann_whitney_u group_b")
    n1, n2 = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks = rank_with_ties(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1

    if np.all(pooled == pooled[0]):
        raise DegenerateError("all pooled values identical")
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float((tie_counts.astype(float) ** 3 - tie_counts).sum())
    n = n1 + n2
    sigma_sq = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if sigma_sq <= 0:
        raise DegenerateError("zero variance after tie correction")
    sigma = math.sqrt(sigma_sq)

    diff = u1 - n1 * n2 / 2.0
    shrunk = abs(diff) - 0.5  # continuity correction toward the mean
    z = math.copysign(shrunk / sigma, diff) if shrunk > 0 else 0.0
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return UTestResult(u1=u1, u2=u2, z=z, p_value=p, n1=n1, n2=n2)


def box_summary(values: Sequence[float]) -> BoxSummary:
    """Quartiles by linear interpolation; outliers beyond 1.5 IQR fences.

    min and max are whisker ends over the non-outlier values; when every
    non-outlier sits inside the box (possible on tiny samples, since the
    quartiles are interpolated) the whisker clamps to the box edge, the
    usual plotting convention.
    """
    arr = _as_finite_array(values, "box_summary")
    q1, median, q3 = (float(q) for q in np.percentile(arr, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inlier_mask = (arr >= lo) & (arr <= hi)
    outliers = sorted(float(v) for v in arr[~inlier_mask])
    inliers = arr[inlier_mask]
    return BoxSummary(
        min=min(float(inliers.min()), q1),
        q1=q1,
        median=median,
        q3=q3,
        max=max(float(inliers.max()), q3),
        outliers=outliers,
    )


def gender_distribution_over_time(corpus: Corpus, bin_width: int = 5) -> list[TimeBinRow]:
    """Character counts per release-year bin anchored at multiples of bin_width.

    Bins with no characters are omitted. UNKNOWN characters appear in their
    own column and stay out of the female_pct denominator.
    """
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    bins: dict[int, dict[Gender, int]] = {}
    for rec in corpus.records:
        start = (rec.year // bin_width) * bin_width
        counts = bins.setdefault(start, {g: 0 for g in Gender})
        counts[rec.gender] += 1
    rows = []
    for start in sorted(bins):
        counts = bins[start]
        female, male = counts[Gender.FEMALE], counts[Gender.MALE]
        denom = female + male
        rows.append(
            TimeBinRow(
                bin_start=start,
                bin_end=start + bin_width - 1,
                female=female,
                male=male,
                unknown=counts[Gender.UNKNOWN],
                female_pct=100.0 * female / denom if denom else None,
            )
        )
    return rows


def emotion_test_battery(
    matrix: Sequence[Sequence[float]],
    labels: Sequence[str],
    group_a: str = "female",
    group_b: str = "male",
    emotions: Sequence[str] = EMOTION_COLUMNS,
) -> list[BatteryRow]:
    """Run the U test per emotion column, sorted by ascending p-value.

    ``labels`` holds one group name per matrix row; rows outside the two
    groups are ignored. A constant column raises DegenerateError internally
    and is reported as a degenerate row without aborting the rest.
    """
    data = np.asarray(matrix, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(emotions):
        raise ValueError(f"matrix must be n x {len(emotions)}")
    label_arr = np.asarray([str(lab) for lab in labels])
    if label_arr.shape[0] != data.shape[0]:
        raise ValueError("labels and matrix rows must align")
    mask_a = label_arr == group_a
    mask_b = label_arr == group_b
    if not mask_a.any() or not mask_b.any():
        raise ValueError(f"need at least one row in each of {group_a!r} and {group_b!r}")

    rows: list[tuple[int, BatteryRow]] = []
    for col, emotion in enumerate(emotions):
        try:
            result = mann_whitney_u(data[mask_a, col], data[mask_b, col])
        except DegenerateError:
            rows.append((col, BatteryRow(emotion=emotion, result=None, higher_group="degenerate")))
            continue
        if result.u1 > result.u2:
            higher = group_a
        elif result.u2 > result.u1:
            higher = group_b
        else:
            higher = "tie"
        rows.append((col, BatteryRow(emotion=emotion, result=result, higher_group=higher)))

    def sort_key(item: tuple[int, BatteryRow]) -> tuple[int, float, int]:
        col, row = item
        if row.result is None:
            return (1, 0.0, col)
        return (0, row.result.p_value, col)

    return [row for _, row in sorted(rows, key=sort_key)]
