"""Exact t-SNE projection to 2-D.

At corpus scale (hundreds of characters) the exact O(n^2) formulation is
fast and easy to verify, so there is no tree approximation here. High-dim
affinities come from per-point Gaussian kernels calibrated by binary
search until each row's entropy matches the requested perplexity; low-dim
similarities use the Student-t kernel with one degree of freedom. The
optimizer is the customary momentum descent (0.5 for the first 250
iterations, 0.8 after) with per-coordinate gain adaptation and early
exaggeration of the joint probabilities. Once exaggeration ends, each
step is checked against the objective and rejected when it would raise
it, with the step scale halved and then slowly recovered; that keeps the
recorded KL trace monotone instead of merely usually-descending, at the
cost of one extra objective evaluation per iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import CalibrationError

ENTROPY_TOL = 1e-5
MAX_SEARCH_STEPS = 50
MOMENTUM_SWITCH_ITER = 250
KL_RECORD_EVERY = 50
_EPS = 1e-12


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    seed: int = 42

    def __post_init__(self) -> None:
        if self.perplexity <= 0:
            raise ValueError("perplexity must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.early_exaggeration < 1:
            raise ValueError("early_exaggeration must be >= 1")


@dataclass
class Embedding2D:
    coords: np.ndarray
    kl_trace: list[float] = field(default_factory=list)


def pairwise_sq_distances(points: np.ndarray) -> np.ndarray:
    sq = (points**2).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * points @ points.T
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _row_entropy_bits(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def perplexity_calibration(distances: np.ndarray, perplexity: float) -> np.ndarray:
    """Per-row Gaussian bandwidth search to hit log2(perplexity) entropy.

    Bisection runs until the row entropy is within 1e-5 bits of the target
    or 50 steps pass; rows whose entropy cannot move (all neighbours
    equidistant) keep their closest achievable distribution, which is the
    uniform row. Raises CalibrationError if a row comes out non-finite.
    """
    d2 = np.asarray(distances, dtype=float)
    n = d2.shape[0]
    if d2.ndim != 2 or d2.shape[1] != n:
        raise ValueError("distance matrix must be square")
    if not np.allclose(np.diag(d2), 0.0):
        raise ValueError("distance matrix must have a zero diagonal")
    if not np.allclose(d2, d2.T, rtol=1e-9, atol=1e-9):
        raise ValueError("distance matrix must be symmetric")
    if n < 2:
        raise ValueError("need at least 2 points")

    target = math.log2(perplexity)
    P = np.zeros((n, n), dtype=float)
    others = ~np.eye(n, dtype=bool)
    for i in range(n):
        d = d2[i][others[i]]
        d = d - d.min()  # shifts cancel in the normalized kernel
        beta, lo, hi = 1.0, 0.0, math.inf
        p = np.exp(-beta * d)
        p /= p.sum()
        for _ in range(MAX_SEARCH_STEPS):
            entropy = _row_entropy_bits(p)
            if abs(entropy - target) <= ENTROPY_TOL:
                break
            if entropy > target:  # too flat, sharpen the kernel
                lo = beta
                beta = beta * 2.0 if math.isinf(hi) else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (lo + beta) / 2.0
            p = np.exp(-beta * d)
            p /= p.sum()
        if not np.all(np.isfinite(p)):
            raise CalibrationError(f"row {i}: bandwidth search produced non-finite values")
        P[i][others[i]] = p
    return P


def _student_t_weights(coords: np.ndarray) -> np.ndarray:
    num = 1.0 / (1.0 + pairwise_sq_distances(coords))
    np.fill_diagonal(num, 0.0)
    return num


def kl_divergence(P: np.ndarray, coords: np.ndarray) -> float:
    """KL(P || Q) of the joint distributions for an embedding state."""
    num = _student_t_weights(coords)
    Q = num / num.sum()
    mask = P > 0
    return float((P[mask] * np.log(P[mask] / np.maximum(Q[mask], _EPS))).sum())


def kl_gradient(P: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Analytic gradient of kl_divergence with respect to the coordinates."""
    num = _student_t_weights(coords)
    Q = num / num.sum()
    W = (P - Q) * num
    return 4.0 * (W.sum(axis=1)[:, None] * coords - W @ coords)


def joint_probabilities(points: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized joint P from the calibrated conditionals; sums to one."""
    d2 = pairwise_sq_distances(points)
    cond = perplexity_calibration(d2, perplexity)
    n = points.shape[0]
    return (cond + cond.T) / (2.0 * n)


def tsne(points: Sequence[Sequence[float]], config: TsneConfig = TsneConfig()) -> Embedding2D:
    """Project to 2-D; deterministic given the config seed.

    The requested perplexity is clamped to (n - 1) / 3 when the input is
    small. KL against the true (unexaggerated) P is recorded every 50
    iterations and at the final one.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError("points must form a 2-D matrix")
    n = X.shape[0]
    if n < 5:
        raise ValueError("t-SNE needs at least 5 points")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")

    perplexity = min(config.perplexity, (n - 1) / 3.0)
    P = joint_probabilities(X, perplexity)

    rng = np.random.default_rng(config.seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    step_scale = 1.0
    current_kl: float | None = None
    trace: list[float] = []

    for iteration in range(1, config.iterations + 1):
        exaggerate = iteration <= config.exaggeration_iters
        P_eff = P * config.early_exaggeration if exaggerate else P
        grad = kl_gradient(P_eff, Y)

        momentum = 0.5 if iteration <= MOMENTUM_SWITCH_ITER else 0.8
        same_direction = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_direction, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        velocity = momentum * velocity - config.learning_rate * step_scale * gains * grad
        candidate = Y + velocity
        candidate -= candidate.mean(axis=0)

        if exaggerate:
            Y = candidate
        else:
            if current_kl is None:
                current_kl = kl_divergence(P, Y)
            candidate_kl = kl_divergence(P, candidate)
            if candidate_kl > current_kl:  # reject the uphill step
                velocity[:] = 0.0
                gains[:] = 1.0
                step_scale = max(step_scale * 0.5, 1e-6)
            else:
                Y = candidate
                current_kl = candidate_kl
                step_scale = min(step_scale * 1.05, 1.0)

        if iteration % KL_RECORD_EVERY == 0 or iteration == config.iterations:
            trace.append(current_kl if current_kl is not None else kl_divergence(P, Y))

    return Embedding2D(coords=Y, kl_trace=trace)


GENDER_PALETTE = {
    "female": "#d62728",
    "male": "#1f77b4",
    "unknown": "#7f7f7f",
}


def scatter_svg(
    coords: np.ndarray,
    labels: Sequence[str],
    palette: Mapping[str, str] = GENDER_PALETTE,
    size: int = 800,
    margin: int = 40,
) -> str:
    """Minimal deterministic SVG scatter of the embedding, colored by label."""
    pts = np.asarray(coords, dtype=float)
    if pts.shape[0] != len(labels):
        raise ValueError("coords and labels must align")
    spans = pts.max(axis=0) - pts.min(axis=0)
    spans = np.where(spans > 0, spans, 1.0)
    lo = pts.min(axis=0)
    scale = (size - 2 * margin) / spans
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for (x, y), label in zip(pts, labels):
        px = margin + (x - lo[0]) * scale[0]
        py = size - margin - (y - lo[1]) * scale[1]
        color = palette.get(str(label).lower(), "#7f7f7f")
        lines.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="6" fill="{color}" fill-opacity="0.75"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
