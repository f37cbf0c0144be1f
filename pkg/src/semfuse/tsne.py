"""Two-dimensional t-SNE style reduction for map-like visualization.

High-dimensional affinities use per-point Gaussian bandwidths calibrated
by bisection to a target perplexity. The planar similarities default to a
Gaussian kernel, with a Student-t switch; the cost is the KL divergence
between the two distributions, minimized by momentum gradient descent
with early exaggeration. Everything is deterministic given the seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CalibrationError,
    ConfigError,
    ConflictError,
    DivergenceError,
    DomainError,
    SchemaError,
)

KERNELS = ("gaussian", "student_t")
COST_MODES = ("joint", "conditional")
PERPLEXITY_TOL = 1e-3
_BISECTION_STEPS = 64
_Q_FLOOR = 1e-12
_MIN_GAIN = 0.01
# Per-point displacement cap per iteration. The planar Gaussian kernel has no
# long-range force falloff, so an aggressive learning rate can overshoot
# explosively before the gains adapt; bounding the step keeps the excursion
# finite without touching well-behaved trajectories.
_MAX_STEP = 0.5


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 100.0
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch: int = 250
    early_exaggeration: float = 4.0
    exaggeration_iters: int = 100
    kernel: str = "gaussian"
    cost: str = "joint"
    seed: int = 0

    def __post_init__(self):
        if self.perplexity <= 1:
            raise ConfigError(f"perplexity must be > 1, got {self.perplexity}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        for name in ("momentum_start", "momentum_final"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {value}")
        if self.early_exaggeration < 1.0:
            raise ConfigError(f"early_exaggeration must be >= 1, got {self.early_exaggeration}")
        if self.exaggeration_iters < 0 or self.momentum_switch < 0:
            raise ConfigError("iteration thresholds must be >= 0")
        if self.kernel not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kernel!r}; expected one of {KERNELS}")
        if self.cost not in COST_MODES:
            raise ConfigError(f"unknown cost mode {self.cost!r}; expected one of {COST_MODES}")


@dataclass(frozen=True, eq=False)
class AffinityModel:
    """Symmetric joint affinities with the bandwidths that produced them."""

    P: np.ndarray
    sigmas: np.ndarray | None = None

    def __post_init__(self):
        P = self.P
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DomainError(f"P must be square, got shape {P.shape}")
        if np.any(P < 0) or np.any(np.diag(P) != 0):
            raise DomainError("P must be nonnegative with a zero diagonal")
        if not np.allclose(P, P.T, atol=1e-12, rtol=0.0):
            raise DomainError("P is not symmetric")
        if abs(float(P.sum()) - 1.0) > 1e-9:
            raise DomainError(f"P sums to {float(P.sum())}, expected 1")


@dataclass(frozen=True, eq=False)
class TsneResult:
    coords: np.ndarray
    kl_trace: np.ndarray
    effective_perplexity: float


def pairwise_sq_distances(matrix: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances with an exact zero diagonal."""
    matrix = np.asarray(matrix, dtype=float)
    norms = np.einsum("ij,ij->i", matrix, matrix)
    d2 = norms[:, None] + norms[None, :] - 2.0 * (matrix @ matrix.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _row_perplexity(d2_row: np.ndarray, beta: float, i: int) -> tuple[float, np.ndarray]:
    # returns (2^H in bits, conditional probabilities) for row i at precision beta
    logits = -beta * d2_row
    logits[i] = -np.inf
    logits -= logits.max()
    w = np.exp(logits)
    p = w / w.sum()
    positive = p[p > 0]
    entropy_bits = float(-(positive * np.log2(positive)).sum())
    return 2.0**entropy_bits, p


def calibrate_sigmas(sq_distances: np.ndarray, perplexity: float) -> np.ndarray:
    """Per-row bandwidths hitting the target perplexity by bisection.

    Solves 2^H(p_.|i) = perplexity within 1e-3 for each row, at most 64
    bisection steps per row.
    """
    d2 = np.asarray(sq_distances, dtype=float)
    n = d2.shape[0]
    if d2.ndim != 2 or d2.shape[1] != n:
        raise DomainError(f"distance matrix must be square, got shape {d2.shape}")
    if np.any(np.diag(d2) != 0):
        raise DomainError("distance matrix diagonal must be zero")
    if not 1.0 < perplexity < n:
        raise CalibrationError(-1, f"perplexity {perplexity} not in (1, {n})")
    sigmas = np.empty(n)
    for i in range(n):
        beta, lo, hi = 1.0, None, None
        converged = False
        for _ in range(_BISECTION_STEPS):
            perp, _ = _row_perplexity(d2[i].copy(), beta, i)
            if abs(perp - perplexity) <= PERPLEXITY_TOL:
                converged = True
                break
            if perp > perplexity:
                lo = beta
                beta = beta * 2.0 if hi is None else (lo + hi) / 2.0
            else:
                hi = beta
                beta = beta / 2.0 if lo is None else (lo + hi) / 2.0
        if not converged:
            raise CalibrationError(i, f"row {i}: perplexity {perplexity} unreachable")
        sigmas[i] = 1.0 / np.sqrt(2.0 * beta)
    return sigmas


def conditional_p(sq_distances: np.ndarray, sigmas: np.ndarray) -> np.ndarray:
    """Row-stochastic Gaussian conditionals from calibrated bandwidths."""
    d2 = np.asarray(sq_distances, dtype=float)
    n = d2.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        beta = 1.0 / (2.0 * sigmas[i] ** 2)
        _, out[i] = _row_perplexity(d2[i].copy(), beta, i)
    return out


def symmetrize(pcond: np.ndarray, sigmas: np.ndarray | None = None) -> AffinityModel:
    """Joint affinities P = (Pcond + Pcond.T) / 2n, summing to 1."""
    pcond = np.asarray(pcond, dtype=float)
    n = pcond.shape[0]
    P = (pcond + pcond.T) / (2.0 * n)
    np.fill_diagonal(P, 0.0)
    return AffinityModel(P=P, sigmas=sigmas)


def _kernel_weights(d2: np.ndarray, kernel: str) -> np.ndarray:
    w = np.exp(-d2) if kernel == "gaussian" else 1.0 / (1.0 + d2)
    np.fill_diagonal(w, 0.0)
    return w


def low_dim_q(coords: np.ndarray, kernel: str = "gaussian") -> np.ndarray:
    """Row-normalized planar similarities q_{j|i}; zero diagonal."""
    if kernel not in KERNELS:
        raise DomainError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    w = _kernel_weights(pairwise_sq_distances(coords), kernel)
    return w / w.sum(axis=1, keepdims=True)


def joint_q(coords: np.ndarray, kernel: str = "gaussian") -> np.ndarray:
    """Matrix-normalized planar similarities, summing to 1 overall."""
    if kernel not in KERNELS:
        raise DomainError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    w = _kernel_weights(pairwise_sq_distances(coords), kernel)
    return w / w.sum()


def kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    """Sum of p * log(p/q) over all entries, with 0 log 0 taken as 0."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise DomainError(f"shapes differ: {P.shape} vs {Q.shape}")
    mask = P > 0
    if np.any(Q[mask] <= 0):
        raise DomainError("q is 0 where p > 0; divergence undefined")
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def tsne_cost_and_grad(
    P: np.ndarray, coords: np.ndarray, kernel: str = "gaussian", cost: str = "joint"
) -> tuple[float, np.ndarray]:
    """KL cost and its exact gradient with respect to the coordinates.

    Works for either kernel and either cost mode. The low-dimensional
    distribution is floored at 1e-12 to keep long-running descents finite;
    the floor is inactive on well-scaled configurations.
    """
    coords = np.asarray(coords, dtype=float)
    d2 = pairwise_sq_distances(coords)
    w = _kernel_weights(d2, kernel)
    if cost == "joint":
        Q = w / max(float(w.sum()), _Q_FLOOR)
    else:
        Q = w / np.maximum(w.sum(axis=1, keepdims=True), _Q_FLOOR)
    Q = np.maximum(Q, _Q_FLOOR)
    np.fill_diagonal(Q, 0.0)
    mask = P > 0
    cost_value = float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))
    S = (P + P.T) - (Q + Q.T)
    A = S * (1.0 / (1.0 + d2) if kernel == "student_t" else 1.0)
    if isinstance(A, np.ndarray):
        np.fill_diagonal(A, 0.0)
    grad = 2.0 * (A.sum(axis=1)[:, None] * coords - A @ coords)
    return cost_value, grad


def run_tsne(
    space: np.ndarray, cfg: TsneConfig, init: np.ndarray | None = None
) -> TsneResult:
    """Reduce rows of `space` to the plane by gradient descent.

    The requested perplexity is capped at max((n-1)/3, 1.5) so small
    inputs stay calibratable. The descent uses momentum, early
    exaggeration, per-coordinate adaptive gains, and a per-point step cap.
    kl_trace[t] is the cost at the start of iteration t against the
    un-exaggerated affinities; the final entry is the cost of the returned
    coordinates. Passing `init` overrides the seeded Gaussian starting
    layout.
    """
    X = np.asarray(space, dtype=float)
    n = X.shape[0]
    if n < 3:
        raise DomainError(f"need at least 3 rows, got {n}")
    effective = min(cfg.perplexity, max((n - 1) / 3.0, 1.5))
    d2 = pairwise_sq_distances(X)
    sigmas = calibrate_sigmas(d2, effective)
    pcond = conditional_p(d2, sigmas)
    P = symmetrize(pcond, sigmas).P if cfg.cost == "joint" else pcond

    if init is None:
        rng = np.random.default_rng(cfg.seed)
        Y = rng.normal(0.0, 1e-2, size=(n, 2))
    else:
        Y = np.array(init, dtype=float)
        if Y.shape != (n, 2):
            raise DomainError(f"init shape {Y.shape}, expected {(n, 2)}")
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    trace = np.empty(cfg.iterations + 1)
    for it in range(cfg.iterations):
        P_use = P * cfg.early_exaggeration if it < cfg.exaggeration_iters else P
        trace[it], _ = tsne_cost_and_grad(P, Y, cfg.kernel, cfg.cost)
        _, grad = tsne_cost_and_grad(P_use, Y, cfg.kernel, cfg.cost)
        momentum = cfg.momentum_start if it < cfg.momentum_switch else cfg.momentum_final
        # Delta-bar-delta gains: grow a coordinate's rate while its gradient
        # keeps opposing the velocity, shrink it on overshoot.
        grow = np.sign(grad) != np.sign(velocity)
        gains = np.where(grow, gains + 0.2, gains * 0.8)
        np.maximum(gains, _MIN_GAIN, out=gains)
        velocity = momentum * velocity - cfg.learning_rate * (gains * grad)
        norms = np.linalg.norm(velocity, axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            velocity = np.where(norms > _MAX_STEP, velocity * (_MAX_STEP / norms), velocity)
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)
        if not np.all(np.isfinite(Y)):
            raise DivergenceError(it, f"coordinates diverged at iteration {it}")
    trace[-1], _ = tsne_cost_and_grad(P, Y, cfg.kernel, cfg.cost)
    return TsneResult(coords=Y, kl_trace=trace, effective_perplexity=effective)


def write_coords_csv(ids: Sequence[str], coords: np.ndarray, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x", "y"])
        for rid, (x, y) in zip(ids, coords):
            writer.writerow([rid, repr(float(x)), repr(float(y))])


def load_colors(path: str | Path) -> dict[str, str]:
    """Read an id,color CSV for scatter fills."""
    colors: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["id", "color"]:
            raise SchemaError(f"{path}: expected header id,color")
        for row in reader:
            if not row:
                continue
            rid, color = row[0], row[1]
            if rid in colors:
                raise ConflictError(f"duplicate color entry for id {rid!r}")
            colors[rid] = color
    return colors


def write_scatter_svg(
    ids: Sequence[str],
    coords: np.ndarray,
    path: str | Path,
    colors: Mapping[str, str] | None = None,
    size: int = 640,
) -> None:
    """Emit a self-contained SVG scatter of the planar coordinates."""
    coords = np.asarray(coords, dtype=float)
    margin = 0.05 * size
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    scale = (size - 2 * margin) / span
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for rid, (x, y) in zip(ids, coords):
        px = margin + (x - lo[0]) * scale[0]
        py = size - margin - (y - lo[1]) * scale[1]
        fill = colors.get(rid, "#555555") if colors else "#555555"
        parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="{fill}">'
            f"<title>{rid}</title></circle>"
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
