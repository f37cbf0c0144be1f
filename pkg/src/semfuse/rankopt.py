"""Context-aware similarity scoring and ranking-loss minimization.

Two scorers extend the dot product with weighted distance kernels over
extra per-record features (time in days, coordinates): an additive form
and a multiplicative form. Batches are compared through ranking matrices,
and the kernel weights are fit by a deterministic shrinking-grid search
over the weight space, since the ranking loss is piecewise constant and
has no usable gradient.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Record
from .errors import ConfigError, ConflictError, DomainError, FormatError, RowError
from .geotime import SECONDS_PER_DAY, GeoPoint, haversine_miles

SIM_KINDS = ("sigma", "pi")
DIST_KINDS = ("exp_abs", "inv_abs", "floor_geo")
DEFAULT_DIST_KINDS = ("inv_abs", "floor_geo")
RECOMMENDED_BATCH = (10, 20)


def dist_exp(a: float, b: float) -> float:
    """exp(-|a - b|), in (0, 1]."""
    return math.exp(-abs(a - b))


def dist_inv(a: float, b: float) -> float:
    """1 / (|a - b| + 1), in (0, 1]."""
    return 1.0 / (abs(a - b) + 1.0)


def dist_floor_geo(a: GeoPoint, b: GeoPoint) -> float:
    """(10 - floor(miles/500)) / 10 of the great-circle distance, clamped at 0."""
    miles = haversine_miles(a, b)
    return max(0.0, (10.0 - math.floor(miles / 500.0)) / 10.0)


def _pair_distance(kind: str, a, b) -> float:
    if kind == "exp_abs":
        return dist_exp(a, b)
    if kind == "inv_abs":
        return dist_inv(a, b)
    if kind == "floor_geo":
        return dist_floor_geo(a, b)
    raise DomainError(f"unknown distance kind {kind!r}; expected one of {DIST_KINDS}")


@dataclass(frozen=True)
class SimilarityParams:
    """Scorer kind plus one (alpha, distance kind) per extra feature."""

    kind: str
    alphas: tuple[float, ...]
    dist_kinds: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in SIM_KINDS:
            raise DomainError(f"unknown similarity kind {self.kind!r}; expected one of {SIM_KINDS}")
        if len(self.alphas) != len(self.dist_kinds):
            raise DomainError(
                f"{len(self.alphas)} alphas for {len(self.dist_kinds)} distance kinds"
            )
        for dk in self.dist_kinds:
            if dk not in DIST_KINDS:
                raise DomainError(f"unknown distance kind {dk!r}; expected one of {DIST_KINDS}")


def _pair_kernel_values(feats1, feats2, p: SimilarityParams) -> list[float]:
    if len(feats1) != len(feats2):
        raise DomainError(f"feature counts differ: {len(feats1)} vs {len(feats2)}")
    if len(feats1) != len(p.alphas):
        raise DomainError(f"{len(feats1)} features for {len(p.alphas)} alphas")
    return [_pair_distance(k, a, b) for k, a, b in zip(p.dist_kinds, feats1, feats2)]


def sim_sigma(e1, e2, feats1, feats2, p: SimilarityParams) -> float:
    """Additive scorer: e1.e2 + sum_i alpha_i * d_i."""
    if p.kind != "sigma":
        raise DomainError(f"sim_sigma called with kind {p.kind!r}")
    dists = _pair_kernel_values(feats1, feats2, p)
    dot = float(np.asarray(e1, dtype=float) @ np.asarray(e2, dtype=float))
    return dot + sum(a * d for a, d in zip(p.alphas, dists))


def sim_pi(e1, e2, feats1, feats2, p: SimilarityParams) -> float:
    """Multiplicative scorer: (e1.e2) * prod_i (alpha_i + d_i)."""
    if p.kind != "pi":
        raise DomainError(f"sim_pi called with kind {p.kind!r}")
    dists = _pair_kernel_values(feats1, feats2, p)
    dot = float(np.asarray(e1, dtype=float) @ np.asarray(e2, dtype=float))
    return dot * math.prod(a + d for a, d in zip(p.alphas, dists))


def batch_features(records: Sequence[Record]) -> list[tuple]:
    """Per-record extra features for the shipped kernels: (days, coords)."""
    feats = []
    for r in records:
        if r.coords is None:
            raise DomainError(f"record {r.id!r} has no coordinates")
        feats.append((r.timestamp / SECONDS_PER_DAY, r.coords))
    return feats


@dataclass(frozen=True, eq=False)
class RankMatrix:
    """Per-row similarity rankings for a batch.

    entries[i, j] counts the candidates ranked strictly more similar than
    j to i; the diagonal is fixed at 0 and excluded from the loss.
    """

    m: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.m, self.m):
            raise DomainError(f"entries shape {self.entries.shape} for m={self.m}")
        if np.any(np.diag(self.entries) != 0):
            raise DomainError("rank matrix diagonal must be 0")


def rank_matrix(scores: np.ndarray) -> RankMatrix:
    """Rank each row's candidates by descending score.

    Ties are broken by ascending candidate index, so the result is
    deterministic and each off-diagonal row is a permutation of
    {0, ..., m-2} whenever row scores are distinct.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
        raise DomainError(f"score matrix must be square, got shape {scores.shape}")
    m = scores.shape[0]
    if m < 2:
        raise DomainError(f"need at least 2 items, got {m}")
    entries = np.zeros((m, m), dtype=int)
    for i in range(m):
        candidates = [j for j in range(m) if j != i]
        order = sorted(candidates, key=lambda j: (-scores[i, j], j))
        for position, j in enumerate(order):
            entries[i, j] = position
    return RankMatrix(m=m, entries=entries)


def rank_loss(predicted: RankMatrix, labeled: RankMatrix) -> float:
    """Root of the summed squared rank differences over off-diagonal pairs."""
    if predicted.m != labeled.m:
        raise DomainError(f"rank matrix sizes differ: {predicted.m} vs {labeled.m}")
    diff = (predicted.entries - labeled.entries).astype(float)
    np.fill_diagonal(diff, 0.0)
    return float(np.sqrt(np.sum(diff * diff)))


def pairwise_scores(
    embeddings: np.ndarray,
    features: Sequence[tuple],
    params: SimilarityParams,
) -> np.ndarray:
    """Full m x m score matrix; exactly symmetric by construction."""
    embeddings = np.asarray(embeddings, dtype=float)
    m = embeddings.shape[0]
    if len(features) != m:
        raise DomainError(f"{m} embeddings for {len(features)} feature tuples")
    kernels = _kernel_matrices(features, params.dist_kinds)
    dots = embeddings @ embeddings.T
    scores = _compose_scores(dots, kernels, params)
    upper = np.triu(scores)
    return upper + np.triu(scores, 1).T


def _kernel_matrices(features: Sequence[tuple], dist_kinds: Sequence[str]) -> list[np.ndarray]:
    m = len(features)
    kernels = []
    for fi, kind in enumerate(dist_kinds):
        kernel = np.ones((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                kernel[i, j] = kernel[j, i] = _pair_distance(
                    kind, features[i][fi], features[j][fi]
                )
        kernels.append(kernel)
    return kernels


def _compose_scores(
    dots: np.ndarray, kernels: Sequence[np.ndarray], params: SimilarityParams
) -> np.ndarray:
    if params.kind == "sigma":
        out = dots.copy()
        for alpha, kernel in zip(params.alphas, kernels):
            out += alpha * kernel
        return out
    out = np.ones_like(dots)
    for alpha, kernel in zip(params.alphas, kernels):
        out *= alpha + kernel
    return dots * out


@dataclass(frozen=True)
class GridConfig:
    """Shrinking-grid search settings.

    bounds gives one (lo, hi) interval per alpha. step is the round-1 grid
    spacing (None means 21 points per axis); later rounds keep the point
    count and halve the interval around the best point by `shrink`,
    clipped to the original bounds. seed is recorded in outputs only: the
    search itself is deterministic.
    """

    bounds: tuple[tuple[float, float], ...]
    step: float | None = None
    shrink: float = 0.5
    rounds: int = 6
    seed: int = 0

    def __post_init__(self):
        if not self.bounds:
            raise ConfigError("bounds must not be empty")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ConfigError(f"bad interval [{lo}, {hi}]: lo must be < hi")
        if self.step is not None and self.step <= 0:
            raise ConfigError(f"step must be positive, got {self.step}")
        if not 0 < self.shrink < 1:
            raise ConfigError(f"shrink must be in (0, 1), got {self.shrink}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")

    def points_per_axis(self) -> tuple[int, ...]:
        counts = []
        for lo, hi in self.bounds:
            if self.step is None:
                counts.append(21)
            else:
                counts.append(max(1, int(round((hi - lo) / self.step)) + 1))
        return tuple(counts)


def _axis_points(lo: float, hi: float, count: int) -> np.ndarray:
    if count == 1:
        return np.array([(lo + hi) / 2.0])
    return np.linspace(lo, hi, count)


def optimize_alphas(
    embeddings: np.ndarray,
    features: Sequence[tuple],
    labels: RankMatrix,
    kind: str,
    dist_kinds: Sequence[str],
    cfg: GridConfig,
) -> tuple[SimilarityParams, float, list[tuple[int, float, float, float]]]:
    """Fit the alpha weights by shrinking-grid search against labeled ranks.

    Returns the best parameters, their ranking loss, and the full probe
    trace as (round, alpha1, alpha2, loss) rows. The search is exhaustive
    per round and fully deterministic; ties keep the first probe.
    """
    embeddings = np.asarray(embeddings, dtype=float)
    m = embeddings.shape[0]
    if len(dist_kinds) != len(cfg.bounds):
        raise ConfigError(f"{len(cfg.bounds)} bounds for {len(dist_kinds)} distance kinds")
    if len(dist_kinds) != 2:
        raise ConfigError("the grid search handles exactly 2 extra features")
    if labels.m != m:
        raise DomainError(f"label matrix is {labels.m}x{labels.m} for batch size {m}")
    if not RECOMMENDED_BATCH[0] <= m <= RECOMMENDED_BATCH[1]:
        warnings.warn(
            f"batch size {m} outside the recommended "
            f"{RECOMMENDED_BATCH[0]}-{RECOMMENDED_BATCH[1]} range",
            stacklevel=2,
        )

    kernels = _kernel_matrices(features, dist_kinds)
    dots = embeddings @ embeddings.T

    def loss_at(alphas: tuple[float, float]) -> float:
        params = SimilarityParams(kind=kind, alphas=alphas, dist_kinds=tuple(dist_kinds))
        predicted = rank_matrix(_compose_scores(dots, kernels, params))
        return rank_loss(predicted, labels)

    counts = cfg.points_per_axis()
    (lo1, hi1), (lo2, hi2) = cfg.bounds
    center = ((lo1 + hi1) / 2.0, (lo2 + hi2) / 2.0)
    half = ((hi1 - lo1) / 2.0, (hi2 - lo2) / 2.0)

    best_alphas: tuple[float, float] | None = None
    best_loss = math.inf
    trace: list[tuple[int, float, float, float]] = []

    def probe(rnd: int, alphas: tuple[float, float]):
        nonlocal best_alphas, best_loss
        loss = loss_at(alphas)
        trace.append((rnd, alphas[0], alphas[1], loss))
        if loss < best_loss:
            best_alphas, best_loss = alphas, loss

    for rnd in range(1, cfg.rounds + 1):
        a1_lo = max(lo1, center[0] - half[0])
        a1_hi = min(hi1, center[0] + half[0])
        a2_lo = max(lo2, center[1] - half[1])
        a2_hi = min(hi2, center[1] + half[1])
        axis1 = _axis_points(a1_lo, a1_hi, counts[0])
        axis2 = _axis_points(a2_lo, a2_hi, counts[1])
        if rnd == 1 and any(c % 2 == 0 for c in counts):
            # even grids skip the interval midpoint; probe it so the result
            # can never be worse than the initial grid center
            probe(rnd, center)
        for a1 in axis1:
            for a2 in axis2:
                probe(rnd, (float(a1), float(a2)))
        center = best_alphas
        half = (half[0] * cfg.shrink, half[1] * cfg.shrink)

    params = SimilarityParams(kind=kind, alphas=best_alphas, dist_kinds=tuple(dist_kinds))
    return params, best_loss, trace


def save_trace_csv(trace: Sequence[tuple[int, float, float, float]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "alpha1", "alpha2", "loss"])
        for rnd, a1, a2, loss in trace:
            writer.writerow([rnd, repr(float(a1)), repr(float(a2)), repr(float(loss))])


def load_rank_labels(path: str | Path) -> RankMatrix:
    """Read labeled similarity scores and convert them to a RankMatrix.

    Two layouts are accepted: a header line `i,j,score` followed by one
    row per unordered pair (0-based batch indices, scores in [0, 1], all
    pairs required), or a headerless full m x m score matrix. Either way
    the file carries scores; rankings are always derived here.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise FormatError(f"{path}: empty labels file")
    header = [cell.strip().lower() for cell in rows[0]]
    if header == ["i", "j", "score"]:
        return _labels_from_triplets(rows[1:], path)
    return _labels_from_matrix(rows, path)


def _labels_from_triplets(rows: list[list[str]], path) -> RankMatrix:
    pairs: dict[tuple[int, int], float] = {}
    max_index = -1
    for rownum, row in enumerate(rows, start=1):
        if len(row) != 3:
            raise RowError(rownum, f"expected 3 fields, got {len(row)}")
        try:
            i, j = int(row[0]), int(row[1])
            score = float(row[2])
        except ValueError:
            raise RowError(rownum, "indices must be integers and score numeric") from None
        if i < 0 or j < 0:
            raise RowError(rownum, "indices must be nonnegative")
        if i == j:
            raise RowError(rownum, f"self-pair ({i},{j}) is not allowed")
        if not 0.0 <= score <= 1.0:
            raise RowError(rownum, f"score {score} outside [0, 1]")
        key = (min(i, j), max(i, j))
        if key in pairs:
            raise ConflictError(f"duplicate pair {key} at row {rownum}")
        pairs[key] = score
        max_index = max(max_index, i, j)
    m = max_index + 1
    if m < 2:
        raise FormatError(f"{path}: need at least 2 items")
    expected = m * (m - 1) // 2
    if len(pairs) != expected:
        raise FormatError(f"{path}: {len(pairs)} pairs given, need all {expected} for m={m}")
    scores = np.zeros((m, m))
    for (i, j), score in pairs.items():
        scores[i, j] = scores[j, i] = score
    return rank_matrix(scores)


def _labels_from_matrix(rows: list[list[str]], path) -> RankMatrix:
    m = len(rows)
    if m < 2:
        raise FormatError(f"{path}: need at least 2 rows")
    scores = np.zeros((m, m))
    for rownum, row in enumerate(rows, start=1):
        if len(row) != m:
            raise RowError(rownum, f"expected {m} fields, got {len(row)}")
        try:
            scores[rownum - 1] = [float(v) for v in row]
        except ValueError:
            raise RowError(rownum, "non-numeric score") from None
    return rank_matrix(scores)
