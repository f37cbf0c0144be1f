"""PCA reduction, geotemporal augmentation, and the cosine-shift experiment.

fit_pca keeps the top principal axes of a centered embedding space; augment
appends standardized feature columns after the reduced text columns. The
delta-cosine experiment measures how much augmentation moves pairwise
cosines as the number of kept components grows.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embed import EmbeddingSpace
from .errors import DomainError
from .geotime import StandardizationStats, standardize

_ORTHO_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Centered principal axes sorted by descending explained variance."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    def __post_init__(self):
        k, d = self.components.shape
        gram = self.components @ self.components.T
        if not np.allclose(gram, np.eye(k), atol=_ORTHO_TOL, rtol=0.0):
            raise DomainError("components are not orthonormal")
        if self.mean.shape != (d,):
            raise DomainError("mean length does not match component width")
        ev = self.explained_variance
        if ev.shape != (k,) or np.any(ev < 0) or np.any(np.diff(ev) > 0):
            raise DomainError("explained_variance must be nonnegative and nonincreasing")

    @property
    def k(self) -> int:
        return self.components.shape[0]


@dataclass(frozen=True, eq=False)
class AugmentedSpace:
    """Reduced text columns followed by standardized feature columns.

    Column layout is [k text dims | f feature dims]; stats describes the
    standardization applied to the feature block.
    """

    ids: tuple[str, ...]
    matrix: np.ndarray
    k: int
    f: int
    stats: StandardizationStats

    def __post_init__(self):
        if self.matrix.shape != (len(self.ids), self.k + self.f):
            raise DomainError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{len(self.ids)} ids with k={self.k}, f={self.f}"
            )


def fit_pca(space: EmbeddingSpace | np.ndarray, k: int) -> PcaModel:
    """Fit a k-component PCA of the (centered) embedding matrix.

    k must satisfy 1 <= k <= min(n-1, d). Component signs are fixed so each
    axis's largest-magnitude entry is positive.
    """
    matrix = space.matrix if isinstance(space, EmbeddingSpace) else np.asarray(space, dtype=float)
    n, d = matrix.shape
    k_max = min(n - 1, d)
    if not 1 <= k <= k_max:
        raise DomainError(f"k={k} out of range [1, {k_max}] for a {n}x{d} space")
    mean = matrix.mean(axis=0)
    centered = matrix - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:k].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    variances = (singular[:k] ** 2) / n
    return PcaModel(mean=mean, components=components, explained_variance=variances)


def transform(model: PcaModel, space: EmbeddingSpace | np.ndarray) -> np.ndarray:
    """Project rows onto the model's axes: (X - mean) @ components.T."""
    matrix = space.matrix if isinstance(space, EmbeddingSpace) else np.asarray(space, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != model.mean.shape[0]:
        raise DomainError(
            f"space dimension {matrix.shape[1:]} does not match model dimension {model.mean.shape[0]}"
        )
    return (matrix - model.mean) @ model.components.T


def augment(reduced: np.ndarray, features: np.ndarray, ids: Sequence[str]) -> AugmentedSpace:
    """Standardize the feature block and append it after the text columns."""
    reduced = np.asarray(reduced, dtype=float)
    features = np.asarray(features, dtype=float)
    if reduced.shape[0] != features.shape[0]:
        raise DomainError(
            f"row counts differ: {reduced.shape[0]} reduced vs {features.shape[0]} features"
        )
    if reduced.shape[0] != len(ids):
        raise DomainError(f"{reduced.shape[0]} rows for {len(ids)} ids")
    z, stats = standardize(features)
    return AugmentedSpace(
        ids=tuple(ids),
        matrix=np.hstack([reduced, z]),
        k=reduced.shape[1],
        f=features.shape[1],
        stats=stats,
    )


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two nonzero vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"vector lengths differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise DomainError("cosine is undefined for a zero vector")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def _pairwise_cosines(matrix: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    # vectorized cosine over index-pair arrays; rejects zero rows like cosine()
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms[i] == 0.0) or np.any(norms[j] == 0.0):
        raise DomainError("cosine is undefined for a zero vector")
    nums = np.einsum("ij,ij->i", matrix[i], matrix[j])
    return np.clip(nums / (norms[i] * norms[j]), -1.0, 1.0)


@dataclass(frozen=True)
class DeltaCosineResult:
    """Mean absolute cosine shift at one component count."""

    k: int
    mean_abs_delta: float
    stderr: float


def delta_cosine_experiment(
    space: EmbeddingSpace,
    features: np.ndarray,
    k_list: Sequence[int],
    trials: int = 10,
    pair_sample_size: int = 500,
    seed: int = 0,
) -> list[DeltaCosineResult]:
    """Per k: mean |cosine_augmented - cosine_original| over sampled pairs.

    Baseline cosines are taken on the mean-centered original matrix, so at
    k = d (a pure rotation) zero features give a zero shift. Each trial
    draws pair_sample_size distinct unordered pairs; the same trial draws
    the same pairs for every k. Deterministic given seed.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    n = space.matrix.shape[0]
    total_pairs = n * (n - 1) // 2
    if pair_sample_size > total_pairs:
        raise DomainError(
            f"pair_sample_size {pair_sample_size} exceeds {total_pairs} available pairs"
        )
    upper_i, upper_j = np.triu_indices(n, k=1)
    trial_pairs = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        chosen = rng.choice(total_pairs, size=pair_sample_size, replace=False)
        trial_pairs.append((upper_i[chosen], upper_j[chosen]))
    centered = space.matrix - space.matrix.mean(axis=0)
    baseline = [_pairwise_cosines(centered, i, j) for i, j in trial_pairs]

    results = []
    for k in k_list:
        model = fit_pca(space, k)
        reduced = transform(model, space)
        augmented = augment(reduced, features, space.ids)
        trial_means = np.empty(trials)
        for trial, (i, j) in enumerate(trial_pairs):
            deltas = np.abs(_pairwise_cosines(augmented.matrix, i, j) - baseline[trial])
            trial_means[trial] = deltas.mean()
        stderr = float(trial_means.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        results.append(
            DeltaCosineResult(k=int(k), mean_abs_delta=float(trial_means.mean()), stderr=stderr)
        )
    return results


def save_delta_csv(results: Sequence[DeltaCosineResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "mean_abs_delta", "stderr"])
        for r in results:
            writer.writerow([r.k, repr(r.mean_abs_delta), repr(r.stderr)])
