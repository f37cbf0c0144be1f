"""Sentence embeddings from word vectors.

A context model (mean + regularized covariance of in-vocabulary word
vectors) turns each token into a salience weight via Mahalanobis distance;
sentence vectors are salience-weighted token means scaled to unit norm.
Precomputed embedding spaces can also be imported from CSV.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CleanDoc
from .errors import ConflictError, DomainError, FormatError, RowError, SchemaError, UnknownKeyError

DEFAULT_RIDGE_SCALE = 1e-3
_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class WordVectorTable:
    """Token to vector lookup with a single fixed dimensionality."""

    dim: int
    vectors: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError(f"word vectors must have dim >= 2, got {self.dim}")

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def vector(self, token: str) -> np.ndarray:
        try:
            return self.vectors[token]
        except KeyError:
            raise UnknownKeyError(token, f"token {token!r} not in vocabulary") from None


@dataclass(frozen=True)
class ContextModel:
    """Mean and regularized covariance of the word vectors in a context.

    covariance already includes the ridge applied at fit time; the stored
    ridge is applied again on top when the model is used as a metric, so a
    hand-built model should carry its intended metric in covariance and
    ridge 0.
    """

    mean: np.ndarray
    covariance: np.ndarray
    ridge: float

    def __post_init__(self):
        cov = np.asarray(self.covariance)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise DomainError(f"covariance must be square, got shape {cov.shape}")
        if self.mean.shape != (cov.shape[0],):
            raise DomainError("mean length does not match covariance size")
        if not np.allclose(cov, cov.T, atol=_SYMMETRY_TOL, rtol=0.0):
            raise DomainError("covariance is not symmetric")
        if self.ridge < 0:
            raise DomainError(f"ridge must be >= 0, got {self.ridge}")

    def metric(self) -> np.ndarray:
        return self.covariance + self.ridge * np.eye(self.covariance.shape[0])


@dataclass(frozen=True, eq=False)
class EmbeddingSpace:
    """Ordered ids with their embedding rows."""

    ids: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.ids):
            raise DomainError(
                f"matrix has {self.matrix.shape[0]} rows for {len(self.ids)} ids"
            )
        if len(set(self.ids)) != len(self.ids):
            raise DomainError("duplicate ids in embedding space")
        if not np.all(np.isfinite(self.matrix)):
            raise DomainError("embedding matrix contains non-finite values")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def row(self, record_id: str) -> np.ndarray:
        try:
            return self.matrix[self.ids.index(record_id)]
        except ValueError:
            raise UnknownKeyError(record_id, f"id {record_id!r} not in embedding space") from None


@dataclass(frozen=True)
class SentenceEmbedding:
    """Unit-norm sentence vector; fallback marks an unweighted-mean result."""

    vector: np.ndarray
    fallback: bool = False


def load_word_vectors(path: str | Path) -> WordVectorTable:
    """Read `token v1 ... vdim` lines into a WordVectorTable.

    The first entry fixes the dimensionality; every later line must match.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim < 2:
                    raise FormatError(f"line {lineno}: need at least 2 vector values, got {dim}")
            elif len(values) != dim:
                raise FormatError(f"line {lineno}: expected {dim} values, got {len(values)}")
            if token in vectors:
                raise ConflictError(f"duplicate token {token!r} at line {lineno}")
            try:
                vectors[token] = np.array([float(v) for v in values])
            except ValueError:
                raise FormatError(f"line {lineno}: non-numeric vector value") from None
    if dim is None:
        raise FormatError(f"{path}: no word vector entries")
    return WordVectorTable(dim=dim, vectors=vectors)


def fit_context(
    docs: Sequence[CleanDoc],
    table: WordVectorTable,
    ridge: float | None = None,
) -> ContextModel:
    """Fit mean and covariance over all in-vocabulary token occurrences.

    Tokens are counted with multiplicity. The covariance is the population
    covariance with ridge added to the diagonal; ridge defaults to
    1e-3 * trace / dim.
    """
    rows = [table.vectors[t] for doc in docs for t in doc.tokens if t in table.vectors]
    if not rows:
        raise DomainError("no in-vocabulary tokens in context")
    stack = np.array(rows)
    mean = stack.mean(axis=0)
    centered = stack - mean
    cov = centered.T @ centered / len(rows)
    cov = (cov + cov.T) / 2.0
    if ridge is None:
        ridge = DEFAULT_RIDGE_SCALE * float(np.trace(cov)) / table.dim
    elif ridge < 0:
        raise DomainError(f"ridge must be >= 0, got {ridge}")
    cov = cov + ridge * np.eye(table.dim)
    return ContextModel(mean=mean, covariance=cov, ridge=float(ridge))


def word_salience(token: str, ctx: ContextModel, table: WordVectorTable) -> float:
    """Mahalanobis distance of a token's vector from the context mean."""
    residual = table.vector(token) - ctx.mean
    if not residual.any():
        return 0.0
    try:
        solved = np.linalg.solve(ctx.metric(), residual)
    except np.linalg.LinAlgError:
        raise DomainError("context metric is singular; increase ridge") from None
    return float(np.sqrt(max(0.0, float(residual @ solved))))


def embed_sentence(
    tokens: Sequence[str],
    ctx: ContextModel,
    table: WordVectorTable,
) -> SentenceEmbedding:
    """Salience-weighted mean of in-vocabulary token vectors, unit-normalized.

    Out-of-vocabulary tokens are skipped. When every salience weight is 0
    the unweighted mean is used instead and the result is flagged.
    """
    known = [t for t in tokens if t in table.vectors]
    if not known:
        raise DomainError("no in-vocabulary tokens in sentence")
    stack = np.array([table.vectors[t] for t in known])
    weights = np.array([word_salience(t, ctx, table) for t in known])
    total = float(weights.sum())
    fallback = total == 0.0
    if fallback:
        mean = stack.mean(axis=0)
    else:
        mean = weights @ stack / total
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise DomainError("sentence vector is zero; cannot normalize")
    return SentenceEmbedding(vector=mean / norm, fallback=fallback)


def sim_cosal(a: np.ndarray, b: np.ndarray) -> float:
    """Dot-product similarity of two embeddings."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"embedding dimensions differ: {a.shape} vs {b.shape}")
    return float(a @ b)


def embed_corpus(
    docs: Sequence[CleanDoc],
    ctx: ContextModel,
    table: WordVectorTable,
) -> tuple[EmbeddingSpace, tuple[str, ...]]:
    """Embed every doc; returns the space and ids that hit the mean fallback."""
    rows = []
    fallback_ids = []
    for doc in docs:
        try:
            emb = embed_sentence(doc.tokens, ctx, table)
        except DomainError as exc:
            raise DomainError(f"record {doc.id!r}: {exc}") from None
        rows.append(emb.vector)
        if emb.fallback:
            fallback_ids.append(doc.id)
    matrix = np.array(rows) if rows else np.zeros((0, table.dim))
    return EmbeddingSpace(ids=tuple(d.id for d in docs), matrix=matrix), tuple(fallback_ids)


def import_embeddings(path: str | Path) -> EmbeddingSpace:
    """Read an embedding CSV (header id,e1,...,ed), preserving file order."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not header or header[0] != "id":
            raise SchemaError(f"{path}: first column must be 'id'")
        d = len(header) - 1
        if d < 1:
            raise SchemaError(f"{path}: no embedding columns")
        ids: list[str] = []
        seen: set[str] = set()
        rows = []
        for rownum, row in enumerate(reader, start=1):
            if len(row) != d + 1:
                raise FormatError(f"{path}: row {rownum}: expected {d + 1} fields, got {len(row)}")
            rid = row[0]
            if rid in seen:
                raise ConflictError(f"duplicate id {rid!r} at row {rownum}")
            seen.add(rid)
            ids.append(rid)
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise RowError(rownum, "non-numeric embedding value") from None
    matrix = np.array(rows) if rows else np.zeros((0, d))
    return EmbeddingSpace(ids=tuple(ids), matrix=matrix)


def export_embeddings(space: EmbeddingSpace, path: str | Path) -> None:
    """Write an EmbeddingSpace so import_embeddings round-trips it."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"e{i + 1}" for i in range(space.dim)])
        for rid, row in zip(space.ids, space.matrix):
            writer.writerow([rid] + [repr(float(v)) for v in row])
