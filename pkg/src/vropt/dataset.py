"""Sparse datasets for binary classification: LIBSVM I/O, synthetic generation,
row normalization.

Conventions: feature indices are 1-based on disk (LIBSVM) and 0-based in memory;
labels are strictly -1/+1; rows are stored in canonical sparse form (strictly
increasing indices, no explicit zeros). Datasets are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SparseVector",
    "Dataset",
    "LibsvmParseError",
    "parse_libsvm",
    "serialize_libsvm",
    "write_libsvm",
    "generate_synthetic",
    "normalize_rows",
    "add_bias_column",
]


class LibsvmParseError(ValueError):
    """Malformed LIBSVM input; the message carries the 1-based line number."""


class SparseVector:
    """One feature row: parallel (indices, values) arrays plus the row dimension.

    Invariants: indices strictly increasing, all < dim; no stored zero values.
    Arrays are read-only views; instances are immutable.
    """

    __slots__ = ("indices", "values", "dim")

    def __init__(self, indices: Sequence[int], values: Sequence[float], dim: int):
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if int(dim) < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= dim:
                raise ValueError(f"indices must lie in [0, {dim}), got range "
                                 f"[{idx[0]}, {idx[-1]}]")
            if np.any(val == 0.0):
                raise ValueError("canonical sparse form stores no zero values")
        idx = idx.copy()
        val = val.copy()
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)
        object.__setattr__(self, "dim", int(dim))

    def __setattr__(self, name, value):
        raise AttributeError("SparseVector is immutable")

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def sq_norm(self) -> float:
        return float(self.values @ self.values)

    def dot(self, x: np.ndarray) -> float:
        """Inner product with a dense vector of matching dimension."""
        return float(self.values @ x[self.indices])

    def add_scaled_into(self, coeff: float, out: np.ndarray) -> None:
        """out[indices] += coeff * values (scatter-add, in place)."""
        out[self.indices] += coeff * self.values

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (self.dim == other.dim
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.dim, self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return f"SparseVector(nnz={self.nnz}, dim={self.dim})"


class Dataset:
    """Immutable collection of (row, label) pairs with precomputed row norms.

    Attributes:
        rows: tuple of SparseVector, length n.
        labels: int8 array of -1/+1, length n.
        dim: feature dimension shared by every row.
        row_sq_norms: float array, exact sum of squared stored values per row.
    """

    __slots__ = ("rows", "labels", "dim", "row_sq_norms")

    def __init__(self, rows: Sequence[SparseVector], labels: Sequence[int], dim: int):
        rows = tuple(rows)
        lab = np.asarray(labels, dtype=np.int8)
        if len(rows) < 1:
            raise ValueError("dataset needs at least one row")
        if lab.shape != (len(rows),):
            raise ValueError(f"{len(rows)} rows but {lab.size} labels")
        if not np.all(np.isin(lab, (-1, 1))):
            bad = lab[~np.isin(lab, (-1, 1))][0]
            raise ValueError(f"labels must be -1 or +1, got {bad}")
        for i, r in enumerate(rows):
            if r.dim != dim:
                raise ValueError(f"row {i} has dim {r.dim}, dataset dim is {dim}")
        norms = np.array([r.sq_norm() for r in rows])
        lab = lab.copy()
        lab.setflags(write=False)
        norms.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "row_sq_norms", norms)

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.dim == other.dim
                and np.array_equal(self.labels, other.labels)
                and self.rows == other.rows)

    def __repr__(self):
        return f"Dataset(n={self.n}, dim={self.dim})"


def _parse_line(line: str, line_no: int) -> tuple[int, list[int], list[float]]:
    tokens = line.split()
    label_tok = tokens[0]
    if label_tok in ("+1", "1"):
        label = 1
    elif label_tok in ("-1", "0"):
        label = -1
    else:
        raise LibsvmParseError(f"line {line_no}: unrecognized label {label_tok!r}")
    indices: list[int] = []
    values: list[float] = []
    prev = 0  # file indices are 1-based, so 0 floors the increasing check
    for tok in tokens[1:]:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise LibsvmParseError(f"line {line_no}: malformed token {tok!r}")
        try:
            idx = int(idx_s)
            val = float(val_s)
        except ValueError:
            raise LibsvmParseError(
                f"line {line_no}: malformed token {tok!r}") from None
        if idx < 1:
            raise LibsvmParseError(f"line {line_no}: index {idx} is not positive")
        if idx <= prev:
            raise LibsvmParseError(
                f"line {line_no}: index {idx} not increasing (after {prev})")
        prev = idx
        if val == 0.0:  # zero entries are dropped to keep rows canonical
            continue
        indices.append(idx - 1)
        values.append(val)
    return label, indices, values


def parse_libsvm(source: str | Iterable[str], dim: int | None = None) -> Dataset:
    """Parse LIBSVM text ("label idx:val idx:val ...", indices 1-based).

    Args:
        source: the file content as a string, or an iterable of lines
            (an open text file works).
        dim: optional dimension override, e.g. to align train/test columns;
            must be >= the largest index observed. Defaults to that maximum.

    Returns:
        Dataset with 0-based column indices.

    Raises:
        LibsvmParseError: malformed token, non-increasing indices within a
            line, or unrecognized label; the message names the line number.
    """
    lines = source.splitlines() if isinstance(source, str) else source
    labels: list[int] = []
    parsed: list[tuple[list[int], list[float]]] = []
    max_idx = 0  # 0-based; stays 0 if every row is empty
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        label, idx, val = _parse_line(line, line_no)
        labels.append(label)
        parsed.append((idx, val))
        if idx:
            max_idx = max(max_idx, idx[-1])
    if not labels:
        raise LibsvmParseError("no data rows found")
    inferred = max_idx + 1
    if dim is None:
        dim = inferred
    elif dim < inferred:
        raise LibsvmParseError(
            f"dim override {dim} is smaller than observed dimension {inferred}")
    rows = [SparseVector(i, v, dim) for i, v in parsed]
    return Dataset(rows, labels, dim)


def serialize_libsvm(ds: Dataset) -> str:
    """Canonical writer: "label idx:val ...", 1-based indices, shortest
    round-trip decimals, one trailing newline."""
    out = []
    for row, label in zip(ds.rows, ds.labels):
        parts = ["+1" if label == 1 else "-1"]
        parts.extend(f"{int(i) + 1}:{float(v)!r}"
                     for i, v in zip(row.indices, row.values))
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def write_libsvm(ds: Dataset, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(serialize_libsvm(ds))


def generate_synthetic(n: int, d: int, seed: int, separation: float) -> Dataset:
    """Generate a two-cluster binary classification dataset, sparsified.

    Rows are drawn from label-conditioned Gaussians centered at
    +-(separation/2) * u for a random unit direction u, then entries are
    dropped with probability 1/2 (keeping at least one entry per row). The
    result is a pure function of the arguments; both labels always occur.

    Args:
        n: number of rows, >= 2.
        d: feature dimension, >= 1.
        seed: RNG seed.
        separation: distance between the two cluster centers.

    Raises:
        ValueError: n < 2 (cannot place both labels) or d < 1.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 to place both labels, got {n}")
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    labels = np.where(np.arange(n) < (n + 1) // 2, 1, -1)[rng.permutation(n)]
    dense = labels[:, None] * (separation / 2.0) * direction + rng.standard_normal((n, d))
    keep = rng.random((n, d)) < 0.5
    rows = []
    for i in range(n):
        mask = keep[i]
        if not mask.any():
            mask = np.zeros(d, dtype=bool)
            mask[int(np.argmax(np.abs(dense[i])))] = True
        idx = np.flatnonzero(mask & (dense[i] != 0.0))
        rows.append(SparseVector(idx, dense[i, idx], d))
    return Dataset(rows, labels, d)


def normalize_rows(ds: Dataset) -> Dataset:
    """Scale every row to unit Euclidean norm; returns a new Dataset.

    Raises:
        ValueError: some row has zero norm (names the row index).
    """
    rows = []
    for i, row in enumerate(ds.rows):
        norm = np.sqrt(row.sq_norm())
        if norm == 0.0:
            raise ValueError(f"row {i} has zero norm and cannot be normalized")
        rows.append(SparseVector(row.indices, row.values / norm, ds.dim))
    return Dataset(rows, ds.labels, ds.dim)


def add_bias_column(ds: Dataset) -> Dataset:
    """Append a constant-1 feature as the last column (dim grows by one)."""
    dim = ds.dim + 1
    rows = [
        SparseVector(np.append(r.indices, ds.dim), np.append(r.values, 1.0), dim)
        for r in ds.rows
    ]
    return Dataset(rows, ds.labels, dim)
