"""Block matrices over the spectral bins of ``D`` and scalar Schur multipliers.

A :class:`BlockMatrix` stores ``x_ij = e_i x e_j`` in the eigenbasis of ``D``,
one dense block per pair of occupied bins; zero blocks are simply absent.
Scalar multipliers act blockwise, ``(S * X)_ij = S(i, j) X_ij``, and the
operator norm of the product is controlled by the row norm of ``S`` times
the column norm of ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .binning import SpectralBinning
from .errors import DimMismatch
from .operators import BoundedOperator, as_matrix, operator_norm
from .report import InequalityReport

__all__ = [
    "BlockMatrix",
    "ScalarMultiplier",
    "to_blocks",
    "assemble",
    "schur_scalar_product",
    "row_norm",
    "row_norm_squared",
    "column_norm_blocks",
    "block_derivation",
    "diagonal_derivation",
    "bennett_bound_check",
]


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    binning: SpectralBinning
    blocks: dict

    def __post_init__(self):
        frozen = {}
        sizes = {n: len(idx) for n, idx in self.binning.bins.items()}
        for (i, j), blk in self.blocks.items():
            blk = np.array(blk, dtype=complex)
            expected = (sizes.get(i, 0), sizes.get(j, 0))
            if blk.shape != expected or 0 in expected:
                raise DimMismatch(
                    f"block ({i}, {j}) has shape {blk.shape}, expected {expected}"
                )
            blk.setflags(write=False)
            frozen[(int(i), int(j))] = blk
        object.__setattr__(self, "blocks", frozen)

    def block(self, i: int, j: int) -> np.ndarray:
        """Block ``(i, j)``, materialising zeros for absent keys."""
        blk = self.blocks.get((i, j))
        if blk is None:
            return np.zeros((self.binning.bin_size(i), self.binning.bin_size(j)), complex)
        return blk

    def eigenbasis_matrix(self) -> np.ndarray:
        """Dense matrix of the element in the eigenbasis of ``D``."""
        n = self.binning.D.dim
        out = np.zeros((n, n), dtype=complex)
        sl = _bin_slices(self.binning)
        for (i, j), blk in self.blocks.items():
            out[sl[i], sl[j]] = blk
        return out

    def _map(self, fn) -> BlockMatrix:
        out = {}
        for key, blk in self.blocks.items():
            new = fn(key, blk)
            if new is not None and np.any(new):
                out[key] = new
        return BlockMatrix(self.binning, out)

    def __add__(self, other: BlockMatrix) -> BlockMatrix:
        out = dict(self.blocks)
        for key, blk in other.blocks.items():
            out[key] = out[key] + blk if key in out else blk
        return BlockMatrix(self.binning, out)

    def __neg__(self) -> BlockMatrix:
        return self._map(lambda key, blk: -blk)

    def __sub__(self, other: BlockMatrix) -> BlockMatrix:
        return self + (-other)

    def __mul__(self, scalar) -> BlockMatrix:
        return self._map(lambda key, blk: scalar * blk)

    __rmul__ = __mul__

    def norm(self) -> float:
        """Operator norm of the represented operator."""
        return operator_norm(self.eigenbasis_matrix())


@dataclass(frozen=True)
class ScalarMultiplier:
    """Scalar matrix ``S = (S_ij)`` indexed by integer bin labels.

    ``entry(i, j)`` must accept integer numpy arrays and broadcast.
    ``analytic_row_bound`` is an upper bound for ``sup_i sqrt(sum_j |S_ij|^2)``
    over all of Z x Z, or ``None`` when no such bound is known.
    """

    entry: Callable
    analytic_row_bound: float | None = None
    name: str = "S"

    def __call__(self, i, j):
        return np.asarray(self.entry(np.asarray(i), np.asarray(j)), dtype=complex)

    @classmethod
    def constant(cls, value, name=None) -> ScalarMultiplier:
        def entry(i, j):
            return np.full(np.broadcast(i, j).shape, value, dtype=complex)
        return cls(entry, None, name or f"const({value})")

    @classmethod
    def from_table(cls, labels, table, name="table") -> ScalarMultiplier:
        """Multiplier equal to ``table[a, b]`` at ``(labels[a], labels[b])``, zero elsewhere."""
        labels = [int(v) for v in labels]
        table = np.array(table, dtype=complex)
        pos = {v: k for k, v in enumerate(labels)}

        def lookup(i, j):
            a, b = pos.get(int(i)), pos.get(int(j))
            return 0j if a is None or b is None else table[a, b]

        vec = np.vectorize(lookup, otypes=[complex])
        return cls(lambda i, j: vec(i, j), None, name)


def _bin_slices(binning: SpectralBinning) -> dict:
    """Bins as slices; eigenvalues are sorted, so every bin is a contiguous range."""
    return {n: slice(idx[0], idx[-1] + 1) for n, idx in binning.bins.items()}


def to_blocks(binning: SpectralBinning, x) -> BlockMatrix:
    """Coordinates ``e_i x e_j`` of ``x`` in the eigenbasis of ``D``, per bin pair."""
    m = as_matrix(x)
    u = binning.D.eigenvectors
    if m.shape != u.shape:
        raise DimMismatch(f"operator has shape {m.shape}, binning expects {u.shape}")
    rotated = u.conj().T @ m @ u
    blocks = {}
    sl = _bin_slices(binning)
    for i, rows in sl.items():
        for j, cols in sl.items():
            blk = rotated[rows, cols]
            if np.any(blk):
                blocks[(i, j)] = blk
    return BlockMatrix(binning, blocks)


def assemble(X: BlockMatrix) -> BoundedOperator:
    """Inverse of :func:`to_blocks`."""
    u = X.binning.D.eigenvectors
    return BoundedOperator(u @ X.eigenbasis_matrix() @ u.conj().T)


def schur_scalar_product(S: ScalarMultiplier, X: BlockMatrix) -> BlockMatrix:
    """Blockwise product ``(S * X)_ij = S(i, j) X_ij``."""
    keys = list(X.blocks)
    if not keys:
        return BlockMatrix(X.binning, {})
    ij = np.array(keys, dtype=np.int64)
    values = dict(zip(keys, S(ij[:, 0], ij[:, 1]).tolist()))
    return X._map(lambda key, blk: values[key] * blk)


def row_norm_squared(S: ScalarMultiplier, i: int, window) -> float:
    """``sum_{j in window} |S(i, j)|^2`` for one row, vectorised over the window."""
    j = np.asarray(window, dtype=np.int64)
    vals = np.abs(S(np.int64(i), j)) ** 2
    return float(np.sum(np.sort(vals)))


def row_norm(S: ScalarMultiplier, index_window: Iterable[int]) -> float:
    """Row norm of ``S`` restricted to ``window x window``.

    For a window smaller than Z this is a lower bound for the row norm over
    Z; compare with ``S.analytic_row_bound`` for the full-lattice value.
    """
    window = np.asarray(list(index_window), dtype=np.int64)
    if window.size == 0:
        raise ValueError("index window must be nonempty")
    return float(np.sqrt(max(row_norm_squared(S, i, window) for i in window)))


def column_norm_blocks(X: BlockMatrix) -> float:
    """``max_j sqrt(|| sum_i X_ij* X_ij ||)`` over occupied column bins."""
    grams = {}
    for (i, j), blk in X.blocks.items():
        g = blk.conj().T @ blk
        grams[j] = grams[j] + g if j in grams else g
    if not grams:
        return 0.0
    return float(np.sqrt(max(np.linalg.norm(g, 2) for g in grams.values())))


def diagonal_derivation(X: BlockMatrix, values) -> BlockMatrix:
    """Commutator ``[m(z), X]`` for ``z`` diagonal in the eigenbasis with entries ``values``."""
    values = np.asarray(values)
    bins = X.binning.bins

    def apply(key, blk):
        vi, vj = values[list(bins[key[0]])], values[list(bins[key[1]])]
        return (vi[:, None] - vj[None, :]) * blk

    return X._map(apply)


def block_derivation(kind: str, binning: SpectralBinning, X: BlockMatrix) -> BlockMatrix:
    """Blockwise commutator with ``m(D)`` (``"d"``), ``m(Dbar)`` (``"dbar"``) or ``m(b)`` (``"f"``)."""
    if X.binning is not binning:
        raise DimMismatch("block matrix was built over a different binning")
    if kind == "d":
        values = binning.D.eigenvalues
    elif kind == "dbar":
        values = binning.grid_values
    elif kind == "f":
        values = binning.b_values
    else:
        raise ValueError(f"unknown derivation kind {kind!r}")
    return diagonal_derivation(X, values)


def bennett_bound_check(S: ScalarMultiplier, X: BlockMatrix, use_analytic: bool = False) -> InequalityReport:
    """Compare ``||S * X||`` with ``||S||_r ||X||_c``.

    The row norm is taken over the occupied bins of ``X`` (exact for this
    finite index set) unless ``use_analytic`` is set and ``S`` carries an
    analytic bound.
    """
    occupied = X.binning.occupied
    numeric = row_norm(S, occupied)
    if use_analytic and S.analytic_row_bound is not None:
        row = S.analytic_row_bound
    else:
        row = numeric
    col = column_norm_blocks(X)
    lhs = assemble(schur_scalar_product(S, X)).matrix
    params = {
        "multiplier": S.name,
        "row_norm_window": numeric,
        "row_norm_analytic": S.analytic_row_bound,
        "row_norm_used": row,
        "column_norm": col,
        "occupied_bins": len(occupied),
    }
    return InequalityReport.build("Bennett", operator_norm(lhs), row * col, params)
