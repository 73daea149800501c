"""Dense operator arithmetic: Hermitian eigendecomposition, functional
calculus, commutators and the operator norm.

Norms of derivations are reported through ``ad_D(y) = [D, y]``.  The weak
derivative ``delta(y) = i[D, y]`` differs by a unimodular factor, so
``||delta^k(y)|| = ||ad_D^k(y)||`` and nothing downstream carries factors
of ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, FunctionUndefinedAtSpectrum, NotHermitian, NotSquare

HERMITIAN_RTOL = 1e-12
RECONSTRUCTION_RTOL = 1e-10

__all__ = [
    "BoundedOperator",
    "HermitianOperator",
    "make_hermitian",
    "apply_function",
    "commutator",
    "iterated_commutator",
    "operator_norm",
    "as_matrix",
]


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class BoundedOperator:
    """A dense complex ``dim x dim`` matrix, immutable after construction."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotSquare(f"expected a square matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def H(self) -> BoundedOperator:
        return BoundedOperator(self.matrix.conj().T)

    def __add__(self, other):
        return BoundedOperator(self.matrix + as_matrix(other))

    def __sub__(self, other):
        return BoundedOperator(self.matrix - as_matrix(other))

    def __matmul__(self, other):
        return BoundedOperator(self.matrix @ as_matrix(other))

    def __mul__(self, scalar):
        return BoundedOperator(self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return BoundedOperator(-self.matrix)


@dataclass(frozen=True, eq=False)
class HermitianOperator(BoundedOperator):
    """Hermitian matrix together with its eigendecomposition.

    ``eigenvalues`` are ascending and the columns of ``eigenvectors`` are the
    matching orthonormal eigenvectors.  Use :func:`make_hermitian` to build
    one from a matrix, or :meth:`from_spectrum` when the spectrum is known
    exactly (for instance when exact zero eigenvalues matter).
    """

    eigenvalues: np.ndarray = field(default=None)
    eigenvectors: np.ndarray = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        w = np.array(self.eigenvalues, dtype=float, copy=True)
        w.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))
        if w.shape != (self.dim,) or self.eigenvectors.shape != self.matrix.shape:
            raise DimMismatch("eigendecomposition does not match the matrix shape")

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors) -> HermitianOperator:
        """Assemble ``U diag(eigenvalues) U*`` keeping the given spectrum verbatim.

        Eigenvalues are sorted ascending (columns of ``U`` permuted along).
        """
        w = np.asarray(eigenvalues, dtype=float)
        u = np.asarray(eigenvectors, dtype=complex)
        order = np.argsort(w, kind="stable")
        w, u = w[order], u[:, order]
        m = (u * w) @ u.conj().T
        m = 0.5 * (m + m.conj().T)
        return cls(m, w, u)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


def as_matrix(x) -> np.ndarray:
    if isinstance(x, BoundedOperator):
        return x.matrix
    return np.asarray(x, dtype=complex)


def _check_same_dim(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


def make_hermitian(matrix) -> HermitianOperator:
    """Validate a Hermitian matrix and cache its eigendecomposition.

    Raises
    ------
    NotSquare
        If ``matrix`` is not square.
    NotHermitian
        If ``max |M - M*| > 1e-12 ||M||``; the offending asymmetry is
        attached to the exception.
    """
    m = np.array(as_matrix(matrix), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    scale = np.linalg.norm(m, 2) if m.size else 0.0
    asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if asym > HERMITIAN_RTOL * scale:
        raise NotHermitian(
            f"matrix is not Hermitian: max asymmetry {asym:.3e} exceeds "
            f"{HERMITIAN_RTOL:g} * ||M|| = {HERMITIAN_RTOL * scale:.3e}",
            asym,
        )
    m = 0.5 * (m + m.conj().T)
    w, u = np.linalg.eigh(m)
    return HermitianOperator(m, w, u)


def apply_function(D: HermitianOperator, g) -> BoundedOperator:
    """Functional calculus ``g(D) = U diag(g(lambda_i)) U*``.

    ``g`` is any callable real -> complex, evaluated once per eigenvalue.
    Raises :class:`FunctionUndefinedAtSpectrum` if ``g`` fails or returns a
    non-finite value at an eigenvalue.
    """
    values = np.empty(D.dim, dtype=complex)
    with np.errstate(all="ignore"):
        for k, lam in enumerate(D.eigenvalues):
            try:
                v = complex(g(float(lam)))
            except (ValueError, ZeroDivisionError, OverflowError, ArithmeticError) as exc:
                raise FunctionUndefinedAtSpectrum(
                    f"function undefined at eigenvalue {lam!r}: {exc}", float(lam)
                ) from exc
            if not np.isfinite(v):
                raise FunctionUndefinedAtSpectrum(
                    f"function is not finite at eigenvalue {lam!r}", float(lam)
                )
            values[k] = v
    u = D.eigenvectors
    return BoundedOperator((u * values) @ u.conj().T)


def commutator(a, b) -> BoundedOperator:
    """Return ``ab - ba``."""
    ma, mb = as_matrix(a), as_matrix(b)
    _check_same_dim(ma, mb)
    return BoundedOperator(ma @ mb - mb @ ma)


def iterated_commutator(D, y, k: int) -> BoundedOperator:
    """Return ``ad_D^k(y) = [D, [D, ... [D, y]...]]`` with ``k`` brackets.

    ``D`` may be any operator (e.g. ``|D|`` from :func:`apply_function`).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    md, x = as_matrix(D), as_matrix(y)
    _check_same_dim(md, x)
    for _ in range(k):
        x = md @ x - x @ md
    return BoundedOperator(x)


def operator_norm(x) -> float:
    """Largest singular value."""
    m = as_matrix(x)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
