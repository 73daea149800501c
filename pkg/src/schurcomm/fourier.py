"""Truncated Fourier model on the circle.

In the basis ``e^{in theta}, n = -M..M`` the derivative operator is
``D = diag(-M, ..., M)``; every spectral bin is one-dimensional and
commutators with functions of ``D`` are exact Schur products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binning import SpectralBinning, build_binning
from .blocks import ScalarMultiplier, assemble, schur_scalar_product, to_blocks
from .errors import DimMismatch
from .functions import difference_quotient
from .operators import HermitianOperator, apply_function, as_matrix, commutator, operator_norm

__all__ = ["CircleModel", "exact_schur_identity", "derivation_as_schur", "schur_threshold", "SCHUR_RTOL"]

SCHUR_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CircleModel:
    M: int
    D: HermitianOperator
    binning: SpectralBinning

    @classmethod
    def build(cls, M: int) -> CircleModel:
        if M < 1:
            raise ValueError("M must be a positive integer")
        labels = np.arange(-M, M + 1, dtype=float)
        D = HermitianOperator.from_spectrum(labels, np.eye(2 * M + 1))
        return cls(M, D, build_binning(D))

    @property
    def dim(self) -> int:
        return 2 * self.M + 1

    @property
    def labels(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)


def _check(model, y):
    m = as_matrix(y)
    if m.shape != (model.dim, model.dim):
        raise DimMismatch(f"y has shape {m.shape}, model needs {(model.dim, model.dim)}")
    return m


def exact_schur_identity(model: CircleModel, g, y) -> float:
    """``||[g(D), y] - S * [D, y]||`` with ``S_ij = (g(i) - g(j))/(i - j)``."""
    y = _check(model, y)
    lhs = commutator(apply_function(model.D, g), y)
    S = difference_quotient(g, 1)
    rhs = assemble(schur_scalar_product(S, to_blocks(model.binning, commutator(model.D, y))))
    return operator_norm(lhs - rhs)


def derivation_as_schur(model: CircleModel, y) -> float:
    """``||[D, y] - (i - j) * y||``."""
    y = _check(model, y)
    S = ScalarMultiplier(lambda i, j: (i - j).astype(complex), None, "i-j")
    rhs = assemble(schur_scalar_product(S, to_blocks(model.binning, y)))
    return operator_norm(commutator(model.D, y) - rhs)


def schur_threshold(model: CircleModel, g, y) -> float:
    """Residual allowance ``1e-12 (1 + ||g(D)||) ||y||``."""
    return SCHUR_RTOL * (1.0 + operator_norm(apply_function(model.D, g))) * operator_norm(y)
