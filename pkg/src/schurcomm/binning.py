"""Unit-grid spectral binning of a Hermitian operator.

Eigenvalue ``lam`` is assigned to bin ``n`` with ``n - 1/2 <= lam < n + 1/2``.
From the bins one gets the discrete approximant ``Dbar = sum n e_n``, the
perturbation ``b = D - Dbar`` (``||b|| <= 1/2``) and ``c = |D| - |Dbar|``
(``||c|| <= 1/2`` because ``||lam| - |n|| <= |lam - n|``).  All four
operators share the eigenbasis of ``D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import BoundedOperator, HermitianOperator

__all__ = ["SpectralBinning", "bin_index", "build_binning"]


def bin_index(lam: float, h: float = 1.0) -> int:
    """Index ``n`` of the half-open cell ``[h(n - 1/2), h(n + 1/2))`` holding ``lam``."""
    return math.floor(lam / h + 0.5)


@dataclass(frozen=True, eq=False)
class SpectralBinning:
    D: HermitianOperator
    h: float
    labels: np.ndarray
    """Bin label of each eigenvector index (aligned with ``D.eigenvalues``)."""
    bins: dict
    """Map bin label -> tuple of eigenvector indices."""
    occupied: tuple
    Dbar: HermitianOperator
    b: BoundedOperator
    c: BoundedOperator

    @property
    def grid_values(self) -> np.ndarray:
        """Eigenvalues of ``Dbar`` in the eigenbasis order of ``D``."""
        return self.h * self.labels

    @property
    def b_values(self) -> np.ndarray:
        return self.D.eigenvalues - self.grid_values

    @property
    def c_values(self) -> np.ndarray:
        return np.abs(self.D.eigenvalues) - np.abs(self.grid_values)

    def projection(self, n: int) -> np.ndarray:
        """Spectral projection ``e_n`` as a dense matrix (zero if bin ``n`` is empty)."""
        u = self.D.eigenvectors[:, list(self.bins.get(n, ()))]
        return u @ u.conj().T

    def bin_size(self, n: int) -> int:
        return len(self.bins.get(n, ()))


def build_binning(D: HermitianOperator, h: float = 1.0) -> SpectralBinning:
    """Partition the spectrum of ``D`` into grid cells of length ``h``.

    Grid lengths other than 1 are for exploration only; the inequality
    checkers reject them because their constants assume ``h = 1``.
    """
    if not h > 0:
        raise ValueError("grid length must be positive")
    lam = D.eigenvalues
    labels = np.floor(lam / h + 0.5).astype(np.int64)
    labels.setflags(write=False)
    bins = {}
    for idx, n in enumerate(labels.tolist()):
        bins.setdefault(n, []).append(idx)
    bins = {n: tuple(v) for n, v in sorted(bins.items())}
    u = D.eigenvectors
    grid = h * labels
    dbar = HermitianOperator.from_spectrum(grid, u)
    b = BoundedOperator((u * (lam - grid)) @ u.conj().T)
    c = BoundedOperator((u * (np.abs(lam) - np.abs(grid))) @ u.conj().T)
    return SpectralBinning(
        D=D, h=float(h), labels=labels, bins=bins, occupied=tuple(bins),
        Dbar=dbar, b=b, c=c,
    )
