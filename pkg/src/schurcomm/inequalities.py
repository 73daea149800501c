"""One checker per commutator inequality.

Each checker computes the left-hand side exactly (dense functional calculus
and matrix products), assembles the right-hand side from the theorem's
constants and the norms ``||ad_D^k(y)||``, and returns an
:class:`~schurcomm.report.InequalityReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import functions as fn
from .binning import build_binning
from .blocks import assemble, block_derivation, schur_scalar_product, to_blocks
from .errors import (
    AmbiguousKernel,
    HolderBoundViolated,
    NoPositiveSpectrum,
    NonInvertible,
    NotPositive,
    POutOfRange,
)
from .operators import (
    BoundedOperator,
    HermitianOperator,
    apply_function,
    as_matrix,
    commutator,
    iterated_commutator,
    operator_norm,
)
from .report import InequalityReport

__all__ = [
    "PositiveInstance",
    "KERNEL_RTOL",
    "LOG_INTERP_CONSTANT",
    "OPTIMIZED_LOG_CONSTANT",
    "delta_norms",
    "check_holder",
    "holder_chain",
    "check_abs_cont",
    "check_lp",
    "check_gbeta",
    "check_tilde_log",
    "check_e0_commutator",
    "check_log_interp",
    "tilde_log_scaling_deviation",
    "check_abs_first",
    "check_abs_higher",
    "lp_coefficients",
    "gbeta_coefficients",
    "tilde_log_noninv_coefficients",
    "abs_higher_coefficients",
]

KERNEL_RTOL = 1e-12
LOG_INTERP_CONSTANT = 13.0
OPTIMIZED_LOG_CONSTANT = 12.0 * (5.0 / 4.0) ** (1.0 / 3.0)
SQRT3_PI = math.pi / math.sqrt(3.0)


@dataclass(frozen=True, eq=False)
class PositiveInstance:
    """A positive ``D`` whose kernel is known by construction.

    ``D`` holds its spectrum verbatim, so kernel eigenvalues are exact
    zeros and functions like ``tilde-log`` see them as such.
    """

    D: HermitianOperator
    kernel_indices: tuple
    beta: float

    @property
    def invertible(self) -> bool:
        return not self.kernel_indices

    @property
    def E0(self) -> BoundedOperator:
        """Spectral projection onto the kernel of ``D``."""
        u = self.D.eigenvectors[:, list(self.kernel_indices)]
        return BoundedOperator(u @ u.conj().T)

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors) -> PositiveInstance:
        """Build from non-negative eigenvalues; exact zeros form the kernel."""
        w = np.asarray(eigenvalues, dtype=float)
        if np.any(w < 0):
            raise NotPositive("eigenvalues must be non-negative")
        D = HermitianOperator.from_spectrum(w, eigenvectors)
        kernel = tuple(int(k) for k in np.flatnonzero(D.eigenvalues == 0.0))
        _guard_kernel(np.linalg.eigvalsh(D.matrix), len(kernel), _scale(D))
        return cls._finish(D, kernel)

    @classmethod
    def from_operator(cls, D: HermitianOperator, kernel_dim: int = 0) -> PositiveInstance:
        """Declare the ``kernel_dim`` smallest eigenvalues of ``D`` to be its kernel.

        Those eigenvalues are replaced by exact zeros.  Raises
        :class:`AmbiguousKernel` if the numeric threshold disagrees with the
        declaration and :class:`NotPositive` for clearly negative spectrum.
        """
        scale = _scale(D)
        w = np.array(D.eigenvalues)
        if np.any(w < -KERNEL_RTOL * scale):
            raise NotPositive(f"D has negative eigenvalue {w.min():.3e}")
        _guard_kernel(w, kernel_dim, scale)
        w[:kernel_dim] = 0.0
        w = np.maximum(w, 0.0)
        snapped = HermitianOperator.from_spectrum(w, D.eigenvectors)
        return cls._finish(snapped, tuple(range(kernel_dim)))

    @classmethod
    def _finish(cls, D, kernel):
        positive = D.eigenvalues[D.eigenvalues > 0]
        if positive.size == 0:
            raise NoPositiveSpectrum("D has no positive eigenvalue")
        return cls(D, kernel, float(positive.min()))


def _scale(D) -> float:
    return float(np.max(np.abs(D.eigenvalues))) if D.dim else 0.0


def _guard_kernel(eigenvalues, kernel_dim, scale):
    numeric = int(np.count_nonzero(np.abs(eigenvalues) <= KERNEL_RTOL * scale))
    if numeric != kernel_dim:
        raise AmbiguousKernel(
            f"declared kernel dimension {kernel_dim} but {numeric} eigenvalues fall "
            f"below {KERNEL_RTOL:g} * ||D||"
        )


def _digest(D) -> dict:
    return {
        "dim": int(D.dim),
        "spectral_min": float(D.eigenvalues[0]),
        "spectral_max": float(D.eigenvalues[-1]),
    }


def delta_norms(D, y, kmax: int) -> list:
    """``[||ad_D^k(y)|| for k = 0..kmax]``."""
    out = []
    x = as_matrix(y)
    md = as_matrix(D)
    for k in range(kmax + 1):
        out.append(operator_norm(x))
        x = md @ x - x @ md
    return out


def _default_grid(D):
    return fn.default_grid(float(D.eigenvalues[0]), float(D.eigenvalues[-1]))


def _require_holder(g, hb, D):
    verdict = fn.verify_holder_bound(g, hb, _default_grid(D))
    if not verdict.passed:
        raise HolderBoundViolated(
            f"{g.name} violates ({hb.alpha}, {hb.A}, {hb.B}) at {verdict.worst_pair} "
            f"by {verdict.worst_excess:.3e}",
            verdict.worst_pair,
        )


def check_holder(D: HermitianOperator, y, g: fn.FunctionSpec) -> InequalityReport:
    """``||[g(D), y]|| <= 2(A+B)(||y|| + r sum_k C(n,k) ||delta^k(y)||)``.

    ``n`` is the smallest integer above ``alpha + 1/2`` and
    ``r = sqrt((n - alpha)/(2n - 2 alpha - 1))``.  The sum runs over
    ``k = 0..n`` including ``k = 0``, so ``||y||`` also appears inside it.
    """
    hb = g.holder
    if hb is None:
        raise ValueError(f"{g.name} declares no Hölder bound")
    _require_holder(g, hb, D)
    n = hb.n
    r = math.sqrt((n - hb.alpha) / (2 * n - 2 * hb.alpha - 1))
    norms = delta_norms(D, y, n)
    rhs = 2 * (hb.A + hb.B) * (norms[0] + r * sum(math.comb(n, k) * norms[k] for k in range(n + 1)))
    lhs = operator_norm(commutator(apply_function(D, g), y))
    params = {
        "function": g.describe(),
        "alpha": hb.alpha, "A": hb.A, "B": hb.B, "n": n,
        "row_factor": 2 * (hb.A + hb.B) * r,
    }
    return InequalityReport.build("HoldThm", lhs, rhs, params, _digest(D))


def holder_chain(D: HermitianOperator, y, g: fn.FunctionSpec) -> dict:
    """The intermediate inequalities behind :func:`check_holder`.

    Returns reports keyed by step:

    ``"gD-gDbar-norm"``
        ``||g(D) - g(Dbar)|| <= A + B (1/2)^alpha``
    ``"gD-gDbar"``
        ``||[g(D) - g(Dbar), y]|| <= 2 (A + B) ||y||``
    ``"dbar-estimate"``
        ``||dbar^n(m(y))|| <= sum_k C(n,k) ||delta^k(y)||``
    ``"schur-step"``
        ``||[g(Dbar), y]|| <= ||S||_r ||dbar^n(m(y))||``

    The ``"schur-step"`` report also records the residual of the identity
    ``[g(Dbar), y] = S * dbar^n(m(y))`` in ``params["identity_residual"]``.
    """
    hb = g.holder
    if hb is None:
        raise ValueError(f"{g.name} declares no Hölder bound")
    n = hb.n
    binning = build_binning(D)
    gD = apply_function(D, g)
    gDbar = apply_function(binning.Dbar, g)
    diff = gD - gDbar
    digest = _digest(D)
    base = {"function": g.describe(), "alpha": hb.alpha, "A": hb.A, "B": hb.B, "n": n}
    y_norm = operator_norm(y)
    out = {}
    out["gD-gDbar-norm"] = InequalityReport.build(
        "HoldThm", operator_norm(diff), hb.A + hb.B * 0.5**hb.alpha,
        {**base, "step": "gD-gDbar-norm"}, digest)
    out["gD-gDbar"] = InequalityReport.build(
        "HoldThm", operator_norm(commutator(diff, y)), 2 * (hb.A + hb.B) * y_norm,
        {**base, "step": "gD-gDbar"}, digest)

    X = to_blocks(binning, y)
    for _ in range(n):
        X = block_derivation("dbar", binning, X)
    dbar_n = X.norm()
    norms = delta_norms(D, y, n)
    out["dbar-estimate"] = InequalityReport.build(
        "HoldThm", dbar_n, sum(math.comb(n, k) * norms[k] for k in range(n + 1)),
        {**base, "step": "dbar-estimate"}, digest)

    S = fn.holder_multiplier(g, n)
    lhs_op = commutator(gDbar, y)
    residual = operator_norm(lhs_op - assemble(schur_scalar_product(S, X)))
    out["schur-step"] = InequalityReport.build(
        "HoldThm", operator_norm(lhs_op), S.analytic_row_bound * dbar_n,
        {**base, "step": "schur-step", "identity_residual": residual}, digest)
    return out


def check_abs_cont(D: HermitianOperator, y, g: fn.FunctionSpec, split=None) -> InequalityReport:
    """``||[g(D), y]|| <= (||l||_1 + ||u||_inf)(4||y|| + 4||delta(y)|| + 2||delta^2(y)||)``.

    ``split = (||l||_1, ||u||_inf)`` defaults to ``g.split``.  Its
    admissibility is checked through the Hölder bound ``(1, ||l||_1, ||u||_inf)``
    it implies.
    """
    split = g.split if split is None else split
    if split is None:
        raise ValueError(f"no L1+Linf decomposition supplied for {g.name}")
    const = fn.l1_linf_norm(*split)
    _require_holder(g, fn.HolderBound(1.0, float(split[0]), float(split[1])), D)
    norms = delta_norms(D, y, 2)
    rhs = const * (4 * norms[0] + 4 * norms[1] + 2 * norms[2])
    lhs = operator_norm(commutator(apply_function(D, g), y))
    params = {"function": g.describe(), "l1": float(split[0]), "linf": float(split[1]),
              "l1_linf": const}
    return InequalityReport.build("AbsCont", lhs, rhs, params, _digest(D))


def lp_coefficients(p: float) -> tuple:
    """Coefficients of ``||g'||_p ||y||`` and ``||g'||_p ||delta(y)||``."""
    if not 1 <= p < 2:
        raise POutOfRange(f"p must lie in [1, 2), got {p}")
    q = 1.0 / math.sqrt(2.0 - p)
    return 2.0 * (1.0 + q), 2.0 * q


def check_lp(D: HermitianOperator, y, g: fn.FunctionSpec, p: float, method="auto") -> InequalityReport:
    """``||[g(D), y]|| <= 2||g'||_p((1 + 1/sqrt(2-p))||y|| + (1/sqrt(2-p))||delta(y)||)``, ``1 <= p < 2``."""
    cy, cd = lp_coefficients(p)
    gp = fn.lp_norm_of_derivative(g, p, method)
    norms = delta_norms(D, y, 1)
    rhs = gp * (cy * norms[0] + cd * norms[1])
    lhs = operator_norm(commutator(apply_function(D, g), y))
    params = {"function": g.describe(), "p": p, "lp_norm": gp}
    return InequalityReport.build("Lp", lhs, rhs, params, _digest(D))


def gbeta_coefficients(beta: float) -> tuple:
    """``(8 beta^(-1/3), 5 beta^(-1/3))``."""
    s = beta ** (-1.0 / 3.0)
    return 8.0 * s, 5.0 * s


def _require_positive(instance):
    if not isinstance(instance, PositiveInstance):
        raise NoPositiveSpectrum("a PositiveInstance is required")


def check_gbeta(instance: PositiveInstance, y) -> InequalityReport:
    """``||[g_beta(D), y]|| <= beta^(-1/3)(8||y|| + 5||delta(y)||)``."""
    _require_positive(instance)
    D, beta = instance.D, instance.beta
    g = fn.log_beta(beta)
    cy, cd = gbeta_coefficients(beta)
    norms = delta_norms(D, y, 1)
    lhs = operator_norm(commutator(apply_function(D, g), y))
    params = {
        "beta": beta,
        "kernel_dim": len(instance.kernel_indices),
        # the Lp route with p = 3/2 gives these, rounded up to 8 and 5
        "exact_y_coefficient": 2 * 2 ** (2 / 3) * (1 + math.sqrt(2)),
        "exact_delta_coefficient": 2 * 2 ** (2 / 3) * math.sqrt(2),
    }
    return InequalityReport.build("GBeta", lhs, cy * norms[0] + cd * norms[1], params, _digest(D))


def tilde_log_noninv_coefficients(beta: float) -> tuple:
    """``(8 beta^(-1/3) + |log beta|, 5 beta^(-1/3))``."""
    cy, cd = gbeta_coefficients(beta)
    return cy + abs(math.log(beta)), cd


def check_tilde_log(instance: PositiveInstance, y) -> InequalityReport:
    """Commutator with ``tilde-log(D)`` in both the invertible and kernel cases.

    With a kernel, ``tilde-log(D)`` is formed as ``g_beta(D) - log(beta) E0``
    and the report records ``||[E0, y]||`` and the discrepancy with direct
    functional calculus.
    """
    _require_positive(instance)
    D, beta = instance.D, instance.beta
    norms = delta_norms(D, y, 1)
    if instance.invertible:
        lhs = operator_norm(commutator(apply_function(D, fn.tilde_log()), y))
        cy, cd = gbeta_coefficients(beta)
        params = {"beta": beta, "branch": "invertible"}
        return InequalityReport.build("TildeLogInv", lhs, cy * norms[0] + cd * norms[1],
                                      params, _digest(D))
    E0 = instance.E0
    tl = apply_function(D, fn.log_beta(beta)) - math.log(beta) * E0
    lhs = operator_norm(commutator(tl, y))
    cy, cd = tilde_log_noninv_coefficients(beta)
    params = {
        "beta": beta,
        "branch": "kernel",
        "kernel_dim": len(instance.kernel_indices),
        "e0_commutator_norm": operator_norm(commutator(E0, y)),
        "calculus_discrepancy": operator_norm(tl - apply_function(D, fn.tilde_log())),
    }
    return InequalityReport.build("TildeLogNonInv", lhs, cy * norms[0] + cd * norms[1],
                                  params, _digest(D))


def check_e0_commutator(instance: PositiveInstance, y) -> InequalityReport:
    """``||[E0, y]|| <= ||y||`` for the kernel projection ``E0``."""
    _require_positive(instance)
    lhs = operator_norm(commutator(instance.E0, y))
    params = {"step": "E0-commutator", "kernel_dim": len(instance.kernel_indices)}
    return InequalityReport.build("TildeLogNonInv", lhs, operator_norm(y), params,
                                  _digest(instance.D))


def tilde_log_scaling_deviation(instance: PositiveInstance, y, s: float) -> float:
    """Relative change of ``||[tilde-log(sD), y]||`` against ``s = 1``."""
    D = instance.D
    base = operator_norm(commutator(apply_function(D, fn.tilde_log()), y))
    sD = HermitianOperator.from_spectrum(s * D.eigenvalues, D.eigenvectors)
    scaled = operator_norm(commutator(apply_function(sD, fn.tilde_log()), y))
    if base == 0.0:
        return scaled
    return abs(scaled - base) / base


def check_log_interp(instance: PositiveInstance, y, scales=(0.25, 4.0)) -> InequalityReport:
    """``||[tilde-log(D), y]|| <= 13 beta^(-1/3) ||y||^(2/3) ||delta(y)||^(1/3)`` for invertible ``D``.

    Also records the worst relative scaling deviation over ``scales`` and
    the optimised constant ``12 (5/4)^(1/3)``.
    """
    _require_positive(instance)
    if not instance.invertible:
        raise NonInvertible("D has a kernel; the interpolation bound needs D invertible")
    D, beta = instance.D, instance.beta
    norms = delta_norms(D, y, 1)
    lhs = operator_norm(commutator(apply_function(D, fn.tilde_log()), y))
    rhs = LOG_INTERP_CONSTANT * beta ** (-1 / 3) * norms[0] ** (2 / 3) * norms[1] ** (1 / 3)
    params = {
        "beta": beta,
        "optimized_constant": OPTIMIZED_LOG_CONSTANT,
        "constant_ok": OPTIMIZED_LOG_CONSTANT <= LOG_INTERP_CONSTANT,
        "scaling_deviation": max(
            (tilde_log_scaling_deviation(instance, y, s) for s in scales), default=0.0),
    }
    return InequalityReport.build("LogInterp13", lhs, rhs, params, _digest(D))


def check_abs_first(D: HermitianOperator, y) -> InequalityReport:
    """``||[|D|, y]|| <= 4||y|| + 4||delta(y)|| + 2||delta^2(y)||``."""
    norms = delta_norms(D, y, 2)
    lhs = operator_norm(commutator(apply_function(D, np.abs), y))
    rhs = 4 * norms[0] + 4 * norms[1] + 2 * norms[2]
    return InequalityReport.build("AbsFirst", lhs, rhs, {}, _digest(D))


def abs_higher_coefficients(n: int) -> list:
    """Coefficients ``[c_0, ..., c_{n+1}]`` of ``||delta^l(y)||`` in the order-``n`` bound."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [2**n * SQRT3_PI] + [
        SQRT3_PI * math.comb(n + 1, l) * 2 ** (n + 1 - l) for l in range(1, n + 2)
    ]


def check_abs_higher(D: HermitianOperator, y, n: int) -> InequalityReport:
    """``||ad_{|D|}^n(y)|| <= 2^n (pi/sqrt3)||y|| + (pi/sqrt3) sum_l C(n+1,l) 2^(n+1-l) ||delta^l(y)||``."""
    coeffs = abs_higher_coefficients(n)
    norms = delta_norms(D, y, n + 1)
    rhs = sum(c * v for c, v in zip(coeffs, norms))
    lhs = operator_norm(iterated_commutator(apply_function(D, np.abs), y, n))
    return InequalityReport.build("AbsHigher", lhs, rhs, {"n": n}, _digest(D))
