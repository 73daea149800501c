"""Borel functions with Hölder-boundedness and derivative data, and the
scalar Schur multipliers built from them.

A function ``g`` is ``(alpha, A, B)`` Hölder bounded when
``|g(s) - g(t)| <= A + B |s - t|**alpha`` for all real ``s, t``.  For such
``g`` and an integer ``n > alpha + 1/2`` the difference quotients
``S_ij = (g(i) - g(j)) / (i - j)**n`` form a row-bounded scalar matrix with
``||S||_r <= 2 (A + B) sqrt((n - alpha) / (2n - 2 alpha - 1))``.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate, special

from .blocks import ScalarMultiplier
from .errors import BoundInapplicable, ConfigInvalid, NonIntegrable

__all__ = [
    "HolderBound",
    "FunctionSpec",
    "HolderVerdict",
    "abs_value",
    "tilde_log",
    "log_beta",
    "identity",
    "holder_sample",
    "abs_continuous",
    "arctan_step",
    "difference_quotient",
    "holder_multiplier",
    "holder_row_factor",
    "abs_multiplier",
    "verify_holder_bound",
    "default_grid",
    "l1_linf_norm",
    "bounded_split",
    "lp_cutoff_split",
    "log_beta_split",
    "lp_norm_of_derivative",
    "function_from_config",
    "ABS_ROW_BOUND",
]

ABS_ROW_BOUND = math.pi / math.sqrt(3.0)
QUAD_EPSABS = 1e-8


@dataclass(frozen=True)
class HolderBound:
    alpha: float
    A: float
    B: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.A < 0 or self.B < 0:
            raise ValueError("A and B must be non-negative")

    @property
    def n(self) -> int:
        """Smallest integer strictly greater than ``alpha + 1/2``."""
        return math.floor(self.alpha + 0.5) + 1


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A (possibly complex) function of a real variable plus what is known about it.

    ``evaluate`` must accept numpy arrays.  ``split`` is an admissible
    decomposition ``g' = l + u`` recorded as ``(||l||_1, ||u||_inf)``;
    ``support`` bounds the region where ``g'`` can be nonzero (used by
    quadrature); ``lp_closed_form(p)`` returns ``||g'||_p`` when known.
    """

    kind: str
    evaluate: Callable
    name: str
    holder: HolderBound | None = None
    derivative: Callable | None = None
    split: tuple | None = None
    support: tuple = (-math.inf, math.inf)
    lp_closed_form: Callable | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.evaluate(np.asarray(t, dtype=float))

    def with_holder(self, hb: HolderBound) -> FunctionSpec:
        return dataclasses.replace(self, holder=hb)

    def describe(self) -> dict:
        out = {"kind": self.kind, "name": self.name, **self.params}
        if self.holder is not None:
            out["holder"] = [self.holder.alpha, self.holder.A, self.holder.B]
        return out


def _vectorised(fn, vectorized):
    return fn if vectorized else np.vectorize(fn, otypes=[complex])


def abs_value() -> FunctionSpec:
    return FunctionSpec(
        kind="AbsValue",
        evaluate=np.abs,
        name="|t|",
        holder=HolderBound(1.0, 0.0, 1.0),
        derivative=np.sign,
        split=(0.0, 1.0),
    )


def _tilde_log(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t > 0, np.log(np.where(t > 0, t, 1.0)), 0.0)


def tilde_log() -> FunctionSpec:
    """``log t`` for ``t > 0`` and 0 for ``t <= 0``."""
    return FunctionSpec(kind="TildeLog", evaluate=_tilde_log, name="tilde-log")


def log_beta(beta: float) -> FunctionSpec:
    """``log t`` for ``t >= beta`` and ``log beta`` below; absolutely continuous."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    beta = float(beta)
    split = log_beta_split(beta)

    def evaluate(t):
        return np.log(np.maximum(np.asarray(t, dtype=float), beta))

    def derivative(t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= beta, 1.0 / np.where(t >= beta, t, 1.0), 0.0)

    def closed(p):
        if p <= 1:
            raise NonIntegrable(f"g_beta' = 1/t is not in L^{p}")
        return (beta ** (1.0 - p) / (p - 1.0)) ** (1.0 / p)

    return FunctionSpec(
        kind="LogBeta",
        evaluate=evaluate,
        name=f"g_beta(beta={beta!r})",
        holder=HolderBound(1.0, *split),
        derivative=derivative,
        split=split,
        support=(beta, math.inf),
        lp_closed_form=closed,
        params={"beta": beta},
    )


def identity() -> FunctionSpec:
    """``g(t) = t``; no Hölder bound attached (add one with :meth:`FunctionSpec.with_holder`)."""
    return FunctionSpec(
        kind="AbsContinuous",
        evaluate=lambda t: np.asarray(t, dtype=float),
        name="t",
        derivative=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        split=(0.0, 1.0),
    )


def holder_sample(evaluator, hb: HolderBound, name="g", vectorized=True, params=None) -> FunctionSpec:
    """User function with a declared ``(alpha, A, B)`` bound (checked, never inferred)."""
    return FunctionSpec(
        kind="HolderSample",
        evaluate=_vectorised(evaluator, vectorized),
        name=name,
        holder=hb,
        params=dict(params or {}),
    )


def abs_continuous(evaluator, derivative, split=None, support=(-math.inf, math.inf),
                   lp_closed_form=None, name="g", vectorized=True, params=None) -> FunctionSpec:
    """Absolutely continuous ``g`` with derivative ``g'``.

    When ``split = (||l||_1, ||u||_inf)`` is given, ``g`` is automatically
    ``(1, ||l||_1, ||u||_inf)`` Hölder bounded.
    """
    hb = HolderBound(1.0, float(split[0]), float(split[1])) if split is not None else None
    return FunctionSpec(
        kind="AbsContinuous",
        evaluate=_vectorised(evaluator, vectorized),
        name=name,
        holder=hb,
        derivative=_vectorised(derivative, vectorized),
        split=None if split is None else (float(split[0]), float(split[1])),
        support=tuple(support),
        lp_closed_form=lp_closed_form,
        params=dict(params or {}),
    )


def arctan_step(amplitude=1.0, center=0.0, width=1.0, split="linf") -> FunctionSpec:
    """``a * arctan((t - c) / w)``, whose derivative lies in every L^p, p >= 1.

    ``split`` picks the recorded decomposition of ``g'``: ``"linf"`` gives
    ``(0, |a|/w)``, ``"l1"`` gives ``(pi |a|, 0)``.
    """
    a, c, w = float(amplitude), float(center), float(width)
    if not w > 0:
        raise ValueError("width must be positive")
    if split == "linf":
        pair = (0.0, abs(a) / w)
    elif split == "l1":
        pair = (math.pi * abs(a), 0.0)
    else:
        raise ValueError(f"unknown split {split!r}")

    def closed(p):
        # int (1 + x^2)^-p dx = sqrt(pi) Gamma(p - 1/2) / Gamma(p)
        base = math.sqrt(math.pi) * special.gamma(p - 0.5) / special.gamma(p)
        return abs(a) * w ** (1.0 / p - 1.0) * base ** (1.0 / p)

    return abs_continuous(
        lambda t: a * np.arctan((np.asarray(t, dtype=float) - c) / w),
        lambda t: (a / w) / (1.0 + ((np.asarray(t, dtype=float) - c) / w) ** 2),
        split=pair,
        lp_closed_form=closed,
        name=f"{a:g}*arctan((t-{c:g})/{w:g})",
        params={"amplitude": a, "center": c, "width": w, "split": split},
    )


def holder_row_factor(hb: HolderBound, n: int | None = None) -> float:
    """``2 (A + B) sqrt((n - alpha) / (2n - 2 alpha - 1))``."""
    n = hb.n if n is None else n
    if not n > hb.alpha + 0.5:
        raise BoundInapplicable(
            f"row-norm series diverges: need n > alpha + 1/2, got n={n}, alpha={hb.alpha}"
        )
    return 2.0 * (hb.A + hb.B) * math.sqrt((n - hb.alpha) / (2 * n - 2 * hb.alpha - 1))


def difference_quotient(g, n: int, name=None) -> ScalarMultiplier:
    """``S_ij = (g(i) - g(j)) / (i - j)**n`` off the diagonal, 0 on it; no bound attached."""

    def entry(i, j):
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        fi, fj = i.astype(float), j.astype(float)
        d = fi - fj
        safe = np.where(d == 0, 1.0, d)
        num = np.asarray(g(fi), dtype=complex) - np.asarray(g(fj), dtype=complex)
        return np.where(d == 0, 0.0, num / safe**n)

    label = getattr(g, "name", "g")
    return ScalarMultiplier(entry, None, name or f"({label}(i)-{label}(j))/(i-j)^{n}")


def holder_multiplier(g: FunctionSpec, n: int) -> ScalarMultiplier:
    """Difference-quotient multiplier of order ``n`` with its analytic row bound.

    The bound is attached when ``g`` declares a Hölder bound; if the
    declared ``alpha`` makes the series diverge (``n <= alpha + 1/2``)
    :class:`BoundInapplicable` is raised.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    S = difference_quotient(g, n)
    if g.holder is None:
        return S
    return dataclasses.replace(S, analytic_row_bound=holder_row_factor(g.holder, n))


def abs_multiplier(k: int) -> ScalarMultiplier:
    """``S(k)_ij = (|i| - |j|)**k / (i - j)**(k + 1)``, row norm at most pi/sqrt(3)."""
    if k < 1:
        raise ValueError("k must be >= 1")

    def entry(i, j):
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        fi, fj = i.astype(float), j.astype(float)
        d = fi - fj
        safe = np.where(d == 0, 1.0, d)
        return np.where(d == 0, 0.0, (np.abs(fi) - np.abs(fj)) ** k / safe ** (k + 1))

    return ScalarMultiplier(entry, ABS_ROW_BOUND, f"S({k})")


class HolderVerdict(NamedTuple):
    passed: bool
    worst_pair: tuple
    worst_excess: float


def verify_holder_bound(g, hb: HolderBound, grid) -> HolderVerdict:
    """Check ``|g(s) - g(t)| <= A + B |s - t|**alpha`` on every pair of grid points.

    ``worst_pair`` is the pair with the largest ``lhs - rhs``; on failure it
    is a violating pair.  A rounding allowance of ``1e-12 * max(1, max|g|)``
    is applied.
    """
    t = np.unique(np.asarray(grid, dtype=float))
    v = np.asarray(g(t), dtype=complex)
    lhs = np.abs(v[:, None] - v[None, :])
    rhs = hb.A + hb.B * np.abs(t[:, None] - t[None, :]) ** hb.alpha
    excess = lhs - rhs
    k = int(np.argmax(excess))
    a, b = divmod(k, t.size)
    worst = float(excess.flat[k])
    allowance = 1e-12 * max(1.0, float(np.max(np.abs(v))) if v.size else 1.0)
    return HolderVerdict(worst <= allowance, (float(t[a]), float(t[b])), worst)


def default_grid(lo: float, hi: float, points: int = 512) -> np.ndarray:
    """``points`` equispaced values on ``[lo - 1, hi + 1]`` plus every integer in that range."""
    lo, hi = lo - 1.0, hi + 1.0
    ints = np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=float)
    return np.union1d(np.linspace(lo, hi, points), ints)


def l1_linf_norm(ell_l1: float, u_linf: float) -> float:
    """``||l||_1 + ||u||_inf`` for a concrete decomposition ``g' = l + u``.

    This is an upper bound for the L^1 + L^inf norm of ``g'``.
    """
    if ell_l1 < 0 or u_linf < 0:
        raise ValueError("norms must be non-negative")
    return float(ell_l1) + float(u_linf)


def bounded_split(M: float) -> tuple:
    """Decomposition of a derivative bounded by ``M``: all of it in L^inf."""
    return (0.0, float(M))


def lp_cutoff_split(g: FunctionSpec, p: float) -> tuple:
    """Split ``g'`` at ``|g'| = 1``: ``(||g'||_p^p, 1)``.

    The part where ``|g'| > 1`` has L^1 norm at most ``||g'||_p^p`` and the
    rest is bounded by 1, so the pair is admissible.
    """
    return (lp_norm_of_derivative(g, p) ** p, 1.0)


def log_beta_split(beta: float) -> tuple:
    """Split ``1/t * 1[t >= beta]`` at ``t0 = max(beta, 1)``.

    The piece on ``[beta, t0)`` has L^1 norm ``log(t0 / beta)``; the piece on
    ``[t0, inf)`` is bounded by ``1 / t0``.
    """
    t0 = max(float(beta), 1.0)
    return (math.log(t0 / beta), 1.0 / t0)


def _quad_lp(g: FunctionSpec, p: float) -> float:
    if g.derivative is None:
        raise NonIntegrable(f"{g.name} has no derivative to integrate")
    lo, hi = g.support

    def integrand(t):
        return float(np.abs(np.asarray(g.derivative(np.float64(t)), dtype=complex)) ** p)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(integrand, lo, hi, epsabs=QUAD_EPSABS,
                                      epsrel=1e-10, limit=500)
        except integrate.IntegrationWarning as exc:
            raise NonIntegrable(f"quadrature for ||{g.name}'||_{p} failed: {exc}") from exc
    if not math.isfinite(val) or err > max(QUAD_EPSABS, 1e-10 * abs(val)):
        raise NonIntegrable(f"quadrature for ||{g.name}'||_{p} did not converge")
    return val ** (1.0 / p)


def lp_norm_of_derivative(g: FunctionSpec, p: float, method: str = "auto") -> float:
    """``||g'||_p``.

    ``method`` is ``"closed"`` (closed form only), ``"quad"`` (adaptive
    quadrature over ``g.support`` only) or ``"auto"`` (closed form when
    available).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if method not in ("auto", "closed", "quad"):
        raise ValueError(f"unknown method {method!r}")
    if g.kind not in ("AbsContinuous", "LogBeta"):
        raise NonIntegrable(f"{g.kind} functions carry no integrable derivative")
    if method != "quad" and g.lp_closed_form is not None:
        return float(g.lp_closed_form(p))
    if method == "closed":
        raise NonIntegrable(f"no closed form recorded for {g.name}")
    return _quad_lp(g, p)


def _shifted_abs(t0):
    return holder_sample(lambda t: np.abs(t - t0), HolderBound(1.0, 0.0, 1.0),
                         name=f"|t-{t0:g}|", params={"t0": t0})


def _sine(phase):
    return holder_sample(lambda t: np.sin(t + phase), HolderBound(1.0, 0.0, 1.0),
                         name=f"sin(t+{phase:g})", params={"phase": phase})


def _expi():
    return holder_sample(lambda t: np.exp(1j * t), HolderBound(1.0, 0.0, 1.0), name="exp(it)")


def _root_step(t0):
    # |sqrt|s-t0| - sqrt|t-t0|| <= |s-t|^(1/2) and the step adds at most 1
    return holder_sample(
        lambda t: np.sqrt(np.abs(t - t0)) + 0.5 * np.sign(t - t0),
        HolderBound(0.5, 1.0, 1.0),
        name=f"sqrt|t-{t0:g}|+sign(t-{t0:g})/2",
        params={"t0": t0},
    )


def _signed_root(t0):
    # odd quarter root has Hölder constant 2^(3/4) <= 2
    return holder_sample(
        lambda t: np.sign(t - t0) * np.abs(t - t0) ** 0.25,
        HolderBound(0.25, 0.0, 2.0),
        name=f"sign(t-{t0:g})|t-{t0:g}|^(1/4)",
        params={"t0": t0},
    )


_REGISTRY = {
    "AbsValue": lambda: abs_value(),
    "TildeLog": lambda: tilde_log(),
    "LogBeta": lambda beta=1.0: log_beta(beta),
    "Identity": lambda: identity(),
    "Square": lambda: FunctionSpec("HolderSample", np.square, "t^2"),
    "ExpI": lambda: _expi(),
    "Sine": lambda phase=0.0: _sine(phase),
    "ShiftedAbs": lambda t0=0.0: _shifted_abs(t0),
    "RootStep": lambda t0=0.0: _root_step(t0),
    "SignedRoot": lambda t0=0.0: _signed_root(t0),
    "Arctan": lambda amplitude=1.0, center=0.0, width=1.0, split="linf":
        arctan_step(amplitude, center, width, split),
    "Constant": lambda value=1.0: holder_sample(
        lambda t: np.full(np.shape(t), value, dtype=complex), HolderBound(1.0, 0.0, 0.0),
        name=f"const({value})", params={"value": value}),
}


def function_from_config(config: dict) -> FunctionSpec:
    """Build a builtin function from ``{"kind": ..., **parameters}``.

    An optional ``"holder": [alpha, A, B]`` entry overrides the declared bound.
    """
    config = dict(config)
    kind = config.pop("kind", None)
    if kind not in _REGISTRY:
        raise ConfigInvalid(f"unknown function kind {kind!r}; choose from {sorted(_REGISTRY)}")
    holder = config.pop("holder", None)
    try:
        spec = _REGISTRY[kind](**config)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad parameters for {kind}: {exc}") from exc
    if holder is not None:
        spec = spec.with_holder(HolderBound(*map(float, holder)))
    return spec
