"""Randomised verification campaigns and their report files.

Every trial draws its instance from ``numpy.random.default_rng([seed,
theorem ordinal, trial index])``, so records depend only on the
configuration and never on how trials are scheduled across workers.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from scipy.stats import unitary_group

from . import __version__
from . import functions as fn
from . import inequalities as iq
from .binning import build_binning
from .blocks import ScalarMultiplier, bennett_bound_check, to_blocks
from .errors import ConfigInvalid
from .operators import BoundedOperator, HermitianOperator, operator_norm
from .report import ATOL, RTOL, THEOREM_IDS, InequalityReport

__all__ = [
    "CAMPAIGN_THEOREMS",
    "CampaignConfig",
    "ReportFile",
    "run_campaign",
    "run_trial",
    "random_unitary",
    "random_spectrum",
    "random_hermitian",
    "random_positive_instance",
    "random_y",
    "random_bennett_pair",
    "constants_table",
    "dumps_canonical",
    "records_to_csv",
]

# "TildeLog" lets the kernel draw pick the branch per trial
CAMPAIGN_THEOREMS = THEOREM_IDS + ("TildeLog",)
POSITIVE_THEOREMS = {"GBeta", "TildeLog", "TildeLogInv", "TildeLogNonInv", "LogInterp13"}
WORKERS_ENV = "SCHURCOMM_MAX_WORKERS"


@dataclass(frozen=True)
class CampaignConfig:
    theorems: tuple = ("AbsFirst",)
    trials: int = 200
    dim_range: tuple = (2, 24)
    spectral_radius: float = 30.0
    positive_only: bool = False
    kernel_fraction: float = 0.0
    alpha: float | None = None
    A: float | None = None
    B: float | None = None
    beta: float | None = None
    p: float | None = None
    n: int | None = None
    function: dict | None = None
    seed: int = 0
    rtol: float = RTOL
    atol: float = ATOL
    ensemble: str = "dense"

    def validate(self) -> CampaignConfig:
        if not self.theorems:
            raise ConfigInvalid("at least one theorem is required")
        for t in self.theorems:
            if t not in CAMPAIGN_THEOREMS:
                raise ConfigInvalid(f"unknown theorem {t!r}; choose from {CAMPAIGN_THEOREMS}")
        if not isinstance(self.trials, int) or self.trials < 0:
            raise ConfigInvalid("trials must be a non-negative integer")
        lo, hi = self.dim_range
        if lo < 2 or hi < lo:
            raise ConfigInvalid(f"dimension range must satisfy 2 <= min <= max, got {self.dim_range}")
        if not self.spectral_radius > 0:
            raise ConfigInvalid("spectral radius must be positive")
        if not 0.0 <= self.kernel_fraction <= 1.0:
            raise ConfigInvalid("kernel fraction must lie in [0, 1]")
        if self.kernel_fraction > 0 and not self.positive_only and not set(self.theorems) <= POSITIVE_THEOREMS:
            raise ConfigInvalid("kernel fraction requires --positive")
        holder = (self.alpha, self.A, self.B)
        if any(v is not None for v in holder):
            if any(v is None for v in holder):
                raise ConfigInvalid("alpha, A and B must be given together")
            try:
                fn.HolderBound(*holder)
            except ValueError as exc:
                raise ConfigInvalid(str(exc)) from exc
        if self.p is not None and not 1.0 <= self.p < 2.0:
            raise ConfigInvalid(f"p must lie in [1, 2), got {self.p}")
        if self.beta is not None:
            if not self.beta > 0:
                raise ConfigInvalid("beta must be positive")
            if self.beta > self.spectral_radius:
                raise ConfigInvalid("beta must not exceed the spectral radius")
        if self.n is not None and self.n < 1:
            raise ConfigInvalid("n must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid("seed must be a 64-bit unsigned integer")
        if self.ensemble not in ("dense", "band"):
            raise ConfigInvalid(f"unknown ensemble {self.ensemble!r}")
        if self.rtol < 0 or self.atol < 0:
            raise ConfigInvalid("tolerances must be non-negative")
        if self.function is not None:
            fn.function_from_config(self.function)
        return self

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["theorems"] = list(self.theorems)
        out["dim_range"] = list(self.dim_range)
        return out


@dataclass
class ReportFile:
    header: dict
    records: list
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return dumps_canonical(self.to_dict())

    def records_json(self) -> str:
        """Canonical serialisation of the records alone (timestamps excluded)."""
        return dumps_canonical([r.to_dict() for r in self.records])

    def to_csv(self) -> str:
        return records_to_csv(self.records)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps_canonical(obj) -> str:
    """JSON with sorted keys, no whitespace and floats at 17 significant digits."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{dumps_canonical(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theorem_id", "passed", "lhs", "rhs", "slack_ratio", "params", "instance_digest"])
    for r in records:
        w.writerow([r.theorem_id, int(r.passed), _format_float(r.lhs), _format_float(r.rhs),
                    _format_float(r.slack_ratio), dumps_canonical(r.params),
                    dumps_canonical(r.instance_digest)])
    return buf.getvalue()


# --- instance generators ---------------------------------------------------

def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary."""
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1), complex)


def random_spectrum(dim: int, radius: float, rng, positive=False, flavor=None):
    """Eigenvalues uniform on ``[-R, R]`` (``(0, R]`` if positive), or
    clustered on bin boundaries ``k + 1/2`` with tiny offsets.

    Returns ``(eigenvalues, flavor)``.
    """
    if flavor is None:
        flavor = "boundary" if rng.random() < 0.25 else "uniform"
    if flavor == "uniform":
        if positive:
            w = radius * (1.0 - rng.random(dim))
        else:
            w = rng.uniform(-radius, radius, dim)
    elif flavor == "boundary":
        lo = 0 if positive else -math.floor(radius)
        k = rng.integers(lo, max(lo + 1, math.floor(radius)), dim)
        eps = rng.choice([0.0, 1e-15, -1e-15, 1e-9, -1e-9], dim)
        w = np.clip(k + 0.5 + eps, 1e-3 if positive else -radius, radius)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return np.asarray(w, dtype=float), flavor


def random_hermitian(dim: int, radius: float, rng, positive=False, flavor=None):
    w, flavor = random_spectrum(dim, radius, rng, positive, flavor)
    return HermitianOperator.from_spectrum(w, random_unitary(dim, rng)), flavor


def random_positive_instance(dim, radius, rng, kernel_fraction=0.0, beta=None, flavor=None):
    """Positive ``D`` with optional exact-zero kernel.

    With ``beta`` given, ``beta`` is an eigenvalue and every other positive
    eigenvalue lies in ``[beta, R]``.
    """
    w, flavor = random_spectrum(dim, radius, rng, positive=True, flavor=flavor)
    if beta is not None:
        w = beta + (w / radius) * (radius - beta)
        w[rng.integers(dim)] = beta
    kernel = 0
    if kernel_fraction > 0 and rng.random() < kernel_fraction:
        kernel = int(rng.integers(1, max(1, dim // 3) + 1))
        keep = np.flatnonzero(w == beta) if beta is not None else np.array([], int)
        candidates = [k for k in range(dim) if k not in set(keep.tolist())]
        w[rng.choice(candidates, kernel, replace=False)] = 0.0
    inst = iq.PositiveInstance.from_spectrum(w, random_unitary(dim, rng))
    return inst, flavor


def random_y(D: HermitianOperator, rng, ensemble="dense") -> BoundedOperator:
    """Unit-norm perturbation: complex Gaussian, or banded in the eigenbasis of ``D``."""
    n = D.dim
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if ensemble == "band":
        width = int(rng.integers(1, 4))
        mask = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) <= width
        u = D.eigenvectors
        g = u @ (g * mask) @ u.conj().T
    elif ensemble != "dense":
        raise ValueError(f"unknown ensemble {ensemble!r}")
    return BoundedOperator(g / operator_norm(g))


def random_bennett_pair(rng, max_bins=8, max_block=4):
    """Random ``(S, X)`` over at most ``max_bins`` occupied bins, blocks up to ``max_block``."""
    nbins = int(rng.integers(1, max_bins + 1))
    labels = np.sort(rng.choice(np.arange(-12, 13), nbins, replace=False))
    sizes = rng.integers(1, max_block + 1, nbins)
    w = np.concatenate([lab + rng.uniform(-0.5, 0.5, s) for lab, s in zip(labels, sizes)])
    dim = w.size
    D = HermitianOperator.from_spectrum(w, random_unitary(dim, rng))
    binning = build_binning(D)
    y = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    X = to_blocks(binning, y)
    # knock out a random subset of blocks so column sums differ
    drop = {k for k in X.blocks if rng.random() < 0.3}
    X = type(X)(binning, {k: v for k, v in X.blocks.items() if k not in drop})
    occ = binning.occupied
    kind = rng.choice(["gaussian", "rank_one", "toeplitz"])
    if kind == "gaussian":
        table = rng.standard_normal((len(occ),) * 2) + 1j * rng.standard_normal((len(occ),) * 2)
    elif kind == "rank_one":
        s = rng.standard_normal(len(occ)) + 1j * rng.standard_normal(len(occ))
        t = np.exp(2j * np.pi * rng.random(len(occ)))
        table = np.outer(s / np.abs(s), t)
    else:
        c = rng.standard_normal(25)
        table = np.array([[c[(i - j) % 25] for j in occ] for i in occ], dtype=complex)
    S = ScalarMultiplier.from_table(occ, table, name=f"random-{kind}")
    return S, X


# --- trial dispatch ----------------------------------------------------------

def _holder_family(hb: fn.HolderBound, rng) -> fn.FunctionSpec:
    """A random function satisfying the ``(alpha, A, B)`` bound."""
    key = (hb.alpha, hb.A, hb.B)
    t0 = float(np.round(rng.uniform(-10, 10), 3))
    options = []
    if key == (1.0, 0.0, 1.0):
        options += [
            fn.abs_value(),
            fn.function_from_config({"kind": "ShiftedAbs", "t0": t0}),
            fn.function_from_config({"kind": "Sine", "phase": t0}),
            fn.function_from_config({"kind": "ExpI"}),
        ]
    elif key == (0.5, 1.0, 1.0):
        options.append(fn.function_from_config({"kind": "RootStep", "t0": t0}))
    elif key == (0.25, 0.0, 2.0):
        options.append(fn.function_from_config({"kind": "SignedRoot", "t0": t0}))
    options.append(_generic_holder(hb, t0, float(np.round(rng.uniform(-10, 10), 3))))
    return options[int(rng.integers(len(options)))]


def _generic_holder(hb, t0, t1):
    a, A, B = hb.alpha, hb.A, hb.B
    if a <= 1:
        # ||s|^a - |t|^a| <= |s - t|^a for a <= 1; the step adds at most A
        ev = lambda t: B * np.abs(t - t0) ** a + 0.5 * A * np.sign(t - t1)  # noqa: E731
    else:
        m = min(A, B)
        # m/2 |x| <= m/2 (1 + |x|^a) when a >= 1
        ev = lambda t: 0.5 * m * np.sin(t - t0) + 0.25 * A * np.sign(t - t1)  # noqa: E731
    return fn.holder_sample(ev, hb, name=f"generic{(a, A, B)}", params={"t0": t0, "t1": t1})


def _abs_cont_family(rng, radius) -> fn.FunctionSpec:
    k = int(rng.integers(4))
    if k == 0:
        return fn.arctan_step(float(np.round(rng.uniform(0.2, 3), 3)),
                              float(np.round(rng.uniform(-radius, radius), 3)),
                              float(np.round(rng.uniform(0.1, 5), 3)),
                              split=str(rng.choice(["linf", "l1"])))
    if k == 1:
        return fn.log_beta(float(np.round(rng.uniform(0.05, radius), 3)))
    if k == 2:
        return fn.abs_value()
    return fn.abs_continuous(np.sin, np.cos, split=(0.0, 1.0), name="sin(t)")


def _lp_family(rng, radius, p) -> fn.FunctionSpec:
    if p > 1 and rng.random() < 0.5:
        return fn.log_beta(float(np.round(rng.uniform(0.05, radius), 3)))
    return fn.arctan_step(float(np.round(rng.uniform(0.2, 3), 3)),
                          float(np.round(rng.uniform(-radius, radius), 3)),
                          float(np.round(rng.uniform(0.1, 5), 3)))


def run_trial(config: CampaignConfig, theorem: str, index: int) -> InequalityReport:
    """Run trial ``index`` of ``theorem``; pure in ``(config, theorem, index)``."""
    ordinal = CAMPAIGN_THEOREMS.index(theorem)
    rng = np.random.default_rng([config.seed, ordinal, index])
    digest = {"seed": config.seed, "theorem": theorem, "trial": index,
              "ensemble": config.ensemble}
    R = config.spectral_radius
    dim = int(rng.integers(config.dim_range[0], config.dim_range[1] + 1))

    if theorem == "Bennett":
        S, X = random_bennett_pair(rng)
        rep = bennett_bound_check(S, X)
        digest.update(dim=X.binning.D.dim, occupied_bins=len(X.binning.occupied))
        return rep.with_digest({**rep.instance_digest, **digest}).rejudge(config.rtol, config.atol)

    if theorem in POSITIVE_THEOREMS:
        kf = config.kernel_fraction
        if theorem in ("TildeLogInv", "LogInterp13"):
            kf = 0.0
        elif theorem == "TildeLogNonInv":
            kf = 1.0
        beta = config.beta
        if theorem == "GBeta" and beta is None:
            beta = 1.0
        inst, flavor = random_positive_instance(dim, R, rng, kf, beta)
        D = inst.D
    else:
        D, flavor = random_hermitian(dim, R, rng, positive=config.positive_only)
        if config.positive_only and config.kernel_fraction > 0 and rng.random() < config.kernel_fraction:
            w = np.array(D.eigenvalues)
            w[: int(rng.integers(1, max(1, dim // 3) + 1))] = 0.0
            D = HermitianOperator.from_spectrum(w, D.eigenvectors)
    y = random_y(D, rng, config.ensemble)
    digest["flavor"] = flavor

    user_fn = fn.function_from_config(config.function) if config.function else None
    if theorem == "HoldThm":
        if config.alpha is not None:
            hb = fn.HolderBound(config.alpha, config.A, config.B)
            g = user_fn.with_holder(hb) if user_fn is not None else _holder_family(hb, rng)
        else:
            g = user_fn if user_fn is not None else _holder_family(fn.HolderBound(1.0, 0.0, 1.0), rng)
        rep = iq.check_holder(D, y, g)
    elif theorem == "AbsCont":
        rep = iq.check_abs_cont(D, y, user_fn or _abs_cont_family(rng, R))
    elif theorem == "Lp":
        p = 1.5 if config.p is None else config.p
        rep = iq.check_lp(D, y, user_fn or _lp_family(rng, R, p), p)
    elif theorem == "GBeta":
        rep = iq.check_gbeta(inst, y)
    elif theorem in ("TildeLog", "TildeLogInv", "TildeLogNonInv"):
        rep = iq.check_tilde_log(inst, y)
    elif theorem == "LogInterp13":
        rep = iq.check_log_interp(inst, y)
    elif theorem == "AbsFirst":
        rep = iq.check_abs_first(D, y)
    elif theorem == "AbsHigher":
        rep = iq.check_abs_higher(D, y, 1 if config.n is None else config.n)
    else:  # pragma: no cover - validate() rejects everything else
        raise ConfigInvalid(theorem)
    return rep.with_digest({**rep.instance_digest, **digest}).rejudge(config.rtol, config.atol)


def _run_task(args):
    return run_trial(*args)


def _worker_count(requested):
    cap = os.environ.get(WORKERS_ENV)
    n = requested if requested else 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def run_campaign(config: CampaignConfig, workers: int = 1) -> ReportFile:
    """Run ``config.trials`` trials for each theorem and collect the records."""
    config.validate()
    tasks = [(config, t, i) for t in config.theorems for i in range(config.trials)]
    n = _worker_count(workers)
    if n == 1 or len(tasks) < 2:
        records = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * n))))
    return ReportFile(
        header={
            "artifact": "schurcomm",
            "version": __version__,
            "config": config.to_dict(),
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
        records=records,
        summary=_summary(records),
    )


def _summary(records) -> dict:
    passed = sum(r.passed for r in records)
    out = {"total": len(records), "passed": passed, "failed": len(records) - passed,
           "max_slack_ratio": None, "argmax_instance_digest": None, "by_theorem": {}}
    if records:
        worst = max(records, key=lambda r: r.slack_ratio)
        out["max_slack_ratio"] = worst.slack_ratio
        out["argmax_instance_digest"] = worst.instance_digest
    for r in records:
        slot = out["by_theorem"].setdefault(r.theorem_id, {"total": 0, "passed": 0, "max_slack_ratio": 0.0})
        slot["total"] += 1
        slot["passed"] += int(r.passed)
        slot["max_slack_ratio"] = max(slot["max_slack_ratio"], r.slack_ratio)
    return out


# --- constants ---------------------------------------------------------------

def constants_table(alphas=(1.0, 0.5, 0.25), As=(0.0, 1.0), Bs=(1.0, 2.0),
                    betas=(0.125, 1.0, 8.0), ps=(1.0, 1.5, 1.9), ns=(1, 2, 3)) -> list:
    """Right-hand-side constants of every inequality over a parameter grid.

    Each row is ``{"theorem", "constant", "params", "value"}``.
    """
    rows = []

    def add(theorem, constant, params, value):
        rows.append({"theorem": theorem, "constant": constant, "params": params,
                     "value": float(value)})

    for a in alphas:
        for A in As:
            for B in Bs:
                hb = fn.HolderBound(a, A, B)
                add("HoldThm", "row_factor", {"alpha": a, "A": A, "B": B, "n": hb.n},
                    fn.holder_row_factor(hb))
    add("AbsCont", "coefficients(y, delta, delta^2)", {}, 4.0)
    for p in ps:
        cy, cd = iq.lp_coefficients(p)
        add("Lp", "y_coefficient", {"p": p}, cy)
        add("Lp", "delta_coefficient", {"p": p}, cd)
    for beta in betas:
        cy, cd = iq.gbeta_coefficients(beta)
        add("GBeta", "y_coefficient", {"beta": beta}, cy)
        add("GBeta", "delta_coefficient", {"beta": beta}, cd)
        gp = fn.lp_norm_of_derivative(fn.log_beta(beta), 1.5)
        ey, ed = iq.lp_coefficients(1.5)
        add("GBeta", "lp_route_y_coefficient", {"beta": beta}, gp * ey)
        add("GBeta", "lp_route_delta_coefficient", {"beta": beta}, gp * ed)
        ny, nd = iq.tilde_log_noninv_coefficients(beta)
        add("TildeLogNonInv", "y_coefficient", {"beta": beta}, ny)
        add("TildeLogNonInv", "delta_coefficient", {"beta": beta}, nd)
        add("LogInterp13", "coefficient", {"beta": beta},
            iq.LOG_INTERP_CONSTANT * beta ** (-1.0 / 3.0))
    add("LogInterp13", "optimized_constant", {}, iq.OPTIMIZED_LOG_CONSTANT)
    add("AbsHigher", "S(k)_row_bound", {}, fn.ABS_ROW_BOUND)
    for n in ns:
        for l, c in enumerate(iq.abs_higher_coefficients(n)):
            add("AbsHigher", f"coefficient_delta^{l}", {"n": n}, c)
    return rows
