"""Numerical probes of the limit conditions that govern compactness.

Every probe returns *certified lower bounds*: each value is attained by an
explicit test function whose source norm is computed exactly and whose
output norm is evaluated on a lower step of a monotone function.  Upper
estimates come from the dual formulation and are heuristic.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .kernelops import (OperatorSpec, ProfileJ, cells_rule, hardy, hardy_at_zero,
                        hardy_batch, volterra)
from .rinorm import (INF, NormValue, SpaceSpec, _cell_weights, _norm_sorted, _require,
                     _sup_weight, associate_norm, fundamental_function, norm,
                     norm_of_samples, power_log_cutoff_vanishes, to_exact)
from .stepfn import StepFunction, integrate, rearrange

__all__ = [
    "ProbeConfig",
    "ProbeCurve",
    "EndpointResult",
    "probe_cutoff_domain",
    "probe_cutoff_range",
    "l1_source_value",
    "endpoint_L1_into_X",
    "endpoint_Linfty",
    "optimal_range_norm",
    "optimal_domain_norm",
    "duality_identity_check",
    "verdict_hint",
    "dual_spec",
]

GRID_ENV = "RICOMPACT_GRID"


def _default_points() -> int:
    try:
        return int(os.environ.get(GRID_ENV, "64"))
    except ValueError:
        return 64


@dataclass(frozen=True)
class ProbeConfig:
    """Resolution, test-family size and verdict thresholds of a probe.

    ``theta`` and ``bounded_threshold`` are relative to the curve value at
    the largest cutoff ``a = a_max``.
    """

    points: int = field(default_factory=_default_points)
    a_max: float = 0.5
    a_min: float = 1e-8
    t_per_decade: int = 40
    family_size: int = 12
    budget: int = 20000
    theta: float = 0.05
    bounded_threshold: float = 0.1
    bounded_spread: float = 0.05
    decay_ratio: float = 0.8
    bump_width: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta: must lie in (0,1)")
        if self.points < 4:
            raise ValueError("points: need at least 4 cutoffs")
        if not 0.0 < self.a_min < self.a_max <= 1.0:
            raise ValueError("a_min, a_max: need 0 < a_min < a_max <= 1")

    def a_grid(self) -> np.ndarray:
        return np.geomspace(self.a_max, self.a_min, self.points)


@dataclass
class ProbeCurve:
    """``a`` descending with certified lower bounds and heuristic estimates."""

    a: np.ndarray
    lower: np.ndarray
    estimate: np.ndarray
    hint: str
    hint_value: float = math.nan
    citation: str = ""
    exhausted: np.ndarray = None

    def rows(self):
        for a, lo, est in zip(self.a, self.lower, self.estimate):
            yield float(a), float(lo), float(est)

    def to_dict(self) -> dict:
        def num(x):
            return float(x) if math.isfinite(x) else "inf"
        return {
            "a": [float(x) for x in self.a],
            "lower_bound": [num(x) for x in self.lower],
            "estimate": [num(x) for x in self.estimate],
            "hint": self.hint,
            "hint_value": None if math.isnan(self.hint_value) else num(self.hint_value),
            "citation": self.citation,
            "budget_exhausted": [bool(x) for x in self.exhausted],
        }


def verdict_hint(values: np.ndarray, cfg: ProbeConfig) -> tuple[str, float]:
    """Apply the zero and bounded-below rules to a curve (``a`` descending)."""
    v = np.asarray(values, dtype=float)
    if v.size < 3 or not np.all(np.isfinite(v[-3:])):
        if v.size and np.isinf(v[-1]):
            return "bounded_below", math.inf
        return "inconclusive", math.nan
    ref = v[0]
    if ref <= 0:
        return "inconclusive", math.nan
    last3 = v[-3:]
    if last3.max() <= 0:
        return "inconclusive", math.nan
    if (last3[2] < cfg.theta * ref and last3[0] > last3[1] > last3[2]
            and last3[2] < cfg.decay_ratio * last3[0]):
        return "tends_to_zero", float(last3[2])
    spread = (last3.max() - last3.min()) / last3.max()
    if spread <= cfg.bounded_spread and last3[2] > cfg.bounded_threshold * ref:
        return "bounded_below", float(last3[2])
    return "inconclusive", math.nan


# --------------------------------------------------------------------------
# helpers


def dual_spec(s: SpaceSpec) -> Optional[SpaceSpec]:
    """Space equivalent to the associate of ``s`` inside the three families, if any."""
    p, q, a = s.triple
    if s.is_lebesgue:
        return s.dual()
    if p == 1:
        return SpaceSpec.lz(INF, INF, -a)
    if p == INF:
        return None
    pp = p / (p - 1)
    qq = INF if q == 1 else (1 if q == INF else q / (q - 1))
    cand = SpaceSpec.lz(pp, qq, -a)
    return cand


def _t_grid(cfg: ProbeConfig, extra=()) -> np.ndarray:
    lo = cfg.a_min * 1e-6
    n = int(cfg.t_per_decade * math.log10(1.0 / lo)) + 1
    t = np.geomspace(lo, 1.0, n)
    a = cfg.a_grid()
    t = np.union1d(t, np.concatenate([a, a * (1.0 - cfg.bump_width), np.asarray(extra, float)]))
    t = t[(t > 0) & (t <= 1.0)]
    t[-1] = 1.0
    return np.unique(t)


class _PrefixNorm:
    """Norms of ``chi_(0, t_k) h`` for all k at once, ``h`` nonincreasing on the t-grid.

    ``h`` takes ``vals[i]`` on ``(t[i-1], t[i]]`` with ``(0, t[0])`` carrying
    ``vals[0]``; this is a lower step of a nonincreasing function sampled at t.
    """

    def __init__(self, Y: SpaceSpec, t: np.ndarray):
        self.Y = Y
        self.t = t
        self.edges = np.concatenate(([0.0], t))
        p, q, a = Y.fp, Y.fq, Y.fa
        lo, hi = self.edges[:-1], self.edges[1:]
        if q == INF:
            self.W = _sup_weight(lo, hi, p, a)
        else:
            c = (q / p - 1.0) if p != INF else -1.0
            self.W = _cell_weights(lo, hi, c, a * q)
        self.q = q

    def __call__(self, vals: np.ndarray) -> np.ndarray:
        """Rows of ``vals`` (nfunc, nt) -> prefix norms (nfunc, nt)."""
        v = np.maximum(np.atleast_2d(vals), 0.0)
        if self.q == INF:
            return np.maximum.accumulate(v * self.W[None, :], axis=1)
        with np.errstate(over="ignore"):
            acc = np.cumsum(v ** self.q * self.W[None, :], axis=1)
        return acc ** (1.0 / self.q)

    def full(self, vals: np.ndarray) -> np.ndarray:
        return self(vals)[:, -1]


def _op_outputs(op: OperatorSpec, funcs: list[StepFunction], t: np.ndarray,
                Y: SpaceSpec) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Lower-step samples of ``op f`` on ``t`` (rows), plus exact ``op f(0+)`` if finite.

    For the P kernel the prefactor increases and the Hardy part decreases, so
    ``pre(t_{i-1}) H(t_i)`` bounds ``P f`` from below on each cell.
    """
    J, j, pre, const = op.reduce()
    out = np.empty((len(funcs), t.size))
    for k, f in enumerate(funcs):
        out[k] = const * hardy(J, j, f, t)
    zero = None
    if pre is not None:
        pv = pre(t)
        # the first cell (0, t_0) gets 0: pre(0+) is a limit we do not evaluate
        left = np.concatenate(([0.0], pv[:-1]))
        out = out * left[None, :]
    elif Y.is_Linf() and J.integral_finite:
        zero = np.array([const * hardy_at_zero(J, j, f) for f in funcs])
    return out, zero


def _test_family(b_grid: np.ndarray, X: SpaceSpec, cfg: ProbeConfig,
                 include_bumps: bool = True) -> list[tuple[float, StepFunction]]:
    """Normalized test functions supported in (0,b): cutoff characteristics,
    truncated powers and power-logs, and narrow bumps ending at b."""
    thetas = np.linspace(0.0, 0.95, max(2, cfg.family_size // 3))
    logs = (0.0, -1.0, 1.0)
    out = []
    rel = np.concatenate(([0.0], np.geomspace(1e-6, 1.0, 25)))
    for b in b_grid:
        x = b * rel
        x = np.concatenate((x, [1.0])) if b < 1.0 else x
        mid = np.sqrt(np.maximum(x[:-1], x[1] * 1e-2) * x[1:])
        inside = x[1:] <= b
        for th in thetas:
            for lg in logs:
                if th == 0.0 and lg != 0.0:
                    continue
                base = np.where(inside, mid ** (-th) * np.log(2.0 / mid) ** lg, 0.0)
                base[inside] = np.minimum.accumulate(base[inside])
                f = StepFunction(x, base)
                nv = norm(X, f).value
                if nv > 0 and math.isfinite(nv):
                    out.append((b, f.scale(1.0 / nv)))
        if include_bumps:
            lo = b * (1.0 - cfg.bump_width)
            edges = [0.0, lo, b] + ([1.0] if b < 1.0 else [])
            vals = [0.0, 1.0] + ([0.0] if b < 1.0 else [])
            f = StepFunction(edges, vals)
            out.append((b, f.scale(1.0 / norm(X, f).value)))
    return out


def _within_budget(fam: list, b_grid: np.ndarray, cfg: ProbeConfig) -> tuple[list, np.ndarray]:
    """Truncate the test family to ``cfg.budget``; flag each ``b`` that lost members."""
    if len(fam) <= cfg.budget:
        return fam, np.zeros(b_grid.size, bool)
    lost = {b for b, _ in fam[cfg.budget:]}
    return fam[: cfg.budget], np.array([b in lost for b in b_grid])


def _citation(kind: str) -> str:
    return {
        "domain": "Thm (main): lim_a sup ||H(chi_(0,a) f)||_Y = 0",
        "range": "Thm (opt_range)(ii): lim_a sup ||chi_(0,a) H f||_Y = 0",
    }[kind]


# --------------------------------------------------------------------------
# cutoff probes


def _dual_estimates(X: SpaceSpec, Y: SpaceSpec, op: OperatorSpec, a_grid: np.ndarray,
                    t: np.ndarray) -> np.ndarray:
    """Heuristic ``sup_g ||chi_(0,a) R g*||_{X'}`` over ``g = chi_(0,b) phi_Y(b)/b``."""
    est = np.full(a_grid.size, -np.inf)
    Xd, Yd = dual_spec(X), dual_spec(Y)
    if op.kind == "P" or Xd is None or Yd is None:
        return est
    J, j, _, const = op.reduce()
    edges = np.concatenate(([0.0], t))
    idx = np.searchsorted(t, a_grid)
    for b in a_grid:
        g = StepFunction([0.0, b] + ([1.0] if b < 1.0 else []),
                         [1.0] + ([0.0] if b < 1.0 else []))
        g = g.scale(1.0 / norm(Yd, g).value)
        r = const * volterra(J, j, g, t)
        # larger endpoint value on each cell, then the cut function is rearranged
        cell = np.maximum(r, np.concatenate(([r[0]], r[:-1])))
        for k, i in enumerate(idx):
            h = StepFunction(edges, np.where(np.arange(t.size) <= i, cell, 0.0))
            est[k] = max(est[k], norm(Xd, h).value)
    return est


def probe_cutoff_domain(X: SpaceSpec, Y: SpaceSpec, op: OperatorSpec,
                        cfg: Optional[ProbeConfig] = None) -> ProbeCurve:
    """``a -> sup_{||f||_X <= 1} ||op(chi_(0,a) f)||_Y`` along the cutoff grid."""
    cfg = cfg or ProbeConfig()
    _require(X)
    _require(Y)
    if op.kind in ("R", "S"):
        raise ValueError("op.kind: cutoff probes take Hardy-type kernels (H, K, Q, T, P)")
    a_grid = cfg.a_grid()
    t = _t_grid(cfg)
    fam, exhausted = _within_budget(_test_family(a_grid, X, cfg), a_grid, cfg)
    bs = np.array([b for b, _ in fam])
    outs, zero = _op_outputs(op, [f for _, f in fam], t, Y)
    if op.kind == "P":
        vals = np.array([norm_of_samples(Y, t, row) for row in outs])
    else:
        vals = _PrefixNorm(Y, t).full(outs)
        if zero is not None:
            vals = np.maximum(vals, zero)
    # best value of each b, then running sup over b <= a
    per_b = np.array([vals[bs == b].max(initial=0.0) for b in a_grid])
    lower = np.maximum.accumulate(per_b[::-1])[::-1]
    est = np.maximum(lower, _dual_estimates(X, Y, op, a_grid, t))
    hint, hv = verdict_hint(lower, cfg)
    return ProbeCurve(a_grid, lower, est, hint, hv, _citation("domain"), exhausted)


def probe_cutoff_range(X: SpaceSpec, Y: SpaceSpec, op: OperatorSpec,
                       cfg: Optional[ProbeConfig] = None) -> ProbeCurve:
    """``a -> sup_{||f||_X <= 1} ||chi_(0,a) op f||_Y`` along the cutoff grid."""
    cfg = cfg or ProbeConfig()
    _require(X)
    _require(Y)
    if op.kind in ("R", "S"):
        raise ValueError("op.kind: cutoff probes take Hardy-type kernels (H, K, Q, T, P)")
    a_grid = cfg.a_grid()
    b_grid = np.union1d(a_grid, [1.0])[::-1]
    t = _t_grid(cfg)
    fam, cut = _within_budget(_test_family(b_grid, X, cfg), b_grid, cfg)
    # every test function contributes at every cutoff
    exhausted = np.full(a_grid.size, bool(cut.any()))
    outs, zero = _op_outputs(op, [f for _, f in fam], t, Y)
    idx = np.searchsorted(t, a_grid)
    if op.kind == "P":
        lower = np.zeros(a_grid.size)
        for row in outs:
            for k, i in enumerate(idx):
                cut = np.where(np.arange(t.size) <= i, row, 0.0)
                lower[k] = max(lower[k], norm_of_samples(Y, t, cut))
    else:
        pref = _PrefixNorm(Y, t)(outs)
        lower = pref[:, idx].max(axis=0)
        if zero is not None:
            lower = np.maximum(lower, zero.max())
    lower = np.maximum.accumulate(lower[::-1])[::-1]
    est = np.maximum(lower, _dual_estimates(X, Y, op, a_grid, t))
    hint, hv = verdict_hint(lower, cfg)
    return ProbeCurve(a_grid, lower, est, hint, hv, _citation("range"), exhausted)


# --------------------------------------------------------------------------
# endpoint conditions


@dataclass
class EndpointResult:
    a: np.ndarray
    values: np.ndarray
    holds: bool
    method: str
    citation: str

    @property
    def limit(self) -> float:
        return float(self.values[-1])


def l1_source_value(Y: SpaceSpec, I: ProfileJ, m: int, a) -> np.ndarray:
    """``sup_{s<a} s^(m-1) phi_Y(s) / I(s)^m`` sampled along ``a`` (descending)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    s = np.union1d(a, np.geomspace(a.min() * 1e-3, a.max(), 2000))
    v = s ** (m - 1) * fundamental_function(Y, s) / I(s) ** m
    run = np.maximum.accumulate(v)
    return run[np.searchsorted(s, a)]


def _asym(J: ProfileJ):
    """``(e, l)`` with ``J(t) ~ t^e log(2/t)^l`` for the closed-form families."""
    if J.family == "power":
        return to_exact(J.params["gamma"]), to_exact(0)
    if J.family == "slog":
        return to_exact(1), to_exact(J.params["b"])
    if J.family == "l_phi" and J.params["phi"].is_power:
        return to_exact(1), to_exact(J.params["phi"].slog_params()[0])
    return None


def _phi_asym(X: SpaceSpec):
    p, q, a = X.triple
    if p != INF:
        return 1 / p, a
    return to_exact(0), a + (0 if q == INF else 1 / q)


def endpoint_L1_into_X(I, m: int, X: SpaceSpec, cfg: Optional[ProbeConfig] = None) -> EndpointResult:
    """``lim_{a->0} a^(m-1) phi_X(a) / I(a)^m`` (zero means the L^1 condition holds)."""
    cfg = cfg or ProbeConfig()
    J = getattr(I, "J", I)
    a = cfg.a_grid()
    vals = a ** (m - 1) * fundamental_function(X, a) / J(a) ** m
    asym = _asym(J)
    cite = "Thm (ll)(a)(iii): lim a^(m-1) phi_X(a) / I(a)^m = 0"
    if asym is not None:
        e, l = asym
        pe, pl = _phi_asym(X)
        # a^(m-1+pe-m e) log(2/a)^(pl - m l)
        ex, lx = m - 1 + pe - m * e, pl - m * l
        holds = ex > 0 or (ex == 0 and lx < 0)
        return EndpointResult(a, vals, bool(holds), "symbolic", cite)
    hint, _ = verdict_hint(vals, cfg)
    return EndpointResult(a, vals, hint == "tends_to_zero", "numeric", cite)


def endpoint_Linfty(J: ProfileJ, j: int, s: SpaceSpec, direction: str,
                    cfg: Optional[ProbeConfig] = None) -> EndpointResult:
    """Endpoint conditions for ``L^inf`` source (``from_Linfty``) or target (``into_Linfty``).

    ``from_Linfty``: ``||chi_(0,a) (int_t^1 dr/J)^j||_s -> 0``.
    ``into_Linfty``: ``||chi_(0,a) (int_0^t dr/J)^(j-1) / J||_{s'} -> 0``.
    """
    cfg = cfg or ProbeConfig()
    _require(s)
    a = cfg.a_grid()
    t = _t_grid(cfg)
    idx = np.searchsorted(t, a)
    asym = _asym(J)
    if direction == "from_Linfty":
        cite = "Thm (lll)(a): lim ||chi_(0,a) (int_t^1 dr/J)^j||_X = 0"
        if J.integral_finite:
            return EndpointResult(a, np.zeros(a.size), True, "symbolic", cite)
        g = J.dlam(t, np.ones_like(t)) ** j
        vals = _PrefixNorm(s, t)(g[None, :])[0][idx]
        if asym is not None and asym[0] == 1:
            e, l = asym
            # int_t^1 dr/J ~ log(2/t)^(1-l) for l < 1; log log for l = 1
            if l < 1:
                holds = power_log_cutoff_vanishes(s, 0, j * (1 - l))
            else:
                # (log log)^j: absorbed by every log weight admissible at p = inf
                holds = not s.is_Linf()
            return EndpointResult(a, vals, bool(holds), "symbolic", cite)
        hint, _ = verdict_hint(vals, cfg)
        return EndpointResult(a, vals, hint == "tends_to_zero", "numeric", cite)
    if direction != "into_Linfty":
        raise ValueError("direction: must be from_Linfty or into_Linfty")
    cite = "Thm (lll)(b): lim ||chi_(0,a) (int_0^t dr/J)^(j-1) / J||_X' = 0"
    if not J.integral_finite:
        return EndpointResult(a, np.full(a.size, math.inf), False, "symbolic", cite)
    g = J.dlam(np.zeros_like(t), t) ** (j - 1) / J(t)
    if asym is not None and asym[1] == 0:
        e = asym[0]
        # g(t) ~ t^{(1-e)(j-1) - e}
        delta = e - (1 - e) * (j - 1)
        sd = dual_spec(s)
        if sd is not None:
            holds = power_log_cutoff_vanishes(sd, delta, 0)
            vals = _dual_cut_norms(s, t, g, idx)
            return EndpointResult(a, vals, bool(holds), "symbolic", cite)
    vals = _dual_cut_norms(s, t, g, idx)
    hint, _ = verdict_hint(vals, cfg)
    return EndpointResult(a, vals, hint == "tends_to_zero", "numeric", cite)


def _dual_cut_norms(s: SpaceSpec, t: np.ndarray, g: np.ndarray, idx: np.ndarray) -> np.ndarray:
    out = np.empty(idx.size)
    edges = np.concatenate(([0.0], t))
    for k, i in enumerate(idx):
        v = np.where(np.arange(t.size) <= i, g, 0.0)
        f = StepFunction(edges, v)
        if s.is_lebesgue:
            out[k] = norm(s.dual(), f).value
        else:
            out[k] = associate_norm(s, f, budget=600).value
    return out


# --------------------------------------------------------------------------
# optimal range and domain


def optimal_range_norm(X: SpaceSpec, J: ProfileJ, j: int, f: StepFunction,
                       points: int = 400) -> NormValue:
    """``||f||_{(X^r)'} = ||R^j_J f*||_{X'}`` (associate oracle for non-Lebesgue X)."""
    _require(X)
    fs = rearrange(f)
    if not np.any(fs.values > 0):
        return NormValue(0.0, "exact", 0.0)
    if X.is_lebesgue:
        # R f* is continuous: graded Gauss rules on two meshes, the gap is the error
        q = X.dual().q

        def fn(x):
            return volterra(J, j, fs, x)

        vals = [_lebesgue_norm_fn(q, fn, np.union1d(np.geomspace(1e-12, 1.0, k), fs.breakpoints))
                for k in (points // 8, points // 4)]
        err = abs(vals[1] - vals[0]) / vals[1] if vals[1] > 0 else 0.0
        return NormValue(vals[1], "quadrature", max(err, 1e-12))
    t = np.union1d(np.geomspace(1e-10, 1.0, points), fs.breakpoints[1:])
    r = volterra(J, j, fs, t)
    g = StepFunction(np.concatenate(([0.0], t)), r)
    res = associate_norm(X, g)
    return NormValue(res.value, "lower_bound", 0.0)


def _y_norm_of_hardy(Y: SpaceSpec, J: ProfileJ, j: int, h: StepFunction, t: np.ndarray) -> float:
    if Y.is_Linf():
        if J.integral_finite:
            return hardy_at_zero(J, j, h)
        return float(hardy(J, j, h, t[:1])[0])
    return norm_of_samples(Y, t, hardy(J, j, h, t))


def optimal_domain_norm(Y: SpaceSpec, J: ProfileJ, j: int, f: StepFunction,
                        mode: str = "bruteforce", max_cells: int = 9) -> NormValue:
    """``sup_{h ~ f} ||H^j_J h||_Y + ||f||_1`` over equimeasurable rearrangements.

    ``bruteforce`` enumerates every permutation of the cell values of ``f`` on
    its equal-measure grid.  ``closed_form`` (``Y = L^inf``, ``j = 1``,
    nondecreasing ``J`` with ``int_0^1 ds/J < inf``) returns ``int f*/J``.
    """
    _require(Y)
    if mode == "closed_form":
        if not (Y.is_Linf() and j == 1 and J.nondecreasing and J.integral_finite):
            raise ValueError("mode: closed form needs Y = L^inf, j = 1 and nondecreasing "
                             "J with a finite integral of 1/J")
        fs = rearrange(f)
        return NormValue(float(np.dot(fs.values, J.dlam(fs.lo, fs.hi))), "exact", 0.0)
    if mode != "bruteforce":
        raise ValueError(f"mode: unknown mode {mode!r}")
    n = f.ncells
    if n > max_cells:
        raise ValueError(f"f: bruteforce is capped at {max_cells} cells, got {n}")
    if not np.allclose(f.widths, 1.0 / n, rtol=1e-12, atol=0):
        raise ValueError("f: bruteforce needs an equal-measure grid")
    t = np.union1d(np.geomspace(1e-12, 1.0, 600), f.breakpoints[1:])
    best = 0.0
    for perm in set(itertools.permutations(f.values.tolist())):
        h = StepFunction(f.breakpoints, perm)
        best = max(best, _y_norm_of_hardy(Y, J, j, h, t))
    return NormValue(best + integrate(f), "lower_bound", 0.0)


# --------------------------------------------------------------------------
# duality identity


def _lebesgue_norm_fn(q, fn, edges: np.ndarray, zero_value: Optional[float] = None) -> float:
    """``||fn||_{L^q(0, edges[-1])}`` for ``fn`` smooth between ``edges``; zero outside."""
    if q == INF:
        xs, _, _ = cells_rule(edges)
        vals = fn(np.concatenate((xs, edges[1:])))
        m = float(np.max(vals)) if vals.size else 0.0
        return max(m, zero_value or 0.0)
    xs, ws, _ = cells_rule(edges)
    return float(np.dot(ws, np.abs(fn(xs)) ** float(q))) ** (1.0 / float(q))


@dataclass
class DualityResult:
    left: float
    right: float

    @property
    def relative_gap(self) -> float:
        m = max(self.left, self.right)
        return abs(self.left - self.right) / m if m > 0 else 0.0


def _compositions(total: int, parts: int):
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut + (total + parts - 1,):
            out.append(c - prev - 1)
            prev = c
        yield np.array(out, dtype=float)


def duality_identity_check(X: SpaceSpec, Y: SpaceSpec, I: ProfileJ, m: int, a: float,
                           cells: int = 7, lattice: int = 6, grid: str = "uniform",
                           refine: bool = True) -> DualityResult:
    """Both sides of the associate identity for the cutoff operator, by exhaustive search.

    Left: ``sup ||H^m_I(chi_(0,a) f)||_Y`` over nonnegative ``cells``-step
    functions on (0,a) with ``||f||_X <= 1``.  Right: ``sup ||chi_(0,a) R^m_I g*||_{X'}``
    over nonincreasing step functions ``g`` on (0,a) with ``||g||_{Y'} <= 1``.
    Both sides are searched over the same lattice and refined locally.
    Only Lebesgue ``X``, ``Y`` are supported (exact associates).
    """
    if not (X.is_lebesgue and Y.is_lebesgue):
        raise ValueError("X, Y: the exhaustive duality check needs Lebesgue spaces")
    if grid == "uniform":
        inner = np.linspace(0.0, a, cells + 1)
    else:
        inner = np.concatenate(([0.0], np.geomspace(a * 1e-3, a, cells)))
    edges = inner if a == 1.0 else np.concatenate((inner, [1.0]))
    Xd, Yd = X.dual(), Y.dual()
    qY, qXd = Y.q, Xd.q

    def pad(v):
        return v if a == 1.0 else np.concatenate((v, [0.0]))

    def left_val(v):
        f = StepFunction(edges, pad(v))
        nx = norm(X, f).value
        if nx <= 0:
            return 0.0
        f = f.scale(1.0 / nx)
        z = hardy_at_zero(I, m, f) if (qY == INF and I.integral_finite) else None
        return _lebesgue_norm_fn(qY, lambda x: hardy(I, m, f, x), edges, z)

    def right_val(d):
        v = np.cumsum(d[::-1])[::-1]
        g = StepFunction(edges, pad(v))
        ny = norm(Yd, g).value
        if ny <= 0:
            return 0.0
        g = g.scale(1.0 / ny)
        return _lebesgue_norm_fn(qXd, lambda x: volterra(I, m, g, x), inner)

    def search(fn):
        best, arg = 0.0, None
        for c in _compositions(lattice, cells):
            val = fn(c)
            if val > best:
                best, arg = val, c
        if refine and arg is not None:
            res = optimize.minimize(lambda z: -fn(np.abs(z)), arg + 1e-3, method="Nelder-Mead",
                                    options={"maxfev": 600, "xatol": 1e-4, "fatol": 1e-7})
            best = max(best, -float(res.fun))
        return best

    return DualityResult(search(left_val), search(right_val))
