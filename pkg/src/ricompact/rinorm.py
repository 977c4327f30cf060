"""Lorentz-Zygmund functionals on (0,1) evaluated on step functions.

``||f||_{p,q;alpha} = || f*(s) s^(1/p - 1/q) log(2/s)^alpha ||_{L^q(0,1)}``

Lebesgue and Lorentz specs are stored in the same three-parameter form.
Exponents are kept as :class:`fractions.Fraction` (or ``math.inf``) so the
symbolic embedding rules compare them exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np
from scipy import integrate as spi
from scipy import optimize, special

from .stepfn import StepFunction, primitive, rearrange

__all__ = [
    "SpaceSpec",
    "NormValue",
    "AssociateResult",
    "to_exact",
    "validate_space",
    "norm",
    "norm_of_samples",
    "fundamental_function",
    "associate_norm",
    "continuous_embedding_lz",
    "almost_compact_embedding_lz",
    "l1_embedding_constant",
    "power_log_cutoff_vanishes",
]

INF = math.inf
Number = Union[int, float, str, Fraction]


def to_exact(x: Number) -> Union[Fraction, float]:
    """Parse a parameter into a Fraction, or ``math.inf``.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "+inf", "∞"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        return Fraction(s)
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if math.isinf(x):
        return math.copysign(INF, x)
    if math.isnan(x):
        raise ValueError("nan is not a valid parameter")
    return Fraction(repr(float(x)))


def _recip(x) -> Fraction:
    return Fraction(0) if x == INF else 1 / x


def _fmt(x) -> str:
    if x == INF:
        return "inf"
    return str(x) if x.denominator != 1 else str(x.numerator)


def _json_num(x):
    if x == INF:
        return "inf"
    return int(x) if x.denominator == 1 else float(x)


@dataclass(frozen=True)
class SpaceSpec:
    """Symbolic descriptor of ``L^p``, ``L^{p,q}`` or ``L^{p,q;alpha}``.

    Two specs compare equal when their normalized triples agree, so
    ``lebesgue(2) == lorentz(2, 2)``.
    """

    family: str
    p: Fraction
    q: Fraction = field(default=None)
    alpha: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        fam = self.family
        if fam not in ("lebesgue", "lorentz", "lorentz_zygmund"):
            raise ValueError(f"family: unknown family {fam!r}")
        p = to_exact(self.p)
        q = p if (fam == "lebesgue" or self.q is None) else to_exact(self.q)
        a = Fraction(0) if fam != "lorentz_zygmund" else to_exact(self.alpha)
        if fam == "lebesgue" and self.q is not None and to_exact(self.q) != p:
            raise ValueError("q: lebesgue spec cannot carry a different q")
        if fam != "lorentz_zygmund" and to_exact(self.alpha) != 0:
            raise ValueError("alpha: only lorentz_zygmund specs carry alpha")
        for name, v in (("p", p), ("q", q)):
            if not (v == INF or v >= 1):
                raise ValueError(f"{name}: must lie in [1, inf]")
        if isinstance(a, float):
            raise ValueError("alpha: must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "alpha", a)

    # ---- constructors ---------------------------------------------------
    @classmethod
    def lebesgue(cls, p: Number) -> "SpaceSpec":
        return cls("lebesgue", p)

    @classmethod
    def lorentz(cls, p: Number, q: Number) -> "SpaceSpec":
        return cls("lorentz", p, q)

    @classmethod
    def lz(cls, p: Number, q: Number, alpha: Number) -> "SpaceSpec":
        return cls("lorentz_zygmund", p, q, alpha)

    # ---- normalization --------------------------------------------------
    @property
    def triple(self) -> tuple:
        return (self.p, self.q, self.alpha)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpaceSpec):
            return NotImplemented
        return self.triple == other.triple

    def __hash__(self) -> int:
        return hash(self.triple)

    def normalized(self) -> "SpaceSpec":
        return SpaceSpec.lz(*self.triple)

    def simplest(self) -> "SpaceSpec":
        """Same space written in the smallest family that can express it."""
        p, q, a = self.triple
        if a != 0:
            return SpaceSpec.lz(p, q, a)
        return SpaceSpec.lebesgue(p) if p == q else SpaceSpec.lorentz(p, q)

    @property
    def is_lebesgue(self) -> bool:
        return self.p == self.q and self.alpha == 0

    def is_L1(self) -> bool:
        return self.triple == (1, 1, 0)

    def is_Linf(self) -> bool:
        return self.triple == (INF, INF, 0)

    @property
    def is_norm(self) -> bool:
        """Whether the defining functional itself is a norm (not just equivalent to one).

        True for ``L^inf`` and for ``q < inf`` with ``w^q`` nonincreasing,
        where ``w = s^(1/p-1/q) log(2/s)^alpha``.
        """
        p, q, a = self.triple
        if not validate_space(self).admissible:
            return False
        if q == INF:
            return p == INF and a == 0
        c = q / p - 1 if p != INF else Fraction(-1)
        k = a * q
        if c > 0:
            return False
        if c == 0:
            return k >= 0
        return k >= 0 or float(c) <= float(k) / math.log(2.0)

    # ---- float views ----------------------------------------------------
    @property
    def fp(self) -> float:
        return float(self.p)

    @property
    def fq(self) -> float:
        return float(self.q)

    @property
    def fa(self) -> float:
        return float(self.alpha)

    def dual(self) -> "SpaceSpec":
        """Hölder conjugate of a Lebesgue spec."""
        if not self.is_lebesgue:
            raise ValueError("dual: only Lebesgue specs have an exact dual here")
        p = self.p
        if p == 1:
            return SpaceSpec.lebesgue(INF)
        if p == INF:
            return SpaceSpec.lebesgue(1)
        return SpaceSpec.lebesgue(p / (p - 1))

    # ---- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        s = self.simplest()
        d = {"family": s.family, "p": _json_num(s.p)}
        if s.family != "lebesgue":
            d["q"] = _json_num(s.q)
        if s.family == "lorentz_zygmund":
            d["alpha"] = _json_num(s.alpha)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceSpec":
        if not isinstance(d, dict):
            raise ValueError("space: expected an object")
        fam = d.get("family")
        if fam is None:
            raise ValueError("family: missing field")
        if "p" not in d:
            raise ValueError("p: missing field")
        if fam in ("lorentz", "lorentz_zygmund") and "q" not in d:
            raise ValueError("q: missing field")
        if fam == "lorentz_zygmund" and "alpha" not in d:
            raise ValueError("alpha: missing field")
        try:
            return cls(fam, d["p"], d.get("q"), d.get("alpha", 0))
        except (TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"space: {exc}") from None

    def __str__(self) -> str:
        p, q, a = self.triple
        if self.is_lebesgue:
            return f"L^{_fmt(p)}"
        if a == 0:
            return f"L^{{{_fmt(p)},{_fmt(q)}}}"
        return f"L^{{{_fmt(p)},{_fmt(q)};{_fmt(a)}}}"

    __repr__ = __str__


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.admissible


def validate_space(s: SpaceSpec) -> Admissibility:
    """Which of the four admissibility conditions holds, if any."""
    p, q, a = s.triple
    if p == 1 and q == 1:
        if a >= 0:
            return Admissibility(True, "p=q=1, alpha>=0")
        return Admissibility(False, "p=q=1 needs alpha >= 0")
    if p == 1:
        return Admissibility(False, "p=1 needs q=1")
    if p != INF:
        return Admissibility(True, "1<p<inf")
    if q != INF:
        if a + 1 / q < 0:
            return Admissibility(True, "p=inf, q<inf, alpha+1/q<0")
        return Admissibility(False, "p=inf, q<inf needs alpha+1/q < 0")
    if a <= 0:
        return Admissibility(True, "p=q=inf, alpha<=0")
    return Admissibility(False, "p=q=inf needs alpha <= 0")


def _require(s: SpaceSpec) -> None:
    v = validate_space(s)
    if not v:
        raise ValueError(f"space: {s} is inadmissible ({v.reason})")


# --------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class NormValue:
    """A computed norm: ``exact`` or ``quadrature`` with a relative error bound."""

    value: float
    exactness: str = "exact"
    error: float = 0.0

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        v = self.value if math.isfinite(self.value) else "inf"
        return {"value": v, "exactness": self.exactness, "error_bound": self.error}


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _G(x: np.ndarray, c: float, k: float) -> np.ndarray:
    """``int_0^x s^c log(2/s)^k ds`` for ``x`` in [0,1]."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    if k == 0 and c > -1:
        out[pos] = xp ** (c + 1) / (c + 1)
        return out
    u = np.log(2.0 / xp)
    if c == -1:
        if k >= -1:
            out[pos] = np.inf
        else:
            out[pos] = u ** (k + 1) / (-(k + 1))
        return out
    if k + 1 > 0:
        lam = c + 1
        out[pos] = (2.0 ** lam * lam ** (-(k + 1)) * special.gamma(k + 1)
                    * special.gammaincc(k + 1, lam * u))
        return out
    # k+1 <= 0: Gamma(k+1, .) with nonpositive first argument; integrate in u
    lam = c + 1
    vals = []
    for ui in u:
        r, _ = spi.quad(lambda v: math.exp(-lam * (v - ui)) * v ** k, ui, np.inf,
                        epsabs=0.0, epsrel=1e-12, limit=200)
        vals.append(2.0 ** lam * math.exp(-lam * ui) * r)
    out[pos] = vals
    return out


def _cell_weights(lo: np.ndarray, hi: np.ndarray, c: float, k: float) -> np.ndarray:
    """``int_lo^hi s^c log(2/s)^k ds`` per cell, robust for narrow cells."""
    W = _G(hi, c, k) - _G(lo, c, k)
    narrow = (lo > 0) & ((hi - lo) < 0.05 * hi)
    if narrow.any():
        a, b = lo[narrow], hi[narrow]
        half = 0.5 * (b - a)
        s = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
        W[narrow] = half * ((s ** c * np.log(2.0 / s) ** k) @ _GL_W)
    return np.maximum(W, 0.0)


def _weight(s: np.ndarray, p: float, q: float, a: float) -> np.ndarray:
    e = (0.0 if p == INF else 1.0 / p) - (0.0 if q == INF else 1.0 / q)
    return s ** e * np.log(2.0 / s) ** a


def _sup_weight(lo: np.ndarray, hi: np.ndarray, p: float, a: float) -> np.ndarray:
    """Sup over each cell of ``s^(1/p) log(2/s)^a`` (the q = inf weight)."""
    if p == INF:
        if a == 0:
            return np.ones_like(hi)
        # log(2/s)^a with a < 0 is increasing
        return np.log(2.0 / hi) ** a
    if a > 0:
        crit = 2.0 * math.exp(-a * p)
        s = np.clip(crit, lo, hi)
    else:
        s = hi
    with np.errstate(divide="ignore"):
        return np.where(s > 0, s ** (1.0 / p) * np.log(2.0 / np.where(s > 0, s, 1.0)) ** a, 0.0)


def _tag(s: SpaceSpec) -> tuple[str, float]:
    return ("exact", 0.0) if s.alpha == 0 else ("quadrature", 1e-12)


def _norm_sorted(s: SpaceSpec, edges: np.ndarray, vals: np.ndarray) -> float:
    """Norm of the nonincreasing step function (edges, vals)."""
    p, q, a = s.fp, s.fq, s.fa
    lo, hi = edges[:-1], edges[1:]
    nz = vals > 0
    if not nz.any():
        return 0.0
    if q == INF:
        return float(np.max(vals[nz] * _sup_weight(lo[nz], hi[nz], p, a)))
    c = (q / p - 1.0) if p != INF else -1.0
    k = a * q
    W = _cell_weights(lo[nz], hi[nz], c, k)
    vmax = vals[nz].max()
    tot = float(np.dot((vals[nz] / vmax) ** q, W))
    return vmax * tot ** (1.0 / q)


def norm(s: SpaceSpec, f: StepFunction) -> NormValue:
    """``||f||`` of the defining functional (computed on ``f*``)."""
    _require(s)
    fs = rearrange(f)
    ex, err = _tag(s)
    return NormValue(_norm_sorted(s, fs.breakpoints, fs.values), ex, err)


def norm_of_samples(s: SpaceSpec, t: np.ndarray, values: np.ndarray) -> float:
    """Norm of the step function taking ``values[i]`` on ``(t[i-1], t[i]]``.

    For a nonincreasing function sampled at ``t`` (ending at 1) this is a
    lower bound of its norm.  ``(0, t[0])`` carries ``values[0]``.
    """
    t = np.asarray(t, dtype=float)
    v = np.maximum(np.asarray(values, dtype=float), 0.0)
    edges = np.concatenate(([0.0], t))
    edges[-1] = 1.0
    if np.all(np.diff(v) <= 0):
        return _norm_sorted(s, edges, v)
    return float(norm(s, StepFunction(edges, v)).value)


def fundamental_function(s: SpaceSpec, t) -> np.ndarray | float:
    """``phi_X(t) = ||chi_(0,t)||_X`` in closed form."""
    _require(s)
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr <= 0) | (t_arr > 1)):
        raise ValueError("t: must lie in (0,1]")
    p, q, a = s.fp, s.fq, s.fa
    tt = np.atleast_1d(t_arr)
    if q == INF:
        out = _sup_weight(np.zeros_like(tt), tt, p, a)
    else:
        c = (q / p - 1.0) if p != INF else -1.0
        out = _G(tt, c, a * q) ** (1.0 / q)
    return float(out[0]) if t_arr.ndim == 0 else out


# --------------------------------------------------------------------------
# associate norm


@dataclass
class AssociateResult:
    """Certified lower bound of ``||g||_{X'}`` with its witness ``h``."""

    value: float
    witness: Optional[StepFunction]
    exact: Optional[float] = None
    evaluations: int = 0
    exhausted: bool = False

    @property
    def lower(self) -> NormValue:
        return NormValue(self.value, "lower_bound", 0.0)

    def to_dict(self) -> dict:
        return {"lower_bound": self.value, "exact": self.exact,
                "evaluations": self.evaluations, "budget_exhausted": self.exhausted}


def _search_edges(g: StepFunction, points: int) -> np.ndarray:
    gs = rearrange(g)
    x = np.union1d(gs.breakpoints, np.geomspace(1e-9, 1.0, points))
    return np.unique(np.concatenate(([0.0], x)))


def _candidate_family(edges: np.ndarray) -> list[np.ndarray]:
    """Nonincreasing value vectors on ``edges``: cutoff powers and power-logs."""
    mid = np.sqrt(np.maximum(edges[:-1], edges[1] * 1e-3) * edges[1:])
    mid[0] = 0.5 * edges[1]
    cands = []
    cutoffs = np.unique(np.append(edges[1:][:: max(1, (edges.size - 1) // 24)], 1.0))
    for theta in (0.0, 0.25, 0.5, 0.75, 0.9, 0.99):
        for k in (0.0, -1.0, -2.0, 1.0):
            base = mid ** (-theta) * np.log(2.0 / mid) ** (-k)
            base = np.minimum.accumulate(base)
            for b in cutoffs:
                cands.append(np.where(edges[1:] <= b, base, 0.0))
    return cands


def associate_norm(s: SpaceSpec, g: StepFunction, budget: int = 2000,
                   points: int = 48, seed: int = 0) -> AssociateResult:
    """Lower bound of ``sup { int g* h : ||h||_X <= 1, h nonincreasing }``.

    The search runs over normalized cutoff characteristics, truncated powers
    and power-logs, then refines the best candidate by L-BFGS-B in the
    increment parametrization ``h = sum_j d_j chi_(0,x_{j+1})``, ``d_j >= 0``.
    For Lebesgue specs the Hölder dual value is returned in ``exact``.
    """
    _require(s)
    gs = rearrange(g)
    edges = _search_edges(g, points)
    widths = np.diff(edges)
    Gx = primitive(gs, edges[1:])                  # int_0^{x_{j+1}} g*
    evals = 0
    best, best_h = 0.0, None

    def score(v: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        n = _norm_sorted(s, edges, v)
        if n <= 0:
            return 0.0
        d = v - np.append(v[1:], 0.0)
        return float(np.dot(d, Gx)) / n

    # characteristic functions first: they solve L^1 and the weak-type specs
    for b in range(edges.size - 1):
        v = (np.arange(edges.size - 1) <= b).astype(float)
        sc = score(v)
        if sc > best:
            best, best_h = sc, v
    for v in _candidate_family(edges):
        if evals >= budget:
            break
        sc = score(v)
        if sc > best:
            best, best_h = sc, v
    exhausted = evals >= budget

    q = s.fq
    if q != INF and best_h is not None and not exhausted and best > 0:
        p, a = s.fp, s.fa
        c = (q / p - 1.0) if p != INF else -1.0
        W = _cell_weights(edges[:-1], edges[1:], c, a * q)
        scale = np.max(best_h)

        def negf(d):
            v = np.cumsum(d[::-1])[::-1]
            A = float(np.dot(d, Gx))
            nq = float(np.dot(v ** q, W))
            if A <= 0 or nq <= 0:
                return 0.0, np.zeros_like(d)
            N = nq ** (1.0 / q)
            dN_dv = N ** (1.0 - q) * v ** (q - 1.0) * W
            dN_dd = np.cumsum(dN_dv)
            val = -math.log(A) + math.log(N)
            grad = -Gx / A + dN_dd / N
            return val, grad

        d0 = (best_h - np.append(best_h[1:], 0.0)) / scale
        d0 = np.maximum(d0, 0.0) + 1e-6
        res = optimize.minimize(negf, d0, jac=True, method="L-BFGS-B",
                                bounds=[(0.0, None)] * d0.size,
                                options={"maxiter": max(10, budget - evals), "maxfun": budget})
        evals += int(res.nfev)
        d = np.maximum(res.x, 0.0)
        v = np.cumsum(d[::-1])[::-1]
        sc = score(v)
        if sc > best:
            best, best_h = sc, v

    exact = None
    if s.is_lebesgue:
        exact = float(norm(s.dual(), g).value)
        best = min(best, exact)
    witness = None
    if best_h is not None:
        n = _norm_sorted(s, edges, best_h)
        witness = StepFunction(edges, best_h / n)
    return AssociateResult(best, witness, exact, evals, exhausted)


def l1_embedding_constant(s: SpaceSpec) -> NormValue:
    """``C_X = ||1||_{X'}``, the constant in ``||f||_1 <= C_X ||f||_X``.

    For specs whose functional is a norm, averaging is a contraction, so the
    supremum is attained at ``h = 1/phi_X(1)`` and ``C_X = 1/phi_X(1)``.
    """
    _require(s)
    if s.is_norm:
        return NormValue(1.0 / fundamental_function(s, 1.0), "exact", 0.0)
    res = associate_norm(s, StepFunction([0.0, 1.0], [1.0]))
    return NormValue(float(res.value), "lower_bound", 0.0)


# --------------------------------------------------------------------------
# embedding rules


def continuous_embedding_lz(s1: SpaceSpec, s2: SpaceSpec) -> bool:
    """``L^{p1,q1;a1} -> L^{p2,q2;a2}`` continuously."""
    _require(s1)
    _require(s2)
    p1, q1, a1 = s1.triple
    p2, q2, a2 = s2.triple
    if p1 > p2:
        return True
    if p1 < p2:
        return False
    r1, r2 = _recip(q1), _recip(q2)
    if p1 != INF and q1 <= q2 and a1 >= a2:
        return True
    if p1 == INF and q1 <= q2 and a1 + r1 >= a2 + r2:
        return True
    if q2 < q1 and a1 + r1 > a2 + r2:
        return True
    return False


def almost_compact_embedding_lz(s1: SpaceSpec, s2: SpaceSpec) -> bool:
    """``L^{p1,q1;a1} ->* L^{p2,q2;a2}`` (uniform absolute continuity)."""
    _require(s1)
    _require(s2)
    p1, q1, a1 = s1.triple
    p2, q2, a2 = s2.triple
    if p1 > p2:
        return True
    if p1 < p2:
        return False
    if p1 != INF and q1 <= q2 and not a1 > a2:
        return False
    if (p1 == INF or q1 > q2) and not a1 + _recip(q1) > a2 + _recip(q2):
        return False
    return True


def power_log_cutoff_vanishes(s: SpaceSpec, e, l) -> bool:
    """Whether ``||chi_(0,a) t^(-e) log(2/t)^l||_s -> 0`` as ``a -> 0+``.

    Exact when ``e`` and ``l`` are rationals.  A finite norm near 0 already
    forces the limit to vanish because the space norm is absolutely continuous
    away from ``L^inf``.
    """
    _require(s)
    e, l = to_exact(e), to_exact(l)
    p, q, a = s.triple
    if e < 0 or (e == 0 and l < 0):
        return True
    if e == 0 and l == 0:
        return not s.is_Linf()
    r = _recip(p) - e
    if r != 0:
        return r > 0
    # borderline power: decided by the log exponent
    if q == INF:
        return a + l < 0
    return (a + l) * q < -1
