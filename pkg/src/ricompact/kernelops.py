"""Kernel operators on (0,1) and their structural identities.

Every operator here is reduced to ``H^j_J`` (or its associate ``R^j_J``),
possibly multiplied by a monotone prefactor:

* ``K^m_I = H_J`` and ``S^m_I = R_J`` with ``J = I^m / s^(m-1)``
* ``Q^m_n = H_J`` with ``J = s^(1 - m/n)``
* ``T^m_alpha = H_J`` with ``J = s^(1 - m(1-alpha))`` for alpha < 1, ``H^m_s`` for alpha = 1
* ``P^m_Phi = (Phi^-1(log 2/t) / log(2/t))^m (m-1)! H^m_s``

For a step function, ``H^j_J f(t)`` is a finite sum of powers of the
potential ``lam(x) = int_x^c dr/J`` and needs no quadrature.  ``R^j_J`` and
all integrals against continuous outputs use composite Gauss-Legendre rules
graded geometrically toward 0.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .stepfn import StepFunction, primitive

if os.environ.get("RICOMPACT_PURE_PYTHON"):
    from ._kernels_py import hardy_sum, hardy_sum_batch
    BACKEND = "python"
else:
    try:
        from ._kernels import hardy_sum, hardy_sum_batch
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from ._kernels_py import hardy_sum, hardy_sum_batch
        BACKEND = "python"

__all__ = [
    "ProfileJ",
    "OperatorSpec",
    "Sampled",
    "apply",
    "hardy",
    "volterra",
    "char_closed_form",
    "check_associate_identity",
    "check_composition",
    "check_HK_equivalence",
    "default_eval_grid",
    "BACKEND",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)
_GRADE = 4.0          # ratio of consecutive graded subintervals
_GRADE_LEVELS = 32    # 4^-32 ~ 5e-20 relative cut near 0


def graded_rule(lo: float, hi: float, n_nodes: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on ``[lo, hi]``.

    Subintervals shrink geometrically toward ``lo`` when ``lo == 0`` or the
    interval spans more than a factor ``_GRADE``; integrable endpoint
    singularities at 0 (powers, logs) are then resolved to ~1e-15.
    """
    if n_nodes == 12:
        gx, gw = _GL_X, _GL_W
    else:
        gx, gw = np.polynomial.legendre.leggauss(n_nodes)
    if hi <= lo:
        return np.empty(0), np.empty(0)
    if lo > 0 and hi / lo <= _GRADE:
        edges = np.array([lo, hi])
    else:
        k = _GRADE_LEVELS if lo == 0 else min(
            _GRADE_LEVELS, int(math.ceil(math.log(hi / lo) / math.log(_GRADE))))
        edges = hi * _GRADE ** -np.arange(k, -1, -1.0)
        edges[0] = lo if lo > 0 else edges[0]
        if lo > 0:
            edges = np.unique(np.clip(edges, lo, hi))
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * gx[None, :]
    weights = half[:, None] * gw[None, :]
    return nodes.ravel(), weights.ravel()


def cells_rule(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Graded rule on every cell of ``edges``; also returns each node's cell index."""
    xs, ws, ids = [], [], []
    for i in range(edges.size - 1):
        x, w = graded_rule(edges[i], edges[i + 1])
        xs.append(x)
        ws.append(w)
        ids.append(np.full(x.size, i))
    return np.concatenate(xs), np.concatenate(ws), np.concatenate(ids)


# --------------------------------------------------------------------------
# profiles J


@dataclass(frozen=True, eq=False)
class ProfileJ:
    """Weight ``J`` of the kernel operators.

    ``family`` is one of ``power`` (``c s^gamma``), ``slog``
    (``c s log(2/s)^b``), ``l_phi`` (``s Phi'(Phi^-1(log 2/s))``) or
    ``custom``.  ``lam`` is a decreasing potential with
    ``lam(a) - lam(b) = int_a^b dr/J``; it is anchored at 0 whenever that
    integral converges, which keeps small differences accurate.
    """

    family: str
    params: dict = field(default_factory=dict)
    fn: Optional[Callable] = None
    label: str = ""

    # ---- constructors -------------------------------------------------
    @classmethod
    def power(cls, gamma: float, c: float = 1.0) -> "ProfileJ":
        if gamma > 1:
            raise ValueError("gamma: J = s^gamma needs gamma <= 1 (inf J(t)/t > 0)")
        if c <= 0:
            raise ValueError("c: must be positive")
        return cls("power", {"gamma": float(gamma), "c": float(c)},
                   label=f"{c:g}*s^{gamma:g}")

    @classmethod
    def constant(cls, c: float = 1.0) -> "ProfileJ":
        return cls.power(0.0, c)

    @classmethod
    def slog(cls, b: float, c: float = 1.0) -> "ProfileJ":
        if b < 0:
            raise ValueError("b: J = s log(2/s)^b needs b >= 0 (inf J(t)/t > 0)")
        return cls("slog", {"b": float(b), "c": float(c)},
                   label=f"{c:g}*s*log(2/s)^{b:g}")

    @classmethod
    def l_phi(cls, phi) -> "ProfileJ":
        """``L_Phi``; ``phi`` needs ``inv`` and ``dphi`` (see ``isoperimetry.PhiSpec``)."""
        return cls("l_phi", {"phi": phi}, label=f"L_Phi[{phi.name}]")

    @classmethod
    def custom(cls, fn: Callable, label: str = "custom",
               nondecreasing: Optional[bool] = None) -> "ProfileJ":
        return cls("custom", {"nondecreasing": nondecreasing}, fn=fn, label=label)

    @classmethod
    def from_iso(cls, profile: "ProfileJ", m: int) -> "ProfileJ":
        """``J = I^m / s^(m-1)`` for an isoperimetric profile ``I``."""
        if m == 1:
            return profile
        p = profile.params
        if profile.family == "power":
            return cls.power(1.0 - m * (1.0 - p["gamma"]), p["c"] ** m)
        if profile.family == "slog":
            return cls.slog(m * p["b"], p["c"] ** m)
        if profile.family == "l_phi" and p["phi"].is_power:
            b, c = p["phi"].slog_params()
            return cls.slog(m * b, c ** m)
        base = profile
        return cls.custom(lambda s: base(s) ** m / s ** (m - 1),
                          label=f"({profile.label})^{m}/s^{m - 1}")

    # ---- evaluation ---------------------------------------------------
    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        p = self.params
        if self.family == "power":
            return p["c"] * s ** p["gamma"]
        if self.family == "slog":
            return p["c"] * s * np.log(2.0 / s) ** p["b"]
        if self.family == "l_phi":
            phi = p["phi"]
            return s * phi.dphi(phi.inv(np.log(2.0 / s)))
        return np.asarray(self.fn(s), dtype=float)

    @cached_property
    def integral_finite(self) -> bool:
        """Whether ``int_0^1 dr/J < inf``."""
        p = self.params
        if self.family == "power":
            return p["gamma"] < 1.0
        if self.family == "slog":
            return p["b"] > 1.0
        if self.family == "l_phi":
            return False
        return self._custom_tail_finite()

    @property
    def nondecreasing(self) -> bool:
        p = self.params
        if self.family == "power":
            return p["gamma"] >= 0.0
        if self.family == "slog":
            return p["b"] <= math.log(2.0)
        if self.family == "l_phi":
            return True
        if p.get("nondecreasing") is not None:
            return bool(p["nondecreasing"])
        s = np.geomspace(1e-12, 1.0, 2000)
        return bool(np.all(np.diff(self(s)) >= -1e-12 * np.abs(self(s[1:]))))

    def lam(self, x) -> np.ndarray:
        """Decreasing potential; ``lam(0)`` is 0 (finite case) or ``inf``."""
        x = np.asarray(x, dtype=float)
        p = self.params
        out = np.empty_like(x)
        zero = x <= 0
        xp = np.where(zero, 1.0, x)
        if self.family == "power":
            k = 1.0 - p["gamma"]
            if k > 0:
                out = -xp ** k / (k * p["c"])
                out = np.where(zero, 0.0, out)
            else:
                out = np.where(zero, np.inf, -np.log(xp) / p["c"])
            return out
        if self.family == "slog":
            b, c = p["b"], p["c"]
            u = np.log(2.0 / xp)
            if b > 1:
                out = np.where(zero, 0.0, -u ** (1 - b) / ((b - 1) * c))
            elif b == 1:
                out = np.where(zero, np.inf, np.log(u) / c)
            else:
                out = np.where(zero, np.inf, u ** (1 - b) / ((1 - b) * c))
            return out
        if self.family == "l_phi":
            phi = p["phi"]
            val = phi.inv(np.log(2.0 / xp)) - phi.inv(math.log(2.0))
            return np.where(zero, np.inf, val)
        return self._custom_lam(x)

    def dlam(self, a, b) -> np.ndarray:
        """``int_a^b dr/J`` (negative when ``b < a``), accurate for nearby a, b."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        p = self.params
        if self.family == "power":
            k, c = 1.0 - p["gamma"], p["c"]
            with np.errstate(divide="ignore", invalid="ignore"):
                if k == 0:
                    return np.log(b / a) / c
                r = np.log(a / b)
                return -(b ** k) * np.expm1(k * r) / (k * c)
        with np.errstate(invalid="ignore"):
            return self.lam(a) - self.lam(b)

    # ---- custom profiles: potential by panel quadrature in u = -log r ----
    _U_MAX = 700.0

    @cached_property
    def _panels(self) -> tuple[np.ndarray, np.ndarray]:
        edges = np.arange(0.0, self._U_MAX + 1.0)
        a, b = edges[:-1], edges[1:]
        nodes = (0.5 * (a + b))[:, None] + 0.5 * _GL_X[None, :]
        vals = np.exp(-nodes) / self(np.exp(-nodes))
        panel = 0.5 * (vals * _GL_W[None, :]).sum(axis=1)
        return edges, np.concatenate(([0.0], np.cumsum(panel)))

    def _custom_lam(self, x: np.ndarray) -> np.ndarray:
        edges, cum = self._panels
        x = np.asarray(x, dtype=float)
        u = -np.log(np.where(x > 0, x, 1.0))
        k = np.clip(np.floor(u).astype(int), 0, edges.size - 2)
        frac = u - k
        nodes = k[..., None] + 0.5 * frac[..., None] * (1.0 + _GL_X)
        part = 0.5 * frac * (np.exp(-nodes) / self(np.exp(-nodes)) * _GL_W).sum(axis=-1)
        out = cum[k] + part
        return np.where(x > 0, out, np.inf if not self.integral_finite else cum[-1])

    def _custom_tail_finite(self) -> bool:
        # contribution of u in [350, 700] must be negligible against the total
        edges, cum = self._panels
        return bool(cum[-1] - cum[350] < 1e-3 * max(cum[-1], 1e-300))

    # ---- checks -------------------------------------------------------
    def standing_ratio(self, grid: Optional[np.ndarray] = None) -> float:
        """``inf_t J(t)/t`` sampled on a geometric grid (must be positive)."""
        t = np.geomspace(1e-12, 1.0, 400) if grid is None else np.asarray(grid)
        return float(np.min(self(t) / t))

    def to_dict(self) -> dict:
        p = self.params
        if self.family == "power":
            return {"family": "power", "gamma": p["gamma"], "c": p["c"]}
        if self.family == "slog":
            return {"family": "slog", "b": p["b"], "c": p["c"]}
        if self.family == "l_phi":
            return {"family": "l_phi", "phi": p["phi"].to_dict()}
        return {"family": "custom", "label": self.label}

    def __repr__(self) -> str:
        return f"ProfileJ({self.label})"


# --------------------------------------------------------------------------
# H and R


def hardy(J: ProfileJ, j: int, f: StepFunction, t) -> np.ndarray:
    """``H^j_J f(t)`` for ``t`` in (0,1], exact up to rounding."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lam_t = J.lam(t)
    return hardy_sum(lam_t, J.lam(f.lo), J.lam(f.hi), f.values, int(j))


def hardy_batch(J: ProfileJ, j: int, edges: np.ndarray, values: np.ndarray, t) -> np.ndarray:
    """``H^j_J`` of many step functions sharing ``edges``; rows follow ``values``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return hardy_sum_batch(J.lam(t), J.lam(edges[:-1]), J.lam(edges[1:]),
                           np.atleast_2d(values), int(j))


def hardy_at_zero(J: ProfileJ, j: int, f: StepFunction) -> float:
    """``lim_{t->0+} H^j_J f(t)`` (``inf`` when the limit diverges)."""
    lo = J.lam(f.lo)
    lam0 = lo[0]
    if not np.isfinite(lam0):
        first = f.values[0] > 0 or not np.isfinite(J.lam(f.hi[0]))
        return math.inf if first else float(
            hardy(J, j, f, np.array([f.breakpoints[1] * 1e-300]))[0])
    hi = J.lam(f.hi)
    val = ((lam0 - hi) ** j - (lam0 - lo) ** j) @ f.values / math.factorial(j)
    return float(val)


def volterra(J: ProfileJ, j: int, f: StepFunction, t) -> np.ndarray:
    """``R^j_J f(t) = 1/((j-1)! J(t)) int_0^t (int_s^t dr/J)^(j-1) |f(s)| ds``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if j == 1:
        return primitive(f, t) / J(t)
    xs, ws, ids = cells_rule(f.breakpoints)
    wv = ws * f.values[ids]
    hi_node = f.hi[ids]
    out = np.empty_like(t)
    for k, tk in enumerate(t):
        full = hi_node <= tk
        acc = 0.0
        if full.any():
            d = J.dlam(xs[full], tk)
            acc = float(np.dot(wv[full], np.clip(d, 0.0, None) ** (j - 1)))
        c = int(np.searchsorted(f.breakpoints, tk, side="left")) - 1
        if 0 <= c < f.ncells and f.values[c] > 0 and f.lo[c] < tk:
            x, w = graded_rule(f.lo[c], tk)
            d = np.clip(J.dlam(x, tk), 0.0, None)
            acc += f.values[c] * float(np.dot(w, d ** (j - 1)))
        out[k] = acc
    return out / (math.factorial(j - 1) * J(t))


# --------------------------------------------------------------------------
# operator specs


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """One of the seven kernels: kind H, R, K, S, Q, T or P.

    ``order`` is j (H, R) or m (others).  ``J`` holds the weight for H/R,
    ``I`` the isoperimetric profile for K/S; Q uses ``n``, T uses ``alpha``
    (and optionally ``n`` for the range check), P uses ``phi``.
    """

    kind: str
    order: int = 1
    J: Optional[ProfileJ] = None
    I: Optional[ProfileJ] = None
    n: Optional[int] = None
    alpha: Optional[float] = None
    phi: object = None

    def __post_init__(self):
        k = self.kind
        if k not in ("H", "R", "K", "S", "Q", "T", "P"):
            raise ValueError(f"kind: unknown operator kind {k!r}")
        if int(self.order) < 1:
            raise ValueError("order: must be a positive integer")
        if k in ("H", "R") and self.J is None:
            raise ValueError("J: required for H/R operators")
        if k in ("K", "S") and self.I is None:
            raise ValueError("I: required for K/S operators")
        if k == "Q" and (self.n is None or self.n < 2):
            raise ValueError("n: Q needs n >= 2")
        if k == "T":
            if self.alpha is None:
                raise ValueError("alpha: required for T")
            lo = (self.n - 1) / self.n if self.n else 0.0
            # alpha often arrives as float(Fraction(n-1, n)); allow its rounding
            if not (lo - 1e-15 <= self.alpha <= 1.0 and self.alpha > 0):
                raise ValueError(f"alpha: must lie in [{lo:g}, 1]")
        if k == "P" and self.phi is None:
            raise ValueError("phi: required for P")

    @property
    def is_hardy(self) -> bool:
        return self.kind != "R" and self.kind != "S"

    def reduce(self) -> tuple[ProfileJ, int, Optional[Callable], float]:
        """``(J, j, prefactor, const)`` with op f = const * prefactor * H^j_J f."""
        m = int(self.order)
        k = self.kind
        if k in ("H", "R"):
            return self.J, m, None, 1.0
        if k in ("K", "S"):
            return ProfileJ.from_iso(self.I, m), 1, None, 1.0
        if k == "Q":
            return ProfileJ.power(1.0 - m / self.n), 1, None, 1.0
        if k == "T":
            if self.alpha < 1.0:
                return ProfileJ.power(1.0 - m * (1.0 - self.alpha)), 1, None, 1.0
            return ProfileJ.power(1.0), m, None, 1.0
        phi = self.phi

        def pre(t, phi=phi, m=m):
            y = np.log(2.0 / np.asarray(t, dtype=float))
            return (phi.inv(y) / y) ** m

        return ProfileJ.power(1.0), m, pre, float(math.factorial(m - 1))

    @property
    def prefactor_increasing(self) -> bool:
        # (Phi^-1(y)/y) is nonincreasing in y because s/Phi(s) is
        return True

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "m" if self.kind not in ("H", "R") else "j": self.order}
        if self.J is not None:
            d["J"] = self.J.to_dict()
        if self.I is not None:
            d["I"] = self.I.to_dict()
        if self.n is not None:
            d["n"] = self.n
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.phi is not None:
            d["phi"] = self.phi.to_dict()
        return d


@dataclass
class Sampled:
    """Operator output sampled at points ``t``."""

    t: np.ndarray
    values: np.ndarray
    nonincreasing: bool = False

    def lower_step(self) -> StepFunction:
        """Step function below a nonincreasing output: value at each cell's right end.

        The first cell ``(0, t_0)`` gets the value at ``t_0``.
        """
        t = self.t
        if t[-1] != 1.0:
            raise ValueError("t: sampling grid must end at 1")
        x = np.concatenate(([0.0], t))
        return StepFunction(x, np.concatenate(([self.values[0]], self.values[1:])))

    def to_step(self) -> StepFunction:
        """Step function with the sample at each cell's right end (heuristic)."""
        return self.lower_step()


def default_eval_grid(f: Optional[StepFunction] = None, points: int = 256,
                      smallest: float = 1e-10) -> np.ndarray:
    """Geometric grid toward 0 merged with the input breakpoints."""
    t = np.geomspace(smallest, 1.0, points)
    if f is not None:
        t = np.union1d(t, f.breakpoints[1:])
    t[-1] = 1.0
    return np.unique(t)


def apply(op: OperatorSpec, f: StepFunction, t=None) -> Sampled:
    """Apply ``op`` to ``f`` and sample the result at ``t`` (default grid if None)."""
    if t is None:
        t = default_eval_grid(f)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0) or np.any(t > 1):
        raise ValueError("t: evaluation points must lie in (0,1]")
    J, j, pre, const = op.reduce()
    if op.kind in ("R", "S"):
        return Sampled(t, volterra(J, j, f, t))
    vals = const * hardy(J, j, f, t)
    if pre is not None:
        vals = vals * pre(t)
        return Sampled(t, vals, nonincreasing=False)
    return Sampled(t, vals, nonincreasing=True)


def char_closed_form(J: ProfileJ, j: int, a: float, t) -> np.ndarray:
    """``chi_(0,a)(t) (1/j!) (int_t^a dr/J)^j``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    inside = t < a
    d = np.where(inside, J.dlam(np.where(inside, t, a), a), 0.0)
    return np.where(inside, d ** j / math.factorial(j), 0.0)


# --------------------------------------------------------------------------
# identities


def _integrate_against(f: StepFunction, g: StepFunction, fn: Callable) -> float:
    """``int f(t) * fn(t) dt`` with graded rules on the union grid of f and g."""
    edges = np.union1d(f.breakpoints, g.breakpoints)
    xs, ws, ids = cells_rule(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    fv = f(mid)[ids]
    keep = fv > 0
    if not keep.any():
        return 0.0
    return float(np.dot(ws[keep] * fv[keep], fn(xs[keep])))


def check_associate_identity(J: ProfileJ, j: int, f: StepFunction, g: StepFunction) -> float:
    """``|int f H^j_J g - int g R^j_J f|``."""
    lhs = _integrate_against(f, g, lambda t: hardy(J, j, g, t))
    rhs = _integrate_against(g, f, lambda t: volterra(J, j, f, t))
    return abs(lhs - rhs)


def _piecewise_h(edges_u: np.ndarray, polys: list) -> list:
    """One application of H in the variable u = lam(s).

    Cell i covers u in [edges_u[i+1], edges_u[i]] (lam is decreasing).  With
    g expressed as a polynomial in u on each cell, ``H g(t) = int_{lam(1)}^{lam(t)} g du``.
    """
    out = []
    acc = 0.0
    for i in range(len(polys) - 1, -1, -1):
        lo_u = edges_u[i + 1]
        anti = polys[i].integ()
        piece = anti - anti(lo_u) + acc
        out.append(piece)
        if np.isfinite(edges_u[i]):
            acc = piece(edges_u[i])
    return out[::-1]


def check_composition(J: ProfileJ, j: int, f: StepFunction, t=None) -> float:
    """Max deviation between ``H^j_J f`` and the j-fold iterate of ``H_J``.

    The iterate is computed independently of the kernel formula: on each cell
    ``H_J`` integrates a polynomial in ``u = lam(s)`` exactly.
    """
    if t is None:
        t = default_eval_grid(f, points=128, smallest=1e-8)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    edges_u = J.lam(f.breakpoints)
    polys = [Polynomial([v]) for v in f.values]
    for _ in range(j):
        polys = _piecewise_h(edges_u, polys)
    idx = np.clip(np.searchsorted(f.breakpoints, t, side="right") - 1, 0, f.ncells - 1)
    ut = J.lam(t)
    iterated = np.array([polys[i](u) for i, u in zip(idx, ut)])
    direct = hardy(J, j, f, t)
    return float(np.max(np.abs(iterated - direct)))


def check_HK_equivalence(I: ProfileJ, m: int, fs: list, Y, t=None) -> tuple[float, float]:
    """``[min, max]`` of ``||H^m_I f||_Y / ||K^m_I f||_Y`` over ``fs``.

    Refused (``ValueError``) when ``I`` fails the comparison condition
    ``int_0^s dr/I ~ s/I(s)``.
    """
    from .isoperimetry import check_aprox
    from .rinorm import norm_of_samples

    ok, _ = check_aprox(I)
    if not ok:
        raise ValueError("I: fails int_0^s dr/I ~ s/I(s); H and K need not be comparable")
    if t is None:
        t = default_eval_grid(points=400, smallest=1e-10)
    JK = ProfileJ.from_iso(I, m)
    ratios = []
    for f in fs:
        h = norm_of_samples(Y, t, hardy(I, m, f, t))
        k = norm_of_samples(Y, t, hardy(JK, 1, f, t))
        if k > 0:
            ratios.append(h / k)
    return (min(ratios), max(ratios)) if ratios else (math.nan, math.nan)
