"""Isoperimetric profiles, one-dimensional log-concave measures and model domains.

A product measure ``c_Phi^n exp(-sum Phi(|x_i|))`` on R^n has isoperimetric
function comparable to ``L_Phi(t) = t Phi'(Phi^-1(log 2/t))``; John domains
behave like ``t^(1/n')`` and the Maz'ya class ``J_alpha`` like ``t^alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import integrate as spi
from scipy import optimize, special

from .kernelops import ProfileJ
from .rinorm import to_exact

__all__ = [
    "PhiSpec",
    "IsoProfile",
    "DomainSpec",
    "ModelDomain",
    "PhiRegime",
    "l_phi",
    "f_phi",
    "i_phi",
    "check_iso_equivalence",
    "check_aprox",
    "check_compatible",
    "mazya_model_domain",
    "phi_regime",
    "kappa",
    "c_phi_quadrature",
    "f_phi_inverse",
]


def kappa(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


# --------------------------------------------------------------------------
# Phi


@dataclass(frozen=True, eq=False)
class PhiSpec:
    """Young-type function ``Phi`` generating ``d mu = c_Phi exp(-Phi(|x|)) dx``.

    ``gauss`` is ``t^2/2``; ``boltzmann(beta)`` is ``t^beta/beta`` with
    ``beta >= 1``; ``custom`` takes ``Phi`` and ``Phi'`` callables.
    """

    family: str
    beta: Optional[float] = None
    fn: Optional[Callable] = None
    dfn: Optional[Callable] = None
    name: str = ""

    @classmethod
    def gauss(cls) -> "PhiSpec":
        return cls("gauss", 2.0, name="gauss")

    @classmethod
    def boltzmann(cls, beta: float) -> "PhiSpec":
        if not beta >= 1:
            raise ValueError("beta: Boltzmann needs beta >= 1")
        return cls("boltzmann", float(beta), name=f"boltzmann({float(beta):g})")

    @classmethod
    def custom(cls, fn: Callable, dfn: Callable, name: str = "custom") -> "PhiSpec":
        return cls("custom", None, fn, dfn, name)

    @property
    def is_power(self) -> bool:
        return self.family in ("gauss", "boltzmann")

    @property
    def beta_exact(self) -> Fraction:
        if not self.is_power:
            raise ValueError("beta: only power-type Phi carry beta")
        return to_exact(self.beta)

    def __call__(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        if self.is_power:
            return x ** self.beta / self.beta
        return np.asarray(self.fn(x), dtype=float)

    def dphi(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        if self.is_power:
            return x ** (self.beta - 1.0)
        return np.asarray(self.dfn(x), dtype=float)

    def inv(self, y):
        """``Phi^-1`` on [0, inf)."""
        y = np.asarray(y, dtype=float)
        if self.is_power:
            return (self.beta * y) ** (1.0 / self.beta)
        return self.inv_numeric(y)

    def inv_numeric(self, y):
        """``Phi^-1`` by bracketing root search (independent of any closed form)."""
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        for i, yi in np.ndenumerate(y):
            if yi <= 0:
                out[i] = 0.0
                continue
            hi = 1.0
            while float(self(hi)) < yi:
                hi *= 2.0
            out[i] = optimize.brentq(lambda x: float(self(x)) - yi, 0.0, hi,
                                     xtol=1e-300, rtol=4 * np.finfo(float).eps)
        return out if y.ndim else float(out)

    def slog_params(self) -> tuple[float, float]:
        """``(b, c)`` with ``L_Phi(s) = c s log(2/s)^b`` (power-type Phi only)."""
        b = self.beta
        return (b - 1.0) / b, b ** ((b - 1.0) / b)

    @cached_property
    def c_phi(self) -> float:
        return _c_phi(self)

    def tail(self, t: float) -> float:
        """``int_t^inf exp(-Phi(r)) dr`` for ``t >= 0``."""
        if self.is_power:
            b = self.beta
            return b ** (1.0 / b - 1.0) * special.gamma(1.0 / b) * special.gammaincc(
                1.0 / b, t ** b / b)
        val, _ = spi.quad(lambda r: math.exp(-float(self(r))), t, np.inf,
                          epsabs=1e-15, epsrel=1e-13, limit=400)
        return val

    def validate(self, grid: Optional[np.ndarray] = None) -> dict:
        """Sampled checks: ``Phi(0)=0``, increasing, convex, ``sqrt(Phi)`` concave, inverse."""
        x = np.linspace(0.0, 20.0, 2001) if grid is None else np.asarray(grid)
        v = self(x)
        r = np.sqrt(v)
        d2 = v[2:] - 2 * v[1:-1] + v[:-2]
        e2 = r[2:] - 2 * r[1:-1] + r[:-2]
        y = np.geomspace(1e-8, 1e3, 200)
        back = self(self.inv(y))
        tol = 1e-9 * np.abs(v).max()
        return {
            "zero_at_zero": bool(float(self(0.0)) == 0.0),
            "increasing": bool(np.all(np.diff(v) > 0)),
            "convex": bool(np.all(d2 >= -tol)),
            "sqrt_concave": bool(np.all(e2 <= 1e-9 * r.max())),
            "inverse": bool(np.max(np.abs(back - y) / y) < 1e-10),
        }

    def to_dict(self) -> dict:
        if self.family == "gauss":
            return {"family": "gauss"}
        if self.family == "boltzmann":
            b = self.beta
            return {"family": "boltzmann", "beta": int(b) if b == int(b) else b}
        return {"family": "custom", "name": self.name}

    @classmethod
    def from_dict(cls, d: dict) -> "PhiSpec":
        if not isinstance(d, dict):
            raise ValueError("phi: expected an object")
        fam = d.get("family")
        if fam == "gauss":
            return cls.gauss()
        if fam == "boltzmann":
            if "beta" not in d:
                raise ValueError("beta: missing field")
            return cls.boltzmann(float(to_exact(d["beta"])))
        raise ValueError(f"phi.family: unsupported family {fam!r}")

    def __repr__(self) -> str:
        return f"PhiSpec({self.name})"


def _c_phi(phi: PhiSpec) -> float:
    if phi.is_power:
        # int_0^inf exp(-r^b/b) dr in closed form
        return 1.0 / (2.0 * phi.tail(0.0))
    return c_phi_quadrature(phi)


def c_phi_quadrature(phi: PhiSpec) -> float:
    """``c_Phi`` by adaptive quadrature with a convexity tail bound."""
    T = 1.0
    while float(phi(T)) < 36.0:
        T *= 2.0
    head, _ = spi.quad(lambda r: math.exp(-float(phi(r))), 0.0, T,
                       epsabs=1e-16, epsrel=1e-13, limit=500)
    # exp(-Phi(r)) <= exp(-Phi(T) - Phi'(T)(r - T)) for r > T by convexity
    tail = math.exp(-float(phi(T))) / max(float(phi.dphi(T)), 1e-300)
    return 1.0 / (2.0 * (head + tail))


def l_phi(phi: PhiSpec, t):
    """``L_Phi(t) = t Phi'(Phi^-1(log(2/t)))``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr <= 0) | (t_arr > 1)):
        raise ValueError("t: must lie in (0,1]")
    out = t_arr * phi.dphi(phi.inv(np.log(2.0 / t_arr)))
    return float(out) if out.ndim == 0 else out


def f_phi(phi: PhiSpec, t):
    """``F_Phi(t) = mu_Phi((t, inf))``."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    c = phi.c_phi
    out = np.array([c * phi.tail(abs(x)) for x in t_arr])
    out = np.where(t_arr >= 0, out, 1.0 - out)
    return float(out[0]) if np.ndim(t) == 0 else out


def f_phi_inverse(phi: PhiSpec, y: float) -> float:
    """``F_Phi^-1(y)`` for ``y`` in (0,1), by bracketing root search to 1e-12."""
    if not 0.0 < y < 1.0:
        raise ValueError("y: must lie in (0,1)")
    if y == 0.5:
        return 0.0
    if y > 0.5:
        return -f_phi_inverse(phi, 1.0 - y)
    # F is decreasing; search t > 0 with F(t) = y via the tail mass
    target = y / phi.c_phi
    hi = 1.0
    while phi.tail(hi) > target:
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("F_Phi inversion: no bracket found")
    g = lambda x: math.log(phi.tail(x)) - math.log(target)
    return optimize.brentq(g, 0.0, hi, xtol=1e-12, rtol=1e-14, maxiter=500)


def i_phi(phi: PhiSpec, t):
    """``I_Phi(t) = c_Phi exp(-Phi(|F_Phi^-1(t)|))``."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([phi.c_phi * math.exp(-float(phi(f_phi_inverse(phi, x)))) for x in t_arr])
    return float(out[0]) if np.ndim(t) == 0 else out


def check_iso_equivalence(phi: PhiSpec, grid=None) -> tuple[float, float]:
    """``[min, max]`` of ``I_Phi / L_Phi`` over ``grid`` (default 200 points in [1e-6, 1/2])."""
    t = np.geomspace(1e-6, 0.5, 200) if grid is None else np.atleast_1d(np.asarray(grid, float))
    r = i_phi(phi, t) / l_phi(phi, t)
    r = np.atleast_1d(r)
    return float(r.min()), float(r.max())


# --------------------------------------------------------------------------
# profiles and domains


@dataclass(frozen=True, eq=False)
class IsoProfile:
    """An isoperimetric lower-bound profile with its family tag.

    ``J`` is the evaluator (a :class:`ProfileJ`), ``family`` one of
    ``john``, ``mazya``, ``l_phi``, ``power`` or ``custom``.
    """

    J: ProfileJ
    family: str
    params: dict = field(default_factory=dict)

    @classmethod
    def john(cls, n: int) -> "IsoProfile":
        return cls(ProfileJ.power(1.0 - 1.0 / n), "john", {"n": n})

    @classmethod
    def mazya(cls, alpha: float) -> "IsoProfile":
        return cls(ProfileJ.power(alpha), "mazya", {"alpha": alpha})

    @classmethod
    def power(cls, gamma: float) -> "IsoProfile":
        return cls(ProfileJ.power(gamma), "power", {"gamma": gamma})

    @classmethod
    def slog(cls, b: float, c: float = 1.0) -> "IsoProfile":
        return cls(ProfileJ.slog(b, c), "slog", {"b": b})

    @classmethod
    def lphi(cls, phi: PhiSpec) -> "IsoProfile":
        return cls(ProfileJ.l_phi(phi), "l_phi", {"phi": phi})

    @classmethod
    def custom(cls, fn: Callable, label: str = "custom") -> "IsoProfile":
        return cls(ProfileJ.custom(fn, label), "custom")

    def __call__(self, t):
        return self.J(t)

    @property
    def nondecreasing(self) -> bool:
        return self.J.nondecreasing

    @property
    def integral_finite(self) -> bool:
        return self.J.integral_finite

    @property
    def aprox(self) -> bool:
        return check_aprox(self)[0]

    def asymptotics(self) -> Optional[tuple[float, float]]:
        """``(e, l)`` with ``I(t) ~ t^e log(2/t)^l`` near 0, or None if unknown."""
        J = self.J
        if J.family == "power":
            return J.params["gamma"], 0.0
        if J.family == "slog":
            return 1.0, J.params["b"]
        if J.family == "l_phi" and J.params["phi"].is_power:
            return 1.0, J.params["phi"].slog_params()[0]
        return None


def _as_profile(I) -> ProfileJ:
    return I.J if isinstance(I, IsoProfile) else I


def check_aprox(I, lo: float = 1e-6) -> tuple[bool, tuple[float, float]]:
    """Whether ``int_0^s dr/I ~ s/I(s)``; returns the flag and the ratio interval on [lo, 1].

    The ratio is also followed down to 1e-30: the flag is true only when the
    interval stays within a factor 2 there, i.e. it is stable as the sampled
    range is extended toward 0.
    """
    J = _as_profile(I)
    if not J.integral_finite:
        return False, (math.nan, math.inf)

    def ratios(s):
        head = J.dlam(np.zeros_like(s), s) if J.family == "power" else J.lam(0.0) - J.lam(s)
        return np.asarray(head) * J(s) / s

    base = ratios(np.geomspace(lo, 1.0, 400))
    ext = ratios(np.geomspace(1e-30, lo, 400))
    rmin, rmax = float(base.min()), float(base.max())
    stable = ext.max() <= 2.0 * rmax and ext.min() >= 0.5 * rmin
    return bool(np.isfinite(rmax) and stable), (rmin, rmax)


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """``john(n)``, ``mazya_class(alpha, n)``, ``mazya_model(alpha, n)`` or ``product(phi, n)``."""

    kind: str
    n: int
    alpha: Optional[Fraction] = None
    phi: Optional[PhiSpec] = None

    def __post_init__(self):
        k = self.kind
        if k not in ("john", "mazya_class", "mazya_model", "product", "custom"):
            raise ValueError(f"kind: unknown domain kind {k!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n: must be a positive integer")
        if k in ("john", "mazya_class", "mazya_model") and self.n < 2:
            raise ValueError("n: must be at least 2")
        if k in ("mazya_class", "mazya_model"):
            if self.alpha is None:
                raise ValueError("alpha: missing field")
            a = to_exact(self.alpha)
            if not (Fraction(self.n - 1, self.n) <= a <= 1):
                raise ValueError(f"alpha: must lie in [1/n', 1] = [{self.n - 1}/{self.n}, 1]")
            object.__setattr__(self, "alpha", a)
        if k == "product" and self.phi is None:
            raise ValueError("phi: missing field")

    @classmethod
    def john(cls, n: int) -> "DomainSpec":
        return cls("john", n)

    @classmethod
    def mazya_class(cls, alpha, n: int) -> "DomainSpec":
        return cls("mazya_class", n, alpha)

    @classmethod
    def mazya_model(cls, alpha, n: int) -> "DomainSpec":
        return cls("mazya_model", n, alpha)

    @classmethod
    def product(cls, phi: PhiSpec, n: int) -> "DomainSpec":
        return cls("product", n, phi=phi)

    def profile(self) -> IsoProfile:
        if self.kind == "john":
            return IsoProfile.john(self.n)
        if self.kind in ("mazya_class", "mazya_model"):
            return IsoProfile.mazya(float(self.alpha))
        if self.kind == "product":
            return IsoProfile.lphi(self.phi)
        raise ValueError("kind: custom domains carry no profile")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        if self.alpha is not None:
            a = self.alpha
            d["alpha"] = int(a) if a.denominator == 1 else str(a)
        if self.phi is not None:
            d["phi"] = self.phi.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        if not isinstance(d, dict):
            raise ValueError("domain: expected an object")
        for key in ("kind", "n"):
            if key not in d:
                raise ValueError(f"domain.{key}: missing field")
        n = d["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError("domain.n: must be an integer")
        phi = PhiSpec.from_dict(d["phi"]) if "phi" in d else None
        alpha = d.get("alpha")
        try:
            return cls(d["kind"], n, to_exact(alpha) if alpha is not None else None, phi)
        except ValueError as exc:
            raise ValueError(f"domain.{exc}") from None


def _compare_asym(a: tuple, b: tuple) -> bool:
    """``t^a0 log^a1 <~ t^b0 log^b1`` near 0."""
    return a[0] > b[0] or (a[0] == b[0] and a[1] <= b[1])


def check_compatible(d: DomainSpec, I: IsoProfile) -> dict:
    """Compatibility report ``{C1, C2, C3}``; C3 is decided symbolically."""
    t = np.geomspace(1e-12, 1.0, 600)
    c1 = I.nondecreasing
    c2 = bool(np.min(I(t) / t) > 1e-8)
    mine = I.asymptotics()
    if d.kind == "custom" or mine is None:
        c3 = "out_of_scope"
    else:
        if d.kind == "john":
            ref = (1.0 - 1.0 / d.n, 0.0)
        elif d.kind in ("mazya_class", "mazya_model"):
            ref = (float(d.alpha), 0.0)
        else:
            ref = d.profile().asymptotics()
        c3 = "out_of_scope" if ref is None else _compare_asym(mine, ref)
    return {"C1": c1, "C2": c2, "C3": c3}


# --------------------------------------------------------------------------
# Maz'ya model domain


@dataclass(frozen=True)
class ModelDomain:
    """Body of revolution ``{|x'| < eta(x_n), 0 < x_n < L}`` in R^n."""

    alpha: float
    n: int

    @property
    def L(self) -> float:
        return math.inf if self.alpha == 1 else 1.0 / (1.0 - self.alpha)

    def eta(self, r):
        r = np.asarray(r, dtype=float)
        a, n = self.alpha, self.n
        k = kappa(n - 1) ** (-1.0 / (n - 1))
        if a == 1:
            return k * np.exp(-r / (n - 1))
        return k * np.clip(1.0 - (1.0 - a) * r, 0.0, None) ** (a / ((1.0 - a) * (n - 1)))

    def M(self, t):
        t = np.asarray(t, dtype=float)
        a = self.alpha
        if a == 1:
            return np.exp(-t)
        return np.clip(1.0 - (1.0 - a) * t, 0.0, None) ** (1.0 / (1.0 - a))

    def section_area(self, r):
        return kappa(self.n - 1) * self.eta(r) ** (self.n - 1)

    def volume(self) -> float:
        return self.level_set_measure(0.0)

    def level_set_measure(self, t: float) -> float:
        """``lambda_n({x_n > t})`` by quadrature of the cross-section areas."""
        val, _ = spi.quad(lambda r: float(self.section_area(r)), t, self.L,
                          epsabs=1e-14, epsrel=1e-12, limit=400)
        return val


def mazya_model_domain(alpha, n: int, strict: bool = True) -> ModelDomain:
    """Model domain of the Maz'ya class ``J_alpha`` in R^n.

    With ``strict=False`` any ``alpha`` in (0, 1] is accepted; volume and
    level-set identities hold there too, but the isoperimetric comparison
    with ``t^alpha`` needs ``alpha >= 1/n'``.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError("n: must be an integer >= 2")
    a = to_exact(alpha)
    lo = Fraction(n - 1, n) if strict else 0
    if not (lo <= a <= 1 and a > 0):
        raise ValueError(f"alpha: must lie in [{float(lo):g}, 1]")
    return ModelDomain(float(a), n)


# --------------------------------------------------------------------------
# regime of s/Phi(s)


@dataclass(frozen=True)
class PhiRegime:
    kind: str            # zero_limit | positive_limit
    value: float = 0.0

    def __str__(self) -> str:
        return self.kind if self.kind == "zero_limit" else f"positive_limit({self.value:g})"


def phi_regime(phi: PhiSpec, max_doublings: int = 1000) -> PhiRegime:
    """Classify ``lim_{s->inf} s/Phi(s)`` along ``s = 2^k``.

    ``s/Phi(s)`` is nonincreasing for convex ``Phi`` with ``Phi(0)=0``.  The
    limit is positive once the relative change per doubling drops below
    1e-6; it is zero once the values fall under 1e-12 of the start, or once
    the per-doubling factor settles strictly below 1 (geometric decay).
    """
    prev = None
    prev_ratio = None
    v0 = None
    for k in range(max_doublings):
        s = 2.0 ** k
        v = s / float(phi(s))
        if not math.isfinite(v):
            break
        if v0 is None:
            v0 = v
        if prev is not None:
            ratio = v / prev
            if abs(1.0 - ratio) < 1e-6:
                return PhiRegime("positive_limit", v)
            if v < 1e-12 * v0:
                return PhiRegime("zero_limit")
            if (prev_ratio is not None and k > 20 and ratio < 1.0 - 1e-6
                    and abs(ratio - prev_ratio) < 1e-9):
                return PhiRegime("zero_limit")
            prev_ratio = ratio
        prev = v
    raise RuntimeError("phi_regime: no decision within the doubling budget")
