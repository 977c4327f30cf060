"""Symbolic decisions for compact Sobolev embeddings ``V^m X -> Y``.

Every threshold comparison runs on :class:`fractions.Fraction` values, so a
query sitting exactly on a boundary of a strict inequality is decided
correctly.  The only floating-point step is the regime of ``s/Phi(s)`` for
a custom ``Phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .isoperimetry import DomainSpec, phi_regime
from .rinorm import INF, SpaceSpec, _recip, power_log_cutoff_vanishes, validate_space
from .probes import dual_spec

__all__ = [
    "Verdict",
    "EmbeddingQuery",
    "classify",
    "classify_john",
    "classify_mazya",
    "classify_product",
    "optimal_range_lookup",
]

YES, NO, OUT = "yes", "no", "out_of_scope"
PER_DOMAIN = "per_domain"
CLASS_WIDE = "for_every_domain_in_class"


@dataclass(frozen=True)
class Verdict:
    compact: str
    rule: str = ""
    sense: str = PER_DOMAIN
    optimal_range: Optional[SpaceSpec] = None
    notes: tuple = ()
    suggestion: str = ""

    def __post_init__(self):
        if self.compact not in (YES, NO, OUT):
            raise ValueError(f"compact: unknown verdict {self.compact!r}")
        if self.compact != OUT and not self.rule:
            raise ValueError("rule: decided verdicts must carry a rule")

    def to_dict(self) -> dict:
        d = {"compact": self.compact, "rule": self.rule, "sense": self.sense,
             "optimal_range": self.optimal_range.to_dict() if self.optimal_range else None}
        if self.notes:
            d["notes"] = list(self.notes)
        if self.suggestion:
            d["suggestion"] = self.suggestion
        return d


@dataclass(frozen=True)
class EmbeddingQuery:
    domain: DomainSpec
    m: int
    X: SpaceSpec
    Y: SpaceSpec

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise ValueError("m: must be a positive integer")
        for name in ("X", "Y"):
            adm = validate_space(getattr(self, name))
            if not adm:
                raise ValueError(f"{name}: {adm.reason}")

    @classmethod
    def from_dict(cls, d: dict) -> "EmbeddingQuery":
        if not isinstance(d, dict):
            raise ValueError("query: expected an object")
        for key in ("domain", "m", "X", "Y"):
            if key not in d:
                raise ValueError(f"{key}: missing field")
        dom = DomainSpec.from_dict(d["domain"])
        spaces = {}
        for key in ("X", "Y"):
            try:
                spaces[key] = SpaceSpec.from_dict(d[key])
            except ValueError as exc:
                raise ValueError(f"{key}.{exc}") from None
        return cls(dom, d["m"], spaces["X"], spaces["Y"])

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_dict(), "m": self.m,
                "X": self.X.to_dict(), "Y": self.Y.to_dict()}


def _out(reason: str, suggestion: str, sense: str = PER_DOMAIN) -> Verdict:
    return Verdict(OUT, "", sense, None, (reason,), suggestion)


def _yn(flag: bool) -> str:
    return YES if flag else NO


def _phi_log_exponent(s: SpaceSpec) -> tuple[Fraction, Fraction]:
    """``(e, l)`` with ``phi_s(t) ~ t^e log(2/t)^l`` near 0."""
    p, q, a = s.triple
    if p == INF:
        return Fraction(0), a + _recip(q)
    return _recip(p), a


def _vanishes(e_num, l_num) -> bool:
    """``t^e log(2/t)^l -> 0`` as ``t -> 0+``."""
    return e_num > 0 or (e_num == 0 and l_num < 0)


# --------------------------------------------------------------------------
# Maz'ya classes and John domains


def _lorentz_table(alpha: Fraction, m: int, X: SpaceSpec, Y: SpaceSpec) -> tuple[bool, str]:
    p1, p2 = X.p, Y.p
    if alpha == 1:
        return p1 > p2, "Thm (lorentz) case (E:lorentz_4): alpha=1, p_1>p_2"
    c = m * (1 - alpha)
    thr = 1 / c
    if p1 < thr:
        bound = p1 / (1 - c * p1)
        return p2 < bound, "Thm (lorentz) case (E:lorentz_1): p_2<p_1/(1-m p_1(1-alpha))"
    if p1 == thr:
        return p2 != INF, "Thm (lorentz) case (E:lorentz_2): p_1=1/(m(1-alpha)), p_2<inf"
    return True, "Thm (lorentz) case (E:lorentz_3): p_1>1/(m(1-alpha))"


def _mazya_endpoints(alpha: Fraction, m: int, X: SpaceSpec, Y: SpaceSpec) -> Optional[tuple[bool, str]]:
    c = m * (1 - alpha)
    if X.is_L1():
        e, l = _phi_log_exponent(Y)
        return (_vanishes(e - (1 - c), l),
                "Thm (mazya_l1)(a) (E:nec_cond): phi_Y(s)/s^(1-m(1-alpha)) -> 0")
    if Y.is_L1():
        return (alpha < 1 or not X.is_L1(), "Thm (mazya_l1)(b): V^m X into L^1")
    if X.is_Linf():
        if alpha < 1:
            return True, "Thm (mazya_lll)(a): V^m L^inf compact into every r.i. space"
        return (power_log_cutoff_vanishes(Y, 0, m),
                "Thm (mazya_lll)(b): ||chi_(0,a) log(2/s)^m||_Y -> 0")
    if Y.is_Linf():
        if alpha == 1:
            return False, "Thm (mazya_lll)(b): V^m X into L^inf never compact for alpha=1"
        rule = "Thm (mazya_lll)(a) (E:l^infty_2): ||chi_(0,a) s^(m(1-alpha)-1)||_X' -> 0"
        if X.p == INF:
            return True, rule
        return power_log_cutoff_vanishes(dual_spec(X), 1 - c, 0), rule
    return None


def _mazya_core(alpha: Fraction, m: int, X: SpaceSpec, Y: SpaceSpec, sense: str,
                prefix: str = "") -> Verdict:
    c = m * (1 - alpha)
    exceptional = X.is_L1() and Y.is_Linf()
    if c > 1:
        return Verdict(YES, prefix + "Thm (mazya): m(1-alpha)>1, every pair", sense)
    if c == 1:
        return Verdict(_yn(not exceptional),
                       prefix + "Thm (mazya): m(1-alpha)=1, all pairs except (L^1, L^inf)", sense)
    if X.alpha == 0 and Y.alpha == 0:
        ok, rule = _lorentz_table(alpha, m, X, Y)
        return Verdict(_yn(ok), prefix + rule, sense)
    end = _mazya_endpoints(alpha, m, X, Y)
    if end is not None:
        return Verdict(_yn(end[0]), prefix + end[1], sense)
    return _out("Lorentz-Zygmund spaces with nonzero log exponent on Maz'ya domains have no table",
                "probe_cutoff_domain with OperatorSpec('T', m, alpha=alpha)", sense)


def classify_mazya(q: EmbeddingQuery) -> Verdict:
    d = q.domain
    if d.kind not in ("mazya_class", "mazya_model"):
        raise ValueError("domain.kind: classify_mazya needs a Maz'ya domain")
    sense = CLASS_WIDE if d.kind == "mazya_class" else PER_DOMAIN
    return _mazya_core(d.alpha, q.m, q.X, q.Y, sense)


def classify_john(q: EmbeddingQuery) -> Verdict:
    d = q.domain
    if d.kind != "john":
        raise ValueError("domain.kind: classify_john needs a John domain")
    n, m = d.n, q.m
    if m > n:
        return Verdict(YES, "Thm (john): m>n, independent of X and Y")
    if m == n:
        return Verdict(_yn(not (q.X.is_L1() and q.Y.is_Linf())),
                       "Thm (john): m=n, all pairs except (L^1, L^inf)")
    alpha = Fraction(n - 1, n)
    return _mazya_core(alpha, m, q.X, q.Y, PER_DOMAIN,
                       prefix="Thm (john) + Remark (a), alpha=1/n': ")


# --------------------------------------------------------------------------
# product probability spaces


def _lz_gauss(beta: Fraction, m: int, X: SpaceSpec, Y: SpaceSpec) -> tuple[bool, str]:
    p1, q1, a1 = X.triple
    p2, q2, a2 = Y.triple
    r1, r2 = _recip(q1), _recip(q2)
    if p1 != INF:
        rule = "Thm (lz_gauss)(i)"
        if p1 > p2:
            return True, rule + ": p_1>p_2"
        if p1 < p2:
            return False, rule + ": p_1<p_2"
        shift = m * (beta - 1) / beta
        if q1 <= q2:
            return a1 + shift > a2, rule + ": q_1<=q_2, alpha_1+m(beta-1)/beta>alpha_2"
        return (a1 + r1 + shift > a2 + r2,
                rule + ": q_2<q_1, alpha_1+1/q_1+m(beta-1)/beta>alpha_2+1/q_2")
    rule = "Thm (lz_gauss)(ii)"
    if p2 != INF:
        return True, rule + ": p_2<inf"
    return a1 + r1 - m / beta > a2 + r2, rule + ": alpha_1+1/q_1-m/beta>alpha_2+1/q_2"


def classify_product(q: EmbeddingQuery) -> Verdict:
    d = q.domain
    if d.kind != "product":
        raise ValueError("domain.kind: classify_product needs a product domain")
    phi, m, X, Y = d.phi, q.m, q.X, q.Y
    power = phi.is_power
    beta = phi.beta_exact if power else None
    if power and not (1 <= beta <= 2):
        return _out("power-type Phi needs beta in [1, 2]",
                    "probe_cutoff_domain with OperatorSpec('P', m, phi=phi)")

    if Y.is_Linf():
        return Verdict(NO, "Thm (l^1_probability)(b): V^m X into L^inf never compact")

    if X.is_lebesgue and Y.is_lebesgue:
        reg = phi_regime(phi)
        p, qq = X.p, Y.p
        if reg.kind == "zero_limit":
            return Verdict(_yn(qq <= p and qq != INF),
                           "Thm (lebesgue)(i): s/Phi(s)->0, q<=p and q<inf")
        return Verdict(_yn(qq < p), "Thm (lebesgue)(ii): lim s/Phi(s)>0, q<p")

    if X.is_Linf():
        rule = "Thm (l^1_probability)(a) (E:l^infty_3): ||chi_(0,a) Phi^-1(log 2/s)^m||_Y -> 0"
        if power:
            return Verdict(_yn(power_log_cutoff_vanishes(Y, 0, m / beta)), rule)
        # Phi^-1(y) lies between c y^(1/2) and C y for convex Phi with sqrt(Phi) concave
        if power_log_cutoff_vanishes(Y, 0, m):
            return Verdict(YES, rule)
        if not power_log_cutoff_vanishes(Y, 0, Fraction(m, 2)):
            return Verdict(NO, rule)
        return _out("custom Phi: log rate of Phi^-1 needed",
                    "endpoint_Linfty with the profile L_Phi")

    if X.is_L1():
        rule = "Thm (probability_l1)(a) (E:nec_cond_prob): phi_Y(s) Phi^-1(log 2/s)^m/(s log(2/s)^m) -> 0"
        e, l = _phi_log_exponent(Y)
        if power:
            return Verdict(_yn(_vanishes(e - 1, l + m / beta - m)), rule)
        if e < 1:
            return Verdict(NO, rule)
        if Y.is_L1():
            return Verdict(_yn(phi_regime(phi).kind == "zero_limit"),
                           "Thm (probability_l1)(b) (E:lim_phi_0): s/Phi(s) -> 0")
        return _out("custom Phi: log rate of Phi^-1 needed", "endpoint_L1_into_X with L_Phi")

    if Y.is_L1():
        return Verdict(YES, "Thm (probability_l1)(b): X != L^1 into L^1")

    if power:
        ok, rule = _lz_gauss(beta, m, X, Y)
        return Verdict(_yn(ok), rule)
    return _out("custom Phi with non-Lebesgue spaces has no table",
                "probe_cutoff_domain with OperatorSpec('P', m, phi=phi)")


# --------------------------------------------------------------------------
# optimal ranges


def _mazya_range(alpha: Fraction, m: int, X: SpaceSpec) -> Optional[SpaceSpec]:
    p, q, a = X.triple
    if a != 0:
        return None
    if alpha == 1:
        if X.is_Linf():
            return SpaceSpec.lz(INF, INF, -m)
        return X.simplest()
    c = m * (1 - alpha)
    if c >= 1:
        return None
    thr = 1 / c
    if p < thr:
        return SpaceSpec.lorentz(p / (1 - c * p), q).simplest()
    if p == thr and q > 1:
        return SpaceSpec.lz(INF, q, -1)
    return SpaceSpec.lebesgue(INF)


def optimal_range_lookup(X: SpaceSpec, domain: DomainSpec, m: int) -> Optional[SpaceSpec]:
    """Smallest r.i. space into which the governing operator maps ``X``, or None."""
    k = domain.kind
    if k == "john":
        if m >= domain.n:
            return None
        return _mazya_range(Fraction(domain.n - 1, domain.n), m, X)
    if k in ("mazya_class", "mazya_model"):
        return _mazya_range(domain.alpha, m, X)
    if k == "product" and domain.phi.is_power:
        beta = domain.phi.beta_exact
        if not 1 <= beta <= 2:
            return None
        p, q, a = X.triple
        if p != INF:
            return SpaceSpec.lz(p, q, a + m * (beta - 1) / beta).simplest()
        return SpaceSpec.lz(INF, q, a - m / beta).simplest()
    return None


# --------------------------------------------------------------------------
# dispatcher


def _v_equals_w(domain: DomainSpec) -> bool:
    if domain.kind == "john":
        return True
    if domain.kind in ("mazya_class", "mazya_model"):
        return domain.alpha < 1
    return False


def classify(q: EmbeddingQuery) -> Verdict:
    k = q.domain.kind
    if k == "john":
        v = classify_john(q)
    elif k in ("mazya_class", "mazya_model"):
        v = classify_mazya(q)
    elif k == "product":
        v = classify_product(q)
    else:
        return _out("custom domains carry no characterization",
                    "probe_cutoff_domain with a custom ProfileJ")
    notes = list(v.notes)
    if _v_equals_w(q.domain):
        notes.append("V=W: int_0^1 ds/I(s) < inf, so V^m X = W^m X up to equivalent norms")
    rng = None
    if v.compact != OUT:
        try:
            rng = optimal_range_lookup(q.X, q.domain, q.m)
        except (ValueError, ZeroDivisionError):
            rng = None
    return Verdict(v.compact, v.rule, v.sense, rng, tuple(notes), v.suggestion)
