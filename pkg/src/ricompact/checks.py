"""Acceptance suites shared by the test-suite and ``ricompact selftest``.

Each ``check_*`` function returns a :class:`CheckResult`; ``run_suite``
collects them.  The decision table and the probe battery are plain data so
that they can be read and audited next to the theorem statements.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .classify import EmbeddingQuery, classify
from .isoperimetry import (DomainSpec, PhiSpec, c_phi_quadrature, check_iso_equivalence,
                           mazya_model_domain)
from .kernelops import (OperatorSpec, ProfileJ, apply, char_closed_form,
                        check_associate_identity)
from .probes import ProbeConfig, duality_identity_check, optimal_domain_norm, probe_cutoff_domain
from .rinorm import (SpaceSpec, fundamental_function, l1_embedding_constant, norm,
                     validate_space)
from .stepfn import StepFunction, chi, hardy_littlewood_gap, integrate, random_step, rearrange

__all__ = ["CheckResult", "SUITES", "DECISION_TABLE", "PROBE_BATTERY", "NORM_SPECS",
           "THRESHOLD_PAIRS", "run_suite"]

INF = math.inf


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _L(p):
    return SpaceSpec.lebesgue(p)


def _lz(p, q, a):
    return SpaceSpec.lz(p, q, a)


def _lor(p, q):
    return SpaceSpec.lorentz(p, q)


F = Fraction


# --------------------------------------------------------------------------
# 1. closed-form operator identity


def check_closed_form() -> CheckResult:
    t = np.geomspace(1e-6, 1.0, 64)
    profiles = [ProfileJ.constant(), ProfileJ.power(0.5), ProfileJ.power(1.0),
                ProfileJ.l_phi(PhiSpec.gauss())]
    worst = 0.0
    for J in profiles:
        for j in (1, 2, 3):
            for a in (1.0, 0.1, 0.01):
                got = apply(OperatorSpec("H", j, J=J), chi(a), t).values
                ref = char_closed_form(J, j, a, t)
                pos = ref > 0
                if np.any(got[~pos] != 0.0):
                    return CheckResult("closed_form", False, f"nonzero output past a={a}")
                worst = max(worst, float(np.max(np.abs(got[pos] / ref[pos] - 1.0), initial=0.0)))
    return CheckResult("closed_form", worst <= 1e-7, f"max relative error {worst:.2e} <= 1e-7")


# --------------------------------------------------------------------------
# 2. associate identity


def check_associate(pairs: int = 100) -> CheckResult:
    rng = np.random.default_rng(2)
    worst = 0.0
    configs = [(ProfileJ.constant(), 1), (ProfileJ.power(0.7), 2), (ProfileJ.power(1.0), 3),
               (ProfileJ.l_phi(PhiSpec.gauss()), 2)]
    for J, j in configs:
        for _ in range(pairs):
            f = random_step(rng, geometric=bool(rng.integers(2)))
            g = random_step(rng, geometric=bool(rng.integers(2)))
            worst = max(worst, check_associate_identity(J, j, f, g))
    return CheckResult("associate_identity", worst <= 1e-6,
                       f"max residual {worst:.2e} <= 1e-6 over {pairs} pairs x {len(configs)} configs")


# --------------------------------------------------------------------------
# 3. norm axioms

NORM_SPECS = [
    _L(1), _L(F(3, 2)), _L(2), _L(5), _L(INF),
    _lor(2, 1), _lor(3, 2), _lor(F(3, 2), 1),
    _lz(1, 1, 1), _lz(2, 2, F(1, 2)), _lz(3, 1, 2), _lz(4, 2, 1),
]


def _permute(f: StepFunction, rng) -> StepFunction:
    order = rng.permutation(f.ncells)
    w = f.widths[order]
    edges = np.concatenate(([0.0], np.cumsum(w)))
    edges[-1] = 1.0
    return StepFunction(edges, f.values[order])


def check_norm_axioms(samples: int = 200, tol: float = 1e-8) -> CheckResult:
    rng = np.random.default_rng(3)
    bad = []
    for s in NORM_SPECS:
        if not (validate_space(s) and s.is_norm):
            bad.append(f"{s}: not a norm")
            continue
        cx = l1_embedding_constant(s).value
        for _ in range(samples):
            f = random_step(rng, geometric=bool(rng.integers(2)))
            g = random_step(rng, geometric=bool(rng.integers(2)))
            nf, ng = norm(s, f).value, norm(s, g).value
            scale = max(nf, ng, 1.0)
            c = float(rng.uniform(0.1, 10.0))
            # P1: positivity, homogeneity, triangle inequality
            if not nf > 0 or abs(norm(s, f.scale(c)).value - c * nf) > tol * c * scale:
                bad.append(f"{s}: P1 scaling")
            if norm(s, f + g).value > nf + ng + tol * scale:
                bad.append(f"{s}: P1 triangle")
            # P2: lattice property
            if norm(s, f.minimum(g)).value > nf + tol * scale:
                bad.append(f"{s}: P2 lattice")
            # P3: Fatou along truncations min(f, k)
            levels = np.quantile(f.values, [0.25, 0.5, 0.75, 1.0])
            seq = [norm(s, f.minimum(StepFunction([0, 1], [k]))).value for k in levels]
            if np.any(np.diff(seq) < -tol * scale) or abs(seq[-1] - nf) > tol * scale:
                bad.append(f"{s}: P3 Fatou")
            # P5: int f <= C_X ||f||
            if integrate(f) > cx * nf * (1 + tol) + tol:
                bad.append(f"{s}: P5 local integrability")
            # P6: rearrangement invariance
            if abs(norm(s, _permute(f, rng)).value - nf) > tol * scale:
                bad.append(f"{s}: P6 invariance")
            if abs(norm(s, rearrange(f)).value - nf) > tol * scale:
                bad.append(f"{s}: P6 rearrangement")
        # P4 and quasiconcavity of the fundamental function
        t = np.geomspace(1e-9, 1.0, 400)
        phi = fundamental_function(s, t)
        if not math.isfinite(fundamental_function(s, 1.0)):
            bad.append(f"{s}: P4")
        if np.any(np.diff(phi) < -tol * phi[1:]) or np.any(np.diff(phi / t) > tol * (phi / t)[:-1]):
            bad.append(f"{s}: quasiconcavity")
    detail = f"{len(NORM_SPECS)} specs x {samples} functions, tol {tol:g}"
    if bad:
        detail += "; failures: " + ", ".join(sorted(set(bad))[:6])
    return CheckResult("norm_axioms", not bad, detail)


# --------------------------------------------------------------------------
# 4. Hardy-Littlewood


def check_hardy_littlewood(pairs: int = 500) -> CheckResult:
    rng = np.random.default_rng(4)
    worst = None
    for _ in range(pairs):
        gap = hardy_littlewood_gap(random_step(rng, zero_prob=0.2), random_step(rng, zero_prob=0.2))
        worst = gap if worst is None else min(worst, gap)
    return CheckResult("hardy_littlewood", worst >= 0,
                       f"min exact gap {float(worst):.3e} >= 0 over {pairs} pairs")


# --------------------------------------------------------------------------
# 5. explicit constants between R^m and S^m


def check_rs_constants(samples: int = 100, rtol: float = 1e-9) -> CheckResult:
    rng = np.random.default_rng(5)
    t = np.geomspace(1e-6, 1.0, 80)
    violations = 0
    for gamma in (0.5, 0.9):
        I = ProfileJ.power(gamma)
        for m in (1, 2, 3):
            up = m ** (m - 1) / math.factorial(m - 1)
            down = 2 ** m * math.factorial(m - 1)
            for _ in range(samples):
                fs = rearrange(random_step(rng, geometric=bool(rng.integers(2))))
                r = np.maximum.accumulate(apply(OperatorSpec("R", m, J=I), fs, t).values)
                s = np.maximum.accumulate(apply(OperatorSpec("S", m, I=I), fs, t).values)
                violations += int(np.sum(r > up * s * (1 + rtol)))
                violations += int(np.sum(s > down * r * (1 + rtol)))
    return CheckResult("rs_constants", violations == 0,
                       f"{violations} violations over I in {{s^0.5, s^0.9}}, m in {{1,2,3}}")


# --------------------------------------------------------------------------
# 6. P against H with L_Phi


def check_p_domination(samples: int = 100, rtol: float = 1e-9) -> CheckResult:
    rng = np.random.default_rng(6)
    t = np.geomspace(1e-8, 1.0, 120)
    violations = 0
    worst = 0.0
    for phi in (PhiSpec.gauss(), PhiSpec.boltzmann(1.0), PhiSpec.boltzmann(1.5)):
        J = ProfileJ.l_phi(phi)
        for m in (1, 2):
            c = 2 ** m * math.factorial(m - 1)
            for _ in range(samples):
                f = random_step(rng, geometric=bool(rng.integers(2)))
                p = apply(OperatorSpec("P", m, phi=phi), f, t).values
                h = apply(OperatorSpec("H", m, J=J), f, t).values
                pos = h > 0
                worst = max(worst, float(np.max(p[pos] / (c * h[pos]), initial=0.0)))
                violations += int(np.sum(p > c * h * (1 + rtol)))
    return CheckResult("p_domination", violations == 0,
                       f"{violations} violations, max P/(2^m (m-1)! H) = {worst:.3f}")


# --------------------------------------------------------------------------
# 7. decision table: (domain, m, X, Y, expected)

_J = DomainSpec.john
_M = DomainSpec.mazya_class
_G = DomainSpec.product(PhiSpec.gauss(), 3)


def _B(beta, n=2):
    return DomainSpec.product(PhiSpec.boltzmann(beta), n)


DECISION_TABLE = [
    # John domains
    (_J(2), 3, _L(1), _L(INF), "yes"),
    (_J(3), 5, _lor(2, 1), _L(INF), "yes"),
    (_J(2), 2, _L(1), _L(INF), "no"),
    (_J(2), 2, _L(1), _L(1000), "yes"),
    (_J(2), 2, _L(2), _L(INF), "yes"),
    (_J(3), 3, _L(1), _L(INF), "no"),
    (_J(2), 1, _L(3), _L(INF), "yes"),
    (_J(2), 1, _L(2), _L(INF), "no"),
    (_J(2), 1, _L(2), _L(100), "yes"),
    (_J(2), 1, _L(F(3, 2)), _L(2), "yes"),
    (_J(2), 1, _L(F(3, 2)), _L(6), "no"),
    (_J(3), 1, _L(1), _L(F(3, 2)), "no"),
    (_J(3), 2, _L(1), _L(2), "yes"),
    (_J(3), 2, _L(F(3, 2)), _L(INF), "no"),
    (_J(2), 1, _lor(2, 1), _L(INF), "no"),
    # Maz'ya classes, m(1-alpha) >= 1
    (_M(F(1, 2), 2), 2, _L(1), _L(INF), "no"),
    (_M(F(1, 2), 2), 2, _L(1), _L(5), "yes"),
    (_M(F(1, 2), 2), 3, _L(1), _L(INF), "yes"),
    (_M(F(2, 3), 3), 3, _L(2), _L(INF), "yes"),
    # Lorentz table
    (_M(F(1, 2), 2), 1, _L(1), _L(F(3, 2)), "yes"),
    (_M(F(1, 2), 2), 1, _L(1), _L(2), "no"),
    (_M(F(3, 4), 2), 1, _L(2), _L(4), "no"),
    (_M(F(3, 4), 2), 1, _L(2), _L(F(7, 2)), "yes"),
    (_M(F(3, 4), 2), 1, _L(4), _L(1000), "yes"),
    (_M(F(3, 4), 2), 1, _L(4), _L(INF), "no"),
    (_M(F(3, 4), 2), 2, _L(3), _L(INF), "yes"),
    (_M(1, 2), 1, _L(2), _L(2), "no"),
    (_M(1, 2), 5, _L(3), _L(2), "yes"),
    (_M(1, 3), 1, _L(INF), _lor(5, 2), "yes"),
    (_M(1, 2), 2, _L(INF), _L(INF), "no"),
    (_M(1, 2), 1, _lor(2, 1), _lor(2, INF), "no"),
    (_M(1, 2), 1, _lor(3, 5), _lor(2, 1), "yes"),
    # Maz'ya endpoints with log weights
    (_M(F(1, 2), 2), 1, _L(1), _lz(2, 2, -1), "yes"),
    (_M(F(1, 2), 2), 1, _L(1), _lz(2, 2, 1), "no"),
    (_M(F(1, 2), 2), 1, _L(1), _lz(F(3, 2), 1, 5), "yes"),
    (_M(1, 2), 1, _L(1), _lz(1, 1, 1), "no"),
    (_M(F(3, 4), 2), 1, _lz(2, 2, 3), _L(1), "yes"),
    (_M(1, 2), 1, _lz(1, 1, 1), _L(1), "yes"),
    (_M(F(3, 4), 2), 1, _L(INF), _lz(INF, INF, -1), "yes"),
    (_M(1, 2), 2, _L(INF), _lz(INF, INF, -3), "yes"),
    (_M(1, 2), 2, _L(INF), _lz(INF, INF, -2), "no"),
    (_M(1, 2), 1, _L(INF), _lz(INF, 2, -2), "yes"),
    (_M(1, 2), 1, _L(INF), _lz(INF, 2, F(-3, 2)), "no"),
    (_M(F(1, 2), 2), 1, _lz(2, 2, 1), _L(INF), "yes"),
    (_M(F(1, 2), 2), 1, _lz(2, 2, F(1, 2)), _L(INF), "no"),
    (_M(1, 2), 1, _lz(2, 2, 1), _L(INF), "no"),
    (_M(F(1, 2), 2), 1, _lz(3, 3, -1), _L(INF), "yes"),
    (_M(F(9, 10), 2), 2, _lz(1, 1, F(1, 2)), _L(2), "out_of_scope"),
    # product spaces
    (_G, 1, _L(2), _L(2), "yes"),
    (_G, 3, _L(2), _L(INF), "no"),
    (_B(1), 1, _L(2), _L(2), "no"),
    (_B(1), 2, _L(3), _L(2), "yes"),
    (_G, 1, _L(2), _L(3), "no"),
    (_G, 1, _L(INF), _L(5), "yes"),
    (_B(1), 1, _L(1), _L(1), "no"),
    (_B(F(3, 2)), 1, _L(1), _L(1), "yes"),
    (_B(2), 1, _L(2), _lz(2, 2, F(1, 2)), "no"),
    (_B(2), 1, _L(2), _lz(2, 2, F(49, 100)), "yes"),
    (_B(F(3, 2)), 2, _lor(3, 1), _lz(3, 2, F(2, 3)), "no"),
    (_B(2), 1, _lor(3, 4), _lz(3, 2, F(1, 4)), "no"),
    (_B(2), 1, _lor(3, 4), _lz(3, 2, F(1, 5)), "yes"),
    (_G, 1, _lz(INF, 2, -1), _lz(INF, INF, -2), "yes"),
    (_G, 1, _lz(INF, 2, -1), _lz(INF, INF, -1), "no"),
    (_G, 2, _L(INF), _lz(INF, INF, -2), "yes"),
    (_G, 2, _L(INF), _lz(INF, INF, -1), "no"),
    (_G, 2, _L(1), _lz(1, 1, 1), "no"),
    (_G, 2, _L(1), _lz(1, 1, F(1, 2)), "yes"),
    (_B(1), 1, _L(1), _lz(1, 1, F(1, 10)), "no"),
    (_G, 1, _lor(2, 1), _L(1), "yes"),
]


def check_decision_table() -> CheckResult:
    wrong = []
    for d, m, X, Y, want in DECISION_TABLE:
        got = classify(EmbeddingQuery(d, m, X, Y)).compact
        if got != want:
            wrong.append(f"{d.kind} m={m} {X}->{Y}: {got} != {want}")
    detail = f"{len(DECISION_TABLE) - len(wrong)}/{len(DECISION_TABLE)} verdicts match"
    if wrong:
        detail += "; " + "; ".join(wrong[:5])
    return CheckResult("decision_table", not wrong, detail)


# --------------------------------------------------------------------------
# 8. classifier and probe concordance


def _governing_op(d: DomainSpec, m: int) -> OperatorSpec:
    if d.kind == "john":
        return OperatorSpec("Q", m, n=d.n)
    if d.kind in ("mazya_class", "mazya_model"):
        return OperatorSpec("T", m, alpha=float(d.alpha), n=d.n)
    return OperatorSpec("P", m, phi=d.phi)


PROBE_BATTERY = [
    (_M(F(1, 2), 2), 1, _L(1), _L(1)),
    (_M(1, 2), 1, _L(INF), _L(1)),
    (_M(1, 2), 1, _L(2), _L(1)),
    (_G, 1, _L(INF), _L(1)),
    (_J(2), 2, _L(1), _L(2)),
    (_J(2), 3, _L(1), _L(INF)),
    (_M(F(1, 2), 2), 1, _L(4), _L(2)),
    (_M(1, 2), 2, _L(INF), _L(1)),
    (_G, 2, _L(INF), _L(2)),
    (_B(1), 1, _L(INF), _L(2)),
    (_M(F(1, 2), 2), 1, _L(1), _L(2)),
    (_M(F(1, 2), 2), 1, _L(1), _L(INF)),
    (_M(1, 2), 1, _L(2), _L(2)),
    (_J(2), 2, _L(1), _L(INF)),
    (_J(2), 1, _L(2), _L(INF)),
    (_B(1), 1, _L(1), _L(1)),
    (_B(1), 1, _L(2), _L(2)),
    (_M(1, 2), 2, _L(2), _L(2)),
    (_J(3), 1, _L(1), _L(F(3, 2))),
    (_J(3), 2, _L(1), _L(3)),
]

_EXPECTED_HINT = {"yes": "tends_to_zero", "no": "bounded_below"}


def check_concordance(limit_seconds: float = 30.0) -> CheckResult:
    cfg = ProbeConfig(points=64)
    wrong, slowest = [], 0.0
    counts = {"yes": 0, "no": 0}
    for d, m, X, Y in PROBE_BATTERY:
        v = classify(EmbeddingQuery(d, m, X, Y)).compact
        counts[v] = counts.get(v, 0) + 1
        t0 = time.perf_counter()
        curve = probe_cutoff_domain(X, Y, _governing_op(d, m), cfg)
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if curve.hint != _EXPECTED_HINT.get(v) or dt > limit_seconds:
            wrong.append(f"{d.kind} m={m} {X}->{Y}: {v} vs {curve.hint} ({dt:.1f}s)")
    ok = not wrong and counts["yes"] == 10 and counts["no"] == 10
    detail = (f"{len(PROBE_BATTERY) - len(wrong)}/{len(PROBE_BATTERY)} agree "
              f"({counts['yes']} yes, {counts['no']} no), slowest curve {slowest:.1f}s")
    if wrong:
        detail += "; " + "; ".join(wrong[:4])
    return CheckResult("concordance", ok, detail)


# --------------------------------------------------------------------------
# 9. brute-force oracles


def check_bruteforce(samples: int = 50, dual_tol: float = 0.02) -> CheckResult:
    rng = np.random.default_rng(9)
    I = ProfileJ.power(0.5)
    Linf = _L(INF)
    outside = 0
    for _ in range(samples):
        n = int(rng.integers(2, 8))
        f = StepFunction(np.linspace(0.0, 1.0, n + 1), rng.exponential(1.0, n))
        lo = optimal_domain_norm(Linf, I, 1, f, mode="closed_form").value
        hi = (1.0 + float(I(1.0))) * lo
        v = optimal_domain_norm(Linf, I, 1, f, mode="bruteforce", max_cells=7).value
        if not (lo * (1 - 1e-9) <= v <= hi * (1 + 1e-9)):
            outside += 1
    gaps = []
    for X, Y, J, m, a in [(_L(1), _L(INF), ProfileJ.constant(), 1, 0.5),
                          (_L(1), _L(INF), ProfileJ.constant(), 2, 0.5),
                          (_L(2), _L(2), ProfileJ.power(0.5), 1, 1.0)]:
        gaps.append(duality_identity_check(X, Y, J, m, a).relative_gap)
    ok = outside == 0 and max(gaps) <= dual_tol
    return CheckResult("bruteforce", ok,
                       f"{outside} of {samples} outside bracket; duality gaps "
                       + ", ".join(f"{g:.2%}" for g in gaps) + f" <= {dual_tol:.0%}")


# --------------------------------------------------------------------------
# 10. model domains


def check_geometry(tol: float = 1e-6) -> CheckResult:
    worst = 0.0
    for alpha in (F(1, 2), F(3, 4), F(1)):
        for n in (2, 3):
            strict = alpha >= F(n - 1, n)
            dom = mazya_model_domain(alpha, n, strict=strict)
            worst = max(worst, abs(dom.volume() - 1.0))
            for t in (0.1, 0.5, 1.0, 1.5, 3.0):
                if t < dom.L:
                    worst = max(worst, abs(dom.level_set_measure(t) - float(dom.M(t))))
    return CheckResult("geometry", worst <= tol, f"max volume/level-set error {worst:.1e} <= {tol:g}")


# --------------------------------------------------------------------------
# 11. Gauss machinery


def check_gauss() -> CheckResult:
    g = PhiSpec.gauss()
    err = abs(c_phi_quadrature(g) - 1.0 / math.sqrt(2.0 * math.pi))
    lo1, hi1 = check_iso_equivalence(g, np.geomspace(1e-6, 0.5, 200))
    lo2, hi2 = check_iso_equivalence(g, np.geomspace(1e-6, 0.5, 400))
    move = max(abs(lo2 / lo1 - 1.0), abs(hi2 / hi1 - 1.0))
    ok = err <= 1e-10 and move < 0.01
    return CheckResult("gauss", ok, f"|c_Phi - (2pi)^-1/2| = {err:.1e}; I/L in "
                       f"[{lo2:.4f}, {hi2:.4f}], endpoints moved {move:.2e} on doubling")


# --------------------------------------------------------------------------
# 12. strict thresholds

THRESHOLD_PAIRS = [
    (_M(F(1, 2), 2), 1, F(1)),
    (_M(F(1, 2), 2), 1, F(3, 2)),
    (_M(F(3, 4), 2), 1, F(2)),
    (_M(F(3, 4), 2), 1, F(3)),
    (_M(F(3, 4), 2), 2, F(1)),
    (_M(F(3, 4), 2), 3, F(1)),
    (_M(F(2, 3), 3), 1, F(2)),
    (_M(F(5, 6), 6), 2, F(5, 4)),
    (_J(3), 2, F(5, 4)),
    (_J(4), 1, F(7, 2)),
]


def check_thresholds() -> CheckResult:
    bad = []
    for d, m, p1 in THRESHOLD_PAIRS:
        alpha = d.alpha if d.kind != "john" else F(d.n - 1, d.n)
        c = m * (1 - alpha)
        p2 = p1 / (1 - c * p1)
        at = classify(EmbeddingQuery(d, m, _L(p1), _L(p2))).compact
        below = classify(EmbeddingQuery(d, m, _L(p1), _L(float(p2) - 1e-9))).compact
        if at != "no" or below != "yes":
            bad.append(f"{d.kind} m={m} p1={p1}: at={at}, below={below}")
    return CheckResult("thresholds", not bad,
                       f"{len(THRESHOLD_PAIRS) - len(bad)}/{len(THRESHOLD_PAIRS)} pairs strict"
                       + ("; " + "; ".join(bad) if bad else ""))


# --------------------------------------------------------------------------

SUITES: dict[str, Callable[[], CheckResult]] = {
    "closed_form": check_closed_form,
    "associate": check_associate,
    "norm_axioms": check_norm_axioms,
    "hardy_littlewood": check_hardy_littlewood,
    "rs_constants": check_rs_constants,
    "p_domination": check_p_domination,
    "decision_table": check_decision_table,
    "concordance": check_concordance,
    "bruteforce": check_bruteforce,
    "geometry": check_geometry,
    "gauss": check_gauss,
    "thresholds": check_thresholds,
}


def run_suite(name: str = "all") -> list[CheckResult]:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for key in names:
        if key not in SUITES:
            raise ValueError(f"suite: unknown suite {key!r}")
        t0 = time.perf_counter()
        res = SUITES[key]()
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
