import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as spi

from ricompact.rinorm import (SpaceSpec, almost_compact_embedding_lz, associate_norm,
                              continuous_embedding_lz, fundamental_function, l1_embedding_constant,
                              norm, power_log_cutoff_vanishes, to_exact, validate_space)
from ricompact.stepfn import StepFunction, chi, rearrange

from strategies import lorentz_specs, steps

INF = math.inf
L, LOR, LZ = SpaceSpec.lebesgue, SpaceSpec.lorentz, SpaceSpec.lz


def quad_norm(s, f):
    """Defining functional by adaptive quadrature in u = log(1/x), cell by cell on f*."""
    fs = rearrange(f)
    p, q, a = s.fp, s.fq, s.fa
    e = (1 / p if p != INF else 0.0) - (1 / q if q != INF else 0.0)

    def w(x):
        return 0.0 if x == 0.0 else x ** e * math.log(2 / x) ** a

    if q == INF:
        # the weight is nondecreasing, so the sup on a cell sits at its right edge
        return max(v * w(hi) for hi, v in zip(fs.hi, fs.values))
    tot = 0.0
    for lo, hi, v in zip(fs.lo, fs.hi, fs.values):
        ulo, uhi = -math.log(hi), (INF if lo == 0 else -math.log(lo))
        val, _ = spi.quad(lambda u: (w(math.exp(-u)) * v) ** q * math.exp(-u), ulo, uhi,
                          epsabs=0, epsrel=1e-11, limit=400)
        tot += val
    return tot ** (1 / q)


def test_to_exact():
    assert to_exact(0.1) == Fraction(1, 10)
    assert to_exact("3/2") == Fraction(3, 2)
    assert to_exact("inf") == INF


def test_normalization_equalities():
    assert L(2) == LOR(2, 2) == LZ(2, 2, 0)
    assert hash(L(2)) == hash(LZ(2, 2, 0))
    assert LZ(3, 3, 0).simplest().family == "lebesgue"


@pytest.mark.parametrize("triple, ok", [((INF, 2, -1), True), ((INF, 2, 0), False),
                                        ((1, 1, -1), False), ((1, 2, 0), False),
                                        ((INF, INF, 0), True), ((2, 7, 3), True)])
def test_admissibility(triple, ok):
    assert bool(validate_space(LZ(*triple))) is ok


def test_characteristic_norms():
    assert norm(L(2), chi(0.25)).value == pytest.approx(0.5, rel=1e-14)
    # (p/q)^{1/q} a^{1/p}, independent antiderivative of s^{q/p-1}
    assert norm(LOR(2, 1), chi(0.25)).value == pytest.approx(1.0, rel=1e-12)


def test_fundamental_function():
    assert fundamental_function(L(4), 0.01) == pytest.approx(0.01 ** 0.25)
    assert fundamental_function(LZ(INF, INF, -1), 0.02) == pytest.approx(1 / math.log(100), rel=1e-12)
    assert fundamental_function(LZ(INF, INF, -1), 0.02) == pytest.approx(0.21714724095162588)


@pytest.mark.parametrize("s", [L(3), LOR(2, 1), LOR(3, 5), LZ(2, 2, 1), LZ(1, 1, 2),
                               LZ(4, INF, -1), LZ(INF, INF, -2)])
def test_norm_against_quadrature(s):
    rng = np.random.default_rng(1)
    for _ in range(4):
        x = np.concatenate(([0.0], np.sort(10 ** rng.uniform(-6, 0, 4)), [1.0]))
        f = StepFunction(np.unique(x), rng.exponential(1.0, np.unique(x).size - 1))
        assert norm(s, f).value == pytest.approx(quad_norm(s, f), rel=1e-7)


def test_log_lorentz_closed_form():
    # weight 1/(s log^2(2/s)) has antiderivative 1/log(2/s)
    rng = np.random.default_rng(2)
    s = LZ(INF, 2, -1)
    for _ in range(4):
        x = np.unique(np.concatenate(([0.0], 10 ** rng.uniform(-6, 0, 4), [1.0])))
        f = StepFunction(x, rng.exponential(1.0, x.size - 1))
        fs = rearrange(f)
        prim = [0.0] + [1 / math.log(2 / h) for h in fs.hi]
        want = math.sqrt(sum(v * v * (prim[i + 1] - prim[i]) for i, v in enumerate(fs.values)))
        assert norm(s, f).value == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("a", [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
def test_associate_L2_of_indicator(a):
    res = associate_norm(L(2), chi(a))
    assert res.exact == pytest.approx(a ** 0.5)
    assert a ** 0.5 * 0.98 <= res.value <= a ** 0.5 * (1 + 1e-9)


def test_associate_endpoints():
    g = StepFunction([0, 0.2, 0.7, 1], [1.0, 3.0, 0.5])
    assert associate_norm(L(INF), g).value == pytest.approx(0.2 + 1.5 + 0.15)
    assert associate_norm(L(1), g).value == pytest.approx(3.0)


def test_associate_reports_budget():
    res = associate_norm(LOR(2, 1), chi(0.3), budget=50)
    assert res.evaluations <= 60
    assert res.value > 0


@pytest.mark.parametrize("s1, s2, want", [(L(3), L(2), True), (LOR(2, 1), L(2), True),
                                          (L(2), LOR(2, 1), False)])
def test_continuous_embedding(s1, s2, want):
    assert continuous_embedding_lz(s1, s2) is want


@pytest.mark.parametrize("s1, s2, want", [(LOR(3, 1), LOR(2, INF), True),
                                          (LOR(2, 1), LOR(2, 1), False),
                                          (LOR(2, 1), LOR(2, INF), False),
                                          (LZ(2, 2, 1), L(2), True)])
def test_almost_compact_embedding(s1, s2, want):
    assert almost_compact_embedding_lz(s1, s2) is want


def test_l1_constant():
    for p in (1, 2, 5, INF):
        c = l1_embedding_constant(L(p))
        assert c.value == pytest.approx(1.0) and c.exactness == "exact"
    c = l1_embedding_constant(LZ(INF, INF, -1))
    assert c.exactness == "lower_bound" and c.value > 0


@pytest.mark.parametrize("s, e, l, want", [
    (L(2), Fraction(1, 2), 0, False), (L(2), Fraction(1, 3), 0, True),
    (LZ(2, 2, -1), Fraction(1, 2), 0, True), (LZ(2, 2, Fraction(-1, 2)), Fraction(1, 2), 0, False),
    (L(INF), 0, 1, False), (LZ(INF, INF, -2), 0, 1, True), (LZ(INF, 2, -2), 0, 1, True),
    (LZ(INF, 2, -1), 0, Fraction(1, 2), False), (L(INF), 0, -1, True),
])
def test_power_log_cutoff(s, e, l, want):
    assert power_log_cutoff_vanishes(s, e, l) is want


def test_json_round_trip_and_errors():
    for s in (L(2), LOR(3, 1), LZ(INF, 2, "-3/2")):
        assert SpaceSpec.from_dict(s.to_dict()) == s
    with pytest.raises(ValueError, match="p"):
        SpaceSpec.from_dict({"family": "lebesgue"})
    with pytest.raises(ValueError, match="family"):
        SpaceSpec.from_dict({"family": "orlicz", "p": 2})


@given(lorentz_specs(), steps(allow_zero=False))
def test_rearrangement_invariance(s, f):
    assert norm(s, rearrange(f)).value == pytest.approx(norm(s, f).value, rel=1e-12)


@given(lorentz_specs(), steps(allow_zero=False))
def test_sandwich_between_L1_and_Linf(s, f):
    nf = norm(s, f).value
    cx = l1_embedding_constant(s).value
    assert f.values @ f.widths <= cx * nf * (1 + 1e-9)
    assert nf <= fundamental_function(s, 1.0) * f.values.max() * (1 + 1e-9)


@given(lorentz_specs(), steps(), steps(), st.floats(0.01, 100))
def test_triangle_and_scaling(s, f, g, c):
    nf, ng = norm(s, f).value, norm(s, g).value
    if s.is_norm:
        assert norm(s, f + g).value <= (nf + ng) * (1 + 1e-9) + 1e-12
    assert norm(s, f.scale(c)).value == pytest.approx(c * nf, rel=1e-10, abs=1e-300)


def test_quasinorm_breaks_triangle():
    s = LOR(Fraction(5, 4), Fraction(3, 2))
    f = StepFunction([0, 0.01, 0.1, 1], [0, 0, 1.0])
    g = StepFunction([0, 0.01, 0.1, 1], [0, 4.0, 3.0])
    assert not s.is_norm
    assert norm(s, f + g).value > norm(s, f).value + norm(s, g).value


@given(lorentz_specs())
def test_fundamental_quasiconcave(s):
    t = np.geomspace(1e-9, 1, 300)
    phi = fundamental_function(s, t)
    assert np.all(np.diff(phi) >= -1e-12 * phi[1:])
    assert np.all(np.diff(phi / t) <= 1e-12 * (phi / t)[:-1])
