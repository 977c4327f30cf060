import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as spi
from scipy.optimize import brentq

from ricompact import _kernels_py
from ricompact.isoperimetry import PhiSpec
from ricompact.kernelops import (BACKEND, OperatorSpec, ProfileJ, apply, char_closed_form,
                                 check_associate_identity, check_composition,
                                 check_HK_equivalence, hardy, volterra)
from ricompact.rinorm import SpaceSpec
from ricompact.stepfn import StepFunction, chi, constant, maximal_average, random_step, rearrange

from strategies import steps

ONE = constant(1.0)


def op(kind, order=1, **kw):
    return OperatorSpec(kind, order, **kw)


def at(o, f, t):
    return float(apply(o, f, [t]).values[0])


def test_hardy_constant_weight():
    assert at(op("H", 2, J=ProfileJ.constant()), ONE, 0.5) == pytest.approx(0.125, rel=1e-14)


def test_q_operator():
    assert at(op("Q", 1, n=2), ONE, 0.25) == pytest.approx(1.0, rel=1e-14)


def test_t_operator_log_kernel():
    assert at(op("T", 2, alpha=1.0), ONE, 1 / math.e) == pytest.approx(0.5, rel=1e-13)


def test_k_operator():
    o = op("K", 1, I=ProfileJ.power(0.5))
    assert at(o, chi(0.25), 0.09) == pytest.approx(0.4, rel=1e-13)


def test_p_operator_gauss():
    # Phi(t) = t^2/2, so Phi^-1(y) = sqrt(2y); two routes to the same number
    y = math.log(4.0)
    want = math.sqrt(2 * y) / y * math.log(2.0)
    assert brentq(lambda x: x * x / 2 - y, 0, 10, xtol=1e-15) == pytest.approx(math.sqrt(2 * y))
    got = at(op("P", 1, phi=PhiSpec.gauss()), ONE, 0.5)
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(0.83255461, rel=1e-7)


def test_p_operator_matches_direct_quadrature():
    phi = PhiSpec.gauss()
    f = StepFunction([0, 0.1, 0.4, 1], [3.0, 1.0, 0.5])
    for t in (0.01, 0.2, 0.7):
        y = math.log(2 / t)
        inner, _ = spi.quad(lambda s: f(np.array([s]))[0] / s, t, 1, points=[0.1, 0.4])
        want = (phi.inv(y) / y) * inner
        assert at(op("P", 1, phi=phi), f, t) == pytest.approx(want, rel=1e-9)


def test_char_closed_form():
    J = ProfileJ.constant()
    assert char_closed_form(J, 3, 1.0, 1e-14)[0] == pytest.approx(1 / 6, rel=1e-12)
    assert char_closed_form(J, 3, 0.5, 0.7)[0] == 0.0
    assert char_closed_form(J, 3, 0.5, 0.5)[0] == 0.0
    assert char_closed_form(ProfileJ.power(0.5), 1, 0.25, 0.09)[0] == pytest.approx(0.4)


@pytest.mark.parametrize("J", [ProfileJ.constant(), ProfileJ.power(0.5), ProfileJ.power(-1.0),
                               ProfileJ.slog(1.0), ProfileJ.l_phi(PhiSpec.gauss())])
@pytest.mark.parametrize("j", [1, 2, 3])
def test_char_matches_apply(J, j):
    t = np.geomspace(1e-8, 1, 50)
    got = apply(op("H", j, J=J), chi(0.3), t).values
    np.testing.assert_allclose(got, char_closed_form(J, j, 0.3, t), rtol=1e-10, atol=1e-300)


def test_hardy_against_quadrature():
    J = ProfileJ.power(0.7)
    f = StepFunction([0, 0.05, 0.3, 1], [2.0, 0.5, 1.5])
    for t in (0.01, 0.2, 0.6):
        def integrand(s):
            d = (s ** 0.3 - t ** 0.3) / 0.3
            return f(np.array([s]))[0] / s ** 0.7 * d
        want, _ = spi.quad(integrand, t, 1, points=[0.05, 0.3], epsrel=1e-12)
        assert hardy(J, 2, f, [t])[0] == pytest.approx(want, rel=1e-10)


def test_associate_identity():
    J = ProfileJ.constant()
    assert check_associate_identity(J, 1, ONE, ONE) < 1e-14
    assert check_associate_identity(J, 1, ONE, StepFunction([0, 1], [0.0])) == 0.0
    rng = np.random.default_rng(7)
    J = ProfileJ.power(0.7)
    worst = max(check_associate_identity(J, 2, random_step(rng), random_step(rng))
                for _ in range(100))
    assert worst <= 1e-7


def test_composition():
    assert check_composition(ProfileJ.constant(), 2, ONE) < 1e-14
    assert check_composition(ProfileJ.power(0.4), 1, chi(0.3)) < 1e-14
    rng = np.random.default_rng(3)
    for _ in range(10):
        assert check_composition(ProfileJ.power(1.0), 3, random_step(rng)) <= 1e-6


def test_hk_equivalence():
    rng = np.random.default_rng(11)
    fs = [random_step(rng) for _ in range(10)]
    lo, hi = check_HK_equivalence(ProfileJ.power(0.5), 1, fs, SpaceSpec.lebesgue(2))
    assert lo == pytest.approx(1.0) and hi == pytest.approx(1.0)
    fs = [random_step(rng) for _ in range(50)]
    lo, hi = check_HK_equivalence(ProfileJ.power(0.8), 2, fs, SpaceSpec.lebesgue(1))
    C = max(hi, 1 / lo)
    assert 1.0 <= C < 10.0


def test_hk_refused_without_comparison_condition():
    with pytest.raises(ValueError, match="comparable"):
        check_HK_equivalence(ProfileJ.slog(0.5), 1, [ONE], SpaceSpec.lebesgue(1))


@pytest.mark.parametrize("kind, kw", [("Q", {"n": 1}), ("T", {"alpha": 0.3, "n": 2}),
                                      ("H", {}), ("K", {}), ("P", {}), ("X", {})])
def test_operator_validation(kind, kw):
    with pytest.raises(ValueError):
        OperatorSpec(kind, 1, **kw)


def test_profile_validation():
    with pytest.raises(ValueError, match="gamma"):
        ProfileJ.power(1.5)
    with pytest.raises(ValueError, match="b"):
        ProfileJ.slog(-1)


def test_apply_rejects_bad_grid():
    with pytest.raises(ValueError, match="t"):
        apply(op("Q", 1, n=3), ONE, [0.0, 0.5])


def test_backends_agree():
    rng = np.random.default_rng(5)
    lam_t = np.sort(rng.uniform(0, 5, 40))[::-1].copy()
    edges = np.sort(rng.uniform(0, 5, 9))[::-1].copy()
    vals = rng.exponential(1.0, 8)
    for j in (1, 2, 4):
        ref = _kernels_py.hardy_sum(lam_t, edges[:-1], edges[1:], vals, j)
        mod = pytest.importorskip("ricompact._kernels") if BACKEND == "cython" else _kernels_py
        np.testing.assert_allclose(mod.hardy_sum(lam_t, edges[:-1], edges[1:], vals, j), ref,
                                   rtol=1e-12, atol=1e-14)
        V = rng.exponential(1.0, (5, 8))
        np.testing.assert_allclose(
            mod.hardy_sum_batch(lam_t, edges[:-1], edges[1:], V, j),
            _kernels_py.hardy_sum_batch(lam_t, edges[:-1], edges[1:], V, j), rtol=1e-12, atol=1e-14)


OPS = [op("H", 2, J=ProfileJ.power(0.6)), op("K", 2, I=ProfileJ.power(0.8)), op("Q", 2, n=3),
       op("T", 1, alpha=0.75, n=2), op("T", 3, alpha=1.0), op("H", 1, J=ProfileJ.slog(1.0))]
GRID = np.geomspace(1e-9, 1, 60)


@given(st.sampled_from(OPS), steps())
def test_hardy_kind_output_nonincreasing(o, f):
    v = apply(o, f, GRID).values
    assert np.all(np.diff(v) <= 1e-12 * np.abs(v[:-1]) + 1e-300)


@given(st.sampled_from(OPS + [op("R", 2, J=ProfileJ.power(0.6)), op("P", 2, phi=PhiSpec.gauss())]),
       steps(), steps())
def test_monotone_in_f(o, f, g):
    lo = apply(o, f.minimum(g), GRID).values
    hi = apply(o, f.maximum(g), GRID).values
    assert np.all(lo >= 0)
    assert np.all(lo <= hi * (1 + 1e-10) + 1e-300)


@given(steps(), st.sampled_from([PhiSpec.gauss(), PhiSpec.boltzmann(1.0), PhiSpec.boltzmann(1.5)]),
       st.integers(1, 3))
def test_p_dominated_by_hardy_on_l_phi(f, phi, m):
    p = apply(op("P", m, phi=phi), f, GRID).values
    h = hardy(ProfileJ.l_phi(phi), m, f, GRID)
    assert np.all(p <= 2 ** m * math.factorial(m - 1) * h * (1 + 1e-10) + 1e-300)


@given(steps(allow_zero=False), st.integers(1, 3))
def test_volterra_bounded_by_primitive(f, j):
    # with J = 1 the kernel (t-s)^(j-1) is at most t^(j-1)
    fs = rearrange(f)
    t = np.geomspace(1e-4, 1 - 1e-12, 30)
    r = volterra(ProfileJ.constant(), j, fs, t)
    bound = t ** (j - 1) / math.factorial(j - 1) * maximal_average(fs, t) * t
    assert np.all(r <= bound * (1 + 1e-8) + 1e-300)
