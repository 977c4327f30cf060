import math
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from ricompact.checks import DECISION_TABLE
from ricompact.classify import (CLASS_WIDE, NO, OUT, PER_DOMAIN, YES, EmbeddingQuery, Verdict,
                                classify, classify_john, classify_mazya, classify_product,
                                optimal_range_lookup)
from ricompact.isoperimetry import DomainSpec, PhiSpec
from ricompact.rinorm import SpaceSpec, almost_compact_embedding_lz, continuous_embedding_lz

INF = math.inf
L, LOR, LZ = SpaceSpec.lebesgue, SpaceSpec.lorentz, SpaceSpec.lz
GAUSS = PhiSpec.gauss()


def verdict(d, m, X, Y):
    return classify(EmbeddingQuery(d, m, X, Y))


@pytest.mark.parametrize("m, X, Y, want", [
    (1, L(3), L(INF), YES), (2, L(1), L(INF), NO), (3, L(1), L(INF), YES),
    (3, LZ(INF, 2, -1), LZ(1, 1, 2), YES), (1, L("3/2"), L(2), YES),
])
def test_john(m, X, Y, want):
    v = classify_john(EmbeddingQuery(DomainSpec.john(2), m, X, Y))
    assert v.compact == want
    assert v.sense == PER_DOMAIN
    assert "Thm (john)" in v.rule


@pytest.mark.parametrize("alpha, m, X, Y, want", [
    (F(1, 2), 1, L(1), L("3/2"), YES),
    (F(1, 2), 1, L(1), L(2), NO),
    (F(1), 1, L(2), L(2), NO), (F(1), 3, L(2), L(2), NO),
    (F(1), 1, L(INF), LOR(5, 2), YES),
    (F(1), 1, L(3), L(2), YES),
])
def test_mazya(alpha, m, X, Y, want):
    v = classify_mazya(EmbeddingQuery(DomainSpec.mazya_class(alpha, 2), m, X, Y))
    assert v.compact == want
    assert v.sense == CLASS_WIDE


def test_mazya_model_is_per_domain():
    v = verdict(DomainSpec.mazya_model(F(1, 2), 2), 1, L(1), L("3/2"))
    assert v.compact == YES and v.sense == PER_DOMAIN


def test_mazya_lz_out_of_scope():
    v = verdict(DomainSpec.mazya_class(F(9, 10), 2), 2, LZ(1, 1, F(1, 2)), L(2))
    assert v.compact == OUT and v.rule == "" and v.suggestion


@pytest.mark.parametrize("d, m, X, Y, want", [
    (DomainSpec.product(GAUSS, 2), 1, L(2), L(2), YES),
    (DomainSpec.product(GAUSS, 3), 4, L(INF), L(INF), NO),
    (DomainSpec.product(PhiSpec.boltzmann(1), 1), 1, L(1), L(1), NO),
    (DomainSpec.product(PhiSpec.boltzmann(1), 1), 1, L(3), L(2), YES),
    (DomainSpec.product(PhiSpec.boltzmann(1), 1), 1, L(2), L(2), NO),
])
def test_product(d, m, X, Y, want):
    assert classify_product(EmbeddingQuery(d, m, X, Y)).compact == want


@pytest.mark.parametrize("a2, want", [(F(0), YES), (F(49, 100), YES), (F(1, 2), NO), (F(1), NO)])
def test_product_lz_shift(a2, want):
    d = DomainSpec.product(PhiSpec.boltzmann(2), 2)
    assert verdict(d, 1, L(2), LZ(2, 2, a2)).compact == want


def test_product_out_of_scope_beta():
    v = verdict(DomainSpec.product(PhiSpec.boltzmann(3), 2), 1, L(2), L(2))
    assert v.compact == OUT


@pytest.mark.parametrize("d, m, X, Y, want", DECISION_TABLE,
                         ids=[f"{d.kind}-{m}-{X}-{Y}" for d, m, X, Y, _ in DECISION_TABLE])
def test_decision_table(d, m, X, Y, want):
    v = verdict(d, m, X, Y)
    assert v.compact == want
    if want != OUT:
        assert v.rule.startswith("Thm")


@pytest.mark.parametrize("X, d, m, want", [
    (LOR(2, 3), DomainSpec.mazya_class(F(3, 4), 2), 1, LOR(4, 3)),
    (L(INF), DomainSpec.mazya_class(F(1), 2), 2, LZ(INF, INF, -2)),
    (L(2), DomainSpec.mazya_class(F(1), 2), 2, L(2)),
    (LZ(2, 2, 1), DomainSpec.product(PhiSpec.boltzmann(F(3, 2)), 2), 3, LZ(2, 2, 2)),
    (L(INF), DomainSpec.product(GAUSS, 2), 1, LZ(INF, INF, F(-1, 2))),
    (L(2), DomainSpec.john(2), 3, None),
])
def test_optimal_range(X, d, m, want):
    assert optimal_range_lookup(X, d, m) == want


def test_v_equals_w_note():
    assert any("V^m" in n for n in verdict(DomainSpec.john(2), 1, L(3), L(2)).notes)
    assert not any("V^m" in n for n in verdict(DomainSpec.mazya_class(1, 2), 1, L(3), L(2)).notes)


def test_verdict_validation_and_json():
    with pytest.raises(ValueError):
        Verdict("maybe", "r", PER_DOMAIN)
    with pytest.raises(ValueError):
        Verdict(YES, "", PER_DOMAIN)
    q = EmbeddingQuery(DomainSpec.john(3), 2, L(2), LOR(3, 1))
    assert EmbeddingQuery.from_dict(q.to_dict()).to_dict() == q.to_dict()
    d = verdict(DomainSpec.john(3), 2, L(2), L(INF)).to_dict()
    assert set(d) >= {"compact", "rule", "sense", "optimal_range"}


def test_query_errors():
    with pytest.raises(ValueError, match="m"):
        EmbeddingQuery(DomainSpec.john(2), 0, L(1), L(1))
    with pytest.raises(ValueError, match=r"X\.p"):
        EmbeddingQuery.from_dict({"domain": {"kind": "john", "n": 2}, "m": 1,
                                  "X": {"family": "lebesgue", "p": 0.5},
                                  "Y": {"family": "lebesgue", "p": 2}})
    with pytest.raises(ValueError, match="Y"):
        EmbeddingQuery(DomainSpec.john(2), 1, L(1), LZ(INF, 2, 0))


# ---- invariants over a rational Lorentz grid --------------------------------

PS = [F(1), F(5, 4), F(3, 2), F(2), F(3), F(6), INF]
lor = st.builds(lambda p, q: LOR(p, q) if validate(p, q) else L(p),
                st.sampled_from(PS), st.sampled_from(PS))


def validate(p, q):
    from ricompact.rinorm import validate_space
    return bool(validate_space(LOR(p, q)))


domains = st.one_of(
    st.builds(DomainSpec.john, st.integers(2, 4)),
    st.builds(lambda a, n: DomainSpec.mazya_class(a, n),
              st.sampled_from([F(3, 4), F(5, 6), F(9, 10), F(1)]), st.just(2)),
    st.builds(lambda b, n: DomainSpec.product(PhiSpec.boltzmann(b), n),
              st.sampled_from([F(1), F(3, 2), F(2)]), st.integers(1, 3)),
)


@given(domains, st.integers(1, 3), st.sampled_from(PS[:-1] + [INF]), st.sampled_from(PS))
def test_normalization_invariance(d, m, p1, p2):
    base = verdict(d, m, L(p1), L(p2)).compact
    assert verdict(d, m, LOR(p1, p1), LZ(p2, p2, 0)).compact == base


@given(domains, st.integers(1, 3), lor, lor, lor)
def test_target_monotonicity(d, m, X, Y1, Y2):
    assume(continuous_embedding_lz(Y1, Y2))
    if verdict(d, m, X, Y1).compact == YES:
        assert verdict(d, m, X, Y2).compact == YES


@given(domains, st.integers(1, 3), lor, lor, lor)
def test_source_monotonicity(d, m, X1, X2, Y):
    assume(continuous_embedding_lz(X2, X1))
    if verdict(d, m, X1, Y).compact == YES:
        assert verdict(d, m, X2, Y).compact == YES


@given(st.sampled_from([GAUSS, PhiSpec.boltzmann(1), PhiSpec.boltzmann(F(3, 2))]),
       st.integers(1, 3), lor, lor)
def test_product_dimension_independent(phi, m, X, Y):
    got = {verdict(DomainSpec.product(phi, n), m, X, Y).compact for n in (1, 2, 5)}
    assert len(got) == 1


@given(st.sampled_from([F(3, 4), F(5, 6), F(9, 10)]), st.integers(1, 3),
       st.sampled_from([F(1), F(5, 4), F(3, 2), F(2)]))
def test_threshold_strict(alpha, m, p1):
    c = m * (1 - alpha)
    assume(c * p1 < 1)
    p2 = p1 / (1 - c * p1)
    d = DomainSpec.mazya_class(alpha, 2)
    assert verdict(d, m, L(p1), L(p2)).compact == NO
    assert verdict(d, m, L(p1), L(float(p2) - 1e-9)).compact == YES


@given(st.sampled_from([F(3, 4), F(5, 6), F(9, 10)]), st.integers(1, 2), lor, lor)
def test_verdict_matches_optimal_range(alpha, m, X, Y):
    # below the critical order the verdict is an almost-compact embedding of the optimal range
    assume(m * (1 - alpha) < 1 and not Y.is_Linf() and not X.is_Linf())
    d = DomainSpec.mazya_class(alpha, 2)
    Xr = optimal_range_lookup(X, d, m)
    assume(Xr is not None)
    v = verdict(d, m, X, Y)
    assert v.compact == (YES if almost_compact_embedding_lz(Xr, Y) else NO)
