"""Hypothesis strategies for step functions and space specs."""

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from ricompact.rinorm import SpaceSpec, validate_space
from ricompact.stepfn import StepFunction


@st.composite
def steps(draw, max_cells=8, allow_zero=True, exact=False):
    n = draw(st.integers(1, max_cells))
    if exact:
        # dyadic breakpoints and values: float arithmetic is exact on them
        cuts = draw(st.lists(st.integers(1, 63), min_size=n - 1, max_size=n - 1, unique=True))
        x = [0.0] + sorted(c / 64 for c in cuts) + [1.0]
        vals = draw(st.lists(st.integers(0 if allow_zero else 1, 16), min_size=n, max_size=n))
        return StepFunction(x, [v / 4 for v in vals])
    logs = draw(st.lists(st.floats(-8, -1e-3), min_size=n - 1, max_size=n - 1, unique=True))
    x = np.unique(np.concatenate(([0.0], np.sort(10.0 ** np.array(logs)), [1.0])))
    lo = 0.0 if allow_zero else 1e-3
    vals = draw(st.lists(st.floats(lo, 50.0, allow_subnormal=False), min_size=x.size - 1, max_size=x.size - 1))
    return StepFunction(x, vals)


_P = [Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(7)]


@st.composite
def lorentz_specs(draw, with_inf=True):
    ps = _P + ([float("inf")] if with_inf else [])
    p = draw(st.sampled_from(ps))
    q = draw(st.sampled_from(ps + ([float("inf")] if not with_inf else [])))
    s = SpaceSpec.lz(p, q, 0)
    if not validate_space(s):
        return SpaceSpec.lebesgue(p)
    return s.simplest()
