"""Piecewise-constant nonnegative functions on (0,1).

A :class:`StepFunction` stores cell edges ``0 = x_0 < x_1 < ... < x_N = 1``
and one nonnegative value per cell.  Everything here is exact cell-wise
arithmetic; no quadrature is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "StepFunction",
    "Grid",
    "rearrange",
    "distribution",
    "maximal_average",
    "integrate",
    "integrate_product",
    "hardy_littlewood_gap",
    "chi",
    "constant",
    "random_step",
]


def _as_edges(breakpoints: Sequence[float]) -> np.ndarray:
    x = np.asarray(breakpoints, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("breakpoints: need at least two edges")
    if x[0] != 0.0 or x[-1] != 1.0:
        raise ValueError("breakpoints: must start at 0 and end at 1")
    if not np.all(np.diff(x) > 0):
        raise ValueError("breakpoints: must be strictly increasing")
    return x


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Nonnegative step function on (0,1).

    Signs are dropped on construction; every operator in this package acts
    on ``|f|``.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float]):
        x = _as_edges(breakpoints)
        v = np.abs(np.asarray(values, dtype=float))
        if v.shape != (x.size - 1,):
            raise ValueError(
                f"values: expected {x.size - 1} entries, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values: must be finite")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "values", v)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def lo(self) -> np.ndarray:
        return self.breakpoints[:-1]

    @property
    def hi(self) -> np.ndarray:
        return self.breakpoints[1:]

    @property
    def ncells(self) -> int:
        return self.values.size

    def __call__(self, t) -> np.ndarray:
        """Right-continuous evaluation; the value at 1 is the last cell's."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        idx = np.clip(idx, 0, self.ncells - 1)
        return self.values[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return f"StepFunction(ncells={self.ncells}, max={self.values.max():.4g})"

    def refine(self, edges: Iterable[float]) -> "StepFunction":
        """Same function on the union of its edges and ``edges``."""
        x = np.union1d(self.breakpoints, np.asarray(list(edges), dtype=float))
        x = x[(x >= 0.0) & (x <= 1.0)]
        mid = 0.5 * (x[:-1] + x[1:])
        return StepFunction(x, self(mid))

    def scale(self, c: float) -> "StepFunction":
        return StepFunction(self.breakpoints, abs(c) * self.values)

    def cutoff(self, a: float) -> "StepFunction":
        """``chi_(0,a) * f``."""
        g = self.refine([a]) if 0.0 < a < 1.0 else self
        v = np.where(g.hi <= a, g.values, 0.0)
        return StepFunction(g.breakpoints, v)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return _combine(self, other, np.add)

    def minimum(self, other: "StepFunction") -> "StepFunction":
        return _combine(self, other, np.minimum)

    def maximum(self, other: "StepFunction") -> "StepFunction":
        return _combine(self, other, np.maximum)

    def simplify(self) -> "StepFunction":
        """Merge adjacent cells carrying equal values."""
        keep = np.concatenate(([True], self.values[1:] != self.values[:-1]))
        x = np.concatenate((self.breakpoints[:-1][keep], [1.0]))
        return StepFunction(x, self.values[keep])

    def to_dict(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(),
                "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "StepFunction":
        try:
            return cls(d["breakpoints"], d["values"])
        except KeyError as exc:
            raise ValueError(f"{exc.args[0]}: missing field") from None

    @classmethod
    def sample(cls, fn: Callable[[np.ndarray], np.ndarray],
               breakpoints: Sequence[float], where: str = "mid") -> "StepFunction":
        """Step function taking ``fn`` at the midpoint (or an edge) of each cell."""
        x = _as_edges(breakpoints)
        pts = {"mid": 0.5 * (x[:-1] + x[1:]), "left": x[:-1], "right": x[1:]}[where]
        return cls(x, fn(pts))


def _combine(f: StepFunction, g: StepFunction, op) -> StepFunction:
    x = np.union1d(f.breakpoints, g.breakpoints)
    mid = 0.5 * (x[:-1] + x[1:])
    return StepFunction(x, op(f(mid), g(mid)))


@dataclass(frozen=True)
class Grid:
    """Discretisation of (0,1).

    ``geometric`` grids have a first cell ``(0, smallest)`` followed by cells
    whose widths grow by a constant ratio up to 1.
    """

    kind: str = "geometric"
    cells: int = 64
    smallest: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("uniform", "geometric"):
            raise ValueError(f"kind: unknown grid kind {self.kind!r}")
        if self.cells < 1:
            raise ValueError("cells: must be positive")
        if not 0.0 < self.smallest < 1.0:
            raise ValueError("smallest: must lie in (0,1)")

    def breakpoints(self) -> np.ndarray:
        if self.kind == "uniform":
            return np.linspace(0.0, 1.0, self.cells + 1)
        inner = np.geomspace(self.smallest, 1.0, self.cells)
        inner[-1] = 1.0
        return np.concatenate(([0.0], inner))

    def points(self) -> np.ndarray:
        """Positive edges, i.e. where limits a -> 0+ are sampled."""
        return self.breakpoints()[1:]


def rearrange(f: StepFunction) -> StepFunction:
    """Nonincreasing rearrangement ``f*`` with equal-value cells merged."""
    order = np.argsort(-f.values, kind="stable")
    v = f.values[order]
    w = f.widths[order]
    keep = np.concatenate(([True], v[1:] != v[:-1]))
    group = np.cumsum(keep) - 1
    wsum = np.bincount(group, weights=w)
    x = np.concatenate(([0.0], np.cumsum(wsum)))
    x[-1] = 1.0
    v = v[keep]
    # cells narrower than the spacing of floats near their edge vanish in the sum
    ok = np.diff(x) > 0
    if not ok.all():
        x = np.concatenate((x[:-1][ok], [1.0]))
        v = v[ok]
        if x.size > 2 and x[-2] >= 1.0:
            x, v = np.concatenate((x[:-2], [1.0])), v[:-1]
    return StepFunction(x, v)


def distribution(f: StepFunction, lam: float) -> float:
    """Measure of ``{|f| > lam}``."""
    if lam < 0:
        raise ValueError("lam: must be nonnegative")
    return float(f.widths[f.values > lam].sum())


def maximal_average(f: StepFunction, t) -> np.ndarray | float:
    """``f**(t) = (1/t) * int_0^t f*``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr <= 0) | (t_arr >= 1)):
        raise ValueError("t: must lie in (0,1)")
    fs = rearrange(f)
    out = primitive(fs, t_arr) / t_arr
    return float(out) if out.ndim == 0 else out


def primitive(f: StepFunction, t) -> np.ndarray:
    """``F(t) = int_0^t f`` (exact, vectorised)."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    cum = np.concatenate(([0.0], np.cumsum(f.values * f.widths)))
    idx = np.clip(np.searchsorted(f.breakpoints, t, side="right") - 1, 0, f.ncells - 1)
    return cum[idx] + f.values[idx] * (t - f.breakpoints[idx])


def integrate(f: StepFunction) -> float:
    return float(np.dot(f.values, f.widths))


def integrate_product(f: StepFunction, g: StepFunction) -> float:
    x = np.union1d(f.breakpoints, g.breakpoints)
    mid = 0.5 * (x[:-1] + x[1:])
    return float(np.dot(f(mid) * g(mid), np.diff(x)))


def _exact_cells(f: StepFunction) -> list[tuple[Fraction, Fraction]]:
    x = [Fraction(b) for b in f.breakpoints]
    return [(Fraction(v), x[i + 1] - x[i]) for i, v in enumerate(f.values)]


def _pair_integral(a: list, b: list) -> Fraction:
    # both lists are (value, width) runs laid out left to right from 0
    total, i, j = Fraction(0), 0, 0
    ra, rb = a[0][1], b[0][1]
    while i < len(a) and j < len(b):
        step = min(ra, rb)
        total += a[i][0] * b[j][0] * step
        ra -= step
        rb -= step
        if ra == 0:
            i += 1
            ra = a[i][1] if i < len(a) else 0
        if rb == 0:
            j += 1
            rb = b[j][1] if j < len(b) else 0
    return total


def hardy_littlewood_gap(f: StepFunction, g: StepFunction) -> Fraction:
    """``int f* g* - int f g`` in exact rational arithmetic (never negative)."""
    cf, cg = _exact_cells(f), _exact_cells(g)
    direct = _pair_integral(cf, cg)
    sf = sorted(cf, key=lambda c: -c[0])
    sg = sorted(cg, key=lambda c: -c[0])
    return _pair_integral(sf, sg) - direct


def chi(a: float, b: float = None) -> StepFunction:
    """Characteristic function of ``(0,a)``, or of ``(a,b)`` when ``b`` is given."""
    lo, hi = (0.0, a) if b is None else (a, b)
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("chi: need 0 <= lo < hi <= 1")
    x = sorted({0.0, lo, hi, 1.0})
    mid = 0.5 * (np.array(x[:-1]) + np.array(x[1:]))
    return StepFunction(x, ((mid > lo) & (mid < hi)).astype(float))


def constant(c: float) -> StepFunction:
    return StepFunction([0.0, 1.0], [c])


def random_step(rng: np.random.Generator, ncells: int | None = None,
                geometric: bool = False, zero_prob: float = 0.0) -> StepFunction:
    """Random step function used by the property suites.

    ``geometric`` draws edges log-uniformly so that small scales are present.
    """
    n = int(rng.integers(1, 12)) if ncells is None else ncells
    if geometric:
        inner = np.sort(10.0 ** rng.uniform(-8, 0, n - 1))
    else:
        inner = np.sort(rng.uniform(0, 1, n - 1))
    x = np.unique(np.concatenate(([0.0], inner, [1.0])))
    v = rng.exponential(1.0, x.size - 1)
    if zero_prob:
        v[rng.uniform(size=v.size) < zero_prob] = 0.0
    return StepFunction(x, v)
