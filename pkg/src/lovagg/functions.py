"""Domain intervals, tabulated utility functions and black-box functions.

These are the inputs shared by the axiom checkers and the factorization
machinery: the interval the function lives on, the piecewise-linear
nondecreasing inner map phi with phi(0) = 0, and an opaque n-ary
evaluator with a declared domain box.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import ArityMismatch, DomainViolation, PhiNotOdd
from .numeric import linspace

KIND_NONNEGATIVE = "nonnegative"
KIND_NONPOSITIVE = "nonpositive"
KIND_CENTERED = "centered"
KIND_GENERAL = "general"


@dataclass(frozen=True)
class DomainInterval:
    """A finite closed interval [lo, hi] containing 0.

    Unbounded intervals are modeled by choosing large finite bounds;
    grid-based verification needs a compact box.
    """

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("domain bounds must be finite")
        if not self.lo <= 0.0 <= self.hi:
            raise ValueError(f"domain [{self.lo}, {self.hi}] must contain 0")

    @property
    def kind(self) -> str:
        if self.lo == 0.0:
            return KIND_NONNEGATIVE
        if self.hi == 0.0:
            return KIND_NONPOSITIVE
        if self.hi == -self.lo:
            return KIND_CENTERED
        return KIND_GENERAL

    def contains(self, t: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= t <= self.hi + slack

    def half(self) -> "DomainInterval":
        return DomainInterval(self.lo / 2.0, self.hi / 2.0)

    def shifted(self, c: float) -> "DomainInterval":
        return DomainInterval(self.lo - c, self.hi - c)

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)


def _as_interval(domain) -> DomainInterval:
    if isinstance(domain, DomainInterval):
        return domain
    lo, hi = domain
    return DomainInterval(lo, hi)


@dataclass(frozen=True)
class UtilityFunction:
    """Piecewise-linear nondecreasing map with phi(0) = 0.

    Represented by its breakpoints; 0 must be a breakpoint with value
    exactly 0.  With ``odd=True`` the breakpoints must come in exact
    (x, y) / (-x, -y) pairs, so the table is odd by construction.
    """

    breakpoints: tuple[tuple[float, float], ...]
    odd: bool = False
    _xs: tuple[float, ...] = field(init=False, repr=False, compare=False)
    _ys: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.breakpoints)
        if len(pts) < 2:
            raise ValueError("a utility function needs at least two breakpoints")
        xs = tuple(p[0] for p in pts)
        ys = tuple(p[1] for p in pts)
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise ValueError("breakpoint abscissae must be strictly increasing")
        for a, b in zip(ys, ys[1:]):
            if a > b:
                raise ValueError(f"values must be nondecreasing, got {a!r} then {b!r}")
        if 0.0 not in xs:
            raise ValueError("0 must be a breakpoint")
        if ys[xs.index(0.0)] != 0.0:
            raise ValueError("the value at 0 must be exactly 0")
        if self.odd:
            table = dict(pts)
            for x, y in pts:
                if -x not in table or table[-x] != -y:
                    raise PhiNotOdd(f"breakpoint ({x}, {y}) has no exact mirror (-x, -y)")
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)

    @property
    def domain(self) -> DomainInterval:
        return DomainInterval(self._xs[0], self._xs[-1])

    def __call__(self, t: float) -> float:
        xs, ys = self._xs, self._ys
        if t < xs[0] or t > xs[-1]:
            raise DomainViolation(f"{t!r} outside utility domain [{xs[0]}, {xs[-1]}]")
        j = bisect_right(xs, t) - 1
        if j == len(xs) - 1 or t == xs[j]:
            return ys[j]
        return ys[j] + (t - xs[j]) * (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j])

    def map_tuple(self, x: Sequence[float]) -> tuple[float, ...]:
        return tuple(self(t) for t in x)

    def scale(self, a: float) -> "UtilityFunction":
        """Pointwise positive scaling a * phi (a > 0 keeps monotonicity)."""
        if not a > 0.0:
            raise ValueError("scale factor must be positive")
        return UtilityFunction(tuple((x, a * y) for x, y in self.breakpoints), odd=self.odd)

    @classmethod
    def identity(cls, lo: float = 0.0, hi: float = 1.0) -> "UtilityFunction":
        pts = sorted({float(lo), 0.0, float(hi)})
        return cls(tuple((t, t) for t in pts), odd=(lo == -hi and lo < 0.0))

    @classmethod
    def from_samples(
        cls, xs: Sequence[float], ys: Sequence[float], odd: bool = False
    ) -> "UtilityFunction":
        return cls(tuple(zip(map(float, xs), map(float, ys))), odd=odd)

    @classmethod
    def from_callable(
        cls,
        fn: Callable[[float], float],
        lo: float,
        hi: float,
        points: int = 33,
        odd: bool = False,
    ) -> "UtilityFunction":
        """Tabulate ``fn`` on an equispaced grid (0 inserted if missing).

        With ``odd=True`` the grid is mirrored and values are stored as
        exact negation pairs, (fn(x), -fn(x)).
        """
        if odd:
            if hi != -lo:
                raise ValueError("an odd tabulation needs a symmetric interval")
            pos = [t for t in linspace(0.0, hi, max(2, (points + 1) // 2)) if t > 0.0]
            pts = [(0.0, 0.0)]
            for t in pos:
                y = float(fn(t))
                pts.append((t, y))
                pts.append((-t, -y))
            pts.sort()
        else:
            grid = sorted(set(linspace(float(lo), float(hi), points)) | {0.0})
            pts = [(t, float(fn(t)) if t != 0.0 else 0.0) for t in grid]
        return cls(tuple(pts), odd=odd)


@dataclass(frozen=True)
class EvaluableFunction:
    """Black-box n-ary real function with a declared domain box.

    ``evaluator`` must be total on domain^n and stateless (safe for
    concurrent calls).  ``provenance`` records how the function was
    built (composition spec or tabulated grid); checkers treat it as
    opaque, but the factorization machinery may mine it for known inner
    breakpoints to sharpen its sampling grid.
    """

    arity: int
    domain: DomainInterval
    evaluator: Callable[[tuple[float, ...]], float]
    provenance: Mapping | str = "opaque"

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        object.__setattr__(self, "domain", _as_interval(self.domain))

    def __call__(self, x: Sequence[float]) -> float:
        if len(x) != self.arity:
            raise ArityMismatch(self.arity, len(x))
        dom = self.domain
        slack = 1e-12 * max(1.0, abs(dom.lo), abs(dom.hi))
        for t in x:
            if not dom.contains(t, slack):
                raise DomainViolation(
                    f"coordinate {t!r} outside domain [{dom.lo}, {dom.hi}]"
                )
        return float(self.evaluator(tuple(x)))

    def at_zero(self) -> float:
        return self((0.0,) * self.arity)

    def inner_breakpoints(self) -> tuple[float, ...]:
        """Known bend abscissae recorded by a composition builder, if any."""
        if isinstance(self.provenance, Mapping):
            return tuple(self.provenance.get("phi_breakpoints", ()))
        return ()


def shifted_function(f: EvaluableFunction, c: float) -> EvaluableFunction:
    """g(x) = f(x + c 1) on the shifted box (which must still contain 0)."""
    c = float(c)
    if not f.domain.contains(c):
        raise ValueError("shift must lie inside the domain so 0 stays inside")
    ev = f.evaluator
    n = f.arity

    def shifted_eval(x: tuple[float, ...]) -> float:
        return ev(tuple(t + c for t in x))

    return EvaluableFunction(
        n, f.domain.shifted(c), shifted_eval, provenance={"type": "shifted", "by": c}
    )


def reflected_function(f: EvaluableFunction) -> EvaluableFunction:
    """g(x) = f(-x) on the mirrored box."""
    ev = f.evaluator

    def reflected_eval(x: tuple[float, ...]) -> float:
        return ev(tuple(-t for t in x))

    return EvaluableFunction(
        f.arity,
        DomainInterval(-f.domain.hi, -f.domain.lo),
        reflected_eval,
        provenance={"type": "reflected"},
    )
