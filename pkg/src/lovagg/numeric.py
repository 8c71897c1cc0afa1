"""Tolerance semantics and sampling grids used across the package.

All approximate comparisons use the mixed absolute/relative rule
|lhs - rhs| <= abs + rel * max(|lhs|, |rhs|), which stays meaningful
across set functions of very different magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative comparison tolerance."""

    absolute: float = 1e-12
    relative: float = 1e-9

    def gap(self, lhs: float, rhs: float) -> float:
        return abs(lhs - rhs)

    def bound(self, lhs: float, rhs: float) -> float:
        return self.absolute + self.relative * max(abs(lhs), abs(rhs))

    def close(self, lhs: float, rhs: float) -> bool:
        return self.gap(lhs, rhs) <= self.bound(lhs, rhs)

    def to_dict(self) -> dict:
        return {"abs": self.absolute, "rel": self.relative}


DEFAULT_TOLERANCE = Tolerance()


def linspace(lo: float, hi: float, count: int) -> list[float]:
    """Equispaced points with exact endpoints (no numpy dependency here)."""
    if count < 2:
        return [lo] if count == 1 else []
    step = (hi - lo) / (count - 1)
    pts = [lo + k * step for k in range(count)]
    pts[0], pts[-1] = lo, hi
    return pts


@dataclass(frozen=True)
class SampleSpec:
    """How densely to probe a function.

    ray_points: equispaced points per axis for checks along scaled
        indicator tuples; box_samples: seeded random tuples for full-box
        checks; ray_grid: extra abscissae unioned into every axis grid
        (e.g. known breakpoints of an inner utility function).
    """

    ray_points: int = 33
    box_samples: int = 200
    seed: int = 0
    ray_grid: tuple[float, ...] | None = None

    def axis_points(self, lo: float, hi: float) -> list[float]:
        pts = set(linspace(lo, hi, self.ray_points))
        pts.add(0.0)
        if lo <= 1.0 <= hi:
            pts.add(1.0)
        if lo <= -1.0 <= hi:
            pts.add(-1.0)
        if self.ray_grid:
            pts.update(t for t in self.ray_grid if lo <= t <= hi)
        return sorted(pts)


DEFAULT_SAMPLES = SampleSpec()
