"""Sampling-based verification of aggregation functional equations.

Every checker is a falsifier: a "fail" verdict comes with concrete
witnesses that re-evaluate to a gap above tolerance, while a "pass"
verdict is only as strong as the sampled grid (the report records the
sample count and seed so the claim is scoped).  Reports are
deterministic: identical (seed, samples, tolerance) inputs produce
byte-identical JSON.

Checked properties, for f on a box I^n:

* comonotonic additivity        f0(x + x') = f0(x) + f0(x') on common cones
* horizontal min-additivity     f0(x) = f0(x ^ c) + f0(x - x ^ c)
* (comonotonic) modularity      f(x) + f(x') = f(x ^ x') + f(x v x')
* invariance under horizontal min-differences (nonnegative domains)
                                f(x) - f(x ^ c) = f([x]_c) - f([x]_c ^ c)
* invariance under horizontal max-differences (nonpositive domains, the
  mirror image of the previous one)
* comonotonic maxitivity / minitivity   f(x v x') = f(x) v f(x') etc.
* positive/negative split       f0(x) = f0(x+) + f0(-x-)
* translation metamorphic       comonotonic modularity survives x -> x + c1

plus the constructive comonotonic-separable decomposition into per-cone
sums of unary functions.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Sequence

from .errors import DomainKindUnsupported, ReconstructionMismatch
from .functions import (
    KIND_NONNEGATIVE,
    KIND_NONPOSITIVE,
    DomainInterval,
    EvaluableFunction,
    shifted_function,
)
from .lovasz import sorted_view
from .numeric import DEFAULT_SAMPLES, DEFAULT_TOLERANCE, SampleSpec, Tolerance
from .setfunc import scaled_indicator

MAX_DECOMPOSITION_ARITY = 8


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Violation:
    """One witness: inputs, both sides of the identity, and their gap."""

    x: tuple[float, ...]
    x_prime: tuple[float, ...] | None
    c: float | None
    lhs: float
    rhs: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "x": list(self.x),
            "x_prime": None if self.x_prime is None else list(self.x_prime),
            "c": self.c,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a property check; ``passed`` iff no violations."""

    property_name: str
    passed: bool
    samples_tested: int
    seed: int
    tolerance: Tolerance
    violations: tuple[Violation, ...]
    normalized: bool = False

    def to_dict(self) -> dict:
        return {
            "property": self.property_name,
            "passed": self.passed,
            "samples": self.samples_tested,
            "seed": self.seed,
            "tolerance": self.tolerance.to_dict(),
            "normalized": self.normalized,
            "violations": [w.to_dict() for w in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class _Collector:
    """Accumulates violations in sample order and re-verifies them.

    ``values`` maps a stored witness back to (lhs, rhs); before the
    report is emitted every witness is recomputed and must still show a
    gap above tolerance, so no stale or copy-mangled witness can leak
    into a report.
    """

    def __init__(self, tol: Tolerance, values: Callable):
        self.tol = tol
        self.values = values
        self.witnesses: list[tuple] = []
        self.tested = 0

    def test(self, x, x_prime, c) -> None:
        self.tested += 1
        lhs, rhs = self.values(x, x_prime, c)
        if not self.tol.close(lhs, rhs):
            self.witnesses.append((x, x_prime, c))

    def report(self, name: str, seed: int, normalized: bool = False) -> CheckReport:
        checked = []
        for x, x_prime, c in self.witnesses:
            lhs, rhs = self.values(x, x_prime, c)
            gap = self.tol.gap(lhs, rhs)
            if gap <= self.tol.bound(lhs, rhs):
                raise RuntimeError("witness failed re-evaluation; checker inconsistency")
            checked.append(Violation(tuple(x), None if x_prime is None else tuple(x_prime), c, lhs, rhs, gap))
        return CheckReport(
            property_name=name,
            passed=not checked,
            samples_tested=self.tested,
            seed=seed,
            tolerance=self.tol,
            violations=tuple(checked),
            normalized=normalized,
        )


# ---------------------------------------------------------------------------
# tuple utilities and sampling


def threshold_upper(x: Sequence[float], c: float) -> tuple[float, ...]:
    """[x]_c: zero out every component <= c, keep the rest."""
    return tuple(0.0 if t <= c else float(t) for t in x)


def threshold_lower(x: Sequence[float], c: float) -> tuple[float, ...]:
    """[x]^c: zero out every component >= c, keep the rest."""
    return tuple(0.0 if t >= c else float(t) for t in x)


def tuple_meet(x: Sequence[float], y: Sequence[float]) -> tuple[float, ...]:
    return tuple(a if a < b else b for a, b in zip(x, y))


def tuple_join(x: Sequence[float], y: Sequence[float]) -> tuple[float, ...]:
    return tuple(a if a > b else b for a, b in zip(x, y))


def are_comonotonic(x: Sequence[float], y: Sequence[float]) -> bool:
    """True iff some permutation sorts both tuples nondecreasingly."""
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            if (x[i] - x[j]) * (y[i] - y[j]) < 0.0:
                return False
    return True


def _uniform(rng: random.Random, lo: float, hi: float) -> float:
    return lo + (hi - lo) * rng.random()


def _box_tuple(rng: random.Random, n: int, lo: float, hi: float) -> tuple[float, ...]:
    return tuple(_uniform(rng, lo, hi) for _ in range(n))


def _random_permutation(rng: random.Random, n: int) -> tuple[int, ...]:
    keys = [rng.random() for _ in range(n)]
    return tuple(sorted(range(n), key=keys.__getitem__))


def _cone_tuple(rng: random.Random, sigma: Sequence[int], lo: float, hi: float) -> tuple[float, ...]:
    ascending = sorted(_uniform(rng, lo, hi) for _ in sigma)
    out = [0.0] * len(sigma)
    for k, pos in enumerate(sigma):
        out[pos] = ascending[k]
    return tuple(out)


def sample_comonotonic_pairs(
    n: int, domain, count: int, seed: int
) -> list[tuple[tuple[float, ...], tuple[float, ...], tuple[int, ...]]]:
    """Seeded comonotonic pairs (x, x', sigma) in the given box.

    sigma is drawn uniformly, then two independent uniform tuples are
    sorted into its cone, so both share sigma (0-based positions) as a
    sorting permutation.  Deterministic for a fixed seed.
    """
    if isinstance(domain, DomainInterval):
        lo, hi = domain.lo, domain.hi
    else:
        lo, hi = domain
    rng = random.Random(seed)
    pairs = []
    for _ in range(max(0, count)):
        sigma = _random_permutation(rng, n)
        x = _cone_tuple(rng, sigma, lo, hi)
        x_prime = _cone_tuple(rng, sigma, lo, hi)
        pairs.append((x, x_prime, sigma))
    return pairs


def _level_candidates(x: Sequence[float], lo: float, hi: float) -> list[float]:
    # piecewise-affine aggregation functions can only bend at coordinate
    # levels, so probe those, the midpoints between them, and the ends
    levels = sorted(set(x))
    cands = set(levels)
    for a, b in zip(levels, levels[1:]):
        cands.add((a + b) / 2.0)
    cands.add(lo)
    cands.add(hi)
    return sorted(cands)


def _normalizer(f: EvaluableFunction):
    base = f.at_zero()

    def f0(x: tuple[float, ...]) -> float:
        return f(x) - base

    return f0


# ---------------------------------------------------------------------------
# checkers


def check_comonotonic_additivity(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f0(x + x') = f0(x) + f0(x') on comonotonic pairs from the half box.

    Pairs come from the half box so the sum stays inside the domain;
    the identity is checked on f0 = f - f(0) (recorded via the report's
    ``normalized`` flag).
    """
    f0 = _normalizer(f)
    half = f.domain.half()

    def values(x, x_prime, _c):
        s = tuple(a + b for a, b in zip(x, x_prime))
        return f0(s), f0(x) + f0(x_prime)

    col = _Collector(tol, values)
    for x, x_prime, _sigma in sample_comonotonic_pairs(f.arity, half, samples, seed):
        col.test(x, x_prime, None)
    return col.report("comonotonic-additivity", seed, normalized=True)


def check_horizontal_min_additivity(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f0(x) = f0(x ^ c) + f0(x - x ^ c) over sampled (x, c).

    ``samples`` counts (x, c) tests.  On boxes with a negative end the
    cut level is restricted to c >= max(x) - hi so the residual tuple
    stays inside the declared box.
    """
    f0 = _normalizer(f)
    dom = f.domain
    rng = random.Random(seed)

    def values(x, _xp, c):
        cut = tuple(t if t < c else c for t in x)
        residual = tuple(t - u for t, u in zip(x, cut))
        return f0(x), f0(cut) + f0(residual)

    col = _Collector(tol, values)
    while col.tested < samples:
        x = _box_tuple(rng, f.arity, dom.lo, dom.hi)
        c_lo = max(dom.lo, max(x) - dom.hi)
        for c in _level_candidates(x, dom.lo, dom.hi):
            if col.tested >= samples:
                break
            if c < c_lo:
                continue
            col.test(x, None, c)
    return col.report("horizontal-min-additivity", seed, normalized=True)


def _modularity_values(f: EvaluableFunction):
    def values(x, x_prime, _c):
        lhs = f(x) + f(x_prime)
        rhs = f(tuple_meet(x, x_prime)) + f(tuple_join(x, x_prime))
        return lhs, rhs

    return values


def check_comonotonic_modularity(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f(x) + f(x') = f(x ^ x') + f(x v x') on comonotonic pairs."""
    col = _Collector(tol, _modularity_values(f))
    for x, x_prime, _sigma in sample_comonotonic_pairs(f.arity, f.domain, samples, seed):
        col.test(x, x_prime, None)
    return col.report("comonotonic-modularity", seed)


def check_modularity(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """The modular (valuation) identity on unrestricted pairs."""
    rng = random.Random(seed)
    dom = f.domain
    col = _Collector(tol, _modularity_values(f))
    for _ in range(samples):
        x = _box_tuple(rng, f.arity, dom.lo, dom.hi)
        x_prime = _box_tuple(rng, f.arity, dom.lo, dom.hi)
        col.test(x, x_prime, None)
    return col.report("modularity", seed)


def check_invariance_horizontal_min_differences(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f(x) - f(x ^ c) = f([x]_c) - f([x]_c ^ c) on nonnegative boxes."""
    if f.domain.kind != KIND_NONNEGATIVE:
        raise DomainKindUnsupported(
            f"horizontal min-difference invariance needs a nonnegative domain, got {f.domain.kind}"
        )
    dom = f.domain
    rng = random.Random(seed)

    def values(x, _xp, c):
        cut = tuple(t if t < c else c for t in x)
        thr = threshold_upper(x, c)
        thr_cut = tuple(t if t < c else c for t in thr)
        return f(x) - f(cut), f(thr) - f(thr_cut)

    col = _Collector(tol, values)
    while col.tested < samples:
        x = _box_tuple(rng, f.arity, dom.lo, dom.hi)
        for c in _level_candidates(x, dom.lo, dom.hi):
            if col.tested >= samples:
                break
            col.test(x, None, c)
    return col.report("horizontal-min-difference-invariance", seed)


def check_invariance_horizontal_max_differences(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f(x) - f(x v c) = f([x]^c) - f([x]^c v c) on nonpositive boxes.

    Samples are generated as exact mirrors of the min-difference
    sampler's, so running the min-difference checker on x -> f(-x) with
    the same seed probes the bitwise-identical point set; the two
    reports must agree witness for witness.
    """
    if f.domain.kind != KIND_NONPOSITIVE:
        raise DomainKindUnsupported(
            f"horizontal max-difference invariance needs a nonpositive domain, got {f.domain.kind}"
        )
    dom = f.domain
    rng = random.Random(seed)

    def values(x, _xp, c):
        cut = tuple(t if t > c else c for t in x)
        thr = threshold_lower(x, c)
        thr_cut = tuple(t if t > c else c for t in thr)
        return f(x) - f(cut), f(thr) - f(thr_cut)

    col = _Collector(tol, values)
    while col.tested < samples:
        mirrored = _box_tuple(rng, f.arity, 0.0, -dom.lo)
        x = tuple(-t for t in mirrored)
        for d in _level_candidates(mirrored, 0.0, -dom.lo):
            if col.tested >= samples:
                break
            col.test(x, None, -d)
    return col.report("horizontal-max-difference-invariance", seed)


def check_comonotonic_maxitivity(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f(x v x') = f(x) v f(x') on comonotonic pairs."""

    def values(x, x_prime, _c):
        return f(tuple_join(x, x_prime)), max(f(x), f(x_prime))

    col = _Collector(tol, values)
    for x, x_prime, _sigma in sample_comonotonic_pairs(f.arity, f.domain, samples, seed):
        col.test(x, x_prime, None)
    return col.report("comonotonic-maxitivity", seed)


def check_comonotonic_minitivity(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f(x ^ x') = f(x) ^ f(x') on comonotonic pairs."""

    def values(x, x_prime, _c):
        return f(tuple_meet(x, x_prime)), min(f(x), f(x_prime))

    col = _Collector(tol, values)
    for x, x_prime, _sigma in sample_comonotonic_pairs(f.arity, f.domain, samples, seed):
        col.test(x, x_prime, None)
    return col.report("comonotonic-minitivity", seed)


def check_positive_negative_split(
    f: EvaluableFunction,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """f0(x) = f0(x+) + f0(-x-), the x' = 0 consequence of modularity."""
    f0 = _normalizer(f)
    dom = f.domain
    rng = random.Random(seed)

    def values(x, _xp, _c):
        pos = tuple(t if t > 0.0 else 0.0 for t in x)
        neg = tuple(t if t < 0.0 else 0.0 for t in x)
        return f0(x), f0(pos) + f0(neg)

    col = _Collector(tol, values)
    for _ in range(samples):
        col.test(_box_tuple(rng, f.arity, dom.lo, dom.hi), None, None)
    return col.report("positive-negative-split", seed, normalized=True)


def check_translation_metamorphic(
    g: EvaluableFunction,
    c: float,
    samples: int = 200,
    *,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """Comonotonic-modularity verdicts of g and x -> g(x + c 1) must match.

    The returned report passes iff the two verdicts agree; on
    disagreement the violations of whichever side failed are attached.
    """
    base = check_comonotonic_modularity(g, samples, seed=seed, tol=tol)
    translated = check_comonotonic_modularity(
        shifted_function(g, c), samples, seed=seed, tol=tol
    )
    agree = base.passed == translated.passed
    violations = () if agree else (base.violations or translated.violations)
    return CheckReport(
        property_name="translation-metamorphic",
        passed=agree,
        samples_tested=base.samples_tested + translated.samples_tested,
        seed=seed,
        tolerance=tol,
        violations=violations,
    )


# ---------------------------------------------------------------------------
# comonotonic-separable decomposition


@dataclass(frozen=True)
class SeparableDecomposition:
    """Per-permutation unary summands reconstructing f on each cone.

    For every sorting permutation sigma the tables hold n unary
    functions (tabulated on the shared axis grid) such that

        f(x) = f(0) + sum_i u_i(x_{sigma(i)})     for x in the sigma cone,

    where u_i telescopes f along scaled up-set indicators for
    nonnegative arguments and scaled down-set indicators for negative
    ones.
    """

    arity: int
    constant: float
    axis: tuple[float, ...]
    tables: dict
    max_reconstruction_error: float

    def unary_value(self, sigma: tuple[int, ...], i: int, t: float) -> float:
        return _interp(self.axis, self.tables[sigma][i], t)

    def reconstruct_with_sigma(self, x: Sequence[float], sigma: tuple[int, ...]) -> float:
        total = self.constant
        for i, pos in enumerate(sigma):
            total += self.unary_value(sigma, i, x[pos])
        return total

    def reconstruct(self, x: Sequence[float]) -> float:
        return self.reconstruct_with_sigma(x, sorted_view(x).sigma)


def _interp(axis: tuple[float, ...], vals: tuple[float, ...], t: float) -> float:
    from bisect import bisect_right

    if t < axis[0] or t > axis[-1]:
        raise ValueError(f"{t!r} outside table range [{axis[0]}, {axis[-1]}]")
    j = bisect_right(axis, t) - 1
    if j == len(axis) - 1 or t == axis[j]:
        return vals[j]
    return vals[j] + (t - axis[j]) * (vals[j + 1] - vals[j]) / (axis[j + 1] - axis[j])


def separable_decomposition(
    f: EvaluableFunction,
    grid: SampleSpec = DEFAULT_SAMPLES,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> SeparableDecomposition:
    """Build and verify the per-cone unary decomposition of f.

    The caller should have screened f for comonotonic modularity on the
    same grid (soft precondition; not enforced here).  Reconstruction is
    verified on random cone tuples drawn from the axis grid, where the
    tables are exact lookups; failure raises ReconstructionMismatch with
    the worst witness, which signals that f is not comonotonically
    modular at grid resolution.
    """
    n = f.arity
    if n > MAX_DECOMPOSITION_ARITY:
        raise ValueError(
            f"decomposition stores n!*n tables; arity {n} exceeds the cap of {MAX_DECOMPOSITION_ARITY}"
        )
    dom = f.domain
    axis = tuple(grid.axis_points(dom.lo, dom.hi))
    constant = f.at_zero()

    ray_cache: dict[tuple[float, int], float] = {}

    def on_ray(t: float, mask: int) -> float:
        key = (t, mask)
        if key not in ray_cache:
            ray_cache[key] = f(scaled_indicator(t, mask, n))
        return ray_cache[key]

    tables: dict[tuple[int, ...], tuple[tuple[float, ...], ...]] = {}
    for sigma in permutations(range(n)):
        up = [0] * (n + 1)
        down = [0] * (n + 1)
        for k in range(n):
            down[k + 1] = down[k] | (1 << sigma[k])
        full = down[n]
        for k in range(n + 1):
            up[k] = full ^ down[k]
        per_position = []
        for i in range(n):
            vals = []
            for t in axis:
                if t >= 0.0:
                    vals.append(on_ray(t, up[i]) - on_ray(t, up[i + 1]))
                else:
                    vals.append(on_ray(t, down[i + 1]) - on_ray(t, down[i]))
            per_position.append(tuple(vals))
        tables[sigma] = tuple(per_position)

    deco = SeparableDecomposition(n, constant, axis, tables, 0.0)

    rng = random.Random(grid.seed)
    per_sigma = max(3, grid.box_samples // max(1, len(tables)))
    worst_gap = 0.0
    worst: dict | None = None
    for sigma in tables:
        for _ in range(per_sigma):
            ascending = sorted(rng.choice(axis) for _ in range(n))
            x = [0.0] * n
            for k, pos in enumerate(sigma):
                x[pos] = ascending[k]
            x = tuple(x)
            expect = f(x)
            got = deco.reconstruct_with_sigma(x, sigma)
            gap = tol.gap(expect, got)
            if gap > worst_gap:
                worst_gap = gap
                worst = {"x": list(x), "lhs": expect, "rhs": got, "gap": gap}
            if not tol.close(expect, got):
                raise ReconstructionMismatch(
                    "cone reconstruction disagrees with the function", worst
                )
    return SeparableDecomposition(n, constant, axis, tables, worst_gap)
