"""Utility-transformed extensions and their canonical factorization.

A quasi-Lovász extension is f = L o phi: apply a nondecreasing inner
map phi with phi(0) = 0 to every coordinate, then a Lovász extension.
The symmetric variant composes the Šipoš extension with an odd phi.
This module evaluates such compositions, decides weak/odd homogeneity
of black boxes by sampling, recovers the canonical inner function

    phi_f(x) = f0(x 1_{A*}) / f0(1_{A*})

from vertex rays, factorizes f into (psi, phi_f) with a verified
reconstruction, and checks that any user-supplied factorization is the
canonical one up to a positive scale a (phi = a phi_f, centered vertex
table scaled by 1/a).

Lattice polynomial (weighted min-max, Sugeno-type) evaluation and its
phi-composed quasi-polynomial variant live here too: they are the other
factorizable family the checkers exercise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .axioms import CheckReport, Violation, _Collector, check_comonotonic_modularity
from .errors import (
    DomainKindUnsupported,
    DomainNotCentered,
    NoWitnessSubset,
    NotProportional,
    PhiNotOdd,
    ReconstructionMismatch,
)
from .functions import (
    KIND_CENTERED,
    KIND_GENERAL,
    KIND_NONNEGATIVE,
    KIND_NONPOSITIVE,
    DomainInterval,
    EvaluableFunction,
    UtilityFunction,
    _as_interval,
)
from .lovasz import lovasz_eval_sorted, symmetric_lovasz_eval
from .numeric import DEFAULT_SAMPLES, DEFAULT_TOLERANCE, SampleSpec, Tolerance
from .setfunc import (
    SetFunction,
    _check_arity,
    maxima_over_masks,
    minima_over_masks,
    scaled_indicator,
    subset_indicator,
)

# ---------------------------------------------------------------------------
# composed evaluation


def quasi_lovasz_eval(
    v: SetFunction, phi: UtilityFunction, x: Sequence[float]
) -> float:
    """L_v(phi(x_1), ..., phi(x_n))."""
    _check_arity(v.n, x)
    return lovasz_eval_sorted(v, phi.map_tuple(x))


def symmetric_quasi_lovasz_eval(
    v: SetFunction, phi: UtilityFunction, x: Sequence[float]
) -> float:
    """check_L_v applied to the phi-transformed tuple; phi must be odd."""
    _check_arity(v.n, x)
    if not phi.odd:
        raise PhiNotOdd("the symmetric composition needs an odd inner function")
    if phi.domain.kind != KIND_CENTERED:
        raise DomainNotCentered("the inner function's domain must be symmetric about 0")
    return symmetric_lovasz_eval(v, phi.map_tuple(x))


def lattice_polynomial_eval(c: SetFunction, x: Sequence[float]) -> float:
    """Weighted min-max normal form with the empty-set entry as a floor:

        p(x) = c(empty) v max over nonempty A of ( c(A) ^ min_{i in A} x_i ),

    so p(0 or below every threshold) = c(empty).  Nondecreasing in every
    coordinate and in every coefficient.
    """
    _check_arity(c.n, x)
    mins = minima_over_masks(x, c.n)
    best = c.values[0]
    for m in range(1, len(c.values)):
        term = min(c.values[m], mins[m])
        if term > best:
            best = term
    return best


def quasi_polynomial_eval(
    c: SetFunction, phi: UtilityFunction, x: Sequence[float]
) -> float:
    """Lattice polynomial after the inner map: p(phi(x_1), ..., phi(x_n))."""
    _check_arity(c.n, x)
    return lattice_polynomial_eval(c, phi.map_tuple(x))


# ---------------------------------------------------------------------------
# black-box builders (the EvaluableFunction composition specs)


def _domain_for(phi: UtilityFunction | None, domain) -> DomainInterval:
    if phi is None:
        if domain is None:
            raise ValueError("a composition without an inner function needs an explicit domain")
        return _as_interval(domain)
    pd = phi.domain
    if domain is None:
        return pd
    dom = _as_interval(domain)
    if dom.lo < pd.lo or dom.hi > pd.hi:
        raise ValueError(
            f"declared domain [{dom.lo}, {dom.hi}] exceeds the inner function's [{pd.lo}, {pd.hi}]"
        )
    return dom


def _phi_provenance(kind: str, phi: UtilityFunction | None) -> dict:
    prov: dict = {"type": kind}
    if phi is not None:
        prov["phi_breakpoints"] = tuple(x for x, _ in phi.breakpoints)
    return prov


def quasi_lovasz_function(
    v: SetFunction, phi: UtilityFunction | None = None, domain=None
) -> EvaluableFunction:
    """f = L_v o phi as a black box (phi omitted: plain Lovász extension)."""
    dom = _domain_for(phi, domain)
    if phi is None:
        ev = lambda x: lovasz_eval_sorted(v, x)
    else:
        ev = lambda x: quasi_lovasz_eval(v, phi, x)
    return EvaluableFunction(v.n, dom, ev, provenance=_phi_provenance("quasi_lovasz", phi))


def symmetric_quasi_lovasz_function(
    v: SetFunction, phi: UtilityFunction | None = None, domain=None
) -> EvaluableFunction:
    """f = check_L_v o phi as a black box (phi omitted: plain Šipoš)."""
    dom = _domain_for(phi, domain)
    if dom.kind != KIND_CENTERED:
        raise DomainNotCentered("a symmetric composition needs a centered domain")
    if phi is None:
        ev = lambda x: symmetric_lovasz_eval(v, x)
    else:
        if not phi.odd:
            raise PhiNotOdd("the symmetric composition needs an odd inner function")
        ev = lambda x: symmetric_quasi_lovasz_eval(v, phi, x)
    return EvaluableFunction(
        v.n, dom, ev, provenance=_phi_provenance("symmetric_quasi_lovasz", phi)
    )


def quasi_polynomial_function(
    c: SetFunction, phi: UtilityFunction | None = None, domain=None
) -> EvaluableFunction:
    """f = p_c o phi as a black box (phi omitted: plain lattice polynomial)."""
    dom = _domain_for(phi, domain)
    if phi is None:
        ev = lambda x: lattice_polynomial_eval(c, x)
    else:
        ev = lambda x: quasi_polynomial_eval(c, phi, x)
    return EvaluableFunction(c.n, dom, ev, provenance=_phi_provenance("quasi_polynomial", phi))


_BUILTINS = {
    "product": lambda x: _product(x),
    "min": lambda x: min(x),
    "max": lambda x: max(x),
}


def _product(x: Sequence[float]) -> float:
    out = 1.0
    for t in x:
        out *= t
    return out


def builtin_function(name: str, n: int, domain) -> EvaluableFunction:
    """Counterexample generators: product, min, max."""
    if name not in _BUILTINS:
        raise ValueError(f"unknown builtin {name!r}; choose from {sorted(_BUILTINS)}")
    return EvaluableFunction(
        n, _as_interval(domain), _BUILTINS[name], provenance={"type": "builtin", "name": name}
    )


def tabulated_function(
    n: int, grid: Sequence[float], values: Sequence[float], domain=None
) -> EvaluableFunction:
    """Multilinear interpolation of samples on the grid^n lattice.

    ``values`` is row-major: index sum_k idx_k * m^(n-1-k) for axis
    indices idx_k into ``grid`` (m = len(grid)).
    """
    axis = tuple(float(t) for t in grid)
    if len(axis) < 2 or any(a >= b for a, b in zip(axis, axis[1:])):
        raise ValueError("grid must be strictly increasing with at least two points")
    table = tuple(float(t) for t in values)
    if len(table) != len(axis) ** n:
        raise ValueError(f"need {len(axis) ** n} values, got {len(table)}")
    dom = _as_interval(domain) if domain is not None else DomainInterval(axis[0], axis[-1])
    m = len(axis)
    from bisect import bisect_right

    def interpolate(x: tuple[float, ...]) -> float:
        cells = []
        for t in x:
            j = min(max(bisect_right(axis, t) - 1, 0), m - 2)
            w = (t - axis[j]) / (axis[j + 1] - axis[j])
            cells.append((j, w))
        total = 0.0
        for corner in range(1 << n):
            weight = 1.0
            flat = 0
            for k in range(n):
                j, w = cells[k]
                hi = (corner >> k) & 1
                weight *= w if hi else 1.0 - w
                flat = flat * m + j + hi
            if weight:
                total += weight * table[flat]
        return total

    return EvaluableFunction(n, dom, interpolate, provenance={"type": "tabulated"})


# ---------------------------------------------------------------------------
# homogeneity checking and inner-function recovery


def _vertex_rays(f: EvaluableFunction, sign: float):
    """f0 on the reference vertices sign*1_A for all masks, plus f(0)."""
    base = f.at_zero()
    n = f.arity
    refs = [f(scaled_indicator(sign, mask, n)) - base for mask in range(1 << n)]
    return base, refs


def _pick_witness(refs: Sequence[float], threshold: float) -> int | None:
    """Smallest cardinality, then smallest mask, with |f0(ref)| > threshold."""
    order = sorted(range(len(refs)), key=lambda m: (m.bit_count(), m))
    for mask in order:
        if mask and abs(refs[mask]) > threshold:
            return mask
    return None


def _homogeneity_grid(f: EvaluableFunction, grid: SampleSpec, side: str) -> list[float]:
    dom = f.domain
    if side == "nonnegative":
        return grid.axis_points(0.0, dom.hi)
    if side == "nonpositive":
        return grid.axis_points(dom.lo, 0.0)
    return grid.axis_points(dom.lo, dom.hi)


def _ray_ratio_check(
    f: EvaluableFunction,
    grid_points: list[float],
    tol: Tolerance,
    *,
    sign: float,
    seed: int,
    name: str,
    enforce_odd: bool = False,
) -> tuple[CheckReport, UtilityFunction | None]:
    """Shared engine for the weak/odd homogeneity checkers.

    Builds the candidate inner map from the first usable reference ray,
    then verifies the defining identity on every (grid point, subset)
    pair, plus monotonicity (and oddness when requested) of the
    candidate.  With no usable reference the function is homogeneous
    iff every sampled ray value of f0 vanishes.
    """
    n = f.arity
    base, refs = _vertex_rays(f, sign)
    witness_mask = _pick_witness(refs, tol.absolute)
    size = 1 << n

    def ray_value(t: float, mask: int) -> float:
        return f(scaled_indicator(t, mask, n)) - base

    if witness_mask is None:
        # identity forces f0 = 0 on all rays; verify that
        def values(x, _xp, _c):
            return f(x) - base, 0.0

        col = _Collector(tol, values)
        for t in grid_points:
            for mask in range(size):
                col.test(scaled_indicator(t, mask, n), None, t)
        report = col.report(name, seed, normalized=True)
        return report, None

    denom = refs[witness_mask]
    # candidate(x) = f0(x 1_A*)/f0(1_A*) on the nonnegative/centered side
    # and -f0(x 1_A*)/f0(-1_A*) on the nonpositive side (whose defining
    # identity is f0(x 1_A) = -phi(x) f0(-1_A))
    flip = 1.0 if sign > 0.0 else -1.0

    def candidate(t: float) -> float:
        return flip * ray_value(t, witness_mask) / denom
    def values(x, x_prime, c):
        # x is the scaled ray tuple, x_prime the reference vertex, c the scalar
        mask = _mask_of_indicator(x_prime)
        lhs = ray_value(c, mask)
        rhs = (1.0 if sign > 0 else -1.0) * candidate(c) * refs[mask]
        return lhs, rhs

    col = _Collector(tol, values)
    for t in grid_points:
        for mask in range(size):
            col.test(
                scaled_indicator(t, mask, n), subset_indicator(mask, n), t
            )
    report = col.report(name, seed, normalized=True)

    extra: list[Violation] = []
    phi_values = [candidate(t) for t in grid_points]
    for (t0, y0), (t1, y1) in zip(
        zip(grid_points, phi_values), zip(grid_points[1:], phi_values[1:])
    ):
        if y1 < y0 and not tol.close(y0, y1):
            extra.append(
                Violation((t0, t1), None, None, y0, y1, tol.gap(y0, y1))
            )
    if enforce_odd:
        for t, y in zip(grid_points, phi_values):
            if t <= 0.0:
                continue
            y_neg = candidate(-t)
            if not tol.close(y_neg, -y):
                extra.append(Violation((t,), None, -t, y_neg, -y, tol.gap(y_neg, -y)))

    if extra:
        report = CheckReport(
            property_name=report.property_name,
            passed=False,
            samples_tested=report.samples_tested + len(extra),
            seed=seed,
            tolerance=tol,
            violations=report.violations + tuple(extra),
            normalized=True,
        )
    if not report.passed:
        return report, None

    phi = _utility_from_samples(grid_points, phi_values, tol, odd=enforce_odd)
    return report, phi


def _mask_of_indicator(indicator: Sequence[float]) -> int:
    mask = 0
    for i, t in enumerate(indicator):
        if t != 0.0:
            mask |= 1 << i
    return mask


def _utility_from_samples(
    xs: Sequence[float], ys: Sequence[float], tol: Tolerance, odd: bool
) -> UtilityFunction:
    """Monotone-snap sub-tolerance float dust, then build the table.

    A drop beyond tolerance means no nondecreasing inner function fits,
    which is a reconstruction failure, not a numeric artifact.
    """
    snapped = list(map(float, ys))
    for k in range(1, len(snapped)):
        if snapped[k] < snapped[k - 1]:
            if not tol.close(snapped[k], snapped[k - 1]):
                raise ReconstructionMismatch(
                    "recovered inner function is not nondecreasing",
                    {"x": [xs[k]], "lhs": snapped[k - 1], "rhs": snapped[k],
                     "gap": snapped[k - 1] - snapped[k]},
                )
            snapped[k] = snapped[k - 1]
    if 0.0 in xs:
        snapped[list(xs).index(0.0)] = 0.0
    if odd:
        # store exact negation pairs; asymmetry above tol was already caught
        table = dict(zip(xs, snapped))
        sym = {}
        for x, y in table.items():
            if x >= 0.0:
                mirrored = table.get(-x, -y)
                centered = (y - mirrored) / 2.0
                sym[x] = centered
                sym[-x] = -centered
        pts = sorted(sym.items())
        return UtilityFunction(tuple(pts), odd=True)
    return UtilityFunction.from_samples(xs, snapped, odd=False)


def check_weak_homogeneity(
    f: EvaluableFunction,
    grid: SampleSpec = DEFAULT_SAMPLES,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[CheckReport, UtilityFunction | None]:
    """Does some nondecreasing phi with phi(0)=0 satisfy the ray identity?

    Nonnegative domains test f0(x 1_A) = phi(x) f0(1_A); nonpositive
    domains the mirrored f0(x 1_A) = -phi(x) f0(-1_A).  Applied to
    f0 = f - f(0).  Returns the report and, on pass, the recovered
    candidate (None when the pass is trivial).
    """
    kind = f.domain.kind
    if kind == KIND_NONNEGATIVE:
        if f.domain.hi < 1.0:
            raise DomainKindUnsupported("weak homogeneity needs 1 in the domain")
        pts = _homogeneity_grid(f, grid, "nonnegative")
        return _ray_ratio_check(
            f, pts, tol, sign=1.0, seed=grid.seed, name="weak-homogeneity"
        )
    if kind == KIND_NONPOSITIVE:
        if f.domain.lo > -1.0:
            raise DomainKindUnsupported("weak homogeneity needs -1 in the domain")
        pts = _homogeneity_grid(f, grid, "nonpositive")
        return _ray_ratio_check(
            f, pts, tol, sign=-1.0, seed=grid.seed, name="weak-homogeneity"
        )
    raise DomainKindUnsupported(
        f"weak homogeneity is defined on nonnegative or nonpositive domains, got {kind}"
    )


def check_odd_homogeneity(
    f: EvaluableFunction,
    grid: SampleSpec = DEFAULT_SAMPLES,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[CheckReport, UtilityFunction | None]:
    """Like weak homogeneity, with an odd nondecreasing candidate on a
    centered domain containing [-1, 1]."""
    if f.domain.kind != KIND_CENTERED:
        raise DomainNotCentered(
            f"odd homogeneity needs a centered domain, got {f.domain.kind}"
        )
    if f.domain.hi < 1.0:
        raise DomainNotCentered("odd homogeneity needs [-1, 1] inside the domain")
    pts = _homogeneity_grid(f, grid, "centered")
    return _ray_ratio_check(
        f, pts, tol, sign=1.0, seed=grid.seed, name="odd-homogeneity", enforce_odd=True
    )


def recover_inner_function(
    f: EvaluableFunction,
    grid: SampleSpec = DEFAULT_SAMPLES,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[UtilityFunction, int]:
    """Tabulate the canonical inner function from the witness ray.

    Returns (phi_f, witness mask A*).  phi_f(1) = 1 on nonnegative and
    centered domains, phi_f(-1) = -1 on nonpositive ones, both exact by
    construction.  Raises NoWitnessSubset when every reference vertex
    ray of f0 vanishes.
    """
    kind = f.domain.kind
    if kind == KIND_GENERAL:
        raise DomainKindUnsupported(
            "inner-function recovery needs a nonnegative, nonpositive or centered domain"
        )
    sign = -1.0 if kind == KIND_NONPOSITIVE else 1.0
    base, refs = _vertex_rays(f, sign)
    witness_mask = _pick_witness(refs, tol.absolute)
    if witness_mask is None:
        raise NoWitnessSubset(
            "every vertex-ray value of f0 vanishes; no normalizable factorization exists"
        )
    denom = refs[witness_mask]
    n = f.arity

    side = {
        KIND_NONNEGATIVE: "nonnegative",
        KIND_NONPOSITIVE: "nonpositive",
        KIND_CENTERED: "centered",
    }[kind]
    pts = sorted(set(_homogeneity_grid(f, grid, side)) | set(f.inner_breakpoints()))

    ys = []
    for t in pts:
        ratio = (f(scaled_indicator(t, witness_mask, n)) - base) / denom
        ys.append(ratio if sign > 0 else -ratio)
    phi = _utility_from_samples(pts, ys, tol, odd=(kind == KIND_CENTERED))
    return phi, witness_mask


# ---------------------------------------------------------------------------
# factorization


@dataclass(frozen=True)
class Factorization:
    """Canonical factorization f = L_psi o phi (or check_L_psi o phi).

    psi is f on the reference vertex tuples, phi the canonical inner
    function (phi(1) = 1, or phi(-1) = -1 on nonpositive domains), and
    witness_set the bitmask A* used for normalization.  ``scale``
    relates a user-supplied factorization to this one (1.0 for the
    canonical itself).
    """

    psi: SetFunction
    phi: UtilityFunction
    witness_set: int
    scale: float
    max_reconstruction_error: float
    domain_kind: str

    @property
    def symmetric(self) -> bool:
        return self.domain_kind == KIND_CENTERED


def _vertex_table(f: EvaluableFunction, kind: str) -> SetFunction:
    """The set function whose extension matches f on reference vertices."""
    n = f.arity
    size = 1 << n
    if kind in (KIND_NONNEGATIVE, KIND_CENTERED):
        return SetFunction(n, tuple(f(subset_indicator(m, n)) for m in range(size)))
    # nonpositive: solve L(-1_B) = f(-1_B) for the underlying table
    base = f.at_zero()
    full = size - 1
    neg = [f(scaled_indicator(-1.0, m, n)) - base for m in range(size)]
    w_full = -neg[full]
    return SetFunction(
        n, tuple(base + neg[full ^ a_mask] + w_full for a_mask in range(size))
    )


def canonical_factorization(
    f: EvaluableFunction,
    grid: SampleSpec = DEFAULT_SAMPLES,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Factorization:
    """Recover (psi, phi_f) and verify the reconstruction on the grid.

    Validity needs both the comonotonic-modularity screen and the
    reconstruction scan to pass: a screen failure proves f is not a
    quasi-Lovász extension even if the reconstruction grid happens to
    agree.  Reconstruction is checked on every (axis point, subset) ray
    and on ``grid.box_samples`` random tuples; the worst gap is recorded
    in the result.
    """
    kind = f.domain.kind
    if kind == KIND_GENERAL:
        raise DomainKindUnsupported(
            "factorization needs a nonnegative, nonpositive or centered domain"
        )
    phi, witness_mask = recover_inner_function(f, grid, tol)
    psi = _vertex_table(f, kind)
    n = f.arity

    if kind == KIND_CENTERED:
        recompose = lambda x: symmetric_quasi_lovasz_eval(psi, phi, x)
    else:
        recompose = lambda x: quasi_lovasz_eval(psi, phi, x)

    dom = f.domain
    worst_gap = 0.0
    worst: dict | None = None

    def probe(x: tuple[float, ...]) -> None:
        nonlocal worst_gap, worst
        expect = f(x)
        got = recompose(x)
        gap = tol.gap(expect, got)
        if gap > worst_gap:
            worst_gap = gap
            worst = {"x": list(x), "lhs": expect, "rhs": got, "gap": gap}
        if not tol.close(expect, got):
            raise ReconstructionMismatch(
                "composition does not reproduce the function", worst
            )

    axis = sorted(set(grid.axis_points(dom.lo, dom.hi)) | set(f.inner_breakpoints()))
    for t in axis:
        for mask in range(1 << n):
            probe(scaled_indicator(t, mask, n))
    rng = random.Random(grid.seed)
    for _ in range(grid.box_samples):
        probe(tuple(dom.lo + (dom.hi - dom.lo) * rng.random() for _ in range(n)))

    screen = check_comonotonic_modularity(
        f, grid.box_samples, seed=grid.seed, tol=tol
    )
    if not screen.passed:
        w = screen.violations[0]
        raise ReconstructionMismatch(
            "function fails the comonotonic-modularity screen",
            {"x": list(w.x), "lhs": w.lhs, "rhs": w.rhs, "gap": w.gap},
        )

    return Factorization(
        psi=psi,
        phi=phi,
        witness_set=witness_mask,
        scale=1.0,
        max_reconstruction_error=worst_gap,
        domain_kind=kind,
    )


def verify_factorization_uniqueness(
    l_user: SetFunction,
    phi_user: UtilityFunction,
    canonical: Factorization,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """Return the a > 0 with phi_user = a phi_f and centered tables scaled by 1/a.

    Assumes both factorizations define the same function (the caller's
    precondition).  The scale comes from the normalization point; the
    proportionality is then asserted at every canonical breakpoint and
    on all 2^n centered vertex values.  Raises NotProportional with the
    breaking point or subset.
    """
    if canonical.domain_kind == KIND_NONPOSITIVE:
        a = -phi_user(-1.0)
        where = -1.0
    else:
        a = phi_user(1.0)
        where = 1.0
    if not a > 0.0:
        raise NotProportional(
            f"user inner function at {where} gives nonpositive scale {a!r}", {"breakpoint": where}
        )
    for x, y in canonical.phi.breakpoints:
        expect = a * y
        got = phi_user(x)
        if not tol.close(got, expect):
            raise NotProportional(
                f"inner functions are not proportional: phi_user({x}) = {got!r} vs a*phi_f = {expect!r}",
                {"breakpoint": x},
            )
    can0 = canonical.psi.values[0]
    usr0 = l_user.values[0]
    for mask, (cv, uv) in enumerate(zip(canonical.psi.values, l_user.values)):
        if not tol.close(cv - can0, a * (uv - usr0)):
            raise NotProportional(
                "centered vertex tables are not proportional", {"subset": mask}
            )
    return a
