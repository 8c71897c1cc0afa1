"""Lovász extensions, the discrete Choquet integral, and the symmetric
(Šipoš) extension.

The Lovász extension L of a pseudo-Boolean function given by a set
function v is the unique continuous function that is affine on every
sorting cone {x : x_{sigma(1)} <= ... <= x_{sigma(n)}} and agrees with v
at the 0/1 vertex tuples.  Five evaluation routes are provided:

* :func:`lovasz_eval_mobius`   - min-form over the Möbius coefficients,
  a(empty) + sum_{A nonempty} a(A) min_{i in A} x_i;
* :func:`lovasz_eval_sorted`   - the affine expression on the cone of a
  sorting permutation (the production path; its telescoped form keeps
  vertex values exact);
* :func:`lovasz_eval_descending` - the same affine piece written over
  down-sets and the values of L at negated indicator tuples;
* :func:`lovasz_eval_maxform`  - max-form over the Möbius coefficients
  of the dual set function;
* :func:`lovasz_eval_split`    - positive/negative part split through
  the dual.

All routes agree up to floating-point noise; the cross-checks are part
of the test suite.  The Choquet integral is the sorted evaluation
gated by a capacity check, and the symmetric extension is
check_L(x) = v(empty) + L(x+) - L(x-) with x+ = x v 0, x- = (-x)+.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import ArityMismatch
from .setfunc import (
    MobiusCoefficients,
    SetFunction,
    _check_arity,
    dual,
    maxima_over_masks,
    minima_over_masks,
    mobius_transform,
    require_capacity,
)


@dataclass(frozen=True)
class SortedView:
    """A tuple together with its nondecreasing sorting data.

    sigma is the 0-based stable sorting permutation (ties keep ascending
    original index): x[sigma[0]] <= ... <= x[sigma[n-1]].  For k in
    0..n, up_masks[k] is the bitmask of positions sigma[k:], so the
    1-based up-set A_up(i) of the affine form is up_masks[i-1], with
    up_masks[n] = 0; down_masks[k] is the bitmask of sigma[:k], with
    down_masks[0] = 0.  split_p counts strictly negative coordinates,
    i.e. x[sigma[split_p - 1]] < 0 <= x[sigma[split_p]].
    """

    x: tuple[float, ...]
    sigma: tuple[int, ...]
    up_masks: tuple[int, ...]
    down_masks: tuple[int, ...]
    split_p: int

    @property
    def n(self) -> int:
        return len(self.x)


def sorted_view(x: Sequence[float]) -> SortedView:
    """Sorting permutation, nested up/down sets and the sign split of x."""
    xs = tuple(float(t) for t in x)
    n = len(xs)
    sigma = tuple(sorted(range(n), key=xs.__getitem__))
    down = [0] * (n + 1)
    for k in range(n):
        down[k + 1] = down[k] | (1 << sigma[k])
    full = down[n]
    up = tuple(full ^ d for d in down)
    p = sum(1 for t in xs if t < 0.0)
    return SortedView(xs, sigma, up, tuple(down), p)


def _validated_sigma(x: Sequence[float], sigma: Sequence[int]) -> tuple[int, ...]:
    n = len(x)
    sig = tuple(sigma)
    if sorted(sig) != list(range(n)):
        raise ValueError(f"{sig!r} is not a permutation of range({n})")
    for a, b in zip(sig, sig[1:]):
        if x[a] > x[b]:
            raise ValueError(f"permutation {sig!r} does not sort {tuple(x)!r} nondecreasingly")
    return sig


def lovasz_eval_sorted(
    v: SetFunction, x: Sequence[float], sigma: Sequence[int] | None = None
) -> float:
    """Affine-on-cone evaluation of the Lovász extension.

    Telescoped as v(empty)(1 - x_max) + sum_i (x_{sigma(i)} -
    x_{sigma(i-1)}) v(A_up(i)) with x_{sigma(0)} = 0, which is the same
    affine function but reproduces v exactly at 0/1 vertex tuples (every
    increment there is exactly 0 or 1).  A caller-supplied ``sigma``
    must sort x nondecreasingly; any valid choice gives the same value
    because adjacent affine pieces agree on shared faces.
    """
    n = v.n
    _check_arity(n, x)
    if sigma is None:
        sig = sorted(range(n), key=lambda i: x[i])
    else:
        sig = list(_validated_sigma(x, sigma))
    values = v.values
    mask = v.full_mask
    total = values[0] * (1.0 - x[sig[-1]])
    prev = 0.0
    for i in sig:
        xi = x[i]
        total += (xi - prev) * values[mask]
        mask &= ~(1 << i)
        prev = xi
    return total


def lovasz_eval_mobius(a: MobiusCoefficients, x: Sequence[float]) -> float:
    """Min-form: a(empty) + sum over nonempty A of a(A) min_{i in A} x_i."""
    _check_arity(a.n, x)
    mins = minima_over_masks(x, a.n)
    coeffs = a.coeffs
    total = coeffs[0]
    for m in range(1, len(coeffs)):
        total += coeffs[m] * mins[m]
    return total


def lovasz_eval_descending(v: SetFunction, x: Sequence[float]) -> float:
    """Down-set telescoping through the values of L at -1_B tuples.

    Uses L(-1_B) = v(empty) + v(full \\ B) - v(full) and sums
    x_{sigma(i)} (L(-1_{A_down(i-1)}) - L(-1_{A_down(i)})) literally.
    """
    n = v.n
    _check_arity(n, x)
    sv = sorted_view(x)
    values = v.values
    full = v.full_mask
    psi0 = values[0]

    def at_negated(down_mask: int) -> float:
        return psi0 + values[full ^ down_mask] - values[full]

    total = psi0
    for i in range(n):
        prev = at_negated(sv.down_masks[i])
        total += x[sv.sigma[i]] * (prev - at_negated(sv.down_masks[i + 1]))
    return total


@lru_cache(maxsize=128)
def _dual_mobius(v: SetFunction) -> MobiusCoefficients:
    return mobius_transform(dual(v))


def lovasz_eval_maxform(v: SetFunction, x: Sequence[float]) -> float:
    """Max-form: v(empty) + sum over nonempty A of a_dual(A) max_{i in A} x_i.

    The empty-set coefficient of the dual's Möbius transform equals
    v(empty) and is carried by the leading constant, so the formula
    matches the min-form identically at vertex tuples.
    """
    _check_arity(v.n, x)
    a_dual = _dual_mobius(v)
    maxs = maxima_over_masks(x, v.n)
    total = v.values[0]
    coeffs = a_dual.coeffs
    for m in range(1, len(coeffs)):
        total += coeffs[m] * maxs[m]
    return total


def positive_part(x: Sequence[float]) -> tuple[float, ...]:
    return tuple(t if t > 0.0 else 0.0 for t in x)


def negative_part(x: Sequence[float]) -> tuple[float, ...]:
    """(-x)+ componentwise, so x = x+ - x- with both parts nonnegative."""
    return tuple(-t if t < 0.0 else 0.0 for t in x)


def lovasz_eval_split(v: SetFunction, x: Sequence[float]) -> float:
    """Sign-split route: v(empty) + L_v(x+) - L_dual(x-)."""
    _check_arity(v.n, x)
    vd = dual(v)
    return (
        v.values[0]
        + lovasz_eval_sorted(v, positive_part(x))
        - lovasz_eval_sorted(vd, negative_part(x))
    )


def choquet_integral(v: SetFunction, x: Sequence[float], tol: float = 1e-12) -> float:
    """Discrete Choquet integral: sorted evaluation gated by a capacity check.

    Raises :class:`~lovagg.errors.NotACapacity` (reporting the violating
    covering pair) when v is not grounded and monotone within ``tol``;
    the monotonicity guarantee of the output depends on that check, so
    it is a hard error rather than a warning.
    """
    require_capacity(v, tol)
    return lovasz_eval_sorted(v, x)


def symmetric_lovasz_eval(v: SetFunction, x: Sequence[float]) -> float:
    """Symmetric (Šipoš) extension: v(empty) + L(x+) - L(x-), same v twice.

    Subtracting v(empty) leaves an odd function of x.
    """
    _check_arity(v.n, x)
    return (
        v.values[0]
        + lovasz_eval_sorted(v, positive_part(x))
        - lovasz_eval_sorted(v, negative_part(x))
    )


def symmetric_lovasz_piecewise(v: SetFunction, x: Sequence[float]) -> float:
    """Piecewise form of the symmetric extension on the sorting cone.

    Splits at the sign change index p: down-set increments for the
    strictly negative positions, up-set increments for the rest.  Agrees
    with :func:`symmetric_lovasz_eval` up to floating-point noise and is
    kept as an independent cross-check route.
    """
    n = v.n
    _check_arity(n, x)
    sv = sorted_view(x)
    values = v.values
    total = values[0]
    for i in range(sv.split_p):
        total += x[sv.sigma[i]] * (values[sv.down_masks[i + 1]] - values[sv.down_masks[i]])
    for i in range(sv.split_p, n):
        total += x[sv.sigma[i]] * (values[sv.up_masks[i]] - values[sv.up_masks[i + 1]])
    return total
