"""Set functions on the subset lattice of [n] = {1, ..., n}.

A set function v assigns a real to every subset A of [n]; equivalently it
is a pseudo-Boolean function on {0,1}^n via v(A) = value at the vertex
tuple 1_A.  Subsets are encoded as bitmasks with bit i-1 set iff element
i belongs to A (so tuple position j, 0-based, corresponds to bit j), and
every table is dense of size 2^n.

The module provides the Möbius transform

    a(A) = sum_{B subset of A} (-1)^{|A|-|B|} v(B),

its inverse zeta transform v(A) = sum_{B subset of A} a(B), the dual
v^d(A) = v(empty) + v(full) - v(complement of A), capacity validation
(grounded at the empty set and nondecreasing under inclusion), and
evaluation of the unique multilinear polynomial interpolating v on the
unit cube vertices.

Everything is immutable and pure; unrestricted concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ArityMismatch, NotACapacity

MAX_ARITY = 20

# The direct O(3^n) transform definitions stay usable up to this arity;
# beyond it the in-place fast passes take over under method="auto".
_DIRECT_ARITY_LIMIT = 10


def _validate_table(n: int, entries: tuple[float, ...], what: str) -> None:
    if not 1 <= n <= MAX_ARITY:
        raise ValueError(f"arity must be in [1, {MAX_ARITY}], got {n}")
    if len(entries) != 1 << n:
        raise ValueError(f"{what} needs exactly {1 << n} entries for n={n}, got {len(entries)}")
    for mask, t in enumerate(entries):
        if not math.isfinite(t):
            raise ValueError(f"{what} entry at mask {mask} is not finite: {t!r}")


@dataclass(frozen=True)
class SetFunction:
    """Dense table of v(A) over all 2^n subset bitmasks."""

    n: int
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(t) for t in self.values))
        _validate_table(self.n, self.values, "SetFunction")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def __getitem__(self, mask: int) -> float:
        return self.values[mask]

    def value(self, mask: int) -> float:
        return self.values[mask]


@dataclass(frozen=True)
class MobiusCoefficients:
    """Möbius transform a(A) of a set function, same index space."""

    n: int
    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(t) for t in self.coeffs))
        _validate_table(self.n, self.coeffs, "MobiusCoefficients")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def __getitem__(self, mask: int) -> float:
        return self.coeffs[mask]


def subsets_of(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, descending, ending with 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def subset_members(mask: int) -> tuple[int, ...]:
    """1-based elements of a subset bitmask, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_indicator(mask: int, n: int) -> tuple[float, ...]:
    """The vertex tuple 1_A: 1.0 at positions in A, 0.0 elsewhere."""
    if not 0 <= mask < (1 << n):
        raise ValueError(f"subset mask {mask} out of range for n={n}")
    return tuple(1.0 if (mask >> i) & 1 else 0.0 for i in range(n))


def scaled_indicator(t: float, mask: int, n: int) -> tuple[float, ...]:
    """The ray tuple t * 1_A."""
    if not 0 <= mask < (1 << n):
        raise ValueError(f"subset mask {mask} out of range for n={n}")
    t = float(t)
    return tuple(t if (mask >> i) & 1 else 0.0 for i in range(n))


def _mobius_direct(values: Sequence[float], n: int) -> tuple[float, ...]:
    out = []
    for a_mask in range(1 << n):
        card = a_mask.bit_count()
        acc = 0.0
        for b_mask in subsets_of(a_mask):
            term = values[b_mask]
            acc += term if (card - b_mask.bit_count()) % 2 == 0 else -term
        out.append(acc)
    return tuple(out)


def _zeta_direct(coeffs: Sequence[float], n: int) -> tuple[float, ...]:
    return tuple(
        math.fsum(coeffs[b] for b in subsets_of(a_mask)) for a_mask in range(1 << n)
    )


def _fast_pass(table: Sequence[float], n: int, sign: float) -> tuple[float, ...]:
    """In-place subset-lattice convolution: one +=/-= sweep per element."""
    arr = np.asarray(table, dtype=np.float64).copy().reshape((2,) * n)
    for axis in range(n):
        upper = [slice(None)] * n
        lower = [slice(None)] * n
        upper[axis], lower[axis] = 1, 0
        arr[tuple(upper)] += sign * arr[tuple(lower)]
    return tuple(arr.reshape(-1).tolist())


def _pick_method(method: str, n: int) -> str:
    if method == "auto":
        return "direct" if n <= _DIRECT_ARITY_LIMIT else "fast"
    if method not in ("direct", "fast"):
        raise ValueError(f"unknown transform method {method!r}")
    return method


def mobius_transform(v: SetFunction, method: str = "auto") -> MobiusCoefficients:
    """Inclusion-exclusion coefficients a with v(A) = sum_{B subset A} a(B).

    ``method="direct"`` evaluates the alternating-sum definition (the
    oracle, O(3^n)); ``"fast"`` runs the in-place per-element sweep
    (O(n 2^n)); ``"auto"`` picks direct up to n=10 and fast above.
    """
    if _pick_method(method, v.n) == "direct":
        return MobiusCoefficients(v.n, _mobius_direct(v.values, v.n))
    return MobiusCoefficients(v.n, _fast_pass(v.values, v.n, -1.0))


def zeta_transform(a: MobiusCoefficients, method: str = "auto") -> SetFunction:
    """Subset-sum accumulation, the inverse of :func:`mobius_transform`."""
    if _pick_method(method, a.n) == "direct":
        return SetFunction(a.n, _zeta_direct(a.coeffs, a.n))
    return SetFunction(a.n, _fast_pass(a.coeffs, a.n, +1.0))


def dual(v: SetFunction) -> SetFunction:
    """The dual set function v^d(A) = v(empty) + v(full) - v(full \\ A).

    Applying ``dual`` twice returns the original table; the arithmetic
    is pure addition/subtraction, so on inputs with mantissa headroom
    (e.g. dyadic grids) the involution is bit-exact.
    """
    full = v.full_mask
    s = v.values[0] + v.values[full]
    return SetFunction(v.n, tuple(s - v.values[full ^ mask] for mask in range(full + 1)))


def find_capacity_violation(v: SetFunction, tol: float = 1e-12) -> dict | None:
    """First capacity violation in canonical order, or None.

    Checks v(empty) = 0 within ``tol`` and v(A) <= v(A | {i}) + tol over
    all n * 2^(n-1) covering pairs, scanning elements then masks
    ascending so the reported pair is deterministic.
    """
    if abs(v.values[0]) > tol:
        return {"kind": "origin", "value": v.values[0]}
    arr = np.asarray(v.values, dtype=np.float64)
    size = arr.size
    idx = np.arange(size)
    for i in range(v.n):
        bit = 1 << i
        with_bit = idx[(idx & bit) != 0]
        drop = arr[with_bit ^ bit] - arr[with_bit]
        bad = np.nonzero(drop > tol)[0]
        if bad.size:
            k = int(with_bit[bad[0]])
            return {
                "kind": "monotonicity",
                "subset": k ^ bit,
                "element": i + 1,
                "lo": float(arr[k ^ bit]),
                "hi": float(arr[k]),
            }
    return None


def is_capacity(v: SetFunction, tol: float = 1e-12) -> bool:
    """True iff v is grounded at the empty set and nondecreasing."""
    return find_capacity_violation(v, tol) is None


def require_capacity(v: SetFunction, tol: float = 1e-12) -> None:
    violation = find_capacity_violation(v, tol)
    if violation is not None:
        raise NotACapacity(violation)


@lru_cache(maxsize=256)
def _lowbit_split(size: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Per-mask (lowest set bit index, remaining mask) tables."""
    low = [0] * size
    rest = [0] * size
    for m in range(1, size):
        low[m] = (m & -m).bit_length() - 1
        rest[m] = m & (m - 1)
    return tuple(low), tuple(rest)


def products_over_masks(x: Sequence[float], n: int) -> list[float]:
    """prod_{i in A} x_i for every mask A (empty product = 1)."""
    size = 1 << n
    low, rest = _lowbit_split(size)
    out = [1.0] * size
    for m in range(1, size):
        out[m] = x[low[m]] * out[rest[m]]
    return out


def minima_over_masks(x: Sequence[float], n: int) -> list[float]:
    """min_{i in A} x_i for every nonempty mask A (entry 0 unused)."""
    size = 1 << n
    low, rest = _lowbit_split(size)
    out = [0.0] * size
    for m in range(1, size):
        xm = x[low[m]]
        r = rest[m]
        out[m] = xm if r == 0 else min(xm, out[r])
    return out


def maxima_over_masks(x: Sequence[float], n: int) -> list[float]:
    """max_{i in A} x_i for every nonempty mask A (entry 0 unused)."""
    size = 1 << n
    low, rest = _lowbit_split(size)
    out = [0.0] * size
    for m in range(1, size):
        xm = x[low[m]]
        r = rest[m]
        out[m] = xm if r == 0 else max(xm, out[r])
    return out


def _check_arity(n: int, x: Sequence[float]) -> None:
    if len(x) != n:
        raise ArityMismatch(n, len(x))


def multilinear_eval(a: MobiusCoefficients, x: Sequence[float]) -> float:
    """Value of the multilinear polynomial sum_A a(A) prod_{i in A} x_i."""
    _check_arity(a.n, x)
    prods = products_over_masks(x, a.n)
    return math.fsum(c * p for c, p in zip(a.coeffs, prods))


def add(v: SetFunction, w: SetFunction) -> SetFunction:
    """Entrywise sum (the transforms are linear in this operation)."""
    if v.n != w.n:
        raise ArityMismatch(v.n, w.n)
    return SetFunction(v.n, tuple(a + b for a, b in zip(v.values, w.values)))
