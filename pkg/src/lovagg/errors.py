"""Exception hierarchy shared by all modules.

Every error carries enough structured context (offending subset, witness
point, values) for callers to render a precise diagnostic; the CLI maps
the classes below onto its exit-code contract.
"""

from __future__ import annotations


class LovaggError(Exception):
    """Base class for all library errors."""


class ParseError(LovaggError):
    """A file or spec dictionary does not match its declared schema."""


class ArityMismatch(LovaggError):
    """An input tuple's length does not match the declared arity."""

    def __init__(self, expected: int, got: int):
        super().__init__(f"expected a tuple of length {expected}, got {got}")
        self.expected = expected
        self.got = got


class DomainViolation(LovaggError):
    """A coordinate falls outside the declared domain interval."""


class NotACapacity(LovaggError):
    """A set function fails the capacity requirements (grounded + monotone).

    ``violation`` is a dict: either {"kind": "origin", "value": v_empty}
    or {"kind": "monotonicity", "subset": A, "element": i, "lo": v(A),
    "hi": v(A | {i})} with 1-based ``element`` and bitmask ``subset``.
    """

    def __init__(self, violation: dict):
        self.violation = violation
        if violation["kind"] == "origin":
            msg = f"value at the empty set is {violation['value']!r}, expected 0"
        else:
            msg = (
                f"monotonicity fails on the covering pair: adding element "
                f"{violation['element']} to subset mask {violation['subset']} "
                f"drops the value from {violation['lo']!r} to {violation['hi']!r}"
            )
        super().__init__(msg)


class PhiNotOdd(LovaggError):
    """An odd inner function was required but the table is not odd."""


class DomainKindUnsupported(LovaggError):
    """The operation is only defined for certain domain interval kinds."""


class DomainNotCentered(DomainKindUnsupported):
    """The operation requires an interval symmetric about 0."""


class NoWitnessSubset(LovaggError):
    """All vertex-ray reference values vanish; no normalization exists."""


class ReconstructionMismatch(LovaggError):
    """A factorization or decomposition fails to reproduce the function.

    ``witness`` is the worst offending point: a dict with keys
    "x", "lhs", "rhs", "gap".
    """

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message if witness is None else f"{message}; worst witness {witness}")
        self.witness = witness


class NotProportional(LovaggError):
    """Two factorizations are not related by a positive scaling.

    ``where`` locates the break: {"breakpoint": x} or {"subset": mask}.
    """

    def __init__(self, message: str, where: dict | None = None):
        super().__init__(message if where is None else f"{message} at {where}")
        self.where = where
