"""Exception types shared across the package.

Every failure that a caller may want to branch on gets its own class; plain
ValueError is reserved for argument mistakes that indicate a caller bug.
"""


class IvhsError(Exception):
    """Base class for all package-specific failures."""


class CompositeModulus(IvhsError):
    """A claimed prime failed the deterministic primality test."""


class FieldMismatch(IvhsError):
    """Operands belong to different field contexts."""


class AmbientMismatch(IvhsError):
    """Subspaces live in different ambient dimensions."""


class DegreeMismatch(IvhsError):
    """A form had the wrong homogeneous degree for the operation."""


class ZeroPoint(IvhsError):
    """(0, 0, 0) is not a projective point."""


class NonTransverse(IvhsError):
    """Two curves did not meet in the expected number of distinct points."""


class CommonComponent(IvhsError):
    """Two curves share a component (identically zero resultant)."""


class SplittingTooLarge(IvhsError):
    """The splitting field of a resultant exceeds the degree cap."""


class TooManyNodes(IvhsError):
    """Requested node count outside 0 <= n <= C(d-1,2) - 1."""


class GenerationExhausted(IvhsError):
    """Curve sampling hit the retry cap without passing certification."""


class NotSingular(IvhsError):
    """A point claimed as a node is not even a singular point."""


class NotStabilized(IvhsError):
    """Hilbert function probe degrees disagreed; the probe is unreliable."""


class NotSmooth(IvhsError):
    """An operation requiring a smooth curve received a singular one."""


class LedgerViolation(IvhsError):
    """A certified curve failed one of the exact dimension identities."""


class NotAdjoint(IvhsError):
    """The supplied multiplier form does not vanish on every node."""


class ExchangeStalled(IvhsError):
    """The point-exchange loop could not find a legal swap."""


class EmptySystem(IvhsError):
    """A linear system expected to be nonempty came out empty or undersized."""


class PrimeDisagreement(IvhsError):
    """Verification verdicts differ across primes; never silently resolved."""
