"""Exception hierarchy shared by the whole package.

Every checked failure mode has its own class so that callers (and the
CLI exit-code mapping) can distinguish them without string matching.
"""


class CycleLiftError(Exception):
    """Base class for all package-specific errors."""


class PrecisionExhaustedError(CycleLiftError):
    """A valuation decision hit the truncation modulus p^N.

    Raised instead of guessing: every downstream formula is a statement
    about valuations, so silent truncation would corrupt multiplicities.
    """

    def __init__(self, message: str = "", needed: int | None = None):
        super().__init__(message or "precision exhausted")
        self.needed = needed


class HyperbolicBasisError(CycleLiftError):
    """No primitive isotropic vector was found in a vertex lattice.

    Impossible for genuine vertex lattices of the split plane; raising
    signals a bug in the caller rather than a recoverable condition.
    """


class DegenerateVectorError(CycleLiftError):
    """An operation requiring an anisotropic vector got an isotropic one."""


class SearchRadiusExceededError(CycleLiftError):
    """Tree search exceeded its radius cap without terminating."""


class SearchBoundExhaustedError(CycleLiftError):
    """An integer search (e.g. for an auxiliary prime) hit its bound."""


class EmptyIntersectionError(CycleLiftError):
    """A local equation was requested on a chart the cycle misses."""


class NotAdjacentError(CycleLiftError):
    """A superspecial chart was requested for non-neighbouring lattices."""


class TruncationInsufficientError(CycleLiftError):
    """A q-series coefficient beyond the stored truncation was needed."""


class HypothesisError(CycleLiftError):
    """Input violates the standing hypotheses (parity, inertness, ...)."""
