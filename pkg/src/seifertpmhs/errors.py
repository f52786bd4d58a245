"""Exception hierarchy.

``InputError`` subclasses map to CLI exit code 2, ``InvariantViolation``
subclasses to exit code 1.
"""

from __future__ import annotations


class SeifertError(Exception):
    """Base class for all package errors."""


class InputError(SeifertError):
    """Bad or degenerate input data."""


class InvariantViolation(SeifertError):
    """A computed object fails an invariant it must satisfy."""


class SingularMatrix(InputError):
    pass


class SingularGram(InputError):
    pass


class NotSymmetric(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotNilpotent(InputError):
    pass


class NotInfinitesimalIsometry(InputError):
    pass


class ClusterAmbiguity(InvariantViolation):
    pass


class EigenvalueObstruction(InputError):
    pass


class EigenvalueOffCircle(InputError):
    pass


class VariantDomain(InputError):
    pass


class NonCanonicalType(InputError):
    pass


class InconsistentParity(InvariantViolation):
    pass


class InconsistentSpec(InputError):
    pass


class MHSViolation(InvariantViolation):
    pass


class NotSplit(InputError):
    pass


class SingularNu(InvariantViolation):
    pass


class BadSquareRoot(InputError):
    pass


class ExponentOutOfRange(InputError):
    pass


class QuadratureNonconvergence(InvariantViolation):
    pass


class IncompatibleExponents(InputError):
    pass


class ParityMismatch(InputError):
    pass


class TruncationInsufficient(InputError):
    pass


class TierMismatch(InputError):
    pass


class SectorMismatch(InputError):
    pass


class HyperbolicityViolation(InputError):
    pass
