"""Exception hierarchy shared by every ffls module.

Domain errors map to CLI exit code 2, precision failures to exit code 3.
"""


class FFLSError(Exception):
    exit_code = 2


class DomainError(FFLSError):
    exit_code = 2


class PrecisionError(FFLSError):
    exit_code = 3


class NonPrime(DomainError):
    pass


class ReducibleModulus(DomainError):
    pass


class NoEmbedding(DomainError):
    pass


class DimMismatch(DomainError):
    pass


class SchemaError(DomainError):
    pass


class NilpotencyViolation(DomainError):
    pass


class ZeroTauDegree(DomainError):
    pass


class NotPrime(DomainError):
    pass


class UnsupportedShape(DomainError):
    pass


class Unsupported(DomainError):
    pass


class OutOfDomain(DomainError):
    pass


class NonUnitDenominator(DomainError):
    pass


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class PrecisionExhausted(PrecisionError):
    pass


class ZeroToPrecision(PrecisionError):
    pass


class RoundingAmbiguous(PrecisionError):
    pass


class InsufficientRange(PrecisionError):
    pass
