"""Exception hierarchy shared by every zkcraft module."""


class ZkCraftError(Exception):
    """Base class for all library errors."""


# ---- field / polynomial kernel -------------------------------------------

class ModulusMismatch(ZkCraftError, ValueError):
    pass


class DivisionByZero(ZkCraftError, ZeroDivisionError):
    pass


class DuplicateNode(ZkCraftError, ValueError):
    pass


class NotPrime(ZkCraftError, ValueError):
    pass


# ---- circuit model and formats ------------------------------------------

class SchemaError(ZkCraftError, ValueError):
    pass


class InvariantError(SchemaError):
    """Well-typed input that breaks a structural invariant."""


class ShapeMismatch(ZkCraftError, ValueError):
    pass


class MagicMismatch(ZkCraftError, ValueError):
    pass


class TruncatedSection(ZkCraftError, ValueError):
    pass


class UnsupportedVersion(ZkCraftError, ValueError):
    pass


class IndexOutOfRange(ZkCraftError, IndexError):
    pass


class EmptyInstance(ZkCraftError, ValueError):
    pass


# ---- encoding / commitment ----------------------------------------------

class FieldTooSmall(ZkCraftError, ValueError):
    pass


class SingularMatrix(ZkCraftError, ArithmeticError):
    pass


class DegreeBudgetExceeded(ZkCraftError, ValueError):
    pass


class DomainTooSmall(ZkCraftError, ValueError):
    pass


class PointOutsideDomain(ZkCraftError, ValueError):
    pass


# ---- IOP / extraction ---------------------------------------------------

class ProverStatementFalse(ZkCraftError):
    """The honest prover's self-check failed; no proof is produced."""


class NonBooleanDelta(ZkCraftError, ValueError):
    pass


class DegreeOverflow(ZkCraftError, ValueError):
    pass


class NoSolution(ZkCraftError):
    pass


class ExtractionError(ZkCraftError):
    pass


class ProofFormatError(ZkCraftError, ValueError):
    pass


# ---- synthesis / oracle / driver ----------------------------------------

class DegreeTooHigh(ZkCraftError, ValueError):
    pass


class UnknownSite(ZkCraftError, KeyError):
    pass


class ReparseFailure(ZkCraftError, ValueError):
    pass


class CircomSyntaxError(ZkCraftError, ValueError):
    pass


class BudgetExhausted(ZkCraftError):
    pass
