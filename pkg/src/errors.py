"""Exception types raised by the certification engine.

Every error carries a plain message; the CLI maps them to exit codes
(input problems -> 2, failed certificates -> 1).
"""


class CoxhessError(Exception):
    """Base class for all engine errors."""


# Arithmetic

class DivisionByZero(CoxhessError, ZeroDivisionError):
    """Exact division by a zero scalar."""


class NonUnitConstantTerm(CoxhessError, ArithmeticError):
    """Series inversion of a polynomial whose constant term is zero."""


# Group construction

class UnknownLabel(CoxhessError, ValueError):
    """Group label not present in the catalog."""


class UnsupportedRank(CoxhessError, ValueError):
    """Rank missing or outside the supported range for a family."""


class InvalidCartan(CoxhessError, ValueError):
    """Cartan matrix violates the diagonal/zero-pattern/bond rules."""


class RelationViolation(CoxhessError, RuntimeError):
    """A Coxeter relation failed on the constructed generators."""


class SingularCartan(CoxhessError, ArithmeticError):
    """Cartan matrix is not invertible."""


class BudgetExceeded(CoxhessError, RuntimeError):
    """Enumeration would exceed the configured element budget."""


class ChainInconsistent(CoxhessError, RuntimeError):
    """Stabilizer chain failed an internal consistency check."""


# Series

class NotAFreeAlgebraShape(CoxhessError, ValueError):
    """Invariant series does not peel into a product of 1/(1 - t^d)."""


class NonPolynomialQuotient(CoxhessError, ValueError):
    """Series times the degree product does not terminate."""


# Certification

class NoCandidateSets(CoxhessError, ValueError):
    """No candidate set T matches the numerator."""


class PointNotRegular(CoxhessError, ValueError):
    """The evaluation point lies on a reflecting hyperplane."""


class DimensionMismatch(CoxhessError, ValueError):
    """Matrix or candidate-set shape does not match the rank."""


class InputNotCertified(CoxhessError, ValueError):
    """A product basis was requested from a report that did not pass."""


class ExpansionTooLarge(CoxhessError, ValueError):
    """Symbolic expansion guard tripped."""


class BlockIndexOutOfRange(CoxhessError, IndexError):
    """Polarization block index outside 1..m."""


# Cache

class CacheError(CoxhessError, ValueError):
    """Base class for histogram cache problems."""


class SchemaMismatch(CacheError):
    """Cache file written by an incompatible schema version."""


class HashMismatch(CacheError):
    """Cache file belongs to a different Cartan matrix."""


class CorruptPayload(CacheError):
    """Cache payload failed structural or total checks."""
