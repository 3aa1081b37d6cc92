"""Exception hierarchy shared by every corrkit module."""


class CorrkitError(Exception):
    """Base class for all toolkit errors."""


# geometry
class DegenerateSimplex(CorrkitError, ValueError):
    pass


class NotInAffineHull(CorrkitError, ValueError):
    pass


class WeightsNotNormalized(CorrkitError, ValueError):
    pass


# correspondences
class OutsideDomain(CorrkitError, ValueError):
    pass


class DomainMismatch(CorrkitError, ValueError):
    pass


class PartitionError(CorrkitError, ValueError):
    """Cells do not partition the domain exactly once."""


# definitions / witnesses
class EmptyValueAt(CorrkitError, ValueError):
    def __init__(self, index, point=None):
        self.index = index
        self.point = point
        super().__init__(f"value at base point #{index} ({point}) is empty")


class WitnessValueNotInT(CorrkitError, ValueError):
    def __init__(self, index, value=None, point=None):
        self.index = index
        super().__init__(f"witness value #{index} = {value!r} is not in T({point})")


class ReparamNotSimplexValued(CorrkitError, ValueError):
    def __init__(self, weights, total):
        self.weights = weights
        super().__init__(f"g(lambda) sums to {total!r} at lambda={list(weights)}")


class WitnessRejected(CorrkitError):
    def __init__(self, counterexample, agent=None, eps=None):
        self.counterexample = counterexample
        self.agent = agent
        self.eps = eps
        where = ""
        if agent is not None:
            where += f" (agent {agent}"
            where += f", eps={eps!r})" if eps is not None else ")"
        super().__init__(f"witness rejected{where}: {counterexample.trace}")


class EmptyCore(CorrkitError, ValueError):
    pass


class NoWcgTuple(CorrkitError, ValueError):
    pass


# fixed points
class NotSelfMap(CorrkitError, ValueError):
    def __init__(self, x, hx):
        self.x = x
        self.hx = hx
        super().__init__(f"h({list(x)}) = {list(hx)} leaves the simplex")


class ToleranceNotReached(CorrkitError):
    def __init__(self, message, best_point=None, best_residual=None):
        self.best_point = best_point
        self.best_residual = best_residual
        super().__init__(message)


class NoFixedPointWithinTolerance(ToleranceNotReached):
    """The patched product map has no grid point within tolerance."""


class PostVerificationFailed(CorrkitError):
    pass


# economies
class WNotProper(CorrkitError):
    pass


class CertificateFailed(CorrkitError):
    pass


class IterateEscapedQ(CorrkitError):
    def __init__(self, message, agent=None, eps=None, point=None):
        self.agent = agent
        self.eps = eps
        self.point = point
        super().__init__(message)


class LimitCheckFailed(CorrkitError):
    pass


# documents
class DocumentError(CorrkitError):
    pass


class ParseError(DocumentError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{loc}")


class SchemaError(DocumentError):
    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"schema error at {field!r}" + (f": {message}" if message else ""))


class UnresolvedReference(DocumentError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unresolved reference {name!r}")
