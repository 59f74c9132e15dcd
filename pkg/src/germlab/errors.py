"""Exception and warning types raised across germlab."""


class GermlabError(Exception):
    """Base class for all germlab failures."""


class ExpressionSyntaxError(GermlabError, ValueError):
    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"syntax error at position {position}: {message}")


class UnknownVariable(GermlabError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown variable {name!r}")


class UnknownFunction(GermlabError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown function {name!r}")


class DomainError(GermlabError, ArithmeticError):
    pass


class UnknownCatalogName(GermlabError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"no catalog germ named {self.name!r}"


class SchemaError(GermlabError, ValueError):
    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class EmptyShell(GermlabError):
    pass


class ProjectionDiverged(GermlabError):
    pass


class OutOfCoverage(GermlabError, ValueError):
    pass


class Unreachable(GermlabError):
    pass


class InsufficientPairs(GermlabError):
    pass


class DegenerateWindow(GermlabError, ValueError):
    pass


class AmbiguousDimension(GermlabError):
    """The implied dimension sits too far from every integer."""

    def __init__(self, estimate):
        self.estimate = estimate
        super().__init__(
            f"implied dimension {estimate.a_real:.3f} is ambiguous "
            f"(nearest integer {estimate.a_rounded})"
        )


class NotConverged(GermlabError):
    def __init__(self, trace):
        self.trace = trace
        super().__init__("direction clouds did not converge along the radius ladder")


class EmptySet(GermlabError, ValueError):
    pass


class UnstableScale(GermlabError):
    pass


class EmptyLink(GermlabError):
    pass


class HolderViolation(GermlabError, ValueError):
    def __init__(self, i, j, ratio, L):
        self.pair = (i, j)
        self.ratio = ratio
        self.L = L
        super().__init__(
            f"sample pair ({i}, {j}) needs constant {ratio:.6g} > asserted {L:.6g}"
        )


class DimensionMismatch(GermlabError, ValueError):
    pass


class BoxCountingUnstable(GermlabError):
    pass


class DisconnectedWarning(UserWarning):
    pass
