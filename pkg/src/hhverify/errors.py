"""Exception hierarchy shared by every module of the package."""


class HHVerifyError(Exception):
    """Base class for all errors raised by hhverify."""


class DomainError(HHVerifyError, ValueError):
    """An argument lies outside the domain of the function being evaluated."""


class SingularityError(HHVerifyError, ValueError):
    """A function has a non-removable singularity at the requested point."""


class DegenerateInput(HHVerifyError, ValueError):
    """Points are too close together for a divided difference."""


class DimensionMismatch(HHVerifyError, ValueError):
    pass


class SizeLimit(HHVerifyError, ValueError):
    """The requested object would exceed a hard size cap."""


class InvalidCharacter(HHVerifyError, ValueError):
    pass


class NegativeDeterminant(HHVerifyError, ValueError):
    pass


class SingularMatrix(HHVerifyError, ValueError):
    pass


class HypothesisViolation(HHVerifyError, ValueError):
    """A conditional inequality was called on inputs that break its hypothesis."""


class UnknownInequality(HHVerifyError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown inequality"


class UnknownTarget(UnknownInequality):
    pass
