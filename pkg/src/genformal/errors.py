"""Exception hierarchy shared by every module."""


class GenformalError(Exception):
    """Base class; the CLI maps subclasses of InputError to exit code 2."""


class InputError(GenformalError):
    pass


class ParseError(InputError):
    def __init__(self, message, text=None, pos=None):
        self.text = text
        self.pos = pos
        if text is not None and pos is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            token = text[pos:pos + 8]
            message = f"{message} at line {line}, column {col} (near {token!r})"
            self.line, self.column = line, col
        super().__init__(message)


class UnknownVariable(InputError):
    pass


class IncompleteAssignment(InputError):
    pass


class InconsistentConjugates(InputError):
    pass


class ChartMismatch(InputError):
    pass


class NotSkew(GenformalError):
    pass


class PolynomialEntries(GenformalError):
    pass


class NotComplexStructure(InputError):
    pass


class SingularOmega(InputError):
    pass


class NotGeneralizedComplex(GenformalError):
    pass


class NotCommuting(GenformalError):
    pass


class NotPositiveDefinite(GenformalError):
    def __init__(self, message, index=None, minor=None):
        super().__init__(message)
        self.index = index
        self.minor = minor


class NotGeneralizedComplexSubspace(GenformalError):
    pass


class NotInvariant(GenformalError):
    pass


class NotIsotropic(GenformalError):
    pass


class MalformedFamily(InputError):
    pass


class HNotClosed(InputError):
    pass


class BNotClosed(InputError):
    pass


class BNotClosedOrNotInvariant(InputError):
    pass


class ResidualOutsideAdjacentDegrees(GenformalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResidualOutsideCorners(GenformalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvariantViolation(GenformalError):
    pass


class NotChainMap(GenformalError):
    pass


class NotOnLevelSet(InputError):
    pass


class NotFree(InputError):
    pass


class WeightConditionViolated(InputError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class HypothesisNotVerified(GenformalError):
    pass
