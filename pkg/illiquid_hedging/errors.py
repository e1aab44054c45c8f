class HedgingError(Exception):
    exit_code = 1


class ConfigError(HedgingError, ValueError):
    exit_code = 2


class AdmissibilityError(HedgingError, ValueError):
    exit_code = 2

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__('; '.join(self.violations) or 'inadmissible parameters')


class DomainError(HedgingError, ValueError):
    exit_code = 2


class ParamError(HedgingError, ValueError):
    exit_code = 2


class TrivialCaseError(ParamError):
    pass


class ComplexRootsError(ParamError):

    def __init__(self, discriminant: float):
        self.discriminant = discriminant
        super().__init__(f'negative discriminant {discriminant!r}: no real power roots')


class GridError(HedgingError, ValueError):
    exit_code = 2


class BasisError(HedgingError):
    pass


class UnsupportedFieldError(HedgingError, ValueError):
    exit_code = 2


class GuardError(HedgingError):
    exit_code = 4

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class BracketError(HedgingError):
    exit_code = 3


class ConvergenceError(HedgingError):
    exit_code = 3

    def __init__(self, message: str, estimate=None):
        self.estimate = estimate
        super().__init__(message)


class StepUnderflowError(HedgingError):
    exit_code = 3


class NoRealBranchError(HedgingError):
    exit_code = 3

    def __init__(self, message: str, z=None, partial=None):
        self.z = z
        self.partial = partial
        super().__init__(message)
