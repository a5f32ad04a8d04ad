"""Exception types shared across the package."""


class GalileoError(Exception):
    pass


class DomainError(GalileoError, ValueError):
    """Input outside the domain where a formula is defined."""


class ConeError(DomainError):
    """State outside the admissible cone of a system."""


class DegenerateClosureError(GalileoError, ArithmeticError):
    pass


class NoSolutionError(GalileoError, ArithmeticError):
    pass


class HyperbolicityError(GalileoError, ArithmeticError):
    pass


class BranchError(DomainError):
    """Elliptic velocity requested outside the principal branch."""


class SolverAbort(GalileoError, RuntimeError):
    def __init__(self, message, cell=None, step=None, component=None):
        super().__init__(message)
        self.cell = cell
        self.step = step
        self.component = component


class ConfigError(GalileoError, ValueError):
    pass
