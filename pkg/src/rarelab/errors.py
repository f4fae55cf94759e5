"""Exception hierarchy shared by every module."""


class RarelabError(Exception):
    pass


class DomainError(RarelabError, ValueError):
    """Input outside the admissible domain (non-positive density, t <= 0, ...)."""


class OrderingError(DomainError):
    """End states violate rho_minus < rho_plus."""


class VacuumError(DomainError):
    """Density dropped to or below the vacuum floor."""


class InstabilityError(RarelabError, FloatingPointError):
    """Non-finite values appeared during time stepping."""


class ConvergenceError(RarelabError, ArithmeticError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class FitQualityError(RarelabError):
    """A decay fit was requested on data that cannot support it."""


class ConfigError(RarelabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "configuration error"
