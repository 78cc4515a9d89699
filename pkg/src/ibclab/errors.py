"""Exception hierarchy. Every error carries a stable ``code`` string used by the CLI."""


class IbcError(Exception):
    code = "IbcError"


class OvercriticalCoupling(IbcError):
    code = "Overcritical"


class SubcriticalCoupling(IbcError):
    """Coupling outside sqrt(3)/2 < |q| where no IBC extension exists."""

    code = "Subcritical"


class InvalidSector(IbcError):
    code = "InvalidSector"


class GridTooCoarse(IbcError):
    code = "GridTooCoarse"


class CutoffOutsideGrid(IbcError):
    code = "CutoffOutsideGrid"


class SingularFit(IbcError):
    code = "SingularFit"


class QuadratureNotConverged(IbcError):
    code = "QuadratureNotConverged"


class ConstraintViolated(IbcError):
    code = "ConstraintViolated"

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"a1*a4 - a2*a3 - 4B(1+q) = {residual!r}")


class ZeroCoupling(IbcError):
    code = "ZeroCoupling"


class IllConditionedOverlap(IbcError):
    code = "IllConditionedOverlap"


class DegenerateProjection(IbcError):
    code = "DegenerateProjection"


class SolveFailed(IbcError):
    code = "SolveFailed"


class ConfigError(IbcError):
    code = "ConfigError"
