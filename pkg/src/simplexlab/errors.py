"""Exception types shared across simplexlab."""


class SimplexLabError(Exception):
    """Base class for all simplexlab errors."""


class DomainError(SimplexLabError, ValueError):
    """Argument outside the domain where a formula is defined."""


class NonConvergence(SimplexLabError, ArithmeticError):
    """Requested tolerance not reached within the precision cap."""


class SingularSimplex(SimplexLabError, ValueError):
    """Vertex Gram matrix has rank < 4."""


class PrecisionTooLow(SimplexLabError, ValueError):
    """Too few digits for a sound rational reconstruction."""


class KeyUnstable(SimplexLabError, ArithmeticError):
    """Canonical key refinement ran out of working precision."""
