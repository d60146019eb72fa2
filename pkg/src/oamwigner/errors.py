"""Exception hierarchy shared by every module of the package."""


class CylinderError(Exception):
    """Base class for all errors raised by ``oamwigner``."""


class NonconvergentTheta(CylinderError, ArithmeticError):
    pass


class AliasRisk(CylinderError, ValueError):
    """A Fourier mode was requested that the sampling grid cannot resolve."""


class OutOfTruncation(CylinderError, ValueError):
    """An OAM index lies outside the truncation window [-L, L]."""


class ExcessLeakage(CylinderError, ValueError):
    """Truncation discards more probability than the tolerance allows."""


class UnresolvableWedge(CylinderError, ValueError):
    pass


class ImaginaryResidue(CylinderError, ArithmeticError):
    """A quantity that must be real carries a non-negligible imaginary part."""


class NegativeDensity(CylinderError, ArithmeticError):
    pass


class MissingTomogram(CylinderError, KeyError):
    """A tomogram needed by the inversion is absent from the set."""

    def __str__(self):
        return Exception.__str__(self)
