"""Exception types raised across the package."""


class FracOrliczError(Exception):
    """Base class for all package errors."""


class NonYoung(FracOrliczError):
    """A function fails the Young-function growth sandwich on a sampled grid."""


class MaximizerDiverged(FracOrliczError):
    """The supremum defining the complementary function was not attained."""


class Inconclusive(FracOrliczError):
    """A numerical limit decision could not be made from the probe sequence."""


class EmptyDomain(FracOrliczError):
    pass


class OutsideDomain(FracOrliczError):
    pass


class TooCoarse(FracOrliczError):
    """The grid does not resolve the requested construction."""


class NonIntegrableSingularity(FracOrliczError):
    def __init__(self, exponent, dim):
        self.exponent = exponent
        self.dim = dim
        super().__init__(
            f"near-diagonal decay exponent {exponent:.3f} <= -{dim}: "
            "integrand is not locally integrable"
        )


class OnBoundary(FracOrliczError):
    """A point used as a tail-integral source sits within one cell of the boundary."""


class Indistinguishable(FracOrliczError):
    """Two compared integrals differ by less than their error bounds."""


class CaseHypothesisFails(FracOrliczError):
    pass
