"""Exception types raised by the toolkit.

Everything derives from :class:`ToolkitError` so callers can catch the whole
family with one clause.  The names mirror the failure they report; none of
them carries state beyond the message except :class:`HypothesisFailed`,
which records which hypothesis of the rigidity statement was violated.
"""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(ToolkitError):
    """A matrix that must be Hermitian is too far from its adjoint."""


class DimensionMismatch(ToolkitError):
    """Operands have incompatible shapes or live on different algebras."""


class NotPSD(ToolkitError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


class NotCP(ToolkitError):
    """A map required to be completely positive has a non-PSD Choi matrix."""


class ZeroMap(ToolkitError):
    """The zero map was passed where a nonzero map is required."""


class NotDominated(ToolkitError):
    """The second map is not dominated by the first in the CP order."""


class TooLarge(ToolkitError):
    """The instance exceeds the size limits of a brute-force routine."""


class InputNotReduced(ToolkitError):
    """The factor pair still has a common kernel; reduce it first."""


class NotCompletable(ToolkitError):
    """The partial data admits no positive (or CP) completion."""


class MalformedPartialMap(ToolkitError):
    """The partial map's blocks do not lie in the stated column space."""


class SeedNotACompletion(ToolkitError):
    """The seed map does not complete the given partial map."""


class RNotProjection(ToolkitError):
    """An operator required to be an orthogonal projection is not one."""


class WitnessInvalid(ToolkitError):
    """The supplied vector does not witness failure of quasi-purity."""


class InconclusiveQuasiPurity(ToolkitError):
    """A routine needed a proof-grade quasi-purity verdict but got none."""


class MalformedDocument(ToolkitError):
    """A JSON document does not match the expected schema."""


class HypothesisFailed(ToolkitError):
    """A hypothesis of the rigidity statement does not hold.

    Attributes:
        hypothesis: short tag naming the violated hypothesis, one of
            ``"quasi-purity"``, ``"unit-values"``, ``"r-equivalence"``,
            ``"vanishes-on-r"``, ``"reference-map"``.
    """

    def __init__(self, hypothesis: str, message: str = ""):
        self.hypothesis = hypothesis
        super().__init__(message or f"hypothesis violated: {hypothesis}")
