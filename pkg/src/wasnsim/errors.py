"""Exception types shared across the package."""


class WasnSimError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(WasnSimError):
    """Operands have incompatible shapes."""


class NotPositiveDefinite(WasnSimError):
    """A matrix required to be Hermitian positive-definite is not."""


class NoConvergence(WasnSimError):
    """An iterative solver exhausted its iteration budget."""


class Singular(WasnSimError):
    """A matrix required to be invertible is numerically singular."""


class PlacementFailed(WasnSimError):
    """Rejection sampling could not satisfy the minimum-distance constraint."""


class DegenerateK(WasnSimError):
    """Too few nodes for the requested connectivity measure."""


class Unreachable(WasnSimError):
    """The requested edge count cannot be met by a connected graph."""


class ConfigInvalid(WasnSimError):
    """A configuration value violates its constraints."""


class SignalTooShort(WasnSimError):
    """The signal is shorter than one analysis frame."""


class RankTooLarge(WasnSimError):
    """A requested rank exceeds the matrix dimension."""


class SingularT(WasnSimError):
    """A per-node transformation matrix became numerically singular."""


class DanseRequiresFc(WasnSimError):
    """The DANSE baseline only runs on fully connected adjacency."""


class NonPositiveValue(WasnSimError):
    """A strictly positive value was expected."""


class MalformedCsv(WasnSimError):
    """A metrics CSV file is missing required columns or rows."""
