"""Exception types raised by the engine modules."""


class TunnelPulseError(Exception):
    """Base class for all package-specific failures."""


class DegenerateGrid(TunnelPulseError, ValueError):
    """A grid with fewer than two points cannot support quadrature."""


class GridShapeError(TunnelPulseError, ValueError):
    """Grid does not satisfy the shape contract of a transform (e.g. power of two)."""


class InvalidMomentum(TunnelPulseError, ValueError):
    """Scattering amplitudes are defined for real momenta p > 0 only."""


class OutsideTunnellingRegime(TunnelPulseError, ValueError):
    """Operation requires p^2 < 2W (real decay constant under the barrier)."""


class BranchPointSingularity(TunnelPulseError, ValueError):
    """Momentum coincides with the branch point p^2 = 2W where the log-derivative blows up."""


class DimensionError(TunnelPulseError, ValueError):
    """Operator and selection states live in different Hilbert-space dimensions."""


class NearOrthogonalSelection(TunnelPulseError, ValueError):
    """Pre/post overlap is numerically zero; the weak value diverges."""


class ScheduleDomainError(TunnelPulseError, ValueError):
    """Width-schedule parameters outside gamma in (0,1), epsilon in (0,1], d > 0."""


class QuadratureNotConverged(TunnelPulseError, ArithmeticError):
    """Refining the momentum grid still changes the result beyond tolerance."""


class ShiftWindowTooNarrow(TunnelPulseError, ValueError):
    """Shift-spectrum grid does not contain the support of xi(y)."""


class WindowTooNarrow(TunnelPulseError, ValueError):
    """A density peak landed on (or ran off) the edge of the spatial window."""
