"""Wavepacket tunnelling through a rectangular barrier as a weak measurement.

Library layout:

- ``numerics``    grids, deterministic quadrature, Fourier shift spectra, erfc
- ``barrier``     exact/asymptotic transmission amplitudes, weak shift, phase time
- ``wavepacket``  Gaussian pulses, free propagation, transmitted states
- ``measurement`` pre/post-selected von Neumann measurements, weak values
- ``hartman``     width scans, probability bounds, exact-vs-expansion benchmark
- ``cli``         command-line drivers emitting CSV/JSON and figures
"""

from .barrier import (
    RectangularBarrier,
    WeakShift,
    asymptotic_transmission,
    causal_shift_spectrum,
    kappa,
    log_transmission,
    phase_time,
    transmission_amplitude,
    weak_shift,
)
from .errors import (
    BranchPointSingularity,
    DegenerateGrid,
    DimensionError,
    GridShapeError,
    InvalidMomentum,
    NearOrthogonalSelection,
    OutsideTunnellingRegime,
    QuadratureNotConverged,
    ScheduleDomainError,
    ShiftWindowTooNarrow,
    TunnelPulseError,
    WindowTooNarrow,
)
from .hartman import (
    DEFAULT_WIDTH_LADDER,
    AdvancementReport,
    Fig1Result,
    HartmanScanRow,
    ProbabilityReport,
    fig1_reproduce,
    hartman_scan,
    measure_advancement,
    oscillation_count,
    probability_report,
)
from .measurement import (
    MeasuredOperator,
    NrwFamily,
    SelectionPair,
    TailBound,
    WeakValue,
    barrier_nrw_family,
    gaussian_pointer_approx,
    improper_average,
    nrw_limit_state,
    pointer_final_state,
    pointer_state_momentum_route,
    selection_amplitude,
    sigma_schedule,
    spin_half_selection,
    tail_contribution,
    weak_value,
    weak_value_log_derivative,
)
from .numerics import (
    ComplexField,
    MomentumGrid,
    SpatialGrid,
    erfc,
    integrate,
    log_erfc,
    momentum_spectrum,
    positive_axis_weight,
    shift_spectrum,
    trapezoid_weights,
)
from .wavepacket import (
    GaussianPulse,
    QuadratureReport,
    Regime,
    approximate_transmitted,
    expansion_validity,
    free_envelope,
    free_state,
    scaled_transmitted_state,
    shift_superposition,
    transmitted_state,
)

__version__ = "0.1.0"
