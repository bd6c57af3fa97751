"""Gaussian pulses and their transmitted states.

A pulse is defined by its spatial width sigma, mean momentum p0 and centre
x0 at t = 0, plus a dispersion regime: ``massive`` (unit mass, spreading
width sigma_t^2 = sigma^2 + 2 i t), ``photon`` (rigid envelope moving at
c), or ``static`` (infinitely heavy pointer, frozen in place).

The transmitted state is the momentum integral of amplitude * C(p) *
plane wave; it can be evaluated either directly (``transmitted_state``),
in log-scaled form for exponentially small amplitudes
(``scaled_transmitted_state``), or as a superposition of shifted free
states weighted by the shift spectrum (``shift_superposition``).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import barrier as _barrier
from .errors import OutsideTunnellingRegime, QuadratureNotConverged, ShiftWindowTooNarrow
from .numerics import ComplexField, MomentumGrid, SpatialGrid, erfc, trapezoid_weights

__all__ = [
    "Regime",
    "GaussianPulse",
    "QuadratureReport",
    "free_envelope",
    "free_state",
    "transmitted_state",
    "scaled_transmitted_state",
    "shift_superposition",
    "approximate_transmitted",
    "expansion_validity",
]


class Regime(enum.Enum):
    MASSIVE = "massive"
    PHOTON = "photon"
    STATIC = "static"


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian envelope of spatial width sigma on a carrier of momentum p0.

    In momentum space the amplitude is
    ``C(p) = sigma^{1/2} / (2 pi)^{3/4} exp[-(p - p0)^2 sigma^2 / 4
    - i (p - p0) x0]``, normalised so the coordinate state has unit norm.
    For barrier scattering the pulse should start far left (x0 < 0) and be
    narrow in momentum (2/sigma << p0); the latter is only diagnosed, not
    enforced, since measurement pointers legitimately violate it.
    """

    sigma: float
    p0: float
    x0: float = 0.0
    regime: Regime = Regime.MASSIVE
    light_speed: float = 1.0

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"pulse width must be positive, got {self.sigma}")
        if self.regime is Regime.PHOTON and not self.light_speed > 0.0:
            raise ValueError("photon regime needs light_speed > 0")
        if self.regime is Regime.STATIC and (self.p0 != 0.0 or self.x0 != 0.0):
            raise ValueError("static (heavy-pointer) regime fixes p0 = 0 and x0 = 0")
        if self.regime is not Regime.STATIC and 2.0 / self.sigma > 0.2 * abs(self.p0):
            warnings.warn(
                "pulse is not narrow in momentum (2/sigma > 0.2 p0); "
                "linear-expansion results will be rough",
                stacklevel=2,
            )

    @property
    def momentum_width(self) -> float:
        """Momentum spread sigma_p = 2 / sigma probed around p0."""
        return 2.0 / self.sigma

    @property
    def group_velocity(self) -> float:
        if self.regime is Regime.MASSIVE:
            return self.p0
        if self.regime is Regime.PHOTON:
            return self.light_speed
        return 0.0

    def energy(self, p):
        """Dispersion relation: p^2/2, c p, or 0 by regime."""
        if self.regime is Regime.MASSIVE:
            return np.asarray(p) ** 2 / 2.0 if np.ndim(p) else p * p / 2.0
        if self.regime is Regime.PHOTON:
            return self.light_speed * np.asarray(p) if np.ndim(p) else self.light_speed * p
        return np.zeros_like(np.asarray(p, dtype=float)) if np.ndim(p) else 0.0

    def momentum_distribution(self, p):
        """Momentum amplitude C(p) (complex; carries the -i (p-p0) x0 phase)."""
        u = np.asarray(p, dtype=float) - self.p0
        amp = math.sqrt(self.sigma) / (2.0 * math.pi) ** 0.75
        vals = amp * np.exp(-u * u * self.sigma**2 / 4.0 - 1j * u * self.x0)
        return vals if np.ndim(p) else complex(vals)

    def log_momentum_distribution(self, p):
        """log C(p), for composing exponents in scaled quadratures."""
        u = np.asarray(p, dtype=float) - self.p0
        log_amp = 0.5 * math.log(self.sigma) - 0.75 * math.log(2.0 * math.pi)
        vals = log_amp - u * u * self.sigma**2 / 4.0 - 1j * u * self.x0
        return vals if np.ndim(p) else complex(vals)

    def default_momentum_grid(
        self,
        n_points: int = 4097,
        halfwidth: float = 8.0,
        clip_positive: bool = True,
    ) -> MomentumGrid:
        """Integration window p0 +/- halfwidth/sigma.

        ``clip_positive`` trims the window at p > 0 (scattering amplitudes
        are right-moving); pointer measurements pass ``False`` to keep the
        full symmetric window.
        """
        half = halfwidth / self.sigma
        lo = self.p0 - half
        hi = self.p0 + half
        if clip_positive and lo <= 0.0:
            lo = 1e-12
        return MomentumGrid(lo, hi, n_points)

    def momentum_tail_weight(self, grid: MomentumGrid) -> float:
        """|C|^2 probability mass outside the window (neglected by quadrature)."""
        s = self.sigma / math.sqrt(2.0)
        above = 0.5 * erfc((grid.p_max - self.p0) * s)
        below = 0.5 * erfc((self.p0 - grid.p_min) * s)
        return above + below


def _drift(pulse: GaussianPulse, t: float) -> float:
    return pulse.group_velocity * t


def free_envelope(pulse: GaussianPulse, x, t: float):
    """Time-dependent envelope of the freely propagating pulse.

    Massive: ``[2 sigma^2 / (pi sigma_t^4)]^{1/4}
    exp[-(x - p0 t - x0)^2 / sigma_t^2]`` with sigma_t^2 = sigma^2 + 2 i t.
    Photon: rigid Gaussian moving at c.  Static: frozen Gaussian.
    """
    xs = np.asarray(x, dtype=float)
    rel = xs - pulse.x0 - _drift(pulse, t)
    sig2 = pulse.sigma**2
    if pulse.regime is Regime.MASSIVE:
        st2 = sig2 + 2j * t
        pref = (2.0 * sig2 / math.pi) ** 0.25 / np.sqrt(st2)
        vals = pref * np.exp(-rel.astype(complex) ** 2 / st2)
    else:
        pref = (2.0 / (math.pi * sig2)) ** 0.25
        vals = pref * np.exp(-rel * rel / sig2).astype(complex)
    return vals if np.ndim(x) else complex(vals)


def free_state(pulse: GaussianPulse, x, t: float):
    """Full free state: carrier exp[i(p0 x - eps(p0) t)] times the envelope."""
    xs = np.asarray(x, dtype=float)
    carrier = np.exp(1j * (pulse.p0 * xs - pulse.energy(pulse.p0) * t))
    vals = carrier * free_envelope(pulse, xs, t)
    return vals if np.ndim(x) else complex(vals)


@dataclass(frozen=True)
class QuadratureReport:
    """Convergence diagnostic for a momentum-grid quadrature."""

    n_points: int
    n_refined: int
    rel_change: float
    neglected_weight: float


def _phase_sum(x: np.ndarray, p: np.ndarray, coeff: np.ndarray) -> np.ndarray:
    """sum_j coeff_j exp(i p_j x_i), pairwise-summed row by row.

    The reduction is numpy's pairwise sum along the last axis (never BLAS),
    so results do not depend on thread counts.
    """
    out = np.empty(x.size, dtype=complex)
    block = max(1, int(4_000_000 // max(p.size, 1)))
    for i in range(0, x.size, block):
        xs = x[i : i + block]
        out[i : i + block] = (np.exp(1j * np.multiply.outer(xs, p)) * coeff).sum(axis=1)
    return out


def _converged_field(
    pulse: GaussianPulse,
    coeff_of,
    x_grid: SpatialGrid,
    grid: MomentumGrid,
    rel_tol: float,
) -> tuple[ComplexField, QuadratureReport]:
    x = x_grid.points()
    fine_grid = grid.refined()

    def evaluate(g: MomentumGrid) -> np.ndarray:
        p = g.points()
        return _phase_sum(x, p, coeff_of(p) * trapezoid_weights(g))

    coarse = evaluate(grid)
    fine = evaluate(fine_grid)
    scale = math.sqrt(float(np.sum(np.abs(fine) ** 2)))
    diff = math.sqrt(float(np.sum(np.abs(fine - coarse) ** 2)))
    rel = diff / scale if scale > 0.0 else 0.0
    if rel > rel_tol:
        raise QuadratureNotConverged(
            f"momentum quadrature changed by {rel:.3e} (> {rel_tol:.1e}) "
            f"between {grid.n_points} and {fine_grid.n_points} points"
        )
    report = QuadratureReport(
        n_points=grid.n_points,
        n_refined=fine_grid.n_points,
        rel_change=rel,
        neglected_weight=pulse.momentum_tail_weight(grid),
    )
    return ComplexField(x_grid, fine), report


def transmitted_state(
    pulse: GaussianPulse,
    amplitude,
    x_grid: SpatialGrid,
    t: float,
    momentum_grid: MomentumGrid | None = None,
    rel_tol: float = 1e-8,
) -> tuple[ComplexField, QuadratureReport]:
    """Transmitted pulse: integral of amplitude(p) C(p) exp(i p x - i eps t) dp.

    ``amplitude`` maps a momentum array to complex values.  The quadrature
    is evaluated on the window and again with midpoints inserted; the
    relative L2 change between the two is the convergence diagnostic, and
    exceeding ``rel_tol`` raises ``QuadratureNotConverged``.  Returns the
    refined field together with the report.
    """
    grid = momentum_grid if momentum_grid is not None else pulse.default_momentum_grid()

    def coeff_of(p: np.ndarray) -> np.ndarray:
        return (
            np.asarray(amplitude(p), dtype=complex)
            * pulse.momentum_distribution(p)
            * np.exp(-1j * pulse.energy(p) * t)
        )

    return _converged_field(pulse, coeff_of, x_grid, grid, rel_tol)


def scaled_transmitted_state(
    pulse: GaussianPulse,
    log_amplitude,
    x_grid: SpatialGrid,
    t: float,
    log_scale: complex = 0.0,
    momentum_grid: MomentumGrid | None = None,
    rel_tol: float = 1e-8,
) -> tuple[ComplexField, QuadratureReport]:
    """Like ``transmitted_state`` but returns exp(log_scale) * Psi^T.

    ``log_amplitude`` supplies log T(p); the scale is folded into the
    integrand exponent *before* exponentiation, so amplitudes as small as
    e^{-1000} survive (the integrand itself is O(1) when log_scale cancels
    the decay).
    """
    grid = momentum_grid if momentum_grid is not None else pulse.default_momentum_grid()

    def coeff_of(p: np.ndarray) -> np.ndarray:
        expo = (
            np.asarray(log_amplitude(p), dtype=complex)
            + log_scale
            + pulse.log_momentum_distribution(p)
            - 1j * pulse.energy(p) * t
        )
        return np.exp(expo)

    return _converged_field(pulse, coeff_of, x_grid, grid, rel_tol)


def shift_superposition(pulse: GaussianPulse, xi: ComplexField, x, t: float):
    """Transmitted pulse as a superposition of shifted free states.

    Evaluates ``int xi(y) Psi^0(x - y, t) dy`` over the entire shift grid.
    ``xi`` should come from ``numerics.shift_spectrum`` of the amplitude on
    the same momentum window used for the direct route; the two
    representations then agree.
    """
    if not isinstance(xi.grid, SpatialGrid):
        raise ShiftWindowTooNarrow("xi must live on a shift (spatial) grid")
    # an aliased (too narrow) grid piles weight onto the outer deciles;
    # the benign sinc floor of a finite momentum window stays far below this
    density = np.abs(xi.values) ** 2
    total = float(density.sum())
    edge = xi.grid.n_points // 10
    if total > 0.0 and float(density[:edge].sum() + density[-edge:].sum()) > 1e-3 * total:
        raise ShiftWindowTooNarrow(
            "shift spectrum carries weight at the grid ends; widen the window"
        )
    y = xi.grid.points()
    coeff = xi.values * trapezoid_weights(xi.grid)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size, dtype=complex)
    block = max(1, int(4_000_000 // max(y.size, 1)))
    for i in range(0, xs.size, block):
        shifted = xs[i : i + block, None] - y[None, :]
        out[i : i + block] = (free_state(pulse, shifted, t) * coeff).sum(axis=1)
    return out if np.ndim(x) else complex(out[0])


def approximate_transmitted(
    pulse: GaussianPulse,
    barrier: "_barrier.RectangularBarrier",
    x,
    t: float,
    log_scale: complex = 0.0,
):
    """Linear-expansion transmitted pulse: the free state, complex-shifted.

    Expands log T(p) to first order around p0, which translates the free
    pulse into the complex plane by the weak shift:
    ``T(p0) exp[i(p0 x - eps0 t)] [2 sigma^2/(pi sigma_t^4)]^{1/4}
    exp[-(X - ybar)^2 / sigma_t^2]`` with X = x - p0 t - x0 the position
    relative to the free-pulse centre.  The regime's true envelope width
    enters (sigma_t^2 = sigma^2 + 2 i t for a massive pulse): besides the
    real shift Re ybar, the imaginary part acts as a momentum kick
    2 Im ybar / sigma^2, and spreading converts that kick into the extra
    displacement 2 t Im ybar / sigma^2 that the exact peak shows.  With the
    width frozen at sigma the formula collapses to the wide-barrier
    closed form.  Everything is assembled in the exponent, so
    ``log_scale`` rescues deep tunnelling.  Use ``expansion_validity`` to
    judge applicability.
    """
    p0 = pulse.p0
    if p0 * p0 >= 2.0 * barrier.height:
        raise OutsideTunnellingRegime("linear-expansion pulse needs p0^2 < 2W")
    ybar = _barrier.weak_shift(barrier, p0).value
    zeta0 = _barrier.log_transmission(barrier, p0)
    sig2 = pulse.sigma**2
    st2 = sig2 + 2j * t if pulse.regime is Regime.MASSIVE else complex(sig2)
    xs = np.asarray(x, dtype=float)
    rel = xs - p0 * t - pulse.x0
    expo = (
        zeta0
        + log_scale
        + 0.25 * math.log(2.0 * sig2 / math.pi)
        - 0.5 * np.log(st2)
        + 1j * (p0 * xs - pulse.energy(p0) * t)
        - (rel - ybar) ** 2 / st2
    )
    vals = np.exp(expo)
    return vals if np.ndim(x) else complex(vals)


def expansion_validity(pulse: GaussianPulse, barrier: "_barrier.RectangularBarrier") -> float:
    """Size of the neglected quadratic term, |2 d kappa''(p0)| / sigma^2.

    Equals 4 (d/sigma)^2 / (W^{1/2} d) at the half-height energy
    p0^2 = W.  Values << 1 mean the complex-shifted Gaussian is faithful.
    """
    p0 = pulse.p0
    k2 = 2.0 * barrier.height - p0 * p0
    if k2 <= 0.0:
        raise OutsideTunnellingRegime("validity parameter defined for p0^2 < 2W")
    kap = math.sqrt(k2)
    kpp = 2.0 * barrier.height / kap**3  # |kappa''|
    return 2.0 * barrier.width * kpp / pulse.sigma**2
