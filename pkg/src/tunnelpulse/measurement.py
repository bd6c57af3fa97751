"""Von Neumann measurements with pre- and post-selection.

A finite-dimensional system with operator eigenvalues A_n is coupled
impulsively to a Gaussian pointer; post-selecting the system leaves the
pointer in a superposition of free states shifted by the eigenvalues,
weighted by c_n = <psi_F|n><n|psi_I>.  The same object can be written as a
momentum integral against the state-dependent amplitude
T(p) = sum_n c_n exp(-i A_n p), which is how tunnelling re-enters the
story: a barrier amplitude of the form B exp[-i F(p) d] realises the
"not really weak" regime where the pointer width, though large, stays
below the (anomalous) weak value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import barrier as _barrier
from .errors import (
    DimensionError,
    NearOrthogonalSelection,
    OutsideTunnellingRegime,
    ScheduleDomainError,
)
from .numerics import ComplexField, MomentumGrid, integrate, log_erfc, trapezoid_weights
from .wavepacket import GaussianPulse, Regime, _phase_sum, free_state

__all__ = [
    "MeasuredOperator",
    "SelectionPair",
    "WeakValue",
    "NrwFamily",
    "spin_half_selection",
    "selection_amplitude",
    "weak_value",
    "weak_value_log_derivative",
    "improper_average",
    "pointer_final_state",
    "pointer_state_momentum_route",
    "gaussian_pointer_approx",
    "sigma_schedule",
    "barrier_nrw_family",
    "nrw_limit_state",
    "TailBound",
    "tail_contribution",
]

_OVERLAP_TOL = 1e-12


@dataclass(frozen=True)
class MeasuredOperator:
    """Operator given by its (possibly degenerate) real eigenvalues."""

    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.eigenvalues, dtype=float, copy=True)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("operator needs at least two eigenvalues")
        if not np.all(np.isfinite(vals)):
            raise ValueError("eigenvalues must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def dimension(self) -> int:
        return int(self.eigenvalues.size)


def _unit_vector(v, what: str) -> np.ndarray:
    arr = np.array(v, dtype=complex, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be a vector")
    norm = math.sqrt(float(np.sum(np.abs(arr) ** 2)))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"{what} must be normalised to 1 (got |v| = {norm!r})")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SelectionPair:
    """Pre- and post-selected states in the operator eigenbasis (unit norm)."""

    pre_state: np.ndarray
    post_state: np.ndarray

    def __post_init__(self) -> None:
        pre = _unit_vector(self.pre_state, "pre_state")
        post = _unit_vector(self.post_state, "post_state")
        if pre.size != post.size:
            raise DimensionError("pre and post states must share a dimension")
        object.__setattr__(self, "pre_state", pre)
        object.__setattr__(self, "post_state", post)

    @property
    def dimension(self) -> int:
        return int(self.pre_state.size)


@dataclass(frozen=True)
class WeakValue:
    """Complex conditional average <psi_F|A|psi_I> / <psi_F|psi_I>."""

    value: complex

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


def spin_half_selection(d: float) -> tuple[MeasuredOperator, SelectionPair]:
    """sigma_z measurement with overlap controlled by the parameter d.

    Pre-selection (|up> + |down>)/sqrt(2); post-selection proportional to
    -|up> + (1 - 1/d)|down>, normalised with N = 1 + (1 - 1/d)^2.  As d
    grows the overlap vanishes while the weak value 2d - 1 diverges.
    """
    if d == 0.0:
        raise ValueError("selection parameter d must be nonzero")
    beta = 1.0 - 1.0 / d
    norm = math.sqrt(1.0 + beta * beta)
    op = MeasuredOperator(np.array([1.0, -1.0]))
    sel = SelectionPair(
        pre_state=np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
        post_state=np.array([-1.0, beta], dtype=complex) / norm,
    )
    return op, sel


def _selection_coefficients(op: MeasuredOperator, sel: SelectionPair) -> np.ndarray:
    if sel.dimension != op.dimension:
        raise DimensionError(
            f"selection dimension {sel.dimension} != operator dimension {op.dimension}"
        )
    return np.conj(sel.post_state) * sel.pre_state


def selection_amplitude(op: MeasuredOperator, sel: SelectionPair, p):
    """State-dependent amplitude sum_n <F|n><n|I> exp(-i A_n p); |.| <= 1."""
    c = _selection_coefficients(op, sel)
    ps = np.asarray(p, dtype=float)
    vals = np.exp(-1j * np.multiply.outer(ps, op.eigenvalues)) @ c
    return vals if np.ndim(p) else complex(vals)


def weak_value(
    op: MeasuredOperator, sel: SelectionPair, tol_overlap: float = _OVERLAP_TOL
) -> WeakValue:
    """Weak value sum_n A_n c_n / sum_n c_n of the measured operator."""
    c = _selection_coefficients(op, sel)
    overlap = complex(c.sum())
    if abs(overlap) <= tol_overlap:
        raise NearOrthogonalSelection(
            f"pre/post overlap {abs(overlap):.2e} below {tol_overlap:.0e}; "
            "weak value diverges"
        )
    return WeakValue(complex((op.eigenvalues * c).sum()) / overlap)


def weak_value_log_derivative(op: MeasuredOperator, sel: SelectionPair) -> complex:
    """Weak value as i d(log T)/dp at p = 0, by Richardson-extrapolated differences.

    Independent of the eigen-sum route; used as its consistency oracle.
    """
    scale = float(np.max(np.abs(op.eigenvalues)))
    h = 1e-4 / (1.0 + scale)

    def dlog(step: float) -> complex:
        tp = selection_amplitude(op, sel, step)
        tm = selection_amplitude(op, sel, -step)
        dz = cmath.log(tp) - cmath.log(tm)
        dz = complex(dz.real, math.remainder(dz.imag, 2.0 * math.pi))
        return dz / (2.0 * step)

    coarse = dlog(h)
    fine = dlog(h / 2.0)
    return 1j * (4.0 * fine - coarse) / 3.0


def improper_average(op: MeasuredOperator, sel: SelectionPair, p0: float = 0.0) -> complex:
    """First moment of the shift-amplitude comb eta(y, p0) over its total weight.

    eta places amplitude c_n e^{-i p0 A_n} at shift y = A_n; the ratio of
    its first moment to its norm is the (improper) average shift, equal to
    the weak value at p0 = 0.
    """
    c = _selection_coefficients(op, sel)
    eta = c * np.exp(-1j * p0 * op.eigenvalues)
    denom = complex(eta.sum())
    if abs(denom) <= _OVERLAP_TOL:
        raise NearOrthogonalSelection("shift-amplitude comb has zero total weight")
    return complex((op.eigenvalues * eta).sum()) / denom


def pointer_final_state(
    op: MeasuredOperator,
    sel: SelectionPair,
    pulse: GaussianPulse,
    x,
    t: float,
    verify: bool = True,
    rtol: float = 1e-8,
):
    """Post-selected pointer state sum_n c_n Psi^0(x - A_n, t) (exact).

    With ``verify`` the independent momentum-integral route is evaluated on
    the same points and the two must agree to ``rtol`` in relative L2 -- the
    measurement analogue of the representation-equivalence oracle.
    """
    c = _selection_coefficients(op, sel)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    shifted = xs[:, None] - op.eigenvalues[None, :]
    vals = (free_state(pulse, shifted, t) * c).sum(axis=1)
    if verify:
        other = np.atleast_1d(pointer_state_momentum_route(op, sel, pulse, xs, t))
        scale = math.sqrt(float(np.sum(np.abs(vals) ** 2)))
        diff = math.sqrt(float(np.sum(np.abs(vals - other) ** 2)))
        if scale > 0.0 and diff / scale > rtol:
            raise RuntimeError(
                f"pointer routes disagree at {diff / scale:.3e} relative L2"
            )
    return vals if np.ndim(x) else complex(vals[0])


def pointer_state_momentum_route(
    op: MeasuredOperator,
    sel: SelectionPair,
    pulse: GaussianPulse,
    x,
    t: float,
    n_points: int = 8193,
    halfwidth: float = 10.0,
):
    """Pointer state via the momentum integral of T(p) C(p) e^{i p x - i eps t}.

    The window is symmetric about p0 (no positivity clip: pointer momenta
    may be negative) and wide enough that the truncated C(p) tail sits well
    below 1e-8.
    """
    grid = pulse.default_momentum_grid(n_points, halfwidth, clip_positive=False)
    x_axis = np.atleast_1d(np.asarray(x, dtype=float))
    p = grid.points()
    coeff = (
        selection_amplitude(op, sel, p)
        * pulse.momentum_distribution(p)
        * np.exp(-1j * pulse.energy(p) * t)
        * trapezoid_weights(grid)
    )
    vals = _phase_sum(x_axis, p, coeff)
    return vals if np.ndim(x) else complex(vals[0])


def gaussian_pointer_approx(op: MeasuredOperator, sel: SelectionPair, pulse: GaussianPulse, x):
    """Heavy-pointer weak-measurement form: one Gaussian, complex-shifted.

    For a static pointer the post-selected state collapses to
    ``T(0) (2/(pi sigma^2))^{1/4} exp[-(x - Abar)^2 / sigma^2]``: a real
    shift by Re Abar plus a momentum kick 2 Im Abar / sigma^2.  Valid when
    the pointer is broad compared to the selection's momentum structure.
    """
    if pulse.regime is not Regime.STATIC:
        raise ValueError("gaussian pointer approximation assumes the static regime")
    abar = weak_value(op, sel).value
    t0 = selection_amplitude(op, sel, 0.0)
    xs = np.asarray(x, dtype=float)
    pref = t0 * (2.0 / (math.pi * pulse.sigma**2)) ** 0.25
    vals = pref * np.exp(-((xs - abar) ** 2) / pulse.sigma**2)
    return vals if np.ndim(x) else complex(vals)


def sigma_schedule(d: float, gamma: float, epsilon: float) -> float:
    """Pointer-width schedule sigma = gamma d^{(1+epsilon)/2}.

    Keeps sigma / d = gamma d^{(epsilon-1)/2} <= gamma < 1, so the spread
    of readings stays below the anomalous shift while still growing fast
    enough to keep the measurement weak.
    """
    if not (d > 0.0 and math.isfinite(d)):
        raise ScheduleDomainError(f"schedule needs d > 0, got {d}")
    if not 0.0 < gamma < 1.0:
        raise ScheduleDomainError(f"schedule needs 0 < gamma < 1, got {gamma}")
    if not 0.0 < epsilon <= 1.0:
        raise ScheduleDomainError(f"schedule needs 0 < epsilon <= 1, got {epsilon}")
    return gamma * d ** (0.5 + 0.5 * epsilon)


@dataclass(frozen=True)
class NrwFamily:
    """Amplitude family B exp[-i F(p) d] with Im F(0) < 0 and d large.

    ``shape`` is F = F1 + i F2 as a callable of momentum; ``derivative``
    (optional) is F'; when omitted it is taken by Richardson-extrapolated
    central differences.  F and its first two derivatives should be order
    unity near p = 0.
    """

    shape: Callable
    prefactor: complex
    d: float
    derivative: Callable | None = None

    def __post_init__(self) -> None:
        if not (self.d > 0.0 and math.isfinite(self.d)):
            raise ValueError("family parameter d must be positive")
        f0 = complex(self.shape(0.0))
        if not (math.isfinite(f0.real) and math.isfinite(f0.imag)):
            raise ValueError("F(0) must be finite")
        if f0.imag >= 0.0:
            raise ValueError("family needs Im F(0) < 0 (decaying amplitude)")

    def shape_derivative(self, p: float) -> complex:
        if self.derivative is not None:
            return complex(self.derivative(p))
        h = 1e-5
        coarse = (complex(self.shape(p + h)) - complex(self.shape(p - h))) / (2.0 * h)
        fine = (complex(self.shape(p + h / 2)) - complex(self.shape(p - h / 2))) / h
        return (4.0 * fine - coarse) / 3.0

    def amplitude(self, p):
        """B exp[-i F(p) d] as a plain callable (array-friendly)."""
        ps = np.asarray(p, dtype=float)
        f = np.asarray(self.shape(ps), dtype=complex)
        vals = self.prefactor * np.exp(-1j * f * self.d)
        return vals if np.ndim(p) else complex(vals)


def barrier_nrw_family(b: "_barrier.RectangularBarrier", p0: float) -> NrwFamily:
    """The tunnelling realisation: F(u) = (p0+u) - i kappa(p0+u) around p0."""
    k2 = 2.0 * b.height - p0 * p0
    if k2 <= 0.0:
        raise OutsideTunnellingRegime("barrier family needs p0^2 < 2W")
    kap0 = math.sqrt(k2)

    def shape(u):
        p = np.asarray(u, dtype=float) + p0
        kap = np.sqrt((2.0 * b.height - p * p).astype(complex))
        vals = p - 1j * kap
        return vals if np.ndim(u) else complex(vals)

    def derivative(u):
        p = np.asarray(u, dtype=float) + p0
        kap = np.sqrt((2.0 * b.height - p * p).astype(complex))
        vals = 1.0 + 1j * p / kap
        return vals if np.ndim(u) else complex(vals)

    prefactor = 4j * p0 * kap0 / (p0 + 1j * kap0) ** 2
    return NrwFamily(shape=shape, prefactor=prefactor, d=b.width, derivative=derivative)


def nrw_limit_state(
    family: NrwFamily,
    gamma: float,
    epsilon: float,
    x,
    log_scale: complex = 0.0,
):
    """Closed-form wide-d pointer state of a "not really weak" measurement.

    A reduced Gaussian of width gamma d^{(1+epsilon)/2} (so the density
    width is that over sqrt(2)) centred at d F1'(0), carrying the momentum
    kick 2 F2'(0) / (gamma^2 d^epsilon); the prefactor follows from the
    complex translation of the heavy-pointer Gaussian by d F'(0).
    """
    sigma = sigma_schedule(family.d, gamma, epsilon)
    f0 = complex(family.shape(0.0))
    abar = family.d * family.shape_derivative(0.0)
    xs = np.asarray(x, dtype=float)
    expo = (
        cmath.log(complex(family.prefactor))
        - 1j * f0 * family.d
        + 0.25 * math.log(2.0 / (math.pi * sigma**2))
        + log_scale
        - (xs - abar) ** 2 / sigma**2
    )
    vals = np.exp(expo)
    return vals if np.ndim(x) else complex(vals)


@dataclass(frozen=True)
class TailBound:
    """Log-domain tail integral and its erfc bound (both natural logs)."""

    log_integral: float
    log_bound: float

    @property
    def integral(self) -> float:
        return math.exp(self.log_integral)

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound)


def tail_contribution(
    amplitude,
    sigma: float,
    p_min: float,
    x: float = 0.0,
    n_points: int = 4097,
) -> TailBound:
    """High-momentum remainder of the pointer integral and its analytic cap.

    Computes ``I = |int_{p_min}^inf e^{-p^2 sigma^2/4} T(p) e^{i p x} dp|``
    by scaled quadrature and the bound ``sqrt(pi)/sigma erfc(sigma p_min/2)``
    that follows from |T| <= 1.  Both are carried as natural logs: at the
    widths used for wide barriers the tail is ~ e^{-10^5}.
    """
    if not (sigma > 0.0 and p_min > 0.0):
        raise ValueError("tail bound needs sigma > 0 and p_min > 0")
    span = 40.0 / sigma
    grid = MomentumGrid(p_min, p_min + span, n_points)
    p = grid.points()
    scale = (sigma * p_min) ** 2 / 4.0
    vals = np.exp(scale - (sigma * p) ** 2 / 4.0 + 1j * p * x) * np.asarray(
        amplitude(p), dtype=complex
    )
    scaled = abs(integrate(ComplexField(grid, vals)))
    log_integral = (math.log(scaled) if scaled > 0.0 else -math.inf) - scale
    log_bound = math.log(math.sqrt(math.pi) / sigma) + log_erfc(sigma * p_min / 2.0)
    if log_integral > log_bound + 1e-9:
        raise RuntimeError(
            "tail integral exceeded its erfc bound; amplitude is not |T| <= 1"
        )
    return TailBound(log_integral, log_bound)
