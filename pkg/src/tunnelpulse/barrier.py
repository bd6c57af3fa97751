"""Rectangular-barrier scattering amplitudes and the complex weak shift.

Units are hbar = m = 1 throughout: a barrier of height W and width d
transmits momentum p with decay constant kappa = sqrt(2W - p^2) under the
barrier.  Amplitudes are evaluated in a form that stays finite through the
branch point p^2 = 2W and, for deep tunnelling, in log form so that
kappa*d ~ 10^3 (transmission ~ e^{-1000}) remains usable downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    BranchPointSingularity,
    InvalidMomentum,
    OutsideTunnellingRegime,
)
from .numerics import ComplexField, MomentumGrid, shift_spectrum

__all__ = [
    "RectangularBarrier",
    "WeakShift",
    "kappa",
    "transmission_amplitude",
    "log_transmission",
    "asymptotic_transmission",
    "weak_shift",
    "phase_time",
    "causal_shift_spectrum",
]

# Above this value of kappa*d the e^{-2 kappa d} term is < 1e-26 and the
# factored deep-tunnelling form is free of cancellation; below it the
# sinh-based form is exact (including the branch point) and cannot overflow.
_DEEP_KD = 30.0

_BRANCH_EPS = 1e-8  # relative half-width of the excluded branch-point zone


@dataclass(frozen=True)
class RectangularBarrier:
    """Rectangular potential of height ``height`` on 0 <= x <= ``width``."""

    height: float
    width: float

    def __post_init__(self) -> None:
        if not (self.height > 0.0 and math.isfinite(self.height)):
            raise ValueError(f"barrier height must be positive, got {self.height}")
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ValueError(f"barrier width must be positive, got {self.width}")


@dataclass(frozen=True)
class WeakShift:
    """Complex spatial shift ybar = i d(log T)/dp of the transmitted pulse.

    ``re_shift`` is the spatial advancement relative to free propagation;
    ``im_shift`` feeds the overall size reduction of the pulse.
    """

    re_shift: float
    im_shift: float

    @property
    def value(self) -> complex:
        return complex(self.re_shift, self.im_shift)


def _as_positive_momenta(p) -> tuple[np.ndarray, bool]:
    scalar = np.ndim(p) == 0
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise InvalidMomentum("momentum must be finite")
    if np.any(arr <= 0.0):
        raise InvalidMomentum("transmission amplitude is defined for p > 0")
    return arr, scalar


def kappa(barrier: RectangularBarrier, p) -> complex | np.ndarray:
    """Decay constant kappa = (2W - p^2)^{1/2}, principal branch.

    Real positive under the barrier (p^2 < 2W), ``+i sqrt(p^2 - 2W)`` above
    it, and exactly zero at the branch point.
    """
    scalar = np.ndim(p) == 0
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    k = np.sqrt((2.0 * barrier.height - arr * arr).astype(complex))
    return complex(k[0]) if scalar else k


def _amplitude_values(w: float, d: float, p: np.ndarray) -> np.ndarray:
    """Exact transmission amplitude for an array of momenta p > 0."""
    kap = np.sqrt((2.0 * w - p * p).astype(complex))
    u = kap * d
    out = np.empty(p.shape, dtype=complex)

    shallow = u.real <= _DEEP_KD
    if np.any(shallow):
        ps = p[shallow]
        us = u[shallow]
        # sinh(u)/u is even in kappa and finite at the branch point, so this
        # form needs no branch handling at all.
        sinhc = np.empty_like(us)
        tiny = np.abs(us) < 1e-4
        sinhc[tiny] = 1.0 + us[tiny] ** 2 / 6.0 + us[tiny] ** 4 / 120.0
        sinhc[~tiny] = np.sinh(us[~tiny]) / us[~tiny]
        denom = 2.0 * (ps * ps - w) * d * sinhc + 2j * ps * np.cosh(us)
        out[shallow] = 2j * ps * np.exp(-1j * ps * d) / denom

    deep = ~shallow
    if np.any(deep):
        pd_ = p[deep]
        kd = kap[deep].real
        g = (pd_ + 1j * kd) ** 2 - (pd_ - 1j * kd) ** 2 * np.exp(-2.0 * kd * d)
        # honest underflow: |T| ~ e^{-kappa d} reaches 0.0 beyond kd ~ 745
        out[deep] = 4j * pd_ * kd * np.exp(-1j * pd_ * d) * np.exp(-kd * d) / g
    return out


def _log_amplitude_values(w: float, d: float, p: np.ndarray) -> np.ndarray:
    """Complex zeta(p) with T(p) = exp(zeta(p)), finite for any kappa*d."""
    kap = np.sqrt((2.0 * w - p * p).astype(complex))
    u = kap * d
    out = np.empty(p.shape, dtype=complex)

    shallow = u.real <= _DEEP_KD
    if np.any(shallow):
        out[shallow] = np.log(_amplitude_values(w, d, p[shallow]))

    deep = ~shallow
    if np.any(deep):
        pd_ = p[deep]
        kd = kap[deep].real
        g = (pd_ + 1j * kd) ** 2 - (pd_ - 1j * kd) ** 2 * np.exp(-2.0 * kd * d)
        out[deep] = (
            np.log(4.0 * pd_ * kd)
            - kd * d
            + 1j * (0.5 * math.pi - pd_ * d)
            - np.log(g)
        )
    return out


def transmission_amplitude(barrier: RectangularBarrier, p) -> complex | np.ndarray:
    """Exact transmission amplitude T(p) of the rectangular barrier.

    Satisfies |T(p)| <= 1, is continuous through p = sqrt(2W), and is
    invariant under the sign of the kappa branch.  Deep in the tunnelling
    regime the linear-domain value underflows honestly to 0.0; use
    ``log_transmission`` there.
    """
    arr, scalar = _as_positive_momenta(p)
    vals = _amplitude_values(barrier.height, barrier.width, arr)
    return complex(vals[0]) if scalar else vals


def log_transmission(barrier: RectangularBarrier, p) -> complex | np.ndarray:
    """log T(p) (principal imaginary part per evaluation, not unwrapped)."""
    arr, scalar = _as_positive_momenta(p)
    vals = _log_amplitude_values(barrier.height, barrier.width, arr)
    return complex(vals[0]) if scalar else vals


def asymptotic_transmission(barrier: RectangularBarrier, p) -> complex | np.ndarray:
    """Wide-barrier form: prefactor times exp[-i (p - i kappa) d].

    The prefactor ``4 i p kappa / (p + i kappa)^2`` is evaluated at the
    requested momentum.  Relative deviation from the exact amplitude decays
    as e^{-2 kappa d}.
    """
    arr, scalar = _as_positive_momenta(p)
    w, d = barrier.height, barrier.width
    k2 = 2.0 * w - arr * arr
    if np.any(k2 <= 0.0):
        raise OutsideTunnellingRegime("asymptotic form needs p^2 < 2W")
    kap = np.sqrt(k2)
    vals = 4j * arr * kap * np.exp(-1j * arr * d - kap * d) / (arr + 1j * kap) ** 2
    return complex(vals[0]) if scalar else vals


def _check_shift_point(barrier: RectangularBarrier, p0: float) -> None:
    if not (math.isfinite(p0) and p0 > 0.0):
        raise InvalidMomentum("weak shift needs p0 > 0")
    if abs(2.0 * barrier.height - p0 * p0) < _BRANCH_EPS * barrier.height:
        raise BranchPointSingularity(
            f"p0 = {p0} sits on the branch point p^2 = 2W of the barrier"
        )


def _weak_shift_analytic(w: float, d: float, p: float) -> complex:
    kap = cmath.sqrt(complex(2.0 * w - p * p))
    kp = -p / kap
    e2 = cmath.exp(-2.0 * kap * d) if (kap * d).real < 350.0 else 0.0
    g = (p + 1j * kap) ** 2 - (p - 1j * kap) ** 2 * e2
    dg = 2.0 * (p + 1j * kap) * (1.0 + 1j * kp) - e2 * (
        2.0 * (p - 1j * kap) * (1.0 - 1j * kp) - 2.0 * d * kp * (p - 1j * kap) ** 2
    )
    dlog = 1.0 / p + kp / kap - 1j * d - kp * d - dg / g
    return 1j * dlog


def _weak_shift_fd(barrier: RectangularBarrier, p0: float) -> complex:
    # central differences on log T; the step is relative so p0 - h stays > 0
    h = 1e-5 * p0
    zp = log_transmission(barrier, p0 + h)
    zm = log_transmission(barrier, p0 - h)
    dz = zp - zm
    # the two logs may land on different branches; the true phase change
    # over 2h is small, so wrap to the nearest representative
    dz = complex(dz.real, math.remainder(dz.imag, 2.0 * math.pi))
    return 1j * dz / (2.0 * h)


def weak_shift(
    barrier: RectangularBarrier,
    p0: float,
    method: Literal["analytic", "finite_difference"] = "analytic",
) -> WeakShift:
    """Complex shift ybar(p0) = i T^{-1} dT/dp of the transmitted pulse.

    ``analytic`` differentiates the closed-form amplitude; the
    ``finite_difference`` route differences log T with a relative step of
    1e-5 (central), avoiding the exponentially small modulus.  For a wide
    barrier ybar approaches d + i p0 d / kappa0.
    """
    _check_shift_point(barrier, p0)
    if method == "analytic":
        val = _weak_shift_analytic(barrier.height, barrier.width, p0)
    elif method == "finite_difference":
        val = _weak_shift_fd(barrier, p0)
    else:
        raise ValueError(f"unknown weak-shift method {method!r}")
    return WeakShift(val.real, val.imag)


def phase_time(barrier: RectangularBarrier, p0: float) -> float:
    """Wigner phase time (d - Re ybar) m / p0 with m = 1.

    Saturates to a width-independent constant for wide barriers (the
    Hartman effect).
    """
    shift = weak_shift(barrier, p0)
    return (barrier.width - shift.re_shift) / p0


def _amplitude_real_axis(w: float, d: float, p: np.ndarray) -> np.ndarray:
    """T(p) on the whole real axis via T(-p) = conj T(p), T(0) = 0."""
    out = np.zeros(p.shape, dtype=complex)
    pos = p > 0.0
    neg = p < 0.0
    if np.any(pos):
        out[pos] = _amplitude_values(w, d, p[pos])
    if np.any(neg):
        out[neg] = np.conj(_amplitude_values(w, d, -p[neg]))
    return out


def _resonance_poles(
    w: float, d: float, im_cutoff: float, n_max: int = 40
) -> list[tuple[complex, complex]]:
    """Above-threshold poles of T nearest the real axis, with residues.

    Poles solve (p - q)^2 e^{2 i q d} = (p + q)^2 with q = sqrt(p^2 - 2W);
    near threshold q_n ~ n pi / d and Im p_n ~ -2 (n pi)^2 / (2 W d^3), so
    wide barriers trap long resonant delays.  Iteration stops once poles
    sink below ``im_cutoff``.  Skipped entirely for narrow barriers where
    the fixed point is not a contraction (their tails are short anyway).
    """
    poles: list[tuple[complex, complex]] = []
    if 2.0 / (math.sqrt(2.0 * w) * d) > 0.7:
        return poles
    for n in range(1, n_max + 1):
        q = complex(n * math.pi / d, 0.0)
        for _ in range(200):
            p = cmath.sqrt(q * q + 2.0 * w)
            q_next = n * math.pi / d - (1j / d) * cmath.log((p + q) / (p - q))
            if abs(q_next - q) < 1e-15 * (abs(q) + 1.0):
                q = q_next
                break
            q = q_next
        p = cmath.sqrt(q * q + 2.0 * w)
        kap = 1j * q
        kp = -p / kap
        ekd = cmath.exp(kap * d)
        numer = 4j * p * kap * cmath.exp(-1j * p * d)
        d_deriv = (
            (2.0 * (p + 1j * kap) * (1.0 + 1j * kp) + (p + 1j * kap) ** 2 * kp * d) * ekd
            - (2.0 * (p - 1j * kap) * (1.0 - 1j * kp) - (p - 1j * kap) ** 2 * kp * d) / ekd
        )
        poles.append((p, numer / d_deriv))
        if p.imag < -im_cutoff:
            break
    return poles


def causal_shift_spectrum(barrier: RectangularBarrier, n_points: int = 2**14) -> ComplexField:
    """Shift spectrum xi(y) of the barrier on a wide symmetric window.

    Everything that decays slowly in momentum is removed before the DFT
    and restored from its exact transform, each piece confined to y <= 0:

    - the unit background (T -> 1) becomes the discrete delta on the
      y = 0 bin;
    - the 1/p tail is carried by ``c / (a - i p)``, whose transform is
      ``c e^{a y}``;
    - the near-threshold resonance poles of T (and their mirror partners)
      become decaying exponentials ``-i r e^{i p_n y}`` -- without this the
      long resonant delay tails alias into y > 0 at the 1e-5 level for
      wide barriers.

    Only the fast-decaying smooth remainder is transformed numerically
    (no taper), which keeps the spurious y > 0 weight near 1e-9, well
    inside the 1e-6 causality budget.
    """
    w, d = barrier.height, barrier.width
    # remaining tail after the 1/p, 1/p^2 matching is ~ c3 / p^3
    c3 = (w * d) ** 3 / 12.0 + 0.5 * w * w * d + w / d
    p_half = max(8.0 * math.sqrt(2.0 * w), (2.0 * c3 / 3e-4) ** (1.0 / 3.0))
    # the conjugate y window must hold the exponential templates and the
    # oscillatory structure extending a few barrier widths below zero
    a0 = 1.0 / d + 0.5 * w * d
    y_need = 6.0 * d + 60.0 / a0 + 30.0 / math.sqrt(2.0 * w)
    p_half = min(p_half, math.pi * n_points / (2.0 * y_need))
    y_half = math.pi * n_points / (2.0 * p_half)
    poles = _resonance_poles(w, d, im_cutoff=30.0 / y_half)

    # re-match the 1/p and 1/p^2 coefficients after pole subtraction
    sum_im_r = sum(r.imag for _, r in poles)
    sum_re_rp = sum((r * pn).real for pn, r in poles)
    c = -w * d - 2.0 * sum_im_r
    a_num = -(w + (w * d) ** 2 / 2.0 + 2.0 * sum_re_rp)
    a = a_num / c if (c < 0.0 and a_num / c > 0.0) else a0

    dp = 2.0 * p_half / n_points
    grid = MomentumGrid(-p_half, -p_half + (n_points - 1) * dp, n_points)
    p = grid.points()
    residual = _amplitude_real_axis(w, d, p) - 1.0 - c / (a - 1j * p)
    for pn, r in poles:
        residual -= r / (p - pn) - np.conj(r) / (p + np.conj(pn))
    xi = shift_spectrum(ComplexField(grid, residual))
    y = xi.grid.points()
    vals = xi.values.copy()
    neg = y < 0.0
    vals[neg] += c * np.exp(a * y[neg])
    for pn, r in poles:
        vals[neg] += 2.0 * np.real(-1j * r * np.exp(1j * pn * y[neg]))
    k0 = n_points // 2  # the y = 0 bin; each template jump contributes its midpoint
    vals[k0] += 0.5 * c + sum((-1j * r).real for _, r in poles)
    vals[k0] += 1.0 / xi.grid.spacing  # unit background -> discrete delta
    return ComplexField(xi.grid, vals)
