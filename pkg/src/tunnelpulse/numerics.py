"""Uniform grids, deterministic quadrature, Fourier shift spectra, and erfc.

All objects here are immutable values and all operations are pure, so they
are safe to share across threads.  Every reduction goes through numpy's
pairwise summation on arrays in a fixed index order; nothing dispatches to
threaded BLAS.  Identical inputs therefore produce bit-identical outputs
regardless of ambient thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGrid, GridShapeError

__all__ = [
    "MomentumGrid",
    "SpatialGrid",
    "ComplexField",
    "trapezoid_weights",
    "integrate",
    "shift_spectrum",
    "momentum_spectrum",
    "positive_axis_weight",
    "erfc",
    "log_erfc",
]

_TWO_PI = 2.0 * math.pi


def _check_axis(lo: float, hi: float, n_points: int) -> None:
    if n_points < 2:
        raise DegenerateGrid(f"grid needs at least 2 points, got {n_points}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("grid endpoints must be finite")
    if not lo < hi:
        raise ValueError(f"grid endpoints must satisfy lo < hi, got [{lo}, {hi}]")


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform momentum grid (hbar = 1), endpoints inclusive.

    Point i sits exactly at ``p_min + i * spacing`` with
    ``spacing = (p_max - p_min) / (n_points - 1)``.
    """

    p_min: float
    p_max: float
    n_points: int

    def __post_init__(self) -> None:
        _check_axis(self.p_min, self.p_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.p_max - self.p_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_points)

    def refined(self) -> "MomentumGrid":
        """Same window with midpoints inserted (n -> 2n - 1)."""
        return MomentumGrid(self.p_min, self.p_max, 2 * self.n_points - 1)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform coordinate/shift grid, endpoints inclusive."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        _check_axis(self.x_min, self.x_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self) -> "SpatialGrid":
        return SpatialGrid(self.x_min, self.x_max, 2 * self.n_points - 1)


@dataclass(frozen=True)
class ComplexField:
    """Complex amplitudes sampled on a uniform grid.

    The value array is copied, cast to complex128, checked for NaN/Inf and
    frozen, so a constructed field is always finite and immutable.
    """

    grid: MomentumGrid | SpatialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n_points:
            raise ValueError(
                f"field needs {self.grid.n_points} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.grid.n_points


def trapezoid_weights(grid: MomentumGrid | SpatialGrid) -> np.ndarray:
    """Composite trapezoid weights for the grid (read-only array)."""
    w = np.full(grid.n_points, grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    w.setflags(write=False)
    return w


def integrate(field: ComplexField) -> complex:
    """Composite trapezoid approximation of the integral of the field.

    Summation is numpy's pairwise reduction over the fixed index order, so
    the result is reproducible bit for bit.
    """
    if field.grid.n_points < 2:
        raise DegenerateGrid("integration needs at least 2 samples")
    v = field.values
    s = v.sum() - 0.5 * (v[0] + v[-1])
    return complex(s * field.grid.spacing)


def _require_power_of_two(n: int) -> None:
    if n < 2 or (n & (n - 1)) != 0:
        raise GridShapeError(f"transform needs a power-of-two point count, got {n}")


def shift_spectrum(t_of_p: ComplexField) -> ComplexField:
    """Discrete shift spectrum xi(y) of an amplitude sampled in momentum.

    Uses the convention ``T(p) = \\int xi(y) exp(-i y p) dy``, i.e.
    ``xi(y) = (2 pi)^{-1} \\int T(p) exp(+i p y) dp`` discretised on the
    conjugate y-grid: n points spaced ``2 pi / (n dp)`` and centred on
    ``y = 0``.  ``momentum_spectrum`` inverts it to machine precision.
    """
    grid = t_of_p.grid
    if not isinstance(grid, MomentumGrid):
        raise GridShapeError("shift_spectrum expects a field on a MomentumGrid")
    n = grid.n_points
    _require_power_of_two(n)
    dp = grid.spacing
    dy = _TWO_PI / (n * dp)
    y_min = -(n // 2) * dy
    y_grid = SpatialGrid(y_min, y_min + (n - 1) * dy, n)
    y = y_grid.points()
    # e^{i p_j y_k} = e^{i p_min y_k} e^{i j dp y_min} e^{2 pi i j k / n}
    ramp = np.exp(1j * np.arange(n) * dp * y_min)
    xi = (dp * n / _TWO_PI) * np.exp(1j * grid.p_min * y) * np.fft.ifft(t_of_p.values * ramp)
    return ComplexField(y_grid, xi)


def momentum_spectrum(xi: ComplexField, momentum_grid: MomentumGrid) -> ComplexField:
    """Forward transform back to momentum: ``T(p) = \\int xi(y) e^{-i y p} dy``.

    ``momentum_grid`` must be the DFT-conjugate of the field's y-grid
    (matching point count, spacings multiplying to ``2 pi / n``).
    """
    grid = xi.grid
    if not isinstance(grid, SpatialGrid):
        raise GridShapeError("momentum_spectrum expects a field on a SpatialGrid")
    n = grid.n_points
    _require_power_of_two(n)
    if momentum_grid.n_points != n:
        raise GridShapeError("conjugate grids must share the point count")
    dy = grid.spacing
    dp = momentum_grid.spacing
    if abs(dy * dp * n - _TWO_PI) > 1e-9 * _TWO_PI:
        raise GridShapeError("grids are not a DFT-conjugate pair")
    p = momentum_grid.points()
    inner = xi.values * np.exp(-1j * np.arange(n) * dy * momentum_grid.p_min)
    t = dy * np.exp(-1j * p * grid.x_min) * np.fft.fft(inner)
    return ComplexField(momentum_grid, t)


def positive_axis_weight(field: ComplexField) -> float:
    """Fraction of the trapezoid |values|^2 weight lying strictly at grid > 0."""
    w = trapezoid_weights(field.grid)
    density = np.abs(field.values) ** 2 * w
    total = density.sum()
    if total == 0.0:
        raise ValueError("field has zero weight")
    return float(density[field.grid.points() > 0.0].sum() / total)


def erfc(z: float) -> float:
    """Complementary error function (delegates to the platform libm)."""
    return math.erfc(z)


def log_erfc(z: float) -> float:
    """ln erfc(z), usable far beyond the underflow point of erfc itself.

    Below z = 25 this is the exact log of ``math.erfc``; above, the
    large-argument expansion ``e^{-z^2}/(z sqrt(pi)) [1 - 1/(2z^2) + ...]``
    whose truncation error is < 1e-18 relative there.
    """
    if z < 25.0:
        v = math.erfc(z)
        return math.log(v)
    inv = 1.0 / (2.0 * z * z)
    term = 1.0
    series = 0.0
    for n in range(1, 8):
        term *= -(2 * n - 1) * inv
        series += term
    return -z * z - math.log(z * math.sqrt(math.pi)) + math.log1p(series)
