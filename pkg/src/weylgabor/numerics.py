"""Grids, special functions, and spectral utilities shared across the package.

Discrete conventions, once and for all
--------------------------------------

Continuous formulas are discretized on uniform grids with point ``i`` at
``start + i*step``.  Integrals over the line become plain Riemann sums
``step * sum(...)``, which are spectrally accurate for smooth decaying
integrands, and integrals over the phase-space plane carry the cell
measure ``d(omega) d(b) / (2*pi)``.  The forward Fourier kernel is
``exp(-1j*omega*t)``; where a symmetric ``1/sqrt(2*pi)`` normalization is
needed it is written explicitly at the call site, never hidden inside a
helper.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

__all__ = [
    "EdgeEnergyWarning",
    "Grid1D",
    "PhaseSpaceGrid",
    "bessel_i",
    "periodic_trapezoid",
    "fractional_shift",
    "batch_fractional_shift",
    "grid_convolve",
    "find_local_minima",
]


class EdgeEnergyWarning(UserWarning):
    """Samples near the grid edge are large enough to wrap around in a
    spectral shift or convolution."""


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid1D:
    """Uniform grid: point ``i`` sits at ``start + i*step`` for 0 <= i < count.

    Grids are half-open: ``regular(lo, hi, n)`` covers [lo, hi) with n cells
    of width (hi-lo)/n, so ``hi`` itself is not a sample.  This keeps the
    lattice FFT-aligned, makes the cell measure exact, and puts 0 on a
    sample point for symmetric power-of-two windows.
    """

    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if self.count < 2:
            raise ValueError("grid needs at least 2 points")

    @classmethod
    def regular(cls, lo: float, hi: float, n: int) -> "Grid1D":
        """Grid of ``n`` cells covering [lo, hi)."""
        if not hi > lo:
            raise ValueError("need hi > lo")
        return cls(start=float(lo), step=(float(hi) - float(lo)) / int(n), count=int(n))

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def span(self) -> float:
        """Total length covered, ``step * count``."""
        return self.step * self.count

    def angular_frequencies(self) -> np.ndarray:
        """Angular FFT frequency comb 2*pi*k/(count*step), in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.count, d=self.step)

    def origin_index(self) -> int:
        """Index of the sample at 0; raises if 0 is not on the lattice."""
        pos = -self.start / self.step
        k = int(round(pos))
        if abs(pos - k) > 1e-9 or not 0 <= k < self.count:
            raise ValueError("grid origin is not on the lattice")
        return k


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Rectangular (omega, b) lattice; 2-D arrays are indexed [omega, b].

    Every discrete sum over the grid is weighted by the cell measure
    ``d(omega)*d(b)/(2*pi)``.
    """

    omega_axis: Grid1D
    b_axis: Grid1D

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "PhaseSpaceGrid":
        axis = Grid1D.regular(lo, hi, n)
        return cls(omega_axis=axis, b_axis=axis)

    @property
    def shape(self) -> tuple:
        return (self.omega_axis.count, self.b_axis.count)

    @property
    def cell_measure(self) -> float:
        return self.omega_axis.step * self.b_axis.step / (2.0 * np.pi)

    def meshes(self):
        """(omega, b) coordinate arrays of shape ``self.shape``."""
        return np.meshgrid(self.omega_axis.points, self.b_axis.points, indexing="ij")

    def integrate(self, values: np.ndarray):
        """Sum of ``values`` against the cell measure d(omega)d(b)/(2*pi)."""
        values = np.asarray(values)
        if values.shape != self.shape:
            raise ValueError("array shape %r does not match grid %r" % (values.shape, self.shape))
        return self.cell_measure * values.sum()


# ---------------------------------------------------------------------------
# modified Bessel function of the first kind
# ---------------------------------------------------------------------------

_BESSEL_ORDER_CAP = 64
_BESSEL_SERIES_CUTOFF = 30.0


def bessel_i(order: int, x: float) -> float:
    """I_order(x) for integer order >= 0 and x >= 0.

    Ascending power series for x <= 30; downward Miller recurrence with the
    exp(x) sum normalization above that.  Negative arguments are rejected;
    callers can fold them out with I_n(-x) = (-1)^n I_n(x).
    """
    n = int(order)
    if n != order or n < 0 or n > _BESSEL_ORDER_CAP:
        raise ValueError("order must be an integer in [0, %d], got %r" % (_BESSEL_ORDER_CAP, order))
    x = float(x)
    if x < 0.0:
        raise ValueError("x must be non-negative; use I_n(-x) = (-1)^n I_n(x)")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _BESSEL_SERIES_CUTOFF:
        return _bessel_i_series(n, x)
    return _bessel_i_miller(n, x)


def _bessel_i_series(n: int, x: float) -> float:
    # sum_k (x/2)^(n+2k) / (k! (n+k)!)
    half = 0.5 * x
    term = half ** n / math.factorial(n)
    total = term
    for k in range(1, 1000):
        term *= half * half / (k * (n + k))
        total += term
        if term < 1e-18 * total:
            break
    return total


def _bessel_i_miller(n: int, x: float) -> float:
    # Downward recurrence I_{k-1} = I_{k+1} + (2k/x) I_k from a seed well
    # above both the order and the turning point k ~ x, normalized with
    # I_0(x) + 2*sum_{k>=1} I_k(x) = exp(x).
    top = max(n, x)
    start = int(top + 10.0 * math.sqrt(top) + 20.0)
    fp = 0.0          # f_{k+1}
    fc = 1e-30        # f_k, arbitrary seed scale
    total = 0.0
    saved = 0.0
    for k in range(start, 0, -1):
        fm = fp + (2.0 * k / x) * fc
        total += 2.0 * fc
        if k == n:
            saved = fc
        fp, fc = fc, fm
        if abs(fc) > 1e250:
            fc *= 1e-250
            fp *= 1e-250
            total *= 1e-250
            saved *= 1e-250
    total += fc       # fc now holds f_0
    if n == 0:
        saved = fc
    return saved / total * math.exp(x)


# ---------------------------------------------------------------------------
# quadrature and spectral shifts
# ---------------------------------------------------------------------------

def periodic_trapezoid(values: np.ndarray, step: float | None = None):
    """Quadrature over one full period sampled uniformly with no duplicated
    endpoint: step * sum(values).  With ``step`` omitted the grid is assumed
    to cover [0, 2*pi).  Spectrally accurate for smooth periodic integrands.
    """
    values = np.asarray(values)
    if step is None:
        step = 2.0 * np.pi / values.shape[-1]
    return step * values.sum(axis=-1)


def _warn_hot_edges(values: np.ndarray, tol: float, what: str) -> None:
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0.0:
        return
    if values.ndim == 1:
        edge = max(mag[0], mag[-1])
    else:
        edge = max(mag[0, :].max(), mag[-1, :].max(), mag[:, 0].max(), mag[:, -1].max())
    if edge > tol * peak:
        warnings.warn(
            "%s: edge samples reach %.2e of the peak; wrap-around will "
            "contaminate the result" % (what, edge / peak),
            EdgeEnergyWarning,
            stacklevel=3,
        )


def fractional_shift(values: np.ndarray, step: float, shift: float,
                     edge_tol: float = 1e-8) -> np.ndarray:
    """Band-limited translate: samples of t -> s(t - shift) on the same grid.

    Implemented as an FFT phase ramp, so the shift wraps periodically; a
    warning is issued when the input carries visible energy at the grid
    edges.  Shifts by an integer number of samples are exact rolls.
    """
    values = np.asarray(values, dtype=complex)
    if values.ndim != 1:
        raise ValueError("expected a 1-D sample array")
    _warn_hot_edges(values, edge_tol, "fractional_shift")
    cells = shift / step
    nearest = round(cells)
    if abs(cells - nearest) < 1e-12:
        return np.roll(values, int(nearest))
    nu = 2.0 * np.pi * np.fft.fftfreq(values.size, d=step)
    return np.fft.ifft(np.fft.fft(values) * np.exp(-1j * nu * shift))


def batch_fractional_shift(values: np.ndarray, step: float, shifts: np.ndarray,
                           edge_tol: float = 1e-8) -> np.ndarray:
    """Row k of the result holds fractional_shift(values, step, shifts[k]).

    One forward FFT and a single batched inverse FFT, which is the workhorse
    behind windowed transforms (every window position is a shifted copy of
    the same probe).
    """
    values = np.asarray(values, dtype=complex)
    shifts = np.asarray(shifts, dtype=float)
    if values.ndim != 1 or shifts.ndim != 1:
        raise ValueError("expected 1-D sample and shift arrays")
    _warn_hot_edges(values, edge_tol, "batch_fractional_shift")
    nu = 2.0 * np.pi * np.fft.fftfreq(values.size, d=step)
    spectrum = np.fft.fft(values)
    ramps = np.exp(-1j * np.outer(shifts, nu))
    return np.fft.ifft(ramps * spectrum[None, :], axis=1)


def grid_convolve(f: np.ndarray, g: np.ndarray, grid: PhaseSpaceGrid,
                  edge_tol: float = 1e-8) -> np.ndarray:
    """Phase-space convolution (f * g)(x) = sum f(x') g(x - x') dM on the grid,
    with the cell measure dM = d(omega) d(b) / (2*pi).

    Uses a zero-padded FFT convolution, then restricts the full output back
    to the input lattice.  Both axes must contain 0 on a lattice point so
    the restriction is exact; both inputs should decay at the boundary
    (checked, warning only).
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != grid.shape or g.shape != grid.shape:
        raise ValueError("inputs must live on the given grid")
    _warn_hot_edges(f, edge_tol, "grid_convolve (first input)")
    _warn_hot_edges(g, edge_tol, "grid_convolve (second input)")
    s0 = grid.omega_axis.origin_index()
    s1 = grid.b_axis.origin_index()
    n0, n1 = grid.shape
    full = fftconvolve(f, g, mode="full")
    return grid.cell_measure * full[s0:s0 + n0, s1:s1 + n1]


# ---------------------------------------------------------------------------
# minima detection
# ---------------------------------------------------------------------------

def find_local_minima(w: np.ndarray, grid: PhaseSpaceGrid,
                      rel_threshold: float = 1e-2) -> list:
    """Strict interior local minima of a non-negative grid function.

    A grid point qualifies when it is strictly below all 8 neighbors and
    below rel_threshold * max(w) (1.0 keeps every strict minimum).  Each hit
    is refined to sub-cell accuracy
    with a least-squares quadratic fit on its 3x3 neighborhood.  Returns
    [(omega, b, value), ...] sorted by refined value, ascending.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != grid.shape:
        raise ValueError("array shape does not match grid")
    if not 0.0 < rel_threshold <= 1.0:
        raise ValueError("rel_threshold must lie in (0, 1]")
    peak = w.max()
    core = w[1:-1, 1:-1]
    strict = np.ones(core.shape, dtype=bool)
    n0, n1 = w.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            strict &= core < w[1 + di:n0 - 1 + di, 1 + dj:n1 - 1 + dj]
    strict &= core < rel_threshold * peak
    hits = []
    om_pts = grid.omega_axis.points
    b_pts = grid.b_axis.points
    for i, j in zip(*np.nonzero(strict)):
        i, j = int(i) + 1, int(j) + 1
        du, dv, value = _refine_minimum(w, i, j)
        hits.append((om_pts[i] + du * grid.omega_axis.step,
                     b_pts[j] + dv * grid.b_axis.step,
                     value))
    hits.sort(key=lambda t: t[2])
    return hits


_REFINE_DESIGN = None


def _refine_minimum(w: np.ndarray, i: int, j: int):
    """Least-squares quadratic over the 3x3 patch centered at (i, j);
    returns (d_row, d_col, value) with offsets in cell units, clamped to
    one cell."""
    global _REFINE_DESIGN
    if _REFINE_DESIGN is None:
        u, v = np.meshgrid((-1.0, 0.0, 1.0), (-1.0, 0.0, 1.0), indexing="ij")
        u, v = u.ravel(), v.ravel()
        design = np.column_stack([np.ones(9), u, v, u * u, u * v, v * v])
        _REFINE_DESIGN = np.linalg.pinv(design)
    coeff = _REFINE_DESIGN @ w[i - 1:i + 2, j - 1:j + 2].ravel()
    c0, cu, cv, cuu, cuv, cvv = coeff
    hess = np.array([[2.0 * cuu, cuv], [cuv, 2.0 * cvv]])
    try:
        d = np.linalg.solve(hess, [-cu, -cv])
    except np.linalg.LinAlgError:
        d = np.zeros(2)
    if not np.all(np.isfinite(d)) or np.max(np.abs(d)) > 1.0:
        return 0.0, 0.0, float(w[i, j])
    value = (c0 + cu * d[0] + cv * d[1]
             + cuu * d[0] ** 2 + cuv * d[0] * d[1] + cvv * d[1] ** 2)
    return float(d[0]), float(d[1]), float(max(value, 0.0))
