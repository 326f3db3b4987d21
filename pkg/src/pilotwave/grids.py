"""Uniform periodic grids, wavefunction samples, and spectral calculus.

All derivatives are trigonometric-interpolation (FFT) derivatives, which
gives uniform accuracy at arbitrary order.  The grid engine is capped at
three axes; the symbolic layers above it work in any dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, GridError
from .multiindex import MultiIndex

MAX_GRID_DIM = 3
MAX_POINTS_PER_AXIS = 1024


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid over the box [0, L1) x ... x [0, LN)."""

    lengths: tuple[float, ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        shape = tuple(int(s) for s in self.shape)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "shape", shape)
        if len(lengths) != len(shape):
            raise DimensionMismatchError("lengths and shape must have equal rank")
        if not 1 <= len(shape) <= MAX_GRID_DIM:
            raise GridError(f"grid engine supports 1..{MAX_GRID_DIM} axes, got {len(shape)}")
        if any(length <= 0 for length in lengths):
            raise GridError("domain lengths must be positive")
        for s in shape:
            if not _is_power_of_two(s) or s > MAX_POINTS_PER_AXIS:
                raise GridError(
                    f"points per axis must be a power of two <= {MAX_POINTS_PER_AXIS}, got {s}"
                )

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(L / s for L, s in zip(self.lengths, self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def axis_points(self, axis: int) -> np.ndarray:
        """Coordinates along one axis (0-based axis index)."""
        return np.arange(self.shape[axis]) * self.spacings[axis]

    def meshes(self) -> list[np.ndarray]:
        """Full coordinate meshes, ij indexing."""
        return list(np.meshgrid(*(self.axis_points(a) for a in range(self.dim)), indexing="ij"))

    def wavenumbers(self, axis: int) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.shape[axis], d=self.spacings[axis])

    def max_wavenumbers(self) -> tuple[float, ...]:
        return tuple(np.pi / d for d in self.spacings)

    def center(self) -> np.ndarray:
        return np.asarray(self.lengths) / 2.0


@dataclass
class GridState:
    """Complex wavefunction sampled on a grid, stamped with its time."""

    grid: Grid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise DimensionMismatchError(
                f"state shape {self.values.shape} != grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values.view(float))):
            raise GridError("state contains non-finite values")

    @property
    def dim(self) -> int:
        return self.grid.dim

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def normalized(self) -> "GridState":
        n2 = self.norm_sq()
        if n2 == 0:
            raise GridError("cannot normalize the zero state")
        return GridState(self.grid, self.values / np.sqrt(n2), self.t)

    def copy(self, t: float | None = None) -> "GridState":
        return GridState(self.grid, self.values.copy(), self.t if t is None else t)


# ---------------------------------------------------------------------------
# Spectral calculus

def _symbol(grid: Grid, n: MultiIndex) -> np.ndarray:
    """Fourier symbol prod_a (i k_a)^{n_a}, Nyquist zeroed for odd powers."""
    out = np.ones(grid.shape, dtype=complex)
    for axis, power in enumerate(n.entries):
        if power == 0:
            continue
        k = grid.wavenumbers(axis)
        factor = (1j * k) ** power
        if power % 2 == 1 and grid.shape[axis] % 2 == 0:
            factor[grid.shape[axis] // 2] = 0.0
        shape = [1] * grid.dim
        shape[axis] = grid.shape[axis]
        out = out * factor.reshape(shape)
    return out


def spectral_derivative(values: np.ndarray, grid: Grid, n: MultiIndex) -> np.ndarray:
    """Mixed partial D^n of grid samples by trigonometric interpolation."""
    if n.dim != grid.dim:
        raise DimensionMismatchError(f"multi-index dim {n.dim} != grid dim {grid.dim}")
    if n.order() == 0:
        return np.asarray(values, dtype=complex).copy()
    spectrum = np.fft.fftn(values)
    return np.fft.ifftn(spectrum * _symbol(grid, n))


class DerivativeCache:
    """Caches the FFT of one field and the inverse transforms per multi-index."""

    def __init__(self, values: np.ndarray, grid: Grid):
        self.grid = grid
        self.values = np.asarray(values, dtype=complex)
        self._spectrum = None
        self._cache: dict[MultiIndex, np.ndarray] = {}

    def derivative(self, n: MultiIndex) -> np.ndarray:
        if n.order() == 0:
            return self.values
        hit = self._cache.get(n)
        if hit is None:
            if self._spectrum is None:
                self._spectrum = np.fft.fftn(self.values)
            hit = np.fft.ifftn(self._spectrum * _symbol(self.grid, n))
            self._cache[n] = hit
        return hit


def spectral_gradient(values: np.ndarray, grid: Grid) -> list[np.ndarray]:
    return [
        spectral_derivative(values, grid, MultiIndex.unit(axis, grid.dim))
        for axis in range(1, grid.dim + 1)
    ]


def spectral_divergence(components, grid: Grid) -> np.ndarray:
    """Divergence of a (real or complex) vector field, returned real."""
    if len(components) != grid.dim:
        raise DimensionMismatchError(f"{len(components)} components for grid dim {grid.dim}")
    total = np.zeros(grid.shape, dtype=complex)
    for axis, comp in enumerate(components, start=1):
        total += spectral_derivative(np.asarray(comp, dtype=complex), grid, MultiIndex.unit(axis, grid.dim))
    return total.real
