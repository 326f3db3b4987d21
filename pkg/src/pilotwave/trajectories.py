"""Guidance-equation trajectories, equilibrium sampling, equivariance.

The configuration moves with velocity j/|psi|^2.  Between PDE snapshots the
current and density grids are interpolated linearly in time, and particles
advance with classical RK4; near a node of psi (density below NODE_EPS times
its maximum) the velocity is singular and the particle is truncated —
flagged and frozen, never silently dropped and never velocity-capped, since
capping would quietly break equivariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .currents import CurrentTable, VectorField, eval_current
from .errors import (
    DimensionMismatchError,
    NodeError,
    PilotwaveError,
    TruncationError,
)
from .grids import Grid, GridState
from .operators import DifferentialOperator, SamplingSpec, require_hermitian

NODE_EPS = 1e-10
MAX_TRUNCATED_FRACTION = 0.10


# ---------------------------------------------------------------------------
# Multilinear periodic interpolation

def interpolate(grid: Grid, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Multilinear interpolation with periodic wrap; points shape (M, N)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != grid.dim:
        raise DimensionMismatchError(f"points have {points.shape[1]} coords, grid dim {grid.dim}")
    out = np.zeros(points.shape[0], dtype=values.dtype)
    fractional = []
    base = []
    for axis in range(grid.dim):
        u = points[:, axis] / grid.spacings[axis]
        i0 = np.floor(u).astype(int)
        fractional.append(u - i0)
        base.append(np.mod(i0, grid.shape[axis]))
    for corner in range(1 << grid.dim):
        weight = np.ones(points.shape[0])
        idx = []
        for axis in range(grid.dim):
            if corner >> axis & 1:
                idx.append(np.mod(base[axis] + 1, grid.shape[axis]))
                weight = weight * fractional[axis]
            else:
                idx.append(base[axis])
                weight = weight * (1.0 - fractional[axis])
        out = out + weight * values[tuple(idx)]
    return out


# ---------------------------------------------------------------------------
# Ensembles

@dataclass
class Ensemble:
    """Configuration-space points with their recorded trajectory history."""

    positions: np.ndarray  # (M, N)
    seed: int
    source: str = "density"
    times: list[float] = field(default_factory=list)
    history: list[np.ndarray] = field(default_factory=list)
    truncated: np.ndarray | None = None

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if self.truncated is None:
            self.truncated = np.zeros(self.positions.shape[0], dtype=bool)
        if not self.times:
            self.times = [0.0]
            self.history = [self.positions.copy()]

    @property
    def count(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def truncated_fraction(self) -> float:
        return float(np.mean(self.truncated))


def sample_density(rho: np.ndarray, grid: Grid, count: int, seed: int) -> Ensemble:
    """Rejection sampling against the grid maximum, with multilinear density."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != grid.shape:
        raise DimensionMismatchError("density shape does not match grid")
    peak = float(rho.max())
    if peak <= 0.0:
        raise PilotwaveError("density is identically zero")
    if rho.min() < -1e-12 * peak:
        raise PilotwaveError("density has negative values")
    rho = np.clip(rho, 0.0, None)
    rng = np.random.default_rng(seed)
    lengths = np.asarray(grid.lengths)
    accepted = np.empty((0, grid.dim))
    drawn = 0
    budget = max(10_000_000, 10_000 * count)
    while accepted.shape[0] < count:
        if drawn > budget:
            raise PilotwaveError(
                f"rejection sampler accepted only {accepted.shape[0]}/{count} "
                f"after {drawn} draws; density is too concentrated for this grid"
            )
        batch = max(1024, 2 * (count - accepted.shape[0]))
        drawn += batch
        proposals = rng.uniform(0.0, 1.0, (batch, grid.dim)) * lengths
        acceptance = rng.uniform(0.0, peak, batch)
        keep = acceptance < interpolate(grid, rho, proposals)
        accepted = np.vstack([accepted, proposals[keep]])
    positions = accepted[:count]
    return Ensemble(positions, seed=seed, source="density", times=[], history=[])


# ---------------------------------------------------------------------------
# Velocities

def velocity(state: GridState, current: VectorField, q) -> np.ndarray:
    """Guidance velocity j(q)/|psi(q)|^2 at a single point."""
    if current.grid != state.grid:
        raise DimensionMismatchError("current and state must share one grid")
    point = np.atleast_2d(np.asarray(q, dtype=float))
    density = state.density()
    rho = interpolate(state.grid, density, point)[0]
    floor = NODE_EPS * float(density.max())
    if rho < floor:
        raise NodeError(f"|psi|^2 = {rho:.3e} below node threshold {floor:.3e} at q = {q}")
    return np.array(
        [interpolate(state.grid, comp, point)[0] / rho for comp in current.components]
    )


class _FlowField:
    """Snapshot stack with linear-in-time interpolation of rho and j."""

    def __init__(self, snapshots: list[GridState], table: CurrentTable):
        if len(snapshots) < 2:
            raise PilotwaveError("need at least two snapshots to integrate trajectories")
        self.grid = snapshots[0].grid
        self.times = np.array([s.t for s in snapshots])
        if np.any(np.diff(self.times) <= 0):
            raise PilotwaveError("snapshots must be strictly time-ordered")
        self.densities = [s.density() for s in snapshots]
        self.currents = [eval_current(table, s).components for s in snapshots]
        self.node_floor = NODE_EPS * max(float(d.max()) for d in self.densities)

    def velocities(self, points: np.ndarray, t: float, active: np.ndarray):
        """Velocities for the active subset; returns (velocities, node_mask)."""
        k = int(np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.times) - 2))
        t0, t1 = self.times[k], self.times[k + 1]
        w = float(np.clip((t - t0) / (t1 - t0), 0.0, 1.0))
        pts = points[active]
        rho = (1.0 - w) * interpolate(self.grid, self.densities[k], pts) + w * interpolate(
            self.grid, self.densities[k + 1], pts
        )
        nodes = rho < self.node_floor
        rho_safe = np.where(nodes, 1.0, rho)
        vel = np.empty_like(pts)
        for axis in range(self.grid.dim):
            j = (1.0 - w) * interpolate(self.grid, self.currents[k][axis], pts) + w * interpolate(
                self.grid, self.currents[k + 1][axis], pts
            )
            vel[:, axis] = j / rho_safe
        vel[nodes] = 0.0
        return vel, nodes


def integrate_trajectories(
    snapshots: list[GridState],
    table: CurrentTable,
    ensemble: Ensemble,
    substeps: int = 4,
) -> Ensemble:
    """RK4 integration of dq/dt = j/|psi|^2 across the snapshot window.

    Particles that enter a node region are truncated: frozen at their last
    position and flagged.  Raises when every particle is truncated.
    """
    flow = _FlowField(snapshots, table)
    if ensemble.dim != flow.grid.dim:
        raise DimensionMismatchError("ensemble dimension does not match snapshots")
    lengths = np.asarray(flow.grid.lengths)
    positions = np.mod(ensemble.positions.copy(), lengths)
    truncated = ensemble.truncated.copy()
    times = [float(flow.times[0])]
    history = [positions.copy()]

    for k in range(len(flow.times) - 1):
        t0, t1 = float(flow.times[k]), float(flow.times[k + 1])
        dt = (t1 - t0) / substeps
        for sub in range(substeps):
            t = t0 + sub * dt
            active = ~truncated
            if not np.any(active):
                break
            pts = positions

            def stage(offset_positions, stage_t):
                vel, nodes = flow.velocities(offset_positions, stage_t, active)
                full = np.zeros_like(positions)
                full[active] = vel
                hit = np.zeros(positions.shape[0], dtype=bool)
                hit[active] = nodes
                return full, hit

            k1, h1 = stage(pts, t)
            k2, h2 = stage(np.mod(pts + 0.5 * dt * k1, lengths), t + 0.5 * dt)
            k3, h3 = stage(np.mod(pts + 0.5 * dt * k2, lengths), t + 0.5 * dt)
            k4, h4 = stage(np.mod(pts + dt * k3, lengths), t + dt)
            stage_trunc = h1 | h2 | h3 | h4
            move = active & ~stage_trunc
            positions[move] = np.mod(
                positions[move]
                + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)[move],
                lengths[None, :],
            )
            truncated |= stage_trunc
        times.append(t1)
        history.append(positions.copy())

    if np.all(truncated):
        raise TruncationError("every trajectory hit a node; no usable ensemble remains")
    return Ensemble(
        positions,
        seed=ensemble.seed,
        source=ensemble.source,
        times=times,
        history=history,
        truncated=truncated,
    )


# ---------------------------------------------------------------------------
# Kolmogorov–Smirnov machinery

def ks_critical_99(count: int) -> float:
    """99% one-sample Kolmogorov-Smirnov critical value, 1.63/sqrt(M)."""
    return 1.63 / math.sqrt(count)


def _axis_cdf(grid: Grid, density: np.ndarray, axis: int):
    """Marginal CDF nodes/values along one axis (trapezoid, periodic closure)."""
    other = tuple(a for a in range(grid.dim) if a != axis)
    marginal = density.sum(axis=other) if other else density.copy()
    dx = grid.spacings[axis]
    nodes = np.append(grid.axis_points(axis), grid.lengths[axis])
    closed = np.append(marginal, marginal[0])
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (closed[1:] + closed[:-1]) * dx)])
    total = cdf[-1]
    if total <= 0:
        raise PilotwaveError("cannot build a CDF from a zero marginal density")
    return nodes, cdf / total


def ks_distance_to_density(samples: np.ndarray, grid: Grid, density: np.ndarray) -> float:
    """KS statistic of sampled positions against a grid density.

    Full one-dimensional KS for one axis; the maximum of per-axis marginal
    KS statistics in higher dimension.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    worst = 0.0
    for axis in range(grid.dim):
        nodes, cdf = _axis_cdf(grid, density, axis)
        xs = np.sort(np.mod(samples[:, axis], grid.lengths[axis]))
        model = np.interp(xs, nodes, cdf)
        m = len(xs)
        empirical_hi = np.arange(1, m + 1) / m
        empirical_lo = np.arange(0, m) / m
        d = float(np.max(np.maximum(np.abs(model - empirical_hi), np.abs(model - empirical_lo))))
        worst = max(worst, d)
    return worst


# ---------------------------------------------------------------------------
# Equivariance

@dataclass
class EquivarianceReport:
    ks_distance: float
    truncated_fraction: float
    baseline_ks: float
    count: int
    horizon: float
    seed: int
    valid: bool

    def to_dict(self) -> dict:
        return {
            "ks_distance": self.ks_distance,
            "truncated_fraction": self.truncated_fraction,
            "baseline_ks": self.baseline_ks,
            "count": self.count,
            "horizon": self.horizon,
            "seed": self.seed,
            "valid": self.valid,
        }


def equivariance_test(
    H: DifferentialOperator,
    psi0: GridState,
    count: int,
    horizon: float,
    seed: int,
    evolution_spec=None,
    substeps: int = 4,
    check: SamplingSpec | None = None,
) -> EquivarianceReport:
    """Sample |psi0|^2, integrate guided trajectories to the horizon, and
    compare the empirical distribution against |psi(T)|^2."""
    from .currents import derive_current_table
    from .solver import EvolutionSpec, evolve, stability_estimate

    require_hermitian(H, check)
    if evolution_spec is None:
        radius = stability_estimate(H, psi0.grid, psi0.t)
        dt_max = 1.0 / radius if radius > 0 else horizon / 100.0
        steps = max(100, int(math.ceil(horizon / dt_max)))
        evolution_spec = EvolutionSpec(
            dt=horizon / steps, steps=steps, stride=max(1, steps // 100)
        )
    table = derive_current_table(H, check)
    snapshots = evolve(H, psi0, evolution_spec)
    ensemble = sample_density(psi0.density(), psi0.grid, count, seed)
    baseline = ks_distance_to_density(ensemble.positions, psi0.grid, psi0.density())
    final = integrate_trajectories(snapshots, table, ensemble, substeps=substeps)
    kept = final.positions[~final.truncated]
    ks = ks_distance_to_density(kept, psi0.grid, snapshots[-1].density())
    fraction = final.truncated_fraction()
    return EquivarianceReport(
        ks_distance=ks,
        truncated_fraction=fraction,
        baseline_ks=baseline,
        count=count,
        horizon=horizon,
        seed=seed,
        valid=fraction <= MAX_TRUNCATED_FRACTION,
    )
