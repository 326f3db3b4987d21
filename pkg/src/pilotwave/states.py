"""Named wavefunction presets and the state-spec text format.

State files use the same key = value syntax as Hamiltonian files::

    state = gaussian
    center = [20.0]
    width = 0.5
    wavevector = [1.0]

Superpositions list weighted components on repeated lines::

    state = superposition
    component = 0.7071 | ho-eigenstate levels=[0] center=[20]
    component = (0.5+0.5*i) | gaussian center=[22] width=0.5

A state file may also carry optional `grid = [512]` and `domain = [40.0]`
entries; command-line flags take precedence over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite as nph

from . import expr
from .errors import HamiltonianFormatError
from .grids import Grid, GridState


def _per_axis(value, dim: int, name: str) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)] * dim
    values = [float(v) for v in value]
    if len(values) != dim:
        raise HamiltonianFormatError(f"{name} needs {dim} entries, got {len(values)}")
    return values


def gaussian(grid: Grid, center=None, width=1.0, wavevector=None) -> GridState:
    """Normalized Gaussian packet; `width` is the density standard deviation."""
    dim = grid.dim
    center = grid.center() if center is None else _per_axis(center, dim, "center")
    widths = _per_axis(width, dim, "width")
    ks = [0.0] * dim if wavevector is None else _per_axis(wavevector, dim, "wavevector")
    meshes = grid.meshes()
    phase = np.zeros(grid.shape)
    envelope = np.zeros(grid.shape)
    for mesh, c, sigma, k in zip(meshes, center, widths, ks):
        envelope = envelope - (mesh - c) ** 2 / (4.0 * sigma ** 2)
        phase = phase + k * mesh
    return GridState(grid, np.exp(envelope + 1j * phase)).normalized()


def plane_wave(grid: Grid, wavevector) -> GridState:
    """Unit-amplitude plane wave, wavevector snapped to the grid lattice."""
    ks = _per_axis(wavevector, grid.dim, "wavevector")
    meshes = grid.meshes()
    phase = np.zeros(grid.shape)
    for axis, (mesh, k) in enumerate(zip(meshes, ks)):
        unit = 2.0 * np.pi / grid.lengths[axis]
        phase = phase + unit * round(k / unit) * mesh
    return GridState(grid, np.exp(1j * phase))


def commensurate_wavevector(grid: Grid, wavevector) -> list[float]:
    ks = _per_axis(wavevector, grid.dim, "wavevector")
    return [
        2.0 * np.pi / L * round(k * L / (2.0 * np.pi)) for k, L in zip(ks, grid.lengths)
    ]


def ho_eigenstate(grid: Grid, levels, center=None, frequency=1.0, mass=1.0) -> GridState:
    """Harmonic-oscillator eigenstate product over axes.

    Eigenstate of -(1/2m) lap + m w^2 |q - c|^2 / 2 with per-axis quantum
    numbers `levels`.
    """
    dim = grid.dim
    if isinstance(levels, (int, float)):
        levels = [int(levels)] * dim
    levels = [int(v) for v in levels]
    if len(levels) != dim:
        raise HamiltonianFormatError(f"levels needs {dim} entries, got {len(levels)}")
    center = grid.center() if center is None else _per_axis(center, dim, "center")
    scale = math.sqrt(mass * frequency)
    meshes = grid.meshes()
    values = np.ones(grid.shape, dtype=complex)
    for mesh, c, n in zip(meshes, center, levels):
        u = scale * (mesh - c)
        hermite_coef = [0.0] * n + [1.0]
        norm = (mass * frequency / math.pi) ** 0.25 / math.sqrt(2.0 ** n * math.factorial(n))
        values = values * (norm * nph.hermval(u, hermite_coef) * np.exp(-0.5 * u ** 2))
    return GridState(grid, values).normalized()


def superposition(components: list[tuple[complex, GridState]]) -> GridState:
    if not components:
        raise HamiltonianFormatError("superposition needs at least one component")
    grid = components[0][1].grid
    total = np.zeros(grid.shape, dtype=complex)
    for coef, state in components:
        if state.grid != grid:
            raise HamiltonianFormatError("superposition components must share one grid")
        total = total + complex(coef) * state.values
    return GridState(grid, total).normalized()


# ---------------------------------------------------------------------------
# State-spec files

_KINDS = ("gaussian", "plane-wave", "ho-eigenstate", "superposition")


@dataclass
class StateSpec:
    kind: str
    params: dict = field(default_factory=dict)
    components: list = field(default_factory=list)  # (complex, kind, params)
    grid_points: list[int] | None = None
    domain_lengths: list[float] | None = None


def _parse_value(text: str, where: str):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise HamiltonianFormatError(f"{where}: unterminated list '{text}'")
        body = text[1:-1].strip()
        if not body:
            return []
        try:
            return [float(part) for part in body.split(",")]
        except ValueError as exc:
            raise HamiltonianFormatError(f"{where}: bad list '{text}'") from exc
    try:
        return float(text)
    except ValueError as exc:
        raise HamiltonianFormatError(f"{where}: bad numeric value '{text}'") from exc


def _parse_component(text: str, where: str):
    if "|" not in text:
        raise HamiltonianFormatError(f"{where}: component must be 'coeff | kind key=value ...'")
    coef_text, _, rest = text.partition("|")
    coef_expr = expr.parse(coef_text.strip(), 1)
    coef = coef_expr.constant_value()
    if coef is None:
        raise HamiltonianFormatError(f"{where}: component coefficient must be a constant")
    parts = rest.split()
    if not parts:
        raise HamiltonianFormatError(f"{where}: missing component kind")
    kind = parts[0]
    if kind not in _KINDS or kind == "superposition":
        raise HamiltonianFormatError(f"{where}: unknown component kind '{kind}'")
    params = {}
    for item in parts[1:]:
        if "=" not in item:
            raise HamiltonianFormatError(f"{where}: expected key=value, got '{item}'")
        key, _, value = item.partition("=")
        params[key.strip()] = _parse_value(value, where)
    return coef, kind, params


def parse_state_spec(text: str) -> StateSpec:
    kind = None
    params: dict = {}
    components: list = []
    grid_points = None
    domain_lengths = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        if "=" not in line:
            raise HamiltonianFormatError(f"{where}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "state":
            if kind is not None:
                raise HamiltonianFormatError(f"{where}: duplicate state declaration")
            if value not in _KINDS:
                raise HamiltonianFormatError(f"{where}: unknown state kind '{value}'")
            kind = value
        elif key == "component":
            components.append(_parse_component(value, where))
        elif key == "grid":
            parsed = _parse_value(value, where)
            grid_points = [int(v) for v in (parsed if isinstance(parsed, list) else [parsed])]
        elif key == "domain":
            parsed = _parse_value(value, where)
            domain_lengths = list(parsed) if isinstance(parsed, list) else [parsed]
        else:
            params[key] = _parse_value(value, where)
    if kind is None:
        raise HamiltonianFormatError("missing 'state = <kind>' declaration")
    if kind == "superposition" and not components:
        raise HamiltonianFormatError("superposition state lists no components")
    if kind != "superposition" and components:
        raise HamiltonianFormatError("component lines are only valid for superposition states")
    return StateSpec(kind, params, components, grid_points, domain_lengths)


def _build_simple(kind: str, params: dict, grid: Grid) -> GridState:
    if kind == "gaussian":
        return gaussian(
            grid,
            center=params.get("center"),
            width=params.get("width", 1.0),
            wavevector=params.get("wavevector"),
        )
    if kind == "plane-wave":
        if "wavevector" not in params:
            raise HamiltonianFormatError("plane-wave state needs a wavevector")
        return plane_wave(grid, params["wavevector"])
    if kind == "ho-eigenstate":
        return ho_eigenstate(
            grid,
            levels=params.get("levels", [0] * grid.dim),
            center=params.get("center"),
            frequency=params.get("frequency", 1.0),
            mass=params.get("mass", 1.0),
        )
    raise HamiltonianFormatError(f"unknown state kind '{kind}'")


def build_state(spec: StateSpec, grid: Grid) -> GridState:
    if spec.kind == "superposition":
        parts = [(coef, _build_simple(kind, params, grid)) for coef, kind, params in spec.components]
        return superposition(parts)
    return _build_simple(spec.kind, spec.params, grid)


def load_state(text: str, grid: Grid) -> GridState:
    return build_state(parse_state_spec(text), grid)
