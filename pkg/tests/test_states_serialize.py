import numpy as np
import pytest

from pilotwave.errors import HamiltonianFormatError
from pilotwave.grids import Grid
from pilotwave.serialize import (
    snapshot_from_json,
    snapshot_to_csv,
    snapshot_to_json,
    trajectory_csv,
)
from pilotwave.states import (
    build_state,
    commensurate_wavevector,
    gaussian,
    ho_eigenstate,
    load_state,
    parse_state_spec,
    plane_wave,
    superposition,
)
from pilotwave.trajectories import sample_density


def test_gaussian_moments():
    grid = Grid((40.0,), (512,))
    sigma = 0.7
    psi = gaussian(grid, center=[22.0], width=sigma, wavevector=[1.0])
    assert psi.norm_sq() == pytest.approx(1.0)
    x = grid.axis_points(0)
    rho = psi.density()
    mean = (x * rho).sum() * grid.cell_volume
    var = ((x - mean) ** 2 * rho).sum() * grid.cell_volume
    assert mean == pytest.approx(22.0, abs=1e-9)
    assert var == pytest.approx(sigma ** 2, rel=1e-6)


def test_plane_wave_snaps_to_lattice():
    grid = Grid((10.0,), (64,))
    psi = plane_wave(grid, [1.0])
    unit = 2 * np.pi / 10.0
    snapped = commensurate_wavevector(grid, [1.0])[0]
    assert snapped == pytest.approx(round(1.0 / unit) * unit)
    assert np.allclose(np.abs(psi.values), 1.0)
    # exactly periodic: spectral content on a single mode
    spectrum = np.abs(np.fft.fft(psi.values))
    assert (spectrum > 1e-6).sum() == 1


def test_ho_eigenstates_orthonormal():
    grid = Grid((40.0,), (512,))
    states = [ho_eigenstate(grid, [n], center=[20.0]) for n in range(4)]
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            overlap = np.sum(np.conjugate(a.values) * b.values) * grid.cell_volume
            assert abs(overlap - (1.0 if i == j else 0.0)) < 1e-10


def test_ho_eigenstate_2d_energy():
    grid = Grid((20.0, 20.0), (128, 128))
    psi = ho_eigenstate(grid, [1, 2], center=[10.0, 10.0])
    assert psi.norm_sq() == pytest.approx(1.0)
    from pilotwave.operators import apply, load_hamiltonian

    H = load_hamiltonian(
        'dim = 2\nterm [2,0] = "-0.5"\nterm [0,2] = "-0.5"\n'
        'term [0,0] = "((q1-10)^2 + (q2-10)^2)/2"\n'
    )
    out = apply(H, psi, 0.0)
    energy = 1.5 + 2.5
    assert np.max(np.abs(out.values - energy * psi.values)) < 1e-6


def test_superposition_normalizes():
    grid = Grid((40.0,), (256,))
    a = ho_eigenstate(grid, [0], center=[20.0])
    b = ho_eigenstate(grid, [1], center=[20.0])
    s = superposition([(1.0, a), (1j, b)])
    assert s.norm_sq() == pytest.approx(1.0)


STATE_TEXT = """
# drifting packet
state = gaussian
center = [18.0]
width = 0.5
wavevector = [1.0]
grid = [512]
domain = [40.0]
"""


def test_parse_state_spec():
    spec = parse_state_spec(STATE_TEXT)
    assert spec.kind == "gaussian"
    assert spec.params["center"] == [18.0]
    assert spec.params["width"] == 0.5
    assert spec.grid_points == [512]
    assert spec.domain_lengths == [40.0]
    grid = Grid((40.0,), (512,))
    psi = build_state(spec, grid)
    assert psi.norm_sq() == pytest.approx(1.0)


def test_superposition_state_file():
    text = (
        "state = superposition\n"
        "component = 0.70710678 | ho-eigenstate levels=[0] center=[20]\n"
        "component = (0.5+0.5*i) | gaussian center=[22] width=0.5 wavevector=[1]\n"
    )
    grid = Grid((40.0,), (256,))
    psi = load_state(text, grid)
    assert psi.norm_sq() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "text",
    [
        "width = 0.5",  # no state kind
        "state = vortex",  # unknown kind
        "state = gaussian\ncomponent = 1 | gaussian",  # components on non-superposition
        "state = superposition",  # no components
        "state = superposition\ncomponent = q1 | gaussian",  # non-constant coefficient
        "state = plane-wave",  # missing wavevector
        "state = gaussian\nwidth = [0.5, 0.7]",  # wrong arity for 1D grid
    ],
)
def test_state_spec_rejects(text):
    grid = Grid((40.0,), (64,))
    with pytest.raises(HamiltonianFormatError):
        load_state(text, grid)


def test_snapshot_json_roundtrip():
    grid = Grid((12.0, 6.0), (32, 16))
    rng = np.random.default_rng(1)
    values = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    from pilotwave.grids import GridState

    state = GridState(grid, values, t=0.75)
    back = snapshot_from_json(snapshot_to_json(state))
    assert back.grid == grid
    assert back.t == 0.75
    assert np.array_equal(back.values, state.values)


def test_snapshot_json_rejects_garbage():
    with pytest.raises(HamiltonianFormatError):
        snapshot_from_json('{"dimension": 1}')


def test_snapshot_csv_shape():
    grid = Grid((4.0,), (16,))
    psi = gaussian(grid, center=[2.0], width=0.5)
    lines = snapshot_to_csv(psi).strip().splitlines()
    assert lines[0] == "q1,re,im"
    assert len(lines) == 17


def test_trajectory_csv_format():
    grid = Grid((10.0,), (64,))
    ens = sample_density(np.ones(64), grid, 3, seed=1)
    ens.times = [0.0, 0.5]
    ens.history = [ens.positions.copy(), ens.positions.copy() + 0.1]
    ens.truncated = np.array([False, True, False])
    lines = trajectory_csv(ens).strip().splitlines()
    assert lines[0] == "t,particle_id,q1,truncated"
    assert len(lines) == 1 + 2 * 3
    assert lines[2].split(",")[1] == "1"
    assert lines[2].split(",")[-1] == "1"


def test_svgplot_writes_polylines(tmp_path):
    from pilotwave import svgplot

    path = tmp_path / "plot.svg"
    xs = np.linspace(0, 1, 20)
    svgplot.line_plot(path, [(xs, np.sin(xs)), (xs, np.cos(xs))], title="demo", labels=["a", "b"])
    text = path.read_text()
    assert text.startswith("<svg")
    assert text.count("<polyline") == 2
    assert "demo" in text
