"""Shared generators and oracles for the test suite.

Random operators use polynomial-times-Gaussian coefficients centered
mid-domain, so that (a) grid states concentrated at the domain center see
the coefficients at full strength, and (b) the randomized symbolic equality
checks, pointed at the same center, can distinguish them.
"""

from __future__ import annotations

import numpy as np

from pilotwave import expr
from pilotwave.expr import CoefficientExpression
from pilotwave.grids import Grid, GridState
from pilotwave.multiindex import indices_of_max_order
from pilotwave.operators import DifferentialOperator, SamplingSpec, hermitize


def centered_spec(center, samples: int = 48, seed: int = 7, tol: float = 1e-9) -> SamplingSpec:
    return SamplingSpec(samples=samples, seed=seed, tol=tol, box_center=tuple(center))


def poly_gauss_coefficient(
    rng: np.random.Generator, dim: int, center, decay: float = 1.0, max_degree: int = 2
) -> CoefficientExpression:
    """(complex polynomial in q - c) * exp(-decay |q - c|^2), plus sometimes
    a plain complex constant."""
    shifted = [expr.coord(a, dim) - expr.const(center[a - 1], dim) for a in range(1, dim + 1)]
    poly = expr.const(complex(rng.normal(), rng.normal()), dim)
    for _ in range(rng.integers(0, 3)):
        mono = expr.const(complex(rng.normal(), rng.normal()), dim)
        degree = int(rng.integers(1, max_degree + 1))
        for _ in range(degree):
            mono = mono * shifted[rng.integers(0, dim)]
        poly = poly + mono
    radius = expr.const(0, dim)
    for s in shifted:
        radius = radius + s * s
    coef = poly * expr.call("exp", expr.const(-decay, dim) * radius)
    if rng.random() < 0.3:
        coef = coef + expr.const(complex(rng.normal(), rng.normal()), dim)
    return coef


def random_operator(
    rng: np.random.Generator,
    dim: int,
    max_order: int,
    center,
    max_terms: int = 4,
    decay: float = 1.0,
) -> DifferentialOperator:
    candidates = [n for n in indices_of_max_order(dim, max_order)]
    rng.shuffle(candidates)
    count = int(rng.integers(2, max_terms + 1))
    terms = {}
    for n in candidates[:count]:
        terms[n] = poly_gauss_coefficient(rng, dim, center, decay=decay)
    return DifferentialOperator(dim, terms)


def random_hermitian_operator(
    rng: np.random.Generator, dim: int, max_order: int, center, max_terms: int = 4,
    decay: float = 1.0,
) -> DifferentialOperator:
    return hermitize(random_operator(rng, dim, max_order, center, max_terms, decay))


def band_limited_state(
    grid: Grid,
    rng: np.random.Generator,
    max_mode: int = 3,
    modes: int = 4,
    envelope_kappa: float | None = None,
) -> GridState:
    """Random low-wavenumber Fourier sum, optionally under a periodic bump
    envelope exp(kappa (cos(2 pi (q-c)/L) - 1)) centered mid-domain.

    The bump is exactly periodic and entire, so concentration does not leak
    broadband content into the spectrum the way a plain Gaussian (with its
    wrap kink at the boundary) does; needed whenever non-periodic
    coefficients multiply the state and spectral residues must reach 1e-9.
    """
    meshes = grid.meshes()
    values = np.zeros(grid.shape, dtype=complex)
    for _ in range(modes):
        amplitude = complex(rng.normal(), rng.normal())
        phase = np.zeros(grid.shape)
        for axis in range(grid.dim):
            m = int(rng.integers(-max_mode, max_mode + 1))
            phase = phase + 2.0 * np.pi * m * meshes[axis] / grid.lengths[axis]
        values = values + amplitude * np.exp(1j * phase)
    if envelope_kappa is not None:
        center = grid.center()
        ramp = np.zeros(grid.shape)
        for axis in range(grid.dim):
            angle = 2.0 * np.pi * (meshes[axis] - center[axis]) / grid.lengths[axis]
            ramp = ramp + envelope_kappa * (np.cos(angle) - 1.0)
        values = values * np.exp(ramp)
    return GridState(grid, values).normalized()


def braket(a: GridState, b: GridState) -> complex:
    return complex(np.sum(np.conjugate(a.values) * b.values) * a.grid.cell_volume)


def inner_product_hermitian(
    H: DifferentialOperator, grid: Grid, rng: np.random.Generator, states: int = 5,
    rel_tol: float = 1e-6, envelope_kappa: float = 12.0,
) -> bool:
    """Grid test of <phi, H psi> = <H phi, psi> on concentrated random states."""
    from pilotwave.operators import apply as apply_operator

    for _ in range(states):
        phi = band_limited_state(grid, rng, envelope_kappa=envelope_kappa)
        psi = band_limited_state(grid, rng, envelope_kappa=envelope_kappa)
        h_psi = apply_operator(H, psi, 0.0)
        h_phi = apply_operator(H, phi, 0.0)
        lhs = braket(phi, h_psi)
        rhs = braket(h_phi, psi)
        scale = (
            np.sqrt(phi.norm_sq() * h_psi.norm_sq())
            + np.sqrt(h_phi.norm_sq() * psi.norm_sq())
        )
        if abs(lhs - rhs) > rel_tol * scale:
            return False
    return True


def max_slot_deviation_on_probe(H: DifferentialOperator, center, half_width: float = 2.0) -> float:
    """Largest normalized Hermiticity defect over a deterministic probe lattice.

    Used to reject randomly generated 'non-Hermitian' operators whose defect
    is numerically invisible, which would make classification tests flaky.
    """
    from pilotwave.operators import adjoint

    adj = adjoint(H)
    slots = set(H.terms) | set(adj.terms)
    center = np.asarray(center, dtype=float)
    ticks = np.linspace(-half_width, half_width, 5)
    mesh = np.meshgrid(*([ticks] * H.dim), indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=1) + center
    worst = 0.0
    for slot in slots:
        a = H.coefficient(slot)
        b = adj.coefficient(slot)
        for q in points:
            va = a.evaluate(q, 0.37)
            vb = b.evaluate(q, 0.37)
            worst = max(worst, abs(va - vb) / (1.0 + abs(va) + abs(vb)))
    return worst


def visibly_non_hermitian_operator(
    rng: np.random.Generator, dim: int, max_order: int, center, floor: float = 1e-3
) -> DifferentialOperator:
    for _ in range(50):
        H = random_operator(rng, dim, max_order, center)
        if max_slot_deviation_on_probe(H, center) >= floor:
            return H
    raise RuntimeError("could not generate a visibly non-Hermitian operator")
