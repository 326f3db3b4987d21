"""Differential-operator Hamiltonians: adjoints, Hermiticity, grid action.

An operator is a finite map from multi-indices to coefficient expressions,
H psi = sum_n h_n(q,t) D^n psi.  The formal adjoint follows from moving all
derivatives off psi (integration by parts with vanishing boundary terms),
which after a Leibniz expansion gives coefficients

    adj(h)_n = sum_{m >= n} (-1)^|m| C(m,n) D^(m-n) conj(h_m),

and Hermiticity is exactly the fixed-point condition h_n = adj(h)_n.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from . import expr
from .errors import (
    DimensionMismatchError,
    GridError,
    HamiltonianFormatError,
    NonHermitianError,
)
from .expr import CoefficientExpression
from .grids import DerivativeCache, Grid, GridState
from .multiindex import MultiIndex, binom_multi, indices_up_to

MIN_POINTS_PER_AXIS = 16


@dataclass(frozen=True)
class SamplingSpec:
    """Controls the randomized expression-equality checks.

    `box_center` shifts the q sampling box (half-width 2 per axis) so that
    coefficients localized away from the origin — e.g. centered mid-domain
    on a grid — are still distinguishable.
    """

    samples: int = 32
    seed: int = 2024
    tol: float = 1e-9
    box_center: tuple[float, ...] | None = None

    def equal(self, a: CoefficientExpression, b: CoefficientExpression) -> bool:
        return expr.approx_equal(
            a, b, samples=self.samples, seed=self.seed, tol=self.tol, box_center=self.box_center
        )


class DifferentialOperator:
    """Finite sum of coefficient-weighted mixed partials, immutable."""

    def __init__(self, dim: int, terms: dict[MultiIndex, CoefficientExpression], prune: bool = True):
        self.dim = int(dim)
        clean: dict[MultiIndex, CoefficientExpression] = {}
        for n, coef in terms.items():
            if n.dim != self.dim or coef.dim != self.dim:
                raise DimensionMismatchError(
                    f"term {n} or its coefficient does not match dimension {self.dim}"
                )
            if prune and expr.is_zero(coef):
                continue
            clean[n] = coef
        self._terms = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))

    @property
    def terms(self) -> dict[MultiIndex, CoefficientExpression]:
        return dict(self._terms)

    @property
    def max_order(self) -> int:
        return max((n.order() for n in self._terms), default=0)

    def coefficient(self, n: MultiIndex) -> CoefficientExpression:
        return self._terms.get(n, expr.const(0, self.dim))

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        if self.dim != other.dim:
            raise DimensionMismatchError("operator dimensions differ")
        merged = dict(self._terms)
        for n, coef in other._terms.items():
            merged[n] = merged[n] + coef if n in merged else coef
        return DifferentialOperator(self.dim, merged)

    def scaled(self, factor: complex) -> "DifferentialOperator":
        return DifferentialOperator(
            self.dim, {n: expr.const(factor, self.dim) * c for n, c in self._terms.items()}
        )

    def is_time_dependent(self) -> bool:
        return any(expr.contains_time(c) for c in self._terms.values())

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {c}" for n, c in self._terms.items())
        return f"DifferentialOperator(dim={self.dim}, {{{body}}})"


def adjoint(H: DifferentialOperator) -> DifferentialOperator:
    """Formal adjoint via the Leibniz expansion of (-1)^|m| D^m(conj(h_m) psi)."""
    out: dict[MultiIndex, CoefficientExpression] = {}
    for m, coef in H.terms.items():
        sign = (-1) ** m.order()
        conj_coef = coef.conjugate()
        for n in indices_up_to(m):
            weight = sign * binom_multi(m, n)
            contrib = expr.const(weight, H.dim) * conj_coef.differentiate(m - n)
            out[n] = out[n] + contrib if n in out else contrib
    return DifferentialOperator(H.dim, out)


def hermiticity_violations(
    H: DifferentialOperator, check: SamplingSpec | None = None
) -> list[MultiIndex]:
    """Multi-index slots where h_n fails to equal its adjoint coefficient."""
    spec = check or SamplingSpec()
    adj = adjoint(H)
    slots = sorted(set(H.terms) | set(adj.terms), key=lambda n: n.sort_key())
    return [n for n in slots if not spec.equal(H.coefficient(n), adj.coefficient(n))]


def is_hermitian(H: DifferentialOperator, check: SamplingSpec | None = None) -> bool:
    return not hermiticity_violations(H, check)


def hermitize(H: DifferentialOperator) -> DifferentialOperator:
    """Symmetric part (H + adjoint(H))/2; a fixed point when H is Hermitian."""
    return (H + adjoint(H)).scaled(0.5)


def require_hermitian(H: DifferentialOperator, check: SamplingSpec | None = None) -> None:
    bad = hermiticity_violations(H, check)
    if bad:
        slots = ", ".join(str(n) for n in bad)
        raise NonHermitianError(f"Hamiltonian is not Hermitian; violated slots: {slots}")


class OperatorApplier:
    """Grid realization of an operator, with coefficient grids cached.

    Time-independent coefficients are evaluated once; time-dependent ones are
    re-evaluated at each requested t.
    """

    def __init__(self, H: DifferentialOperator, grid: Grid):
        if H.dim != grid.dim:
            raise DimensionMismatchError(f"operator dim {H.dim} != grid dim {grid.dim}")
        if any(s < MIN_POINTS_PER_AXIS for s in grid.shape):
            raise GridError(f"need at least {MIN_POINTS_PER_AXIS} points per axis to apply operators")
        self.H = H
        self.grid = grid
        self._meshes = grid.meshes()
        self._static: list[tuple[MultiIndex, np.ndarray]] = []
        self._dynamic: list[tuple[MultiIndex, CoefficientExpression]] = []
        for n, coef in H.terms.items():
            if expr.contains_time(coef):
                self._dynamic.append((n, coef))
            else:
                self._static.append((n, coef.evaluate_on(self._meshes, 0.0)))

    def __call__(self, values: np.ndarray, t: float) -> np.ndarray:
        cache = DerivativeCache(values, self.grid)
        out = np.zeros(self.grid.shape, dtype=complex)
        for n, coef_grid in self._static:
            out += coef_grid * cache.derivative(n)
        for n, coef in self._dynamic:
            out += coef.evaluate_on(self._meshes, t) * cache.derivative(n)
        return out

    def coefficient_magnitude(self, t: float) -> dict[MultiIndex, float]:
        """Max |h_n| over the grid at time t, for stability estimates."""
        out = {}
        for n, coef_grid in self._static:
            out[n] = float(np.max(np.abs(coef_grid)))
        for n, coef in self._dynamic:
            out[n] = float(np.max(np.abs(coef.evaluate_on(self._meshes, t))))
        return out


def apply(H: DifferentialOperator, state: GridState, t: float | None = None) -> GridState:
    """Pointwise sum_n h_n(q,t) (D^n psi)(q) with spectral derivatives."""
    at = state.t if t is None else t
    values = OperatorApplier(H, state.grid)(state.values, at)
    return GridState(state.grid, values, at)


# ---------------------------------------------------------------------------
# Hamiltonian file format
#
#   # comment
#   dim = 2
#   term [2,0] = "-0.5"
#   term [0,0] = "(q1-3.5)^2/2"


def _parse_multiindex_literal(text: str, where: str) -> tuple[int, ...]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise HamiltonianFormatError(f"{where}: expected a bracketed multi-index, got '{text}'")
    body = text[1:-1].strip()
    if not body:
        raise HamiltonianFormatError(f"{where}: empty multi-index")
    try:
        entries = tuple(int(part.strip()) for part in body.split(","))
    except ValueError as exc:
        raise HamiltonianFormatError(f"{where}: bad multi-index '{text}'") from exc
    if any(e < 0 for e in entries):
        raise HamiltonianFormatError(f"{where}: multi-index entries must be non-negative")
    return entries


def load_hamiltonian(text: str) -> DifferentialOperator:
    """Parse the Hamiltonian text format into an operator."""
    dim: int | None = None
    terms: dict[MultiIndex, CoefficientExpression] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        if "=" not in line:
            raise HamiltonianFormatError(f"{where}: expected 'key = value', got '{line}'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "dim":
            if dim is not None:
                raise HamiltonianFormatError(f"{where}: duplicate dim declaration")
            try:
                dim = int(value)
            except ValueError as exc:
                raise HamiltonianFormatError(f"{where}: bad dimension '{value}'") from exc
            if dim < 1:
                raise HamiltonianFormatError(f"{where}: dimension must be >= 1")
        elif key.startswith("term"):
            if dim is None:
                raise HamiltonianFormatError(f"{where}: 'dim = N' must appear before any term")
            entries = _parse_multiindex_literal(key[len("term"):], where)
            if len(entries) != dim:
                raise HamiltonianFormatError(
                    f"{where}: multi-index has {len(entries)} entries, expected {dim}"
                )
            index = MultiIndex(entries)
            if index in terms:
                raise HamiltonianFormatError(f"{where}: duplicate term index {index}")
            if not (value.startswith('"') and value.endswith('"') and len(value) >= 2):
                raise HamiltonianFormatError(f"{where}: expression must be double-quoted")
            try:
                terms[index] = expr.parse(value[1:-1], dim)
            except Exception as exc:
                raise HamiltonianFormatError(f"{where}: {exc}") from exc
        else:
            raise HamiltonianFormatError(f"{where}: unknown key '{key}'")
    if dim is None:
        raise HamiltonianFormatError("missing 'dim = N' declaration")
    return DifferentialOperator(dim, terms)


def format_hamiltonian(H: DifferentialOperator) -> str:
    lines = [f"dim = {H.dim}"]
    for n, coef in H.terms.items():
        lines.append(f'term {n} = "{coef.to_string()}"')
    return "\n".join(lines) + "\n"
