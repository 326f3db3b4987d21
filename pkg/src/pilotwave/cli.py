"""Command-line entry point.

Subcommands: check, derive, simulate, compare, equivariance.  Exit codes:
0 success, 1 domain verdict (non-Hermitian input or failed statistical
report), 2 usage or parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import altcurrents, serialize, svgplot
from .currents import derive_current_table, eval_current
from .epstein import nonlocal_current
from .errors import (
    ExpressionSyntaxError,
    HamiltonianFormatError,
    NonHermitianError,
    PilotwaveError,
)
from .grids import Grid
from .operators import (
    DifferentialOperator,
    hermiticity_violations,
    hermitize,
    load_hamiltonian,
    require_hermitian,
)
from .solver import EvolutionSpec, evolve, norm_drift, stability_estimate
from .states import parse_state_spec, build_state
from .trajectories import (
    equivariance_test,
    integrate_trajectories,
    sample_density,
)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_POINTS = 256
DEFAULT_LENGTH = 40.0
ALL_METHODS = ("canonical", "epstein", "born-jordan", "second-order")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise HamiltonianFormatError(f"cannot read {path}: {exc}") from exc


def _load_operator(args) -> DifferentialOperator:
    H = load_hamiltonian(_read(args.hamiltonian))
    if getattr(args, "hermitize", False):
        H = hermitize(H)
    return H


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _resolve_grid(args, dim: int, spec) -> Grid:
    points = _int_list(args.grid) if args.grid else (spec.grid_points if spec else None)
    lengths = _float_list(args.domain) if args.domain else (spec.domain_lengths if spec else None)
    points = points or [DEFAULT_POINTS]
    lengths = lengths or [DEFAULT_LENGTH]
    if len(points) == 1:
        points = points * dim
    if len(lengths) == 1:
        lengths = lengths * dim
    if len(points) != dim or len(lengths) != dim:
        raise HamiltonianFormatError(
            f"grid/domain need {dim} entries (or one shared value)"
        )
    return Grid(tuple(lengths), tuple(points))


def _load_state(args, dim: int):
    if not args.state:
        raise HamiltonianFormatError("this command needs --state <file>")
    spec = parse_state_spec(_read(args.state))
    grid = _resolve_grid(args, dim, spec)
    return build_state(spec, grid), grid


def _auto_spec(args, H: DifferentialOperator, grid: Grid) -> EvolutionSpec:
    steps = args.steps if args.steps else 1000
    if args.dt:
        dt = args.dt
    else:
        radius = stability_estimate(H, grid)
        dt = min(1e-3, 1.0 / radius) if radius > 0 else 1e-3
    stride = args.stride if args.stride else max(1, steps // 100)
    return EvolutionSpec(dt=dt, steps=steps, stride=stride)


# ---------------------------------------------------------------------------
# Subcommands

def cmd_check(args) -> int:
    H = load_hamiltonian(_read(args.hamiltonian))
    violations = hermiticity_violations(H)
    if not violations:
        print("Hermitian: yes")
        return EXIT_OK
    print("Hermitian: no")
    for slot in violations:
        print(f"  violated coefficient slot n = {slot}")
    print("hint: rerun derive/simulate with --hermitize to symmetrize the operator")
    return EXIT_VERDICT


def cmd_derive(args) -> int:
    H = load_hamiltonian(_read(args.hamiltonian))
    if args.hermitize:
        H = hermitize(H)
    try:
        require_hermitian(H)
    except NonHermitianError:
        print("error: Hamiltonian is not Hermitian; pass --hermitize to symmetrize", file=sys.stderr)
        return EXIT_VERDICT
    table = derive_current_table(H)
    text = table.to_latex() if args.format == "latex" else table.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    H = _load_operator(args)
    require_hermitian(H)
    psi0, grid = _load_state(args, H.dim)
    spec = _auto_spec(args, H, grid)
    out_dir = Path(args.out or "pilotwave-out")
    out_dir.mkdir(parents=True, exist_ok=True)

    snapshots = evolve(H, psi0, spec)
    drifts = norm_drift(snapshots)
    small = math.prod(grid.shape) <= serialize.CSV_POINT_LIMIT
    for idx, snap in enumerate(snapshots):
        (out_dir / f"snapshot_{idx:04d}.json").write_text(
            serialize.snapshot_to_json(snap), encoding="utf-8"
        )
        if small:
            (out_dir / f"snapshot_{idx:04d}.csv").write_text(
                serialize.snapshot_to_csv(snap), encoding="utf-8"
            )

    summary = {
        "times": [s.t for s in snapshots],
        "norm_drift": drifts,
        "dt": spec.dt,
        "steps": spec.steps,
        "stride": spec.stride,
    }

    if grid.dim == 1:
        x = grid.axis_points(0)
        svgplot.line_plot(
            out_dir / "density.svg",
            [(x, snapshots[0].density()), (x, snapshots[-1].density())],
            title="density",
            xlabel="q1",
            ylabel="|psi|^2",
            labels=[f"t = {snapshots[0].t:.4g}", f"t = {snapshots[-1].t:.4g}"],
        )
    else:
        x = grid.axis_points(0)
        other = tuple(range(1, grid.dim))
        svgplot.line_plot(
            out_dir / "density.svg",
            [
                (x, snapshots[0].density().sum(axis=other) * grid.cell_volume / grid.spacings[0]),
                (x, snapshots[-1].density().sum(axis=other) * grid.cell_volume / grid.spacings[0]),
            ],
            title="axis-1 marginal density",
            xlabel="q1",
            ylabel="rho",
            labels=[f"t = {snapshots[0].t:.4g}", f"t = {snapshots[-1].t:.4g}"],
        )

    if args.trajectories > 0:
        table = derive_current_table(H)
        ensemble = sample_density(psi0.density(), grid, args.trajectories, args.seed)
        final = integrate_trajectories(snapshots, table, ensemble, substeps=args.substeps)
        (out_dir / "trajectories.csv").write_text(
            serialize.trajectory_csv(final), encoding="utf-8"
        )
        summary["truncated_fraction"] = final.truncated_fraction()
        shown = min(final.count, 200)
        fan = [
            (final.times, [positions[pid][0] for positions in final.history])
            for pid in range(shown)
        ]
        svgplot.line_plot(
            out_dir / "trajectories.svg",
            fan,
            title=f"trajectory fan ({shown} of {final.count})",
            xlabel="t",
            ylabel="q1",
        )

    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    print(f"wrote {out_dir}/ ({len(snapshots)} snapshots; max norm drift {max(drifts):.3e})")
    if "truncated_fraction" in summary:
        print(f"truncated fraction: {summary['truncated_fraction']:.4f}")
    return EXIT_OK


def cmd_compare(args) -> int:
    methods = [m.strip() for m in (args.methods or "").split(",") if m.strip()]
    if not methods:
        raise HamiltonianFormatError("--methods must list at least one method")
    for m in methods:
        if m not in ALL_METHODS:
            raise HamiltonianFormatError(f"unknown method '{m}' (choose from {', '.join(ALL_METHODS)})")
    H = _load_operator(args)
    require_hermitian(H)
    psi, grid = _load_state(args, H.dim)

    fields = {}
    report = {"methods": {}}
    table = None
    for method in methods:
        try:
            if method == "canonical":
                table = table or derive_current_table(H)
                fields[method] = eval_current(table, psi)
            elif method == "epstein":
                fields[method] = nonlocal_current(H, psi)
            elif method == "born-jordan":
                fields[method] = altcurrents.born_jordan_current(H, psi)
            elif method == "second-order":
                fields[method] = altcurrents.second_order_current(H, psi)
            report["methods"][method] = {"status": "ok"}
        except PilotwaveError as exc:
            report["methods"][method] = {"status": "inapplicable", "reason": str(exc)}

    names = [m for m in methods if m in fields]
    report["pairs"] = {}
    for a_idx in range(len(names)):
        for b_idx in range(a_idx + 1, len(names)):
            a, b = names[a_idx], names[b_idx]
            cmp = altcurrents.compare_fields(fields[a], fields[b])
            report["pairs"][f"{a} vs {b}"] = cmp.to_dict()

    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return EXIT_OK


def cmd_equivariance(args) -> int:
    H = _load_operator(args)
    psi0, grid = _load_state(args, H.dim)
    spec = None
    if args.dt and args.steps:
        spec = EvolutionSpec(
            dt=args.dt, steps=args.steps, stride=args.stride or max(1, args.steps // 100)
        )
    report = equivariance_test(
        H,
        psi0,
        count=args.count,
        horizon=args.horizon,
        seed=args.seed,
        evolution_spec=spec,
        substeps=args.substeps,
    )
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.valid else EXIT_VERDICT


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotwave",
        description="Conserved currents and guided trajectories for differential-operator Hamiltonians",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, state=True):
        p.add_argument("hamiltonian", help="Hamiltonian file")
        if state:
            p.add_argument("--state", help="state-spec file")
            p.add_argument("--grid", help="points per axis, e.g. 512 or 64,64")
            p.add_argument("--domain", help="box lengths per axis, e.g. 40 or 20,20")
        p.add_argument("--hermitize", action="store_true", help="symmetrize the operator first")

    p_check = sub.add_parser("check", help="report Hermiticity and violated slots")
    p_check.add_argument("hamiltonian")
    p_check.set_defaults(func=cmd_check)

    p_derive = sub.add_parser("derive", help="derive the symbolic current table")
    p_derive.add_argument("hamiltonian")
    p_derive.add_argument("--format", choices=("json", "latex"), default="json")
    p_derive.add_argument("--hermitize", action="store_true")
    p_derive.add_argument("--out")
    p_derive.set_defaults(func=cmd_derive)

    p_sim = sub.add_parser("simulate", help="evolve a state and integrate trajectories")
    add_common(p_sim)
    p_sim.add_argument("--dt", type=float)
    p_sim.add_argument("--steps", type=int)
    p_sim.add_argument("--stride", type=int)
    p_sim.add_argument("--trajectories", type=int, default=0, metavar="M")
    p_sim.add_argument("--substeps", type=int, default=4)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out")
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="compare current constructions on one snapshot")
    add_common(p_cmp)
    p_cmp.add_argument("--methods", default="canonical", help="comma list: " + ",".join(ALL_METHODS))
    p_cmp.add_argument("--out")
    p_cmp.set_defaults(func=cmd_compare)

    p_eq = sub.add_parser("equivariance", help="sample, integrate, and KS-compare against |psi(T)|^2")
    add_common(p_eq)
    p_eq.add_argument("--count", type=int, default=5000, metavar="M")
    p_eq.add_argument("--horizon", type=float, default=1.0, metavar="T")
    p_eq.add_argument("--seed", type=int, default=0)
    p_eq.add_argument("--dt", type=float)
    p_eq.add_argument("--steps", type=int)
    p_eq.add_argument("--stride", type=int)
    p_eq.add_argument("--substeps", type=int, default=4)
    p_eq.set_defaults(func=cmd_equivariance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HamiltonianFormatError, ExpressionSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonHermitianError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: pass --hermitize to symmetrize the operator", file=sys.stderr)
        return EXIT_VERDICT
    except PilotwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
