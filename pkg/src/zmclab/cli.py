"""Command-line front end.

Subcommands: verify (residual sweeps), profile (profile ODE runs),
evolve (excised evolution from a key=value config file), stability
(mode report), scaling (energy scaling measurement), audit (the
consolidated claims audit).

Exit codes are a three-way contract: 0 for success or an expected finding,
1 for a tolerance or expectation failure, 2 for usage and config errors.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .audit import run_audit
from .closedform import ClosedFormSolution, Family
from .errors import (
    ArityError,
    ConfigError,
    DegenerateStartError,
    DegeneracyError,
    DomainError,
    LabError,
)
from .evolution import (
    EvolutionConfig,
    EvolutionState,
    fit_blowup_rate,
    initial_state_from_solution,
    run_evolution,
)
from .conserved import QuadratureWeight, measure_scaling_exponent
from .numerics import Grid1D
from .profiles import shoot_profile
from .reporting import (
    dumps_json,
    write_diagnostics_csv,
    write_json,
    write_profile_csv,
    write_snapshot_csv,
)
from .residuals import (
    EquationId,
    backward_cone_points,
    lightcone_interior_points,
    rectangle_points,
    sweep_residual,
)
from .stability import mode_growth_probe, solve_mode_quadratic

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2

OUTPUT_DIR_ENV = "ZMCLAB_OUTPUT_DIR"

FAMILY_BY_NAME = {
    "log": Family.BORN_INFELD_LOG,
    "sphere-plus": Family.MEMBRANE_SPHERE_PLUS,
    "sphere-minus": Family.MEMBRANE_SPHERE_MINUS,
    "log-claimed": Family.SPACELIKE_LOG_CLAIMED,
    "arctan-corrected": Family.SPACELIKE_ARCTAN_CORRECTED,
    "constant": Family.CONSTANT_PROFILE,
}

EQUATION_BY_NAME = {
    "born-infeld": EquationId.BORN_INFELD,
    "membrane": EquationId.RADIAL_MEMBRANE,
    "spacelike": EquationId.SPACELIKE_GRAPH,
    "eikonal": EquationId.EIKONAL,
}

SOLUTION = "solution"
NON_SOLUTION = "non-solution"

# every pairing `verify` accepts, with what to expect of the residual:
# a solution must sweep below the tolerance, a flagged non-solution must
# stay above the floor (that it fails loudly is itself the finding)
VERIFY_PAIRINGS = {
    (EquationId.BORN_INFELD, Family.BORN_INFELD_LOG): (SOLUTION, 1e-9),
    (EquationId.RADIAL_MEMBRANE, Family.MEMBRANE_SPHERE_PLUS): (SOLUTION, 1e-9),
    (EquationId.RADIAL_MEMBRANE, Family.MEMBRANE_SPHERE_MINUS): (SOLUTION, 1e-9),
    (EquationId.RADIAL_MEMBRANE, Family.CONSTANT_PROFILE): (SOLUTION, 1e-9),
    (EquationId.EIKONAL, Family.MEMBRANE_SPHERE_PLUS): (SOLUTION, 1e-12),
    (EquationId.EIKONAL, Family.MEMBRANE_SPHERE_MINUS): (SOLUTION, 1e-12),
    (EquationId.SPACELIKE_GRAPH, Family.SPACELIKE_LOG_CLAIMED): (NON_SOLUTION, 0.1),
    (EquationId.SPACELIKE_GRAPH, Family.SPACELIKE_ARCTAN_CORRECTED): (SOLUTION, 1e-9),
}


def resolve_output(path: str) -> str:
    """Relative output paths land in $ZMCLAB_OUTPUT_DIR when it is set."""
    if os.path.isabs(path):
        return path
    base = os.environ.get(OUTPUT_DIR_ENV)
    if not base:
        return path
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, path)


def _emit(args, payload: dict) -> None:
    text = dumps_json(payload)
    sys.stdout.write(text)
    json_path = getattr(args, "json", None)
    if json_path:
        write_json(resolve_output(json_path), payload)


def _sample_points(equation, family, T, side, margin, rho_max):
    if family is Family.BORN_INFELD_LOG:
        return lightcone_interior_points(T, side, side, margin)
    if family in (
        Family.MEMBRANE_SPHERE_PLUS,
        Family.MEMBRANE_SPHERE_MINUS,
        Family.CONSTANT_PROFILE,
    ):
        return backward_cone_points(T, side, side, margin, rho_max=rho_max)
    # spacelike families live on a half plane; sample the square [0, T/2]^2
    return rectangle_points((0.0, T / 2), (0.0, T / 2), side, side)


def cmd_verify(args) -> int:
    equation = EQUATION_BY_NAME[args.equation]
    family = FAMILY_BY_NAME[args.family]
    pairing = VERIFY_PAIRINGS.get((equation, family))
    if pairing is None:
        sys.stderr.write(
            f"error: family {args.family!r} cannot be verified against "
            f"equation {args.equation!r}\n"
        )
        return EXIT_USAGE
    expectation, threshold = pairing

    sol = ClosedFormSolution(family=family, T=args.T, k=args.k)
    side = max(2, int(args.samples**0.5))
    points = _sample_points(equation, family, args.T, side, args.margin, args.rho_max)
    report = sweep_residual(equation, sol, points)

    if expectation is SOLUTION:
        within = report.max_abs <= threshold
    else:
        within = report.max_abs >= threshold
    payload = {
        "equation": args.equation,
        "family": args.family,
        "k": args.k,
        "T": args.T,
        "expectation": expectation,
        "threshold": threshold,
        "within_expectation": within,
        "report": report.to_json_dict(),
    }
    _emit(args, payload)
    return EXIT_OK if within else EXIT_TOLERANCE


def cmd_profile(args) -> int:
    run = shoot_profile(args.a, args.rho_max, args.drho, tolerance=args.tolerance)
    csv_path = resolve_output(args.csv)
    write_profile_csv(csv_path, run)
    final = run.final_state()
    payload = {
        "height": args.a,
        "termination": run.termination.value,
        "degeneracy_location": run.degeneracy_location,
        "n_points": int(run.rhos.size),
        "final": {"rho": final.rho, "phi": final.phi, "dphi": final.dphi},
        "max_drift_from_height": float(np.max(np.abs(run.phi - args.a))),
        "csv": csv_path,
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_stability(args) -> int:
    report = solve_mode_quadratic()
    payload = {
        "mode_report": report.to_json_dict(),
        "growth_probe_exponent": mode_growth_probe(),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_scaling(args) -> int:
    lambdas = tuple(float(s) for s in args.lambdas.split(","))
    weight = (
        QuadratureWeight.COORDINATE
        if args.weight == "coordinate"
        else QuadratureWeight.UNWEIGHTED
    )
    sol = ClosedFormSolution(family=Family.BORN_INFELD_LOG, T=args.T, k=args.k)
    lo, hi = (float(s) for s in args.window.split(","))
    m = measure_scaling_exponent(
        sol, t0=args.t0, window=(lo, hi), lambdas=lambdas, weight=weight
    )
    _emit(args, m.to_json_dict())
    return EXIT_OK


def cmd_audit(args) -> int:
    report = run_audit()
    _emit(args, report.to_json_dict())
    return EXIT_OK if report.all_as_expected else EXIT_TOLERANCE


# evolve config schema: key -> (parser, default); None means "must be given"
def _parse_bool(text: str) -> bool:
    if text in ("true", "yes", "1"):
        return True
    if text in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


CONFIG_SCHEMA = {
    "equation": (str, None),
    "family": (str, "zero"),
    "k": (float, 0.2),
    "T": (float, 1.0),
    "t0": (float, 0.0),
    "t_end": (float, 0.5),
    "lo": (float, -0.5),
    "hi": (float, 0.5),
    "n": (int, 400),
    "cfl": (float, 0.5),
    "dissipation": (float, 0.01),
    "max_gradient": (float, None),
    "min_disc_floor": (float, 1e-6),
    "dt_floor": (float, 1e-12),
    "diagnostics_csv": (str, "diagnostics.csv"),
    "snapshots_csv": (str, ""),
    "fit": (_parse_bool, False),
    "fit_lo": (float, 0.4),
    "fit_hi": (float, 0.95),
}


def parse_config_text(text: str) -> dict:
    """Flat key=value lines; '#' starts a comment; blank lines skipped.

    Raises ConfigError naming the offending line number.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        parser, _ = CONFIG_SCHEMA[key]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return values


def _apply_overrides(values: dict, overrides) -> None:
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, value = item.partition("=")
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"override names unknown key {key!r}")
        parser, _ = CONFIG_SCHEMA[key]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"bad override value for {key}: {exc}") from exc


def _build_initial_state(cfgv) -> EvolutionState:
    grid = Grid1D(lo=cfgv["lo"], hi=cfgv["hi"], n=cfgv["n"])
    if cfgv["family"] == "zero":
        xs = grid.nodes()
        z = np.zeros_like(xs)
        return EvolutionState(
            t=cfgv["t0"], xs=xs, u=z.copy(), p=z.copy(), q=z.copy(),
            spacing=grid.spacing,
        )
    family = FAMILY_BY_NAME.get(cfgv["family"])
    if family is None:
        raise ConfigError(f"unknown family {cfgv['family']!r}")
    sol = ClosedFormSolution(family=family, T=cfgv["T"], k=cfgv["k"])
    return initial_state_from_solution(sol, grid, t0=cfgv["t0"])


def cmd_evolve(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
    values = parse_config_text(text)
    _apply_overrides(values, args.set)
    if "equation" not in values:
        raise ConfigError("config is missing the required key 'equation'")
    for key, (_, default) in CONFIG_SCHEMA.items():
        values.setdefault(key, default)
    equation = EQUATION_BY_NAME.get(values["equation"])
    if equation is None:
        raise ConfigError(f"unknown equation {values['equation']!r}")

    try:
        state = _build_initial_state(values)
    except (DomainError, ConfigError):
        raise
    except LabError as exc:
        raise ConfigError(f"initial data construction failed: {exc}") from exc

    config = EvolutionConfig(
        blowup_time=values["T"],
        t_end=values["t_end"],
        equation=equation,
        cfl=values["cfl"],
        dissipation=values["dissipation"],
        max_gradient=values["max_gradient"],
        min_disc_floor=values["min_disc_floor"],
        dt_floor=values["dt_floor"],
    )

    try:
        run = run_evolution(state, config)
    except DegeneracyError as exc:
        # expected for the exactly lightlike sphere caps: refusing to step
        # degenerate data is a finding, not a failure
        _emit(args, {
            "status": "refused-degenerate-initial-data",
            "detail": str(exc),
            "min_discriminant": state.min_discriminant(),
        })
        return EXIT_OK

    diagnostics_path = resolve_output(values["diagnostics_csv"])
    write_diagnostics_csv(diagnostics_path, run)
    snapshot_path = None
    if values["snapshots_csv"]:
        snapshot_path = resolve_output(values["snapshots_csv"])
        write_snapshot_csv(snapshot_path, run.final)

    payload = {
        "status": run.status.value,
        "t_final": run.final.t,
        "n_steps": run.n_steps,
        "active_nodes_final": int(run.active_nodes[-1]),
        "min_discriminant_final": float(run.min_disc[-1]),
        "relative_momentum_drift": run.relative_momentum_drift,
        "diagnostics_csv": diagnostics_path,
        "snapshots_csv": snapshot_path,
        "fit": None,
    }
    if values["fit"]:
        try:
            fit = fit_blowup_rate(run, (values["fit_lo"], values["fit_hi"]))
            payload["fit"] = fit.to_json_dict()
        except ArityError as exc:
            payload["fit_skipped_reason"] = str(exc)
    _emit(args, payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zmclab",
        description="Numerical laboratory for self-similar blow-up in "
        "zero-mean-curvature wave equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="sweep a closed-form family's residual")
    p.add_argument("--equation", required=True, choices=sorted(EQUATION_BY_NAME))
    p.add_argument("--family", required=True, choices=sorted(FAMILY_BY_NAME))
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=400,
                   help="approximate total sample count")
    p.add_argument("--margin", type=float, default=0.02)
    p.add_argument("--rho-max", type=float, default=0.95, dest="rho_max")
    p.add_argument("--json", help="also write the report to this path")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("profile", help="shoot the profile equation from the axis")
    p.add_argument("--a", type=float, required=True, help="axis height phi(0)")
    p.add_argument("--rho-max", type=float, default=0.9, dest="rho_max")
    p.add_argument("--drho", type=float, default=1e-3)
    p.add_argument("--tolerance", type=float, default=None,
                   help="enable adaptive stepping at this local tolerance")
    p.add_argument("--csv", default="profile.csv")
    p.add_argument("--json")
    p.set_defaults(handler=cmd_profile)

    p = sub.add_parser("evolve", help="run the excised evolution from a config file")
    p.add_argument("config", help="path to a key=value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--json")
    p.set_defaults(handler=cmd_evolve)

    p = sub.add_parser("stability", help="separable mode report")
    p.add_argument("--json")
    p.set_defaults(handler=cmd_stability)

    p = sub.add_parser("scaling", help="measure the energy scaling exponent")
    p.add_argument("--lambdas", default="0.5,1,2,4")
    p.add_argument("--k", type=float, default=0.3)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=0.5)
    p.add_argument("--window", default="-0.2,0.3")
    p.add_argument("--weight", choices=("unweighted", "coordinate"),
                   default="unweighted")
    p.add_argument("--json")
    p.set_defaults(handler=cmd_scaling)

    p = sub.add_parser("audit", help="audit every quantitative claim")
    p.add_argument("--json")
    p.set_defaults(handler=cmd_audit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.handler(args)
    except (ConfigError, DegenerateStartError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except LabError as exc:
        sys.stderr.write(f"failure: {exc}\n")
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
