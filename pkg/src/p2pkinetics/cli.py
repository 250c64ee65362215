"""Command line driver.

Verbs: ``simulate`` (one trajectory to CSV), ``analyze`` (fixed points,
eigenvalues and classification as a parseable report), ``phase`` (one ODE
trajectory CSV per deviation around a center), ``ensemble`` (mean/variance
CSV over many stochastic runs) and ``export`` (write a built-in as a model
definition file).

Models come either from ``--model <builtin>`` (with ``-p name=value``
overrides of the documented parameters) or ``--model-file <path>`` (where
``-p`` overrides entries of the file's parameter section).  Initial states
are positional in species order (``--init 10,1``) or by name
(``--init n=10,l=1``, unnamed species start at 0); mixing the two forms is
rejected.

Exit codes: 0 success, 1 numerical failure, 2 usage error.  Errors go to
stderr prefixed with ``E_USAGE:``, ``E_NUMERIC:`` or ``E_IO:``.  The default
seed is 0, overridable via the environment variable ``P2PKINETICS_SEED``;
identical command lines produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import __version__
from .analysis import default_starts, find_fixed_points, stability_report
from .modelfile import ModelFileError, load_model_file, render_model
from .models import BUILTIN_MODELS, build_builtin
from .reporting import (
    render_stability_reports,
    write_ensemble_csv,
    write_trajectory_csv,
)
from .scheme import InteractionScheme, SchemeError, validate as validate_scheme
from .simulate import (
    RunConfig,
    SimulationError,
    ensemble,
    integrate_ode,
    integrate_sde,
    ssa_run,
)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2

ENV_DEFAULT_SEED = "P2PKINETICS_SEED"


class UsageError(Exception):
    pass


class NumericFailure(Exception):
    pass


def _add_model_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", help="built-in model name")
    group.add_argument("--model-file", help="path to a model definition file")
    parser.add_argument(
        "-p",
        "--param",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a model parameter (repeatable)",
    )


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-end", type=float, default=100.0)
    parser.add_argument("--dt", type=float, default=0.01)
    parser.add_argument(
        "--seed", type=int, default=None,
        help=f"PRNG seed (default 0, or ${ENV_DEFAULT_SEED})",
    )
    parser.add_argument("--record-every", type=int, default=1)
    parser.add_argument("--noise-scale", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p2pkinetics",
        description="ODE / Langevin SDE / Gillespie simulation and stability "
        "analysis of one-step interaction schemes",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    sim = sub.add_parser("simulate", help="run one trajectory and write CSV")
    _add_model_options(sim)
    sim.add_argument("--mode", choices=("ode", "sde", "ssa"), required=True)
    _add_run_options(sim)
    sim.add_argument("--max-events", type=int, default=100_000_000)
    sim.add_argument("--init", required=True, help="initial state, e.g. 10,1 or n=10,l=1")
    sim.add_argument("--out", required=True)

    ana = sub.add_parser("analyze", help="fixed points and linear stability")
    _add_model_options(ana)
    ana.add_argument("--tol", type=float, default=1e-10)
    ana.add_argument("--max-iter", type=int, default=50)
    ana.add_argument(
        "--guess", action="append", default=[],
        help="additional Newton start, e.g. 4,3 (repeatable)",
    )
    ana.add_argument("--random-starts", type=int, default=8)
    ana.add_argument("--starts-seed", type=int, default=0)
    ana.add_argument("--out", default="-", help="report path, '-' for stdout")

    ph = sub.add_parser("phase", help="phase-portrait trajectories around a point")
    _add_model_options(ph)
    ph.add_argument("--center", required=True, help="center state, e.g. 5,2")
    ph.add_argument(
        "--deviation", action="append", required=True,
        help="deviation from the center (repeatable)",
    )
    ph.add_argument("--t-end", type=float, default=100.0)
    ph.add_argument("--dt", type=float, default=0.01)
    ph.add_argument("--out-prefix", required=True, help="writes <prefix>NNN.csv")

    ens = sub.add_parser("ensemble", help="mean/variance over repeated runs")
    _add_model_options(ens)
    ens.add_argument("--mode", choices=("sde", "ssa"), required=True)
    ens.add_argument("--runs", type=int, required=True)
    _add_run_options(ens)
    ens.add_argument("--max-events", type=int, default=100_000_000)
    ens.add_argument("--init", required=True)
    ens.add_argument("--out", required=True)

    exp = sub.add_parser("export", help="write a model definition file")
    _add_model_options(exp)
    exp.add_argument("--out", required=True, help="file path, '-' for stdout")

    return parser


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for pair in pairs:
        name, eq, value = pair.partition("=")
        if not eq or not name:
            raise UsageError(f"-p expects NAME=VALUE, got {pair!r}")
        overrides[name.strip()] = value.strip()
    return overrides


def _build_scheme(args) -> tuple[InteractionScheme, np.ndarray | None]:
    """Scheme plus its analytic fixed point when the model has one."""
    overrides = _parse_overrides(args.param)
    if args.model is not None:
        try:
            scheme = build_builtin(args.model, overrides)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        fp_fn = BUILTIN_MODELS[args.model]["analytic_fixed_point"]
        return scheme, (fp_fn(scheme) if fp_fn else None)
    try:
        scheme = load_model_file(args.model_file)
    except FileNotFoundError:
        raise UsageError(f"model file not found: {args.model_file}") from None
    if overrides:
        parameters = dict(scheme.parameters)
        for name, text in overrides.items():
            if name not in parameters:
                raise UsageError(
                    f"-p {name}: the model file declares no such parameter"
                )
            try:
                parameters[name] = float(text)
            except ValueError:
                raise UsageError(f"-p {name}: {text!r} is not a number") from None
        scheme = dataclasses.replace(scheme, parameters=parameters)
        problems = validate_scheme(scheme)
        if problems:
            raise UsageError("; ".join(problems))
    return scheme, None


def _parse_state(text: str, scheme: InteractionScheme, what: str) -> np.ndarray:
    parts = [p.strip() for p in text.split(",") if p.strip() != ""]
    if not parts:
        raise UsageError(f"{what} must not be empty")
    named = ["=" in p for p in parts]
    if any(named) and not all(named):
        raise UsageError(f"{what}: mixing positional and named values is not allowed")
    values = np.zeros(scheme.n_species)
    if all(named):
        index = {name: i for i, name in enumerate(scheme.species_names)}
        for part in parts:
            name, _, value = part.partition("=")
            name = name.strip()
            if name not in index:
                raise UsageError(f"{what}: unknown species {name!r}")
            try:
                values[index[name]] = float(value)
            except ValueError:
                raise UsageError(f"{what}: {value!r} is not a number") from None
        return values
    if len(parts) != scheme.n_species:
        raise UsageError(
            f"{what} has {len(parts)} values, model has {scheme.n_species} "
            f"species ({', '.join(scheme.species_names)})"
        )
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers") from None


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(ENV_DEFAULT_SEED)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"${ENV_DEFAULT_SEED} is not an integer: {raw!r}") from None


def _run_config(args) -> RunConfig:
    try:
        return RunConfig(
            t_end=args.t_end,
            dt=args.dt,
            seed=_resolve_seed(args),
            record_every=args.record_every,
            noise_scale=args.noise_scale,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_simulate(args) -> int:
    scheme, _ = _build_scheme(args)
    config = _run_config(args)
    initial = _parse_state(args.init, scheme, "--init")
    try:
        if args.mode == "ode":
            traj = integrate_ode(scheme, initial, config)
        elif args.mode == "sde":
            traj = integrate_sde(scheme, initial, config)
        else:
            traj = ssa_run(scheme, initial, config, max_events=args.max_events)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_trajectory_csv(args.out, traj, scheme.species_names)
    if traj.error:
        raise NumericFailure(f"{args.mode} run aborted: {traj.error} "
                             f"(partial trajectory written to {args.out})")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    scheme, analytic = _build_scheme(args)
    starts = [_parse_state(g, scheme, "--guess") for g in args.guess]
    starts += default_starts(
        scheme, analytic=analytic, n_random=args.random_starts, seed=args.starts_seed
    )
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    points = find_fixed_points(scheme, starts, tol=args.tol, max_iter=args.max_iter)
    converged = [fp for fp in points if fp.converged]
    if not converged:
        raise NumericFailure(
            f"no fixed point converged from {len(starts)} starts"
        )
    reports = [stability_report(scheme, fp) for fp in converged]
    text = render_stability_reports(reports)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


def _cmd_phase(args) -> int:
    from .analysis import phase_portrait

    scheme, _ = _build_scheme(args)
    center = _parse_state(args.center, scheme, "--center")
    deviations = [_parse_state(d, scheme, "--deviation") for d in args.deviation]
    try:
        trajectories = phase_portrait(scheme, center, deviations, args.t_end, args.dt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    failed = []
    for i, traj in enumerate(trajectories):
        path = f"{args.out_prefix}{i:03d}.csv"
        write_trajectory_csv(path, traj, scheme.species_names)
        if traj.error:
            failed.append(f"deviation #{i}: {traj.error}")
    if failed:
        raise NumericFailure("; ".join(failed))
    return EXIT_OK


def _cmd_ensemble(args) -> int:
    scheme, _ = _build_scheme(args)
    config = _run_config(args)
    initial = _parse_state(args.init, scheme, "--init")
    try:
        stats = ensemble(
            scheme, initial, config, runs=args.runs, mode=args.mode,
            max_events=args.max_events,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except SimulationError as exc:
        raise NumericFailure(str(exc)) from None
    write_ensemble_csv(args.out, stats, scheme.species_names)
    return EXIT_OK


def _cmd_export(args) -> int:
    scheme, _ = _build_scheme(args)
    text = render_model(scheme)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "phase": _cmd_phase,
    "ensemble": _cmd_ensemble,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"E_USAGE: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelFileError, SchemeError) as exc:
        print(f"E_USAGE: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"E_NUMERIC: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"E_IO: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
