"""Command line front end.

Every subcommand reads one TOML config, applies ``--set`` overrides, runs
the requested computation and writes a CSV whose header echoes the resolved
config, the package version and the seed.  Outputs are deterministic for a
given config, so rerunning a command reproduces the file byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    apply_override,
    markov_params,
    parse_override,
    sim_config,
    spectrum_config,
    sweep_values,
    tomllib,
    validate_config,
)
from .errors import ConfigError, ConvergenceError, HeomFieldError, NumericalError
from .lindblad import markovian_evolve, markovian_steady_state
from .montecarlo import mc_evolve
from .propagate import (
    SteadyMethod,
    SweepReduce,
    evolve,
    set_config_value,
    steady_state,
    sweep,
)
from .spectrum import compute_spectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONVERGENCE = 4


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: str, resolved: dict, command: str, columns, rows) -> None:
    """Write rows with the reproducibility header; '-' writes to stdout."""
    buffer = io.StringIO()
    buffer.write(f"# heomfield {__version__}\n")
    buffer.write(f"# command: {command}\n")
    buffer.write(f"# seed: {resolved['mc']['seed']}\n")
    buffer.write(f"# config: {json.dumps(resolved, sort_keys=True)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    data = buffer.getvalue()
    if path == "-":
        sys.stdout.write(data)
    else:
        Path(path).write_text(data, encoding="utf-8")


def read_csv_header_config(path: str) -> dict:
    """Recover the resolved config echoed into a CSV header."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# config: "):
                return json.loads(line[len("# config: ") :])
    raise ConfigError(f"no config header found in {path}")


def read_csv(path: str):
    """Read a CSV written by this package, returns (columns, rows)."""
    with open(path, encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


def _trajectory_rows(series: str, traj):
    for i in range(len(traj.times)):
        yield (
            series,
            traj.times[i],
            traj.population[i],
            traj.coherence[i].real,
            traj.coherence[i].imag,
            traj.trace_error[i],
        )


def _series_sim(resolved: dict, series: str):
    if series in ("heom_full", "heom_rwa"):
        return sim_config(resolved, coupling=series.removeprefix("heom_"))
    return sim_config(resolved)


def _cmd_evolve(resolved: dict, out: str) -> None:
    rows = []
    for series in resolved["run"]["series"]:
        if series == "markovian":
            sim = sim_config(resolved)
            traj = markovian_evolve(
                markov_params(resolved),
                sim.initial_state,
                sim.t_max,
                sim.dt,
                sample_stride=sim.sample_stride,
            )
        else:
            traj = evolve(_series_sim(resolved, series))
        rows.extend(_trajectory_rows(series, traj))
    write_csv(
        out,
        resolved,
        "evolve",
        ("series", "t", "pop_excited", "re_coh", "im_coh", "trace_err"),
        rows,
    )


def _cmd_lindblad(resolved: dict, out: str) -> None:
    sim = sim_config(resolved)
    traj = markovian_evolve(
        markov_params(resolved),
        sim.initial_state,
        sim.t_max,
        sim.dt,
        sample_stride=sim.sample_stride,
    )
    rows = [row[1:] for row in _trajectory_rows("markovian", traj)]
    write_csv(
        out,
        resolved,
        "lindblad",
        ("t", "pop_excited", "re_coh", "im_coh", "trace_err"),
        rows,
    )


def _steady_methods(resolved: dict):
    method = resolved["steady"]["method"]
    if method == "both":
        return (SteadyMethod.PROPAGATE, SteadyMethod.NULLSPACE)
    return (SteadyMethod(method),)


def _cmd_steady(resolved: dict, out: str) -> None:
    rows = []
    for series in resolved["run"]["series"]:
        if series == "markovian":
            rho = markovian_steady_state(markov_params(resolved))
            rows.append(
                ("markovian", "analytic", rho[0, 0].real, rho[0, 1].real, rho[0, 1].imag)
            )
            continue
        sim = _series_sim(resolved, series)
        for method in _steady_methods(resolved):
            rho = steady_state(sim, method)
            rows.append(
                (series, method.value, rho[0, 0].real, rho[0, 1].real, rho[0, 1].imag)
            )
    write_csv(
        out,
        resolved,
        "steady",
        ("series", "method", "pop_excited", "re_coh", "im_coh"),
        rows,
    )


def _cmd_spectrum(resolved: dict, out: str) -> None:
    cfg = spectrum_config(resolved)
    _, spec = compute_spectrum(cfg)
    rows = [
        (spec.omega[i], spec.s_normalized[i], spec.s_raw[i])
        for i in range(len(spec.omega))
    ]
    write_csv(out, resolved, "spectrum", ("omega", "s_normalized", "s_raw_re"), rows)


def _cmd_mc(resolved: dict, out: str) -> None:
    sim = sim_config(resolved)
    if sim.bath.enabled:
        raise ConfigError(
            "the trajectory oracle covers the classical field channels only; "
            "disable the bath"
        )
    mc = resolved["mc"]
    result = mc_evolve(
        sim.field,
        sim.initial_state,
        sim.t_max,
        sim.dt,
        mc["n_traj"],
        mc["seed"],
        omega0=sim.omega0,
        batch_size=mc["batch_size"],
        sample_stride=sim.sample_stride,
    )
    rows = [
        (
            result.times[i],
            result.population[i],
            result.population_stderr[i],
            result.coherence[i].real,
            result.coherence_re_stderr[i],
            result.coherence[i].imag,
            result.coherence_im_stderr[i],
        )
        for i in range(len(result.times))
    ]
    write_csv(
        out,
        resolved,
        "mc",
        (
            "t",
            "pop_mean",
            "pop_stderr",
            "re_coh_mean",
            "re_coh_stderr",
            "im_coh_mean",
            "im_coh_stderr",
        ),
        rows,
    )


def _markovian_sweep_point(resolved: dict, axis: str, value: float, reduce_: str):
    base = sim_config(resolved)
    swept = set_config_value(base, axis, value)
    params = markov_params(resolved)
    params = type(params)(
        bath=swept.bath, field=swept.field, picture=params.picture, omega0=swept.omega0
    )
    if reduce_ == "steady":
        rho = markovian_steady_state(params)
        return float(rho[0, 0].real)
    return markovian_evolve(
        params, swept.initial_state, swept.t_max, swept.dt,
        sample_stride=swept.sample_stride,
    )


def _cmd_sweep(resolved: dict, out: str, threads: int) -> None:
    axis = resolved["sweep"]["axis"]
    if not axis:
        raise ConfigError("sweep.axis is required (set it in the config or via --axis)")
    values = sweep_values(resolved)
    reduce_ = resolved["sweep"]["reduce"]
    series_list = resolved["run"]["series"]

    if reduce_ == "spectrum":
        rows = []
        for series in series_list:
            if series == "markovian":
                raise ConfigError("spectrum sweeps support the heom series only")
            coupling = (
                series.removeprefix("heom_")
                if series in ("heom_full", "heom_rwa")
                else None
            )
            for value in values:
                base = spectrum_config(resolved, coupling=coupling)
                swept = type(base)(
                    sim=set_config_value(base.sim, axis, value),
                    tau_max=base.tau_max,
                    dtau=base.dtau,
                    omega_grid=base.omega_grid,
                    t1=base.t1,
                    window_rate=base.window_rate,
                    substeps=base.substeps,
                    steady_method=base.steady_method,
                )
                try:
                    _, spec = compute_spectrum(swept)
                    rows.extend(
                        (value, series, spec.omega[i], spec.s_normalized[i], spec.s_raw[i], "")
                        for i in range(len(spec.omega))
                    )
                except HeomFieldError as exc:
                    rows.append(
                        (value, series, None, None, None, f"{type(exc).__name__}: {exc}")
                    )
        write_csv(
            out,
            resolved,
            "sweep",
            ("axis_value", "series", "omega", "s_normalized", "s_raw_re", "error"),
            rows,
        )
        return

    rows = []
    for series in series_list:
        if series == "markovian":
            for value in values:
                try:
                    payload = _markovian_sweep_point(resolved, axis, value, reduce_)
                except HeomFieldError as exc:
                    err = f"{type(exc).__name__}: {exc}"
                    if reduce_ == "steady":
                        rows.append((value, "markovian", None, err))
                    else:
                        rows.append((value, "markovian", None, None, None, None, err))
                    continue
                if reduce_ == "steady":
                    rows.append((value, "markovian", payload, ""))
                else:
                    for r in _trajectory_rows("markovian", payload):
                        rows.append((value, *r, ""))
            continue
        base = _series_sim(resolved, series)
        reduce_enum = (
            SweepReduce.STEADY_POPULATION
            if reduce_ == "steady"
            else SweepReduce.TRAJECTORY
        )
        points = sweep(base, axis, values, reduce_enum, threads=threads)
        for point in points:
            if not point.ok:
                if reduce_ == "steady":
                    rows.append((point.value, series, None, point.error))
                else:
                    rows.append((point.value, series, None, None, None, None, point.error))
            elif reduce_ == "steady":
                rows.append((point.value, series, point.payload, ""))
            else:
                for r in _trajectory_rows(series, point.payload):
                    rows.append((point.value, *r, ""))
    if reduce_ == "steady":
        columns = ("axis_value", "series", "pop_excited", "error")
    else:
        columns = (
            "axis_value",
            "series",
            "t",
            "pop_excited",
            "re_coh",
            "im_coh",
            "trace_err",
            "error",
        )
    write_csv(out, resolved, "sweep", columns, rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heomfield",
        description="Two-level system in a bosonic bath and a stochastic field",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("evolve", "propagate the configured dynamics and write observables"),
        ("steady", "stationary state of the configured dynamics"),
        ("spectrum", "two-time correlation and emission spectrum"),
        ("sweep", "scan one parameter axis"),
        ("mc", "Monte Carlo average over stochastic field realizations"),
        ("lindblad", "Markovian baseline evolution"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="TOML config file")
        cmd.add_argument("--output", default="-", help="output CSV path, '-' for stdout")
        cmd.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key, repeatable",
        )
        cmd.add_argument("--threads", type=int, default=1, help="sweep worker count")
        cmd.add_argument("--seed", type=int, help="override mc.seed")
        cmd.add_argument("--depth", type=int, help="override hierarchy.depth")
        cmd.add_argument("--quiet", action="store_true", help="suppress progress output")
        if name == "sweep":
            cmd.add_argument("--axis", help="dotted parameter path to scan")
            cmd.add_argument(
                "--values",
                help="comma separated list or start:stop:count",
            )
            cmd.add_argument(
                "--reduce",
                choices=("steady", "trajectory", "spectrum"),
                help="what to record per point",
            )
    return parser


def _parse_values_flag(raw: str) -> list[float]:
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--values range must be start:stop:count, got {raw!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"bad --values range {raw!r}") from exc
        if count < 1:
            raise ConfigError("--values count must be >= 1")
        return list(np.linspace(start, stop, count))
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --values list {raw!r}") from exc


def run(args) -> None:
    try:
        with open(args.config, "rb") as fh:
            tree = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {args.config}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {args.config}: {exc}") from exc

    for expr in args.set:
        key, value = parse_override(expr)
        apply_override(tree, key, value)
    if args.seed is not None:
        apply_override(tree, "mc.seed", args.seed)
    if args.depth is not None:
        apply_override(tree, "hierarchy.depth", args.depth)
    if args.command == "sweep":
        if getattr(args, "axis", None):
            apply_override(tree, "sweep.axis", args.axis)
        if getattr(args, "values", None):
            apply_override(tree, "sweep.values", _parse_values_flag(args.values))
        if getattr(args, "reduce", None):
            apply_override(tree, "sweep.reduce", args.reduce)

    resolved = validate_config(tree)

    if args.command == "evolve":
        _cmd_evolve(resolved, args.output)
    elif args.command == "steady":
        _cmd_steady(resolved, args.output)
    elif args.command == "spectrum":
        _cmd_spectrum(resolved, args.output)
    elif args.command == "sweep":
        _cmd_sweep(resolved, args.output, max(1, args.threads))
    elif args.command == "mc":
        _cmd_mc(resolved, args.output)
    elif args.command == "lindblad":
        _cmd_lindblad(resolved, args.output)
    else:  # pragma: no cover
        raise AssertionError(args.command)
    if not args.quiet and args.output != "-":
        print(f"wrote {args.output}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run(args)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"error[convergence]: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except NumericalError as exc:
        print(f"error[numerical]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
