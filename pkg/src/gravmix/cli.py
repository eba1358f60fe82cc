"""Command-line interface: experiments, sweeps, figure bundles.

Every run emits one CSV per trajectory (time, zeta, then the audit
channels, at full precision) plus a summary.json echoing the effective
configuration, so identical configs reproduce identical bytes. Exit codes:
0 success, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, astro, kernels, meanfield, quantum, seeded, stability
from .core import (
    ScalingFit,
    TimeGrid,
    Trajectory,
    first_zero_crossing,
    fit_log_law,
    fit_log_scaling,
)
from .errors import ParameterError, SolverError


@dataclass(frozen=True)
class ParamSpec:
    kind: type
    default: object
    help: str = ""


@dataclass
class RunConfig:
    """A validated experiment invocation."""

    experiment: str
    parameters: dict
    output_path: Path
    sweep: tuple[str, tuple] | None = None
    workers: int = 1
    backend: str = "auto"


_COMMON_GRID = {
    "dt": ParamSpec(float, 1e-3, "integration step"),
    "horizon": ParamSpec(float, None, "end of the dimensionless time grid"),
    "sample_every": ParamSpec(int, None, "record every k-th step"),
}

SCHEMAS: dict[str, dict[str, ParamSpec]] = {
    "seeded": {
        "seed": ParamSpec(float, 1e-3, "initial mixing angle of beam A (radians)"),
        "seed_b": ParamSpec(float, None, "beam B seed angle (defaults to seed)"),
        "n_a": ParamSpec(float, 512.0, "beam A occupation"),
        "n_b": ParamSpec(float, 512.0, "beam B occupation"),
        **_COMMON_GRID,
    },
    "quantum": {
        "n": ParamSpec(int, 512, "pair count N"),
        "lam": ParamSpec(float, 0.0, "flavor-diagonal coupling"),
        "method": ParamSpec(str, "eig", "eig or rk4"),
        **_COMMON_GRID,
    },
    "meanfield": {
        "n": ParamSpec(float, 512.0, "occupation per cloud"),
        "seed": ParamSpec(float, 1.0, "A-side seed, single-quantum units"),
        "seed_tau": ParamSpec(float, None, "B-side seed (defaults to seed)"),
        "lam": ParamSpec(float, 0.0, "flavor-diagonal coupling"),
        **_COMMON_GRID,
    },
    "isotropic-compare": {
        "n": ParamSpec(float, 512.0, "occupation per cloud"),
        "m": ParamSpec(int, 64, "modes per cloud"),
        "seed": ParamSpec(float, 1.0, "A-side seed, single-quantum units"),
        "lam": ParamSpec(float, 0.0, "flavor-diagonal coupling"),
        "rng_seed": ParamSpec(int, 0, "seed for the random sampling variant"),
        "sampling": ParamSpec(str, "fibonacci", "fibonacci or random"),
        **_COMMON_GRID,
    },
    "stability": {
        "lam": ParamSpec(float, 0.0, "flavor-diagonal coupling"),
        "empirical": ParamSpec(bool, False, "also measure the growth rate"),
        "seed": ParamSpec(float, 1e-8, "perturbation seed for the empirical fit"),
        "dt": ParamSpec(float, 1e-3, "integration step"),
        "horizon": ParamSpec(float, None, "empirical-run horizon"),
    },
    "estimate": {
        "luminosity_erg_per_s": ParamSpec(float, 3.6e56, "source luminosity"),
        "frequency_hz": ParamSpec(float, 250.0, "source frequency"),
    },
}

FIGURES = ("fig1", "fig2", "fig3", "fig4")


# ---------------------------------------------------------------- helpers


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    names = list(traj.audits)
    lines = [",".join(["time", "zeta", *names])]
    columns = [traj.times, traj.zeta, *(traj.audits[k] for k in names)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _fit_dict(fit: ScalingFit) -> dict:
    return {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared}


def _grid_from(params: dict, default_horizon: float, default_sample: int = 1) -> TimeGrid:
    horizon = params.get("horizon")
    if horizon is None:
        horizon = default_horizon
    sample = params.get("sample_every")
    if sample is None:
        sample = default_sample
    return TimeGrid.to(horizon, params["dt"], sample)


# ------------------------------------------------------------ experiments


def _run_seeded(params: dict) -> dict:
    seed_b = params["seed_b"] if params["seed_b"] is not None else params["seed"]
    beams = seeded.BeamPair(params["n_a"], params["n_b"], params["seed"], seed_b)
    grid = _grid_from(params, default_horizon=25.0)
    traj = seeded.run_seeded(beams, grid)
    summary = {"break_time": first_zero_crossing(traj), "final_zeta": float(traj.zeta[-1])}
    if beams.seed_a == beams.seed_b and beams.n_a == beams.n_b and beams.seed_a > 0:
        summary["closed_form_crossing"] = seeded.symmetric_crossing_time(beams.seed_a)
    return {"trajectories": {"seeded": traj}, "summary": summary}


def _run_quantum(params: dict) -> dict:
    n = params["n"]
    h = quantum.build_ladder(n, params["lam"])
    grid = _grid_from(params, default_horizon=quantum.default_horizon(n, params["lam"]))
    traj = quantum.evolve_ladder(h, grid, method=params["method"])
    return {
        "trajectories": {"quantum": traj},
        "summary": {
            "break_time": first_zero_crossing(traj),
            "min_zeta": float(np.min(traj.zeta)),
            "max_norm_error": float(np.max(np.abs(traj.audits["norm"] - 1.0))),
        },
    }


def _run_meanfield(params: dict) -> dict:
    grid = _grid_from(params, default_horizon=15.0)
    traj = meanfield.run_single_mode(
        params["n"], params["seed"], params["lam"], grid, seed_tau=params["seed_tau"]
    )
    drift = max(
        float(np.max(np.abs(traj.audits["spin_length_a"] - 1.0))),
        float(np.max(np.abs(traj.audits["spin_length_b"] - 1.0))),
    )
    return {
        "trajectories": {"meanfield": traj},
        "summary": {
            "break_time": first_zero_crossing(traj),
            "max_spin_length_drift": drift,
            "max_sum_s3_t3": float(np.max(np.abs(traj.audits["sum_s3_t3"]))),
        },
    }


def _run_isotropic(params: dict) -> dict:
    grid = _grid_from(params, default_horizon=150.0, default_sample=10)
    report = meanfield.beam_vs_isotropic_report(
        params["n"],
        params["m"],
        params["seed"],
        grid,
        lam=params["lam"],
        rng_seed=params["rng_seed"],
        method=params["sampling"],
    )
    return {
        "trajectories": {"beams": report.beam, "isotropic": report.isotropic},
        "summary": {
            "beam_break_time": report.beam_crossing,
            "isotropic_break_time": report.isotropic_crossing,
            "break_time_ratio": report.crossing_ratio,
            "isotropic_tail_mean": report.isotropic_tail_mean,
        },
    }


def _run_stability(params: dict) -> dict:
    report = stability.analyze_lambda(params["lam"])
    lam = report.lam
    summary = {
        "lambda": lam,
        "eigenvalues": [[mu.real, mu.imag] for mu in report.eigenvalues],
        "growth_rate": report.growth_rate,
        "classification": report.classification,
        # Two candidate slowdown laws for the nonlinear turnover time,
        # normalized to 1 at lambda = 0; measured turnovers can be compared
        # against either.
        "turnover_slowdown_predictions": {
            "inverse_one_minus_lambda": (1.0 / (1.0 - lam) if abs(lam) < 1.0 else None),
            "inverse_growth_rate": (
                1.0 / math.sqrt(1.0 - lam * lam) if abs(lam) < 1.0 else None
            ),
        },
    }
    if params["empirical"]:
        measured = stability.growth_rate_empirical(
            lam, seed=params["seed"], horizon=params["horizon"], dt=params["dt"]
        )
        summary["empirical"] = {
            "rate": measured.rate,
            "r_squared": measured.r_squared,
            "max_amplification": measured.max_amplification,
            "window": list(measured.window) if measured.window else None,
        }
    return {"trajectories": {}, "summary": summary}


def _run_estimate(params: dict) -> dict:
    scenario = astro.MergerScenario(params["luminosity_erg_per_s"], params["frequency_hz"])
    ctx = astro.NaturalUnitContext()
    density = astro.graviton_density(scenario, ctx)
    xi = astro.xi_figure_of_merit(density.value, ctx, frequency_hz=scenario.frequency_hz)
    blocking = astro.blocking_threshold(
        density.value, astro.quantum_energy_mev(scenario.frequency_hz, ctx), ctx
    )
    incoherent = astro.incoherent_comparison(scenario.frequency_hz, ctx)
    verdict = (
        f"xi = {xi.value:.3e} -> "
        + ("turnover-capable" if xi.flags["turnover_capable"] else "not turnover-capable (xi < 1)")
    )
    return {
        "trajectories": {},
        "summary": {
            "graviton_density": density.to_dict(),
            "xi": xi.to_dict(),
            "blocking_threshold": blocking.to_dict(),
            "incoherent_comparison": incoherent.to_dict(),
            "verdict": verdict,
        },
    }


_RUNNERS = {
    "seeded": _run_seeded,
    "quantum": _run_quantum,
    "meanfield": _run_meanfield,
    "isotropic-compare": _run_isotropic,
    "stability": _run_stability,
    "estimate": _run_estimate,
}


# ------------------------------------------------------------- validation


def validate_parameters(experiment: str, raw: dict) -> dict:
    """Check names and coerce types against the experiment schema."""
    schema = SCHEMAS.get(experiment)
    if schema is None:
        raise ParameterError(f"unknown experiment {experiment!r}")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ParameterError(
            f"unknown parameter(s) for {experiment}: {', '.join(unknown)}; "
            f"valid: {', '.join(sorted(schema))}"
        )
    params = {}
    for name, spec in schema.items():
        value = raw.get(name, spec.default)
        if value is not None and not isinstance(value, spec.kind):
            try:
                value = spec.kind(value)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"parameter {name}={value!r} is not a {spec.kind.__name__}") from exc
        params[name] = value
    return params


def _parse_sweep(text: str, experiment: str) -> tuple[str, tuple]:
    if "=" not in text:
        raise ParameterError("sweep must look like name=v1,v2,...")
    name, _, values = text.partition("=")
    name = name.strip()
    schema = SCHEMAS[experiment]
    if name not in schema:
        raise ParameterError(f"sweep parameter {name!r} unknown for {experiment}")
    if schema[name].kind not in (int, float):
        raise ParameterError(f"sweep axis {name!r} must be numeric")
    try:
        parsed = tuple(schema[name].kind(float(v)) for v in values.split(",") if v.strip())
    except ValueError as exc:
        raise ParameterError(f"bad sweep values {values!r}") from exc
    if not parsed:
        raise ParameterError("sweep needs at least one value")
    return name, parsed


# -------------------------------------------------------------- execution


def _execute(experiment: str, params: dict, backend: str) -> dict:
    if backend != "auto":
        kernels.set_backend(backend)
    return _RUNNERS[experiment](params)


def run(config: RunConfig) -> list[Path]:
    """Execute a validated config; returns the written files."""
    runs: list[tuple[str, dict]] = []
    if config.sweep is None:
        runs.append(("", dict(config.parameters)))
    else:
        name, values = config.sweep
        for v in values:
            p = dict(config.parameters)
            p[name] = v
            runs.append((f"{name}_{v:g}", p))

    previous_backend = kernels.backend_name()
    try:
        if config.workers > 1 and len(runs) > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
                payloads = list(
                    pool.map(
                        _execute,
                        *zip(*((config.experiment, p, config.backend) for _, p in runs)),
                    )
                )
            if config.backend != "auto":
                kernels.set_backend(config.backend)
        else:
            payloads = [_execute(config.experiment, p, config.backend) for _, p in runs]
        return _emit(config, runs, payloads)
    finally:
        kernels.set_backend(previous_backend)


def _emit(config: RunConfig, runs, payloads) -> list[Path]:
    out = config.output_path
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    run_summaries = []
    for (tag, params), payload in zip(runs, payloads):
        files = {}
        for stem, traj in payload["trajectories"].items():
            fname = f"{config.experiment}_{stem}" + (f"_{tag}" if tag else "") + ".csv"
            write_trajectory_csv(out / fname, traj)
            written.append(out / fname)
            files[stem] = fname
        entry = {"parameters": _jsonable(params), "files": files, **payload["summary"]}
        run_summaries.append(entry)

    summary = {
        "experiment": config.experiment,
        "version": __version__,
        "backend": kernels.backend_name(),
        "config": {
            "parameters": _jsonable(config.parameters),
            "sweep": (
                {"param": config.sweep[0], "values": list(config.sweep[1])}
                if config.sweep
                else None
            ),
            "workers": config.workers,
        },
        "runs": run_summaries,
    }
    if config.experiment == "stability" and config.sweep is not None:
        summary["classifications"] = [r["classification"] for r in run_summaries]
    if (
        config.experiment == "quantum"
        and config.sweep is not None
        and config.sweep[0] == "n"
    ):
        points = [
            (r["parameters"]["n"], r["break_time"])
            for r in run_summaries
            if r["break_time"] is not None
        ]
        if len(points) >= 3:
            summary["break_time_fit"] = _fit_dict(fit_log_scaling(points))
            summary["break_time_law_coefficient"] = _law_dict(fit_log_law(points))

    summary_path = out / f"{config.experiment}_summary.json"
    write_json(summary_path, summary)
    written.append(summary_path)
    return written


def _law_dict(law) -> dict:
    return {"coefficient": law.coefficient, "r_squared_uncentered": law.r_squared}


def _jsonable(params: dict) -> dict:
    return {k: (v if v is None or isinstance(v, (int, float, str, bool)) else str(v)) for k, v in params.items()}


# ---------------------------------------------------------------- figures


def figure_bundle(figure: str, out_dir: Path, backend: str = "auto") -> list[Path]:
    """Write the CSV bundle for one of the four reference figures."""
    if figure not in FIGURES:
        raise ParameterError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    out = Path(out_dir) / figure
    previous_backend = kernels.backend_name()
    try:
        if backend != "auto":
            kernels.set_backend(backend)
        out.mkdir(parents=True, exist_ok=True)
        return _FIGURE_BUILDERS[figure](out)
    finally:
        kernels.set_backend(previous_backend)


def _fig1(out: Path) -> list[Path]:
    # Seed labels are initial photon fractions; the seed angle is their root.
    labels = (1e-4, 1e-6, 1e-8, 1e-10)
    grid = TimeGrid.to(25.0, 1e-3, sample_every=25)
    written = []
    crossings = []
    for label in labels:
        eps = math.sqrt(label)
        traj = seeded.run_seeded(seeded.BeamPair(512, 512, eps, eps), grid)
        path = out / f"seed_{label:.0e}.csv"
        write_trajectory_csv(path, traj)
        written.append(path)
        crossings.append((label, first_zero_crossing(traj)))
    fit = fit_log_scaling([(1.0 / label, t) for label, t in crossings])
    summary = {
        "figure": "fig1",
        "version": __version__,
        "seed_labels": list(labels),
        "crossings": [{"seed_label": l, "break_time": t} for l, t in crossings],
        "crossing_vs_log_inverse_seed": _fit_dict(fit),
    }
    path = out / "summary.json"
    write_json(path, summary)
    written.append(path)
    return written


def _fig2(out: Path) -> list[Path]:
    ns = (16, 64, 256, 1024)
    grid = TimeGrid.to(8.0, 1e-3, sample_every=10)
    written = []
    points = []
    for n in ns:
        traj = quantum.evolve_ladder(quantum.build_ladder(n), grid)
        path = out / f"N{n:04d}.csv"
        write_trajectory_csv(path, traj)
        written.append(path)
        points.append((n, first_zero_crossing(traj)))
    fit = fit_log_scaling(points)
    summary = {
        "figure": "fig2",
        "version": __version__,
        "pair_counts": list(ns),
        "crossings": [{"n": n, "break_time": t} for n, t in points],
        "break_time_fit": _fit_dict(fit),
        "break_time_law_coefficient": _law_dict(fit_log_law(points)),
    }
    path = out / "summary.json"
    write_json(path, summary)
    written.append(path)
    return written


def _fig3(out: Path) -> list[Path]:
    n = 512
    grid = TimeGrid.to(16.0, 1e-3, sample_every=10)
    tq = quantum.evolve_ladder(quantum.build_ladder(n), grid)
    tm = meanfield.run_single_mode(float(n), 1.0, 0.0, grid, seed_tau=0.0)
    written = []
    for stem, traj in (("quantum_N0512", tq), ("meanfield_eps1", tm)):
        path = out / f"{stem}.csv"
        write_trajectory_csv(path, traj)
        written.append(path)
    cq, cm = first_zero_crossing(tq), first_zero_crossing(tm)
    upto = tq.times <= min(cq, cm)
    summary = {
        "figure": "fig3",
        "version": __version__,
        "quantum_break_time": cq,
        "meanfield_break_time": cm,
        "max_tracking_deviation": float(np.max(np.abs(tq.zeta[upto] - tm.zeta[upto]))),
        "rebound_amplitude_quantum": float(np.max(tq.zeta[np.argmin(tm.zeta):])),
        "rebound_amplitude_meanfield": float(np.max(tm.zeta[np.argmin(tm.zeta):])),
    }
    path = out / "summary.json"
    write_json(path, summary)
    written.append(path)
    return written


def _fig4(out: Path) -> list[Path]:
    n, m = 512.0, 64
    grid = TimeGrid.to(100.0, 1e-3, sample_every=50)
    report = meanfield.beam_vs_isotropic_report(n, m, 1.0, grid)
    written = []
    for stem, traj in (("beams", report.beam), ("isotropic_m64", report.isotropic)):
        path = out / f"{stem}.csv"
        write_trajectory_csv(path, traj)
        written.append(path)
    summary = {
        "figure": "fig4",
        "version": __version__,
        "beam_break_time": report.beam_crossing,
        "isotropic_break_time": report.isotropic_crossing,
        "break_time_ratio": report.crossing_ratio,
        "isotropic_tail_mean": report.isotropic_tail_mean,
    }
    path = out / "summary.json"
    write_json(path, summary)
    written.append(path)
    return written


_FIGURE_BUILDERS = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4}


# ------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravmix",
        description="Coherent flavor-conversion experiments for clashing particle clouds.",
    )
    parser.add_argument("--version", action="version", version=f"gravmix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for experiment, schema in SCHEMAS.items():
        p = sub.add_parser(experiment, help=f"run the {experiment} experiment")
        for name, spec in schema.items():
            flag = "--" + name.replace("_", "-")
            if spec.kind is bool:
                p.add_argument(flag, dest=name, action="store_true", default=None, help=spec.help)
            else:
                p.add_argument(flag, dest=name, type=spec.kind, default=None, help=spec.help)
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--config", type=Path, default=None, help="JSON file with parameters")
        p.add_argument("--sweep", type=str, default=None, help="sweep axis, e.g. lam=0,0.5,1")
        p.add_argument("--workers", type=int, default=1, help="parallel workers for sweeps")
        p.add_argument(
            "--backend",
            choices=("auto", "python", "compiled"),
            default="auto",
            help="stepping-kernel backend",
        )

    f = sub.add_parser("figures", help="emit the CSV bundle for a reference figure")
    f.add_argument("figure", choices=FIGURES)
    f.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    f.add_argument(
        "--backend", choices=("auto", "python", "compiled"), default="auto",
        help="stepping-kernel backend",
    )
    return parser


def _load_config_file(path: Path) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ParameterError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParameterError("config file must hold a JSON object")
    return data


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "figures":
            files = figure_bundle(args.figure, args.out, backend=args.backend)
            print(f"wrote {len(files)} files under {args.out / args.figure}")
            return 0

        experiment = args.command
        raw: dict = {}
        sweep_text = None
        if args.config is not None:
            file_cfg = _load_config_file(args.config)
            sweep_cfg = file_cfg.pop("sweep", None)
            if sweep_cfg is not None:
                sweep_text = f"{sweep_cfg.get('param')}=" + ",".join(
                    str(v) for v in sweep_cfg.get("values", [])
                )
            raw.update(file_cfg)
        for name in SCHEMAS[experiment]:
            value = getattr(args, name, None)
            if value is not None:
                raw[name] = value
        if args.sweep is not None:
            sweep_text = args.sweep

        params = validate_parameters(experiment, raw)
        sweep = _parse_sweep(sweep_text, experiment) if sweep_text else None
        config = RunConfig(
            experiment=experiment,
            parameters=params,
            output_path=args.out,
            sweep=sweep,
            workers=max(1, args.workers),
            backend=args.backend,
        )
        files = run(config)
        if experiment == "estimate":
            summary = json.loads(files[-1].read_text(encoding="utf-8"))
            print(summary["runs"][0]["verdict"])
        print(f"wrote {len(files)} files under {args.out}")
        return 0
    except ParameterError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
