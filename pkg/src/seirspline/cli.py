"""Command-line interface: fit, project, serve, countries."""

from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from .documents import ModelDocument, default_created_at, load_data_directory
from .errors import DataError, FitError, FormatError, SeirSplineError
from .fitting import FitConfig, fit
from .ingest import derive_observations
from .scenarios import ScenarioSpec, project

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_FIT = 4

PROJECTION_CSV_HEADER = "date,beta,gamma,S,E,I,R,R0"


def _iso_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ISO date (YYYY-MM-DD), got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seirspline",
        description="Spline-rate SEIR model: calibration and scenario projection.")
    parser.add_argument("--json-errors", action="store_true",
                        help="emit machine-readable error JSON on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="calibrate against observed data")
    p_fit.add_argument("--country", required=True)
    p_fit.add_argument("--start", type=_iso_date, required=True, metavar="YYYY-MM-DD")
    p_fit.add_argument("--end", type=_iso_date, required=True, metavar="YYYY-MM-DD")
    p_fit.add_argument("--population", type=float, default=None,
                       help="defaults to populations.json in the data dir")
    p_fit.add_argument("--data-dir", default="data")
    p_fit.add_argument("--scale", type=float, default=1.0,
                       help="multiplier applied to both observed series")
    p_fit.add_argument("--top", type=int, default=None, help="number of models to keep")
    p_fit.add_argument("--seed", type=int, default=None)
    p_fit.add_argument("--out", default="models.json")
    p_fit.add_argument("--config", default=None,
                       help="JSON file with fit settings (weights, bounds, budgets)")
    p_fit.add_argument("--timestamp", default=None,
                       help="created_at value; omitted by default so identical "
                            "runs produce byte-identical documents")

    p_proj = sub.add_parser("project", help="run a what-if scenario from a models file")
    p_proj.add_argument("--models", required=True, help="ModelDocument JSON from fit")
    p_proj.add_argument("--rank", type=int, default=1)
    p_proj.add_argument("--t5", type=int, default=15, metavar="DAYS",
                        help="days after T4 when the first coefficient pair finishes")
    p_proj.add_argument("--horizon", type=int, default=60, metavar="DAYS")
    p_proj.add_argument("--coef1", type=float, default=1.0,
                        help="beta on [T4,T5]: >1 strengthens (beta shrinks)")
    p_proj.add_argument("--coef2", type=float, default=1.0,
                        help="gamma on [T4,T5]: >1 strengthens (gamma grows)")
    p_proj.add_argument("--coef11", type=float, default=1.0,
                        help="beta after T5: >1 relaxes (beta grows)")
    p_proj.add_argument("--coef22", type=float, default=1.0,
                        help="gamma after T5: >1 relaxes (gamma shrinks)")
    p_proj.add_argument("--out", default="projection.csv")
    p_proj.add_argument("--summary-out", default=None, help="write summary JSON here")

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--data-dir", default="data")
    p_srv.add_argument("--model-store-dir", default="var/models")

    p_cty = sub.add_parser("countries", help="list countries present in the data")
    p_cty.add_argument("--data-dir", default="data")
    return parser


def cmd_fit(args) -> int:
    data = load_data_directory(args.data_dir)
    population = args.population
    if population is None:
        population = data.population_of(args.country)
    obs = derive_observations(data.confirmed, data.recovered, data.deaths,
                              args.country, args.start, args.end,
                              population, args.scale)
    config_kw = {}
    if args.config:
        config_kw = json.loads(Path(args.config).read_text())
    config = FitConfig.from_dict(config_kw)
    overrides = {}
    if args.top is not None:
        overrides["top_k"] = args.top
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        merged = config.to_dict()
        merged.update(overrides)
        config = FitConfig.from_dict(merged)

    report = fit(obs, config)
    doc = ModelDocument(
        country=args.country,
        t1=args.start,
        t4=args.end,
        population_n=population,
        sigma=config.sigma,
        lam=config.lam,
        scale=args.scale,
        report=report,
        observations=obs,
        data_fingerprint=report.observation_fingerprint,
        created_at=args.timestamp or default_created_at(),
    )
    doc.save(args.out)

    best = report.models[0]
    ratio = report.fmax / best.fval if best.fval > 0 else float("inf")
    print(f"{args.country} [{args.start} .. {args.end}]  "
          f"N={population:g} scale={args.scale:g}")
    print(f"evaluated {report.evaluated_count} candidates, "
          f"Fmax={report.fmax:.6g}, max/min ratio={ratio:.4g}")
    for m in report.models:
        print(f"  model {m.rank}: Fval={m.fval:.6g}  T2={m.theta.t2}  T3={m.theta.t3}  "
              f"peak {m.peak_date} ({m.peak_value:.1f})")
    print(f"model id {doc.model_id()} -> {args.out}")
    return EXIT_OK


def cmd_project(args) -> int:
    doc = ModelDocument.load(args.models)
    ranks = {m.rank: m for m in doc.report.models}
    if args.rank not in ranks:
        raise DataError(f"rank {args.rank} not in models file "
                        f"(has {sorted(ranks)})")
    model = ranks[args.rank]
    spec = ScenarioSpec(t5_offset_days=args.t5, horizon_days=args.horizon,
                        coef1=args.coef1, coef2=args.coef2,
                        coef11=args.coef11, coef22=args.coef22)
    proj = project(model, doc.observations, spec, sigma=doc.sigma)
    write_projection_csv(proj, args.out)
    summary = {
        "t4": proj.t4.isoformat(),
        "t5": proj.t5.isoformat(),
        "horizon": proj.horizon_date.isoformat(),
        "peak_date": proj.peak_date.isoformat(),
        "peak_value": proj.peak_value,
        "value_at_horizon": proj.value_at_horizon,
        "scenario": spec.to_dict(),
    }
    if args.summary_out:
        Path(args.summary_out).write_text(json.dumps(summary, indent=2) + "\n")
    print(f"scenario over [{proj.t4} .. {proj.horizon_date}], T5={proj.t5}")
    print(f"  peak {proj.peak_date} ({proj.peak_value:.1f}), "
          f"I(horizon)={proj.value_at_horizon:.2f}")
    print(f"series -> {args.out}")
    return EXIT_OK


def write_projection_csv(proj, path) -> None:
    traj = proj.trajectory
    lines = [PROJECTION_CSV_HEADER]
    for k in range(len(traj)):
        lines.append(",".join([
            traj.date_at(k).isoformat(),
            repr(float(proj.beta_ext.values[k])),
            repr(float(proj.gamma_ext.values[k])),
            repr(float(traj.s[k])),
            repr(float(traj.e[k])),
            repr(float(traj.i[k])),
            repr(float(traj.r[k])),
            repr(float(proj.r0_series.values[k])),
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir, args.model_store_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cmd_countries(args) -> int:
    data = load_data_directory(args.data_dir)
    for name in data.countries():
        print(name)
    return EXIT_OK


_COMMANDS = {
    "fit": cmd_fit,
    "project": cmd_project,
    "serve": cmd_serve,
    "countries": cmd_countries,
}


def _emit_error(args, code: str, exc: Exception) -> None:
    if getattr(args, "json_errors", False):
        payload = {"code": code, "message": str(exc),
                   "details": getattr(exc, "violations", None)}
        print(json.dumps(payload), file=sys.stderr)
    else:
        print(f"error ({code}): {exc}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FitError as exc:
        _emit_error(args, "fit_failed", exc)
        return EXIT_FIT
    except (DataError, FormatError, FileNotFoundError) as exc:
        _emit_error(args, "data_error", exc)
        return EXIT_DATA
    except SeirSplineError as exc:
        _emit_error(args, "invalid_arguments", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
