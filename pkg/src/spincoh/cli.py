"""Command-line front end: a thin client over the service handlers.

Subcommands mirror the service endpoints (trap, dist, evolve, dephase, fit,
tomo) plus ``serve`` to launch the HTTP service. By default requests run
in-process; with ``--server URL`` they are posted to a running service
instead. CSV artifacts carry ``#`` provenance headers with the resolved
config and seed.

Exit codes: 0 success, 2 config/parse error (message names the offending
key), 3 fit non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from .formats import curve_to_csv
from .service import handlers, schemas


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> schemas.ExperimentConfig:
    if path is None:
        return schemas.ExperimentConfig()
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}") from None
    return _validate(schemas.ExperimentConfig, payload)


def _validate(model, payload):
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ConfigError(f"config: {key}: {first['msg']}") from None


def _apply_overrides(config: schemas.ExperimentConfig, args) -> schemas.ExperimentConfig:
    run = config.run.model_dump()
    for flag, key in (("seed", "seed"), ("samples", "samples"), ("shots", "shots")):
        value = getattr(args, flag, None)
        if value is not None:
            run[key] = value
    return config.model_copy(update={"run": _validate(schemas.RunSection, run)})


def _call(args, path: str, request, response_model):
    """In-process handler call, or an HTTP POST when --server is set."""
    if getattr(args, "server", None):
        import httpx

        reply = httpx.post(args.server.rstrip("/") + path,
                           json=request.model_dump(mode="json"), timeout=600.0)
        if reply.status_code != 200:
            raise ConfigError(f"server: {reply.status_code}: {reply.text}")
        return response_model.model_validate(reply.json())
    handler = {
        "/trap": handlers.run_trap, "/dist": handlers.run_dist,
        "/evolve": handlers.run_evolve, "/dephase": handlers.run_dephase,
        "/fit": handlers.run_fit, "/tomo": handlers.run_tomo,
    }[path]
    return handler(request)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _provenance(command: str, config: schemas.ExperimentConfig, **extra) -> dict:
    header = {"generated_by": f"spincoh {command}",
              "config": config.model_dump(mode="json"),
              "seed": config.run.seed}
    header.update(extra)
    return header


def _curve_from_payload(payload: schemas.CurvePayload):
    return schemas.payload_curve(payload)


def cmd_trap(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    summary = _call(args, "/trap", schemas.TrapRequest(config=config),
                    schemas.TrapSummary)
    payload = summary.model_dump()
    payload["provenance"] = _provenance("trap", config)
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


def cmd_dist(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    req = schemas.DistRequest(config=config, grid_points=args.grid_points)
    resp = _call(args, "/dist", req, schemas.DistResponse)
    lines = [f"# {k} = {json.dumps(v)}" for k, v in _provenance(
        "dist", config, mb_deviation_per_J=resp.mb_deviation_per_J,
        mb_peak_per_J=resp.mb_peak_per_J).items()]
    lines.append("u_J,p1d_per_J,p3d_per_J,db_mG,p_db_per_mG")
    for row in zip(resp.u_J, resp.p1d_per_J, resp.p3d_per_J, resp.db_mG,
                   resp.p_db_per_mG):
        lines.append(",".join(f"{x:.9e}" for x in row))
    _emit("\n".join(lines), args.out)
    return 0


def cmd_evolve(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    payload = _call(args, "/evolve", schemas.EvolveRequest(config=config),
                    schemas.CurvePayload)
    curve = _curve_from_payload(payload)
    _emit(curve_to_csv(curve, _provenance("evolve", config, **payload.meta)), args.out)
    return 0


def cmd_dephase(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    req = schemas.DephaseRequest(config=config, method=args.method)
    payload = _call(args, "/dephase", req, schemas.CurvePayload)
    curve = _curve_from_payload(payload)
    _emit(curve_to_csv(curve, _provenance("dephase", config, method=args.method,
                                          **payload.meta)), args.out)
    return 0


def cmd_fit(args) -> int:
    from .formats import read_curve_csv

    try:
        curve, _ = read_curve_csv(args.curve)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"curve: {exc}") from None
    guess = json.loads(args.guess) if args.guess else {}
    bounds = json.loads(args.bounds) if args.bounds else None
    config = _load_config(args.config) if args.config else None
    req = _validate(schemas.FitRequest, {
        "curve": schemas.curve_payload(curve).model_dump(),
        "family": args.family, "initial_guess": guess, "bounds": bounds,
        "init_state": args.init_state, "analysis_state": args.analysis_state,
        "max_iterations": args.max_iterations,
        "config": config.model_dump() if config else None,
    })
    resp = _call(args, "/fit", req, schemas.FitResponse)
    payload = resp.model_dump()
    payload["provenance"] = {"generated_by": "spincoh fit", "curve": args.curve,
                             "family": args.family, "initial_guess": guess,
                             "config": config.model_dump(mode="json") if config else None}
    _emit(json.dumps(payload, indent=2), args.out)
    if not resp.converged:
        print(f"fit did not converge: {resp.message}", file=sys.stderr)
        return 3
    return 0


def cmd_tomo(args) -> int:
    config = _apply_overrides(_load_config(args.config), args)
    resp = _call(args, "/tomo", schemas.TomoRequest(config=config),
                 schemas.TomoResponse)
    out = Path(args.out)
    lines = [f"# {k} = {json.dumps(v)}" for k, v in _provenance("tomo", config).items()]
    lines.append("time_us,r")
    lines.extend(f"{t:.6f},{r:.9e}" for t, r in zip(resp.time_us, resp.r))
    out.write_text("\n".join(lines) + "\n")
    rho_path = out.with_suffix(out.suffix + ".rho.json") if out.suffix != ".csv" \
        else out.with_name(out.stem + ".rho.json")
    rho_path.write_text(json.dumps({
        "time_us": resp.time_us, "repaired": resp.repaired,
        "trace_rho_sq": resp.trace_rho_sq, "densities": resp.densities,
    }, indent=1))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("spincoh.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincoh",
        description="Spin-1 qubit coherence in an optical dipole trap.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=False):
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--out", required=out_required,
                       help="output path (default: stdout)")
        p.add_argument("--seed", type=int, help="override run.seed (u64)")
        p.add_argument("--samples", type=int, help="override run.samples")
        p.add_argument("--shots", type=int, help="override run.shots")
        p.add_argument("--server", help="POST to a running service instead "
                                        "of computing in-process")

    p = sub.add_parser("trap", help="trap-derived quantities as JSON")
    common(p)
    p.set_defaults(func=cmd_trap)

    p = sub.add_parser("dist", help="potential-energy and light-shift pdf tables as CSV")
    common(p)
    p.add_argument("--grid-points", type=int, default=512)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("evolve", help="single-realization survival curve as CSV")
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("dephase", help="ensemble-averaged survival curve as CSV")
    common(p)
    p.add_argument("--method", choices=("mc", "quad"), default="mc")
    p.set_defaults(func=cmd_dephase)

    p = sub.add_parser("fit", help="fit a decay model to a curve CSV, emit JSON")
    p.add_argument("curve", help="input DecayCurve CSV")
    common(p)
    p.add_argument("--family", default="full-ensemble",
                   choices=("superposition-analytic", "stretched-analytic",
                            "full-ensemble"))
    p.add_argument("--guess", help='initial guess JSON, e.g. \'{"mean_bz": 4e-7}\'')
    p.add_argument("--bounds", help='bounds JSON, e.g. \'{"width_bz": [1e-9, 1e-6]}\'')
    p.add_argument("--init-state", default="x+")
    p.add_argument("--analysis-state", default="x+")
    p.add_argument("--max-iterations", type=int, default=200)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("tomo", help="tomography over the time grid: purity CSV "
                                    "+ per-time density JSON")
    common(p, out_required=True)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "<root>"
        print(f"error: config: {key}: {first['msg']}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON argument: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
