# cli.py
"""
Command line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible build
or failed verification.
"""
import argparse
import json
import logging
import os
import sys
import time

from dotenv import load_dotenv
from marshmallow import ValidationError

from experiments.io import load_instance, load_system, read_json, save_instance, save_system
from experiments.reports import adversarial_report, bounds_table, format_table
from experiments.runner import SweepConfig, resolve_params, run_sweep, write_sweep
from processing.builder import build_system
from processing.instance import sample_instance
from processing.verify import verify_compatibility, verify_dc_success, verify_sinr_success
from schemas import SweepConfigSchema
from utils.errors import ScalenetError
from utils.propagation import DcParams, PropagationModel, RadioParams

logger = logging.getLogger("scalenet")

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _params_parser():
    shared = _Parser(add_help=False)
    group = shared.add_argument_group("construction parameters")
    group.add_argument("--mode", choices=["theorem", "explicit"], default="theorem",
                       help="derive (C, D, P) from n and gamma, or take them from --C/--D/--P")
    group.add_argument("--C", type=float, default=None, help="maximum hop length")
    group.add_argument("--D", type=float, default=None, help="transmitter spacing margin (derived when omitted)")
    group.add_argument("--P", type=float, default=None, help="transmit power (derived when omitted)")
    group.add_argument("--alpha", type=float, default=3.0, help="path-loss exponent")
    group.add_argument("--beta", type=float, default=1.0, help="SINR threshold")
    group.add_argument("--n0", type=float, default=1.0, help="noise power")
    group.add_argument("--w-bits", type=float, default=1.0, help="bits per slot W")
    group.add_argument("--model", choices=["A", "B"], default="B", help="propagation model")
    group.add_argument("--cell-scale", type=float, default=1.0, help="partition scale multiplier")
    group.add_argument("--b", type=float, default=None, help="connectivity multiplier for gamma >= 1/2")
    return shared


def build_parser():
    parser = _Parser(prog="scalenet", description="Capacity scaling constructions for wireless networks")
    sub = parser.add_subparsers(dest="command", required=True)
    params = _params_parser()

    p = sub.add_parser("generate", help="sample a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build", parents=[params], help="route, color and schedule an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", parents=[params], help="audit a scheduled system")
    p.add_argument("--instance", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--quiet", action="store_true", help="only print failing slots")

    p = sub.add_parser("adversarial", help="dense packing that defeats small (C, D)")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--m", type=int, default=10000)

    p = sub.add_parser("bounds", parents=[params], help="closed-form bounds at one point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)

    p = sub.add_parser("sweep", help="Monte Carlo sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None, help="defaults to SCALENET_WORKERS")
    p.add_argument("--out", default=None, help="override the config's CSV path")
    p.add_argument("--trials", type=int, default=None, help="override the config's trials per point")
    p.add_argument("--seed", type=int, default=None, help="override the config's master seed")
    p.add_argument("--store", action="store_true", help="import the CSV into the results store")
    p.add_argument("--no-progress", action="store_true")

    p = sub.add_parser("serve", help="run the read-only results API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=5000)

    sub.add_parser("init-db", help="drop and recreate the results store")
    return parser


def _config_from_args(args):
    return SweepConfig(
        gammas=[], ns=[], trials=1, master_seed=0,
        alpha=args.alpha, beta=args.beta, N0=args.n0, W=args.w_bits, model=args.model,
        mode=args.mode, C=args.C, D=args.D, P=args.P,
        cell_scale=args.cell_scale, connectivity_b=args.b,
    )


def _resolve(args, n, gamma):
    if args.mode == "explicit" and args.C is None:
        raise ValidationError("explicit mode needs --C")
    return resolve_params(_config_from_args(args), n, gamma)


def cmd_generate(args):
    instance = sample_instance(args.n, args.gamma, args.seed)
    save_instance(instance, args.out)
    print(f"✓ Instance n={instance.n} gamma={instance.gamma} written to {args.out}")
    return EXIT_OK


def cmd_build(args):
    instance = load_instance(args.instance)
    C, D, P = _resolve(args, instance.n, instance.gamma)
    plan, txsets, system, report = build_system(instance, C, D, args.w_bits, args.cell_scale)
    summary = {**report.to_dict(), "C": C, "D": D, "P": P}
    for line in format_table(summary):
        print(f"  {line}")
    if system is None:
        print(f"✗ Infeasible: {len(plan.blocked_pairs)} route(s) cross an empty cell", file=sys.stderr)
        return EXIT_FAILED
    if not report.diameter_guaranteed:
        print(f"⚠ cell_scale={args.cell_scale} gives cells wider than C/2; hop lengths are measured, not guaranteed")
    save_system(system, args.out, summary)
    print(f"✓ System with period {system.period} written to {args.out}")
    return EXIT_OK


def cmd_verify(args):
    instance = load_instance(args.instance)
    system = load_system(args.system)
    C, D, P = _resolve(args, instance.n, instance.gamma)

    compatible = verify_compatibility(system)
    dc = verify_dc_success(system, instance, DcParams(C, D))
    sinr = verify_sinr_success(system, instance, RadioParams(P, args.n0, args.beta), PropagationModel(args.model, args.alpha))
    for dc_ok, slot in zip(dc.slots, sinr.slots):
        passed = dc_ok and not slot.failing_hops
        if args.quiet and passed:
            continue
        print(f"  slot {slot.slot}: DC {'ok' if dc_ok else 'FAIL'}, "
              f"SINR min {slot.min_sinr:.6g} ({len(slot.failing_hops)} failing)")

    print(f"{'✓' if compatible else '✗'} compatibility")
    print(f"{'✓' if dc.ok else '✗'} DC(C={C:.6g}, D={D:.6g})")
    print(f"{'✓' if sinr.ok else '✗'} SINR >= {args.beta} at P={P:.6g}, min slot SINR {sinr.min_sinr:.6g}")
    return EXIT_OK if compatible and dc.ok and sinr.ok else EXIT_FAILED


def cmd_adversarial(args):
    report = adversarial_report(args.C, args.D, args.alpha, args.beta, args.m)
    for line in format_table(report):
        print(f"  {line}")
    if report["violates_beta"]:
        print(f"✓ DC({args.C}, {args.D}) holds yet SINR {report['exact_sinr']:.6g} < beta={args.beta}")
    else:
        print(f"⚠ SINR {report['exact_sinr']:.6g} meets beta={args.beta}; no violation at m={args.m}")
    return EXIT_OK


def cmd_bounds(args):
    if args.mode == "explicit":
        if args.C is None or args.D is None:
            raise ValidationError("explicit bounds need --C and --D")
        C, D = args.C, args.D
    else:
        C, D, _ = _resolve(args, args.n, args.gamma)
    for line in format_table(bounds_table(args.n, args.gamma, C, D, args.w_bits, args.b)):
        print(f"  {line}")
    return EXIT_OK


def cmd_sweep(args):
    raw = read_json(args.config)
    if not isinstance(raw, dict):
        raise ValidationError("sweep config must be a JSON object")
    overrides = {"out": args.out, "workers": args.workers, "trials": args.trials, "master_seed": args.seed}
    raw.update({key: value for key, value in overrides.items() if value is not None})
    data = SweepConfigSchema().load(raw)
    try:
        config = SweepConfig(**data)
    except TypeError as e:
        raise ValidationError(f"bad sweep config: {e}") from e

    started = time.perf_counter()
    records = run_sweep(config, progress=not args.no_progress)
    summary = write_sweep(records, config, elapsed=time.perf_counter() - started)

    for point in summary["points"]:
        print(f"  gamma={point['gamma']} n={point['n']}: feasible {point['feasible']}/{point['trials']}, "
              f"median lambda {point['lam_median']}")
    for flag in summary["flags"]:
        print(f"⚠ {flag}")
    errors = sum(point["errors"] for point in summary["points"])
    if errors:
        print(f"⚠ {errors} trial(s) recorded an error")
    print(f"✓ {len(records)} records written to {config.out}")

    if args.store:
        from app import create_app
        from routes.experiments import import_sweep_csv

        app = create_app()
        with app.app_context():
            run, _ = import_sweep_csv(config.out)
        print(f"✓ Stored as run {run.id}")
    return EXIT_OK


def cmd_serve(args):
    from app import create_app

    create_app().run(host=args.host, port=args.port)
    return EXIT_OK


def cmd_init_db(args):
    from app import create_app
    from db import db

    app = create_app()
    with app.app_context():
        db.drop_all()
        db.create_all()
    print("✅ Results store recreated")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "build": cmd_build,
    "verify": cmd_verify,
    "adversarial": cmd_adversarial,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "serve": cmd_serve,
    "init-db": cmd_init_db,
}


def main(argv=None):
    load_dotenv()
    logging.basicConfig(
        level=os.getenv("SCALENET_LOG_LEVEL", "INFO").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ScalenetError, ValidationError, OSError, json.JSONDecodeError) as e:
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
