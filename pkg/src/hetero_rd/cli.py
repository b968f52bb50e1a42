"""Command-line entry point.

Exit codes: 0 on success, 2 on validation/parse failure, 1 on run failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import HeteroRdError, ParseError, ValidationError
from .harness import (
    PRESET_NAMES,
    build_preset_spec,
    load_spec,
    run_experiment,
    validate_spec,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetero-rd",
        description="Run reaction-diffusion experiments with piecewise diffusivity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a preset or a custom config")
    run.add_argument("--preset", choices=PRESET_NAMES)
    run.add_argument("--config", help="JSON config mirroring the experiment spec")
    run.add_argument("--out", help="output directory")
    run.add_argument("--eps", help="comma-separated epsilon values")
    run.add_argument("--nx", type=int, help="number of cells")
    run.add_argument("--dt", type=float, help="time step")
    run.add_argument("--t-end", type=float, dest="t_end", help="final time")
    run.add_argument("--workers", type=int, help="concurrent runs")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("--config", required=True)
    return parser


def _cli_overrides(args) -> dict:
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.eps is not None:
        try:
            overrides["eps_values"] = tuple(float(v) for v in args.eps.split(","))
        except ValueError:
            raise ValidationError([f"cannot parse --eps {args.eps!r}"])
    if args.nx is not None:
        overrides["n_cells"] = args.nx
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if args.workers is not None:
        overrides["workers"] = args.workers
    return overrides


def _cmd_run(args) -> int:
    try:
        overrides = _cli_overrides(args)
        if args.config is not None:
            spec = load_spec(args.config)
            if args.preset is not None:
                spec = replace(spec, preset=args.preset)
            spec = replace(spec, **overrides)
        elif args.preset is not None:
            spec = build_preset_spec(args.preset, overrides)
        else:
            print("error: provide --preset and/or --config", file=sys.stderr)
            return 2
        violations = validate_spec(spec)
        if violations:
            for v in violations:
                print(f"invalid spec: {v}", file=sys.stderr)
            return 2
        manifest = run_experiment(spec)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HeteroRdError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1

    failed = [r for r in manifest.runs if r["status"] != "ok"]
    for r in manifest.runs:
        status = r["status"]
        extra = f" ({r['error']})" if r["error"] else ""
        print(f"{r['tag']}: {status} in {r['wall_time_s']:.2f} s{extra}")
    if failed:
        print(f"{len(failed)} of {len(manifest.runs)} runs failed", file=sys.stderr)
        return 1
    print(f"artifacts written to {spec.out_dir}")
    return 0


def _cmd_validate(args) -> int:
    try:
        spec = load_spec(args.config)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    violations = validate_spec(spec)
    if violations:
        for v in violations:
            print(f"invalid: {v}", file=sys.stderr)
        return 2
    print("config is valid")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
