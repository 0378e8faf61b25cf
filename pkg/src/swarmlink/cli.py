"""Command line entry points: run, validate, serve.

Exit codes are part of the contract: 0 on success, 2 for anything wrong
with the scenario document (unreadable, malformed, invalid), 3 for
failures while running.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .errors import ScenarioError, SwarmlinkError
from .scenario import (EXPORT_FORMATS, ScenarioRunError, export_log,
                       load_scenario, run_scenario)

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_RUNTIME = 3

DEFAULT_PORT = 8765


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmlink",
        description="Hand-guided swarm formation simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario headless and export the log")
    run.add_argument("scenario", help="path to a scenario TOML document")
    run.add_argument("--out", help="output path (default: stdout)")
    run.add_argument("--format", choices=EXPORT_FORMATS,
                     help="export format (default: the scenario's choice)")
    run.add_argument("--duration-s", type=float,
                     help="override the scenario duration")

    val = sub.add_parser("validate", help="parse and validate a scenario document")
    val.add_argument("scenario", help="path to a scenario TOML document")

    serve = sub.add_parser("serve", help="host a live session over websockets")
    serve.add_argument("scenario", help="path to a scenario TOML document")
    serve.add_argument("--port", type=int,
                       default=int(os.environ.get("SWARMLINK_PORT", DEFAULT_PORT)),
                       help="listen port (env SWARMLINK_PORT, default %(default)s)")
    serve.add_argument("--rate-div", type=int, default=2,
                       help="send one state frame every N ticks (default %(default)s)")
    return parser


def _load(path: str):
    try:
        with open(path, "rb") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        raise SystemExit(EXIT_SCENARIO)
    try:
        return load_scenario(text)
    except ScenarioError as exc:
        where = f" (field {exc.field})" if getattr(exc, "field", None) else ""
        print(f"error: {path}: {exc}{where}", file=sys.stderr)
        raise SystemExit(EXIT_SCENARIO)


def _cmd_run(args) -> int:
    config = _load(args.scenario)
    if args.duration_s is not None:
        if args.duration_s <= 0 or args.duration_s < config.waypoints[-1].t_s:
            print(f"error: --duration-s {args.duration_s} does not cover the "
                  f"scenario's waypoints", file=sys.stderr)
            return EXIT_SCENARIO
        config = replace(config, duration_s=args.duration_s)
    try:
        log = run_scenario(config)
    except ScenarioRunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    data = export_log(log, args.format or config.out_format)
    if args.out:
        with open(args.out, "wb") as handle:
            handle.write(data)
        print(f"wrote {len(log.rows)} rows to {args.out}", file=sys.stderr)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = _load(args.scenario)
    rate = 1.0 / config.world.period
    print(f"ok: {len(config.waypoints)} waypoints, {config.duration_s} s "
          f"at {rate:g} Hz")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import asyncio

    from .server import serve_scenario

    config = _load(args.scenario)
    try:
        asyncio.run(serve_scenario(config, port=args.port,
                                   rate_div=args.rate_div))
    except KeyboardInterrupt:
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except SwarmlinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "validate": _cmd_validate,
               "serve": _cmd_serve}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
