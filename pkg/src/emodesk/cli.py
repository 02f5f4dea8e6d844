"""Command line entry points.

    emodesk broker [--port N] [--config PATH]
    emodesk service --subsystem {face|voice|body} [--config PATH]
    emodesk session --script PATH [--seed N] [--log PATH] [--spawn] [--config PATH]
    emodesk validate-content CSV
    emodesk bridge --ws-port N [--http-port N] [--config PATH]

Every declared error exits non-zero with a one-line message on stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import signal
import sys
import tempfile
import threading
from dataclasses import replace

from .config import SUBSYSTEMS, Config, ConfigError, load_config


def _load_config(args) -> Config:
    return load_config(getattr(args, "config", None))


def cmd_broker(args) -> int:
    from .stomp import Broker

    config = _load_config(args)
    port = args.port if args.port is not None else config.broker_port
    broker = Broker(host=config.broker_host, port=port)
    try:
        broker.start()
    except OSError as exc:
        print(f"error: port {port} unavailable: {exc}", file=sys.stderr)
        return 2
    print(f"broker listening on {config.broker_host}:{broker.port}")
    stop = threading.Event()
    for sig in (signal.SIGINT, signal.SIGTERM):
        signal.signal(sig, lambda *_: stop.set())
    stop.wait()
    broker.stop()
    return 0


def cmd_service(args) -> int:
    from .service import build_service
    from .stomp import ClientError

    config = _load_config(args)
    try:
        service = build_service(args.subsystem, config)
    except Exception as exc:
        print(f"error: cannot build {args.subsystem} service: {exc}", file=sys.stderr)
        return 2
    for sig in (signal.SIGINT, signal.SIGTERM):
        signal.signal(sig, lambda *_: service.client.close())
    try:
        service.serve_forever()
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def cmd_session(args) -> int:
    from .runner import ScriptInvalid, SessionProcesses, load_script, run_session

    config = _load_config(args)
    try:
        script = load_script(args.script, config)
    except ScriptInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        script = replace(script, seed=args.seed)

    with contextlib.ExitStack() as stack:
        if args.spawn:
            config_path = getattr(args, "config", None)
            if config_path is None:
                handle = tempfile.NamedTemporaryFile("w", suffix=".conf", delete=False)
                handle.write("")
                handle.close()
                config_path = handle.name
            processes = SessionProcesses(config_path)
            try:
                processes.start(config)
            except Exception as exc:
                processes.stop()
                print(f"error: failed to start session processes: {exc}", file=sys.stderr)
                return 2
            stack.enter_context(processes)
        log_handle = stack.enter_context(open(args.log, "w", encoding="utf-8")) if args.log else None
        try:
            summary = run_session(script, config, log_sink=log_handle)
        except Exception as exc:
            print(f"error: session failed: {exc}", file=sys.stderr)
            return 2
    print(
        f"session complete: turns={summary.turns_played} matches={summary.matches} "
        f"timeouts={summary.timeouts} wallet={summary.wallet} "
        f"player={summary.player_pos} robot={summary.robot_pos} winner={summary.winner or 'none'}"
    )
    return 0


def cmd_validate_content(args) -> int:
    from .platform.scoring import BadRow, validate_content

    try:
        scores = validate_content(args.csv)
    except (BadRow, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("stimulus,score,eligible")
    for s in scores:
        print(f"{s.stimulus},{s.score:.2f},{'yes' if s.eligible else 'no'}")
    return 0


def cmd_bridge(args) -> int:
    from .bridge import run_bridge

    config = _load_config(args)
    try:
        run_bridge(config, ws_port=args.ws_port, http_port=args.http_port, assets_dir=args.assets)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emodesk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("broker", help="run the message broker")
    p.add_argument("--port", type=int, default=None, help="listen port (default from config, 61613)")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_broker)

    p = sub.add_parser("service", help="run one analyzer service")
    p.add_argument("--subsystem", choices=SUBSYSTEMS, required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_service)

    p = sub.add_parser("session", help="run a scripted session")
    p.add_argument("--script", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--log", default=None, help="write the session log to this file")
    p.add_argument("--spawn", action="store_true", help="auto-spawn broker and services")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_session)

    p = sub.add_parser("validate-content", help="score a stimulus survey CSV")
    p.add_argument("csv")
    p.set_defaults(func=cmd_validate_content)

    p = sub.add_parser("bridge", help="run the UI WebSocket bridge")
    p.add_argument("--ws-port", type=int, default=8765)
    p.add_argument("--http-port", type=int, default=None, help="also serve UI assets on this port")
    p.add_argument("--assets", default=None, help="directory of static UI assets")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_bridge)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
