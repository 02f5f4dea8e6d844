"""Scripted end-to-end sessions: spawn, drive turns, write the log.

A session script is JSON:

    {
      "seed": 7,
      "board_len": 10,
      "turns": [
        {"target": "happy", "modality": "voice", "media": "clips/happy.wav"},
        ...
      ]
    }

Every media path must exist at load time and every target must be a
platform emotion.  ``run_session`` drives the engine turn by turn; a turn
whose service never answers is logged as a timeout and scored zero, and the
session still completes.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time
from dataclasses import dataclass, replace as dc_replace
from pathlib import Path
from typing import IO

from .config import SUBSYSTEMS, Config
from .platform.engine import PlatformEngine
from .stomp import Broker, ClientError, StompClient

SESSION_START_TIMEOUT_S = 10.0


class ScriptInvalid(Exception):
    pass


@dataclass(frozen=True)
class SessionTurn:
    target: str
    modality: str
    media: str


@dataclass(frozen=True)
class SessionScript:
    turns: tuple[SessionTurn, ...]
    seed: int = 0
    board_len: int = 10


def load_script(path: str | Path, config: Config | None = None) -> SessionScript:
    config = config or Config()
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScriptInvalid(f"{path}: {exc}") from None
    if not isinstance(raw, dict) or not isinstance(raw.get("turns", None), list):
        raise ScriptInvalid(f"{path}: script must be an object with a turns array")
    turns = []
    for i, turn in enumerate(raw["turns"]):
        try:
            target, modality, media = turn["target"], turn["modality"], turn["media"]
        except (TypeError, KeyError) as exc:
            raise ScriptInvalid(f"{path}: turn {i}: missing {exc}") from None
        if target not in config.vocabulary:
            raise ScriptInvalid(f"{path}: turn {i}: {target!r} is not a platform emotion")
        if modality not in SUBSYSTEMS:
            raise ScriptInvalid(f"{path}: turn {i}: unknown modality {modality!r}")
        media_path = (path.parent / media).resolve() if not Path(media).is_absolute() else Path(media)
        if not media_path.is_file():
            raise ScriptInvalid(f"{path}: turn {i}: media {media_path} does not exist")
        turns.append(SessionTurn(target=target, modality=modality, media=str(media_path)))
    return SessionScript(
        turns=tuple(turns),
        seed=int(raw.get("seed", 0)),
        board_len=int(raw.get("board_len", 10)),
    )


@dataclass(frozen=True)
class SessionSummary:
    turns_played: int
    winner: str | None
    wallet: int
    player_pos: int
    robot_pos: int
    timeouts: int
    matches: int


def run_session(
    script: SessionScript,
    config: Config,
    log_sink: IO[str] | None = None,
    listener=None,
) -> SessionSummary:
    """Drive a scripted session against an already-running broker+services."""
    client = StompClient(config.broker_host, config.broker_port)
    client.connect()
    try:
        config = dc_replace(config, board_len=script.board_len)
        engine = PlatformEngine(client, config, seed=script.seed, log_sink=log_sink, listener=listener)
        engine.subscribe()
        engine.log_event(
            {
                "event": "session_start",
                "seed": script.seed,
                "board_len": script.board_len,
                "planned_turns": len(script.turns),
            }
        )
        timeouts = matches = 0
        played = 0
        for turn in script.turns:
            outcome = engine.play_turn(turn.target, turn.modality, turn.media)
            played += 1
            timeouts += 1 if outcome.timed_out else 0
            matches += 1 if (outcome.result and outcome.result.match) else 0
            if engine.state.winner is not None:
                break
        state = engine.state
        return SessionSummary(
            turns_played=played,
            winner=state.winner,
            wallet=state.wallet,
            player_pos=state.player_pos,
            robot_pos=state.robot_pos,
            timeouts=timeouts,
            matches=matches,
        )
    finally:
        client.disconnect()


# -- process orchestration ---------------------------------------------------


def _service_argv(subsystem: str, config_path: str | Path) -> list[str]:
    return [sys.executable, "-m", "emodesk.cli", "service", "--subsystem", subsystem, "--config", str(config_path)]


def _broker_argv(config_path: str | Path) -> list[str]:
    return [sys.executable, "-m", "emodesk.cli", "broker", "--config", str(config_path)]


def wait_for_broker(config: Config, timeout: float = SESSION_START_TIMEOUT_S) -> None:
    deadline = time.monotonic() + timeout
    while True:
        probe = StompClient(config.broker_host, config.broker_port, connect_timeout=0.5)
        try:
            probe.connect()
            probe.disconnect()
            return
        except ClientError:
            if time.monotonic() > deadline:
                raise
            time.sleep(0.05)


def wait_for_services(config: Config, subsystems: tuple[str, ...], timeout: float = SESSION_START_TIMEOUT_S) -> None:
    """Block until every service acknowledges a bare start command.

    One command per service: control queues buffer until the service
    subscribes, and a retry loop would leave duplicate late acknowledgments
    behind to pollute the session log.
    """
    client = StompClient(config.broker_host, config.broker_port)
    client.connect()
    try:
        engine = PlatformEngine(client, config)
        engine.subscribe()
        for subsystem in subsystems:
            engine.control(subsystem, "start", timeout=timeout)
    finally:
        client.disconnect()


class SessionProcesses:
    """Broker and service child processes for one session."""

    def __init__(self, config_path: str | Path, subsystems: tuple[str, ...] = SUBSYSTEMS):
        self.config_path = Path(config_path)
        self.subsystems = subsystems
        self.broker: subprocess.Popen | None = None
        self.services: dict[str, subprocess.Popen] = {}

    def start(self, config: Config) -> None:
        self.broker = subprocess.Popen(_broker_argv(self.config_path))
        wait_for_broker(config)
        for subsystem in self.subsystems:
            self.services[subsystem] = subprocess.Popen(_service_argv(subsystem, self.config_path))
        wait_for_services(config, self.subsystems)

    def stop(self) -> None:
        for proc in [*self.services.values(), self.broker]:
            if proc is None:
                continue
            if proc.poll() is None:
                proc.terminate()
                try:
                    proc.wait(timeout=5)
                except subprocess.TimeoutExpired:
                    proc.kill()
                    proc.wait(timeout=5)

    def __enter__(self) -> "SessionProcesses":
        return self

    def __exit__(self, *exc) -> None:
        self.stop()
