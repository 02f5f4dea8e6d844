"""WebSocket bridge between the platform engine and the browser UI.

The UI never speaks STOMP; it exchanges JSON over one WebSocket.

Events pushed to the UI:
    {"type": "hello", "vocabulary": {label: {"arousal", "valence", "quadrant"}},
     "fixtures": [...], "game": {...}}
    {"type": "state", "game": {...}}
    {"type": "feedback", "turn", "target", "modality", "timeout", "match",
     "coins", "av": {"arousal", "valence"} | null, "recognized": label|null,
     "distance", "lights": {...}|null, "game": {...}}
    {"type": "reference", "target", "media": path|null}
    {"type": "error", "message": ...}

Commands accepted from the UI:
    {"type": "select_target", "emotion": label}
    {"type": "select_modality", "modality": "face"|"voice"|"body"}
    {"type": "submit_attempt", "media": fixture path}
    {"type": "play_reference"}

Attempt media is chosen from server-listed fixtures; commands arriving while
an attempt is running are rejected so the UI lockout has a server-side twin.
"""

from __future__ import annotations

import functools
import http.server
import json
import logging
import threading
from pathlib import Path

from websockets.sync.server import serve as ws_serve

from .config import SUBSYSTEMS, Config
from .platform import game
from .platform.engine import PlatformEngine
from .platform.vocabulary import quadrant
from .stomp import StompClient
from .voice.prototypes import REFERENCE_FILENAME

log = logging.getLogger(__name__)

FIXTURE_SUFFIXES = (".wav", ".csv")


def game_view(state: game.GameState) -> dict:
    return {
        "target": state.target,
        "modality": state.modality,
        "player_pos": state.player_pos,
        "robot_pos": state.robot_pos,
        "board_len": state.board_len,
        "wallet": state.wallet,
        "turn": state.turn,
        "winner": state.winner,
    }


def vocabulary_view(config: Config) -> dict:
    return {
        label: {
            "arousal": point.arousal,
            "valence": point.valence,
            "quadrant": quadrant(point).value,
        }
        for label, point in config.vocabulary.points.items()
    }


def list_fixtures(fixtures_dir: str | None) -> list[dict]:
    if not fixtures_dir:
        return []
    root = Path(fixtures_dir)
    if not root.is_dir():
        return []
    out = []
    for path in sorted(root.rglob("*")):
        if path.suffix in FIXTURE_SUFFIXES and path.is_file():
            modality = "voice" if path.suffix == ".wav" else ("face" if "face" in path.name else "body")
            out.append({"path": str(path), "name": path.name, "modality": modality})
    return out


class BridgeSession:
    """Serializes UI commands onto one engine; one attempt at a time."""

    def __init__(self, engine: PlatformEngine, config: Config):
        self.engine = engine
        self.config = config
        self._lock = threading.Lock()
        self._busy = False
        self.target: str | None = None
        self.modality: str | None = None

    def handle(self, command: dict) -> list[dict]:
        kind = command.get("type")
        if kind == "select_target":
            emotion = command.get("emotion")
            if emotion not in self.config.vocabulary:
                return [{"type": "error", "message": f"unknown emotion {emotion!r}"}]
            self.target = emotion
            return [{"type": "state", "game": game_view(self.engine.state), "target": self.target, "modality": self.modality}]
        if kind == "select_modality":
            modality = command.get("modality")
            if modality not in SUBSYSTEMS:
                return [{"type": "error", "message": f"unknown modality {modality!r}"}]
            self.modality = modality
            return [{"type": "state", "game": game_view(self.engine.state), "target": self.target, "modality": self.modality}]
        if kind == "play_reference":
            return [{"type": "reference", "target": self.target, "media": self._reference_path()}]
        if kind == "submit_attempt":
            return self._submit(command.get("media"))
        return [{"type": "error", "message": f"unknown command {kind!r}"}]

    def _reference_path(self) -> str | None:
        if self.target is None or not self.config.voice_prototypes:
            return None
        path = Path(self.config.voice_prototypes) / self.target / REFERENCE_FILENAME
        return str(path) if path.is_file() else None

    def _submit(self, media: str | None) -> list[dict]:
        if self.target is None or self.modality is None:
            return [{"type": "error", "message": "select a target and a modality first"}]
        if self.engine.state.winner is not None:
            return [{"type": "error", "message": "the race is over"}]
        if not media or not Path(media).is_file():
            return [{"type": "error", "message": f"no such media {media!r}"}]
        with self._lock:
            if self._busy:
                return [{"type": "error", "message": "an attempt is already running"}]
            self._busy = True
        try:
            outcome = self.engine.play_turn(self.target, self.modality, media)
        except Exception as exc:
            return [{"type": "error", "message": str(exc)}]
        finally:
            with self._lock:
                self._busy = False
        result = outcome.result
        return [
            {
                "type": "feedback",
                "turn": outcome.turn,
                "target": outcome.target,
                "modality": outcome.modality,
                "timeout": outcome.timed_out,
                "match": bool(result and result.match),
                "coins": result.coins if result else 0,
                "av": (
                    {"arousal": result.recognized.arousal, "valence": result.recognized.valence}
                    if result
                    else None
                ),
                "recognized": result.recognized_label if result else None,
                "distance": result.distance if result else None,
                "lights": outcome.feedback,
                "game": game_view(outcome.state),
            }
        ]


def run_bridge(
    config: Config,
    ws_port: int = 8765,
    http_port: int | None = None,
    assets_dir: str | None = None,
    ready: threading.Event | None = None,
    stop: threading.Event | None = None,
) -> None:
    """Serve the bridge until ``stop`` is set (or forever)."""
    client = StompClient(config.broker_host, config.broker_port)
    client.connect()
    engine = PlatformEngine(client, config)
    engine.subscribe()
    session = BridgeSession(engine, config)

    def on_connect(websocket) -> None:
        log.info("ui connected from %s", websocket.remote_address)
        hello = {
            "type": "hello",
            "vocabulary": vocabulary_view(config),
            "fixtures": list_fixtures(config.fixtures_dir),
            "game": game_view(engine.state),
        }
        websocket.send(json.dumps(hello))
        for raw in websocket:
            try:
                command = json.loads(raw)
            except json.JSONDecodeError:
                websocket.send(json.dumps({"type": "error", "message": "commands must be JSON"}))
                continue
            for event in session.handle(command):
                websocket.send(json.dumps(event))

    httpd = None
    if http_port is not None and assets_dir:
        handler = functools.partial(http.server.SimpleHTTPRequestHandler, directory=assets_dir)
        httpd = http.server.ThreadingHTTPServer(("127.0.0.1", http_port), handler)
        threading.Thread(target=httpd.serve_forever, name="bridge-assets-http", daemon=True).start()

    try:
        with ws_serve(on_connect, "127.0.0.1", ws_port) as server:
            if ready is not None:
                ready.set()
            if stop is None:
                server.serve_forever()
            else:
                threading.Thread(target=server.serve_forever, daemon=True).start()
                stop.wait()
                server.shutdown()
    finally:
        if httpd is not None:
            httpd.shutdown()
            httpd.server_close()
        client.disconnect()
