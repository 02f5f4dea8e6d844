"""The game-side brain: service control, result fusion, scoring, logging.

All subsystem traffic flows over the "asc" topic.  Frames carry a
``message-type`` header:

    result    EmotionML document (a recognition result)
    status    key:value body acknowledging a control command
    feedback  key:value body with the voice analyzer's gauge data

Control commands go to ``/queue/control.<subsystem>`` as key:value bodies
(``command`` plus an optional ``path``).

The engine consumes messages on a single loop and keeps a session log of
line-delimited JSON records.  Log timestamps are logical (driven by media
timestamps, not the wall clock) so a replayed message sequence reproduces
the log byte for byte.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from typing import Callable, IO

from .. import emotionml
from ..config import SUBSYSTEMS, Config
from ..stomp import StompClient, StompFrame
from ..voice.analyzer import TrafficFeedback
from . import game
from .vocabulary import quadrant

RESULTS_TOPIC = "/topic/asc"


def control_queue(subsystem: str) -> str:
    return f"/queue/control.{subsystem}"


class EngineError(Exception):
    pass


class UnknownSubsystem(EngineError):
    pass


class ControlTimeout(EngineError):
    """No status acknowledgment within the control timeout."""


class TurnTimeout(EngineError):
    """No recognition result within the per-turn timeout."""


def encode_kv(values: dict[str, str]) -> bytes:
    return "".join(f"{k}:{v}\n" for k, v in values.items()).encode("utf-8")


def decode_kv(body: bytes) -> dict[str, str]:
    values: dict[str, str] = {}
    for line in body.decode("utf-8", "replace").splitlines():
        key, sep, value = line.partition(":")
        if sep:
            values[key.strip()] = value.strip()
    return values


def feedback_to_kv(feedback: TrafficFeedback) -> dict[str, str]:
    values = {"overall_distance": repr(feedback.overall_distance), "overall_light": feedback.overall_light.value}
    for name, d in feedback.distances.items():
        values[f"d.{name}"] = repr(d)
        values[f"light.{name}"] = feedback.lights[name].value
    return values


@dataclass(frozen=True)
class TurnOutcome:
    turn: int
    target: str
    modality: str
    result: game.AttemptResult | None
    timed_out: bool
    state: game.GameState
    feedback: dict[str, str] | None


_TIMEOUT_RESULT = game.AttemptResult(
    recognized=emotionml.AVPoint(arousal=0.0, valence=0.0),
    recognized_label=None,
    distance=0.0,
    match=False,
    coins=0,
)


class PlatformEngine:
    """Single-loop consumer of the results topic driving the game state."""

    def __init__(
        self,
        client: StompClient,
        config: Config | None = None,
        seed: int = 0,
        log_sink: IO[str] | None = None,
        listener: Callable[[dict], None] | None = None,
    ):
        self.config = config or Config()
        self.client = client
        self.state = game.GameState(
            rng_seed=seed,
            board_len=self.config.board_len,
            robot_policy=self.config.robot_policy,
            progression=game.default_progression(self.config.vocabulary.labels),
        )
        self._log_sink = log_sink
        self._listener = listener
        self._t_ms = 0
        self._pending_annotations: list[emotionml.EmotionAnnotation] = []
        self._status_events: list[dict[str, str]] = []
        self._last_feedback: dict[str, dict[str, str]] = {}
        self.log_records: list[str] = []

    def subscribe(self) -> None:
        self.client.subscribe(RESULTS_TOPIC)

    # -- logging ---------------------------------------------------------

    def log_event(self, record: dict) -> None:
        self._emit(record)

    def _emit(self, record: dict) -> None:
        record = dict(record, t_ms=self._t_ms)
        line = json.dumps(record, sort_keys=True)
        self.log_records.append(line)
        if self._log_sink is not None:
            self._log_sink.write(line + "\n")
            self._log_sink.flush()
        if self._listener is not None:
            self._listener(record)

    # -- inbound traffic -------------------------------------------------

    def _ingest(self, frame: StompFrame) -> None:
        kind = frame.header("message-type", "result")
        if kind == "status":
            values = decode_kv(frame.body)
            self._status_events.append(values)
            self._emit(
                {
                    "event": "control",
                    "subsystem": values.get("subsystem"),
                    "command": values.get("command"),
                    "state": values.get("state"),
                }
            )
        elif kind == "feedback":
            values = decode_kv(frame.body)
            subsystem = values.pop("subsystem", "voice")
            self._last_feedback[subsystem] = values
        else:
            try:
                annotations = emotionml.parse_emotionml(frame.body)
            except emotionml.EmotionMLError as exc:
                self._emit({"event": "error", "message": f"bad result payload: {exc}"})
                return
            for annotation in annotations:
                self._t_ms = max(self._t_ms, annotation.timestamp_ms)
                self._emit(
                    {
                        "event": "annotation",
                        "modality": annotation.modality,
                        "arousal": annotation.arousal,
                        "valence": annotation.valence,
                        "category": annotation.category,
                        "confidence": annotation.confidence,
                        "timestamp_ms": annotation.timestamp_ms,
                    }
                )
                self._pending_annotations.append(annotation)

    def _await(self, predicate, timeout: float):
        """Pump the topic until the predicate yields a value or time runs out."""
        deadline = time.monotonic() + timeout
        while True:
            found = predicate()
            if found is not None:
                return found
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            frame = self.client.receive(timeout=remaining)
            if frame is not None:
                self._ingest(frame)

    # -- control ------------------------------------------------------------

    def control(self, subsystem: str, command: str, path: str | None = None, timeout: float | None = None) -> dict[str, str]:
        """Send a control command and wait for the service's status reply."""
        if subsystem not in SUBSYSTEMS:
            raise UnknownSubsystem(f"no subsystem named {subsystem!r}")
        if command not in ("start", "stop", "shutdown"):
            raise EngineError(f"unknown control command {command!r}")
        timeout = self.config.control_timeout_s if timeout is None else timeout
        values = {"command": command}
        if path is not None:
            values["path"] = path
        seen = len(self._status_events)
        self.client.send(control_queue(subsystem), encode_kv(values), headers={"message-type": "control"})

        def matching() -> dict[str, str] | None:
            for status in self._status_events[seen:]:
                if status.get("subsystem") == subsystem and status.get("command") == command:
                    return status
            return None

        status = self._await(matching, timeout)
        if status is None:
            raise ControlTimeout(f"{subsystem} did not acknowledge {command} within {timeout}s")
        return status

    # -- the game loop ----------------------------------------------------------

    def play_turn(self, target: str, modality: str, media_path: str) -> TurnOutcome:
        """One race turn: start the service on the media, await and score."""
        if modality not in SUBSYSTEMS:
            raise UnknownSubsystem(f"no subsystem named {modality!r}")
        if target not in self.config.vocabulary:
            raise game.UnknownEmotion(f"{target!r} is not a platform emotion")
        if self.state.winner is not None:
            raise game.GameFinished(f"the race is over, {self.state.winner} won")

        self.state = replace(self.state, target=target, modality=modality)
        self._pending_annotations.clear()
        self._last_feedback.pop(modality, None)

        timed_out = False
        annotation = None
        try:
            self.control(modality, "start", path=media_path)
        except ControlTimeout:
            timed_out = True
        if not timed_out:
            annotation = self._await(
                lambda: next((a for a in self._pending_annotations if a.modality == modality), None),
                self.config.turn_timeout_s,
            )
            timed_out = annotation is None

        feedback = self._last_feedback.get(modality)
        if timed_out:
            result = None
            self._emit(
                {
                    "event": "attempt",
                    "turn": self.state.turn + 1,
                    "target": target,
                    "modality": modality,
                    "timeout": True,
                    "match": False,
                    "coins": 0,
                }
            )
            step = _TIMEOUT_RESULT
        else:
            result = game.evaluate_attempt(
                target, annotation, self.config.vocabulary, self.config.match_distance
            )
            self._emit(
                {
                    "event": "attempt",
                    "turn": self.state.turn + 1,
                    "target": target,
                    "modality": modality,
                    "timeout": False,
                    "match": result.match,
                    "coins": result.coins,
                    "distance": result.distance,
                    "recognized_label": result.recognized_label,
                    "arousal": result.recognized.arousal,
                    "valence": result.recognized.valence,
                    "recognized_quadrant": quadrant(result.recognized).value,
                    "target_quadrant": self.config.vocabulary.canonical_quadrant(target).value,
                    "feedback": feedback,
                }
            )
            step = result
        self.state = game.race_step(self.state, step)
        self._emit(
            {
                "event": "race_step",
                "turn": self.state.turn,
                "player_pos": self.state.player_pos,
                "robot_pos": self.state.robot_pos,
                "wallet": self.state.wallet,
                "winner": self.state.winner,
            }
        )
        return TurnOutcome(
            turn=self.state.turn,
            target=target,
            modality=modality,
            result=result,
            timed_out=timed_out,
            state=self.state,
            feedback=feedback,
        )

    def spend(self, price: int) -> None:
        before = self.state.wallet
        self.state = game.wallet_spend(self.state, price)
        self._emit({"event": "wallet", "wallet": self.state.wallet, "delta": self.state.wallet - before})

    def submit_quiz(self, unit: str, correct: int, total: int) -> None:
        updated = game.quiz_progression(self.state.progression, unit, correct, total, self.config.quiz_pass)
        changed = {u: s for u, s in updated.items() if self.state.progression.get(u) != s}
        self.state = replace(self.state, progression=updated)
        for unit_id, status in changed.items():
            self._emit({"event": "progression", "unit": unit_id, "status": status})
