"""Flat key:value configuration with environment overrides.

File lines are ``key:value``; ``#`` starts a comment.  Documented keys:

    broker_host            broker address               (default 127.0.0.1)
    broker_port            broker TCP port              (default 61613)
    media_port.face        face service media port      (default 8091)
    media_port.voice       voice service media port     (default 8092)
    media_port.body        body service media port      (default 8093)
    voice_prototypes       prototype library root
    face_model             face model file
    body_model             body centroid model file
    fixtures_dir           attempt media offered to the UI
    board_len              race board length            (default 10)
    match_distance         attempt match radius         (default 0.6)
    quiz_pass              quiz pass ratio              (default 0.8)
    robot_policy           every2 | random              (default every2)
    control_timeout_s      control acknowledgment wait  (default 2.0)
    turn_timeout_s         per-turn annotation wait     (default 5.0)
    emotion.<label>        canonical point override, "valence,arousal"

Environment variables override file values: ASC_BROKER_HOST, ASC_BROKER_PORT,
ASC_MEDIA_PORT_FACE/VOICE/BODY, ASC_VOICE_PROTOTYPES, ASC_FACE_MODEL,
ASC_BODY_MODEL, ASC_FIXTURES_DIR, ASC_BOARD_LEN, ASC_MATCH_DISTANCE,
ASC_QUIZ_PASS, ASC_ROBOT_POLICY, ASC_CONTROL_TIMEOUT_S, ASC_TURN_TIMEOUT_S.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .platform.vocabulary import DEFAULT_VOCABULARY, EmotionVocabulary

SUBSYSTEMS = ("face", "voice", "body")

_ENV_KEYS = {
    "ASC_BROKER_HOST": "broker_host",
    "ASC_BROKER_PORT": "broker_port",
    "ASC_MEDIA_PORT_FACE": "media_port.face",
    "ASC_MEDIA_PORT_VOICE": "media_port.voice",
    "ASC_MEDIA_PORT_BODY": "media_port.body",
    "ASC_VOICE_PROTOTYPES": "voice_prototypes",
    "ASC_FACE_MODEL": "face_model",
    "ASC_BODY_MODEL": "body_model",
    "ASC_FIXTURES_DIR": "fixtures_dir",
    "ASC_BOARD_LEN": "board_len",
    "ASC_MATCH_DISTANCE": "match_distance",
    "ASC_QUIZ_PASS": "quiz_pass",
    "ASC_ROBOT_POLICY": "robot_policy",
    "ASC_CONTROL_TIMEOUT_S": "control_timeout_s",
    "ASC_TURN_TIMEOUT_S": "turn_timeout_s",
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    broker_host: str = "127.0.0.1"
    broker_port: int = 61613
    media_ports: dict[str, int] = field(
        default_factory=lambda: {"face": 8091, "voice": 8092, "body": 8093}
    )
    voice_prototypes: str | None = None
    face_model: str | None = None
    body_model: str | None = None
    fixtures_dir: str | None = None
    board_len: int = 10
    match_distance: float = 0.6
    quiz_pass: float = 0.8
    robot_policy: str = "every2"
    control_timeout_s: float = 2.0
    turn_timeout_s: float = 5.0
    vocabulary: EmotionVocabulary = DEFAULT_VOCABULARY

    def __post_init__(self) -> None:
        ports = [p for p in self.media_ports.values() if p]
        if len(set(ports)) != len(ports):
            raise ConfigError("media ports must be distinct across services")

    def media_port(self, subsystem: str) -> int:
        return self.media_ports[subsystem]

    def model_path(self, subsystem: str) -> str | None:
        return {
            "face": self.face_model,
            "voice": self.voice_prototypes,
            "body": self.body_model,
        }[subsystem]


def parse_kv_text(text: str, source: str = "<config>") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep or not key.strip():
            raise ConfigError(f"{source}:{lineno}: expected key:value, got {line!r}")
        values[key.strip()] = value.strip()
    return values


def _build(values: dict[str, str]) -> Config:
    base = Config()
    overrides = {}
    point_overrides: dict[str, tuple[float, float]] = {}
    try:
        for key, value in values.items():
            if key == "broker_host":
                overrides["broker_host"] = value
            elif key == "broker_port":
                overrides["broker_port"] = int(value)
            elif key.startswith("media_port."):
                subsystem = key.split(".", 1)[1]
                if subsystem not in SUBSYSTEMS:
                    raise ConfigError(f"unknown subsystem in {key!r}")
                ports = dict(overrides.get("media_ports", base.media_ports))
                ports[subsystem] = int(value)
                overrides["media_ports"] = ports
            elif key in ("voice_prototypes", "face_model", "body_model", "fixtures_dir", "robot_policy"):
                overrides[key] = value
            elif key == "board_len":
                overrides["board_len"] = int(value)
            elif key in ("match_distance", "quiz_pass", "control_timeout_s", "turn_timeout_s"):
                overrides[key] = float(value)
            elif key.startswith("emotion."):
                label = key.split(".", 1)[1]
                v, a = (float(c) for c in value.split(","))
                point_overrides[label] = (v, a)
            else:
                raise ConfigError(f"unknown configuration key {key!r}")
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}") from None
    if point_overrides:
        overrides["vocabulary"] = base.vocabulary.with_overrides(point_overrides)
    return replace(base, **overrides)


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> Config:
    """Defaults, then the file, then environment variables."""
    env = os.environ if env is None else env
    values: dict[str, str] = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        values.update(parse_kv_text(text, source=str(path)))
    for env_key, conf_key in _ENV_KEYS.items():
        if env_key in env:
            values[conf_key] = env[env_key]
    return _build(values)
