import hashlib
import threading
import urllib.error
import urllib.request

import pytest

from emodesk.platform.engine import ControlTimeout, PlatformEngine
from emodesk.service import BodyService, FaceService, VoiceService, build_service
from emodesk.stomp import Broker, StompClient

import e2e_kit
from conftest import free_port


@pytest.fixture(scope="module")
def stack(tmp_path_factory):
    """Broker + three in-process services over a generated fixture kit."""
    root = tmp_path_factory.mktemp("kit")
    with Broker(port=0) as broker:
        ports = {"face": free_port(), "voice": free_port(), "body": free_port()}
        config = e2e_kit.build_kit(root, broker.port, ports, extra_config="control_timeout_s:2.0\nturn_timeout_s:3.0\n")
        services = [build_service(name, config) for name in ("voice", "body", "face")]
        threads = [threading.Thread(target=s.serve_forever, daemon=True) for s in services]
        for t in threads:
            t.start()
        yield {"broker": broker, "config": config, "root": root, "services": services}
        client = StompClient(port=broker.port)
        try:
            client.connect()
            engine = PlatformEngine(client, config)
            engine.subscribe()
            for name in ("voice", "body", "face"):
                try:
                    engine.control(name, "shutdown", timeout=1.0)
                except ControlTimeout:
                    pass
            client.disconnect()
        except Exception:
            pass


def fresh_engine(stack, seed=0):
    client = StompClient(port=stack["broker"].port)
    client.connect()
    engine = PlatformEngine(client, stack["config"], seed=seed)
    engine.subscribe()
    return engine


def test_service_types(stack):
    kinds = {type(s) for s in stack["services"]}
    assert kinds == {VoiceService, BodyService, FaceService}


def test_media_endpoint_404_before_any_analysis(stack):
    # runs before any face analysis in this module
    port = stack["config"].media_port("face")
    with pytest.raises(urllib.error.HTTPError) as exc_info:
        urllib.request.urlopen(f"http://127.0.0.1:{port}/media/latest")
    assert exc_info.value.code == 404


def test_voice_turn_with_prototype_clip(stack):
    engine = fresh_engine(stack)
    media = str(stack["root"] / "prototypes" / "happy" / "reference.wav")
    outcome = engine.play_turn("happy", "voice", media)
    assert not outcome.timed_out
    assert outcome.result.match and outcome.result.coins == 2
    assert outcome.result.recognized_label == "happy"
    assert outcome.feedback["overall_light"] == "green"
    engine.client.disconnect()


def test_body_turn_classifies_target(stack):
    engine = fresh_engine(stack)
    outcome = engine.play_turn("angry", "body", str(stack["root"] / "traces" / "angry.csv"))
    assert not outcome.timed_out
    assert outcome.result.recognized_label == "angry"
    assert outcome.result.match and outcome.result.coins == 2
    engine.client.disconnect()


def test_face_turn_lands_on_target(stack):
    engine = fresh_engine(stack)
    outcome = engine.play_turn("excited", "face", str(stack["root"] / "faces" / "excited.csv"))
    assert not outcome.timed_out
    assert outcome.result.match
    assert outcome.result.coins == 1  # face reports no category
    assert outcome.result.distance < 1e-5
    engine.client.disconnect()


def test_media_endpoint_returns_exact_bytes(stack):
    engine = fresh_engine(stack)
    media = stack["root"] / "prototypes" / "sad" / "reference.wav"
    engine.play_turn("sad", "voice", str(media))
    port = stack["config"].media_port("voice")
    with urllib.request.urlopen(f"http://127.0.0.1:{port}/media/latest") as response:
        served = response.read()
        assert response.headers["Content-Type"] == "audio/wav"
    assert hashlib.sha256(served).hexdigest() == hashlib.sha256(media.read_bytes()).hexdigest()
    engine.client.disconnect()


def test_analysis_error_does_not_kill_service(stack, tmp_path):
    bad = tmp_path / "broken.wav"
    bad.write_bytes(b"this is not a wav file")
    engine = fresh_engine(stack)
    outcome = engine.play_turn("happy", "voice", str(bad))
    assert outcome.timed_out  # no annotation, but the start was acknowledged
    # service is still alive and serves the next attempt
    good = str(stack["root"] / "prototypes" / "happy" / "reference.wav")
    assert engine.play_turn("happy", "voice", good).result.match
    engine.client.disconnect()


def test_unknown_control_command_is_acknowledged_as_error(stack):
    engine = fresh_engine(stack)
    engine.client.send(
        "/queue/control.voice",
        b"command:reboot\n",
        headers={"message-type": "control"},
    )
    # the error status lands in the log rather than raising
    deadline_frame = engine._await(
        lambda: next((s for s in engine._status_events if s.get("state") == "error"), None), 2.0
    )
    assert deadline_frame is not None
    engine.client.disconnect()
