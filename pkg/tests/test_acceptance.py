"""Acceptance criteria, one test per criterion.

Each test prints a `[acceptance] PASS/FAIL <name>` line (see conftest) and
pins the tolerances stated in the project contract.  Criteria with their own
runtime budgets time themselves.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

import e2e_kit
from conftest import free_port, tone

# -- STOMP suite: round-trip, fan-out, queue partition; < 10 s ----------------


def test_stomp_suite_roundtrip_fanout_partition():
    from emodesk.stomp import Broker, StompClient, StompFrame, decode_frame, encode_frame, queue, topic

    started = time.perf_counter()

    rng = np.random.default_rng(42)
    printable = "".join(chr(c) for c in range(32, 127)) + ":\\\r\n"
    commands = ("SEND", "MESSAGE", "ERROR")

    def random_frame():
        headers = []
        for _ in range(int(rng.integers(0, 5))):
            key = "".join(rng.choice(list(printable), size=int(rng.integers(1, 10))))
            value = "".join(rng.choice(list(printable), size=int(rng.integers(0, 14))))
            if key != "content-length":
                headers.append((key, value))
        body = bytes(rng.integers(0, 256, size=int(rng.integers(0, 40))))
        if body:
            headers.insert(int(rng.integers(0, len(headers) + 1)), ("content-length", str(len(body))))
        return StompFrame(str(rng.choice(commands)), tuple(headers), body)

    for _ in range(1000):
        f = random_frame()
        decoded, rest = decode_frame(encode_frame(f))
        assert decoded == f and rest == b""  # exact

    with Broker(port=0) as broker:
        subscribers = []
        for n in (1, 2, 5):
            while len(subscribers) < n:
                c = StompClient(port=broker.port)
                c.connect()
                c.subscribe("/topic/asc")
                subscribers.append(c)
            assert broker.publish(topic("asc"), b"ping") == n
            for c in subscribers:
                assert c.receive(timeout=2).body == b"ping"

        consumers = [StompClient(port=broker.port) for _ in range(3)]
        for c in consumers:
            c.connect()
            c.subscribe("/queue/work")
        for i in range(1000):
            broker.publish(queue("work"), str(i).encode())
        buckets = []
        for c in consumers:
            got = []
            while True:
                m = c.receive(timeout=0.5)
                if m is None:
                    break
                got.append(int(m.body))
            buckets.append(got)
        flat = sorted(x for bucket in buckets for x in bucket)
        assert flat == list(range(1000))  # exactly once, none lost, none duplicated
        assert all(buckets)
        for c in subscribers + consumers:
            c.disconnect()

    assert time.perf_counter() - started < 10.0


# -- EmotionML suite: round-trip, 10k fuzz, scale bijection ----------------------


def test_emotionml_suite_roundtrip_fuzz_bijection():
    from emodesk import emotionml as eml

    rng = np.random.default_rng(7)
    modalities = list(eml.MODALITIES)

    def random_annotation():
        return eml.EmotionAnnotation(
            modality=str(rng.choice(modalities)),
            arousal=float(rng.uniform(0, 1)),
            valence=float(rng.uniform(0, 1)),
            category=None if rng.random() < 0.3 else f"label-{int(rng.integers(0, 50))}",
            confidence=None if rng.random() < 0.5 else float(rng.uniform(0, 1)),
            timestamp_ms=int(rng.integers(0, 10**9)),
        )

    for _ in range(300):
        batch = [random_annotation() for _ in range(int(rng.integers(1, 5)))]
        assert eml.parse_emotionml(eml.serialize_emotionml(batch)) == batch  # exact

    base = eml.serialize_emotionml([random_annotation() for _ in range(2)]).encode()
    codec_errors = (eml.MalformedDocument, eml.MissingDimension, eml.ValueOutOfRange)
    for _ in range(10_000):
        doc = bytearray(base)
        for _ in range(int(rng.integers(1, 4))):
            op = int(rng.integers(0, 3))
            pos = int(rng.integers(0, len(doc)))
            if op == 0:
                doc[pos] = int(rng.integers(0, 256))
            elif op == 1:
                del doc[pos : pos + int(rng.integers(1, 12))]
            else:
                doc[pos:pos] = bytes(rng.integers(0, 256, size=int(rng.integers(1, 6))))
        try:
            eml.parse_emotionml(bytes(doc))
        except codec_errors:
            pass  # anything else crashes the test

    for _ in range(1000):
        a = random_annotation()
        back = eml.from_internal(eml.to_internal(a), a.modality, a.category, a.confidence, a.timestamp_ms)
        assert abs(back.arousal - a.arousal) <= 1e-12
        assert abs(back.valence - a.valence) <= 1e-12
        p = eml.AVPoint(arousal=float(rng.uniform(-1, 1)), valence=float(rng.uniform(-1, 1)))
        q = eml.to_internal(eml.from_internal(p, "fused"))
        assert abs(q.arousal - p.arousal) <= 1e-12 and abs(q.valence - p.valence) <= 1e-12


# -- Voice DSP: F0, band partition, self-comparison greens, boundaries; < 20 s ------


def test_voice_dsp_f0_bands_selfcompare_lights():
    from emodesk.voice import dsp
    from emodesk.voice.analyzer import Light, compare_to_prototype, light_for, summarize
    from emodesk.voice.analyzer import PrototypeEntry
    from emodesk.emotionml import AVPoint

    started = time.perf_counter()
    rng = np.random.default_rng(3)

    for freq in np.linspace(80, 400, 25):
        clip = tone(float(freq), dur_s=0.4, phase=float(rng.uniform(0, 2 * np.pi)))
        contour = dsp.f0_contour(dsp.frame_signal(clip))
        voiced = contour[contour > 0]
        assert voiced.size > 0
        assert np.all(np.abs(voiced - freq) <= 0.02 * freq)  # +- 2 %

    frames = dsp.frame_signal(
        dsp.AudioClip(samples=rng.uniform(-0.6, 0.6, size=16000), sample_rate_hz=16000)
    )
    bins = dsp.band_edges_to_bins(frames.windowed.shape[1], 16000)
    for row in frames.windowed[::5]:
        spectrum = np.abs(np.fft.rfft(row)) ** 2
        expected = spectrum[bins >= 0].sum()
        got = dsp.band_energies(row, 16000).sum()
        assert math.isclose(got, expected, rel_tol=1e-6)

    params = summarize(tone(220, dur_s=1.0))
    entry = PrototypeEntry(label="happy", params=params, canonical=AVPoint(arousal=0.5, valence=0.6))
    feedback = compare_to_prototype(params, entry)
    assert all(light is Light.GREEN for light in feedback.lights.values())
    assert feedback.overall_light is Light.GREEN

    assert light_for(0.25) is Light.GREEN  # boundary cases exact
    assert light_for(0.5) is Light.YELLOW
    assert light_for(np.nextafter(0.25, 1)) is Light.YELLOW
    assert light_for(np.nextafter(0.5, 1)) is Light.RED

    assert time.perf_counter() - started < 20.0


# -- Body: exact limits, invariances, brute-force classifier agreement ---------------


def test_body_limits_invariances_classifier_oracle():
    from emodesk.body.classifier import classify, train_centroids
    from emodesk.body.features import FEATURE_NAMES, BodyFeatures, extract_features

    rng = np.random.default_rng(11)

    static = e2e_kit.body_trace((0.0, 1.0, 0.0, 0.0, 0.0, 0.0))
    f = extract_features(static)
    assert f.ke_hands == 0.0 and f.ke_head == 0.0 and f.ke_upper == 0.0  # exact
    assert f.impulsivity == 1.0 and f.directness == 1.0 and f.sway == 0.0

    signature = (0.3, 5.0, 0.1, 0.1, 0.4, 0.02)
    base_trace = e2e_kit.body_trace(signature, jitter=0.001, seed=5)
    base = extract_features(base_trace)
    offset = np.array([2.25, -1.5, 3.0])
    shifted = [
        type(fr)(timestamp_ms=fr.timestamp_ms, joints={k: tuple(np.array(v) + offset) for k, v in fr.joints.items()})
        for fr in base_trace
    ]
    moved = extract_features(shifted)
    for name in FEATURE_NAMES:
        assert abs(getattr(base, name) - getattr(moved, name)) <= 1e-9  # translation invariance

    doubled = [type(fr)(timestamp_ms=fr.timestamp_ms * 2.0, joints=fr.joints) for fr in base_trace]
    slow = extract_features(doubled)
    for name in ("ke_hands", "ke_head", "ke_upper"):
        assert math.isclose(getattr(slow, name), getattr(base, name) / 4.0, rel_tol=1e-6)

    labeled = []
    for i, label in enumerate(("anger", "disgust", "fear", "happiness", "sadness", "surprise")):
        mean = rng.uniform(-5, 5, size=len(FEATURE_NAMES))
        for _ in range(10):
            labeled.append((label, BodyFeatures.from_vector(mean + 0.3 * rng.normal(size=len(FEATURE_NAMES)))))
    model = train_centroids(labeled)

    agreement = 0
    for _ in range(200):
        probe = BodyFeatures.from_vector(rng.uniform(-6, 6, size=len(FEATURE_NAMES)))
        scaled = model.scale(probe.as_vector())
        distances = [float(np.sqrt(((c - scaled) ** 2).sum())) for c in model.centroids]
        oracle = min(zip(distances, model.labels))[1]
        if classify(probe, model)[0] == oracle:
            agreement += 1
    assert agreement == 200  # 100 % agreement with the brute-force scan


# -- Face: ridge recovery, gradient, clamp/smoothing arithmetic -----------------------


def test_face_ridge_gradient_clamp_smoothing():
    from emodesk.face.regression import (
        AVPredictor,
        FaceFeatureFrame,
        LinearAVModel,
        N_FEATURES,
        ridge_objective,
        train_model,
    )

    rng = np.random.default_rng(23)
    X = rng.normal(size=(300, N_FEATURES))
    W = rng.normal(size=(N_FEATURES, 2)) * 0.05
    b = rng.normal(size=2) * 0.1
    y = X @ W + b
    model = train_model(X, y, ridge_lambda=0.0)
    assert np.max(np.abs(model.weights - W)) <= 1e-6  # planted recovery
    assert np.max(np.abs(model.bias - b)) <= 1e-6

    lam = 2.0
    noisy = y + 0.1 * rng.normal(size=y.shape)
    fitted = train_model(X, noisy, ridge_lambda=lam)
    h = 1e-6
    grad = []
    for col in range(2):
        for row in range(N_FEATURES):
            up, down = fitted.weights.copy(), fitted.weights.copy()
            up[row, col] += h
            down[row, col] -= h
            grad.append(
                (
                    ridge_objective(LinearAVModel(up, fitted.bias, lam), X, noisy)
                    - ridge_objective(LinearAVModel(down, fitted.bias, lam), X, noisy)
                )
                / (2 * h)
            )
        up_b, down_b = fitted.bias.copy(), fitted.bias.copy()
        up_b[col] += h
        down_b[col] -= h
        grad.append(
            (
                ridge_objective(LinearAVModel(fitted.weights, up_b, lam), X, noisy)
                - ridge_objective(LinearAVModel(fitted.weights, down_b, lam), X, noisy)
            )
            / (2 * h)
        )
    assert np.linalg.norm(grad) <= 1e-6 * (1.0 + np.linalg.norm(noisy))

    clamp_model = LinearAVModel(np.zeros((N_FEATURES, 2)), np.array([1.7, -0.2]), 1.0)
    first = AVPredictor(clamp_model).push(FaceFeatureFrame(0.0, np.zeros(N_FEATURES)))
    assert (first.valence, first.arousal) == (1.0, -0.2)  # clamp exact

    predictor = AVPredictor(LinearAVModel(np.zeros((N_FEATURES, 2)), np.array([1.0, 1.0]), 1.0))
    predictor.push(FaceFeatureFrame(0.0, np.zeros(N_FEATURES)))
    predictor.model = LinearAVModel(np.zeros((N_FEATURES, 2)), np.zeros(2), 1.0)
    second = predictor.push(FaceFeatureFrame(1.0, np.zeros(N_FEATURES)))
    assert (second.valence, second.arousal) == (0.7, 0.7)  # alpha = 0.3 arithmetic exact


# -- Platform: scoring, quadrants, race, replay determinism ---------------------------


def test_platform_scoring_quadrants_race_replay():
    from emodesk.emotionml import AVPoint
    from emodesk.platform.game import AttemptResult, GameState, race_step
    from emodesk.platform.scoring import chance_corrected_score, is_eligible
    from emodesk.platform.vocabulary import quadrant

    score = chance_corrected_score(36, 60, 6)
    assert math.isclose(score, 52.0, abs_tol=1e-9) and is_eligible(score)
    assert chance_corrected_score(10, 60, 6) == 0.0  # p = 1/k

    rng = np.random.default_rng(5)
    for _ in range(500):
        p = AVPoint(arousal=float(rng.uniform(-1, 1)), valence=float(rng.uniform(-1, 1)))
        for c in (0.01, 0.37, 1.0):
            assert quadrant(AVPoint(arousal=c * p.arousal, valence=c * p.valence)) is quadrant(p)

    state = GameState(rng_seed=0, board_len=10)
    win = AttemptResult(AVPoint(arousal=0.1, valence=0.1), "happy", 0.0, True, 2)
    for turn in range(1, 11):
        state = race_step(state, win)
        assert (state.winner == "player") == (turn == 10)
    assert state.player_pos == 10 and state.robot_pos == 5  # hand simulation

    import test_engine

    assert test_engine.scripted_session_log() == test_engine.scripted_session_log()  # byte identical


# -- End-to-end: spawned processes, deterministic log, crash containment ----------------


@pytest.mark.slow
def test_end_to_end_deterministic_and_crash_contained(tmp_path):
    from emodesk.runner import SessionProcesses, load_script, run_session

    broker_port = free_port()
    ports = {"face": free_port(), "voice": free_port(), "body": free_port()}
    config = e2e_kit.build_kit(
        tmp_path, broker_port, ports, extra_config="control_timeout_s:0.7\nturn_timeout_s:1.2\n"
    )
    config_path = tmp_path / "session.conf"
    script_path = tmp_path / "script.json"
    script_path.write_text(json.dumps(e2e_kit.six_turn_script(tmp_path)), encoding="utf-8")

    logs = []
    for run in range(2):
        log_path = tmp_path / f"run{run}.jsonl"
        result = subprocess.run(
            [
                sys.executable,
                "-m",
                "emodesk.cli",
                "session",
                "--script",
                str(script_path),
                "--log",
                str(log_path),
                "--spawn",
                "--config",
                str(config_path),
            ],
            capture_output=True,
            text=True,
            timeout=180,
        )
        assert result.returncode == 0, result.stderr
        logs.append(log_path.read_bytes())
    assert logs[0] == logs[1]  # deterministic under the fixed seed
    events = [json.loads(line) for line in logs[0].decode().splitlines()]
    assert sum(1 for e in events if e["event"] == "attempt") == 6

    kill_log = tmp_path / "killed.jsonl"
    with SessionProcesses(config_path) as processes:
        processes.start(config)
        script = load_script(script_path, config)
        seen = {"n": 0}

        def listener(record):
            if record.get("event") == "attempt":
                seen["n"] += 1
                if seen["n"] == 2:
                    processes.services["body"].kill()
                    processes.services["body"].wait(timeout=10)

        with open(kill_log, "w", encoding="utf-8") as sink:
            summary = run_session(script, config, log_sink=sink, listener=listener)

    assert summary.turns_played == 6 and summary.timeouts == 2
    killed_events = [json.loads(line) for line in kill_log.read_text().splitlines()]  # parseable
    body_attempts = [e for e in killed_events if e["event"] == "attempt" and e["modality"] == "body"]
    assert len(body_attempts) == 2 and all(a["timeout"] for a in body_attempts)
