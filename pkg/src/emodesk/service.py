"""Analyzer services: control-queue driven wrappers around the analyzers.

A service subscribes to its control queue, acknowledges every command with a
status message on the results topic, and on ``start`` with a media path runs
its analyzer and publishes the result as EmotionML.  Each service also runs
a small web server whose ``GET /media/latest`` returns the bytes it last
analyzed.

Annotation timestamps are logical: the cumulative duration of media analyzed
so far, which keeps one producer's stream monotone and makes session logs
reproducible.
"""

from __future__ import annotations

import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import emotionml, wavio
from .body import classifier as body_classifier
from .body import features as body_features
from .body import io as body_io
from .config import Config
from .face import io as face_io
from .face import regression as face_regression
from .platform.engine import RESULTS_TOPIC, control_queue, decode_kv, encode_kv, feedback_to_kv
from .platform.vocabulary import EmotionVocabulary
from .stomp import StompClient
from .voice import analyzer as voice_analyzer
from .voice import prototypes as voice_prototypes

log = logging.getLogger(__name__)


class ServiceError(Exception):
    pass


class _MediaStore:
    """Latest analyzed media, shared with the HTTP handler."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._payload: tuple[bytes, str] | None = None

    def put(self, data: bytes, content_type: str) -> None:
        with self._lock:
            self._payload = (data, content_type)

    def get(self) -> tuple[bytes, str] | None:
        with self._lock:
            return self._payload


def _media_handler(store: _MediaStore):
    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):  # noqa: N802 (http.server API)
            if self.path != "/media/latest":
                self.send_error(404, "unknown path")
                return
            payload = store.get()
            if payload is None:
                self.send_error(404, "nothing analyzed yet")
                return
            data, content_type = payload
            self.send_response(200)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, fmt, *args):
            log.debug("media http: " + fmt, *args)

    return Handler


class AnalyzerService:
    """One subsystem service; construct via :func:`build_service`."""

    subsystem: str
    media_content_type: str

    def __init__(self, config: Config):
        self.config = config
        self.client = StompClient(config.broker_host, config.broker_port)
        self.store = _MediaStore()
        self.running = False
        self._analyzed_ms = 0
        self._http: ThreadingHTTPServer | None = None

    # subclasses implement: analyze(path) -> EmotionAnnotation | None

    def analyze(self, path: Path) -> emotionml.EmotionAnnotation | None:
        raise NotImplementedError

    # -- lifecycle -------------------------------------------------------

    def serve_forever(self) -> None:
        """Connect, serve the control queue until shutdown."""
        self.client.connect()
        self.client.subscribe(control_queue(self.subsystem))
        self._start_http()
        try:
            while True:
                frame = self.client.receive(timeout=0.5)
                if frame is None:
                    if self.client.is_closed:
                        break
                    continue
                if not self._handle(decode_kv(frame.body)):
                    break
        finally:
            self._stop_http()
            self.client.close()

    def _start_http(self) -> None:
        port = self.config.media_port(self.subsystem)
        self._http = ThreadingHTTPServer(("127.0.0.1", port), _media_handler(self.store))
        threading.Thread(target=self._http.serve_forever, name=f"{self.subsystem}-media-http", daemon=True).start()

    def _stop_http(self) -> None:
        if self._http is not None:
            self._http.shutdown()
            self._http.server_close()

    # -- command handling -----------------------------------------------------

    def _publish_status(self, command: str, state: str, detail: str | None = None) -> None:
        values = {"subsystem": self.subsystem, "command": command, "state": state}
        if detail:
            values["detail"] = detail
        self.client.send(RESULTS_TOPIC, encode_kv(values), headers={"message-type": "status"})

    def _handle(self, command: dict[str, str]) -> bool:
        name = command.get("command", "")
        if name == "start":
            self.running = True
            error = None
            path = command.get("path")
            if path:
                try:
                    annotation = self.analyze(Path(path))
                except Exception as exc:  # analysis must never kill the service
                    log.warning("%s: analysis of %s failed: %s", self.subsystem, path, exc)
                    error = str(exc)
                    annotation = None
                if annotation is not None:
                    self.client.send(
                        RESULTS_TOPIC,
                        emotionml.serialize_emotionml([annotation]).encode("utf-8"),
                        headers={"message-type": "result", "content-type": "application/emotionml+xml"},
                    )
            self._publish_status("start", "running", detail=error)
        elif name == "stop":
            self.running = False
            self._publish_status("stop", "idle")
        elif name == "shutdown":
            self._publish_status("shutdown", "stopped")
            return False
        else:
            self._publish_status(name or "unknown", "error", detail=f"unknown command {name!r}")
        return True

    def _bump_clock(self, duration_ms: float) -> int:
        self._analyzed_ms += max(int(round(duration_ms)), 1)
        return self._analyzed_ms


class VoiceService(AnalyzerService):
    subsystem = "voice"
    media_content_type = "audio/wav"

    def __init__(self, config: Config, vocabulary: EmotionVocabulary | None = None):
        super().__init__(config)
        if not config.voice_prototypes:
            raise ServiceError("voice service needs a voice_prototypes path")
        self.library = voice_prototypes.load_library(
            config.voice_prototypes, vocabulary or config.vocabulary
        )

    def analyze(self, path: Path) -> emotionml.EmotionAnnotation:
        clip = wavio.read_wav(path)
        params = voice_analyzer.summarize(clip)
        label, point, distance = voice_analyzer.estimate_emotion(params, self.library)
        winner = next(e for e in self.library if e.label == label)
        feedback = voice_analyzer.compare_to_prototype(params, winner)
        values = {"subsystem": "voice", **feedback_to_kv(feedback)}
        self.client.send(RESULTS_TOPIC, encode_kv(values), headers={"message-type": "feedback"})
        self.store.put(path.read_bytes(), self.media_content_type)
        timestamp = self._bump_clock(clip.duration_ms)
        return emotionml.from_internal(
            point,
            modality="voice",
            category=label,
            confidence=1.0 / (1.0 + distance),
            timestamp_ms=timestamp,
        )


class BodyService(AnalyzerService):
    subsystem = "body"
    media_content_type = "text/csv"

    def __init__(self, config: Config, vocabulary: EmotionVocabulary | None = None):
        super().__init__(config)
        if not config.body_model:
            raise ServiceError("body service needs a body_model path")
        self.model = body_io.load_model(config.body_model)
        self.vocabulary = vocabulary or config.vocabulary

    def analyze(self, path: Path) -> emotionml.EmotionAnnotation:
        trace = body_io.read_trace(path)
        features = body_features.extract_features(trace)
        label, confidence, point = body_classifier.classify(features, self.model, self.vocabulary)
        self.store.put(path.read_bytes(), self.media_content_type)
        span_ms = trace[-1].timestamp_ms - trace[0].timestamp_ms
        timestamp = self._bump_clock(span_ms)
        return emotionml.from_internal(
            point,
            modality="body",
            category=body_classifier.BASIC_TO_VOCABULARY[label],
            confidence=confidence,
            timestamp_ms=timestamp,
        )


class FaceService(AnalyzerService):
    subsystem = "face"
    media_content_type = "text/csv"

    def __init__(self, config: Config):
        super().__init__(config)
        if not config.face_model:
            raise ServiceError("face service needs a face_model path")
        self.model = face_io.load_model(config.face_model)

    def analyze(self, path: Path) -> emotionml.EmotionAnnotation:
        frames = face_io.read_stream(path)
        tracker = face_regression.PoseTracker()
        predictor = face_regression.AVPredictor(self.model)
        point = None
        for frame in frames:
            point = predictor.push(tracker.push(frame))
        assert point is not None
        self.store.put(path.read_bytes(), self.media_content_type)
        timestamp = self._bump_clock(frames[-1].timestamp_ms)
        return emotionml.from_internal(point, modality="face", timestamp_ms=timestamp)


_SERVICE_TYPES = {"voice": VoiceService, "body": BodyService, "face": FaceService}


def build_service(subsystem: str, config: Config) -> AnalyzerService:
    try:
        service_type = _SERVICE_TYPES[subsystem]
    except KeyError:
        raise ServiceError(f"no subsystem named {subsystem!r}") from None
    return service_type(config)
