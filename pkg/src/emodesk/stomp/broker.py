"""A minimal STOMP 1.2 broker: topics fan out, queues deliver exactly once.

Destinations are named ``/topic/<name>`` or ``/queue/<name>``.  Topic
publishes go to every current subscriber; queue publishes go to exactly one
consumer, round-robin, and are buffered FIFO (bounded, oldest dropped) while
no consumer is subscribed.  There are no transactions, no ack modes beyond
auto, and no heart-beat negotiation.
"""

from __future__ import annotations

import itertools
import logging
import socket
import threading
from collections import deque
from dataclasses import dataclass

from . import frames
from .frames import StompFrame

log = logging.getLogger(__name__)

DEFAULT_PORT = 61613
QUEUE_DEPTH = 10_000
MAX_FRAME_BYTES = 4 * 1024 * 1024

# headers managed by the broker, not copied from SEND onto MESSAGE
_SEND_ONLY_HEADERS = ("destination", "content-length", "receipt", "transaction")


class DestinationError(frames.StompError):
    """Destination string is not /topic/<name> or /queue/<name>."""


@dataclass(frozen=True)
class Destination:
    kind: str  # "topic" | "queue"
    name: str

    def __str__(self) -> str:
        return f"/{self.kind}/{self.name}"

    @classmethod
    def parse(cls, raw: str) -> "Destination":
        for kind in ("topic", "queue"):
            prefix = f"/{kind}/"
            if raw.startswith(prefix) and len(raw) > len(prefix):
                return cls(kind, raw[len(prefix) :])
        raise DestinationError(f"unsupported destination {raw!r}")


def topic(name: str) -> Destination:
    return Destination("topic", name)


def queue(name: str) -> Destination:
    return Destination("queue", name)


class _Subscription:
    def __init__(self, conn: "_Connection", sub_id: str, dest: Destination):
        self.conn = conn
        self.sub_id = sub_id
        self.dest = dest


class _QueueState:
    """Pending messages and the round-robin cursor for one queue."""

    def __init__(self, depth: int):
        self.pending: deque[tuple[tuple[tuple[str, str], ...], bytes]] = deque(maxlen=depth)
        self.rr_index = 0


class Broker:
    """Threaded broker; one handler thread per connection, shared registry."""

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT, queue_depth: int = QUEUE_DEPTH):
        self._host = host
        self._requested_port = port
        self._queue_depth = queue_depth
        self._lock = threading.Lock()
        self._subs: dict[Destination, list[_Subscription]] = {}
        self._queues: dict[Destination, _QueueState] = {}
        self._connections: set[_Connection] = set()
        self._message_ids = itertools.count(1)
        self._server: socket.socket | None = None
        self._accept_thread: threading.Thread | None = None
        self._stopping = threading.Event()

    @property
    def port(self) -> int:
        if self._server is None:
            raise RuntimeError("broker is not running")
        return self._server.getsockname()[1]

    def start(self) -> None:
        server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            server.bind((self._host, self._requested_port))
        except OSError:
            server.close()
            raise
        server.listen(64)
        server.settimeout(0.2)  # lets the accept loop notice stop()
        self._server = server
        self._accept_thread = threading.Thread(target=self._accept_loop, name="stomp-broker-accept", daemon=True)
        self._accept_thread.start()

    def stop(self) -> None:
        self._stopping.set()
        if self._server is not None:
            try:
                self._server.close()
            except OSError:
                pass
        with self._lock:
            conns = list(self._connections)
        for conn in conns:
            conn.close()
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=5)

    def __enter__(self) -> "Broker":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    def _accept_loop(self) -> None:
        assert self._server is not None
        while not self._stopping.is_set():
            try:
                sock, addr = self._server.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            sock.settimeout(None)
            conn = _Connection(self, sock, addr)
            with self._lock:
                self._connections.add(conn)
            threading.Thread(target=conn.run, name=f"stomp-conn-{addr}", daemon=True).start()

    # -- registry ----------------------------------------------------------

    def _subscribe(self, conn: "_Connection", sub_id: str, dest: Destination) -> None:
        with self._lock:
            for sub in self._subs.get(dest, []):
                if sub.conn is conn and sub.sub_id == sub_id:
                    raise frames.ProtocolError(f"subscription id {sub_id!r} already in use")
            sub = _Subscription(conn, sub_id, dest)
            self._subs.setdefault(dest, []).append(sub)
            backlog = []
            if dest.kind == "queue":
                state = self._queues.setdefault(dest, _QueueState(self._queue_depth))
                while state.pending:
                    backlog.append(state.pending.popleft())
        for headers, body in backlog:
            sub.conn.send_message(sub, headers, body)

    def _unsubscribe(self, conn: "_Connection", sub_id: str) -> None:
        with self._lock:
            for dest, subs in self._subs.items():
                self._subs[dest] = [s for s in subs if not (s.conn is conn and s.sub_id == sub_id)]

    def _drop_connection(self, conn: "_Connection") -> None:
        with self._lock:
            self._connections.discard(conn)
            for dest, subs in self._subs.items():
                self._subs[dest] = [s for s in subs if s.conn is not conn]

    def publish(self, dest: Destination, body: bytes, headers: dict[str, str] | None = None) -> int:
        """Deliver to current subscribers; returns the immediate delivery count.

        Queue publishes with no consumer return 0 and stay buffered.
        """
        pairs = tuple((headers or {}).items())
        with self._lock:
            subs = list(self._subs.get(dest, []))
            if dest.kind == "queue":
                state = self._queues.setdefault(dest, _QueueState(self._queue_depth))
                if not subs:
                    state.pending.append((pairs, body))
                    return 0
                chosen = subs[state.rr_index % len(subs)]
                state.rr_index += 1
                targets = [chosen]
            else:
                targets = subs
        for sub in targets:
            sub.conn.send_message(sub, pairs, body)
        return len(targets)

    def _next_message_id(self) -> str:
        return f"m-{next(self._message_ids)}"


class _Connection:
    """One client connection, processed serially by its handler thread."""

    def __init__(self, broker: Broker, sock: socket.socket, addr):
        self._broker = broker
        self._sock = sock
        self._addr = addr
        self._write_lock = threading.Lock()
        self._closed = False

    def run(self) -> None:
        buffer = b""
        try:
            while True:
                try:
                    decoded, buffer = frames.decode_frame(buffer)
                except frames.Incomplete:
                    if len(buffer) > MAX_FRAME_BYTES:
                        self._error("frame exceeds maximum size")
                        break
                    chunk = self._sock.recv(65536)
                    if not chunk:
                        break
                    buffer += chunk
                    continue
                except frames.StompError as exc:
                    self._error(str(exc))
                    break
                if not self._handle(decoded):
                    break
        except OSError:
            pass
        finally:
            self._broker._drop_connection(self)
            self.close()

    def _handle(self, f: StompFrame) -> bool:
        receipt = f.header("receipt")
        try:
            if f.command == "CONNECT":
                self._write(frames.frame("CONNECTED", {"version": "1.2"}))
            elif f.command == "SUBSCRIBE":
                dest = Destination.parse(f.header("destination", ""))
                sub_id = f.header("id")
                if sub_id is None:
                    raise frames.ProtocolError("SUBSCRIBE requires an id header")
                self._broker._subscribe(self, sub_id, dest)
            elif f.command == "UNSUBSCRIBE":
                sub_id = f.header("id")
                if sub_id is None:
                    raise frames.ProtocolError("UNSUBSCRIBE requires an id header")
                self._broker._unsubscribe(self, sub_id)
            elif f.command == "SEND":
                dest = Destination.parse(f.header("destination", ""))
                passthrough: dict[str, str] = {}
                for k, v in f.headers:
                    if k not in _SEND_ONLY_HEADERS:
                        passthrough.setdefault(k, v)
                self._broker.publish(dest, f.body, passthrough)
            elif f.command == "DISCONNECT":
                if receipt is not None:
                    self._write(frames.frame("RECEIPT", {"receipt-id": receipt}))
                return False
            else:
                raise frames.ProtocolError(f"clients may not send {f.command}")
        except (frames.StompError, DestinationError) as exc:
            self._error(str(exc))
            return False
        if receipt is not None and f.command != "DISCONNECT":
            self._write(frames.frame("RECEIPT", {"receipt-id": receipt}))
        return True

    def send_message(self, sub: _Subscription, headers: tuple[tuple[str, str], ...], body: bytes) -> None:
        pairs = (
            ("destination", str(sub.dest)),
            ("message-id", self._broker._next_message_id()),
            ("subscription", sub.sub_id),
        ) + headers
        try:
            self._write(StompFrame("MESSAGE", pairs, body))
        except OSError:
            self.close()

    def _error(self, message: str) -> None:
        log.debug("connection %s: %s", self._addr, message)
        try:
            self._write(frames.frame("ERROR", {"message": message.replace("\n", " ")}, message.encode("utf-8", "replace")))
        except OSError:
            pass

    def _write(self, f: StompFrame) -> None:
        data = frames.encode_frame(f)
        with self._write_lock:
            self._sock.sendall(data)

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self._sock.close()
        except OSError:
            pass
