"""Blocking STOMP client with a background reader thread.

The public object is single-owner: drive it from one thread.  MESSAGE frames
land on an internal inbox read with :meth:`receive`; RECEIPT frames release
the sender waiting in :meth:`send`.
"""

from __future__ import annotations

import itertools
import queue
import socket
import threading
import time

from . import frames
from .frames import StompFrame


class ClientError(frames.StompError):
    """Connection-level failure: broker unreachable, ERROR frame, timeout."""


class StompClient:
    def __init__(self, host: str = "127.0.0.1", port: int = 61613, connect_timeout: float = 5.0):
        self.host = host
        self.port = port
        self._connect_timeout = connect_timeout
        self._sock: socket.socket | None = None
        self._inbox: queue.Queue[StompFrame] = queue.Queue()
        self._receipts: dict[str, threading.Event] = {}
        self._receipts_lock = threading.Lock()
        self._reader: threading.Thread | None = None
        self._connected = threading.Event()
        self._closed = threading.Event()
        self._error: str | None = None
        self._ids = itertools.count(1)

    # -- lifecycle -----------------------------------------------------------

    def connect(self) -> None:
        try:
            sock = socket.create_connection((self.host, self.port), timeout=self._connect_timeout)
        except OSError as exc:
            raise ClientError(f"broker unreachable at {self.host}:{self.port}: {exc}") from None
        sock.settimeout(None)
        self._sock = sock
        self._reader = threading.Thread(target=self._read_loop, name="stomp-client-reader", daemon=True)
        self._reader.start()
        self._write(frames.frame("CONNECT", {"accept-version": "1.2", "host": self.host}))
        if not self._connected.wait(self._connect_timeout):
            self.close()
            raise ClientError("no CONNECTED frame from broker")

    def disconnect(self, timeout: float = 5.0) -> None:
        if self._sock is None or self._closed.is_set():
            return
        try:
            self.send_frame(frames.frame("DISCONNECT"), receipt=True, timeout=timeout)
        except (ClientError, OSError):
            pass
        self.close()

    def close(self) -> None:
        self._closed.set()
        if self._sock is not None:
            try:
                self._sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                self._sock.close()
            except OSError:
                pass

    def __enter__(self) -> "StompClient":
        self.connect()
        return self

    def __exit__(self, *exc) -> None:
        self.disconnect()

    # -- frame traffic ---------------------------------------------------------

    def subscribe(self, destination: str, sub_id: str | None = None, receipt: bool = True) -> str:
        sub_id = sub_id or f"sub-{next(self._ids)}"
        self.send_frame(
            frames.frame("SUBSCRIBE", {"id": sub_id, "destination": destination, "ack": "auto"}),
            receipt=receipt,
        )
        return sub_id

    def unsubscribe(self, sub_id: str) -> None:
        self.send_frame(frames.frame("UNSUBSCRIBE", {"id": sub_id}))

    def send(self, destination: str, body: bytes | str, headers: dict[str, str] | None = None, receipt: bool = False) -> None:
        if isinstance(body, str):
            body = body.encode("utf-8")
        pairs = [("destination", destination)] + list((headers or {}).items())
        self.send_frame(StompFrame("SEND", tuple(pairs), body), receipt=receipt)

    def send_frame(self, f: StompFrame, receipt: bool = False, timeout: float = 5.0) -> None:
        if receipt:
            receipt_id = f"r-{next(self._ids)}"
            event = threading.Event()
            with self._receipts_lock:
                self._receipts[receipt_id] = event
            f = f.with_header("receipt", receipt_id)
            self._write(f)
            deadline = time.monotonic() + timeout
            while not event.wait(0.05):
                if self._closed.is_set() or time.monotonic() > deadline:
                    break
            with self._receipts_lock:
                # only _dispatch removes the entry; anything else is a failure
                if receipt_id in self._receipts:
                    del self._receipts[receipt_id]
                    raise ClientError(f"no RECEIPT for {receipt_id}" + self._error_suffix())
        else:
            self._write(f)

    def receive(self, timeout: float | None = None) -> StompFrame | None:
        """Next MESSAGE frame, or None on timeout."""
        try:
            return self._inbox.get(timeout=timeout)
        except queue.Empty:
            return None

    @property
    def last_error(self) -> str | None:
        return self._error

    @property
    def is_closed(self) -> bool:
        return self._closed.is_set()

    # -- internals ---------------------------------------------------------------

    def _error_suffix(self) -> str:
        return f" (broker said: {self._error})" if self._error else ""

    def _write(self, f: StompFrame) -> None:
        if self._sock is None or self._closed.is_set():
            raise ClientError("client is not connected")
        try:
            self._sock.sendall(frames.encode_frame(f))
        except OSError as exc:
            raise ClientError(f"send failed: {exc}") from None

    def _read_loop(self) -> None:
        assert self._sock is not None
        buffer = b""
        try:
            while not self._closed.is_set():
                try:
                    decoded, buffer = frames.decode_frame(buffer)
                except frames.Incomplete:
                    chunk = self._sock.recv(65536)
                    if not chunk:
                        break
                    buffer += chunk
                    continue
                self._dispatch(decoded)
        except (OSError, frames.StompError) as exc:
            if self._error is None:
                self._error = str(exc)
        finally:
            self._closed.set()
            # unblock anyone waiting on a receipt
            with self._receipts_lock:
                for event in self._receipts.values():
                    event.set()

    def _dispatch(self, f: StompFrame) -> None:
        if f.command == "MESSAGE":
            self._inbox.put(f)
        elif f.command == "CONNECTED":
            self._connected.set()
        elif f.command == "RECEIPT":
            receipt_id = f.header("receipt-id")
            with self._receipts_lock:
                event = self._receipts.pop(receipt_id, None)
            if event is not None:
                event.set()
        elif f.command == "ERROR":
            self._error = f.header("message", f.body.decode("utf-8", "replace"))
