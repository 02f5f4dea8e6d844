"""STOMP 1.2 frame grammar: encode and incremental decode.

A frame is a command line, header lines, a blank line, the body and a
terminating NUL octet.  Header values of every frame except CONNECT and
CONNECTED escape backslash, line feed, carriage return and colon; a
``content-length`` header is emitted whenever the body is non-empty, and is
honoured on decode so bodies may contain NUL octets.
"""

from __future__ import annotations

from dataclasses import dataclass

COMMANDS = (
    "CONNECT",
    "CONNECTED",
    "SEND",
    "SUBSCRIBE",
    "UNSUBSCRIBE",
    "MESSAGE",
    "RECEIPT",
    "ERROR",
    "DISCONNECT",
)

_BODYLESS = ("CONNECT", "SUBSCRIBE", "UNSUBSCRIBE", "DISCONNECT")

# CONNECT and CONNECTED keep 1.0-compatible raw headers
_UNESCAPED_COMMANDS = ("CONNECT", "CONNECTED")

_ESCAPES = {"\\": "\\\\", "\r": "\\r", "\n": "\\n", ":": "\\c"}
_UNESCAPES = {"\\": "\\", "r": "\r", "n": "\n", "c": ":"}


class StompError(Exception):
    """Base class for framing errors."""


class InvalidFrame(StompError):
    """Frame handed to the encoder violates the grammar or an invariant."""


class Incomplete(StompError):
    """The byte stream ends before the frame does; feed more bytes."""


class ProtocolError(StompError):
    """The byte stream does not obey the frame grammar."""


class BadEscape(ProtocolError):
    """A header contains an undefined backslash escape sequence."""


class UnknownCommand(ProtocolError):
    """The command line names no STOMP 1.2 command."""


@dataclass(frozen=True)
class StompFrame:
    """One frame: command, ordered header pairs, body bytes."""

    command: str
    headers: tuple[tuple[str, str], ...] = ()
    body: bytes = b""

    def header(self, key: str, default: str | None = None) -> str | None:
        """First occurrence wins, per the STOMP repeated-header rule."""
        for k, v in self.headers:
            if k == key:
                return v
        return default

    def with_header(self, key: str, value: str) -> "StompFrame":
        return StompFrame(self.command, self.headers + ((key, value),), self.body)


def frame(command: str, headers: dict[str, str] | list[tuple[str, str]] | None = None, body: bytes = b"") -> StompFrame:
    pairs = tuple(headers.items()) if isinstance(headers, dict) else tuple(headers or ())
    return StompFrame(command, pairs, body)


def _escape(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def _unescape(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\":
            if i + 1 >= len(value) or value[i + 1] not in _UNESCAPES:
                raise BadEscape(f"undefined escape in header {value!r}")
            out.append(_UNESCAPES[value[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def encode_frame(f: StompFrame) -> bytes:
    """Serialize a frame, appending content-length for non-empty bodies."""
    if f.command not in COMMANDS:
        raise InvalidFrame(f"unknown command {f.command!r}")
    if f.body and f.command in _BODYLESS:
        raise InvalidFrame(f"{f.command} frames must not carry a body")
    if not isinstance(f.body, bytes):
        raise InvalidFrame("body must be bytes")

    escape = f.command not in _UNESCAPED_COMMANDS
    lines = [f.command]
    declared_length: str | None = None
    for key, value in f.headers:
        if not key:
            raise InvalidFrame("header keys must be non-empty")
        if "\x00" in key or "\x00" in value:
            raise InvalidFrame("headers must not contain NUL")
        if key == "content-length" and declared_length is None:
            declared_length = value
        if escape:
            key, value = _escape(key), _escape(value)
        elif any(ch in "\r\n:" for ch in key) or any(ch in "\r\n" for ch in value):
            raise InvalidFrame(f"unescapable character in {f.command} header {key!r}")
        lines.append(f"{key}:{value}")
    if declared_length is not None and declared_length != str(len(f.body)):
        raise InvalidFrame(f"content-length {declared_length} does not match body of {len(f.body)} bytes")
    if f.body and declared_length is None:
        lines.append(f"content-length:{len(f.body)}")
    head = "\n".join(lines) + "\n\n"
    return head.encode("utf-8") + f.body + b"\x00"


def decode_frame(stream: bytes) -> tuple[StompFrame, bytes]:
    """Decode one frame off the front of ``stream``.

    Returns the frame and the unconsumed remainder.  Raises Incomplete when
    more bytes are needed, which callers treat as "read again".
    """
    # heart-beats are bare EOLs between frames
    start = 0
    while start < len(stream) and stream[start : start + 1] in (b"\n", b"\r"):
        start += 1
    if start == len(stream):
        raise Incomplete("no command line yet")

    # the head ends at the first blank line: "\n\n" or "\n\r\n"
    p_lf = stream.find(b"\n\n", start)
    p_crlf = stream.find(b"\n\r\n", start)
    if p_lf == -1 and p_crlf == -1:
        raise Incomplete("frame header not terminated yet")
    if p_crlf != -1 and (p_lf == -1 or p_crlf < p_lf):
        head_end, blank_len = p_crlf, 3
    else:
        head_end, blank_len = p_lf, 2

    try:
        head = stream[start:head_end].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ProtocolError(f"frame header is not UTF-8: {exc}") from None
    head_lines = [line[:-1] if line.endswith("\r") else line for line in head.split("\n")]
    command = head_lines[0]
    if command not in COMMANDS:
        raise UnknownCommand(f"unknown command {command!r}")
    unescape = command not in _UNESCAPED_COMMANDS

    headers: list[tuple[str, str]] = []
    for line in head_lines[1:]:
        key, sep, value = line.partition(":")
        if not sep or not key:
            raise ProtocolError(f"malformed header line {line!r}")
        if unescape:
            key, value = _unescape(key), _unescape(value)
        headers.append((key, value))

    body_start = head_end + blank_len
    content_length = None
    for key, value in headers:
        if key == "content-length":
            try:
                content_length = int(value)
            except ValueError:
                raise ProtocolError(f"content-length {value!r} is not an integer") from None
            if content_length < 0:
                raise ProtocolError("content-length is negative")
            break

    if content_length is not None:
        frame_end = body_start + content_length
        if len(stream) < frame_end + 1:
            raise Incomplete("body not complete yet")
        if stream[frame_end : frame_end + 1] != b"\x00":
            raise ProtocolError("frame body not NUL-terminated after content-length octets")
        body = stream[body_start:frame_end]
    else:
        frame_end = stream.find(b"\x00", body_start)
        if frame_end == -1:
            raise Incomplete("body not NUL-terminated yet")
        body = stream[body_start:frame_end]

    decoded = StompFrame(command, tuple(headers), body)
    if decoded.body and decoded.command in _BODYLESS:
        raise ProtocolError(f"{decoded.command} frames must not carry a body")
    return decoded, stream[frame_end + 1 :]
