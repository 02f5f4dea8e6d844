from .broker import Broker, Destination, queue, topic
from .client import ClientError, StompClient
from .frames import (
    BadEscape,
    Incomplete,
    InvalidFrame,
    ProtocolError,
    StompError,
    StompFrame,
    UnknownCommand,
    decode_frame,
    encode_frame,
    frame,
)

__all__ = [
    "BadEscape",
    "Broker",
    "ClientError",
    "Destination",
    "Incomplete",
    "InvalidFrame",
    "ProtocolError",
    "StompClient",
    "StompError",
    "StompFrame",
    "UnknownCommand",
    "decode_frame",
    "encode_frame",
    "frame",
    "queue",
    "topic",
]
