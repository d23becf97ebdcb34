"""Transports and the per-session event loop.

A session is one logical event loop: frames from the client and events
from the pipeline funnel into a single queue and are applied in arrival
order, so outbound frames are written strictly in the order the state
machine produced them. Each connection gets its own Session; nothing is
shared across sessions except the provider.
"""

from __future__ import annotations

import sys
import threading
from queue import SimpleQueue
from typing import BinaryIO, Callable

from .layout import GridMetrics
from .model import ProviderConfig
from .pipeline import ExplanationStream
from .protocol import MalformedFrame, decode, encode, error_msg, status_msg
from .session import Session

_EOF = ("eof", None, None)


class StdioTransport:
    """Newline-delimited frames over a pair of binary streams."""

    def __init__(self, stdin: BinaryIO | None = None, stdout: BinaryIO | None = None):
        self._in = stdin if stdin is not None else sys.stdin.buffer
        self._out = stdout if stdout is not None else sys.stdout.buffer
        self._write_lock = threading.Lock()

    def read_frame(self) -> bytes | None:
        line = self._in.readline()
        if not line:
            return None
        return line

    def write_frame(self, frame: bytes) -> None:
        with self._write_lock:
            self._out.write(frame)
            self._out.flush()


def run_session_loop(transport, session: Session) -> None:
    """Drive one session until the client goes away.

    The reader thread forwards frames; pipeline drainer threads forward
    events. Both land in one queue consumed here, which serializes all
    handle calls for the session.
    """
    inbox: SimpleQueue = SimpleQueue()

    def drain(stream: ExplanationStream) -> None:
        def pump() -> None:
            for event in stream:
                inbox.put(("event", stream.suggestion_id, event))

        threading.Thread(target=pump, daemon=True).start()

    session.spawn = drain

    def read() -> None:
        while True:
            frame = transport.read_frame()
            if frame is None:
                inbox.put(_EOF)
                return
            if not frame.strip():
                continue
            inbox.put(("frame", frame, None))

    threading.Thread(target=read, daemon=True).start()

    while True:
        kind, payload, event = inbox.get()
        if kind == "eof":
            break
        if kind == "frame":
            try:
                msg = decode(payload)
            except MalformedFrame as exc:
                outbound = [error_msg("bad_payload", str(exc))]
            else:
                outbound = session.handle_message(msg)
        else:
            outbound = session.handle_event(payload, event)
        try:
            for msg in outbound:
                transport.write_frame(encode(msg))
        except (BrokenPipeError, OSError):
            break
    active = session.state.active
    if active is not None:
        session.pipeline.cancel(active.suggestion.suggestion_id)
    try:
        transport.write_frame(encode(status_msg("closed")))
    except (BrokenPipeError, OSError):
        pass


def serve_stdio(
    provider_config: ProviderConfig | None = None,
    metrics: GridMetrics | None = None,
    stdin: BinaryIO | None = None,
    stdout: BinaryIO | None = None,
) -> None:
    session = Session(provider_config=provider_config, metrics=metrics)
    run_session_loop(StdioTransport(stdin, stdout), session)


class _WebSocketTransport:
    def __init__(self, connection) -> None:
        self._conn = connection

    def read_frame(self) -> bytes | None:
        from websockets.exceptions import ConnectionClosed

        try:
            message = self._conn.recv()
        except ConnectionClosed:
            return None
        if isinstance(message, str):
            message = message.encode("utf-8")
        return message

    def write_frame(self, frame: bytes) -> None:
        from websockets.exceptions import ConnectionClosed

        try:
            self._conn.send(frame.decode("utf-8"))
        except ConnectionClosed:
            raise BrokenPipeError("websocket closed")


def serve_websocket(
    host: str,
    port: int,
    provider_config: ProviderConfig | None = None,
    metrics: GridMetrics | None = None,
    ready: Callable[[object], None] | None = None,
) -> None:
    """Blocking websocket server; one independent session per connection."""
    from websockets.sync.server import serve as ws_serve

    def handler(connection) -> None:
        session = Session(provider_config=provider_config, metrics=metrics)
        run_session_loop(_WebSocketTransport(connection), session)

    with ws_serve(handler, host, port) as server:
        if ready is not None:
            ready(server)
        server.serve_forever()
