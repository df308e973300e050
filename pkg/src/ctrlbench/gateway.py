"""Live session gateway.

Serves the trial plan to a performer UI and ingests its event stream over
a persistent bidirectional channel: newline-delimited JSON frames on a
local TCP port, the same self-describing records as the session log, so
UI-captured and simulated data are interchangeable. One connection is one
session; per-connection handling is ordered; protocol violations are
answered with protocol_error frames and never corrupt the session.
"""

from __future__ import annotations

import json
import socketserver
import threading
from pathlib import Path

from . import serde
from .battery import TrialPlan
from .errors import ProtocolError
from .session import FORMAT_VERSION, Session, SessionRecord, export_log
from .taxonomy import DeviceDescriptor


class GatewayChannel:
    """Protocol logic for one connection, transport-agnostic: feed it
    decoded messages, send back the replies it returns."""

    def __init__(self, plan: TrialPlan, device: DeviceDescriptor, session_id: str = "s-0001"):
        self._plan = plan
        self._device = device
        self._default_sid = session_id
        self.session: Session | None = None

    def handle(self, message) -> list[dict]:
        if not isinstance(message, dict) or "type" not in message:
            return [_protocol_error("frame must be an object with a 'type' field")]
        mtype = message["type"]
        if mtype == "hello":
            if self.session is not None:
                return [_protocol_error("duplicate hello")]
            sid = message.get("session") or self._default_sid
            self.session = Session(sid, self._device, self._plan)
            return [{
                "v": FORMAT_VERSION,
                "type": "plan",
                "session": sid,
                "payload": {
                    "plan": serde.plan_to_jsonable(self._plan),
                    "device": serde.device_to_jsonable(self._device),
                },
            }]
        if self.session is None:
            return [_protocol_error("hello required before trial messages")]
        try:
            self.session.ingest(message)
        except ProtocolError as exc:
            return [_protocol_error(str(exc))]
        if mtype == "trial_end":
            # ack only after the trial is fully ingested and measured
            trial_id = message["trial"]
            metrics = self.session.finalize_trial(trial_id)
            return [{"v": FORMAT_VERSION, "type": "ack", "trial": trial_id, "metrics": metrics}]
        return []

    def finish(self) -> SessionRecord | None:
        """Close the session on disconnect; a dangling trial is aborted."""
        if self.session is None:
            return None
        return self.session.close()


def _protocol_error(reason: str) -> dict:
    return {"v": FORMAT_VERSION, "type": "protocol_error", "reason": reason}


class _GatewayServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, plan, device, out_dir):
        super().__init__(address, _ConnectionHandler)
        self.plan = plan
        self.device = device
        self.out_dir = Path(out_dir) if out_dir else None
        self.sessions: list[SessionRecord] = []
        self._lock = threading.Lock()
        self._counter = 0

    def next_session_id(self) -> str:
        with self._lock:
            self._counter += 1
            return f"s-{self._counter:04d}"

    def store_session(self, record: SessionRecord) -> None:
        with self._lock:
            self.sessions.append(record)
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            (self.out_dir / f"{record.session_id}.ndjson").write_bytes(export_log(record))


class _ConnectionHandler(socketserver.StreamRequestHandler):
    def handle(self):
        server: _GatewayServer = self.server  # type: ignore[assignment]
        channel = GatewayChannel(server.plan, server.device, server.next_session_id())
        try:
            for raw in self.rfile:
                line = raw.strip()
                if not line:
                    continue
                try:
                    message = json.loads(line)
                except json.JSONDecodeError:
                    self._send(_protocol_error("malformed JSON frame"))
                    continue
                for reply in channel.handle(message):
                    self._send(reply)
        except (ConnectionError, BrokenPipeError):
            pass
        finally:
            record = channel.finish()
            if record is not None:
                server.store_session(record)

    def _send(self, obj: dict) -> None:
        self.wfile.write((serde.dumps(obj) + "\n").encode("utf-8"))
        self.wfile.flush()


class Gateway:
    """TCP front for GatewayChannel; one session per connection."""

    def __init__(
        self,
        plan: TrialPlan,
        device: DeviceDescriptor,
        host: str = "127.0.0.1",
        port: int = 0,
        out_dir=None,
    ):
        self._server = _GatewayServer((host, port), plan, device, out_dir)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._server.server_address[:2]
        return str(host), int(port)

    @property
    def sessions(self) -> list[SessionRecord]:
        return list(self._server.sessions)

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
