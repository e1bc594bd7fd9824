"""Session service for interactive clients.

Speaks newline-delimited JSON over a TCP socket; each connection owns one
engine session at a time. Incoming force values are already normalized to
[0, 1], so force-responsive sessions run on the identity calibration.

Client -> server:
  {"type":"start_task","task":"slider"|"trace","technique":...,"c":...,"seed":...[,"shape":...]}
  {"type":"input","t":...,"pos":[x,y],"force":0..1,"pinch":bool}
  {"type":"end_task"}
Server -> client:
  {"type":"state","pointer":[x,y],"object":[x,y],"speed":...,"cursor_radius":...}
  {"type":"summary",...trial metrics...}
  {"type":"error","msg":...}
"""

from __future__ import annotations

import json
import os
import socketserver
import threading

from .calibration import identity_profile
from .engine import InputSample, Session, serialize_log, start_session
from .errors import TrackspeedError
from .mapping import Technique, TechniqueConfig, cursor_radius
from .metrics import compute_trial_metrics
from .tasks import make_task

UI_TASKS = ("slider", "trace")


def _error(msg: str) -> dict:
    return {"type": "error", "msg": msg}


class _Connection:
    """Protocol state for one client connection."""

    def __init__(self, log_dir: str | None):
        self.log_dir = log_dir
        self.session: Session | None = None
        self.task = None
        self.task_kind: str | None = None
        self.seed: int | None = None

    def handle(self, msg: dict) -> dict:
        msg_type = msg.get("type")
        if msg_type == "start_task":
            return self._start_task(msg)
        if msg_type == "input":
            return self._input(msg)
        if msg_type == "end_task":
            return self._end_task()
        return _error(f"unknown message type: {msg_type!r}")

    def _start_task(self, msg: dict) -> dict:
        task_field = str(msg.get("task", ""))
        kind, _, shape = task_field.partition(":")
        shape = msg.get("shape", shape or "circle")
        if kind not in UI_TASKS:
            return _error(f"unsupported task: {task_field!r}")
        try:
            technique = Technique(str(msg.get("technique", "")))
            c = float(msg.get("c", 0.5))
            seed = int(msg.get("seed", 0))
            cfg = TechniqueConfig(technique=technique, base_gain_c=c)
            task = make_task(kind, seed=seed, shape=shape)
            profile = identity_profile(c) if technique is Technique.FORCEPINCH else None
            self.session = start_session(task, cfg, profile=profile, seed=seed)
        except (ValueError, TrackspeedError) as exc:
            return _error(str(exc))
        self.task = task
        self.task_kind = kind
        self.seed = seed
        obj = self.session.object_pos
        speed = (
            cfg.base_gain_c
            if technique is not Technique.FORCEPINCH
            else profile.speed(0.0)
        )
        task_payload = task.to_json()
        if kind == "trace":
            task_payload["polyline"] = [list(p) for p in task.polyline]
        # the initial state carries the task geometry so clients can draw
        # the target / path; later state messages stay lean
        return {
            "type": "state",
            "pointer": [0.0, 0.0],
            "object": [obj[0], obj[1]],
            "speed": speed,
            "cursor_radius": cursor_radius(speed, cfg),
            "task": task_payload,
        }

    def _input(self, msg: dict) -> dict:
        if self.session is None:
            return _error("no active task; send start_task first")
        try:
            t = float(msg["t"])
            pos = msg["pos"]
            x, y = float(pos[0]), float(pos[1])
            z = float(pos[2]) if len(pos) > 2 else 0.0
            force = float(msg.get("force", 0.0))
            pinch = bool(msg.get("pinch", False))
        except (KeyError, TypeError, ValueError, IndexError):
            return _error("malformed input message")
        force = min(1.0, max(0.0, force))
        try:
            frame = self.session.step(InputSample(t, (x, y, z), force, pinch))
        except TrackspeedError as exc:
            return _error(str(exc))
        return {
            "type": "state",
            "pointer": [x, y],
            "object": [frame.object_pos[0], frame.object_pos[1]],
            "speed": frame.speed,
            "cursor_radius": frame.cursor_radius,
        }

    def _end_task(self) -> dict:
        if self.session is None:
            return _error("no active task to end")
        session, task = self.session, self.task
        self.session = None
        self.task = None
        try:
            m = compute_trial_metrics(task, session.trial_log, session.cfg.base_gain_c)
        except TrackspeedError as exc:
            return _error(str(exc))
        if self.log_dir:
            name = f"trial_{session.cfg.technique.value}_{self.task_kind}_{self.seed}.jsonl"
            path = os.path.join(self.log_dir, name)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(serialize_log(session.header(), session.trial_log))
        return {"type": "summary", **m.to_json()}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        conn = _Connection(self.server.log_dir)
        for raw in self.rfile:
            line = raw.strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
                if not isinstance(msg, dict):
                    raise ValueError("message must be a JSON object")
            except (json.JSONDecodeError, ValueError) as exc:
                reply = _error(f"malformed message: {exc}")
            else:
                reply = conn.handle(msg)
            self.wfile.write((json.dumps(reply, sort_keys=True) + "\n").encode())
            self.wfile.flush()


class SessionServer(socketserver.ThreadingTCPServer):
    """One engine session per connection; connections are independent."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0, log_dir: str | None = None):
        super().__init__((host, port), _Handler)
        self.log_dir = log_dir
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)

    @property
    def port(self) -> int:
        return self.server_address[1]

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread
