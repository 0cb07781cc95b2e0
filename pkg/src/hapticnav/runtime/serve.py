"""Interactive session server.

One WebSocket connection drives one simulated run: the server sends a
per-tick message carrying only {tick, haptic intensities, status} (the
client stays blindfolded), the client answers with one action, and on
completion the server reveals the course map, the driven path, and the
metrics. The server is authoritative for all state; the transport adds
nothing, so a scripted client produces a byte-identical trace to the
same actions replayed offline.

Message protocol (JSON, ``protocol`` field = version):

    client -> {"type": "hello", "protocol": 1,
               "payload": {"course": 1-5, "seed": int, "pace": bool}}
    server -> {"type": "welcome", "protocol": 1, "payload": {...}}
    server -> {"type": "tick", "tick": t,
               "payload": {"haptic": {"left","front","right"}, "status": "running"}}
    client -> {"type": "action", "tick": t, "payload": {"action": <action>}}
    server -> {"type": "done", "tick": T, "payload": {"metrics": {...}}}
    client -> {"type": "reveal"}
    server -> {"type": "reveal", "payload": {"course", "path", "collisions",
               "actions", "metrics"}}

``pace`` true runs ticks on the wall clock with a two-tick grace before
the last action repeats; false runs in lockstep (the server waits for
every action), which scripted clients use for exact replay. Protocol
violations close the session with an ``error`` message naming the
reason.
"""

from __future__ import annotations

import queue
import threading
import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from ..sim.agent import ACTIONS
from ..sim.policies import make_policy
from ..trace import build_header, trace_lines, write_trace
from .config import PipelineConfig
from .pipeline import execute_run

PROTOCOL_VERSION = 1
_CLOSED = object()


class _SessionClosed(Exception):
    pass


class _Controller:
    """Bridges the synchronous run loop to the socket: publishes one tick
    message, then blocks for the client's action (with the grace rule
    when pacing)."""

    def __init__(self, outbox: queue.Queue, inbox: queue.Queue, tick_dt: float, pace: bool):
        self.outbox = outbox
        self.inbox = inbox
        self.tick_dt = tick_dt
        self.pace = pace
        self.last_action = "stop"
        self._last_emit = None

    def __call__(self, obs) -> str:
        if self.pace and self._last_emit is not None:
            remaining = self.tick_dt - (time.monotonic() - self._last_emit)
            if remaining > 0:
                time.sleep(remaining)
        self._last_emit = time.monotonic()
        h = obs.haptic
        self.outbox.put(
            {
                "type": "tick",
                "tick": obs.tick,
                "payload": {
                    "haptic": {
                        "left": round(h.left, 4),
                        "front": round(h.front, 4),
                        "right": round(h.right, 4),
                    },
                    "status": "running",
                },
            }
        )
        try:
            msg = self.inbox.get(timeout=2 * self.tick_dt if self.pace else None)
        except queue.Empty:
            return self.last_action  # grace expired: repeat the last action
        if msg is _CLOSED:
            raise _SessionClosed
        self.last_action = msg
        return msg


def _run_session(config, controller, outbox, results):
    try:
        metrics, records, course = execute_run(config, controller=controller)
        results["metrics"] = metrics
        results["records"] = records
        results["course"] = course
        outbox.put({"type": "done", "tick": metrics.elapsed_ticks - 1,
                    "payload": {"metrics": metrics.to_dict()}})
    except _SessionClosed:
        outbox.put({"type": "aborted"})  # wake the sender loop; nothing reaches the client
    except Exception as exc:
        outbox.put({"type": "error", "payload": {"reason": f"{type(exc).__name__}: {exc}"}})


def create_app(config: PipelineConfig, trace_dir: str | Path | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="hapticnav serve")
    app.state.config = config
    app.state.trace_dir = Path(trace_dir) if trace_dir else None
    app.state.session_count = 0

    @app.websocket("/session")
    async def session(ws: WebSocket):
        await ws.accept()
        try:
            hello = await ws.receive_json()
        except WebSocketDisconnect:
            return
        if hello.get("type") != "hello" or hello.get("protocol") != PROTOCOL_VERSION:
            await ws.send_json(
                {"type": "error", "payload": {"reason": "protocol_mismatch",
                 "expected": PROTOCOL_VERSION}}
            )
            await ws.close()
            return
        payload = hello.get("payload", {})
        course_id = int(payload.get("course", config.run.course))
        seed = int(payload.get("seed", config.run.seed))
        pace = bool(payload.get("pace", True))

        run_config = config.with_overrides(course=course_id, policy="interactive", seed=seed)
        errors = run_config.validate()
        if errors:
            await ws.send_json({"type": "error", "payload": {"reason": "invalid_config",
                                "errors": errors}})
            await ws.close()
            return

        await ws.send_json(
            {
                "type": "welcome",
                "protocol": PROTOCOL_VERSION,
                "payload": {
                    "course": course_id,
                    "seed": seed,
                    "tick_dt": run_config.sim.tick_dt,
                    "actions": list(ACTIONS),
                    "pace": pace,
                },
            }
        )

        outbox: queue.Queue = queue.Queue()
        inbox: queue.Queue = queue.Queue()
        results: dict = {}
        controller = _Controller(outbox, inbox, run_config.sim.tick_dt, pace)
        worker = threading.Thread(
            target=_run_session, args=(run_config, controller, outbox, results), daemon=True
        )
        worker.start()

        import asyncio

        loop = asyncio.get_event_loop()
        reveal_requested = asyncio.Event()
        run_finished = False

        async def pump_incoming():
            nonlocal run_finished
            try:
                while True:
                    msg = await ws.receive_json()
                    kind = msg.get("type")
                    if kind == "action":
                        action = msg.get("payload", {}).get("action")
                        if action not in ACTIONS:
                            await ws.send_json({"type": "error",
                                                "payload": {"reason": "unknown_action"}})
                            inbox.put(_CLOSED)
                            return
                        inbox.put(action)
                    elif kind == "reveal":
                        if not run_finished:
                            await ws.send_json({"type": "error",
                                                "payload": {"reason": "reveal_before_completion"}})
                        else:
                            reveal_requested.set()
                    else:
                        await ws.send_json({"type": "error",
                                            "payload": {"reason": "unknown_message_type"}})
                        inbox.put(_CLOSED)
                        return
            except WebSocketDisconnect:
                inbox.put(_CLOSED)
            except Exception:
                inbox.put(_CLOSED)

        pump = asyncio.ensure_future(pump_incoming())
        try:
            while True:
                msg = await loop.run_in_executor(None, outbox.get)
                if msg["type"] != "aborted":
                    await ws.send_json(msg)
                if msg["type"] in ("done", "error", "aborted"):
                    run_finished = msg["type"] == "done"
                    break
            worker.join(timeout=5)

            if run_finished:
                app.state.session_count += 1
                if app.state.trace_dir is not None:
                    _persist_trace(app.state, run_config, results)
                try:
                    await asyncio.wait_for(reveal_requested.wait(), timeout=60.0)
                    await ws.send_json(_reveal_message(results))
                except asyncio.TimeoutError:
                    pass
            await ws.close()
        except (WebSocketDisconnect, RuntimeError):
            inbox.put(_CLOSED)
        finally:
            pump.cancel()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def _reveal_message(results: dict) -> dict:
    records = results["records"]
    course = results["course"]
    collisions = [
        {"tick": r["tick"], "obstacle": e["obstacle"], "x": r["agent"]["x"], "y": r["agent"]["y"]}
        for r in records
        for e in r["events"]
        if e["type"] == "collision"
    ]
    return {
        "type": "reveal",
        "payload": {
            "course": course.to_dict(),
            "path": [[r["agent"]["x"], r["agent"]["y"]] for r in records],
            "actions": [r["action"] for r in records],
            "collisions": collisions,
            "metrics": results["metrics"].to_dict(),
        },
    }


def _persist_trace(state, run_config: PipelineConfig, results: dict) -> Path:
    state.trace_dir.mkdir(parents=True, exist_ok=True)
    name = (
        f"session{state.session_count:04d}_course{run_config.run.course}"
        f"_seed{run_config.run.seed}.jsonl"
    )
    path = state.trace_dir / name
    header = build_header(
        results["course"].to_dict(), "interactive", run_config.run.seed, run_config.to_dict()
    )
    write_trace(path, header, results["records"], results["metrics"].to_dict())
    return path
