"""Interactive session host.

Runs the controller+plant loop at wall-clock rate and speaks a JSON protocol
over WebSocket: the first client gets the single control slot (force inputs,
session commands), later clients observe. State frames broadcast at a fixed
rate; the applied wrench is always the latest non-expired client input,
clamped server-side, and drops to zero the moment the control client goes
away.

Message types: hello, state, force, pause, resume, reset, set_param, ack,
nack. All messages are JSON objects with a "type" field; frames carry a
schema "version".
"""
from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, ScenarioConfig, load_scenario, resolve_scenario
from .kinematics import arm_joint_points
from .scenario import build_controller, grip_point
from .sim import RobotState, integrate_plant

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

SETTABLE_PARAMS = {
    "admittance.adaptation",
    "admittance.accel_gain",
    "admittance.decel_gain",
    "barriers.capsule.enabled",
    "barriers.inner.enabled",
    "barriers.outer.enabled",
    "tank.floor",
}


@dataclass
class ForceInput:
    wrench: np.ndarray
    expires_at_tick: int


@dataclass
class Session:
    """Single simulation session advanced by exactly one loop task."""

    cfg: ScenarioConfig
    f_max: float = 60.0
    hold_ms: float = 150.0
    tick: int = 0
    sim_time: float = 0.0
    paused: bool = False
    force: ForceInput | None = None
    last_frame: dict = field(default_factory=dict)

    def __post_init__(self):
        self.controller = build_controller(self.cfg)
        self.state = RobotState.create(self.cfg.robot.arm, self.cfg.robot.base,
                                       self.cfg.initial_base_pose, np.zeros(2),
                                       self.cfg.initial_joint_angles)
        self._wrench = np.zeros(6)

    def reset(self, cfg: ScenarioConfig | None = None):
        if cfg is not None:
            self.cfg = cfg
        self.__post_init__()
        self.sim_time = 0.0
        self.paused = False
        self.force = None

    def set_force(self, wrench, hold_ms: float | None = None):
        w = np.asarray(wrench, dtype=float).ravel()
        if w.shape != (6,) or not np.all(np.isfinite(w)):
            raise ValueError("force message needs a finite 6-vector wrench")
        magnitude = float(np.linalg.norm(w[:3]))
        if magnitude > self.f_max > 0.0:
            w = w.copy()
            w[:3] *= self.f_max / magnitude
        hold = self.hold_ms if hold_ms is None else float(hold_ms)
        ticks = max(1, int(round(hold / 1000.0 / self.cfg.dt)))
        self.force = ForceInput(w, self.tick + ticks)

    def clear_force(self):
        self.force = None

    def current_wrench(self) -> np.ndarray:
        if self.force is None or self.tick >= self.force.expires_at_tick:
            return np.zeros(6)
        return self.force.wrench

    def step(self):
        """Advance one control tick; while paused only the tick counter moves."""
        self.tick += 1
        if self.paused:
            self.last_frame = self.frame()
            return
        wrench = self.current_wrench()
        self._wrench = wrench
        result = self.controller.step(self.state.config, wrench,
                                      self.cfg.scene.controller_obstacles(),
                                      self.sim_time)
        self.state = integrate_plant(self.state, self.cfg.robot.arm,
                                     self.cfg.robot.base, result.command, self.cfg.dt)
        self.cfg.scene.advance(self.cfg.dt)
        self.sim_time += self.cfg.dt
        self._result = result
        self.last_frame = self.frame(result)

    def frame(self, result=None) -> dict:
        result = result if result is not None else getattr(self, "_result", None)
        capsule = self.cfg.scene.capsule_world(self.state.ee_pose)
        points = arm_joint_points(self.cfg.robot.arm, self.cfg.robot.base,
                                  self.state.config)
        frame = {
            "type": "state",
            "version": PROTOCOL_VERSION,
            "tick": self.tick,
            "t": round(self.sim_time, 9),
            "paused": self.paused,
            "scenario": self.cfg.name,
            "base_pose": [float(v) for v in self.state.base_pose],
            "joint_angles": [float(v) for v in self.state.joint_angles],
            "ee_position": [float(v) for v in self.state.ee_pose.translation],
            "arm_points": [[float(v) for v in p] for p in points],
            "plank": None if capsule is None else {
                "p1": [float(v) for v in capsule.p1],
                "p2": [float(v) for v in capsule.p2],
                "radius": capsule.radius,
            },
            "obstacles": [[float(v) for v in o.position] for o in self.cfg.scene.obstacles],
            "grip": [float(v) for v in grip_point(self.state, self.cfg)],
            "d_min": self.cfg.barriers.d_min,
            "force": [float(v) for v in self._wrench],
        }
        if result is not None:
            frame.update({
                "tank": {"energy": result.tank_energy, "budget": result.tank_budget,
                         "floor": self.controller.tank.floor},
                "h": {k: float(v) for k, v in result.h_values.items()},
                "M": [float(v) for v in result.diag_m],
                "D": [float(v) for v in result.diag_d],
                "intent": result.intent.value,
                "qp_status": result.qp_status.value,
                "qp_iters": result.qp_iterations,
                "slacks": {k: float(v) for k, v in result.slacks.items()},
            })
        else:
            frame.update({
                "tank": {"energy": self.controller.tank.energy,
                         "budget": max(self.controller.tank.energy - self.controller.tank.floor, 0.0),
                         "floor": self.controller.tank.floor},
                "h": {}, "M": list(map(float, self.controller.params.M)),
                "D": list(map(float, self.controller.params.D)),
                "intent": "hold", "qp_status": "optimal", "qp_iters": 0, "slacks": {},
            })
        return frame

    def set_param(self, path: str, value) -> tuple[bool, str]:
        if path not in SETTABLE_PARAMS:
            return False, f"parameter {path!r} is not settable"
        if path == "tank.floor":
            floor = float(value)
            if floor <= 0.0:
                return False, "tank floor must be positive"
            if floor > self.controller.tank.energy:
                return False, "tank floor above current stored energy"
            self.controller.tank.floor = floor
            return True, ""
        if path == "admittance.adaptation":
            self.controller.params.adaptation = bool(value)
            return True, ""
        if path in ("admittance.accel_gain", "admittance.decel_gain"):
            gain = float(value)
            if gain < 0.0:
                return False, "gain must be nonnegative"
            setattr(self.controller.params,
                    "accel_gain" if path.endswith("accel_gain") else "decel_gain", gain)
            return True, ""
        flag = bool(value)
        cfgmap = {"barriers.capsule.enabled": "capsule_enabled",
                  "barriers.inner.enabled": "inner_enabled",
                  "barriers.outer.enabled": "outer_enabled"}
        setattr(self.controller.barrier_cfg, cfgmap[path], flag)
        return True, ""


class SessionServer:
    def __init__(self, cfg: ScenarioConfig, frame_rate: float = 60.0,
                 f_max: float = 60.0, hold_ms: float = 150.0):
        self.session = Session(cfg, f_max=f_max, hold_ms=hold_ms)
        self.frame_rate = frame_rate
        self.clients: set = set()
        self.control_client = None
        self._lock = asyncio.Lock()

    async def control_loop(self):
        dt = self.session.cfg.dt
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        while True:
            async with self._lock:
                self.session.step()
            next_t += dt
            delay = next_t - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_t = loop.time()  # fell behind; do not briefly burst

    async def broadcast_loop(self):
        period = 1.0 / self.frame_rate
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        while True:
            frame = self.session.last_frame
            if frame:
                payload = json.dumps(frame)
                for ws in list(self.clients):
                    try:
                        await ws.send(payload)
                    except Exception:
                        await self._drop(ws)
            next_t += period
            delay = next_t - loop.time()
            await asyncio.sleep(max(delay, 0.0))
            if delay < -period:
                next_t = loop.time()

    async def _drop(self, ws):
        self.clients.discard(ws)
        if ws is self.control_client:
            self.control_client = None
            async with self._lock:
                self.session.clear_force()

    async def handle(self, ws):
        role = "observer"
        if self.control_client is None:
            self.control_client = ws
            role = "control"
        self.clients.add(ws)
        await ws.send(json.dumps({
            "type": "hello", "version": PROTOCOL_VERSION, "role": role,
            "scenario": self.session.cfg.name, "dt": self.session.cfg.dt,
            "frame_rate": self.frame_rate,
            "n_joints": self.session.cfg.robot.arm.n_joints,
        }))
        try:
            async for raw in ws:
                reply = await self._dispatch(ws, raw)
                if reply is not None:
                    await ws.send(json.dumps(reply))
        except Exception:
            pass
        finally:
            await self._drop(ws)

    async def _dispatch(self, ws, raw) -> dict | None:
        try:
            msg = json.loads(raw)
            kind = msg["type"]
        except (ValueError, KeyError, TypeError):
            return {"type": "nack", "command": "?", "reason": "malformed message"}
        if ws is not self.control_client:
            return {"type": "nack", "command": kind, "reason": "read-only connection"}

        async with self._lock:
            session = self.session
            try:
                if kind == "force":
                    wrench = msg.get("wrench")
                    if wrench is None:
                        wrench = list(msg.get("force", [0, 0, 0])) + [0.0, 0.0, 0.0]
                    if session.paused:
                        session.clear_force()
                        return {"type": "nack", "command": "force", "reason": "session paused"}
                    session.set_force(wrench, msg.get("hold_ms"))
                    return None  # high-rate path; no per-message ack
                if kind == "pause":
                    session.paused = True
                    return {"type": "ack", "command": "pause"}
                if kind == "resume":
                    session.paused = False
                    return {"type": "ack", "command": "resume"}
                if kind == "reset":
                    name = msg.get("scenario", session.cfg.name)
                    try:
                        cfg = load_scenario(resolve_scenario(str(name)))
                    except ConfigError as exc:
                        return {"type": "nack", "command": "reset", "reason": str(exc)}
                    session.reset(cfg)
                    return {"type": "ack", "command": "reset"}
                if kind == "set_param":
                    ok, reason = session.set_param(str(msg.get("path", "")), msg.get("value"))
                    if ok:
                        return {"type": "ack", "command": "set_param", "path": msg.get("path")}
                    return {"type": "nack", "command": "set_param", "reason": reason}
            except (ValueError, TypeError) as exc:
                return {"type": "nack", "command": kind, "reason": str(exc)}
        return {"type": "nack", "command": kind, "reason": f"unknown message type {kind!r}"}


async def serve(cfg: ScenarioConfig, host: str = "127.0.0.1", port: int = 8765,
                frame_rate: float = 60.0, ready: asyncio.Event | None = None,
                bound_port: list | None = None):
    """Run the session server until cancelled. ready/bound_port exist so tests
    and embedding code can learn the ephemeral port."""
    import websockets

    server = SessionServer(cfg, frame_rate=frame_rate,
                           f_max=cfg.human.f_max if cfg.human.f_max > 0 else 60.0)
    async with websockets.serve(server.handle, host, port) as ws_server:
        actual_port = ws_server.sockets[0].getsockname()[1]
        if bound_port is not None:
            bound_port.append(actual_port)
        if ready is not None:
            ready.set()
        log.info("session %r listening on ws://%s:%d", cfg.name, host, actual_port)
        loop_task = asyncio.create_task(server.control_loop())
        cast_task = asyncio.create_task(server.broadcast_loop())
        try:
            await asyncio.gather(loop_task, cast_task)
        finally:
            loop_task.cancel()
            cast_task.cancel()
