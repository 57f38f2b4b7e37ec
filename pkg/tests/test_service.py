import asyncio
import json
import time

import numpy as np
import pytest
import websockets

from cotransport.config import load_scenario
from cotransport.service import Session, serve

from conftest import SCENARIO_DIR


@pytest.fixture()
def session_cfg():
    return load_scenario(SCENARIO_DIR / "transport_stop_go.yaml")


async def start_server(cfg, frame_rate=60.0):
    ready = asyncio.Event()
    port_box = []
    task = asyncio.create_task(serve(cfg, port=0, frame_rate=frame_rate,
                                     ready=ready, bound_port=port_box))
    await asyncio.wait_for(ready.wait(), timeout=5.0)
    return task, port_box[0]


async def recv_json(ws, timeout=5.0):
    return json.loads(await asyncio.wait_for(ws.recv(), timeout))


async def next_state(ws, timeout=5.0):
    while True:
        msg = await recv_json(ws, timeout)
        if msg["type"] == "state":
            return msg


class TestSessionUnit:
    def test_force_clamped_server_side(self, session_cfg):
        session = Session(session_cfg, f_max=60.0)
        session.set_force([1000.0, 0, 0, 0, 0, 0])
        assert np.linalg.norm(session.current_wrench()[:3]) == pytest.approx(60.0)

    def test_force_decays_after_hold(self, session_cfg):
        session = Session(session_cfg, hold_ms=50.0)
        session.set_force([10.0, 0, 0, 0, 0, 0])
        for _ in range(int(0.2 / session_cfg.dt)):
            session.step()
        assert np.allclose(session.current_wrench(), 0.0)

    def test_frame_round_trips_losslessly(self, session_cfg):
        session = Session(session_cfg)
        session.step()
        frame = session.last_frame
        assert json.loads(json.dumps(frame)) == frame
        assert frame["tick"] == 1

    def test_pause_freezes_sim_time(self, session_cfg):
        session = Session(session_cfg)
        for _ in range(10):
            session.step()
        t_frozen = session.sim_time
        session.paused = True
        for _ in range(10):
            session.step()
        assert session.sim_time == t_frozen
        assert session.tick == 20  # ticks stay monotone through the pause
        session.paused = False
        session.step()
        assert session.sim_time == pytest.approx(t_frozen + session_cfg.dt)

    def test_set_param_whitelist(self, session_cfg):
        session = Session(session_cfg)
        ok, _ = session.set_param("admittance.adaptation", False)
        assert ok and session.controller.params.adaptation is False
        ok, reason = session.set_param("tank.floor", 1e9)
        assert not ok and "above current" in reason
        ok, reason = session.set_param("controller.secret", 1)
        assert not ok

    def test_reset_reloads(self, session_cfg):
        session = Session(session_cfg)
        for _ in range(5):
            session.step()
        session.reset()
        assert session.sim_time == 0.0
        assert np.allclose(session.state.base_pose, session_cfg.initial_base_pose)


class TestServiceWire:
    def test_hello_and_roles(self, session_cfg):
        async def scenario():
            task, port = await start_server(session_cfg)
            try:
                async with websockets.connect(f"ws://127.0.0.1:{port}") as control:
                    hello = await recv_json(control)
                    assert hello["type"] == "hello"
                    assert hello["role"] == "control"
                    assert hello["version"] == 1
                    async with websockets.connect(f"ws://127.0.0.1:{port}") as observer:
                        hello2 = await recv_json(observer)
                        assert hello2["role"] == "observer"
                        await observer.send(json.dumps({"type": "pause"}))
                        while True:
                            msg = await recv_json(observer)
                            if msg["type"] == "nack":
                                assert "read-only" in msg["reason"]
                                break
            finally:
                task.cancel()
        asyncio.run(scenario())

    def test_force_round_trip_and_fail_safe(self, session_cfg):
        async def scenario():
            task, port = await start_server(session_cfg)
            try:
                observer = await websockets.connect(f"ws://127.0.0.1:{port}")
                control = await websockets.connect(f"ws://127.0.0.1:{port}")
                hello_obs = await recv_json(observer)
                hello_ctl = await recv_json(control)
                # first client took control, second observes
                assert hello_obs["role"] == "control"
                # keep the pull alive and watch it appear in frames
                async def pull():
                    for _ in range(40):
                        await observer.send(json.dumps(
                            {"type": "force", "wrench": [20.0, 0, 0, 0, 0, 0],
                             "hold_ms": 300}))
                        await asyncio.sleep(0.02)
                pull_task = asyncio.create_task(pull())
                frame_period = 1.0 / 60.0
                deadline = time.monotonic() + 3 * frame_period + 1.0
                seen = None
                while time.monotonic() < deadline:
                    frame = await next_state(control)
                    if abs(frame["force"][0] - 20.0) < 1e-9:
                        seen = frame
                        break
                assert seen is not None, "force never showed up in frames"
                pull_task.cancel()
                # control client disconnect zeroes the wrench within a tick
                await observer.close()
                deadline = time.monotonic() + 1.0
                zeroed = False
                while time.monotonic() < deadline:
                    frame = await next_state(control)
                    if frame["force"][0] == 0.0:
                        zeroed = True
                        break
                assert zeroed
                await control.close()
            finally:
                task.cancel()
        asyncio.run(scenario())

    def test_commands_ack_nack(self, session_cfg):
        async def scenario():
            task, port = await start_server(session_cfg)
            try:
                async with websockets.connect(f"ws://127.0.0.1:{port}") as ws:
                    await recv_json(ws)

                    async def roundtrip(msg, want_type):
                        await ws.send(json.dumps(msg))
                        while True:
                            got = await recv_json(ws)
                            if got["type"] in ("ack", "nack"):
                                assert got["type"] == want_type, got
                                return got

                    await roundtrip({"type": "pause"}, "ack")
                    await roundtrip({"type": "resume"}, "ack")
                    await roundtrip({"type": "set_param",
                                     "path": "admittance.adaptation",
                                     "value": False}, "ack")
                    got = await roundtrip({"type": "set_param", "path": "tank.floor",
                                           "value": 1e9}, "nack")
                    assert "above current" in got["reason"]
                    await roundtrip({"type": "reset", "scenario": "no_such"}, "nack")
                    await roundtrip({"type": "reset"}, "ack")
                    # malformed payload keeps the session alive
                    await ws.send("this is not json")
                    got = await recv_json(ws)
                    while got["type"] == "state":
                        got = await recv_json(ws)
                    assert got["type"] == "nack"
                    await roundtrip({"type": "pause"}, "ack")
            finally:
                task.cancel()
        asyncio.run(scenario())

    def test_frame_rate_within_tolerance(self, session_cfg):
        # service contract: frame rate within +-20% of configured over a
        # multi-second window on an idle machine
        async def scenario():
            task, port = await start_server(session_cfg, frame_rate=60.0)
            try:
                async with websockets.connect(f"ws://127.0.0.1:{port}") as ws:
                    await recv_json(ws)
                    await next_state(ws)  # warm up
                    t0 = time.monotonic()
                    frames = 0
                    while time.monotonic() - t0 < 5.0:
                        msg = await recv_json(ws)
                        if msg["type"] == "state":
                            frames += 1
                    rate = frames / (time.monotonic() - t0)
                    assert 48.0 <= rate <= 72.0, f"frame rate {rate:.1f} Hz"
            finally:
                task.cancel()
        asyncio.run(scenario())
