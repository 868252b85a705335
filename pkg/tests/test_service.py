"""End-to-end sessions against a live service subprocess.

All sessions run the service in lockstep mode (time advances only on tick
messages) so every assertion is deterministic. One WebSocket test drives
the handshake and frame codec by hand; everything else uses the raw
newline-delimited framing.
"""

import base64
import hashlib
import json
import os
import signal
import socket
import struct
import subprocess
import sys
import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

SERVE_CMD = [sys.executable, "-m", "rcmteleop.harness.cli", "serve",
             "--service.port", "0"]


def wire_pose(p, q=(0.0, 0.0, 0.0, 1.0)):
    return {"position": list(map(float, p)), "orientation": list(map(float, q))}


class Session:
    """Raw-socket client for one service subprocess."""

    def __init__(self, extra_args=(), realtime=False):
        args = list(SERVE_CMD) + list(extra_args)
        if not realtime:
            args += ["--service.realtime", "false"]
        self.proc = subprocess.Popen(
            args, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True)
        line = self.proc.stdout.readline()
        assert line.startswith("listening on "), line
        host, port = line.strip().rsplit(" ", 1)[1].rsplit(":", 1)
        self.addr = (host, int(port))
        self.sock = None
        self.file = None

    def connect(self):
        self.sock = socket.create_connection(self.addr, timeout=10)
        self.sock.settimeout(10)
        self.file = self.sock.makefile("rwb")
        return self

    def send(self, msg: dict):
        self.file.write((json.dumps(msg) + "\n").encode())
        self.file.flush()

    def recv(self) -> dict:
        line = self.file.readline()
        if not line:
            raise ConnectionError("service closed the connection")
        return json.loads(line)

    def recv_type(self, mtype: str, limit: int = 50) -> dict:
        for _ in range(limit):
            msg = self.recv()
            if msg["type"] == mtype:
                return msg
        raise AssertionError(f"no {mtype!r} message within {limit} frames")

    def tick(self, n: int = 1) -> dict:
        """Advance n steps; returns the state broadcast for the batch."""
        self.send({"type": "tick", "n": n})
        state = self.recv_type("state")
        done = self.recv_type("tick_done")
        assert done["ticks"] >= n
        return state

    def drop_socket(self):
        if self.sock is not None:
            self.sock.close()
            self.sock = self.file = None

    def close(self):
        self.drop_socket()
        if self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


@pytest.fixture
def session():
    s = Session().connect()
    yield s
    s.close()


def test_hello_then_snapshot_on_connect(session):
    hello = session.recv()
    assert hello["type"] == "hello"
    assert hello["dt"] == pytest.approx(1e-3)
    assert hello["realtime"] is False
    assert len(hello["trocar"]) == 3
    assert len(hello["model"]["dh"]) == 7
    state = session.recv()
    assert state["type"] == "state"
    assert state["time"] == 0.0
    assert state["clutched"] is False
    assert state["desired_pose"] is None
    assert len(state["q_aug"]) == 10
    assert state["lambda"] == pytest.approx(0.4)


def test_tick_advances_simulation_time(session):
    session.recv_type("state")
    session.send({"type": "tick", "n": 5})
    state = session.recv_type("state")
    done = session.recv_type("tick_done")
    assert done["ticks"] == 5
    assert done["time"] == pytest.approx(5e-3)
    assert state["time"] == pytest.approx(5e-3)


def test_clutch_stylus_tracking_flow(session):
    hello = session.recv()
    scale = hello["motion_scale"]
    state0 = session.recv_type("state")
    tip0 = np.array(state0["tip_pose"]["position"])

    session.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
    session.send({"type": "clutch", "on": True})
    d = np.array([0.004, -0.002, 0.003])
    session.send({"type": "stylus_pose", "pose": wire_pose(d)})
    state = session.tick(1)
    assert state["clutched"] is True
    # identity registration and identity stylus orientation: desired is
    # the engage-time tip plus the scaled stylus translation
    des = np.array(state["desired_pose"]["position"])
    assert_allclose(des, tip0 + scale * d, atol=1e-9)

    # error shrinks monotonically over successive batches; the last
    # millimeter closes at the v_mn floor, so give it real time
    errs = [np.linalg.norm(state["e_p"])]
    for _ in range(8):
        state = session.tick(250)
        errs.append(np.linalg.norm(state["e_p"]))
    assert errs[-1] < errs[0]
    assert errs[-1] < 2e-4
    tip_now = np.array(state["tip_pose"]["position"])
    assert np.linalg.norm(tip_now - des) < 2e-4


def test_latest_stylus_pose_wins(session):
    session.recv()
    state0 = session.recv_type("state")
    tip0 = np.array(state0["tip_pose"]["position"])
    session.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
    session.send({"type": "clutch", "on": True})
    for k in range(4):
        session.send({"type": "stylus_pose",
                      "pose": wire_pose([0.001 * (k + 1), 0, 0])})
    state = session.tick(1)
    des = np.array(state["desired_pose"]["position"])
    assert_allclose(des - tip0, [0.5 * 0.004, 0, 0], atol=1e-9)


def test_declutch_freezes_desired(session):
    session.recv()
    session.recv_type("state")
    session.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
    session.send({"type": "clutch", "on": True})
    session.send({"type": "stylus_pose", "pose": wire_pose([0.002, 0, 0])})
    frozen = session.tick(1)["desired_pose"]["position"]
    session.send({"type": "clutch", "on": False})
    session.send({"type": "stylus_pose", "pose": wire_pose([0.03, 0.03, 0])})
    state = session.tick(1)
    assert state["clutched"] is False
    assert_allclose(state["desired_pose"]["position"], frozen, atol=1e-15)


def test_malformed_message_error_session_survives(session):
    session.recv()
    session.recv_type("state")
    session.send({"type": "warp", "factor": 9})
    err = session.recv_type("error")
    assert "warp" in err["message"]
    self_check = session.tick(1)
    assert self_check["time"] > 0.0
    # raw garbage (not JSON at all) also answers with an error
    session.file.write(b"this is not json\n")
    session.file.flush()
    assert session.recv_type("error")["message"].startswith("not valid JSON")


def test_clutch_without_stylus_rejected(session):
    session.recv()
    session.recv_type("state")
    session.send({"type": "clutch", "on": True})
    err = session.recv_type("error")
    assert "stylus_pose" in err["message"]
    state = session.tick(1)
    assert state["clutched"] is False


def test_set_case_switches_without_tip_jump(session):
    session.recv()
    session.recv_type("state")
    session.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
    session.send({"type": "clutch", "on": True})
    session.send({"type": "stylus_pose", "pose": wire_pose([0.01, 0, 0])})
    before = session.tick(50)
    tip_before = np.array(before["tip_pose"]["position"])
    session.send({"type": "set_case", "case": 2})
    after = session.tick(1)
    assert after["case"] == 2
    tip_after = np.array(after["tip_pose"]["position"])
    # one tick at the saturated speed bound moves at most v_mx * dt
    assert np.linalg.norm(tip_after - tip_before) < 0.020 * 1e-3 * 3
    # and the trocar constraint held across the switch
    assert after["rcm_error"] < 1e-4


def test_reset_restores_initial_state(session):
    session.recv()
    first = session.recv_type("state")
    session.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
    session.send({"type": "clutch", "on": True})
    session.send({"type": "stylus_pose", "pose": wire_pose([0.01, 0.01, 0])})
    session.tick(200)
    session.send({"type": "reset"})
    state = session.tick(1)
    assert state["time"] == pytest.approx(1e-3)
    assert state["clutched"] is False
    assert_allclose(state["q_aug"], first["q_aug"], atol=1e-9)


def test_disconnect_releases_clutch():
    srv = Session()
    try:
        srv.connect()
        srv.recv()
        srv.recv_type("state")
        srv.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
        srv.send({"type": "clutch", "on": True})
        assert srv.tick(1)["clutched"] is True
        srv.drop_socket()          # operator vanishes mid-stroke
        time.sleep(0.3)
        srv.connect()
        srv.recv_type("hello")
        state = srv.recv_type("state")
        assert state["clutched"] is False
    finally:
        srv.close()


def test_scale_change_applies_next_engage(session):
    session.recv()
    state0 = session.recv_type("state")
    tip0 = np.array(state0["tip_pose"]["position"])
    session.send({"type": "set_scale", "scale": 2.0})
    session.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
    session.send({"type": "clutch", "on": True})
    session.send({"type": "stylus_pose", "pose": wire_pose([0.003, 0, 0])})
    state = session.tick(1)
    des = np.array(state["desired_pose"]["position"])
    assert_allclose(des - tip0, [2.0 * 0.003, 0, 0], atol=1e-9)


def test_tick_rejected_in_realtime_mode():
    srv = Session(realtime=True)
    try:
        srv.connect()
        srv.recv_type("hello")
        srv.send({"type": "tick", "n": 1})
        err = srv.recv_type("error")
        assert "realtime" in err["message"]
    finally:
        srv.close()


# ------------------------------------------------------------- websocket

def ws_read_frame(sock_file):
    head = sock_file.read(2)
    assert len(head) == 2
    opcode = head[0] & 0x0F
    n = head[1] & 0x7F
    if n == 126:
        n = struct.unpack(">H", sock_file.read(2))[0]
    elif n == 127:
        n = struct.unpack(">Q", sock_file.read(8))[0]
    data = sock_file.read(n)
    return opcode, data


def ws_send_text(sock_file, text: str):
    payload = text.encode()
    mask = os.urandom(4)
    masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    head = bytes([0x81])
    n = len(payload)
    if n < 126:
        head += bytes([0x80 | n])
    else:
        head += bytes([0x80 | 126]) + struct.pack(">H", n)
    sock_file.write(head + mask + masked)
    sock_file.flush()


def test_websocket_handshake_and_lockstep():
    srv = Session()
    try:
        sock = socket.create_connection(srv.addr, timeout=10)
        sock.settimeout(10)
        f = sock.makefile("rwb")
        key = base64.b64encode(os.urandom(16)).decode()
        f.write((f"GET / HTTP/1.1\r\nHost: {srv.addr[0]}\r\n"
                 f"Upgrade: websocket\r\nConnection: Upgrade\r\n"
                 f"Sec-WebSocket-Key: {key}\r\n"
                 f"Sec-WebSocket-Version: 13\r\n\r\n").encode())
        f.flush()
        status = f.readline()
        assert b"101" in status
        accept = None
        while True:
            line = f.readline().strip()
            if not line:
                break
            if line.lower().startswith(b"sec-websocket-accept:"):
                accept = line.split(b":", 1)[1].strip().decode()
        guid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
        expect = base64.b64encode(
            hashlib.sha1((key + guid).encode()).digest()).decode()
        assert accept == expect

        op, data = ws_read_frame(f)
        assert op == 0x1
        assert json.loads(data)["type"] == "hello"
        op, data = ws_read_frame(f)
        assert json.loads(data)["type"] == "state"

        ws_send_text(f, json.dumps({"type": "tick", "n": 3}))
        types = {}
        for _ in range(2):
            _, data = ws_read_frame(f)
            msg = json.loads(data)
            types[msg["type"]] = msg
        assert types["state"]["time"] == pytest.approx(3e-3)
        assert types["tick_done"]["ticks"] == 3
        sock.close()
    finally:
        srv.close()


def test_fifty_frame_roundtrip(session):
    # a scripted stroke: 50 stylus updates, one tick batch after each,
    # every broadcast frame parses and carries a monotone clock
    from rcmteleop.harness.protocol import parse_state_message

    session.recv()
    session.recv_type("state")
    session.send({"type": "stylus_pose", "pose": wire_pose([0, 0, 0])})
    session.send({"type": "clutch", "on": True})
    times = []
    for k in range(50):
        u = (k + 1) / 50.0
        session.send({"type": "stylus_pose",
                      "pose": wire_pose([0.006 * u, 0.004 * np.sin(6.28 * u), 0])})
        state = session.tick(4)
        parsed = parse_state_message(json.dumps(state))
        times.append(parsed["time"])
        assert parsed["clutched"] is True
        assert parsed["rcm_error"] < 1e-4
    assert np.all(np.diff(times) > 0)
    assert times[-1] == pytest.approx(50 * 4 * 1e-3)
