"""Live teleoperation service: JSON messages over one TCP port.

Three client framings share the port, sniffed from the first bytes of each
connection:

  * raw newline-delimited JSON (scripted clients, tests)
  * WebSocket text frames (browser console); the handshake and frame codec
    are implemented here on asyncio since no WebSocket library is assumed
  * plain HTTP GET for the optional static console files

One control task owns the simulation state and consumes a message queue
fed by all connections; snapshots broadcast to every client are built
fresh per send, so no client ever sees a half-updated state. In realtime
mode the loop free-runs at the configured dt against the wall clock; in
lockstep mode (service.realtime = false) time advances only on client
`tick` messages, which is what makes replay tests deterministic.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import logging
import mimetypes
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..actuation import motor_positions
from ..controller import step
from ..rcm import assemble
from ..solver import PriorityCase
from ..teleop import TeleopParams, desired_tip_pose, release_clutch, start_clutch
from .config import RunConfig
from .protocol import encode, parse_client_message, state_message
from .simulate import build_initial_state, build_model

log = logging.getLogger(__name__)

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
MAX_LINE = 1 << 20
MAX_TICK_BATCH = 200_000


@dataclass
class _Command:
    msg: dict
    client: "_Client"


class _Client:
    """One connected peer, either raw-line or WebSocket framing."""

    def __init__(self, writer: asyncio.StreamWriter, websocket: bool):
        self.writer = writer
        self.websocket = websocket
        self.alive = True

    async def send(self, payload: bytes):
        if not self.alive:
            return
        try:
            if self.websocket:
                self.writer.write(_ws_frame(payload.rstrip(b"\n")))
            else:
                self.writer.write(payload)
            await self.writer.drain()
        except (ConnectionError, RuntimeError):
            self.alive = False


def _ws_frame(payload: bytes, opcode: int = 0x1) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < (1 << 16):
        head += bytes([126]) + n.to_bytes(2, "big")
    else:
        head += bytes([127]) + n.to_bytes(8, "big")
    return head + payload


async def _ws_read_message(reader: asyncio.StreamReader) -> bytes | None:
    """One complete text/binary message; None on close. Handles ping and
    continuation frames; client frames must be masked per the protocol."""
    buf = b""
    while True:
        head = await reader.readexactly(2)
        fin = head[0] & 0x80
        opcode = head[0] & 0x0F
        masked = head[1] & 0x80
        n = head[1] & 0x7F
        if n == 126:
            n = int.from_bytes(await reader.readexactly(2), "big")
        elif n == 127:
            n = int.from_bytes(await reader.readexactly(8), "big")
        if n > MAX_LINE:
            return None
        mask = await reader.readexactly(4) if masked else b""
        data = await reader.readexactly(n)
        if masked:
            data = bytes(b ^ mask[i % 4] for i, b in enumerate(data))
        if opcode == 0x8:          # close
            return None
        if opcode == 0x9:          # ping: unsolicited pong is dealt by caller
            buf_ping = data
            raise _PingReceived(buf_ping)
        if opcode == 0xA:          # pong: ignore
            continue
        buf += data
        if fin:
            return buf


class _PingReceived(Exception):
    def __init__(self, payload: bytes):
        self.payload = payload


class TeleopService:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.kin = build_model(cfg)
        self.act = cfg.model.actuation()
        self.solver_cfg = cfg.solver.build()
        self.rate = cfg.rate.build()
        self.dt = cfg.control.dt
        self.lam_bounds = (cfg.control.lam_lo, cfg.control.lam_hi)
        self.teleop_params = TeleopParams(motion_scale=cfg.service.motion_scale)
        self._reset_sim()
        self.queue: asyncio.Queue[_Command] = asyncio.Queue()
        self.clients: set[_Client] = set()
        self._stop = asyncio.Event()
        every = 1.0 / (cfg.service.broadcast_hz * self.dt)
        self.broadcast_every = max(1, int(round(every)))

    def _reset_sim(self):
        self.state = build_initial_state(self.cfg)
        b0 = assemble(self.state, self.kin)
        self.trocar = b0.p_rcm
        self.sim_time = 0.0
        self.ticks = 0
        self._anchor = None  # wall-clock origin, set lazily by the loop
        self.case = PriorityCase(self.cfg.control.case)
        self.desired = None
        self.clutch = None
        self.last_stylus = None
        self.last_tick = None

    # ---- state application (control task only) ----

    def apply(self, cmd: _Command) -> dict | None:
        """Returns an error message dict, or None on success."""
        msg = cmd.msg
        t = msg["type"]
        if t == "clutch":
            if msg["on"]:
                if self.last_stylus is None:
                    return {"type": "error",
                            "message": "clutch requires a stylus_pose first"}
                tip = assemble(self.state, self.kin).tip_pose
                self.clutch = start_clutch(self.last_stylus, tip, self.teleop_params)
                self.desired = tip.copy()
            else:
                if self.clutch is not None:
                    release_clutch(self.clutch)
                    self.clutch = None
        elif t == "stylus_pose":
            self.last_stylus = msg["_pose"]
            if self.clutch is not None:
                self.desired = desired_tip_pose(self.clutch, self.last_stylus)
        elif t == "set_case":
            self.case = PriorityCase(msg["case"])
        elif t == "set_scale":
            self.teleop_params = TeleopParams(motion_scale=float(msg["scale"]))
            # applies from the next clutch engage; an active session keeps
            # its captured scale so the tip cannot jump mid-stroke
        elif t == "reset":
            self._reset_sim()
        return None

    def tick_n(self, n: int):
        for _ in range(n):
            self.state, self.last_tick = step(
                self.state, self.desired, self.case, self.kin, self.solver_cfg,
                self.rate, self.dt, lam_bounds=self.lam_bounds,
                trocar=self.trocar)
            self.sim_time += self.dt
            self.ticks += 1

    def snapshot(self) -> dict:
        if self.last_tick is not None:
            b = self.last_tick.bundle
            e_p, e_o = self.last_tick.e_p, self.last_tick.e_o
        else:
            b = assemble(self.state, self.kin)
            e_p = e_o = np.zeros(3)
        return state_message(
            self.sim_time, self.state.vector(), b.tip_pose, self.desired,
            e_p, e_o, float(np.linalg.norm(b.p_rcm - self.trocar)),
            int(self.case), motor_positions(self.state.psi, self.kin.continuum,
                                            self.act),
            self.clutch is not None)

    def hello(self) -> dict:
        return {
            "type": "hello",
            "dt": self.dt,
            "case": int(self.case),
            "lam0": self.solver_cfg.lam0,
            "realtime": self.cfg.service.realtime,
            "motion_scale": self.teleop_params.motion_scale,
            "trocar": [float(x) for x in self.trocar],
            "model": {
                "dh": self.cfg.model.dh,
                "tool_xyz": self.cfg.model.tool_xyz,
                "L": self.cfg.model.L,
                "r": self.cfg.model.r,
                "theta_min": self.cfg.model.theta_min,
            },
        }

    # ---- tasks ----

    async def _broadcast(self, msg: dict):
        payload = encode(msg)
        for c in list(self.clients):
            await c.send(payload)

    async def control_loop(self):
        while not self._stop.is_set():
            # drain pending commands first: commands apply between ticks
            while True:
                try:
                    cmd = self.queue.get_nowait()
                except asyncio.QueueEmpty:
                    break
                await self._dispatch(cmd)
            if self.cfg.service.realtime:
                now = time.perf_counter()
                if self._anchor is None:
                    self._anchor = now
                due = int((now - self._anchor) / self.dt) - self.ticks
                n = int(min(max(due, 0), 1000))
                if n > 0:
                    before = self.ticks
                    self.tick_n(n)
                    if (self.ticks // self.broadcast_every) != (before // self.broadcast_every):
                        await self._broadcast(self.snapshot())
                await asyncio.sleep(self.dt * 4)
            else:
                # lockstep: wait for work
                cmd = await self.queue.get()
                await self._dispatch(cmd)

    async def _dispatch(self, cmd: _Command):
        msg = cmd.msg
        if msg["type"] == "tick":
            if self.cfg.service.realtime:
                await cmd.client.send(encode(
                    {"type": "error",
                     "message": "tick only valid with service.realtime=false"}))
                return
            self.tick_n(msg["n"])
            await self._broadcast(self.snapshot())
            await cmd.client.send(encode(
                {"type": "tick_done", "time": self.sim_time, "ticks": self.ticks}))
            return
        err = self.apply(cmd)
        if err is not None:
            await cmd.client.send(encode(err))

    # ---- connection handling ----

    async def handle_connection(self, reader: asyncio.StreamReader,
                                writer: asyncio.StreamWriter):
        # sniff the framing from the first bytes; a client that connects
        # and only listens (raw framing) sends nothing, so fall through to
        # raw after a short wait instead of blocking the hello forever
        client = None
        try:
            first = await asyncio.wait_for(reader.readexactly(4), timeout=0.3)
        except asyncio.TimeoutError:
            first = b""
        except (asyncio.IncompleteReadError, ConnectionError):
            writer.close()
            return
        try:
            if first == b"GET ":
                await self._handle_http(first, reader, writer)
            else:
                client = _Client(writer, websocket=False)
                await self._run_raw(first, reader, client)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            if client is not None:
                self._drop(client)
            try:
                writer.close()
            except Exception:
                pass

    def _drop(self, client: _Client):
        self.clients.discard(client)
        client.alive = False
        # safety: a vanished operator must not leave the clutch engaged
        if self.clutch is not None:
            release_clutch(self.clutch)
            self.clutch = None

    async def _run_raw(self, first: bytes, reader: asyncio.StreamReader,
                       client: _Client):
        self.clients.add(client)
        await client.send(encode(self.hello()))
        await client.send(encode(self.snapshot()))
        buf = first
        while client.alive:
            chunk = await reader.readline()
            if not chunk:
                break
            line = buf + chunk
            buf = b""
            if len(line) > MAX_LINE:
                await client.send(encode({"type": "error", "message": "line too long"}))
                continue
            if not line.strip():
                continue
            await self._ingest(line, client)

    async def _ingest(self, raw: bytes, client: _Client):
        try:
            msg = parse_client_message(raw)
        except ValueError as e:
            await client.send(encode({"type": "error", "message": str(e)}))
            return
        await self.queue.put(_Command(msg, client))

    async def _handle_http(self, first: bytes, reader: asyncio.StreamReader,
                           writer: asyncio.StreamWriter):
        head = first + await reader.readuntil(b"\r\n\r\n")
        text = head.decode("latin-1")
        request_line = text.split("\r\n", 1)[0]
        path = request_line.split(" ")[1] if len(request_line.split(" ")) > 1 else "/"
        headers = {}
        for line in text.split("\r\n")[1:]:
            if ":" in line:
                k, v = line.split(":", 1)
                headers[k.strip().lower()] = v.strip()

        if headers.get("upgrade", "").lower() == "websocket":
            key = headers.get("sec-websocket-key", "")
            accept = base64.b64encode(
                hashlib.sha1((key + WS_GUID).encode()).digest()).decode()
            writer.write(
                b"HTTP/1.1 101 Switching Protocols\r\n"
                b"Upgrade: websocket\r\nConnection: Upgrade\r\n"
                b"Sec-WebSocket-Accept: " + accept.encode() + b"\r\n\r\n")
            await writer.drain()
            client = _Client(writer, websocket=True)
            self.clients.add(client)
            await client.send(encode(self.hello()))
            await client.send(encode(self.snapshot()))
            try:
                while client.alive:
                    try:
                        data = await _ws_read_message(reader)
                    except _PingReceived as ping:
                        writer.write(_ws_frame(ping.payload, opcode=0xA))
                        await writer.drain()
                        continue
                    if data is None:
                        break
                    await self._ingest(data, client)
            finally:
                self._drop(client)
            return

        await self._serve_static(path, writer)

    async def _serve_static(self, path: str, writer: asyncio.StreamWriter):
        root = self.cfg.service.static_dir
        if not root:
            body = b"rcmteleop service: connect a console over WebSocket or raw JSON lines\n"
            writer.write(b"HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\n"
                         b"Content-Length: " + str(len(body)).encode() + b"\r\n\r\n" + body)
            await writer.drain()
            return
        rel = path.split("?")[0].lstrip("/") or "index.html"
        file = (Path(root) / rel).resolve()
        if not str(file).startswith(str(Path(root).resolve())) or not file.is_file():
            writer.write(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\n\r\n")
            await writer.drain()
            return
        body = file.read_bytes()
        ctype = mimetypes.guess_type(str(file))[0] or "application/octet-stream"
        writer.write(b"HTTP/1.1 200 OK\r\nContent-Type: " + ctype.encode() +
                     b"\r\nContent-Length: " + str(len(body)).encode() + b"\r\n\r\n" + body)
        await writer.drain()

    async def run(self):
        server = await asyncio.start_server(
            self.handle_connection, self.cfg.service.host, self.cfg.service.port)
        addr = server.sockets[0].getsockname()
        log.info("serving on %s:%s (realtime=%s)", addr[0], addr[1],
                 self.cfg.service.realtime)
        print(f"listening on {addr[0]}:{addr[1]}", flush=True)
        loop_task = asyncio.create_task(self.control_loop())
        try:
            async with server:
                await server.serve_forever()
        finally:
            self._stop.set()
            loop_task.cancel()


def serve(cfg: RunConfig):
    asyncio.run(TeleopService(cfg).run())
