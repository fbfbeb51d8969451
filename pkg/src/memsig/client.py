"""Signer-side client for the TCP coordinator.

`run_signer` drives one roster slot through a full signing run: slot 0
creates the session (everyone agrees on the session id out of band, so
creation is idempotent from the client's view), the other slots retry
until the session exists, every slot commits, polls for the round-1
bundle, submits its partial, polls for the full partial list, and returns
the assembled signature.
"""

import socket
import time
from dataclasses import dataclass

from . import mems
from .group import Group
from .oracles import Oracles
from .wire import read_frame, write_frame


class ClientError(Exception):
    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code


class CoordinatorClient:
    """One TCP connection speaking the framed JSON protocol."""

    def __init__(self, host: str, port: int, group: Group, timeout: float = 30.0):
        self.group = group
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._rfile = self._sock.makefile("rb")
        self._wfile = self._sock.makefile("wb")

    def close(self):
        for stream in (self._rfile, self._wfile, self._sock):
            try:
                stream.close()
            except OSError:
                pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def request(self, payload: dict) -> dict:
        write_frame(self._wfile, payload)
        reply = read_frame(self._rfile)
        if reply is None:
            raise ClientError("connection-closed")
        if reply.get("type") == "error":
            raise ClientError(reply.get("code", "error"), reply.get("detail", ""))
        return reply

    # -- typed wrappers ----------------------------------------------------

    def create_session(self, roster, message: bytes, session_id: str | None = None) -> str:
        g = self.group
        reply = self.request(
            {
                "type": "create",
                "session_id": session_id,
                "roster": [g.encode_hex(pk) for pk in roster.keys],
                "message": message.hex(),
            }
        )
        return reply["session_id"]

    def submit_commitment(self, session_id: str, slot: int, commitment) -> bool:
        reply = self.request(
            {
                "type": "commit",
                "session_id": session_id,
                "slot": slot,
                "commitment": self.group.encode_hex(commitment),
            }
        )
        return reply["released"]

    def get_round1(self, session_id: str) -> mems.Round1Bundle:
        g = self.group
        reply = self.request({"type": "round1", "session_id": session_id})
        return mems.Round1Bundle(
            commitments=tuple(g.decode_hex(R) for R in reply["commitments"]),
            t=bytes.fromhex(reply["t"]),
            w=g.decode_scalar(bytes.fromhex(reply["w"])),
            W=g.decode_hex(reply["W"]),
        )

    def submit_partial(self, session_id: str, slot: int, s_i: int) -> bool:
        reply = self.request(
            {
                "type": "partial",
                "session_id": session_id,
                "slot": slot,
                "s": self.group.encode_scalar(s_i).hex(),
            }
        )
        return reply["complete"]

    def get_partials(self, session_id: str) -> list:
        g = self.group
        reply = self.request({"type": "partials", "session_id": session_id})
        return [g.decode_scalar(bytes.fromhex(s)) for s in reply["s"]]

    def message_count(self, session_id: str) -> int:
        return self.request({"type": "msg-count", "session_id": session_id})["count"]

    def phase(self, session_id: str) -> str:
        return self.request({"type": "phase", "session_id": session_id})["phase"]


@dataclass
class SigningRun:
    session_id: str
    partial: int
    signature: mems.Signature
    valid: bool


def run_signer(
    host: str,
    port: int,
    group: Group,
    oracles: Oracles,
    keypair: mems.KeyPair,
    roster: mems.Roster,
    index: int,
    message: bytes,
    session_id: str,
    rng,
    poll_interval: float = 0.02,
    timeout: float = 30.0,
) -> SigningRun:
    """Drive one slot end to end; returns the verified joint signature."""
    session = mems.SignerSession(group, oracles, keypair, roster, index, message)
    deadline = time.monotonic() + timeout

    def wait(fn, retry_codes):
        while True:
            try:
                return fn()
            except ClientError as exc:
                if exc.code not in retry_codes or time.monotonic() > deadline:
                    raise
                time.sleep(poll_interval)

    with CoordinatorClient(host, port, group, timeout=timeout) as client:
        if index == 0:
            try:
                client.create_session(roster, message, session_id=session_id)
            except ClientError as exc:
                if exc.code != "duplicate-slot":
                    raise
        commitment = session.round1(rng)
        wait(
            lambda: client.submit_commitment(session_id, index, commitment),
            retry_codes={"unknown-session"},
        )
        bundle = wait(
            lambda: client.get_round1(session_id),
            retry_codes={"round1-unavailable"},
        )
        agg = mems.aggregate(group, oracles, roster)
        s_i = session.round2(bundle, agg)
        client.submit_partial(session_id, index, s_i)
        partials = wait(
            lambda: client.get_partials(session_id),
            retry_codes={"wrong-phase"},
        )
        signature = mems.Signature(
            U=session.joint_commitment, s=mems.assemble(group, partials, len(roster))
        )
        valid = mems.verify(group, oracles, agg, message, signature)
        return SigningRun(
            session_id=session_id, partial=s_i, signature=signature, valid=valid
        )
