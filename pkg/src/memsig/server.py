"""TCP front end for the PTP coordinator.

One thread per connection; a connection may issue any number of requests.
All session state lives in the in-process `PtpCoordinator`, so every
guarantee (atomic release, frozen commitments, audit log, message counts)
carries over unchanged to the networked deployment.

Request types:

    create    {session_id?, roster: [pk hex], message: hex}
    commit    {session_id, slot, commitment: hex}
    round1    {session_id}
    partial   {session_id, slot, s: scalar hex}
    partials  {session_id}
    phase     {session_id}
    msg-count {session_id}
    audit     {session_id}
"""

import socketserver
import threading

from .coordinator import CoordinatorError, PtpCoordinator
from .group import Group
from .mems import Roster
from .oracles import Oracles
from .wire import WireError, error_reply, read_frame, write_frame


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        server: PtpServer = self.server  # type: ignore[assignment]
        while True:
            try:
                request = read_frame(self.rfile)
            except WireError as exc:
                write_frame(self.wfile, error_reply("bad-frame", str(exc)))
                return
            if request is None:
                return
            try:
                reply = server.dispatch(request)
            except CoordinatorError as exc:
                reply = error_reply(exc.code, str(exc))
            except (KeyError, ValueError, TypeError) as exc:
                reply = error_reply("bad-request", str(exc))
            write_frame(self.wfile, reply)


class PtpServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, group: Group, oracles: Oracles, rng, **coordinator_kwargs):
        super().__init__(address, _Handler)
        self.group = group
        self.coordinator = PtpCoordinator(group, oracles, rng, **coordinator_kwargs)

    def dispatch(self, request: dict) -> dict:
        g = self.group
        coord = self.coordinator
        kind = request["type"]
        if kind == "create":
            roster = Roster(tuple(g.decode_hex(pk) for pk in request["roster"]))
            session_id = coord.create_session(
                roster,
                bytes.fromhex(request["message"]),
                session_id=request.get("session_id"),
            )
            return {"type": "created", "session_id": session_id}
        if kind == "commit":
            bundle = coord.submit_commitment(
                request["session_id"],
                int(request["slot"]),
                g.decode_hex(request["commitment"]),
            )
            return {"type": "ok", "released": bundle is not None}
        if kind == "round1":
            bundle = coord.get_round1(request["session_id"])
            return {
                "type": "round1",
                "commitments": [g.encode_hex(R) for R in bundle.commitments],
                "t": bundle.t.hex(),
                "w": g.encode_scalar(bundle.w).hex(),
                "W": g.encode_hex(bundle.W),
            }
        if kind == "partial":
            partials = coord.submit_partial(
                request["session_id"],
                int(request["slot"]),
                g.decode_scalar(bytes.fromhex(request["s"])),
            )
            return {"type": "ok", "complete": partials is not None}
        if kind == "partials":
            partials = coord.get_partials(request["session_id"])
            return {
                "type": "partials",
                "s": [g.encode_scalar(s).hex() for s in partials],
            }
        if kind == "phase":
            return {
                "type": "phase",
                "phase": coord.session_phase(request["session_id"]).value,
            }
        if kind == "msg-count":
            return {
                "type": "msg-count",
                "count": coord.message_count(request["session_id"]),
            }
        if kind == "audit":
            events = coord.audit_export(request["session_id"])
            return {
                "type": "audit",
                "events": [
                    {
                        "seq": ev.seq,
                        "at_ms": ev.at_ms,
                        "event": ev.event,
                        "details": ev.details,
                    }
                    for ev in events
                ],
            }
        return error_reply("bad-request", f"unknown request type {kind!r}")

    def serve_in_thread(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread
