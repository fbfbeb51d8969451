"""The Public Third Party coordinator.

A PTP session collects one commitment per roster slot, and only when the
last slot fills does it fix the timestamp material (t, w = h1(t), W = g^w)
and release the round-1 bundle.  Commitments are frozen from that instant;
a late or replacement commitment is rejected with a distinct error code.
That ordering is the entire k-sum defense: no signer can observe w before
its own commitment is immutable.

Every state transition is appended to a per-session audit log, and
`replay_audit` re-derives the final phase from the log alone, standing in
for the public verifiability of an on-chain contract.

By default t is 8 bytes of unix milliseconds followed by a 16-byte random
session nonce; a bare millisecond timestamp is guessable, so the nonce
closes that channel.  `strict_timestamp=True` drops the nonce for fidelity
experiments against the timestamp-guessing adversary.
"""

import threading
import time
from dataclasses import dataclass, field
from enum import Enum

from .group import Group
from .mems import AggregatedKey, Round1Bundle, Roster, aggregate, verify_partial
from .oracles import Oracles


class CoordinatorError(Exception):
    code = "coordinator-error"


class UnknownSession(CoordinatorError):
    code = "unknown-session"


class UnknownSlot(CoordinatorError):
    code = "unknown-slot"


class DuplicateSubmission(CoordinatorError):
    code = "duplicate-slot"


class CommitmentsFrozen(CoordinatorError):
    """Commitment arrived after round-1 release: the anti-k-sum rejection."""

    code = "commitments-frozen"


class WrongPhase(CoordinatorError):
    code = "wrong-phase"


class Unavailable(CoordinatorError):
    """Round-1 material queried before all commitments were frozen."""

    code = "round1-unavailable"


class InvalidPartial(CoordinatorError):
    code = "invalid-partial"


class SessionAborted(CoordinatorError):
    code = "session-aborted"


class SessionPhase(Enum):
    COLLECTING_COMMITMENTS = "collecting-commitments"
    ROUND1_RELEASED = "round1-released"
    COLLECTING_PARTIALS = "collecting-partials"
    COMPLETED = "completed"
    ABORTED = "aborted"


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    at_ms: int
    event: str
    details: dict


@dataclass
class PtpSession:
    session_id: str
    roster: Roster
    message: bytes
    created_ms: int
    phase: SessionPhase = SessionPhase.COLLECTING_COMMITMENTS
    commitments: dict = field(default_factory=dict)
    partials: dict = field(default_factory=dict)
    t: bytes | None = None
    w: int | None = None
    W: object = None
    bundle: Round1Bundle | None = None
    agg: AggregatedKey | None = None
    challenge: int | None = None
    message_counter: int = 0
    audit: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def n(self) -> int:
        return len(self.roster)


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


class PtpCoordinator:
    """Serves many sessions; each session's transitions are serialized."""

    def __init__(
        self,
        group: Group,
        oracles: Oracles,
        rng,
        strict_timestamp: bool = False,
        verify_partials: bool = False,
        commit_deadline_ms: int | None = None,
        clock=_now_ms,
    ):
        self.group = group
        self.oracles = oracles
        self.rng = rng
        self.strict_timestamp = strict_timestamp
        self.verify_partials = verify_partials
        self.commit_deadline_ms = commit_deadline_ms
        self.clock = clock
        self._sessions: dict[str, PtpSession] = {}
        self._registry_lock = threading.Lock()

    # -- helpers -----------------------------------------------------------

    def _session(self, session_id: str) -> PtpSession:
        with self._registry_lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSession(session_id) from None

    def _log(self, s: PtpSession, event: str, **details):
        s.audit.append(
            AuditEvent(seq=len(s.audit), at_ms=self.clock(), event=event, details=details)
        )

    def _check_deadline(self, s: PtpSession):
        if (
            s.phase is SessionPhase.COLLECTING_COMMITMENTS
            and self.commit_deadline_ms is not None
            and self.clock() - s.created_ms > self.commit_deadline_ms
        ):
            s.phase = SessionPhase.ABORTED
            self._log(s, "aborted", reason="commit-deadline")
        if s.phase is SessionPhase.ABORTED:
            raise SessionAborted(s.session_id)

    # -- operations --------------------------------------------------------

    def create_session(self, roster: Roster, message: bytes, session_id: str | None = None) -> str:
        if session_id is None:
            session_id = self.rng.getrandbits(128).to_bytes(16, "big").hex()
        s = PtpSession(
            session_id=session_id,
            roster=roster,
            message=message,
            created_ms=self.clock(),
        )
        with self._registry_lock:
            if session_id in self._sessions:
                raise DuplicateSubmission(f"session {session_id} already exists")
            self._sessions[session_id] = s
        self._log(s, "created", n=s.n)
        return session_id

    def submit_commitment(self, session_id: str, slot: int, commitment) -> Round1Bundle | None:
        """Fill one slot; returns the bundle when this was the last slot.

        The release transition runs under the session lock, so no
        interleaving can admit a commitment after t is fixed.
        """
        s = self._session(session_id)
        with s.lock:
            self._check_deadline(s)
            if not 0 <= slot < s.n:
                raise UnknownSlot(f"slot {slot} outside roster of size {s.n}")
            if s.phase is not SessionPhase.COLLECTING_COMMITMENTS:
                raise CommitmentsFrozen(
                    f"session {session_id} no longer accepts commitments"
                )
            if slot in s.commitments:
                raise DuplicateSubmission(f"slot {slot} already committed")
            s.commitments[slot] = commitment
            s.message_counter += 1
            self._log(s, "commitment-received", slot=slot)
            if len(s.commitments) == s.n:
                self._release_round1(s)
                return s.bundle
            return None

    def _release_round1(self, s: PtpSession):
        # atomic with the final submit_commitment (caller holds the lock)
        t = (self.clock() % (1 << 64)).to_bytes(8, "big")
        if not self.strict_timestamp:
            t += self.rng.getrandbits(128).to_bytes(16, "big")
        w = self.oracles.h1(t)
        W = self.group.exp(self.group.g, w)
        s.t, s.w, s.W = t, w, W
        s.bundle = Round1Bundle(
            commitments=tuple(s.commitments[i] for i in range(s.n)),
            t=t,
            w=w,
            W=W,
        )
        s.phase = SessionPhase.ROUND1_RELEASED
        # two broadcast messages per signer: commitment list, then (t, w, W)
        s.message_counter += 2 * s.n
        self._log(s, "round1-released", t=t.hex())
        if self.verify_partials:
            s.agg = aggregate(self.group, self.oracles, s.roster)
            U = self.group.element_mul(
                self.group.small_pow(W, s.n),
                self.group.element_product(s.bundle.commitments),
            )
            s.challenge = self.oracles.h2(s.agg.key, U, s.message)

    def get_round1(self, session_id: str) -> Round1Bundle:
        """Round-1 material; unavailable until every commitment is frozen."""
        s = self._session(session_id)
        with s.lock:
            self._check_deadline(s)
            if s.bundle is None:
                raise Unavailable(session_id)
            return s.bundle

    def submit_partial(self, session_id: str, slot: int, s_i: int) -> list | None:
        """Collect one partial; returns the full list upon completion."""
        s = self._session(session_id)
        with s.lock:
            self._check_deadline(s)
            if not 0 <= slot < s.n:
                raise UnknownSlot(f"slot {slot} outside roster of size {s.n}")
            if s.phase not in (
                SessionPhase.ROUND1_RELEASED,
                SessionPhase.COLLECTING_PARTIALS,
            ):
                raise WrongPhase(f"session phase is {s.phase.value}")
            if slot in s.partials:
                raise DuplicateSubmission(f"slot {slot} already submitted a partial")
            if self.verify_partials and not verify_partial(
                self.group,
                s.bundle.commitments[slot],
                s.roster.keys[slot],
                s.agg.coefficients[slot],
                s.w,
                s.challenge,
                s_i,
            ):
                self._log(s, "partial-rejected", slot=slot)
                raise InvalidPartial(f"slot {slot} partial fails verification")
            s.partials[slot] = s_i
            s.message_counter += 1
            s.phase = SessionPhase.COLLECTING_PARTIALS
            self._log(s, "partial-received", slot=slot)
            if len(s.partials) == s.n:
                s.message_counter += s.n  # partial-list broadcast
                s.phase = SessionPhase.COMPLETED
                self._log(s, "completed")
                return [s.partials[i] for i in range(s.n)]
            return None

    def get_partials(self, session_id: str) -> list:
        s = self._session(session_id)
        with s.lock:
            if s.phase is not SessionPhase.COMPLETED:
                raise WrongPhase("partial list available only when completed")
            return [s.partials[i] for i in range(s.n)]

    def message_count(self, session_id: str) -> int:
        """Exact wire-message total; defined only for completed sessions."""
        s = self._session(session_id)
        with s.lock:
            if s.phase is not SessionPhase.COMPLETED:
                raise WrongPhase("message count defined only for completed sessions")
            return s.message_counter

    def audit_export(self, session_id: str) -> tuple:
        s = self._session(session_id)
        with s.lock:
            return tuple(s.audit)

    def session_phase(self, session_id: str) -> SessionPhase:
        return self._session(session_id).phase


class AuditReplayError(Exception):
    pass


def replay_audit(events, n: int) -> SessionPhase:
    """Re-derive the session phase by replaying an exported audit log.

    Raises AuditReplayError when the log is tampered (gaps, illegal
    transitions, wrong counts).
    """
    phase = None
    committed: set = set()
    partials: set = set()
    for i, ev in enumerate(events):
        if ev.seq != i:
            raise AuditReplayError(f"sequence gap at {i}")
        if ev.event == "created":
            if phase is not None:
                raise AuditReplayError("duplicate creation event")
            if ev.details.get("n") != n:
                raise AuditReplayError("roster size mismatch")
            phase = SessionPhase.COLLECTING_COMMITMENTS
        elif ev.event == "commitment-received":
            if phase is not SessionPhase.COLLECTING_COMMITMENTS:
                raise AuditReplayError("commitment outside collection phase")
            slot = ev.details["slot"]
            if slot in committed or not 0 <= slot < n:
                raise AuditReplayError("bad commitment slot")
            committed.add(slot)
        elif ev.event == "round1-released":
            if phase is not SessionPhase.COLLECTING_COMMITMENTS or len(committed) != n:
                raise AuditReplayError("release before all commitments")
            phase = SessionPhase.ROUND1_RELEASED
        elif ev.event == "partial-received":
            if phase not in (
                SessionPhase.ROUND1_RELEASED,
                SessionPhase.COLLECTING_PARTIALS,
            ):
                raise AuditReplayError("partial outside round 2")
            slot = ev.details["slot"]
            if slot in partials or not 0 <= slot < n:
                raise AuditReplayError("bad partial slot")
            partials.add(slot)
            phase = SessionPhase.COLLECTING_PARTIALS
        elif ev.event == "partial-rejected":
            pass
        elif ev.event == "completed":
            if len(partials) != n:
                raise AuditReplayError("completion before all partials")
            phase = SessionPhase.COMPLETED
        elif ev.event == "aborted":
            phase = SessionPhase.ABORTED
        else:
            raise AuditReplayError(f"unknown event {ev.event!r}")
    if phase is None:
        raise AuditReplayError("log contains no creation event")
    return phase
