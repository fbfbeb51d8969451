"""Comparison schemes sharing the group/oracle substrate.

Two baselines, both coordinator-free (broadcast is simulated in process):

* ``Musig2SignerSession`` -- a commitment-vector two-round scheme in the
  MuSig2 style: each signer broadcasts v nonce commitments, the effective
  commitment is a hash-weighted combination of the per-position products.
  Benchmark-faithful, not standards-faithful: it follows the summary
  description (with the customary b_1 = 1), not every refinement of the
  original construction.

* ``InsecureTwoRoundSession`` -- the single-commitment two-round scheme
  whose challenge depends only on the *product* of commitments, which is
  exactly the malleability the k-sum forgery exploits.  It exists to be
  attacked.

``schnorr_sign``/``schnorr_verify`` provide the single-signer base scheme
used by the rogue-key demo and the endorsement simulator's per-endorser
baseline.

The nonce-coefficient hash for the vector scheme is fixed byte-exactly as
  "MEMS/MUSIG2B" || enc(T_1) || ... || enc(T_v) || u32_be(j)
reduced like every other oracle, where T_j is the product over signers of
the j-th commitments; b_1 is pinned to 1.
"""

from dataclasses import dataclass
from enum import Enum

from .group import Group
from .mems import AggregatedKey, KeyPair, ProtocolError, Roster
from .oracles import Oracles

TAG_MUSIG2_B = b"MEMS/MUSIG2B"

DEFAULT_NONCE_VECTOR_LEN = 4


def broadcast_message_count(scheme: str, n: int) -> int:
    """Total signing-phase wire messages.

    Peer-to-peer two-round schemes broadcast in four semi-rounds of
    n*(n-1) point-to-point messages; MEMS is counted by its coordinator.
    """
    if scheme == "mems":
        return 5 * n
    if scheme in ("musig2", "insecure", "mbcj", "dwms"):
        if n < 2:
            raise ValueError("peer-to-peer broadcast needs n >= 2")
        return 4 * n * (n - 1)
    raise ValueError(f"unknown scheme {scheme!r}")


class _Phase(Enum):
    INIT = "init"
    COMMITTED = "committed"
    FINALIZED = "finalized"


@dataclass(frozen=True)
class VectorSignature:
    R: object  # effective joint commitment
    s: int


class Musig2SignerSession:
    """Two-round commitment-vector signer; v >= 2 nonces per session."""

    def __init__(
        self,
        group: Group,
        oracles: Oracles,
        keypair: KeyPair,
        roster: Roster,
        index: int,
        message: bytes,
        v: int = DEFAULT_NONCE_VECTOR_LEN,
    ):
        if v < 2:
            raise ValueError("nonce vector length must be >= 2")
        if roster.keys[index] != keypair.pk:
            raise ValueError("keypair does not match its roster slot")
        self.group = group
        self.oracles = oracles
        self.keypair = keypair
        self.roster = roster
        self.index = index
        self.message = message
        self.v = v
        self.phase = _Phase.INIT
        self._nonces = None
        self.commitments = None
        self.joint_commitment = None

    def round1(self, rng, nonces=None):
        """Generate the nonce vector; returns v commitments (v exps)."""
        if self.phase is not _Phase.INIT:
            raise ProtocolError("round1 already executed")
        g = self.group
        if nonces is None:
            nonces = [g.random_scalar(rng) for _ in range(self.v)]
        if len(nonces) != self.v:
            raise ValueError("nonce vector length mismatch")
        self._nonces = list(nonces)
        self.commitments = [g.exp(g.g, r) for r in self._nonces]
        self.phase = _Phase.COMMITTED
        return list(self.commitments)

    def round2(self, all_vectors, agg: AggregatedKey) -> int:
        """Combine vectors and return s_i (v-1 exps; b_1 = 1)."""
        g = self.group
        if self.phase is not _Phase.COMMITTED:
            raise ProtocolError(f"round2 called in phase {self.phase.value}")
        n = len(self.roster)
        if len(all_vectors) != n or any(len(vec) != self.v for vec in all_vectors):
            raise ProtocolError("commitment vectors do not match roster/v")
        if list(all_vectors[self.index]) != list(self.commitments):
            raise ProtocolError("own commitment vector missing from broadcast")
        T = [g.element_product(vec[j] for vec in all_vectors) for j in range(self.v)]
        b = nonce_coefficients(g, self.oracles, T)
        R_hat = g.element_product([T[0]] + [g.exp(T[j], b[j]) for j in range(1, self.v)])
        c = self.oracles.h2(agg.key, R_hat, self.message)
        a_i = agg.coefficients[self.index]
        s_i = (
            sum(bj * rj for bj, rj in zip(b, self._nonces)) + c * a_i * self.keypair.x
        ) % g.p
        self.joint_commitment = R_hat
        self._nonces = None
        self.phase = _Phase.FINALIZED
        return s_i


def nonce_coefficients(group: Group, oracles: Oracles, T) -> list:
    """b_1 = 1; b_j = hash(tag || enc(T_1)..enc(T_v) || j) for j >= 2."""
    base = b"".join(group.encode(t) for t in T)
    coeffs = [1]
    for j in range(2, len(T) + 1):
        coeffs.append(oracles.hash_to_scalar(TAG_MUSIG2_B, base + j.to_bytes(4, "big")))
    return coeffs


def musig2_verify(group: Group, oracles: Oracles, agg: AggregatedKey, m: bytes, sig: VectorSignature) -> bool:
    c = oracles.h2(agg.key, sig.R, m)
    lhs = group.exp(group.g, sig.s)
    rhs = group.element_mul(sig.R, group.exp(agg.key, c))
    return lhs == rhs


@dataclass(frozen=True)
class PlainSignature:
    R: object  # product of all single commitments
    s: int


class InsecureTwoRoundSession:
    """Single-commitment two-round signer: the k-sum attack target."""

    def __init__(
        self,
        group: Group,
        oracles: Oracles,
        keypair: KeyPair,
        roster: Roster,
        index: int,
        message: bytes,
    ):
        if roster.keys[index] != keypair.pk:
            raise ValueError("keypair does not match its roster slot")
        self.group = group
        self.oracles = oracles
        self.keypair = keypair
        self.roster = roster
        self.index = index
        self.message = message
        self.phase = _Phase.INIT
        self._r = None
        self.commitment = None
        self.joint_commitment = None

    def round1(self, rng, nonce: int | None = None):
        if self.phase is not _Phase.INIT:
            raise ProtocolError("round1 already executed")
        g = self.group
        self._r = g.random_scalar(rng) if nonce is None else nonce
        self.commitment = g.exp(g.g, self._r)
        self.phase = _Phase.COMMITTED
        return self.commitment

    def round2(self, all_commitments, agg: AggregatedKey) -> int:
        g = self.group
        if self.phase is not _Phase.COMMITTED:
            raise ProtocolError(f"round2 called in phase {self.phase.value}")
        if len(all_commitments) != len(self.roster):
            raise ProtocolError("commitment count does not match roster")
        if all_commitments[self.index] != self.commitment:
            raise ProtocolError("own commitment missing from broadcast")
        R = g.element_product(all_commitments)
        c = self.oracles.h2(agg.key, R, self.message)
        a_i = agg.coefficients[self.index]
        s_i = (self._r + c * a_i * self.keypair.x) % g.p
        self.joint_commitment = R
        self._r = None
        self.phase = _Phase.FINALIZED
        return s_i


def insecure_verify(group: Group, oracles: Oracles, agg: AggregatedKey, m: bytes, sig: PlainSignature) -> bool:
    c = oracles.h2(agg.key, sig.R, m)
    lhs = group.exp(group.g, sig.s)
    rhs = group.element_mul(sig.R, group.exp(agg.key, c))
    return lhs == rhs


class ConcurrentSigningOracle:
    """Honest InsecureTwoRound signer answering interleaved sessions.

    The adversary opens sessions (receiving fresh commitments), then later
    closes each one with the co-signer commitments of its choice --
    exactly the concurrency the k-sum attack needs.
    """

    def __init__(self, group: Group, oracles: Oracles, keypair: KeyPair, roster: Roster, index: int, rng):
        self.group = group
        self.oracles = oracles
        self.keypair = keypair
        self.roster = roster
        self.index = index
        self.rng = rng
        self._sessions: dict[int, InsecureTwoRoundSession] = {}
        self._next_id = 0
        self.signed_messages: list[bytes] = []

    def open_session(self, message: bytes):
        """Start a signing query; returns (session id, honest commitment)."""
        sess = InsecureTwoRoundSession(
            self.group, self.oracles, self.keypair, self.roster, self.index, message
        )
        R = sess.round1(self.rng)
        sid = self._next_id
        self._next_id += 1
        self._sessions[sid] = sess
        return sid, R

    def close_session(self, sid: int, all_commitments, agg: AggregatedKey) -> int:
        """Finish a query with the adversary's commitments; returns s_i."""
        sess = self._sessions.pop(sid)
        s_i = sess.round2(all_commitments, agg)
        self.signed_messages.append(sess.message)
        return s_i

    @property
    def open_count(self) -> int:
        return len(self._sessions)


# -- single-signer Schnorr -------------------------------------------------


@dataclass(frozen=True)
class SchnorrSignature:
    R: object
    s: int

    def encode(self, group: Group) -> bytes:
        return group.encode(self.R) + group.encode_scalar(self.s)

    @classmethod
    def decode(cls, group: Group, b: bytes) -> "SchnorrSignature":
        el = group.element_len
        if len(b) != el + group.scalar_len:
            raise ValueError("bad signature encoding length")
        return cls(R=group.decode(b[:el]), s=group.decode_scalar(b[el:]))


def schnorr_sign(group: Group, oracles: Oracles, keypair: KeyPair, m: bytes, rng, nonce=None) -> SchnorrSignature:
    r = group.random_scalar(rng) if nonce is None else nonce
    R = group.exp(group.g, r)
    c = oracles.h2(keypair.pk, R, m)
    return SchnorrSignature(R=R, s=(r + c * keypair.x) % group.p)


def schnorr_verify(group: Group, oracles: Oracles, pk, m: bytes, sig: SchnorrSignature) -> bool:
    c = oracles.h2(pk, sig.R, m)
    return group.exp(group.g, sig.s) == group.element_mul(sig.R, group.exp(pk, c))
