"""The MEMS two-round multi-signature scheme.

A signing run proceeds as: every signer commits R_i = g^{r_i}; the
coordinator releases a bundle (all commitments, timestamp bytes t, w, W)
once the roster is complete; each signer then derives the joint commitment
U = W^n * prod(R_i), the challenge c = h2(aggkey, U, m), and its partial
signature s_i = w + r_i + c*a_i*x_i.  The joint signature is
(U, sum(s_i)), verified as g^s == U * aggkey^c.

The signer trusts the received W after checking w = h1(t) (t is public, so
a forged W is publicly detectable); this keeps the signer at exactly one
instrumented exponentiation.  Pass ``recompute_w=True`` to pay a second
exponentiation and derive W = g^w locally instead.
"""

from dataclasses import dataclass
from enum import Enum

from .group import Group
from .oracles import Oracles


class ProtocolError(Exception):
    """State-machine misuse or an inconsistent coordinator bundle."""


@dataclass(frozen=True)
class KeyPair:
    x: int
    pk: object  # group element


def keygen(group: Group, rng, x: int | None = None) -> KeyPair:
    """Fresh key pair; `x` is a test hook forcing the secret."""
    if x is None:
        x = group.random_scalar(rng)
    return KeyPair(x=x, pk=group.exp(group.g, x))


@dataclass(frozen=True)
class Roster:
    """Ordered multiset of public keys; order is fixed at session creation."""

    keys: tuple

    def __post_init__(self):
        if len(self.keys) < 1:
            raise ValueError("roster must contain at least one key")

    def __len__(self):
        return len(self.keys)


@dataclass(frozen=True)
class AggregatedKey:
    key: object
    coefficients: tuple  # aligned with roster order


def aggregate(group: Group, oracles: Oracles, roster: Roster) -> AggregatedKey:
    """Coefficient aggregation: aggkey = prod X_i^{h0(roster, X_i)}.

    Costs exactly n instrumented exponentiations.  Duplicate keys occupy
    distinct slots with identical coefficients.
    """
    keys = list(roster.keys)
    coeffs = [oracles.h0(keys, pk) for pk in keys]
    terms = [group.exp(pk, a) for pk, a in zip(keys, coeffs)]
    return AggregatedKey(key=group.element_product(terms), coefficients=tuple(coeffs))


@dataclass(frozen=True)
class Round1Bundle:
    """Everything the coordinator releases after the last commitment."""

    commitments: tuple  # roster order
    t: bytes
    w: int
    W: object


@dataclass(frozen=True)
class Signature:
    U: object
    s: int

    def encode(self, group: Group) -> bytes:
        return group.encode(self.U) + group.encode_scalar(self.s)

    @classmethod
    def decode(cls, group: Group, b: bytes) -> "Signature":
        el = group.element_len
        if len(b) != el + group.scalar_len:
            raise ValueError("bad signature encoding length")
        return cls(U=group.decode(b[:el]), s=group.decode_scalar(b[el:]))


class Phase(Enum):
    INIT = "init"
    COMMITTED = "committed"
    FINALIZED = "finalized"


class SignerSession:
    """Single-signer state machine for one MEMS signing run.

    Single-owner mutable state: transferable between threads but not
    concurrently shareable.  The nonce is erased when round 2 completes.
    """

    def __init__(
        self,
        group: Group,
        oracles: Oracles,
        keypair: KeyPair,
        roster: Roster,
        index: int,
        message: bytes,
        recompute_w: bool = False,
    ):
        if not 0 <= index < len(roster):
            raise ValueError("signer index outside roster")
        if roster.keys[index] != keypair.pk:
            raise ValueError("keypair does not match its roster slot")
        self.group = group
        self.oracles = oracles
        self.keypair = keypair
        self.roster = roster
        self.index = index
        self.message = message
        self.recompute_w = recompute_w
        self.phase = Phase.INIT
        self._r = None
        self.commitment = None
        self.joint_commitment = None

    def round1(self, rng, nonce: int | None = None):
        """Pick the nonce and return the commitment R_i (1 exp)."""
        if self.phase is not Phase.INIT:
            raise ProtocolError("round1 already executed (nonce reuse forbidden)")
        self._r = self.group.random_scalar(rng) if nonce is None else nonce
        self.commitment = self.group.exp(self.group.g, self._r)
        self.phase = Phase.COMMITTED
        return self.commitment

    def round2(self, bundle: Round1Bundle, agg: AggregatedKey) -> int:
        """Validate the bundle and return the partial signature s_i."""
        g = self.group
        if self.phase is not Phase.COMMITTED:
            raise ProtocolError(f"round2 called in phase {self.phase.value}")
        n = len(self.roster)
        if len(bundle.commitments) != n:
            raise ProtocolError("bundle commitment count does not match roster")
        if bundle.commitments[self.index] != self.commitment:
            raise ProtocolError("own commitment missing or replaced in bundle")
        if self.oracles.h1(bundle.t) != bundle.w:
            raise ProtocolError("coordinator inconsistency: w != h1(t)")
        if self.recompute_w:
            W = g.exp(g.g, bundle.w)
            if W != bundle.W:
                raise ProtocolError("coordinator inconsistency: W != g^w")
        else:
            W = bundle.W
        U = g.element_mul(g.small_pow(W, n), g.element_product(bundle.commitments))
        c = self.oracles.h2(agg.key, U, self.message)
        a_i = agg.coefficients[self.index]
        s_i = (bundle.w + self._r + c * a_i * self.keypair.x) % g.p
        self.joint_commitment = U
        self._r = None  # nonce erased; no second partial can ever be produced
        self.phase = Phase.FINALIZED
        return s_i


def assemble(group: Group, partials, n: int) -> int:
    """Joint scalar s = sum of partial signatures mod p."""
    partials = list(partials)
    if len(partials) != n:
        raise ValueError(f"expected {n} partials, got {len(partials)}")
    return sum(partials) % group.p


def verify(group: Group, oracles: Oracles, agg: AggregatedKey, m: bytes, sig: Signature) -> bool:
    """g^s == U * aggkey^c with c = h2(aggkey, U, m); exactly 2 exps."""
    c = oracles.h2(agg.key, sig.U, m)
    lhs = group.exp(group.g, sig.s)
    rhs = group.element_mul(sig.U, group.exp(agg.key, c))
    return lhs == rhs


def verify_partial(group: Group, R_i, X_i, a_i: int, w: int, c: int, s_i: int) -> bool:
    """Check one partial: g^{s_i} == g^w * R_i * X_i^{a_i c}."""
    lhs = group.exp(group.g, s_i)
    rhs = group.element_mul(
        group.element_mul(group.exp(group.g, w), R_i),
        group.exp(X_i, (a_i * c) % group.p),
    )
    return lhs == rhs
