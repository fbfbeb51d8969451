"""Domain-separated hash-to-scalar oracles.

Three oracles share one construction: a tagged SHA-256 payload is expanded
to 64 bytes (two counter-indexed digests), then reduced.  Expanding to at
least twice the scalar width before the modular reduction keeps the bias
below 2^-128 for a 256-bit group order.

Serialization is byte-exact and documented in the README:

  h0:  "MEMS/H0" || u32_be(n) || enc(X_1) || ... || enc(X_n) || enc(x)
  h1:  "MEMS/H1" || t
  h2:  "MEMS/H2" || enc(aggkey) || enc(joint_commitment) || m

Expansion: digest_i = SHA256(u8(i) || tag_payload) for i in {0, 1}, output
int.from_bytes(digest_0 || digest_1, big).

The optional attack mode narrows *only* h2's output range to [0, 2^b); it
exists solely so the k-sum experiments can run at desk scale.
"""

import hashlib
from dataclasses import dataclass, field

from .group import Group

TAG_H0 = b"MEMS/H0"
TAG_H1 = b"MEMS/H1"
TAG_H2 = b"MEMS/H2"


@dataclass(frozen=True)
class OracleConfig:
    hash_name: str = "sha256"
    challenge_bits: int | None = None  # None = full scalar width
    tags: tuple = field(default=(TAG_H0, TAG_H1, TAG_H2))

    def __post_init__(self):
        if len(set(self.tags)) != 3:
            raise ValueError("domain tags must be pairwise distinct")


class Oracles:
    """h0/h1/h2 bound to one group's scalar field and encodings."""

    def __init__(self, group: Group, config: OracleConfig | None = None):
        self.group = group
        self.config = config or OracleConfig()
        b = self.config.challenge_bits
        if b is not None and b > group.p.bit_length():
            raise ValueError("challenge width exceeds scalar width")

    def _expand(self, tag: bytes, payload: bytes) -> int:
        h = hashlib.new(self.config.hash_name)
        out = b""
        for i in (0, 1):
            d = h.copy()
            d.update(bytes([i]))
            d.update(tag)
            d.update(payload)
            out += d.digest()
        return int.from_bytes(out, "big")

    def hash_to_scalar(self, tag: bytes, payload: bytes) -> int:
        return self._expand(tag, payload) % self.group.p

    def h0(self, pk_list, x) -> int:
        """Key-aggregation coefficient for member x of the ordered roster."""
        if x not in pk_list:
            raise ValueError("key is not a member of the roster")
        enc = self.group.encode
        payload = len(pk_list).to_bytes(4, "big")
        payload += b"".join(enc(pk) for pk in pk_list)
        payload += enc(x)
        return self.hash_to_scalar(self.config.tags[0], payload)

    def h1(self, t: bytes) -> int:
        """Timestamp-derived scalar."""
        if not t:
            raise ValueError("timestamp bytes must be non-empty")
        return self.hash_to_scalar(self.config.tags[1], t)

    def h2(self, agg_key, joint_commitment, m: bytes) -> int:
        """Signature challenge; range-narrowed in attack mode."""
        enc = self.group.encode
        payload = enc(agg_key) + enc(joint_commitment) + m
        v = self._expand(self.config.tags[2], payload)
        b = self.config.challenge_bits
        if b is not None:
            return v % (1 << b)  # exact uniformity: 2^b divides 2^512
        return v % self.group.p
