"""memsig: a coordinator-assisted two-round Schnorr multi-signature.

Signing costs one exponentiation per signer and verification two,
independent of the group size; a public coordinator orders the rounds so
that the joint challenge is unknowable until every commitment is frozen.
"""

__version__ = "0.1.0"

from .group import Group, Secp256k1Group, ToyGroup, get_group, kernels_enabled
from .mems import (
    AggregatedKey,
    KeyPair,
    Roster,
    Signature,
    SignerSession,
    aggregate,
    assemble,
    keygen,
    verify,
    verify_partial,
)
from .oracles import OracleConfig, Oracles

__all__ = [
    "AggregatedKey",
    "Group",
    "KeyPair",
    "OracleConfig",
    "Oracles",
    "Roster",
    "Secp256k1Group",
    "Signature",
    "SignerSession",
    "ToyGroup",
    "aggregate",
    "assemble",
    "get_group",
    "keygen",
    "kernels_enabled",
    "verify",
    "verify_partial",
]
