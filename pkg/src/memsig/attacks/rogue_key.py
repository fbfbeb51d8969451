"""Rogue-key attack against plain-sum key aggregation.

The adversary publishes X_n = (X_1 ... X_{n-1})^{-1} * g^{x_n}.  Under
plain-sum aggregation the aggregate key collapses to g^{x_n}, whose
discrete log the adversary knows, so it signs alone for the whole group.
Coefficient aggregation breaks the cancellation; the demonstration also
returns the witness that the coefficient-aggregated key differs from
g^{x_n}.
"""

from dataclasses import dataclass

from ..baselines import SchnorrSignature, schnorr_sign, schnorr_verify
from ..group import Group
from ..mems import KeyPair, Roster, aggregate
from ..oracles import Oracles


def plain_sum_aggregate(group: Group, keys):
    """The vulnerable aggregation: plain product of public keys."""
    return group.element_product(keys)


@dataclass(frozen=True)
class RogueKeyDemo:
    rogue_pk: object
    rogue_sk: int  # discrete log of the *plain-sum* aggregate key
    message: bytes
    forgery: SchnorrSignature
    plain_sum_key: object
    forgery_valid: bool  # forgery verifies against the plain-sum aggregate
    mems_agg_key: object
    mems_key_differs: bool  # coefficient aggregation resists: key != g^{x_n}


def rogue_key_attack(group: Group, oracles: Oracles, honest_pks, rng, message: bytes = b"rogue-key forgery") -> RogueKeyDemo:
    if len(honest_pks) < 1:
        raise ValueError("need at least one honest public key")
    x_n = group.random_scalar(rng)
    rogue_pk = group.element_mul(
        group.element_inv(group.element_product(honest_pks)),
        group.exp(group.g, x_n),
    )
    roster_keys = tuple(honest_pks) + (rogue_pk,)

    # plain-sum aggregation collapses to g^{x_n}
    agg_plain = plain_sum_aggregate(group, roster_keys)
    forged_keypair = KeyPair(x=x_n, pk=agg_plain)
    forgery = schnorr_sign(group, oracles, forged_keypair, message, rng)
    forgery_valid = schnorr_verify(group, oracles, agg_plain, message, forgery)

    # coefficient aggregation does not collapse
    agg_mems = aggregate(group, oracles, Roster(roster_keys))
    return RogueKeyDemo(
        rogue_pk=rogue_pk,
        rogue_sk=x_n,
        message=message,
        forgery=forgery,
        plain_sum_key=agg_plain,
        forgery_valid=forgery_valid,
        mems_agg_key=agg_mems.key,
        mems_key_differs=agg_mems.key != group.exp(group.g, x_n),
    )
