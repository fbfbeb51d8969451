"""Endorsement-flow simulator for a permissioned-ledger setting.

Each transaction carries a fixed-size header, proposal, and response, a
client signature, and the endorsement: either one signature per endorser
("individual") or a single joint signature for the whole endorser set
("mems").  The simulator runs real signing so block verification is real
work, then reports transaction size, the fraction of it spent on
signatures, and the wall time to verify a block's endorsements.

CSV columns: mode,n,tx_bytes,sig_proportion,block_verify_ns
"""

import csv
import time
from dataclasses import dataclass

from . import baselines, mems
from .group import Group
from .oracles import Oracles

HEADER_BYTES = 128
PROPOSAL_BYTES = 512
RESPONSE_BYTES = 256

CSV_FIELDS = ["mode", "n", "tx_bytes", "sig_proportion", "block_verify_ns"]

MODES = ("mems", "individual")


@dataclass(frozen=True)
class Transaction:
    proposal_digest: bytes
    client_signature: bytes
    endorsement: bytes  # one joint signature, or n concatenated signatures


@dataclass(frozen=True)
class Block:
    transactions: tuple

    def __len__(self):
        return len(self.transactions)


@dataclass(frozen=True)
class EndorsementReport:
    mode: str
    n: int
    tx_count: int
    tx_bytes: int
    sig_proportion: float
    block_verify_ns: int
    all_valid: bool

    def row(self) -> list:
        return [self.mode, self.n, self.tx_bytes, round(self.sig_proportion, 6), self.block_verify_ns]


def write_csv(reports, stream):
    writer = csv.writer(stream)
    writer.writerow(CSV_FIELDS)
    for rep in reports:
        writer.writerow(rep.row())


def signature_bytes(group: Group) -> int:
    return group.element_len + group.scalar_len


def transaction_bytes(group: Group, mode: str, n: int) -> int:
    sig = signature_bytes(group)
    endorsement = sig if mode == "mems" else n * sig
    return HEADER_BYTES + PROPOSAL_BYTES + RESPONSE_BYTES + sig + endorsement


def signature_proportion(group: Group, mode: str, n: int) -> float:
    """Fraction of a transaction's bytes taken by signatures."""
    sig = signature_bytes(group)
    endorsement = sig if mode == "mems" else n * sig
    return (sig + endorsement) / transaction_bytes(group, mode, n)


def _mems_endorse(group, oracles, keypairs, roster, agg, message, rng):
    sessions = [
        mems.SignerSession(group, oracles, kp, roster, i, message)
        for i, kp in enumerate(keypairs)
    ]
    commitments = tuple(sess.round1(rng) for sess in sessions)
    t = rng.getrandbits(64).to_bytes(8, "big") + rng.getrandbits(128).to_bytes(16, "big")
    w = oracles.h1(t)
    bundle = mems.Round1Bundle(
        commitments=commitments, t=t, w=w, W=group.exp(group.g, w)
    )
    partials = [sess.round2(bundle, agg) for sess in sessions]
    return mems.Signature(
        U=sessions[0].joint_commitment,
        s=mems.assemble(group, partials, len(roster)),
    )


def run_endorsement(
    group: Group,
    oracles: Oracles,
    mode: str,
    n: int,
    tx_count: int,
    rng,
) -> EndorsementReport:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    keypairs = [mems.keygen(group, rng) for _ in range(n)]
    roster = mems.Roster(tuple(kp.pk for kp in keypairs))
    agg = mems.aggregate(group, oracles, roster)
    client = mems.keygen(group, rng)

    transactions = []
    for _ in range(tx_count):
        digest = rng.getrandbits(256).to_bytes(32, "big")
        client_sig = baselines.schnorr_sign(group, oracles, client, digest, rng)
        if mode == "mems":
            endorsement = _mems_endorse(
                group, oracles, keypairs, roster, agg, digest, rng
            ).encode(group)
        else:
            endorsement = b"".join(
                baselines.schnorr_sign(group, oracles, kp, digest, rng).encode(group)
                for kp in keypairs
            )
        transactions.append(
            Transaction(
                proposal_digest=digest,
                client_signature=client_sig.encode(group),
                endorsement=endorsement,
            )
        )
    block = Block(transactions=tuple(transactions))

    start = time.perf_counter_ns()
    all_valid = verify_block(group, oracles, mode, block, roster, agg)
    block_verify_ns = time.perf_counter_ns() - start

    return EndorsementReport(
        mode=mode,
        n=n,
        tx_count=tx_count,
        tx_bytes=transaction_bytes(group, mode, n),
        sig_proportion=signature_proportion(group, mode, n),
        block_verify_ns=block_verify_ns,
        all_valid=all_valid,
    )


def verify_block(group: Group, oracles: Oracles, mode: str, block: Block, roster, agg) -> bool:
    """Check every transaction's endorsement; returns overall validity."""
    sig_len = signature_bytes(group)
    ok = True
    for tx in block.transactions:
        if mode == "mems":
            sig = mems.Signature.decode(group, tx.endorsement)
            ok &= mems.verify(group, oracles, agg, tx.proposal_digest, sig)
        else:
            for i, pk in enumerate(roster.keys):
                raw = tx.endorsement[i * sig_len:(i + 1) * sig_len]
                sig = baselines.SchnorrSignature.decode(group, raw)
                ok &= baselines.schnorr_verify(group, oracles, pk, tx.proposal_digest, sig)
    return ok


def run_trend(group: Group, oracles: Oracles, sizes, tx_count: int, rng):
    """Both modes across endorser-set sizes; the mems rows stay flat."""
    return [
        run_endorsement(group, oracles, mode, n, tx_count, rng)
        for mode in MODES
        for n in sizes
    ]
