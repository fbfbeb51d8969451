"""Micro-benchmarks: per-signer signing cost, verification cost, and
wire-message totals, per scheme and roster size.

Co-signer material is faked with uninstrumented random group elements, so
the measured exponentiation count is exactly the cost of the benched
operation.  Verification is timed against a random (invalid) signature --
the work is identical and no n-party signing run is needed.

CSV columns: scheme,n,op,reps,mean_ns,median_ns,exp_count,msg_count
"""

import csv
import statistics
import time
from dataclasses import dataclass

from . import baselines, mems
from .group import Group
from .oracles import Oracles

CSV_FIELDS = ["scheme", "n", "op", "reps", "mean_ns", "median_ns", "exp_count", "msg_count"]

SCHEMES = ("mems", "musig2", "insecure")


@dataclass(frozen=True)
class BenchRecord:
    scheme: str
    n: int
    op: str
    reps: int
    mean_ns: int
    median_ns: int
    exp_count: int
    msg_count: int

    def row(self) -> list:
        return [getattr(self, f) for f in CSV_FIELDS]


def write_csv(records, stream):
    writer = csv.writer(stream)
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow(rec.row())


def _record(scheme, n, op, durations_ns, exp_count, msg_count) -> BenchRecord:
    return BenchRecord(
        scheme=scheme,
        n=n,
        op=op,
        reps=len(durations_ns),
        mean_ns=int(statistics.fmean(durations_ns)),
        median_ns=int(statistics.median(durations_ns)),
        exp_count=exp_count,
        msg_count=msg_count,
    )


def _fake_roster(group: Group, keypair: mems.KeyPair, n: int, rng) -> mems.Roster:
    """Real key in slot 0, uninstrumented random elements elsewhere."""
    return mems.Roster((keypair.pk,) + tuple(group.random_element(rng) for _ in range(n - 1)))


def _msg_count(scheme: str, n: int) -> int:
    try:
        return baselines.broadcast_message_count(scheme, n)
    except ValueError:
        return 0


def bench_sign(group: Group, oracles: Oracles, scheme: str, n: int, reps: int, rng) -> BenchRecord:
    """Single signer's full signing work (both rounds), co-signers faked."""
    keypair = mems.keygen(group, rng)
    roster = _fake_roster(group, keypair, n, rng)
    agg = mems.aggregate(group, oracles, roster)
    message = b"bench message"
    durations = []
    group.reset_exp_count()
    if scheme == "mems":
        t = rng.getrandbits(64).to_bytes(8, "big")
        w = oracles.h1(t)
        W = group.exp(group.g, w)
        others = tuple(group.random_element(rng) for _ in range(n - 1))
        group.reset_exp_count()
        for _ in range(reps):
            session = mems.SignerSession(group, oracles, keypair, roster, 0, message)
            start = time.perf_counter_ns()
            R = session.round1(rng)
            bundle = mems.Round1Bundle(commitments=(R,) + others, t=t, w=w, W=W)
            session.round2(bundle, agg)
            durations.append(time.perf_counter_ns() - start)
    elif scheme == "musig2":
        v = baselines.DEFAULT_NONCE_VECTOR_LEN
        other_vectors = [
            [group.random_element(rng) for _ in range(v)] for _ in range(n - 1)
        ]
        group.reset_exp_count()
        for _ in range(reps):
            session = baselines.Musig2SignerSession(
                group, oracles, keypair, roster, 0, message, v=v
            )
            start = time.perf_counter_ns()
            vec = session.round1(rng)
            session.round2([vec] + other_vectors, agg)
            durations.append(time.perf_counter_ns() - start)
    elif scheme == "insecure":
        others = [group.random_element(rng) for _ in range(n - 1)]
        group.reset_exp_count()
        for _ in range(reps):
            session = baselines.InsecureTwoRoundSession(
                group, oracles, keypair, roster, 0, message
            )
            start = time.perf_counter_ns()
            R = session.round1(rng)
            session.round2([R] + others, agg)
            durations.append(time.perf_counter_ns() - start)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    exp_count = group.exp_count // reps
    return _record(scheme, n, "sign", durations, exp_count, _msg_count(scheme, n))


def bench_verify(group: Group, oracles: Oracles, scheme: str, n: int, reps: int, rng) -> BenchRecord:
    """Joint-signature verification; cost is independent of validity."""
    keypair = mems.keygen(group, rng)
    roster = _fake_roster(group, keypair, n, rng)
    agg = mems.aggregate(group, oracles, roster)
    message = b"bench message"
    R = group.random_element(rng)
    s = group.random_scalar(rng)
    durations = []
    group.reset_exp_count()
    for _ in range(reps):
        start = time.perf_counter_ns()
        if scheme == "mems":
            mems.verify(group, oracles, agg, message, mems.Signature(U=R, s=s))
        elif scheme == "musig2":
            baselines.musig2_verify(
                group, oracles, agg, message, baselines.VectorSignature(R=R, s=s)
            )
        elif scheme == "insecure":
            baselines.insecure_verify(
                group, oracles, agg, message, baselines.PlainSignature(R=R, s=s)
            )
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        durations.append(time.perf_counter_ns() - start)
    exp_count = group.exp_count // reps
    return _record(scheme, n, "verify", durations, exp_count, _msg_count(scheme, n))


def bench_aggregate(group: Group, oracles: Oracles, scheme: str, n: int, reps: int, rng) -> BenchRecord:
    """Key aggregation (shared by every scheme here): n exponentiations."""
    keypair = mems.keygen(group, rng)
    roster = _fake_roster(group, keypair, n, rng)
    durations = []
    group.reset_exp_count()
    for _ in range(reps):
        start = time.perf_counter_ns()
        mems.aggregate(group, oracles, roster)
        durations.append(time.perf_counter_ns() - start)
    exp_count = group.exp_count // reps
    return _record(scheme, n, "aggregate", durations, exp_count, _msg_count(scheme, n))


def bench_messages(scheme: str, n: int) -> BenchRecord:
    """Wire-message totals only; no timing involved."""
    return _record(scheme, n, "messages", [0], 0, _msg_count(scheme, n))


def run_suite(group: Group, oracles: Oracles, sizes, reps: int, rng, schemes=SCHEMES):
    records = []
    for scheme in schemes:
        for n in sizes:
            records.append(bench_sign(group, oracles, scheme, n, reps, rng))
            records.append(bench_verify(group, oracles, scheme, n, reps, rng))
            records.append(bench_aggregate(group, oracles, scheme, n, reps, rng))
            records.append(bench_messages(scheme, n))
    return records
