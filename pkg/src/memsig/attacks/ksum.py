"""k-sum forgery against the insecure two-round scheme, and the structural
demonstration that the same attack cannot start against the PTP-coordinated
scheme.

The forgery follows the six-step playbook: open k-1 concurrent signing
queries, harvest the honest commitments, fill k-1 lists with candidate
challenges (one fresh adversary nonce each), fill the k-th list with
challenges of fresh target messages over the *product* of honest
commitments, solve the k-sum relation, then answer the open queries with
the chosen adversary commitments and assemble the forged signature on the
never-signed target message.

The verification equation needs the sum of the k-1 query challenges to
equal the target challenge modulo the group order -- and since the order
dwarfs any such sum, *as integers*.  A plain mod-2^b k-sum solution can
carry and fail, so the query lists are rejection-sampled down to
challenges below 2^(b - ceil(lg(k-1))): the k-1 of them then sum to less
than 2^b, squarely inside the b-bit target space, and a solution at width
b+1 is carry-free by construction.
"""

import math
from dataclasses import dataclass, field

from ..baselines import (
    ConcurrentSigningOracle,
    PlainSignature,
    insecure_verify,
)
from ..coordinator import (
    CommitmentsFrozen,
    PtpCoordinator,
    Unavailable,
)
from ..group import Group
from ..mems import KeyPair, Roster, aggregate
from ..oracles import Oracles
from .wagner import KSumInstance, wagner_solve


@dataclass
class ForgeryResult:
    success: bool
    message: bytes | None = None
    signature: PlainSignature | None = None
    transcripts: list = field(default_factory=list)
    attempts: int = 0
    k: int = 0
    width_bits: int = 0
    list_size: int = 0
    solver_width_bits: int = 0
    failure_reason: str | None = None


def ksum_forge(
    group: Group,
    oracles: Oracles,
    honest_oracle: ConcurrentSigningOracle,
    adversary: KeyPair,
    k: int,
    s_L: int,
    rng,
    retries: int = 16,
    query_message: bytes = b"k-sum query message",
) -> ForgeryResult:
    """Run the k-sum attack; returns an attack-failed report, never raises,
    when the solver exhausts its retry budget."""
    b = oracles.config.challenge_bits
    if b is None:
        raise ValueError("k-sum forgery requires attack-mode oracles")
    if k < 2 or k & (k - 1):
        raise ValueError("k must be a power of two >= 2")
    g = group
    roster = Roster((honest_oracle.keypair.pk, adversary.pk))
    agg = aggregate(g, oracles, roster)
    a2 = agg.coefficients[1]

    # step 1: k-1 concurrent signing queries; harvest honest commitments
    sids, R1s = [], []
    for _ in range(k - 1):
        sid, R1 = honest_oracle.open_session(query_message)
        sids.append(sid)
        R1s.append(R1)
    R_star = g.element_product(R1s)

    # keep each query challenge below 2^(b - lg(k-1)) so the k-1 of them
    # sum to < 2^b without carrying out of the target space
    query_limit = 1 << (b - math.ceil(math.log2(k - 1))) if k > 2 else 1 << (b - 1)
    solver_width = b + 1
    result = ForgeryResult(
        success=False, attempts=0, k=k, width_bits=b, list_size=s_L,
        solver_width_bits=solver_width,
    )

    for attempt in range(1, retries + 1):
        result.attempts = attempt
        # steps 2-3: fill the candidate-challenge lists
        lists, tags = [], []
        for j in range(k - 1):
            values, r2s = [], []
            while len(values) < s_L:
                r2 = g.random_scalar(rng)
                R2 = g.exp(g.g, r2)
                c = oracles.h2(agg.key, g.element_mul(R1s[j], R2), query_message)
                if c >= query_limit:
                    continue
                values.append(c)
                r2s.append(r2)
            lists.append(values)
            tags.append(r2s)
        values, messages = [], []
        while len(values) < s_L:
            m_star = rng.getrandbits(128).to_bytes(16, "big")
            if m_star == query_message:
                continue
            values.append(oracles.h2(agg.key, R_star, m_star))
            messages.append(m_star)
        lists.append(values)
        tags.append(messages)

        # step 4: Wagner
        solution = wagner_solve(KSumInstance(width_bits=solver_width, lists=lists))
        if solution is None:
            continue

        # steps 5-6: answer the queries with the chosen commitments
        c_star = lists[k - 1][solution[k - 1]]
        m_star = tags[k - 1][solution[k - 1]]
        s_total = 0
        transcripts = []
        for j in range(k - 1):
            r2 = tags[j][solution[j]]
            R2 = g.exp(g.g, r2)
            s1 = honest_oracle.close_session(sids[j], [R1s[j], R2], agg)
            s_total = (s_total + s1) % g.p
            transcripts.append(
                {"query": j, "R1": g.encode_hex(R1s[j]), "R2": g.encode_hex(R2),
                 "c": lists[j][solution[j]], "s1": s1}
            )
        s_star = (s_total + c_star * a2 * adversary.x) % g.p
        forgery = PlainSignature(R=R_star, s=s_star)
        result.success = insecure_verify(g, oracles, agg, m_star, forgery)
        result.message = m_star
        result.signature = forgery
        result.transcripts = transcripts
        if not result.success:
            result.failure_reason = "assembled forgery failed verification"
        return result

    result.failure_reason = f"wagner solver found no solution in {retries} attempts"
    return result


@dataclass
class MemsAttackReport:
    """Structured record of where the k-sum playbook dies against the PTP."""

    blocked_step: int
    reason: str
    probes_before_commit: int
    probes_denied: int
    replacement_rejected: bool
    session_completed_honestly: bool
    details: dict = field(default_factory=dict)


def ksum_attempt_vs_mems(
    coordinator: PtpCoordinator,
    honest_keypairs,
    adversary: KeyPair,
    rng,
    probes: int = 100,
    message: bytes = b"mems attack attempt",
) -> MemsAttackReport:
    """Drive the attack preconditions against a live coordinator.

    Step 2 of the playbook needs challenge candidates, which depend on w --
    and w is withheld until the adversary's own commitment is frozen.  The
    report records every denied probe and the rejected late replacement.
    """
    g = coordinator.group
    orc = coordinator.oracles
    from .. import mems  # local import to avoid a cycle at module load

    roster = Roster(tuple(kp.pk for kp in honest_keypairs) + (adversary.pk,))
    n = len(roster)
    adv_slot = n - 1
    sid = coordinator.create_session(roster, message)

    denied = 0
    for _ in range(probes):
        try:
            coordinator.get_round1(sid)
        except Unavailable:
            denied += 1

    # honest signers commit; adversary keeps probing for w
    honest_sessions = [
        mems.SignerSession(g, orc, kp, roster, i, message)
        for i, kp in enumerate(honest_keypairs)
    ]
    for i, sess in enumerate(honest_sessions):
        coordinator.submit_commitment(sid, i, sess.round1(rng))
        try:
            coordinator.get_round1(sid)
        except Unavailable:
            denied += 1

    # the adversary can only proceed by committing -- which freezes its slot
    adv_session = mems.SignerSession(g, orc, adversary, roster, adv_slot, message)
    coordinator.submit_commitment(sid, adv_slot, adv_session.round1(rng))

    # late replacement (the move the k-sum attack requires) is rejected
    replacement_rejected = False
    try:
        coordinator.submit_commitment(sid, adv_slot, g.exp(g.g, g.random_scalar(rng)))
    except CommitmentsFrozen:
        replacement_rejected = True

    # behaving honestly completes the session but forges nothing
    agg = aggregate(g, orc, roster)
    bundle = coordinator.get_round1(sid)
    partials = None
    for i, sess in enumerate(honest_sessions):
        partials = coordinator.submit_partial(sid, i, sess.round2(bundle, agg))
    partials = coordinator.submit_partial(
        sid, adv_slot, adv_session.round2(bundle, agg)
    )
    sig = mems.Signature(
        U=adv_session.joint_commitment, s=mems.assemble(g, partials, n)
    )
    completed = mems.verify(g, orc, agg, message, sig)

    return MemsAttackReport(
        blocked_step=2,
        reason=(
            "step 2 blocked: challenge candidates depend on w, which is "
            "withheld until the adversary's commitment is frozen"
        ),
        probes_before_commit=probes + len(honest_keypairs),
        probes_denied=denied,
        replacement_rejected=replacement_rejected,
        session_completed_honestly=completed,
        details={"session_id": sid, "n": n},
    )


@dataclass
class TimestampGuessReport:
    strict_timestamp: bool
    attempts: int
    guessed: bool
    guessed_t: bytes | None = None


def timestamp_guess_demo(
    group: Group,
    oracles: Oracles,
    rng,
    strict_timestamp: bool,
    window_ms: int = 1000,
) -> TimestampGuessReport:
    """Enumerate timestamp candidates around the release instant.

    In strict-timestamp mode t is bare unix milliseconds, so a +/-1 s sweep
    at millisecond granularity recovers it; the default nonce-augmented t
    defeats the same sweep.  This is why the nonce exists.
    """
    from .. import mems  # local import to avoid a cycle at module load

    coordinator = PtpCoordinator(
        group, oracles, rng, strict_timestamp=strict_timestamp
    )
    kps = [mems.keygen(group, rng) for _ in range(2)]
    roster = Roster(tuple(kp.pk for kp in kps))
    sid = coordinator.create_session(roster, b"timestamp demo")
    sessions = [
        mems.SignerSession(group, oracles, kp, roster, i, b"timestamp demo")
        for i, kp in enumerate(kps)
    ]
    before_ms = coordinator.clock()
    for i, sess in enumerate(sessions):
        coordinator.submit_commitment(sid, i, sess.round1(rng))
    w = coordinator.get_round1(sid).w

    attempts = 0
    for offset in range(-window_ms, window_ms + 1):
        t_guess = ((before_ms + offset) % (1 << 64)).to_bytes(8, "big")
        attempts += 1
        if oracles.h1(t_guess) == w:
            return TimestampGuessReport(
                strict_timestamp=strict_timestamp,
                attempts=attempts,
                guessed=True,
                guessed_t=t_guess,
            )
    return TimestampGuessReport(
        strict_timestamp=strict_timestamp, attempts=attempts, guessed=False
    )
