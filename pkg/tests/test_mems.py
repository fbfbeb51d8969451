import random

import pytest

from memsig import mems
from memsig.mems import ProtocolError, Roster, SignerSession, Signature


def run_signing(group, oracles, rng, n, message=b"joint message", recompute_w=False):
    keypairs = [mems.keygen(group, rng) for _ in range(n)]
    roster = Roster(tuple(kp.pk for kp in keypairs))
    agg = mems.aggregate(group, oracles, roster)
    sessions = [
        SignerSession(group, oracles, kp, roster, i, message, recompute_w=recompute_w)
        for i, kp in enumerate(keypairs)
    ]
    commitments = tuple(sess.round1(rng) for sess in sessions)
    t = rng.getrandbits(64).to_bytes(8, "big") + rng.getrandbits(128).to_bytes(16, "big")
    w = oracles.h1(t)
    bundle = mems.Round1Bundle(
        commitments=commitments, t=t, w=w, W=group.small_pow(group.g, w)
    )
    partials = [sess.round2(bundle, agg) for sess in sessions]
    sig = Signature(
        U=sessions[0].joint_commitment, s=mems.assemble(group, partials, n)
    )
    return roster, agg, bundle, partials, sig


class TestCompleteness:
    @pytest.mark.parametrize("n", [1, 2, 3, 8, 16])
    def test_honest_runs_verify(self, toy, oracles, rng, n):
        for _ in range(20):
            _, agg, _, _, sig = run_signing(toy, oracles, rng, n)
            assert mems.verify(toy, oracles, agg, b"joint message", sig)

    def test_recompute_w_variant(self, toy, oracles, rng):
        _, agg, _, _, sig = run_signing(toy, oracles, rng, 3, recompute_w=True)
        assert mems.verify(toy, oracles, agg, b"joint message", sig)

    def test_wrong_message_rejected(self, toy, oracles, rng):
        _, agg, _, _, sig = run_signing(toy, oracles, rng, 3)
        assert not mems.verify(toy, oracles, agg, b"other message", sig)

    def test_duplicate_keys_allowed(self, toy, oracles, rng):
        kp = mems.keygen(toy, rng)
        roster = Roster((kp.pk, kp.pk))
        agg = mems.aggregate(toy, oracles, roster)
        assert agg.coefficients[0] == agg.coefficients[1]


class TestPartials:
    def test_each_partial_verifies(self, toy, oracles, rng):
        roster, agg, bundle, partials, _ = run_signing(toy, oracles, rng, 4)
        n = len(roster)
        U = toy.element_mul(
            toy.small_pow(bundle.W, n), toy.element_product(bundle.commitments)
        )
        c = oracles.h2(agg.key, U, b"joint message")
        for i, s_i in enumerate(partials):
            assert mems.verify_partial(
                toy, bundle.commitments[i], roster.keys[i],
                agg.coefficients[i], bundle.w, c, s_i,
            )

    def test_corrupted_partial_detected(self, toy, oracles, rng):
        roster, agg, bundle, partials, _ = run_signing(toy, oracles, rng, 3)
        U = toy.element_mul(
            toy.small_pow(bundle.W, 3), toy.element_product(bundle.commitments)
        )
        c = oracles.h2(agg.key, U, b"joint message")
        bad = (partials[1] + 1) % toy.p
        assert not mems.verify_partial(
            toy, bundle.commitments[1], roster.keys[1],
            agg.coefficients[1], bundle.w, c, bad,
        )

    def test_assemble_is_sum_mod_p(self, toy):
        assert mems.assemble(toy, [toy.p - 1, 2], 2) == 1
        with pytest.raises(ValueError):
            mems.assemble(toy, [1, 2], 3)


class TestExponentiationBudget:
    def test_sign_costs_one_exp(self, toy, oracles, rng):
        kp = mems.keygen(toy, rng)
        other = toy.random_element(rng)
        roster = Roster((kp.pk, other))
        agg = mems.aggregate(toy, oracles, roster)
        t = b"timestamp"
        w = oracles.h1(t)
        W = toy.small_pow(toy.g, w)
        session = SignerSession(toy, oracles, kp, roster, 0, b"m")
        toy.reset_exp_count()
        R = session.round1(rng)
        bundle = mems.Round1Bundle(commitments=(R, other), t=t, w=w, W=W)
        session.round2(bundle, agg)
        assert toy.exp_count == 1

    def test_verify_costs_two_exps(self, toy, oracles, rng):
        _, agg, _, _, sig = run_signing(toy, oracles, rng, 3)
        toy.reset_exp_count()
        mems.verify(toy, oracles, agg, b"joint message", sig)
        assert toy.exp_count == 2

    @pytest.mark.parametrize("n", [1, 3, 10])
    def test_aggregate_costs_n_exps(self, toy, oracles, rng, n):
        roster = Roster(tuple(toy.random_element(rng) for _ in range(n)))
        toy.reset_exp_count()
        mems.aggregate(toy, oracles, roster)
        assert toy.exp_count == n


class TestStateMachine:
    def _session(self, toy, oracles, rng):
        kp = mems.keygen(toy, rng)
        roster = Roster((kp.pk,))
        return SignerSession(toy, oracles, kp, roster, 0, b"m"), roster

    def test_round1_twice_forbidden(self, toy, oracles, rng):
        session, _ = self._session(toy, oracles, rng)
        session.round1(rng)
        with pytest.raises(ProtocolError):
            session.round1(rng)

    def test_round2_before_round1_forbidden(self, toy, oracles, rng):
        session, roster = self._session(toy, oracles, rng)
        agg = mems.aggregate(toy, oracles, roster)
        with pytest.raises(ProtocolError):
            session.round2(
                mems.Round1Bundle((toy.g,), b"t", 0, toy.g), agg
            )

    def test_nonce_erased_after_round2(self, toy, oracles, rng):
        session, roster = self._session(toy, oracles, rng)
        agg = mems.aggregate(toy, oracles, roster)
        R = session.round1(rng)
        t = b"t"
        w = oracles.h1(t)
        bundle = mems.Round1Bundle((R,), t, w, toy.small_pow(toy.g, w))
        session.round2(bundle, agg)
        assert session._r is None
        with pytest.raises(ProtocolError):
            session.round2(bundle, agg)

    def test_round2_rejects_replaced_own_commitment(self, toy, oracles, rng):
        session, roster = self._session(toy, oracles, rng)
        agg = mems.aggregate(toy, oracles, roster)
        session.round1(rng)
        t = b"t"
        w = oracles.h1(t)
        forged = mems.Round1Bundle(
            (toy.random_element(rng),), t, w, toy.small_pow(toy.g, w)
        )
        with pytest.raises(ProtocolError):
            session.round2(forged, agg)

    def test_round2_rejects_inconsistent_w(self, toy, oracles, rng):
        session, roster = self._session(toy, oracles, rng)
        agg = mems.aggregate(toy, oracles, roster)
        R = session.round1(rng)
        bad = mems.Round1Bundle((R,), b"t", oracles.h1(b"t") ^ 1, toy.g)
        with pytest.raises(ProtocolError):
            session.round2(bad, agg)

    def test_recompute_w_detects_forged_W(self, toy, oracles, rng):
        kp = mems.keygen(toy, rng)
        roster = Roster((kp.pk,))
        agg = mems.aggregate(toy, oracles, roster)
        session = SignerSession(toy, oracles, kp, roster, 0, b"m", recompute_w=True)
        R = session.round1(rng)
        t = b"t"
        w = oracles.h1(t)
        forged_W = toy.element_mul(toy.small_pow(toy.g, w), toy.g)
        with pytest.raises(ProtocolError):
            session.round2(mems.Round1Bundle((R,), t, w, forged_W), agg)

    def test_roster_slot_must_match_keypair(self, toy, oracles, rng):
        kp, other = mems.keygen(toy, rng), mems.keygen(toy, rng)
        roster = Roster((kp.pk, other.pk))
        with pytest.raises(ValueError):
            SignerSession(toy, oracles, kp, roster, 1, b"m")
        with pytest.raises(ValueError):
            SignerSession(toy, oracles, kp, roster, 5, b"m")


class TestCodec:
    def test_signature_round_trip(self, toy, oracles, rng):
        _, _, _, _, sig = run_signing(toy, oracles, rng, 2)
        assert Signature.decode(toy, sig.encode(toy)) == sig
        with pytest.raises(ValueError):
            Signature.decode(toy, sig.encode(toy) + b"\x00")

    def test_empty_roster_rejected(self):
        with pytest.raises(ValueError):
            Roster(())
