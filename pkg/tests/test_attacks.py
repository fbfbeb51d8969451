import random

import numpy as np
import pytest

from memsig import mems
from memsig.attacks import (
    KSumInstance,
    brute_force_exists,
    ksum_attempt_vs_mems,
    ksum_forge,
    plain_sum_aggregate,
    rogue_key_attack,
    timestamp_guess_demo,
    wagner_solve,
)
from memsig.attacks import wagner
from memsig.baselines import ConcurrentSigningOracle, insecure_verify, schnorr_verify
from memsig.coordinator import PtpCoordinator
from memsig.mems import Roster
from memsig.oracles import OracleConfig, Oracles


def check_solution(lists, width, solution):
    k = len(lists)
    total = sum(lists[j][solution[j]] for j in range(k - 1)) - lists[k - 1][solution[k - 1]]
    assert total % (1 << width) == 0


class TestWagner:
    def test_trivial_pair(self):
        assert wagner_solve(KSumInstance(width_bits=8, lists=[[5], [5]])) == (0, 0)
        assert wagner_solve(KSumInstance(width_bits=8, lists=[[5], [6]])) is None

    def test_planted_solution_recovered(self):
        rng = random.Random(9)
        lists = [[rng.getrandbits(20) for _ in range(64)] for _ in range(8)]
        planted = sum(lists[j][0] for j in range(7)) % (1 << 20)
        lists[7][63] = planted
        solution = wagner_solve(KSumInstance(width_bits=20, lists=lists))
        assert solution is not None
        check_solution(lists, 20, solution)

    def test_agreement_with_brute_force(self):
        rng = random.Random(42)
        for _ in range(50):
            lists = [[rng.getrandbits(16) for _ in range(32)] for _ in range(4)]
            instance = KSumInstance(width_bits=16, lists=lists)
            fast = wagner_solve(instance)
            exhaustive = brute_force_exists(instance)
            assert (fast is None) == (exhaustive is None)
            if fast is not None:
                check_solution(lists, 16, fast)
                check_solution(lists, 16, exhaustive)

    def test_deterministic(self):
        rng = random.Random(5)
        lists = [[rng.getrandbits(16) for _ in range(64)] for _ in range(4)]
        instance = KSumInstance(width_bits=16, lists=lists)
        assert wagner_solve(instance) == wagner_solve(instance)

    def test_skewed_magnitudes_still_solvable(self):
        # small positive summands vs full-width targets: intermediate
        # partial sums can never wrap to zero, only targeted joins work
        rng = random.Random(3)
        hits = 0
        for _ in range(5):
            lists = [[rng.getrandbits(13) for _ in range(256)] for _ in range(7)]
            lists.append([rng.getrandbits(16) for _ in range(256)])
            solution = wagner_solve(KSumInstance(width_bits=17, lists=lists))
            if solution is not None:
                check_solution(lists, 17, solution)
                hits += 1
        assert hits >= 4

    def test_join_backends_agree(self):
        if wagner._PURE_PYTHON:
            pytest.skip("kernel backend unavailable")
        rng = random.Random(8)
        a = np.array([rng.getrandbits(20) for _ in range(200)], dtype=np.int64)
        b = np.array([rng.getrandbits(20) for _ in range(200)], dtype=np.int64)
        for match_bits, tau in [(0, 0), (4, 7), (8, 129)]:
            modulus = 1 << match_bits
            mask = np.uint64(modulus - 1)
            a_res = (a % modulus).astype(np.uint64)
            b_res = (b % modulus).astype(np.uint64)
            order = np.argsort(b_res, kind="stable").astype(np.int64)
            b_sorted = b_res[order]
            cap = 4096
            ka, kb = np.empty(cap, np.int64), np.empty(cap, np.int64)
            na, nb = np.empty(cap, np.int64), np.empty(cap, np.int64)
            cnt_k = wagner._join_kernel(
                a_res, b_sorted, order, np.uint64(tau % modulus), mask, cap, ka, kb
            )
            cnt_n = wagner._join_numpy(
                a_res, b_sorted, order, tau % modulus, int(mask), cap, na, nb
            )
            assert cnt_k == cnt_n
            assert (ka[:cnt_k] == na[:cnt_n]).all()
            assert (kb[:cnt_k] == nb[:cnt_n]).all()

    def test_instance_validation(self):
        with pytest.raises(ValueError):
            KSumInstance(width_bits=8, lists=[[1], [2], [3]])  # k not a power of 2
        with pytest.raises(ValueError):
            KSumInstance(width_bits=0, lists=[[1], [2]])
        with pytest.raises(ValueError):
            KSumInstance(width_bits=8, lists=[[1], [256]])  # out of range
        with pytest.raises(ValueError):
            KSumInstance(width_bits=8, lists=[[1], []])


class TestKsumForgery:
    def setup_target(self, toy, seed, bits=16):
        oracles = Oracles(toy, OracleConfig(challenge_bits=bits))
        rng = random.Random(seed)
        honest = mems.keygen(toy, rng)
        adversary = mems.keygen(toy, rng)
        roster = Roster((honest.pk, adversary.pk))
        oracle = ConcurrentSigningOracle(toy, oracles, honest, roster, 0, rng)
        return oracles, oracle, adversary, roster, rng

    def test_forgery_verifies_on_fresh_message(self, toy):
        oracles, oracle, adversary, roster, rng = self.setup_target(toy, 1234)
        result = ksum_forge(toy, oracles, oracle, adversary, k=8, s_L=256, rng=rng)
        assert result.success
        assert result.message not in oracle.signed_messages
        agg = mems.aggregate(toy, oracles, roster)
        assert insecure_verify(toy, oracles, agg, result.message, result.signature)
        assert len(result.transcripts) == 7

    def test_requires_attack_mode(self, toy, oracles, rng):
        honest = mems.keygen(toy, rng)
        adversary = mems.keygen(toy, rng)
        roster = Roster((honest.pk, adversary.pk))
        oracle = ConcurrentSigningOracle(toy, oracles, honest, roster, 0, rng)
        with pytest.raises(ValueError):
            ksum_forge(toy, oracles, oracle, adversary, k=8, s_L=16, rng=rng)

    def test_failure_is_report_not_exception(self, toy):
        # absurdly small lists: solver exhausts its budget and reports
        oracles, oracle, adversary, _, rng = self.setup_target(toy, 5)
        result = ksum_forge(
            toy, oracles, oracle, adversary, k=8, s_L=2, rng=rng, retries=2
        )
        assert not result.success
        assert result.attempts == 2
        assert "no solution" in result.failure_reason


class TestKsumVsMems:
    def test_structurally_blocked(self, toy, oracles, rng):
        coord = PtpCoordinator(toy, oracles, random.Random(1))
        honest = [mems.keygen(toy, rng) for _ in range(2)]
        adversary = mems.keygen(toy, rng)
        report = ksum_attempt_vs_mems(coord, honest, adversary, rng, probes=50)
        assert report.blocked_step == 2
        assert report.probes_denied == report.probes_before_commit
        assert report.replacement_rejected
        assert report.session_completed_honestly


class TestRogueKey:
    def test_plain_sum_forgery_and_mems_resistance(self, toy, oracles, rng):
        honest = [mems.keygen(toy, rng).pk for _ in range(3)]
        demo = rogue_key_attack(toy, oracles, honest, rng)
        assert demo.forgery_valid
        assert demo.mems_key_differs
        # the forged aggregate collapses to a key the adversary controls
        assert demo.plain_sum_key == toy.small_pow(toy.g, demo.rogue_sk)
        assert schnorr_verify(
            toy, oracles, demo.plain_sum_key, demo.message, demo.forgery
        )

    def test_plain_sum_aggregate(self, toy, rng):
        a, b = toy.random_element(rng), toy.random_element(rng)
        assert plain_sum_aggregate(toy, [a, b]) == toy.element_mul(a, b)

    def test_needs_an_honest_key(self, toy, oracles, rng):
        with pytest.raises(ValueError):
            rogue_key_attack(toy, oracles, [], rng)


class TestTimestampGuessing:
    def test_strict_mode_guessable(self, toy, oracles):
        report = timestamp_guess_demo(
            toy, oracles, random.Random(2), strict_timestamp=True
        )
        assert report.guessed
        assert report.attempts <= 2001

    def test_nonce_mode_resists(self, toy, oracles):
        report = timestamp_guess_demo(
            toy, oracles, random.Random(2), strict_timestamp=False
        )
        assert not report.guessed
        assert report.attempts == 2001
