import io

import pytest

from memsig.endorse import (
    CSV_FIELDS,
    run_endorsement,
    run_trend,
    signature_bytes,
    signature_proportion,
    transaction_bytes,
    write_csv,
)


class TestSizes:
    def test_mems_endorsement_size_constant_in_n(self, toy):
        sizes = {transaction_bytes(toy, "mems", n) for n in (1, 2, 8, 64)}
        assert len(sizes) == 1

    def test_individual_endorsement_size_linear_in_n(self, toy):
        sig = signature_bytes(toy)
        base = transaction_bytes(toy, "individual", 1)
        for n in (2, 8, 64):
            assert transaction_bytes(toy, "individual", n) == base + (n - 1) * sig

    def test_modes_agree_at_single_endorser(self, toy):
        assert transaction_bytes(toy, "mems", 1) == transaction_bytes(toy, "individual", 1)

    def test_proportion_trends(self, toy):
        ns = [1, 2, 4, 8, 16, 32, 64]
        mems_props = [signature_proportion(toy, "mems", n) for n in ns]
        indiv_props = [signature_proportion(toy, "individual", n) for n in ns]
        assert all(b <= a for a, b in zip(mems_props, mems_props[1:]))
        assert all(b >= a for a, b in zip(indiv_props, indiv_props[1:]))
        assert all(0 < v < 1 for v in mems_props + indiv_props)


class TestSimulation:
    @pytest.mark.parametrize("mode", ["mems", "individual"])
    def test_endorsements_verify(self, toy, oracles, rng, mode):
        report = run_endorsement(toy, oracles, mode, 4, 3, rng)
        assert report.all_valid
        assert report.tx_count == 3
        assert report.tx_bytes == transaction_bytes(toy, mode, 4)

    def test_mems_verification_faster_at_scale(self, toy, oracles, rng):
        mems_rep = run_endorsement(toy, oracles, "mems", 16, 4, rng)
        indiv_rep = run_endorsement(toy, oracles, "individual", 16, 4, rng)
        assert mems_rep.block_verify_ns < indiv_rep.block_verify_ns

    def test_unknown_mode_rejected(self, toy, oracles, rng):
        with pytest.raises(ValueError):
            run_endorsement(toy, oracles, "threshold", 2, 1, rng)

    def test_csv_output(self, toy, oracles, rng):
        reports = run_trend(toy, oracles, [2, 4], 1, rng)
        buf = io.StringIO()
        write_csv(reports, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == ",".join(CSV_FIELDS)
        assert len(lines) == 5
