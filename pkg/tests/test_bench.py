import io

import pytest

from memsig.bench import (
    CSV_FIELDS,
    bench_aggregate,
    bench_messages,
    bench_sign,
    bench_verify,
    run_suite,
    write_csv,
)


class TestRecords:
    @pytest.mark.parametrize(
        "scheme,expected", [("mems", 1), ("musig2", 7), ("insecure", 1)]
    )
    def test_sign_exp_counts(self, toy, oracles, rng, scheme, expected):
        rec = bench_sign(toy, oracles, scheme, 4, 3, rng)
        assert rec.exp_count == expected
        assert rec.op == "sign" and rec.reps == 3
        assert rec.mean_ns > 0 and rec.median_ns > 0

    @pytest.mark.parametrize("scheme", ["mems", "musig2", "insecure"])
    def test_verify_exp_counts(self, toy, oracles, rng, scheme):
        assert bench_verify(toy, oracles, scheme, 4, 3, rng).exp_count == 2

    def test_aggregate_exp_counts(self, toy, oracles, rng):
        assert bench_aggregate(toy, oracles, "mems", 9, 2, rng).exp_count == 9

    def test_message_records(self):
        assert bench_messages("mems", 10).msg_count == 50
        assert bench_messages("musig2", 10).msg_count == 360
        assert bench_messages("mems", 1).msg_count == 5
        assert bench_messages("musig2", 1).msg_count == 0  # undefined below n=2

    def test_unknown_scheme_rejected(self, toy, oracles, rng):
        with pytest.raises(ValueError):
            bench_sign(toy, oracles, "rsa", 4, 1, rng)


class TestCsv:
    def test_header_and_shape(self, toy, oracles, rng):
        records = run_suite(toy, oracles, [2], 2, rng, schemes=("mems",))
        buf = io.StringIO()
        write_csv(records, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == ",".join(CSV_FIELDS)
        assert len(lines) == 1 + len(records)
        assert all(len(line.split(",")) == len(CSV_FIELDS) for line in lines)
