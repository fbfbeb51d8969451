import json

import pytest

from memsig.cli import DISPATCH, build_parser, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestDispatch:
    def test_every_workflow_has_exactly_one_subcommand(self):
        assert set(DISPATCH) == {
            "keygen",
            "agg",
            "verify",
            "ptp.serve",
            "signer",
            "attack.rogue-key",
            "attack.ksum",
            "attack.ksum-vs-mems",
            "attack.timestamp",
            "bench",
            "endorse-sim",
        }

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["no-such-command"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([])
        assert exc.value.code == 2


class TestKeygen:
    def test_seeded_determinism(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run_cli(capsys, "keygen", "--seed", "7", "-n", "4", "--out", str(a))
        run_cli(capsys, "keygen", "--seed", "7", "-n", "4", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 4

    def test_writes_sk_pk_pairs(self, capsys):
        code, out = run_cli(capsys, "keygen", "--seed", "1")
        assert code == 0
        sk_hex, pk_hex = out.split()
        bytes.fromhex(sk_hex), bytes.fromhex(pk_hex)


@pytest.fixture
def keyfiles(tmp_path, capsys):
    keys = tmp_path / "keys.txt"
    main(["keygen", "--seed", "13", "-n", "3", "--out", str(keys)])
    roster = tmp_path / "roster.txt"
    roster.write_text(
        "".join(line.split()[1] + "\n" for line in keys.read_text().splitlines())
    )
    capsys.readouterr()
    return keys, roster


class TestSignAndVerify:
    def test_end_to_end_over_local_server(self, tmp_path, capsys, keyfiles, toy, oracles):
        import random
        import threading

        from memsig.server import PtpServer

        keys, roster = keyfiles
        server = PtpServer(("127.0.0.1", 0), toy, oracles, random.Random(4))
        port = server.server_address[1]
        server.serve_in_thread()
        try:
            codes, outs = [None] * 3, [None] * 3

            def drive(i):
                codes[i] = main(
                    [
                        "signer", "--port", str(port), "--key", str(keys),
                        "--key-index", str(i), "--roster", str(roster),
                        "--index", str(i), "--session-id", "cli-e2e",
                        "--message", "cli message", "--seed", str(70 + i),
                    ]
                )

            threads = [threading.Thread(target=drive, args=(i,)) for i in range(3)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert codes == [0, 0, 0]
            sig_hex = capsys.readouterr().out.split()[0]
        finally:
            server.shutdown()
            server.server_close()

        sig_file = tmp_path / "sig.txt"
        sig_file.write_text(sig_hex + "\n")
        code, out = run_cli(
            capsys, "verify", "--roster", str(roster),
            "--signature", str(sig_file), "--message", "cli message",
        )
        assert code == 0 and "valid" in out
        code, _ = run_cli(
            capsys, "verify", "--roster", str(roster),
            "--signature", str(sig_file), "--message", "tampered",
        )
        assert code == 1

    def test_agg_prints_key(self, capsys, keyfiles):
        _, roster = keyfiles
        code, out = run_cli(capsys, "agg", "--roster", str(roster))
        assert code == 0
        bytes.fromhex(out.strip())


class TestAttackCommands:
    def test_rogue_key(self, capsys):
        code, out = run_cli(capsys, "attack", "rogue-key", "--seed", "3")
        assert code == 0
        report = json.loads(out)
        assert report["forgery_valid_plain_sum"]
        assert report["coefficient_aggregation_resists"]

    def test_ksum(self, capsys):
        code, out = run_cli(capsys, "attack", "ksum", "--seed", "3")
        assert code == 0
        report = json.loads(out)
        assert report["success"] and report["forged_message_fresh"]

    def test_ksum_vs_mems(self, capsys):
        code, out = run_cli(capsys, "attack", "ksum-vs-mems", "--seed", "3")
        assert code == 0
        report = json.loads(out)
        assert report["replacement_rejected"]

    def test_timestamp_modes(self, capsys):
        code, out = run_cli(capsys, "attack", "timestamp", "--strict-timestamp", "--seed", "3")
        assert code == 0 and json.loads(out)["guessed"]
        code, out = run_cli(capsys, "attack", "timestamp", "--seed", "3")
        assert code == 1 and not json.loads(out)["guessed"]


class TestBatchCommands:
    def test_bench_csv(self, tmp_path, capsys):
        out_file = tmp_path / "bench.csv"
        code, _ = run_cli(
            capsys, "bench", "--sizes", "2,3", "--reps", "2",
            "--seed", "1", "--out", str(out_file),
        )
        assert code == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0].startswith("scheme,n,op")
        assert len(lines) > 1

    def test_endorse_sim_csv(self, capsys):
        code, out = run_cli(
            capsys, "endorse-sim", "--sizes", "2,4", "--tx-count", "1", "--seed", "1"
        )
        assert code == 0
        assert out.splitlines()[0].startswith("mode,n,tx_bytes")
