"""Command-line entry point.

Exit codes: 0 on success (signature valid, attack demonstrated, ...),
1 when the operation ran but the outcome is negative (invalid signature,
attack found nothing), 2 for usage errors.

File formats:
  key file       one key pair per line: "<sk hex> <pk hex>"
  roster file    one public key per line (hex)
  signature file one line of hex: enc(U) || enc(s)
"""

import argparse
import contextlib
import dataclasses
import json
import random
import sys

from . import baselines, bench, endorse, mems
from .attacks import (
    ksum_attempt_vs_mems,
    ksum_forge,
    rogue_key_attack,
    timestamp_guess_demo,
)
from .coordinator import PtpCoordinator
from .group import get_group
from .oracles import OracleConfig, Oracles


def _context(args, challenge_bits=None):
    group = get_group(args.group)
    oracles = Oracles(group, OracleConfig(challenge_bits=challenge_bits))
    rng = random.Random(args.seed)
    return group, oracles, rng


def _message_bytes(args) -> bytes:
    return bytes.fromhex(args.message) if args.hex else args.message.encode()


def _read_keys(group, path):
    pairs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            sk_hex, pk_hex = line.split()
            pairs.append(
                mems.KeyPair(
                    x=group.decode_scalar(bytes.fromhex(sk_hex)),
                    pk=group.decode_hex(pk_hex),
                )
            )
    return pairs


def _read_roster(group, path) -> mems.Roster:
    with open(path) as fh:
        keys = tuple(group.decode_hex(line.strip()) for line in fh if line.strip())
    return mems.Roster(keys)


def _out_stream(path):
    if path:
        return open(path, "w")
    return contextlib.nullcontext(sys.stdout)


def _emit_json(obj):
    if dataclasses.is_dataclass(obj):
        obj = dataclasses.asdict(obj)

    def default(v):
        if isinstance(v, bytes):
            return v.hex()
        return str(v)

    print(json.dumps(obj, indent=2, default=default))


# -- commands ----------------------------------------------------------------


def cmd_keygen(args) -> int:
    group, _, rng = _context(args)
    with _out_stream(args.out) as out:
        for _ in range(args.count):
            kp = mems.keygen(group, rng)
            out.write(
                f"{group.encode_scalar(kp.x).hex()} {group.encode_hex(kp.pk)}\n"
            )
    return 0


def cmd_agg(args) -> int:
    group, oracles, _ = _context(args)
    roster = _read_roster(group, args.roster)
    agg = mems.aggregate(group, oracles, roster)
    print(group.encode_hex(agg.key))
    return 0


def cmd_verify(args) -> int:
    group, oracles, _ = _context(args)
    roster = _read_roster(group, args.roster)
    agg = mems.aggregate(group, oracles, roster)
    with open(args.signature) as fh:
        sig = mems.Signature.decode(group, bytes.fromhex(fh.read().strip()))
    ok = mems.verify(group, oracles, agg, _message_bytes(args), sig)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def cmd_ptp_serve(args) -> int:
    from .server import PtpServer

    group, oracles, rng = _context(args)
    server = PtpServer(
        (args.host, args.port),
        group,
        oracles,
        rng,
        strict_timestamp=args.strict_timestamp,
        verify_partials=args.verify_partials,
    )
    host, port = server.server_address[:2]
    print(f"listening on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_signer(args) -> int:
    from .client import run_signer

    group, oracles, rng = _context(args)
    keys = _read_keys(group, args.key)
    keypair = keys[args.key_index]
    roster = _read_roster(group, args.roster)
    run = run_signer(
        args.host,
        args.port,
        group,
        oracles,
        keypair,
        roster,
        args.index,
        _message_bytes(args),
        args.session_id,
        rng,
        timeout=args.timeout,
    )
    print(run.signature.encode(group).hex())
    return 0 if run.valid else 1


def cmd_attack_rogue_key(args) -> int:
    group, oracles, rng = _context(args)
    honest = [mems.keygen(group, rng).pk for _ in range(args.honest)]
    demo = rogue_key_attack(group, oracles, honest, rng)
    _emit_json(
        {
            "attack": "rogue-key",
            "rogue_pk": group.encode_hex(demo.rogue_pk),
            "forgery_valid_plain_sum": demo.forgery_valid,
            "coefficient_aggregation_resists": demo.mems_key_differs,
        }
    )
    return 0 if demo.forgery_valid and demo.mems_key_differs else 1


def cmd_attack_ksum(args) -> int:
    group, oracles, rng = _context(args, challenge_bits=args.bits)
    honest = mems.keygen(group, rng)
    adversary = mems.keygen(group, rng)
    roster = mems.Roster((honest.pk, adversary.pk))
    oracle = baselines.ConcurrentSigningOracle(group, oracles, honest, roster, 0, rng)
    result = ksum_forge(
        group, oracles, oracle, adversary, args.k, args.list_size, rng
    )
    fresh = result.message is not None and result.message not in oracle.signed_messages
    _emit_json(
        {
            "attack": "ksum",
            "success": result.success,
            "attempts": result.attempts,
            "k": result.k,
            "challenge_bits": result.width_bits,
            "list_size": result.list_size,
            "forged_message_fresh": fresh,
            "forged_message": result.message.hex() if result.message else None,
            "failure_reason": result.failure_reason,
        }
    )
    return 0 if result.success and fresh else 1


def cmd_attack_ksum_vs_mems(args) -> int:
    group, oracles, rng = _context(args)
    coordinator = PtpCoordinator(group, oracles, rng)
    honest = [mems.keygen(group, rng) for _ in range(args.honest)]
    adversary = mems.keygen(group, rng)
    report = ksum_attempt_vs_mems(coordinator, honest, adversary, rng)
    _emit_json(report)
    blocked = (
        report.probes_denied == report.probes_before_commit
        and report.replacement_rejected
    )
    return 0 if blocked else 1


def cmd_attack_timestamp(args) -> int:
    group, oracles, rng = _context(args)
    report = timestamp_guess_demo(
        group, oracles, rng, strict_timestamp=args.strict_timestamp
    )
    _emit_json(report)
    return 0 if report.guessed else 1


def cmd_bench(args) -> int:
    group, oracles, rng = _context(args)
    sizes = [int(v) for v in args.sizes.split(",")]
    records = bench.run_suite(group, oracles, sizes, args.reps, rng)
    with _out_stream(args.out) as out:
        bench.write_csv(records, out)
    return 0


def cmd_endorse_sim(args) -> int:
    group, oracles, rng = _context(args)
    sizes = [int(v) for v in args.sizes.split(",")]
    reports = endorse.run_trend(group, oracles, sizes, args.tx_count, rng)
    with _out_stream(args.out) as out:
        endorse.write_csv(reports, out)
    return 0 if all(r.all_valid for r in reports) else 1


DISPATCH = {
    "keygen": cmd_keygen,
    "agg": cmd_agg,
    "verify": cmd_verify,
    "ptp.serve": cmd_ptp_serve,
    "signer": cmd_signer,
    "attack.rogue-key": cmd_attack_rogue_key,
    "attack.ksum": cmd_attack_ksum,
    "attack.ksum-vs-mems": cmd_attack_ksum_vs_mems,
    "attack.timestamp": cmd_attack_timestamp,
    "bench": cmd_bench,
    "endorse-sim": cmd_endorse_sim,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", choices=("toy", "production"), default="toy")
    common.add_argument("--seed", type=int, default=None)

    message_opts = argparse.ArgumentParser(add_help=False)
    message_opts.add_argument("--message", required=True)
    message_opts.add_argument(
        "--hex", action="store_true", help="interpret --message as hex bytes"
    )

    parser = argparse.ArgumentParser(prog="memsig")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common])
    p.add_argument("-n", "--count", type=int, default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("agg", parents=[common])
    p.add_argument("--roster", required=True)

    p = sub.add_parser("verify", parents=[common, message_opts])
    p.add_argument("--roster", required=True)
    p.add_argument("--signature", required=True)

    ptp = sub.add_parser("ptp")
    ptp_sub = ptp.add_subparsers(dest="ptp_command", required=True)
    p = ptp_sub.add_parser("serve", parents=[common])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--strict-timestamp", action="store_true")
    p.add_argument("--verify-partials", action="store_true")

    p = sub.add_parser("signer", parents=[common, message_opts])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--key-index", type=int, default=0, help="line in the key file")
    p.add_argument("--roster", required=True)
    p.add_argument("--index", type=int, required=True, help="roster slot")
    p.add_argument("--session-id", required=True)
    p.add_argument("--timeout", type=float, default=30.0)

    attack = sub.add_parser("attack")
    attack_sub = attack.add_subparsers(dest="attack_command", required=True)
    p = attack_sub.add_parser("rogue-key", parents=[common])
    p.add_argument("--honest", type=int, default=3)
    p = attack_sub.add_parser("ksum", parents=[common])
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--bits", type=int, default=16)
    p.add_argument("--list-size", type=int, default=256)
    p = attack_sub.add_parser("ksum-vs-mems", parents=[common])
    p.add_argument("--honest", type=int, default=2)
    p = attack_sub.add_parser("timestamp", parents=[common])
    p.add_argument("--strict-timestamp", action="store_true")

    p = sub.add_parser("bench", parents=[common])
    p.add_argument("--sizes", default="3,10")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--out", default=None)

    p = sub.add_parser("endorse-sim", parents=[common])
    p.add_argument("--sizes", default="2,8,16")
    p.add_argument("--tx-count", type=int, default=5)
    p.add_argument("--out", default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    key = args.command
    if key == "ptp":
        key = f"ptp.{args.ptp_command}"
    elif key == "attack":
        key = f"attack.{args.attack_command}"
    return DISPATCH[key](args)


if __name__ == "__main__":
    sys.exit(main())
