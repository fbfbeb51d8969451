"""Attack demonstrations: rogue-key, k-sum forgery, and the structural
failure of both against the coordinated scheme."""

from .ksum import (
    ForgeryResult,
    MemsAttackReport,
    TimestampGuessReport,
    ksum_attempt_vs_mems,
    ksum_forge,
    timestamp_guess_demo,
)
from .rogue_key import RogueKeyDemo, plain_sum_aggregate, rogue_key_attack
from .wagner import KSumInstance, brute_force_exists, wagner_solve

__all__ = [
    "ForgeryResult",
    "KSumInstance",
    "MemsAttackReport",
    "RogueKeyDemo",
    "TimestampGuessReport",
    "brute_force_exists",
    "ksum_attempt_vs_mems",
    "ksum_forge",
    "plain_sum_aggregate",
    "rogue_key_attack",
    "timestamp_guess_demo",
    "wagner_solve",
]
