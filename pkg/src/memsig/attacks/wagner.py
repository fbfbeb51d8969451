"""Generalized-birthday (k-sum) solver via Wagner's merge tree.

Given k lists of values below 2^b, find one index per list such that

    x_1 + ... + x_{k-1} - x_k  ==  0   (mod 2^b)

The last list is negated internally, after which the problem is a plain
k-way sum to zero.  The tree has log2(k) levels of sorted joins; each
intermediate level constrains a further slice of low bits and the root
join requires an exact match on everything that remains.

Intermediate joins are *targeted*: instead of forcing every partial sum to
zero modulo the slice (unsatisfiable when the inputs are, say, small
positive values whose sums cannot wrap), each sibling pair aims for the
residue nearest the center of its actual sum distribution, and the last
pair per level takes the complement so the level's targets sum to zero.
Partial sums are carried as exact integers, so the root match certifies
the relation directly.

The per-level bit slice adapts to the join sizes: it is the smallest slice
that keeps the expected surviving-pair count under ``cap``.  On small
instances that slice is zero, every pair survives, and the solver becomes
an exhaustive meet-in-the-middle -- i.e. it is *complete* whenever the
caps never bind, which is what the brute-force cross-validation relies on.

The hot join loop is a numba kernel with a numpy fallback
(MEMSIG_PURE_PYTHON selects the fallback); both paths emit pairs in the
same deterministic order.
"""

import os
from dataclasses import dataclass

import numpy as np

_PURE_PYTHON = bool(os.environ.get("MEMSIG_PURE_PYTHON"))

if not _PURE_PYTHON:
    try:
        from numba import njit, uint64
    except ImportError:  # pragma: no cover
        _PURE_PYTHON = True

DEFAULT_CAP = 1 << 13


@dataclass
class KSumInstance:
    """k equal-role lists of b-bit values, plus opaque per-entry tags."""

    width_bits: int
    lists: list  # k arrays (uint64-coercible) of values < 2^width_bits
    tags: list | None = None  # optional provenance, parallel to lists

    def __post_init__(self):
        k = len(self.lists)
        if k < 2 or k & (k - 1):
            raise ValueError("k must be a power of two >= 2")
        if not 1 <= self.width_bits <= 58:
            raise ValueError("width_bits must be in [1, 58]")
        if k << self.width_bits >= 1 << 62:
            raise ValueError("k * 2^width_bits must stay below 2^62")
        bound = 1 << self.width_bits
        self.lists = [np.asarray(lst, dtype=np.uint64) for lst in self.lists]
        for lst in self.lists:
            if lst.ndim != 1 or lst.size == 0:
                raise ValueError("each list must be a non-empty 1-d array")
            if int(lst.max()) >= bound:
                raise ValueError("list value exceeds the b-bit space")

    @property
    def k(self) -> int:
        return len(self.lists)


if not _PURE_PYTHON:

    @njit(cache=True)
    def _join_kernel(a_res, b_res_sorted, b_order, tau, mask, cap, out_ia, out_ib):
        cnt = 0
        nb = b_res_sorted.shape[0]
        for i in range(a_res.shape[0]):
            target = (tau + mask + uint64(1) - a_res[i]) & mask
            lo = np.searchsorted(b_res_sorted, target)
            j = lo
            while j < nb and b_res_sorted[j] == target:
                if cnt >= cap:
                    return cnt
                out_ia[cnt] = i
                out_ib[cnt] = b_order[j]
                cnt += 1
                j += 1
        return cnt


def _join_numpy(a_res, b_res_sorted, b_order, tau, mask, cap, out_ia, out_ib):
    targets = (tau + mask + 1 - a_res) & np.uint64(mask)
    lo = np.searchsorted(b_res_sorted, targets, side="left")
    hi = np.searchsorted(b_res_sorted, targets, side="right")
    cnt = 0
    for i in range(a_res.shape[0]):
        for j in range(lo[i], hi[i]):
            if cnt >= cap:
                return cnt
            out_ia[cnt] = i
            out_ib[cnt] = b_order[j]
            cnt += 1
    return cnt


def _join(a_sums, b_sums, match_bits, tau, cap):
    """Pairs (ia, ib) with a + b == tau (mod 2^match_bits); exact int sums."""
    modulus = 1 << match_bits
    mask = np.uint64(modulus - 1)
    a_res = (a_sums % modulus).astype(np.uint64)
    b_res = (b_sums % modulus).astype(np.uint64)
    b_order = np.argsort(b_res, kind="stable").astype(np.int64)
    b_res_sorted = b_res[b_order]
    out_ia = np.empty(cap, dtype=np.int64)
    out_ib = np.empty(cap, dtype=np.int64)
    tau_u = np.uint64(tau % modulus)
    if _PURE_PYTHON:
        cnt = _join_numpy(a_res, b_res_sorted, b_order, int(tau_u), int(mask), cap, out_ia, out_ib)
    else:
        cnt = _join_kernel(a_res, b_res_sorted, b_order, tau_u, mask, cap, out_ia, out_ib)
    ia, ib = out_ia[:cnt], out_ib[:cnt]
    return ia, ib, a_sums[ia] + b_sums[ib]


def wagner_solve(instance: KSumInstance, cap: int = DEFAULT_CAP):
    """One index per list solving the signed sum, or None if the tree empties.

    The returned tuple always satisfies the relation (asserted before
    returning).  Deterministic for fixed inputs.
    """
    W = instance.width_bits
    k = instance.k
    # exact signed partial sums; negate the last list so the relation
    # becomes a plain sum to zero
    sums = [lst.astype(np.int64) for lst in instance.lists]
    sums[-1] = -sums[-1]
    prov = [np.arange(lst.shape[0], dtype=np.int64)[:, None] for lst in sums]
    # node targets: values of node i are == targets[i] (mod 2^zeroed)
    targets = [0] * k
    zeroed = 0

    levels = k.bit_length() - 1
    for level in range(1, levels + 1):
        is_root = level == levels
        pairs = range(0, len(sums), 2)
        if is_root:
            match_bits = W
            new_targets = [0]
        else:
            # smallest extra slice keeping every expected join size <= cap
            expected = max(sums[p].shape[0] * sums[p + 1].shape[0] for p in pairs)
            extra = max(0, (expected + cap - 1) // cap - 1).bit_length()
            match_bits = min(W, zeroed + extra)
            modulus = 1 << match_bits
            step = 1 << zeroed
            # aim each pair at the residue nearest its sum-distribution
            # center, staying on the coset fixed by the child targets;
            # the last pair takes the complement so the level sums to zero
            new_targets = []
            for p in pairs:
                base = targets[p] + targets[p + 1]
                mean = float(sums[p].mean()) + float(sums[p + 1].mean())
                tau = base + int(round((mean - base) / step)) * step
                new_targets.append(tau % modulus)
            if len(new_targets) > 1:
                new_targets[-1] = -sum(new_targets[:-1]) % modulus
        next_sums, next_prov = [], []
        for idx, p in enumerate(pairs):
            ia, ib, joined = _join(
                sums[p], sums[p + 1], match_bits, new_targets[idx], cap
            )
            if joined.shape[0] == 0:
                return None
            next_sums.append(joined)
            next_prov.append(np.hstack([prov[p][ia], prov[p + 1][ib]]))
        sums, prov, targets = next_sums, next_prov, new_targets
        zeroed = match_bits if not is_root else zeroed

    solution = tuple(int(v) for v in prov[0][0])
    total = sum(int(instance.lists[j][solution[j]]) for j in range(k - 1))
    total -= int(instance.lists[k - 1][solution[k - 1]])
    assert total % (1 << W) == 0, "wagner merge produced a non-solution"
    return solution


def brute_force_exists(instance: KSumInstance):
    """Exhaustive oracle: any solution over the full cross product, or None.

    Enumerates every combination by splitting the lists into two halves and
    meeting in the middle; complete by construction and independent of the
    Wagner merge tree.
    """
    W = instance.width_bits
    k = instance.k
    wmask = np.uint64((1 << W) - 1)
    values = [lst.copy() for lst in instance.lists]
    values[-1] = (wmask + np.uint64(1) - values[-1]) & wmask

    def cross(sub):
        sums = sub[0]
        idx = np.arange(sub[0].shape[0], dtype=np.int64)[:, None]
        for lst in sub[1:]:
            sums = ((sums[:, None] + lst[None, :]) & wmask).ravel()
            left = np.repeat(idx, lst.shape[0], axis=0)
            right = np.tile(
                np.arange(lst.shape[0], dtype=np.int64), idx.shape[0]
            )[:, None]
            idx = np.hstack([left, right])
        return sums, idx

    half = k // 2
    sums_a, idx_a = cross(values[:half])
    sums_b, idx_b = cross(values[half:])
    order = np.argsort(sums_b, kind="stable")
    sorted_b = sums_b[order]
    targets = (wmask + np.uint64(1) - sums_a) & wmask
    lo = np.searchsorted(sorted_b, targets, side="left")
    hi = np.searchsorted(sorted_b, targets, side="right")
    hits = np.nonzero(hi > lo)[0]
    if hits.shape[0] == 0:
        return None
    i = int(hits[0])
    j = int(order[lo[i]])
    return tuple(int(v) for v in idx_a[i]) + tuple(int(v) for v in idx_b[j])
