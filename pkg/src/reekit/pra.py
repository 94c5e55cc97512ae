"""Nielsen moves on generating tuples, the extended move graph, and walks.

The census enumerates every generating n-tuple of a small group and runs a
breadth-first sweep of the move graph, entirely in numpy: tuples are encoded
as mixed-radix ints, the visited set is a flat bit array, and each of the
4n(n-1) multiplication moves, n(n-1)/2 swaps and n inversions is one batched
table gather per frontier.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .groups import GroupCtx

ADDR_CAP = 2**34


class CensusBoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class NielsenMove:
    kind: str          # "R", "L", "P", "I"
    i: int
    j: int = -1        # unused for I
    sign: int = 1      # only meaningful for R and L

    def __post_init__(self):
        if self.kind not in "RLPI":
            raise ValueError(f"unknown move kind {self.kind!r}")
        if self.kind in "RLP" and self.i == self.j:
            raise ValueError("moves R, L, P need two distinct positions")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +-1")


def all_moves(n):
    """Every move on n-tuples, in a fixed order: R, L, P, then I."""
    if n < 2:
        raise ValueError("tuples must have length >= 2")
    moves = []
    for kind in ("R", "L"):
        for i in range(n):
            for j in range(n):
                if i != j:
                    moves.append(NielsenMove(kind, i, j, 1))
                    moves.append(NielsenMove(kind, i, j, -1))
    for i in range(n):
        for j in range(i + 1, n):
            moves.append(NielsenMove("P", i, j))
    for i in range(n):
        moves.append(NielsenMove("I", i))
    return moves


def rl_moves(n):
    return [m for m in all_moves(n) if m.kind in "RL"]


class IndexOps:
    """Group operations on element indices of a GroupCtx."""

    def __init__(self, ctx: GroupCtx):
        self._mt = ctx.mult_table()
        self._inv = ctx.inverse_table()

    def mul(self, a, b):
        return int(self._mt[a, b])

    def inv(self, a):
        return int(self._inv[a])


class ElementOps:
    """Group operations on objects supporting * and .inverse()."""

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()


def apply_move(t, mv: NielsenMove, ops):
    n = len(t)
    if not (0 <= mv.i < n and (mv.kind == "I" or 0 <= mv.j < n)):
        raise ValueError(f"move {mv} out of range for an {n}-tuple")
    out = list(t)
    if mv.kind == "R":
        gj = t[mv.j] if mv.sign == 1 else ops.inv(t[mv.j])
        out[mv.i] = ops.mul(t[mv.i], gj)
    elif mv.kind == "L":
        gj = t[mv.j] if mv.sign == 1 else ops.inv(t[mv.j])
        out[mv.i] = ops.mul(gj, t[mv.i])
    elif mv.kind == "P":
        out[mv.i], out[mv.j] = t[mv.j], t[mv.i]
    else:
        out[mv.i] = ops.inv(t[mv.i])
    return tuple(out)


def neighbors(t, ops):
    """Images of the tuple under every move, deduplicated, first-seen order."""
    seen = set()
    out = []
    for mv in all_moves(len(t)):
        u = apply_move(t, mv, ops)
        if u not in seen:
            seen.add(u)
            out.append(u)
    return out


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

class _Bitset:
    def __init__(self, nbits):
        self.bits = np.zeros((nbits + 7) // 8, dtype=np.uint8)

    def test(self, idx):
        return (self.bits[idx >> 3] >> (idx & 7).astype(np.uint8)) & 1

    def set(self, idx):
        np.bitwise_or.at(self.bits, idx >> 3,
                         np.uint8(1) << (idx & 7).astype(np.uint8))


@dataclass
class CensusReport:
    group: str
    n: int
    group_order: int
    generating_tuples: int
    component_sizes: list
    component_has_redundant: list
    every_component_has_redundant: bool = dfield(init=False)

    def __post_init__(self):
        self.every_component_has_redundant = all(self.component_has_redundant)

    def to_json_dict(self):
        return {
            "group": self.group,
            "n": self.n,
            "group_order": self.group_order,
            "generating_tuples": self.generating_tuples,
            "components": list(self.component_sizes),
            "every_component_has_redundant": self.every_component_has_redundant,
        }


def bfs_census(ctx: GroupCtx, n, addr_cap=ADDR_CAP, chunk=1 << 20) -> CensusReport:
    """Connected components of the extended move graph on generating n-tuples.

    Requires the group's maximal-subgroup masks for the generation filter, so
    it is limited to the small built-in groups; the tuple space must fit the
    address bound.
    """
    N = ctx.order
    total = N**n
    if total > addr_cap:
        raise CensusBoundExceeded(
            f"{N}^{n} = {total} tuples exceeds the address bound {addr_cap}")
    masks = ctx.maximal_membership()          # (N, W) uint64
    W = masks.shape[1]
    mt = ctx.mult_table().astype(np.int64)
    inv = ctx.inverse_table().astype(np.int64)
    weights = [N ** (n - 1 - k) for k in range(n)]

    def digits(codes):
        return [(codes // w) % N for w in weights]

    def is_generating(codes):
        ds = digits(codes)
        ok = np.zeros(codes.shape, dtype=bool)
        for col in range(W):
            acc = masks[ds[0], col]
            for d in ds[1:]:
                acc &= masks[d, col]
            ok |= acc != 0
        return ~ok

    def is_redundant(codes):
        ds = digits(codes)
        red = np.zeros(codes.shape, dtype=bool)
        for drop in range(n):
            keep = [d for k, d in enumerate(ds) if k != drop]
            sub_in_some = np.zeros(codes.shape, dtype=bool)
            for col in range(W):
                acc = masks[keep[0], col]
                for d in keep[1:]:
                    acc &= masks[d, col]
                sub_in_some |= acc != 0
            red |= ~sub_in_some
        return red

    # all generating tuple codes, ascending
    gen_chunks = []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        gen_chunks.append(codes[is_generating(codes)])
    all_gen = np.concatenate(gen_chunks) if gen_chunks else np.empty(0, np.int64)
    n_gen = int(all_gen.size)

    def expand(codes):
        ds = digits(codes)
        outs = []
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                wi = weights[i]
                dj, dji = ds[j], inv[ds[j]]
                outs.append(codes + (mt[ds[i], dj] - ds[i]) * wi)    # R+
                outs.append(codes + (mt[ds[i], dji] - ds[i]) * wi)   # R-
                outs.append(codes + (mt[dj, ds[i]] - ds[i]) * wi)    # L+
                outs.append(codes + (mt[dji, ds[i]] - ds[i]) * wi)   # L-
        for i in range(n):
            for j in range(i + 1, n):
                outs.append(codes + (ds[j] - ds[i]) * weights[i]
                            + (ds[i] - ds[j]) * weights[j])          # P
        for i in range(n):
            outs.append(codes + (inv[ds[i]] - ds[i]) * weights[i])   # I
        return np.concatenate(outs)

    visited = _Bitset(total)
    sizes = []
    has_red = []
    ptr = 0
    while True:
        while ptr < n_gen and visited.test(all_gen[ptr:ptr + 1])[0]:
            ptr += 1
        if ptr >= n_gen:
            break
        seed = all_gen[ptr:ptr + 1]
        visited.set(seed)
        frontier = seed
        size = 0
        red = False
        while frontier.size:
            size += int(frontier.size)
            if not red:
                red = bool(is_redundant(frontier).any())
            cand = np.unique(expand(frontier))
            cand = cand[visited.test(cand) == 0]
            visited.set(cand)
            frontier = cand
        sizes.append(size)
        has_red.append(red)
    return CensusReport(ctx.name or "custom", n, N, n_gen, sizes, has_red)


# ---------------------------------------------------------------------------
# the product-replacement walk
# ---------------------------------------------------------------------------

def pra_walk(t, steps, seed, ops):
    """Walk `steps` uniformly random multiplication moves (R and L families,
    both signs, positions uniform over i != j), then return the tuple and a
    uniformly chosen entry.  Deterministic for a given seed."""
    import random
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rng = random.Random(seed)
    moves = rl_moves(len(t))
    cur = tuple(t)
    for _ in range(steps):
        cur = apply_move(cur, moves[rng.randrange(len(moves))], ops)
    return cur, cur[rng.randrange(len(cur))]
