"""Small-group backend: closures, generation tests, and the built-in groups.

Everything here works on hashable elements with `*` (permutations or 7x7
matrix elements); a GroupCtx indexes a full closure so tuple machinery can
run on plain ints backed by a dense multiplication table.

Generation testing for census-scale sweeps goes through the maximal-subgroup
membership masks: a tuple generates iff no maximal subgroup contains all its
entries.  The maximal subgroups are computed exactly, by enumerating the
whole subgroup lattice (feasible for the built-in groups).
"""

from __future__ import annotations

import numpy as np

from . import ree
from .gf3 import make_field

CLOSURE_CAP = 10**6
LATTICE_MAX_ORDER = 600


class ClosureCapExceeded(RuntimeError):
    pass


class Perm:
    """A permutation of {0..d-1} by its image tuple; (p*q)(x) = p(q(x))."""

    __slots__ = ("images",)

    def __init__(self, images):
        self.images = tuple(int(x) for x in images)
        assert sorted(self.images) == list(range(len(self.images)))

    @classmethod
    def identity(cls, d):
        return cls(range(d))

    @classmethod
    def from_cycles(cls, d, cycles):
        img = list(range(d))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        # cycles give a -> next, i.e. img[a] = next(a)
        return cls(img)

    def __mul__(self, other):
        return Perm(tuple(self.images[x] for x in other.images))

    def inverse(self):
        out = [0] * len(self.images)
        for i, x in enumerate(self.images):
            out[x] = i
        return Perm(out)

    def order(self):
        seen = [False] * len(self.images)
        k = 1
        for s in range(len(self.images)):
            if seen[s]:
                continue
            ln, x = 0, s
            while not seen[x]:
                seen[x] = True
                x = self.images[x]
                ln += 1
            k = _lcm(k, ln)
        return k

    def is_identity(self):
        return all(i == x for i, x in enumerate(self.images))

    def __eq__(self, other):
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Perm{self.images}"


def _lcm(a, b):
    from math import gcd
    return a * b // gcd(a, b)


def closure(generators, identity, cap=CLOSURE_CAP):
    """Breadth-first closure; deterministic: word length, then generator index."""
    elements = [identity]
    index = {identity: 0}
    frontier = [identity]
    gens = list(generators)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in index:
                    index[y] = len(elements)
                    elements.append(y)
                    new.append(y)
                    if len(elements) > cap:
                        raise ClosureCapExceeded(
                            f"closure exceeded cap {cap}")
        frontier = new
    return elements


class GroupCtx:
    """An enumerated finite group with dense index tables."""

    def __init__(self, elements, name=None):
        self.elements = list(elements)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.order = len(self.elements)
        self.name = name
        self._mt = None
        self._inv = None
        self._orders = None
        self._maximal = None

    @classmethod
    def generate(cls, generators, identity, cap=CLOSURE_CAP, name=None):
        return cls(closure(generators, identity, cap), name=name)

    @property
    def identity_index(self):
        return 0  # closure() always lists the identity first

    def mult_table(self):
        if self._mt is None:
            n = self.order
            mt = np.empty((n, n), dtype=np.int32)
            first = self.elements[0]
            if isinstance(first, Perm):
                P = np.array([g.images for g in self.elements], dtype=np.int32)
                lookup = {g.images: i for i, g in enumerate(self.elements)}
                for i in range(n):
                    comp = P[i][P]  # rows: images of elements[i]*elements[j]
                    mt[i] = [lookup[tuple(row)] for row in comp.tolist()]
            else:
                for i, a in enumerate(self.elements):
                    for j, b in enumerate(self.elements):
                        mt[i, j] = self.index[a * b]
            self._mt = mt
        return self._mt

    def inverse_table(self):
        if self._inv is None:
            mt = self.mult_table()
            n = self.order
            inv = np.empty(n, dtype=np.int32)
            e = self.identity_index
            rows, cols = np.nonzero(mt == e)
            inv[rows] = cols
            self._inv = inv
        return self._inv

    def element_orders(self):
        if self._orders is None:
            mt = self.mult_table()
            n = self.order
            e = self.identity_index
            out = np.empty(n, dtype=np.int32)
            for g in range(n):
                k, x = 1, g
                while x != e:
                    x = int(mt[x, g])
                    k += 1
                out[g] = k
            self._orders = out
        return self._orders

    def closure_indices(self, gens):
        """Indices of the subgroup generated by the given element indices."""
        mt = self.mult_table()
        e = self.identity_index
        seen = bytearray(self.order)
        seen[e] = 1
        out = [e]
        frontier = [e]
        gens = [int(g) for g in gens]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = int(mt[x, g])
                    if not seen[y]:
                        seen[y] = 1
                        out.append(y)
                        new.append(y)
            frontier = new
        return out

    # -- subgroup lattice -----------------------------------------------------

    def subgroup_masks(self):
        """All proper subgroups as bitmask ints over element indices."""
        n = self.order
        if n > LATTICE_MAX_ORDER:
            raise ValueError(
                f"subgroup lattice enumeration is limited to order "
                f"{LATTICE_MAX_ORDER} (got {n})")
        mt = self.mult_table()
        e = self.identity_index
        half = n // 2

        def close_mask(gens):
            # None means the closure is the whole group
            seen = bytearray(n)
            seen[e] = 1
            out = [e]
            frontier = [e]
            count = 1
            while frontier:
                new = []
                for x in frontier:
                    for g in gens:
                        y = int(mt[x, g])
                        if not seen[y]:
                            seen[y] = 1
                            out.append(y)
                            new.append(y)
                            count += 1
                            if count > half:
                                return None, None
                frontier = new
            mask = 0
            for i in out:
                mask |= 1 << i
            return mask, out

        subs = {1 << e: ()}
        queue = []
        for g in range(n):
            mask, _ = close_mask((g,))
            if mask is not None and mask not in subs:
                subs[mask] = (g,)
                queue.append((mask, (g,)))
        while queue:
            mask, gens = queue.pop()
            for g in range(n):
                if (mask >> g) & 1:
                    continue
                newmask, _ = close_mask(gens + (g,))
                if newmask is not None and newmask not in subs:
                    subs[newmask] = gens + (g,)
                    queue.append((newmask, gens + (g,)))
        return subs

    def maximal_membership(self):
        """(order, W) uint64 masks: bit j of row g set iff g lies in the j-th
        maximal proper subgroup.  A tuple generates iff the AND of its rows
        is zero."""
        if self._maximal is None:
            subs = list(self.subgroup_masks().keys())
            maximal = [m for m in subs
                       if not any(m != o and (m & ~o) == 0 for o in subs)]
            W = (len(maximal) + 63) // 64
            table = np.zeros((self.order, W), dtype=np.uint64)
            for j, m in enumerate(maximal):
                col, bit = divmod(j, 64)
                b = np.uint64(1 << bit)
                for g in range(self.order):
                    if (m >> g) & 1:
                        table[g, col] |= b
            self._maximal = table
        return self._maximal


def generates(tuple_indices, ctx: GroupCtx) -> bool:
    """Exact test: the closure of the entries is the whole group."""
    if len(tuple_indices) == 0:
        return ctx.order == 1
    return len(ctx.closure_indices(tuple_indices)) == ctx.order


def is_redundant(tuple_indices, ctx: GroupCtx) -> bool:
    """Some proper subtuple generates; it suffices to test dropping one entry."""
    t = list(tuple_indices)
    if len(t) <= 1:
        return False
    return any(generates(t[:i] + t[i + 1:], ctx) for i in range(len(t)))


def element_order(x, identity):
    k, acc = 1, x
    while acc != identity:
        acc = acc * x
        k += 1
    return k


def _power(x, n, identity):
    acc = identity
    b = x
    while n:
        if n & 1:
            acc = acc * b
        b = b * b
        n >>= 1
    return acc


def cyclic_reduce(xs, identity):
    """Exponents m_1..m_{k-1} with <x_1^{m_1} ... x_{k-1}^{m_{k-1}} x_k> equal
    to <x_1,...,x_k>, for elements generating a cyclic group."""
    xs = list(xs)
    if not xs:
        raise ValueError("need at least one element")
    K = closure(xs, identity)
    target = len(K)
    orders = [element_order(x, identity) for x in xs]
    if max(element_order(g, identity) for g in K) != target:
        raise ValueError("the given elements do not generate a cyclic group")
    if len(xs) == 1:
        return []
    from itertools import product
    for ms in product(*[range(o) for o in orders[:-1]]):
        g = identity
        for x, mexp in zip(xs, ms):
            g = g * _power(x, mexp, identity)
        g = g * xs[-1]
        if element_order(g, identity) == target:
            return list(ms)
    raise AssertionError("cyclic reduction search failed")  # unreachable


# ---------------------------------------------------------------------------
# built-in groups
# ---------------------------------------------------------------------------

def a5() -> GroupCtx:
    g1 = Perm.from_cycles(5, [(0, 1, 2, 3, 4)])
    g2 = Perm.from_cycles(5, [(0, 1, 2)])
    ctx = GroupCtx.generate([g1, g2], Perm.identity(5), name="a5")
    assert ctx.order == 60
    return ctx


def psl27() -> GroupCtx:
    # action on the projective line over GF(7): points 0..6 and 7 = infinity
    p = 7
    inf = p
    t = Perm([(x + 1) % p for x in range(p)] + [inf])
    img = [0] * (p + 1)
    img[0] = inf
    img[inf] = 0
    for x in range(1, p):
        img[x] = (-pow(x, p - 2, p)) % p  # x -> -1/x
    s = Perm(img)
    ctx = GroupCtx.generate([t, s], Perm.identity(p + 1), name="psl27")
    assert ctx.order == 168
    return ctx


def psl28() -> GroupCtx:
    # GF(8) as polynomials over GF(2) mod x^3 + x + 1, encoded 0..7
    def gf8_mul(a, b):
        r = 0
        while b:
            if b & 1:
                r ^= a
            a <<= 1
            if a & 8:
                a ^= 0b1011
            b >>= 1
        return r

    def gf8_inv(a):
        return next(b for b in range(1, 8) if gf8_mul(a, b) == 1)

    inf = 8
    t = Perm([x ^ 1 for x in range(8)] + [inf])  # x -> x + 1
    img = [0] * 9
    img[0] = inf
    img[inf] = 0
    for x in range(1, 8):
        img[x] = gf8_inv(x)  # x -> 1/x
    s = Perm(img)
    ctx = GroupCtx.generate([t, s], Perm.identity(9), name="psl28")
    assert ctx.order == 504
    return ctx


def ree_generators(field):
    """Unipotent generators of the full matrix group: one-parameter elements
    on both sides, with parameters running over an additive basis of the
    field.  Prime-field parameters alone would only generate the subfield
    subgroup over GF(3) (stabilising a 28-point subunital)."""
    basis = [3**i for i in range(field.m)]  # 1, t, t^2, ... as indices
    gens = []
    for builder in (ree.u_inf, ree.u_o):
        for b in basis:
            gens.append(builder(field, b, 0, 0))
            gens.append(builder(field, 0, b, 0))
            gens.append(builder(field, 0, 0, b))
    return gens


def ree3_matrix_closure(cap=CLOSURE_CAP):
    """Full enumeration of the q=3 group as matrices (1512 elements)."""
    f = make_field(0)
    return closure(ree_generators(f), ree.identity(f), cap)


def ree3(cap=CLOSURE_CAP) -> GroupCtx:
    """The q=3 group as a degree-28 permutation group via its unital action."""
    from .unital import Unital
    f = make_field(0)
    mats = ree3_matrix_closure(cap)
    uni = Unital(f)
    perms = [Perm(uni.permutation(g)) for g in mats]
    ctx = GroupCtx(perms, name="ree3")
    ctx.matrices = mats
    return ctx


BUILTIN_GROUPS = {"a5": a5, "psl27": psl27, "psl28": psl28, "ree3": ree3}


def builtin_group(name) -> GroupCtx:
    try:
        return BUILTIN_GROUPS[name]()
    except KeyError:
        raise ValueError(f"unknown group {name!r}; "
                         f"choose from {sorted(BUILTIN_GROUPS)}") from None


def group_from_generator_file(path) -> GroupCtx:
    """Custom permutation group: one permutation per line as image lists."""
    gens = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            gens.append(Perm([int(x) for x in line.replace(",", " ").split()]))
    if not gens:
        raise ValueError("no generators in file")
    d = len(gens[0].images)
    if any(len(g.images) != d for g in gens):
        raise ValueError("generator degrees differ")
    return GroupCtx.generate(gens, Perm.identity(d), name="custom")


def ree_transitive(uni, elements) -> bool:
    """Generation criterion for the matrix groups at q >= 27: a tuple
    generates iff its orbit closure reaches every unital point (every proper
    subgroup is intransitive at those sizes).  Invalid at q = 3, where exact
    closure must be used instead."""
    n = uni.n_points
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        imgs = [uni.apply_indices(g, frontier) for g in elements]
        cand = np.unique(np.concatenate(imgs))
        new = cand[~seen[cand]]
        seen[new] = True
        frontier = new
        if seen.all():
            return True
    return bool(seen.all())
