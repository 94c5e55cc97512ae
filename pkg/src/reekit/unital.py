"""The Ree unital: q^3+1 points in PG(6,q), blocks of size q+1, group action.

Points are the projective images of the parameter map p(a,a',a'') plus the
point at infinity.  The whole point set is tabulated once as canonical
projective vectors (first nonzero coordinate scaled to 1) in a numpy array;
point indices are 0 for infinity and 1 + ((a*q)+a')*q + a'' for the rest,
field elements ordered by their integer encoding.

Group elements act through a GF(3)-linear lift of the 7x7 matrix (each field
entry becomes an m x m block), so the image of every point is one dense
matmul; parameters are then read back off the image vectors without any
normalisation, giving whole-unital permutations in milliseconds at q = 27.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf3 import Field
from . import ree
from .ree import GroupElement, SylowParams

INF_INDEX = 0
O_INDEX = 1

DEFAULT_MAX_POINTS = 30_000


@dataclass(frozen=True)
class UnitalPoint:
    kind: str                  # "inf" or "param"
    params: tuple | None       # (a, a', a'') when kind == "param"
    proj: tuple                # canonical projective 7-vector (field indices)


class Unital:
    def __init__(self, field: Field, max_points=DEFAULT_MAX_POINTS):
        q = field.q
        n = q**3 + 1
        if n > max_points:
            raise ValueError(
                f"unital on {n} points exceeds the limit {max_points}; "
                "raise max_points to force enumeration")
        if not field.has_tables():
            raise ValueError("unital enumeration needs a table-backed field")
        self.field = field
        self.q = q
        self.n_points = n
        self._build_tables()
        self._pencil_inf = None
        self._P3 = None
        self._transporter_cache = {}

    # -- construction --------------------------------------------------------

    def _build_tables(self):
        f = self.field
        q = self.q
        t = f.tables
        MUL, ADD, NEG, TH, INV = t["MUL"], t["ADD"], t["NEG"], t["THETA"], t["INV"]

        A = np.repeat(np.arange(q, dtype=np.int32), q * q)
        AP = np.tile(np.repeat(np.arange(q, dtype=np.int32), q), q)
        APP = np.tile(np.arange(q, dtype=np.int32), q * q)

        at = TH[A]
        a2 = MUL[A, A]
        a3 = MUL[a2, A]
        a4 = MUL[a2, a2]
        apt = TH[AP]
        appt = TH[APP]

        def acc(*terms):
            s = terms[0]
            for x in terms[1:]:
                s = ADD[s, x]
            return s

        F1 = acc(NEG[MUL[MUL[at, at], a4]],
                 NEG[MUL[A, appt]],
                 MUL[MUL[at, A], apt],
                 MUL[APP, APP],
                 MUL[apt, AP],
                 NEG[MUL[AP, MUL[at, a3]]],
                 NEG[MUL[a2, MUL[AP, AP]]])
        F2 = acc(NEG[MUL[at, a3]],
                 apt,
                 NEG[MUL[A, APP]],
                 MUL[a2, AP])
        F3 = acc(NEG[MUL[MUL[at, at], a3]],
                 NEG[appt],
                 MUL[at, apt],
                 MUL[AP, APP],
                 MUL[A, MUL[AP, AP]])

        rows = np.empty((q**3, 7), dtype=np.int32)
        rows[:, 0] = F1
        rows[:, 1] = NEG[AP]
        rows[:, 2] = NEG[A]
        rows[:, 3] = NEG[APP]
        rows[:, 4] = 1
        rows[:, 5] = F2
        rows[:, 6] = F3

        # every point other than the origin has nonzero leading coordinate
        zero_lead = np.nonzero(F1 == 0)[0]
        assert zero_lead.size == 1 and zero_lead[0] == 0, \
            "leading-coordinate assumption violated"
        scale = np.ones(q**3, dtype=np.int32)
        scale[1:] = INV[F1[1:]]
        canon = MUL[scale[:, None], rows]

        table = np.empty((self.n_points, 7), dtype=np.int32)
        table[0] = 0
        table[0, 0] = 1
        table[1:] = canon
        table.setflags(write=False)
        self.table = table

        pows = (q ** np.arange(7)).astype(np.int64)
        keys = table.astype(np.int64) @ pows
        assert np.unique(keys).size == self.n_points, "point collision"
        self._keys = keys
        self._f2 = F2
        self._f3 = F3

    @property
    def P3(self):
        """GF(3)-coefficient expansion of the point table: (N, 7m) int8."""
        if self._P3 is None:
            CO = self.field.tables["CO"]
            n = self.n_points
            self._P3 = CO[self.table].reshape(n, 7 * self.field.m)
        return self._P3

    # -- points ---------------------------------------------------------------

    def point_inf(self) -> UnitalPoint:
        return UnitalPoint("inf", None, tuple(int(x) for x in self.table[0]))

    def index_of_params(self, a, ap, app):
        q = self.q
        return 1 + (a * q + ap) * q + app

    def params_of_index(self, idx):
        if idx == INF_INDEX:
            raise ValueError("the point at infinity has no parameters")
        q = self.q
        v = idx - 1
        app = v % q
        ap = (v // q) % q
        a = v // (q * q)
        return (a, ap, app)

    def point_at(self, idx) -> UnitalPoint:
        if idx == INF_INDEX:
            return self.point_inf()
        return UnitalPoint("param", self.params_of_index(idx),
                           tuple(int(x) for x in self.table[idx]))

    def point_p(self, a, ap, app) -> UnitalPoint:
        return self.point_at(self.index_of_params(a, ap, app))

    def point_q(self, a, ap, app) -> UnitalPoint:
        """The alternative parametrisation: image of infinity under (a,a',a'')_O."""
        f = self.field
        vec = (f.one, ree.f2(f, a, ap, app), ree.f3(f, a, ap, app), app,
               ree.f1(f, a, ap, app), f.neg(ap), f.neg(a))
        pt = self.point_from_projective(vec)
        assert pt is not None
        return pt

    def point_from_projective(self, vec) -> UnitalPoint | None:
        """Invert the parameter map; None means the vector is not on the unital."""
        f = self.field
        v = [int(x) for x in vec]
        if len(v) != 7 or all(x == 0 for x in v):
            raise ValueError("need a nonzero length-7 vector")
        if v[4] != 0:
            s = f.inv(v[4])
            w = [f.mul(s, x) for x in v]
            a = f.neg(w[2])
            ap = f.neg(w[1])
            app = f.neg(w[3])
            if (w[0] == ree.f1(f, a, ap, app)
                    and w[5] == ree.f2(f, a, ap, app)
                    and w[6] == ree.f3(f, a, ap, app)):
                return self.point_p(a, ap, app)
            return None
        if v[0] != 0 and all(x == 0 for x in v[1:]):
            return self.point_inf()
        return None

    def index_of_point(self, pt: UnitalPoint):
        if pt.kind == "inf":
            return INF_INDEX
        return self.index_of_params(*pt.params)

    def q_params_of_index(self, idx):
        """Parameters (b, b', b'') with (b,b',b'')_O . inf = the point."""
        if idx == INF_INDEX:
            return (0, 0, 0)
        if idx == O_INDEX:
            raise ValueError("the origin is not in the q-parametrisation")
        f = self.field
        row = self.table[idx]
        assert int(row[0]) == 1
        return (f.neg(int(row[6])), f.neg(int(row[5])), int(row[3]))

    # -- group action ---------------------------------------------------------

    def _lift(self, g: GroupElement):
        """GF(3)-linear 7m x 7m lift of the matrix, as float32 for BLAS."""
        MM = self.field.tables["MM"]
        m = self.field.m
        blocks = MM[g.mat]                      # (7,7,m,m)
        return (blocks.transpose(0, 2, 1, 3).reshape(7 * m, 7 * m)
                .astype(np.float32))

    def apply_indices(self, g: GroupElement, idx):
        """Image indices of the given point indices under g (vectorised)."""
        f = self.field
        m = f.m
        idx = np.asarray(idx, dtype=np.int64)
        flat = idx.ravel()
        W = self.P3[flat].astype(np.float32) @ self._lift(g).T
        W = (W.astype(np.int64) % 3).reshape(-1, 7, m)
        pows = (3 ** np.arange(m)).astype(np.int64)
        wel = (W @ pows).astype(np.int64)       # (k, 7) field indices
        t = f.tables
        MUL, NEG, INV = t["MUL"], t["NEG"], t["INV"]
        is_inf = (wel[:, 1:] == 0).all(axis=1)
        v4 = wel[:, 4]
        if not np.all(is_inf | (v4 != 0)):
            raise ValueError("image vector off the unital: not a group matrix?")
        s = INV[np.where(is_inf, 1, v4)]
        a = MUL[NEG[wel[:, 2]], s]
        ap = MUL[NEG[wel[:, 1]], s]
        app = MUL[NEG[wel[:, 3]], s]
        q = self.q
        out = 1 + (a.astype(np.int64) * q + ap) * q + app
        out[is_inf] = INF_INDEX
        return out.reshape(idx.shape)

    def permutation(self, g: GroupElement, validate=False):
        perm = self.apply_indices(g, np.arange(self.n_points))
        if validate:
            assert np.unique(perm).size == self.n_points
        return perm

    def apply(self, g: GroupElement, pt: UnitalPoint) -> UnitalPoint:
        w = g.apply(np.array(pt.proj, dtype=np.int32))
        out = self.point_from_projective(w)
        if out is None:
            raise ValueError("matrix does not preserve the unital")
        return out

    def fixed_points(self, g: GroupElement):
        perm = self.apply_indices(g, np.arange(self.n_points))
        return np.nonzero(perm == np.arange(self.n_points))[0]

    # -- torus action ----------------------------------------------------------

    def h_action(self, tval, pt: UnitalPoint) -> UnitalPoint:
        """Point action of the 2-point stabiliser element h(t), t nonzero.

        The parameters scale with weights (t, t^(theta+1), t^(theta+2)).
        These are the unique multiplicative weights (w1, w2, w3) compatible
        with the parameter multiplication law (w2 = w1^(theta+1), w3 = w1*w2),
        and they match the action of actual 2-point-stabiliser group elements.
        """
        if tval == 0:
            raise ValueError("h(t) needs t != 0")
        if pt.kind == "inf":
            return pt
        f = self.field
        tt = f.theta(tval)
        a, ap, app = pt.params
        return self.point_p(
            f.mul(a, tval),
            f.mul(ap, f.mul(tt, tval)),
            f.mul(app, f.mul(tt, f.mul(tval, tval))),
        )

    def h_permutation(self, tval):
        if tval == 0:
            raise ValueError("h(t) needs t != 0")
        f = self.field
        q = self.q
        t = f.tables
        MUL = t["MUL"]
        tt = f.theta(tval)
        t1 = f.mul(tt, tval)
        t2 = f.mul(t1, tval)
        A = np.repeat(np.arange(q, dtype=np.int64), q * q)
        AP = np.tile(np.repeat(np.arange(q, dtype=np.int64), q), q)
        APP = np.tile(np.arange(q, dtype=np.int64), q * q)
        na = MUL[A, tval].astype(np.int64)
        nap = MUL[AP, t1].astype(np.int64)
        napp = MUL[APP, t2].astype(np.int64)
        perm = np.empty(self.n_points, dtype=np.int64)
        perm[0] = 0
        perm[1:] = 1 + (na * q + nap) * q + napp
        return perm

    def h_matrix(self, tval) -> GroupElement:
        """Determinant-1 matrix realising h(t), solved from the point action.

        Derived machinery: the matrix is pinned by matching the projective
        action on infinity, the origin and a spread of parameter points, then
        rescaled by the unique 7th root correcting the determinant.
        """
        f = self.field
        if tval == 0:
            raise ValueError("h(t) needs t != 0")
        corr = [(self.point_inf(), self.point_inf())]
        seeds = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1),
                 (0, 1, 1), (1, 1, 1), (0, 0, 0)]
        if f.q > 3:
            seeds += [(2, 1, 0), (1, 2, 1), (3 % f.q, 1, 2)]
        for s in seeds:
            src = self.point_p(*s)
            corr.append((src, self.h_action(tval, src)))
        ncols = 49 + len(corr)
        rows = []
        for i, (src, dst) in enumerate(corr):
            v = src.proj
            w = dst.proj
            for r in range(7):
                row = [0] * ncols
                for j in range(7):
                    row[7 * r + j] = v[j]
                row[49 + i] = f.neg(w[r])
                rows.append(row)
        sol = ree.nullspace_vector(f, rows, ncols)
        if sol is None:
            raise ArithmeticError("no projective matrix matches the action")
        M = np.array(sol[:49], dtype=np.int32).reshape(7, 7)
        d = ree.mat_det(f, M)
        if d == 0:
            raise ArithmeticError("degenerate solve for h(t)")
        sexp = pow(7, -1, f.q - 1)
        c = f.pow(f.inv(d), sexp)
        g = GroupElement(f, f.tables["MUL"][c, M])
        assert g.det() == 1
        return g

    # -- blocks -----------------------------------------------------------------

    def block_inf_O(self):
        q = self.q
        idx = [INF_INDEX] + [1 + bp * q for bp in range(q)]
        return tuple(sorted(idx))

    def block_a(self, a, app):
        """The block through infinity with parameters (a, a''): the image of
        the base block under (a, 0, a'')_inf."""
        f = self.field
        q = self.q
        idx = [INF_INDEX]
        for bp in range(q):
            idx.append(self.index_of_params(a, bp, f.sub(app, f.mul(a, bp))))
        return tuple(sorted(idx))

    def pencil_inf(self):
        """All q^2 blocks through infinity, as a sorted-row (q^2, q+1) array;
        row order is lexicographic in (a, a'')."""
        if self._pencil_inf is None:
            q = self.q
            arr = np.empty((q * q, q + 1), dtype=np.int64)
            for a in range(q):
                for app in range(q):
                    arr[a * q + app] = self.block_a(a, app)
            arr.setflags(write=False)
            self._pencil_inf = arr
        return self._pencil_inf

    def block_through_inf_containing(self, idx):
        """(a, a'') with idx in B_{a,a''}; idx must not be infinity."""
        f = self.field
        a, ap, app = self.params_of_index(idx)
        return (a, f.add(app, f.mul(a, ap)))

    def transporter_from_inf(self, idx) -> GroupElement:
        """Some group element mapping infinity to the given point."""
        g = self._transporter_cache.get(idx)
        if g is not None:
            return g
        f = self.field
        if idx == INF_INDEX:
            g = ree.identity(f)
        elif idx == O_INDEX:
            x = ree.u_o(f, 1, 0, 0)
            gamma = self.apply_indices(x, [INF_INDEX])[0]
            s = self.params_of_index(int(gamma))
            g = ree.u_inf(f, *s).inverse() * x
        else:
            g = ree.u_o(f, *self.q_params_of_index(idx))
        self._transporter_cache[idx] = g
        return g

    def pencil(self, idx):
        """All q^2 blocks through the given point (sorted rows)."""
        if idx == INF_INDEX:
            return self.pencil_inf()
        g = self.transporter_from_inf(idx)
        img = self.apply_indices(g, self.pencil_inf())
        return np.sort(img, axis=1)

    def apply_to_block(self, g: GroupElement, block):
        return tuple(int(x) for x in np.sort(self.apply_indices(g, block)))

    def join(self, ai, bi):
        """The unique block through two distinct points, constructively."""
        if ai == bi:
            raise ValueError("join needs two distinct points")
        f = self.field
        if {ai, bi} == {INF_INDEX, O_INDEX}:
            return self.block_inf_O()
        if bi == INF_INDEX or (ai != INF_INDEX and bi == O_INDEX):
            ai, bi = bi, ai
        if ai == INF_INDEX:
            g = ree.u_inf(f, *self.params_of_index(bi))
            return self.apply_to_block(g, self.block_inf_O())
        if ai == O_INDEX:
            g = ree.u_o(f, *self.q_params_of_index(bi))
            return self.apply_to_block(g, self.block_inf_O())
        g = ree.u_o(f, *self.q_params_of_index(ai))
        inner = self.join(INF_INDEX, int(self.apply_indices(g.inverse(), [bi])[0]))
        return self.apply_to_block(g, inner)

    def stabilized_blocks_through(self, g: GroupElement, idx):
        """Exact list of g-stabilised blocks through the given point."""
        pencil = self.pencil(idx)
        img = np.sort(self.apply_indices(g, pencil), axis=1)
        hits = np.nonzero((img == pencil).all(axis=1))[0]
        return [tuple(int(x) for x in pencil[r]) for r in hits]

    def all_blocks(self):
        """Every block, by closing the joins of all point pairs; only sensible
        at q = 3 (63 blocks)."""
        seen = set()
        for i in range(self.n_points):
            for j in range(i + 1, self.n_points):
                seen.add(self.join(i, j))
        return sorted(seen)

    # -- export -----------------------------------------------------------------

    def to_json_dict(self, include_blocks=False):
        f = self.field
        out = {
            "q": self.q,
            "points": [[f.to_str(int(x)) for x in row] for row in self.table],
        }
        if include_blocks:
            out["blocks"] = [list(b) for b in self.all_blocks()]
        return out
