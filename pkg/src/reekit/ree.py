"""The 7x7 matrix model of the small Ree group over GF(3^(2e+1)).

Two families of unipotent matrices (one fixing the point at infinity, one
fixing the origin point) generate the group inside SL_7(q).  Since 7 does not
divide q-1, each group element has a unique matrix representative, so matrix
equality/hashing is group equality/hashing and the trace of an element is
well defined.

Matrices are numpy (7,7) arrays of field-element indices; multiplication uses
the field's dense op tables when available and falls back to scalar loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf3 import Field

INF = "inf"
ORIGIN = "O"


class OrderCapExceeded(ValueError):
    """Repeated squaring passed the group exponent bound: not a group element."""


@dataclass(frozen=True)
class SylowParams:
    """Parameter triple (a, a', a'') of a unipotent element, tagged by side."""
    a: int
    ap: int
    app: int
    side: str = INF

    def is_zero(self):
        return self.a == 0 and self.ap == 0 and self.app == 0


class _Fx:
    """Construction-time wrapper so the matrix entry formulas read like algebra."""

    __slots__ = ("f", "v")

    def __init__(self, f, v):
        self.f = f
        self.v = v

    def __add__(self, o):
        return _Fx(self.f, self.f.add(self.v, o.v))

    def __sub__(self, o):
        return _Fx(self.f, self.f.sub(self.v, o.v))

    def __mul__(self, o):
        return _Fx(self.f, self.f.mul(self.v, o.v))

    def __neg__(self):
        return _Fx(self.f, self.f.neg(self.v))

    def th(self):
        return _Fx(self.f, self.f.theta(self.v))


class GroupElement:
    """A determinant-1 7x7 matrix over GF(q); the unique representative."""

    __slots__ = ("field", "mat", "_key")

    def __init__(self, field: Field, mat):
        self.field = field
        m = np.asarray(mat, dtype=np.int32)
        m.setflags(write=False)
        self.mat = m
        self._key = m.tobytes()

    def __mul__(self, other):
        f = self.field
        A, B = self.mat, other.mat
        if f.has_tables():
            t = f.tables
            MUL, ADD = t["MUL"], t["ADD"]
            prod = MUL[A[:, :, None], B[None, :, :]]  # prod[i,k,j] = A[i,k]*B[k,j]
            acc = prod[:, 0, :]
            for k in range(1, 7):
                acc = ADD[acc, prod[:, k, :]]
            return GroupElement(f, acc)
        out = np.zeros((7, 7), dtype=np.int32)
        for i in range(7):
            for j in range(7):
                s = 0
                for k in range(7):
                    s = f.add(s, f.mul(int(A[i, k]), int(B[k, j])))
                out[i, j] = s
        return GroupElement(f, out)

    def inverse(self):
        return GroupElement(self.field, mat_inverse(self.field, self.mat))

    def apply(self, vec):
        """Matrix times column vector (length-7 array of field indices)."""
        f = self.field
        A = self.mat
        v = np.asarray(vec, dtype=np.int32)
        if f.has_tables():
            t = f.tables
            prod = t["MUL"][A, v[None, :]]
            acc = prod[:, 0]
            for j in range(1, 7):
                acc = t["ADD"][acc, prod[:, j]]
            return acc
        out = np.zeros(7, dtype=np.int32)
        for i in range(7):
            s = 0
            for j in range(7):
                s = f.add(s, f.mul(int(A[i, j]), int(v[j])))
            out[i] = s
        return out

    def trace(self):
        f = self.field
        s = 0
        for i in range(7):
            s = f.add(s, int(self.mat[i, i]))
        return s

    def det(self):
        return mat_det(self.field, self.mat)

    def is_identity(self):
        return self._key == identity(self.field)._key

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"GroupElement(q={self.field.q}, {to_text(self)!r})"


def identity(field: Field) -> GroupElement:
    m = np.zeros((7, 7), dtype=np.int32)
    for i in range(7):
        m[i, i] = 1
    return GroupElement(field, m)


def to_text(g: GroupElement) -> str:
    f = g.field
    return ";".join(
        " ".join(f.to_str(int(x)) for x in row) for row in g.mat)


def from_text(field: Field, s: str) -> GroupElement:
    rows = [r for r in s.strip().split(";") if r.strip()]
    if len(rows) != 7:
        raise ValueError("matrix text needs 7 semicolon-separated rows")
    mat = []
    for r in rows:
        cells = r.split()
        if len(cells) != 7:
            raise ValueError("each matrix row needs 7 field elements")
        mat.append([field.from_str(c) for c in cells])
    return GroupElement(field, mat)


# ---------------------------------------------------------------------------
# the two Sylow-3 matrix templates and the parameter laws
# ---------------------------------------------------------------------------

def f1(field, a, ap, app):
    a, ap, app = _Fx(field, a), _Fx(field, ap), _Fx(field, app)
    return _f123(a, ap, app)[0].v


def f2(field, a, ap, app):
    a, ap, app = _Fx(field, a), _Fx(field, ap), _Fx(field, app)
    return _f123(a, ap, app)[1].v


def f3(field, a, ap, app):
    a, ap, app = _Fx(field, a), _Fx(field, ap), _Fx(field, app)
    return _f123(a, ap, app)[2].v


def _f123(a, ap, app):
    at = a.th()
    a2 = a * a
    a3 = a2 * a
    v1 = (-(at * at * (a2 * a2)) - a * app.th() + (at * a) * ap.th()
          + app * app + ap.th() * ap - ap * (at * a3) - a2 * (ap * ap))
    v2 = -(at * a3) + ap.th() - a * app + a2 * ap
    v3 = (-(at * at * a3) - app.th() + at * ap.th() + ap * app
          + a * (ap * ap))
    return v1, v2, v3


def _entries(field, a_i, ap_i, app_i):
    """All entry polynomials shared by the two templates."""
    f = field
    a, ap, app = _Fx(f, a_i), _Fx(f, ap_i), _Fx(f, app_i)
    at = a.th()
    a2 = a * a
    a3 = a2 * a
    v1, v2, v3 = _f123(a, ap, app)
    e12 = at * a3 - ap.th() - a * app - a2 * ap
    e13 = (-(at * at * a3) + app.th() + at * ap.th() + ap * app
           - a * (ap * ap) - (at * a2) * ap - (at * a) * app)
    e62 = at * a2 + app - a * ap
    e73 = -(at * app) + ap * ap - (at * a) * ap
    d16 = ap - at * a          # a' - a^(theta+1)
    return dict(
        f1=v1.v, f2=v2.v, f3=v3.v, e12=e12.v, e13=e13.v, e62=e62.v,
        e73=e73.v, d16=d16.v, at=at.v, a2=a2.v,
        napp_aap=(-(app + a * ap)).v,  # -a'' - a a'
    )


def u_inf(field, a, ap, app) -> GroupElement:
    """Unipotent element (a, a', a'')_inf fixing the point at infinity."""
    f = field
    E = _entries(f, a, ap, app)
    n = f.neg
    mat = [
        [1, E["e12"], E["e13"], app, E["f1"], E["d16"], a],
        [0, 1, E["at"], 0, n(ap), 0, 0],
        [0, 0, 1, 0, n(a), 0, 0],
        [0, n(a), E["d16"], 1, n(app), 0, 0],
        [0, 0, 0, 0, 1, 0, 0],
        [0, E["a2"], E["e62"], a, E["f2"], 1, 0],
        [0, E["napp_aap"], E["e73"], n(ap), E["f3"], n(E["at"]), 1],
    ]
    return GroupElement(f, mat)


def u_o(field, a, ap, app) -> GroupElement:
    """Unipotent element (a, a', a'')_O fixing the origin point."""
    f = field
    E = _entries(f, a, ap, app)
    n = f.neg
    mat = [
        [1, 0, 0, 0, 0, 0, 0],
        [E["f2"], 1, 0, n(a), 0, E["a2"], E["e62"]],
        [E["f3"], n(E["at"]), 1, ap, 0, E["napp_aap"], E["e73"]],
        [app, 0, 0, 1, 0, a, n(E["d16"])],
        [E["f1"], E["d16"], a, n(app), 1, E["e12"], E["e13"]],
        [n(ap), 0, 0, 0, 0, 1, E["at"]],
        [n(a), 0, 0, 0, 0, 0, 1],
    ]
    return GroupElement(f, mat)


def u_elem(field, params: SylowParams) -> GroupElement:
    if params.side == INF:
        return u_inf(field, params.a, params.ap, params.app)
    return u_o(field, params.a, params.ap, params.app)


def h_minus1(field) -> GroupElement:
    """The involution of the 2-point stabiliser fixing the base block pointwise.

    Projectively it is Diag(1,1,-1,-1,1,1,-1), but that matrix has determinant
    -1; the unique determinant-1 representative is its negative (scaling by -1
    is the only 7th-root correction available since 7 does not divide q-1), so
    the element returned is Diag(-1,-1,1,1,-1,-1,1), of trace -1.
    """
    m = np.zeros((7, 7), dtype=np.int32)
    two = field.neg(1)
    for i, s in enumerate([two, two, 1, 1, two, two, 1]):
        m[i, i] = s
    return GroupElement(field, m)


def h_minus1_projective(field) -> GroupElement:
    """Diag(1,1,-1,-1,1,1,-1) exactly as displayed: determinant -1, same
    projective action as h_minus1().  Needed to reproduce displayed traces."""
    m = np.zeros((7, 7), dtype=np.int32)
    two = field.neg(1)
    for i, s in enumerate([1, 1, two, two, 1, 1, two]):
        m[i, i] = s
    return GroupElement(field, m)


def mult_law_inf(field, s: SylowParams, t: SylowParams) -> SylowParams:
    """(a,a',a'')_inf (b,b',b'')_inf in closed form on the parameters."""
    if s.side != INF or t.side != INF:
        raise ValueError("parameter multiplication is defined on the inf side")
    f = field
    a, ap, app = s.a, s.ap, s.app
    b, bp, bpp = t.a, t.ap, t.app
    at = f.theta(a)
    ra = f.add(a, b)
    rp = f.add(f.add(ap, bp), f.mul(at, b))
    rpp = f.add(app, bpp)
    rpp = f.sub(rpp, f.mul(a, bp))
    rpp = f.add(rpp, f.mul(ap, b))
    rpp = f.sub(rpp, f.mul(f.mul(at, a), b))
    return SylowParams(ra, rp, rpp, INF)


def inverse_law_inf(field, s: SylowParams) -> SylowParams:
    if s.side != INF:
        raise ValueError("parameter inverse is defined on the inf side")
    f = field
    return SylowParams(
        f.neg(s.a),
        f.add(f.neg(s.ap), f.mul(f.theta(s.a), s.a)),
        f.neg(s.app),
        INF,
    )


def order(g: GroupElement, cap=None) -> int:
    """Element order by repeated multiplication, capped by the exponent bound.

    The cap 2(q + sqrt(3q) + 1) dominates every order occurring in the group;
    exceeding it means the input matrix is not a group element.
    """
    f = g.field
    if cap is None:
        cap = 2 * (f.q + 3 ** (f.e + 1) + 1)
    e = identity(f)
    acc = g
    for k in range(1, cap + 1):
        if acc == e:
            return k
        acc = acc * g
    raise OrderCapExceeded(f"order exceeds cap {cap}; not a group element?")


def power(g: GroupElement, n: int) -> GroupElement:
    if n < 0:
        return power(g.inverse(), -n)
    acc = identity(g.field)
    b = g
    while n:
        if n & 1:
            acc = acc * b
        b = b * b
        n >>= 1
    return acc


def class_reps(field, k) -> list[GroupElement]:
    """Conjugacy class representatives for element orders 3, 6 and 9.

    The order-6 classes are realised as (0,+-1,0)_inf * h(-1); their point
    action is p(b,b',b'') -> p(-b, b'+-1, -b''-+b), matching the two displayed
    order-6 point maps.
    """
    one = 1
    neg1 = field.neg(1)
    if k == 9:
        return [u_inf(field, one, 0, 0), u_inf(field, one, one, 0),
                u_inf(field, one, neg1, 0)]
    if k == 3:
        return [u_inf(field, 0, 0, one), u_inf(field, 0, one, 0),
                u_inf(field, 0, neg1, 0)]
    if k == 6:
        h = h_minus1(field)
        return [u_inf(field, 0, one, 0) * h, u_inf(field, 0, neg1, 0) * h]
    raise ValueError("class representatives available for orders 3, 6, 9 only")


def random_element(field, rng, length=4) -> GroupElement:
    """Seeded random group element: an alternating word in the two Sylow sides."""
    g = identity(field)
    q = field.q
    for _ in range(length):
        g = g * u_inf(field, rng.randrange(q), rng.randrange(q), rng.randrange(q))
        g = g * u_o(field, rng.randrange(q), rng.randrange(q), rng.randrange(q))
    return g


# ---------------------------------------------------------------------------
# linear algebra over the field (used for inverses, dets, and derived solves)
# ---------------------------------------------------------------------------

def mat_inverse(field, A):
    f = field
    n = A.shape[0]
    M = [[int(A[i, j]) for j in range(n)] + [1 if j == i else 0 for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        ipiv = f.inv(M[col][col])
        M[col] = [f.mul(ipiv, x) for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                c = M[r][col]
                M[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(M[r], M[col])]
    return np.array([row[n:] for row in M], dtype=np.int32)


def mat_det(field, A):
    f = field
    n = A.shape[0]
    M = [[int(A[i, j]) for j in range(n)] for i in range(n)]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = f.neg(det)
        det = f.mul(det, M[col][col])
        ipiv = f.inv(M[col][col])
        for r in range(col + 1, n):
            if M[r][col] != 0:
                c = f.mul(ipiv, M[r][col])
                M[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(M[r], M[col])]
    return det


def nullspace_vector(field, rows, ncols):
    """One nonzero kernel vector of the given row system, or None."""
    f = field
    M = [list(r) for r in rows]
    pivots = {}
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        ipiv = f.inv(M[rank][col])
        M[rank] = [f.mul(ipiv, x) for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col] != 0:
                c = M[r][col]
                M[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(M[r], M[rank])]
        pivots[col] = rank
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    v = [0] * ncols
    v[free[0]] = 1
    for col, r in pivots.items():
        v[col] = f.neg(M[r][free[0]])
    return v
