"""Arithmetic in GF(3^m) for odd m = 2e+1, with the square root of Frobenius.

Field elements are plain ints in range(q), encoding the coefficient vector
(c_0, ..., c_{m-1}) of a residue polynomial as c_0 + 3*c_1 + ... + 3^(m-1)*c_{m-1}.
This makes elements hashable, orderable and directly usable as numpy indices;
`Field.coeffs` recovers the vector, `Field.to_str` the little-endian digit
string used in all textual I/O (e.g. "120" is 1 + 2t in GF(27)).

The defining modulus is pinned to the lexicographically smallest monic
irreducible of degree m (coefficients compared from high degree down), so
every run and every machine agrees on the byte-level encoding.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Largest q for which dense q x q op tables are built eagerly.  Above this the
# scalar ops fall back to polynomial arithmetic (fields stay usable, matrix
# kernels just lose their fast path).
TABLE_MAX_Q = 3**7


# ---------------------------------------------------------------------------
# polynomials over GF(3): little-endian tuples of ints in {0,1,2}
# ---------------------------------------------------------------------------

def p_trim(p):
    i = len(p)
    while i > 0 and p[i - 1] == 0:
        i -= 1
    return tuple(p[:i])


def p_add(a, b):
    n = max(len(a), len(b))
    a = tuple(a) + (0,) * (n - len(a))
    b = tuple(b) + (0,) * (n - len(b))
    return p_trim([(x + y) % 3 for x, y in zip(a, b)])


def p_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % 3
    return p_trim(out)


def p_mod(a, f):
    """Remainder of a modulo f; f must be monic."""
    a = list(a)
    df = len(f) - 1
    while len(p_trim(a)) - 1 >= df:
        a = list(p_trim(a))
        lead = a[-1]
        shift = len(a) - 1 - df
        for i in range(df + 1):
            a[shift + i] = (a[shift + i] - lead * f[i]) % 3
    return p_trim(a)


def p_gcd(a, b):
    a, b = p_trim(a), p_trim(b)
    while b:
        # make b monic so p_mod applies
        lead = b[-1]
        if lead != 1:
            b = tuple((2 * c) % 3 for c in b)  # 2 = 1/2 in GF(3)
        a, b = b, p_mod(a, b)
    return a


def p_pow3k(g, k, f):
    """g^(3^k) mod f, by k iterated cubings."""
    for _ in range(k):
        g = p_mod(p_mul(p_mul(g, g), g), f)
    return g


def is_irreducible(f):
    """Rabin's test for a monic polynomial over GF(3)."""
    f = p_trim(f)
    m = len(f) - 1
    if m <= 0:
        return False
    x = (0, 1)
    # x^(3^m) == x mod f
    if p_pow3k(x, m, f) != p_mod(x, f):
        return False
    for r in {p for p in range(2, m + 1) if m % p == 0 and _is_prime(p)}:
        h = p_add(p_pow3k(x, m // r, f), (0, 2))  # x^(3^(m/r)) - x
        if p_gcd(f, h) != (1,):
            return False
    return True


def _is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def smallest_irreducible(m):
    """Lexicographically smallest monic irreducible of degree m over GF(3).

    Candidates are ordered by the coefficient tuple read from degree m-1 down
    to the constant term, so e.g. x^3 + 2x + 1 precedes x^3 + x^2.
    """
    # odometer over (c_{m-1}, ..., c_0)
    for k in range(3**m):
        digits = []
        v = k
        for _ in range(m):
            digits.append(v % 3)
            v //= 3
        # digits is (c_0, ..., c_{m-1}) of k; we want the *high-down* order,
        # so interpret k's big-endian digits as (c_{m-1}, ..., c_0) instead.
        hi_down = digits[::-1]
        cand = tuple(reversed(hi_down)) + (1,)
        if is_irreducible(cand):
            return cand
    raise ArithmeticError(f"no irreducible of degree {m}")  # unreachable


# ---------------------------------------------------------------------------
# the field
# ---------------------------------------------------------------------------

class Field:
    """GF(3^m) with m = 2e+1, elements encoded as ints in range(3^m).

    Carries the dense op tables (numpy arrays, built lazily for big m):
      ADD[a,b], NEG[a], MUL[a,b], INV[a], FROB[a], THETA[a]
      MM[a]  -- the m x m GF(3) matrix of y -> a*y in coefficient coordinates
    """

    def __init__(self, e):
        if e < 0:
            raise ValueError("e must be a non-negative integer")
        self.e = e
        self.m = 2 * e + 1
        self.q = 3**self.m
        self.modulus = smallest_irreducible(self.m)
        self.zero = 0
        self.one = 1
        self._pows3 = tuple(3**i for i in range(self.m))
        self._tables = None
        if self.q <= TABLE_MAX_Q:
            self._build_tables()

    # -- encoding ----------------------------------------------------------

    def coeffs(self, a):
        v = []
        for _ in range(self.m):
            v.append(a % 3)
            a //= 3
        return tuple(v)

    def from_coeffs(self, cs):
        cs = tuple(cs)
        if len(cs) > self.m:
            cs = p_mod(cs, self.modulus)
        return sum((c % 3) * p for c, p in zip(cs, self._pows3))

    def to_str(self, a):
        return "".join(str(d) for d in self.coeffs(a))

    def from_str(self, s):
        s = s.strip()
        if not s or len(s) > self.m or any(ch not in "012" for ch in s):
            raise ValueError(f"bad field element {s!r} for GF(3^{self.m})")
        return sum(int(ch) * 3**i for i, ch in enumerate(s))

    def modulus_str(self):
        terms = []
        for i in range(self.m, -1, -1):
            c = self.modulus[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                x = "x" if i == 1 else f"x^{i}"
                terms.append(x if c == 1 else f"{c}{x}")
        return " + ".join(terms) or "0"

    # -- table construction -------------------------------------------------

    def _build_tables(self):
        q, m = self.q, self.m
        CO = np.zeros((q, m), dtype=np.int8)
        idx = np.arange(q)
        rem = idx.copy()
        for i in range(m):
            CO[:, i] = rem % 3
            rem //= 3
        pows = np.array(self._pows3, dtype=np.int64)

        def encode(digmat):
            return (digmat.astype(np.int64) @ pows).astype(np.int32)

        # multiply-by-x index map
        f_low = np.array(self.modulus[:m], dtype=np.int8)
        shifted = np.zeros((q, m), dtype=np.int8)
        shifted[:, 1:] = CO[:, : m - 1]
        over = CO[:, m - 1]
        SH = encode((shifted - over[:, None] * f_low[None, :]) % 3)

        MX = np.empty((m, q), dtype=np.int32)  # MX[k][a] = x^k * a
        MX[0] = idx
        for k in range(1, m):
            MX[k] = SH[MX[k - 1]]

        ADD = encode((CO[:, None, :] + CO[None, :, :]) % 3)
        NEG = encode((-CO) % 3)

        MUL = np.zeros((q, q), dtype=np.int32)
        for k in range(m):
            term = MX[k][:, None]  # x^k * a, broadcast over b
            bk = CO[:, k][None, :]
            t1 = np.where(bk >= 1, term, 0)
            MUL = ADD[MUL, np.broadcast_to(t1, (q, q))]
            t2 = np.where(bk == 2, term, 0)
            MUL = ADD[MUL, np.broadcast_to(t2, (q, q))]

        INV = np.zeros(q, dtype=np.int32)
        ra, rb = np.nonzero(MUL == 1)
        INV[ra] = rb

        FROB = MUL[idx, MUL[idx, idx]]
        THETA = idx.astype(np.int32)
        for _ in range(self.e + 1):
            THETA = FROB[THETA]

        # MM[a] has column s = coeffs(a * x^s): matrix of y -> a*y on coeffs
        MM = np.zeros((q, m, m), dtype=np.int8)
        for s in range(m):
            MM[:, :, s] = CO[MX[s]]

        self._tables = dict(
            CO=CO, ADD=ADD, NEG=NEG, MUL=MUL, INV=INV, FROB=FROB,
            THETA=THETA, MM=MM,
        )

    @property
    def tables(self):
        if self._tables is None:
            self._build_tables()
        return self._tables

    def has_tables(self):
        return self._tables is not None

    # -- scalar ops ----------------------------------------------------------

    def add(self, a, b):
        if self._tables is not None:
            return int(self._tables["ADD"][a, b])
        return self.from_coeffs(p_add(self.coeffs(a), self.coeffs(b)))

    def neg(self, a):
        if self._tables is not None:
            return int(self._tables["NEG"][a])
        return self.from_coeffs(tuple((-c) % 3 for c in self.coeffs(a)))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self._tables is not None:
            return int(self._tables["MUL"][a, b])
        return self._slow_mul(a, b)

    @lru_cache(maxsize=1 << 16)
    def _slow_mul(self, a, b):
        return self.from_coeffs(
            p_mod(p_mul(self.coeffs(a), self.coeffs(b)), self.modulus))

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(3^m)")
        if self._tables is not None:
            return int(self._tables["INV"][a])
        return self.pow(a, self.q - 2)

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        r, b = 1, a
        while n:
            if n & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            n >>= 1
        return r

    def frobenius(self, a):
        if self._tables is not None:
            return int(self._tables["FROB"][a])
        return self.mul(a, self.mul(a, a))

    def theta(self, a):
        """x -> x^(3^(e+1)), the square root of the Frobenius cubing."""
        if self._tables is not None:
            return int(self._tables["THETA"][a])
        for _ in range(self.e + 1):
            a = self.frobenius(a)
        return a

    # -- misc ----------------------------------------------------------------

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return f"Field(e={self.e}, q={self.q}, modulus={self.modulus_str()})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.e == self.e

    def __hash__(self):
        return hash(("reekit.Field", self.e))


@lru_cache(maxsize=None)
def make_field(e):
    """GF(3^(2e+1)) with the pinned lexicographically-least modulus."""
    return Field(e)


def field_for_q(q):
    m = 0
    v = q
    while v > 1 and v % 3 == 0:
        v //= 3
        m += 1
    if v != 1 or m % 2 == 0:
        raise ValueError(f"q={q} is not an odd power of 3")
    return make_field((m - 1) // 2)
