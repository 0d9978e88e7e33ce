"""Polynomials over F_q: A = F_q[t], F_q[z] and F_q[z][t].

Also: monic prime enumeration, division-free characteristic polynomials of
t-action matrices, Smith-form invariant factors (the slow Fitting oracle) and
small dense linear algebra over F_q.
"""
from functools import lru_cache
import re

import numpy as np

from . import _kernel as K
from .gf import (FieldElem, embed_code, extension, is_irreducible_codes, _pmul)
from .errors import DivisionByZero, NotPrime, SchemaError

SMALL = 400


def _code(F, x):
    if isinstance(x, FieldElem):
        return x.code if x.field == F else embed_code(x.field, F, x.code)
    return F.from_int(x)


class Poly:
    """Univariate polynomial over a finite field, coefficients low degree first.

    ``var`` is only used for printing; A = F_q[t] uses "t" and F_q[z] uses "z".
    """

    __slots__ = ("F", "c", "var")

    def __init__(self, F, coeffs=(), var="t"):
        c = [_code(F, x) if not isinstance(x, (int, np.integer)) else int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.F = F
        self.c = tuple(c)
        self.var = var

    @classmethod
    def _raw(cls, F, c, var="t"):
        obj = cls.__new__(cls)
        obj.F, obj.c, obj.var = F, c, var
        return obj

    @classmethod
    def from_array(cls, F, arr, var="t"):
        return cls._raw(F, tuple(K.trim(np.asarray(arr, dtype=np.int64)).tolist()), var)

    @classmethod
    def const(cls, F, c, var="t"):
        return cls(F, [c], var)

    @classmethod
    def gen(cls, F, var="t"):
        return cls._raw(F, (0, 1), var)

    @classmethod
    def monomial(cls, F, n, c=1, var="t"):
        c = _code(F, c)
        return cls._raw(F, (0,) * n + (c,), var) if c else cls._raw(F, (), var)

    # -- basic queries ---------------------------------------------------------------
    @property
    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    @property
    def lc(self):
        return self.c[-1] if self.c else 0

    def is_monic(self):
        return bool(self.c) and self.c[-1] == 1

    def __getitem__(self, i):
        return self.c[i] if 0 <= i < len(self.c) else 0

    def __len__(self):
        return len(self.c)

    def __eq__(self, o):
        if isinstance(o, Poly):
            return self.c == o.c and self.F == o.F
        if isinstance(o, int):
            return self.c == Poly.const(self.F, o).c
        return NotImplemented

    def __hash__(self):
        return hash((self.F, self.c))

    def _like(self, c):
        return Poly._raw(self.F, c, self.var)

    def _coerce(self, o):
        if isinstance(o, Poly):
            return o
        if isinstance(o, (int, np.integer, FieldElem)):
            return Poly.const(self.F, o, self.var)
        return NotImplemented

    # -- ring operations -------------------------------------------------------------
    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        add = self.F.add
        out = list(a)
        for i, y in enumerate(b):
            out[i] = add[out[i]][y]
        while out and out[-1] == 0:
            out.pop()
        return self._like(tuple(out))

    __radd__ = __add__

    def __neg__(self):
        neg = self.F.neg
        return self._like(tuple(neg[x] for x in self.c))

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, o):
        if not isinstance(o, Poly):
            if not isinstance(o, (int, np.integer, FieldElem)):
                return NotImplemented
            c = _code(self.F, o)
            if c == 0:
                return self._like(())
            row = self.F.mul[c]
            return self._like(tuple(row[x] for x in self.c))
        a, b = self.c, o.c
        if not a or not b:
            return self._like(())
        if len(a) * len(b) <= SMALL:
            return self._like(tuple(_pmul(self.F, a, b)))
        return Poly.from_array(self.F, K.mul(self.F, a, b), self.var)

    __rmul__ = __mul__

    def scale(self, code):
        return self * FieldElem(self.F, code)

    def __pow__(self, n):
        r = Poly.const(self.F, 1, self.var)
        a = self
        while n:
            if n & 1:
                r = r * a
            n >>= 1
            if n:
                a = a * a
        return r

    def __divmod__(self, o):
        o = self._coerce(o)
        if not o.c:
            raise DivisionByZero("polynomial division by zero")
        F = self.F
        a = list(self.c)
        db = o.degree
        if len(a) <= db:
            return self._like(()), self
        inv = F.inv[o.c[-1]]
        qt = [0] * (len(a) - db)
        sub, mul = F.sub, F.mul
        b = o.c
        for i in range(len(a) - 1, db - 1, -1):
            c = a[i]
            if c:
                c = mul[c][inv]
                qt[i - db] = c
                row = mul[c]
                for j in range(db + 1):
                    a[i - db + j] = sub[a[i - db + j]][row[b[j]]]
        return Poly(F, qt, self.var), Poly(F, a[:db], self.var)

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def __mod__(self, o):
        return divmod(self, o)[1]

    def exact_div(self, o):
        qt, r = divmod(self, o)
        if r:
            raise ValueError("inexact polynomial division")
        return qt

    def gcd(self, o):
        a, b = self, self._coerce(o)
        while b:
            a, b = b, a % b
        return a.monic() if a else a

    def monic(self):
        if not self.c:
            return self
        return self.scale(self.F.inv[self.c[-1]])

    def powmod(self, n, m):
        r = Poly.const(self.F, 1, self.var) % m
        a = self % m
        while n:
            if n & 1:
                r = (r * a) % m
            n >>= 1
            if n:
                a = (a * a) % m
        return r

    def __call__(self, x):
        """Evaluate at a field code, FieldElem or polynomial (Horner)."""
        if isinstance(x, Poly):
            r = Poly(x.F, (), x.var)
            for c in reversed(self.c):
                r = r * x + Poly.const(x.F, FieldElem(self.F, c), x.var)
            return r
        if isinstance(x, FieldElem):
            G = x.field
            r = 0
            for c in reversed(self.c):
                r = G.add[G.mul[r][x.code]][embed_code(self.F, G, c)]
            return FieldElem(G, r)
        F = self.F
        r = 0
        for c in reversed(self.c):
            r = F.add[F.mul[r][x]][c]
        return r

    def frob(self, k=1, q=None):
        """tau^k: spread exponents by q^k (coefficients are tau-fixed constants)."""
        if k == 0 or not self.c:
            return self
        q = self.F.size if q is None else q
        return Poly.from_array(self.F, K.spread(self.c, q ** k), self.var)

    def shift(self, n):
        return self._like((0,) * n + self.c) if self.c else self

    def derivative(self):
        F = self.F
        return Poly(F, [F.mul[F.from_int(i)][c] for i, c in enumerate(self.c)][1:], self.var)

    def is_irreducible(self):
        return is_irreducible_codes(self.F, list(self.c))

    def change_field(self, G):
        return Poly(G, [embed_code(self.F, G, c) for c in self.c], self.var)

    def to_json(self):
        return [self.F.coords(c) if not self.F.is_prime else c for c in self.c]

    def __str__(self):
        return format_terms(self.F, {(i, 0): c for i, c in enumerate(self.c) if c}, self.var)

    def __repr__(self):
        return "Poly(%s)" % self


APoly = Poly


def t_var(F):
    return Poly.gen(F, "t")


def z_var(F):
    return Poly.gen(F, "z")


# -- printing and parsing ------------------------------------------------------------

def _coef_str(F, c):
    """(sign, magnitude string) for a nonzero coefficient."""
    if F.is_prime:
        if c > F.p // 2 and F.p > 2:
            return "-", str(F.p - c)
        return "+", str(c)
    if F.base.is_prime:
        terms = {(i, 0): d for i, d in enumerate(F.digits(c)) if d}
        txt = format_terms(F.base, terms, var="a")
        if len(terms) == 1 and not txt.startswith("-"):
            return "+", txt
        return "+", "(%s)" % txt
    return "+", str(F.coords(c)).replace(" ", "")


def format_terms(F, terms, var="t", var2="z"):
    """Render {(i, k): code} as a sum of c*t^i*z^k, t-degree descending, z ascending."""
    if not terms:
        return "0"
    out = []
    for (i, k) in sorted(terms, key=lambda ik: (-ik[0], ik[1])):
        sign, mag = _coef_str(F, terms[(i, k)])
        mono = []
        if i:
            mono.append(var if i == 1 else "%s^%d" % (var, i))
        if k:
            mono.append(var2 if k == 1 else "%s^%d" % (var2, k))
        mono = "*".join(mono)
        if mono:
            body = mono if mag == "1" else "%s*%s" % (mag, mono)
        else:
            body = mag
        out.append((sign, body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += " %s %s" % (sign, body)
    return s


_TOKEN = re.compile(r"\s*(\d+|[a-zA-Z_]\w*|\^|\*|\+|-|\(|\))")


def _tokenize(s):
    pos, toks = 0, []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise SchemaError("cannot parse polynomial %r near %r" % (s, s[pos:]))
        toks.append(m.group(1))
        pos = m.end()
    return toks


class _BiPoly:
    """Sparse {(t_deg, z_deg): code} used only while parsing."""

    def __init__(self, F, terms):
        self.F = F
        self.terms = {k: v for k, v in terms.items() if v}

    def __add__(self, o):
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = self.F.add[t.get(k, 0)][v]
        return _BiPoly(self.F, t)

    def __neg__(self):
        return _BiPoly(self.F, {k: self.F.neg[v] for k, v in self.terms.items()})

    def __mul__(self, o):
        t = {}
        F = self.F
        for (i, k), v in self.terms.items():
            for (j, l), w in o.terms.items():
                key = (i + j, k + l)
                t[key] = F.add[t.get(key, 0)][F.mul[v][w]]
        return _BiPoly(F, t)

    def __pow__(self, n):
        r = _BiPoly(self.F, {(0, 0): 1})
        for _ in range(n):
            r = r * self
        return r


def _parse(F, s):
    toks = _tokenize(str(s))
    pos = [0]

    def peek():
        return toks[pos[0]] if pos[0] < len(toks) else None

    def take():
        tok = peek()
        pos[0] += 1
        return tok

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
        v = term()
        if sign < 0:
            v = -v
        while peek() in ("+", "-"):
            op = take()
            w = term()
            v = v + (-w if op == "-" else w)
        return v

    def term():
        v = power()
        while True:
            if peek() == "*":
                take()
                v = v * power()
            elif peek() is not None and peek() not in ("+", "-", ")", "^"):
                v = v * power()
            else:
                return v

    def power():
        v = atom()
        if peek() == "^":
            take()
            n = take()
            if n is None or not n.isdigit():
                raise SchemaError("bad exponent in %r" % s)
            v = v ** int(n)
        return v

    def atom():
        tok = take()
        if tok is None:
            raise SchemaError("unexpected end of %r" % s)
        if tok == "(":
            v = expr()
            if take() != ")":
                raise SchemaError("unbalanced parentheses in %r" % s)
            return v
        if tok.isdigit():
            return _BiPoly(F, {(0, 0): F.from_int(int(tok))})
        if tok in ("t", "T", "theta"):
            return _BiPoly(F, {(1, 0): 1})
        if tok == "z":
            return _BiPoly(F, {(0, 1): 1})
        if tok == "a" and not F.is_prime:
            return _BiPoly(F, {(0, 0): F.q})
        raise SchemaError("unknown symbol %r in %r" % (tok, s))

    v = expr()
    if pos[0] != len(toks):
        raise SchemaError("trailing input in %r" % s)
    return v.terms


def parse_apoly(F, s):
    """Parse a string such as "t^2 + 1" or "2*t - 1" into an element of F_q[t]."""
    if isinstance(s, Poly):
        return s
    if isinstance(s, (list, tuple)):
        return Poly(F, [F.from_coords(c) if isinstance(c, list) else c for c in s])
    if isinstance(s, int):
        return Poly.const(F, s)
    terms = _parse(F, s)
    if any(k for (_, k) in terms):
        raise SchemaError("unexpected variable z in %r" % s)
    deg = max((i for (i, _) in terms), default=-1)
    c = [0] * (deg + 1)
    for (i, _), v in terms.items():
        c[i] = v
    return Poly(F, c)


def parse_azpoly(F, s):
    terms = _parse(F, s)
    return AZPoly.from_terms(F, terms)


# -- F_q[z][t] -----------------------------------------------------------------------

class AZPoly:
    """Element of F_q[z][t], stored t-major: ``c[i]`` is the F_q[z] coefficient of t^i."""

    __slots__ = ("F", "c")

    def __init__(self, F, coeffs):
        c = [x if isinstance(x, Poly) else Poly(F, x, "z") for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        self.F = F
        self.c = tuple(c)

    @classmethod
    def from_terms(cls, F, terms):
        deg = max((i for (i, _) in terms), default=-1)
        rows = [{} for _ in range(deg + 1)]
        for (i, k), v in terms.items():
            rows[i][k] = v
        out = []
        for r in rows:
            m = max(r, default=-1)
            out.append(Poly(F, [r.get(k, 0) for k in range(m + 1)], "z"))
        return cls(F, out)

    @classmethod
    def from_apoly(cls, a):
        return cls(a.F, [Poly(a.F, (x,), "z") for x in a.c])

    @classmethod
    def from_z_coeffs(cls, F, zc):
        """Build from a list of A-coefficients of z^0, z^1, ..."""
        deg = max((a.degree for a in zc), default=-1)
        rows = []
        for i in range(deg + 1):
            rows.append(Poly(F, [a[i] for a in zc], "z"))
        return cls(F, rows)

    @property
    def degree(self):
        return len(self.c) - 1

    @property
    def z_degree(self):
        return max((p.degree for p in self.c), default=-1)

    def is_zero(self):
        return not self.c

    def is_monic(self):
        return bool(self.c) and self.c[-1].c == (1,)

    def theta_coeff(self, i):
        return self.c[i] if 0 <= i < len(self.c) else Poly(self.F, (), "z")

    def z_coeff(self, k):
        return Poly(self.F, [p[k] for p in self.c])

    def z_coeffs(self):
        return [self.z_coeff(k) for k in range(self.z_degree + 1)]

    def terms(self):
        return {(i, k): v for i, p in enumerate(self.c) for k, v in enumerate(p.c) if v}

    def _coerce(self, o):
        if isinstance(o, AZPoly):
            return o
        if isinstance(o, Poly):
            if o.var == "z":
                return AZPoly(self.F, [o])
            return AZPoly.from_apoly(o)
        if isinstance(o, (int, np.integer, FieldElem)):
            return AZPoly(self.F, [Poly.const(self.F, o, "z")])
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = out[i] + y
        return AZPoly(self.F, out)

    __radd__ = __add__

    def __neg__(self):
        return AZPoly(self.F, [-p for p in self.c])

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, o):
        if not isinstance(o, (AZPoly, Poly)):
            if not isinstance(o, (int, np.integer, FieldElem)):
                return NotImplemented
            return AZPoly(self.F, [p * o for p in self.c])
        o = self._coerce(o)
        if not self.c or not o.c:
            return AZPoly(self.F, [])
        za, zb = self.z_degree, o.z_degree
        s = za + zb + 1
        fa = np.zeros(len(self.c) * s, dtype=np.int64)
        fb = np.zeros(len(o.c) * s, dtype=np.int64)
        for i, p in enumerate(self.c):
            fa[i * s:i * s + len(p.c)] = p.c
        for i, p in enumerate(o.c):
            fb[i * s:i * s + len(p.c)] = p.c
        prod = K.mul(self.F, fa, fb)
        m = len(self.c) + len(o.c) - 1
        full = np.zeros(m * s, dtype=np.int64)
        full[:len(prod)] = prod[:m * s]
        rows = full.reshape(m, s)
        return AZPoly(self.F, [Poly.from_array(self.F, r, "z") for r in rows])

    __rmul__ = __mul__

    def __pow__(self, n):
        r = AZPoly(self.F, [Poly.const(self.F, 1, "z")])
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, o):
        if isinstance(o, AZPoly):
            return self.F == o.F and self.c == o.c
        if isinstance(o, Poly):
            return self == self._coerce(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.F, self.c))

    def frob(self, k=1, q=None):
        q = self.F.size if q is None else q
        if k == 0 or not self.c:
            return self
        step = q ** k
        out = [Poly(self.F, (), "z")] * ((len(self.c) - 1) * step + 1)
        for i, p in enumerate(self.c):
            out[i * step] = p
        return AZPoly(self.F, out)

    def eval_z(self, x):
        """Substitute z = x (code of F, int, or FieldElem of an extension)."""
        if isinstance(x, FieldElem) and x.field != self.F:
            G = x.field
            return Poly(G, [p(x).code for p in self.c])
        x = _code(self.F, x)
        return Poly(self.F, [p(x) for p in self.c])

    def z_shift(self, n):
        return AZPoly(self.F, [p.shift(n) for p in self.c])

    def to_apoly(self):
        if self.z_degree > 0:
            raise ValueError("polynomial depends on z")
        return Poly(self.F, [p[0] for p in self.c])

    def to_json(self):
        return [p.to_json() for p in self.c]

    def __str__(self):
        return format_terms(self.F, self.terms())

    def __repr__(self):
        return "AZPoly(%s)" % self


# -- primes --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _primes_of_degree(F, n):
    q = F.size
    if n == 1:
        return tuple(Poly._raw(F, (c, 1)) for c in range(q))
    composite = bytearray(q ** n)
    for k in range(1, n // 2 + 1):
        for r in _primes_of_degree(F, k):
            for idx in range(q ** (n - k)):
                m = _index_poly(F, idx, n - k)
                prod = _pmul(F, r.c, m)
                composite[_poly_index(F, prod)] = 1
    out = [Poly._raw(F, tuple(_index_poly(F, idx, n))) for idx in range(q ** n) if not composite[idx]]
    out.sort(key=lambda P: P.c)
    return tuple(out)


def _index_poly(F, idx, n):
    c = []
    for _ in range(n):
        idx, r = divmod(idx, F.size)
        c.append(r)
    return c + [1]


def _poly_index(F, c):
    idx = 0
    for x in reversed(c[:-1]):
        idx = idx * F.size + x
    return idx


def monic_primes(F, deg_bound):
    """All monic irreducibles of degree <= deg_bound, sorted by (degree, coefficients low first)."""
    out = []
    for n in range(1, deg_bound + 1):
        out.extend(_primes_of_degree(F, n))
    return out


def primes_of_degree(F, n):
    return list(_primes_of_degree(F, n))


def necklace_count(q, n):
    def mobius(m):
        res, d = 1, 2
        while d * d <= m:
            if m % d == 0:
                m //= d
                if m % d == 0:
                    return 0
                res = -res
            d += 1
        return -res if m > 1 else res
    return sum(mobius(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0) // n


def require_prime(P):
    if not P.is_monic() or not P.is_irreducible():
        raise NotPrime("%s is not a monic irreducible polynomial" % P)
    return P


def residue_field(P):
    """F_P = F_q[t]/(P) as a field extension (F_q itself when deg P = 1)."""
    require_prime(P)
    return extension(P.F, P.c)


def residue_code(P, a):
    """Class of the polynomial a in F_P = F_q[t]/(P), as a code of residue_field(P)."""
    FP = residue_field(P)
    r = a % P
    if P.degree == 1:
        return r[0]
    return FP.from_digits(list(r.c) + [0] * (P.degree - len(r.c)))


# -- matrices over F_q ---------------------------------------------------------------

def mat_mul(F, A, B):
    n, m, k = len(A), len(B), len(B[0]) if B else 0
    add, mul = F.add, F.mul
    out = [[0] * k for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        row = out[i]
        for l in range(m):
            a = Ai[l]
            if a:
                ma = mul[a]
                Bl = B[l]
                for j in range(k):
                    row[j] = add[row[j]][ma[Bl[j]]]
    return out


def mat_vec(F, A, v):
    add, mul = F.add, F.mul
    out = []
    for row in A:
        s = 0
        for a, x in zip(row, v):
            if a and x:
                s = add[s][mul[a][x]]
        out.append(s)
    return out


def rref(F, M):
    """Row-reduced echelon form; returns (rows, pivot columns)."""
    M = [list(r) for r in M]
    rows, cols = len(M), len(M[0]) if M else 0
    piv = []
    r = 0
    sub, mul, inv = F.sub, F.mul, F.inv
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        s = inv[M[r][c]]
        M[r] = [mul[s][x] for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                mf = mul[f]
                M[i] = [sub[x][mf[y]] for x, y in zip(M[i], M[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return M[:r], piv


def nullspace(F, M, ncols=None):
    """Basis of {x : M x = 0} as a list of vectors."""
    ncols = len(M[0]) if M else (ncols or 0)
    R, piv = rref(F, M) if M else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, piv):
            v[pc] = F.neg[row[f]]
        basis.append(v)
    return basis


# -- t-action matrices, characteristic polynomials, invariant factors ------------------

class ThetaActionMatrix:
    """Square matrix of the t-action on a finite module, over F_q or F_q[z].

    Entries are field codes when ``over_z`` is False, and ``Poly`` objects in z
    otherwise.  Columns are images of basis vectors.
    """

    def __init__(self, F, rows, over_z=False):
        self.F = F
        self.rows = [list(r) for r in rows]
        self.over_z = over_z
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix is not square")

    @property
    def N(self):
        return len(self.rows)

    def eval_z(self, x):
        if not self.over_z:
            return self
        if isinstance(x, FieldElem) and x.field != self.F:
            G = x.field
            return ThetaActionMatrix(G, [[e(x).code for e in r] for r in self.rows])
        x = _code(self.F, x)
        return ThetaActionMatrix(self.F, [[e(x) for e in r] for r in self.rows])

    def to_json(self):
        if self.over_z:
            return [[str(e) for e in r] for r in self.rows]
        return [[self.F.coords(e) if not self.F.is_prime else e for e in r] for r in self.rows]


class _CodeRing:
    def __init__(self, F):
        self.F = F
        self.zero, self.one = 0, 1

    def add(self, a, b):
        return self.F.add[a][b]

    def mul(self, a, b):
        return self.F.mul[a][b]

    def neg(self, a):
        return self.F.neg[a]


class _ZRing:
    def __init__(self, F):
        self.zero = Poly(F, (), "z")
        self.one = Poly.const(F, 1, "z")

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a


def berkowitz(ring, A):
    """Coefficients (highest degree first) of det(xI - A) without divisions."""
    n = len(A)
    p = [ring.one]
    for k in range(n - 1, -1, -1):
        m = n - k
        a = A[k][k]
        R = A[k][k + 1:]
        C = [A[i][k] for i in range(k + 1, n)]
        sub = [row[k + 1:] for row in A[k + 1:]]
        t = [ring.one, ring.neg(a)]
        v = C
        for _ in range(m - 1):
            s = ring.zero
            for x, y in zip(R, v):
                s = ring.add(s, ring.mul(x, y))
            t.append(ring.neg(s))
            if len(t) == m + 1:
                break
            v = [_dot(ring, row, v) for row in sub]
        newp = []
        for i in range(m + 1):
            s = ring.zero
            for j in range(max(0, i - len(t) + 1), min(i, len(p) - 1) + 1):
                s = ring.add(s, ring.mul(t[i - j], p[j]))
            newp.append(s)
        p = newp
    return p


def _dot(ring, row, v):
    s = ring.zero
    for x, y in zip(row, v):
        s = ring.add(s, ring.mul(x, y))
    return s


def hessenberg_charpoly(F, A):
    """Coefficients (lowest degree first) of det(xI - A) over a field, via Hessenberg form."""
    n = len(A)
    H = [list(r) for r in A]
    add, sub, mul, inv = F.add, F.sub, F.mul, F.inv
    for j in range(n - 2):
        piv = next((i for i in range(j + 1, n) if H[i][j]), None)
        if piv is None:
            continue
        if piv != j + 1:
            H[j + 1], H[piv] = H[piv], H[j + 1]
            for row in H:
                row[j + 1], row[piv] = row[piv], row[j + 1]
        hinv = inv[H[j + 1][j]]
        for i in range(j + 2, n):
            if not H[i][j]:
                continue
            u = mul[H[i][j]][hinv]
            mu = mul[u]
            Ri, Rp = H[i], H[j + 1]
            for k in range(n):
                if Rp[k]:
                    Ri[k] = sub[Ri[k]][mu[Rp[k]]]
            for row in H:
                if row[i]:
                    row[j + 1] = add[row[j + 1]][mu[row[i]]]
    p = [[1]]
    for m in range(1, n + 1):
        # p_m = (x - h_mm) p_{m-1} - sum_i t_i h_{m-i,m} p_{m-i-1}
        prev = p[m - 1]
        cur = [0] + prev
        h = H[m - 1][m - 1]
        if h:
            for k, c in enumerate(prev):
                cur[k] = sub[cur[k]][mul[h][c]]
        t = 1
        for i in range(1, m):
            t = mul[t][H[m - i][m - i - 1]]
            if not t:
                break
            f = mul[t][H[m - i - 1][m - 1]]
            if f:
                for k, c in enumerate(p[m - i - 1]):
                    cur[k] = sub[cur[k]][mul[f][c]]
        p.append(cur)
    return p[n]


def _interp_field(F, degree_bound):
    """An extension of F with more than ``degree_bound`` elements, or None if too large."""
    from .gf import extension_of_degree, TABLE_LIMIT
    k = 1
    while F.size ** k <= degree_bound:
        k += 1
    if F.size ** k > TABLE_LIMIT:
        return None
    return F if k == 1 else extension_of_degree(F, k)


def _newton_interp(G, xs, ys):
    """Coefficients (low first) of the polynomial through (xs, ys) over G."""
    n = len(xs)
    add, sub, mul, inv = G.add, G.sub, G.mul, G.inv
    c = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            c[i] = mul[sub[c[i]][c[i - 1]]][inv[sub[xs[i]][xs[i - j]]]]
    out = [0] * n
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + c[i]
        nxt = [0] * n
        for k in range(n - 1):
            if out[k]:
                nxt[k + 1] = add[nxt[k + 1]][out[k]]
        for k in range(n):
            if out[k]:
                nxt[k] = sub[nxt[k]][mul[xs[i]][out[k]]]
        nxt[0] = add[nxt[0]][c[i]]
        out = nxt
    return out


def charpoly_z_interp(M):
    """det(tI - M(z)) by evaluating z at points of an extension field and interpolating.

    Returns None when no small enough evaluation field exists.
    """
    F = M.F
    n = M.N
    zdeg = max((e.degree for r in M.rows for e in r), default=0)
    bound = max(zdeg, 0) * n
    G = _interp_field(F, bound)
    if G is None:
        return None
    pts = list(range(bound + 1))
    vals = []
    for c in pts:
        rows = [[_eval_codes(G, e, c) for e in r] for r in M.rows]
        vals.append(hessenberg_charpoly(G, rows))
    coeffs = []
    for j in range(n + 1):
        zc = _newton_interp(G, pts, [v[j] for v in vals])
        if any(x >= F.size for x in zc):
            raise ArithmeticError("interpolated coefficient outside the base field")
        coeffs.append(Poly(F, zc, "z"))
    return AZPoly(F, coeffs)


def _eval_codes(G, e, c):
    acc = 0
    for a in reversed(e.c):
        acc = G.add[G.mul[acc][c]][a]
    return acc


def charpoly_theta(M, method="auto"):
    """det(tI - M): an APoly for matrices over F_q, an AZPoly over F_q[z].

    ``method`` is "berkowitz" (division free), "hessenberg"/"interp" (field
    arithmetic, with evaluation in z for z-matrices) or "auto".
    """
    if M.over_z:
        if method in ("auto", "interp", "hessenberg") and (method != "auto" or M.N > 2):
            out = charpoly_z_interp(M)
            if out is not None:
                return out
        coeffs = berkowitz(_ZRing(M.F), M.rows)
        return AZPoly(M.F, list(reversed(coeffs)))
    if method == "berkowitz":
        coeffs = berkowitz(_CodeRing(M.F), M.rows)
        return Poly(M.F, list(reversed(coeffs)))
    return Poly(M.F, hessenberg_charpoly(M.F, M.rows))


def matrix_poly_eval(F, f, M):
    """f(M) for f in F_q[t] and a square code matrix M (Horner)."""
    n = len(M)
    R = [[0] * n for _ in range(n)]
    for c in reversed(f.c):
        R = mat_mul(F, R, M)
        for i in range(n):
            R[i][i] = F.add[R[i][i]][c]
    return R


def invariant_factors(M):
    """Nonunit invariant factors of tI - M over F_q[t], by Smith reduction."""
    F = M.F
    n = M.N
    t = t_var(F)
    A = [[(t if i == j else Poly(F)) - Poly.const(F, M.rows[i][j]) for j in range(n)] for i in range(n)]
    for k in range(n):
        while True:
            best = None
            for i in range(k, n):
                for j in range(k, n):
                    if A[i][j] and (best is None or A[i][j].degree < A[best[0]][best[1]].degree):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            A[k], A[i] = A[i], A[k]
            for row in A:
                row[k], row[j] = row[j], row[k]
            piv = A[k][k]
            clean = True
            for i in range(k + 1, n):
                if A[i][k]:
                    qt, r = divmod(A[i][k], piv)
                    A[i] = [x - qt * y for x, y in zip(A[i], A[k])]
                    if r:
                        clean = False
            for j in range(k + 1, n):
                if A[k][j]:
                    qt, r = divmod(A[k][j], piv)
                    for row in A:
                        row[j] = row[j] - qt * row[k]
                    if r:
                        clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(k + 1, n) for j in range(k + 1, n)
                        if A[i][j] % piv), None)
            if bad is None:
                break
            A[k] = [x + y for x, y in zip(A[k], A[bad[0]])]
    diag = [A[i][i].monic() for i in range(n)]
    return [d for d in diag if d.degree > 0]
