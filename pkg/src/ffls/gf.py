"""Finite fields F_p, F_q = F_p[x]/(f) and extensions F_q[x]/(g).

Elements are plain integer codes: the code of sum c_i x^i is sum c_i * b^i where
b is the size of the base field and c_i are base-field codes.  Small fields keep
full addition and multiplication tables, so element arithmetic is a lookup.
"""
from functools import lru_cache
import itertools

import numpy as np

from .errors import NonPrime, ReducibleModulus, NoEmbedding

TABLE_LIMIT = 1024


def is_prime_int(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class GF:
    """A finite field base[x]/(modulus), or the prime field F_p when base is None.

    ``q`` is the size of the base field, so ``frob`` is the relative Frobenius
    x -> x^q.  Codes run over ``range(size)``.
    """

    def __init__(self, p, modulus=(0, 1), base=None):
        self.p = p
        self.base = base
        self.modulus = tuple(int(c) for c in modulus)
        self.degree = len(self.modulus) - 1
        self.is_prime = base is None
        self.q = p if base is None else base.size
        self.size = self.q ** self.degree
        self.abs_degree = self.degree * (1 if base is None else base.abs_degree)
        self._frob_map = None
        self._tables()

    # -- construction of lookup tables ---------------------------------------------
    def _tables(self):
        n = self.size
        if n > TABLE_LIMIT:
            raise ValueError("field of size %d is too large for table arithmetic" % n)
        if self.is_prime:
            r = np.arange(n)
            self.add_np = (r[:, None] + r[None, :]) % n
            self.mul_np = (r[:, None] * r[None, :]) % n
        else:
            digits = self.digits_np(np.arange(n))
            b = self.base
            # addition is digitwise in the base field
            acc = np.zeros((n, n), dtype=np.int64)
            w = 1
            for i in range(self.degree):
                acc += b.add_np[digits[:, i][:, None], digits[:, i][None, :]] * w
                w *= self.q
            self.add_np = acc
            self.mul_np = self._mul_table(digits)
        self.add = self.add_np.tolist()
        self.mul = self.mul_np.tolist()
        self.neg = [self.add[a].index(0) for a in range(n)]
        self.sub_np = self.add_np[:, self.neg]
        self.sub = self.sub_np.tolist()
        inv = [0] * n
        for a in range(1, n):
            inv[a] = self.mul[a].index(1)
        self.inv = inv
        self.neg_np = np.array(self.neg, dtype=np.int64)
        self.inv_np = np.array(inv, dtype=np.int64)

    def _mul_table(self, digits):
        n, e = self.size, self.degree
        # xa[i] = x^i * a for every a, built by repeated multiplication by x
        shift = np.zeros(n, dtype=np.int64)
        for a in range(n):
            shift[a] = self._times_x(digits[a].tolist())
        table = np.zeros((n, n), dtype=np.int64)
        xa = np.arange(n, dtype=np.int64)
        for i in range(e):
            # contribution of digit b_i of the second factor: b_i * (x^i a)
            bi = digits[:, i]
            table = self.add_np[table, self._scale_all(bi, xa)] if i else self._scale_all(bi, xa)
            xa = shift[xa]
        return table

    def _scale_all(self, scalars, elems):
        """Matrix s_j * elems_a for base scalars s_j (rows j) and elements a (cols)."""
        d = self.digits_np(elems)
        out = np.zeros((len(scalars), len(elems)), dtype=np.int64)
        w = 1
        for i in range(self.degree):
            out += self.base.mul_np[scalars[:, None], d[:, i][None, :]] * w
            w *= self.q
        return out

    def _times_x(self, dg):
        b = self.base
        e = self.degree
        top = dg[-1]
        new = [0] + dg[:-1]
        if top:
            for i in range(e):
                new[i] = b.sub[new[i]][b.mul[top][self.modulus[i]]]
        return self.from_digits(new)

    # -- coordinates ---------------------------------------------------------------
    def digits(self, a):
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, self.q)
            out.append(r)
        return out

    def digits_np(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        w = self.q ** np.arange(self.degree, dtype=np.int64)
        return (codes[..., None] // w) % self.q

    def from_digits(self, dg):
        c = 0
        for d in reversed(list(dg)):
            c = c * self.q + int(d)
        return c

    def coords(self, a):
        """Coordinates over F_p, nested for towers (JSON form of an element)."""
        if self.is_prime:
            return [a]
        if self.base.is_prime:
            return self.digits(a)
        return [self.base.coords(d) for d in self.digits(a)]

    def from_coords(self, c):
        if self.is_prime:
            return int(c[0] if isinstance(c, (list, tuple)) else c) % self.p
        if self.base.is_prime:
            return self.from_digits([int(v) % self.p for v in c])
        return self.from_digits([self.base.from_coords(v) for v in c])

    # -- scalar arithmetic ---------------------------------------------------------
    def pow(self, a, n):
        if n < 0:
            a, n = self.inv[a], -n
        r = 1
        mul = self.mul
        while n:
            if n & 1:
                r = mul[r][a]
            a = mul[a][a]
            n >>= 1
        return r

    def frob(self, a, k=1):
        """a^(q^k) for the base-relative Frobenius."""
        if self.is_prime:
            return a
        k %= self.degree
        if not k:
            return a
        if self._frob_map is None:
            self._frob_map = [self.pow(x, self.q) for x in range(self.size)]
        f = self._frob_map
        for _ in range(k):
            a = f[a]
        return a

    def frob_map(self, k=1):
        return [self.frob(a, k) for a in range(self.size)]

    def from_int(self, n):
        """Image of the integer n under Z -> F_p -> this field."""
        n %= self.p
        return n if self.is_prime else self.from_digits([self.base.from_int(n)])

    def embed_base(self, c):
        """Image of a base-field code as a constant of this field."""
        return c

    def element(self, code):
        return FieldElem(self, code)

    def elements(self):
        return [FieldElem(self, a) for a in range(self.size)]

    def tower(self):
        f, out = self, []
        while f is not None:
            out.append(f)
            f = f.base
        return out

    def prime_field(self):
        return self.tower()[-1]

    def contains_subfield(self, other):
        return other in self.tower()

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.modulus, self.base) == (other.p, other.modulus, other.base)

    def __hash__(self):
        return hash((self.p, self.modulus, self.base))

    def __repr__(self):
        if self.is_prime:
            return "GF(%d)" % self.p
        return "GF(%d^%d, modulus=%s)" % (self.p, self.abs_degree, list(self.modulus))

    def to_json(self):
        if self.is_prime:
            return {"p": self.p, "e": 1}
        if self.base.is_prime:
            return {"p": self.p, "e": self.degree, "modulus": list(self.modulus)}
        return {"base": self.base.to_json(), "modulus": [self.base.coords(c) for c in self.modulus]}


class FieldElem:
    """A field element with operator overloading; a thin wrapper around a code."""

    __slots__ = ("field", "code")

    def __init__(self, field, code):
        self.field = field
        self.code = int(code)

    def _other(self, o):
        if isinstance(o, FieldElem):
            if o.field is not self.field and o.field != self.field:
                o = embed(o, self.field)
            return o.code
        return self.field.from_int(o)

    def __add__(self, o):
        return FieldElem(self.field, self.field.add[self.code][self._other(o)])

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElem(self.field, self.field.sub[self.code][self._other(o)])

    def __rsub__(self, o):
        return FieldElem(self.field, self.field.sub[self._other(o)][self.code])

    def __neg__(self):
        return FieldElem(self.field, self.field.neg[self.code])

    def __mul__(self, o):
        return FieldElem(self.field, self.field.mul[self.code][self._other(o)])

    __rmul__ = __mul__

    def inverse(self):
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElem(self.field, self.field.inv[self.code])

    def __truediv__(self, o):
        o = self._other(o)
        if o == 0:
            raise ZeroDivisionError("division by zero")
        return FieldElem(self.field, self.field.mul[self.code][self.field.inv[o]])

    def __pow__(self, n):
        return FieldElem(self.field, self.field.pow(self.code, n))

    def __eq__(self, o):
        if isinstance(o, FieldElem):
            return self.field == o.field and self.code == o.code
        if isinstance(o, int):
            return self.code == self.field.from_int(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.code))

    def __bool__(self):
        return self.code != 0

    @property
    def coeffs(self):
        return self.field.coords(self.code)

    def __repr__(self):
        return "FieldElem(%s)" % self.coeffs


# -- polynomials over a field given as code lists (low degree first) ---------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    add, mul = F.add, F.mul
    for i, x in enumerate(a):
        if x:
            row = mul[x]
            for j, y in enumerate(b):
                out[i + j] = add[out[i + j]][row[y]]
    return _trim(out)


def _pmod(F, a, m):
    a = list(a)
    dm = len(m) - 1
    inv_lc = F.inv[m[-1]]
    sub, mul = F.sub, F.mul
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            c = mul[c][inv_lc]
            for j in range(dm + 1):
                a[i - dm + j] = sub[a[i - dm + j]][mul[c][m[j]]]
    return _trim(a[:dm])


def _pgcd(F, a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pmod(F, a, b)
    return a


def _ppowmod(F, a, n, m):
    r = [1]
    a = _pmod(F, a, m)
    while n:
        if n & 1:
            r = _pmod(F, _pmul(F, r, a), m)
        a = _pmod(F, _pmul(F, a, a), m)
        n >>= 1
    return r


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_codes(F, f):
    """Rabin's test for a polynomial (code list, low first) over the field F."""
    f = _trim(f)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    s = F.size

    def xpow(k):
        return _ppowmod(F, x, s ** k, f)

    for r in _prime_factors(n):
        h = xpow(n // r)
        h = _trim(h + [0] * (2 - len(h)))
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = F.sub[diff[1]][1]
        if len(_pgcd(F, f, _trim(diff))) != 1:
            return False
    h = list(xpow(n)) + [0, 0]
    h[1] = F.sub[h[1]][1]
    return not _trim(h)


@lru_cache(maxsize=None)
def smallest_irreducible(F, n):
    """Lexicographically smallest monic irreducible of degree n over F (low coefficients first)."""
    for tail in itertools.product(range(F.size), repeat=n):
        f = list(tail) + [1]
        if is_irreducible_codes(F, f):
            return tuple(f)
    raise ReducibleModulus("no irreducible polynomial of degree %d" % n)


@lru_cache(maxsize=None)
def prime_field(p):
    if not is_prime_int(p):
        raise NonPrime("%d is not prime" % p)
    return GF(p)


@lru_cache(maxsize=None)
def _field_make(p, e, modulus):
    Fp = prime_field(p)
    if e == 1 and modulus == (0, 1):
        return Fp
    if len(modulus) != e + 1 or modulus[-1] != 1:
        raise ReducibleModulus("modulus must be monic of degree %d" % e)
    if not is_irreducible_codes(Fp, list(modulus)):
        raise ReducibleModulus("modulus %s is reducible over F_%d" % (list(modulus), p))
    if e == 1:
        # F_p[x]/(x - a) is F_p again
        return Fp
    return GF(p, modulus, Fp)


def field_make(p, e=1, modulus="auto"):
    """F_{p^e} as F_p[x]/(modulus); ``"auto"`` picks the smallest irreducible."""
    if not is_prime_int(p):
        raise NonPrime("%d is not prime" % p)
    if e < 1:
        raise ValueError("extension degree must be positive")
    if modulus == "auto":
        modulus = (0, 1) if e == 1 else smallest_irreducible(prime_field(p), e)
    return _field_make(p, e, tuple(int(c) % p for c in modulus))


@lru_cache(maxsize=None)
def extension(base, modulus):
    """base[x]/(modulus) for a monic irreducible modulus given as base codes."""
    modulus = tuple(modulus)
    if modulus[-1] != 1:
        raise ReducibleModulus("modulus must be monic")
    if not is_irreducible_codes(base, list(modulus)):
        raise ReducibleModulus("modulus is reducible over the base field")
    if len(modulus) == 2:
        return base
    return GF(base.p, modulus, base)


def extension_of_degree(base, n):
    return extension(base, smallest_irreducible(base, n))


def frobenius(x, k=1):
    """x^(q^k) where q is the size of the field x is defined over."""
    return FieldElem(x.field, x.field.frob(x.code, k))


def _lex_key(F, code):
    return tuple(F.digits(code)) if not F.is_prime else (code,)


def _poly_eval(F, coeffs, x):
    r = 0
    for c in reversed(coeffs):
        r = F.add[F.mul[r][x]][c]
    return r


@lru_cache(maxsize=None)
def _embedding(source, target):
    """Function code -> code realising a fixed embedding source -> target."""
    if source == target:
        return lambda c: c
    if source.is_prime:
        return target.from_int
    if target.contains_subfield(source):
        chain = target.tower()
        chain = chain[: chain.index(source)]

        def up(c):
            for f in reversed(chain):
                c = f.from_digits([c])
            return c
        return up
    if source.base is None or source.base not in target.tower():
        raise NoEmbedding("no common base field for %r -> %r" % (source, target))
    if (target.abs_degree % source.abs_degree) != 0:
        raise NoEmbedding("degree %d does not divide %d" % (source.abs_degree, target.abs_degree))
    lift = _embedding(source.base, target)
    mod = [lift(c) for c in source.modulus]
    roots = [a for a in range(target.size) if _poly_eval(target, mod, a) == 0]
    if not roots:
        raise NoEmbedding("modulus has no root in target")
    root = min(roots, key=lambda a: _lex_key(target, a))

    def emb(c):
        return _poly_eval(target, [lift(d) for d in source.digits(c)], root)
    return emb


def embed(x, target):
    """Image of x in ``target`` under the smallest-root embedding."""
    return FieldElem(target, _embedding(x.field, target)(x.code))


def embed_code(source, target, code):
    return _embedding(source, target)(code)
