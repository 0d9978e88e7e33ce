"""Exact elements of K = F_q(t) whose denominators are products of t^(q^k) - t.

Every exp/log coefficient of a t-module over A has such a denominator, so a
numerator plus an exponent vector is an exact, gcd-free representation.  Sums
use the exponentwise maximum as common denominator; large numerator products
go through the Kronecker kernel.
"""
from functools import lru_cache

import numpy as np

from . import _kernel as K
from .apoly import Poly
from .gf import FieldElem


@lru_cache(maxsize=4096)
def _atom_power(F, q, k, e):
    """(t^(q^k) - t)^e as a code array."""
    if e == 0:
        return np.array([1], dtype=np.int64)
    base = np.zeros(q ** k + 1, dtype=np.int64)
    base[q ** k] = 1
    base[1] = F.neg[1]
    out = None
    j = 0
    while e:
        e, dgt = divmod(e, q)
        if dgt:
            small = np.array([1], dtype=np.int64)
            for _ in range(dgt):
                small = K.mul(F, small, base)
            piece = K.spread(small, q ** j)
            out = piece if out is None else K.mul(F, out, piece)
        j += 1
    return out


def atom_power(F, q, k, e):
    return _atom_power(F, q, k, e)


class FFrac:
    """num / prod_k (t^(q^k) - t)^den[k]."""

    __slots__ = ("F", "q", "num", "den")

    def __init__(self, F, q, num, den=None):
        self.F = F
        self.q = q
        self.num = K.trim(np.asarray(num, dtype=np.int64))
        self.den = {k: e for k, e in (den or {}).items() if e}
        if not len(self.num):
            self.den = {}

    @classmethod
    def from_poly(cls, a, q=None):
        return cls(a.F, a.F.size if q is None else q, a.c)

    def _coerce(self, o):
        if isinstance(o, FFrac):
            return o
        if isinstance(o, Poly):
            return FFrac(self.F, self.q, o.c)
        if isinstance(o, FieldElem):
            return FFrac(self.F, self.q, [o.code])
        if isinstance(o, int):
            return FFrac(self.F, self.q, [self.F.from_int(o)])
        return NotImplemented

    def is_zero(self):
        return not len(self.num)

    def is_exact_zero(self):
        return self.is_zero()

    def _scaled_num(self, den):
        num = self.num
        for k, e in den.items():
            extra = e - self.den.get(k, 0)
            if extra:
                num = K.mul(self.F, num, atom_power(self.F, self.q, k, extra))
        return num

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        den = dict(self.den)
        for k, e in o.den.items():
            den[k] = max(den.get(k, 0), e)
        num = K.add(self.F, self._scaled_num(den), o._scaled_num(den))
        return FFrac(self.F, self.q, num, den)

    __radd__ = __add__

    def __neg__(self):
        return FFrac(self.F, self.q, K.neg(self.F, self.num), self.den)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            return FFrac(self.F, self.q, [])
        den = dict(self.den)
        for k, e in o.den.items():
            den[k] = den.get(k, 0) + e
        return FFrac(self.F, self.q, K.mul(self.F, self.num, o.num), den)

    __rmul__ = __mul__

    def div_delta(self, n, times=1):
        """Divide by (t^(q^n) - t)^times."""
        if self.is_zero():
            return self
        den = dict(self.den)
        den[n] = den.get(n, 0) + times
        return FFrac(self.F, self.q, self.num, den)

    def frob(self, k=1, q=None, cap=None):
        if k == 0 or self.is_zero():
            return self
        m = self.q ** k
        return FFrac(self.F, self.q, K.spread(self.num, m), {j: e * m for j, e in self.den.items()})

    def den_degree(self):
        return sum(e * self.q ** k for k, e in self.den.items())

    def inf_valuation(self):
        """v_inf = deg(denominator) - deg(numerator)."""
        if self.is_zero():
            return float("inf")
        return self.den_degree() - (len(self.num) - 1)

    def numerator(self):
        return Poly.from_array(self.F, self.num)

    def denominator(self):
        d = np.array([1], dtype=np.int64)
        for k, e in sorted(self.den.items()):
            d = K.mul(self.F, d, atom_power(self.F, self.q, k, e))
        return Poly.from_array(self.F, d)

    def __eq__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return (self - o).is_zero()

    __hash__ = None

    def __repr__(self):
        return "FFrac(deg num=%d, den=%s)" % (len(self.num) - 1, dict(sorted(self.den.items())))
