"""Precision-tracked Laurent series at infinity and at a finite prime P.

``InfSeries`` lives in F((1/t)), ``PadicSeries`` in F_P((pi)) where pi = P and
t maps to its Hensel lift ``Theta`` with P(Theta) = pi.  Both store
``val`` (valuation of the first stored coefficient), a coefficient array and an
absolute precision ``prec``: the value is known modulo terms of valuation
``>= prec``.  ``prec = inf`` marks an exact (finite) Laurent polynomial.

``ZSeries`` is a truncated power series in z whose coefficients are either of
the above.
"""
import math
from functools import lru_cache

import numpy as np

from . import _kernel as K
from .apoly import Poly, AZPoly, residue_field, residue_code, require_prime, _code
from .gf import FieldElem, embed_code
from .errors import DivisionByZero, NonUnitDenominator, ZeroToPrecision, PrecisionExhausted

INF = math.inf


def _arr(x):
    return np.asarray(x, dtype=np.int64)


class _Series:
    """Shared machinery; subclasses fix the place and the Frobenius on digits."""

    __slots__ = ("F", "val", "c", "prec")

    def __init__(self, F, val, coeffs, prec=INF):
        c = _arr(coeffs)
        if prec != INF:
            c = c[:max(0, prec - val)]
        nz = np.flatnonzero(c)
        if len(nz) == 0:
            self.F, self.c, self.prec = F, c[:0], prec
            self.val = prec
            return
        first = nz[0]
        if prec == INF:
            c = c[first:nz[-1] + 1]
        else:
            c = c[first:]
        self.F = F
        self.val = val + int(first)
        self.c = c
        self.prec = prec

    # subclasses override
    def _new(self, val, c, prec):
        raise NotImplementedError

    # -- queries -----------------------------------------------------------------------
    @property
    def rel(self):
        return self.prec - self.val

    def is_exact(self):
        return self.prec == INF

    def is_zero(self):
        """Zero to the known precision."""
        return len(self.c) == 0

    def is_exact_zero(self):
        return len(self.c) == 0 and self.prec == INF

    def valuation(self):
        return self.val

    def coeff(self, n):
        """Coefficient of the term of valuation n (code)."""
        if n >= self.prec:
            raise PrecisionExhausted("coefficient %d beyond precision %s" % (n, self.prec))
        j = n - self.val
        return int(self.c[j]) if 0 <= j < len(self.c) else 0

    def digits(self, lo, hi):
        return [self.coeff(n) for n in range(lo, hi)]

    def zero_like(self, prec=INF):
        return self._new(prec, (), prec)

    def one_like(self):
        return self._new(0, (1,), INF)

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return self._new(self.val, self.c, prec)

    def cap(self, rel):
        """Limit the relative precision to rel terms."""
        if self.is_zero() or self.rel <= rel:
            return self
        return self._new(self.val, self.c, self.val + rel)

    # -- arithmetic ------------------------------------------------------------------------
    def _coerce(self, o):
        if isinstance(o, _Series):
            return o
        if isinstance(o, (int, np.integer, FieldElem)):
            c = _code(self.F, o)
            return self._new(0, (c,), INF)
        return self._lift(o)

    def _lift(self, o):
        raise TypeError("cannot combine %r with %s" % (o, type(self).__name__))

    def __add__(self, o):
        o = self._coerce(o)
        if self.is_exact_zero():
            return o
        if o.is_exact_zero():
            return self
        prec = min(self.prec, o.prec)
        val = min(self.val, o.val)
        if prec <= val:
            return self._new(prec, (), prec)
        end = prec if prec != INF else max(self.val + len(self.c), o.val + len(o.c))
        n = end - val
        A = np.zeros(n, dtype=np.int64)
        B = np.zeros(n, dtype=np.int64)
        for arr, s in ((A, self), (B, o)):
            off = s.val - val
            if off < n and len(s.c):
                m = min(len(s.c), n - off)
                arr[off:off + m] = s.c[:m]
        return self._new(val, self.F.add_np[A, B], prec)

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.val, self.F.neg_np[self.c] if len(self.c) else self.c, self.prec)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, np.integer, FieldElem)):
            c = _code(self.F, o)
            if c == 0:
                return self.zero_like()
            return self._new(self.val, self.F.mul_np[c][self.c], self.prec)
        o = self._coerce(o)
        if self.is_exact_zero() or o.is_exact_zero():
            return self.zero_like()
        val = self.val + o.val
        rel = min(self.rel, o.rel)
        if rel == INF:
            return self._new(val, K.mul(self.F, self.c, o.c), INF)
        if rel <= 0:
            return self._new(val, (), val)
        return self._new(val, K.mul(self.F, self.c, o.c, rel), val + rel)

    __rmul__ = __mul__

    def inverse(self, rel=None):
        if self.is_exact_zero():
            raise DivisionByZero("inverse of zero")
        if self.is_zero():
            raise ZeroToPrecision("inverse of a series that is zero to precision")
        R = self.rel
        if rel is not None:
            R = min(R, rel)
        if R == INF:
            if len(self.c) == 1:
                return self._new(-self.val, (self.F.inv[int(self.c[0])],), INF)
            raise PrecisionExhausted("inverse of an exact non-monomial needs a precision")
        F = self.F
        a = self.c[:R]
        b = _arr([F.inv[int(a[0])]])
        k = 1
        while k < R:
            k = min(2 * k, R)
            ab = K.mul(F, a[:k], b, k)
            two_minus = F.neg_np[ab]
            two_minus[0] = F.add[two_minus[0]][F.from_int(2)]
            b = K.mul(F, b, two_minus, k)
        return self._new(-self.val, b, -self.val + R)

    def __truediv__(self, o):
        o = self._coerce(o)
        rel = o.rel if o.rel != INF else self.rel
        if rel == INF:
            rel = None
        return self * o.inverse(rel)

    def __pow__(self, n):
        r = self.one_like()
        a = self
        while n:
            if n & 1:
                r = r * a
            n >>= 1
            if n:
                a = a * a
        return r

    def _frob_digits(self, c, k):
        return c

    def frob(self, k=1, q=None, cap=None):
        """tau^k: digits twisted, exponents multiplied by q^k; relative precision capped."""
        if k == 0 or self.is_exact_zero():
            return self
        q = self._q() if q is None else q
        m = q ** k
        c = self._frob_digits(self.c, k)
        if self.prec == INF:
            return self._new(self.val * m, K.spread(c, m), INF)
        rel = self.rel * m
        limit = self.rel if cap is None else cap
        rel = min(rel, limit)
        src = c[:-(-rel // m)] if rel > 0 else c[:0]
        out = K.spread(src, m)[:rel]
        return self._new(self.val * m, out, self.val * m + rel)

    def _q(self):
        return self.F.size

    def agrees(self, o, prec=None):
        d = self - o
        return d.is_zero() and (prec is None or d.prec >= prec)

    def agreement(self, o):
        """Valuation of the difference (an agreement depth), capped by known precision."""
        d = self - self._coerce(o)
        return d.val

    def __eq__(self, o):
        if not isinstance(o, _Series):
            try:
                o = self._coerce(o)
            except TypeError:
                return NotImplemented
        return self.agrees(o)

    __hash__ = None

    def coeff_json(self):
        F = self.F
        return [F.coords(int(x)) for x in self.c]


class InfSeries(_Series):
    """Laurent series in 1/t: sum c[j] * t^-(val + j)."""

    __slots__ = ()

    def _new(self, val, c, prec):
        return InfSeries(self.F, val, c, prec)

    def _lift(self, o):
        if isinstance(o, Poly):
            return InfSeries.from_apoly(o)
        return super()._lift(o)

    @classmethod
    def from_apoly(cls, a, rel=None):
        if a.is_zero():
            return cls(a.F, INF, (), INF)
        val = -a.degree
        c = list(reversed(a.c))
        if rel is None:
            return cls(a.F, val, c, INF)
        return cls(a.F, val, c[:rel], val + rel)

    @classmethod
    def zero(cls, F, prec=INF):
        return cls(F, prec, (), prec)

    @classmethod
    def one(cls, F):
        return cls(F, 0, (1,), INF)

    @classmethod
    def monomial(cls, F, n, c=1):
        """c * t^n."""
        return cls(F, -n, (c,), INF)

    def sgn(self):
        if self.is_zero():
            raise ZeroToPrecision("sign of a series that is zero to precision")
        return FieldElem(self.F, int(self.c[0]))

    def change_field(self, G):
        if G == self.F:
            return self
        return InfSeries(G, self.val, [embed_code(self.F, G, int(x)) for x in self.c], self.prec)

    def polynomial_part(self):
        """Split into (polynomial part in A, remainder of positive valuation)."""
        if self.prec <= 0:
            raise PrecisionExhausted("polynomial part needs precision > 0")
        if self.is_zero() or self.val > 0:
            return Poly(self.F), self
        k = -self.val + 1
        head = self.c[:k]
        poly = Poly(self.F, list(reversed(head.tolist())) if len(head) == k
                    else [0] * (k - len(head)) + list(reversed(head.tolist())))
        rest = InfSeries(self.F, 1, self.c[k:], self.prec)
        return poly, rest

    def to_json(self):
        prec = self.prec if self.prec != INF else None
        val = self.val if self.val != INF else None
        return {"place": "inf", "val": val, "prec": prec, "coeffs": self.coeff_json()}

    def __repr__(self):
        head = ", ".join(str(int(x)) for x in self.c[:8])
        return "InfSeries(val=%s, prec=%s, [%s%s])" % (self.val, self.prec, head,
                                                      ", ..." if len(self.c) > 8 else "")


class PadicField:
    """Completion of F_q(t) at a monic prime P, realised as F_P((pi)) with pi = P."""

    def __init__(self, P):
        self.P = require_prime(P)
        self.A = P.F
        self.FP = residue_field(P)
        self.q = P.F.size
        self.deg = P.degree
        FP = self.FP
        self.frob_table = np.array([FP.pow(x, self.q) for x in range(FP.size)], dtype=np.int64)
        self._theta = None
        self._theta_frob = {}

    def __repr__(self):
        return "PadicField(%s)" % self.P

    def _const(self, code_A):
        return embed_code(self.A, self.FP, code_A)

    def series(self, val, digits, prec=INF):
        return PadicSeries(self, val, digits, prec)

    def zero(self, prec=INF):
        return PadicSeries(self, prec, (), prec)

    def one(self):
        return PadicSeries(self, 0, (1,), INF)

    def pi_pow(self, k, coeff=1):
        return PadicSeries(self, k, (coeff,), INF)

    def theta(self, prec):
        """Theta with P(Theta) = pi and Theta = t mod P, to absolute precision prec."""
        if self._theta is not None and self._theta.prec >= prec:
            return self._theta.truncate(prec)
        P = self.P
        bar = residue_code(P, Poly.gen(self.A))
        if P.degree == 1:
            th = PadicSeries(self, 0, (bar, 1), INF)
            self._theta = th
            return th.truncate(prec)
        work = max(prec, 8)
        th = PadicSeries(self, 0, (bar,), work)
        dP = P.derivative()
        steps = 1
        while (1 << steps) < work + 2:
            steps += 1
        for _ in range(steps + 1):
            num = self._horner(P, th, work) - self.pi_pow(1)
            den = self._horner(dP, th, work)
            th = (th - num / den).truncate(work)
        self._theta = th
        self._theta_frob = {}
        return th.truncate(prec)

    def theta_frob(self, n, prec):
        """t^(q^n) in K_P, i.e. the n-th Frobenius twist of Theta."""
        hit = self._theta_frob.get(n)
        if hit is not None and hit.prec >= prec:
            return hit.truncate(prec)
        out = self.theta(prec).truncate(prec).frob(n, self.q, cap=prec)
        self._theta_frob[n] = out
        return out.truncate(prec)

    def _horner(self, a, x, prec):
        r = self.zero()
        for c in reversed(a.c):
            r = (r * x + PadicSeries(self, 0, (self._const(c),), INF)).truncate(prec)
        return r

    def from_apoly(self, a, prec):
        """Image of a in A_P, to absolute precision prec."""
        if a.is_zero():
            return self.zero()
        if a.degree > 4 * (prec + 1) * self.deg + 16:
            a = a % (self.P ** (prec + 1))
        return self._horner(a, self.theta(prec), prec)

    def from_rational(self, num, den, prec):
        return embed_rational(num, den, self.P, prec, K=self)

    def valuation_of(self, a):
        """Exact v_P of a nonzero polynomial by repeated division."""
        if a.is_zero():
            return INF
        v = 0
        while True:
            qt, r = divmod(a, self.P)
            if r:
                return v
            a, v = qt, v + 1


@lru_cache(maxsize=None)
def padic_field(P):
    return PadicField(P)


class PadicSeries(_Series):
    """Series sum c[j] * pi^(val + j) with digits in F_P."""

    __slots__ = ("K",)

    def __init__(self, K_, val, coeffs, prec=INF):
        self.K = K_
        super().__init__(K_.FP, val, coeffs, prec)

    def _new(self, val, c, prec):
        return PadicSeries(self.K, val, c, prec)

    def _q(self):
        return self.K.q

    def _frob_digits(self, c, k):
        t = self.K.frob_table
        for _ in range(k % max(1, self.K.FP.abs_degree)):
            c = t[c]
        return c

    def _lift(self, o):
        if isinstance(o, Poly):
            prec = self.prec if self.prec != INF else max(self.val, 0) + 64
            return self.K.from_apoly(o, max(prec, 1))
        return super()._lift(o)

    def to_json(self):
        prec = self.prec if self.prec != INF else None
        val = self.val if self.val != INF else None
        return {"place": "P", "prime": str(self.K.P), "val": val, "prec": prec,
                "coeffs": self.coeff_json()}

    def __repr__(self):
        head = ", ".join(str(int(x)) for x in self.c[:8])
        return "PadicSeries(P=%s, val=%s, prec=%s, [%s%s])" % (
            self.K.P, self.val, self.prec, head, ", ..." if len(self.c) > 8 else "")


def embed_rational(num, den, place, prec, K=None, integral=False):
    """Expand num/den at ``place`` ("inf" or a prime P) to absolute precision ``prec``."""
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    if place in ("inf", None):
        if num.is_zero():
            return InfSeries.zero(num.F, prec)
        val = den.degree - num.degree
        rel = max(prec - val, 0)
        if rel == 0:
            return InfSeries(num.F, prec, (), prec)
        n = InfSeries.from_apoly(num, rel)
        d = InfSeries.from_apoly(den, rel)
        return (n * d.inverse(rel)).truncate(prec)
    K = K or padic_field(place)
    if num.is_zero():
        return K.zero(prec)
    vd = K.valuation_of(den)
    vn = K.valuation_of(num)
    if integral and vd > vn:
        raise NonUnitDenominator("denominator not a unit at %s" % K.P)
    num_r = num.exact_div(K.P ** vn) if vn else num
    den_r = den.exact_div(K.P ** vd) if vd else den
    val = vn - vd
    rel = max(prec - val, 0)
    if rel == 0:
        return K.zero(prec)
    n = K.from_apoly(num_r, rel)
    d = K.from_apoly(den_r, rel)
    return (K.pi_pow(val) * n * d.inverse(rel)).truncate(prec)


def sgn(x):
    """Leading coefficient of a series at infinity (or of a polynomial in t)."""
    if isinstance(x, Poly):
        if x.is_zero():
            raise ZeroToPrecision("sign of zero")
        return FieldElem(x.F, x.lc)
    return x.sgn()


class ZSeries:
    """Truncated power series sum terms[k] z^k, k < z_prec, over a series type."""

    __slots__ = ("terms", "z_prec")

    def __init__(self, terms, z_prec=None):
        terms = list(terms)
        z_prec = len(terms) if z_prec is None else z_prec
        if not terms:
            raise ValueError("ZSeries needs at least one term to fix the coefficient type")
        zero = terms[0].zero_like()
        terms = terms[:z_prec] + [zero] * (z_prec - len(terms))
        self.terms = terms
        self.z_prec = z_prec

    @classmethod
    def constant(cls, x, z_prec):
        return cls([x], z_prec)

    def _zero(self):
        return self.terms[0].zero_like()

    def __getitem__(self, k):
        return self.terms[k]

    def __len__(self):
        return self.z_prec

    def __add__(self, o):
        if not isinstance(o, ZSeries):
            return ZSeries([self.terms[0] + o] + self.terms[1:], self.z_prec)
        n = min(self.z_prec, o.z_prec)
        return ZSeries([a + b for a, b in zip(self.terms[:n], o.terms[:n])], n)

    __radd__ = __add__

    def __neg__(self):
        return ZSeries([-a for a in self.terms], self.z_prec)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, ZSeries):
            return ZSeries([a * o for a in self.terms], self.z_prec)
        n = min(self.z_prec, o.z_prec)
        out = []
        for k in range(n):
            acc = None
            for i in range(k + 1):
                a, b = self.terms[i], o.terms[k - i]
                if a.is_exact_zero() or b.is_exact_zero():
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            out.append(acc if acc is not None else self._zero())
        return ZSeries(out, n)

    __rmul__ = __mul__

    def inverse(self, rel=None):
        a0inv = self.terms[0].inverse(rel)
        out = [a0inv]
        for k in range(1, self.z_prec):
            acc = None
            for i in range(1, k + 1):
                a = self.terms[i]
                if a.is_exact_zero():
                    continue
                t = a * out[k - i]
                acc = t if acc is None else acc + t
            out.append(-(acc * a0inv) if acc is not None else self._zero())
        return ZSeries(out, self.z_prec)

    def frob(self, k=1, q=None, cap=None):
        return ZSeries([a.frob(k, q, cap) for a in self.terms], self.z_prec)

    def z_shift(self, n):
        zero = self._zero()
        return ZSeries([zero] * n + self.terms, self.z_prec)

    def truncate(self, prec):
        return ZSeries([a.truncate(prec) for a in self.terms], self.z_prec)

    def cap(self, rel):
        return ZSeries([a.cap(rel) for a in self.terms], self.z_prec)

    def gauss_val(self):
        return min(a.val for a in self.terms)

    @property
    def prec(self):
        return min(a.prec for a in self.terms)

    def eval(self, c):
        return zseries_eval(self, c)

    def to_json(self):
        return {"z_prec": self.z_prec, "z_terms": [a.to_json() for a in self.terms]}


def zseries_eval(f, c):
    """Substitute z = c, with c in F_q or in an extension F_q(zeta)."""
    if isinstance(f, AZPoly):
        return f.eval_z(c)
    if isinstance(f, Poly):
        return f(c) if f.var == "z" else f
    terms = f.terms
    F = terms[0].F
    if isinstance(c, FieldElem) and c.field != F:
        G = c.field
        terms = [t.change_field(G) for t in terms]
        code = c.code
    else:
        G = F
        code = _code(F, c)
    acc = terms[0]
    power = 1
    for t in terms[1:]:
        power = G.mul[power][code]
        if power == 0:
            break
        if not t.is_exact_zero():
            acc = acc + t * FieldElem(G, power)
    return acc


def vec_val(x):
    """Sup-norm valuation of a vector of series: the minimum entry valuation."""
    return min(e.val for e in x)
