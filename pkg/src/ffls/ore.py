"""Twisted (Ore) polynomials with matrix coefficients and the exp/log solvers.

A ``TwistedOp`` is sum_i M_i tau^i with d x d matrix coefficients, where
tau M = M^(1) tau and M^(1) raises every entry to the q-th power (for the
coefficient types used here this spreads exponents of t by q and leaves
constants alone).

The exp and log coefficients of a t-module are produced by one generic solver
parametrised by an arithmetic *context*: exact fractions (``ExactContext``),
Laurent series at infinity (``InfContext``) or at a prime P (``PadicContext``).
"""
from fractions import Fraction
import math

from .apoly import Poly, AZPoly
from .exact import FFrac
from .series import InfSeries, ZSeries, padic_field, vec_val
from .errors import DimMismatch, OutOfDomain, PrecisionExhausted


def _is_zero(x):
    f = getattr(x, "is_exact_zero", None)
    if f is not None:
        return f()
    return x.is_zero()


def _frob(x, k, q, cap=None):
    if k == 0:
        return x
    if cap is not None and hasattr(x, "cap"):
        return x.frob(k, q, cap)
    return x.frob(k, q)


def _sum(items, zero):
    acc = None
    for it in items:
        if _is_zero(it):
            continue
        acc = it if acc is None else acc + it
    return zero if acc is None else acc


def mat_mul(A, B, zero):
    n, m = len(A), len(B[0])
    return [[_sum((A[i][k] * B[k][j] for k in range(len(B))
                   if not _is_zero(A[i][k]) and not _is_zero(B[k][j])), zero)
             for j in range(m)] for i in range(n)]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_map(fn, A):
    return [[fn(a) for a in row] for row in A]


def mat_is_zero(A):
    return all(_is_zero(a) for row in A for a in row)


def identity(d, zero, one):
    return [[one if i == j else zero for j in range(d)] for i in range(d)]


class TwistedOp:
    """sum_i coeffs[i] tau^i with d x d matrix coefficients.

    ``trunc`` is None for a genuine twisted polynomial, otherwise the number of
    stored coefficients of a truncated twisted power series.
    """

    def __init__(self, coeffs, q, trunc=None, zero=None):
        self.coeffs = [[list(r) for r in M] for M in coeffs]
        self.q = q
        self.trunc = trunc
        self.d = len(self.coeffs[0]) if self.coeffs else 0
        self._zero = zero if zero is not None else self._guess_zero()

    def _guess_zero(self):
        for M in self.coeffs:
            for row in M:
                for e in row:
                    if isinstance(e, (Poly, AZPoly, FFrac, ZSeries)):
                        return e * 0 if not isinstance(e, ZSeries) else e * 0
                    if hasattr(e, "zero_like"):
                        return e.zero_like()
        return 0

    @property
    def zero(self):
        return self._zero

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    @property
    def degree(self):
        for i in range(len(self.coeffs) - 1, -1, -1):
            if not mat_is_zero(self.coeffs[i]):
                return i
        return -1

    def map(self, fn):
        return TwistedOp([mat_map(fn, M) for M in self.coeffs], self.q, self.trunc)

    def __mul__(self, o):
        return ore_mul(self, o)

    def __add__(self, o):
        if self.d != o.d:
            raise DimMismatch("dimension %d vs %d" % (self.d, o.d))
        n = max(len(self), len(o))
        trunc = _min_trunc(self.trunc, o.trunc)
        if trunc is not None:
            n = min(n, trunc)
        zero_m = [[self.zero] * self.d for _ in range(self.d)]
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self) else zero_m
            b = o.coeffs[i] if i < len(o) else zero_m
            out.append(mat_add(a, b))
        return TwistedOp(out, self.q, trunc, self.zero)

    def __neg__(self):
        return self.map(lambda e: -e)

    def __sub__(self, o):
        return self + (-o)

    def truncated(self, n):
        return TwistedOp(self.coeffs[:n], self.q, n if self.trunc is None else min(n, self.trunc), self.zero)

    def eval_z(self, c):
        return self.map(lambda e: eval_entry_z(e, c))

    def to_json(self):
        return {"d": self.d, "tau_coeffs": [[[str(e) for e in row] for row in M] for M in self.coeffs]}

    def __repr__(self):
        return "TwistedOp(d=%d, len=%d, trunc=%s)" % (self.d, len(self), self.trunc)


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def ore_mul(a, b):
    """Product in the twisted ring: (ab)_n = sum_{i+j=n} a_i b_j^(i)."""
    if a.d != b.d:
        raise DimMismatch("dimension %d vs %d" % (a.d, b.d))
    trunc = _min_trunc(a.trunc, b.trunc)
    n = len(a) + len(b) - 1
    if trunc is not None:
        n = min(n, trunc)
    zero = a.zero
    out = []
    for k in range(n):
        acc = None
        for i in range(min(k + 1, len(a))):
            j = k - i
            if j >= len(b) or mat_is_zero(a.coeffs[i]) or mat_is_zero(b.coeffs[j]):
                continue
            bj = mat_map(lambda e: _frob(e, i, a.q), b.coeffs[j])
            prod = mat_mul(a.coeffs[i], bj, zero)
            acc = prod if acc is None else mat_add(acc, prod)
        out.append(acc if acc is not None else [[zero] * a.d for _ in range(a.d)])
    return TwistedOp(out, a.q, trunc, zero)


def apply(op, x, cap=None):
    """op(x) = sum_i coeffs[i] x^(i), x a length-d vector."""
    if len(x) != op.d:
        raise DimMismatch("vector of length %d for a %d-dimensional operator" % (len(x), op.d))
    out = [None] * op.d
    for i, M in enumerate(op.coeffs):
        if mat_is_zero(M):
            continue
        xi = [_frob(e, i, op.q, cap) for e in x]
        for r in range(op.d):
            for c in range(op.d):
                if _is_zero(M[r][c]) or _is_zero(xi[c]):
                    continue
                t = M[r][c] * xi[c]
                out[r] = t if out[r] is None else out[r] + t
    zero = x[0] * 0 if not hasattr(x[0], "zero_like") else x[0].zero_like()
    return [o if o is not None else zero for o in out]


def eval_entry_z(e, c):
    if isinstance(e, (AZPoly, ZSeries)) or (isinstance(e, Poly) and e.var == "z"):
        from .series import zseries_eval
        return zseries_eval(e, c)
    return e


def twist_z(op):
    """Insert z^i on the tau^i coefficient."""
    out = []
    n = len(op)
    for i, M in enumerate(op.coeffs):
        row_out = []
        for row in M:
            r = []
            for e in row:
                if isinstance(e, Poly):
                    r.append(AZPoly.from_apoly(e).z_shift(i))
                elif isinstance(e, AZPoly):
                    r.append(e.z_shift(i))
                else:
                    zero = e.zero_like()
                    r.append(ZSeries([zero] * i + [e], max(n, i + 1)))
            row_out.append(r)
        out.append(row_out)
    return TwistedOp(out, op.q, op.trunc)


# -- arithmetic contexts --------------------------------------------------------------

class ExactContext:
    """Exact coefficients in K with denominators built from t^(q^k) - t."""

    place = "exact"

    def __init__(self, F, q):
        self.F, self.q = F, q

    def lift(self, a):
        if isinstance(a, FFrac):
            return a
        return FFrac.from_poly(a, self.q)

    def zero(self):
        return FFrac(self.F, self.q, [])

    def one(self):
        return FFrac(self.F, self.q, [1])

    def frob(self, x, k):
        return x.frob(k)

    def div_delta(self, x, n):
        return x.div_delta(n)


class InfContext:
    """Coefficients as Laurent series in 1/t with a fixed relative precision."""

    place = "inf"

    def __init__(self, F, q, rel=40):
        self.F, self.q, self.rel = F, q, rel
        self._inv = {}

    def lift(self, a):
        if isinstance(a, Poly):
            if a.is_zero():
                return InfSeries.zero(self.F)
            return InfSeries.from_apoly(a, self.rel)
        return a

    def zero(self):
        return InfSeries.zero(self.F)

    def one(self):
        return InfSeries.one(self.F)

    def frob(self, x, k):
        return x.frob(k, self.q, cap=self.rel)

    def delta(self, n):
        m = self.q ** n
        c = [0] * min(m, self.rel)
        c[0] = 1
        if m - 1 < self.rel:
            c[m - 1] = self.F.neg[1]
        return InfSeries(self.F, -m, c, -m + self.rel)

    def div_delta(self, x, n):
        if x.is_exact_zero():
            return x
        inv = self._inv.get(n)
        if inv is None:
            inv = self._inv[n] = self.delta(n).inverse(self.rel)
        return x * inv


class PadicContext:
    """Coefficients in K_P = F_P((P)), relative precision ``rel``."""

    place = "P"

    def __init__(self, P, rel=40):
        self.K = padic_field(P)
        self.P = P
        self.F = P.F
        self.q = P.F.size
        self.rel = rel
        self._inv = {}

    def lift(self, a):
        if isinstance(a, Poly):
            if a.is_zero():
                return self.K.zero()
            return self.K.from_apoly(a, self.rel + 2)
        return a

    def zero(self):
        return self.K.zero()

    def one(self):
        return self.K.one()

    def frob(self, x, k):
        return x.frob(k, self.q, cap=self.rel)

    def delta(self, n):
        prec = self.rel + 2
        return self.K.theta_frob(n, prec) - self.K.theta(prec)

    def div_delta(self, x, n):
        if x.is_exact_zero():
            return x
        inv = self._inv.get(n)
        if inv is None:
            inv = self._inv[n] = self.delta(n).inverse(self.rel)
        return x * inv


# -- exp and log ------------------------------------------------------------------------

class ExpLogData:
    """exp/log coefficient matrices d_n, l_n (n <= N) of a t-module in one context."""

    def __init__(self, module, ctx, s):
        self.module = module
        self.ctx = ctx
        self.s = s
        self.d = None
        self.l = None
        self.twisted_by = getattr(module, "twisted_by", None)
        self._lifted = None

    @property
    def N(self):
        lens = [len(x) - 1 for x in (self.d, self.l) if x is not None]
        return min(lens) if lens else -1

    def _coeffs(self):
        if self._lifted is None:
            E = self.module
            ctx = self.ctx
            self._lifted = [mat_map(ctx.lift, M) for M in E.coeffs]
            t = Poly.gen(E.F)
            nil = [[E.coeffs[0][i][j] - (t if i == j else Poly(E.F)) for j in range(E.d)] for i in range(E.d)]
            self._nil = mat_map(ctx.lift, nil)
            self._nil_zero = all(x.is_zero() for row in nil for x in row)
        return self._lifted

    def _frob_mat(self, M, k):
        return mat_map(lambda e: self.ctx.frob(e, k) if not _is_zero(e) else e, M)

    def extend_exp(self, N):
        Ec = self._coeffs()
        ctx, E = self.ctx, self.module
        zero, one = ctx.zero(), ctx.one()
        if self.d is None:
            self.d = [identity(E.d, zero, one)]
        r = len(Ec) - 1
        d = E.d
        while len(self.d) <= N:
            n = len(self.d)
            C = None
            for i in range(1, min(n, r) + 1):
                if mat_is_zero(Ec[i]):
                    continue
                term = mat_mul(Ec[i], self._frob_mat(self.d[n - i], i), zero)
                C = term if C is None else mat_add(C, term)
            if C is None:
                self.d.append([[zero] * d for _ in range(d)])
                continue
            X = mat_map(lambda e: ctx.div_delta(e, n), C)
            if not self._nil_zero:
                Nn = self._frob_mat(self._nil, n)
                for _ in range(2 * d - 2):
                    rhs = mat_add(mat_sub(C, mat_mul(X, Nn, zero)), mat_mul(self._nil, X, zero))
                    X = mat_map(lambda e: ctx.div_delta(e, n), rhs)
            self.d.append(X)
        return self

    def extend_log(self, N):
        Ec = self._coeffs()
        ctx, E = self.ctx, self.module
        zero, one = ctx.zero(), ctx.one()
        if self.l is None:
            self.l = [identity(E.d, zero, one)]
        r = len(Ec) - 1
        d = E.d
        while len(self.l) <= N:
            n = len(self.l)
            R = None
            for i in range(1, min(n, r) + 1):
                if mat_is_zero(Ec[i]):
                    continue
                term = mat_mul(self.l[n - i], self._frob_mat(Ec[i], n - i), zero)
                R = term if R is None else mat_add(R, term)
            if R is None:
                self.l.append([[zero] * d for _ in range(d)])
                continue
            X = mat_map(lambda e: -ctx.div_delta(e, n), R)
            if not self._nil_zero:
                Nn = self._frob_mat(self._nil, n)
                for _ in range(2 * d - 2):
                    rhs = mat_add(mat_sub(R, mat_mul(self._nil, X, zero)), mat_mul(X, Nn, zero))
                    X = mat_map(lambda e: -ctx.div_delta(e, n), rhs)
            self.l.append(X)
        return self

    def exp_op(self):
        return TwistedOp(self.d, self.ctx.q, len(self.d), self.ctx.zero())

    def log_op(self):
        return TwistedOp(self.l, self.ctx.q, len(self.l), self.ctx.zero())


def _default_ctx(E, ctx):
    return ctx if ctx is not None else ExactContext(E.F, E.q)


def solve_exp(E, N, ctx=None):
    """exp_E = sum_{n<=N} d_n tau^n; exact fractions unless another context is given."""
    data = ExpLogData(E, _default_ctx(E, ctx), E.s)
    return data.extend_exp(N)


def solve_log(E, N, ctx=None):
    data = ExpLogData(E, _default_ctx(E, ctx), E.s)
    return data.extend_log(N)


def exp_log(E, N, ctx=None):
    data = ExpLogData(E, _default_ctx(E, ctx), E.s)
    data.extend_exp(N)
    data.extend_log(N)
    return data


# -- certified P-adic application ---------------------------------------------------------

def log_coeff_bound(q, s, degP, n, twisted=False):
    """Lower bound for v_P of the n-th log coefficient."""
    b = -(q ** s) * (n // degP)
    return b + (q ** n - 1 if twisted else 0)


def exp_coeff_bound(q, s, degP, n, twisted=False):
    """Lower bound for v_P of the n-th exp coefficient (a Fraction)."""
    k = n // degP
    b = -Fraction(q ** (s + n)) * (1 - Fraction(1, q ** (degP * k))) / (q ** degP - 1)
    return b + (q ** n - 1 if twisted else 0)


def vp_L_closed_form(n, degP):
    """v_P(L_n) with L_n = prod_{i=1}^n (t - t^(q^i)): one factor per i divisible by deg P."""
    return n // degP


def vp_D_closed_form(q, n, degP):
    """v_P(D_n) with D_n = prod_{i<n} (t^(q^n) - t^(q^i)), as a Fraction (an integer in fact)."""
    k = n // degP
    return Fraction(q ** n) * (Fraction(1, q ** (degP * k)) - 1) / (1 - q ** degP)


def padic_terms_needed(q, s, degP, v, prec, which, twisted=False):
    """Number of terms after which every remaining term has valuation >= prec."""
    tw = 1 if twisted else 0
    if which == "log":
        n = 0
        while True:
            lb = log_coeff_bound(q, s, degP, n, twisted) + q ** n * v
            if lb >= prec and q ** n * (q - 1) * (v + tw) > q ** s:
                return n
            n += 1
    c = Fraction(q ** s, q ** degP - 1)
    slope = v + tw - c
    n = 0
    while q ** n * slope - tw < prec:
        n += 1
    return n


def padic_exp_log_apply(data, x, which, prec):
    """exp or log of a vector of P-adic series, summed with a certified stopping index."""
    ctx = data.ctx
    K = ctx.K
    q, s, D = ctx.q, data.s, K.deg
    twisted = data.twisted_by is not None
    if all(e.is_exact_zero() for e in x):
        return list(x)
    v = vec_val(x)
    if which == "log":
        ok = v >= 0 if twisted else v > 0
        if not ok:
            raise OutOfDomain("log needs v_P(x) %s 0, got %s" % (">=" if twisted else ">", v))
    elif which == "exp":
        c = Fraction(q ** s, q ** D - 1)
        ok = v > c - 1 if twisted else v > c
        if not ok:
            raise OutOfDomain("exp needs v_P(x) > %s, got %s" % (c - 1 if twisted else c, v))
    else:
        raise ValueError("which must be 'exp' or 'log'")
    N = padic_terms_needed(q, s, D, v, prec, which, twisted)
    coeffs = data.l if which == "log" else data.d
    if coeffs is None or len(coeffs) < N:
        (data.extend_log if which == "log" else data.extend_exp)(max(N - 1, 0))
        coeffs = data.l if which == "log" else data.d
    bound = log_coeff_bound if which == "log" else exp_coeff_bound
    out = [None] * len(x)
    for n in range(N):
        lb = bound(q, s, D, n, twisted) + q ** n * v
        need = max(1, prec - math.floor(lb) + 2)
        M = coeffs[n]
        xs = [e.frob(n, q, cap=need) if n else e for e in x]
        for r in range(len(x)):
            for c_ in range(len(x)):
                if _is_zero(M[r][c_]) or xs[c_].is_exact_zero():
                    continue
                t = M[r][c_] * xs[c_]
                out[r] = t if out[r] is None else out[r] + t
    res = []
    for e in out:
        e = K.zero(prec) if e is None else e.truncate(prec)
        if e.prec < prec:
            raise PrecisionExhausted("P-adic %s reached precision %s < %s" % (which, e.prec, prec))
        res.append(e)
    return res


def padic_data(E, P, prec, extra=8):
    """ExpLogData at P with a working precision adequate for ``prec`` digits."""
    s = E.s
    q = E.q
    # deepest negative coefficient valuation we may meet is bounded by the T1 bounds
    slack = 0
    n = 1
    while n <= 40:
        slack = max(slack, -math.floor(exp_coeff_bound(q, s, P.degree, n)) - q ** n)
        n += 1
    rel = prec + extra + max(0, min(slack, 4 * prec))
    return ExpLogData(E, PadicContext(P, rel), s)
