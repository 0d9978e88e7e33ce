"""Anderson t-modules over F_q[t] (or over an order given by a multiplication table)."""
import json
import threading

from .gf import field_make, FieldElem
from .apoly import Poly, AZPoly, parse_apoly, nullspace, charpoly_theta, ThetaActionMatrix
from .ore import TwistedOp, ore_mul, apply, twist_z
from .errors import (SchemaError, NilpotencyViolation, ZeroTauDegree, UnsupportedShape,
                     NotPrime, DomainError)


# -- orders -----------------------------------------------------------------------------

class OrderBasis:
    """A commutative A-algebra free of rank n, given by f_i f_j = sum_k table[i][j][k] f_k."""

    def __init__(self, F, table, unit=None, labels=None):
        self.F = F
        self.n = len(table)
        self.table = [[tuple(parse_apoly(F, c) for c in cell) for cell in row] for row in table]
        if any(len(row) != self.n or any(len(cell) != self.n for cell in row) for row in self.table):
            raise SchemaError("multiplication table must be n x n x n")
        if unit is None:
            unit = [1] + [0] * (self.n - 1)
        self.unit = tuple(parse_apoly(F, c) for c in unit)
        self.labels = list(labels) if labels else ["f%d" % (i + 1) for i in range(self.n)]
        self._frob_cache = {}
        self._validate()

    @classmethod
    def trivial(cls, F):
        return cls(F, [[[Poly.const(F, 1)]]])

    @property
    def is_trivial(self):
        return self.n == 1 and self.table[0][0][0] == Poly.const(self.F, 1)

    def zero(self):
        return tuple(Poly(self.F) for _ in range(self.n))

    def basis(self, i):
        return tuple(Poly.const(self.F, 1 if j == i else 0) for j in range(self.n))

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def scale(self, a, x):
        return tuple(a * b for b in x)

    def mul(self, x, y):
        out = [Poly(self.F) for _ in range(self.n)]
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y):
                if yj.is_zero():
                    continue
                c = xi * yj
                for k, tk in enumerate(self.table[i][j]):
                    if not tk.is_zero():
                        out[k] = out[k] + c * tk
        return tuple(out)

    def _validate(self):
        n = self.n
        for i in range(n):
            for j in range(n):
                if self.table[i][j] != self.table[j][i]:
                    raise SchemaError("order table is not commutative at (%d, %d)" % (i, j))
        for i in range(n):
            e = self.basis(i)
            if self.mul(self.unit, e) != e:
                raise SchemaError("unit coordinates do not act as identity on f%d" % (i + 1))
            for j in range(n):
                for k in range(n):
                    a = self.mul(self.mul(e, self.basis(j)), self.basis(k))
                    b = self.mul(e, self.mul(self.basis(j), self.basis(k)))
                    if a != b:
                        raise SchemaError("order table is not associative at (%d, %d, %d)" % (i, j, k))

    def to_json(self):
        return {"rank": self.n, "labels": self.labels,
                "table": [[[str(c) for c in cell] for cell in row] for row in self.table],
                "unit": [str(c) for c in self.unit]}


# -- modules ------------------------------------------------------------------------------

class TModule:
    """E_t = sum_i coeffs[i] tau^i.

    Over A the matrix entries are Polys; over a general order they are coordinate
    tuples in the order basis.  ``q`` is the size of the field fixed by tau, which can
    be smaller than the coefficient field (E_zeta has coefficients in F_q(zeta)).
    """

    def __init__(self, F, coeffs, q=None, order=None, name=None, twisted_by=None):
        self.F = F
        self.q = F.size if q is None else q
        self.order = order if order is not None else OrderBasis.trivial(F)
        self.name = name
        self.twisted_by = twisted_by
        coeffs = [[list(r) for r in M] for M in coeffs]
        while len(coeffs) > 1 and all(_entry_zero(e) for row in coeffs[-1] for e in row):
            coeffs.pop()
        self.coeffs = coeffs
        self.d = len(coeffs[0])
        if any(len(M) != self.d or any(len(row) != self.d for row in M) for M in coeffs):
            raise SchemaError("every tau coefficient must be a %d x %d matrix" % (self.d, self.d))
        self.r = len(coeffs) - 1
        if self.r < 1:
            raise ZeroTauDegree("E_t has tau-degree 0")
        self.s = self._nilpotency()
        self._lock = threading.Lock()
        self._cache = {}

    @property
    def over_A(self):
        return self.order.is_trivial

    # -- nilpotent part ----------------------------------------------------------------------
    def nil_part(self):
        """N = dE(t) - t I, over A (entries Poly) or over the order (coordinate tuples)."""
        t = Poly.gen(self.F)
        M = self.coeffs[0]
        if self.over_A:
            return [[M[i][j] - (t if i == j else Poly(self.F)) for j in range(self.d)] for i in range(self.d)]
        O = self.order
        tu = O.scale(t, O.unit)
        return [[O.add(M[i][j], O.scale(Poly.const(self.F, -1), tu)) if i == j else M[i][j]
                 for j in range(self.d)] for i in range(self.d)]

    def _mat_mul(self, A, B):
        d = self.d
        if self.over_A:
            return [[sum((A[i][k] * B[k][j] for k in range(d)), Poly(self.F)) for j in range(d)]
                    for i in range(d)]
        O = self.order
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = O.zero()
                for k in range(d):
                    acc = O.add(acc, O.mul(A[i][k], B[k][j]))
                row.append(acc)
            out.append(row)
        return out

    def _nilpotency(self):
        N = self.nil_part()
        if all(_entry_zero(e) for row in N for e in row):
            return 0
        P = N
        for _ in range(self.d - 1):
            P = self._mat_mul(P, N)
        if not all(_entry_zero(e) for row in P for e in row):
            raise NilpotencyViolation("dE(t) - tI is not nilpotent")
        # least s with N^(q^s) = 0
        s, k = 0, 1
        while True:
            P = N
            for _ in range(k - 1):
                P = self._mat_mul(P, N)
            if all(_entry_zero(e) for row in P for e in row):
                return s
            s += 1
            k *= self.q

    # -- operators ---------------------------------------------------------------------------
    def require_A(self, what="this operation"):
        if not self.over_A:
            raise UnsupportedShape("%s needs a module over A" % what)

    def theta_op(self):
        self.require_A()
        return TwistedOp(self.coeffs, self.q, zero=Poly(self.F))

    def action_op(self, a):
        """E_a as a twisted polynomial, by Horner in E_t."""
        self.require_A()
        a = parse_apoly(self.F, a)
        Et = self.theta_op()
        d = self.d
        def const(c):
            return TwistedOp([[[Poly.const(self.F, c) if i == j else Poly(self.F) for j in range(d)]
                               for i in range(d)]], self.q, zero=Poly(self.F))
        if a.is_zero():
            return const(0)
        out = const(a.c[-1])
        for c in reversed(a.c[:-1]):
            out = ore_mul(out, Et) + const(c)
        return out

    def act(self, a, x):
        """E_a(x) for a in A and x a vector (Horner, without forming E_a)."""
        self.require_A()
        a = parse_apoly(self.F, a)
        Et = self.theta_op()
        if a.is_zero():
            return [e * 0 for e in x]
        y = [e * FieldElem(self.F, a.c[-1]) for e in x]
        for c in reversed(a.c[:-1]):
            y = apply(Et, y)
            if c:
                y = [u + e * FieldElem(self.F, c) for u, e in zip(y, x)]
        return y

    def z_op(self):
        return twist_z(self.theta_op())

    # -- twists -------------------------------------------------------------------------------
    def twist_P(self, P):
        """F with P F_a = E_a P: coefficient i scaled by P^(q^i - 1)."""
        self.require_A("the P-twist")
        P = parse_apoly(self.F, P)
        if not P.is_irreducible() or not P.is_monic:
            raise NotPrime("%s is not a monic prime" % P)
        return self.scale_twist(P, twisted_by=P)

    def scale_twist(self, m, twisted_by=None):
        """m^-1 E m: coefficient i scaled by m^(q^i - 1)."""
        self.require_A("twisting")
        m = parse_apoly(self.F, m)
        if m.is_zero():
            raise DomainError("twist by zero")
        out = []
        for i, M in enumerate(self.coeffs):
            f = m ** (self.q ** i - 1)
            out.append([[e * f for e in row] for row in M])
        name = None if self.name is None else "%s^(%s)" % (self.name, m)
        return TModule(self.F, out, self.q, name=name, twisted_by=twisted_by)

    def zeta_module(self, zeta):
        """E_zeta: coefficient i multiplied by zeta^i, over F_q(zeta), tau still q-Frobenius."""
        self.require_A("zeta evaluation")
        G = zeta.field
        out = []
        for i, M in enumerate(self.coeffs):
            zi = zeta ** i
            out.append([[e.change_field(G) * zi for e in row] for row in M])
        return TModule(G, out, self.q, twisted_by=self.twisted_by)

    def derive_twists(self, P=None, zeta=None):
        key = ("twists", None if P is None else str(P), None if zeta is None else (zeta.field.modulus, zeta.code))
        with self._lock:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        out = {"tilde": self.z_op()}
        if P is not None:
            Fm = self.twist_P(P)
            out["F"] = Fm
            out["F_tilde"] = Fm.z_op()
        if zeta is not None:
            Ez = self.zeta_module(zeta)
            out["zeta"] = Ez
            lifted = TModule(zeta.field, [[[e.change_field(zeta.field) for e in row] for row in M]
                                          for M in self.coeffs], self.q)
            out["tilde_zeta"] = lifted.z_op()
        with self._lock:
            self._cache[key] = out
        return out

    # -- io ----------------------------------------------------------------------------------
    def to_json(self):
        F = self.F
        if F.is_prime:
            field = {"p": F.p, "e": 1}
        else:
            field = F.to_json()
        if self.over_A:
            tc = [[[str(e) for e in row] for row in M] for M in self.coeffs]
            order = "A"
        else:
            tc = [[[[str(c) for c in e] for e in row] for row in M] for M in self.coeffs]
            order = self.order.to_json()
        return {"q": self.q, "field": field, "order": order, "d": self.d, "tau_coeffs": tc}

    def __repr__(self):
        return "TModule(%s, q=%d, d=%d, r=%d, s=%d)" % (self.name or "?", self.q, self.d, self.r, self.s)


def _entry_zero(e):
    if isinstance(e, (Poly, AZPoly)):
        return e.is_zero()
    return all(c.is_zero() for c in e)


# -- loading -----------------------------------------------------------------------------

def _field_from_json(doc):
    f = doc.get("field")
    if f is None:
        if "q" not in doc:
            raise SchemaError("need either 'field' or 'q'")
        q = int(doc["q"])
        p = _prime_of(q)
        e = _log_int(q, p)
        return field_make(p, e)
    try:
        p = int(f["p"])
        e = int(f.get("e", 1))
    except (KeyError, TypeError, ValueError):
        raise SchemaError("field must be {'p':..,'e':..}")
    return field_make(p, e, f.get("modulus", "auto"))


def _prime_of(q):
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise SchemaError("bad q %r" % q)


def _is_power(n, b):
    while n > 1 and n % b == 0:
        n //= b
    return n == 1


def _log_int(n, b):
    e = 0
    while n > 1:
        if n % b:
            raise SchemaError("q must be a prime power")
        n //= b
        e += 1
    return e


def module_load(doc):
    """Build a TModule from a JSON document (dict, JSON text, path or alias name)."""
    if isinstance(doc, str):
        s = doc.strip()
        if s.startswith("{"):
            doc = json.loads(s)
        elif is_alias(s):
            return alias(s)
        else:
            with open(s) as fh:
                doc = json.load(fh)
    if not isinstance(doc, dict):
        raise SchemaError("module description must be a JSON object")
    if "alias" in doc:
        return alias(doc["alias"], q=doc.get("q"))
    F = _field_from_json(doc)
    q = int(doc.get("q", F.size))
    if q < 2 or not _is_power(F.size, q):
        raise SchemaError("q=%d does not match the coefficient field of size %d" % (q, F.size))
    order_doc = doc.get("order", "A")
    if order_doc in ("A", None):
        order = OrderBasis.trivial(F)
    else:
        try:
            order = OrderBasis(F, order_doc["table"], order_doc.get("unit"), order_doc.get("labels"))
        except (KeyError, TypeError) as exc:
            raise SchemaError("bad order table: %s" % exc)
    tc = doc.get("tau_coeffs")
    if not isinstance(tc, list) or not tc:
        raise SchemaError("tau_coeffs must be a non-empty list")
    d = int(doc.get("d", 1))
    general = not order.is_trivial
    coeffs = []
    for M in tc:
        coeffs.append(_parse_matrix(F, M, d, general, order.n))
    name = doc.get("name")
    return TModule(F, coeffs, q, order=order, name=name)


def _parse_entry(F, e, general, n):
    if general:
        if not isinstance(e, list) or len(e) != n:
            raise SchemaError("entries over an order must be coordinate lists of length %d" % n)
        return tuple(parse_apoly(F, c) for c in e)
    if isinstance(e, list):
        raise SchemaError("unexpected list entry %r" % (e,))
    return parse_apoly(F, e)


def _parse_matrix(F, M, d, general, n):
    # d = 1 also accepts ["t"] or a bare "t" (a bare coordinate list over an order)
    if d == 1:
        if not isinstance(M, list):
            M = [[M]]
        elif M and not isinstance(M[0], list):
            M = [[M]] if general else [M]
        elif general and M and M[0] and not isinstance(M[0][0], list):
            M = [M]
    if not isinstance(M, list) or len(M) != d:
        raise SchemaError("expected a %d x %d matrix, got %r" % (d, d, M))
    rows = []
    for row in M:
        if not isinstance(row, list) or len(row) != d:
            raise SchemaError("expected a row of length %d, got %r" % (d, row))
        rows.append([_parse_entry(F, e, general, n) for e in row])
    return rows


# -- built-in examples ---------------------------------------------------------------------

def _field_for_q(q):
    p = _prime_of(q)
    return field_make(p, _log_int(q, p))


def carlitz(q=3):
    F = _field_for_q(q)
    t = Poly.gen(F)
    return TModule(F, [[[t]], [[Poly.const(F, 1)]]], q, name="carlitz")


def carlitz_tensor2(q=3):
    """C^(x2): t I + N + V tau with N = [[0,1],[0,0]], V = [[0,0],[1,0]]."""
    F = _field_for_q(q)
    t, one, zero = Poly.gen(F), Poly.const(F, 1), Poly(F)
    E0 = [[t, one], [zero, t]]
    E1 = [[zero, zero], [one, zero]]
    return TModule(F, [E0, E1], q, name="carlitz-tensor2")


def drinfeld(q, a):
    """phi_t = t + a_1 tau + ... + a_r tau^r, a given as strings or Polys."""
    F = _field_for_q(q)
    t = Poly.gen(F)
    return TModule(F, [[[t]]] + [[[parse_apoly(F, c)]] for c in a], q)


def alpha_family(q, alpha):
    """phi_t = t + sum_i alpha_i t^(q^i) tau^i, whose unit polynomial is 1 + sum alpha_i z^i."""
    F = _field_for_q(q)
    t = Poly.gen(F)
    coeffs = [[[t]]]
    for i, a in enumerate(alpha, start=1):
        coeffs.append([[(t ** (q ** i)).scale(F.from_int(a))]])
    m = TModule(F, coeffs, q, name="alpha%s" % ",".join(str(a % F.p) for a in alpha))
    m.alpha = tuple(F.from_int(a) for a in alpha)
    return m


def vanishing_alpha(q, r):
    """alpha with 1 + sum alpha_i z^i = (1 - z)^r = (-1)^r (z - 1)^r."""
    F = _field_for_q(q)
    p = F.p
    from math import comb
    return [((-1) ** i * comb(r, i)) % p for i in range(1, r + 1)]


def vanishing_family(q, r):
    m = alpha_family(q, vanishing_alpha(q, r))
    m.name = "vanishing-r%d" % r
    return m


def theta_tau2(q=3):
    """phi_t = t + t tau^2."""
    m = drinfeld(q, ["0", "t"])
    m.name = "theta-tau2"
    return m


def torsion_example(q=3):
    """phi_t = t - t tau, with the torsion point 1."""
    m = drinfeld(q, ["-t"])
    m.name = "torsion-example"
    return m


ALIASES = ("carlitz", "carlitz-tensor2", "theta-tau2", "torsion-example", "vanishing-r1",
           "vanishing-r2", "vanishing-r3")


def is_alias(name):
    base = name.split("@")[0]
    return base in ALIASES or base.startswith("alpha:")


def alias(name, q=None):
    """Built-in modules; ``name@q`` or ``q=`` picks the field (default q=3)."""
    if "@" in name:
        name, qs = name.split("@", 1)
        q = int(qs)
    q = 3 if q is None else int(q)
    if name == "carlitz":
        return carlitz(q)
    if name == "carlitz-tensor2":
        return carlitz_tensor2(q)
    if name == "theta-tau2":
        return theta_tau2(q)
    if name == "torsion-example":
        return torsion_example(q)
    if name.startswith("vanishing-r"):
        return vanishing_family(q, int(name[len("vanishing-r"):]))
    if name.startswith("alpha:"):
        return alpha_family(q, [int(v) for v in name[len("alpha:"):].split(",")])
    raise SchemaError("unknown module alias %r" % name)


def battery(q):
    """The standard test set: Carlitz, its tensor square and three Drinfeld examples."""
    return [carlitz(q), carlitz_tensor2(q), theta_tau2(q), vanishing_family(q, 1), vanishing_family(q, 2)]


# -- torsion ---------------------------------------------------------------------------------

class TorsionReport:
    def __init__(self, bound, basis, annihilator):
        self.bound = bound
        self.basis = basis
        self.annihilator = annihilator

    @property
    def is_torsion_free(self):
        return not self.basis

    @property
    def witnesses(self):
        return [(x, self.annihilator) for x in self.basis]

    def to_json(self):
        return {"torsion_free": self.is_torsion_free, "degree_bound": self.bound,
                "annihilator": None if self.annihilator is None else str(self.annihilator),
                "points": [str(x) for x in self.basis]}


def torsion_bound(phi):
    """Points of degree above this bound have strictly growing degree under phi_t."""
    a = [row[0][0] for row in phi.coeffs]
    dr = a[-1].degree
    qr = phi.q ** phi.r
    b = 0
    for i in range(phi.r):
        if a[i].is_zero():
            continue
        b = max(b, (a[i].degree - dr) // (qr - phi.q ** i))
    return b


def torsion_scan(phi):
    """The full torsion submodule of phi(A) and an annihilator for it."""
    if phi.d != 1 or not phi.over_A:
        raise UnsupportedShape("torsion scan needs a Drinfeld module over A")
    F = phi.F
    b = torsion_bound(phi)
    n = b + 1
    op = phi.theta_op()

    def image(vec):
        x = Poly(F, vec)
        y = apply(op, [x])[0]
        return y

    # W_{k+1} = {x in W_k : phi_t(x) in W_k}, W_0 = polys of degree <= b
    W = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    while True:
        imgs = [image(w) for w in W]
        if not W:
            break
        # coordinates of images; must lie in span(W) (degree <= b first)
        width = max([n] + [len(y.c) for y in imgs])
        rows = []
        for w, y in zip(W, imgs):
            rows.append(list(y.c) + [0] * (width - len(y.c)))
        # solve: combination c with sum c_k img_k in span(W)
        # stack: [img coords | W coords]; kernel gives c and the span coefficients
        k = len(W)
        M = []
        for col in range(width):
            M.append([rows[j][col] for j in range(k)] +
                     [F.neg[W[j][col]] if col < n else 0 for j in range(k)])
        ker = nullspace(F, M, 2 * k)
        new = []
        for v in ker:
            c = v[:k]
            x = [0] * n
            for j, cj in enumerate(c):
                if cj:
                    for i in range(n):
                        x[i] = F.add[x[i]][F.mul[cj][W[j][i]]]
            new.append(x)
        new = _basis(F, new, n)
        if len(new) == len(W):
            break
        W = new
    if not W:
        return TorsionReport(b, [], None)
    # matrix of phi_t on W
    k = len(W)
    T = []
    for w in W:
        y = image(w)
        coords = _coords_in(F, W, list(y.c) + [0] * (n - len(y.c)))
        T.append(coords)
    # T rows are images; transpose to columns
    Tm = ThetaActionMatrix(F, [[T[j][i] for j in range(k)] for i in range(k)])
    ann = charpoly_theta(Tm)
    return TorsionReport(b, [Poly(F, w) for w in W], ann)


def _basis(F, vecs, n):
    from .apoly import rref
    if not vecs:
        return []
    R, piv = rref(F, [list(v) for v in vecs])
    return [row for row in R[:len(piv)]]


def _coords_in(F, W, y):
    """Coordinates of y in the span of the rows W (W in reduced row echelon form)."""
    k, n = len(W), len(W[0])
    M = [[W[j][i] for j in range(k)] + [F.neg[y[i]]] for i in range(n)]
    ker = nullspace(F, M, k + 1)
    for v in ker:
        if v[k]:
            s = F.inv[v[k]]
            return [F.mul[s][c] for c in v[:k]]
    raise DomainError("point outside the stable subspace")


def kill_torsion(phi):
    """A twist m^-1 phi m without A-torsion and the m used (t^(b+1); 1 if already torsion free)."""
    rep = torsion_scan(phi)
    if rep.is_torsion_free:
        return phi, Poly.const(phi.F, 1), rep
    m = Poly.monomial(phi.F, rep.bound + 1)
    return phi.scale_twist(m), m, rep
