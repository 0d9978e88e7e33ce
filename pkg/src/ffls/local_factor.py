"""Local factors z_Q = [Lie_E(O/Q)] / [E(O/Q)] from t-action matrices on residue rings.

The residue ring O/QO is an F_q-space with basis f_i t^j (0 <= j < deg Q), and
E(O/Q) is its d-th power.  Basis vectors are ordered (order index, t-power,
coordinate).  tau acts as x -> x^q, an F_q-linear map on O/Q.
"""
from .apoly import Poly, AZPoly, ThetaActionMatrix, charpoly_theta, require_prime, parse_apoly
from .errors import Unsupported


class ResidueRing:
    """O/QO with elements stored as flat code lists of length n * deg Q."""

    def __init__(self, order, Q):
        self.order = order
        self.Q = Q
        self.F = Q.F
        self.D = Q.degree
        self.n = order.n
        self.m = self.n * self.D
        # table reduced mod Q, stored as flat vectors
        self._table = [[self._flat(tuple(c % Q for c in cell)) for cell in row] for row in order.table]
        self._frob = None

    def _flat(self, coords):
        out = [0] * self.m
        for i, c in enumerate(coords):
            for j, v in enumerate(c.c[:self.D]):
                out[i * self.D + j] = v
        return out

    def reduce(self, x):
        """Order element (coordinate tuple or Poly over A) -> flat vector."""
        if isinstance(x, Poly):
            x = (x,) + tuple(Poly(self.F) for _ in range(self.n - 1))
        return self._flat(tuple(c % self.Q for c in x))

    def _split(self, v):
        D = self.D
        return [Poly(self.F, v[i * D:(i + 1) * D]) for i in range(self.n)]

    def mul(self, u, v):
        F, D, Q = self.F, self.D, self.Q
        us, vs = self._split(u), self._split(v)
        acc = [Poly(F) for _ in range(self.n)]
        for i, a in enumerate(us):
            if a.is_zero():
                continue
            for j, b in enumerate(vs):
                if b.is_zero():
                    continue
                c = (a * b) % Q
                cell = self._table[i][j]
                for k in range(self.n):
                    tk = Poly(F, cell[k * D:(k + 1) * D])
                    if not tk.is_zero():
                        acc[k] = acc[k] + c * tk
        return self._flat(tuple(a % Q for a in acc))

    def basis(self, k):
        e = [0] * self.m
        e[k] = 1
        return e

    def _times_t(self, v):
        """t * v in A/Q (only for the trivial order)."""
        F, D = self.F, self.D
        top = v[-1]
        out = [0] + v[:-1]
        if top:
            mt = F.mul[top]
            Qc = self.Q.c
            for j in range(D):
                if Qc[j]:
                    out[j] = F.sub[out[j]][mt[Qc[j]]]
        return out

    def _apply(self, M, v):
        F = self.F
        out = [0] * self.m
        for k, c in enumerate(v):
            if c:
                mc = F.mul[c]
                col = M[k]
                for i, x in enumerate(col):
                    if x:
                        out[i] = F.add[out[i]][mc[x]]
        return out

    def _columns(self, xv):
        if self.n == 1:
            cols = [xv]
            for _ in range(self.m - 1):
                cols.append(self._times_t(cols[-1]))
            return cols
        return [self.mul(xv, self.basis(k)) for k in range(self.m)]

    def mult_matrix(self, x):
        """Columns are x * basis vectors."""
        xv = x if isinstance(x, list) else self.reduce(x)
        cols = self._columns(xv)
        return [[cols[k][i] for k in range(self.m)] for i in range(self.m)]

    def power(self, v, e):
        out = self.reduce(Poly.const(self.F, 1)) if self.n == 1 else self._unit()
        base = v
        while e:
            if e & 1:
                out = self.mul(out, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return out

    def _unit(self):
        return self.reduce(self.order.unit)

    def frob_matrix(self):
        """Matrix of x -> x^q."""
        if self._frob is None:
            q = self.F.size
            if self.n == 1:
                # columns t^(jq) = x^j with x = t^q mod Q
                x = self._flat(((Poly.monomial(self.F, q) % self.Q),))
                Mx = self._columns(x)
                cols = [self.basis(0)]
                for _ in range(self.m - 1):
                    cols.append(self._apply(Mx, cols[-1]))
            else:
                cols = [self.power(self.basis(k), q) for k in range(self.m)]
            self._frob = [[cols[k][i] for k in range(self.m)] for i in range(self.m)]
        return self._frob


def _code_matmul(F, A, B):
    from .apoly import mat_mul
    return mat_mul(F, A, B)


def residue_matrices(E, Q, with_z=False, check=True):
    """(Lie matrix, module matrix) of the t-action on Lie_E(O/Q) and E(O/Q)."""
    F = E.F
    Q = parse_apoly(F, Q)
    if check:
        require_prime(Q)
    if E.q != F.size:
        raise Unsupported("local factors need tau to be the full Frobenius of the coefficient field")
    R = ResidueRing(E.order, Q)
    m, d = R.m, E.d
    N = m * d
    Phi = R.frob_matrix()
    # blocks[i][r][c]: matrix of (E_i)[r][c] o Phi^i on R
    Phi_pow = [[[1 if a == b else 0 for b in range(m)] for a in range(m)]]
    for i in range(1, E.r + 1):
        Phi_pow.append(_code_matmul(F, Phi, Phi_pow[-1]))
    zero_z = Poly(F, var="z")

    def blank():
        return [[zero_z if with_z else 0 for _ in range(N)] for _ in range(N)]

    lie = [[0] * N for _ in range(N)]
    mod = blank()
    for i, M in enumerate(E.coeffs):
        for r in range(d):
            for c in range(d):
                e = M[r][c]
                if all(p.is_zero() for p in (e if isinstance(e, tuple) else (e,))):
                    continue
                B = R.mult_matrix(e)
                if i:
                    B = _code_matmul(F, B, Phi_pow[i])
                for a in range(m):
                    for b in range(m):
                        v = B[a][b]
                        if not v:
                            continue
                        row, col = a * d + r, b * d + c
                        if i == 0:
                            lie[row][col] = F.add[lie[row][col]][v]
                        if with_z:
                            mod[row][col] = mod[row][col] + Poly.monomial(F, i, v, var="z")
                        else:
                            mod[row][col] = F.add[mod[row][col]][v]
    return ThetaActionMatrix(F, lie), ThetaActionMatrix(F, mod, over_z=with_z)


class LocalFactor:
    def __init__(self, Q, lie_gen, mod_gen, with_z):
        self.Q = Q
        self.lie_gen = lie_gen
        self.mod_gen = mod_gen
        self.with_z = with_z

    def eval_z(self, c):
        if not self.with_z:
            return self
        return LocalFactor(self.Q, self.lie_gen, self.mod_gen.eval_z(c), False)

    def is_trivial(self):
        if self.with_z:
            return AZPoly.from_apoly(self.lie_gen) == self.mod_gen
        return self.lie_gen == self.mod_gen

    def to_json(self):
        return {"Q": str(self.Q), "lie": str(self.lie_gen), "mod": str(self.mod_gen), "z": self.with_z}

    def __repr__(self):
        return "LocalFactor(Q=%s, %s / %s)" % (self.Q, self.lie_gen, self.mod_gen)


def local_factor(E, Q, with_z=False, check=True):
    """z_Q as a pair of Fitting generators; ``check=False`` trusts that Q is a monic prime."""
    L, M = residue_matrices(E, Q, with_z, check)
    Q = parse_apoly(E.F, Q)
    return LocalFactor(Q, charpoly_theta(L), charpoly_theta(M), with_z)
