"""Acceptance criteria A1-A11, one test each; a pass/fail line per criterion is printed
in the terminal summary (and by ``python tests/test_acceptance.py``)."""
import functools
import itertools
import json
import os
import random
import subprocess
import sys
import time

from ffls.gf import field_make, extension_of_degree, FieldElem
from ffls.apoly import Poly, AZPoly, parse_apoly, monic_primes, charpoly_theta, invariant_factors
from ffls.series import InfSeries, ZSeries, padic_field, embed_rational
from ffls.ore import (TwistedOp, ore_mul, exp_log, ExpLogData, InfContext, PadicContext,
                      ExactContext, log_coeff_bound, exp_coeff_bound, vp_L_closed_form, vp_D_closed_form)
from ffls.tmodule import (battery, carlitz, theta_tau2, alpha_family, torsion_scan, kill_torsion)
from ffls.local_factor import local_factor, residue_matrices
from ffls.lseries import (lseries_inf, lseries_padic, unit_polynomial, vanishing_order,
                          class_formula_check, z_minus_one_order, padic_z_order,
                          carlitz_direct_sum, carlitz_log_one)
from ffls.newton import newton_polygon, smb_from_polygon, ord_bound

import oracles

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script
    ACCEPTANCE = []


def criterion(tag, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*a, **k):
            t0 = time.perf_counter()
            try:
                detail = fn(*a, **k)
            except BaseException as exc:
                ACCEPTANCE.append("%s FAIL  %s (%s: %s)" % (tag, title, type(exc).__name__,
                                                          str(exc).splitlines()[0][:120] if str(exc) else ""))
                raise
            dt = time.perf_counter() - t0
            ACCEPTANCE.append("%s PASS  %s [%.1fs]%s" % (tag, title, dt, "  " + detail if detail else ""))
        return run
    return wrap


def agree(a, b):
    d = a - b
    return min(d.val, d.prec)


def same_ops(a, b, n):
    for i in range(n):
        Ma = a.coeffs[i] if i < len(a) else None
        Mb = b.coeffs[i] if i < len(b) else None
        for r in range(len((Ma or Mb))):
            for c in range(len((Ma or Mb)[r])):
                x = Ma[r][c] if Ma is not None else None
                y = Mb[r][c] if Mb is not None else None
                if x is None:
                    x, y = y, x
                if not (x if y is None else x - y).is_zero():
                    return False
    return True


# -- A1 -------------------------------------------------------------------------------------------

@criterion("A1", "Carlitz three-way identity at infinity, q in {2,3,5}, D = 6, < 5 s")
def test_A1_carlitz_three_way_identity():
    t0 = time.perf_counter()
    D = 6
    for q in (2, 3, 5):
        F = field_make(q)
        euler = lseries_inf(carlitz(q), D, prec=D + 1).value
        direct = carlitz_direct_sum(F, D, D + 1)
        logs = carlitz_log_one(F, D, D + 1)
        assert agree(euler, direct) >= D + 1, q
        assert agree(euler, logs) >= D + 1, q
    dt = time.perf_counter() - t0
    assert dt < 5, "took %.1fs" % dt


# -- A2 -------------------------------------------------------------------------------------------

@criterion("A2", "charpoly equals product of Smith invariant factors, battery, deg Q <= 2, < 30 s")
def test_A2_fitting_oracle_equivalence():
    t0 = time.perf_counter()
    count = 0
    for q in (2, 3):
        F = field_make(q)
        for E in battery(q):
            for Q in monic_primes(F, 2):
                for M in residue_matrices(E, Q):
                    prod = Poly.const(F, 1)
                    for f in invariant_factors(M):
                        prod = prod * f
                    for method in ("hessenberg", "berkowitz"):
                        assert charpoly_theta(M, method) == prod, (E.name, str(Q), method)
                    count += 1
    dt = time.perf_counter() - t0
    assert dt < 30, "took %.1fs" % dt
    return "%d matrices" % count


# -- A3 -------------------------------------------------------------------------------------------

@criterion("A3", "exp/log functional equations and inverse, exact to tau-order 8, battery q in {2,3}")
def test_A3_exp_log_identities():
    N = 8
    for q in (2, 3):
        for E in battery(q):
            data = exp_log(E, N)
            ctx = data.ctx
            Et = E.theta_op().map(ctx.lift)
            d0 = TwistedOp([E.coeffs[0]], E.q).map(ctx.lift)
            ex, lg = data.exp_op(), data.log_op()
            ident = TwistedOp([[[Poly.const(E.F, int(i == j)) for j in range(E.d)] for i in range(E.d)]],
                              E.q).map(ctx.lift)
            assert same_ops(ore_mul(ex, d0), ore_mul(Et, ex), N + 1), E.name
            assert same_ops(ore_mul(d0, lg), ore_mul(lg, Et), N + 1), E.name
            assert same_ops(ore_mul(lg, ex), ident, N + 1), E.name
            assert same_ops(ore_mul(ex, lg), ident, N + 1), E.name


# -- A4 -------------------------------------------------------------------------------------------

def _vp_theta_frob_minus_theta(j, P, p, q):
    """v_P(t^(q^j) - t), computed modulo P^2 by repeated squaring."""
    P2 = oracles.mul(P, P, p)
    x = [0, 1]
    for _ in range(j):
        x = oracles.divmod_(oracles.power(x, q, p), P2, p)[1]
    f = oracles.sub(x, [0, 1], p)
    f = oracles.divmod_(f, P2, p)[1]
    if not f:
        return 2
    return 1 if not oracles.divmod_(f, P, p)[1] else 0


@criterion("A4", "v_P(D_n), v_P(L_n) closed forms, n <= 30, deg P <= 3, q in {2,3}")
def test_A4_carlitz_factorial_valuations():
    checked = 0
    for q in (2, 3):
        F = field_make(q)
        K_cache = {}
        for P in monic_primes(F, 3):
            Pc = list(P.c)
            v1 = {j: _vp_theta_frob_minus_theta(j, Pc, q, q) for j in range(1, 31)}
            for n in range(31):
                # L_n = prod_{i=1}^n (t - t^(q^i)),  D_n = prod_{i<n} (t^(q^(n-i)) - t)^(q^i)
                vL = sum(v1[i] for i in range(1, n + 1))
                vD = sum(q ** i * v1[n - i] for i in range(n))
                assert vL == vp_L_closed_form(n, P.degree), (str(P), n)
                assert vD == vp_D_closed_form(q, n, P.degree), (str(P), n)
                checked += 1
            # small n: valuations of the actual polynomials
            K = K_cache.setdefault(str(P), padic_field(P))
            t = Poly.gen(F)
            L = Poly.const(F, 1)
            for n in range(1, 4):
                L = L * (t - t ** (q ** n))
                D = Poly.const(F, 1)
                for i in range(n):
                    D = D * (t ** (q ** n) - t ** (q ** i))
                assert K.valuation_of(L) == vp_L_closed_form(n, P.degree)
                assert K.valuation_of(D) == vp_D_closed_form(q, n, P.degree)
    return "%d (P, n) pairs" % checked


# -- A5 -------------------------------------------------------------------------------------------

def _mat_val(M):
    vals = [e.val for row in M for e in row if not e.is_zero()]
    return min(vals) if vals else None


@criterion("A5", "P-adic bounds on log and exp coefficients, battery, n <= 30")
def test_A5_coefficient_bounds():
    checked = 0
    for q in (2, 3):
        F = field_make(q)
        for E in battery(q):
            for P in monic_primes(F, 2):
                for M, tw in ((E, False), (E.twist_P(P), True)):
                    data = ExpLogData(M, PadicContext(P, 8), E.s).extend_log(30).extend_exp(30)
                    for n in range(31):
                        vl, vd = _mat_val(data.l[n]), _mat_val(data.d[n])
                        if vl is not None:
                            assert vl >= log_coeff_bound(q, E.s, P.degree, n, tw), (E.name, str(P), n, vl)
                        if vd is not None:
                            assert vd >= exp_coeff_bound(q, E.s, P.degree, n, tw), (E.name, str(P), n, vd)
                        checked += 1
    # exact cross-check of the P-adic valuations on the first coefficients
    for q in (2, 3):
        F = field_make(q)
        for E in battery(q):
            if E.d != 1:
                continue
            ex = ExpLogData(E, ExactContext(F, q), E.s).extend_log(4)
            for P in monic_primes(F, 2):
                K = padic_field(P)
                pd = ExpLogData(E, PadicContext(P, 8), E.s).extend_log(4)
                for n in range(5):
                    c = ex.l[n][0][0]
                    if c.is_zero():
                        continue
                    v = K.valuation_of(c.numerator()) - K.valuation_of(c.denominator())
                    assert v == pd.l[n][0][0].val
    return "%d coefficient pairs" % checked


# -- A6 -------------------------------------------------------------------------------------------

@criterion("A6", "unit polynomial 1 + sum alpha_i z^i for every alpha, r <= 3, q in {2,3}, prec 40")
def test_A6_unit_polynomials():
    count = 0
    for q in (2, 3):
        F = field_make(q)
        up = unit_polynomial(carlitz(q), prec=40)
        assert str(up.u) == "1" and up.residual_valuation > 20
        for r in (1, 2, 3):
            for alpha in itertools.product(range(q), repeat=r):
                if not alpha[-1]:
                    continue
                up = unit_polynomial(alpha_family(q, list(alpha)), prec=40)
                want = AZPoly.from_z_coeffs(F, [Poly.const(F, 1)] + [Poly.const(F, a) for a in alpha])
                assert up.u == want, (q, alpha, str(up.u))
                assert up.residual_valuation > 20
                count += 1
    return "%d alpha vectors" % count


# -- A7 -------------------------------------------------------------------------------------------

@criterion("A7", "q = 3, t + t tau^2: u(1) = 1, order 0 at four primes, slopes k+1, ord_bound 2")
def test_A7_counterexample():
    phi = theta_tau2(3)
    F = phi.F
    q = 3
    u = unit_polynomial(phi).u
    assert u.eval_z(1) == Poly.const(F, 1)
    primes = ["t", "t + 1", "t + 2", "t^2 + 1"]
    rep = vanishing_order(phi, primes=primes, prec=10)
    assert rep.order == 0
    assert all(v == 0 for v in rep.padic_orders.values()), rep.padic_orders
    npg = newton_polygon(phi, 8)
    edges = npg.edges
    for k in range(3):
        assert edges[k] == (k + 1, q ** (2 * k + 2) - q ** (2 * k)), edges[k]
    smb = smb_from_polygon(npg, phi.r)
    assert ord_bound(smb) == 2
    return "edges %s" % [(int(s), L) for s, L in edges[:3]]


# -- A8 -------------------------------------------------------------------------------------------

@criterion("A8", "Carlitz P-adic class formula, product vs log formula >= 20 digits, deg P <= 2, < 60 s")
def test_A8_padic_class_formula():
    t0 = time.perf_counter()
    prec = 20
    n = 0
    for q in (2, 3):
        F = field_make(q)
        C = carlitz(q)
        for P in monic_primes(F, 2):
            prod = lseries_padic(C, P, mode="product", prec=prec)
            logf = lseries_padic(C, P, mode="log_formula", prec=prec)
            assert prod.stabilized
            assert agree(prod.value, logf.value) >= prec, (q, str(P))
            rep = class_formula_check(C, P, prec=prec)
            for c in rep["checks"][:3]:
                assert c["agreement"] >= prec, (q, str(P), c["identity"], c["agreement"])
            n += 1
    dt = time.perf_counter() - t0
    assert dt < 60, "took %.1fs" % dt
    return "%d primes" % n


# -- A9 -------------------------------------------------------------------------------------------

def _drinfeld_battery(q):
    return [E for E in battery(q) if E.d == 1]


@criterion("A9", "order <= r, twist invariance, (z-1)-divisibility equivalence; P-independence of the order reported")
def test_A9_vanishing_order_suite():
    rng = random.Random(9)
    notes = []
    for q in (2, 3):
        F = field_make(q)
        for phi in _drinfeld_battery(q):
            base = vanishing_order(phi).order
            assert base <= phi.r, (phi.name, base)
            for _ in range(5):
                m = Poly(F, [rng.randrange(q) for _ in range(rng.randint(1, 2))] + [rng.randrange(1, q)])
                assert vanishing_order(phi.scale_twist(m)).order == base, (phi.name, str(m))
            # divisibility equivalence on a torsion-free model
            psi = phi if torsion_scan(phi).is_torsion_free else kill_torsion(phi)[0]
            u_order = z_minus_one_order(unit_polynomial(psi).u)
            orders = {}
            for P in monic_primes(F, 2):
                res = lseries_padic(psi, P, mode="log_formula", prec=10, with_z=True)
                k_L = padic_z_order(res.value, 10, psi.r)
                for k in range(psi.r + 1):
                    assert (k_L >= k) == (u_order >= k), (phi.name, str(P), k, k_L, u_order)
                orders[str(P)] = k_L
            same = len(set(orders.values())) == 1
            notes.append("%s@%d:%s" % (phi.name, q, "same" if same else "differs"))
    return "order independent of P (deg P <= 2): " + ", ".join(notes)


# -- A10 ------------------------------------------------------------------------------------------

def _apply_twisted(data, kind, f, N, q, W):
    """sum_n c_n z^n f^(n) for a ZSeries f (d = 1)."""
    acc = None
    for n in range(N + 1):
        c = getattr(data, kind)[n][0][0]
        if c.is_exact_zero():
            continue
        term = f.frob(n, q, cap=W) * c
        term = term.z_shift(n) if n else term
        acc = term if acc is None else acc + term
    return acc


def _apply_plain(data, kind, x, N, q, W):
    acc = None
    for n in range(N + 1):
        c = getattr(data, kind)[n][0][0]
        if c.is_exact_zero():
            continue
        term = c * (x.frob(n, q, cap=W) if n else x)
        acc = term if acc is None else acc + term
    return acc


@criterion("A10", "ev at z = 1 coherence and zeta compatibility for F_4 and F_9")
def test_A10_z_evaluation_coherence():
    # local factors and L-series
    for q in (2, 3):
        F = field_make(q)
        for E in battery(q):
            for Q in monic_primes(F, 2):
                assert local_factor(E, Q, with_z=True).eval_z(1).mod_gen == local_factor(E, Q).mod_gen
            plain = lseries_inf(E, 3, prec=8)
            twisted = lseries_inf(E, 3, z_prec=E.r * 8 + 4, prec=8)
            assert agree(twisted.at_z(1), plain.value) >= 8, E.name
    # u(1) against exp_phi(L(phi/A)) at infinity
    for q, phi in ((2, carlitz(2)), (3, carlitz(3)), (3, alpha_family(3, [2])), (2, alpha_family(2, [1])),
                   (2, theta_tau2(2)), (2, alpha_family(2, [0, 1]))):
        D = 6 if phi.r == 1 else 10
        L = lseries_inf(phi, D, prec=12)
        W = L.certified_prec + 20
        data = ExpLogData(phi, InfContext(phi.F, q, W), phi.s).extend_exp(8)
        lhs = _apply_plain(data, "d", L.value, 8, q, W)
        u1 = unit_polynomial(phi).u.eval_z(1)
        assert agree(lhs, InfSeries.from_apoly(u1, W)) >= L.certified_prec, phi.name
    # exp/log of the z-twist evaluated at zeta equals exp/log of E_zeta, zeta = 1 or a generator
    N, W = 5, 40
    for q in (2, 3):
        F = field_make(q)
        G = extension_of_degree(F, 2)
        for zeta in (FieldElem(F, 1), FieldElem(G, q)):
            for E in _drinfeld_battery(q):
                Ez = E.zeta_module(zeta) if zeta.field is not F else E
                data = ExpLogData(E, InfContext(F, q, W), E.s).extend_exp(N).extend_log(N)
                dz = ExpLogData(Ez, InfContext(zeta.field, q, W), Ez.s).extend_exp(N).extend_log(N)
                for n in range(N + 1):
                    a, b = data.d[n][0][0], dz.d[n][0][0]
                    if not a.is_exact_zero():
                        assert agree(b, a.change_field(zeta.field) * zeta ** n) >= W
                terms = [embed_rational(Poly.const(F, 1), parse_apoly(F, s), "inf", W)
                         for s in ("t", "t^2 + 1", "t^3 + t + 1")]
                f = ZSeries(terms + [InfSeries.zero(F)] * (N + 1), N + 4)
                fz = f.eval(zeta)
                for kind in ("d", "l"):
                    lhs = _apply_twisted(data, kind, f, N, q, W).eval(zeta)
                    rhs = _apply_plain(dz, kind, fz, N, q, W)
                    assert agree(lhs, rhs) >= W, (E.name, zeta.field.size, kind)
    return "zeta in F_4, F_9"


# -- A11 ------------------------------------------------------------------------------------------

ACCEPTANCE_COMMANDS = [
    ["lseries", "-m", "carlitz@2", "--deg-bound", "6"],
    ["lseries", "-m", "carlitz@5", "--deg-bound", "6"],
    ["lseries", "-m", "theta-tau2", "--deg-bound", "4", "--z"],
    ["lseries", "-m", "carlitz", "-P", "t^2 + 1", "--prec", "20"],
    ["local-factor", "-m", "carlitz-tensor2", "-Q", "t^2 + 1", "--z"],
    ["unit-poly", "-m", "alpha:1,2,1"],
    ["vanishing-order", "-m", "theta-tau2", "-P", "t", "-P", "t^2 + 1", "--twists", "3"],
    ["newton", "-m", "theta-tau2", "--n-max", "8"],
    ["smb", "-m", "vanishing-r2"],
    ["class-check", "-m", "carlitz", "-P", "t", "--prec", "25"],
    ["torsion-scan", "-m", "carlitz@2"],
]


@criterion("A11", "byte-identical JSON with FFLS_THREADS = 1 and 4")
def test_A11_determinism():
    for argv in ACCEPTANCE_COMMANDS:
        outs = []
        for n in ("1", "4"):
            env = dict(os.environ, FFLS_THREADS=n)
            p = subprocess.run([sys.executable, "-m", "ffls.cli"] + argv, env=env, capture_output=True)
            assert p.returncode == 0, (argv, p.stderr.decode())
            outs.append(p.stdout)
        assert outs[0] == outs[1], argv
        json.loads(outs[0])
    return "%d commands" % len(ACCEPTANCE_COMMANDS)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_A")]
    failed = 0
    for fn in sorted(tests, key=lambda f: int(f.__name__.split("_")[1][1:])):
        try:
            fn()
        except BaseException:
            failed += 1
    for line in ACCEPTANCE:
        print(line)
    sys.exit(1 if failed else 0)
