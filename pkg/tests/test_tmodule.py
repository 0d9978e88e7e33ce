import itertools
import random

import pytest

from ffls.gf import field_make, extension_of_degree, FieldElem
from ffls.apoly import Poly, parse_apoly
from ffls.ore import ore_mul
from ffls.tmodule import (module_load, alias, is_alias, carlitz, carlitz_tensor2, theta_tau2,
                          torsion_example, vanishing_family, battery, torsion_scan, torsion_bound,
                          kill_torsion, drinfeld)
from ffls.errors import SchemaError, NilpotencyViolation, ZeroTauDegree, UnsupportedShape, NotPrime

import oracles


def test_carlitz_load_and_nilpotency_exponent():
    E = module_load({"q": 3, "field": {"p": 3, "e": 1}, "order": "A", "d": 1,
                     "tau_coeffs": [[["t"]], [["1"]]]})
    assert (E.d, E.r, E.s) == (1, 1, 0)
    assert module_load('{"q": 2, "d": 1, "tau_coeffs": [["t"], ["1"]]}').q == 2


@pytest.mark.parametrize("q,s", [(2, 1), (3, 1), (4, 1), (5, 1)])
def test_tensor_square_nilpotency_exponent(q, s):
    # N^2 = 0, so s is least with q^s >= 2
    assert carlitz_tensor2(q).s == s


def test_tensor_square_from_json_matches_builtin():
    doc = {"q": 3, "d": 2, "tau_coeffs": [[["t", "1"], ["0", "t"]], [["0", "0"], ["1", "0"]]]}
    E = module_load(doc)
    assert E.to_json() == carlitz_tensor2(3).to_json()


def test_load_errors():
    with pytest.raises(ZeroTauDegree):
        module_load({"q": 3, "d": 1, "tau_coeffs": [[["t"]]]})
    with pytest.raises(ZeroTauDegree):
        module_load({"q": 3, "d": 1, "tau_coeffs": [[["t"]], [["0"]]]})
    with pytest.raises(NilpotencyViolation):
        module_load({"q": 3, "d": 1, "tau_coeffs": [[["t + 1"]], [["1"]]]})
    with pytest.raises(NilpotencyViolation):
        module_load({"q": 3, "d": 2, "tau_coeffs": [[["t", "1"], ["1", "t"]], [["1", "0"], ["0", "1"]]]})
    with pytest.raises(SchemaError):
        module_load({"q": 3, "tau_coeffs": []})
    with pytest.raises(SchemaError):
        module_load({"q": 3, "d": 2, "tau_coeffs": [[["t"]], [["1"]]]})
    with pytest.raises(SchemaError):
        module_load({"q": 6, "tau_coeffs": [[["t"]], [["1"]]]})
    with pytest.raises(SchemaError):
        module_load({"q": 4, "field": {"p": 3, "e": 1}, "tau_coeffs": [[["t"]], [["1"]]]})
    with pytest.raises(SchemaError):
        module_load([1, 2])


# y^2 = t over A: basis (1, y)
SQRT_T = {"table": [[["1", "0"], ["0", "1"]], [["0", "1"], ["t", "0"]]], "unit": ["1", "0"]}


def test_general_order_module():
    E = module_load({"q": 3, "order": SQRT_T, "d": 1, "tau_coeffs": [[["t", "0"]], [["1", "0"]]]})
    assert not E.over_A and E.order.n == 2 and E.s == 0
    O = E.order
    y = O.basis(1)
    assert O.mul(y, y) == (parse_apoly(E.F, "t"), Poly(E.F))
    assert E.to_json()["order"]["table"] == SQRT_T["table"]
    with pytest.raises(UnsupportedShape):
        torsion_scan(E)


def test_bad_order_tables():
    noncomm = {"table": [[["1", "0"], ["0", "1"]], [["0", "t"], ["t", "0"]]]}
    with pytest.raises(SchemaError):
        module_load({"q": 3, "order": noncomm, "tau_coeffs": [[["t", "0"]], [["1", "0"]]]})
    with pytest.raises(SchemaError):
        module_load({"q": 3, "order": SQRT_T, "tau_coeffs": [[["t"]], [["1"]]]})
    with pytest.raises(SchemaError):
        module_load({"q": 3, "order": {"table": SQRT_T["table"], "unit": ["0", "1"]},
                     "tau_coeffs": [[["t", "0"]], [["1", "0"]]]})


def test_aliases():
    assert is_alias("carlitz") and is_alias("vanishing-r2@2") and is_alias("alpha:1,1")
    assert not is_alias("carlitz.json")
    assert alias("carlitz@5").q == 5
    assert alias("theta-tau2").to_json() == theta_tau2(3).to_json()
    E = alias("alpha:1,1")
    assert [str(M[0][0]) for M in E.coeffs] == ["t", "t^3", "t^9"]
    assert alias("vanishing-r1", q=2).coeffs[1][0][0] == parse_apoly(field_make(2), "t^2")
    with pytest.raises(SchemaError):
        alias("nope")


# -- torsion ----------------------------------------------------------------------------------

def _phi_t_oracle(a, x, q, p):
    out = []
    for i, ai in enumerate(a):
        out = oracles.add(out, oracles.mul(ai, oracles.power(x, q ** i, p), p), p)
    return out


def _orbit_torsion(phi, B):
    """Points of degree <= B whose phi_t-orbit is finite, found by direct iteration."""
    p = phi.F.p
    a = [list(M[0][0].c) for M in phi.coeffs]
    found = []
    for deg in range(-1, B + 1):
        for x in (oracles.monics(deg, p) if deg >= 0 else [[]]):
            for c in range(1, p) if deg >= 0 else [1]:
                y = [(v * c) % p for v in x]
                seen = set()
                cur = y
                while tuple(cur) not in seen and len(cur) <= B + 1:
                    seen.add(tuple(cur))
                    cur = _phi_t_oracle(a, cur, phi.q, p)
                if len(cur) <= B + 1:
                    found.append(tuple(y))
    return set(found)


def _span(F, vecs, n):
    out = set()
    for cs in itertools.product(range(F.size), repeat=len(vecs)):
        v = [0] * n
        for c, w in zip(cs, vecs):
            for i, wi in enumerate(w):
                v[i] = F.add[v[i]][F.mul[c][wi]]
        out.add(tuple(oracles.trim(v)))
    return out


@pytest.mark.parametrize("q,make,free", [
    (3, carlitz, True), (2, carlitz, False), (3, theta_tau2, True), (2, theta_tau2, False),
    (3, torsion_example, False), (2, torsion_example, False), (5, carlitz, True),
])
def test_torsion_scan_against_orbit_oracle(q, make, free):
    phi = make(q)
    rep = torsion_scan(phi)
    assert rep.is_torsion_free == free
    B = torsion_bound(phi) + 2
    truth = _orbit_torsion(phi, B)
    n = torsion_bound(phi) + 1
    ours = _span(phi.F, [list(x.c) + [0] * (n - len(x.c)) for x in rep.basis], n)
    assert ours == truth
    for x, a in rep.witnesses:
        assert phi.act(a, [x]) == [Poly(phi.F)]


def test_carlitz_q2_torsion_points():
    rep = torsion_scan(carlitz(2))
    assert rep.to_json() == {"torsion_free": False, "degree_bound": 1, "annihilator": "t^2 + t",
                             "points": ["1", "t"]}


def test_torsion_bound_formula():
    # floor((deg a_i - deg a_r) / (q^r - q^i)), clamped at 0
    assert torsion_bound(carlitz(3)) == 0
    assert torsion_bound(carlitz(2)) == 1
    assert torsion_bound(drinfeld(3, ["1", "1"])) == 0
    assert torsion_bound(drinfeld(2, ["0", "1"])) == 0


@pytest.mark.parametrize("q,make", [(2, carlitz), (2, theta_tau2), (3, torsion_example)])
def test_kill_torsion(q, make):
    phi = make(q)
    psi, m, rep = kill_torsion(phi)
    assert not rep.is_torsion_free and m.degree == rep.bound + 1
    assert torsion_scan(psi).is_torsion_free
    # psi = m^-1 phi m: m psi_t = phi_t m
    M = psi.theta_op()
    mm = type(M)([[[m]]], psi.q)
    assert ore_mul(mm, M).coeffs == ore_mul(phi.theta_op(), mm).coeffs
    same, one, _ = kill_torsion(carlitz(3))
    assert same is not None and one == Poly.const(same.F, 1)


def test_torsion_scan_rejects_higher_dimension():
    with pytest.raises(UnsupportedShape):
        torsion_scan(carlitz_tensor2(3))


# -- twists and algebra properties ------------------------------------------------------------

def test_derive_twists_carlitz_at_theta():
    C = carlitz(3)
    b = C.derive_twists(P="t")
    F3 = field_make(3)
    assert [str(M[0][0]) for M in b["F"].coeffs] == ["t", "t^2"]
    assert [str(M[0][0]) for M in b["F_tilde"].coeffs] == ["t", "t^2*z"]
    # z = 1 gives back the untwisted module, z = 0 leaves the tau-degree 0 part
    assert [M[0][0] for M in b["tilde"].eval_z(1).coeffs] == [parse_apoly(F3, "t"), Poly.const(F3, 1)]
    assert b["tilde"].eval_z(0).coeffs[1][0][0].is_zero()
    assert C.derive_twists(P="t") is b
    with pytest.raises(NotPrime):
        carlitz(3).derive_twists(P="t^2")


def test_zeta_twist_trivial_and_scaling():
    E = vanishing_family(3, 2)
    one = FieldElem(E.F, 1)
    assert E.derive_twists(zeta=one)["zeta"].to_json() == E.to_json()
    G = extension_of_degree(E.F, 2)
    zeta = FieldElem(G, 3)
    Ez = E.zeta_module(zeta)
    for i, M in enumerate(Ez.coeffs):
        assert M[0][0] == E.coeffs[i][0][0].change_field(G) * zeta ** i
    # the z-twist evaluated at zeta is E_zeta
    bundle = E.derive_twists(zeta=zeta)
    assert bundle["tilde_zeta"].eval_z(zeta).coeffs == Ez.coeffs


@pytest.mark.parametrize("q", [2, 3])
def test_differential_of_qs_powers_is_scalar(q):
    rng = random.Random(q)
    for E in battery(q):
        F = E.F
        for _ in range(3):
            a = Poly(F, [rng.randrange(q) for _ in range(3)] + [1])
            b = a ** (q ** E.s)
            d = E.action_op(b).coeffs[0]
            for i in range(E.d):
                for j in range(E.d):
                    assert d[i][j] == (b if i == j else Poly(F))


@pytest.mark.parametrize("q", [2, 3])
def test_P_twist_intertwines(q):
    for E in battery(q):
        for P in ("t", "t + 1"):
            Fm = E.twist_P(P)
            Pm = type(E.theta_op())([[[parse_apoly(E.F, P) if i == j else Poly(E.F) for j in range(E.d)]
                                       for i in range(E.d)]], q)
            for a in ("t", "t^2 + 1"):
                assert ore_mul(Pm, Fm.action_op(a)).coeffs == ore_mul(E.action_op(a), Pm).coeffs
