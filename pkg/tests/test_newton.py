from fractions import Fraction

import pytest

from ffls.tmodule import carlitz, carlitz_tensor2, theta_tau2, vanishing_family, alpha_family
from ffls.lseries import unit_polynomial
from ffls.newton import (NewtonPolygon, newton_polygon, smb_from_polygon, ord_bound, lower_hull,
                         sgn_prediction)
from ffls.errors import UnsupportedShape, InsufficientRange


def test_lower_hull():
    pts = [(0, 0), (1, 5), (2, 0), (3, 4), (4, 2), (6, 3)]
    assert lower_hull(pts) == [(0, 0), (2, 0), (6, 3)]
    # collinear points are dropped
    assert lower_hull([(0, 0), (1, 1), (2, 2)]) == [(0, 0), (2, 2)]


@pytest.mark.parametrize("q", [2, 3])
def test_carlitz_polygon(q):
    npg = newton_polygon(carlitz(q), 5)
    assert npg.points == [(q ** n - 1, n * q ** n) for n in range(6)]
    slopes = [s for s, _ in npg.edges]
    assert all(s > 0 for s in slopes) and slopes == sorted(slopes)
    assert sum(L for _, L in npg.edges) == q ** 5 - 1
    smb = smb_from_polygon(npg, 1)
    # the Carlitz period has valuation -q/(q-1)
    assert smb.x == [Fraction(-q, q - 1)]
    assert smb.t == 0 and (smb.N0, smb.N1) == (0, 0)
    assert ord_bound(smb) == (1 if q == 2 else 0)


def test_theta_tau2_slopes():
    npg = newton_polygon(theta_tau2(3), 8)
    q = 3
    edges = npg.edges
    for k in range(4):
        assert edges[k] == (Fraction(k + 1), q ** (2 * k + 2) - q ** (2 * k))
    smb = smb_from_polygon(npg, 2)
    assert smb.x == [Fraction(-1), Fraction(-1)]
    assert smb.integral_count == 2 and ord_bound(smb) == 2
    assert smb.t == 0
    assert unit_polynomial(theta_tau2(3)).u.eval_z(1).c == (1,)


@pytest.mark.parametrize("q,r", [(2, 1), (2, 2), (3, 1), (3, 2), (2, 3)])
def test_vanishing_family_zero_slope(q, r):
    phi = vanishing_family(q, r)
    npg = newton_polygon(phi)
    assert npg.edges[0][0] == 0
    smb = smb_from_polygon(npg, r)
    assert smb.x == [Fraction(0)] * r
    assert smb.t == r and smb.N1 - smb.N0 == r
    assert (smb.N0_np, smb.N1_np) == (smb.N0, smb.N1)
    assert ord_bound(smb) == r


def test_degenerate_rank_zero():
    smb = smb_from_polygon(newton_polygon(carlitz(3), 3), 0)
    assert smb.x == [] and smb.t == 0 and ord_bound(smb) == 0


def test_insufficient_range():
    npg = newton_polygon(theta_tau2(3), 2)
    with pytest.raises(InsufficientRange):
        smb_from_polygon(npg, 2)


def test_rejects_higher_dimension():
    with pytest.raises(UnsupportedShape):
        newton_polygon(carlitz_tensor2(3), 3)


def _synthetic_polygon(q, xs, depth=4):
    """Hull built from period counts: #{v(lambda) >= v} = q^N(v) with N(v) = sum floor(x_i - v) + 1."""
    vs = sorted({x - k for x in xs for k in range(depth)}, reverse=True)
    pts = [(0, Fraction(0))]
    for v in vs:
        N = sum(int((x - v) // 1) + 1 for x in xs if x >= v)
        X = q ** N - 1
        x0, y0 = pts[-1]
        pts.append((X, y0 + (-v) * (X - x0)))
    return NewtonPolygon(q, pts, lower_hull(pts), None)


@pytest.mark.parametrize("q,xs", [
    (2, [Fraction(-1, 2)]),
    (3, [Fraction(-3, 2)]),
    (3, [Fraction(0), Fraction(-1, 3)]),
    (2, [Fraction(1), Fraction(-2, 3), Fraction(-5, 4)]),
    (3, [Fraction(-1), Fraction(-1)]),
    (5, [Fraction(2), Fraction(1, 2)]),
])
def test_valuations_round_trip_through_polygon(q, xs):
    npg = _synthetic_polygon(q, xs)
    smb = smb_from_polygon(npg, len(xs))
    assert smb.x == sorted(xs, reverse=True)


@pytest.mark.parametrize("phi", [vanishing_family(3, 1), vanishing_family(3, 2), alpha_family(3, [0, 1]),
                                 alpha_family(2, [1, 1]), carlitz(3), theta_tau2(3)])
def test_sign_prediction_matches_unit_polynomial(phi):
    # u has constant z-coefficients here, so its sign is u itself
    u = unit_polynomial(phi).u
    assert sgn_prediction(phi) == [c.lc if not c.is_zero() else 0 for c in u.z_coeffs()]


def test_json_shape():
    js = newton_polygon(carlitz(3), 2).to_json()
    assert js == {"points": [[0, 0], [2, 3], [8, 18]],
                  "edges": [{"slope": [3, 2], "len": 2}, {"slope": [5, 2], "len": 6}]}
