"""Newton polygon of the exponential of a Drinfeld module and the valuations of its periods.

Points are (q^n - 1, v_inf(d_n)).  An edge of slope sigma and length L accounts
for L nonzero periods of valuation -sigma.  The valuations x_1 >= ... >= x_r of a
successive minimum basis are recovered from the counts

    log_q #{lambda : v(lambda) >= v} = sum_{x_i >= v} (floor(x_i - v) + 1),

which follow from v(sum a_i lambda_i) = min_i (x_i - deg a_i).
"""
from fractions import Fraction
import math

from .ore import ExpLogData, ExactContext
from .series import INF
from .errors import InsufficientRange, UnsupportedShape


class NewtonPolygon:
    def __init__(self, q, points, hull, n_max):
        self.q = q
        self.points = points
        self.hull = hull
        self.n_max = n_max

    @property
    def edges(self):
        out = []
        for (x0, y0), (x1, y1) in zip(self.hull, self.hull[1:]):
            out.append((Fraction(y1 - y0, x1 - x0), x1 - x0))
        return out

    def complete_edges(self):
        """Edges not ending at the last computed point (the final one may still bend)."""
        last = self.points[-1][0]
        return [(s, L) for (s, L), (x1, _) in zip(self.edges, self.hull[1:]) if x1 != last]

    def to_json(self):
        return {"points": [[x, y] for x, y in self.points],
                "edges": [{"slope": [s.numerator, s.denominator], "len": L} for s, L in self.edges]}


def lower_hull(points):
    """Lower convex hull of points sorted by x (monotone chain)."""
    hull = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> p
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def exp_valuation_list(phi, n_max, data=None):
    if phi.d != 1 or not phi.over_A:
        raise UnsupportedShape("Newton polygons are computed for Drinfeld modules over A")
    data = data or ExpLogData(phi, ExactContext(phi.F, phi.q), phi.s)
    data.extend_exp(n_max)
    return [data.d[n][0][0].inf_valuation() for n in range(n_max + 1)], data


def newton_polygon(phi, n_max=None, limit=10):
    """Newton polygon of exp_phi over n <= n_max.

    Without n_max the range grows until the complete edges account for r periods,
    then two more points are added.
    """
    q = phi.q
    if n_max is not None:
        vals, _ = exp_valuation_list(phi, n_max)
        return _polygon(q, vals, n_max)
    data = None
    n = phi.r + 1
    while True:
        vals, data = exp_valuation_list(phi, n, data)
        npg = _polygon(q, vals, n)
        try:
            _periods(npg, phi.r)
            break
        except InsufficientRange:
            if n >= limit:
                return npg
            n += 1
    n_max = min(n + 2, max(limit, n))
    vals, data = exp_valuation_list(phi, n_max, data)
    return _polygon(q, vals, n_max)


def _polygon(q, vals, n_max):
    pts = [(q ** n - 1, int(v)) for n, v in enumerate(vals) if v != INF]
    return NewtonPolygon(q, pts, lower_hull(pts), n_max)


def _periods(npg, r):
    """Period valuations (decreasing) read off the complete edges, until r are found."""
    q = npg.q
    xs = []
    end = 0
    for slope, L in npg.complete_edges():
        end += L
        v = -slope
        N = round(math.log(end + 1, q))
        if q ** N != end + 1:
            raise InsufficientRange("edge end %d is not of the form q^n - 1" % end)
        known = sum(math.floor(x - v) + 1 for x in xs if x >= v)
        mult = N - known
        if mult < 0:
            raise InsufficientRange("inconsistent edge data at slope %s" % slope)
        xs.extend([v] * mult)
        if len(xs) >= r:
            return xs[:r]
    raise InsufficientRange("polygon covers %d of %d periods" % (len(xs), r))


class SMBData:
    def __init__(self, r, x, N0_np=None, N1_np=None):
        self.r = r
        self.x = list(x)
        self.s_index = sum(1 for v in self.x if v >= 0)
        self.S = [i + 1 for i, v in enumerate(self.x[:self.s_index]) if v.denominator == 1]
        self.t = len(self.S)
        self.N0 = sum(int(self.x[i - 1]) for i in self.S) + sum(
            math.floor(v) + 1 for i, v in enumerate(self.x[:self.s_index], start=1) if i not in self.S)
        self.N1 = self.N0 + self.t
        self.N0_np = N0_np
        self.N1_np = N1_np

    @property
    def integral_count(self):
        return sum(1 for v in self.x if v.denominator == 1)

    def to_json(self):
        return {"r": self.r, "x": [[v.numerator, v.denominator] for v in self.x],
                "s_index": self.s_index, "S": self.S, "t": self.t, "N0": self.N0, "N1": self.N1,
                "N0_np": self.N0_np, "N1_np": self.N1_np, "integral_count": self.integral_count}


def zero_slope_span(npg):
    """(N0, N1): first and last n with minimal v_inf(d_n) (ends of the slope-0 edge)."""
    ys = [y for _, y in npg.points]
    m = min(ys)
    idx = [i for i, y in enumerate(ys) if y == m]
    ns = [round(math.log(npg.points[i][0] + 1, npg.q)) for i in idx]
    return min(ns), max(ns)


def smb_from_polygon(npg, r):
    if r == 0:
        return SMBData(0, [])
    xs = _periods(npg, r)
    N0, N1 = zero_slope_span(npg)
    smb = SMBData(r, xs, N0, N1)
    return smb


def ord_bound(smb):
    """Upper bound for the vanishing order at z = 1: #{i : x_i in Z}."""
    return smb.integral_count


def sgn_prediction(phi, n_max=None):
    """sum over n with minimal v(d_n) of sgn(d_n) z^n, as code list (low first)."""
    npg = newton_polygon(phi, n_max)
    vals, data = exp_valuation_list(phi, npg.n_max)
    m = min(v for v in vals if v != INF)
    F = phi.F
    out = [0] * (npg.n_max + 1)
    for n, v in enumerate(vals):
        if v == m:
            d = data.d[n][0][0]
            num, den = d.numerator(), d.denominator()
            out[n] = F.mul[num.lc][F.inv[den.lc]]
    while out and not out[-1]:
        out.pop()
    return out
