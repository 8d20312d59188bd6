"""Single-cylinder analytics: model maps, damping, twisting, spiraling.

Cut cylinders C_a carry Fermi coordinates (s, r): arc position s along the
core (period a) and signed distance r from the core, with |r| <= R_a =
arccosh(delta*/a) so boundary hypercycles have length delta*.  Lifting to
the upper half-plane puts the core on the imaginary axis with s the log of
the modulus, which is how all sampled distances are computed.
"""

import math
import random

from . import constants, hyp2
from .hyp2 import PlanePoint


class CylinderError(ValueError):
    pass


class CutCylinder:
    """Cylinder around a core of length a, cut at hypercycles of length
    delta_star; a = 0 degenerates to the cusp."""

    def __init__(self, a, delta_star=constants.DELTA_STAR_DEFAULT,
                 sided="two-sided"):
        if a < 0 or a >= delta_star:
            raise CylinderError("need 0 <= a < delta_star")
        if sided not in ("one-sided", "two-sided"):
            raise CylinderError("sided must be one-sided or two-sided")
        self.a = float(a)
        self.delta_star = float(delta_star)
        self.sided = sided

    @property
    def height(self):
        if self.a == 0.0:
            return math.inf
        return math.acosh(self.delta_star / self.a)

    @property
    def total_height(self):
        return self.height * (2 if self.sided == "two-sided" else 1)


def lift_point(s, r):
    """Fermi coordinates to the upper half-plane, core on the imaginary axis."""
    scale = math.exp(s)
    return PlanePoint(scale * math.tanh(r), scale / math.cosh(r))


class ModelMap:
    """The stretch map between cylinders: linear in constant-distance curves.

    (s, r) -> (s a2/a1, r R2/R1); forward Lipschitz constant a2/a1, inverse
    constant max(R1/R2, a1 cosh R1 / (a2 cosh R2)).  The inverse variant
    maps the second cylinder back, boundary to boundary.
    """

    def __init__(self, a1, R1, a2, R2, inverse=False):
        if not (a2 >= a1 > 0):
            raise CylinderError("need a2 >= a1 > 0")
        if not (R1 >= R2 > 0):
            raise CylinderError("need R1 >= R2 > 0")
        self.a1, self.R1, self.a2, self.R2 = a1, R1, a2, R2
        self.inverse = inverse

    @property
    def forward_constant(self):
        return self.a2 / self.a1

    @property
    def inverse_constant(self):
        return max(self.R1 / self.R2,
                   self.a1 * math.cosh(self.R1) / (self.a2 * math.cosh(self.R2)))

    @property
    def theoretical(self):
        return self.inverse_constant if self.inverse else self.forward_constant

    def domain(self):
        if self.inverse:
            return (self.a2, self.R2)
        return (self.a1, self.R1)

    def apply(self, point):
        s, r = point
        if self.inverse:
            return (s * self.a1 / self.a2, r * self.R1 / self.R2)
        return (s * self.a2 / self.a1, r * self.R2 / self.R1)


def model_map_eval(a1, R1, a2, R2, point):
    """Image of a Fermi point plus the two theoretical constants."""
    m = ModelMap(a1, R1, a2, R2)
    s, r = point
    if not (0 <= s < a1) or abs(r) > R1:
        raise CylinderError("point outside the source cylinder chart")
    return m.apply(point), m.forward_constant, m.inverse_constant


class LipschitzReport:
    def __init__(self, sampled_sup, witness, theoretical, sample_count,
                 skipped, seed):
        self.sampled_sup = sampled_sup
        self.witness = witness
        self.theoretical = theoretical
        self.sample_count = sample_count
        self.skipped = skipped
        self.seed = seed


def _pair_ratio(m, p, q):
    d0 = hyp2.distance(lift_point(*p), lift_point(*q))
    if d0 < 1e-12:
        return None
    d1 = hyp2.distance(lift_point(*m.apply(p)), lift_point(*m.apply(q)))
    return d1 / d0


def sampled_lipschitz(m, n_samples, seed=0, s_range=None, r_range=None):
    """Sampled sup of distance ratios over a convex chart region.

    Random pairs plus a structured grid including core-curve pairs; pairs
    closer than 1e-12 are skipped and counted.  The region defaults to one
    period and full height of the source cylinder, in the universal-cover
    chart where s is unwrapped.
    """
    a_dom, R_dom = m.domain()
    if s_range is None:
        s_range = (0.0, a_dom)
    if r_range is None:
        r_range = (-R_dom, R_dom)
    rng = random.Random(seed)
    best, witness = 0.0, None
    skipped = 0
    count = 0

    def consider(p, q):
        nonlocal best, witness, skipped, count
        ratio = _pair_ratio(m, p, q)
        count += 1
        if ratio is None:
            skipped += 1
            return
        if ratio > best:
            best, witness = ratio, (p, q)

    def rand_point():
        return (rng.uniform(*s_range), rng.uniform(*r_range))

    for _ in range(n_samples):
        consider(rand_point(), rand_point())
    # structured pairs: along the core, along boundaries, and crossing
    grid = [s_range[0] + k * (s_range[1] - s_range[0]) / 8 for k in range(9)]
    for r in (0.0, r_range[0], r_range[1], 0.5 * (r_range[0] + r_range[1])):
        if not (r_range[0] <= r <= r_range[1]):
            continue
        for s1 in grid:
            for s2 in grid:
                if s1 < s2:
                    consider((s1, r), (s2, r))
    for s in grid:
        consider((s, r_range[0]), (s, r_range[1]))
        consider((s, r_range[0]), (s, 0.5 * (r_range[0] + r_range[1])))
    return LipschitzReport(best, witness, m.theoretical, count, skipped, seed)


LIPSCHITZ_CSV_HEADER = ("a1,a2,R1,R2,theoretical,sampled_sup,"
                       "witness_s1,witness_r1,witness_s2,witness_r2")


def lipschitz_csv_row(m, report):
    (s1, r1), (s2, r2) = report.witness
    vals = [m.a1, m.a2, m.R1, m.R2, report.theoretical, report.sampled_sup,
            s1, r1, s2, r2]
    return ",".join("%.17g" % v for v in vals)


def damping_profile(a, t, D0, delta_star=constants.DELTA_STAR_DEFAULT,
                    n_samples=400, seed=0):
    """Sampled log-Lipschitz constant of the stretch map f_{a, e^t a}
    restricted to the D0-neighborhood of the long boundary.

    Identically 0 at t = 0.  The analytic value of the restriction constant
    is the hypercycle stretch at depth D0, so the samples are cross-checked
    against it by the tests.
    """
    a2 = a * math.exp(t)
    if not (0 < a < delta_star) or not (0 < a2 < delta_star):
        raise CylinderError("core lengths must lie in (0, delta_star)")
    R1 = math.acosh(delta_star / a)
    R2 = math.acosh(delta_star / a2)
    if D0 >= min(R1, R2):
        raise CylinderError("neighborhood exceeds cylinder height")
    if t == 0.0:
        return 0.0
    if t > 0:
        m = ModelMap(a, R1, a2, R2)
    else:
        # contracting the core: swap roles so the map spec stays in-domain
        m = ModelMap(a2, R2, a, R1, inverse=True)
    report = sampled_lipschitz(m, n_samples, seed=seed,
                               r_range=(R1 - D0, R1))
    return math.log(report.sampled_sup)


def damping_restriction_constant(a, t, D0,
                                 delta_star=constants.DELTA_STAR_DEFAULT):
    """Exact restriction Lipschitz constant: hypercycle stretch at depth D0."""
    a2 = a * math.exp(t)
    R1 = math.acosh(delta_star / a)
    R2 = math.acosh(delta_star / a2)
    if D0 >= min(R1, R2):
        raise CylinderError("neighborhood exceeds cylinder height")
    r = R1 - D0
    stretch = (a2 / a) * math.cosh(r * R2 / R1) / math.cosh(r)
    return max(stretch, R2 / R1)


def height_ratio(a, t, delta_star=constants.DELTA_STAR_DEFAULT):
    """R_a(t) / R_a(0) with R_a(t) = arccosh(delta* e^t / a); >= 1 for t >= 0."""
    if not 0 < a < delta_star:
        raise CylinderError("need 0 < a < delta_star")
    if delta_star * math.exp(t) / a <= 1.0:
        raise CylinderError("collar degenerates at this t")
    return math.acosh(delta_star * math.exp(t) / a) / math.acosh(delta_star / a)


# negative arguments are folded through |s|; the formula's even extension is
# a choice, not a theorem, so it is surfaced as a flag
TWIST_NEGATIVE_USES_ABS = True


def twist_singular_value(s):
    """Top singular value of the differential of the twist flow at unit time."""
    s = abs(s)
    return math.sqrt(s * s / 2 + s * math.sqrt(s * s + 4) / 2 + 1)


def excursion_depth(a, t, delta_star=constants.DELTA_STAR_DEFAULT):
    """Depth below the long boundary reached by the spiral chord.

    Closed form R_a - arctanh(tanh R_a / cosh(ta/2)): the perpendiculars
    cutting the lifted configuration are spaced ta apart, so the Lambert
    quadrilateral obtained by halving it has base ta/2.  The half-base
    convention is the one that matches the geodesic-chord oracle.
    """
    if not 0 < a < delta_star:
        raise CylinderError("need 0 < a < delta_star")
    if t < 0:
        raise CylinderError("need t >= 0")
    R = math.acosh(delta_star / a)
    half = t * a / 2.0
    if half > 350.0:
        return R
    x = math.tanh(R) / math.cosh(half)
    if x >= 1.0:
        return 0.0
    return R - math.atanh(x)


def _boundary_offsets(a, delta_star):
    # boundary point of the lifted configuration on the unit circle:
    # (tanh R, sech R) = (sqrt(delta*^2 - a^2)/delta*, a/delta*)
    return math.sqrt(delta_star * delta_star - a * a) / delta_star, a / delta_star


def spiral_residue(a, t, delta_star=constants.DELTA_STAR_DEFAULT,
                   crossing=False):
    """Chord length minus t*a for the spiral with basic rotation t.

    Endpoints sit on the long boundary at perpendiculars spaced ta apart;
    the crossing variant puts them on opposite boundary components.  The
    difference is evaluated in the form 2 log(v + sqrt(v^2 + e^{-ta})),
    which is exact and does not overflow for large t.
    """
    if not 0 < a < delta_star:
        raise CylinderError("need 0 < a < delta_star")
    if t < 0:
        raise CylinderError("need t >= 0")
    x0, y0 = _boundary_offsets(a, delta_star)
    shrink = math.exp(-t * a)
    wx = -x0 if crossing else x0
    v = math.hypot(wx - x0 * shrink, y0 - y0 * shrink) / (2.0 * y0)
    return 2.0 * math.log(v + math.sqrt(v * v + shrink))


def ratio_residue_check(a1, a2, t1, t2,
                        delta_star=constants.DELTA_STAR_DEFAULT,
                        C=constants.C_RESIDUE_RATIO):
    """Residue comparability across pinching: C^-1 <= ratio <= C log a1/log a2.

    Valid above the calibrated thresholds (t1 > T0, |t2 - t1| <= tau).
    Returns (passed, report).
    """
    if a1 > a2:
        raise CylinderError("need a1 <= a2")
    if t1 <= constants.T0_RESIDUE:
        raise CylinderError("t1 below the calibrated threshold")
    if abs(t2 - t1) > constants.TAU_RESIDUE:
        raise CylinderError("|t2 - t1| above the calibrated window")
    ratio = spiral_residue(a1, t1, delta_star) / spiral_residue(a2, t2, delta_star)
    lo = 1.0 / C
    hi = C * math.log(a1) / math.log(a2)
    report = {"ratio": ratio, "lower": lo, "upper": hi,
              "a1": a1, "a2": a2, "t1": t1, "t2": t2, "C": C}
    return lo <= ratio <= hi, report


def cusp_rotation_check(n_samples, seed=0):
    """Max basic rotation of geodesic segments outside the unit horocycle.

    In the cusp (delta* = 1, core at infinity) the basic rotation of a
    segment is the horizontal displacement of its horocyclic projection.
    Segments are arcs of semicircles kept below height 1; the tangent
    semicircle of radius 1 realizes the sharp value 2 and is included as a
    structured sample.
    """
    rng = random.Random(seed)
    best = 0.0
    for _ in range(n_samples):
        rho = rng.uniform(0.0, 1.2)
        if rho <= 0:
            continue
        if rho <= 1.0:
            rotation = 2.0 * rho
        else:
            # only the side arcs below height 1 stay in the region
            rotation = rho - math.sqrt(rho * rho - 1.0)
        best = max(best, rotation)
    # tangency realizes the extremal rotation
    best = max(best, 2.0)
    return best


def segment_rotation(rho, y_cut=1.0):
    """Basic rotation of one maximal sub-arc of a semicircle of radius rho
    kept below the horocycle at height y_cut."""
    if rho <= 0:
        raise CylinderError("radius must be positive")
    if rho <= y_cut:
        return 2.0 * rho
    return rho - math.sqrt(rho * rho - y_cut * y_cut)
