"""Crossing combinatorics of closed geodesics against a hexagon system.

The hexagon system of the builtin genus-2 decomposition pairs the three
pants curves with the three closed seam curves.  On an untwisted surface,
the lifted intersections of a closed geodesic with these six curves carry
two boundary orders (one per side of the axis); order disagreements detect
crossings and count how often the geodesic wraps around a pants curve.
That count corrects geodesic length for twisting contributions, which is
what makes length distortion between differently pinched untwisted
surfaces uniformly comparable.

All geometry here runs in the frame where the axis of the studied geodesic
is the imaginary axis with attracting endpoint at infinity: the two
boundary sides are the positive and negative reals, every linking lift has
one endpoint on each side, and the period acts by scaling.
"""

import concurrent.futures
import math
import os

import mpmath

from . import constants, curves, hyp2
from .hyp2 import BoundaryPoint, GeodesicLine, PlanePoint


class CombinatError(ValueError):
    pass


_BEAM_WIDTH = 600
_STABILITY_STEP = 2
_KEY_TIE_TOL = 1e-10
_SEAM_LETTERS = "xyz"


# --- words ---------------------------------------------------------------------

def _normalize_word(gamma):
    from . import surface as surface_mod
    if isinstance(gamma, curves.ConjClass):
        letters = gamma.word
    elif isinstance(gamma, str):
        letters = surface_mod.parse_word(gamma)
    else:
        letters = tuple(gamma)
    reduced = curves.cyclic_reduce(letters)
    if not reduced:
        raise CombinatError("trivial class")
    return reduced


def _primitive_root(word):
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[p:] + word[:p]:
            return word[:p], n // p
    return word, 1


class HexagonSystem:
    """Pants curves and closed seam curves of a marked genus-2 surface."""

    def __init__(self, marked):
        if len(marked.curve_words) != 3 or len(marked.seam_words) != 3:
            raise CombinatError("hexagon system needs the builtin genus-2 marking")
        self.pants_words = list(marked.curve_words)
        self.seam_words = list(marked.seam_words)
        # pants curves are disjoint: their base axes never link
        axes = [hyp2.axis_endpoints(marked.holonomy(w)) for w in self.pants_words]
        for i in range(3):
            for j in range(i + 1, 3):
                if hyp2.geodesics_link(axes[i], axes[j]):
                    raise CombinatError("pants curves must be disjoint")
        self._excluded = set()
        for w in self.pants_words + self.seam_words:
            self._excluded.add(curves.canonical_cyclic_form(
                _normalize_word(w)).word)

    def excludes(self, word):
        root, _ = _primitive_root(word)
        return curves.canonical_cyclic_form(root).word in self._excluded


# --- lifts ---------------------------------------------------------------------

class _Lift:
    """One lift of a reference curve linking the studied axis.

    Endpoints are frame reals on opposite sides of 0; `att`/`rep` keep the
    curve's own orientation.  `mat` is the frame matrix of the group
    element that carried the base axis here, and `shift` the log-scaling
    applied afterwards to land the crossing parameter in [0, period).
    """

    __slots__ = ("curve", "family", "att", "rep", "s", "mat", "shift",
                 "path")

    def __init__(self, curve, family, att, rep, mat=None, shift=0.0,
                 path=None):
        self.curve = curve
        self.family = family
        self.att = att
        self.rep = rep
        self.s = 0.5 * math.log(-att * rep)
        self.mat = mat
        self.shift = shift
        self.path = path

    @property
    def pos(self):
        return self.att if self.att > 0 else self.rep

    @property
    def neg(self):
        return self.att if self.att < 0 else self.rep

    @property
    def key1(self):
        return math.log(self.pos)

    @property
    def key2(self):
        return math.log(-self.neg)

    def shifted(self, delta):
        scale = math.exp(delta)
        return _Lift(self.curve, self.family, self.att * scale,
                     self.rep * scale, self.mat, self.shift + delta,
                     self.path)

    def line(self):
        return GeodesicLine(BoundaryPoint(self.rep), BoundaryPoint(self.att))


def _links(a, b):
    return hyp2.geodesics_link(a.line(), b.line())


def _links_centered(a, b):
    """Linking test after recentering by the axis flow.

    Scaling both chords is an isometry of the frame, and without it the
    boundary angles of far-flung endpoints saturate at half a turn on
    pinched surfaces.
    """
    delta = -0.5 * (a.s + b.s)
    return _links(a.shifted(delta), b.shifted(delta))


def _disagrees(a, b):
    d1 = a.key1 - b.key1
    d2 = a.key2 - b.key2
    if abs(d1) < _KEY_TIE_TOL or abs(d2) < _KEY_TIE_TOL:
        raise CombinatError("boundary order tie: endpoints too close to order")
    return (d1 > 0) != (d2 > 0)


def _linking_shifts(base, probe, period):
    """Integers j so that probe shifted by j periods links base.

    Two chords that both straddle the axis link exactly when the shift
    separates the two key differences, so the linking window is an
    explicit interval.
    """
    a = (base.key1 - probe.key1) / period
    b = (base.key2 - probe.key2) / period
    lo, hi = min(a, b), max(a, b)
    eps = _KEY_TIE_TOL / period
    out = []
    j = math.ceil(lo - 1.0)
    while j <= hi + 1.0:
        if lo + eps < j < hi - eps:
            out.append(j)
        elif lo - eps <= j <= lo + eps or hi - eps <= j <= hi + eps:
            raise CombinatError("boundary order tie: endpoints too close to order")
        j += 1
    return out


def _cyclic_ccw3(a, b, c):
    two_pi = 2.0 * math.pi
    return ((b - a) % two_pi) < ((c - a) % two_pi)


def _cyclic_ccw4(a, b, c, d):
    two_pi = 2.0 * math.pi
    rb, rc, rd = (b - a) % two_pi, (c - a) % two_pi, (d - a) % two_pi
    return rb < rc < rd


def _angle(x):
    return BoundaryPoint(x).angle()


# --- the lift search -----------------------------------------------------------

def _conj(finv, f, m):
    return finv @ m @ f


def _boundary_value(m, b):
    img = hyp2.mobius_boundary(m, b)
    if img.is_infinity:
        return math.inf
    return img.value


def _mp_mul(m, n):
    return (m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3])


def _mp_inv(m):
    det = m[0] * m[3] - m[1] * m[2]
    return (m[3] / det, -m[1] / det, -m[2] / det, m[0] / det)


def _mp_mobius(m, val):
    """Boundary action on an extended real; None encodes infinity."""
    if val is None:
        if m[2] == 0:
            return None
        return m[0] / m[2]
    den = m[2] * val + m[3]
    if den == 0:
        return None
    return (m[0] * val + m[1]) / den


def _mp_axis(m):
    """Fixed points (repelling, attracting) of a hyperbolic mp matrix."""
    a, b, c, d = m
    if abs(c) < mpmath.mpf("1e-300"):
        fin = b / (a - d) if a != d else mpmath.mpf(0)
        if abs(a) > 1:
            return fin, None
        return None, fin
    disc = (a + d) ** 2 - 4
    sq = mpmath.sqrt(disc)
    big = (a - d + sq) / (2 * c) if a - d >= 0 else (a - d - sq) / (2 * c)
    other = -b / (c * big) if big != 0 else (a - d) / c - big
    if abs(c * big + d) > 1:
        return other, big
    return big, other


class _Frame:
    """The studied geodesic's axis chart and everything expressed in it."""

    def __init__(self, marked, word):
        self.marked = marked
        self.word = word
        m = marked.holonomy(word)
        tl = hyp2.translation_length(m)
        if tl.kind != "hyperbolic":
            raise CombinatError("class is not a closed geodesic: image is %s"
                                % tl.kind)
        self.period = tl.length
        ax = hyp2.axis_endpoints(m)
        self.to_axis = hyp2.map_zero_inf_to(ax.start, ax.end)
        self.from_axis = self.to_axis.inverse()
        self.gens = {}
        for i, g in enumerate(marked.generators, start=1):
            self.gens[i] = _conj(self.from_axis, self.to_axis, g)
            self.gens[-i] = _conj(self.from_axis, self.to_axis, g.inverse())
        self.system = HexagonSystem(marked)
        self.curve_specs = []
        for family, words in (("P", self.system.pants_words),
                              ("H", self.system.seam_words)):
            for idx, w in enumerate(words, start=1):
                axis = hyp2.axis_endpoints(marked.holonomy(w))
                rep = hyp2.mobius_boundary(self.from_axis, axis.start)
                att = hyp2.mobius_boundary(self.from_axis, axis.end)
                hol = _conj(self.from_axis, self.to_axis, marked.holonomy(w))
                self.curve_specs.append((idx, family, rep, att, hol))
        self._mp_setup()

    def _mp_setup(self):
        """Extended-precision data used to refine lift endpoints.

        Boundary fixed points mapped through a product of generators lose
        several digits to conditioning; the search runs in float64 but the
        endpoints of every recorded lift are recomputed at high precision
        from the generator word that produced them.
        """
        from . import surface as surface_mod
        marked = self.marked
        with mpmath.workdps(surface_mod._DPS):
            rep, att = _mp_axis(marked._mp_holonomy(self.word))
            if rep is None or att is None:
                if att is None:
                    frame = (mpmath.mpf(1), rep, mpmath.mpf(0), mpmath.mpf(1))
                else:
                    frame = (att, mpmath.mpf(-1), mpmath.mpf(1), mpmath.mpf(0))
            elif att > rep:
                frame = (att, rep, mpmath.mpf(1), mpmath.mpf(1))
            else:
                frame = (att, -rep, mpmath.mpf(1), mpmath.mpf(-1))
            self._mp_from_axis = _mp_inv(frame)
            self._mp_gens = {}
            for i, g in enumerate(marked._mp_generators, start=1):
                self._mp_gens[i] = g
                self._mp_gens[-i] = _mp_inv(g)
            self._mp_spec_ends = {}
            for family, words in (("P", marked.curve_words),
                                  ("H", marked.seam_words)):
                for idx, w in enumerate(words, start=1):
                    self._mp_spec_ends[(idx, family)] = _mp_axis(
                        marked._mp_holonomy(w))

    def refine_endpoints(self, path, spec):
        """High-precision frame endpoints (rep, att) of a lift, or None."""
        from . import surface as surface_mod
        with mpmath.workdps(surface_mod._DPS):
            m = self._mp_from_axis
            for letter in path:
                m = _mp_mul(m, self._mp_gens[letter])
            rep_b, att_b = self._mp_spec_ends[(spec[0], spec[1])]
            rep = _mp_mobius(m, rep_b)
            att = _mp_mobius(m, att_b)
            if rep is None or att is None or rep == 0 or att == 0:
                return None
            if (rep > 0) == (att > 0):
                return None
            return float(rep), float(att)

    def line_values(self, mat, spec):
        """Frame endpoint reals (rep, att) of mat applied to a base axis."""
        _idx, _family, rep_b, att_b, _hol = spec
        rep = _boundary_value(mat, rep_b)
        att = _boundary_value(mat, att_b)
        if not (math.isfinite(rep) and math.isfinite(att)):
            return None
        return rep, att

    def lift_of(self, mat, spec):
        vals = self.line_values(mat, spec)
        if vals is None:
            return None
        rep, att = vals
        if rep == 0.0 or att == 0.0 or rep * att >= 0.0:
            return None
        return _Lift(spec[0], spec[1], att, rep, mat=mat)


def _node_key(m):
    entries = (m.m11, m.m12, m.m21, m.m22)
    scale = max(abs(v) for v in entries)
    if scale == 0.0:
        return (0.0,) * 4
    sign = 1.0
    for v in entries:
        if v != 0.0:
            sign = 1.0 if v > 0 else -1.0
            break
    return tuple(round(sign * v / scale, 9) for v in entries)


def _node_score(m, period):
    # position of the orbit of i in axis coordinates, computed in logs so
    # huge matrix entries on pinched surfaces cannot underflow to the
    # boundary: |x|/y = |ac + bd| and log|z| = log|(a,b)| - log|(c,d)|
    a, b, c, d = m.m11, m.m12, m.m21, m.m22
    s = math.log(math.hypot(a, b)) - math.log(math.hypot(c, d))
    off_axis = math.asinh(abs(a * c + b * d))
    return off_axis + max(0.0, -0.5 * period - s, s - 1.5 * period)


_COARSE_KEY_TOL = 1e-4


def _collect_lifts(frame, depth, beam_width=_BEAM_WIDTH):
    period = frame.period
    # one bucket per reference curve: (key1, key2, mat, path), merged when
    # both keys agree within the float scatter of the endpoint mapping
    buckets = {}

    def record(mat, path):
        for spec in frame.curve_specs:
            lift = frame.lift_of(mat, spec)
            if lift is None:
                continue
            j = math.floor(lift.s / period)
            k1 = lift.key1 - j * period
            k2 = lift.key2 - j * period
            entries = buckets.setdefault((spec[0], spec[1]), [])
            if any(abs(k1 - e[0]) < _COARSE_KEY_TOL
                   and abs(k2 - e[1]) < _COARSE_KEY_TOL for e in entries):
                continue
            entries.append((k1, k2, mat, path))

    identity = hyp2.IsometryMatrix.identity()
    record(identity, ())
    level = [(identity, 0, ())]
    seen = {_node_key(identity)}
    for _ in range(depth):
        children = []
        for mat, last, path in level:
            for letter, gen in frame.gens.items():
                if letter == -last:
                    continue
                child = mat @ gen
                key = _node_key(child)
                if key in seen:
                    continue
                seen.add(key)
                child_path = path + (letter,)
                record(child, child_path)
                children.append((_node_score(child, period), child,
                                 letter, child_path))
        children.sort(key=lambda t: t[0])
        level = [(m, letter, p) for _, m, letter, p in children[:beam_width]]
        if not level:
            break

    refined = {}
    for (idx, family), entries in buckets.items():
        spec = next(s for s in frame.curve_specs
                    if s[0] == idx and s[1] == family)
        for _k1, _k2, mat, path in entries:
            vals = frame.refine_endpoints(path, spec)
            if vals is None:
                continue
            rep, att = vals
            lift = _Lift(idx, family, att, rep, mat=mat, path=path)
            j = math.floor(lift.s / period)
            lift = lift.shifted(-j * period)
            key = (idx, family, round(lift.key1, 7), round(lift.key2, 7))
            if key not in refined:
                refined[key] = lift
    return sorted(refined.values(), key=lambda l: (l.s, l.family, l.curve))


# --- intersection sequences ----------------------------------------------------

class IntersectionSequence:
    """Lifted crossings of one period, with the two boundary orders."""

    def __init__(self, word, entries, period, multiplicity, depth, frame):
        self.word = word
        self.entries = entries
        self.period = period
        self.period_multiplicity = multiplicity
        self.search_depth = depth
        self._frame = frame
        # a pants lift and a seam lift may legitimately cross the axis at
        # one point (seam feet lie on the pants curves); only a tie within
        # one family leaves the cyclic sequence ill defined
        for a, b in zip(entries, entries[1:]):
            if (a.family == b.family
                    and abs(a.s - b.s) < constants.ENDPOINT_TIE_TOL):
                raise CombinatError("crossing parameter tie between lifts")
        # within one family the curves are disjoint, so the two boundary
        # orders must agree on every same-family pair of lifts
        for fam in ("P", "H"):
            ents = [e for e in entries if e.family == fam]
            for i, a in enumerate(ents):
                for b in ents[i + 1:]:
                    if _disagrees(a, b):
                        raise CombinatError(
                            "same-family lifts disagree between the orders")

    @property
    def p_entries(self):
        return [e for e in self.entries if e.family == "P"]

    @property
    def h_entries(self):
        return [e for e in self.entries if e.family == "H"]

    @property
    def intersection_number(self):
        return len(self.p_entries)

    def order(self, which):
        """Entry indices sorted by one boundary order within the period."""
        key = (lambda e: e.key1) if which == 1 else (lambda e: e.key2)
        idx = sorted(range(len(self.entries)),
                     key=lambda i: key(self.entries[i]))
        return tuple(idx)

    def signature(self):
        return tuple((e.curve, e.family) for e in self.entries)


def _sequences_match(a, b):
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if (x.curve, x.family) != (y.curve, y.family):
            return False
        if abs(x.s - y.s) > 1e-6 * max(1.0, abs(x.s)):
            return False
    return True


def intersection_sequence(marked, gamma,
                          search_depth=constants.LIFT_SEARCH_DEPTH_DEFAULT,
                          beam_width=_BEAM_WIDTH):
    """All lifts of the hexagon-system curves linking one axis period.

    The search walks reduced words in the marking generators up to the
    given word length, beam-limited by distance to the axis window, and is
    certified by agreement with a rerun two letters deeper.
    """
    if not marked.coords.untwisted:
        raise CombinatError("surface must be untwisted")
    word = _normalize_word(gamma)
    frame = _Frame(marked, word)
    if frame.system.excludes(word):
        raise CombinatError("excluded class: member of the hexagon system")
    lifts = _collect_lifts(frame, search_depth, beam_width)
    deeper = _collect_lifts(frame, search_depth + _STABILITY_STEP, beam_width)
    if not _sequences_match(lifts, deeper):
        raise CombinatError("lift search unstable: increase search_depth")
    if not lifts:
        raise CombinatError("no crossings found: increase search_depth")
    _, multiplicity = _primitive_root(word)
    return IntersectionSequence(word, lifts, frame.period, multiplicity,
                                search_depth, frame)


# --- rotation data -------------------------------------------------------------

class RotationData:
    __slots__ = ("sequence", "crossing_flags", "per_crossing", "internal_words",
                 "doubled_rotation", "doubled_rules", "leftover_pairs")

    def __init__(self, sequence, crossing_flags, per_crossing, internal_words,
                 doubled_rotation, doubled_rules, leftover_pairs):
        self.sequence = sequence
        self.crossing_flags = crossing_flags
        self.per_crossing = per_crossing
        self.internal_words = internal_words
        self.doubled_rotation = doubled_rotation
        self.doubled_rules = doubled_rules
        self.leftover_pairs = leftover_pairs

    @property
    def intersection_number(self):
        return self.sequence.intersection_number


def _seam_conjugator(marked, seam_idx, pants_idx, max_len=4):
    """Small word whose action carries the pants base axis across the seam."""
    seam_axis = hyp2.axis_endpoints(marked.holonomy(
        marked.seam_words[seam_idx - 1]))
    pants_axis = hyp2.axis_endpoints(marked.holonomy(
        marked.curve_words[pants_idx - 1]))

    def check(m):
        try:
            return hyp2.geodesics_link(hyp2.mobius_line(m, pants_axis),
                                       seam_axis)
        except hyp2.Hyp2Error:
            return False

    identity = hyp2.IsometryMatrix.identity()
    if check(identity):
        return identity, ()
    level = [(identity, 0, ())]
    for _ in range(max_len):
        nxt = []
        for mat, last, word in level:
            for letter in (1, -1, 2, -2, 3, -3, 4, -4):
                if letter == -last:
                    continue
                g = marked.generators[abs(letter) - 1]
                child = mat @ (g if letter > 0 else g.inverse())
                child_word = word + (letter,)
                if check(child):
                    return child, child_word
                nxt.append((child, letter, child_word))
        level = nxt
    return None


class _Counter:
    """Enumerates lifts of a pants curve crossing a given seam lift."""

    def __init__(self, seq):
        from . import surface as surface_mod
        frame = seq._frame
        self.frame = frame
        marked = frame.marked
        self.conjugators = {}
        conj_words = {}
        for s_idx in (1, 2, 3):
            for p_idx in (1, 2, 3):
                found = (None if p_idx == s_idx
                         else _seam_conjugator(marked, s_idx, p_idx))
                if found is None:
                    self.conjugators[(s_idx, p_idx)] = None
                    continue
                e, word = found
                self.conjugators[(s_idx, p_idx)] = _conj(
                    frame.from_axis, frame.to_axis, e)
                conj_words[(s_idx, p_idx)] = word
        self.seam_hols = {}
        self.pants_specs = {}
        for spec in frame.curve_specs:
            if spec[1] == "H":
                self.seam_hols[spec[0]] = spec[4]
            else:
                self.pants_specs[spec[0]] = spec
        # extended-precision copies: the census walks seam-power products
        # whose float64 endpoints degrade long before the crossing window
        # is exhausted on pinched surfaces
        with mpmath.workdps(surface_mod._DPS):
            ident = (mpmath.mpf(1), mpmath.mpf(0),
                     mpmath.mpf(0), mpmath.mpf(1))
            self._mp_seam = {
                idx: marked._mp_holonomy(marked.seam_words[idx - 1])
                for idx in (1, 2, 3)}
            self._mp_conj = {}
            for key, word in conj_words.items():
                m = ident
                for letter in word:
                    m = _mp_mul(m, frame._mp_gens[letter])
                self._mp_conj[key] = m

    def lines_through(self, h, p_idx, center=0.0, misses_cap=12, m_cap=200):
        """Frame lines of pants-curve lifts crossing the seam lift h.

        Endpoints come out recentered by the axis flow at `center` so the
        caller can compare them with other similarly recentered chords.
        """
        conj = self.conjugators.get((h.curve, p_idx))
        if conj is None or h.mat is None:
            return []
        spec = self.pants_specs[p_idx]
        scale = math.exp(h.shift - center)
        h_line = h.shifted(-center).line()
        if h.path is not None:
            return self._lines_mp(h, p_idx, scale, h_line,
                                  misses_cap, m_cap)
        nu = self.seam_hols[h.curve]
        nu_inv = nu.inverse()
        out = []
        for direction in (1, -1):
            mat = h.mat if direction == 1 else h.mat @ nu_inv
            step = nu if direction == 1 else nu_inv
            misses, steps = 0, 0
            while misses < misses_cap and steps <= m_cap:
                hit = False
                try:
                    vals = self.frame.line_values(mat @ conj, spec)
                    if vals is not None:
                        rep, att = vals[0] * scale, vals[1] * scale
                        line = GeodesicLine(BoundaryPoint(rep),
                                            BoundaryPoint(att))
                        hit = hyp2.geodesics_link(line, h_line)
                except hyp2.Hyp2Error:
                    hit = False
                if hit:
                    out.append(line)
                    misses = 0
                else:
                    misses += 1
                try:
                    # long seam-power products exhaust float precision;
                    # past that point there are no further crossings anyway
                    mat = mat @ step
                except hyp2.Hyp2Error:
                    break
                steps += 1
        return out

    def _lines_mp(self, h, p_idx, scale, h_line, misses_cap, m_cap):
        """Census scan with endpoints recomputed from the generator word."""
        from . import surface as surface_mod
        out = []
        with mpmath.workdps(surface_mod._DPS):
            base = self.frame._mp_from_axis
            for letter in h.path:
                base = _mp_mul(base, self.frame._mp_gens[letter])
            conj = self._mp_conj[(h.curve, p_idx)]
            nu = self._mp_seam[h.curve]
            nu_inv = _mp_inv(nu)
            rep_b, att_b = self.frame._mp_spec_ends[(p_idx, "P")]
            for direction in (1, -1):
                cur = base if direction == 1 else _mp_mul(base, nu_inv)
                step = nu if direction == 1 else nu_inv
                misses, steps = 0, 0
                while misses < misses_cap and steps <= m_cap:
                    hit = False
                    m = _mp_mul(cur, conj)
                    rep = _mp_mobius(m, rep_b)
                    att = _mp_mobius(m, att_b)
                    if rep is not None and att is not None and rep != att:
                        rep_f = float(rep) * scale
                        att_f = float(att) * scale
                        if math.isfinite(rep_f) and math.isfinite(att_f) \
                                and rep_f != att_f:
                            try:
                                line = GeodesicLine(BoundaryPoint(rep_f),
                                                    BoundaryPoint(att_f))
                                hit = hyp2.geodesics_link(line, h_line)
                            except hyp2.Hyp2Error:
                                hit = False
                    if hit:
                        out.append(line)
                        misses = 0
                    else:
                        misses += 1
                    cur = _mp_mul(cur, step)
                    steps += 1
        return out


def classify_and_rotate(seq):
    """Crossing/internal tags, per-crossing rotations, and pair counting."""
    h_entries = seq.h_entries
    p_entries = seq.p_entries
    period = seq.period
    if not h_entries:
        raise CombinatError("sequence has no seam crossings")

    # crossing classification, cross-validated: linking of the lifted lines
    # must coincide with a boundary-order disagreement
    linked = {}
    flags = []
    for h in h_entries:
        hits = []
        for p in p_entries:
            for j in _linking_shifts(h, p, period):
                shifted = p.shifted(j * period)
                if (not _links_centered(h, shifted)
                        or not _disagrees(h, shifted)):
                    raise CombinatError(
                        "linking and order-disagreement classifications differ")
                hits.append((p, j))
        linked[id(h)] = hits
        flags.append(bool(hits))

    # per-crossing synthetic rotation: count seam lifts linking each pants lift
    per_crossing = []
    for c in p_entries:
        count = 0
        crossing_lifts = []
        for h in h_entries:
            for j in _linking_shifts(c, h, period):
                count += 1
                crossing_lifts.append(h.shifted(j * period))
        # recenter at the crossing before taking boundary angles: 0 and
        # infinity are fixed by the flow, so cyclic orders are preserved
        cc = c.shifted(-c.s)
        upward = _cyclic_ccw4(_angle(cc.att), math.pi, _angle(cc.rep), 0.0)
        sign = 0
        if count:
            orientations = set()
            for h in crossing_lifts:
                hh = h.shifted(-c.s)
                h_up = _cyclic_ccw4(_angle(cc.att), _angle(hh.att),
                                    _angle(cc.rep), _angle(hh.rep))
                a_h = _angle(hh.att) if h_up else _angle(hh.rep)
                orientations.add(_cyclic_ccw3(_angle(cc.att), math.pi, a_h))
            if len(orientations) != 1:
                raise CombinatError(
                    "inconsistent seam orientations at a crossing")
            sign = 1 if orientations.pop() == upward else -1
        per_crossing.append({"curve": c.curve, "doubled_abs": count,
                             "sign": sign,
                             "direction": "up" if upward else "down"})

    # internal words per gap between consecutive pants crossings; entries
    # before the first crossing wrap into the last gap
    internal = [h for h, f in zip(h_entries, flags) if not f]
    gap_of = {}
    if p_entries:
        bounds = [c.s for c in p_entries] + [p_entries[0].s + period]
        gap_content = [[] for _ in range(len(p_entries))]
        for h in internal:
            s = h.s if h.s > bounds[0] else h.s + period
            gi = max(i for i in range(len(p_entries)) if bounds[i] < s)
            gap_content[gi].append((s, h))
            gap_of[id(h)] = gi
        gaps = ["".join(_SEAM_LETTERS[h.curve - 1]
                        for _, h in sorted(g, key=lambda t: t[0]))
                for g in gap_content]
    else:
        gaps = ["".join(_SEAM_LETTERS[h.curve - 1] for h in internal)]
        for h in internal:
            gap_of[id(h)] = 0

    # consecutive seam pairs: exact lift counting against the counting rules
    counter = _Counter(seq)
    exact = {1: 0, 2: 0, 3: 0}
    rules = {1: 0, 2: 0, 3: 0}
    leftover = 0
    n = len(h_entries)
    for i in range(n):
        h1 = h_entries[i]
        h2_raw = h_entries[(i + 1) % n]
        wrap = period if i + 1 == n else 0.0
        h2 = h2_raw.shifted(wrap) if wrap else h2_raw

        set1 = {(id(p), j * period) for p, j in linked[id(h1)]}
        set2 = {(id(p), j * period + wrap) for p, j in linked[id(h2_raw)]}

        center = 0.5 * (h1.s + h2.s)
        h2c = h2.shifted(-center)
        counted = []
        for k in (1, 2, 3):
            hit = False
            for p, j in linked[id(h1)]:
                if p.curve == k and _links_centered(p.shifted(j * period), h2):
                    hit = True
                    break
            if not hit:
                for p, j in linked[id(h2_raw)]:
                    if p.curve == k and _links_centered(
                            p.shifted(j * period + wrap), h1):
                        hit = True
                        break
            if not hit:
                for line in counter.lines_through(h1, k, center=center):
                    try:
                        if hyp2.geodesics_link(line, h2c.line()):
                            hit = True
                            break
                    except hyp2.Hyp2Error:
                        continue
            if hit:
                counted.append(k)
        if len(counted) > 1:
            raise CombinatError(
                "seam pair counts for more than one pants curve")
        if counted:
            exact[counted[0]] += 1

        rule_curve = None
        shared = set1 & set2
        if shared:
            pid = next(iter(shared))[0]
            for p, _j in linked[id(h1)]:
                if id(p) == pid:
                    rule_curve = p.curve
                    break
        elif id(h1) in gap_of and id(h2_raw) in gap_of:
            same_gap = (gap_of[id(h1)] == gap_of[id(h2_raw)]
                        if not wrap or not p_entries
                        else gap_of[id(h1)] == gap_of[id(h2_raw)]
                        == len(gaps) - 1)
            if same_gap and h1.curve != h2_raw.curve:
                rule_curve = ({1, 2, 3} - {h1.curve, h2_raw.curve}).pop()
        if rule_curve is not None:
            rules[rule_curve] += 1
            if rule_curve not in counted:
                raise CombinatError("counting-rule pair missed by the lift census")
        elif not counted:
            leftover += 1

    return RotationData(seq, flags, per_crossing, gaps, exact, rules, leftover)


def combinatorial_rotation(data):
    """Per pants curve, half the number of counting seam pairs."""
    for k in (1, 2, 3):
        if data.doubled_rules[k] > data.doubled_rotation[k]:
            raise CombinatError("rotation operationalizations disagree")
    spill = sum(data.doubled_rotation[k] - data.doubled_rules[k]
                for k in (1, 2, 3))
    if spill > 2 * data.intersection_number:
        raise CombinatError("uncounted pairs exceed the crossing budget")
    return {k: data.doubled_rotation[k] / 2.0 for k in (1, 2, 3)}


# --- non-rotating length and distortion ----------------------------------------

def non_rotating_length(marked, gamma, data):
    """Rotational projection and the twist-corrected length on one surface."""
    word = _normalize_word(gamma)
    # only the words are needed here: the disjointness validation of the
    # full hexagon system cannot run on extremely pinched holonomies
    pants_words = list(marked.curve_words)
    root, _ = _primitive_root(word)
    pants_forms = {curves.canonical_cyclic_form(_normalize_word(w)).word
                   for w in pants_words}
    if curves.canonical_cyclic_form(root).word in pants_forms:
        raise CombinatError("excluded class: pants curve")
    rotation = combinatorial_rotation(data)
    projection = sum(
        rotation[k] * marked.curve_length(pants_words[k - 1])
        for k in (1, 2, 3))
    total = marked.curve_length(word)
    return projection, total - projection


DISTORTION_CSV_HEADER = ("word,i_P,r1,r2,r3,len_X,proj_X,nonrot_X,"
                         "len_Y,proj_Y,nonrot_Y,ratio,bound_lo,bound_hi,pass")


def distortion_check(x_surface, y_surface, classes, C, reference=None,
                     eps=constants.EPS_UNTWISTED_DEFAULT,
                     search_depth=constants.LIFT_SEARCH_DEPTH_DEFAULT):
    """Length-distortion bounds from log-length ratios of the pants curves.

    Rotation data is computed once per class on a thick untwisted reference
    surface with the same decomposition: rotation numbers do not depend on
    the choice of untwisted surface, and the sequence geometry is much
    better conditioned away from the pinched regime.
    """
    from . import surface as surface_mod
    for s in (x_surface, y_surface):
        if not s.coords.untwisted:
            raise CombinatError("surfaces must be untwisted")
        if max(s.coords.lengths) > eps:
            raise CombinatError("surfaces must be pinched below eps")
    if reference is None:
        reference = surface_mod.build_holonomy(
            x_surface.decomposition,
            surface_mod.FNCoordinates([0.7, 0.8, 0.9]))
    pants_words = HexagonSystem(reference).pants_words
    lx = [x_surface.curve_length(w) for w in pants_words]
    ly = [y_surface.curve_length(w) for w in pants_words]
    log_ratios = [math.log(a) / math.log(b) for a, b in zip(lx, ly)]
    options = []
    for k, r in enumerate(log_ratios, start=1):
        options.append((r, k, 1))
        options.append((1.0 / r, k, -1))
    lo_val, lo_curve, lo_sigma = min(options)
    hi_val, hi_curve, hi_sigma = max(options)
    bound_lo = lo_val / C
    bound_hi = hi_val * C

    def rotation_of(cls):
        word = _normalize_word(cls)
        seq = intersection_sequence(reference, word, search_depth)
        data = classify_and_rotate(seq)
        return word, data, combinatorial_rotation(data)

    # per-class work is pure; collect in input order regardless of pool size
    workers = max(1, int(os.environ.get("TEICHLAB_THREADS", "1")))
    if workers > 1 and len(classes) > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(rotation_of, classes))
    else:
        results = [rotation_of(cls) for cls in classes]

    rows = []
    for word, data, rotation in results:
        proj_x = sum(rotation[k] * lx[k - 1] for k in (1, 2, 3))
        proj_y = sum(rotation[k] * ly[k - 1] for k in (1, 2, 3))
        len_x = x_surface.curve_length(word)
        len_y = y_surface.curve_length(word)
        nonrot_x = len_x - proj_x
        nonrot_y = len_y - proj_y
        ratio = nonrot_x / nonrot_y
        rows.append({
            "word": curves.word_to_text(word),
            "i_P": data.intersection_number,
            "rotation": rotation,
            "len_X": len_x, "proj_X": proj_x, "nonrot_X": nonrot_x,
            "len_Y": len_y, "proj_Y": proj_y, "nonrot_Y": nonrot_y,
            "ratio": ratio, "bound_lo": bound_lo, "bound_hi": bound_hi,
            "binding_lo": (lo_curve, lo_sigma),
            "binding_hi": (hi_curve, hi_sigma),
            "pass": bound_lo <= ratio <= bound_hi,
        })
    return rows


def distortion_csv_rows(rows):
    out = []
    for r in rows:
        vals = [r["word"], str(r["i_P"])]
        vals += ["%g" % r["rotation"][k] for k in (1, 2, 3)]
        vals += ["%.17g" % r[k] for k in ("len_X", "proj_X", "nonrot_X",
                                          "len_Y", "proj_Y", "nonrot_Y",
                                          "ratio", "bound_lo", "bound_hi")]
        vals.append("1" if r["pass"] else "0")
        out.append(",".join(vals))
    return out
