"""Marked hyperbolic surfaces from pants decompositions and FN coordinates.

A pair of pants is realized through its right hexagon: boundary holonomies
X_k translate the geodesic lines extending the hexagon's boundary sides by
the full boundary lengths, with X_1 X_2 X_3 = 1.  Pants are developed along
a spanning tree of the decomposition graph; the remaining edges contribute
stable letters.  Zero twist is calibrated by matching seam feet across each
glued curve, so the seams of the two sides close up into smooth geodesics;
the twist parameter slides the far side along the shared axis (positive in
the direction of the near boundary holonomy).

Matrix entries of the representation grow like exp(2 * seam length), and
recovering a translation length ~1e-4 from the trace of such a matrix
cancels ~exp(4 * seam length) worth of digits.  Double precision cannot
survive that for short cuffs, so the holonomy core runs in mpmath extended
precision; float views of all geometric data are kept for downstream use.
"""

import json
import math

import mpmath

from . import hyp2, pants
from .hyp2 import BoundaryPoint, GeodesicLine, IsometryMatrix, PlanePoint

_DPS = 80


class SurfaceError(ValueError):
    pass


# --- decomposition combinatorics ----------------------------------------------

class PantsDecomposition:
    """Gluing graph: pants nodes with 3 slots, edges = pants curves.

    Seams are indexed so seam j of a pants runs between slots j+1 and j+2
    (mod 3).  Seam orbits are the closed curves the seams glue into on the
    untwisted surface, with feet matched index-wise across each edge.
    """

    def __init__(self, pants_ids, curve_edges):
        self.pants = list(pants_ids)
        self.curve_edges = [tuple(e) for e in curve_edges]
        self._validate()
        self.seam_orbits = self._seam_orbits()
        self.convenient = self._convenient()

    def _validate(self):
        used = set()
        index = {p: i for i, p in enumerate(self.pants)}
        if len(index) != len(self.pants):
            raise SurfaceError("duplicate pants ids")
        for e in self.curve_edges:
            if len(e) != 4:
                raise SurfaceError("edge must be (pants, slot, pants, slot)")
            p, s, q, r = e
            for node, slot in ((p, s), (q, r)):
                if node not in index:
                    raise SurfaceError("edge references unknown pants %r" % (node,))
                if slot not in (1, 2, 3):
                    raise SurfaceError("slot must be 1, 2 or 3")
                if (node, slot) in used:
                    raise SurfaceError("slot (%r, %r) used twice" % (node, slot))
                used.add((node, slot))
        if len(used) != 3 * len(self.pants):
            raise SurfaceError("every pants needs all 3 slots glued")
        n_p, n_e = len(self.pants), len(self.curve_edges)
        if n_p % 2 or 3 * n_p != 2 * n_e:
            raise SurfaceError("inconsistent pants/edge counts")
        self.genus = n_e - n_p + 1

    def edge_at(self, node, slot):
        for i, (p, s, q, r) in enumerate(self.curve_edges):
            if (p, s) == (node, slot):
                return i, (q, r)
            if (q, r) == (node, slot):
                return i, (p, s)
        raise SurfaceError("unglued slot (%r, %r)" % (node, slot))

    def _seam_orbits(self):
        """Close up seams across edges; feet of seam k+1 match seam k'+1."""
        def step(node, seam, slot):
            # leave seam (node, seam) through the given slot
            _, (other, oslot) = self.edge_at(node, slot)
            # on slot `slot`, the feet belong to seams slot+1 and slot+2;
            # index-wise matching pairs equal offsets
            offset = (seam - slot) % 3  # 1 or 2
            nseam = (oslot + offset - 1) % 3 + 1
            # continue through the other end of the new seam
            ends = [(nseam % 3) + 1, ((nseam + 1) % 3) + 1]
            if oslot not in ends:
                raise SurfaceError("seam matching bookkeeping failed")
            nslot = ends[0] if ends[1] == oslot else ends[1]
            return other, nseam, nslot

        all_seams = {(p, j) for p in self.pants for j in (1, 2, 3)}
        orbits = []
        seen = set()
        for start in sorted(all_seams, key=str):
            if start in seen:
                continue
            node, seam = start
            slot = (seam % 3) + 1  # leave through slot seam+1 first
            orbit = []
            while True:
                orbit.append((node, seam))
                seen.add((node, seam))
                node, seam, slot = step(node, seam, slot)
                if (node, seam) == start:
                    break
            orbits.append(tuple(orbit))
        return orbits

    def _convenient(self):
        """Each orbit meets each pants in a connected (single-arc) set."""
        for orbit in self.seam_orbits:
            counts = {}
            for node, _ in orbit:
                counts[node] = counts.get(node, 0) + 1
            if any(v > 1 for v in counts.values()):
                return False
        return True


def builtin_genus2_convenient():
    """Two pants glued along three curves, slot k to slot k."""
    return PantsDecomposition([0, 1], [(0, 1, 1, 1), (0, 2, 1, 2), (0, 3, 1, 3)])


class FNCoordinates:
    """Lengths and twists per curve edge, in hyperbolic length units."""

    def __init__(self, lengths, twists=None):
        self.lengths = [float(v) for v in lengths]
        if any(v <= 0 for v in self.lengths):
            raise SurfaceError("lengths must be positive")
        if twists is None:
            twists = [0.0] * len(self.lengths)
        self.twists = [float(v) for v in twists]
        if len(self.twists) != len(self.lengths):
            raise SurfaceError("twists and lengths must have equal length")

    @property
    def untwisted(self):
        return all(t == 0.0 for t in self.twists)


def decomposition_from_json(text):
    """Parse the {"genus", "pants", "edges", "lengths", "twists"} schema."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SurfaceError("malformed JSON: line %d column %d"
                           % (exc.lineno, exc.colno)) from exc
    for key in ("genus", "pants", "edges", "lengths"):
        if key not in data:
            raise SurfaceError("missing field %r" % key)
    decomp = PantsDecomposition(data["pants"], [tuple(e) for e in data["edges"]])
    if decomp.genus != data["genus"]:
        raise SurfaceError("genus field does not match the graph")
    coords = FNCoordinates(data["lengths"], data.get("twists"))
    if len(coords.lengths) != len(decomp.curve_edges):
        raise SurfaceError("need one length per edge")
    return decomp, coords


# --- extended-precision 2x2 helpers -------------------------------------------

def _mul(m, n):
    return (m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3])


def _inv(m):
    det = m[0] * m[3] - m[1] * m[2]
    return (m[3] / det, -m[1] / det, -m[2] / det, m[0] / det)


def _trans(length):
    e = mpmath.exp(length / 2)
    return (e, mpmath.mpf(0), mpmath.mpf(0), 1 / e)


def _rot(theta):
    c, s = mpmath.cos(theta / 2), mpmath.sin(theta / 2)
    return (c, s, -s, c)


_MP_ID = (mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(1))


def _identity_residual_mp(m):
    one = mpmath.mpf(1)
    return float(min(max(abs(m[0] - one), abs(m[1]), abs(m[2]), abs(m[3] - one)),
                     max(abs(m[0] + one), abs(m[1]), abs(m[2]), abs(m[3] + one))))


def _to_float_matrix(m):
    # determinant is 1 in extended precision; recomputing it in float64
    # would cancel catastrophically for large entries, so skip normalization
    # and only apply the canonical sign
    tr = m[0] + m[3]
    flip = tr < 0 if abs(tr) > 1e-9 else m[0] < 0
    s = -1.0 if flip else 1.0
    return IsometryMatrix(s * float(m[0]), s * float(m[1]),
                          s * float(m[2]), s * float(m[3]),
                          _normalize=False)


def _frame_endpoint(f, at_zero):
    """Boundary image of 0 or infinity under a frame, as a BoundaryPoint."""
    num, den = (f[1], f[3]) if at_zero else (f[0], f[2])
    if den == 0:
        return BoundaryPoint.inf()
    return BoundaryPoint(float(num / den))


def _frame_base(f):
    """Image of i under a frame, as a float PlanePoint."""
    den = f[2] ** 2 + f[3] ** 2
    return PlanePoint(float((f[0] * f[2] + f[1] * f[3]) / den), float(1 / den))


def _seam_pieces_mp(a1, a2, a3):
    """Split of boundary 1 and the two seam pieces of the seam opposite it.

    Closed form of the pentagon elimination: tanh of the piece facing
    boundary 2 is sinh a1 cosh a2 / (cosh a3 + cosh a1 cosh a2); all terms
    positive, no cancellation.
    """
    u = mpmath.atanh(mpmath.sinh(a1) * mpmath.cosh(a2)
                     / (mpmath.cosh(a3) + mpmath.cosh(a1) * mpmath.cosh(a2)))
    ck = mpmath.asinh(mpmath.cosh(u) / mpmath.sinh(a2))
    cl = mpmath.asinh(mpmath.cosh(a1 - u) / mpmath.sinh(a3))
    return u, ck + cl


# --- single-pants geometry -----------------------------------------------------

class PantsGeometry:
    """A pair of pants developed in standard position.

    Boundary matrices X[k] satisfy X1 X2 X3 = 1 and translate the hexagon's
    boundary lines by twice the half-lengths.  The marked foot of boundary k
    is the hexagon corner between the boundary side and seam k+1; it sits at
    parameter 0 of the boundary axis frame used for gluing.  Float views
    (axes, feet, seam_lines, vertices, X as IsometryMatrix) are provided for
    geometric consumers; the mpmath internals carry the precision.
    """

    def __init__(self, half_lengths):
        with mpmath.workdps(_DPS):
            a = [mpmath.mpf(v) for v in half_lengths]
            if any(v <= 0 for v in a):
                raise SurfaceError("half lengths must be positive")
            seam = [_seam_pieces_mp(a[i % 3], a[(i + 1) % 3], a[(i + 2) % 3])[1]
                    for i in range(3)]
            # sides: alpha1, zeta3', alpha2, zeta1', alpha3, zeta2'
            side_lengths = [a[0], seam[2], a[1], seam[0], a[2], seam[1]]
            quarter = _rot(mpmath.pi / 2)
            frames = []
            g = _MP_ID
            for L in side_lengths:
                frames.append(g)
                g = _mul(_mul(g, _trans(L)), quarter)
            # closure of the right hexagon is the defining identity of the
            # seam lengths; residual here only reflects arithmetic noise
            if _identity_residual_mp(g) > 1e-30 * max(
                    1.0, max(float(abs(v)) for f in frames for v in f)) ** 2:
                raise SurfaceError("hexagon development failed to close")
            half_turn = _rot(mpmath.pi)
            self._side_frames = frames
            self._axis_frames = {}
            self._X = {}
            for k in (1, 2, 3):
                f = frames[2 * (k - 1)]
                # X_k pulls the boundary line backward along the traversal;
                # the axis frame therefore points down the side direction
                self._X[k] = _mul(_mul(f, _trans(-2 * a[k - 1])), _inv(f))
                self._axis_frames[k] = _mul(f, half_turn)
            prod = _mul(_mul(self._X[1], self._X[2]), self._X[3])
            if _identity_residual_mp(prod) > 1e-40:
                raise SurfaceError("boundary holonomies do not compose to 1")

            self.half_lengths = tuple(float(v) for v in a)
            self.seam_lengths = tuple(float(v) for v in seam)
            self.vertices = [_frame_base(f) for f in frames]
            self.X = {k: _to_float_matrix(self._X[k]) for k in (1, 2, 3)}
            self.axes = {k: GeodesicLine(_frame_endpoint(frames[2 * (k - 1)], False),
                                         _frame_endpoint(frames[2 * (k - 1)], True))
                         for k in (1, 2, 3)}
            self.feet = {k: self.vertices[2 * (k - 1)] for k in (1, 2, 3)}
            self.seam_lines = {1: self._side_line(3), 2: self._side_line(5),
                               3: self._side_line(1)}

    def _side_line(self, i):
        f = self._side_frames[i]
        return GeodesicLine(_frame_endpoint(f, True), _frame_endpoint(f, False))

    def axis_frame(self, k, extra=0.0):
        """mp frame at the marked foot of boundary k, pointing along X_k."""
        if extra == 0.0:
            return self._axis_frames[k]
        return _mul(self._axis_frames[k], _trans(mpmath.mpf(extra)))


def _glue_map(geom_near, k_near, geom_far, k_far, twist):
    """mp isometry placing the far pants across boundary k_near of the near one.

    Maps the far boundary axis onto the near one with reversed orientation
    and the far marked foot to the near marked foot shifted by the twist.
    """
    half_turn = _rot(mpmath.pi)
    return _mul(_mul(geom_near.axis_frame(k_near, extra=twist), half_turn),
                _inv(geom_far.axis_frame(k_far)))


# --- the marked surface --------------------------------------------------------

GENUS2_GENERATORS = "abcd"
# one-relator presentation from the two-pants gluing: a, b are two boundary
# holonomies of the near pants, c and d the stable letters of edges 2 and 3
GENUS2_RELATOR = "dCbcaDBA"
GENUS2_CURVE_WORDS = ["a", "b", "BA"]
GENUS2_SEAM_WORDS = ["dCb", "DBA", "ca"]


def parse_word(word):
    """Word text: lowercase = generator, uppercase = inverse, left to right."""
    out = []
    for ch in word:
        idx = GENUS2_GENERATORS.find(ch.lower())
        if idx < 0:
            raise SurfaceError("unknown generator letter %r" % ch)
        out.append(-(idx + 1) if ch.isupper() else idx + 1)
    if not out:
        raise SurfaceError("empty word")
    return tuple(out)


def format_word(letters):
    out = []
    for v in letters:
        ch = GENUS2_GENERATORS[abs(v) - 1]
        out.append(ch.upper() if v < 0 else ch)
    return "".join(out)


class MarkedSurface:
    """Holonomy representation built from a decomposition and FN coordinates.

    Immutable after construction; holonomy evaluation is side-effect free.
    """

    def __init__(self, decomposition, coords, mp_generators, generator_names,
                 curve_words, seam_words, mp_curve_matrices, placements,
                 geoms, relator_residual):
        self.decomposition = decomposition
        self.coords = coords
        self._mp_generators = mp_generators
        self.generators = [_to_float_matrix(m) for m in mp_generators]
        self.generator_names = generator_names
        self.curve_words = curve_words
        self.seam_words = seam_words
        self._mp_curve_matrices = mp_curve_matrices
        self.curve_matrices = [_to_float_matrix(m) for m in mp_curve_matrices]
        self.placements = placements
        self.geoms = geoms
        self.relator_residual = relator_residual

    def _mp_holonomy(self, word):
        if isinstance(word, str):
            word = parse_word(word)
        m = _MP_ID
        for v in word:
            g = self._mp_generators[abs(v) - 1]
            m = _mul(m, _inv(g) if v < 0 else g)
        return m

    def holonomy(self, word):
        """Holonomy matrix of a word (string or signed generator indices)."""
        with mpmath.workdps(_DPS):
            return _to_float_matrix(self._mp_holonomy(word))

    def curve_length(self, word):
        """Translation length of the word's holonomy.

        Computed from the trace in extended precision: the cancellation in
        tr - 2 is of order exp(4 * axis distance) and exceeds what float64
        carries for short cuffs.
        """
        with mpmath.workdps(_DPS):
            m = self._mp_holonomy(word)
            t = abs(m[0] + m[3])
            if t <= 2:
                kind = "parabolic" if abs(t - 2) < 1e-40 else "elliptic"
                raise SurfaceError("not a closed geodesic class: image is %s"
                                   % kind)
            return float(2 * mpmath.acosh(t / 2))


def build_holonomy(decomposition, coords):
    """Realize the FN point as a holonomy representation.

    Raises on structural inconsistencies; a relator residual above 1e-6
    is reported as a construction error.
    """
    if len(coords.lengths) != len(decomposition.curve_edges):
        raise SurfaceError("need one length per curve edge")

    def edge_length(node, slot):
        i, _ = decomposition.edge_at(node, slot)
        return coords.lengths[i]

    geoms = {}
    for p in decomposition.pants:
        halves = tuple(edge_length(p, k) / 2.0 for k in (1, 2, 3))
        geoms[p] = PantsGeometry(halves)

    with mpmath.workdps(_DPS):
        # spanning tree by BFS from the first pants
        root = decomposition.pants[0]
        placements = {root: _MP_ID}
        tree_edges = set()
        queue = [root]
        while queue:
            node = queue.pop(0)
            for slot in (1, 2, 3):
                i, (other, oslot) = decomposition.edge_at(node, slot)
                if other in placements or i in tree_edges:
                    continue
                glue = _glue_map(geoms[node], slot, geoms[other], oslot,
                                 coords.twists[i])
                placements[other] = _mul(placements[node], glue)
                tree_edges.add(i)
                queue.append(other)
        if len(placements) != len(decomposition.pants):
            raise SurfaceError("decomposition graph is not connected")

        stable = {}
        for i, (p, s, q, r) in enumerate(decomposition.curve_edges):
            if i in tree_edges:
                continue
            via = _mul(placements[p],
                       _glue_map(geoms[p], s, geoms[q], r, coords.twists[i]))
            stable[i] = _mul(via, _inv(placements[q]))

        # conjugated boundary matrices and per-edge residuals
        curve_matrices = []
        worst = 0.0
        for i, (p, s, q, r) in enumerate(decomposition.curve_edges):
            near = _mul(_mul(placements[p], geoms[p]._X[s]), _inv(placements[p]))
            far = _mul(_mul(placements[q], geoms[q]._X[r]), _inv(placements[q]))
            if i in stable:
                far = _mul(_mul(stable[i], far), _inv(stable[i]))
            worst = max(worst, _identity_residual_mp(_mul(near, far)))
            curve_matrices.append(near)

        mp_generators, names, curve_words, seam_words = _genus2_marking(
            decomposition, geoms, stable, curve_matrices)

        surf = MarkedSurface(decomposition, coords, mp_generators, names,
                             curve_words, seam_words, curve_matrices,
                             placements, geoms, worst)
        if curve_words is not None:
            worst = max(worst, _identity_residual_mp(
                surf._mp_holonomy(GENUS2_RELATOR)))
            surf.relator_residual = worst
        if worst > 1e-6:
            raise SurfaceError("construction error: relator residual %.3e"
                               % worst)
    return surf


def _genus2_marking(decomposition, geoms, stable, curve_matrices):
    """Four-generator marking for the builtin two-pants decomposition."""
    if len(decomposition.pants) != 2 or len(stable) != 2:
        return (list(curve_matrices) + [stable[i] for i in sorted(stable)],
                None, None, None)
    root = decomposition.pants[0]
    stable_idx = sorted(stable)
    generators = [geoms[root]._X[1], geoms[root]._X[2],
                  stable[stable_idx[0]], stable[stable_idx[1]]]
    return (generators, list(GENUS2_GENERATORS), list(GENUS2_CURVE_WORDS),
            list(GENUS2_SEAM_WORDS))
