"""Stretch-path experiments for the Thurston metric in log-FN coordinates.

A noisy path stretches one log-length coordinate at unit speed while the
remaining log-lengths follow a forward-1-Lipschitz perturbation and the
twists follow a D-Lipschitz one.  On sufficiently pinched surfaces such a
path moves at unit speed for the Thurston metric: the stretched pants
curve realizes the length-ratio supremum e^(t2-t1) exactly, and no other
curve exceeds it.  The checks here certify the literally computable half
of that statement: the witness ratio is exact and a supplied family of
curve classes never beats it.  The full supremum over all classes is not
recomputed; every report is a family-restricted certificate.
"""

import concurrent.futures
import math
import os
import random

from . import constants, curves
from . import surface as surface_mod
from .surface import FNCoordinates


class ThurstonError(ValueError):
    pass


_SLOPE_TOL = 1e-12


class PiecewiseLinearPath:
    """Vector-valued piecewise-linear path on [0, T] with value 0 at 0."""

    def __init__(self, T, values):
        """`values`: per-breakpoint list of coordinate tuples, uniform grid."""
        if T <= 0:
            raise ThurstonError("path horizon must be positive")
        self.T = float(T)
        self.values = [tuple(float(v) for v in row) for row in values]
        if len(self.values) < 2:
            raise ThurstonError("need at least two breakpoints")
        self.dim = len(self.values[0])
        if any(len(row) != self.dim for row in self.values):
            raise ThurstonError("ragged breakpoint values")
        if any(v != 0.0 for v in self.values[0]):
            raise ThurstonError("path must start at 0")

    @property
    def step(self):
        return self.T / (len(self.values) - 1)

    def __call__(self, t):
        if not 0.0 <= t <= self.T + _SLOPE_TOL:
            raise ThurstonError("parameter outside [0, T]")
        t = min(t, self.T)
        pos = t / self.step
        i = min(int(pos), len(self.values) - 2)
        frac = pos - i
        return tuple(a + frac * (b - a)
                     for a, b in zip(self.values[i], self.values[i + 1]))

    def slopes(self):
        """Per-segment coordinate slopes."""
        out = []
        for a, b in zip(self.values, self.values[1:]):
            out.append(tuple((y - x) / self.step for x, y in zip(a, b)))
        return out

    @classmethod
    def zero(cls, T, dim):
        return cls(T, [(0.0,) * dim, (0.0,) * dim])

    @classmethod
    def random(cls, T, dim, lo, hi, seed,
               breakpoints=constants.NOISE_BREAKPOINTS_DEFAULT):
        """Random admissible path: iid segment slopes in [lo, hi]."""
        rng = random.Random(seed)
        step = T / breakpoints
        rows = [(0.0,) * dim]
        for _ in range(breakpoints):
            rows.append(tuple(v + rng.uniform(lo, hi) * step
                              for v in rows[-1]))
        return cls(T, rows)


class NoisyPathSpec:
    """Stretch of one log-length coordinate plus admissible noise.

    `base_log_lengths`/`base_twists` give the starting point, `F` perturbs
    the remaining length coordinates (forward slope at most 1, backward at
    most D), and `G` perturbs all twists (slope at most D in both
    directions).
    """

    def __init__(self, base_log_lengths, base_twists, T, stretched_index,
                 F, G, D=5.0, seed=0, enforce_slopes=True):
        self.base_log_lengths = [float(v) for v in base_log_lengths]
        n = len(self.base_log_lengths)
        self.base_twists = ([0.0] * n if base_twists is None
                            else [float(v) for v in base_twists])
        if len(self.base_twists) != n:
            raise ThurstonError("twists and lengths must have equal length")
        if not 0 <= stretched_index < n:
            raise ThurstonError("stretched index out of range")
        self.T = float(T)
        self.stretched_index = stretched_index
        self.F = F
        self.G = G
        self.D = float(D)
        self.seed = seed
        if F.dim != n - 1:
            raise ThurstonError("F must cover the unstretched lengths")
        if G.dim != n:
            raise ThurstonError("G must cover all twists")
        if abs(F.T - self.T) > _SLOPE_TOL or abs(G.T - self.T) > _SLOPE_TOL:
            raise ThurstonError("noise paths must share the horizon T")
        if not enforce_slopes:
            # deliberately inadmissible noise, used to exercise the
            # falsification channel of verify_noisy_geodesic
            return
        for seg in F.slopes():
            for s in seg:
                if s > 1.0 + _SLOPE_TOL or s < -self.D - _SLOPE_TOL:
                    raise ThurstonError(
                        "F slope %.6g outside [-D, 1]" % s)
        for seg in G.slopes():
            for s in seg:
                if abs(s) > self.D + _SLOPE_TOL:
                    raise ThurstonError("G slope %.6g outside [-D, D]" % s)


def random_noisy_spec(base_log_lengths, T, stretched_index, D=5.0, seed=0,
                      breakpoints=constants.NOISE_BREAKPOINTS_DEFAULT,
                      base_twists=None):
    """Admissible spec with seeded random noise paths."""
    n = len(base_log_lengths)
    F = PiecewiseLinearPath.random(T, n - 1, -min(D, 1.0), 1.0,
                                   seed, breakpoints)
    G = PiecewiseLinearPath.random(T, n, -D, D, seed + 1, breakpoints)
    return NoisyPathSpec(base_log_lengths, base_twists, T, stretched_index,
                         F, G, D=D, seed=seed)


def noisy_path_point(spec, t):
    """The path point at time t, exponentiated to FN coordinates."""
    if not 0.0 <= t <= spec.T + _SLOPE_TOL:
        raise ThurstonError("parameter outside [0, T]")
    f = spec.F(t)
    g = spec.G(t)
    logs = []
    j = 0
    for i, x in enumerate(spec.base_log_lengths):
        if i == spec.stretched_index:
            logs.append(x + t)
        else:
            logs.append(x + f[j])
            j += 1
    twists = [tw + dg for tw, dg in zip(spec.base_twists, g)]
    return FNCoordinates([math.exp(x) for x in logs], twists)


def symmetric_path_point(spec, t, shrunk_index):
    """Noisy point with a second coordinate shrunk at unit speed.

    The shrunk coordinate's noise component is overridden by exactly -t;
    the other coordinates keep the spec's noise.
    """
    if shrunk_index == spec.stretched_index:
        raise ThurstonError("shrunk and stretched coordinates must differ")
    coords = noisy_path_point(spec, t)
    lengths = list(coords.lengths)
    lengths[shrunk_index] = math.exp(
        spec.base_log_lengths[shrunk_index] - t)
    return FNCoordinates(lengths, coords.twists)


def asymmetry_path_point(base_log_lengths, t, f, stretched_index=0,
                         shrunk_index=1, T=None, samples=64):
    """Point of the path (t, f(t), 0, ...): prescribed decreasing shrink.

    `f` must be decreasing with f(0) = 0; checked on a sample grid over
    [0, max(t, T)].
    """
    horizon = max(t, T if T is not None else t)
    if horizon <= 0:
        raise ThurstonError("need a positive horizon")
    if abs(f(0.0)) > _SLOPE_TOL:
        raise ThurstonError("f(0) must be 0")
    grid = [horizon * i / samples for i in range(samples + 1)]
    vals = [f(x) for x in grid]
    if any(b >= a - _SLOPE_TOL * horizon
           for a, b in zip(vals, vals[1:])):
        raise ThurstonError("f must be decreasing")
    if stretched_index == shrunk_index:
        raise ThurstonError("shrunk and stretched coordinates must differ")
    logs = list(base_log_lengths)
    logs[stretched_index] += t
    logs[shrunk_index] += f(t)
    return FNCoordinates([math.exp(x) for x in logs])


class RatioCertificate:
    """Supremum of length ratios over an explicit family, with witness."""

    __slots__ = ("sup_ratio", "witness", "family_size", "skipped",
                 "exact_flag")

    def __init__(self, sup_ratio, witness, family_size, skipped, exact_flag):
        self.sup_ratio = sup_ratio
        self.witness = witness
        self.family_size = family_size
        self.skipped = skipped
        self.exact_flag = exact_flag

    def __repr__(self):
        return ("RatioCertificate(sup_ratio=%r, witness=%r, family_size=%r, "
                "skipped=%r, exact_flag=%r)" % (
                    self.sup_ratio, self.witness, self.family_size,
                    self.skipped, self.exact_flag))


def _class_key(word):
    return (len(word), curves._word_key(word))


def _as_word(cls):
    if isinstance(cls, curves.ConjClass):
        return cls.word
    if isinstance(cls, str):
        return tuple(surface_mod.parse_word(cls))
    return tuple(cls)


def ratio_sup(x_surface, y_surface, family, designated=None, expected=None):
    """Max of l_Y/l_X over the family; ties break by canonical word order."""
    if not family:
        raise ThurstonError("family must be nonempty")
    words = [_as_word(cls) for cls in family]

    def evaluate(word):
        try:
            lx = x_surface.curve_length(word)
            ly = y_surface.curve_length(word)
        except surface_mod.SurfaceError:
            return None
        return ly / lx

    workers = max(1, int(os.environ.get("TEICHLAB_THREADS", "1")))
    if workers > 1 and len(words) > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            ratios = list(pool.map(evaluate, words))
    else:
        ratios = [evaluate(w) for w in words]

    evaluated = [(w, r) for w, r in zip(words, ratios) if r is not None]
    skipped = len(words) - len(evaluated)
    if not evaluated:
        raise ThurstonError("no hyperbolic class in the family")
    sup_ratio = max(r for _, r in evaluated)
    # witness: canonically smallest word within a relative hair of the
    # supremum (a curve and its powers give ulp-separated ratios)
    witness = min((w for w, r in evaluated
                   if r >= sup_ratio * (1.0 - 1e-12)), key=_class_key)
    exact = False
    if designated is not None and expected is not None:
        des = _as_word(designated)
        des_ratio = evaluate(des)
        exact = (des_ratio is not None
                 and abs(des_ratio - expected) <= 1e-9 * expected
                 and sup_ratio <= expected * (1.0 + 1e-9))
    return RatioCertificate(sup_ratio, witness, len(words) - skipped,
                            skipped, exact)


def verify_noisy_geodesic(spec, decomposition, sample_pairs, family,
                          log_pinch=constants.LOG_PINCH_DEFAULT):
    """Family-restricted geodesic certificate along a noisy path.

    For each time pair the stretched pants curve must realize the ratio
    e^(t2-t1) exactly, and no family member may exceed it.  A family
    member beating the bound is reported as a counterexample; this is the
    falsification channel for inadmissible noise.
    """
    for i, x in enumerate(spec.base_log_lengths):
        if i != spec.stretched_index and x > log_pinch + _SLOPE_TOL:
            raise ThurstonError(
                "base log-length %d above the pinching threshold" % i)
    results = []
    for t1, t2 in sample_pairs:
        if not (0.0 <= t1 < t2 <= spec.T + _SLOPE_TOL):
            raise ThurstonError("need 0 <= t1 < t2 <= T")
        x_surf = surface_mod.build_holonomy(decomposition,
                                            noisy_path_point(spec, t1))
        y_surf = surface_mod.build_holonomy(decomposition,
                                            noisy_path_point(spec, t2))
        stretched_word = x_surf.curve_words[spec.stretched_index]
        expected = math.exp(t2 - t1)
        cert = ratio_sup(x_surf, y_surf, family,
                         designated=stretched_word, expected=expected)
        witness_ratio = (y_surf.curve_length(stretched_word)
                         / x_surf.curve_length(stretched_word))
        ok = (abs(witness_ratio - expected) <= 1e-9 * expected
              and cert.sup_ratio <= expected * (1.0 + 1e-9))
        results.append({
            "t1": t1, "t2": t2, "expected": expected,
            "witness_ratio": witness_ratio,
            "sup_ratio": cert.sup_ratio,
            "sup_witness": curves.word_to_text(cert.witness),
            "family_size": cert.family_size,
            "skipped": cert.skipped,
            "pass": ok,
        })
    counterexamples = [r for r in results if not r["pass"]]
    return {
        "certificate": "family-restricted",
        "pairs": results,
        "passed": not counterexamples,
        "counterexamples": counterexamples,
    }


def linf_grid_check(base_log_lengths, T, k, grid_n, family, decomposition,
                    log_pinch=constants.LOG_PINCH_DEFAULT, rel_tol=1e-9):
    """Grid certificate for the sup-metric embedding of [0, T]^k.

    Coordinate i of the cube moves the pair of log-lengths (2i, 2i+1) by
    (+x_i, -x_i); between two grid points the family ratio supremum must
    equal exp(max_i |x_i - y_i|) in both directions.
    """
    n = len(base_log_lengths)
    if 2 * k > n:
        raise ThurstonError("cube dimension needs 2k coordinate slots")
    if grid_n < 2:
        raise ThurstonError("need at least a 2-point grid")
    if any(x > log_pinch + _SLOPE_TOL for x in base_log_lengths):
        raise ThurstonError("base log-lengths above the pinching threshold")

    def embed(x):
        logs = list(base_log_lengths)
        for i, xi in enumerate(x):
            logs[2 * i] += xi
            logs[2 * i + 1] -= xi
        return FNCoordinates([math.exp(v) for v in logs])

    ticks = [T * i / (grid_n - 1) for i in range(grid_n)]
    points = [()]
    for _ in range(k):
        points = [p + (t,) for p in points for t in ticks]
    surfaces = {p: surface_mod.build_holonomy(decomposition, embed(p))
                for p in points}

    results = []
    for a in points:
        for b in points:
            if b <= a:
                continue
            diffs = [abs(x - y) for x, y in zip(a, b)]
            expected = math.exp(max(diffs))
            axis = max(range(k), key=lambda i: diffs[i])
            for src, dst in ((a, b), (b, a)):
                cert = ratio_sup(surfaces[src], surfaces[dst], family)
                ok = (abs(cert.sup_ratio - expected) <= rel_tol * expected
                      if max(diffs) > 0
                      else cert.sup_ratio <= 1.0 + rel_tol)
                results.append({
                    "from": src, "to": dst,
                    "expected": expected,
                    "sup_ratio": cert.sup_ratio,
                    "witness": curves.word_to_text(cert.witness),
                    "axis": axis,
                    "pass": ok,
                })
    counterexamples = [r for r in results if not r["pass"]]
    return {
        "certificate": "family-restricted",
        "pairs": results,
        "passed": not counterexamples,
        "counterexamples": counterexamples,
    }
