import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from teichlab import cones, curves, surface


@pytest.fixture(scope="module")
def dec():
    return surface.builtin_genus2_convenient()


@pytest.fixture(scope="module")
def pinched_pair(dec):
    x = surface.build_holonomy(dec, surface.FNCoordinates([1e-3, 2e-4, 5e-4]))
    y = surface.build_holonomy(dec, surface.FNCoordinates([3e-4, 1.5e-3,
                                                           2e-4]))
    return [x, y]


@pytest.fixture(scope="module")
def pinched_triple(dec):
    rows = [[1e-3, 2e-4, 3e-4], [2e-4, 1.2e-3, 2.5e-4],
            [3e-4, 2e-4, 1.5e-3]]
    return [surface.build_holonomy(
        dec, surface.FNCoordinates([rows[i][j] for i in range(3)]))
        for j in range(3)]


# --- Jordan projections --------------------------------------------------------


def test_pants_curve_projection_matches_lengths(pinched_pair):
    for i, w in enumerate(pinched_pair[0].curve_words):
        lam = cones.jordan_projection(pinched_pair, w)
        for s, v in zip(pinched_pair, lam.components):
            assert v == pytest.approx(s.coords.lengths[i], rel=1e-9)


def test_jordan_power_law(pinched_pair):
    one = cones.jordan_projection(pinched_pair, "cd")
    two = cones.jordan_projection(pinched_pair, "cdcd")
    for a, b in zip(one.components, two.components):
        assert b == pytest.approx(2 * a, rel=1e-9)


def test_jordan_conjugation_invariance(pinched_pair):
    lam = cones.jordan_projection(pinched_pair, "cd")
    conj = cones.jordan_projection(pinched_pair, "Acda")
    for a, b in zip(lam.components, conj.components):
        assert b == pytest.approx(a, rel=1e-9)


def test_jordan_error_names_factor(pinched_pair):
    with pytest.raises(cones.ConesError, match="factor 1"):
        cones.jordan_projection(pinched_pair, "aA")


# --- cone spec and hull construction -------------------------------------------


def test_spec_validation():
    with pytest.raises(cones.ConesError, match="ragged"):
        cones.ConeSpecL([[0.1, 0.2], [0.1]])
    with pytest.raises(cones.ConesError, match="in \\(0, 1\\)"):
        cones.ConeSpecL([[0.5, 1.5]])
    with pytest.raises(cones.ConesError, match="in \\(0, 1\\)"):
        cones.ConeSpecL([[0.5, -0.1]])


def test_two_factor_cone_min_max_slope():
    cone = cones.cone_over_hull([[1.0, 0.25], [0.5, 1.0], [1.0, 1.0]])
    assert len(cone.vertex_directions) == 2
    slopes = sorted(v[1] / v[0] for v in cone.vertex_directions)
    assert slopes[0] == pytest.approx(0.25)
    assert slopes[1] == pytest.approx(2.0)
    assert cone.interior_ones
    assert cone.contains((1.0, 1.0))
    assert not cone.contains((1.0, 0.1))


def test_redundant_row_absorbed():
    rows = [[0.9, 0.05, 0.05], [0.05, 0.9, 0.05], [0.05, 0.05, 0.9],
            [0.3, 0.3, 0.3]]
    cone = cones.cone_over_hull(rows)
    assert len(cone.vertex_directions) == 3
    interior = cones._unit((0.3, 0.3, 0.3))
    for v in cone.vertex_directions:
        assert max(abs(a - b) for a, b in zip(v, interior)) > 1e-6


def test_degenerate_span_errors():
    with pytest.raises(cones.ConesError, match="empty interior"):
        cones.cone_over_hull([[0.1, 0.1, 0.1], [0.2, 0.2, 0.2],
                              [0.3, 0.3, 0.3]])
    with pytest.raises(cones.ConesError, match="empty interior"):
        cones.cone_over_hull([[0.1, 0.2, 0.3, 0.4], [0.2, 0.4, 0.6, 0.8],
                              [0.05, 0.1, 0.15, 0.2],
                              [0.3, 0.6, 0.9, 0.85]])


def test_unsupported_dimension():
    with pytest.raises(cones.ConesError, match="2, 3, 4"):
        cones.cone_over_hull([[0.1] * 5, [0.2] * 5])


def test_vertices_on_facets():
    # each extreme ray lies on at least n - 1 supporting hyperplanes
    for rows, n in (
            ([[0.9, 0.05, 0.05], [0.05, 0.9, 0.05], [0.05, 0.05, 0.9]], 3),
            ([[0.9, 0.1, 0.1, 0.1], [0.1, 0.9, 0.1, 0.1],
              [0.1, 0.1, 0.9, 0.1], [0.1, 0.1, 0.1, 0.9]], 4)):
        cone = cones.cone_over_hull(rows)
        for v in cone.vertex_directions:
            tight = sum(1 for f in cone.facet_normals
                        if abs(cones._dot(f, v)) < 1e-10)
            assert tight >= n - 1


def _oracle_hull_vertices(rows):
    """Extreme rows by exhaustive pairwise facet enumeration (n = 3)."""
    pts = [tuple(v / sum(r) for v in r) for r in rows]
    planar = [(p[0] - p[2], p[1] - p[2]) for p in pts]
    k = len(planar)
    extreme = set()
    facets = []
    for i in range(k):
        for j in range(i + 1, k):
            ax, ay = planar[i]
            bx, by = planar[j]
            nx, ny = by - ay, ax - bx
            off = nx * ax + ny * ay
            signs = [nx * planar[m][0] + ny * planar[m][1] - off
                     for m in range(k) if m not in (i, j)]
            if all(s >= -1e-12 for s in signs) or all(
                    s <= 1e-12 for s in signs):
                extreme.update((i, j))
                facets.append((i, j))
    return extreme, facets, planar


def test_hull_matches_bruteforce_oracle():
    rng = random.Random(7)
    for _ in range(25):
        rows = [[rng.uniform(0.05, 0.95) for _ in range(3)]
                for _ in range(5)]
        extreme, _, _ = _oracle_hull_vertices(rows)
        try:
            cone = cones.cone_over_hull(rows)
        except cones.ConesError:
            continue
        dirs = {tuple(round(x, 9) for x in cones._unit(rows[i]))
                for i in extreme}
        got = {tuple(round(x, 9) for x in v)
               for v in cone.vertex_directions}
        assert got == dirs


def test_membership_matches_bruteforce_oracle():
    rng = random.Random(11)
    rows = [[rng.uniform(0.05, 0.95) for _ in range(3)] for _ in range(5)]
    extreme, facets, planar = _oracle_hull_vertices(rows)
    cone = cones.cone_over_hull(rows)
    cx = sum(p[0] for p in planar) / len(planar)
    cy = sum(p[1] for p in planar) / len(planar)
    for _ in range(200):
        d = [rng.uniform(0.05, 1.0) for _ in range(3)]
        p = tuple(v / sum(d) for v in d)
        q = (p[0] - p[2], p[1] - p[2])
        inside = True
        for i, j in facets:
            ax, ay = planar[i]
            bx, by = planar[j]
            nx, ny = by - ay, ax - bx
            off = nx * ax + ny * ay
            ref = nx * cx + ny * cy - off
            val = nx * q[0] + ny * q[1] - off
            if val * ref < -1e-9:
                inside = False
                break
        if abs(cone.angular_excess(d)) > 1e-7:
            assert not inside
        elif cone.angular_excess(d) == 0.0:
            assert inside


def test_hull_idempotence():
    rng = random.Random(3)
    for _ in range(10):
        rows = [[rng.uniform(0.05, 0.95) for _ in range(3)]
                for _ in range(5)]
        try:
            cone = cones.cone_over_hull(rows)
        except cones.ConesError:
            continue
        again = cones.cone_over_hull(
            [[0.5 * x for x in v] for v in cone.vertex_directions])
        assert len(again.vertex_directions) == len(cone.vertex_directions)
        for v in cone.vertex_directions:
            assert again.angular_excess(v) <= 1e-12
        for v in again.vertex_directions:
            assert cone.angular_excess(v) <= 1e-12


def test_four_factor_hull():
    rows = [[0.9, 0.1, 0.1, 0.1], [0.1, 0.9, 0.1, 0.1],
            [0.1, 0.1, 0.9, 0.1], [0.1, 0.1, 0.1, 0.9],
            [0.25, 0.25, 0.25, 0.25]]
    cone = cones.cone_over_hull(rows)
    assert len(cone.vertex_directions) == 4
    assert len(cone.facet_normals) == 4
    assert cone.interior_ones
    assert cone.contains((1.0, 1.0, 1.0, 1.0))
    assert cone.angular_excess((1.0, 0.01, 0.01, 0.01)) > 1e-3


# --- HL membership --------------------------------------------------------------


def test_hl_ones_always_true():
    spec = cones.ConeSpecL([[0.1, 0.2], [0.3, 0.05]])
    for c in (1.0, 1.5, 10.0):
        assert cones.hl_membership((1.0, 1.0), spec, c)


def test_hl_validation():
    spec = cones.ConeSpecL([[0.1, 0.2]])
    with pytest.raises(cones.ConesError, match="positive"):
        cones.hl_membership((1.0, -1.0), spec, 2.0)
    with pytest.raises(cones.ConesError, match="at least 1"):
        cones.hl_membership((1.0, 1.0), spec, 0.5)


def test_hl_direct_inequality():
    near_uniform = cones.ConeSpecL([[0.10, 0.11, 0.105]] * 3)
    assert not cones.hl_membership((10.0, 1.0, 1.0), near_uniform, 1.1)
    assert cones.hl_membership((1.02, 1.0, 1.01), near_uniform, 1.1)


@given(st.floats(1.0, 5.0), st.floats(0.0, 4.0),
       st.lists(st.floats(0.1, 10.0), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_hl_nested_in_constant(c, extra, b):
    spec = cones.ConeSpecL([[0.2, 0.05, 0.4], [0.1, 0.3, 0.02]])
    if cones.hl_membership(b, spec, c):
        assert cones.hl_membership(b, spec, c + extra)


def test_hl_shrinks_under_uniform_scaling():
    base = [[0.5, 0.05, 0.2], [0.1, 0.4, 0.03]]
    bounds = []
    for s in (1.0, 1e-2, 1e-6, 1e-12):
        spec = cones.ConeSpecL([[s * v for v in row] for row in base])
        bounds.append(spec.log_ratio_max())
    assert bounds == sorted(bounds, reverse=True)
    assert bounds[-1] == pytest.approx(1.0, abs=0.2)


# --- limit-cone verification ----------------------------------------------------


def test_verify_pinched_pair(pinched_pair):
    family = curves.enumerate_conj_classes(2, 5)
    report = cones.verify_limit_cone(pinched_pair, family)
    assert report["containment_rate"] == 1.0
    assert report["vertex_attained"]
    assert report["worst_excess"] <= 1e-2
    assert set(report["vertex_witnesses"]) <= set(
        pinched_pair[0].curve_words)


def test_verify_three_factors(pinched_triple):
    family = curves.enumerate_conj_classes(2, 4)
    report = cones.verify_limit_cone(pinched_triple, family)
    assert report["containment_rate"] == 1.0
    assert report["vertex_attained"]
    assert len(report["cone"].vertex_directions) == 3


def test_verify_scale_monotone(dec):
    rows = [[1e-3, 2e-4, 3e-4], [2e-4, 1.2e-3, 2.5e-4],
            [3e-4, 2e-4, 1.5e-3]]
    family = curves.enumerate_conj_classes(2, 3)
    worst = []
    for scale in (1.0, 0.1):
        surfaces = [surface.build_holonomy(
            dec, surface.FNCoordinates([scale * rows[i][j]
                                        for i in range(3)]))
            for j in range(3)]
        report = cones.verify_limit_cone(surfaces, family)
        assert report["containment_rate"] == 1.0
        worst.append(report["worst_excess"])
    assert worst[1] <= worst[0] + 1e-12


def test_verify_twist_persistence(dec):
    family = curves.enumerate_conj_classes(2, 4)
    lengths = [[1e-3, 3e-4], [2e-4, 1.5e-3], [5e-4, 2e-4]]
    surfaces = [surface.build_holonomy(
        dec, surface.FNCoordinates([lengths[i][j] for i in range(3)],
                                   twists=[0.7, -0.9, 0.4]))
        for j in range(2)]
    report = cones.verify_limit_cone(surfaces, family)
    assert report["containment_rate"] == 1.0
    assert report["vertex_attained"]


def test_ray_cloud_in_positive_simplex(pinched_pair):
    family = curves.enumerate_conj_classes(2, 4)
    report = cones.verify_limit_cone(pinched_pair, family)
    for row in report["rows"]:
        d = row["direction"]
        assert all(v > 0.0 for v in d)
        assert sum(v * v for v in d) == pytest.approx(1.0, rel=1e-12)


def test_ray_csv_schema(pinched_pair):
    family = curves.enumerate_conj_classes(2, 3)
    report = cones.verify_limit_cone(pinched_pair, family)
    header = cones.ray_csv_header(2)
    assert header == ("word,lambda_1,lambda_2,dir_1,dir_2,"
                      "in_cone,angular_excess")
    rows = cones.ray_csv_rows(report)
    assert len(rows) == len(family)
    for line in rows:
        parts = line.split(",")
        assert len(parts) == len(header.split(","))
        assert parts[-2] in ("0", "1")
        float(parts[-1])


def test_verify_parallel_matches_serial(pinched_pair, monkeypatch):
    family = curves.enumerate_conj_classes(2, 4)
    serial = cones.verify_limit_cone(pinched_pair, family)
    monkeypatch.setenv("TEICHLAB_THREADS", "4")
    parallel = cones.verify_limit_cone(pinched_pair, family)
    assert [r["word"] for r in serial["rows"]] == [
        r["word"] for r in parallel["rows"]]
    assert serial["worst_excess"] == parallel["worst_excess"]


# --- designer cones -------------------------------------------------------------


def _simplex_cone():
    return cones.cone_over_hull([[0.8, 0.1, 0.1], [0.15, 0.8, 0.05],
                                 [0.1, 0.2, 0.7]])


def test_designer_roundtrip():
    cone = _simplex_cone()
    spec = cones.designer_lengths(cone, 3, 3, 1e-3)
    back = cones.cone_over_hull(spec)
    assert len(back.vertex_directions) == 3
    for v in cone.vertex_directions:
        assert back.angular_excess(v) <= 1e-12
    for v in back.vertex_directions:
        assert cone.angular_excess(v) <= 1e-12


def test_designer_centroid_rows_absorbed():
    cone = cones.cone_over_hull([[0.8, 0.15], [0.2, 0.9], [0.5, 0.5]])
    spec = cones.designer_lengths(cone, 2, 3, 1e-3)
    assert len(spec.rows) == 3
    back = cones.cone_over_hull(spec)
    assert len(back.vertex_directions) == 2


def test_designer_errors():
    cone = _simplex_cone()
    with pytest.raises(cones.ConesError, match="vertex count"):
        cones.designer_lengths(cone, 3, 2, 1e-3)
    with pytest.raises(cones.ConesError, match="below 1"):
        cones.designer_lengths(cone, 3, 3, 5.0)
    skew = cones.cone_over_hull([[0.9, 0.05, 0.05], [0.8, 0.1, 0.05],
                                 [0.85, 0.05, 0.1]])
    assert not skew.interior_ones
    with pytest.raises(cones.ConesError, match="interior"):
        cones.designer_lengths(skew, 3, 3, 1e-3)


def test_designer_full_pipeline(dec):
    cone = _simplex_cone()
    spec = cones.designer_lengths(cone, 3, 3, 1e-3)
    surfaces = [surface.build_holonomy(
        dec, surface.FNCoordinates([spec.rows[i][j] for i in range(3)]))
        for j in range(3)]
    family = curves.enumerate_conj_classes(2, 4)
    report = cones.verify_limit_cone(surfaces, family, tol_angular=1e-2)
    assert report["containment_rate"] == 1.0
    assert report["vertex_attained"]
    for v, w in zip(cone.vertex_directions,
                    report["cone"].vertex_directions):
        assert cone.angular_excess(w) <= 1e-9


# --- projection decomposition ---------------------------------------------------


def test_decompose_consistency(pinched_pair):
    r_vec, l_vec = cones.decompose_projection(pinched_pair, "cd")
    lam = cones.jordan_projection(pinched_pair, "cd")
    for r, l, v in zip(r_vec, l_vec, lam.components):
        assert r + l == pytest.approx(v, rel=1e-9)
        assert r > 0.0
        assert l > 0.0


def test_decompose_rotation_free_curves_contribute_nothing(pinched_pair):
    # "c" winds once around the first pants curve and not at all around
    # the other two, so its rotational part is exactly one copy of the
    # first cuff length in each factor
    r_vec, l_vec = cones.decompose_projection(pinched_pair, "c")
    for s, r in zip(pinched_pair, r_vec):
        assert r == pytest.approx(s.coords.lengths[0], rel=1e-12)
    lam = cones.jordan_projection(pinched_pair, "c")
    for r, l, v in zip(r_vec, l_vec, lam.components):
        assert r + l == pytest.approx(v, rel=1e-9)


def test_decompose_spiral_vertex_direction(pinched_pair):
    vertex = cones._unit((pinched_pair[0].coords.lengths[0],
                          pinched_pair[1].coords.lengths[0]))
    for k in (3, 8, 14):
        r_vec, _ = cones.decompose_projection(
            pinched_pair, "a" * k + "c", search_depth=max(12, k + 6))
        r_dir = cones._unit(r_vec)
        angle = math.acos(min(1.0, cones._dot(vertex, r_dir)))
        assert angle <= 1e-6


def test_decompose_remainders_in_hl_band(pinched_pair):
    spec = cones.ConeSpecL(
        [[s.coords.lengths[i] for s in pinched_pair] for i in range(3)])
    for word in ("c", "cd", "cD", "aac"):
        _, l_vec = cones.decompose_projection(pinched_pair, word)
        assert cones.hl_membership(l_vec, spec, 2.0)


def test_decompose_rejects_pants_curve(pinched_pair):
    from teichlab import combinat
    with pytest.raises(combinat.CombinatError, match="excluded"):
        cones.decompose_projection(pinched_pair, "a")


# --- serialization and fingerprints --------------------------------------------


def test_cone_json_roundtrip():
    cone = _simplex_cone()
    back = cones.cone_from_json(cones.cone_to_json(cone))
    assert back.vertex_directions == cone.vertex_directions
    assert back.facet_normals == cone.facet_normals
    assert back.interior_ones == cone.interior_ones


def test_jordan_fingerprints(pinched_pair):
    classes = ["c", "cd", "cD", "ab"]
    assert cones.distinct_jordan_fingerprints(pinched_pair, classes)
    assert not cones.distinct_jordan_fingerprints(
        pinched_pair, ["cd", "Acda"])
