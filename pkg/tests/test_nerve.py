import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coxhyp.errors import InvalidMatrixError, NoCommonCellError
from coxhyp.nerve import (
    PATH_OF_TWO_EDGES,
    TWO_TRIANGLES,
    ZERO_DIAGONAL,
    NervePoint,
    build_nerve,
    check_path_distance,
    check_suspension_distance,
    intrinsic_distance,
    join_distance,
    link_complex,
    max_inner_product_over_nerve,
    project_to_link,
    simplex_distance,
    suspension_distance,
    verify_counterexamples,
)
from coxhyp.sampling import random_almost_negative

from oracles import pd_subsets, sampled_max_inner


def random_point(rng, N, cell=None):
    a = N.gram.a
    if cell is None:
        cell = N.maximal_cells[int(rng.integers(len(N.maximal_cells)))]
    w = rng.dirichlet(np.ones(len(cell)))
    w = w / math.sqrt(float(w @ a[np.ix_(cell, cell)] @ w))
    return NervePoint(cell, tuple(w))


def test_nerve_examples():
    assert build_nerve(ZERO_DIAGONAL).cells == ((0,),)
    N = build_nerve(PATH_OF_TWO_EDGES)
    assert N.maximal_cells == ((0, 1), (1, 2))
    N = build_nerve(TWO_TRIANGLES)
    assert N.maximal_cells == ((0, 1, 2), (1, 2, 3))
    assert build_nerve(-np.eye(2)).cells == ()


def test_nerve_matches_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(200):
        A = random_almost_negative(rng, int(rng.integers(1, 7)))
        N = build_nerve(A)
        assert set(N.cells) == pd_subsets(A.a)
        for M1, M2 in combinations(N.maximal_cells, 2):
            assert not set(M1) <= set(M2) and not set(M2) <= set(M1)


def test_size_guard(monkeypatch):
    monkeypatch.setenv("COX_MAX_N", "3")
    from coxhyp.errors import SizeGuardError

    with pytest.raises(SizeGuardError):
        build_nerve(np.eye(4))


def test_simplex_distance_examples():
    N = build_nerve(TWO_TRIANGLES)
    v = [N.vertex(i) for i in range(4)]
    assert simplex_distance(N.gram, v[0], v[0]) == 0.0
    assert simplex_distance(N.gram, v[1], v[2]) == pytest.approx(math.pi / 2, abs=1e-15)
    P = build_nerve(PATH_OF_TWO_EDGES)
    y = P.point([0.0, math.sin(math.pi / 4), math.cos(math.pi / 4)])
    with pytest.raises(NoCommonCellError):
        simplex_distance(P.gram, P.vertex(0), y)


def test_points_are_validated():
    N = build_nerve(PATH_OF_TWO_EDGES)
    with pytest.raises(InvalidMatrixError):
        N.point([1.0, 0.0, 1.0])  # support {1,3} is not a cell
    with pytest.raises(InvalidMatrixError):
        N.point([2.0, 0.0, 0.0])  # not unit
    with pytest.raises(InvalidMatrixError):
        NervePoint((0, 1), (-0.5, 1.0))


def test_intrinsic_distance_path_complex():
    N = build_nerve(PATH_OF_TWO_EDGES)
    y = [0.0, math.sin(math.pi / 4), math.cos(math.pi / 4)]
    r = intrinsic_distance(N, [1.0, 0.0, 0.0], y, 512)
    assert r.distance == pytest.approx(3 * math.pi / 4, abs=1e-3)
    assert r.distance == pytest.approx(math.acos(-math.cos(math.pi / 4)), abs=1e-3)


def test_intrinsic_distance_trivial_cases():
    N = build_nerve(TWO_TRIANGLES)
    x = N.vertex(0)
    assert intrinsic_distance(N, x, x).distance == 0.0
    r = intrinsic_distance(N, N.vertex(0), N.vertex(2), 16)
    assert r.distance == pytest.approx(simplex_distance(N.gram, N.vertex(0), N.vertex(2)), abs=1e-12)


def test_disconnected_complex_gives_infinity():
    A = np.array([[1.0, -1.0], [-1.0, 1.0]])
    N = build_nerve(A)
    r = intrinsic_distance(N, N.vertex(0), N.vertex(1), 8)
    assert math.isinf(r.distance) and r.path == ()
    assert r.to_json()["distance"] == "inf"


@pytest.mark.parametrize("phi", [math.pi / 4, math.pi / 3, 0.3, 1.2])
def test_path_distance_equals_chord_for_all_angles(phi):
    r = check_path_distance(phi, 512)
    assert r.passed, r.detail
    assert r.value == pytest.approx(math.pi - phi, abs=1e-3)


def test_path_distance_at_third_pi_exceeds_chord_sum():
    # at phi = pi/3 the intrinsic distance is 2pi/3, not pi/2 + pi/3
    r = check_path_distance(math.pi / 3, 512)
    assert r.value == pytest.approx(2 * math.pi / 3, abs=1e-3)
    assert abs(r.value - 5 * math.pi / 6) > 0.1


def test_suspension_distance_examples():
    N = build_nerve(TWO_TRIANGLES)
    L = link_complex(N, [1])
    assert L.maximal_cells == ((0, 1), (1, 2))
    assert L.origin == (0, 2, 3)
    assert np.array_equal(L.gram.a, PATH_OF_TWO_EDGES)
    r = check_suspension_distance()
    assert r.passed, r.detail
    # north pole to any point: the polar angle
    assert suspension_distance(L, None, N.vertex(0), polar_x=0.0, polar_y=1.1).distance == pytest.approx(1.1)
    assert join_distance(math.pi / 2, math.pi / 2, 4.0) == pytest.approx(math.pi)


def test_link_complex_examples():
    N = build_nerve(TWO_TRIANGLES)
    assert link_complex(N, ()) is N
    N41 = build_nerve(np.array([[1.0, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0], [-1, 0, 0, 1]]))
    L = link_complex(N41, (0, 1))
    assert L.cells == ((0,),)
    with pytest.raises(InvalidMatrixError):
        link_complex(build_nerve(PATH_OF_TWO_EDGES), (0, 2))


def test_project_to_link_round_trip():
    N = build_nerve(TWO_TRIANGLES)
    x = N.point(np.array([0.0, 0.6, 0.8, 0.0]) / 1.0)
    polar, p = project_to_link(N, 1, x)
    assert polar == pytest.approx(math.acos(0.6))
    assert p.cell == (1,) and p.coeffs[0] == pytest.approx(1.0)
    assert project_to_link(N, 1, N.vertex(1)) == (0.0, None)


def test_max_inner_product_examples():
    z, val = max_inner_product_over_nerve(ZERO_DIAGONAL, [1.0, 1.0])
    assert val == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(z.ambient(2), [1.0, 0.0], atol=1e-12)
    A = np.array([[1.0, -0.5], [-0.5, 1.0]])
    z, val = max_inner_product_over_nerve(A, [1.0, 1.0])
    assert val == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(z.ambient(2), [1.0, 1.0])
    with pytest.raises(InvalidMatrixError):
        max_inner_product_over_nerve(A, [2.0, 0.0])
    with pytest.raises(InvalidMatrixError):
        max_inner_product_over_nerve(A, [-1.0, 0.0])


def random_unit_u(rng, a):
    for _ in range(100):
        u = rng.random(a.shape[0]) * (rng.random(a.shape[0]) < 0.7)
        q = float(u @ a @ u)
        if q > 1e-6:
            return u / math.sqrt(q)
    return None


def test_max_inner_product_at_least_one_and_beats_sampling():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(150):
        A = random_almost_negative(rng, int(rng.integers(2, 6)), plant_pair=0.3)
        u = random_unit_u(rng, A.a)
        if u is None:
            continue
        N = build_nerve(A)
        z, val = max_inner_product_over_nerve(A, u)
        assert val >= 1 - 1e-9
        assert val >= sampled_max_inner(A.a, u, N.maximal_cells, rng, 500) - 1e-9
        assert abs(float(z.ambient(A.n) @ A.a @ u) - val) < 1e-9
        checked += 1
    assert checked > 100


def has_zero_row_or_parabolic_minor(a):
    n = a.shape[0]
    for k in range(2, n + 1):
        for J in combinations(range(n), k):
            sub = a[np.ix_(J, J)]
            if np.any(np.all(np.abs(sub) < 1e-12, axis=1)):
                return True
            lam = np.linalg.eigvalsh(sub)[0]
            if abs(lam) < 1e-9:
                return True
    return False


def test_max_inner_product_strict_away_from_degenerate_minors():
    rng = np.random.default_rng(9)
    checked = 0
    while checked < 150:
        A = random_almost_negative(rng, int(rng.integers(2, 6)), plant_pair=0.0, plant_block=0.0)
        if has_zero_row_or_parabolic_minor(A.a):
            continue
        u = random_unit_u(rng, A.a)
        if u is None:
            continue
        S = tuple(int(k) for k in np.flatnonzero(u > 1e-12))
        if build_nerve(A).is_cell(S):
            continue
        _, val = max_inner_product_over_nerve(A, u)
        assert val > 1 + 1e-12
        checked += 1


def random_nerve(rng, max_n=5):
    while True:
        A = random_almost_negative(rng, int(rng.integers(2, max_n + 1)), plant_pair=0.2, plant_block=0.2)
        N = build_nerve(A)
        if len(N.maximal_cells) >= 2:
            return N


def test_metric_properties_on_random_nerves():
    rng = np.random.default_rng(10)
    for _ in range(25):
        N = random_nerve(rng)
        x, y, z = (random_point(rng, N) for _ in range(3))
        dxy = intrinsic_distance(N, x, y, 8)
        dyx = intrinsic_distance(N, y, x, 8)
        if math.isinf(dxy.distance):
            assert math.isinf(dyx.distance)
            continue
        assert abs(dxy.distance - dyx.distance) <= max(dxy.error_bound, dyx.error_bound) + 1e-12
        dxz, dzy = intrinsic_distance(N, x, z, 8), intrinsic_distance(N, z, y, 8)
        slack = 2 * max(dxy.error_bound, dxz.error_bound, dzy.error_bound) + 1e-12
        assert dxy.distance <= dxz.distance + dzy.distance + slack
        finer = intrinsic_distance(N, x, y, 16)
        assert finer.distance <= dxy.distance + 1e-12


def test_same_cell_distance_matches_simplex_distance():
    rng = np.random.default_rng(12)
    for _ in range(30):
        N = random_nerve(rng)
        M = N.maximal_cells[0]
        x, y = random_point(rng, N, M), random_point(rng, N, M)
        r = intrinsic_distance(N, x, y, 8)
        assert r.distance == pytest.approx(simplex_distance(N.gram, x, y), abs=r.error_bound + 1e-12)


def cone(rng, k):
    """A nerve in which vertex 0 is orthogonal to everything: its star is the whole complex."""
    while True:
        B = random_almost_negative(rng, k, plant_pair=0.3, plant_block=0.0).a
        a = np.zeros((k + 1, k + 1))
        a[0, 0] = 1.0
        a[1:, 1:] = B
        N = build_nerve(a)
        if len(N.maximal_cells) >= 2:
            return N


def test_suspension_never_longer_than_nerve_distance():
    rng = np.random.default_rng(13)
    for _ in range(20):
        N = cone(rng, int(rng.integers(2, 5)))
        L = link_complex(N, [0])
        p, q = random_point(rng, L), random_point(rng, L)
        # embed the link points into N on the equator of vertex 0
        x = NervePoint(tuple(L.origin[i] for i in p.cell), p.coeffs)
        y = NervePoint(tuple(L.origin[i] for i in q.cell), q.coeffs)
        d = intrinsic_distance(N, x, y, 8)
        ds = suspension_distance(L, p, q, 8)
        assert ds.distance <= d.distance + d.error_bound + 1e-12


def test_error_bound_shrinks_with_resolution():
    N = build_nerve(TWO_TRIANGLES)
    y = [0.0, 0.0, math.cos(0.7), math.sin(0.7)]
    coarse = intrinsic_distance(N, [1.0, 0, 0, 0], y, 8)
    fine = intrinsic_distance(N, [1.0, 0, 0, 0], y, 64)
    assert fine.distance <= coarse.distance + 1e-12
    assert fine.error_bound < coarse.error_bound
    assert fine.distance == pytest.approx(math.pi / 2 + 0.7, abs=fine.error_bound + 1e-9)


def test_verify_counterexamples_all_pass():
    results = verify_counterexamples()
    assert [r.passed for r in results] == [True, True, True]
    assert all(r.line().startswith("PASS  ") for r in results)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, math.pi / 2 - 0.05))
def test_two_triangle_distance_closed_form(phi):
    N = build_nerve(TWO_TRIANGLES)
    r = intrinsic_distance(N, [1.0, 0, 0, 0], [0.0, 0.0, math.cos(phi), math.sin(phi)], 16)
    assert r.distance == pytest.approx(math.pi / 2 + phi, abs=r.error_bound + 1e-9)
