import json
from itertools import combinations

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from coxhyp import tolerance as tol
from coxhyp.anm import (
    AlmostNegativeMatrix,
    LemmaBConclusion,
    MatrixClass,
    check_lemma_b,
    classify,
    format_matrix,
    link,
    link_single,
    normalize,
    parse_matrix,
    principal_submatrix,
    reducibility,
    scan_zero_row_links,
)
from coxhyp.errors import InvalidMatrixError, LinkUndefinedError, ParseError
from coxhyp.sampling import random_almost_negative

from oracles import eig_parabolic, eig_pd, link_by_projection, min_eig

PATH = np.array([[1.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
BLOCKS = np.array([[1.0, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0], [-1, 0, 0, 1]])
TRIANGLE = np.array([[1.0, -0.5, -0.5], [-0.5, 1.0, -0.5], [-0.5, -0.5, 1.0]])


@st.composite
def anm(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    off = draw(arrays(float, (n, n), elements=st.one_of(st.just(0.0), st.floats(-1.2, 0.0))))
    a = np.triu(off, 1)
    a = a + a.T
    np.fill_diagonal(a, 1.0)
    return AlmostNegativeMatrix(a)


def test_rejects_positive_off_diagonal_and_asymmetry():
    with pytest.raises(InvalidMatrixError):
        AlmostNegativeMatrix([[1, 0.1], [0.1, 1]])
    with pytest.raises(InvalidMatrixError):
        AlmostNegativeMatrix([[1, -0.1], [-0.2, 1]])
    with pytest.raises(InvalidMatrixError):
        AlmostNegativeMatrix([[1, 0, 0]])


def test_matrix_is_read_only():
    A = AlmostNegativeMatrix(PATH)
    with pytest.raises(ValueError):
        A.a[0, 0] = 2.0


def test_principal_submatrix_examples():
    assert np.array_equal(principal_submatrix(PATH, (0, 2)).a, [[1, -1], [-1, 1]])
    assert np.array_equal(principal_submatrix(PATH, (0, 1, 2)).a, PATH)
    assert np.array_equal(principal_submatrix(PATH, (1,)).a, [[1.0]])
    for bad in [(), (3,), (0, 0)]:
        with pytest.raises(InvalidMatrixError):
            principal_submatrix(PATH, bad)


@pytest.mark.parametrize(
    "a, expected",
    [
        ([[1, -1], [-1, 1]], MatrixClass.PARABOLIC),
        ([[1, -0.5], [-0.5, 1]], MatrixClass.POSITIVE_DEFINITE),
        ([[1, 0], [0, 0]], MatrixClass.DEGENERATE_NON_PARABOLIC),
        (TRIANGLE, MatrixClass.PARABOLIC),
        ([[1, -2], [-2, 1]], MatrixClass.INDEFINITE),
        ([[0.0]], MatrixClass.DEGENERATE_NON_PARABOLIC),
        ([[2.0]], MatrixClass.POSITIVE_DEFINITE),
        ([[-1.0]], MatrixClass.INDEFINITE),
        (np.zeros((0, 0)), MatrixClass.POSITIVE_DEFINITE),
        (BLOCKS, MatrixClass.DEGENERATE_NON_PARABOLIC),
    ],
)
def test_classify_examples(a, expected):
    assert classify(a) is expected


def test_class_names():
    assert [str(c) for c in MatrixClass] == ["PositiveDefinite", "Parabolic", "DegenerateNonParabolic", "Indefinite"]


@settings(max_examples=200)
@given(anm())
def test_classify_agrees_with_eigenvalue_oracle(A):
    a = A.a
    lam = min_eig(a)
    assume(abs(lam) > 1e-6 or abs(lam) < 1e-13)
    cls = classify(A)
    if lam > 1e-6:
        assert cls is MatrixClass.POSITIVE_DEFINITE
    elif lam < -1e-6:
        assert cls is MatrixClass.INDEFINITE
    else:
        assert cls is (MatrixClass.PARABOLIC if eig_parabolic(a) else MatrixClass.DEGENERATE_NON_PARABOLIC)


@settings(max_examples=100)
@given(anm(min_n=2))
def test_classify_invariant_under_normalize(A):
    D = np.diag(np.linspace(0.5, 3.0, A.n))
    scaled = AlmostNegativeMatrix(D @ A.a @ D)
    assume(abs(min_eig(A.a)) > 1e-6)
    assert classify(normalize(scaled)) is classify(A)


@settings(max_examples=100)
@given(anm(min_n=2))
def test_principal_submatrices_of_pd_are_pd(A):
    assume(classify(A) is MatrixClass.POSITIVE_DEFINITE)
    for k in range(1, A.n):
        for J in combinations(range(A.n), k):
            assert classify(principal_submatrix(A, J)) is MatrixClass.POSITIVE_DEFINITE


def test_link_single_examples():
    assert np.array_equal(link_single(np.diag([1.0, 2.0, 3.0]), 1).a, np.diag([1.0, 3.0]))
    C = [[1, 0, 0], [0, 1, -1], [0, -1, 1]]
    assert np.array_equal(link_single(C, 0).a, [[1, -1], [-1, 1]])
    with pytest.raises(LinkUndefinedError):
        link_single([[1, 0], [0, 0]], 1)


def test_link_single_closed_form():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a12, a13, a23 = rng.uniform(-1.2, 0, 3)
        C = np.array([[1, a12, a13], [a12, 1, a23], [a13, a23, 1]])
        expected = [[1 - a12**2, a23 - a12 * a13], [a23 - a12 * a13, 1 - a13**2]]
        assert np.allclose(link_single(C, 0).a, expected, atol=1e-12, rtol=0)


def test_link_examples():
    assert np.array_equal(link(BLOCKS, (0, 1)).a, [[1, 0], [0, 0]])
    assert np.array_equal(link(BLOCKS, ()).a, BLOCKS)
    with pytest.raises(LinkUndefinedError):
        link(PATH, (0, 2))


@settings(max_examples=150)
@given(anm(min_n=2), st.data())
def test_link_matches_projection_and_any_peeling_order(A, data):
    n = A.n
    I = tuple(sorted(data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))))
    assume(min_eig(A.a[np.ix_(I, I)]) > 1e-3)
    L = link(A, I)
    assert np.allclose(L.a, link_by_projection(A.a, I), atol=1e-9)
    # peel the last index of I first instead of the first
    i = I[-1]
    rest = tuple(k for k in range(n) if k != i)
    first = link_single(A, i)
    J = tuple(rest.index(k) for k in I[:-1])
    again = link(first, J) if J else first
    assert np.allclose(L.a, again.a, atol=1e-9)
    off = L.a[~np.eye(L.n, dtype=bool)]
    assert np.all(off <= tol.zero(L.a))


def test_normalize_examples():
    assert np.allclose(normalize([[4, -2], [-2, 1]]).a, [[1, -1], [-1, 1]])
    assert np.array_equal(normalize(TRIANGLE).a, TRIANGLE)
    assert np.array_equal(normalize([[1, 0], [0, 0]]).a, [[1, 0], [0, 0]])


def test_reducibility_examples():
    assert reducibility(np.eye(2)) == ((0,), (1,))
    assert reducibility([[1, -1], [-1, 1]]) is None
    assert reducibility(BLOCKS) == ((0, 3), (1, 2))
    with pytest.raises(InvalidMatrixError):
        reducibility([[1.0]])


def test_scan_examples():
    assert ((0, 1), 3) in scan_zero_row_links(BLOCKS)
    assert scan_zero_row_links([[1, -0.3], [-0.3, 1]]) == []
    assert scan_zero_row_links(np.diag([1.0, 2.0, 0.5])) == []
    # the empty index set is not scanned, so a single zero entry is no witness
    assert scan_zero_row_links([[0.0]]) == []


def brute_scan(a):
    n = a.shape[0]
    hits = []
    for k in range(1, n):
        for I in combinations(range(n), k):
            if not eig_pd(a[np.ix_(I, I)]):
                continue
            L = link_by_projection(a, I)
            rest = [j for j in range(n) if j not in I]
            for pos, r in enumerate(rest):
                if np.all(np.abs(L[pos]) <= 1e-9 * max(1.0, np.abs(a).sum(1).max())):
                    hits.append((I, r))
    return sorted(hits)


def test_scan_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(300):
        A = random_almost_negative(rng, int(rng.integers(2, 7)))
        assert scan_zero_row_links(A) == brute_scan(A.a)


def test_scan_output_is_sorted():
    assert scan_zero_row_links(BLOCKS) == sorted(scan_zero_row_links(BLOCKS))


def test_split_check_examples():
    r = check_lemma_b(PATH)
    assert r.witnesses and r.conclusion is LemmaBConclusion.REDUCIBLE
    assert r.split == ((0, 2), (1,))
    r = check_lemma_b([[1, -1], [-1, 1]])
    assert r.witnesses == (((0,), 1), ((1,), 0))
    assert r.conclusion is LemmaBConclusion.PARABOLIC
    assert check_lemma_b(TRIANGLE + 0.1 * np.eye(3)).conclusion is LemmaBConclusion.NO_ZERO_ROW_LINK


def test_zero_row_links_force_parabolic_or_reducible():
    rng = np.random.default_rng(3)
    seen = 0
    for _ in range(1500):
        A = random_almost_negative(rng, int(rng.integers(2, 7)))
        r = check_lemma_b(A)
        assert not r.violation
        if r.witnesses:
            seen += 1
            assert r.conclusion is not LemmaBConclusion.NO_ZERO_ROW_LINK
    assert seen > 500


def test_parabolic_link_propagates():
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(3000):
        n = int(rng.integers(3, 7))
        A = random_almost_negative(rng, n, plant_pair=0.1, plant_block=0.6)
        if A.a[0, 0] <= 0 or reducibility(A) is not None:
            continue
        L = link_single(A, 0)
        if classify(L) is MatrixClass.PARABOLIC and reducibility(L) is None:
            hits += 1
            assert classify(A) is MatrixClass.PARABOLIC
    assert hits >= 20


def test_parabolic_link_propagates_on_planted_case():
    # the (3,3,3) cosine matrix has link [[3/4, -3/4], [-3/4, 3/4]] at the first vertex
    L = link_single(TRIANGLE, 0)
    assert classify(L) is MatrixClass.PARABOLIC and reducibility(L) is None
    assert classify(TRIANGLE) is MatrixClass.PARABOLIC


def test_parse_matrix_formats():
    A = parse_matrix("# comment\n2\n1 -0.5\n-0.5 1\n")
    assert np.array_equal(A.a, [[1, -0.5], [-0.5, 1]])
    B = parse_matrix(json.dumps({"n": 2, "a": [[1, 0], [0, 0]], "index": [3, 4]}))
    assert np.array_equal(B.a, [[1, 0], [0, 0]])
    for bad in ["2\n1 0\n0 1\n0 0", "2\n1 0", "x", "2\n1 0.5\n0.5 1"]:
        with pytest.raises((ParseError, InvalidMatrixError)):
            parse_matrix(bad)


def test_format_matrix():
    assert format_matrix(link(BLOCKS, (0, 1))) == "[[1, 0],\n [0, 0]]"
    assert format_matrix([[1, -1 / 3], [-1 / 3, 1e-12]]) == "[[1, -0.333333],\n [-0.333333, 0]]"


def test_json_round_trip():
    A = AlmostNegativeMatrix(TRIANGLE)
    assert np.array_equal(AlmostNegativeMatrix.from_json(json.loads(json.dumps(A.to_json()))).a, A.a)


def test_relative_tolerance_override():
    nearly = np.array([[1.0, -1.0 + 1e-7], [-1.0 + 1e-7, 1.0]])
    assert classify(nearly) is MatrixClass.POSITIVE_DEFINITE
    with tol.relative_tolerance(1e-5):
        assert classify(nearly) is MatrixClass.PARABOLIC
