"""Nerve complexes of almost negative matrices and their intrinsic metric.

The nerve ``N(A)`` has one spherical simplex for every index set ``I`` with
``A_I`` positive definite, with vertices ``e_i / sqrt(a_ii)`` and the metric
of the bilinear form ``A``.  Distances within one simplex are exact
(``arccos`` of the inner product).  Distances across simplices come from a
shortest path search over a graph whose nodes are grid samples on the faces
shared by maximal simplices.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import tolerance as tol
from .anm import AlmostNegativeMatrix, IndexSet, _is_pd, as_anm, complement, link
from .errors import InvalidMatrixError, NoCommonCellError

UNIT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class NerveComplex:
    """Cells of ``N(A)`` in (size, lexicographic) order, closed under subsets.

    ``origin[k]`` is the index that local vertex ``k`` had in the matrix the
    complex was first built from (links renumber their vertices).
    """

    gram: AlmostNegativeMatrix
    cells: tuple[IndexSet, ...]
    maximal_cells: tuple[IndexSet, ...]
    origin: IndexSet = ()
    _cellset: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_cellset", frozenset(self.cells))
        if not self.origin:
            object.__setattr__(self, "origin", tuple(range(self.gram.n)))

    @property
    def n(self) -> int:
        return self.gram.n

    def is_cell(self, I: Sequence[int]) -> bool:
        return tuple(sorted(I)) in self._cellset

    def vertex(self, i: int) -> "NervePoint":
        if not self.is_cell((i,)):
            raise InvalidMatrixError(f"{i + 1} is not a vertex of the nerve")
        return NervePoint((i,), (1.0 / math.sqrt(self.gram.a[i, i]),))

    def point(self, ambient: Sequence[float]) -> "NervePoint":
        """Convert ambient coordinates to a point; the support must span a cell."""
        x = np.asarray(ambient, dtype=float)
        if x.shape != (self.n,):
            raise InvalidMatrixError(f"expected {self.n} coordinates, got {x.shape}")
        t = tol.zero(self.gram.a)
        if np.any(x < -t):
            raise InvalidMatrixError("nerve points have non-negative coordinates")
        support = tuple(int(k) for k in np.flatnonzero(x > t))
        if not support:
            raise InvalidMatrixError("the zero vector is not a point of the nerve")
        if not self.is_cell(support):
            raise InvalidMatrixError(f"support {[k + 1 for k in support]} is not a cell of the nerve")
        p = NervePoint(support, tuple(float(x[k]) for k in support))
        _check_unit(self.gram.a, p)
        return p

    def dimension(self) -> int:
        return max((len(c) for c in self.cells), default=0) - 1


@dataclass(frozen=True)
class NervePoint:
    """A point of a nerve: non-negative coefficients on the vertices of ``cell``."""

    cell: IndexSet
    coeffs: tuple[float, ...]

    def __post_init__(self):
        cell = tuple(int(i) for i in self.cell)
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(cell) != len(coeffs):
            raise InvalidMatrixError("cell and coefficient lengths differ")
        if list(cell) != sorted(set(cell)):
            raise InvalidMatrixError("cell indices must be strictly increasing")
        if any(c < -UNIT_TOL for c in coeffs) or not any(c > 0 for c in coeffs):
            raise InvalidMatrixError("coefficients must be non-negative and not all zero")
        object.__setattr__(self, "cell", cell)
        object.__setattr__(self, "coeffs", coeffs)

    def ambient(self, n: int) -> np.ndarray:
        x = np.zeros(n)
        x[list(self.cell)] = self.coeffs
        return x

    def support(self, t_zero: float = 0.0) -> IndexSet:
        return tuple(i for i, c in zip(self.cell, self.coeffs) if c > t_zero)

    def to_json(self) -> dict:
        return {"cell": [i + 1 for i in self.cell], "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class GeodesicResult:
    distance: float
    path: tuple[NervePoint, ...]
    resolution: int
    error_bound: float

    def to_json(self) -> dict:
        return {
            "distance": self.distance if math.isfinite(self.distance) else "inf",
            "error_bound": self.error_bound,
            "resolution": self.resolution,
            "path": [p.to_json() for p in self.path],
        }


def _check_unit(a: np.ndarray, p: NervePoint) -> None:
    c = np.asarray(p.coeffs)
    sub = a[np.ix_(p.cell, p.cell)]
    norm2 = float(c @ sub @ c)
    if abs(norm2 - 1.0) > UNIT_TOL:
        raise InvalidMatrixError(f"point does not have unit norm (norm^2 = {norm2:.12g})")


def build_nerve(A) -> NerveComplex:
    """Enumerate all cells of ``N(A)`` level by level.

    A set is tested only when all its codimension-one faces are cells.
    """
    A = as_anm(A)
    tol.check_size(A.n)
    a = A.a
    t_pd = tol.pd(a)
    level = [(i,) for i in range(A.n) if a[i, i] > t_pd]
    cells: list[IndexSet] = []
    while level:
        cells.extend(level)
        current = set(level)
        nxt = []
        for I in level:
            for j in range(I[-1] + 1, A.n):
                J = I + (j,)
                if all(J[:k] + J[k + 1:] in current for k in range(len(J) - 1)) and _is_pd(a[np.ix_(J, J)], t_pd):
                    nxt.append(J)
        level = nxt
    cellset = set(cells)
    maximal = tuple(
        I for I in cells
        if not any(tuple(sorted(I + (j,))) in cellset for j in range(A.n) if j not in I)
    )
    return NerveComplex(A, tuple(cells), maximal)


def _inner(a: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    return float(x @ a @ y)


def _arccos(c: float) -> float:
    return math.acos(min(1.0, max(-1.0, c)))


def simplex_distance(A, p: NervePoint, q: NervePoint) -> float:
    """Spherical distance between two points lying in one common simplex."""
    A = as_anm(A)
    a = A.a
    t = tol.zero(a)
    union = tuple(sorted(set(p.support(t)) | set(q.support(t))))
    if not _is_pd(a[np.ix_(union, union)], tol.pd(a)):
        raise NoCommonCellError(f"no simplex contains both points (union {[i + 1 for i in union]})")
    return _arccos(_inner(a, p.ambient(A.n), q.ambient(A.n)))


def _compositions(total: int, parts: int) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    rows = []
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(total + parts - 2 - prev)
        rows.append(row)
    return np.array(rows, dtype=np.int64)


def _shared_faces(N: NerveComplex) -> list[IndexSet]:
    faces = set()
    for M1, M2 in combinations(N.maximal_cells, 2):
        F = tuple(sorted(set(M1) & set(M2)))
        if F:
            faces.add(F)
    return sorted(faces, key=lambda F: (len(F), F))


class _SampleGraph:
    """Grid samples on shared faces, grouped by the maximal cells containing them."""

    def __init__(self, N: NerveComplex, resolution: int):
        a = N.gram.a
        n = N.n
        self.a = a
        self.maximal = [set(M) for M in N.maximal_cells]
        coords: list[np.ndarray] = []
        supports: list[IndexSet] = []
        keys: dict[tuple, int] = {}
        self.spacing = 0.0
        for F in _shared_faces(N):
            verts = np.zeros((len(F), n))
            for k, i in enumerate(F):
                verts[k, i] = 1.0 / math.sqrt(a[i, i])
            if len(F) > 1:
                chord = max(
                    math.sqrt(max(0.0, 2.0 - 2.0 * _inner(a, verts[s], verts[t])))
                    for s, t in combinations(range(len(F)), 2)
                )
            else:
                chord = 0.0
            grid = _compositions(resolution, len(F))
            raw = (grid / resolution) @ verts
            norms = np.sqrt(np.einsum("ij,jk,ik->i", raw, a, raw))
            if len(F) > 1:
                # radial projection of a grid-rounding error onto the unit sphere
                h = math.pi * len(F) * chord / (4.0 * resolution * float(norms.min()))
                self.spacing = max(self.spacing, h)
            for g, x, nm in zip(grid, raw, norms):
                key = tuple((i, int(c)) for i, c in zip(F, g) if c)
                if key in keys:
                    continue
                keys[key] = len(coords)
                coords.append(x / nm)
                supports.append(tuple(i for i, c in key))
        self.coords = coords
        self.supports = supports

    def add(self, x: np.ndarray, support: IndexSet) -> int:
        self.coords.append(x)
        self.supports.append(support)
        return len(self.coords) - 1

    def finalize(self):
        X = np.array(self.coords).reshape(len(self.coords), self.a.shape[0])
        self.X = X
        self.XA = X @ self.a
        self.cells_of: list[list[int]] = []
        members: list[list[int]] = [[] for _ in self.maximal]
        for node, S in enumerate(self.supports):
            owners = [c for c, M in enumerate(self.maximal) if M.issuperset(S)]
            self.cells_of.append(owners)
            for c in owners:
                members[c].append(node)
        self.members = [np.array(m, dtype=np.int64) for m in members]

    def shortest_path(self, source: int, target: int) -> tuple[float, list[int]]:
        dist = np.full(len(self.coords), np.inf)
        prev = np.full(len(self.coords), -1, dtype=np.int64)
        done = np.zeros(len(self.coords), dtype=bool)
        dist[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            if u == target:
                break
            for c in self.cells_of[u]:
                nodes = self.members[c]
                step = np.arccos(np.clip(self.XA[nodes] @ self.X[u], -1.0, 1.0))
                cand = d + step
                better = (cand < dist[nodes]) & ~done[nodes]
                for v, dv in zip(nodes[better], cand[better]):
                    dist[v] = dv
                    prev[v] = u
                    heapq.heappush(heap, (float(dv), int(v)))
        if not math.isfinite(dist[target]):
            return math.inf, []
        path = [target]
        while path[-1] != source:
            path.append(int(prev[path[-1]]))
        return float(dist[target]), path[::-1]


def _as_point(N: NerveComplex, p) -> NervePoint:
    if isinstance(p, NervePoint):
        for i in p.cell:
            if not 0 <= i < N.n:
                raise InvalidMatrixError(f"vertex {i + 1} out of range")
        S = p.support(tol.zero(N.gram.a))
        if not N.is_cell(S):
            raise InvalidMatrixError(f"support {[i + 1 for i in S]} is not a cell of the nerve")
        _check_unit(N.gram.a, p)
        return p
    return N.point(p)


def _to_point(x: np.ndarray, t_zero: float) -> NervePoint:
    S = tuple(int(k) for k in np.flatnonzero(x > t_zero))
    return NervePoint(S, tuple(float(x[k]) for k in S))


def intrinsic_distance(N: NerveComplex, x, y, resolution: int = 256) -> GeodesicResult:
    """Length of the shortest sampled path from ``x`` to ``y`` in ``N``.

    ``x`` and ``y`` are :class:`NervePoint` objects or ambient coordinate
    vectors.  The result is an upper bound on the true intrinsic distance
    that decreases (weakly) as the resolution is refined; points in
    different components are at distance ``inf``.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    x, y = _as_point(N, x), _as_point(N, y)
    a = N.gram.a
    t = tol.zero(a)
    xa, ya = x.ambient(N.n), y.ambient(N.n)
    if np.allclose(xa, ya, rtol=0.0, atol=1e-15):
        return GeodesicResult(0.0, (x, y), resolution, 0.0)
    graph = _SampleGraph(N, resolution)
    s = graph.add(xa, x.support(t))
    g = graph.add(ya, y.support(t))
    graph.finalize()
    d, nodes = graph.shortest_path(s, g)
    if not nodes:
        return GeodesicResult(math.inf, (), resolution, 0.0)
    crossings = len(nodes) - 2
    path = tuple([x] + [_to_point(graph.X[k], t) for k in nodes[1:-1]] + [y])
    return GeodesicResult(d, path, resolution, 2.0 * crossings * graph.spacing)


def join_distance(t1: float, t2: float, base: float) -> float:
    """Distance in a spherical suspension between ``(t1, p)`` and ``(t2, q)`` with ``d(p, q) = base``."""
    c = math.cos(t1) * math.cos(t2) + math.sin(t1) * math.sin(t2) * math.cos(min(base, math.pi))
    return _arccos(c)


def suspension_distance(
    N: NerveComplex,
    x,
    y,
    resolution: int = 256,
    *,
    polar_x: float = math.pi / 2,
    polar_y: float = math.pi / 2,
) -> GeodesicResult:
    """Distance in the suspension of ``N`` between ``(polar_x, x)`` and ``(polar_y, y)``.

    Polar angles are measured from the north pole; the defaults place both
    points on the equator, where the suspension distance is
    ``min(d_N(x, y), pi)``.  A point at a pole may pass ``None`` as its base.
    """
    for t in (polar_x, polar_y):
        if not 0.0 <= t <= math.pi:
            raise ValueError(f"polar angle {t} outside [0, pi]")
    at_pole = [abs(math.sin(t)) < 1e-15 for t in (polar_x, polar_y)]
    if any(at_pole):
        return GeodesicResult(join_distance(polar_x, polar_y, 0.0), (), resolution, 0.0)
    base = intrinsic_distance(N, x, y, resolution)
    return GeodesicResult(join_distance(polar_x, polar_y, base.distance), base.path, resolution, base.error_bound)


def link_complex(N: NerveComplex, I: Sequence[int]) -> NerveComplex:
    """Nerve of the link matrix ``lk(I, gram)``; vertices renumbered over the complement of ``I``."""
    I = tuple(sorted(I))
    if not I:
        return N
    if not N.is_cell(I):
        raise InvalidMatrixError(f"{[i + 1 for i in I]} is not a cell of the nerve")
    L = build_nerve(link(N.gram, I))
    rest = complement(N.n, I)
    return NerveComplex(L.gram, L.cells, L.maximal_cells, tuple(N.origin[k] for k in rest))


def project_to_link(N: NerveComplex, v: int, x) -> tuple[float, NervePoint | None]:
    """Suspension coordinates of a point of the star of vertex ``v``.

    Returns the angle from ``v`` and the direction in ``link_complex(N, [v])``
    (``None`` when the point is ``v`` itself).
    """
    x = _as_point(N, x)
    a = N.gram.a
    t = tol.zero(a)
    S = tuple(sorted(set(x.support(t)) | {v}))
    if not N.is_cell(S):
        raise InvalidMatrixError("point is not in the closed star of the vertex")
    xa = x.ambient(N.n)
    vhat = np.zeros(N.n)
    vhat[v] = 1.0 / math.sqrt(a[v, v])
    c = _inner(a, xa, vhat)
    polar = _arccos(c)
    s = math.sin(polar)
    if s < 1e-12:
        return polar, None
    rest = complement(N.n, [v])
    coeffs = xa[list(rest)] / s
    local = tuple(k for k, i in enumerate(rest) if coeffs[k] > t)
    return polar, NervePoint(local, tuple(float(coeffs[k]) for k in local))


def max_inner_product_over_nerve(A, u: Sequence[float]) -> tuple[NervePoint, float]:
    """Maximise ``<u, z>_A`` over points ``z`` of ``N(A)``.

    ``u`` must have non-negative coordinates and unit ``A``-norm.  On each
    cell the candidate is the normalised ``A``-orthogonal projection of ``u``
    onto the span of the cell, kept when its coefficients are non-negative;
    vertices are always candidates.  Returns the best point and its value.
    """
    A = as_anm(A)
    a = A.a
    u = np.asarray(u, dtype=float)
    if u.shape != (A.n,):
        raise InvalidMatrixError(f"expected {A.n} coordinates, got {u.shape}")
    if np.any(u < -1e-12):
        raise InvalidMatrixError("u must have non-negative coordinates")
    if abs(float(u @ a @ u) - 1.0) > UNIT_TOL:
        raise InvalidMatrixError("u must have unit norm")
    N = build_nerve(A)
    if not N.cells:
        raise InvalidMatrixError("the nerve is empty")
    g = a @ u
    best_val, best = -math.inf, None
    for F in N.cells:
        sub = a[np.ix_(F, F)]
        if len(F) == 1:
            c = np.array([1.0 / math.sqrt(sub[0, 0])])
        else:
            c = np.linalg.solve(sub, g[list(F)])
            if np.any(c < -1e-12):
                continue
            c = np.clip(c, 0.0, None)
            norm2 = float(c @ sub @ c)
            if norm2 <= 1e-300:
                continue
            c = c / math.sqrt(norm2)
        val = float(g[list(F)] @ c)
        if val > best_val + 1e-14:
            best_val, best = val, (F, c)
    F, c = best
    t = tol.zero(a)
    keep = [k for k in range(len(F)) if c[k] > t]
    z = NervePoint(tuple(F[k] for k in keep), tuple(float(c[k]) for k in keep))
    return z, best_val


# -- reproduction of the three counterexample computations -------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    expected: float
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


ZERO_DIAGONAL = np.array([[1.0, 0.0], [0.0, 0.0]])
PATH_OF_TWO_EDGES = np.array([[1.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
TWO_TRIANGLES = np.array(
    [[1.0, 0.0, 0.0, -1.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [-1.0, 0.0, 0.0, 1.0]]
)
DISTANCE_TOL = 1e-3


def check_inner_product_bound() -> CheckResult:
    """``N([[1,0],[0,0]])`` is one point; ``u = (1,1)`` only reaches inner product 1."""
    z, value = max_inner_product_over_nerve(ZERO_DIAGONAL, [1.0, 1.0])
    ok = abs(value - 1.0) <= 1e-12 and np.allclose(z.ambient(2), [1.0, 0.0], atol=1e-12)
    return CheckResult(
        "maximal inner product over a one-point nerve",
        ok,
        value,
        1.0,
        f"max <u,z> = {value:.12g} at z = {z.ambient(2).tolist()} (strict > 1 fails)",
    )


def check_path_distance(phi: float = math.pi / 4, resolution: int = 512) -> CheckResult:
    """Two right-angled edges: ``d(v1, y)`` equals ``arccos<x,y>`` instead of staying below it.

    The path runs ``v1 -> v2 -> y``; the second arc has length ``pi/2 - phi``.
    """
    N = build_nerve(PATH_OF_TWO_EDGES)
    x = [1.0, 0.0, 0.0]
    y = [0.0, math.sin(phi), math.cos(phi)]
    d = intrinsic_distance(N, x, y, resolution).distance
    chord = _arccos(_inner(PATH_OF_TWO_EDGES, np.array(x), np.array(y)))
    expected = math.pi - phi
    ok = abs(d - expected) <= DISTANCE_TOL and abs(d - chord) <= DISTANCE_TOL
    return CheckResult(
        "intrinsic distance across two right-angled edges",
        ok,
        d,
        expected,
        f"d = {d:.6f}, arccos<x,y> = {chord:.6f}, expected {expected:.6f} (strict d < arccos fails)",
    )


def check_suspension_distance(phi: float = math.pi / 4, resolution: int = 512) -> CheckResult:
    """Two triangles on a common edge: suspension of the link at ``v2`` does not shorten ``d``."""
    N = build_nerve(TWO_TRIANGLES)
    x = [1.0, 0.0, 0.0, 0.0]
    y = [0.0, 0.0, math.cos(phi), math.sin(phi)]
    d = intrinsic_distance(N, x, y, resolution).distance
    v = 1
    L = link_complex(N, [v])
    tx, px = project_to_link(N, v, x)
    ty, py = project_to_link(N, v, y)
    ds = suspension_distance(L, px, py, resolution, polar_x=tx, polar_y=ty).distance
    expected = math.pi / 2 + phi
    ok = abs(d - expected) <= DISTANCE_TOL and abs(ds - expected) <= DISTANCE_TOL and abs(d - ds) <= DISTANCE_TOL
    return CheckResult(
        "suspension distance versus nerve distance",
        ok,
        ds,
        expected,
        f"d = {d:.6f}, d' = {ds:.6f}, expected {expected:.6f} (strict d' < d fails)",
    )


def verify_counterexamples(resolution: int = 512) -> list[CheckResult]:
    return [
        check_inner_product_bound(),
        check_path_distance(math.pi / 4, resolution),
        check_suspension_distance(math.pi / 4, resolution),
    ]
