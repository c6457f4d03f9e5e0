"""Almost negative matrices.

A symmetric real matrix whose off-diagonal entries are non-positive.  This
module covers principal submatrices, the positive definite / parabolic
classification, link matrices and the zero-row link scanner.

Indices are 0-based throughout; I/O layers translate to 1-based.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import tolerance as tol
from .errors import InvalidMatrixError, LinkUndefinedError, ParseError

IndexSet = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class AlmostNegativeMatrix:
    """Immutable wrapper around a symmetric matrix with non-positive off-diagonal."""

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidMatrixError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidMatrixError("matrix entries must be finite")
        if a.size:
            asym = float(np.abs(a - a.T).max())
            if asym > tol.SYM_TOL:
                raise InvalidMatrixError(f"matrix is not symmetric (max deviation {asym:.3g})")
            a = (a + a.T) / 2
            off = a - np.diag(np.diag(a))
            if off.max() > tol.zero(a):
                i, j = np.unravel_index(int(np.argmax(off)), off.shape)
                raise InvalidMatrixError(
                    f"off-diagonal entry ({i + 1},{j + 1}) = {a[i, j]:.6g} is positive"
                )
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.a, dtype=dtype)

    def __repr__(self) -> str:
        return f"AlmostNegativeMatrix({self.a.tolist()!r})"

    def to_json(self) -> dict:
        return {"n": self.n, "a": self.a.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "AlmostNegativeMatrix":
        try:
            n = data["n"]
            rows = data["a"]
        except (KeyError, TypeError):
            raise ParseError('matrix JSON needs keys "n" and "a"') from None
        if not isinstance(n, int) or n < 0 or len(rows) != n or any(len(r) != n for r in rows):
            raise ParseError("matrix JSON: 'a' must be an n x n list of rows")
        return cls(np.array(rows, dtype=float).reshape(n, n))


class MatrixClass(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    PARABOLIC = "Parabolic"
    DEGENERATE_NON_PARABOLIC = "DegenerateNonParabolic"
    INDEFINITE = "Indefinite"

    def __str__(self) -> str:
        return self.value


def as_anm(A) -> AlmostNegativeMatrix:
    if isinstance(A, AlmostNegativeMatrix):
        return A
    return AlmostNegativeMatrix(A)


def complement(n: int, I: Iterable[int]) -> IndexSet:
    s = set(I)
    return tuple(k for k in range(n) if k not in s)


def _check_index_set(n: int, J: Sequence[int]) -> IndexSet:
    J = tuple(int(j) for j in J)
    if len(set(J)) != len(J):
        raise InvalidMatrixError(f"index set {J} has duplicates")
    for j in J:
        if not 0 <= j < n:
            raise InvalidMatrixError(f"index {j} out of range for order {n}")
    return J


def principal_submatrix(A, J: Sequence[int]) -> AlmostNegativeMatrix:
    """Restrict ``A`` to the rows and columns in ``J`` (order preserved)."""
    A = as_anm(A)
    J = _check_index_set(A.n, J)
    if not J:
        raise InvalidMatrixError("principal submatrix needs a non-empty index set")
    return AlmostNegativeMatrix(A.a[np.ix_(J, J)])


def _is_pd(a: np.ndarray, threshold: float) -> bool:
    # symmetric Gaussian elimination; every pivot must clear the threshold
    m = np.array(a, dtype=float)
    for k in range(m.shape[0]):
        p = m[k, k]
        if p <= threshold:
            return False
        r = m[k, k + 1:]
        m[k + 1:, k + 1:] -= np.outer(r, r) / p
    return True


def _classify(a: np.ndarray, t_pd: float, t_det: float) -> MatrixClass:
    n = a.shape[0]
    if n == 0:
        return MatrixClass.POSITIVE_DEFINITE
    if n == 1:
        x = a[0, 0]
        if x > t_pd:
            return MatrixClass.POSITIVE_DEFINITE
        if x >= -t_pd:
            return MatrixClass.DEGENERATE_NON_PARABOLIC
        return MatrixClass.INDEFINITE
    if _is_pd(a, t_pd):
        return MatrixClass.POSITIVE_DEFINITE
    if np.linalg.eigvalsh(a)[0] < -t_pd:
        return MatrixClass.INDEFINITE
    if abs(np.linalg.det(a)) <= t_det:
        # PSD and singular; parabolic iff every order n-1 principal submatrix is PD,
        # which covers all proper ones
        keep = np.ones(n, dtype=bool)
        for k in range(n):
            keep[k] = False
            if not _is_pd(a[np.ix_(keep, keep)], t_pd):
                return MatrixClass.DEGENERATE_NON_PARABOLIC
            keep[k] = True
        return MatrixClass.PARABOLIC
    return MatrixClass.DEGENERATE_NON_PARABOLIC


def classify(A) -> MatrixClass:
    """Classify ``A`` as positive definite, parabolic, degenerate or indefinite.

    Order-1 matrices are never parabolic: ``[[0]]`` is degenerate.
    """
    a = as_anm(A).a
    return _classify(a, tol.pd(a), tol.det(a))


def is_positive_definite(A) -> bool:
    a = as_anm(A).a
    return _is_pd(a, tol.pd(a))


def _link_single_raw(c: np.ndarray, i: int) -> np.ndarray:
    r = c[i]
    d = c - np.outer(r, r) / c[i, i]
    keep = np.arange(c.shape[0]) != i
    return d[np.ix_(keep, keep)]


def link_single(C, i: int) -> AlmostNegativeMatrix:
    """Link of ``C`` with respect to the single index ``i``.

    Entry ``(j, k)`` of the result is ``c_jk - c_ij * c_ik / c_ii`` for
    ``j, k != i``, in the original index order.
    """
    C = as_anm(C)
    (i,) = _check_index_set(C.n, [i])
    if C.a[i, i] <= tol.pd(C.a):
        raise LinkUndefinedError(f"diagonal entry {i + 1} is {C.a[i, i]:.6g}; link needs it positive")
    return AlmostNegativeMatrix(_link_single_raw(C.a, i))


def link(A, I: Sequence[int]) -> AlmostNegativeMatrix:
    """Link matrix ``lk(I, A)``, indexed by the complement of ``I`` in ascending order.

    Computed by peeling off the indices of ``I`` in ascending order.
    """
    A = as_anm(A)
    I = tuple(sorted(_check_index_set(A.n, I)))
    if not I:
        return A
    if not _is_pd(A.a[np.ix_(I, I)], tol.pd(A.a)):
        raise LinkUndefinedError(f"principal submatrix on {[i + 1 for i in I]} is not positive definite")
    m = A.a
    idx = list(range(A.n))
    for i in I:
        pos = idx.index(i)
        m = _link_single_raw(m, pos)
        idx.pop(pos)
    return AlmostNegativeMatrix(m)


def normalize(A) -> AlmostNegativeMatrix:
    """Scale to unit diagonal by ``D A D``; rows with non-positive diagonal stay unscaled."""
    A = as_anm(A)
    a = A.a
    diag = np.diag(a)
    d = np.ones(A.n)
    pos = diag > tol.pd(a)
    d[pos] = 1.0 / np.sqrt(diag[pos])
    b = d[:, None] * a * d[None, :]
    b[pos, pos] = 1.0
    return AlmostNegativeMatrix((b + b.T) / 2)


def _components(a: np.ndarray, t_zero: float) -> list[IndexSet]:
    n = a.shape[0]
    adj = np.abs(a) > t_zero
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in np.flatnonzero(adj[u]):
                if v != u and not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        comps.append(tuple(sorted(comp)))
    return comps


def components(A) -> list[IndexSet]:
    """Connected components of the non-zero pattern of ``A``, sorted by smallest index."""
    a = as_anm(A).a
    return _components(a, tol.zero(a))


def reducibility(A) -> tuple[IndexSet, IndexSet] | None:
    """Split ``A`` into two blocks with no coupling, or return ``None``.

    The first part is the component containing index 0, the second the rest.
    """
    A = as_anm(A)
    if A.n < 2:
        raise InvalidMatrixError("reducibility needs order >= 2")
    comps = components(A)
    if len(comps) == 1:
        return None
    first = comps[0]
    return first, complement(A.n, first)


def _pd_subsets_with_links(a: np.ndarray, t_pd: float) -> Iterator[tuple[IndexSet, IndexSet, np.ndarray]]:
    """Yield ``(I, rest, lk(I, a))`` for every non-empty ``I`` with ``a_I`` positive definite.

    ``I`` grows by appending indices above its maximum; positive definiteness
    of ``I + (j,)`` is read off the diagonal of ``lk(I, a)`` (Schur pivot).
    """
    n = a.shape[0]
    stack: list[tuple[IndexSet, IndexSet, np.ndarray]] = [((), tuple(range(n)), a)]
    while stack:
        I, rest, m = stack.pop()
        if I:
            yield I, rest, m
        start = I[-1] + 1 if I else 0
        for j in range(n - 1, start - 1, -1):
            pos = rest.index(j)
            if m[pos, pos] > t_pd:
                stack.append((I + (j,), rest[:pos] + rest[pos + 1:], _link_single_raw(m, pos)))


def scan_zero_row_links(A) -> list[tuple[IndexSet, int]]:
    """All ``(I, r)`` such that row ``r`` of ``lk(I, A)`` vanishes.

    ``I`` ranges over non-empty proper index sets with ``A_I`` positive
    definite; ``r`` is reported in the original indexing.  Output is sorted.
    """
    A = as_anm(A)
    a = A.a
    t_zero, t_pd = tol.zero(a), tol.pd(a)
    hits = []
    for I, rest, m in _pd_subsets_with_links(a, t_pd):
        if not rest:
            continue
        for pos in np.flatnonzero(np.all(np.abs(m) <= t_zero, axis=1)):
            hits.append((I, rest[int(pos)]))
    hits.sort()
    return hits


class LemmaBConclusion(enum.Enum):
    PARABOLIC = "Parabolic"
    REDUCIBLE = "Reducible"
    NO_ZERO_ROW_LINK = "NoZeroRowLinkFound"
    VIOLATION = "LEMMA VIOLATION"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class LemmaBReport:
    witnesses: tuple[tuple[IndexSet, int], ...]
    conclusion: LemmaBConclusion
    split: tuple[IndexSet, IndexSet] | None = None

    @property
    def violation(self) -> bool:
        return self.conclusion is LemmaBConclusion.VIOLATION


def check_lemma_b(A) -> LemmaBReport:
    """Check that a zero row in some link forces ``A`` to be parabolic or reducible.

    A ``VIOLATION`` conclusion would mean the splitting lemma failed on this
    input; it is never expected and exists as a test oracle.
    """
    A = as_anm(A)
    witnesses = tuple(scan_zero_row_links(A))
    if not witnesses:
        return LemmaBReport(witnesses, LemmaBConclusion.NO_ZERO_ROW_LINK)
    if classify(A) is MatrixClass.PARABOLIC:
        return LemmaBReport(witnesses, LemmaBConclusion.PARABOLIC)
    split = reducibility(A) if A.n >= 2 else None
    if split is not None:
        return LemmaBReport(witnesses, LemmaBConclusion.REDUCIBLE, split)
    return LemmaBReport(witnesses, LemmaBConclusion.VIOLATION)


# -- text I/O ---------------------------------------------------------------

def _strip_comments(text: str) -> list[str]:
    lines = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def parse_matrix(text: str) -> AlmostNegativeMatrix:
    """Parse a matrix from JSON ``{"n", "a"}`` or the plain row format.

    Plain format: first line ``n``, then ``n`` rows of ``n`` real numbers.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return AlmostNegativeMatrix.from_json(data)
    lines = _strip_comments(text)
    if not lines:
        raise ParseError("empty input")
    head = lines[0].split()
    if len(head) != 1:
        raise ParseError(f"first line must hold the order only, got {lines[0]!r}")
    try:
        n = int(head[0])
    except ValueError:
        raise ParseError(f"order must be an integer, got {head[0]!r}") from None
    if n < 0:
        raise ParseError("order must be non-negative")
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for k, line in enumerate(lines[1:], start=1):
        toks = line.split()
        if len(toks) != n:
            raise ParseError(f"row {k} has {len(toks)} entries, expected {n}")
        try:
            rows.append([float(t) for t in toks])
        except ValueError:
            raise ParseError(f"row {k} contains a non-numeric entry: {line!r}") from None
    return AlmostNegativeMatrix(np.array(rows, dtype=float).reshape(n, n))


def format_entry(x: float, t_zero: float) -> str:
    if abs(x) <= t_zero:
        return "0"
    return format(x, ".6g")


def format_matrix(A) -> str:
    """Render with 6 significant digits; entries within the zero tolerance print as ``0``."""
    a = as_anm(A).a
    if a.shape[0] == 0:
        return "[]"
    t = tol.zero(a)
    rows = ["[" + ", ".join(format_entry(x, t) for x in row) + "]" for row in a]
    return "[" + ",\n ".join(rows) + "]"
