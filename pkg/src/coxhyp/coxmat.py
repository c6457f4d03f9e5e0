"""Coxeter systems given by their order matrices."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .anm import AlmostNegativeMatrix, IndexSet, MatrixClass, classify, components
from .errors import InvalidMatrixError, ParseError


class _Infinity:
    """Sentinel for an infinite order ``m_ij`` (no relation between the generators)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def _coerce_order(x) -> int | _Infinity:
    if x is INF:
        return INF
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        try:
            return int(x)
        except ValueError:
            raise InvalidMatrixError(f"not an order: {x!r}") from None
    if isinstance(x, float):
        if math.isinf(x) and x > 0:
            return INF
        if not x.is_integer():
            raise InvalidMatrixError(f"orders must be integers, got {x}")
        return int(x)
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    raise InvalidMatrixError(f"not an order: {x!r}")


@dataclass(frozen=True)
class CoxeterSystem:
    """Generators ``0..n-1`` with the symmetric order matrix ``m``.

    ``m[i][i] == 1`` and ``m[i][j]`` is an integer ``>= 2`` or :data:`INF`.
    """

    m: tuple[tuple, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        m = tuple(tuple(_coerce_order(x) for x in row) for row in self.m)
        n = len(m)
        for i, row in enumerate(m):
            if len(row) != n:
                raise InvalidMatrixError(f"row {i + 1} has {len(row)} entries, expected {n}")
        for i in range(n):
            if m[i][i] != 1:
                raise InvalidMatrixError(f"diagonal entry ({i + 1},{i + 1}) must be 1, got {m[i][i]}")
            for j in range(i + 1, n):
                a, b = m[i][j], m[j][i]
                if a != b:
                    raise InvalidMatrixError(f"order matrix is not symmetric at ({i + 1},{j + 1})")
                if a is not INF and a < 2:
                    raise InvalidMatrixError(f"off-diagonal order ({i + 1},{j + 1}) must be >= 2, got {a}")
        object.__setattr__(self, "m", m)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != n or len(set(labels)) != n:
                raise InvalidMatrixError("labels must be n distinct names")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.m)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else f"s{i + 1}"

    def format_subset(self, T: Iterable[int]) -> str:
        return "{" + ",".join(self.label(i) for i in T) + "}"

    def subsystem(self, T: Sequence[int]) -> "CoxeterSystem":
        T = tuple(T)
        labels = tuple(self.label(i) for i in T)
        return CoxeterSystem(tuple(tuple(self.m[i][j] for j in T) for i in T), labels)

    def relabel(self, perm: Sequence[int]) -> "CoxeterSystem":
        """System whose generator ``k`` is this system's generator ``perm[k]``."""
        return self.subsystem(perm)

    def to_json(self) -> dict:
        data = {"n": self.n, "m": [[("inf" if x is INF else x) for x in row] for row in self.m]}
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CoxeterSystem":
        if not isinstance(data, dict) or "n" not in data or "m" not in data:
            raise ParseError('Coxeter JSON needs keys "n" and "m"')
        extra = set(data) - {"n", "m", "labels"}
        if extra:
            raise ParseError(f"unexpected keys in Coxeter JSON: {sorted(extra)}")
        n, rows = data["n"], data["m"]
        if not isinstance(n, int) or n < 0 or not isinstance(rows, list) or len(rows) != n:
            raise ParseError("Coxeter JSON: 'm' must be an n x n list of rows")
        for r in rows:
            if not isinstance(r, list) or len(r) != n:
                raise ParseError("Coxeter JSON: 'm' must be an n x n list of rows")
            for x in r:
                if isinstance(x, str) and x != "inf":
                    raise ParseError(f'Coxeter JSON: only the string "inf" is allowed, got {x!r}')
        return cls(tuple(tuple(r) for r in rows), data.get("labels"))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, object]], labels=None) -> "CoxeterSystem":
        """Build from 0-based ``(i, j, m)`` triples; unlisted pairs commute (``m = 2``)."""
        m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
        seen = {}
        for i, j, order in edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise InvalidMatrixError(f"bad edge ({i + 1},{j + 1}) for {n} generators")
            order = _coerce_order(order)
            key = (min(i, j), max(i, j))
            if key in seen and seen[key] != order:
                raise InvalidMatrixError(f"conflicting orders for pair ({i + 1},{j + 1})")
            seen[key] = order
            m[i][j] = m[j][i] = order
        return cls(tuple(tuple(r) for r in m), labels)


def _parse_order_token(tok: str) -> int | _Infinity:
    if tok.lower() == "inf":
        return INF
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad order token {tok!r} (expected an integer or 'inf')") from None


def _parse_int(tok: str, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}") from None


def _lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def parse_coxeter_system(text: str) -> CoxeterSystem:
    """Parse matrix form, edge-list form (``"n; i j m; ..."``, 1-based) or JSON."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        try:
            return CoxeterSystem.from_json(data)
        except InvalidMatrixError as exc:
            raise ParseError(str(exc)) from None
    body = " ".join(_lines(text))
    if not body:
        raise ParseError("empty input")
    try:
        if ";" in body:
            return _parse_edge_list(body)
        return _parse_matrix_form(_lines(text))
    except InvalidMatrixError as exc:
        raise ParseError(str(exc)) from None


def _parse_edge_list(body: str) -> CoxeterSystem:
    parts = [p.strip() for p in body.split(";")]
    head = parts[0].split()
    if len(head) != 1:
        raise ParseError(f"edge list must start with the generator count, got {parts[0]!r}")
    n = _parse_int(head[0], "generator count")
    if n < 0:
        raise ParseError("generator count must be non-negative")
    edges = []
    for p in parts[1:]:
        toks = p.split()
        if len(toks) != 3:
            raise ParseError(f"edge entries are 'i j m' triples, got {p!r}")
        i = _parse_int(toks[0], "generator index")
        j = _parse_int(toks[1], "generator index")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"generator index out of range in {p!r}")
        edges.append((i - 1, j - 1, _parse_order_token(toks[2])))
    return CoxeterSystem.from_edges(n, edges)


def _parse_matrix_form(lines: list[str]) -> CoxeterSystem:
    head = lines[0].split()
    if len(head) != 1:
        raise ParseError(f"first line must hold the generator count only, got {lines[0]!r}")
    n = _parse_int(head[0], "generator count")
    if n < 0:
        raise ParseError("generator count must be non-negative")
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for k, line in enumerate(lines[1:], start=1):
        toks = line.split()
        if len(toks) != n:
            raise ParseError(f"row {k} has {len(toks)} entries, expected {n}")
        rows.append(tuple(_parse_order_token(t) for t in toks))
    return CoxeterSystem(tuple(rows))


def _cosine(order) -> float:
    if order is INF:
        return -1.0
    if order == 1:
        return 1.0
    if order == 2:
        return 0.0
    if order == 3:
        return -0.5
    return -math.cos(math.pi / order)


def cosine_matrix(sys: CoxeterSystem) -> AlmostNegativeMatrix:
    """Entries ``-cos(pi / m_ij)``, ``-1`` for infinite orders, unit diagonal."""
    n = sys.n
    a = np.array([[_cosine(sys.m[i][j]) for j in range(n)] for i in range(n)], dtype=float)
    return AlmostNegativeMatrix(a.reshape(n, n))


def diagram_adjacent(sys: CoxeterSystem, i: int, j: int) -> bool:
    x = sys.m[i][j]
    return i != j and (x is INF or x >= 3)


def irreducible_components(sys: CoxeterSystem) -> list[IndexSet]:
    return components(cosine_matrix(sys))


def _check_subset(sys: CoxeterSystem, T: Iterable[int]) -> IndexSet:
    T = tuple(sorted(set(int(t) for t in T)))
    for t in T:
        if not 0 <= t < sys.n:
            raise InvalidMatrixError(f"generator index {t} out of range for {sys.n} generators")
    return T


def is_finite(sys: CoxeterSystem, T: Iterable[int] | None = None) -> bool:
    """Whether ``W_T`` is finite, i.e. its cosine matrix is positive definite."""
    T = tuple(range(sys.n)) if T is None else _check_subset(sys, T)
    if not T:
        return True
    a = cosine_matrix(sys).a[np.ix_(T, T)]
    return classify(a) is MatrixClass.POSITIVE_DEFINITE


def is_affine(sys: CoxeterSystem, T: Iterable[int] | None = None) -> bool:
    """Whether ``(W_T, T)`` is irreducible with parabolic cosine matrix."""
    T = tuple(range(sys.n)) if T is None else _check_subset(sys, T)
    if len(T) < 2:
        raise InvalidMatrixError("affineness needs at least two generators")
    sub = cosine_matrix(sys).a[np.ix_(T, T)]
    if len(components(sub)) != 1:
        return False
    return classify(sub) is MatrixClass.PARABOLIC
