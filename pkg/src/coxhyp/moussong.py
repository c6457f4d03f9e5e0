"""Moussong-metric chamber and Davis complex cell poset for finite Coxeter systems."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .anm import IndexSet, is_positive_definite
from .coxmat import CoxeterSystem, cosine_matrix
from .errors import InvalidMatrixError, SizeGuardError

KEY_GRID = 1e-6
DEFAULT_MAX_ORDER = 10_000


@dataclass(frozen=True, eq=False)
class Chamber:
    """Fundamental chamber of the Moussong metric in the coordinates of ``R^n``.

    ``dual_basis[j]`` is ``u_j`` with ``A u_j = e_j``; ``vertices[T]`` is the
    ``A``-orthogonal projection ``q_T`` of the apex onto ``span(u_i : i in T)``
    and ``coefficients[T]`` its coordinates in that basis.
    """

    gram: np.ndarray
    dual_basis: np.ndarray
    apex: np.ndarray
    vertices: dict
    coefficients: dict

    def to_json(self) -> dict:
        def key(T):
            return "{" + ",".join(str(i + 1) for i in T) + "}"

        return {
            "dual_basis": self.dual_basis.tolist(),
            "apex": self.apex.tolist(),
            "vertices": {key(T): q.tolist() for T, q in self.vertices.items()},
        }


def chamber(sys: CoxeterSystem) -> Chamber:
    A = cosine_matrix(sys)
    if not is_positive_definite(A):
        raise InvalidMatrixError("the chamber needs a finite Coxeter system (positive definite cosine matrix)")
    a = A.a
    n = sys.n
    inv = np.linalg.inv(a) if n else np.zeros((0, 0))
    U = inv.T.copy()  # rows are the dual vectors
    # <p, e_s>_A = 1 for every s: unit distance from each facet
    apex = np.linalg.solve(a, np.ones(n)) if n else np.zeros(0)
    vertices, coefficients = {}, {}
    for k in range(n + 1):
        for T in combinations(range(n), k):
            if not T:
                vertices[T] = np.zeros(n)
                coefficients[T] = np.zeros(0)
                continue
            B = U[list(T)]
            gram_T = B @ a @ B.T
            c = np.linalg.solve(gram_T, B @ a @ apex)
            vertices[T] = c @ B
            coefficients[T] = c
    return Chamber(a, U, apex, vertices, coefficients)


@dataclass(frozen=True)
class DavisCell:
    word: tuple[int, ...]
    subset: IndexSet

    def label(self, sys: CoxeterSystem) -> str:
        names = [sys.label(i) for i in self.word]
        sep = "" if all(len(s) == 1 for s in names) else " "
        w = sep.join(names) if names else "1"
        return f"{w}W{sys.format_subset(self.subset)}"


@dataclass(frozen=True)
class DavisPoset:
    """Cosets ``wW_T`` for all spherical ``T``, with covering relations.

    ``covers`` holds ``(child, parent)`` id pairs where ``parent`` has one more
    generator in its subset and contains ``child``.
    """

    cells: tuple[DavisCell, ...]
    covers: tuple[tuple[int, int], ...]
    group_order: int

    def to_json(self, sys: CoxeterSystem) -> dict:
        up: dict[int, list[int]] = {k: [] for k in range(len(self.cells))}
        for child, parent in self.covers:
            up[child].append(parent)
        return {
            "group_order": self.group_order,
            "cells": [
                {
                    "id": k,
                    "word": [sys.label(i) for i in c.word],
                    "subset": [i + 1 for i in c.subset],
                    "label": c.label(sys),
                    "covers": up[k],
                }
                for k, c in enumerate(self.cells)
            ],
        }


def _key(M: np.ndarray) -> tuple:
    return tuple(np.rint(M / KEY_GRID).astype(np.int64).ravel())


def _generators(a: np.ndarray) -> list[np.ndarray]:
    n = a.shape[0]
    gens = []
    for i in range(n):
        # reflection x -> x - 2 <e_i, x>_A e_i
        S = np.eye(n)
        S[i, :] -= 2.0 * a[i, :]
        gens.append(S)
    return gens


def _enumerate_group(gens: list[np.ndarray], which, n: int, limit: int) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Elements in shortlex order of their minimal words in the generators ``which``."""
    start = np.eye(n)
    seen = {_key(start)}
    out = [((), start)]
    queue = deque(out)
    while queue:
        word, M = queue.popleft()
        for i in which:
            P = M @ gens[i]
            k = _key(P)
            if k in seen:
                continue
            seen.add(k)
            out.append((word + (i,), P))
            if len(out) > limit:
                raise SizeGuardError(f"group has more than {limit} elements")
            queue.append(out[-1])
    return out


def enumerate_davis_cells(sys: CoxeterSystem, max_order: int = DEFAULT_MAX_ORDER) -> DavisPoset:
    """All cells ``wW_T`` of the Davis complex of a finite system.

    Representatives are the shortlex-minimal words of their cosets.
    """
    A = cosine_matrix(sys)
    if sys.n and not is_positive_definite(A):
        raise InvalidMatrixError("the Davis poset is only enumerated for finite Coxeter systems")
    n = sys.n
    gens = _generators(A.a)
    W = _enumerate_group(gens, range(n), n, max_order)
    keys = [_key(M) for _, M in W]
    subsets = [T for k in range(n + 1) for T in combinations(range(n), k)]
    cells: list[DavisCell] = []
    member: dict[IndexSet, dict[tuple, int]] = {}
    for T in subsets:
        WT = _enumerate_group(gens, T, n, max_order)
        owner: dict[tuple, int] = {}
        for (word, M), k in zip(W, keys):
            if k in owner:
                continue
            cid = len(cells)
            cells.append(DavisCell(word, T))
            for _, V in WT:
                owner[_key(M @ V)] = cid
        member[T] = owner
    covers = []
    word_key = {word: k for (word, _), k in zip(W, keys)}
    for cid, cell in enumerate(cells):
        k = word_key[cell.word]
        for s in range(n):
            if s in cell.subset:
                continue
            T2 = tuple(sorted(cell.subset + (s,)))
            covers.append((cid, member[T2][k]))
    covers.sort()
    return DavisPoset(tuple(cells), tuple(covers), len(W))
