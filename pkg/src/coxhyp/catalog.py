"""Named Coxeter systems: irreducible finite and affine types, triangle groups."""

from __future__ import annotations

import re

from .coxmat import INF, CoxeterSystem


def _chain(orders) -> CoxeterSystem:
    n = len(orders) + 1
    return CoxeterSystem.from_edges(n, [(k, k + 1, m) for k, m in enumerate(orders)])


def type_a(n: int) -> CoxeterSystem:
    return _chain([3] * (n - 1))


def type_b(n: int) -> CoxeterSystem:
    return _chain([3] * (n - 2) + [4])


def type_d(n: int) -> CoxeterSystem:
    # chain 0..n-2 with node n-1 attached to node n-3
    edges = [(k, k + 1, 3) for k in range(n - 2)] + [(n - 3, n - 1, 3)]
    return CoxeterSystem.from_edges(n, edges)


def type_e(n: int) -> CoxeterSystem:
    if n not in (6, 7, 8):
        raise ValueError("E_n exists for n = 6, 7, 8")
    edges = [(k, k + 1, 3) for k in range(n - 2)] + [(2, n - 1, 3)]
    return CoxeterSystem.from_edges(n, edges)


def type_f4() -> CoxeterSystem:
    return _chain([3, 4, 3])


def type_h(n: int) -> CoxeterSystem:
    if n not in (3, 4):
        raise ValueError("H_n exists for n = 3, 4")
    return _chain([5] + [3] * (n - 2))


def type_i2(m) -> CoxeterSystem:
    return _chain([m])


def affine_a(n: int) -> CoxeterSystem:
    """Cycle on ``n + 1`` nodes (``n >= 2``); ``n = 1`` gives the infinite dihedral group."""
    if n == 1:
        return _chain([INF])
    k = n + 1
    return CoxeterSystem.from_edges(k, [(i, (i + 1) % k, 3) for i in range(k)])


def affine_b(n: int) -> CoxeterSystem:
    # fork 0,1 -> 2, chain up to n-1, last edge labelled 4
    edges = [(0, 2, 3), (1, 2, 3)] + [(k, k + 1, 3) for k in range(2, n - 1)] + [(n - 1, n, 4)]
    return CoxeterSystem.from_edges(n + 1, edges)


def affine_c(n: int) -> CoxeterSystem:
    return _chain([4] + [3] * (n - 2) + [4])


def affine_d(n: int) -> CoxeterSystem:
    edges = [(0, 2, 3), (1, 2, 3)] + [(k, k + 1, 3) for k in range(2, n - 2)]
    edges += [(n - 2, n - 1, 3), (n - 2, n, 3)]
    return CoxeterSystem.from_edges(n + 1, edges)


def affine_g2() -> CoxeterSystem:
    return _chain([6, 3])


def affine_f4() -> CoxeterSystem:
    return _chain([3, 3, 4, 3])


def affine_e(n: int) -> CoxeterSystem:
    if n == 6:
        edges = [(0, 1, 3), (1, 2, 3), (2, 3, 3), (3, 4, 3), (2, 5, 3), (5, 6, 3)]
        return CoxeterSystem.from_edges(7, edges)
    if n == 7:
        edges = [(k, k + 1, 3) for k in range(6)] + [(3, 7, 3)]
        return CoxeterSystem.from_edges(8, edges)
    if n == 8:
        edges = [(k, k + 1, 3) for k in range(7)] + [(2, 8, 3)]
        return CoxeterSystem.from_edges(9, edges)
    raise ValueError("affine E_n exists for n = 6, 7, 8")


def triangle(p, q, r) -> CoxeterSystem:
    """Three generators with ``m_12 = p``, ``m_23 = q``, ``m_13 = r``."""
    return CoxeterSystem.from_edges(3, [(0, 1, p), (1, 2, q), (0, 2, r)])


_NAME = re.compile(r"^(~?)([A-Z])(\d+)(?:\((\d+)\))?$")


def by_name(name: str) -> CoxeterSystem:
    """Look up a type such as ``"E8"``, ``"I2(7)"``, ``"~A3"`` or ``"~G2"``."""
    match = _NAME.match(name.strip())
    if not match:
        raise ValueError(f"unknown Coxeter type {name!r}")
    affine, letter, rank, param = match.group(1), match.group(2), int(match.group(3)), match.group(4)
    if affine:
        table = {"A": affine_a, "B": affine_b, "C": affine_c, "D": affine_d, "E": affine_e}
        if letter in table:
            return table[letter](rank)
        if (letter, rank) == ("G", 2):
            return affine_g2()
        if (letter, rank) == ("F", 4):
            return affine_f4()
    else:
        table = {"A": type_a, "B": type_b, "D": type_d, "E": type_e, "H": type_h}
        if letter in table:
            return table[letter](rank)
        if (letter, rank) == ("F", 4):
            return type_f4()
        if (letter, rank) == ("I", 2) and param:
            return type_i2(int(param))
    raise ValueError(f"unknown Coxeter type {name!r}")
