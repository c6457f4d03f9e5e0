"""Decide Gromov-hyperbolicity of a Coxeter group from its Coxeter matrix.

``W`` is hyperbolic iff there is no irreducible affine special subgroup of
rank >= 3 and no pair of disjoint, commuting, infinite special subgroups.
Both searches only need the minimal non-spherical subsets of ``S``: a
parabolic cosine matrix has all proper principal submatrices positive
definite, and a commuting pair can always be shrunk to minimal members.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import tolerance as tol
from .anm import IndexSet, MatrixClass, classify
from .coxmat import CoxeterSystem, cosine_matrix, diagram_adjacent
from .nerve import build_nerve


@dataclass(frozen=True)
class AffineWitness:
    subset: IndexSet

    def describe(self, sys: CoxeterSystem) -> str:
        return f"affine subsystem {sys.format_subset(self.subset)}"

    def to_json(self, sys: CoxeterSystem) -> dict:
        return {
            "type": "affine",
            "subset": [sys.label(i) for i in self.subset],
            "indices": [i + 1 for i in self.subset],
        }


@dataclass(frozen=True)
class CommutingWitness:
    first: IndexSet
    second: IndexSet

    def describe(self, sys: CoxeterSystem) -> str:
        return (
            f"commuting infinite subsystems {sys.format_subset(self.first)}"
            f" and {sys.format_subset(self.second)}"
        )

    def to_json(self, sys: CoxeterSystem) -> dict:
        return {
            "type": "commuting",
            "first": [sys.label(i) for i in self.first],
            "second": [sys.label(i) for i in self.second],
            "first_indices": [i + 1 for i in self.first],
            "second_indices": [i + 1 for i in self.second],
        }


@dataclass(frozen=True)
class HyperbolicityVerdict:
    hyperbolic: bool
    witness: AffineWitness | CommutingWitness | None = None

    def __post_init__(self):
        if not self.hyperbolic and self.witness is None:
            raise ValueError("a non-hyperbolic verdict needs a witness")

    def describe(self, sys: CoxeterSystem) -> str:
        if self.hyperbolic:
            return "HYPERBOLIC"
        return f"NOT HYPERBOLIC: {self.witness.describe(sys)}"

    def to_json(self, sys: CoxeterSystem) -> dict:
        return {
            "hyperbolic": self.hyperbolic,
            "witness": None if self.witness is None else self.witness.to_json(sys),
        }


def spherical_subsets(sys: CoxeterSystem) -> frozenset:
    """All ``T`` (including the empty set) with ``W_T`` finite."""
    return frozenset(build_nerve(cosine_matrix(sys)).cells) | {()}


def minimal_nonspherical(sys: CoxeterSystem, spherical: frozenset | None = None) -> list[IndexSet]:
    """Non-spherical subsets all of whose proper subsets are spherical, in (size, lex) order."""
    if spherical is None:
        spherical = spherical_subsets(sys)
    out = []
    for I in sorted(spherical, key=lambda T: (len(T), T)):
        start = I[-1] + 1 if I else 0
        for j in range(start, sys.n):
            J = I + (j,)
            if J in spherical:
                continue
            if all(J[:k] + J[k + 1:] in spherical for k in range(len(J))):
                out.append(J)
    out.sort(key=lambda T: (len(T), T))
    return out


def _connected(sys: CoxeterSystem, T: IndexSet) -> bool:
    seen = {T[0]}
    stack = [T[0]]
    while stack:
        u = stack.pop()
        for v in T:
            if v not in seen and diagram_adjacent(sys, u, v):
                seen.add(v)
                stack.append(v)
    return len(seen) == len(T)


def find_affine_witness(sys: CoxeterSystem, *, _minimal=None) -> IndexSet | None:
    """Smallest connected ``T``, ``|T| >= 3``, with parabolic cosine submatrix."""
    tol.check_size(sys.n)
    a = cosine_matrix(sys).a
    candidates = minimal_nonspherical(sys) if _minimal is None else _minimal
    for T in candidates:
        if len(T) < 3 or not _connected(sys, T):
            continue
        if classify(a[list(T)][:, list(T)]) is MatrixClass.PARABOLIC:
            return T
    return None


def find_commuting_witness(sys: CoxeterSystem, *, _minimal=None) -> tuple[IndexSet, IndexSet] | None:
    """First pair of disjoint, commuting, infinite ``(T1, T2)``.

    ``T1`` runs over non-spherical sets in (size, lex) order; its partner is
    the smallest non-spherical subset of the generators commuting with all of
    ``T1``.
    """
    tol.check_size(sys.n)
    candidates = minimal_nonspherical(sys) if _minimal is None else _minimal
    for T1 in candidates:
        commuting = {
            s for s in range(sys.n)
            if s not in T1 and all(sys.m[s][t] == 2 for t in T1)
        }
        for T2 in candidates:
            if commuting.issuperset(T2):
                return T1, T2
    return None


def decide(sys: CoxeterSystem) -> HyperbolicityVerdict:
    """Hyperbolicity verdict; affine witnesses are reported before commuting pairs."""
    tol.check_size(sys.n)
    minimal = minimal_nonspherical(sys)
    T = find_affine_witness(sys, _minimal=minimal)
    if T is not None:
        return HyperbolicityVerdict(False, AffineWitness(T))
    pair = find_commuting_witness(sys, _minimal=minimal)
    if pair is not None:
        return HyperbolicityVerdict(False, CommutingWitness(*pair))
    return HyperbolicityVerdict(True)
