"""Random almost negative matrices and Coxeter systems for property tests.

Plain random matrices almost never have a link with a zero row, so
:func:`random_almost_negative` can plant two kinds of structure:

* a pair ``(i, j)`` with entry ``-1``, decoupled from every other index, so
  that ``lk({i}, A)`` vanishes on row ``j``;
* a parabolic block: an irreducible almost negative block shifted by its
  smallest eigenvalue and rescaled to unit diagonal.
"""

from __future__ import annotations

import numpy as np

from .anm import AlmostNegativeMatrix, normalize
from .coxmat import INF, CoxeterSystem

ZERO_MASS = 0.4
OFF_DIAGONAL_LOW = -1.2


def random_off_diagonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Unit diagonal, off-diagonal entries from ``{0}`` with mass 0.4, else uniform on [-1.2, 0]."""
    a = np.where(rng.random((n, n)) < ZERO_MASS, 0.0, rng.uniform(OFF_DIAGONAL_LOW, 0.0, (n, n)))
    a = np.triu(a, 1)
    a = a + a.T
    np.fill_diagonal(a, 1.0)
    return a


def plant_zero_row_pair(rng: np.random.Generator, a: np.ndarray) -> np.ndarray:
    """Set ``a[i, j] = -1`` and zero the cross terms so that ``lk({i}, A)`` has a zero row ``j``."""
    n = a.shape[0]
    i, j = rng.choice(n, size=2, replace=False)
    a = a.copy()
    a[i, j] = a[j, i] = -1.0
    others = [k for k in range(n) if k not in (i, j)]
    for k in others:
        # the link row is a[j,k] - a[i,j] a[i,k] = a[j,k] + a[i,k]; both are <= 0
        a[j, k] = a[k, j] = 0.0
        a[i, k] = a[k, i] = 0.0
    return a


def plant_parabolic_block(rng: np.random.Generator, a: np.ndarray, size: int) -> np.ndarray:
    """Overwrite a random principal block with a parabolic matrix and decouple it."""
    n = a.shape[0]
    idx = np.sort(rng.choice(n, size=size, replace=False))
    # a cycle guarantees irreducibility; the extra entries keep it random
    b = np.zeros((size, size))
    for k in range(size):
        w = rng.uniform(-1.0, -0.2)
        b[k, (k + 1) % size] = b[(k + 1) % size, k] = w
    extra = random_off_diagonal(rng, size)
    np.fill_diagonal(extra, 0.0)
    b = np.minimum(b, extra) if size > 2 else b
    np.fill_diagonal(b, 1.0)
    lam = np.linalg.eigvalsh(b)[0]
    b = np.asarray(normalize(b - lam * np.eye(size)))
    a = a.copy()
    a[idx, :] = 0.0
    a[:, idx] = 0.0
    a[np.ix_(idx, idx)] = b
    for k in range(n):
        if k not in idx:
            a[k, k] = 1.0
    return a


def random_almost_negative(
    rng: np.random.Generator,
    n: int,
    *,
    plant_pair: float = 0.5,
    plant_block: float = 0.25,
) -> AlmostNegativeMatrix:
    a = random_off_diagonal(rng, n)
    if n >= 2 and rng.random() < plant_block:
        a = plant_parabolic_block(rng, a, int(rng.integers(2, n + 1)))
    if n >= 2 and rng.random() < plant_pair:
        a = plant_zero_row_pair(rng, a)
    return AlmostNegativeMatrix(a)


def random_coxeter_system(rng: np.random.Generator, n: int, orders=(2, 3, 4, INF), weights=None) -> CoxeterSystem:
    m = [[1] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = m[j][i] = orders[rng.choice(len(orders), p=weights)]
    return CoxeterSystem(m)
