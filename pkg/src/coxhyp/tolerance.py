"""Numerical tolerances shared by all modules.

All thresholds scale with ``max(1, ||A||_inf)``.  The relative factor for
the positive-definiteness, zero and determinant tests can be overridden
for a block of code with :func:`relative_tolerance`.
"""

from __future__ import annotations

import contextvars
import os
from contextlib import contextmanager

import numpy as np

from .errors import SizeGuardError

SYM_TOL = 1e-12
DEFAULT_REL = 1e-9
DEFAULT_MAX_N = 20

_rel: contextvars.ContextVar[float] = contextvars.ContextVar("coxhyp_rel", default=DEFAULT_REL)


@contextmanager
def relative_tolerance(rel: float):
    if not rel > 0:
        raise ValueError(f"tolerance must be positive, got {rel}")
    token = _rel.set(float(rel))
    try:
        yield
    finally:
        _rel.reset(token)


def scale(a: np.ndarray) -> float:
    if a.size == 0:
        return 1.0
    return max(1.0, float(np.abs(a).sum(axis=1).max()))


def zero(a: np.ndarray) -> float:
    return _rel.get() * scale(a)


def pd(a: np.ndarray) -> float:
    return _rel.get() * scale(a)


def det(a: np.ndarray) -> float:
    return _rel.get() * scale(a) ** a.shape[0]


def max_n() -> int:
    raw = os.environ.get("COX_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise SizeGuardError(f"COX_MAX_N must be an integer, got {raw!r}") from None


def check_size(n: int) -> None:
    limit = max_n()
    if n > limit:
        raise SizeGuardError(f"order {n} exceeds the enumeration guard of {limit} (set COX_MAX_N to raise it)")
