"""Special-function and combinatorial kernels.

Everything that involves factorials of photon numbers is evaluated in
log-space; photon numbers reach a few hundred at truncation and plain
factorials overflow long before that.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError

M_MAX = 512
L_MAX = 16


class LogFactorialTable:
    """Immutable table of ``ln(m!)`` for ``0 <= m <= m_max``."""

    def __init__(self, m_max: int = M_MAX):
        if m_max < 1:
            raise ValueError("m_max must be positive")
        self.m_max = m_max
        values = np.array([math.lgamma(m + 1.0) for m in range(m_max + 1)])
        values[0] = values[1] = 0.0
        values.setflags(write=False)
        self.values = values

    def __len__(self):
        return self.m_max + 1

    def __call__(self, m):
        """Look up ``ln(m!)``; ``m`` may be an int or an integer array."""
        arr = np.asarray(m)
        if arr.size and (arr.min() < 0 or arr.max() > self.m_max):
            raise CapacityError(
                f"log_factorial argument outside [0, {self.m_max}]: {m!r}"
            )
        out = self.values[arr]
        return float(out) if out.ndim == 0 else out


LOG_FACTORIAL = LogFactorialTable()


def log_factorial(m):
    """``ln(m!)`` from the shared table (scalar or array argument)."""
    return LOG_FACTORIAL(m)


@lru_cache(maxsize=None)
def _stirling2_row(e: int) -> tuple:
    if e == 0:
        return (1,)
    prev = _stirling2_row(e - 1)
    row = [0] * (e + 1)
    for f in range(1, e + 1):
        upper = prev[f] if f < len(prev) else 0
        row[f] = f * upper + prev[f - 1]
    return tuple(row)


def stirling2(e: int, f: int) -> int:
    """Stirling number of the second kind ``S2(e, f)`` as an exact integer.

    Returns 0 for ``f > e`` (no partition of an e-set into more than e
    nonempty blocks) and for ``f == 0 < e``.
    """
    if e < 0 or f < 0:
        raise DomainError("stirling2 arguments must be nonnegative")
    if e > L_MAX:
        raise CapacityError(f"stirling2 row {e} exceeds L_MAX={L_MAX}")
    if f > e:
        return 0
    return _stirling2_row(e)[f]


def binomial(n: int, r: int) -> int:
    if r < 0 or r > n:
        return 0
    return math.comb(n, r)


def falling_factorial(x, f: int):
    """``x (x-1) ... (x-f+1)``; equals 1 for ``f == 0``."""
    out = 1
    for i in range(f):
        out *= x - i
    return out


def double_factorial(m: int) -> int:
    """``m!!`` with the convention ``(-1)!! = 0!! = 1``."""
    if m < -1:
        raise DomainError("double factorial defined for m >= -1")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def pochhammer_half(l: int) -> float:
    """Rising factorial ``(1/2)_{l/2}`` for even ``l >= 2``.

    This is the ``l``-th central moment of a Gaussian with variance 1/2,
    i.e. the coherent-state value of the ``l``-th quadrature moment.
    """
    if l < 2 or l % 2:
        raise DomainError(f"pochhammer_half needs an even order >= 2, got {l}")
    out = 1.0
    for i in range(l // 2):
        out *= 0.5 + i
    return out


def assoc_laguerre(p: int, s, x):
    """Generalized Laguerre polynomial ``L_p^{(s)}(x)``.

    Uses the three-term recurrence in the degree,

        (p+1) L_{p+1} = (2p + s + 1 - x) L_p - (p + s) L_{p-1},

    which is stable for the moderate degrees needed here. ``s`` and ``x``
    broadcast against each other.

    Args:
        p: degree, ``p >= 0``.
        s: integer order (scalar or array); negative values are allowed as
            long as ``s >= -p``.
        x: nonnegative argument (scalar or array).
    """
    if p < 0:
        raise DomainError("Laguerre degree must be nonnegative")
    s_arr = np.asarray(s, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("Laguerre argument must be nonnegative")
    s_arr, x_arr = np.broadcast_arrays(s_arr, x_arr)
    prev = np.ones_like(x_arr)
    if p == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + s_arr - x_arr
    for i in range(1, p):
        nxt = ((2 * i + s_arr + 1 - x_arr) * cur - (i + s_arr) * prev) / (i + 1)
        prev, cur = cur, nxt
    return cur if cur.ndim else float(cur)
