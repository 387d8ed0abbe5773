"""Closed-form amplitudes of displaced Fock states and their photon-added,
photon-subtracted descendants.

A displaced Fock state has the Fock expansion ``C_m = <m|D(alpha)|n>``,
written with associated Laguerre polynomials. Adding ``k`` photons and then
subtracting ``q`` maps ``|m>`` to ``(m+k)!/sqrt(m! (m+k-q)!) |m+k-q>``, so the
engineered state is a reweighted, shifted copy of the same expansion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AnnihilationError, CapacityError, DomainError, TruncationError
from .fock import FockAmplitudes
from .numerics import M_MAX, assoc_laguerre, log_factorial

DEFAULT_EPS = 1e-12
SPEC_CAPACITY = 12
# highest photon number an amplitude vector may reach; leaves room in the
# log-factorial table for moments of order 10 on top of it
MAX_PHOTON = M_MAX - 21
# tail weight (w+1)**TAIL_POWER * p_w must fall below eps; protects moments up to order 10
TAIL_POWER = 10


@dataclass(frozen=True)
class StateSpec:
    """Engineering parameters: ``k`` photons added, then ``q`` subtracted,
    from ``D(alpha)|n>``."""

    k: int = 0
    q: int = 0
    n: int = 0
    alpha: complex = 0j

    def __post_init__(self):
        for name in ("k", "q", "n"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {v!r}")
            if v > SPEC_CAPACITY:
                raise CapacityError(f"{name}={v} exceeds capacity {SPEC_CAPACITY}")
            object.__setattr__(self, name, int(v))
        object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def polar(cls, k, q, n, modulus, theta=0.0):
        return cls(k, q, n, cmath.rect(modulus, theta))

    @property
    def offset(self) -> int:
        return max(0, self.k - self.q)

    def __str__(self):
        return f"PASDFS(k={self.k}, q={self.q}, n={self.n}, alpha={self.alpha:.6g})"


def _check_eps(eps):
    if not (0 < eps <= 1e-6):
        raise DomainError(f"eps must lie in (0, 1e-6], got {eps!r}")


def _initial_cutoff(alpha: complex, n: int, k: int) -> int:
    x = abs(alpha) ** 2
    spread = math.sqrt((x + 1) * (2 * n + 1))
    return int(x + n + k + 8 * spread + 30)


def _dfs_log_terms(alpha: complex, n: int, m: np.ndarray):
    """``C_m(alpha, n)`` split as ``exp(logmag) * phase * laguerre`` for ``alpha != 0``.

    For ``m >= n``: ``sqrt(n!/m!) alpha^(m-n) e^{-|a|^2/2} L_n^(m-n)(|a|^2)``.
    For ``m < n`` the roles swap with ``alpha -> -conj(alpha)``, from
    ``D(alpha)^dagger = D(-alpha)``.
    """
    x = abs(alpha) ** 2
    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    d = hi - lo
    logmag = (0.5 * (log_factorial(lo) - log_factorial(hi))
              + d * math.log(abs(alpha)) - 0.5 * x)
    theta = cmath.phase(alpha)
    # (-conj(alpha))^d = |alpha|^d exp(i d (pi - theta))
    phase = np.where(m >= n, np.exp(1j * d * theta), np.exp(1j * d * (math.pi - theta)))
    lag = np.empty(m.size)
    for p in np.unique(lo):
        sel = lo == p
        lag[sel] = assoc_laguerre(int(p), d[sel], x)
    return logmag, phase, lag


def _assemble(alpha, n, k, q, cutoff):
    """Unnormalized-then-normalized amplitudes for DFS indices ``m <= cutoff``."""
    m = np.arange(max(0, q - k), cutoff + 1)
    logmag, phase, lag = _dfs_log_terms(alpha, n, m)
    w = m + k - q
    logmag = logmag + log_factorial(m + k) - 0.5 * (log_factorial(m) + log_factorial(w))
    with np.errstate(divide="ignore"):
        logabs = logmag + np.log(np.abs(lag))
    shift = np.max(logabs)
    if not np.isfinite(shift):
        raise AnnihilationError("engineered state has zero norm")
    amps = np.exp(logmag - shift) * lag * phase
    norm = np.linalg.norm(amps)
    if norm < 1e-14:
        raise AnnihilationError("engineered state has zero norm")
    return int(w[0]), amps / norm


def _tail_ok(offset, amps, eps):
    p = np.abs(amps) ** 2
    w = np.arange(offset, offset + p.size)
    weighted = p * (w + 1.0) ** TAIL_POWER
    tail = weighted[-4:]
    mean = np.sum(w * p)
    return bool(np.all(tail < eps) and w[-1] > mean), float(p[-1])


def _build(alpha: complex, n: int, k: int, q: int, eps: float,
           min_cutoff: int = 0) -> FockAmplitudes:
    if alpha == 0:
        if n + k < q:
            raise AnnihilationError(
                f"a^{q} a^dagger^{k} annihilates |{n}> (alpha = 0)")
        return FockAmplitudes(n + k - q, np.array([1.0 + 0j]), 0.0,
                              {"cutoff": n, "exact": True})
    cutoff = max(_initial_cutoff(alpha, n, k), min_cutoff)
    while True:
        cutoff = min(cutoff, MAX_PHOTON - k)
        offset, amps = _assemble(alpha, n, k, q, cutoff)
        ok, last = _tail_ok(offset, amps, eps)
        if ok:
            return FockAmplitudes(offset, amps, last, {"cutoff": cutoff, "exact": False})
        if cutoff >= MAX_PHOTON - k:
            raise TruncationError(
                f"tail bound {eps:g} not reached below photon number {MAX_PHOTON}")
        cutoff *= 2


def dfs_coefficients(alpha: complex, n: int, eps: float = DEFAULT_EPS) -> FockAmplitudes:
    """Fock amplitudes of ``D(alpha)|n>``, truncated once the tail is below ``eps``."""
    _check_eps(eps)
    return _build(complex(alpha), int(n), 0, 0, eps)


def pasdfs_amplitudes(spec: StateSpec, eps: float = DEFAULT_EPS,
                      min_cutoff: int = 0) -> FockAmplitudes:
    """Normalized amplitudes of ``N a^q a^dagger^k D(alpha)|n>``.

    ``min_cutoff`` forces at least that many displaced-Fock terms, which is
    how the truncation is checked for convergence.

    Raises:
        AnnihilationError: the operators map the state to zero, which only
            happens for ``alpha == 0`` and ``q > n + k``.
    """
    _check_eps(eps)
    psi = _build(spec.alpha, spec.n, spec.k, spec.q, eps, min_cutoff)
    psi.meta["spec"] = spec
    return psi


def coherent_amplitudes(alpha: complex, size: int) -> np.ndarray:
    """Independent reference: ``e^{-|a|^2/2} a^w / sqrt(w!)`` for ``w < size``."""
    w = np.arange(size)
    if alpha == 0:
        out = np.zeros(size, dtype=complex)
        out[0] = 1.0
        return out
    logmag = w * math.log(abs(alpha)) - 0.5 * log_factorial(w) - 0.5 * abs(alpha) ** 2
    return np.exp(logmag) * np.exp(1j * w * cmath.phase(alpha))
