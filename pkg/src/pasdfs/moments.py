"""Normally ordered moments ``<a^dagger^t a^j>`` from stored amplitudes."""

from __future__ import annotations

import threading

import numpy as np

from .errors import CapacityError
from .fock import FockAmplitudes, expectation_oracle, ladder_lower
from .numerics import log_factorial

MAX_ORDER = 10


def _check_key(t, j):
    if not (0 <= t <= MAX_ORDER and 0 <= j <= MAX_ORDER):
        raise CapacityError(f"moment order ({t}, {j}) outside [0, {MAX_ORDER}]")


def moment(psi: FockAmplitudes, t: int, j: int) -> complex:
    """``<psi| a^dagger^t a^j |psi>`` for a normalized state.

    With ``c_w`` the amplitude of ``|w>`` the sum runs over

        conj(c_{w-j+t}) c_w sqrt(w! (w-j+t)!) / (w-j)!

    for ``w >= j``; the factorial ratio is formed in log-space.
    """
    _check_key(t, j)
    w = psi.photon_numbers
    shift = t - j
    src = w >= j
    dst = w + shift
    src &= (dst >= psi.offset) & (dst <= psi.max_photon)
    if not np.any(src):
        return 0j
    w = w[src]
    c = psi.amps[src]
    c_shift = psi.amps[w + shift - psi.offset]
    logfac = 0.5 * (log_factorial(w) + log_factorial(w + shift)) - log_factorial(w - j)
    return complex(np.sum(np.conj(c_shift) * c * np.exp(logfac)))


class Moments:
    """Per-state memo of analytic moments.

    Safe to share between threads: a lock guards the dict and a value is
    computed at most once per key.
    """

    def __init__(self, psi: FockAmplitudes):
        self.psi = psi
        self._cache = {}
        self._lock = threading.Lock()

    def _compute(self, t, j):
        return moment(self.psi, t, j)

    def __call__(self, t: int, j: int) -> complex:
        key = (t, j)
        with self._lock:
            if key not in self._cache:
                self._cache[key] = self._compute(t, j)
            return self._cache[key]

    def probabilities(self, z_max: int) -> np.ndarray:
        """``p_z`` for ``0 <= z <= z_max`` (zero outside the stored window)."""
        p = np.zeros(z_max + 1)
        lo = self.psi.offset
        hi = min(self.psi.max_photon, z_max)
        if hi >= lo:
            p[lo:hi + 1] = self.psi.probabilities()[:hi - lo + 1]
        return p

    def number_moment(self, i: int) -> float:
        """``<(a^dagger a)^i>`` straight from the photon-number distribution."""
        w = self.psi.photon_numbers.astype(float)
        return float(np.sum(w ** i * self.psi.probabilities()))

    def cached(self):
        with self._lock:
            return dict(self._cache)


class OracleMoments(Moments):
    """Same interface, every moment from the dense-matrix oracle."""

    def _compute(self, t, j):
        _check_key(t, j)
        return expectation_oracle(self.psi, t, j)

    def number_moment(self, i: int) -> float:
        vec = self.psi.to_dense()
        a = ladder_lower(vec.size + 1)[:-1, :-1]
        num = a.conj().T @ a
        out = vec
        for _ in range(i):
            out = num @ out
        return float(np.vdot(vec, out).real)


def number_mean_and_variance(psi_or_moments) -> tuple[float, float]:
    """``(<N>, <N^2> - <N>^2)`` with ``<N^2> = <a^dagger^2 a^2> + <a^dagger a>``."""
    mom = psi_or_moments if isinstance(psi_or_moments, Moments) else Moments(psi_or_moments)
    mean = mom(1, 1).real
    second = mom(2, 2).real + mean
    return mean, second - mean ** 2
