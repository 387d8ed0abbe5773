"""Phase distribution and Barnett-Pegg / Carruthers-Nieto phase fluctuations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import FockAmplitudes
from .moments import Moments, number_mean_and_variance

DEFAULT_GRID = 1024
MIN_GRID = 256
DENOMINATOR_TOL = 1e-12


@dataclass(frozen=True)
class PhaseDistribution:
    thetas: np.ndarray
    values: np.ndarray

    @property
    def step(self) -> float:
        return 2 * math.pi / self.thetas.size

    def integral(self) -> float:
        """Trapezoid rule on the periodic grid (every node has weight ``h``)."""
        return float(self.step * np.sum(self.values))

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.thetas.size, self.step)


def phase_distribution(psi: FockAmplitudes, grid_points: int = DEFAULT_GRID) -> PhaseDistribution:
    """``P(theta) = |<theta|psi>|^2 / 2 pi`` on ``[0, 2 pi)``.

    With phase states ``|theta> = sum_w exp(i w theta)|w>`` the overlap is
    ``sum_w c_w exp(-i w theta)``, so a coherent state peaks at ``arg(alpha)``.

    The trapezoid integral is exact (Parseval) once ``grid_points`` exceeds
    the width of the stored photon-number window, so the grid is enlarged
    to the next power of two when needed.
    """
    if grid_points < MIN_GRID:
        raise ValueError(f"grid_points must be >= {MIN_GRID}")
    while grid_points <= len(psi):
        grid_points *= 2
    thetas = 2 * math.pi * np.arange(grid_points) / grid_points
    # sum_i c_i exp(-i (offset + i) theta) via an FFT; |.| removes the offset phase
    padded = np.zeros(grid_points, dtype=complex)
    padded[:len(psi)] = psi.amps
    series = np.fft.fft(padded)
    values = np.abs(series) ** 2 / (2 * math.pi)
    return PhaseDistribution(thetas, values)


def phase_density(psi: FockAmplitudes, theta) -> np.ndarray:
    """Pointwise ``P(theta)`` by direct summation (any ``theta``)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    w = psi.photon_numbers
    series = np.exp(-1j * np.outer(theta, w)) @ psi.amps
    return np.abs(series) ** 2 / (2 * math.pi)


@dataclass(frozen=True)
class FluctuationReport:
    U: float
    S_s: float
    Q_param: float
    mean_S: float
    mean_C: float
    var_S: float
    var_C: float
    var_N: float
    mean_N: float
    health: frozenset = field(default_factory=frozenset)

    @property
    def antibunching_like(self):
        """``U`` below its coherent-state value 1/2; ``None`` if undefined."""
        if math.isnan(self.U):
            return None
        return self.U < 0.5 - 1e-10


def sine_cosine_moments(psi: FockAmplitudes, moments=None) -> dict:
    """First and second moments of the Barnett-Pegg sine and cosine operators.

    ``S = (a - a^dagger) / (2i s)`` and ``C = (a + a^dagger) / (2 s)`` with the
    scalar ``s = sqrt(<N> + 1/2)`` taken from the state itself.
    """
    mom = moments if moments is not None else Moments(psi)
    a1 = mom(0, 1)
    a2 = mom(0, 2)
    n1 = mom(1, 1).real
    s2 = n1 + 0.5
    s = math.sqrt(s2)
    # <a a^dagger> = <a^dagger a> + 1
    sym = 2 * n1 + 1
    return {
        "mean_N": n1,
        "mean_S": a1.imag / s,
        "mean_C": a1.real / s,
        "mean_S2": (sym - 2 * a2.real) / (4 * s2),
        "mean_C2": (sym + 2 * a2.real) / (4 * s2),
    }


def phase_fluctuation_U(psi: FockAmplitudes, moments=None) -> FluctuationReport:
    """Carruthers-Nieto ``U``, ``S_s`` and ``Q`` phase fluctuation parameters.

    Degenerate denominators are flagged through ``health`` and the affected
    parameter is NaN.
    """
    mom = moments if moments is not None else Moments(psi)
    sc = sine_cosine_moments(psi, mom)
    _, var_n = number_mean_and_variance(mom)
    var_s = sc["mean_S2"] - sc["mean_S"] ** 2
    var_c = sc["mean_C2"] - sc["mean_C"] ** 2
    health = set()
    denom = sc["mean_S"] ** 2 + sc["mean_C"] ** 2
    if denom < DENOMINATOR_TOL:
        health.add("denominator_small")
        U = math.nan
    else:
        U = var_n * (var_s + var_c) / denom
    S_s = var_n * var_s
    if sc["mean_C"] ** 2 < DENOMINATOR_TOL:
        health.add("cosine_small")
        Q = math.nan
    else:
        Q = S_s / sc["mean_C"] ** 2
    return FluctuationReport(U, S_s, Q, sc["mean_S"], sc["mean_C"], var_s, var_c,
                             var_n, sc["mean_N"], frozenset(health))
