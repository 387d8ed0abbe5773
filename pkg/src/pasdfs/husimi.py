"""Husimi Q function of a stored pure state.

``Q(beta) = |<beta|psi>|^2 / pi``. With ``z = conj(beta)`` the overlap is
``e^{-|z|^2/2} f(z)`` where ``f(z) = sum_w c_w z^w / sqrt(w!)`` is entire, so
zeros of Q are zeros of an analytic function and can be polished by Newton
steps on ``f``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fock import FockAmplitudes
from .moments import Moments
from .numerics import log_factorial

BETA_MAX = 12.0
MIN_GRID = 64
ZERO_REL = 1e-6
MASS_TOL = 0.01


def _coherent_weights(beta: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``e^{-|b|^2/2} conj(b)^w / sqrt(w!)`` for every (beta, w) pair.

    Formed as ``exp(w ln|b| - ln(w!)/2 - |b|^2/2)`` so each factor is at most
    one in magnitude and nothing overflows.
    """
    r = np.abs(beta)[..., None]
    phi = np.angle(beta)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.where(r > 0, np.log(np.where(r > 0, r, 1.0)), -np.inf)
        logmag = w * logr - 0.5 * log_factorial(w) - 0.5 * r ** 2
        # 0 * log(0): the w = 0 term is e^{-|b|^2/2}
        logmag = np.where(w == 0, -0.5 * r ** 2, logmag)
    return np.exp(logmag) * np.exp(-1j * w * phi)


def _q_values(psi: FockAmplitudes, beta: np.ndarray) -> np.ndarray:
    overlap = _coherent_weights(beta, psi.photon_numbers) @ psi.amps
    return np.abs(overlap) ** 2 / math.pi


def q_function(psi: FockAmplitudes, beta) -> np.ndarray | float:
    """``Q(beta)`` for a scalar or array of complex points with ``|beta| <= BETA_MAX``."""
    beta_arr = np.asarray(beta, dtype=complex)
    if np.any(np.abs(beta_arr) > BETA_MAX):
        raise DomainError(f"|beta| must not exceed {BETA_MAX}")
    q = _q_values(psi, beta_arr)
    return float(q) if q.ndim == 0 else q


@dataclass(frozen=True)
class QGrid:
    re: np.ndarray
    im: np.ndarray
    values: np.ndarray  # shape (ny, nx), rows follow ``im``

    @property
    def nx(self):
        return self.re.size

    @property
    def ny(self):
        return self.im.size

    @property
    def re_range(self):
        return float(self.re[0]), float(self.re[-1])

    @property
    def im_range(self):
        return float(self.im[0]), float(self.im[-1])

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights on the rectangle."""
        return np.outer(_trapezoid_weights(self.im), _trapezoid_weights(self.re))

    def mass(self) -> float:
        return float(np.sum(self.values * self.weights))

    @property
    def peak(self) -> float:
        return float(self.values.max())

    def near_zero_mask(self, rel: float = ZERO_REL) -> np.ndarray:
        return self.values < rel * self.peak

    def moments(self):
        """Centroid and 2x2 covariance of the Q mass in (Re, Im)."""
        w = self.values * self.weights
        total = w.sum()
        X, Y = np.meshgrid(self.re, self.im)
        mx = (w * X).sum() / total
        my = (w * Y).sum() / total
        dx, dy = X - mx, Y - my
        cov = np.array([[(w * dx * dx).sum(), (w * dx * dy).sum()],
                        [(w * dx * dy).sum(), (w * dy * dy).sum()]]) / total
        return complex(mx, my), cov

    def major_axis_angle(self) -> float:
        """Direction of largest spread, in ``[0, pi)``."""
        _, cov = self.moments()
        vals, vecs = np.linalg.eigh(cov)
        v = vecs[:, np.argmax(vals)]
        return float(math.atan2(v[1], v[0]) % math.pi)


def _trapezoid_weights(x):
    h = np.diff(x)
    w = np.zeros(x.size)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def auto_window(psi: FockAmplitudes, scale: float = 1.0):
    """Square window centred on ``<a>`` with half-width ``4 + sqrt(<N>)``."""
    mom = Moments(psi)
    centre = mom(0, 1)
    half = (4 + math.sqrt(max(mom(1, 1).real, 0.0))) * scale
    return (centre.real - half, centre.real + half, centre.imag - half, centre.imag + half)


def _evaluate(psi, window, nx, ny):
    x0, x1, y0, y1 = window
    re = np.linspace(x0, x1, nx)
    im = np.linspace(y0, y1, ny)
    B = re[None, :] + 1j * im[:, None]
    # auto windows of bright states reach past BETA_MAX; the log-space
    # weights stay finite there, so the corners are evaluated unguarded
    return QGrid(re, im, _q_values(psi, B))


def q_grid(psi: FockAmplitudes, window="auto", nx: int = 128, ny: int = 128) -> QGrid:
    """Sample Q on a rectangle.

    Args:
        window: ``"auto"`` or ``(re_min, re_max, im_min, im_max)``. An auto
            window missing more than 1% of the mass is widened once; if it
            still misses, a ``RuntimeWarning`` is issued.
    """
    if nx < MIN_GRID or ny < MIN_GRID:
        raise ValueError(f"grid sizes must be >= {MIN_GRID}")
    if isinstance(window, str):
        if window != "auto":
            raise ValueError(f"unknown window {window!r}")
        grid = _evaluate(psi, auto_window(psi), nx, ny)
        if grid.mass() < 1 - MASS_TOL:
            grid = _evaluate(psi, auto_window(psi, scale=1.5), nx, ny)
    else:
        x0, x1, y0, y1 = map(float, window)
        if not (x1 > x0 and y1 > y0):
            raise ValueError("window must have positive extent")
        grid = _evaluate(psi, (x0, x1, y0, y1), nx, ny)
    if grid.mass() < 1 - MASS_TOL:
        warnings.warn(f"Q grid holds only {grid.mass():.4f} of the total mass",
                      RuntimeWarning, stacklevel=2)
    return grid


def _analytic_part(psi, z):
    """``f(z)`` and ``f'(z)`` by Horner's rule in the scaled coefficients."""
    w = psi.photon_numbers
    coef = psi.amps * np.exp(-0.5 * log_factorial(w))
    full = np.zeros(psi.max_photon + 1, dtype=complex)
    full[psi.offset:] = coef
    poly = np.polynomial.Polynomial(full)
    return poly(z), poly.deriv()(z)


def refine_zero(psi: FockAmplitudes, beta0: complex, steps: int = 50):
    """Newton iteration for a zero of Q starting from ``beta0``.

    Returns the refined ``beta`` or ``None`` if the iteration leaves the
    admissible disc or fails to converge.
    """
    z = np.conj(complex(beta0))
    for _ in range(steps):
        f, df = _analytic_part(psi, z)
        if df == 0:
            return None
        dz = f / df
        z = z - dz
        if abs(z) > BETA_MAX:
            return None
        if abs(dz) < 1e-14 * max(1.0, abs(z)):
            break
    else:
        return None
    return complex(np.conj(z))


def find_zeros(psi: FockAmplitudes, grid: QGrid, rel: float = ZERO_REL, seed_rel: float = 0.05):
    """Zeros of Q inside ``grid``.

    Interior local minima below ``seed_rel * peak`` seed Newton refinement;
    a refined point counts if ``Q < rel * peak`` there and it lies in the
    window. Duplicates closer than ``1e-6`` are merged.
    """
    v = grid.values
    peak = grid.peak
    zeros = []
    for iy in range(1, grid.ny - 1):
        for ix in range(1, grid.nx - 1):
            c = v[iy, ix]
            if c > seed_rel * peak or c > v[iy - 1:iy + 2, ix - 1:ix + 2].min():
                continue
            beta = refine_zero(psi, complex(grid.re[ix], grid.im[iy]))
            if beta is None:
                continue
            inside = (grid.re[0] <= beta.real <= grid.re[-1]
                      and grid.im[0] <= beta.imag <= grid.im[-1])
            if not inside or q_function(psi, beta) >= rel * peak:
                continue
            if all(abs(beta - b) > 1e-6 for b in zeros):
                zeros.append(beta)
    return sorted(zeros, key=lambda b: (b.real, b.imag))
