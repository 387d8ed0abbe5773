"""Moments-based nonclassicality witnesses.

Each witness returns a :class:`WitnessReport` whose value is negative when
the state is nonclassical. Every function takes an optional ``moments``
provider so the same formula can be fed analytic moments
(:class:`~pasdfs.moments.Moments`) or dense-matrix ones
(:class:`~pasdfs.moments.OracleMoments`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .fock import FockAmplitudes, ladder_lower
from .moments import MAX_ORDER, Moments
from .numerics import binomial, double_factorial, pochhammer_half, stirling2

TOL_SIGN = 1e-10
DENOMINATOR_TOL = 1e-12
TRUNCATION_WARN = 1e-10

CRITERIA = ("antibunching", "hosps", "hong_mandel", "klyshko", "agarwal_tara", "vogel")

DENOMINATOR_SMALL = "denominator_small"
TRUNCATION_WARNING = "truncation_warning"
IMAGINARY_RESIDUE = "imaginary_residue"


@dataclass(frozen=True)
class WitnessReport:
    criterion: str
    argument: int
    value: float
    nonclassical: bool
    health: frozenset = field(default_factory=frozenset)

    @property
    def order(self) -> int:
        """Order as quoted in figure legends: ``l-1`` for antibunching and
        HOSPS, ``l`` for squeezing, ``z`` for Klyshko."""
        if self.criterion in ("antibunching", "hosps"):
            return self.argument - 1
        return self.argument

    @property
    def verdict(self):
        """``True``/``False``, or ``None`` when the value is not trustworthy."""
        if DENOMINATOR_SMALL in self.health:
            return None
        return self.nonclassical


def _report(criterion, argument, value, psi, health=()):
    health = set(health)
    if psi.truncation_eps > TRUNCATION_WARN:
        health.add(TRUNCATION_WARNING)
    value = float(value)
    nonclassical = DENOMINATOR_SMALL not in health and value < -TOL_SIGN
    return WitnessReport(criterion, argument, value, nonclassical, frozenset(health))


def _real(z, scale=1.0):
    """Drop the imaginary part of a quantity that is real by construction."""
    z = complex(z)
    if abs(z.imag) > 1e-10 * max(1.0, scale):
        return z.real, False
    return z.real, True


def _provider(psi, moments):
    return moments if moments is not None else Moments(psi)


def _check_order(l, even=False):
    if not (2 <= l <= MAX_ORDER):
        raise DomainError(f"order l must lie in [2, {MAX_ORDER}], got {l}")
    if even and l % 2:
        raise DomainError(f"only even l are allowed for quadrature squeezing, got {l}")


def antibunching_value(mom: Moments, l: int) -> float:
    """``d(l-1) = <a^dagger^l a^l> - <a^dagger a>^l``."""
    return mom(l, l).real - mom(1, 1).real ** l


def antibunching(psi: FockAmplitudes, l: int, moments=None) -> WitnessReport:
    """Lower (``l = 2``) and higher-order antibunching witness ``d(l-1)``."""
    _check_order(l)
    return _report("antibunching", l, antibunching_value(_provider(psi, moments), l), psi)


def hosps(psi: FockAmplitudes, l: int, moments=None) -> WitnessReport:
    """Higher-order sub-Poissonian statistics witness ``D_h(l-1)``.

    Stirling-weighted combination of the antibunching deficits ``d(f-1)``
    and powers of the mean photon number. The ``e = 0`` term is empty.
    """
    _check_order(l)
    mom = _provider(psi, moments)
    mean = mom(1, 1).real
    d = {f: antibunching_value(mom, f) if f >= 2 else 0.0 for f in range(1, l + 1)}
    total = 0.0
    for e in range(1, l + 1):
        inner = sum(stirling2(e, f) * d[f] for f in range(1, e + 1))
        total += binomial(l, e) * (-1) ** e * inner * mean ** (l - e)
    return _report("hosps", l, total, psi)


def quadrature_variance_l(psi: FockAmplitudes, l: int) -> float:
    """``<(X - <X>)^l>`` for ``X = (a + a^dagger)/sqrt(2)``, by matrix action.

    The basis is enlarged by ``l/2`` levels so applying ``X`` never
    truncates: the value is exact for the stored amplitudes.
    """
    _check_order(l, even=True)
    dim = psi.max_photon + l // 2 + 2
    a = ladder_lower(dim)
    X = (a + a.conj().T) / math.sqrt(2)
    vec = psi.to_dense(dim)
    mean = np.vdot(vec, X @ vec).real
    shifted = X - mean * np.eye(dim)
    for _ in range(l // 2):
        vec = shifted @ vec
    return float(np.vdot(vec, vec).real)


def quadrature_variance_expansion(mom: Moments, l: int, printed=False) -> float:
    """``<(Delta X)^l>`` from normally ordered moments.

    Expands ``(X - <X>)^l`` binomially and normal-orders each
    ``(a + a^dagger)^r``: choosing ``i`` contracted pairs contributes
    ``C(r, 2i) (2i-1)!!``, and the remaining ``r - 2i`` operators give
    ``sum_k C(r-2i, k) <a^dagger^k a^(r-2i-k)>``.

    ``printed=True`` swaps in ``(2i-1)!`` and ``C(2i, k)``, the literal
    coefficients of the commonly quoted form of this expansion; they do not
    agree with the operator evaluation and exist only so tests can show it.
    """
    _check_order(l, even=True)
    xsum = 2 * mom(1, 0).real  # <a + a^dagger>
    total = 0.0
    for r in range(l + 1):
        for i in range(r // 2 + 1):
            if printed:
                pair = math.factorial(max(2 * i - 1, 0))
            else:
                pair = double_factorial(2 * i - 1)
            rest = r - 2 * i
            for k in range(rest + 1):
                c = binomial(2 * i, k) if printed else binomial(rest, k)
                if c == 0:
                    continue
                coeff = (-1) ** r * pair * c * binomial(l, r) * binomial(r, 2 * i)
                total += coeff * xsum ** (l - r) * mom(k, rest - k).real
    return total / 2 ** (l // 2)


def hong_mandel(psi: FockAmplitudes, l: int, moments=None, method="direct") -> WitnessReport:
    """Hong-Mandel squeezing ``S(l) = (<(Delta X)^l> - (1/2)_{l/2}) / (1/2)_{l/2}``.

    Args:
        method: ``"direct"`` evaluates the central moment by matrix action
            (authoritative); ``"expansion"`` uses the moment expansion with
            the given or analytic moments.
    """
    _check_order(l, even=True)
    if method == "direct":
        var = quadrature_variance_l(psi, l)
    elif method == "expansion":
        var = quadrature_variance_expansion(_provider(psi, moments), l)
    else:
        raise ValueError(f"unknown method {method!r}")
    base = pochhammer_half(l)
    return _report("hong_mandel", l, (var - base) / base, psi)


def klyshko_value(p: np.ndarray, z: int) -> float:
    return (z + 2) * p[z] * p[z + 2] - (z + 1) * p[z + 1] ** 2


def klyshko(psi: FockAmplitudes, z: int, moments=None) -> WitnessReport:
    """Klyshko's three-point criterion ``B(z)``."""
    if z < 0:
        raise DomainError("photon number z must be nonnegative")
    p = _provider(psi, moments).probabilities(z + 2)
    return _report("klyshko", z, klyshko_value(p, z), psi)


def klyshko_profile(psi: FockAmplitudes, z_max: int | None = None) -> np.ndarray:
    """``B(z)`` for ``z = 0 .. z_max`` (defaults to the stored support)."""
    if z_max is None:
        z_max = psi.max_photon
    p = Moments(psi).probabilities(z_max + 2)
    return np.array([klyshko_value(p, z) for z in range(z_max + 1)])


def _hankel3(s):
    return np.array([[1.0, s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]])


def agarwal_tara(psi: FockAmplitudes, moments=None) -> WitnessReport:
    """``A_3 = det m / (det mu - det m)`` with factorial moments
    ``m_i = <a^dagger^i a^i>`` and number moments ``mu_i = <N^i>``."""
    mom = _provider(psi, moments)
    m = [1.0] + [mom(i, i).real for i in range(1, 5)]
    mu = [1.0] + [mom.number_moment(i) for i in range(1, 5)]
    det_m = np.linalg.det(_hankel3(m))
    det_mu = np.linalg.det(_hankel3(mu))
    denom = det_mu - det_m
    scale = max(1.0, abs(det_mu), abs(det_m))
    if abs(denom) < DENOMINATOR_TOL * scale:
        return _report("agarwal_tara", 0, math.nan, psi, {DENOMINATOR_SMALL})
    return _report("agarwal_tara", 0, det_m / denom, psi)


def vogel(psi: FockAmplitudes, moments=None) -> WitnessReport:
    """Determinant ``dv`` of the 3x3 moment matrix in ``1, a, a^dagger``."""
    mom = _provider(psi, moments)
    a1 = mom(0, 1)
    ad1 = mom(1, 0)
    n1 = mom(1, 1)
    a2 = mom(0, 2)
    ad2 = mom(2, 0)
    v = np.array([[1.0, a1, ad1], [ad1, n1, ad2], [a1, a2, n1]], dtype=complex)
    det = np.linalg.det(v)
    value, clean = _real(det, scale=abs(n1) ** 2)
    return _report("vogel", 0, value, psi, () if clean else {IMAGINARY_RESIDUE})


def evaluate(psi: FockAmplitudes, criterion: str, argument: int = 0, moments=None) -> WitnessReport:
    """Dispatch by criterion name; ``argument`` is ``l`` or ``z``."""
    if criterion == "antibunching":
        return antibunching(psi, argument, moments)
    if criterion == "hosps":
        return hosps(psi, argument, moments)
    if criterion == "hong_mandel":
        if moments is not None:
            return hong_mandel(psi, argument, moments, method="expansion")
        return hong_mandel(psi, argument)
    if criterion == "klyshko":
        return klyshko(psi, argument, moments)
    if criterion == "agarwal_tara":
        return agarwal_tara(psi, moments)
    if criterion == "vogel":
        return vogel(psi, moments)
    raise DomainError(f"unknown criterion {criterion!r}; expected one of {', '.join(CRITERIA)}")
