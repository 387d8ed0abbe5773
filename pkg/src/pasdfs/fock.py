"""Truncated Fock-space states and a dense-matrix oracle.

The oracle builds ladder operators as explicit matrices, displaces by an
operator exponential and applies ``a`` / ``a^dagger`` literally. It shares
no formulas with the closed-form construction in :mod:`pasdfs.engineering`
and is used as ground truth for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AnnihilationError, TruncationError

# mass allowed in the top levels of an oracle basis before it counts as leaked
NORM_LOSS_TOL = 1e-8
_TOP_BAND = 5
_MAX_RETRIES = 2


@dataclass(frozen=True)
class FockAmplitudes:
    """A normalized pure state stored on a window of photon numbers.

    ``amps[i]`` is the amplitude of ``|offset + i>``; every photon number
    outside the window has amplitude zero.
    """

    offset: int
    amps: np.ndarray
    truncation_eps: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a nonempty 1-D array")
        if self.offset < 0:
            raise ValueError("offset must be nonnegative")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def __len__(self):
        return self.amps.size

    @property
    def max_photon(self) -> int:
        return self.offset + self.amps.size - 1

    @property
    def photon_numbers(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.amps.size)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def probability(self, z: int) -> float:
        """Photon-number probability ``p_z``; zero outside the stored window."""
        i = z - self.offset
        if i < 0 or i >= self.amps.size:
            return 0.0
        return float(abs(self.amps[i]) ** 2)

    def to_dense(self, dim: int | None = None) -> np.ndarray:
        """Embed into a vector over photon numbers ``0 .. dim-1``."""
        if dim is None:
            dim = self.max_photon + 1
        if dim <= self.max_photon:
            raise ValueError(f"dim {dim} cannot hold photon number {self.max_photon}")
        vec = np.zeros(dim, dtype=complex)
        vec[self.offset:self.max_photon + 1] = self.amps
        return vec

    @classmethod
    def from_dense(cls, vec, truncation_eps=0.0, normalize=True, **meta):
        """Wrap a dense vector, trimming exact leading and trailing zeros."""
        vec = np.asarray(vec, dtype=complex)
        nz = np.flatnonzero(vec)
        if nz.size == 0:
            raise AnnihilationError("zero vector has no normalized representation")
        lo, hi = int(nz[0]), int(nz[-1])
        amps = vec[lo:hi + 1]
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(lo, amps, truncation_eps, dict(meta))

    def with_global_phase(self, phi: float) -> "FockAmplitudes":
        return FockAmplitudes(self.offset, self.amps * np.exp(1j * phi),
                              self.truncation_eps, dict(self.meta))


def fock_state(n: int) -> FockAmplitudes:
    return FockAmplitudes(n, np.array([1.0 + 0j]))


def ladder_lower(dim: int) -> np.ndarray:
    """Matrix of ``a`` on photon numbers ``0 .. dim-1``."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def ladder_raise(dim: int) -> np.ndarray:
    """Matrix of ``a^dagger`` on photon numbers ``0 .. dim-1``."""
    return ladder_lower(dim).conj().T


def expm_taylor(A: np.ndarray, tol: float = 1e-18) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a Taylor series.

    ``A`` is scaled by ``2**-s`` until its 1-norm is below 1/2, the series is
    summed until the next term is below ``tol`` relative to the partial sum
    (geometric tail bound), then the result is squared ``s`` times.
    """
    A = np.asarray(A, dtype=complex)
    norm = np.linalg.norm(A, 1)
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    B = A / 2.0 ** s
    bnorm = norm / 2.0 ** s
    result = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    term_norm = 1.0
    k = 0
    # remaining tail <= term_norm * bnorm / (k+1) / (1 - bnorm/(k+2)) <= 2 * term_norm * bnorm
    while term_norm * bnorm * 2 > tol:
        k += 1
        term = term @ B / k
        result += term
        term_norm = np.linalg.norm(term, 1)
        if k > 200:
            break
    for _ in range(s):
        result = result @ result
    return result


def oracle_dim(alpha: complex, n: int, extra: int = 0) -> int:
    """Smallest basis size meeting the tail-safety rule for ``D(alpha)|n>``."""
    x = abs(alpha) ** 2 + n
    return int(math.ceil(x + 6 * math.sqrt(x) + 20)) + extra


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    a = ladder_lower(dim)
    return expm_taylor(alpha * a.conj().T - np.conj(alpha) * a)


def displace_oracle(alpha: complex, psi_in: FockAmplitudes, dim: int | None = None,
                    retries: int = _MAX_RETRIES) -> FockAmplitudes:
    """``D(alpha)|psi_in>`` by dense operator exponential.

    The truncated generator is anti-Hermitian, so the result is always unit
    norm; leakage shows up instead as weight in the top levels of the basis.
    That weight is reported as ``meta['norm_loss']``. When it exceeds
    ``NORM_LOSS_TOL`` the basis is doubled, at most ``retries`` times.
    """
    if dim is None:
        dim = oracle_dim(alpha, psi_in.max_photon)
    dim = max(dim, psi_in.max_photon + _TOP_BAND + 1)
    for attempt in range(retries + 1):
        out = displacement_matrix(alpha, dim) @ psi_in.to_dense(dim)
        loss = float(np.sum(np.abs(out[-_TOP_BAND:]) ** 2))
        if loss <= NORM_LOSS_TOL:
            return FockAmplitudes(0, out, truncation_eps=loss,
                                  meta={"dim": dim, "norm_loss": loss})
        if attempt < retries:
            dim *= 2
    raise TruncationError(
        f"displacement by {alpha} leaks {loss:.2e} into the top levels at "
        f"dim={dim}; try dim >= {2 * dim}"
    )


def apply_add_subtract_oracle(psi: FockAmplitudes, k: int, q: int) -> FockAmplitudes:
    """Normalized ``a^q a^dagger^k |psi>`` by repeated matrix action.

    The basis is sized so that ``a^dagger`` never pushes weight off the top.
    """
    dim = psi.max_photon + k + 2
    vec = psi.to_dense(dim)
    a = ladder_lower(dim)
    ad = a.conj().T
    for _ in range(k):
        vec = ad @ vec
    for _ in range(q):
        vec = a @ vec
    norm = np.linalg.norm(vec)
    if norm < 1e-14:
        raise AnnihilationError(f"a^{q} a^dagger^{k} annihilates the state")
    return FockAmplitudes.from_dense(vec / norm, psi.truncation_eps, **psi.meta)


def expectation_oracle(psi: FockAmplitudes, t: int, j: int) -> complex:
    """``<psi| a^dagger^t a^j |psi>`` as ``(a^t psi)^dagger (a^j psi)``."""
    dim = psi.max_photon + 2
    a = ladder_lower(dim)
    left = psi.to_dense(dim)
    right = left.copy()
    for _ in range(t):
        left = a @ left
    for _ in range(j):
        right = a @ right
    return complex(np.vdot(left, right))


def pasdfs_oracle(k: int, q: int, n: int, alpha: complex, dim: int | None = None) -> FockAmplitudes:
    """Full oracle pipeline: Fock state, dense displacement, literal ladder action."""
    if dim is None:
        dim = oracle_dim(alpha, n, extra=2 * k + 10)
    dfs = displace_oracle(alpha, fock_state(n), dim)
    return apply_add_subtract_oracle(dfs, k, q)
