import cmath
import math
import warnings

import numpy as np
import pytest

from pasdfs import StateSpec, pasdfs_amplitudes
from pasdfs.errors import DomainError
from pasdfs.fock import FockAmplitudes, displace_oracle, fock_state
from pasdfs.husimi import auto_window, find_zeros, q_function, q_grid, refine_zero
from pasdfs.moments import Moments


def coherent(alpha):
    return pasdfs_amplitudes(StateSpec(0, 0, 0, alpha))


class TestQFunction:
    def test_vacuum_origin(self):
        assert abs(q_function(fock_state(0), 0) - 1 / math.pi) < 1e-12

    def test_one_photon_origin(self):
        assert abs(q_function(fock_state(1), 0)) < 1e-14

    @pytest.mark.parametrize("n", [0, 1, 4])
    def test_fock_closed_form(self, n):
        beta = 1.3 - 0.6j
        r2 = abs(beta) ** 2
        expected = math.exp(-r2) * r2 ** n / math.factorial(n) / math.pi
        assert q_function(fock_state(n), beta) == pytest.approx(expected, rel=1e-12)

    def test_coherent_peak(self):
        alpha = 1.2 + 0.7j
        psi = coherent(alpha)
        assert q_function(psi, alpha) == pytest.approx(1 / math.pi, abs=1e-12)
        grid = q_grid(psi, window=(-2.8, 5.2, -3.3, 4.7), nx=81, ny=81)
        iy, ix = np.unravel_index(np.argmax(grid.values), grid.values.shape)
        assert grid.re[ix] == pytest.approx(alpha.real, abs=0.05)
        assert grid.im[iy] == pytest.approx(alpha.imag, abs=0.05)

    def test_overlap_with_oracle_coherent_states(self):
        psi = pasdfs_amplitudes(StateSpec(2, 1, 1, 0.7 * cmath.exp(0.3j)))
        rng = np.random.default_rng(7)
        betas = rng.uniform(-3, 3, 25) + 1j * rng.uniform(-3, 3, 25)
        for beta in betas:
            ket = displace_oracle(beta, fock_state(0), dim=120)
            dim = max(ket.max_photon, psi.max_photon) + 1
            expected = abs(np.vdot(ket.to_dense(dim), psi.to_dense(dim))) ** 2 / math.pi
            assert abs(q_function(psi, beta) - expected) < 1e-10

    def test_nonnegative(self):
        psi = pasdfs_amplitudes(StateSpec(3, 1, 2, 1.5j))
        grid = q_grid(psi)
        assert grid.values.min() >= -1e-14

    def test_global_phase(self):
        psi = pasdfs_amplitudes(StateSpec(1, 1, 2, 0.8))
        B = np.linspace(-3, 3, 13)[:, None] + 1j * np.linspace(-3, 3, 13)[None, :]
        assert np.allclose(q_function(psi, B), q_function(psi.with_global_phase(1.7), B),
                           atol=1e-15)

    def test_large_beta_stays_finite(self):
        psi = coherent(10.0)
        assert q_function(psi, 10.0) == pytest.approx(1 / math.pi, rel=1e-10)
        # exact value ~1e-208; cancellation in the overlap sum bounds the absolute error
        assert 0 <= q_function(psi, -11.9) < 1e-28

    def test_beta_bound(self):
        with pytest.raises(DomainError):
            q_function(fock_state(0), 12.5)


class TestGrid:
    def test_coherent_mass(self):
        assert abs(q_grid(coherent(1.0)).mass() - 1) < 1e-4

    @pytest.mark.parametrize("spec", [StateSpec(2, 1, 1, 0.5), StateSpec(0, 2, 3, 1.5j),
                                      StateSpec(3, 0, 0, 2.0)], ids=str)
    def test_auto_window_mass(self, spec):
        assert abs(q_grid(pasdfs_amplitudes(spec)).mass() - 1) < 1e-4

    def test_auto_window_centre(self):
        psi = pasdfs_amplitudes(StateSpec(1, 0, 1, 1 + 1j))
        x0, x1, y0, y1 = auto_window(psi)
        centre = Moments(psi)(0, 1)
        assert (x0 + x1) / 2 == pytest.approx(centre.real)
        assert (y1 - y0) / 2 == pytest.approx(4 + math.sqrt(Moments(psi)(1, 1).real))

    def test_narrow_window_warns(self):
        with pytest.warns(RuntimeWarning, match="mass"):
            q_grid(coherent(2.0), window=(-0.5, 0.5, -0.5, 0.5))

    def test_auto_window_does_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            q_grid(pasdfs_amplitudes(StateSpec(2, 0, 3, 2.0)))

    @pytest.mark.parametrize("kwargs", [{"nx": 32}, {"ny": 10}, {"window": "wide"},
                                        {"window": (1, 0, 0, 1)}])
    def test_bad_arguments(self, kwargs):
        with pytest.raises(ValueError):
            q_grid(fock_state(0), **kwargs)


class TestZeros:
    def test_engineered_state_has_zero(self):
        psi = pasdfs_amplitudes(StateSpec.polar(2, 1, 1, 0.1, math.pi / 4))
        grid = q_grid(psi)
        assert grid.near_zero_mask().sum() >= 1
        zeros = find_zeros(psi, grid)
        assert len(zeros) >= 1
        # no vacuum component, so the origin is an exact zero
        assert min(abs(z) for z in zeros) < 1e-8
        for z in zeros:
            assert q_function(psi, z) < 1e-12 * grid.peak

    def test_one_photon_zero_at_origin(self):
        psi = fock_state(1)
        zeros = find_zeros(psi, q_grid(psi))
        assert len(zeros) == 1 and abs(zeros[0]) < 1e-12

    def test_coherent_has_none(self):
        psi = coherent(0.8 + 0.2j)
        assert find_zeros(psi, q_grid(psi)) == []

    def test_refine_converges_to_known_zero(self):
        # f(z) = (|0> - |2>)/sqrt(2) gives 1 - z^2/sqrt(2): zeros at z = +-2^(1/4)
        psi = FockAmplitudes(0, np.array([1, 0, -1]) / math.sqrt(2))
        beta = refine_zero(psi, 1.0 + 0.1j)
        assert beta == pytest.approx(2 ** 0.25, abs=1e-12)


class TestEllipse:
    SPEC = StateSpec.polar(0, 2, 1, math.sqrt(2), math.pi / 4)

    @staticmethod
    def q_variance_along(psi, phi):
        # Q smooths by the vacuum: Var_Q(Re(beta e^{-i phi})) = Var(X_phi)/2 + 1/4
        mom = Moments(psi)
        a1 = mom(0, 1) * cmath.exp(-1j * phi)
        a2 = mom(0, 2) * cmath.exp(-2j * phi)
        n1 = mom(1, 1).real
        x2 = (2 * a2.real + 2 * n1 + 1) / 2
        x1 = math.sqrt(2) * a1.real
        return (x2 - x1 ** 2) / 2 + 0.25

    def test_covariance_matches_moments(self):
        psi = pasdfs_amplitudes(self.SPEC)
        grid = q_grid(psi, nx=160, ny=160)
        _, cov = grid.moments()
        for phi in (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4):
            u = np.array([math.cos(phi), math.sin(phi)])
            assert u @ cov @ u == pytest.approx(self.q_variance_along(psi, phi), abs=1e-6)

    def test_axis_orientation(self):
        psi = pasdfs_amplitudes(self.SPEC)
        grid = q_grid(psi, nx=160, ny=160)
        _, cov = grid.moments()
        vals = np.linalg.eigvalsh(cov)
        assert vals[1] - vals[0] > 0.1
        # the pi/4 direction carries the smallest spread: squeezed along it
        assert grid.major_axis_angle() == pytest.approx(3 * math.pi / 4, abs=1e-6)
        assert self.q_variance_along(psi, math.pi / 4) < 0.5
