import math

import numpy as np
import pytest
from scipy.linalg import expm

from pasdfs import StateSpec, dfs_coefficients, pasdfs_amplitudes
from pasdfs.engineering import coherent_amplitudes
from pasdfs.errors import AnnihilationError, TruncationError
from pasdfs.fock import (FockAmplitudes, apply_add_subtract_oracle, displace_oracle,
                         displacement_matrix, expectation_oracle, expm_taylor, fock_state,
                         ladder_lower, ladder_raise, oracle_dim, pasdfs_oracle)

from conftest import grid_specs


def coherent(alpha, size=60):
    return FockAmplitudes(0, coherent_amplitudes(alpha, size))


class TestLadder:
    def test_lower_on_one(self):
        a = ladder_lower(2)
        assert np.array_equal(a @ np.array([0, 1]), np.array([1, 0]))

    def test_annihilates_vacuum(self):
        a = ladder_lower(6)
        vac = np.zeros(6)
        vac[0] = 1
        assert np.array_equal(a @ vac, np.zeros(6))

    def test_number_operator(self):
        dim = 8
        num = ladder_raise(dim) @ ladder_lower(dim)
        for w in range(dim - 1):
            e = np.zeros(dim)
            e[w] = 1
            assert np.allclose(num @ e, w * e, atol=0)

    def test_matrix_elements_exact(self):
        a = ladder_lower(10)
        for w in range(9):
            assert a[w, w + 1] == math.sqrt(w + 1)
        assert np.count_nonzero(a) == 9

    def test_commutator_on_interior(self):
        dim = 12
        a, ad = ladder_lower(dim), ladder_raise(dim)
        comm = a @ ad - ad @ a - np.eye(dim)
        # only the top row/column is spoiled by truncation
        assert np.max(np.abs(comm[:-1, :-1])) < 1e-14
        assert abs(comm[-1, -1]) > 1


class TestExpm:
    @pytest.mark.parametrize("alpha", [0.3, 1 + 1j, 2.5 - 0.7j])
    def test_against_scipy(self, alpha):
        a = ladder_lower(40)
        A = alpha * a.conj().T - np.conj(alpha) * a
        assert np.max(np.abs(expm_taylor(A) - expm(A))) < 1e-12

    def test_unitary(self):
        D = displacement_matrix(1.3 - 0.4j, 50)
        assert np.max(np.abs(D.conj().T @ D - np.eye(50))) < 1e-12


class TestDisplaceOracle:
    def test_zero_is_identity(self):
        psi = FockAmplitudes(0, [0.6, 0.8j])
        out = displace_oracle(0, psi)
        assert np.allclose(out.to_dense()[:2], psi.amps, atol=1e-15)

    def test_vacuum_to_coherent(self):
        out = displace_oracle(1.0, fock_state(0))
        w = np.arange(out.amps.size)
        expected = np.exp(-0.5) / np.sqrt([float(math.factorial(int(v))) for v in w])
        assert np.max(np.abs(out.amps - expected)) < 1e-12

    def test_matches_closed_form(self, tol):
        alpha = 0.8 + 0.2j
        oracle = displace_oracle(alpha, fock_state(2))
        analytic = dfs_coefficients(alpha, 2)
        dim = max(oracle.max_photon, analytic.max_photon) + 1
        assert np.max(np.abs(oracle.to_dense(dim) - analytic.to_dense(dim))) < tol

    def test_dim_rule(self):
        assert oracle_dim(2, 3) >= 4 + 3 + 6 * math.sqrt(7) + 20

    @pytest.mark.parametrize("alpha, n", [(0.5, 0), (2, 3), (3 - 1j, 5)])
    def test_norm_preserved(self, alpha, n):
        out = displace_oracle(alpha, fock_state(n))
        assert abs(out.norm - 1) < 1e-8
        assert out.meta["norm_loss"] < 1e-8

    def test_leak_raises_without_retries(self):
        with pytest.raises(TruncationError, match="try dim"):
            displace_oracle(3.0, fock_state(0), dim=8, retries=0)

    def test_retry_doubles(self):
        out = displace_oracle(2.0, fock_state(0), dim=10, retries=2)
        assert out.meta["dim"] in (20, 40)


class TestAddSubtractOracle:
    def test_add_to_vacuum(self):
        out = apply_add_subtract_oracle(fock_state(0), 1, 0)
        assert np.allclose(out.to_dense(3), [0, 1, 0])

    def test_subtract_from_coherent(self):
        psi = coherent(0.7 - 0.2j)
        out = apply_add_subtract_oracle(psi, 0, 1)
        n = psi.amps.size
        # a|alpha> = alpha|alpha>: equal up to the global phase alpha/|alpha|
        got = out.to_dense(n) * np.exp(-1j * np.angle(0.7 - 0.2j))
        assert np.max(np.abs(got[:n - 2] - psi.amps[:n - 2])) < 1e-12

    def test_matches_closed_form(self, tol):
        dfs = displace_oracle(0.5, fock_state(1), dim=60)
        out = apply_add_subtract_oracle(dfs, 2, 1)
        ref = pasdfs_amplitudes(StateSpec(2, 1, 1, 0.5))
        dim = max(out.max_photon, ref.max_photon) + 1
        assert np.max(np.abs(out.to_dense(dim) - ref.to_dense(dim))) < tol

    def test_annihilation(self):
        with pytest.raises(AnnihilationError):
            apply_add_subtract_oracle(fock_state(1), 0, 2)


class TestExpectationOracle:
    def test_coherent_number(self):
        alpha = 1.2 + 0.3j
        assert expectation_oracle(coherent(alpha), 1, 1) == pytest.approx(abs(alpha) ** 2, abs=1e-12)

    def test_fock_factorial_moment(self):
        assert expectation_oracle(fock_state(2), 2, 2) == pytest.approx(2.0)

    def test_coherent_ladder(self):
        alpha = 0.4 - 0.9j
        assert expectation_oracle(coherent(alpha), 1, 0) == pytest.approx(np.conj(alpha), abs=1e-12)
        assert expectation_oracle(coherent(alpha), 0, 2) == pytest.approx(alpha ** 2, abs=1e-12)


@pytest.mark.parametrize("spec", grid_specs(alphas=(0j, 0.5, 1, 2)), ids=str)
def test_oracle_pipeline_equals_closed_form(spec, tol):
    analytic = pasdfs_amplitudes(spec)
    oracle = pasdfs_oracle(spec.k, spec.q, spec.n, spec.alpha)
    dim = max(analytic.max_photon, oracle.max_photon) + 1
    assert np.max(np.abs(analytic.to_dense(dim) - oracle.to_dense(dim))) < tol


class TestFockAmplitudes:
    def test_from_dense_trims(self):
        psi = FockAmplitudes.from_dense([0, 0, 3, 4j, 0])
        assert psi.offset == 2
        assert psi.amps.size == 2
        assert psi.norm == pytest.approx(1.0)

    def test_probability_outside_window(self):
        psi = FockAmplitudes(3, [1.0])
        assert psi.probability(2) == 0.0
        assert psi.probability(3) == 1.0
        assert psi.probability(40) == 0.0

    def test_immutable(self):
        psi = fock_state(1)
        with pytest.raises(ValueError):
            psi.amps[0] = 2

    def test_to_dense_too_small(self):
        with pytest.raises(ValueError):
            fock_state(4).to_dense(3)
