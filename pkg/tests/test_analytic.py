from math import factorial

import numpy as np
import pytest
from scipy.linalg import expm

from oscnl.analytic import (
    MirrorJointState,
    eta_tilde,
    evolution_operator,
    mirror_joint_state,
    mirror_reduced_density,
    one_excitation_amplitudes,
    transformed_evolution_operator,
)
from oscnl.dynamics import TimeGrid, evolve_unitary
from oscnl.errors import TruncationError
from oscnl.hilbert import coherent_state, partial_trace, tensor
from oscnl.models import OptomechParams, build_optomech_hamiltonian, build_transformed_optomech
from oscnl.quantify import purity


def block_oracle(beta, kappa, t):
    H = np.array([[beta, 0, kappa], [0, beta, kappa], [kappa, kappa, 0]], dtype=complex)
    return expm(-1j * H * t) @ np.array([1, 0, 0])


class TestOneExcitation:
    def test_initial(self):
        # both forms start exactly in |100>: alpha2(0) = -1/2 + 1/2 cancels term by term
        for form in ("corrected", "printed"):
            a = one_excitation_amplitudes(0.5, 1.0, 0.0, form=form)
            assert (a.alpha1, a.alpha2, a.alpha3) == (1, 0, 0)

    def test_beta0_limit(self):
        t = np.linspace(0, 20, 101)
        a = one_excitation_amplitudes(0.0, 1.0, t)
        c = np.cos(np.sqrt(2) * t)
        np.testing.assert_allclose(a.alpha1, (1 + c) / 2, atol=1e-15)
        np.testing.assert_allclose(a.alpha2, (-1 + c) / 2, atol=1e-15)
        np.testing.assert_allclose(a.alpha3, -1j / np.sqrt(2) * np.sin(np.sqrt(2) * t), atol=1e-15)

    @pytest.mark.parametrize("beta,t", [(0.5, 1.0), (1.0, 3.7), (0.25, 12.0)])
    def test_against_3x3_expm(self, beta, t):
        a = one_excitation_amplitudes(beta, 1.0, t)
        v = np.array([a.alpha1, a.alpha2, a.alpha3], dtype=complex)
        assert abs(abs(np.vdot(block_oracle(beta, 1.0, t), v)) - 1) < 1e-8

    def test_printed_form_is_normalized_but_off_trajectory(self):
        t = np.linspace(0, 20, 200)
        printed = one_excitation_amplitudes(0.5, 1.0, t, form="printed")
        overlaps = [abs(np.vdot(block_oracle(0.5, 1.0, tk),
                                [printed.alpha1[k], printed.alpha2[k], printed.alpha3[k]]))
                    for k, tk in enumerate(t)]
        assert min(overlaps) < 0.1

    def test_normalization_grid(self):
        for beta in np.linspace(0, 2, 50):
            a = one_excitation_amplitudes(beta, 1.0, np.linspace(0, 20, 50))
            norm = np.abs(a.alpha1) ** 2 + np.abs(a.alpha2) ** 2 + np.abs(a.alpha3) ** 2
            assert np.max(np.abs(norm - 1)) < 1e-12

    def test_K1(self):
        assert one_excitation_amplitudes(0.5, 1.0, 0.0).K1 == pytest.approx(np.sqrt(8.25))

    def test_kappa_guard(self):
        with pytest.raises(ValueError):
            one_excitation_amplitudes(0.5, 0.0, 1.0)


P_FIG7 = OptomechParams.from_ratios(1e-4, 1e-2)


class TestEtaTilde:
    def test_values(self):
        p = P_FIG7
        assert eta_tilde(0.3, 2, p, 0.0) == 0.3
        assert eta_tilde(0.3, 2, p, 2 * np.pi) == pytest.approx(0.3, abs=1e-15)
        assert eta_tilde(0.0, 1, p, np.pi) == pytest.approx(2e-2, abs=1e-15)

    def test_negative_n(self):
        with pytest.raises(ValueError):
            eta_tilde(0.0, -1, P_FIG7, 1.0)


class TestMirrorState:
    def test_t0_is_product(self):
        spec = MirrorJointState(1.0, 0.5, P_FIG7, 0.0)
        n, m = spec.resolved_dims()
        psi = mirror_joint_state(spec)
        ref = tensor(coherent_state(n, 1.0, "k"), coherent_state(m, 0.5, "a"))
        assert abs(psi.overlap(ref)) == pytest.approx(1.0, abs=1e-12)

    def test_reduced_matches_partial_trace(self):
        spec = MirrorJointState(1.0, 0.0, P_FIG7, np.pi / 4)
        rho = mirror_reduced_density(spec)
        oracle = partial_trace(mirror_joint_state(spec), ["a"])
        np.testing.assert_allclose(rho.matrix, oracle.matrix, atol=1e-10)

    def test_beta0_coherent_mixture(self):
        p = OptomechParams.from_ratios(0.0, 1e-2)
        spec = MirrorJointState(1.0, 0.0, p, 1.3)
        rho = mirror_reduced_density(spec)
        n_max, m_max = spec.resolved_dims()
        oracle = np.zeros((m_max, m_max), dtype=complex)
        for n in range(n_max):
            w = np.exp(-1.0) / factorial(n)
            v = coherent_state(m_max, eta_tilde(0.0, n, p, 1.3)).amplitudes
            oracle += w * np.outer(v, v.conj())
        np.testing.assert_allclose(rho.matrix, oracle / np.trace(oracle), atol=1e-10)

    def test_vacuum_cavity_is_pure(self):
        rho = mirror_reduced_density(MirrorJointState(0.0, 0.4, P_FIG7, 2.0))
        assert purity(rho) == pytest.approx(1.0, abs=1e-12)

    def test_t0_coherent_projector(self):
        spec = MirrorJointState(1.0, 0.4, P_FIG7, 0.0)
        m = spec.resolved_dims()[1]
        v = coherent_state(m, 0.4).amplitudes
        np.testing.assert_allclose(mirror_reduced_density(spec).matrix, np.outer(v, v.conj()),
                                   atol=1e-12)

    def test_separable_at_full_periods(self):
        for zt in (2 * np.pi, 4 * np.pi):
            assert purity(mirror_reduced_density(MirrorJointState(1.0, 0.0, P_FIG7, zt))) \
                == pytest.approx(1.0, abs=1e-8)
        assert purity(mirror_reduced_density(MirrorJointState(1.0, 0.0, P_FIG7, np.pi))) < 1 - 1e-6

    def test_periodicity(self):
        # Kerr phases exp(-i beta t m^2) do not repeat after 2 pi, so periodicity is exact at beta = 0
        p0 = OptomechParams.from_ratios(0.0, 1e-2)
        c = mirror_reduced_density(MirrorJointState(1.0, 0.2, p0, 0.9, m_max=24))
        d = mirror_reduced_density(MirrorJointState(1.0, 0.2, p0, 0.9 + 2 * np.pi, m_max=24))
        np.testing.assert_allclose(c.matrix, d.matrix, atol=1e-8)

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            MirrorJointState(2.0, 0.0, P_FIG7, 1.0, n_max=5).resolved_dims()


class TestEvolutionOperators:
    p = OptomechParams.from_ratios(1e-4, 1e-2, dims=(12, 16))

    def test_transformed_matches_expm(self):
        t = 2.3
        U = transformed_evolution_operator(self.p, t).matrix
        E = np.diag(np.exp(-1j * np.diag(build_transformed_optomech(self.p).matrix) * t))
        np.testing.assert_allclose(U, E, atol=1e-12)

    def test_transformed_identity_and_readoff(self):
        np.testing.assert_allclose(transformed_evolution_operator(self.p, 0.0).matrix,
                                   np.eye(self.p.space.dim), atol=1e-15)
        t = 1.7
        i = self.p.space.index((2, 0))
        phase = np.angle(transformed_evolution_operator(self.p, t).matrix[i, i])
        expected = -2 * self.p.omega_k * t + 4 * self.p.g_k ** 2 * self.p.omega_m * t / self.p.zeta ** 2
        assert np.angle(np.exp(1j * (phase - expected))) == pytest.approx(0.0, abs=1e-12)

    def test_product_form_identity_and_unitarity(self):
        np.testing.assert_allclose(evolution_operator(self.p, 0.0).matrix,
                                   np.eye(self.p.space.dim), atol=1e-12)
        for t in np.linspace(0, 2 * np.pi, 7):
            U = evolution_operator(self.p, t).matrix
            assert np.max(np.abs(U.conj().T @ U - np.eye(len(U)))) < 1e-10

    def test_product_form_free_limit(self):
        p = OptomechParams(omega_k=3.0, omega_m=1.0, beta=0.0, g_k=0.0, dims=(3, 4))
        t = 0.8
        U = evolution_operator(p, t).matrix
        diag = np.exp(-1j * t * (3.0 * p.space.number_grid("k") + p.space.number_grid("a")))
        np.testing.assert_allclose(U, np.diag(diag), atol=1e-14)

    def test_product_form_matches_closed_form(self):
        alpha = 1.0
        psi0 = tensor(coherent_state(12, alpha, "k", tol=1e-8), coherent_state(16, 0.0, "a"))
        for t in np.linspace(0, 2 * np.pi, 9):
            spec = MirrorJointState(alpha, 0.0, self.p, t, n_max=12, m_max=16, tol=1e-8)
            closed = mirror_joint_state(spec)
            U = evolution_operator(self.p, t)
            psi = U.matrix @ psi0.amplitudes
            assert abs(np.vdot(closed.amplitudes, psi)) >= 1 - 1e-6

    def test_numeric_matches_closed_form(self):
        alpha = 1.0
        psi0 = tensor(coherent_state(12, alpha, "k", tol=1e-8), coherent_state(16, 0.0, "a"))
        grid = TimeGrid(0, 2 * np.pi, 9)
        traj = evolve_unitary(build_optomech_hamiltonian(self.p), psi0, grid)
        for t, s in zip(grid.times, traj.states):
            spec = MirrorJointState(alpha, 0.0, self.p, t, n_max=12, m_max=16, tol=1e-8)
            assert abs(mirror_joint_state(spec).overlap(s)) >= 1 - 1e-4

    def test_disagreement_grows_with_coupling(self):
        """Closed form vs exact propagation degrades as g/zeta grows; report, don't hide."""
        infid = []
        for g in (0.01, 0.05, 0.15):
            p = OptomechParams.from_ratios(1e-2, g, dims=(12, 24))
            psi0 = tensor(coherent_state(12, 1.0, "k", tol=1e-8), coherent_state(24, 0.0, "a"))
            t = np.pi / 2
            traj = evolve_unitary(build_optomech_hamiltonian(p), psi0, TimeGrid(0, t, 2))
            spec = MirrorJointState(1.0, 0.0, p, t, n_max=12, m_max=24, tol=1e-8)
            infid.append(1 - abs(mirror_joint_state(spec).overlap(traj.states[-1])))
        assert infid[0] < infid[1] < infid[2]
