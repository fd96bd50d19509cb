import logging

import numpy as np
import pytest

from oscnl.analytic import one_excitation_amplitudes
from oscnl.dynamics import (
    TimeGrid,
    evolve_lindblad,
    evolve_unitary,
    lindblad_generator,
    steady_state_probe,
)
from oscnl.errors import IntegrationError, PhysicalityError
from oscnl.hilbert import (
    CompositeSpace,
    Operator,
    fock_state,
    mode_operator,
    number_operator,
    partial_trace,
)
from oscnl.models import TripartiteParams, build_lindblad_ops, build_tripartite_hamiltonian
from oscnl.quantify import negativity

from conftest import random_pure

# final negativity of the fig6a setting, frozen after the step-halving oracle agreed
FIG6A_PLATEAU = 0.103553390570


def single_mode(dim=4):
    return CompositeSpace.from_dims((dim,), ("a",))


class TestTimeGrid:
    def test_uniform(self):
        g = TimeGrid(0.0, 2.0, 5)
        np.testing.assert_allclose(g.times, [0, .5, 1, 1.5, 2])
        assert g.step == 0.5

    def test_invalid(self):
        with pytest.raises(ValueError):
            TimeGrid(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            TimeGrid(1.0, 1.0, 5)


class TestUnitary:
    def test_number_phase(self):
        sp = single_mode()
        H = 1.3 * number_operator(sp, "a")
        traj = evolve_unitary(H, fock_state(sp, (1,)), TimeGrid(0, 2, 11))
        for t, s in zip(traj.times, traj.states):
            assert s.amplitudes[1] == pytest.approx(np.exp(-1.3j * t), abs=1e-14)

    def test_beta0_mediator_population(self):
        p = TripartiteParams(beta=0.0)
        H = build_tripartite_hamiltonian(p)
        traj = evolve_unitary(H, fock_state(p.space, (1, 0, 0)), TimeGrid(0, 10, 101))
        i = p.space.index((0, 0, 1))
        pop = np.array([abs(s.amplitudes[i]) ** 2 for s in traj.states])
        np.testing.assert_allclose(pop, np.sin(np.sqrt(2) * traj.times) ** 2 / 2, atol=1e-12)

    def test_against_one_excitation_closed_form(self):
        p = TripartiteParams(beta=0.5)
        H = build_tripartite_hamiltonian(p, "dressed")
        grid = TimeGrid(0, 20, 200)
        traj = evolve_unitary(H, fock_state(p.space, (1, 0, 0)), grid)
        amps = one_excitation_amplitudes(0.5, 1.0, grid.times)
        for k, s in enumerate(traj.states):
            assert abs(abs(amps.state(p, k).overlap(s)) - 1) < 1e-8

    def test_norm_and_energy_conserved(self, rng):
        p = TripartiteParams(beta=0.37, dims=(3, 3, 2))
        H = build_tripartite_hamiltonian(p)
        traj = evolve_unitary(H, random_pure(p.space, rng), TimeGrid(0, 30, 61))
        e0 = traj.states[0].expect(H)
        for s in traj.states:
            assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-10
            assert abs(s.expect(H) - e0) < 1e-10

    def test_non_hermitian(self):
        sp = single_mode()
        with pytest.raises(PhysicalityError):
            evolve_unitary(mode_operator(sp, "a"), fock_state(sp, (0,)), TimeGrid(0, 1, 3))

    def test_density_input(self, rng):
        p = TripartiteParams(beta=0.2, dims=(3, 3, 2))
        H = build_tripartite_hamiltonian(p)
        psi = random_pure(p.space, rng)
        grid = TimeGrid(0, 3, 7)
        pure = evolve_unitary(H, psi, grid)
        mixed = evolve_unitary(H, psi.density(), grid)
        for a, b in zip(pure.states, mixed.states):
            np.testing.assert_allclose(np.outer(a.amplitudes, a.amplitudes.conj()), b.matrix,
                                       atol=1e-12)


class TestLindblad:
    def test_amplitude_damping(self):
        sp = single_mode(3)
        H = Operator(sp, np.zeros((3, 3)))
        gamma = 0.7
        traj = evolve_lindblad(H, [(gamma, mode_operator(sp, "a"))], fock_state(sp, (1,)),
                               TimeGrid(0, 5, 51), {"n": lambda r: r.expect(number_operator(sp, "a")).real})
        np.testing.assert_allclose(traj.scalars["n"], np.exp(-gamma * traj.times), atol=1e-8)
        assert traj.info["max_trace_drift"] < 1e-8

    def test_generator_matches_rhs(self, rng):
        from oscnl.dynamics import _lindblad_rhs
        p = TripartiteParams(beta=0.5, gamma_a=.1, gamma_c=.4, dims=(3, 2, 2))
        H = build_tripartite_hamiltonian(p)
        ops = build_lindblad_ops(p)
        psi = random_pure(p.space, rng)
        rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
        jumps = [(r, L.matrix, L.matrix.conj().T @ L.matrix) for r, L in ops]
        direct = _lindblad_rhs(H.matrix, jumps, rho)
        vec = (lindblad_generator(H, ops) @ rho.reshape(-1)).reshape(rho.shape)
        np.testing.assert_allclose(vec, direct, atol=1e-13)

    def test_zero_rates_reduce_to_unitary(self):
        p = TripartiteParams(beta=0.5)
        H = build_tripartite_hamiltonian(p)
        psi = fock_state(p.space, (2, 0, 0))
        grid = TimeGrid(0, 10, 51)
        u = evolve_unitary(H, psi, grid)
        l = evolve_lindblad(H, [], psi.density(), grid)
        for a, b in zip(u.states, l.states):
            assert np.max(np.abs(np.outer(a.amplitudes, a.amplitudes.conj()) - b.matrix)) < 1e-8

    def test_matrix_rk4_branch_matches_superoperator(self):
        # dims (4, 4, 4) exceed the dense-superoperator limit and take the matrix RK4 path
        small = TripartiteParams(beta=0.5, gamma_c=2.0, dims=(4, 4, 2))
        big = TripartiteParams(beta=0.5, gamma_c=2.0, dims=(4, 4, 4))
        grid = TimeGrid(0, 4, 41)
        out = []
        for p in (small, big):
            traj = evolve_lindblad(build_tripartite_hamiltonian(p), build_lindblad_ops(p),
                                   fock_state(p.space, (1, 0, 0)), grid,
                                   {"n": lambda r: negativity(partial_trace(r, "ab"), ["b"])})
            out.append(traj.scalars["n"])
        # one excitation never reaches c's second level, so the runs agree
        np.testing.assert_allclose(out[0], out[1], atol=1e-6)

    def test_step_halving_failure_raises(self):
        sp = single_mode(3)
        H = 50.0 * number_operator(sp, "a")
        with pytest.raises(IntegrationError) as exc:
            evolve_lindblad(H, [(1.0, mode_operator(sp, "a"))], fock_state(sp, (1,)),
                            TimeGrid(0, 1, 3), tol=1e-30, max_refinements=2)
        assert exc.value.worst_error is not None

    def test_symmetrization_logged(self, caplog):
        sp = single_mode(3)
        H = number_operator(sp, "a")
        with caplog.at_level(logging.DEBUG, logger="oscnl.dynamics"):
            traj = evolve_lindblad(H, [(0.3, mode_operator(sp, "a"))], fock_state(sp, (2,)),
                                   TimeGrid(0, 2, 5))
        assert "max_symmetrization_correction" in traj.info
        assert traj.info["max_symmetrization_correction"] < 1e-10
        assert any("lindblad" in r.message for r in caplog.records)

    def test_fig6a_step_halving_oracle(self):
        p = TripartiteParams(beta=0.5, gamma_c=2.0)
        H, ops = build_tripartite_hamiltonian(p), build_lindblad_ops(p)
        grid = TimeGrid(0, 200, 2001)
        obs = {"N": lambda r: negativity(partial_trace(r, "ab"), ["b"])}
        rho0 = fock_state(p.space, (2, 0, 0))
        default = evolve_lindblad(H, ops, rho0, grid, obs)
        halved = evolve_lindblad(H, ops, rho0, grid, obs, substeps=2 * default.info["substeps"])
        assert np.max(np.abs(default.scalars["N"] - halved.scalars["N"])) < 1e-4
        assert default.info["min_eigenvalue"] >= -1e-8
        converged, finals = steady_state_probe(default)
        assert converged
        assert finals["N"] == pytest.approx(FIG6A_PLATEAU, abs=1e-8)


class TestSteadyState:
    def test_decay_to_vacuum(self):
        p = TripartiteParams(gamma_a=1.0, gamma_b=1.0, gamma_c=1.0, dims=(2, 2, 2))
        H = build_tripartite_hamiltonian(p)
        traj = evolve_lindblad(H, build_lindblad_ops(p), fock_state(p.space, (1, 0, 0)),
                               TimeGrid(0, 60, 301),
                               {"N": lambda r: negativity(partial_trace(r, "ab"), ["b"])})
        converged, finals = steady_state_probe(traj)
        assert converged and finals["N"] < 1e-10

    def test_unconverged_is_reported(self):
        p = TripartiteParams(beta=0.5)
        traj = evolve_unitary(build_tripartite_hamiltonian(p), fock_state(p.space, (1, 0, 0)),
                              TimeGrid(0, 20, 201))
        converged, finals = steady_state_probe(traj)
        assert not converged and finals["max_step_change"] > 1e-3
