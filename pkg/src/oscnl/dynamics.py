"""Time propagation: exact unitary evolution and Lindblad integration."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import IntegrationError, PhysicalityError
from .hilbert import (
    HERMITIAN_TOL,
    POSITIVITY_TOL,
    DensityMatrix,
    Operator,
    StateVector,
)

log = logging.getLogger(__name__)

SYMMETRIZATION_LIMIT = 1e-10
TRACE_DRIFT_LIMIT = 1e-8
# dense superoperator propagation up to this Hilbert dimension, matrix RK4 beyond
SUPEROPERATOR_MAX_DIM = 48


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("a time grid needs at least two points")
        if not self.t1 > self.t0:
            raise ValueError("t1 must exceed t0")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_points)

    @property
    def step(self) -> float:
        return (self.t1 - self.t0) / (self.n_points - 1)


@dataclass
class Trajectory:
    grid: TimeGrid
    states: list
    scalars: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.states) != self.grid.n_points:
            raise ValueError("one state per grid point is required")

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


def _observe(states, observables):
    if not observables:
        return {}
    return {name: np.array([float(f(s)) for s in states]) for name, f in observables.items()}


def _check_hermitian(H: Operator):
    err = H.hermiticity_error()
    if err > HERMITIAN_TOL:
        raise PhysicalityError(f"Hamiltonian is not Hermitian (max deviation {err:.3e})")


def evolve_unitary(H: Operator, psi0, grid: TimeGrid,
                   observables: Mapping[str, Callable] | None = None) -> Trajectory:
    """Propagate with ``exp(-i H t)`` from the Hermitian eigendecomposition of ``H``.

    ``psi0`` may be a :class:`StateVector` or a :class:`DensityMatrix`; the
    trajectory holds states of the same kind.
    """
    _check_hermitian(H)
    if psi0.space != H.space:
        raise ValueError("initial state and Hamiltonian live on different spaces")
    energies, V = np.linalg.eigh(H.matrix)
    times = grid.times - grid.t0
    states = []
    if isinstance(psi0, StateVector):
        c0 = V.conj().T @ psi0.amplitudes
        for t in times:
            states.append(StateVector(H.space, V @ (np.exp(-1j * energies * t) * c0)))
    else:
        r0 = V.conj().T @ psi0.matrix @ V
        for t in times:
            ph = np.exp(-1j * energies * t)
            r = V @ (ph[:, None] * r0 * ph.conj()[None, :]) @ V.conj().T
            states.append(DensityMatrix(H.space, 0.5 * (r + r.conj().T)))
    return Trajectory(grid, states, _observe(states, observables), {"method": "eigendecomposition"})


def lindblad_generator(H: Operator, dissipators) -> np.ndarray:
    """Superoperator acting on row-major ``vec(rho)``.

    ``d rho/dt = -i[H, rho] + sum (g/2)(2 L rho L^dag - L^dag L rho - rho L^dag L)``
    and ``vec(A X B) = (A kron B^T) vec(X)`` for row-major flattening.
    """
    d = H.space.dim
    eye = np.eye(d)
    h = H.matrix
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for rate, L in dissipators:
        l = L.matrix
        ldl = l.conj().T @ l
        gen += 0.5 * rate * (2.0 * np.kron(l, l.conj())
                             - np.kron(ldl, eye) - np.kron(eye, ldl.T))
    return gen


def _rk4_propagator(gen: np.ndarray, h: float) -> np.ndarray:
    """One classic RK4 step of ``dv/dt = gen v`` as a matrix (Horner form)."""
    n = gen.shape[0]
    eye = np.eye(n)
    hg = h * gen
    M = eye + hg / 4.0
    M = eye + (hg @ M) / 3.0
    M = eye + (hg @ M) / 2.0
    return eye + hg @ M


def _lindblad_rhs(h, jumps, rho):
    out = -1j * (h @ rho - rho @ h)
    for rate, l, ldl in jumps:
        out += 0.5 * rate * (2.0 * l @ rho @ l.conj().T - ldl @ rho - rho @ ldl)
    return out


def _integrate(H, dissipators, rho0, grid, substeps):
    """Fixed-step RK4 with ``substeps`` steps per grid interval; raw matrices."""
    d = H.space.dim
    h = grid.step / substeps
    out = [rho0.copy()]
    if d <= SUPEROPERATOR_MAX_DIM:
        P = np.linalg.matrix_power(_rk4_propagator(lindblad_generator(H, dissipators), h), substeps)
        v = rho0.reshape(-1)
        for _ in range(grid.n_points - 1):
            v = P @ v
            out.append(v.reshape(d, d))
        return out
    hm = H.matrix
    jumps = [(rate, L.matrix, L.matrix.conj().T @ L.matrix) for rate, L in dissipators]
    rho = rho0.copy()
    for _ in range(grid.n_points - 1):
        for _ in range(substeps):
            k1 = _lindblad_rhs(hm, jumps, rho)
            k2 = _lindblad_rhs(hm, jumps, rho + 0.5 * h * k1)
            k3 = _lindblad_rhs(hm, jumps, rho + 0.5 * h * k2)
            k4 = _lindblad_rhs(hm, jumps, rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(rho.copy())
    return out


def _min_eigenvalue(mats) -> float:
    stack = np.array(mats)
    herm = 0.5 * (stack + np.conj(np.swapaxes(stack, 1, 2)))
    return float(np.linalg.eigvalsh(herm).min())


def _initial_substeps(H, dissipators, grid):
    # ||L||_1 bounds the spectral radius; h * radius <= 1 sits well inside RK4 stability
    scale = 2.0 * float(np.max(np.abs(H.matrix).sum(axis=0)))
    for rate, L in dissipators:
        scale += 2.0 * rate * float(np.max(np.abs(L.matrix.conj().T @ L.matrix).sum(axis=0)))
    return max(1, math.ceil(grid.step * scale))


def evolve_lindblad(H: Operator, dissipators, rho0, grid: TimeGrid,
                    observables: Mapping[str, Callable] | None = None,
                    tol: float = 1e-6, max_refinements: int = 8,
                    substeps: int | None = None) -> Trajectory:
    """Integrate the Lindblad master equation with fixed-step classic RK4.

    The step is picked by halving: starting from a stability-safe step, the
    integration is repeated at half the step until the two runs differ by less
    than ``tol`` (max entry, over all grid points) and the finer run keeps every
    eigenvalue above ``-POSITIVITY_TOL``. The finer run is returned.
    Passing ``substeps`` skips the search and uses exactly that many RK4 steps
    per grid interval.

    Every output state is re-symmetrized, ``rho <- (rho + rho^dag)/2``; the
    largest correction is kept in ``info["max_symmetrization_correction"]``.
    """
    _check_hermitian(H)
    rho0 = rho0.density() if isinstance(rho0, StateVector) else rho0
    if rho0.space != H.space:
        raise ValueError("initial state and Hamiltonian live on different spaces")
    for rate, L in dissipators:
        if rate < 0:
            raise ValueError("dissipation rates must be non-negative")
        if L.space != H.space:
            raise ValueError("jump operator lives on a different space")

    m0 = np.array(rho0.matrix)
    info = {"method": "rk4"}
    if substeps is not None:
        raw = _integrate(H, dissipators, m0, grid, int(substeps))
        info["substeps"] = int(substeps)
    else:
        s = _initial_substeps(H, dissipators, grid)
        coarse = _integrate(H, dissipators, m0, grid, s)
        worst = np.inf
        for _ in range(max_refinements):
            fine = _integrate(H, dissipators, m0, grid, 2 * s)
            worst = max(float(np.max(np.abs(a - b))) for a, b in zip(coarse, fine))
            s *= 2
            if worst < tol and _min_eigenvalue(fine) >= -POSITIVITY_TOL:
                break
            coarse = fine
        else:
            raise IntegrationError(
                f"step halving did not reach tolerance {tol:g}; worst change {worst:.3e} "
                f"at {s} substeps per grid interval", worst_error=worst)
        raw = fine
        info["substeps"] = s
        info["halving_change"] = worst
    info["step"] = grid.step / info["substeps"]

    states = []
    max_corr = 0.0
    max_drift = 0.0
    for m in raw:
        sym = 0.5 * (m + m.conj().T)
        max_corr = max(max_corr, float(np.max(np.abs(sym - m))))
        max_drift = max(max_drift, abs(np.trace(sym).real - 1.0))
        states.append(DensityMatrix(H.space, sym))
    if max_corr > SYMMETRIZATION_LIMIT:
        log.warning("symmetrization correction %.3e exceeds %.0e", max_corr, SYMMETRIZATION_LIMIT)
    if max_drift > TRACE_DRIFT_LIMIT:
        raise IntegrationError(f"trace drifted by {max_drift:.3e}", worst_error=max_drift)
    info["max_symmetrization_correction"] = max_corr
    info["max_trace_drift"] = max_drift
    info["min_eigenvalue"] = min(s.min_eigenvalue for s in states)
    log.debug("lindblad: %s", info)
    return Trajectory(grid, states, _observe(states, observables), info)


def steady_state_probe(trajectory: Trajectory, window: float = 0.1,
                       threshold: float = 1e-7):
    """Check that the state has stopped moving over the final ``window`` of the grid.

    Returns ``(converged, finals)`` where ``finals`` maps every scalar series of
    the trajectory to its last value, plus ``max_step_change`` (the largest
    max-entry change between consecutive states inside the window).
    """
    n = len(trajectory.states)
    start = max(0, min(n - 2, int(math.floor((1.0 - window) * (n - 1)))))
    change = 0.0
    for prev, cur in zip(trajectory.states[start:-1], trajectory.states[start + 1:]):
        change = max(change, float(np.max(np.abs(_matrix(cur) - _matrix(prev)))))
    finals = {name: float(series[-1]) for name, series in trajectory.scalars.items()}
    finals["max_step_change"] = change
    return change < threshold, finals


def _matrix(state):
    if isinstance(state, StateVector):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    return state.matrix
