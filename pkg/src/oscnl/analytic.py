"""Closed-form solutions used as oracles and as the mirror-state engine."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import PhysicalityError, TruncationError
from .hilbert import (
    COHERENT_TAIL_TOL,
    CompositeSpace,
    DensityMatrix,
    Operator,
    StateVector,
    coherent_amplitudes,
    coherent_tail,
    required_coherent_dim,
)
from .models import OptomechParams, TripartiteParams

MIRROR_DIM_MARGIN = 2


@dataclass(frozen=True)
class OneExcitationAmplitudes:
    alpha1: np.ndarray
    alpha2: np.ndarray
    alpha3: np.ndarray
    K1: float

    def __post_init__(self):
        norm = np.abs(self.alpha1) ** 2 + np.abs(self.alpha2) ** 2 + np.abs(self.alpha3) ** 2
        if np.max(np.abs(norm - 1.0)) > 1e-12:
            raise PhysicalityError("one-excitation amplitudes are not normalized")

    def state(self, p: TripartiteParams | None = None, index: int | None = None) -> StateVector:
        """Embed the amplitudes (at position ``index`` for array input) into the a-b-c space."""
        space = (p or TripartiteParams()).space
        pick = (lambda x: complex(np.asarray(x).reshape(-1)[index])) if index is not None \
            else (lambda x: complex(x))
        v = np.zeros(space.dim, dtype=complex)
        v[space.index((1, 0, 0))] = pick(self.alpha1)
        v[space.index((0, 1, 0))] = pick(self.alpha2)
        v[space.index((0, 0, 1))] = pick(self.alpha3)
        return StateVector(space, v)


def one_excitation_amplitudes(beta, kappa, t, form: str = "corrected") -> OneExcitationAmplitudes:
    """Amplitudes on ``|100>, |010>, |001>`` after starting in ``|100>``.

    Exact for ``beta (n_a^2 + n_b^2) + kappa (a^dag c + b^dag c + h.c.)``, i.e. the
    ``dressed`` frame of :func:`oscnl.models.build_tripartite_hamiltonian`,
    with ``K1 = sqrt(beta^2 + 8 kappa^2)``.

    ``form="printed"`` reproduces the commonly printed variant in which the
    antisymmetric part carries no ``exp(-i beta t)`` phase. It is normalized but
    is not a solution of the Schrodinger equation for ``beta != 0``.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if form not in ("corrected", "printed"):
        raise ValueError("form must be 'corrected' or 'printed'")
    t = np.asarray(t, dtype=float)
    K1 = float(np.sqrt(beta ** 2 + 8.0 * kappa ** 2))
    half = np.exp(-0.5j * beta * t)
    sym = 0.5 * half * (np.cos(0.5 * K1 * t) - 1j * (beta / K1) * np.sin(0.5 * K1 * t))
    anti = 0.5 * np.exp(-1j * beta * t) if form == "corrected" else 0.5 * np.ones_like(half)
    alpha3 = -2j * (kappa / K1) * half * np.sin(0.5 * K1 * t)
    return OneExcitationAmplitudes(anti + sym, -anti + sym, alpha3, K1)


def eta_tilde(eta, n, p: OptomechParams, t):
    """Mirror amplitude conditioned on ``n`` photons: ``eta e^{-i zeta t} + (g/zeta) n (1 - e^{-i zeta t})``."""
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("photon number must be non-negative")
    rot = np.exp(-1j * p.zeta * np.asarray(t, dtype=float))
    return eta * rot + (p.g_k / p.zeta) * n * (1.0 - rot)


@dataclass(frozen=True)
class MirrorJointState:
    """Cavity coherent amplitude ``alpha`` and mirror coherent amplitude ``eta`` at time ``t``.

    ``n_max`` / ``m_max`` default to the coherent tail rule at ``tol``; the
    mirror bound gets an extra factor of 2 because the conditional amplitudes
    grow with photon number.
    """
    alpha: complex
    eta: complex
    params: OptomechParams
    t: float
    n_max: int | None = None
    m_max: int | None = None
    tol: float = COHERENT_TAIL_TOL

    def resolved_dims(self) -> tuple:
        n_max = self.n_max or required_coherent_dim(self.alpha, self.tol)
        if coherent_tail(self.alpha, n_max) >= self.tol:
            raise TruncationError(
                f"cavity truncation {n_max} too small for |alpha|^2 = {abs(self.alpha) ** 2:g}",
                required_dim=required_coherent_dim(self.alpha, self.tol))
        widest = float(np.max(np.abs(eta_tilde(self.eta, np.arange(n_max), self.params, self.t))))
        need = required_coherent_dim(widest, self.tol)
        m_max = self.m_max or MIRROR_DIM_MARGIN * need
        if coherent_tail(widest, m_max) >= self.tol:
            raise TruncationError(
                f"mirror truncation {m_max} too small for |eta~| = {widest:.3g}", required_dim=need)
        return n_max, m_max


def _mirror_branches(spec: MirrorJointState):
    """Cavity weights ``c_n`` (with phases) and normalized mirror branches ``psi_n``."""
    p = spec.params
    n_max, m_max = spec.resolved_dims()
    c = coherent_amplitudes(spec.alpha, n_max)
    c = c / np.linalg.norm(c)
    n = np.arange(n_max)
    x = p.g_k / p.zeta
    phase = np.exp(1j * x ** 2 * n ** 2 * (p.omega_m * spec.t - np.sin(p.zeta * spec.t))
                   - 1j * n * p.omega_k * spec.t)
    m = np.arange(m_max)
    kerr = np.exp(-1j * p.beta * spec.t * m ** 2)
    branches = np.empty((n_max, m_max), dtype=complex)
    for i, et in enumerate(eta_tilde(spec.eta, n, p, spec.t)):
        v = coherent_amplitudes(et, m_max) * kerr
        branches[i] = v / np.linalg.norm(v)
    return c * phase, branches, (n_max, m_max)


def mirror_joint_state(spec: MirrorJointState) -> StateVector:
    """Joint cavity-mirror state ``sum_n c_n e^{i phi_n} |n> |eta~_n>`` (with Kerr phases)."""
    c, branches, dims = _mirror_branches(spec)
    space = CompositeSpace.from_dims(dims, ("k", "a"))
    amps = c[:, None] * branches
    return StateVector(space, amps.reshape(-1) / np.linalg.norm(amps))


def mirror_reduced_density(spec: MirrorJointState) -> DensityMatrix:
    """Mirror state with the cavity traced out: Poisson mixture of the branches."""
    c, branches, (_, m_max) = _mirror_branches(spec)
    w = np.abs(c) ** 2
    rho = np.einsum("n,nm,nq->mq", w / w.sum(), branches, branches.conj())
    return DensityMatrix(CompositeSpace.from_dims((m_max,), ("a",)), 0.5 * (rho + rho.conj().T))


def mirror_reduced_series(alpha, eta, params: OptomechParams, times, tol=COHERENT_TAIL_TOL,
                          m_max=None) -> list:
    """Reduced mirror states on a common truncation for every time in ``times``."""
    times = np.asarray(times, dtype=float)
    if m_max is None:
        m_max = max(MirrorJointState(alpha, eta, params, t, tol=tol).resolved_dims()[1]
                    for t in times)
    return [mirror_reduced_density(MirrorJointState(alpha, eta, params, t, m_max=m_max, tol=tol))
            for t in times]


def transformed_evolution_operator(p: OptomechParams, t: float) -> Operator:
    """Diagonal ``exp(-i H_trans t)`` in the polaron frame."""
    space = p.space
    nk = space.number_grid("k")
    na = space.number_grid("a")
    phase = (-p.omega_k * t * nk + (p.g_k ** 2 * p.omega_m / p.zeta ** 2) * t * nk ** 2
             - p.zeta * t * na - p.beta * t * na ** 2)
    return Operator(space, np.diag(np.exp(1j * phase)))


def evolution_operator(p: OptomechParams, t: float) -> Operator:
    """Lab-frame ``U(t)`` in the product form obtained by the BCH expansion.

    ``exp{-i[w_k t n_k - (g/z)^2 (w_m t - sin z t) n_k^2 + b t n_a^2]}``
    ``x exp[(g/z) n_k ((a^dag - a) - (a^dag e^{-izt} - a e^{izt}))] x exp(-i z t n_a)``
    """
    space = p.space
    dk, da = p.dims
    nk = space.number_grid("k")
    na = space.number_grid("a")
    x = p.g_k / p.zeta
    first = np.exp(-1j * (p.omega_k * t * nk
                          - x ** 2 * (p.omega_m * t - np.sin(p.zeta * t)) * nk ** 2
                          + p.beta * t * na ** 2))
    last = np.exp(-1j * p.zeta * t * na)
    a = np.diag(np.sqrt(np.arange(1, da)), 1)
    middle = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(dk):
        delta = x * n * (1.0 - np.exp(-1j * p.zeta * t))
        block = expm(delta * a.conj().T - np.conj(delta) * a)
        middle[n * da:(n + 1) * da, n * da:(n + 1) * da] = block
    return Operator(space, first[:, None] * middle * last[None, :])

