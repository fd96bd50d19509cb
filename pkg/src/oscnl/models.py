"""Hamiltonians and dissipators for the two physical settings.

Tripartite chain: two quartic (Kerr-type) oscillators ``a`` and ``b`` each
exchanging excitations with a linear mediator ``c``. Frequencies are in units
of the mediator coupling ``kappa`` by default.

Optomechanics: a cavity mode ``k`` driving an anharmonic mirror ``a`` through
radiation pressure. Frequencies are in units of the dressed mirror frequency
``zeta = omega_m + beta`` by default.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    CompositeSpace,
    Operator,
    mode_operator,
    number_operator,
)

HBAR = 1.054571817e-34  # J s
WEAK_COUPLING_LIMIT = 0.2

FRAMES = ("lab", "interaction", "dressed")


@dataclass(frozen=True)
class TripartiteParams:
    """Parameters of the a-c-b chain.

    ``omega`` defaults to ``omega_m`` (mediator resonant with the oscillators).
    """
    beta: float = 0.0
    kappa: float = 1.0
    omega_m: float = 0.0
    omega: float | None = None
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    gamma_c: float = 0.0
    dims: tuple = (4, 4, 2)

    def __post_init__(self):
        if self.omega is None:
            object.__setattr__(self, "omega", self.omega_m)
        for name in ("gamma_a", "gamma_b", "gamma_c"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3:
            raise ValueError("dims must give (dim_a, dim_b, dim_c)")
        object.__setattr__(self, "dims", dims)
        self.space  # validates dims >= 2

    @property
    def space(self) -> CompositeSpace:
        return CompositeSpace.from_dims(self.dims, ("a", "b", "c"))

    @property
    def resonant(self) -> bool:
        return self.omega == self.omega_m


def _hopping(space, kappa):
    a, b, c = (mode_operator(space, l) for l in "abc")
    hop = kappa * (a.dag() @ c + b.dag() @ c)
    return hop + hop.dag()


def build_tripartite_hamiltonian(p: TripartiteParams, frame: str = "interaction") -> Operator:
    """Rotating-wave Hamiltonian of the a-c-b chain (hbar = 1).

    ``lab``
        ``omega_m (n_a + n_b) + omega n_c + beta (n_a^2 + n_a + n_b^2 + n_b) + hopping``
    ``interaction``
        the lab form without the free ``omega`` terms (exact for a resonant mediator)
    ``dressed``
        frame rotating at ``omega_m + beta`` for a and b: ``beta (n_a^2 + n_b^2) + hopping``.
        This is the frame in which the closed-form one-excitation amplitudes hold.
    """
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}, got {frame!r}")
    if frame != "lab" and not p.resonant:
        warnings.warn("off-resonant mediator: the rotating-frame Hamiltonian drops a "
                      "detuning term and no longer matches the lab frame", stacklevel=2)
    space = p.space
    na, nb, nc = (number_operator(space, l) for l in "abc")
    if frame == "dressed":
        kerr = p.beta * (na @ na + nb @ nb)
    else:
        kerr = p.beta * (na @ na + na + nb @ nb + nb)
    H = kerr + _hopping(space, p.kappa)
    if frame == "lab":
        H = H + p.omega_m * (na + nb) + p.omega * nc
    return H


def build_tripartite_exact_quartic(p: TripartiteParams) -> Operator:
    """Lab-frame chain with the full quartic ``(beta/6)(x + x^dag)^4`` potentials.

    Its rotating-wave part is ``beta (n^2 + n) + beta/2`` per oscillator, so the
    difference from :func:`build_tripartite_hamiltonian` (``frame="lab"``) is the
    counter-rotating content the default model drops.
    """
    space = p.space
    H = p.omega_m * (number_operator(space, "a") + number_operator(space, "b"))
    H = H + p.omega * number_operator(space, "c") + _hopping(space, p.kappa)
    for label in "ab":
        x = mode_operator(space, label)
        q = x + x.dag()
        H = H + (p.beta / 6.0) * (q @ q @ q @ q)
    return H


def build_lindblad_ops(p: TripartiteParams) -> list:
    """Zero-temperature damping channels ``(rate, jump operator)``; zero rates omitted."""
    space = p.space
    ops = []
    for label, rate in zip("abc", (p.gamma_a, p.gamma_b, p.gamma_c)):
        if rate < 0:
            raise ValueError(f"negative rate for mode {label}")
        if rate > 0:
            ops.append((float(rate), mode_operator(space, label)))
    return ops


@dataclass(frozen=True)
class OptomechParams:
    """Cavity mode ``k`` coupled to an anharmonic mirror ``a``."""
    omega_k: float
    omega_m: float
    beta: float
    g_k: float
    dims: tuple = (12, 16)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2:
            raise ValueError("dims must give (dim_k, dim_a)")
        object.__setattr__(self, "dims", dims)
        self.space
        if self.zeta <= 0:
            raise ValueError("omega_m + beta must be positive")
        if abs(self.g_k / self.zeta) > WEAK_COUPLING_LIMIT:
            warnings.warn(
                f"g_k/zeta = {self.g_k / self.zeta:.3g} exceeds {WEAK_COUPLING_LIMIT}; "
                "the polaron-transformed model is outside its validity range",
                stacklevel=2)

    @property
    def zeta(self) -> float:
        return self.omega_m + self.beta

    @property
    def space(self) -> CompositeSpace:
        return CompositeSpace.from_dims(self.dims, ("k", "a"))

    @classmethod
    def from_ratios(cls, beta_over_zeta, g_over_zeta, omega_k=10.0, dims=(12, 16)):
        """Parameters in units of ``zeta`` (so ``zeta == 1``)."""
        return cls(omega_k=omega_k, omega_m=1.0 - beta_over_zeta, beta=beta_over_zeta,
                   g_k=g_over_zeta, dims=dims)

    @classmethod
    def from_si(cls, omega_k, omega_m, beta, length, mass, dims=(12, 16)):
        """SI construction with ``g_k = (omega_k / L) sqrt(hbar / 2 m omega_m)``."""
        g_k = (omega_k / length) * np.sqrt(HBAR / (2.0 * mass * omega_m))
        return cls(omega_k=omega_k, omega_m=omega_m, beta=beta, g_k=g_k, dims=dims)


def build_optomech_hamiltonian(p: OptomechParams) -> Operator:
    space = p.space
    a = mode_operator(space, "a")
    nk, na = number_operator(space, "k"), number_operator(space, "a")
    return (p.omega_k * nk + p.zeta * na + p.beta * (na @ na)
            - p.g_k * (nk @ (a + a.dag())))


def build_transformed_optomech(p: OptomechParams) -> Operator:
    """Leading-order polaron-frame Hamiltonian; diagonal in the joint Fock basis."""
    space = p.space
    nk = space.number_grid("k")
    na = space.number_grid("a")
    diag = (p.omega_k * nk + p.zeta * na - (p.g_k ** 2 * p.omega_m / p.zeta ** 2) * nk ** 2
            + p.beta * na ** 2)
    return Operator(space, np.diag(diag))


def polaron_transform_S(p: OptomechParams) -> Operator:
    """Anti-Hermitian generator ``-(g_k/zeta) n_k (a^dag - a)``."""
    space = p.space
    a = mode_operator(space, "a")
    nk = number_operator(space, "k")
    return (-p.g_k / p.zeta) * (nk @ (a.dag() - a))
