"""Helmholtz-coil quartic nonlinearity calculator (SI units).

Two coaxial coils of radius ``R`` a distance ``R/2`` apart; a ferromagnet of
``N_mag`` atoms sits at the midpoint on a cantilever tip displaced by ``x``.
The near-centre field deficit is quartic, which is what makes the cantilever
anharmonic.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

MU0 = 4e-7 * np.pi  # T m / A
MU_B = 9.2740100783e-24  # J / T
HBAR = 1.054571817e-34  # J s

QUARTIC_COEFFICIENT = 144.0 / 125.0
CENTRE_FACTOR = 8.0 / (5.0 * np.sqrt(5.0))  # (4/5)^(3/2)
PRINTED_ENERGY_PREFACTOR = 0.8
SERIES_ENERGY_PREFACTOR = CENTRE_FACTOR * QUARTIC_COEFFICIENT  # about 0.8243
PRINTED_BETA_PREFACTOR = 1.28


@dataclass(frozen=True)
class CoilParams:
    R: float = 80e-9
    I: float = 1e-3
    N_mag: float = 1e6
    a0: float = 50e-12
    n_turns: int = 1

    def __post_init__(self):
        for name in ("R", "I", "N_mag", "a0", "n_turns"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.a0 / self.R > 0.01:
            warnings.warn(f"a0/R = {self.a0 / self.R:.3g} is not small; the quartic "
                          "expansion is unreliable", stacklevel=2)

    @property
    def moment(self) -> float:
        """Total magnetic moment ``N_mag * mu_B``."""
        return self.N_mag * MU_B


def _check_field_range(x, p):
    if np.any(np.abs(np.asarray(x)) >= p.R / 2):
        raise ValueError("|x| must stay below R/2 (inside the coil pair)")


def helmholtz_field(x, p: CoilParams):
    """On-axis field of the pair at displacement ``x`` from the midpoint."""
    _check_field_range(x, p)
    x = np.asarray(x, dtype=float)
    s = x / p.R
    pre = MU0 * p.n_turns * p.I / (2.0 * p.R)
    return pre * ((1.0 + (0.5 - s) ** 2) ** -1.5 + (1.0 + (0.5 + s) ** 2) ** -1.5)


def centre_field(p: CoilParams) -> float:
    return CENTRE_FACTOR * MU0 * p.n_turns * p.I / p.R


def _deficit_series(order: int = 48) -> np.ndarray:
    """Exact rational Taylor coefficients of the field deficit in ``s = x/R``.

    With ``u = (s^2 -+ s) / (5/4)`` each coil contributes ``(1 + u)^{-3/2}``;
    summing the binomial series of both coils gives only even powers of ``s``
    and the ``s^2`` coefficient cancels exactly.
    """
    coeffs = [Fraction(0)] * (order + 1)
    b = Fraction(1)
    for k in range(1, order + 1):
        b *= Fraction(-3, 2) - (k - 1)
        b /= k
        scale = b * Fraction(4, 5) ** k
        for j in range(k % 2, k + 1, 2):
            if k + j <= order:
                coeffs[k + j] -= scale * comb(k, j)
    return np.array([float(c) for c in coeffs])


_SERIES = _deficit_series()
_SERIES_LIMIT = 0.25


def field_deficit(x, p: CoilParams):
    """``[B(0) - B(x)] / B(0)`` without catastrophic cancellation.

    Small displacements use the exact power series in ``x/R``; larger ones use
    the closed form with ``expm1``/``log1p``.
    """
    _check_field_range(x, p)
    s = np.asarray(x, dtype=float) / p.R
    series = np.polynomial.polynomial.polyval(s, _SERIES)
    u_minus = (s * s - s) / 1.25
    u_plus = (s * s + s) / 1.25
    direct = -0.5 * (np.expm1(-1.5 * np.log1p(u_minus)) + np.expm1(-1.5 * np.log1p(u_plus)))
    return np.where(np.abs(s) <= _SERIES_LIMIT, series, direct)


def quartic_field_coefficient(p: CoilParams, lo: float = 1e-4, hi: float = 1e-2,
                              n: int = 200) -> float:
    """Least-squares slope of the field deficit against ``(x/R)^4`` on ``x/R in [lo, hi]``."""
    s = np.geomspace(lo, hi, n)
    y = field_deficit(s * p.R, p)
    s4 = s ** 4
    return float(np.dot(y, s4) / np.dot(s4, s4))


def _check_energy_range(x, p):
    if np.any(np.abs(np.asarray(x)) / p.R > 0.01):
        raise ValueError("quartic interaction energy needs |x|/R <= 0.01")


def interaction_energy(x, p: CoilParams):
    """Quartic interaction energy with the ``0.8`` prefactor, ``0.8 mu0 mu n I / R (x/R)^4``.

    The field expansion itself gives a prefactor of about 0.824; see
    :func:`interaction_energy_series`.
    """
    _check_energy_range(x, p)
    s = np.asarray(x, dtype=float) / p.R
    return PRINTED_ENERGY_PREFACTOR * MU0 * p.moment * p.n_turns * p.I / p.R * s ** 4


def interaction_energy_series(x, p: CoilParams):
    """Quartic energy with the prefactor implied by the field expansion, ``(4/5)^{3/2} 144/125``."""
    _check_energy_range(x, p)
    s = np.asarray(x, dtype=float) / p.R
    return SERIES_ENERGY_PREFACTOR * MU0 * p.moment * p.n_turns * p.I / p.R * s ** 4


def exact_interaction_energy(x, p: CoilParams):
    """``-mu (B(x) - B(0))`` from the full two-coil field."""
    return p.moment * centre_field(p) * field_deficit(x, p)


def beta_strength(p: CoilParams) -> float:
    """Nonlinearity ``1.28 mu0 mu_B N_mag n I a0^4 / (hbar R^5)`` in rad/s."""
    return (PRINTED_BETA_PREFACTOR * MU0 * MU_B * p.N_mag * p.n_turns * p.I * p.a0 ** 4
            / (HBAR * p.R ** 5))


def coil_table(p: CoilParams) -> dict:
    """Summary used by the ``coil`` command."""
    return {
        "R_m": p.R,
        "I_A": p.I,
        "N_mag": p.N_mag,
        "a0_m": p.a0,
        "n_turns": p.n_turns,
        "B0_T": centre_field(p),
        "quartic_coefficient": quartic_field_coefficient(p),
        "beta_Hz": beta_strength(p),
    }
