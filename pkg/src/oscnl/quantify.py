"""Entanglement and non-classicality diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .errors import GridTooNarrowError, InvalidDimensionError, PhysicalityError
from .hilbert import DensityMatrix, StateVector, as_density, partial_transpose

WIGNER_BOUNDARY_TOL = 1e-6
WIGNER_IMAG_TOL = 1e-10
DISPLACEMENT_LEAKAGE_TOL = 1e-8
UNCERTAINTY_TOL = 1e-9


def negativity(rho, transposed: Iterable[str]) -> float:
    """``(sum |eig(rho^T_A)| - 1) / 2`` for the cut that transposes ``transposed``."""
    pt = partial_transpose(rho, transposed)
    ev = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return max(0.0, 0.5 * (float(np.abs(ev).sum()) - 1.0))


def log_negativity(rho, transposed: Iterable[str]) -> float:
    """Base-2 logarithmic negativity ``log2(2N + 1)``."""
    return float(np.log1p(2.0 * negativity(rho, transposed)) / np.log(2.0))


def purity(rho) -> float:
    m = as_density(rho).matrix
    return float(np.real(np.vdot(m.conj().T, m)))


def _single_mode(rho) -> np.ndarray:
    rho = as_density(rho)
    if len(rho.space.modes) != 1:
        raise InvalidDimensionError("expected a single-mode state")
    return np.asarray(rho.matrix)


@dataclass(frozen=True)
class WignerGrid:
    re_range: tuple
    im_range: tuple
    resolution: int = 81

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError("Wigner grids need at least 16 points per axis")
        for lo, hi in (self.re_range, self.im_range):
            if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
                raise ValueError("Wigner ranges must be finite with hi > lo")

    @classmethod
    def square(cls, half_width: float, resolution: int = 81, center: complex = 0j):
        c = complex(center)
        return cls((c.real - half_width, c.real + half_width),
                   (c.imag - half_width, c.imag + half_width), resolution)

    @property
    def re(self) -> np.ndarray:
        return np.linspace(*self.re_range, self.resolution)

    @property
    def im(self) -> np.ndarray:
        return np.linspace(*self.im_range, self.resolution)

    def points(self) -> np.ndarray:
        """Complex ``lambda`` values, indexed ``[im, re]``."""
        X, Y = np.meshgrid(self.re, self.im)
        return X + 1j * Y

    @property
    def cell_area(self) -> float:
        return (self.re[1] - self.re[0]) * (self.im[1] - self.im[0])


def _working_dim(d: int, reach: float) -> int:
    span = np.sqrt(d) + reach
    return int(np.ceil(max(2 * d, span ** 2 + 8 * span + 16)))


class _PadDisplacement:
    """Top-left ``d x d`` blocks of ``D(s) = exp(-i s P)`` for real ``s``, built in a
    padded space of dimension ``dw`` with ``P = i(a^dag - a)`` diagonalized once."""

    def __init__(self, d: int, dw: int):
        a = np.diag(np.sqrt(np.arange(1, dw)), 1)
        p, V = np.linalg.eigh(1j * (a.conj().T - a))
        self.d, self.dw, self.p, self.V = d, dw, p, V

    def rows(self, s: np.ndarray) -> np.ndarray:
        """Rows ``0..d-1`` of ``D(s)``, shape ``(len(s), d, dw)``."""
        top = self.V[None, : self.d, :] * np.exp(-1j * s[:, None, None] * self.p[None, None, :])
        return top @ self.V.conj().T

    def block(self, s: np.ndarray) -> np.ndarray:
        top = self.V[: self.d, :]
        return (top[None] * np.exp(-1j * s[:, None, None] * self.p[None, None, :])) @ top.conj().T

    def leakage(self, s: float) -> float:
        """Largest weight that the first ``d`` rows of ``D(s)`` put in the top quarter."""
        r = self.rows(np.array([s]))[0]
        return float(np.max(np.sum(np.abs(r[:, -(self.dw // 4):]) ** 2, axis=1)))


def wigner(rho, grid: WignerGrid, check_boundary: bool = True, chunk: int = 1024) -> np.ndarray:
    """Displaced-parity Wigner function ``(2/pi) Tr[rho D(l) (-1)^n D(l)^dag]``.

    Returns a real array indexed ``[im, re]``. With ``l = r e^{i t}`` the
    displaced parity equals ``R(t) D(2r) (-1)^n R(t)^dag`` (``R(t) = e^{i t n}``),
    so each point needs one block of a real-axis displacement. That block is
    taken from a padded Fock space; if the rows of ``D(2 max r)`` put more than
    1e-8 weight in the top quarter of the padding, the space is enlarged.
    """
    m = _single_mode(rho)
    d = m.shape[0]
    lam = grid.points().reshape(-1)
    r = np.abs(lam)
    th = np.angle(lam)
    reach = 2.0 * float(r.max())
    dw = _working_dim(d, reach)
    while True:
        disp = _PadDisplacement(d, dw)
        if disp.leakage(reach) < DISPLACEMENT_LEAKAGE_TOL:
            break
        dw = int(dw * 1.5)
    n = np.arange(d)
    # sum_{nm} rho_mn e^{i t (n - m)} D(2r)_nm (-1)^m
    weighted = m.T * ((-1.0) ** n)[None, :]
    out = np.empty(lam.shape, dtype=complex)
    for s in range(0, lam.size, chunk):
        blk = disp.block(2.0 * r[s:s + chunk])
        ph = np.exp(1j * th[s:s + chunk, None] * n[None, :])
        out[s:s + chunk] = np.einsum("bnm,nm,bn,bm->b", blk, weighted, ph, ph.conj(),
                                     optimize=True)
    if np.max(np.abs(out.imag), initial=0.0) > WIGNER_IMAG_TOL:
        raise PhysicalityError("Wigner function has a non-negligible imaginary part")
    W = (2.0 / np.pi) * out.real.reshape(grid.resolution, grid.resolution)
    if check_boundary:
        edge = max(np.abs(W[0]).max(), np.abs(W[-1]).max(),
                   np.abs(W[:, 0]).max(), np.abs(W[:, -1]).max())
        if edge > WIGNER_BOUNDARY_TOL:
            raise GridTooNarrowError(f"|W| = {edge:.2e} on the grid boundary; widen the grid")
    return W


def wigner_laguerre(rho, grid: WignerGrid) -> np.ndarray:
    """Wigner function from the closed-form Fock matrix elements (Laguerre polynomials).

    Independent of the displaced-parity route; used as its cross-check.
    """
    m = _single_mode(rho)
    d = m.shape[0]
    lam = grid.points()
    x = 4.0 * np.abs(lam) ** 2
    W = np.zeros(lam.shape)
    for i in range(d):
        for j in range(i, d):
            if m[i, j] == 0 and m[j, i] == 0:
                continue
            k = j - i
            pref = (-1.0) ** i * np.exp(0.5 * (gammaln(i + 1) - gammaln(j + 1)))
            # <j| ... |i> element for j >= i carries (2 lambda)^k
            elem = pref * (2.0 * lam) ** k * eval_genlaguerre(i, k, x)
            term = m[i, j] * elem
            W += term.real if k == 0 else 2.0 * term.real
    return (2.0 / np.pi) * W * np.exp(-0.5 * x)


def wigner_integral(W: np.ndarray, grid: WignerGrid) -> float:
    return float(W.sum() * grid.cell_area)


def auto_wigner_grid(rho, resolution: int = 81, start: float = 2.5) -> WignerGrid:
    """Smallest centred square grid (grown by 1.25x) whose boundary is negligible."""
    m = _single_mode(rho)
    d = m.shape[0]
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    centre = complex(np.trace(m @ a))
    half = start
    for _ in range(40):
        grid = WignerGrid.square(half, resolution, centre)
        try:
            wigner(rho, grid)
            return grid
        except GridTooNarrowError:
            half *= 1.25
    raise GridTooNarrowError("could not find a wide enough Wigner grid")


@dataclass(frozen=True)
class QuadratureSeries:
    times: np.ndarray
    var_q: np.ndarray = field(repr=False)
    var_p: np.ndarray = field(repr=False)

    def __post_init__(self):
        prod = np.asarray(self.var_q) * np.asarray(self.var_p)
        if prod.size and prod.min() < 1.0 - UNCERTAINTY_TOL:
            raise PhysicalityError(f"uncertainty product {prod.min():.12f} below 1")

    @property
    def min_variance(self) -> np.ndarray:
        return np.minimum(self.var_q, self.var_p)


def _quadrature_moments(m: np.ndarray):
    d = m.shape[0]
    # one extra level makes Q^2 and P^2 exact on the state's support
    a = np.diag(np.sqrt(np.arange(1, d + 1)), 1)
    Q = a + a.conj().T
    P = 1j * (a.conj().T - a)
    big = np.zeros((d + 1, d + 1), dtype=complex)
    big[:d, :d] = m

    def ev(O):
        return float(np.real(np.trace(big @ O)))

    return ev(Q @ Q) - ev(Q) ** 2, ev(P @ P) - ev(P) ** 2


def quadrature_variances(rho_series: Sequence, times: Sequence | None = None) -> QuadratureSeries:
    """``Var Q`` and ``Var P`` with ``Q = a^dag + a`` and ``P = i(a^dag - a)``.

    Vacuum has ``(1, 1)`` in this convention.
    """
    if isinstance(rho_series, (DensityMatrix, StateVector)):
        rho_series = [rho_series]
    vq, vp = zip(*(_quadrature_moments(_single_mode(r)) for r in rho_series))
    t = np.arange(len(vq), dtype=float) if times is None else np.asarray(times, dtype=float)
    return QuadratureSeries(t, np.array(vq), np.array(vp))
