"""Truncated Fock-space algebra.

Composite spaces are ordered lists of bosonic modes. Basis indices are
row-major with the first declared mode most significant, so for dims
``(d0, d1, d2)`` the occupation ``(n0, n1, n2)`` sits at
``(n0 * d1 + n1) * d2 + n2``. All index arithmetic goes through
:class:`CompositeSpace`; nothing else in the package computes strides.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainc, gammaln

from .errors import (
    InvalidDimensionError,
    LabelError,
    PhysicalityError,
    TruncationError,
)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
COHERENT_TAIL_TOL = 1e-12


def _frozen(array, dtype=complex):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ModeSpec:
    label: str
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidDimensionError(
                f"mode {self.label!r}: dim must be an integer >= 2, got {self.dim}")


@dataclass(frozen=True)
class CompositeSpace:
    modes: tuple

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise InvalidDimensionError("a space needs at least one mode")
        labels = [m.label for m in modes]
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate mode labels in {labels}")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def from_dims(cls, dims: Sequence[int], labels: Sequence[str] | None = None):
        if labels is None:
            labels = "abcdefghijklmnopqrstuvwxyz"[: len(dims)]
        if len(labels) != len(dims):
            raise LabelError("labels and dims differ in length")
        return cls(tuple(ModeSpec(l, int(d)) for l, d in zip(labels, dims)))

    @property
    def dims(self) -> tuple:
        return tuple(m.dim for m in self.modes)

    @property
    def labels(self) -> tuple:
        return tuple(m.label for m in self.modes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown mode label {label!r}; space has {self.labels}") from None

    def mode(self, label: str) -> ModeSpec:
        return self.modes[self.position(label)]

    def positions(self, labels: Iterable[str]) -> list:
        return sorted({self.position(l) for l in labels})

    def subspace(self, labels: Iterable[str]) -> "CompositeSpace":
        return CompositeSpace(tuple(self.modes[i] for i in self.positions(labels)))

    def strides(self) -> tuple:
        dims = self.dims
        return tuple(int(np.prod(dims[i + 1:])) for i in range(len(dims)))

    def index(self, occupations: Sequence[int]) -> int:
        if len(occupations) != len(self.modes):
            raise InvalidDimensionError(
                f"expected {len(self.modes)} occupations, got {len(occupations)}")
        for n, m in zip(occupations, self.modes):
            if not 0 <= n < m.dim:
                raise InvalidDimensionError(
                    f"occupation {n} of mode {m.label!r} outside 0..{m.dim - 1}")
        return int(sum(n * s for n, s in zip(occupations, self.strides())))

    def occupations(self, index: int) -> tuple:
        return tuple(int(x) for x in np.unravel_index(index, self.dims))

    def number_grid(self, label: str) -> np.ndarray:
        """Occupation of ``label`` for every basis index (a diagonal)."""
        axis = self.position(label)
        shape = [1] * len(self.dims)
        shape[axis] = self.dims[axis]
        n = np.arange(self.dims[axis]).reshape(shape)
        return np.broadcast_to(n, self.dims).reshape(-1).astype(float)

    def __add__(self, other: "CompositeSpace") -> "CompositeSpace":
        return CompositeSpace(self.modes + other.modes)


@dataclass(frozen=True, eq=False)
class Operator:
    space: CompositeSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise InvalidDimensionError(
                f"operator shape {m.shape} does not match space dimension {self.space.dim}")
        object.__setattr__(self, "matrix", m)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def _check(self, other):
        if other.space != self.space:
            raise InvalidDimensionError("operators live on different spaces")

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix @ other.matrix)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix + other.matrix)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix - other.matrix)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return Operator(self.space, scalar * self.matrix)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return Operator(self.space, -self.matrix)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() <= tol


def commutator(A: Operator, B: Operator) -> Operator:
    return A @ B - B @ A


def max_norm(op) -> float:
    m = op.matrix if isinstance(op, Operator) else np.asarray(op)
    return float(np.max(np.abs(m), initial=0.0))


@dataclass(frozen=True, eq=False)
class StateVector:
    space: CompositeSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _frozen(self.amplitudes).reshape(-1)
        if v.shape != (self.space.dim,):
            raise InvalidDimensionError(
                f"state length {v.shape[0]} does not match space dimension {self.space.dim}")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > NORM_TOL:
            raise PhysicalityError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "amplitudes", v)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))

    def expect(self, op: Operator) -> complex:
        return complex(np.vdot(self.amplitudes, op.matrix @ self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: CompositeSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise InvalidDimensionError(
                f"density matrix shape {m.shape} does not match space dimension {self.space.dim}")
        herm = float(np.max(np.abs(m - m.conj().T), initial=0.0))
        if herm > HERMITIAN_TOL:
            raise PhysicalityError(f"density matrix not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise PhysicalityError(f"density matrix trace {tr!r} differs from 1")
        lmin = float(np.linalg.eigvalsh(m)[0])
        if lmin < -POSITIVITY_TOL:
            raise PhysicalityError(f"density matrix has eigenvalue {lmin:.3e} below -{POSITIVITY_TOL}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "min_eigenvalue", lmin)

    def expect(self, op: Operator) -> complex:
        return complex(np.trace(self.matrix @ op.matrix))


def tensor(*states):
    """Product of states in the given order; pure inputs give a pure output."""
    if not states:
        raise InvalidDimensionError("tensor needs at least one state")
    space = states[0].space
    for s in states[1:]:
        space = space + s.space
    if all(isinstance(s, StateVector) for s in states):
        v = states[0].amplitudes
        for s in states[1:]:
            v = np.kron(v, s.amplitudes)
        return StateVector(space, v)
    m = _as_matrix(states[0])
    for s in states[1:]:
        m = np.kron(m, _as_matrix(s))
    return DensityMatrix(space, m)


def _as_matrix(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    return state.matrix


def as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, StateVector) else state


def annihilation(dim: int, label: str = "a") -> Operator:
    """Single-mode lowering operator with ``M[n-1, n] = sqrt(n)``."""
    mode = ModeSpec(label, dim)
    return Operator(CompositeSpace((mode,)), np.diag(np.sqrt(np.arange(1, dim)), 1))


def identity(space: CompositeSpace) -> Operator:
    return Operator(space, np.eye(space.dim))


def embed(op: Operator, space: CompositeSpace, label: str) -> Operator:
    """Place a single-mode operator on ``label`` with identities elsewhere."""
    pos = space.position(label)
    d = space.dims[pos]
    if op.matrix.shape != (d, d):
        raise InvalidDimensionError(
            f"operator of size {op.matrix.shape[0]} cannot act on mode {label!r} of dim {d}")
    left = int(np.prod(space.dims[:pos]))
    right = int(np.prod(space.dims[pos + 1:]))
    m = np.kron(np.kron(np.eye(left), op.matrix), np.eye(right))
    return Operator(space, m)


def mode_operator(space: CompositeSpace, label: str) -> Operator:
    """Annihilation operator of ``label`` embedded in ``space``."""
    return embed(annihilation(space.mode(label).dim, label), space, label)


def number_operator(space: CompositeSpace, label: str) -> Operator:
    return Operator(space, np.diag(space.number_grid(label)))


def partial_trace(rho, keep: Iterable[str]) -> DensityMatrix:
    """Reduce ``rho`` to the modes in ``keep`` (kept in declaration order)."""
    rho = as_density(rho)
    keep = list(keep)
    if not keep:
        raise LabelError("partial_trace needs at least one mode to keep")
    space = rho.space
    kept = space.positions(keep)
    dims = space.dims
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    # einsum letters: row axes i0.., column axes reuse the row letter when traced
    row = [chr(ord("a") + i) for i in range(n)]
    col = [row[i] if i not in kept else chr(ord("A") + i) for i in range(n)]
    out = [row[i] for i in kept] + [col[i] for i in kept]
    reduced = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    sub = space.subspace(keep)
    return DensityMatrix(sub, reduced.reshape(sub.dim, sub.dim))


def partial_transpose(rho, transposed: Iterable[str]) -> np.ndarray:
    """Transpose the indices of the ``transposed`` modes.

    Returns a plain Hermitian matrix; it need not be positive.
    """
    if isinstance(rho, (DensityMatrix, StateVector)):
        space, m = rho.space, _as_matrix(rho)
    else:
        raise TypeError("partial_transpose expects a DensityMatrix or StateVector")
    transposed = list(transposed)
    if not transposed:
        raise LabelError("partial_transpose needs a non-empty set of modes")
    pos = space.positions(transposed)
    if len(pos) == len(space.modes):
        raise LabelError("transposing every mode is a full transpose, not a partial one")
    return _partial_transpose_matrix(m, space.dims, pos)


def _partial_transpose_matrix(m: np.ndarray, dims: tuple, positions: Sequence[int]) -> np.ndarray:
    n = len(dims)
    t = np.asarray(m).reshape(dims + dims)
    axes = list(range(2 * n))
    for p in positions:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    d = int(np.prod(dims))
    return t.transpose(axes).reshape(d, d)


def fock_state(space: CompositeSpace, occupations: Sequence[int]) -> StateVector:
    v = np.zeros(space.dim, dtype=complex)
    v[space.index(occupations)] = 1.0
    return StateVector(space, v)


def coherent_tail(amplitude: complex, dim: int) -> float:
    """Poisson weight ``sum_{n >= dim} |a|^{2n} e^{-|a|^2} / n!`` lost by truncation."""
    mean = abs(amplitude) ** 2
    if mean == 0.0:
        return 0.0
    return float(gammainc(dim, mean))


def required_coherent_dim(amplitude: complex, tol: float = COHERENT_TAIL_TOL) -> int:
    dim = 2
    while coherent_tail(amplitude, dim) >= tol:
        dim += 1
    return dim


def coherent_amplitudes(amplitude: complex, dim: int) -> np.ndarray:
    """Unnormalized Fock amplitudes ``a^n e^{-|a|^2/2} / sqrt(n!)``, log-accumulated."""
    n = np.arange(dim)
    if amplitude == 0:
        return (n == 0).astype(complex)
    log_mag = n * np.log(abs(amplitude)) - 0.5 * gammaln(n + 1) - 0.5 * abs(amplitude) ** 2
    return np.exp(log_mag) * np.exp(1j * n * np.angle(amplitude))


def coherent_state(dim: int, amplitude: complex, label: str = "a",
                   tol: float = COHERENT_TAIL_TOL) -> StateVector:
    """Truncated, renormalized coherent state ``|amplitude>``.

    Raises :class:`TruncationError` when the discarded Poisson tail is not
    below ``tol``; the error carries the smallest admissible dimension.
    """
    mode = ModeSpec(label, dim)
    tail = coherent_tail(amplitude, dim)
    if tail >= tol:
        need = required_coherent_dim(amplitude, tol)
        raise TruncationError(
            f"coherent amplitude {amplitude} loses weight {tail:.3e} at dim {dim}; need dim >= {need}",
            required_dim=need)
    v = coherent_amplitudes(amplitude, dim)
    return StateVector(CompositeSpace((mode,)), v / np.linalg.norm(v))


def thermal_mixture(subspace_states) -> DensityMatrix:
    """Normalized convex mixture of ``(weight, state)`` pairs."""
    pairs = list(subspace_states)
    if not pairs:
        raise ValueError("thermal_mixture needs at least one state")
    weights = np.array([w for w, _ in pairs], dtype=float)
    if np.any(weights < 0):
        raise ValueError("mixture weights must be non-negative")
    total = weights.sum()
    if total <= 0:
        raise ValueError("mixture weights are all zero")
    space = pairs[0][1].space
    m = np.zeros((space.dim, space.dim), dtype=complex)
    for w, s in pairs:
        if s.space != space:
            raise InvalidDimensionError("mixture components live on different spaces")
        m += (w / total) * _as_matrix(s)
    return DensityMatrix(space, m)


def boltzmann_weights(n_bar: float, excitations: Sequence[int] = (0, 1, 2)) -> np.ndarray:
    """Weights ``x**N`` over the listed excitation numbers, with ``x`` fixed
    so that the mean excitation equals ``n_bar``.

    ``n_bar`` must lie strictly between the smallest and the mean of the
    listed excitation numbers (the mean is reached at infinite temperature).
    """
    N = np.asarray(excitations, dtype=float)
    lo, hi = N.min(), N.mean()
    if not lo < n_bar < hi:
        raise ValueError(f"n_bar must lie in ({lo}, {hi}) for excitations {list(excitations)}")

    def mean(log_x):
        w = np.exp(N * log_x - np.max(N * log_x))
        return (N * w).sum() / w.sum() - n_bar

    log_x = brentq(mean, -700.0, 0.0, xtol=1e-15)
    w = np.exp(N * log_x - np.max(N * log_x))
    return w / w.sum()
