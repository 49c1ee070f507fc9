#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
qstate.py
=========
Dense complex linear algebra and quantum-state primitives.

Conventions
-----------
- Matrices are numpy complex128 arrays (``ComplexMatrix``).
- Tensor factor order is (a ⊗ b) with the index of b varying fastest,
  i.e. exactly ``np.kron`` ordering.
- Eigenvectors use a fixed phase: the largest-magnitude entry is real and
  positive, ties broken by lowest index.

All functions are pure; values are never mutated after construction.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import CapacityError, ShapeError, ValidationError

log = logging.getLogger(__name__)


# =========================
# Type Aliases
# =========================
ComplexMatrix = np.ndarray
Dims = tuple[int, ...]

# Structural slack when constructing states; operations that need the
# stricter norm invariant check policy.norm_tol themselves.
_NORM_SLACK = 1e-10

# Relative slack used to detect ties in the eigenvector phase convention.
_PHASE_TIE = 1e-9


# =========================
# Constants
# =========================
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# =========================
# Small helpers
# =========================

def as_matrix(a: Sequence | np.ndarray) -> ComplexMatrix:
    """Return *a* as a 2-D complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got array with shape {m.shape}")
    return m


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return a.conj().T


def hermiticity_residual(a: ComplexMatrix) -> float:
    return max_abs(a - dagger(a))


def unitarity_residual(u: ComplexMatrix) -> float:
    return max_abs(dagger(u) @ u - np.eye(u.shape[0]))


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return a @ b - b @ a


def check_square(a: ComplexMatrix, what: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {a.shape}")
    return a.shape[0]


def check_hermitian(a: ComplexMatrix, policy: NumericPolicy | None = None, what: str = "matrix") -> None:
    """Raise ValidationError unless ‖A − A†‖_max is within tolerance (scaled by ‖A‖_max)."""
    policy = resolve(policy)
    check_square(a, what)
    residual = hermiticity_residual(a)
    if residual > policy.hermitian_tol * max(1.0, max_abs(a)):
        raise ValidationError(f"{what} is not Hermitian (residual {residual:.3e})")


def check_unitary(u: ComplexMatrix, policy: NumericPolicy | None = None, what: str = "unitary") -> None:
    policy = resolve(policy)
    check_square(u, what)
    residual = unitarity_residual(u)
    if residual > policy.unitary_tol:
        raise ValidationError(f"{what} is not unitary (‖U†U − I‖_max = {residual:.3e})")


def check_dim_cap(dim: int, policy: NumericPolicy | None = None, what: str = "total dimension") -> None:
    policy = resolve(policy)
    if dim > policy.max_dim:
        raise CapacityError(what, dim, policy.max_dim)


def prod(dims: Iterable[int]) -> int:
    return int(math.prod(dims))


def ket(index: int, dim: int) -> np.ndarray:
    """Computational basis vector |index⟩ in dimension *dim*."""
    if not 0 <= index < dim:
        raise ShapeError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def outer(v: np.ndarray, w: np.ndarray | None = None) -> ComplexMatrix:
    """|v⟩⟨w| (|v⟩⟨v| when *w* is omitted)."""
    w = v if w is None else w
    return np.outer(v, np.conj(w))


# =========================
# States
# =========================

@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector with its ordered factor dimensions."""
    dims: Dims
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not dims or any(d < 1 for d in dims):
            raise ShapeError(f"invalid factor dimensions {dims}")
        if amps.size != prod(dims):
            raise ShapeError(f"amplitude length {amps.size} does not match dims {dims} (∏ = {prod(dims)})")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_SLACK:
            raise ValidationError(f"state is not normalized (‖ψ‖ = {norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, dims: Sequence[int], amplitudes: Sequence | np.ndarray) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(tuple(dims), amps / norm)

    @classmethod
    def product(cls, *vectors: Sequence | np.ndarray) -> "PureState":
        """Product state |v_1⟩ ⊗ |v_2⟩ ⊗ … of already-normalized factor vectors."""
        amps = np.ones(1, dtype=complex)
        dims = []
        for v in vectors:
            v = np.asarray(v, dtype=complex).reshape(-1)
            dims.append(v.size)
            amps = np.kron(amps, v)
        return cls(tuple(dims), amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "DensityOperator":
        return DensityOperator(self.dim, outer(self.amplitudes), dims=self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite operator (within tolerance)."""
    dim: int
    matrix: ComplexMatrix
    dims: Dims | None = None

    def __post_init__(self) -> None:
        m = as_matrix(self.matrix)
        if m.shape != (self.dim, self.dim):
            raise ShapeError(f"density matrix shape {m.shape} does not match dim {self.dim}")
        dims = tuple(self.dims) if self.dims is not None else (self.dim,)
        if prod(dims) != self.dim:
            raise ShapeError(f"factor dims {dims} do not multiply to {self.dim}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    def validate(self, policy: NumericPolicy | None = None) -> None:
        """Raise ValidationError if Hermiticity, trace or positivity fail."""
        policy = resolve(policy)
        residual = hermiticity_residual(self.matrix)
        if residual > policy.hermitian_tol:
            raise ValidationError(f"density operator not Hermitian (residual {residual:.3e})")
        trace = np.trace(self.matrix)
        if abs(trace - 1.0) > policy.trace_tol:
            raise ValidationError(f"density operator trace {trace.real:.12g} != 1")
        low = float(np.linalg.eigvalsh(self.matrix).min())
        if low < policy.eig_floor:
            raise ValidationError(f"density operator has negative eigenvalue {low:.3e}")

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


# =========================
# Core operations
# =========================

def tensor_product(a: ComplexMatrix, b: ComplexMatrix, policy: NumericPolicy | None = None) -> ComplexMatrix:
    """Kronecker product a ⊗ b, index of b fastest. Works for vectors too."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    check_dim_cap(a.shape[0] * b.shape[0], policy)
    return np.kron(a, b)


def kron_all(ops: Sequence[ComplexMatrix], policy: NumericPolicy | None = None) -> ComplexMatrix:
    out = np.ones((1, 1), dtype=complex) if np.asarray(ops[0]).ndim == 2 else np.ones(1, dtype=complex)
    for op in ops:
        out = tensor_product(out, op, policy)
    return out


def _check_keep(dims: Sequence[int], keep: Iterable[int]) -> list[int]:
    kept = sorted(set(int(k) for k in keep))
    if not kept:
        raise ShapeError("keep must name at least one factor")
    if kept[0] < 0 or kept[-1] >= len(dims):
        raise ShapeError(f"keep {kept} out of range for {len(dims)} factors")
    return kept


def partial_trace(rho: DensityOperator, dims: Sequence[int], keep: Iterable[int]) -> DensityOperator:
    """Trace out every factor not in *keep*; kept factors stay in original order."""
    dims = tuple(int(d) for d in dims)
    if prod(dims) != rho.dim:
        raise ShapeError(f"dims {dims} (∏ = {prod(dims)}) inconsistent with operator dimension {rho.dim}")
    kept = _check_keep(dims, keep)
    n = len(dims)
    row = list(range(n))
    col = [i + n if i in kept else i for i in range(n)]
    out = kept + [i + n for i in kept]
    tensor = rho.matrix.reshape(dims + dims)
    reduced = np.einsum(tensor, row + col, out)
    d = prod(dims[i] for i in kept)
    return DensityOperator(d, reduced.reshape(d, d), dims=tuple(dims[i] for i in kept))


def pure_partial_trace(psi: PureState, keep: Iterable[int]) -> DensityOperator:
    """Reduced operator of a pure state without forming |ψ⟩⟨ψ|."""
    kept = _check_keep(psi.dims, keep)
    m = amplitude_matrix(psi, kept)
    d = m.shape[0]
    return DensityOperator(d, m @ dagger(m), dims=tuple(psi.dims[i] for i in kept))


def amplitude_matrix(psi: PureState, left: Sequence[int]) -> ComplexMatrix:
    """Reshape ψ into a (∏ left dims) × (∏ rest dims) matrix, both sides in factor order."""
    left = list(left)
    rest = [i for i in range(len(psi.dims)) if i not in left]
    t = np.transpose(psi.tensor(), left + rest)
    dl = prod(psi.dims[i] for i in left)
    return t.reshape(dl, -1)


def phase_factor(vec: np.ndarray) -> complex:
    """Unit factor that makes the largest-magnitude entry (lowest index on ties) real positive."""
    mags = np.abs(vec)
    top = mags.max() if mags.size else 0.0
    if top == 0.0:
        return 1.0 + 0.0j
    k = int(np.flatnonzero(mags >= top * (1.0 - _PHASE_TIE))[0])
    return complex(np.conj(vec[k]) / mags[k])


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    return vec * phase_factor(vec)


def fix_phases(columns: np.ndarray) -> np.ndarray:
    """Apply the phase convention to every column."""
    out = np.array(columns, dtype=complex, copy=True)
    for j in range(out.shape[1]):
        out[:, j] = _fix_phase(out[:, j])
    return out


def eig_hermitian(
    a: ComplexMatrix, policy: NumericPolicy | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a Hermitian matrix.

    Returns (eigenvalues descending, eigenvectors as orthonormal columns)
    with the fixed phase convention applied.
    """
    a = as_matrix(a)
    check_hermitian(a, policy)
    h = 0.5 * (a + dagger(a))
    w, v = np.linalg.eigh(h)
    w = w[::-1].copy()
    v = fix_phases(v[:, ::-1])
    return w, v


def evolve(psi: PureState, u: ComplexMatrix, policy: NumericPolicy | None = None) -> PureState:
    """ψ ← Uψ for a unitary U on the full space."""
    u = as_matrix(u)
    if u.shape != (psi.dim, psi.dim):
        raise ShapeError(f"unitary shape {u.shape} does not act on dimension {psi.dim}")
    check_unitary(u, policy)
    return PureState(psi.dims, u @ psi.amplitudes)


def matrix_exponential_unitary(h: ComplexMatrix, t: float, policy: NumericPolicy | None = None) -> ComplexMatrix:
    """exp(−i h t) via the eigen-decomposition of h."""
    w, v = eig_hermitian(h, policy)
    u = (v * np.exp(-1j * w * float(t))) @ dagger(v)
    check_unitary(u, policy, what="exp(-iht)")
    return u


# =========================
# Factor embedding
# =========================

def embed_operator(
    op: ComplexMatrix,
    dims: Sequence[int],
    factors: Sequence[int],
    policy: NumericPolicy | None = None,
) -> ComplexMatrix:
    """
    Lift *op* (acting on *factors*, in the listed order) to the full space,
    identity on every other factor.
    """
    dims = tuple(int(d) for d in dims)
    factors = [int(f) for f in factors]
    if len(set(factors)) != len(factors) or any(not 0 <= f < len(dims) for f in factors):
        raise ShapeError(f"invalid factor list {factors} for dims {dims}")
    d_op = prod(dims[f] for f in factors)
    op = as_matrix(op)
    if op.shape != (d_op, d_op):
        raise ShapeError(f"operator shape {op.shape} does not match factors {factors} (dim {d_op})")
    total = prod(dims)
    check_dim_cap(total, policy)
    rest = [i for i in range(len(dims)) if i not in factors]
    full = np.kron(op, np.eye(prod(dims[i] for i in rest), dtype=complex))
    order = factors + rest
    if order == list(range(len(dims))):
        return full
    n = len(dims)
    shaped = full.reshape([dims[i] for i in order] * 2)
    inv = list(np.argsort(order))
    return np.transpose(shaped, inv + [n + i for i in inv]).reshape(total, total)


def apply_local_vector(
    vec: np.ndarray, dims: Sequence[int], op: ComplexMatrix, factors: Sequence[int]
) -> np.ndarray:
    """Apply *op* on *factors* to a raw amplitude vector laid out by *dims*."""
    dims = [int(d) for d in dims]
    factors = [int(f) for f in factors]
    k = len(factors)
    sub = [dims[f] for f in factors]
    op_t = as_matrix(op).reshape(sub + sub)
    res = np.tensordot(op_t, np.asarray(vec).reshape(dims), axes=(list(range(k, 2 * k)), factors))
    res = np.moveaxis(res, list(range(k)), factors)
    return res.reshape(-1)


def apply_local(psi: PureState, op: ComplexMatrix, factors: Sequence[int]) -> np.ndarray:
    """
    Apply *op* on *factors* to ψ and return the (unnormalized) amplitude vector.

    Used for projectors, so the result is generally not a normalized state.
    """
    return apply_local_vector(psi.amplitudes, psi.dims, op, factors)


# =========================
# Gate builders
# =========================

def shift_operator(d_control: int, d_target: int) -> ComplexMatrix:
    """Controlled cyclic shift |c⟩|t⟩ → |c⟩|t + c mod d_target⟩."""
    dim = d_control * d_target
    u = np.zeros((dim, dim), dtype=complex)
    for c in range(d_control):
        for t in range(d_target):
            u[c * d_target + (t + c) % d_target, c * d_target + t] = 1.0
    return u


def swap_operator(d: int) -> ComplexMatrix:
    """SWAP of two factors of dimension *d*."""
    u = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            u[b * d + a, a * d + b] = 1.0
    return u


def y_like_generator(d: int) -> ComplexMatrix:
    """Tridiagonal Hermitian generator equal to σ_y for d = 2."""
    g = np.zeros((d, d), dtype=complex)
    for k in range(d - 1):
        g[k, k + 1] = -1j
        g[k + 1, k] = 1j
    return g
