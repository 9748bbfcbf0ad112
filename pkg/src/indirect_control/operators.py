"""Dense complex-matrix substrate.

Pauli matrices follow the skew-Hermitian, half-normalized convention

    sigma_x = 1/2 [[0, i], [i, 0]],  sigma_y = 1/2 [[0, -1], [1, 0]],
    sigma_z = 1/2 [[i, 0], [0, -i]],

so that ``[sigma_x, sigma_y] = sigma_z`` (cyclically) and
``{sigma_j, sigma_k} = -1/2 delta_jk 1``. The usual Hermitian Paulis are
available as ``PAULI_X`` etc. for building states.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class StructureError(ValueError):
    """A matrix lacks a required structural property (skew, unitary, ...)."""


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by every rank and residual decision.

    ``rank_tol`` is a relative singular-value / span-residual cutoff;
    ``residual_tol`` bounds Frobenius-norm residuals of matrix identities.
    """

    rank_tol: float = 1e-9
    residual_tol: float = 1e-9

    def __post_init__(self):
        if not (self.rank_tol > 0 and self.residual_tol > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.rank_tol > 1e-6:
            raise ValueError("rank_tol must not exceed 1e-6")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class BipartiteSplit:
    n_s: int
    n_a: int

    def __post_init__(self):
        if self.n_s < 1 or self.n_a < 1:
            raise ValueError("subsystem dimensions must be positive")

    @property
    def n_sa(self):
        return self.n_s * self.n_a

    def check(self, m):
        if np.shape(m) != (self.n_sa, self.n_sa):
            raise DimensionError(
                f"expected a {self.n_sa}x{self.n_sa} operator, got shape {np.shape(m)}"
            )


SIGMA_X = 0.5 * np.array([[0, 1j], [1j, 0]])
SIGMA_Y = 0.5 * np.array([[0, -1], [1, 0]], dtype=complex)
SIGMA_Z = 0.5 * np.array([[1j, 0], [0, -1j]])
SIGMAS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# Hermitian Paulis, for states and physics-convention Hamiltonians only.
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]])
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# diag(-i, i); note i * SIGMA_BAR @ E1 == E1
SIGMA_BAR = np.diag([-1j, 1j])
E1 = np.diag([1.0 + 0j, 0.0])


def as_matrix(m):
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def _same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")


def dagger(m):
    return np.conj(m).T


def tensor(a, b):
    """Kronecker product; ``a`` acts on S (left factor), ``b`` on A."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_A(m, split):
    """Trace out the auxiliary (right) factor of an operator on S+A."""
    m = as_matrix(m)
    split.check(m)
    return _kernels.partial_trace_right(m, split.n_s, split.n_a)


def partial_trace_S(m, split):
    m = as_matrix(m)
    split.check(m)
    return np.trace(m.reshape(split.n_s, split.n_a, split.n_s, split.n_a), axis1=0, axis2=2)


def commutator(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b)
    return a @ b - b @ a


def anticommutator(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b)
    return a @ b + b @ a


def hs_inner(a, b):
    """Real Hilbert-Schmidt form ``Re tr(a^dagger b)``."""
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b)
    return float(np.vdot(a, b).real)


def hs_norm(a):
    return float(np.linalg.norm(a))


def is_hermitian(m, tol=DEFAULT_TOL.residual_tol):
    return np.linalg.norm(m - dagger(m)) <= tol


def is_skew_hermitian(m, tol=DEFAULT_TOL.residual_tol):
    return np.linalg.norm(m + dagger(m)) <= tol


def is_unitary(m, tol=DEFAULT_TOL.residual_tol):
    m = as_matrix(m)
    return np.linalg.norm(dagger(m) @ m - np.eye(m.shape[0])) <= tol


def is_density(m, tol=DEFAULT_TOL.residual_tol):
    m = as_matrix(m)
    if not is_hermitian(m, tol) or abs(np.trace(m) - 1) > tol:
        return False
    return np.linalg.eigvalsh(0.5 * (m + dagger(m))).min() >= -tol


def expm_skew(a, tol=DEFAULT_TOL.residual_tol):
    """Exponential of a skew-Hermitian matrix via eigendecomposition of ``i a``."""
    a = as_matrix(a)
    scale = max(1.0, hs_norm(a))
    if not is_skew_hermitian(a, tol * scale):
        raise StructureError("expm_skew needs a skew-Hermitian argument")
    h = 1j * a
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    # a = -i h  =>  e^a = V diag(e^{-i w}) V^dagger
    return (v * np.exp(-1j * w)) @ dagger(v)


def trace_project(m):
    """Remove the identity component: ``m - tr(m)/n * 1``."""
    m = as_matrix(m)
    n = m.shape[0]
    return m - np.trace(m) / n * np.eye(n)


def su_basis(n):
    """HS-orthonormal basis of su(n) (skew-Hermitian generalized Gell-Mann)."""
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = m[k, j] = 1j / np.sqrt(2)
            out.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1 / np.sqrt(2)
            m[k, j] = -1 / np.sqrt(2)
            out.append(m)
    for d in range(1, n):
        diag = np.zeros(n)
        diag[:d] = 1.0
        diag[d] = -d
        out.append(np.diag(1j * diag / np.linalg.norm(diag)))
    return np.array(out, dtype=complex).reshape(len(out), n, n)


def u_basis(n):
    """``su_basis(n)`` plus the normalized identity direction ``i 1 / sqrt(n)``."""
    ident = (1j / np.sqrt(n) * np.eye(n))[None]
    return np.concatenate((su_basis(n), ident))


def hermitian_basis(n):
    """HS-orthonormal basis of n x n Hermitian matrices (``n^2`` elements)."""
    return np.array([-1j * m for m in u_basis(n)])


def random_unitary(n, rng):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_special_unitary(n, rng):
    u = random_unitary(n, rng)
    return u / np.linalg.det(u) ** (1.0 / n)


def random_skew_hermitian(n, rng, traceless=False):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = 0.5 * (z - dagger(z))
    return trace_project(a) if traceless else a


def random_density(n, rng, rank=None):
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_pure_state(n, rng):
    return random_density(n, rng, rank=1)


def special_unitarize(u):
    u = as_matrix(u)
    return u / np.linalg.det(u) ** (1.0 / u.shape[0])
