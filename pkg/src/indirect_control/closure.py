"""Dynamical Lie algebra by commutator closure."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .operators import DEFAULT_TOL, DimensionError, StructureError, as_matrix, is_skew_hermitian
from .subspace import SubspaceBasis, bracket_residual


class ClosureError(RuntimeError):
    """The span grew past ``max_dim``; signals a tolerance pathology."""


class FullAlgebra(str, Enum):
    EQUALS_SU = "equals_su"
    EQUALS_U = "equals_u"
    PROPER = "proper"


@dataclass(frozen=True, eq=False)
class DynamicalAlgebra:
    basis: SubspaceBasis
    generators: tuple
    closed: bool
    traceless: bool

    @property
    def dim(self):
        return self.basis.dim

    @property
    def n(self):
        return self.basis.ambient_dim

    def contains(self, m, rank_tol=DEFAULT_TOL.rank_tol):
        return contains(self, m, rank_tol)


def _grow(mats, q, count, sweep, rank_tol, max_dim, *args):
    count, _, over = sweep(*args, mats, q, count, 0, rank_tol, True)
    if over:
        raise ClosureError(
            f"span dimension exceeded max_dim={max_dim}; loosen or tighten rank_tol"
        )
    return count


def lie_closure(generators, tol=DEFAULT_TOL, max_dim=None):
    """Orthonormal basis of the smallest bracket-closed real span of ``generators``.

    Elements are admitted in a fixed order: generators first, then brackets of
    each admitted element with every earlier one, each candidate orthogonalized
    (Gram-Schmidt, two passes) against the running basis and kept when its
    residual exceeds ``tol.rank_tol``.
    """
    gens = [as_matrix(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise DimensionError("generators must share one dimension")
        if not is_skew_hermitian(g, tol.residual_tol * max(1.0, np.linalg.norm(g))):
            raise StructureError("generators must be skew-Hermitian")
    max_dim = n * n if max_dim is None else int(max_dim)

    mats = np.zeros((max_dim, n, n), dtype=np.complex128)
    q = np.zeros((max_dim + 1, 2 * n * n))
    count = 0
    for g in gens:
        if _kernels.admit(q, count, _kernels.to_coords(g), tol.rank_tol):
            if count == max_dim:
                raise ClosureError(f"generators alone exceed max_dim={max_dim}")
            mats[count] = _kernels.from_coords(q[count], n)
            _kernels.skew_fix(q, count, mats)
            count += 1

    count = _grow(mats, q, count, _kernels.closure_sweep, tol.rank_tol, max_dim)
    basis = SubspaceBasis(mats[:count], n)
    return DynamicalAlgebra(
        basis=basis,
        generators=tuple(gens),
        closed=True,
        traceless=basis.is_traceless(tol.rank_tol),
    )


def contains(algebra, m, rank_tol=DEFAULT_TOL.rank_tol):
    """Whether ``m`` lies in the span within ``rank_tol * |m|``."""
    return algebra.basis.contains(m, rank_tol)


def identify_full(algebra, n):
    if algebra.n != n:
        raise DimensionError(f"algebra acts on dimension {algebra.n}, not {n}")
    if algebra.dim == n * n - 1 and algebra.traceless:
        return FullAlgebra.EQUALS_SU
    if algebra.dim == n * n:
        return FullAlgebra.EQUALS_U
    return FullAlgebra.PROPER


def closure_certificate(algebra):
    """Worst relative out-of-span residual of ``[b_i, b_j]`` over basis pairs."""
    return bracket_residual(algebra.basis, algebra.basis, algebra.basis)
