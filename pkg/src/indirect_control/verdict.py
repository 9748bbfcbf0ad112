"""Indirect-controllability verdicts and the ad-orbit necessary condition."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .bipartite import StructureReport, structure_report
from .closure import FullAlgebra, identify_full
from .operators import (
    DEFAULT_TOL, DimensionError, StructureError, as_matrix, is_density, is_skew_hermitian, tensor,
)
from .subspace import SubspaceBasis


class OrbitError(RuntimeError):
    """The orbit iteration did not stabilize within ``max_iter`` sweeps."""


@dataclass(frozen=True, eq=False)
class DensityState:
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if not is_density(m, 1e-8):
            raise StructureError("not a density matrix (Hermitian, trace 1, PSD)")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def purity(self):
        return float(np.trace(self.matrix @ self.matrix).real)

    def is_pure(self, tol=DEFAULT_TOL):
        return abs(self.purity - 1.0) <= tol.residual_tol

    def is_maximally_mixed(self, tol=DEFAULT_TOL):
        return np.linalg.norm(self.matrix - np.eye(self.dim) / self.dim) <= tol.residual_tol


class VerdictResult(str, Enum):
    COMPLETE = "INDIRECTLY_CONTROLLABLE_COMPLETE"
    PURE_ANCILLA = "INDIRECTLY_CONTROLLABLE_PURE_ANCILLA"
    NOT = "NOT_INDIRECTLY_CONTROLLABLE"
    INAPPLICABLE = "INAPPLICABLE"

    @property
    def is_yes(self):
        return self in (VerdictResult.COMPLETE, VerdictResult.PURE_ANCILLA)


@dataclass(frozen=True)
class Verdict:
    result: VerdictResult
    branch: str
    witnesses: dict = field(default_factory=dict)
    necessary_check: bool | None = None

    def to_dict(self):
        return {
            "result": self.result.value,
            "branch": self.branch,
            "witnesses": self.witnesses,
            "necessary_check": self.necessary_check,
        }


def decide(algebra, split, rho_A, tol=DEFAULT_TOL, report: StructureReport | None = None):
    """Verdict for ``algebra`` on the split given the ancilla state.

    Branches are tried in order: complete controllability of the total
    system, applicability (A-b), ancilla dimension >= 3, then the two-level
    ancilla test (full L_S and pure state).
    """
    if algebra.n != split.n_sa:
        raise DimensionError(f"algebra acts on {algebra.n}, split expects {split.n_sa}")
    if rho_A.dim != split.n_a:
        raise DimensionError(f"rho_A is {rho_A.dim}x{rho_A.dim}, expected n_A = {split.n_a}")
    if report is None:
        report = structure_report(algebra, split, tol)
    full = identify_full(algebra, split.n_sa)
    wit = {
        "dim_L": algebra.dim,
        "full": full.value,
        "dim_K": report.K.dim,
        "dim_P": None if report.P is None else report.P.dim,
        "dim_L_S": None if report.L_S is None else report.L_S.dim,
        "assumption_Aa": report.assumption_Aa,
        "assumption_Ab": report.assumption_Ab,
        "purity_rho_A": rho_A.purity,
        "purity_deficit": 1.0 - rho_A.purity,
    }
    if full in (FullAlgebra.EQUALS_SU, FullAlgebra.EQUALS_U):
        return Verdict(VerdictResult.COMPLETE, "complete_controllability", wit)
    if not report.assumption_Ab or report.P is None:
        return Verdict(VerdictResult.INAPPLICABLE, "assumption_Ab_fails", wit)
    if split.n_a >= 3:
        return Verdict(VerdictResult.NOT, "ancilla_dim_ge_3_not_complete", wit)
    if report.L_S_is_full and rho_A.is_pure(tol):
        return Verdict(VerdictResult.PURE_ANCILLA, "L_S_full_and_pure_ancilla", wit)
    reason = "L_S_not_full" if not report.L_S_is_full else "ancilla_not_pure"
    return Verdict(VerdictResult.NOT, reason, wit)


def ad_orbit(algebra, seed, max_iter=None, tol=DEFAULT_TOL):
    """Smallest subspace containing ``seed`` and invariant under ``[L, .]``.

    Orbit elements are processed in admission order, each bracketed with every
    basis element of L. ``max_iter`` caps the number of processed elements.
    """
    seed = as_matrix(seed)
    n = algebra.n
    if seed.shape != (n, n):
        raise DimensionError(f"seed must be {n}x{n}")
    cap = 2 * n * n
    mats = np.zeros((cap, n, n), dtype=np.complex128)
    q = np.zeros((cap + 1, 2 * n * n))
    count = 0
    # a skew seed keeps the orbit in u(n); project admitted elements to stay there
    skew = is_skew_hermitian(seed, tol.residual_tol * max(1.0, np.linalg.norm(seed)))
    if _kernels.admit(q, count, _kernels.to_coords(seed), tol.rank_tol):
        mats[0] = _kernels.from_coords(q[0], n)
        if skew:
            _kernels.skew_fix(q, 0, mats)
        count = 1
    if not count:
        return SubspaceBasis.zero(n)
    lmats = np.ascontiguousarray(algebra.basis.elements)
    count, processed, over = _kernels.orbit_sweep(lmats, mats, q, count, 0, tol.rank_tol, skew)
    if over:
        raise OrbitError("orbit grew past the ambient real dimension")
    if max_iter is not None and count > max_iter:
        raise OrbitError(f"orbit needed {count} sweeps, more than max_iter={max_iter}")
    return SubspaceBasis(mats[:count], n)


@dataclass(frozen=True)
class NecessaryReport:
    passed: bool
    dim_V: int
    dim_trace: int
    target_dim: int

    def to_dict(self):
        return {
            "passed": self.passed,
            "dim_V": self.dim_V,
            "dim_Tr_A_V": self.dim_trace,
            "target_dim": self.target_dim,
        }


def default_rho_S(split, K, eps=0.01):
    """Maximally mixed state nudged along the first K direction.

    When K is zero the first su(n_S) basis element is used instead.
    """
    from .operators import su_basis

    direction = K.elements[0] if K.dim else su_basis(split.n_s)[0]
    m = np.eye(split.n_s) / split.n_s + eps * 1j * direction
    return DensityState(0.5 * (m + m.conj().T))


def necessary_condition(algebra, split, rho_S, rho_A, tol=DEFAULT_TOL, max_iter=None):
    """Whether the partial trace of the orbit of ``i rho_S (x) rho_A`` spans u(n_S).

    A failure proves the system is not indirectly controllable with this
    ancilla state; a pass is inconclusive.
    """
    if rho_S.dim != split.n_s or rho_A.dim != split.n_a:
        raise DimensionError("state dimensions do not match the split")
    if rho_S.is_maximally_mixed(tol):
        raise StructureError("rho_S must differ from the maximally mixed state")
    V = ad_orbit(algebra, 1j * tensor(rho_S.matrix, rho_A.matrix), max_iter, tol)
    traced = [_kernels.partial_trace_right(v, split.n_s, split.n_a) for v in V.elements]
    span = SubspaceBasis.from_spanning(traced, split.n_s, tol.rank_tol) if traced \
        else SubspaceBasis.zero(split.n_s)
    target = split.n_s ** 2
    return NecessaryReport(span.dim == target, V.dim, span.dim, target)
