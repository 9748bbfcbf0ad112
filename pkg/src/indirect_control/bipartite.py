"""Extraction of the K, P and L_S spaces of a bipartite dynamical algebra.

``K`` collects the S-operators ``k`` (traceless) with ``k (x) 1`` in L;
``P`` collects the skew-Hermitian ``p`` with ``i p (x) sigma`` in L for
``sigma`` in su(n_A); ``L_S = K + P``.
"""
from dataclasses import dataclass, field

import numpy as np

from .operators import DEFAULT_TOL, partial_trace_A, partial_trace_S, su_basis, tensor, u_basis
from .subspace import SubspaceBasis, preimage_in_span


class StructureMismatch(RuntimeError):
    """Per-sigma P spaces disagree (assumption A-b fails numerically)."""


@dataclass(frozen=True, eq=False)
class StructureReport:
    K: SubspaceBasis
    P: SubspaceBasis | None
    L_S: SubspaceBasis | None
    assumption_Aa: bool
    assumption_Ab: bool
    decomposition_consistent: bool
    K_cap_P_dim: int | None
    P_per_sigma: tuple = field(default=())

    @property
    def L_S_is_full(self):
        return self.L_S is not None and self.L_S.dim == self.L_S.ambient_dim ** 2


def _interaction_part(m, split):
    """Component of ``m`` in span{S (x) sigma : S in su(n_S), sigma in su(n_A)}."""
    n_s, n_a = split.n_s, split.n_a
    rs = partial_trace_A(m, split) / n_a
    ra = partial_trace_S(m, split) / n_s
    t = np.trace(m) / split.n_sa
    return m - tensor(rs, np.eye(n_a)) - tensor(np.eye(n_s), ra) + t * np.eye(split.n_sa)


def check_assumptions(algebra, split, tol=DEFAULT_TOL):
    """Return ``(Aa, Ab)`` for a closed algebra."""
    split.check(algebra.basis.elements[0] if algebra.dim else np.zeros((split.n_sa,) * 2))
    eye_s = np.eye(split.n_s)
    ab = all(algebra.basis.contains(tensor(eye_s, s), tol.rank_tol) for s in su_basis(split.n_a))
    aa = any(
        np.linalg.norm(_interaction_part(b, split)) > tol.rank_tol for b in algebra.basis.elements
    )
    return aa, ab


def compute_K(algebra, split, tol=DEFAULT_TOL):
    dom = su_basis(split.n_s)
    eye_a = np.eye(split.n_a)
    images = np.array([tensor(k, eye_a) for k in dom])
    return preimage_in_span(algebra.basis, images, dom, tol.rank_tol)


def compute_P_per_sigma(algebra, split, tol=DEFAULT_TOL):
    dom = u_basis(split.n_s)
    out = []
    for s in su_basis(split.n_a):
        images = np.array([tensor(1j * p, s) for p in dom])
        out.append(preimage_in_span(algebra.basis, images, dom, tol.rank_tol))
    return out


def compute_P(algebra, split, tol=DEFAULT_TOL):
    """Common P space over a full su(n_A) basis; raises if the per-sigma spaces differ."""
    per = compute_P_per_sigma(algebra, split, tol)
    first = per[0]
    for j, pj in enumerate(per[1:], start=1):
        if not first.same_span(pj, tol.rank_tol):
            raise StructureMismatch(
                f"P for sigma_0 (dim {first.dim}) differs from P for sigma_{j} (dim {pj.dim})"
            )
    return first


def structure_report(algebra, split, tol=DEFAULT_TOL):
    aa, ab = check_assumptions(algebra, split, tol)
    K = compute_K(algebra, split, tol)
    per = compute_P_per_sigma(algebra, split, tol)
    P = None
    if ab and all(per[0].same_span(p, tol.rank_tol) for p in per[1:]):
        P = per[0]
    if P is None:
        return StructureReport(
            K=K, P=None, L_S=None, assumption_Aa=aa, assumption_Ab=ab,
            decomposition_consistent=False, K_cap_P_dim=None, P_per_sigma=tuple(per),
        )
    L_S = K.union(P, tol.rank_tol)
    consistent = algebra.dim == K.dim + P.dim * (split.n_a ** 2 - 1)
    return StructureReport(
        K=K, P=P, L_S=L_S, assumption_Aa=aa, assumption_Ab=ab,
        decomposition_consistent=consistent,
        K_cap_P_dim=K.intersection(P, tol.rank_tol).dim,
        P_per_sigma=tuple(per),
    )
