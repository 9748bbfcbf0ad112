"""Explicit steering unitaries for indirectly controllable systems.

For a two-level ancilla in a pure state the total evolution is

    U = (K1 (x) 1) exp(i A (x) sbar) (K2 (x) 1) (1 (x) T)

with ``X = K1 exp(A) K2`` a KAK factorization of the target and ``T``
rotating the ancilla state onto E_1. Since ``i sbar E_1 = E_1`` the middle
factor acts on ``rho (x) E_1`` as ``exp(A) rho exp(-A) (x) E_1``.
"""
from dataclasses import dataclass, field

import numpy as np

from .kak import DEFAULT_KAK_TOL, kak_factorize, log_special_unitary
from .operators import (
    DEFAULT_TOL, E1, SIGMA_BAR, StructureError, dagger, expm_skew, hermitian_basis,
    partial_trace_A, special_unitarize, tensor, trace_project,
)
from .subspace import SubspaceBasis
from .symmetric import validate_cartan_pair

DEFAULT_MAP_TOL = 1e-8

TAG_K = "K(x)1"
TAG_P = "iP(x)su(n_A)"
TAG_A = "1(x)su(n_A)"


class SynthesisError(RuntimeError):
    """A plan factor failed its membership certificate."""


@dataclass(frozen=True, eq=False)
class PlanFactor:
    exponent: np.ndarray
    subspace: str
    certified: bool
    residual: float


@dataclass(frozen=True, eq=False)
class SteeringPlan:
    target: np.ndarray
    factors: tuple
    assembled: np.ndarray
    kak: object = None
    ancilla_rotation: np.ndarray | None = None
    n_s: int = 0
    n_a: int = 0
    notes: tuple = field(default=())

    @property
    def certified(self):
        return all(f.certified for f in self.factors)

    def product(self):
        n = self.assembled.shape[0]
        out = np.eye(n, dtype=complex)
        for f in self.factors:
            out = out @ expm_skew(f.exponent)
        return out


def ancilla_diagonalizer(rho_A, tol=DEFAULT_TOL):
    """Special unitary ``T`` with ``T rho_A T^dagger = E_1`` for a pure qubit state."""
    m = rho_A.matrix
    if m.shape != (2, 2):
        raise StructureError("ancilla must be a qubit")
    if not rho_A.is_pure(tol):
        raise StructureError(f"ancilla state is not pure (purity {rho_A.purity:.12f})")
    _, vecs = np.linalg.eigh(m)
    v = vecs[:, -1]
    if abs(v[0]) > 1e-15:
        v = v * np.exp(-1j * np.angle(v[0]))
    t = np.array([[np.conj(v[0]), np.conj(v[1])], [-v[1], v[0]]])
    return special_unitarize(t)


def _certify(L, exponent, tag, tol):
    res = L.basis.residual(exponent)
    scale = max(np.linalg.norm(exponent), np.finfo(float).tiny)
    return PlanFactor(exponent, tag, bool(res <= 1e-8 * max(1.0, scale)), float(res))


def cartan_pair_from_structure(report, tol=DEFAULT_TOL, seed=None):
    """Cartan pair (K, traceless part of P) on the system."""
    if report.P is None:
        raise StructureError("structure report has no P space")
    n = report.K.ambient_dim
    p_tilde = SubspaceBasis.from_spanning(
        [trace_project(p) for p in report.P.elements], n, tol.rank_tol
    )
    kwargs = {} if seed is None else {"seed": seed}
    return validate_cartan_pair(report.K, p_tilde, tol, **kwargs)


def build_steering(x, algebra, split, report, pair, rho_A, tol=DEFAULT_TOL,
                   kak_tol=DEFAULT_KAK_TOL, strict=True):
    """Steering plan for the two-level pure-ancilla construction."""
    x = special_unitarize(np.asarray(x, dtype=complex))
    n_s, n_a = split.n_s, split.n_a
    if n_a != 2:
        raise StructureError("the pure-ancilla construction needs a two-level ancilla")
    t = ancilla_diagonalizer(rho_A, tol)
    fact = kak_factorize(x, pair, kak_tol)
    eye_s, eye_a = np.eye(n_s), np.eye(n_a)
    factors = [_certify(algebra, tensor(k, eye_a), TAG_K, tol) for k in fact.k1_exponents]
    factors.append(_certify(algebra, tensor(1j * fact.A_tilde, SIGMA_BAR), TAG_P, tol))
    factors += [_certify(algebra, tensor(k, eye_a), TAG_K, tol) for k in fact.k2_exponents]
    factors.append(_certify(algebra, tensor(eye_s, log_special_unitary(t)), TAG_A, tol))
    plan = _assemble(x, factors, fact, t, n_s, n_a, (f"kak:{fact.method}",))
    if strict and not plan.certified:
        bad = [f.subspace for f in plan.factors if not f.certified]
        raise SynthesisError(f"factors outside the dynamical algebra: {bad}")
    return plan


def build_complete_steering(x, algebra, split, strict=True):
    """Plan ``X (x) 1`` for a completely controllable total system."""
    x = special_unitarize(np.asarray(x, dtype=complex))
    exponent = tensor(log_special_unitary(x), np.eye(split.n_a))
    factors = [_certify(algebra, exponent, TAG_K, DEFAULT_TOL)]
    plan = _assemble(x, factors, None, None, split.n_s, split.n_a, ("complete",))
    if strict and not plan.certified:
        raise SynthesisError("log(X) (x) 1 is outside the dynamical algebra")
    return plan


def _assemble(x, factors, fact, t, n_s, n_a, notes):
    u = np.eye(n_s * n_a, dtype=complex)
    for f in factors:
        u = u @ expm_skew(f.exponent)
    return SteeringPlan(x, tuple(factors), u, fact, t, n_s, n_a, notes)


@dataclass(frozen=True)
class VerificationReport:
    max_deviation: float
    factorized_deviation: float | None
    product_deviation: float
    kak_residual: float | None
    certificates: bool
    map_tol: float

    @property
    def passed(self):
        ok = self.max_deviation <= self.map_tol and self.certificates
        ok &= self.product_deviation <= self.map_tol
        if self.factorized_deviation is not None:
            ok &= self.factorized_deviation <= self.map_tol
        return bool(ok)

    def to_dict(self):
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "factorized_deviation": self.factorized_deviation,
            "product_deviation": self.product_deviation,
            "kak_residual": self.kak_residual,
            "certificates": self.certificates,
            "map_tol": self.map_tol,
        }


def induced_map(u, b, rho_A, n_s, n_a):
    from .operators import BipartiteSplit

    out = u @ tensor(b, rho_A) @ dagger(u)
    return partial_trace_A(out, BipartiteSplit(n_s, n_a))


def verify_steering(plan, rho_A, map_tol=DEFAULT_MAP_TOL):
    """Compare the induced map on a Hermitian operator basis with ``B -> X B X^dagger``."""
    rho = np.asarray(getattr(rho_A, "matrix", rho_A), dtype=complex)
    u, x = plan.assembled, plan.target
    n_s, n_a = plan.n_s, plan.n_a
    worst = 0.0
    worst_fact = 0.0 if plan.ancilla_rotation is not None else None
    for b in hermitian_basis(n_s):
        want = x @ b @ dagger(x)
        worst = max(worst, float(np.linalg.norm(induced_map(u, b, rho, n_s, n_a) - want)))
        if worst_fact is not None:
            full = u @ tensor(b, rho) @ dagger(u)
            worst_fact = max(worst_fact, float(np.linalg.norm(full - tensor(want, E1))))
    prod = float(np.linalg.norm(plan.product() - u))
    kres = None if plan.kak is None else plan.kak.residual
    return VerificationReport(worst, worst_fact, prod, kres, plan.certified, map_tol)
