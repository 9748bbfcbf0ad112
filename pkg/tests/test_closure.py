import numpy as np
import pytest

from indirect_control.closure import (
    ClosureError, FullAlgebra, closure_certificate, contains, identify_full, lie_closure,
)
from indirect_control.operators import (
    PAULI_X, PAULI_Y, PAULI_Z, SIGMA_X, SIGMA_Y, SIGMA_Z, StructureError, DimensionError,
    random_skew_hermitian, su_basis,
)
from oracles import brute_closure, in_span

I2 = np.eye(2)
k = np.kron

EXAMPLE1 = [1j * k(SIGMA_X, SIGMA_X) - k(SIGMA_Z, I2), k(I2, SIGMA_X), k(I2, SIGMA_Y)]
FULL = [1j * k(SIGMA_X, SIGMA_X), k(I2, SIGMA_X), k(I2, SIGMA_Y), k(SIGMA_Z, I2), k(SIGMA_X, I2)]


def test_example1_dimension():
    alg = lie_closure(EXAMPLE1)
    assert alg.dim == 10 == len(brute_closure(EXAMPLE1))
    assert identify_full(alg, 4) is FullAlgebra.PROPER
    assert alg.traceless and alg.closed
    assert closure_certificate(alg) <= 1e-9


def test_example1_span_matches_listed_basis():
    listed = [1j * k(a, b) for a in (SIGMA_X, SIGMA_Y) for b in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    listed += [k(I2, b) for b in (SIGMA_X, SIGMA_Y, SIGMA_Z)] + [k(SIGMA_Z, I2)]
    alg = lie_closure(EXAMPLE1)
    assert alg.basis.contains_all(listed)
    assert lie_closure(listed).basis.same_span(alg.basis)


def test_single_qubit_examples():
    # i times the Hermitian Paulis are skew
    assert lie_closure([1j * PAULI_X, 1j * PAULI_Y]).dim == 3
    assert lie_closure([1j * PAULI_Z]).dim == 1
    u2 = lie_closure([1j * PAULI_X, 1j * PAULI_Y, 1j * PAULI_Z, 1j * I2])
    assert identify_full(u2, 2) is FullAlgebra.EQUALS_U


def test_full_control_identifies_su4():
    alg = lie_closure(FULL)
    assert alg.dim == 15 == len(brute_closure(FULL))
    assert identify_full(alg, 4) is FullAlgebra.EQUALS_SU


def test_contains_examples():
    alg = lie_closure(EXAMPLE1)
    assert contains(alg, k(I2, SIGMA_Z))
    assert not contains(alg, 1j * k(SIGMA_Z, SIGMA_X))
    assert not in_span(brute_closure(EXAMPLE1), 1j * k(SIGMA_Z, SIGMA_X))
    assert contains(alg, np.zeros((4, 4)))
    with pytest.raises(DimensionError):
        contains(alg, np.eye(2))


def test_rejects_non_skew_and_empty():
    with pytest.raises(StructureError):
        lie_closure([PAULI_X])
    with pytest.raises(ValueError):
        lie_closure([])
    with pytest.raises(DimensionError):
        lie_closure([SIGMA_X, su_basis(3)[0]])


def test_max_dim_overflow():
    with pytest.raises(ClosureError):
        lie_closure(FULL, max_dim=10)


def test_identify_full_dimension_mismatch():
    with pytest.raises(DimensionError):
        identify_full(lie_closure(EXAMPLE1), 2)


def test_monotone_in_generators(rng):
    base = lie_closure(EXAMPLE1).dim
    assert lie_closure(EXAMPLE1 + [k(SIGMA_X, I2)]).dim >= base
    assert lie_closure(EXAMPLE1 + [random_skew_hermitian(4, rng, traceless=True)]).dim >= base


def test_closure_matches_oracle_random(rng):
    for n in (3, 4):
        for _ in range(3):
            # sparse-ish generators that often close to a proper subalgebra
            g1 = np.zeros((n, n), dtype=complex)
            g1[0, 1], g1[1, 0] = 1, -1
            g2 = 1j * np.diag(rng.standard_normal(n))
            alg = lie_closure([g1, g2])
            assert alg.dim == len(brute_closure([g1, g2]))
