"""The numba and numpy kernel paths must make the same admission decisions."""
import numpy as np
import pytest

from indirect_control import _kernels
from indirect_control.closure import lie_closure
from indirect_control.operators import random_skew_hermitian, su_basis
from indirect_control.verdict import ad_orbit
from oracles import partial_trace_loops


def _run_closure(name, gens):
    previous = _kernels.backend()
    _kernels.set_backend(name)
    try:
        return lie_closure(gens)
    finally:
        _kernels.set_backend(previous)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_backends_agree_on_closure(rng, n):
    if "numba" not in _kernels.BACKENDS:
        pytest.skip("numba unavailable")
    gens = [random_skew_hermitian(n, rng, traceless=True) for _ in range(2)]
    a = _run_closure("numpy", gens)
    b = _run_closure("numba", gens)
    assert a.dim == b.dim == n * n - 1
    assert a.basis.same_span(b.basis, 1e-8)


def test_backends_agree_on_structured_closure():
    if "numba" not in _kernels.BACKENDS:
        pytest.skip("numba unavailable")
    from indirect_control.fixtures import load_fixture

    gens = load_fixture("p1_counterexample").generators()
    a = _run_closure("numpy", gens)
    b = _run_closure("numba", gens)
    assert a.dim == b.dim == 21
    # same admission order gives nearly identical bases
    assert np.allclose(np.abs(a.basis.coords), np.abs(b.basis.coords), atol=1e-8)


def test_admit_rejects_dependent(backend):
    q = np.zeros((4, 8))
    v1 = np.array([1.0, 0, 0, 0, 0, 0, 0, 0])
    assert _kernels.admit(q, 0, v1, 1e-9)
    assert not _kernels.admit(q, 1, 3 * v1, 1e-9)
    v2 = np.array([1.0, 1e-12, 0, 0, 0, 0, 0, 0])
    assert not _kernels.admit(q, 1, v2, 1e-9)
    v3 = np.array([1.0, 1.0, 0, 0, 0, 0, 0, 0])
    assert _kernels.admit(q, 1, v3, 1e-9)
    assert np.allclose(q[:2] @ q[:2].T, np.eye(2))


def test_partial_trace_kernel(backend, rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert np.allclose(_kernels.partial_trace_right(m, 3, 2), partial_trace_loops(m, 3, 2))
    assert np.allclose(_kernels.partial_trace_right(m, 2, 3), partial_trace_loops(m, 2, 3))


def test_closure_per_backend(backend):
    alg = lie_closure(list(su_basis(3)[:2]))
    # the first two elements act on levels 0, 1 only and generate su(2)
    assert alg.dim == 3


def test_orbit_per_backend(backend, rng):
    alg = lie_closure(list(su_basis(4)))
    seed = 1j * np.diag([0.4, 0.3, 0.2, 0.1])
    v = ad_orbit(alg, seed)
    # traceless part spans su(4); the trace part is central
    assert v.dim == 16


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")


def test_orbit_stays_skew_hermitian(backend, rng):
    # conjugated Ising algebra: small residuals used to leak non-skew noise into the orbit
    from indirect_control.fixtures import load_fixture
    from indirect_control.operators import random_density, random_pure_state, random_unitary, tensor

    base = lie_closure(load_fixture("example1_ising").generators())
    for _ in range(10):
        w = tensor(random_unitary(2, rng), random_unitary(2, rng))
        alg = lie_closure([w @ g @ w.conj().T for g in base.basis.elements])
        seed = 1j * tensor(random_density(2, rng), random_pure_state(2, rng))
        orb = ad_orbit(alg, seed)
        assert orb.dim <= 16
        assert max(np.linalg.norm(e + e.conj().T) for e in orb.elements) <= 1e-13
        assert max(np.linalg.norm(e + e.conj().T) for e in alg.basis.elements) <= 1e-13
