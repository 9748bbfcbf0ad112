import numpy as np
import pytest

from indirect_control.bipartite import structure_report
from indirect_control.closure import lie_closure
from indirect_control.fixtures import load_fixture
from indirect_control.operators import (
    BipartiteSplit, E1, SIGMA_X, SIGMA_Y, SIGMA_Z, DimensionError, StructureError,
    random_density, random_pure_state, random_skew_hermitian, random_unitary, su_basis, tensor,
)
from indirect_control.verdict import (
    DensityState, OrbitError, VerdictResult, ad_orbit, decide, default_rho_S, necessary_condition,
)
from oracles import brute_orbit, rank

I2 = np.eye(2)
SPLIT22 = BipartiteSplit(2, 2)
MIXED = DensityState(np.diag([0.6, 0.4]))


def _load(name):
    spec = load_fixture(name)
    return spec, lie_closure(spec.generators())


@pytest.fixture(scope="module")
def ex1():
    return _load("example1_ising")[1]


@pytest.fixture(scope="module")
def p1():
    return _load("p1_counterexample")


def test_density_state_validation():
    with pytest.raises(StructureError):
        DensityState(np.diag([1.2, -0.2]))
    with pytest.raises(StructureError):
        DensityState(np.array([[0.5, 1], [0, 0.5]]))
    s = DensityState(E1)
    assert s.is_pure() and not s.is_maximally_mixed()
    assert DensityState(I2 / 2).is_maximally_mixed()
    assert abs(MIXED.purity - 0.52) < 1e-12


def test_example1_verdicts(ex1):
    v = decide(ex1, SPLIT22, DensityState(E1))
    assert v.result is VerdictResult.PURE_ANCILLA and v.result.is_yes
    v = decide(ex1, SPLIT22, MIXED)
    assert v.result is VerdictResult.NOT and v.branch == "ancilla_not_pure"
    assert abs(v.witnesses["purity_deficit"] - 0.48) < 1e-12


def test_complete_branch():
    _, alg = _load("full_control")
    for rho in (DensityState(E1), MIXED, DensityState(I2 / 2)):
        assert decide(alg, SPLIT22, rho).result is VerdictResult.COMPLETE


def test_p1_not_controllable(p1):
    spec, alg = p1
    v = decide(alg, spec.split, DensityState(E1))
    assert v.result is VerdictResult.NOT and v.branch == "L_S_not_full"
    assert v.witnesses["dim_L_S"] == 11


def test_qutrit_ancilla(rng):
    spec, alg = _load("qutrit_ancilla")
    assert spec.n_a == 3
    for rho in (DensityState(np.diag([1.0, 0, 0])), DensityState(random_density(3, rng))):
        v = decide(alg, spec.split, rho)
        assert v.result is VerdictResult.NOT
        assert v.branch == "ancilla_dim_ge_3_not_complete"


def test_inapplicable():
    alg = lie_closure([1j * tensor(SIGMA_X, SIGMA_X), tensor(SIGMA_Z, I2)])
    assert decide(alg, SPLIT22, DensityState(E1)).result is VerdictResult.INAPPLICABLE
    alg = lie_closure([1j * tensor(SIGMA_Z, SIGMA_X)])
    assert decide(alg, SPLIT22, DensityState(E1)).result is VerdictResult.INAPPLICABLE


def test_dimension_checks(ex1):
    with pytest.raises(DimensionError):
        decide(ex1, BipartiteSplit(2, 3), DensityState(E1))
    with pytest.raises(DimensionError):
        decide(ex1, SPLIT22, DensityState(np.eye(3) / 3))


def test_verdict_invariant_under_local_unitaries(ex1, rng):
    for _ in range(5):
        ws, wa = random_unitary(2, rng), random_unitary(2, rng)
        w = tensor(ws, wa)
        alg = lie_closure([w @ g @ w.conj().T for g in ex1.basis.elements])
        rho = DensityState(wa @ E1 @ wa.conj().T)
        assert decide(alg, SPLIT22, rho).result is VerdictResult.PURE_ANCILLA
        rho = DensityState(wa @ MIXED.matrix @ wa.conj().T)
        assert decide(alg, SPLIT22, rho).result is VerdictResult.NOT


def test_to_dict(ex1):
    d = decide(ex1, SPLIT22, DensityState(E1)).to_dict()
    assert d["result"] == "INDIRECTLY_CONTROLLABLE_PURE_ANCILLA"
    assert d["witnesses"]["dim_L"] == 10


def test_orbit_of_identity_is_trivial(ex1):
    orb = ad_orbit(ex1, 1j * np.eye(4))
    assert orb.dim == 1
    assert ad_orbit(ex1, np.zeros((4, 4))).dim == 0


def test_orbit_matches_oracle(ex1, p1, rng, backend):
    spec, alg = p1
    for algebra, n in ((ex1, 4), (alg, 8)):
        for _ in range(3):
            seed = random_skew_hermitian(n, rng)
            orb = ad_orbit(algebra, seed)
            want = brute_orbit(list(algebra.basis.elements), seed)
            assert orb.dim == rank(want)
            assert orb.contains(seed)
            for l in algebra.basis.elements:
                assert all(orb.contains(l @ v - v @ l) for v in orb.elements)


def test_orbit_invariant_and_monotone(ex1, rng):
    seed = 1j * tensor(np.diag([0.7, 0.3]), E1)
    orb = ad_orbit(ex1, seed)
    # orbit of an orbit element sits inside the orbit
    inner = ad_orbit(ex1, orb.elements[-1])
    assert inner.is_subspace_of(orb)
    su4 = lie_closure(list(su_basis(4)))
    assert orb.is_subspace_of(ad_orbit(su4, seed))


def test_orbit_max_iter(ex1):
    seed = 1j * tensor(np.diag([0.7, 0.3]), E1)
    assert ad_orbit(ex1, seed).dim > 1
    with pytest.raises(OrbitError):
        ad_orbit(ex1, seed, max_iter=1)


def test_necessary_p1_fails(p1):
    spec, alg = p1
    rep = necessary_condition(alg, spec.split, DensityState(spec.rho_s), DensityState(spec.rho_a))
    assert not rep.passed
    assert (rep.dim_V, rep.dim_trace, rep.target_dim) == (57, 12, 16)


def test_necessary_passes_on_controllable(ex1):
    rho_s = DensityState(np.diag([0.7, 0.3]))
    assert necessary_condition(ex1, SPLIT22, rho_s, DensityState(E1)).passed
    su4 = lie_closure(list(su_basis(4)))
    assert necessary_condition(su4, SPLIT22, rho_s, MIXED).passed


def test_necessary_rejects_maximally_mixed(ex1):
    with pytest.raises(StructureError):
        necessary_condition(ex1, SPLIT22, DensityState(I2 / 2), DensityState(E1))


def test_default_rho_s(p1):
    spec, alg = p1
    rep = structure_report(alg, spec.split)
    rho = default_rho_S(spec.split, rep.K)
    assert not rho.is_maximally_mixed()
    from indirect_control.subspace import SubspaceBasis

    assert not default_rho_S(SPLIT22, SubspaceBasis.zero(2)).is_maximally_mixed()


def test_yes_implies_necessary_pass(rng):
    # random conjugates of Example-1 with random pure ancillas and random system states
    _, base = _load("example1_ising")
    for _ in range(20):
        w = tensor(random_unitary(2, rng), random_unitary(2, rng))
        alg = lie_closure([w @ g @ w.conj().T for g in base.basis.elements])
        rho_a = DensityState(random_pure_state(2, rng))
        v = decide(alg, SPLIT22, rho_a)
        assert v.result.is_yes
        rho_s = DensityState(random_density(2, rng))
        assert necessary_condition(alg, SPLIT22, rho_s, rho_a).passed
