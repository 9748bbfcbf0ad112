import numpy as np
import pytest

from indirect_control.operators import DimensionError, SIGMA_X, SIGMA_Y, SIGMA_Z, random_skew_hermitian
from indirect_control.subspace import SubspaceBasis, bracket_residual, coords, preimage_in_span, uncoords
from oracles import intersection_dim, rank


def test_coords_round_trip(rng):
    mats = np.array([random_skew_hermitian(3, rng) for _ in range(4)])
    assert np.allclose(uncoords(coords(mats), 3), mats)
    assert coords(np.zeros((0, 3, 3))).shape == (0, 18)


def test_from_spanning_orthonormal(rng):
    mats = [random_skew_hermitian(3, rng) for _ in range(3)]
    mats.append(mats[0] + 2 * mats[1])
    s = SubspaceBasis.from_spanning(mats)
    assert s.dim == 3
    assert np.allclose(s.coords @ s.coords.T, np.eye(3))
    assert s.contains_all(mats)


def test_elements_read_only():
    s = SubspaceBasis.from_spanning([SIGMA_X])
    with pytest.raises(ValueError):
        s.elements[0, 0, 0] = 1


def test_contains_zero_and_mismatch():
    s = SubspaceBasis.from_spanning([SIGMA_X])
    assert s.contains(np.zeros((2, 2)))
    assert SubspaceBasis.zero(2).contains(np.zeros((2, 2)))
    assert not s.contains(SIGMA_Y)
    with pytest.raises(DimensionError):
        s.contains(np.eye(3))


def test_intersection_matches_rank_count(rng):
    for _ in range(20):
        common = [random_skew_hermitian(3, rng) for _ in range(2)]
        a = SubspaceBasis.from_spanning(common + [random_skew_hermitian(3, rng) for _ in range(2)])
        b = SubspaceBasis.from_spanning(common + [random_skew_hermitian(3, rng) for _ in range(3)])
        cap = a.intersection(b)
        assert cap.dim == intersection_dim(list(a.elements), list(b.elements)) == 2
        assert cap.is_subspace_of(a, 1e-8) and cap.is_subspace_of(b, 1e-8)
        assert cap.same_span(b.intersection(a), 1e-8)


def test_intersection_trivial():
    a = SubspaceBasis.from_spanning([SIGMA_X, SIGMA_Y])
    b = SubspaceBasis.from_spanning([SIGMA_Z])
    assert a.intersection(b).dim == 0
    assert a.intersection(SubspaceBasis.zero(2)).dim == 0


def test_union_and_same_span():
    a = SubspaceBasis.from_spanning([SIGMA_X])
    b = SubspaceBasis.from_spanning([SIGMA_Y, SIGMA_X + SIGMA_Y])
    u = a.union(b)
    assert u.dim == 2
    assert u.same_span(b)
    assert not u.same_span(a)


def test_preimage():
    span = SubspaceBasis.from_spanning([np.kron(SIGMA_Z, np.eye(2)), np.kron(np.eye(2), SIGMA_X)])
    dom = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z]) * np.sqrt(2)
    images = np.array([np.kron(d, np.eye(2)) for d in dom])
    pre = preimage_in_span(span, images, dom)
    assert pre.dim == 1
    assert pre.contains(SIGMA_Z)


def test_bracket_residual():
    su2 = SubspaceBasis.from_spanning([SIGMA_X, SIGMA_Y, SIGMA_Z])
    assert bracket_residual(su2, su2, su2) < 1e-14
    xy = SubspaceBasis.from_spanning([SIGMA_X, SIGMA_Y])
    assert bracket_residual(xy, xy, xy) > 0.1
    assert rank([SIGMA_X, SIGMA_Y, SIGMA_Z]) == 3
