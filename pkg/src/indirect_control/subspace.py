"""Real-linear subspaces of n x n complex matrices with HS-orthonormal bases."""
from dataclasses import dataclass

import numpy as np

from ._kernels import from_coords, to_coords
from .operators import DEFAULT_TOL, DimensionError


def coords(mats):
    """Stack of matrices ``(d, n, n)`` -> real coordinate rows ``(d, 2 n^2)``."""
    mats = np.asarray(mats, dtype=np.complex128)
    d, n = mats.shape[0], mats.shape[-1]
    return np.concatenate((mats.real.reshape(d, n * n), mats.imag.reshape(d, n * n)), axis=1)


def uncoords(rows, n):
    rows = np.asarray(rows, dtype=float)
    nn = n * n
    return (rows[:, :nn] + 1j * rows[:, nn:]).reshape(rows.shape[0], n, n)


def _orthonormal_rows(rows, rank_tol):
    """Orthonormal basis (rows) for the row space, by SVD at a relative cutoff."""
    if rows.shape[0] == 0:
        return rows
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return rows[:0]
    rank = int(np.sum(s > rank_tol * max(1.0, s[0])))
    return vt[:rank]


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """HS-orthonormal real basis of a subspace of ``n x n`` complex matrices.

    ``elements`` has shape ``(dim, n, n)``. Instances are immutable; build them
    with :meth:`from_spanning` (any spanning family) or :meth:`zero`.
    """

    elements: np.ndarray
    ambient_dim: int

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=np.complex128).reshape(-1, self.ambient_dim, self.ambient_dim)
        el = el.copy()
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)
        q = coords(el)
        q.setflags(write=False)
        object.__setattr__(self, "_coords", q)

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((0, n, n), dtype=complex), n)

    @classmethod
    def from_spanning(cls, mats, n=None, rank_tol=DEFAULT_TOL.rank_tol):
        mats = [np.asarray(m, dtype=complex) for m in mats]
        if n is None:
            if not mats:
                raise ValueError("ambient dimension needed for an empty spanning set")
            n = mats[0].shape[0]
        if not mats:
            return cls.zero(n)
        for m in mats:
            if m.shape != (n, n):
                raise DimensionError(f"expected {n}x{n} matrices, got {m.shape}")
        rows = _orthonormal_rows(coords(np.array(mats)), rank_tol)
        return cls(uncoords(rows, n), n)

    @classmethod
    def from_coords(cls, rows, n):
        return cls(uncoords(rows, n), n)

    @property
    def dim(self):
        return self.elements.shape[0]

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def coords(self):
        return self._coords

    def _check(self, m):
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionError(
                f"expected a {self.ambient_dim}x{self.ambient_dim} matrix, got {m.shape}"
            )
        return m

    def project(self, m):
        m = self._check(m)
        if not self.dim:
            return np.zeros_like(m)
        return from_coords(self._coords.T @ (self._coords @ to_coords(m)), self.ambient_dim)

    def residual(self, m):
        """HS norm of the component of ``m`` orthogonal to the subspace."""
        m = self._check(m)
        v = to_coords(m)
        if self.dim:
            v = v - self._coords.T @ (self._coords @ v)
        return float(np.linalg.norm(v))

    def contains(self, m, rank_tol=DEFAULT_TOL.rank_tol):
        m = self._check(m)
        return self.residual(m) <= rank_tol * max(np.linalg.norm(m), np.finfo(float).tiny)

    def contains_all(self, mats, rank_tol=DEFAULT_TOL.rank_tol):
        return all(self.contains(m, rank_tol) for m in mats)

    def is_subspace_of(self, other, rank_tol=DEFAULT_TOL.rank_tol):
        return other.contains_all(self.elements, rank_tol)

    def same_span(self, other, rank_tol=DEFAULT_TOL.rank_tol):
        return (
            self.dim == other.dim
            and self.is_subspace_of(other, rank_tol)
            and other.is_subspace_of(self, rank_tol)
        )

    def union(self, other, rank_tol=DEFAULT_TOL.rank_tol):
        return SubspaceBasis.from_spanning(
            list(self.elements) + list(other.elements), self.ambient_dim, rank_tol
        )

    def intersection(self, other, rank_tol=DEFAULT_TOL.rank_tol):
        """Intersection via principal angles (SVD of the out-of-span residuals)."""
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("ambient dimensions differ")
        if not self.dim or not other.dim:
            return SubspaceBasis.zero(self.ambient_dim)
        q = self._coords
        w = other.coords
        resid = q - (q @ w.T) @ w
        _, s, vt = np.linalg.svd(resid.T, full_matrices=True)
        # right singular vectors of resid^T (d x d) with vanishing sin(angle)
        s_full = np.zeros(self.dim)
        s_full[: s.size] = s
        null = vt[s_full <= rank_tol]
        if not null.shape[0]:
            return SubspaceBasis.zero(self.ambient_dim)
        return SubspaceBasis.from_coords(null @ q, self.ambient_dim)

    def is_traceless(self, tol=DEFAULT_TOL.rank_tol):
        return all(abs(np.trace(e)) <= tol for e in self.elements)


def preimage_in_span(span, images, domain, rank_tol=DEFAULT_TOL.rank_tol):
    """Domain elements whose image under a linear injective map lies in ``span``.

    ``domain`` is an orthonormal family ``(m, k, k)`` and ``images`` the
    corresponding images ``(m, n, n)``. Returns the orthonormalized preimage
    as a ``SubspaceBasis`` of ``k x k`` matrices.
    """
    domain = np.asarray(domain, dtype=complex)
    k = domain.shape[1]
    phi = coords(images).T  # (D, m)
    if span.dim:
        q = span.coords
        phi = phi - q.T @ (q @ phi)
    scale = max(1.0, float(np.max(np.linalg.norm(coords(images), axis=1))))
    _, s, vt = np.linalg.svd(phi, full_matrices=True)
    s_full = np.zeros(domain.shape[0])
    s_full[: s.size] = s
    null = vt[s_full <= rank_tol * scale]
    if not null.shape[0]:
        return SubspaceBasis.zero(k)
    mats = np.einsum("ij,jkl->ikl", null, domain)
    return SubspaceBasis.from_spanning(list(mats), k, rank_tol)


def bracket_residual(x, y, z, anti=False, factor=1.0):
    """Largest out-of-``z`` residual of ``factor * [x_i, y_j]`` (or the
    anticommutator), relative to ``max(1, |product|)``."""
    worst = 0.0
    for a in x.elements:
        for b in y.elements:
            c = a @ b + b @ a if anti else a @ b - b @ a
            c = factor * c
            worst = max(worst, z.residual(c) / max(1.0, np.linalg.norm(c)))
    return worst
