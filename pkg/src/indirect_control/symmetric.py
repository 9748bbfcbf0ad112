"""Structure of P and L_S: tori, block projections, the block graph, normal
spaces and their canonical forms, Cartan pairs, and the Killing form."""
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .operators import DEFAULT_TOL, StructureError, dagger
from .subspace import SubspaceBasis, bracket_residual, coords, uncoords

EIG_CLUSTER_TOL = 1e-7
DEFAULT_SEED = 20240917


class NormalSpaceError(ValueError):
    """The span violates A^dagger B + B^dagger A = alpha 1."""


class CartanPairError(ValueError):
    pass


# ---------------------------------------------------------------------------
# maximal abelian subalgebra
# ---------------------------------------------------------------------------


def _nullspace_rows(mat, rank_tol, scale):
    """Rows spanning the right nullspace of a real matrix."""
    m = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(m)
    _, s, vt = np.linalg.svd(mat, full_matrices=True)
    s_full = np.zeros(m)
    s_full[: s.size] = s
    return vt[s_full <= rank_tol * scale]


def commutant_in(P, elements, tol=DEFAULT_TOL):
    """Subspace of span P commuting with every matrix in ``elements``."""
    if not P.dim:
        return P
    if not len(elements):
        return P
    cols = []
    for p in P.elements:
        cols.append(coords(np.array([p @ a - a @ p for a in elements])).ravel())
    mat = np.array(cols).T
    scale = max(1.0, max(np.linalg.norm(a) for a in elements))
    null = _nullspace_rows(mat, tol.rank_tol, scale)
    if not null.shape[0]:
        return SubspaceBasis.zero(P.ambient_dim)
    return SubspaceBasis.from_coords(null @ P.coords, P.ambient_dim)


def _greedy_torus(P, rng, tol):
    first = np.einsum("i,ijk->jk", rng.standard_normal(P.dim), P.elements)
    current = SubspaceBasis.from_spanning([first], P.ambient_dim, tol.rank_tol)
    while True:
        comm = commutant_in(P, current.elements, tol)
        if comm.dim <= current.dim:
            return current
        cand = np.einsum("i,ijk->jk", rng.standard_normal(comm.dim), comm.elements)
        cand = cand - current.project(cand)
        if np.linalg.norm(cand) <= tol.rank_tol:
            return current
        current = current.union(SubspaceBasis.from_spanning([cand], P.ambient_dim), tol.rank_tol)


def maximal_abelian_in_P(P, tol=DEFAULT_TOL, seed=DEFAULT_SEED, restarts=8):
    """Greedy maximal abelian subspace of span P (largest of ``restarts`` runs)."""
    if not P.dim:
        return P
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        cand = _greedy_torus(P, rng, tol)
        if best is None or cand.dim > best.dim:
            best = cand
    return best


def is_maximal_abelian(A, P, tol=DEFAULT_TOL):
    if bracket_residual(A, A, SubspaceBasis.zero(A.ambient_dim)) > tol.rank_tol:
        return False
    return commutant_in(P, A.elements, tol).same_span(A, tol.rank_tol)


# ---------------------------------------------------------------------------
# block projections and the block graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BlockPartition:
    sizes: tuple
    transform: np.ndarray
    spans_algebra: bool = True

    @property
    def n_blocks(self):
        return len(self.sizes)

    @property
    def offsets(self):
        return np.concatenate(([0], np.cumsum(self.sizes))).astype(int)

    def to_blocks(self, m):
        """``W^dagger m W`` in the grouped coordinates."""
        return dagger(self.transform) @ m @ self.transform

    def block(self, m, j, k):
        o = self.offsets
        return self.to_blocks(m)[o[j]:o[j + 1], o[k]:o[k + 1]]

    def projections(self):
        """Orthogonal projections Pi_j in the original coordinates."""
        out = []
        o = self.offsets
        for j in range(self.n_blocks):
            d = np.zeros(self.transform.shape[0])
            d[o[j]:o[j + 1]] = 1.0
            out.append((self.transform * d) @ dagger(self.transform))
        return out


def projection_basis(A, tol=DEFAULT_TOL, seed=DEFAULT_SEED):
    """Simultaneously diagonalize an abelian span and group equal eigenvalue patterns."""
    n = A.ambient_dim
    if bracket_residual(A, A, SubspaceBasis.zero(n)) > tol.rank_tol:
        raise StructureError("projection_basis needs an abelian span")
    els = A.elements
    offdiag = max((np.linalg.norm(e - np.diag(np.diag(e))) for e in els), default=0.0)
    if offdiag <= tol.residual_tol:
        v = np.eye(n, dtype=complex)
    else:
        rng = np.random.default_rng(seed)
        g = np.einsum("i,ijk->jk", rng.standard_normal(len(els)), els)
        h = 1j * g
        _, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    patterns = np.array([np.diag(dagger(v) @ e @ v).imag for e in els]).T.reshape(n, -1)
    classes = []
    reps = []
    for i in range(n):
        for c, rep in enumerate(reps):
            if np.max(np.abs(patterns[i] - rep), initial=0.0) <= EIG_CLUSTER_TOL:
                classes[c].append(i)
                break
        else:
            reps.append(patterns[i])
            classes.append([i])
    perm = [i for c in classes for i in c]
    w = v[:, perm]
    part = BlockPartition(tuple(len(c) for c in classes), w)
    iproj = SubspaceBasis.from_spanning([1j * p for p in part.projections()], n, tol.rank_tol)
    spans = iproj.same_span(A, 1e-7) if A.dim else True
    return BlockPartition(part.sizes, w, spans)


@dataclass(frozen=True)
class BlockGraph:
    n_nodes: int
    edges: frozenset
    components: tuple = field(default=())

    @property
    def connected(self):
        return len(self.components) <= 1


def build_block_graph(P, partition, tol=DEFAULT_TOL):
    l = partition.n_blocks
    edges = set()
    for p in P.elements:
        for j in range(l):
            for k in range(j + 1, l):
                if np.linalg.norm(partition.block(p, j, k)) > tol.rank_tol * max(1.0, np.linalg.norm(p)):
                    edges.add((j, k))
    adj = np.zeros((l, l))
    for j, k in edges:
        adj[j, k] = adj[k, j] = 1
    _, labels = connected_components(csr_matrix(adj), directed=False)
    comps = tuple(tuple(int(i) for i in np.flatnonzero(labels == c)) for c in range(labels.max() + 1))
    return BlockGraph(l, frozenset(edges), comps)


def check_equal_blocks(partition, graph):
    """Equal block sizes; ``None`` when the graph is disconnected (not applicable)."""
    if not graph.connected:
        return None
    return len(set(partition.sizes)) == 1


def block_normality_residual(P, partition, graph):
    """Worst deviation of R R^dagger and R^dagger R from multiples of the
    identity, over every nonzero off-diagonal block on a graph edge, plus a
    flag that all such blocks have full rank."""
    worst = 0.0
    full_rank = True
    for p in P.elements:
        for j, k in graph.edges:
            r = partition.block(p, j, k)
            nr = np.linalg.norm(r)
            if nr <= 1e-12:
                continue
            for g in (r @ dagger(r), dagger(r) @ r):
                alpha = np.trace(g).real / g.shape[0]
                worst = max(worst, np.linalg.norm(g - alpha * np.eye(g.shape[0])) / nr ** 2)
            full_rank &= np.linalg.matrix_rank(r, tol=1e-8 * nr) == min(r.shape)
    return worst, full_rank


# ---------------------------------------------------------------------------
# normal vector spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NormalSpace:
    block_dim: int
    basis: SubspaceBasis
    canonical_case: str | None = None
    signature: tuple | None = None
    sub: "NormalSpace | None" = None

    @property
    def dim(self):
        return self.basis.dim


def relat_residual(mats):
    """Largest deviation of A^dagger B + B^dagger A and B A^dagger + A B^dagger
    from real multiples of the identity, over all pairs."""
    worst = 0.0
    mats = list(mats)
    for i, a in enumerate(mats):
        for b in mats[i:]:
            for g in (dagger(a) @ b + dagger(b) @ a, b @ dagger(a) + a @ dagger(b)):
                n = g.shape[0]
                alpha = np.trace(g).real / n
                scale = max(1.0, np.linalg.norm(a) * np.linalg.norm(b))
                worst = max(worst, np.linalg.norm(g - alpha * np.eye(n)) / scale)
    return worst


def make_normal_space(mats, n, tol=DEFAULT_TOL):
    basis = SubspaceBasis.from_spanning(list(mats), n, tol.rank_tol)
    res = relat_residual(basis.elements)
    if res > tol.residual_tol * 10:
        raise NormalSpaceError(f"normal-space relation violated (residual {res:.2e})")
    return NormalSpace(n, basis)


def extract_normal_space(P, partition, j, k, tol=DEFAULT_TOL):
    """Real span of the (j, k) blocks of the elements of P."""
    sizes = partition.sizes
    if sizes[j] != sizes[k]:
        raise StructureError("blocks j and k differ in size")
    return make_normal_space([partition.block(p, j, k) for p in P.elements], sizes[j], tol)


def signature_matrix(r, s):
    return np.diag(np.concatenate((np.ones(r), -np.ones(s)))).astype(complex)


def _canon(mats, n, tol):
    """Returns (canonical basis list, U, V, case, signature, sub)."""
    eye = np.eye(n, dtype=complex)
    basis = SubspaceBasis.from_spanning(list(mats), n, tol.rank_tol) if len(mats) else SubspaceBasis.zero(n)
    if not basis.dim:
        return [], eye, eye, "zero", None, None
    a = basis.elements[0]
    alpha = np.trace(a @ dagger(a)).real / n
    a_u = a / np.sqrt(alpha)
    u_tot = eye.copy()
    v_tot = dagger(a_u)
    work = [x @ v_tot for x in basis.elements]

    skews = []
    for x in work:
        h = np.trace(x).real / n
        s = x - h * eye
        if np.linalg.norm(s + dagger(s)) > tol.residual_tol * 10 * max(1.0, np.linalg.norm(x)):
            raise NormalSpaceError("Hermitian part is not a multiple of the identity")
        skews.append(0.5 * (s - dagger(s)))
    skew_span = SubspaceBasis.from_spanning(skews, n, tol.rank_tol)
    if not skew_span.dim:
        return [eye], u_tot, v_tot, "identity_only", None, None

    b = skew_span.elements[0]
    hb = -1j * b
    w_vals, w_vecs = np.linalg.eigh(0.5 * (hb + dagger(hb)))
    order = np.argsort(-w_vals, kind="stable")
    w_vals, w_vecs = w_vals[order], w_vecs[:, order]
    mag = np.abs(w_vals)
    if np.max(mag) - np.min(mag) > tol.residual_tol * 10 * max(1.0, np.max(mag)):
        raise NormalSpaceError("skew element is not proportional to a unitary")
    r = int(np.sum(w_vals > 0))
    s_ = n - r
    if r < s_:
        # flip the sign so that r >= s
        w_vecs = w_vecs[:, ::-1]
        r, s_ = s_, r
    u_tot = dagger(w_vecs) @ u_tot
    v_tot = v_tot @ w_vecs
    sig = signature_matrix(r, s_)
    rest = [dagger(w_vecs) @ c @ w_vecs for c in skew_span.elements[1:]]
    rest = [c - (np.vdot(1j * sig, c).real / n) * 1j * sig for c in rest]
    rest_span = SubspaceBasis.from_spanning(rest, n, tol.rank_tol) if rest else SubspaceBasis.zero(n)
    if not rest_span.dim:
        return [eye, 1j * sig], u_tot, v_tot, "identity_plus_signature", (r, s_), None
    if r != s_:
        raise NormalSpaceError("a third direction requires r == s")
    m = n // 2
    c12 = []
    for c in rest_span.elements:
        if np.linalg.norm(c[:m, :m]) + np.linalg.norm(c[m:, m:]) > tol.residual_tol * 10:
            raise NormalSpaceError("off-diagonal direction has a block-diagonal part")
        c12.append(c[:m, m:])
    sub_mats, u_s, v_s, sub_case, sub_sig, sub_sub = _canon(c12, m, tol)
    d = np.zeros((n, n), dtype=complex)
    d[:m, :m] = u_s
    d[m:, m:] = dagger(v_s)
    u_tot = d @ u_tot
    v_tot = v_tot @ dagger(d)
    canon = [eye, 1j * sig]
    for c in sub_mats:
        full = np.zeros((n, n), dtype=complex)
        full[:m, m:] = c
        full[m:, :m] = -dagger(c)
        canon.append(full)
    sub = NormalSpace(m, SubspaceBasis.from_spanning(sub_mats, m), sub_case, sub_sig, sub_sub)
    return canon, u_tot, v_tot, "quaternionic", (r, s_), sub


def duct_canonicalize(N, tol=DEFAULT_TOL):
    """Canonical form of a normal space under A -> U A V.

    Returns ``(canonical, U, V)`` with ``span(U N V) == span(canonical)``.
    """
    n = N.block_dim
    canon, u, v, case, sig, sub = _canon(list(N.basis.elements), n, tol)
    canon_space = NormalSpace(n, SubspaceBasis.from_spanning(canon, n), case, sig, sub)
    moved = SubspaceBasis.from_spanning([u @ x @ v for x in N.basis.elements], n, tol.rank_tol) \
        if N.dim else SubspaceBasis.zero(n)
    if not moved.same_span(canon_space.basis, 1e-7):
        raise NormalSpaceError("canonicalization did not reproduce the input span")
    return canon_space, u, v


def basiscan2(n):
    """The four-element canonical span span{1, i 1_{m,m}, [[0,1],[-1,0]], [[0,i],[i,0]]}."""
    m = n // 2
    eye_m = np.eye(m)
    z = np.zeros((m, m))
    return [
        np.eye(n, dtype=complex),
        1j * signature_matrix(m, m),
        np.block([[z, eye_m], [-eye_m, z]]).astype(complex),
        np.block([[z, 1j * eye_m], [1j * eye_m, z]]),
    ]


def classify_normal_lie(N, tol=DEFAULT_TOL):
    """Which canonical Lie-algebra case a canonical normal space falls in."""
    b = N.basis
    if bracket_residual(b, b, b) > 1e-7:
        return "not_lie_algebra"
    n = N.block_dim
    eye = np.eye(n)
    if b.dim == 0:
        return "zero"
    if b.dim == 1 and b.contains(eye, 1e-7):
        return "identity_only"
    if b.dim == 2 and b.contains(eye, 1e-7):
        return "identity_plus_signature"
    if b.dim == 4 and n % 2 == 0:
        ref = SubspaceBasis.from_spanning(basiscan2(n), n)
        if ref.same_span(b, 1e-7):
            return "quaternionic"
    raise ValueError("span is bracket-closed but not in canonical form")


# ---------------------------------------------------------------------------
# Cartan pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CartanPair:
    K_part: SubspaceBasis
    P_part: SubspaceBasis
    torus: SubspaceBasis
    involution_type: str

    @property
    def n(self):
        return self.K_part.ambient_dim


def _literal(space, pred):
    return all(pred(e) for e in space.elements)


def _is_real(e, t=1e-10):
    return np.linalg.norm(e.imag) <= t


def _is_imag(e, t=1e-10):
    return np.linalg.norm(e.real) <= t


def _is_blockdiag(e, t=1e-10):
    return np.linalg.norm(e[0, 1:]) + np.linalg.norm(e[1:, 0]) <= t


def _is_antidiag(e, t=1e-10):
    return abs(e[0, 0]) + np.linalg.norm(e[1:, 1:]) <= t


def composed_spaces(n):
    """(L_2, L_1): the Cartan pair built from the AI and AIII(1, n-1) splits."""
    from .operators import su_basis

    els = su_basis(n)
    l2, l1 = [], []
    for e in els:
        re, im = e.real.astype(complex), 1j * e.imag
        for part in (re, im):
            if np.linalg.norm(part) < 1e-14:
                continue
            real_part = np.linalg.norm(part.imag) < 1e-14
            diag_part = _is_blockdiag(part)
            (l2 if real_part == diag_part else l1).append(part)
    return (SubspaceBasis.from_spanning(l2, n), SubspaceBasis.from_spanning(l1, n))


def standard_torus(kind, n):
    if kind in ("AI", "composed"):
        from .operators import su_basis

        diag = [e for e in su_basis(n) if np.linalg.norm(e - np.diag(np.diag(e))) == 0]
        return SubspaceBasis.from_spanning(diag, n)
    if kind == "AIII":
        e = np.zeros((n, n), dtype=complex)
        e[n - 1, 0], e[0, n - 1] = 1.0, -1.0
        return SubspaceBasis.from_spanning([e], n)
    raise ValueError(kind)


def classify_pair(K, P_tilde):
    n = K.ambient_dim
    if n >= 2 and K.dim == n * (n - 1) // 2 and _literal(K, _is_real) and _literal(P_tilde, _is_imag):
        return "AI"
    if n >= 2 and K.dim == (n - 1) ** 2 and _literal(K, _is_blockdiag) and _literal(P_tilde, _is_antidiag):
        return "AIII"
    if n >= 3 and K.dim == n * (n - 1) // 2:
        l2, l1 = composed_spaces(n)
        if l2.same_span(K, 1e-9) and l1.same_span(P_tilde, 1e-9):
            return "composed"
    return "numeric-only"


def validate_cartan_pair(K, P_tilde, tol=DEFAULT_TOL, seed=DEFAULT_SEED):
    n = K.ambient_dim
    problems = []
    if not (K.is_traceless(tol.rank_tol) and P_tilde.is_traceless(tol.rank_tol)):
        problems.append("both spaces must be traceless")
    cap = K.intersection(P_tilde, tol.rank_tol).dim
    if cap:
        problems.append(f"K and P intersect in dimension {cap}")
    for name, (x, y, z) in {
        "[K,K] in K": (K, K, K),
        "[K,P] in P": (K, P_tilde, P_tilde),
        "[P,P] in K": (P_tilde, P_tilde, K),
    }.items():
        r = bracket_residual(x, y, z)
        if r > tol.rank_tol * 10:
            problems.append(f"{name} violated (residual {r:.2e})")
    if K.union(P_tilde, tol.rank_tol).dim != n * n - 1:
        problems.append("K + P does not span su(n)")
    if problems:
        raise CartanPairError("; ".join(problems))
    kind = classify_pair(K, P_tilde)
    if n >= 3 and kind != "numeric-only":
        torus = standard_torus(kind, n)
    else:
        torus = maximal_abelian_in_P(P_tilde, tol, seed)
    return CartanPair(K, P_tilde, torus, kind)


# ---------------------------------------------------------------------------
# Killing form
# ---------------------------------------------------------------------------


def adjoint_matrix(L_S, a):
    """Matrix of ad_a on span L_S in its orthonormal basis."""
    brackets = np.array([a @ b - b @ a for b in L_S.elements])
    return L_S.coords @ coords(brackets).T


def killing_form(L_S, a, b, tol=DEFAULT_TOL):
    """Tr(ad_a ad_b) on span L_S."""
    for x in (a, b):
        if not L_S.contains(x, tol.rank_tol) and np.linalg.norm(x) > 0:
            raise StructureError("Killing form arguments must lie in the algebra")
    return float(np.trace(adjoint_matrix(L_S, a) @ adjoint_matrix(L_S, b)))


def killing_gram(L_S):
    ads = [adjoint_matrix(L_S, e) for e in L_S.elements]
    return np.array([[np.trace(x @ y) for y in ads] for x in ads]).real
