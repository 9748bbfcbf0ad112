"""Independent reference computations used to freeze expected values.

Everything here is deliberately naive: explicit loops, rank via
``np.linalg.matrix_rank`` on stacked coordinates, no shared code with the
package beyond the Pauli constants.
"""
import itertools

import numpy as np

SX = 0.5 * np.array([[0, 1j], [1j, 0]])
SY = 0.5 * np.array([[0, -1], [1, 0]], dtype=complex)
SZ = 0.5 * np.array([[1j, 0], [0, -1j]])
I2 = np.eye(2)


def vec(m):
    m = np.asarray(m, dtype=complex)
    return np.concatenate((m.real.ravel(), m.imag.ravel()))


def rank(mats, tol=1e-9):
    if not len(mats):
        return 0
    a = np.array([vec(m) for m in mats])
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def brute_closure(gens, tol=1e-9):
    """Span of all nested brackets, grown wave by wave until the rank stalls."""
    span = []
    for g in gens:
        if rank(span + [g], tol) > len(span):
            span.append(np.asarray(g, dtype=complex))
    while True:
        grown = False
        for a, b in itertools.combinations(list(span), 2):
            c = a @ b - b @ a
            if rank(span + [c], tol) > len(span):
                span.append(c)
                grown = True
        if not grown:
            return span


def in_span(span, m, tol=1e-8):
    return rank(list(span) + [m], tol) == rank(list(span), tol)


def intersection_dim(span_a, span_b, tol=1e-9):
    return rank(span_a, tol) + rank(span_b, tol) - rank(list(span_a) + list(span_b), tol)


def partial_trace_loops(m, n_s, n_a):
    out = np.zeros((n_s, n_s), dtype=complex)
    for i in range(n_s):
        for j in range(n_s):
            for a in range(n_a):
                out[i, j] += m[i * n_a + a, j * n_a + a]
    return out


def su_generators(n):
    """Unnormalized skew-Hermitian basis of su(n) (elementary matrices)."""
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k], e[k, j] = 1, -1
            out.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = e[k, j] = 1j
            out.append(e)
    for j in range(n - 1):
        e = np.zeros((n, n), dtype=complex)
        e[j, j], e[j + 1, j + 1] = 1j, -1j
        out.append(e)
    return out


def K_dim(L_span, n_s, n_a):
    """dim {k in su(n_S) : k (x) 1 in L} by rank counting."""
    images = [np.kron(k, np.eye(n_a)) for k in su_generators(n_s)]
    return intersection_dim(L_span, images)


def P_dim(L_span, n_s, n_a, sigma):
    images = [np.kron(1j * p, sigma) for p in su_generators(n_s) + [1j * np.eye(n_s)]]
    return intersection_dim(L_span, images)


def ad_matrix(basis, a):
    """Coordinates of [a, b_j] in ``basis`` by least squares."""
    B = np.array([vec(b) for b in basis]).T
    cols = [np.linalg.lstsq(B, vec(a @ b - b @ a), rcond=None)[0] for b in basis]
    return np.array(cols).T


def killing(basis, a, b):
    return float(np.trace(ad_matrix(basis, a) @ ad_matrix(basis, b)))


def brute_orbit(L_span, seed, tol=1e-9):
    """W_{k+1} = W_k + [L, W_k] until the rank stops growing."""
    w = [seed]
    while True:
        cand = w + [l @ x - x @ l for l in L_span for x in w]
        r = rank(cand, tol)
        if r == rank(w, tol):
            return w
        a = np.array([vec(m) for m in cand])
        _, s, vt = np.linalg.svd(a, full_matrices=False)
        n = seed.shape[0]
        w = [(v[: n * n] + 1j * v[n * n:]).reshape(n, n) for v in vt[:r]]


def euler_su2(x):
    """(alpha, beta, gamma) with x = e^{alpha SZ} e^{beta SX} e^{gamma SZ}."""
    a, b = x[0, 0], x[0, 1]
    beta = 2 * np.arctan2(abs(b), abs(a))
    plus = 2 * np.angle(a)
    minus = 2 * np.angle(b / 1j) if abs(b) > 1e-14 else 0.0
    return 0.5 * (plus + minus), beta, 0.5 * (plus - minus)
