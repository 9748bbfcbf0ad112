"""Hot inner loops with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``INDIRECT_CONTROL_NUMBA`` is not set to ``0``/``false``/``off``.
Both paths implement the same contracts; ``set_backend`` switches at runtime
(tests and the benchmark use it to compare the two).

Real coordinates of an ``n x n`` complex matrix ``M`` are the ``2 n^2`` vector
``concat(Re M.ravel(), Im M.ravel())``; the Euclidean product of two such
vectors is the real Hilbert-Schmidt form ``Re tr(A^dagger B)``.
"""
import os

import numpy as np

_FLAG = os.environ.get("INDIRECT_CONTROL_NUMBA", "1").strip().lower()

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _to_coords_np(m):
    return np.concatenate((m.real.ravel(), m.imag.ravel()))


def _from_coords_np(v, n):
    nn = n * n
    return (v[:nn] + 1j * v[nn:]).reshape(n, n)


def _admit_np(Q, count, v, rank_tol):
    """Orthogonalize ``v`` against ``Q[:count]`` (two passes); store if new."""
    vnorm = np.linalg.norm(v)
    if vnorm == 0.0:
        return False
    basis = Q[:count]
    w = v.copy()
    if count:
        w -= basis.T @ (basis @ w)
        w -= basis.T @ (basis @ w)
    res = np.linalg.norm(w)
    if res > rank_tol * max(1.0, vnorm):
        Q[count] = w / res
        return True
    return False


def _skew_fix_np(Q, count, mats):
    # drop the non-skew rounding that normalizing a small residual amplifies
    m = mats[count]
    m = 0.5 * (m - m.conj().T)
    m /= np.linalg.norm(m)
    mats[count] = m
    Q[count] = _to_coords_np(m)


def _closure_sweep_np(mats, Q, count, start, rank_tol, skew=False):
    cap, n = mats.shape[0], mats.shape[1]
    i = start
    while i < count:
        if i:
            a = mats[i]
            others = mats[:i]
            brackets = a @ others - others @ a
            for c in brackets:
                if _admit_np(Q, count, _to_coords_np(c), rank_tol):
                    if count == cap:
                        return count, i, True
                    mats[count] = _from_coords_np(Q[count], n)
                    if skew:
                        _skew_fix_np(Q, count, mats)
                    count += 1
        i += 1
    return count, i, False


def _orbit_sweep_np(lmats, mats, Q, count, start, rank_tol, skew=False):
    cap, n = mats.shape[0], mats.shape[1]
    i = start
    while i < count:
        w = mats[i]
        brackets = lmats @ w - w @ lmats
        for c in brackets:
            if _admit_np(Q, count, _to_coords_np(c), rank_tol):
                if count == cap:
                    return count, i, True
                mats[count] = _from_coords_np(Q[count], n)
                if skew:
                    _skew_fix_np(Q, count, mats)
                count += 1
        i += 1
    return count, i, False


def _partial_trace_right_np(m, n_s, n_a):
    return np.trace(m.reshape(n_s, n_a, n_s, n_a), axis1=1, axis2=3)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAS_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)

    @_jit
    def _bracket_into(a, b, out):
        n = a.shape[0]
        for r in range(n):
            for c in range(n):
                acc = 0j
                for k in range(n):
                    acc += a[r, k] * b[k, c] - b[r, k] * a[k, c]
                out[r, c] = acc

    @_jit
    def _coords_into(m, v):
        n = m.shape[0]
        nn = n * n
        for r in range(n):
            for c in range(n):
                v[r * n + c] = m[r, c].real
                v[nn + r * n + c] = m[r, c].imag

    @_jit
    def _admit_nb(Q, count, v, rank_tol):
        d = v.shape[0]
        vnorm = 0.0
        for t in range(d):
            vnorm += v[t] * v[t]
        vnorm = np.sqrt(vnorm)
        if vnorm == 0.0:
            return False
        # modified Gram-Schmidt, repeated once for re-orthogonalization
        for _ in range(2):
            for k in range(count):
                dot = 0.0
                for t in range(d):
                    dot += Q[k, t] * v[t]
                for t in range(d):
                    v[t] -= dot * Q[k, t]
        res = 0.0
        for t in range(d):
            res += v[t] * v[t]
        res = np.sqrt(res)
        if res > rank_tol * max(1.0, vnorm):
            for t in range(d):
                Q[count, t] = v[t] / res
            return True
        return False

    @_jit
    def _store_matrix(Q, count, mats):
        n = mats.shape[1]
        nn = n * n
        for r in range(n):
            for c in range(n):
                mats[count, r, c] = Q[count, r * n + c] + 1j * Q[count, nn + r * n + c]

    @_jit
    def _skew_fix_nb(Q, count, mats):
        n = mats.shape[1]
        nn = n * n
        norm = 0.0
        for r in range(n):
            for c in range(r, n):
                z = 0.5 * (mats[count, r, c] - np.conj(mats[count, c, r]))
                mats[count, r, c] = z
                mats[count, c, r] = -np.conj(z)
                w = 1.0 if r == c else 2.0
                norm += w * (z.real * z.real + z.imag * z.imag)
        norm = np.sqrt(norm)
        for r in range(n):
            for c in range(n):
                mats[count, r, c] /= norm
                Q[count, r * n + c] = mats[count, r, c].real
                Q[count, nn + r * n + c] = mats[count, r, c].imag

    @_jit
    def _closure_sweep_nb(mats, Q, count, start, rank_tol, skew):
        cap, n = mats.shape[0], mats.shape[1]
        buf = np.empty((n, n), dtype=np.complex128)
        v = np.empty(2 * n * n)
        i = start
        while i < count:
            for j in range(i):
                _bracket_into(mats[i], mats[j], buf)
                _coords_into(buf, v)
                if _admit_nb(Q, count, v, rank_tol):
                    if count == cap:
                        return count, i, True
                    _store_matrix(Q, count, mats)
                    if skew:
                        _skew_fix_nb(Q, count, mats)
                    count += 1
            i += 1
        return count, i, False

    @_jit
    def _orbit_sweep_nb(lmats, mats, Q, count, start, rank_tol, skew):
        cap, n = mats.shape[0], mats.shape[1]
        buf = np.empty((n, n), dtype=np.complex128)
        v = np.empty(2 * n * n)
        i = start
        while i < count:
            for j in range(lmats.shape[0]):
                _bracket_into(lmats[j], mats[i], buf)
                _coords_into(buf, v)
                if _admit_nb(Q, count, v, rank_tol):
                    if count == cap:
                        return count, i, True
                    _store_matrix(Q, count, mats)
                    if skew:
                        _skew_fix_nb(Q, count, mats)
                    count += 1
            i += 1
        return count, i, False

    @_jit
    def _partial_trace_right_nb(m, n_s, n_a):
        out = np.zeros((n_s, n_s), dtype=np.complex128)
        for i in range(n_s):
            for j in range(n_s):
                acc = 0j
                for k in range(n_a):
                    acc += m[i * n_a + k, j * n_a + k]
                out[i, j] = acc
        return out

    def _admit_nb_wrapper(Q, count, v, rank_tol):
        return bool(_admit_nb(Q, count, np.array(v, dtype=np.float64), rank_tol))


_NUMPY = {
    "admit": _admit_np,
    "closure_sweep": _closure_sweep_np,
    "orbit_sweep": _orbit_sweep_np,
    "partial_trace_right": _partial_trace_right_np,
}

BACKENDS = {"numpy": _NUMPY}
if HAS_NUMBA:
    BACKENDS["numba"] = {
        "admit": _admit_nb_wrapper,
        "closure_sweep": _closure_sweep_nb,
        "orbit_sweep": _orbit_sweep_nb,
        "partial_trace_right": _partial_trace_right_nb,
    }

_active = {}


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` for all kernels."""
    if name not in BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}")
    _active.clear()
    _active.update(BACKENDS[name])
    _active["name"] = name


def backend():
    return _active["name"]


set_backend("numba" if HAS_NUMBA and _FLAG not in ("0", "false", "off", "no") else "numpy")


def admit(Q, count, v, rank_tol):
    return _active["admit"](Q, count, v, rank_tol)


def closure_sweep(mats, Q, count, start, rank_tol, skew=False):
    """Bracket every queued element against all earlier ones, admitting new
    directions. Returns ``(count, stop_index, overflowed)``.

    With ``skew`` set, each admitted element is projected back onto the
    skew-Hermitian matrices before it is queued.

    ``Q`` must carry one spare row beyond ``mats.shape[0]``; the overflowing
    candidate lands there before the sweep reports the overflow.
    """
    count, i, over = _active["closure_sweep"](
        mats, Q, count, start, float(rank_tol), bool(skew))
    return int(count), int(i), bool(over)


def orbit_sweep(lmats, mats, Q, count, start, rank_tol, skew=False):
    """Bracket every queued orbit element with each algebra basis element."""
    count, i, over = _active["orbit_sweep"](
        lmats, mats, Q, count, start, float(rank_tol), bool(skew))
    return int(count), int(i), bool(over)


def partial_trace_right(m, n_s, n_a):
    return _active["partial_trace_right"](np.ascontiguousarray(m, dtype=np.complex128), n_s, n_a)


to_coords = _to_coords_np
skew_fix = _skew_fix_np
from_coords = _from_coords_np
