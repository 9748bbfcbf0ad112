"""KAK factorization X = K1 exp(A) K2 for a Cartan pair of su(n).

Each factor is returned as a list of algebra exponents so that callers can
certify membership without taking logarithms of group elements.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import least_squares

from .operators import DEFAULT_TOL, StructureError, dagger, expm_skew, is_unitary
from .symmetric import CartanPair

DEFAULT_KAK_TOL = 1e-8


class KAKError(RuntimeError):
    """No factorization within ``kak_tol``."""


@dataclass(frozen=True, eq=False)
class KAKFactorization:
    K1: np.ndarray
    A_tilde: np.ndarray
    K2: np.ndarray
    k1_exponents: tuple
    k2_exponents: tuple
    method: str
    residual: float

    def reconstruct(self):
        return self.K1 @ expm_skew(self.A_tilde) @ self.K2


def product_of_exponentials(exponents, n):
    out = np.eye(n, dtype=complex)
    for e in exponents:
        out = out @ expm_skew(e)
    return out


def log_special_unitary(u):
    """Skew-Hermitian traceless ``a`` with ``expm(a) == u`` for ``u`` in SU(n).

    Uses the complex Schur form (diagonal for normal input) and shifts one
    eigenphase by a multiple of 2 pi so the trace vanishes.
    """
    u = np.asarray(u, dtype=complex)
    t, z = sla.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    m = int(np.rint(phases.sum() / (2 * np.pi)))
    if m:
        j = np.argmax(phases) if m > 0 else np.argmin(phases)
        phases[j] -= 2 * np.pi * m
    a = (z * (1j * phases)) @ dagger(z)
    return 0.5 * (a - dagger(a))


def givens_exponents(o):
    """Real antisymmetric generators g_1..g_m with ``o = expm(g_1) ... expm(g_m)``
    for ``o`` in SO(n)."""
    o = np.array(o, dtype=float)
    n = o.shape[0]
    gens = []
    r = o.copy()
    for j in range(n - 1):
        for i in range(n - 1, j, -1):
            a, b = r[i - 1, j], r[i, j]
            if abs(b) < 1e-300:
                continue
            theta = np.arctan2(b, a)
            c, s = np.cos(theta), np.sin(theta)
            rot = np.eye(n)
            rot[[i - 1, i - 1, i, i], [i - 1, i, i - 1, i]] = c, s, -s, c
            r = rot @ r
            g = np.zeros((n, n))
            g[i, i - 1], g[i - 1, i] = theta, -theta
            gens.append(g)
        if r[j, j] < 0:
            # flip the pivot sign with a pi rotation in the (j, j+1) plane
            rot = np.eye(n)
            rot[j, j] = rot[j + 1, j + 1] = -1.0
            r = rot @ r
            g = np.zeros((n, n))
            g[j + 1, j], g[j, j + 1] = np.pi, -np.pi
            gens.append(g)
    # rot_m ... rot_1 o = 1, and rot_k^T = expm(g_k)
    return [g.astype(complex) for g in gens]


# ---------------------------------------------------------------------------
# n = 2 closed form
# ---------------------------------------------------------------------------


def _su2_normalize(a):
    """Scale ``a`` in su(2) so that ``a @ a == -1/4``."""
    sq = -np.trace(a @ a).real / 2
    return a / (2 * np.sqrt(sq))


def _intertwiner(targets, sources):
    """Unitary W with W s_j W^dagger = t_j for all pairs (up to a phase)."""
    n = targets[0].shape[0]
    eye = np.eye(n)
    rows = [np.kron(s.T, eye) - np.kron(eye, t) for s, t in zip(sources, targets)]
    _, _, vh = np.linalg.svd(np.vstack(rows))
    w = vh[-1].conj().reshape(n, n, order="F")
    return w / np.sqrt(np.linalg.det(w))


def _kak_su2(x, pair):
    from .operators import SIGMA_X, SIGMA_Z

    k = _su2_normalize(pair.K_part.elements[0])
    a = _su2_normalize(pair.torus.elements[0])
    w = _intertwiner([k, a], [SIGMA_Z, SIGMA_X])
    xp = dagger(w) @ x @ w
    c, s = abs(xp[0, 0]), abs(xp[0, 1])
    beta = 2 * np.arctan2(s, c)
    plus = 2 * np.angle(xp[0, 0]) if c > 1e-14 else 0.0
    minus = 2 * np.angle(xp[0, 1] / 1j) if s > 1e-14 else 0.0
    alpha, gamma = 0.5 * (plus + minus), 0.5 * (plus - minus)
    return [alpha * k], beta * a, [gamma * k]


# ---------------------------------------------------------------------------
# recognized types
# ---------------------------------------------------------------------------


def _kak_ai(x):
    n = x.shape[0]
    m = x @ x.T
    rng = np.random.default_rng(7)
    c = 1.0 + rng.random()
    _, o = np.linalg.eigh(m.real + c * m.imag)
    if np.linalg.det(o) < 0:
        o[:, 0] = -o[:, 0]
    d = np.diag(o.T @ m @ o)
    phi = np.angle(d) / 2
    half_turns = int(np.rint(phi.sum() / np.pi))
    if half_turns % 2:
        phi[0] += np.pi
        half_turns += 1
    phi[0] -= half_turns * np.pi
    a = 1j * np.diag(phi)
    k2 = np.exp(-1j * phi)[:, None] * (o.T @ x)
    k2 = k2.real
    if np.linalg.det(k2) < 0:
        raise KAKError("AI factorization produced an improper K2")
    return givens_exponents(o), a, givens_exponents(k2)


def _block_logs(u, p):
    """Traceless block-diagonal log of a block-diagonal special unitary."""
    n = u.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for sl in (slice(0, p), slice(p, n)):
        blk = u[sl, sl]
        t, z = sla.schur(blk, output="complex")
        out[sl, sl] = (z * (1j * np.angle(np.diag(t)))) @ dagger(z)
    m = int(np.rint(np.trace(out).imag / (2 * np.pi)))
    if m:
        t, z = sla.schur(u[:p, :p], output="complex")
        ph = np.angle(np.diag(t))
        ph[0] -= 2 * np.pi * m
        out[:p, :p] = (z * (1j * ph)) @ dagger(z)
    return 0.5 * (out - dagger(out))


def _kak_aiii(x):
    n = x.shape[0]
    u, cs, vdh = sla.cossin(x, p=1, q=1)
    phase = np.angle(np.linalg.det(u)) / n
    u = u * np.exp(-1j * phase)
    vdh = vdh * np.exp(1j * phase)
    theta = np.arctan2(cs[n - 1, 0].real, cs[0, 0].real)
    a = np.zeros((n, n), dtype=complex)
    a[n - 1, 0], a[0, n - 1] = theta, -theta
    return [_block_logs(u, 1)], a, [_block_logs(vdh, 1)]


def _conjugator_composed(n):
    return np.diag(np.concatenate(([1.0], np.full(n - 1, 1j))))


def _kak_composed(x):
    g = _conjugator_composed(x.shape[0])
    k1, a, k2 = _kak_ai(g @ x @ dagger(g))
    back = lambda es: [dagger(g) @ e @ g for e in es]
    return back(k1), a, back(k2)


# ---------------------------------------------------------------------------
# numerical fallback
# ---------------------------------------------------------------------------


def _kak_numeric(x, pair, kak_tol, seed=0, starts=16, max_nfev=5000):
    kb = pair.K_part.elements
    tb = pair.torus.elements
    nk, nt = len(kb), len(tb)

    def unpack(v):
        k1 = np.einsum("i,ijk->jk", v[:nk], kb)
        a = np.einsum("i,ijk->jk", v[nk:nk + nt], tb)
        k2 = np.einsum("i,ijk->jk", v[nk + nt:], kb)
        return k1, a, k2

    def split(z):
        return np.concatenate((z.real.ravel(), z.imag.ravel()))

    def resid(v):
        k1, a, k2 = unpack(v)
        return split(sla.expm(k1) @ sla.expm(a) @ sla.expm(k2) - x)

    def jac(v):
        k1, a, k2 = unpack(v)
        e1, ea, e2 = sla.expm(k1), sla.expm(a), sla.expm(k2)
        cols = []
        for b in kb:
            cols.append(split(sla.expm_frechet(k1, b, compute_expm=False) @ ea @ e2))
        for b in tb:
            cols.append(split(e1 @ sla.expm_frechet(a, b, compute_expm=False) @ e2))
        for b in kb:
            cols.append(split(e1 @ ea @ sla.expm_frechet(k2, b, compute_expm=False)))
        return np.array(cols).T

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        v0 = rng.uniform(-np.pi, np.pi, 2 * nk + nt)
        sol = least_squares(resid, v0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15,
                            gtol=1e-10, max_nfev=max_nfev)
        r = np.linalg.norm(sol.fun)
        if best is None or r < best[0]:
            best = (r, sol.x)
        if r <= kak_tol * 1e-2:
            break
    k1, a, k2 = unpack(best[1])
    return [k1], a, [k2]


# ---------------------------------------------------------------------------


def kak_factorize(x, pair: CartanPair, kak_tol=DEFAULT_KAK_TOL, seed=0):
    """Factor ``x`` in SU(n) as ``K1 expm(A) K2`` with K1, K2 in exp(K) and A in the torus."""
    x = np.asarray(x, dtype=complex)
    n = pair.n
    if x.shape != (n, n):
        raise StructureError(f"target must be {n}x{n}")
    if not is_unitary(x, 1e-10) or abs(np.linalg.det(x) - 1) > 1e-8:
        raise StructureError("target must be special unitary")
    if n == 1:
        z = np.zeros((1, 1), dtype=complex)
        return KAKFactorization(x, z, np.eye(1, dtype=complex), (), (), "trivial", 0.0)

    attempts = []
    if n == 2 and pair.K_part.dim == 1 and pair.torus.dim == 1:
        attempts.append(("closed-form-su2", lambda: _kak_su2(x, pair)))
    typed = {"AI": _kak_ai, "AIII": _kak_aiii, "composed": _kak_composed}
    if pair.involution_type in typed and n >= 3:
        attempts.append((pair.involution_type, lambda: typed[pair.involution_type](x)))
    attempts.append(("numeric", lambda: _kak_numeric(x, pair, kak_tol, seed)))

    failures = []
    for method, run in attempts:
        try:
            k1e, a, k2e = run()
        except (KAKError, np.linalg.LinAlgError) as exc:
            failures.append(f"{method}: {exc}")
            continue
        k1 = product_of_exponentials(k1e, n)
        k2 = product_of_exponentials(k2e, n)
        res = float(np.linalg.norm(k1 @ expm_skew(a) @ k2 - x))
        if res <= kak_tol:
            return KAKFactorization(k1, a, k2, tuple(k1e), tuple(k2e), method, res)
        failures.append(f"{method}: residual {res:.2e}")
    raise KAKError("no KAK factorization within tolerance (" + "; ".join(failures) + ")")


def check_factor_membership(fact: KAKFactorization, pair: CartanPair, tol=DEFAULT_TOL):
    """Whether every K exponent lies in K and the torus element lies in the torus."""
    ok_k = all(pair.K_part.contains(e, 1e-8) for e in fact.k1_exponents + fact.k2_exponents)
    ok_a = pair.torus.contains(fact.A_tilde, 1e-8)
    return ok_k and ok_a
