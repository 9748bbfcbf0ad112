"""Time the closure and ad-orbit kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 4 6 8]

Each case runs once untimed so JIT compilation is excluded, then reports the
best of ``--repeat`` runs. Both backends must return the same dimension.
"""
import argparse
import time

import numpy as np

from indirect_control import _kernels
from indirect_control.closure import lie_closure
from indirect_control.fixtures import load_fixture
from indirect_control.operators import random_density, random_skew_hermitian
from indirect_control.verdict import ad_orbit


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(sizes, rng):
    for n in sizes:
        gens = [random_skew_hermitian(n, rng, traceless=True) for _ in range(2)]
        yield f"closure su({n})", lambda g=gens: lie_closure(g).dim
    for name in ("example1_ising", "p1_counterexample"):
        spec = load_fixture(name)
        alg = lie_closure(spec.generators())
        rho_s = random_density(spec.n_s, rng)
        seed = 1j * np.kron(rho_s, spec.rho_a)
        yield f"orbit {name}", lambda a=alg, s=seed: ad_orbit(a, s).dim


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8])
    args = ap.parse_args()

    backends = sorted(_kernels.BACKENDS)
    print(f"{'case':<28}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for label, fn in cases(args.sizes, np.random.default_rng(0)):
        row, dims = {}, set()
        for b in backends:
            _kernels.set_backend(b)
            row[b], dim = _best(fn, args.repeat)
            dims.add(dim)
        if len(dims) != 1:
            raise SystemExit(f"{label}: backends disagree on dimension {sorted(dims)}")
        speedup = row["numpy"] / row["numba"] if "numba" in row else float("nan")
        cells = "".join(f"{row[b] * 1e3:>10.2f}ms" for b in backends)
        print(f"{label:<28}{cells}{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
