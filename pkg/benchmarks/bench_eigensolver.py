"""Time the numba and numpy eigensolver kernels on Scarf II Hamiltonians.

    python benchmarks/bench_eigensolver.py [--sizes 101 201 401 701] [--repeat 3]

Both backends are imported side by side from ``susypt._kernels`` regardless of
``SUSYPT_BACKEND``; the first numba call (compilation or cache load) is timed
separately.
"""
import argparse
import time

import numpy as np

from susypt import Family, Grid, discretize_hamiltonian, make_params, potential
from susypt import _kernels


def solve(M, hessenberg, hqr):
    H = np.array(M, dtype=np.complex128, copy=True)
    hessenberg(H)
    eig, status, _, _ = hqr(H, 100, _kernels.EPS)
    if status:
        raise RuntimeError("QR did not converge")
    return eig


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[101, 201, 401, 701])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    p = make_params(Family.SCARF2_BROKEN, A=3.0, C_pt=0.75)
    t0 = time.perf_counter()
    solve(np.eye(4) + 0j, _kernels.hessenberg_numba, _kernels.hqr_numba)
    print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f}s")
    print(f"{'nodes':>6} {'order':>6} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8} {'max |diff|':>11}")
    for n in args.sizes:
        M = discretize_hamiltonian(potential(Family.SCARF2_BROKEN, p, -1, Grid.symmetric(14, n)))
        t_nb, e_nb = best_of(lambda: solve(M, _kernels.hessenberg_numba, _kernels.hqr_numba), args.repeat)
        t_np, e_np = best_of(lambda: solve(M, _kernels.hessenberg_numpy, _kernels.hqr_numpy), 1)
        gap = np.abs(e_nb[:, None] - e_np[None, :])
        diff = max(gap.min(axis=1).max(), gap.min(axis=0).max())
        print(f"{n:>6} {M.shape[0]:>6} {t_nb:>10.3f} {t_np:>10.3f} {t_np / t_nb:>8.1f} {diff:>11.2e}")


if __name__ == "__main__":
    main()
