"""Time each numba kernel against its plain-Python body (``.py_func``).

    python3 benchmarks/bench_kernels.py [--repeat 3]

Compilation is excluded: every jitted kernel runs once before timing.
"""

import argparse
import time

import numpy as np

from rotent import kernels
from rotent._jit import JIT_ENABLED
from rotent.fock import enumerate_basis
from rotent.interaction import element_table
from rotent.orbitals import TrapConfig
from rotent.solver import build_hamiltonian, ground_state_lanczos


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    basis = enumerate_basis(6, 18, "boson")
    table = element_table("coulomb", basis.l_max)
    V = np.ascontiguousarray(table.folded(False))
    eps = np.zeros(basis.n_orbitals)
    H = build_hamiltonian(basis, table)
    gs = ground_state_lanczos(H)
    x = np.random.default_rng(0).normal(size=basis.dim)
    y = np.empty(basis.dim)
    coeffs = np.ascontiguousarray(gs.amplitudes)
    trap = TrapConfig(lam=0.005, step=2e-3)
    grid = np.empty(trap.npts)
    args = (basis.occupations, basis.counts, basis.n_particles, basis.total_l, False)
    yield f"assemble_upper (dim {basis.dim})", kernels.assemble_upper, (*args, V, eps)
    yield f"sym_matvec (nnz {H.nnz})", kernels.sym_matvec, (H.indptr, H.indices, H.data, x, y)
    yield "pair_expectations", kernels.pair_expectations, (basis.occupations, coeffs, *args[1:])
    yield f"numerov_match ({trap.npts} pts)", kernels.numerov_match, (
        trap.x0, trap.dx, trap.npts, 4, trap.lam, 5.1, grid,
    )
    yield "count_table", kernels.count_table, (12, 40, 40, False)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not JIT_ENABLED:
        print("JIT disabled; both columns time the same Python code")
    print(f"{'kernel':36s} {'numba [s]':>12s} {'python [s]':>12s} {'speedup':>9s}")
    for name, fn, fargs in cases():
        fn(*fargs)
        fast = best_of(lambda: fn(*fargs), args.repeat)
        slow = best_of(lambda: fn.py_func(*fargs), 1)
        print(f"{name:36s} {fast:12.2e} {slow:12.2e} {slow / fast:9.1f}")


if __name__ == "__main__":
    main()
