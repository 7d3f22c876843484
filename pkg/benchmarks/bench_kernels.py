"""Compare the compiled pair kernels with the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--resolution 65] [--repeat 5]
"""

import argparse
import time
import warnings

import numpy as np

from fracfucik import _backend
from fracfucik.domain import DomainSpec, build_mesh
from fracfucik.kernel.energy import assemble


def best_of(fun, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fun()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--resolution", type=int, default=65)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--p", type=float, default=3.0)
    args = ap.parse_args()
    try:
        _backend.get("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    spec = DomainSpec(n=1, omega=(-1.0, 1.0), epsilon=0.25, alpha=0.3, p=args.p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mesh = build_mesh(spec, args.resolution)
    u = np.random.default_rng(0).standard_normal(mesh.num_nodes)
    energies = {b: assemble(mesh, backend=b, store_pairs=True) for b in ("compiled", "python")}
    npairs = sum(len(ps) for ps in energies["compiled"].pairs.values())
    print(f"p={args.p:g} resolution={args.resolution} nodes={mesh.num_nodes} "
          f"quadrature pairs={npairs}")
    print(f"{'operation':<18}{'compiled [ms]':>15}{'python [ms]':>15}{'speedup':>10}")
    ops = {"energy": lambda E: E.seminorm_p(u),
           "energy+gradient": lambda E: E.energy_and_grad(u),
           "hessian": lambda E: E.hessian(u)}
    for name, op in ops.items():
        t = {b: best_of(lambda: op(E), args.repeat) for b, E in energies.items()}
        print(f"{name:<18}{1e3 * t['compiled']:>15.2f}{1e3 * t['python']:>15.2f}"
              f"{t['python'] / t['compiled']:>10.1f}")
    diff = abs(energies["compiled"].seminorm_p(u) - energies["python"].seminorm_p(u))
    print(f"energy difference between backends: {diff:.2e}")


if __name__ == "__main__":
    main()
