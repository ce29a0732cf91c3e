"""Time the compiled kernels against the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import timeit

import numpy as np

from rspcat import _kernels
from rspcat import fockcore as fc
from rspcat import gaussianmodel as gm


def _cases():
    p = gm.effective_params(gm.lossy_cm(gm.tmss_cm(0.24, 1.3), 0.9, 0.9))
    psi = _kernels.get_backend("python").hermite_functions(79, np.array([0.0]))[:, 0]
    kmat = np.outer(psi, psi)
    rho = fc.cat(1.5, -1, 40).projector().elems
    grid = np.linspace(-5, 5, 101)
    xs = np.linspace(-6, 6, 2000)
    return {
        "hermite_functions(200, 2000 pts)": lambda k: k.hermite_functions(200, xs),
        "mixed_block(N_A=80, N_B=40)": lambda k: k.mixed_block(p.zeta, p.r_s, p.eta, kmat, 40),
        "alice_weights(80, 80)": lambda k: k.alice_weights(p.zeta, p.r_s, p.eta, 80, 80),
        "wigner_grid(41x41 rho, 101^2 pts)": lambda k: k.wigner_grid(rho, grid, grid),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _kernels.available_backends()
    print(f"active backend: {_kernels.BACKEND}; available: {', '.join(backends)}")
    print(f"{'kernel':38s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in _cases().items():
        times = []
        for b in backends:
            mod = _kernels.get_backend(b)
            fn(mod)  # warm-up
            number = 1
            t = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(t)
        row = f"{name:38s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x" if times[1] > 0 else f"{math.inf:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
