"""Compare the compiled and numpy see-saw kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from entanglekit import catalog, kernels
from entanglekit.criteria import range_basis
from entanglekit.witness import correlation_matrix


def _best(fn, repeat):
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return min(ts)


def _units(rng, n, d):
    z = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def cases():
    rng = np.random.default_rng(0)
    for name, rho, n in (("upb-tiles 3x3", catalog.upb_tiles(), 2000),
                         ("horodecki-a 2x4", catalog.horodecki_a(0.5), 2000)):
        B = range_basis(rho.matrix)
        H = np.eye(B.shape[0]) - B @ B.conj().T
        dA, dB = rho.dims
        e0, f0 = _units(rng, n, dA), _units(rng, n, dB)
        yield f"product_min {name}, {n} starts", lambda b, H=H, dA=dA, dB=dB, e0=e0, f0=f0: \
            kernels.product_min(H, dA, dB, e0, f0, 2000, 1e-15, backend=b)
    T = correlation_matrix(catalog.werner(0.8))
    s = rng.normal(size=(5000, 4, 3))
    s /= np.linalg.norm(s, axis=2, keepdims=True)
    yield "chsh_ascent werner, 5000 starts", lambda b: kernels.chsh_ascent(T, s, 500, 1e-10, backend=b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    print(f"{'case':<44}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, fn in cases():
        t = [_best(lambda: fn(b), args.repeat) for b in backends]
        row = f"{label:<44}" + "".join(f"{x * 1e3:>10.1f}ms" for x in t)
        if len(t) > 1:
            row += f"{t[0] / t[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
