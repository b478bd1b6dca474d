"""Time basin rendering with the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_basins.py [--resolution 256x256] [--repeat 3]

Compilation happens once per method and is reported separately from the
steady-state timings.  Assignments of the two backends are compared too.
"""

import argparse
import time

import numpy as np

from multipoint.basins import BasinConfig, render_basin
from multipoint.basins import _accel

METHODS = ("d4", "KT", "NNNN", "d7", "d9")
PROBLEMS = ("p1", "p2", "p3")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", default="256x256")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    w, h = (int(v) for v in args.resolution.split("x"))
    if not _accel.numba_enabled():
        print(f"numba unavailable or disabled ({_accel.ENV_FLAG}); timing numpy only")

    print(f"{'method':<6} {'poly':<4} {'compile':>8} {'numba':>8} {'numpy':>8} "
          f"{'speedup':>8} {'agree':>8}")
    for m in METHODS:
        for p in PROBLEMS:
            cfg = BasinConfig(p, m, resolution=(w, h))
            t_np, img_np = best_of(lambda: render_basin(cfg, backend="numpy"), args.repeat)
            if not _accel.numba_enabled():
                print(f"{m:<6} {p:<4} {'-':>8} {'-':>8} {t_np:8.3f}")
                continue
            t0 = time.perf_counter()
            render_basin(cfg, backend="numba")
            first = time.perf_counter() - t0
            t_nb, img_nb = best_of(lambda: render_basin(cfg, backend="numba"), args.repeat)
            agree = np.mean(img_nb.assignment == img_np.assignment)
            print(f"{m:<6} {p:<4} {max(first - t_nb, 0):8.3f} {t_nb:8.3f} {t_np:8.3f} "
                  f"{t_np / t_nb:7.1f}x {agree:8.4%}")


if __name__ == "__main__":
    main()
