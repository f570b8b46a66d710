"""Time the compiled Monte Carlo kernel against the numpy fallback on the
same random inputs and check that both produce identical counts.

    python3 benchmarks/bench_kernels.py --channels 200 --symbols 10000
"""
import argparse
import math
import time

import numpy as np

from panc import _kernel_py
from panc.exact import dest_points
from panc.geometry import irc_vertices
from panc.montecarlo import channel_stream, sample_channels
from panc.power import optimize_powers_ct

try:
    from panc._kernel import simulate_block as cython_block
except ImportError:
    cython_block = None


def make_inputs(n_channels, n_symbols, seed):
    gains = {"1r": 1.0, "2r": 1.0, "1d": 1.0, "2d": 1.0, "rd": 1.0}
    rel = np.empty((n_channels, 4, 2))
    dst = np.empty((n_channels, 4, 2))
    for c in range(n_channels):
        ch = sample_channels(gains, channel_stream(seed, c))
        rel[c] = irc_vertices(ch)
        dst[c] = dest_points(ch, optimize_powers_ct(ch), "panc")
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, 4, size=(n_channels, n_symbols), dtype=np.int8)
    noise = rng.standard_normal((n_channels, n_symbols, 4))
    return rel, dst, pairs, noise


def run(fn, inputs, snr_db, repeat):
    rel, dst, pairs, noise = inputs
    s2 = 10.0 ** (-snr_db / 10.0)
    best = math.inf
    for _ in range(repeat):
        counts = np.zeros((4, 4), dtype=np.int64)
        rcounts = np.zeros((4, 4), dtype=np.int64)
        t0 = time.perf_counter()
        fn(rel, dst, False, math.sqrt(0.5 * s2), math.sqrt(s2), pairs, noise, counts, rcounts)
        best = min(best, time.perf_counter() - t0)
    return best, counts, rcounts


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--channels", type=int, default=200)
    ap.add_argument("--symbols", type=int, default=10_000)
    ap.add_argument("--snr", type=float, default=10.0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    inputs = make_inputs(args.channels, args.symbols, args.seed)
    n = args.channels * args.symbols
    t_py, c_py, r_py = run(_kernel_py.simulate_block, inputs, args.snr, args.repeat)
    print(f"numpy   {t_py:8.3f} s  {n / t_py / 1e6:7.2f} Mtrials/s")
    if cython_block is None:
        print("cython  not built")
        return 0
    t_cy, c_cy, r_cy = run(cython_block, inputs, args.snr, args.repeat)
    print(f"cython  {t_cy:8.3f} s  {n / t_cy / 1e6:7.2f} Mtrials/s")
    same = np.array_equal(c_py, c_cy) and np.array_equal(r_py, r_cy)
    print(f"speedup {t_py / t_cy:.1f}x, counts identical: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
