"""Compare the compiled and numpy Viterbi backends on noisy rate-1/2 frames.

    python benchmarks/bench_viterbi.py [--frames 64] [--bits 1024] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from bccspec import viterbi
from bccspec.code_model import encode


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=64)
    ap.add_argument("--bits", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    info = rng.integers(0, 2, size=(args.frames, args.bits))
    llr = (1.0 - 2.0 * encode(info)) * 2.0 + rng.normal(0, 1.5, size=(args.frames, 2 * (args.bits + 6)))

    backends = ["numpy"] + (["cython"] if viterbi.BACKEND == "cython" else [])
    decoded = {}
    best = {}
    for name in backends:
        decoded[name] = viterbi.viterbi_decode_batch(llr, backend=name)
        runs = timeit.repeat(lambda: viterbi.viterbi_decode_batch(llr, backend=name),
                             number=1, repeat=args.repeat)
        best[name] = min(runs)
        mbps = args.frames * args.bits / best[name] / 1e6
        print(f"{name:>7}: {best[name] * 1e3:8.2f} ms  ({mbps:6.2f} Mbit/s decoded)")
    if "cython" in best:
        same = np.array_equal(decoded["numpy"], decoded["cython"])
        print(f"speed-up: {best['numpy'] / best['cython']:.1f}x, outputs identical: {same}")
    else:
        print("compiled extension not available; only the numpy backend was timed")


if __name__ == "__main__":
    main()
