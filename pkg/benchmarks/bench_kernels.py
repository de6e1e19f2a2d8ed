"""Time the compiled and pure-Python brute-force kernels against each other.

    python benchmarks/bench_kernels.py [--dims 1 2 3 4 5] [--repeat 5]
"""

import argparse
import timeit

from procmat import kernels
from procmat.game import causal_bruteforce, count_causal_strategies


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])
    if len(backends) == 1:
        print("compiled extension not built; timing the python kernel only")
    print(f"{'d':>3} {'strategies':>14} " + " ".join(f"{b + ' (ms)':>15}" for b in backends) + f" {'speedup':>9}")
    for d in args.dims:
        times = {}
        for b in backends:
            value = causal_bruteforce(d, backend=b).max_p_succ
            times[b] = min(timeit.repeat(lambda: causal_bruteforce(d, backend=b), number=1, repeat=args.repeat))
        speed = f"{times['python'] / times['compiled']:8.1f}x" if "compiled" in times else ""
        print(f"{d:>3} {count_causal_strategies(d):>14,} "
              + " ".join(f"{times[b] * 1e3:>15.2f}" for b in backends) + f" {speed:>9}   max p_succ = {value}")


if __name__ == "__main__":
    main()
