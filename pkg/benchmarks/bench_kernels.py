"""Benchmark the enumeration kernel: compiled extension vs pure Python.

Both backends walk the identical configuration order, so besides timing we
assert the returned totals and per-state accumulators are bit-for-bit equal.

    python3 benchmarks/bench_kernels.py --sizes 10 12 14 16 18 --repeats 5
"""

import argparse
import itertools
import time

import numpy as np

from wigmore import _kernels_py
from wigmore.bayesnet import BayesNet, Cpt, Variable

try:
    from wigmore import _kernels_cy
except ImportError:
    _kernels_cy = None


def build_net(n_nodes: int, rng) -> BayesNet:
    variables = [Variable(f"v{i}") for i in range(n_nodes)]
    cpts = []
    for i, v in enumerate(variables):
        pool = [j for j in range(i) if rng.random() < 0.4][:3]
        parents = [variables[j] for j in pool]
        rows = {}
        for combo in itertools.product(*(p.states for p in parents)):
            dist = rng.uniform(0.05, 0.95, size=v.card)
            rows[combo] = dist / dist.sum()
        cpts.append(Cpt(v.name, [p.name for p in parents], rows))
    return BayesNet(variables, cpts)


def run_kernel(mod, flat, ev):
    sums = np.zeros(int(flat.sums_off[-1]), dtype=np.float64)
    total = mod.enumerate_accumulate(
        flat.cards,
        flat.parents_off,
        flat.parents_flat,
        flat.strides_flat,
        flat.cpt_off,
        flat.cpt_flat,
        flat.sums_off,
        ev,
        sums,
    )
    return total, sums


def best_time(mod, flat, ev, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        run_kernel(mod, flat, ev)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 12, 14, 16, 18])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if _kernels_cy is None:
        print("compiled extension not available; timing pure Python only")

    rng = np.random.default_rng(args.seed)
    header = f"{'nodes':>6} {'configs':>10} {'python':>12}"
    if _kernels_cy is not None:
        header += f" {'cython':>12} {'speedup':>9}"
    print(header)

    for n in args.sizes:
        net = build_net(n, rng)
        flat = net.flat()
        ev = net.evidence_vector({})

        t_py = best_time(_kernels_py, flat, ev, args.repeats)
        line = f"{n:>6} {2 ** n:>10} {t_py:>11.4f}s"

        if _kernels_cy is not None:
            total_py, sums_py = run_kernel(_kernels_py, flat, ev)
            total_cy, sums_cy = run_kernel(_kernels_cy, flat, ev)
            assert total_py == total_cy, "backends disagree on total"
            assert np.array_equal(sums_py, sums_cy), "backends disagree on sums"
            t_cy = best_time(_kernels_cy, flat, ev, args.repeats)
            line += f" {t_cy:>11.4f}s {t_py / t_cy:>8.1f}x"

        print(line)


if __name__ == "__main__":
    main()
