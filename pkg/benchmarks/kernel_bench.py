#!/usr/bin/env python3
"""Timing comparison of the numba kernels against their pure-numpy
reference implementations on identical inputs.

Each kernel pair is checked for agreement before timing, so a run doubles
as a consistency test.  When numba is unavailable (or disabled with
MOTIFCC_BACKEND=numpy) only the reference column is reported.

    python3 benchmarks/kernel_bench.py
    python3 benchmarks/kernel_bench.py --n 40 --batch 256 --repeats 7 --json bench.json
"""

from __future__ import annotations

import argparse
import json
import time
from itertools import combinations

import numpy as np

from motifcc import kernels


def bench(fn, repeats: int) -> float:
    """Best-of-N wall time in seconds."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_eta_file(rng, m: int, num_etas: int, nnz: int):
    """Synthetic eta-factor file shaped like what the simplex emits:
    concatenated sparse columns (starts/idx/val) plus each eta's pivot
    row.  Pivot weights stay near 1 and off-pivot entries small so
    repeated application keeps y well-scaled."""
    starts = np.zeros(num_etas + 1, dtype=np.int64)
    idx_parts, val_parts = [], []
    pivots = np.empty(num_etas, dtype=np.int64)
    for e in range(num_etas):
        rows = rng.choice(m, size=nnz, replace=False).astype(np.int64)
        vals = rng.uniform(-0.05, 0.05, size=nnz)
        vals[0] = rng.uniform(0.8, 1.2)
        pivots[e] = rows[0]
        idx_parts.append(rows)
        val_parts.append(vals)
        starts[e + 1] = starts[e] + nnz
    return starts, np.concatenate(idx_parts), np.concatenate(val_parts), pivots


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=34, help="vertices for the tuple-table kernels")
    ap.add_argument("--k", type=int, default=3, help="motif size")
    ap.add_argument("--batch", type=int, default=128, help="label vectors for the batch kernel")
    ap.add_argument("--m", type=int, default=1200, help="basis dimension for the eta kernels")
    ap.add_argument("--etas", type=int, default=800, help="number of eta factors")
    ap.add_argument("--repeats", type=int, default=5, help="timing repeats (best-of)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the results to this JSON file")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n, k = args.n, args.k
    tuples = np.array(list(combinations(range(1, n + 1), k)), dtype=np.int64)
    wplus = rng.random(len(tuples))
    labels = np.zeros(n + 1, dtype=np.int64)
    labels[1:] = rng.integers(1, 6, size=n)
    labels_batch = rng.integers(1, 6, size=(args.batch, n + 1)).astype(np.int64)
    labels_batch[:, 0] = 0
    x = rng.random(len(tuples))
    active = np.ones(n + 1, dtype=bool)
    active[0] = False
    starts, idx, val, pivots = make_eta_file(rng, args.m, args.etas, nnz=8)
    y0 = rng.standard_normal(args.m)

    cases = {
        "split_mask": lambda impl: impl(tuples, labels),
        "partition_cost": lambda impl: impl(tuples, wplus, labels),
        "partition_costs_batch": lambda impl: impl(tuples, wplus, labels_batch),
        "pair_min_scores": lambda impl: impl(tuples, x, active, 1),
        "ftran_etas": lambda impl: impl(starts, idx, val, pivots, y0.copy()),
        "btran_etas": lambda impl: impl(starts, idx, val, pivots, y0.copy()),
    }

    have_numba = kernels.active_backend() == "numba"
    print(
        f"active backend: {kernels.active_backend()}   n={n} k={k} "
        f"T={len(tuples)} batch={args.batch} m={args.m} etas={args.etas} "
        f"repeats={args.repeats}"
    )
    header = f"{'kernel':<24}{'numpy (ms)':>12}"
    if have_numba:
        header += f"{'numba (ms)':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))

    results = {}
    for name, call in cases.items():
        ref = kernels.REFERENCE_IMPLS[name]
        t_ref = bench(lambda: call(ref), args.repeats)
        row = {"numpy_ms": t_ref * 1e3}
        line = f"{name:<24}{t_ref * 1e3:>12.3f}"
        if have_numba:
            nb = kernels.NUMBA_IMPLS[name]
            out_nb = np.asarray(call(nb), dtype=float)  # first call compiles
            out_ref = np.asarray(call(ref), dtype=float)
            if not np.allclose(out_nb, out_ref):
                raise SystemExit(f"kernel pair {name!r} disagrees")
            t_nb = bench(lambda: call(nb), args.repeats)
            row["numba_ms"] = t_nb * 1e3
            row["speedup"] = t_ref / t_nb
            line += f"{t_nb * 1e3:>12.3f}{t_ref / t_nb:>9.2f}x"
        results[name] = row
        print(line)

    if args.json:
        payload = {
            "backend": kernels.active_backend(),
            "params": vars(args),
            "results": results,
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.json}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
