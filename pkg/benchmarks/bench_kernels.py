"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each kernel runs once untimed (JIT warm-up), then ``--repeat`` times; the
table reports the best wall time per backend and the speed-up.
"""
import argparse
import time

import numpy as np

from qampenc import kernels
from qampenc.encoder import _pack, build_plan
from qampenc.preprocess import compute_theta, quantize_theta


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(quick):
    rng = np.random.default_rng(0)
    n_branch = 8 if quick else 10
    plan = build_plan(quantize_theta(compute_theta(rng.standard_normal(1 << n_branch)), 8), 4)
    c = plan.circuit
    arrays = c.arrays()
    N, nw = plan.N, -(-plan.N // 64)
    sys_rows = [_pack(((np.arange(N) >> b) & 1).astype(bool), nw) for b in range(plan.n)]
    start = c.segment("initial.x")[1]

    def branch(impl):
        rows = np.zeros((c.num_qubits, nw), dtype=np.uint64)
        for q, r in zip(plan.layout["SYS"], sys_rows):
            rows[q] = r
        a0, a1 = np.ones(N, dtype=complex), np.zeros(N, dtype=complex)
        impl.branch_run(rows, a0, a1, _pack(np.ones(N, dtype=bool), nw), plan.flag, *arrays, start, len(c))

    small = build_plan(quantize_theta(compute_theta(rng.standard_normal(4)), 4), 2)
    sc = small.circuit
    sarr = sc.arrays()

    def dense(impl):
        st = np.zeros(1 << sc.num_qubits, dtype=complex)
        st[0] = 1
        impl.dense_run(st, sc.num_qubits, *sarr, 0, len(sc))

    _, conds, _, tptr, tidx, cptr, cidx = arrays
    x = rng.standard_normal((256, 4096 if not quick else 1024))
    side = 512 if quick else 1024
    img = np.abs(rng.standard_normal((side, side)))
    edges = np.linspace(0, side, 65).astype(np.int64)

    return [
        (f"branch_run n={plan.n} ({len(c)} gates)", branch),
        (f"dense_run {sc.num_qubits} qubits ({len(sc)} gates)", dense),
        (f"greedy_depth ({len(c)} gates)", lambda impl: impl.greedy_depth(c.num_qubits, conds, tptr, tidx, cptr, cidx)),
        (f"max_share {x.shape[0]}x{x.shape[1]}", lambda impl: impl.max_share(x)),
        (f"sector_stats {side}^2 / 64x64", lambda impl: impl.sector_stats(img, edges, edges)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    if kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<44} {'numba':>10} {'numpy':>10} {'speed-up':>9}")
    for name, fn in cases(args.quick):
        tn = _best(lambda: fn(kernels.numba_impl), args.repeat)
        tp = _best(lambda: fn(kernels.numpy_impl), args.repeat)
        print(f"{name:<44} {tn * 1e3:>8.2f}ms {tp * 1e3:>8.2f}ms {tp / tn:>8.1f}x")


if __name__ == "__main__":
    main()
