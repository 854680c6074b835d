"""Acceptance criteria, one test each.

Every test prints a single ``[ACCEPT n] PASS|FAIL`` line with its measured
numbers and runtime; the lines are repeated in the pytest terminal summary.
Run standalone with ``python3 tests/test_acceptance.py`` for just the lines.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from qampenc import cli
from qampenc.amplify import amplify, run_dense_amplification, schedule
from qampenc.encoder import ReducedOutput, build_plan, reduce_dense, run_branch_sim, run_dense_oracle
from qampenc.fileio import split_output
from qampenc.imagery import GrayImage, density_scaling_curve, load_pgm, sector_density, to_pgm
from qampenc.preprocess import compute_theta, quantize_theta
from qampenc.qftdemo import qft_matrix, run_qft_check
from qampenc.resources import encoder_depth_model, estimate, estimate_params, measured_depth, scaling_table
from qampenc.simcore import fidelity

REPORT = []

# reference angles and bit matrix of the worked example (v = (1,2,-1,2,-1,2,1,2)/sqrt(20), L = 6)
GOLDEN_THETA = [1 / 3, 1, -1 / 3, 1, -1 / 3, 1, 1 / 3, 1]
GOLDEN_B = [
    [0, 0, 1, 0, 1, 1],
    [0, 1, 1, 1, 1, 1],
    [1, 0, 1, 0, 1, 0],
    [0, 1, 1, 1, 1, 1],
    [1, 0, 1, 0, 1, 0],
    [0, 1, 1, 1, 1, 1],
    [0, 0, 1, 0, 1, 1],
    [0, 1, 1, 1, 1, 1],
]


def _report(num, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"[ACCEPT {num}] {'PASS' if ok else 'FAIL'} {detail} ({elapsed:.2f}s < {budget:g}s)"
    REPORT.append(line)
    print(line)
    assert ok, line


def _run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    assert code == 0, argv
    return split_output(out)


def test_acceptance_1_golden_preprocess(tmp_path, capsys):
    src = tmp_path / "example.csv"
    src.write_text("\n".join(str(x / math.sqrt(20)) for x in (1, 2, -1, 2, -1, 2, 1, 2)) + "\n")
    t = time.perf_counter()
    _, body = _run_cli(["preprocess", "-i", str(src), "-L", "6"], capsys)
    elapsed = time.perf_counter() - t
    pre = body["preprocess"]
    theta_err = max(abs(a - b) for a, b in zip(pre["theta"], GOLDEN_THETA))
    ok = pre["B"] == GOLDEN_B and theta_err < 1e-12
    _report(1, ok, f"B bit-exact={pre['B'] == GOLDEN_B} max|theta-ref|={theta_err:.1e}", elapsed, 1.0)


def test_acceptance_2_encoding_correctness():
    t = time.perf_counter()
    worst_rho, worst_fid, worst_amp, count = 0.0, 0.0, 0.0, 0
    for n in range(2, 11):
        N = 1 << n
        for M in sorted({1, 2, N}):
            for L in (4, 8):
                rng = np.random.default_rng(1000 * n + 10 * M + L)
                for _ in range(50):
                    v = rng.standard_normal(N)
                    v /= np.linalg.norm(v)
                    B = quantize_theta(compute_theta(v), L)
                    red, _ = run_branch_sim(build_plan(B, M))
                    # oracle: amplitudes straight from the bits, independent of the preprocess module
                    sign = np.where(B.bits[:, 0] == 1, -1.0, 1.0)
                    frac = B.bits[:, 1:].astype(float) @ (2.0 ** -np.arange(1, L))
                    w = sign * np.sin(math.pi / 2 * frac)
                    worst_rho = max(worst_rho, abs(red.rho - float(np.mean(w * w))))
                    worst_fid = max(worst_fid, 1 - fidelity(red.psi_G, w))
                    worst_amp = max(worst_amp, float(np.max(np.abs(w - v / np.max(np.abs(v))))
                                                     / (math.pi / 2 * 2.0 ** -(L - 1))))
                    count += 1
    elapsed = time.perf_counter() - t
    # the bound is strict in exact arithmetic (sin x < x); allow rounding in the ratio
    ok = worst_rho <= 1e-10 and worst_fid <= 1e-10 and worst_amp <= 1.0 + 1e-12
    _report(2, ok, f"{count} vectors: max|P(FLAG=1)-rho|={worst_rho:.1e} max(1-F)={worst_fid:.1e} "
                   f"max amp err/bound={worst_amp:.9f}", elapsed, 120.0)


def _dense_instances(limit=22):
    for n in range(1, 5):
        for M in range(1, (1 << n) + 1):
            for L in range(2, 9):
                plan = build_plan(quantize_theta(np.zeros(1 << n), L), M)
                if plan.num_qubits <= limit:
                    yield n, M, L


def test_acceptance_3_oracle_equivalence():
    t = time.perf_counter()
    worst_fid, worst_leak, count, biggest = 0.0, 0.0, 0, 0
    for n, M, L in _dense_instances():
        rng = np.random.default_rng(7 * n + 11 * M + L)
        v = rng.standard_normal(1 << n)
        plan = build_plan(quantize_theta(compute_theta(v), L), M)
        red, _ = run_branch_sim(plan)
        dred, leak = reduce_dense(plan, run_dense_oracle(plan))
        worst_fid = max(worst_fid, 1 - fidelity(dred.state, red.state))
        worst_leak = max(worst_leak, leak)
        # one gate-level Grover step exercises E^dag, S0 and the Toffoli trees again
        m = max(1, schedule(red.rho).m) if red.rho < 1 else 1
        st, leak_aa = run_dense_amplification(plan, m)
        ared, _ = reduce_dense(plan, st)
        expect, _, _ = amplify(red, m)
        worst_fid = max(worst_fid, 1 - fidelity(ared.state, expect))
        worst_leak = max(worst_leak, leak_aa)
        count += 1
        biggest = max(biggest, plan.num_qubits)
    elapsed = time.perf_counter() - t
    ok = worst_fid <= 1e-9 and worst_leak <= 1e-10
    _report(3, ok, f"{count} instances up to {biggest} qubits: max(1-F)={worst_fid:.1e} "
                   f"max ancilla leak={worst_leak:.1e}", elapsed, 300.0)


def test_acceptance_4_amplification_law():
    t = time.perf_counter()
    worst, floor_ok, lines = 0.0, True, []
    for rho in (0.01, 0.1, 0.25, 0.5, 0.625, 1.0):
        state = np.array([math.sqrt(1 - rho), 0.0, 0.0, math.sqrt(rho)], dtype=complex)
        red = ReducedOutput.from_amplitudes(state[:2], state[2:])
        m = math.floor(math.pi / (4 * math.asin(math.sqrt(rho))) + 1e-12)
        _, success, m_used = amplify(red, schedule(rho).m)
        law = math.sin((2 * m + 1) * math.asin(math.sqrt(rho))) ** 2
        worst = max(worst, abs(success - law))
        floor_ok &= m_used == m and success >= max(1 - rho, rho) - 1e-12
        lines.append(f"m({rho})={m_used}->{success:.4f}")
    checkpoints = (schedule(0.625).m == 0 and abs(schedule(0.625).predicted_success - 0.625) < 1e-12
                   and schedule(0.01).m == 7 and abs(schedule(0.01).predicted_success - 0.9953) < 5e-5)
    elapsed = time.perf_counter() - t
    _report(4, worst <= 1e-10 and floor_ok and checkpoints,
            f"max|P-law|={worst:.1e} {' '.join(lines)}", elapsed, 10.0)


def test_acceptance_5_accounting():
    t = time.perf_counter()
    decl_ok = True
    for n in range(1, 11):
        for M in sorted(m for m in {1, 2, 3, (1 << n) // 2, 1 << n} if 1 <= m <= 1 << n):
            for L in (4, 8):
                decl_ok &= estimate_params(n, M, L, 0.5).qubits_declared == n * (1 + M) + M + L + 1
    ratios = [r["ratio"] for r in scaling_table([10], None, 8)]
    band = max(ratios) / min(ratios)
    worst_lo, worst_hi = math.inf, 0.0
    for n in range(2, 11):
        N = 1 << n
        for M in sorted({1, 2, max(1, N // 4), N}):
            v = np.random.default_rng(n + M).standard_normal(N)
            plan = build_plan(quantize_theta(compute_theta(v), 8), M)
            decl_ok &= plan.qubits_declared == n * (1 + M) + M + 8 + 1
            model = estimate(plan, 0.5).encoder_depth
            assert model == encoder_depth_model(n, M, 8)
            r = measured_depth(plan) / model
            worst_lo, worst_hi = min(worst_lo, r), max(worst_hi, r)
    elapsed = time.perf_counter() - t
    ok = decl_ok and band <= 20 and worst_lo >= 0.5 and worst_hi <= 2.0
    _report(5, ok, f"declared formula={decl_ok} depth-ratio band n=10={band:.2f}x "
                   f"measured/model in [{worst_lo:.2f}, {worst_hi:.2f}]", elapsed, 60.0)


def test_acceptance_6_runtime_statistics(capsys):
    t = time.perf_counter()
    Ns = [2 ** 6, 2 ** 8, 2 ** 10, 2 ** 12, 2 ** 14]
    _, rows = _run_cli(["sphere-stats", "--N", ",".join(map(str, Ns)), "--count", "10000", "--seed", "7"],
                       capsys)
    elapsed = time.perf_counter() - t
    mean = [float(r["mean_ratio"]) for r in rows]
    var = [float(r["var_ratio"]) for r in rows]
    rel = [m / (2 * math.log(N) / N) for m, N in zip(mean, Ns)]
    tau = [float(r["mean_tau"]) / math.log2(N) ** 1.5 for r, N in zip(rows, Ns)]
    ok = (all(0.6 <= x <= 1.1 for x in rel) and all(a > b for a, b in zip(mean, mean[1:]))
          and var[-1] <= var[0] / 10 and max(tau) / min(tau) <= 2)
    _report(6, ok, f"mean/pred={[round(x, 3) for x in rel]} var(2^14)/var(2^6)={var[-1] / var[0]:.1e} "
                   f"tau/n^1.5 band={max(tau) / min(tau):.3f}", elapsed, 180.0)


def test_acceptance_7_imagery():
    t = time.perf_counter()
    const = GrayImage.from_array(np.full((64, 64), 123), maxval=255)
    const_ok = all(np.all(sector_density(const, k).rho == 1.0) for k in (1, 3, 8, 64))
    planted_ok = True
    for n_s in (4, 7, 16):
        pix = np.zeros((96, 96), dtype=np.int64)
        g = sector_density(GrayImage.from_array(pix, maxval=255), n_s)
        for i, r0 in enumerate(np.concatenate([[0], np.cumsum(g.row_sizes)[:-1]])):
            for j, c0 in enumerate(np.concatenate([[0], np.cumsum(g.col_sizes)[:-1]])):
                pix[r0 + (i % int(g.row_sizes[i])), c0] = 255
        g = sector_density(GrayImage.from_array(pix, maxval=255), n_s)
        P = np.outer(g.row_sizes, g.col_sizes).astype(float)
        planted_ok &= bool(np.all(g.rho == 1.0 / P))
    rng = np.random.default_rng(2024)
    noise = np.abs(rng.standard_normal((1024, 1024)))
    pix = np.rint(noise / noise.max() * 65535).astype(np.int64)
    img = load_pgm(to_pgm(GrayImage.from_array(pix, maxval=65535)))
    grids = [1, 2, 4, 8, 16, 32, 64, 128, 256]
    rows, _ = density_scaling_curve(img, grids)
    means = [r["mean_rho"] for r in rows]
    mono = all(a < b for a, b in zip(means, means[1:]))
    elapsed = time.perf_counter() - t
    _report(7, const_ok and planted_ok and mono,
            f"constant={const_ok} planted=1/P={planted_ok} noise mean_rho {means[0]:.4f}->{means[-1]:.4f} "
            f"increasing={mono}", elapsed, 30.0)


def test_acceptance_8_qft():
    t = time.perf_counter()
    worst, count = 0.0, 0
    for n in range(2, 9):
        N = 1 << n
        rng = np.random.default_rng(800 + n)
        for k in range(20):
            for complex_ in (False, True):
                v = rng.standard_normal(N) + (1j * rng.standard_normal(N) if complex_ else 0)
                rep = run_qft_check(v, 2, 8)
                worst = max(worst, 1 - rep.fidelity_vs_dft)
                count += 1
    mat_err = 0.0
    for n in range(1, 9):
        N = 1 << n
        j = np.arange(N)
        dft = np.exp(2j * np.pi * np.outer(j, j) / N) / math.sqrt(N)
        mat_err = max(mat_err, float(np.max(np.abs(qft_matrix(n) - dft))))
    elapsed = time.perf_counter() - t
    _report(8, worst <= 1e-9 and mat_err < 1e-10,
            f"{count} vectors: max(1-F)={worst:.1e}; max|QFT-DFT| n<=8 = {mat_err:.1e}", elapsed, 60.0)


def test_acceptance_9_determinism(tmp_path):
    vec = tmp_path / "v.csv"
    vec.write_text("0.3\n-0.1\n0.8\n0.2\n0.05\n-0.6\n0.0\n0.4\n")
    pgm = tmp_path / "i.pgm"
    pgm.write_bytes(to_pgm(GrayImage.from_array(np.arange(64).reshape(8, 8) % 7, maxval=6)))
    runs = [
        ["preprocess", "-i", str(vec)],
        ["preprocess", "-i", str(vec), "--complex"],
        ["encode", "-i", str(vec), "-M", "2", "-L", "4", "--dense-oracle"],
        ["amplify", "-i", str(vec), "-M", "3"],
        ["qft-check", "-i", str(vec), "-M", "2"],
        ["resources", "--n", "5"],
        ["resources", "--n", "5", "--format", "json", "--rho", "0.1"],
        ["sphere-stats", "--N", "16,64", "--count", "2000", "--seed", "42"],
        ["sphere-stats", "--N", "16", "--count", "500", "--seed", "42", "--format", "json"],
        ["image-density", "-i", str(pgm), "--grid", "2"],
        ["image-density", "-i", str(pgm), "--grid", "1,2,4", "--format", "json"],
    ]
    t = time.perf_counter()
    same = 0
    for argv in runs:
        outs = [subprocess.run([sys.executable, "-m", "qampenc.cli", *argv], capture_output=True,
                               check=True, env=dict(os.environ)).stdout for _ in range(2)]
        same += outs[0] == outs[1] and len(outs[0]) > 0
    elapsed = time.perf_counter() - t
    _report(9, same == len(runs), f"{same}/{len(runs)} CLI runs byte-identical", elapsed, 60.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
