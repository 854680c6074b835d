"""Qubit, gate and depth accounting on top of :mod:`qampenc.depthmodel`."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .amplify import schedule
from .encoder import EncodingPlan
from .depthmodel import choose_chunks, depth_for_chunks, s0_depth
from .errors import BadDensity, ValidationError

CSV_COLUMNS = ["N", "M", "L", "rho", "qubits_declared", "qubits_work", "depth", "m", "total_depth", "tau_model"]


@dataclass(frozen=True)
class ResourceEstimate:
    N: int
    M: int
    L: int
    rho: float
    qubits_declared: int
    qubits_work: int
    encoder_depth: int
    aa_iterations: int
    total_depth: int
    tau_model: float
    chunks: int
    index_registers: int
    gate_counts: dict = field(default_factory=dict)

    def row(self):
        return {"N": self.N, "M": self.M, "L": self.L, "rho": self.rho,
                "qubits_declared": self.qubits_declared, "qubits_work": self.qubits_work,
                "depth": self.encoder_depth, "m": self.aa_iterations,
                "total_depth": self.total_depth, "tau_model": self.tau_model}

    def to_dict(self):
        return asdict(self)


def encoder_depth_model(n, M, L, entries=None, ladder=None, extra=0):
    """Model depth of the encoder with M index registers available."""
    entries = (1 << n) if entries is None else entries
    ladder = L if ladder is None else ladder
    return depth_for_chunks(n, entries, choose_chunks(n, M, entries, ladder), ladder, extra)


def _finish(n, M, L, W, rho, enc_depth, work, R, counts):
    if not 0.0 < rho <= 1.0:
        raise BadDensity(f"rho must lie in (0, 1], got {rho}")
    m = schedule(rho).m
    total = (2 * m + 1) * enc_depth + m * (1 + s0_depth(n))
    return ResourceEstimate(
        N=1 << n, M=M, L=L, rho=float(rho), qubits_declared=n * (1 + M) + M + W + 1,
        qubits_work=work, encoder_depth=enc_depth, aa_iterations=m, total_depth=total,
        tau_model=n / math.sqrt(rho), chunks=R, index_registers=M, gate_counts=counts)


def _work(n, M, W, used):
    return (n - 1) * M + (max(1, -(-used // 2)) - 1) * W


def estimate(plan: EncodingPlan, rho: float) -> ResourceEstimate:
    """Model-based estimate for a built plan, with its actual gate counts."""
    entries = sum(len(ch) for ch in plan.chunks)
    extra = int(plan.mode_row.sum()) if plan.mode_row is not None else 0
    ladder = plan.W if plan.kind != "real" else plan.L
    depth = depth_for_chunks(plan.n, entries, plan.R, ladder, extra)
    return _finish(plan.n, plan.M, plan.L, plan.W, rho, depth, plan.qubits_work, plan.R,
                   plan.circuit.gate_counts())


def estimate_params(n: int, M: int, L: int, rho: float, complex_path: bool = False) -> ResourceEstimate:
    """Same model as :func:`estimate` from (n, M, L) alone; no gate counts."""
    N = 1 << n
    if not 1 <= M <= N:
        raise ValidationError(f"M must satisfy 1 <= M <= {N}")
    W = 2 * L if complex_path else L
    R = choose_chunks(n, M, N, W)
    depth = depth_for_chunks(n, N, R, W)
    return _finish(n, M, L, W, rho, depth, _work(n, M, W, -(-N // R)), R, {})


def sparse_estimate(S: int, n: int, M: int, L: int, rho: float) -> ResourceEstimate:
    """Estimate for a mode-shifted plan with S entries differing from the mode.

    Uses ``min(M, S)`` index registers and about ``S / min(M, S)`` chunks;
    the CTRL row grows to L + 1 bits for the mode correction, and the mode
    itself costs one unconditional ladder (counted at full width).
    ``S == N`` means nothing is compressed and returns :func:`estimate_params`.
    """
    N = 1 << n
    if not 0 <= S <= N:
        raise ValidationError(f"S must lie in [0, {N}]")
    if S == N:
        return estimate_params(n, M, L, rho)
    W = L + 1
    M_eff = max(1, min(M, S))
    R = choose_chunks(n, M_eff, S, W)
    depth = depth_for_chunks(n, S, R, W, W)
    used = -(-S // R) if R else 0
    return _finish(n, M_eff, L, W, rho, depth, _work(n, M_eff, W, used), R, {})


def measured_depth(plan: EncodingPlan) -> int:
    """Greedy disjoint-qubit layering of the plan's gate list."""
    return plan.circuit.depth()


def scaling_table(n_list, M_list=None, L=8):
    """Rows (n, N, M, encoder_depth, ratio) with ratio = depth / ((N/M) log2(M+1)).

    ``M_list=None`` means every M in 1..N; values above N are skipped.
    """
    rows = []
    for n in n_list:
        N = 1 << n
        Ms = range(1, N + 1) if M_list is None else [m for m in M_list if 1 <= m <= N]
        for M in Ms:
            d = encoder_depth_model(n, M, L)
            rows.append({"n": n, "N": N, "M": M, "encoder_depth": d,
                         "ratio": d / ((N / M) * math.log2(M + 1))})
    return rows


def to_csv(estimates, header: Optional[str] = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(header)
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for e in estimates:
        r = e.row()
        r["rho"] = repr(float(r["rho"]))
        r["tau_model"] = repr(float(r["tau_model"]))
        w.writerow(r)
    return buf.getvalue()
