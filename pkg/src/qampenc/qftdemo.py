"""QFT applied to the encoded state, checked against a classical DFT.

Convention: ``F_k = N**-0.5 * sum_j exp(+2 pi i j k / N) w_j`` with qubit 0 the
least-significant bit, the same sign as the R_s phase gates of the complex
encoder.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .amplify import run_amplified_encoding
from .encoder import build_plan
from .errors import ValidationError
from .kernels import K_H, K_PHASE, K_SWAP
from .preprocess import preprocess
from .resources import estimate
from .simcore import Circuit, DenseState, fidelity


def build_qft(n: int, cutoff: Optional[int] = None) -> Circuit:
    """QFT on qubits ``0..n-1``.

    Controlled phases ``2 pi / 2**s`` with ``s > cutoff`` are dropped (the
    approximate QFT); ``cutoff=None`` keeps all of them.
    """
    if n < 1:
        raise ValidationError("QFT needs n >= 1")
    c = Circuit(n)
    for j in range(n - 1, -1, -1):
        c._raw(K_H, [j])
        for k in range(j - 1, -1, -1):
            s = j - k + 1
            if cutoff is None or s <= cutoff:
                c._raw(K_PHASE, [j], [k], 2 * math.pi / 2 ** s)
    for i in range(n // 2):
        c._raw(K_SWAP, [i, n - 1 - i])
    return c


def classical_dft(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.complex128)
    N = w.shape[0]
    if N == 0 or N & (N - 1):
        raise ValidationError("DFT length must be a power of two")
    return np.fft.ifft(w) * math.sqrt(N)


def qft_matrix(n: int, cutoff: Optional[int] = None) -> np.ndarray:
    """Unitary of :func:`build_qft`, column by column from basis states."""
    c = build_qft(n, cutoff)
    N = 1 << n
    U = np.empty((N, N), dtype=np.complex128)
    for x in range(N):
        U[:, x] = DenseState.basis(n, x).run(c).amplitudes
    return U


@dataclass(frozen=True)
class QftReport:
    n: int
    fidelity_vs_dft: float
    rho: float
    m: int
    encoder_depth: int
    qft_depth: int

    def to_json(self):
        return json.dumps(asdict(self), indent=1)


def run_qft_check(values, M: int, L: int, cutoff: Optional[int] = None) -> QftReport:
    """Encode ``values``, amplify, post-select, apply the QFT, compare with the DFT of the target."""
    pre = preprocess(values, L)
    if pre.split is not None:
        plan = build_plan(pre.split.B_R, M, pre.split.B_phi)
    else:
        plan = build_plan(pre.B, M)
    res = run_amplified_encoding(plan)
    qft = build_qft(plan.n, cutoff)
    out = DenseState(res.sys_state).run(qft).amplitudes
    target = plan.target / np.linalg.norm(plan.target)
    return QftReport(plan.n, fidelity(out, classical_dft(target)), res.rho, res.m,
                     estimate(plan, res.rho).encoder_depth, qft.depth())
