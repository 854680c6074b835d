"""Monte Carlo statistics of ``max_i x_i^2 / sum_i x_i^2`` for Gaussian vectors.

Normalized standard-normal vectors are uniform on the sphere, so the ratio
is the inverse of ``N * rho`` for a random unit vector.

Random numbers come from numpy's Philox counter-based generator.  Sample
block ``b`` (``BLOCK`` vectors) uses key ``(seed, N)`` and a counter whose
third word is ``b``, so any block can be regenerated on its own and the
result does not depend on how blocks are scheduled.  Gaussians are
produced by inverse CDF from 53-bit uniforms on the open interval (0, 1).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import ndtri

from . import kernels
from .errors import ValidationError

BLOCK = 256
CSV_COLUMNS = ["N", "count", "seed", "mean_ratio", "var_ratio", "predicted_mean", "mean_tau", "n_pow_1_5"]
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SampleStats:
    N: int
    count: int
    mean_ratio: float
    var_ratio: float
    mean_tau: float
    seed: int
    mean_rho: float

    def to_dict(self):
        return asdict(self)


def block_generator(seed: int, N: int, block: int) -> np.random.Philox:
    return np.random.Philox(key=[int(seed) & _MASK64, int(N)], counter=[0, 0, int(block), 0])


def gaussian_block(seed: int, N: int, block: int, rows: int) -> np.ndarray:
    """``rows`` standard-normal N-vectors of the given block."""
    raw = block_generator(seed, N, block).random_raw(rows * N)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return ndtri(u).reshape(rows, N)


def sample_ratios(N: int, count: int, seed: int) -> np.ndarray:
    """Per-sample ratios ``max x_i^2 / sum x_i^2`` in sample order."""
    out = np.empty(count)
    for b in range(-(-count // BLOCK)):
        lo = b * BLOCK
        rows = min(BLOCK, count - lo)
        out[lo:lo + rows] = kernels.max_share(gaussian_block(seed, N, b, rows))
    return out


def sample_ratio_stats(N: int, count: int, seed: int) -> SampleStats:
    if N < 2 or count < 2:
        raise ValidationError("need N >= 2 and count >= 2")
    r = sample_ratios(N, count, seed)
    n = math.log2(N)
    return SampleStats(
        N=int(N), count=int(count), mean_ratio=float(np.mean(r)), var_ratio=float(np.var(r, ddof=1)),
        mean_tau=float(np.mean(n * np.sqrt(N * r))), seed=int(seed), mean_rho=float(np.mean(1.0 / (N * r))),
    )


def predicted_mean(N: float) -> float:
    """Leading-order mean of the ratio, 2 ln N / N."""
    if N < 2:
        raise ValidationError("N must be > 1")
    return 2.0 * math.log(N) / N


def predicted_var(N: float) -> float:
    """Order-of-magnitude reference ln N / N^2 (the constant is not known)."""
    if N < 2:
        raise ValidationError("N must be > 1")
    return math.log(N) / N ** 2


def scaling_report(N_list, count: int, seed: int):
    """Per-N statistics next to the asymptotic predictions, plus trend checks."""
    Ns = [int(x) for x in N_list]
    if any(N < 2 or N & (N - 1) for N in Ns) or Ns != sorted(Ns):
        raise ValidationError("N_list must be ascending powers of two")
    rows = []
    for N in Ns:
        st = sample_ratio_stats(N, count, seed)
        n = math.log2(N)
        pm = predicted_mean(N)
        rows.append({
            "N": N, "count": count, "seed": seed, "mean_ratio": st.mean_ratio, "var_ratio": st.var_ratio,
            "predicted_mean": pm, "mean_tau": st.mean_tau, "n_pow_1_5": n ** 1.5,
            "ratio_vs_predicted": st.mean_ratio / pm, "tau_vs_n_pow_1_5": st.mean_tau / n ** 1.5,
        })
    taus = [r["tau_vs_n_pow_1_5"] for r in rows]
    trends = {
        "mean_ratio_decreasing": all(a["mean_ratio"] > b["mean_ratio"] for a, b in zip(rows, rows[1:])),
        "mean_tau_increasing": all(a["mean_tau"] < b["mean_tau"] for a, b in zip(rows, rows[1:])),
        "tau_band": max(taus) / min(taus),
    }
    return rows, trends


def to_csv(rows, header: str = "") -> str:
    buf = io.StringIO()
    buf.write(header)
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
