"""Classical pre-processing: angles, the bit matrix B, and data density.

Angles are measured in quarter turns: ``theta = (2/pi) * arcsin(v / max|v|)``
lies in [-1, 1].  A signed row of B holds a sign bit followed by ``L - 1``
fraction bits, so it represents ``theta_hat = (-1)**B[0] * sum_j B[j] 2**-j``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PrecisionTooLow, UseComplexSplit, ValidationError, ZeroVector

# guards ceil() against theta values that sit a rounding error above a grid point
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class InputVector:
    """Unit-norm vector of length ``N = 2**n`` (zero padded if needed)."""

    values: np.ndarray
    is_real: bool
    padding: int = 0

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def n(self):
        return self.N.bit_length() - 1

    @property
    def original_length(self):
        return self.N - self.padding


@dataclass(frozen=True)
class BinaryAngleMatrix:
    """N x L bit matrix.

    ``signed=True`` rows are (sign, 2^-1, ..., 2^-(L-1)); ``signed=False`` rows
    are L plain fraction bits with weights 2^-1 ... 2^-L (used for phases).
    """

    bits: np.ndarray
    signed: bool = True

    @property
    def L(self):
        return self.bits.shape[1]

    @property
    def N(self):
        return self.bits.shape[0]

    def magnitudes(self):
        """Integer numerators of the fraction part."""
        frac = self.bits[:, 1:] if self.signed else self.bits
        w = 1 << np.arange(frac.shape[1] - 1, -1, -1, dtype=np.int64)
        return frac.astype(np.int64) @ w

    def numerators(self):
        """Signed numerators over ``2**(L-1)`` (or ``2**L`` when unsigned)."""
        m = self.magnitudes()
        return np.where(self.bits[:, 0] == 1, -m, m) if self.signed else m

    @property
    def denominator(self):
        return 1 << (self.L - 1 if self.signed else self.L)

    def to_rows(self):
        return [[int(b) for b in row] for row in self.bits]


def normalize(values) -> InputVector:
    """Scale to unit 2-norm and zero-pad to the next power of two."""
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("expected a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("vector has non-finite entries")
    is_real = not np.iscomplexobj(arr) or bool(np.all(arr.imag == 0))
    arr = arr.real.astype(np.float64) if is_real else arr.astype(np.complex128)
    nrm = np.linalg.norm(arr)
    if nrm == 0:
        raise ZeroVector()
    N = 1 << max(0, int(arr.size - 1).bit_length())
    out = np.zeros(N, dtype=arr.dtype)
    out[:arr.size] = arr / nrm
    return InputVector(out, is_real, N - arr.size)


def _as_values(v):
    return v.values if isinstance(v, InputVector) else np.asarray(v)


def compute_theta(v) -> np.ndarray:
    vals = _as_values(v)
    if np.iscomplexobj(vals) and np.any(vals.imag != 0):
        raise UseComplexSplit("complex input: use split_complex")
    vals = np.real(vals).astype(np.float64)
    m = np.max(np.abs(vals))
    if m == 0:
        raise ZeroVector()
    theta = (2 / np.pi) * np.arcsin(np.clip(vals / m, -1.0, 1.0))
    top = np.abs(vals) == m
    theta[top] = np.sign(vals[top])
    return theta


def quantize_theta(theta, L: int, signed: bool = True) -> BinaryAngleMatrix:
    """Quantize angles onto the ``2**-(L-1)`` grid.

    Each theta is rounded up (toward +inf) to the grid and saturated at
    ``+-(1 - 2**-(L-1))``; the sign bit is set iff the rounded value is
    negative.  With ``signed=False`` the input must lie in [0, 1) modulo 1
    and is rounded to the nearest multiple of ``2**-L`` (wrapping at 1).
    """
    if L < 2:
        raise PrecisionTooLow(f"L must be >= 2, got {L}")
    theta = np.asarray(theta, dtype=np.float64)
    if signed:
        top = (1 << (L - 1)) - 1
        q = np.ceil(theta * (1 << (L - 1)) - _GRID_EPS).astype(np.int64)
        q = np.clip(q, -top, top)
        sign = (q < 0).astype(np.uint8)
        mag = np.abs(q)
        nfrac = L - 1
    else:
        mag = np.rint(np.mod(theta, 1.0) * (1 << L)).astype(np.int64) % (1 << L)
        sign = None
        nfrac = L
    shifts = np.arange(nfrac - 1, -1, -1, dtype=np.int64)
    frac = ((mag[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    bits = np.concatenate([sign[:, None], frac], axis=1) if signed else frac
    return BinaryAngleMatrix(bits, signed)


def dequantize(B: BinaryAngleMatrix) -> np.ndarray:
    return B.numerators() / B.denominator


def reconstructed_amplitudes(B: BinaryAngleMatrix) -> np.ndarray:
    """c_k = sign_k * sin(pi/2 * |theta_hat_k|)."""
    th = dequantize(B)
    return np.sign(th) * np.sin(0.5 * np.pi * np.abs(th))


def density(amplitudes) -> float:
    """rho = mean((|a_i| / max|a|)**2)."""
    a = np.abs(np.asarray(amplitudes))
    m = a.max() if a.size else 0.0
    if m == 0:
        raise ZeroVector()
    r = a / m
    return float(np.mean(r * r))


@dataclass(frozen=True)
class ComplexSplit:
    theta_R: np.ndarray
    phase_fractions: np.ndarray
    B_R: BinaryAngleMatrix
    B_phi: BinaryAngleMatrix
    global_phase: float = 0.0


def split_complex(v, L: int) -> ComplexSplit:
    """Moduli and phases, with the global phase chosen so entry 0 has phase 0.

    When ``v[0] == 0`` the first nonzero entry fixes the global phase instead
    and entry 0 keeps fraction 0 because its phase is arbitrary.
    """
    vals = _as_values(v).astype(np.complex128)
    R = np.abs(vals)
    nz = np.flatnonzero(R)
    if nz.size == 0:
        raise ZeroVector()
    g = float(np.angle(vals[nz[0]]))
    rot = vals * np.exp(-1j * g)
    frac = np.mod(np.angle(rot) / (2 * np.pi), 1.0)
    frac[R == 0] = 0.0
    frac[frac >= 1.0] = 0.0
    frac[nz[0]] = 0.0
    theta_R = compute_theta(R)
    return ComplexSplit(theta_R, frac, quantize_theta(theta_R, L), quantize_theta(frac, L, signed=False), g)


def compress_mode_shift(theta, L: int):
    """Mode of the quantized angles and the residual after subtracting it.

    Returns ``(mode, shifted, S)`` where ``shifted = theta_hat - mode`` and S
    counts its nonzero entries.  Ties between equally frequent values go to
    the smallest value.
    """
    th = dequantize(quantize_theta(theta, L))
    vals, counts = np.unique(th, return_counts=True)
    mode = float(vals[np.argmax(counts)])
    shifted = th - mode
    return mode, shifted, int(np.count_nonzero(shifted))


@dataclass(frozen=True)
class PreprocessResult:
    B: BinaryAngleMatrix
    w: np.ndarray
    rho_exact: float
    rho_circuit: float
    max_abs: float
    S: int
    theta: np.ndarray
    mode: float
    vector: InputVector
    split: Optional[ComplexSplit] = field(default=None)

    def to_dict(self):
        d = {
            "N": int(self.vector.N), "n": int(self.vector.n), "L": int(self.B.L),
            "padding": int(self.vector.padding),
            "theta": [float(t) for t in self.theta],
            "B": self.B.to_rows(),
            "w": ([[float(x.real), float(x.imag)] for x in self.w] if np.iscomplexobj(self.w)
                  else [float(x) for x in self.w]),
            "rho_exact": float(self.rho_exact), "rho_circuit": float(self.rho_circuit),
            "max_abs": float(self.max_abs), "S": int(self.S), "mode": float(self.mode),
        }
        if self.split is not None:
            d["phase_fractions"] = [float(x) for x in self.split.phase_fractions]
            d["B_phi"] = self.split.B_phi.to_rows()
            d["global_phase"] = float(self.split.global_phase)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)


def preprocess(values, L: int, complex_split: bool = False) -> PreprocessResult:
    """Run the full classical pipeline on raw (unnormalized) values.

    ``rho_circuit`` is the FLAG=1 probability of the built circuit, i.e.
    ``mean(w**2)`` for the reconstructed amplitudes ``w``; it differs from
    ``density(w)`` when the largest ``|w|`` is below 1 because of saturation.
    """
    v = normalize(values)
    split = None
    if complex_split or not v.is_real:
        split = split_complex(v, L)
        theta, B = split.theta_R, split.B_R
        w = reconstructed_amplitudes(B) * np.exp(2j * np.pi * dequantize(split.B_phi))
    else:
        theta = compute_theta(v)
        B = quantize_theta(theta, L)
        w = reconstructed_amplitudes(B)
    mode, _, S = compress_mode_shift(theta, L)
    aw = np.abs(w)
    return PreprocessResult(
        B=B, w=w, rho_exact=density(v.values), rho_circuit=float(np.mean(aw * aw)),
        max_abs=float(np.max(np.abs(v.values))), S=S, theta=theta, mode=mode, vector=v, split=split,
    )
