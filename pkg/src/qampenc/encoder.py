"""Encoder circuit construction and simulation.

Register layout of a plan (qubit 0 is the least-significant index bit)::

    SYS[n] | I_1[n] .. I_M[n] | C_1 .. C_M | CTRL[W] | FLAG | AND work | CTRL copies

``W`` is ``L`` on the real path, ``2L`` on the complex path (modulus row then
phase row) and ``L + 1`` for mode-shifted plans.  The first
``n(1+M) + M + W + 1`` qubits are the declared registers; the rest is the
work pool, which is clean before and after every chunk.

The branch simulator keeps one record per SYS basis value ``k``: every
non-FLAG qubit is a classical bit (stored bit-sliced, 64 branches per word)
and FLAG is a pair of complex amplitudes.  This is exact because after the
initial Hadamard layer no gate puts a non-FLAG qubit into superposition.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import BadParallelism, NotBranchable, TooLarge, UncomputeLeak, ValidationError
from .depthmodel import choose_chunks
from .kernels import K_H, K_PHASE, K_RY, K_X
from .preprocess import (BinaryAngleMatrix, ComplexSplit, compress_mode_shift, dequantize,
                         quantize_theta, reconstructed_amplitudes)
from .simcore import MAX_DENSE_QUBITS, Circuit, DenseState

CHUNK_STEPS = ("load", "and", "mtc", "rot", "mtc_dag", "and_dag", "load_dag")
# checkpoint taken after each named segment
_CHECKPOINT_AFTER = {"initial.x": "psi1", "initial.xor": "psi2", "load": "psi3", "and": "psi4",
                     "mtc": "psi5", "rot": "psi6", "mtc_dag": "psi7", "load_dag": "psi8",
                     "final.x": "psi9"}


@dataclass
class EncodingPlan:
    n: int
    M: int
    L: int
    W: int
    kind: str                     # "real", "complex" or "mode_shift"
    rows: np.ndarray              # bit row loaded into CTRL for every entry (N x W)
    chunks: list                  # entry indices handled by each chunk
    layout: dict                  # register name -> list of qubits
    circuit: Circuit
    target: np.ndarray            # expected good-branch amplitudes c_k (unnormalized)
    mode_row: Optional[np.ndarray] = None

    @property
    def N(self):
        return 1 << self.n

    @property
    def R(self):
        return len(self.chunks)

    @property
    def M_used(self):
        """Index registers actually filled by the widest chunk."""
        return max((len(ch) for ch in self.chunks), default=0)

    @property
    def flag(self):
        return self.layout["FLAG"][0]

    @property
    def num_qubits(self):
        return self.circuit.num_qubits

    @property
    def qubits_declared(self):
        return self.n * (1 + self.M) + self.M + self.W + 1

    @property
    def qubits_work(self):
        return self.num_qubits - self.qubits_declared

    def segments(self):
        return self.circuit.segments

    def dump(self):
        return self.circuit.dump()


@dataclass
class ReducedOutput:
    """SYS x FLAG state after the encoder with all ancillas back at |0>."""

    rho: float
    psi_G: np.ndarray
    psi_B: np.ndarray
    good: np.ndarray = field(repr=False)   # unnormalized FLAG=1 amplitudes
    bad: np.ndarray = field(repr=False)    # unnormalized FLAG=0 amplitudes

    @classmethod
    def from_amplitudes(cls, bad, good):
        bad = np.asarray(bad, dtype=np.complex128)
        good = np.asarray(good, dtype=np.complex128)
        rho = float(np.vdot(good, good).real)
        nb = math.sqrt(max(0.0, float(np.vdot(bad, bad).real)))
        ng = math.sqrt(rho)
        return cls(rho, good / ng if ng > 0 else good.copy(), bad / nb if nb > 0 else bad.copy(), good, bad)

    @property
    def state(self):
        """Joint vector on SYS (low bits) and FLAG (top bit)."""
        return np.concatenate([self.bad, self.good])

    def to_dict(self):
        pairs = lambda z: [[float(x.real), float(x.imag)] for x in z]  # noqa: E731
        return {"rho": self.rho, "psi_G": pairs(self.psi_G), "psi_B": pairs(self.psi_B)}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d):
        arr = lambda p: np.asarray(p, dtype=float).reshape(-1, 2) @ np.array([1, 1j])  # noqa: E731
        g, b = arr(d["psi_G"]), arr(d["psi_B"])
        rho = float(d["rho"])
        return cls(rho, g, b, g * math.sqrt(rho), b * math.sqrt(max(0.0, 1 - rho)))


@dataclass
class Checkpoint:
    name: str
    chunk: Optional[int]
    registers: dict     # register name -> int array over branches k
    a0: np.ndarray
    a1: np.ndarray


# -- plan construction -------------------------------------------------------

def _layout(n, M, W, n_copies):
    q = 0
    lay = {"SYS": list(range(n))}
    q = n
    for j in range(M):
        lay[f"I{j}"] = list(range(q, q + n))
        q += n
    for j in range(M):
        lay[f"C{j}"] = [q]
        q += 1
    lay["CTRL"] = list(range(q, q + W))
    q += W
    lay["FLAG"] = [q]
    q += 1
    for j in range(M):
        lay[f"W{j}"] = list(range(q, q + n - 1))
        q += n - 1
    for t in range(1, n_copies):
        lay[f"CTRL{t}"] = list(range(q, q + W))
        q += W
    return lay, q


def _and_tree(c, idx_qubits, work, out):
    """Toffoli tree AND of ``idx_qubits`` into ``out`` (compute, copy, uncompute)."""
    if len(idx_qubits) == 1:
        c._raw(K_X, [out], [idx_qubits[0]])
        return
    gates = []
    pool = iter(work)
    level = list(idx_qubits)
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            w = next(pool)
            gates.append((w, level[i], level[i + 1]))
            nxt.append(w)
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    for w, a, b in gates:
        c._raw(K_X, [w], [a, b])
    c._raw(K_X, [out], [level[0]])
    for w, a, b in reversed(gates):
        c._raw(K_X, [w], [a, b])


def _ladder_angles(kind, L, W):
    """(bit position in CTRL, gate kind, angle) for the rotation ladder."""
    if kind == "mode_shift":
        return [(l, K_RY, math.pi * 2.0 ** (1 - l)) for l in range(W)]
    lad = [(0, K_RY, 2 * math.pi)] + [(l, K_RY, math.pi * 2.0 ** -l) for l in range(1, L)]
    if kind == "complex":
        lad += [(L + j, K_PHASE, 2 * math.pi * 2.0 ** -(j + 1)) for j in range(L)]
    return lad


def _emit_segment(c, name, fn):
    c.begin(name)
    fn()
    c.end()


def _mirror(c, start, stop):
    """Append gates ``start:stop`` of ``c`` in reverse order, angles negated."""
    c._append_mirror(start, stop)


def _build(n, M, L, W, kind, rows, entries, target, mode_row=None, mode_angles=None):
    if M < 1:
        raise BadParallelism(f"M must be >= 1, got {M}")
    R = choose_chunks(n, M, len(entries), len(_ladder_angles(kind, L, W)))
    chunks = [np.asarray(ch, dtype=np.int64) for ch in np.array_split(np.asarray(entries, dtype=np.int64), R)] if R else []
    # registers beyond the widest chunk are never read, so they skip the fan-out
    widest = max((len(ch) for ch in chunks), default=0)
    n_copies = max(1, -(-widest // 2))
    lay, nq = _layout(n, M, W, n_copies)
    c = Circuit(nq)
    sys_q = lay["SYS"]
    idx = [lay[f"I{j}"] for j in range(M)]
    cbit = [lay[f"C{j}"][0] for j in range(M)]
    work = [lay[f"W{j}"] for j in range(M)]
    copies = [lay["CTRL"]] + [lay[f"CTRL{t}"] for t in range(1, n_copies)]
    flag = lay["FLAG"][0]
    ladder = _ladder_angles(kind, L, W)

    def initial_h():
        for q in sys_q:
            c._raw(K_H, [q])

    def initial_x():
        for reg in idx:
            c._raw(K_X, list(reg))

    def initial_xor():
        # doubling tree: every holder copies itself into one new register per round
        # each holder is (qubits, holds_plain_k); a target starts at 1^n so
        # copying k gives 1^n xor k and copying 1^n xor k gives plain k
        holders = [(sys_q, True)]
        plain = []
        todo = list(range(widest))
        while todo:
            new = []
            for h, h_plain in holders:
                if not todo:
                    break
                j = todo.pop(0)
                for b in range(n):
                    c._raw(K_X, [idx[j][b]], [h[b]])
                new.append((idx[j], not h_plain))
                if h_plain is False:
                    plain.append(j)
            holders = holders + new
        for j in plain:
            c._raw(K_X, list(idx[j]))

    _emit_segment(c, "initial.h", initial_h)
    _emit_segment(c, "initial.x", initial_x)
    _emit_segment(c, "initial.xor", initial_xor)

    if mode_row is not None:
        def mode_ladder():
            for l, k, a in mode_angles:
                if mode_row[l]:
                    c._raw(k, [flag], [], a)
        _emit_segment(c, "mode.ladder", mode_ladder)

    for i, ch in enumerate(chunks):
        used = len(ch)
        pre = f"chunk{i}."

        def load():
            for j, e in enumerate(ch):
                for b in range(n):
                    c._raw(K_X, [idx[j][b]], [], 0.0, (int(e) >> b) & 1)

        def and_():
            for j in range(used):
                _and_tree(c, idx[j], work[j], cbit[j])

        def mtc():
            for j, e in enumerate(ch):
                tgt = [copies[j // 2][l] for l in range(W) if rows[e, l]]
                if tgt:
                    c._raw(K_X, tgt, [cbit[j]])
            live = -(-used // 2)
            stride = 1
            while stride < live:
                for a in range(0, live - stride, 2 * stride):
                    for l in range(W):
                        c._raw(K_X, [copies[a][l]], [copies[a + stride][l]])
                stride *= 2

        def rot():
            for l, k, a in ladder:
                c._raw(k, [flag], [copies[0][l]], a)

        marks = {}
        for step, fn in (("load", load), ("and", and_), ("mtc", mtc), ("rot", rot)):
            start = len(c)
            _emit_segment(c, pre + step, fn)
            marks[step] = (start, len(c))
        for step in ("mtc", "and", "load"):
            _emit_segment(c, pre + step + "_dag", lambda s=step: _mirror(c, *marks[s]))

    xs = c.segment("initial.xor")
    xx = c.segment("initial.x")
    _emit_segment(c, "final.xor_dag", lambda: _mirror(c, xs[1], xs[2]))
    _emit_segment(c, "final.x", lambda: _mirror(c, xx[1], xx[2]))
    return EncodingPlan(n, M, L, W, kind, rows, chunks, lay, c, np.asarray(target), mode_row)


def _check_M(M, N):
    if not isinstance(M, (int, np.integer)) or M < 1 or M > N:
        raise BadParallelism(f"M must satisfy 1 <= M <= N={N}, got {M}")


def build_plan(B: BinaryAngleMatrix, M: int, phases: Optional[BinaryAngleMatrix] = None) -> EncodingPlan:
    """Encoder circuit for bit matrix ``B`` with ``M`` parallel index registers.

    With ``phases`` (an unsigned matrix of phase fractions) the CTRL row is the
    concatenation of the B row and the phase row and a controlled-PHASE
    ladder follows the RY ladder in each chunk.
    """
    N, L = B.N, B.L
    if N & (N - 1) or N < 2:
        raise ValidationError("B must have a power-of-two number of rows >= 2")
    _check_M(M, N)
    n = N.bit_length() - 1
    target = reconstructed_amplitudes(B).astype(np.complex128)
    if phases is None:
        rows, kind, W = B.bits, "real", L
    else:
        if phases.N != N or phases.L != L or phases.signed:
            raise ValidationError("phase matrix must be unsigned with the same shape as B")
        rows, kind, W = np.concatenate([B.bits, phases.bits], axis=1), "complex", 2 * L
        target = target * np.exp(2j * np.pi * dequantize(phases))
    return _build(n, int(M), L, W, kind, rows, np.arange(N), target)


def _effective(B):
    """Total RY angle of each row in units of pi, in [0, 4)."""
    return 2 * B.bits[:, 0].astype(np.int64) * B.denominator + B.magnitudes()


def mode_shift_plan(theta, M: int, L: int) -> EncodingPlan:
    """Plan with one unconditional ladder for the most frequent angle.

    Only the S entries whose quantized angle differs from the mode get an
    index register slot; they load the correction ``(e_k - e_mode) mod 4``
    (in units of pi) as an (L+1)-bit row with weights 2, 1, 1/2, ...
    """
    B = quantize_theta(theta, L)
    N = B.N
    _check_M(M, N)
    n = N.bit_length() - 1
    mode, shifted, S = compress_mode_shift(theta, L)
    e = _effective(B)                       # numerators over 2**(L-1)
    den = B.denominator
    e_mode = int(2 * den * (mode < 0) + round(abs(mode) * den))
    W = L + 1
    delta = (e - e_mode) % (4 * den)
    shifts = np.arange(W - 1, -1, -1, dtype=np.int64)
    rows = ((delta[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    ladder = _ladder_angles("mode_shift", L, W)
    mode_row = ((e_mode >> shifts) & 1).astype(np.uint8)
    entries = np.flatnonzero(shifted != 0)
    M_eff = max(1, min(M, S))
    return _build(n, M_eff, L, W, "mode_shift", rows, entries,
                  reconstructed_amplitudes(B).astype(np.complex128), mode_row, ladder)


# -- branch simulation -------------------------------------------------------

def _pack(bits_bool, nw):
    buf = np.zeros(nw * 64, dtype=bool)
    buf[:bits_bool.size] = bits_bool
    return np.packbits(buf, bitorder="little").view("<u8").astype(np.uint64)


def _unpack(words, N):
    return np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")[:N].astype(np.int64)


def _snapshot(plan, rows, a0, a1, name, chunk):
    N = plan.N
    regs = {}
    for reg, qs in plan.layout.items():
        if reg == "FLAG":
            continue
        val = np.zeros(N, dtype=np.int64)
        for b, q in enumerate(qs):
            val |= _unpack(rows[q], N) << b
        regs[reg] = val
    return Checkpoint(name, chunk, regs, a0.copy(), a1.copy())


def run_branch_sim(plan: EncodingPlan, checkpoints: bool = False):
    """Simulate ``plan`` exactly on N branches.

    Returns ``(ReducedOutput, checkpoint list or None)``.  Raises
    :class:`UncomputeLeak` if any ancilla bit is left set in any branch.
    """
    N = plan.N
    nw = -(-N // 64)
    c = plan.circuit
    rows = np.zeros((c.num_qubits, nw), dtype=np.uint64)
    k = np.arange(N, dtype=np.int64)
    valid = _pack(np.ones(N, dtype=bool), nw)
    a0 = np.ones(N, dtype=np.complex128)
    a1 = np.zeros(N, dtype=np.complex128)
    arrays = c.arrays()
    flag = plan.flag
    cps = [] if checkpoints else None
    if checkpoints:
        cps.append(_snapshot(plan, rows, a0, a1, "psi0", None))
    for name, start, stop in c.segments:
        if name == "initial.h":
            # the Hadamard layer is what creates the branches
            for b, q in enumerate(plan.layout["SYS"]):
                rows[q] = _pack(((k >> b) & 1).astype(bool), nw)
            continue
        bad = kernels.branch_run(rows, a0, a1, valid, flag, *arrays, start, stop)
        if bad >= 0:
            raise NotBranchable(f"gate {bad} ({c.gate(bad).format()}) is not branch-representable")
        if checkpoints:
            step = name.split(".", 1)[-1]
            tag = _CHECKPOINT_AFTER.get(name) or _CHECKPOINT_AFTER.get(step)
            if tag:
                chunk = int(name[5:name.index(".")]) if name.startswith("chunk") else None
                cps.append(_snapshot(plan, rows, a0, a1, tag, chunk))
    anc = np.ones(c.num_qubits, dtype=bool)
    anc[plan.layout["SYS"]] = False
    anc[flag] = False
    dirty = np.flatnonzero(anc & rows.any(axis=1)).tolist()
    if dirty:
        raise UncomputeLeak(f"ancilla qubits {dirty[:8]} not restored to |0>")
    s = 1.0 / math.sqrt(N)
    return ReducedOutput.from_amplitudes(a0 * s, a1 * s), cps


# -- dense oracle ------------------------------------------------------------

def reduce_dense(plan: EncodingPlan, state: DenseState):
    """Project a full dense state on SYS x FLAG, returning (ReducedOutput, leaked probability)."""
    qs = plan.layout["SYS"] + [plan.flag]
    idx = np.zeros(2 * plan.N, dtype=np.int64)
    ar = np.arange(idx.size)
    for b, q in enumerate(qs):
        idx |= ((ar >> b) & 1) << q
    sub = state.amplitudes[idx]
    leak = max(0.0, 1.0 - float(np.vdot(sub, sub).real))
    return ReducedOutput.from_amplitudes(sub[:plan.N], sub[plan.N:]), leak


def run_dense_oracle(plan: EncodingPlan) -> DenseState:
    """Gate-by-gate statevector execution of the whole plan from |0...0>."""
    if plan.num_qubits > MAX_DENSE_QUBITS:
        raise TooLarge(f"plan needs {plan.num_qubits} qubits; dense cap is {MAX_DENSE_QUBITS}")
    st = DenseState.zero(plan.num_qubits)
    return st.run(plan.circuit)


def encode_complex(split: ComplexSplit, M: int, L: Optional[int] = None) -> ReducedOutput:
    """Encode modulus and phase; psi_G approximates R_k exp(i phi_k) up to global phase."""
    if L is not None and L != split.B_R.L:
        raise ValidationError(f"split was quantized with L={split.B_R.L}, not {L}")
    plan = build_plan(split.B_R, M, split.B_phi)
    return run_branch_sim(plan)[0]


def encode(B: BinaryAngleMatrix, M: int) -> ReducedOutput:
    return run_branch_sim(build_plan(B, M))[0]
