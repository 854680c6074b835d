"""Gate tables and the dense statevector simulator.

Qubit 0 is the least-significant bit of the basis-state index everywhere in
this package.  Circuits are stored as flat integer tables (CSR-style target
and control lists) so that the kernels in :mod:`qampenc.kernels` can run them
without touching Python objects; :class:`GateSpec` is the user-facing view of
one row of that table.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import BadIndex, BadShape, BadState, ImpossibleOutcome, TooLarge, ValidationError
from .kernels import COND_NONE, K_H, K_PHASE, K_RY, K_SWAP, K_X, K_Z

MAX_DENSE_QUBITS = 26

KIND_CODES = {"X": K_X, "H": K_H, "RY": K_RY, "PHASE": K_PHASE, "Z": K_Z, "SWAP": K_SWAP}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}
# controlled variants are the base kind plus a non-empty control set
ALIASES = {"CX": "X", "MCX": "X", "CNOT": "X", "TOFFOLI": "X", "CRY": "RY", "C-RY": "RY",
           "CPHASE": "PHASE", "C-PHASE": "PHASE", "CZ": "Z"}
_ANGLED = (K_RY, K_PHASE)


def _canon_kind(kind):
    k = str(kind).upper()
    k = ALIASES.get(k, k)
    if k not in KIND_CODES:
        raise ValidationError(f"unknown gate kind {kind!r}")
    return k


@dataclass(frozen=True)
class GateSpec:
    """One gate.

    ``kind`` is one of X, H, RY, PHASE, Z, SWAP (aliases such as CX, MCX,
    CRY, CPHASE, CZ are accepted and normalized).  X may carry several
    targets, which are all flipped under the same controls.  A gate with
    ``classical_condition == 0`` is the identity.
    """

    kind: str
    targets: tuple
    controls: tuple = ()
    angle: float = 0.0
    classical_condition: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", _canon_kind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in np.atleast_1d(self.targets)))
        object.__setattr__(self, "controls", tuple(int(c) for c in np.atleast_1d(self.controls)))
        object.__setattr__(self, "angle", float(self.angle))
        if self.classical_condition is not None:
            object.__setattr__(self, "classical_condition", int(bool(self.classical_condition)))
        _check_arity(KIND_CODES[self.kind], self.targets, self.controls)

    def inverse(self):
        if self.kind in ("RY", "PHASE"):
            return GateSpec(self.kind, self.targets, self.controls, -self.angle, self.classical_condition)
        return self

    def format(self):
        line = (f"{self.kind} targets={','.join(map(str, self.targets))} "
                f"controls={','.join(map(str, self.controls))} angle={self.angle:.17g}")
        if self.classical_condition is not None:
            line += f" cond={self.classical_condition}"
        return line


def _check_arity(code, targets, controls):
    if not targets:
        raise ValidationError("gate needs at least one target")
    if code == K_SWAP and len(targets) != 2:
        raise ValidationError("SWAP takes exactly two targets")
    if code not in (K_X, K_SWAP) and len(targets) != 1:
        raise ValidationError("only X and SWAP take several targets")
    if len(set(targets)) != len(targets) or len(set(controls)) != len(controls):
        raise ValidationError("repeated qubit in gate")
    if set(targets) & set(controls):
        raise ValidationError("control and target sets overlap")


class Circuit:
    """Ordered gate table on ``num_qubits`` qubits with named segments.

    Gates are appended with :meth:`add`; the table is kept as plain Python
    lists while building and frozen into numpy arrays by :meth:`arrays`.
    """

    def __init__(self, num_qubits):
        self.num_qubits = int(num_qubits)
        self._kinds = []
        self._conds = []
        self._angles = []
        self._tptr = [0]
        self._tidx = []
        self._cptr = [0]
        self._cidx = []
        self.segments = []  # (name, start, stop)
        self._open = None
        self._arrays = None

    def __len__(self):
        return len(self._kinds)

    # -- building -----------------------------------------------------------
    def add(self, kind, targets, controls=(), angle=0.0, cond=None):
        code = KIND_CODES[_canon_kind(kind)] if isinstance(kind, str) else int(kind)
        targets = [int(targets)] if isinstance(targets, (int, np.integer)) else [int(t) for t in targets]
        controls = [int(controls)] if isinstance(controls, (int, np.integer)) else [int(c) for c in controls]
        q = self.num_qubits
        for i in targets + controls:
            if not 0 <= i < q:
                raise BadIndex(f"qubit {i} outside [0, {q})")
        _check_arity(code, targets, controls)
        return self._raw(code, targets, controls, angle, COND_NONE if cond is None else int(bool(cond)))

    def _raw(self, code, targets, controls=(), angle=0.0, cond=COND_NONE):
        """Unchecked append used by the plan builders (lists of ints expected)."""
        self._kinds.append(code)
        self._conds.append(cond)
        self._angles.append(float(angle))
        self._tidx.extend(targets)
        self._tptr.append(len(self._tidx))
        self._cidx.extend(controls)
        self._cptr.append(len(self._cidx))
        self._arrays = None
        return self

    def _append_mirror(self, start, stop):
        """Unchecked append of gates ``start:stop`` in reverse order with angles negated."""
        kinds, conds, angles = self._kinds, self._conds, self._angles
        tptr, tidx, cptr, cidx = self._tptr, self._tidx, self._cptr, self._cidx
        for g in range(stop - 1, start - 1, -1):
            k = kinds[g]
            kinds.append(k)
            conds.append(conds[g])
            angles.append(-angles[g] if k in _ANGLED else angles[g])
            tidx.extend(tidx[tptr[g]:tptr[g + 1]])
            tptr.append(len(tidx))
            cidx.extend(cidx[cptr[g]:cptr[g + 1]])
            cptr.append(len(cidx))
        self._arrays = None
        return self

    def append(self, gate: GateSpec):
        return self.add(gate.kind, gate.targets, gate.controls, gate.angle, gate.classical_condition)

    def extend(self, gates: Iterable[GateSpec]):
        for g in gates:
            self.append(g)
        return self

    def begin(self, name):
        """Close the current segment (if any) and open a new one."""
        self.end()
        self._open = (name, len(self))

    def end(self):
        if self._open is not None:
            name, start = self._open
            self.segments.append((name, start, len(self)))
            self._open = None

    def segment(self, name):
        for s in self.segments:
            if s[0] == name:
                return s
        raise KeyError(name)

    # -- views --------------------------------------------------------------
    def arrays(self):
        """Return (kinds, conds, angles, tptr, tidx, cptr, cidx) as numpy arrays."""
        if self._arrays is None:
            i64 = np.int64
            self._arrays = (
                np.asarray(self._kinds, dtype=i64), np.asarray(self._conds, dtype=i64),
                np.asarray(self._angles, dtype=np.float64),
                np.asarray(self._tptr, dtype=i64), np.asarray(self._tidx, dtype=i64),
                np.asarray(self._cptr, dtype=i64), np.asarray(self._cidx, dtype=i64),
            )
        return self._arrays

    def gate(self, g):
        cond = self._conds[g]
        return GateSpec(KIND_NAMES[self._kinds[g]],
                        tuple(self._tidx[self._tptr[g]:self._tptr[g + 1]]),
                        tuple(self._cidx[self._cptr[g]:self._cptr[g + 1]]),
                        self._angles[g], None if cond == COND_NONE else cond)

    def gates(self, start=0, stop=None):
        stop = len(self) if stop is None else stop
        return [self.gate(g) for g in range(start, stop)]

    def __iter__(self):
        return iter(self.gates())

    def inverse(self):
        """Exact inverse: reversed order, negated angles, segments mirrored."""
        inv = Circuit(self.num_qubits)
        n = len(self)
        for g in range(n - 1, -1, -1):
            k = self._kinds[g]
            a = -self._angles[g] if k in _ANGLED else self._angles[g]
            cond = self._conds[g]
            inv.add(k, self._tidx[self._tptr[g]:self._tptr[g + 1]],
                    self._cidx[self._cptr[g]:self._cptr[g + 1]], a,
                    None if cond == COND_NONE else cond)
        inv.segments = [(f"{name}_dag", n - stop, n - start) for name, start, stop in reversed(self.segments)]
        return inv

    def gate_counts(self, start=0, stop=None):
        """Count active gates by kind; controlled X is reported by arity (CX, CCX, MCX)."""
        stop = len(self) if stop is None else stop
        counts = {}
        for g in range(start, stop):
            if self._conds[g] == 0:
                continue
            name = KIND_NAMES[self._kinds[g]]
            nc = self._cptr[g + 1] - self._cptr[g]
            if nc:
                name = {1: "C", 2: "CC"}.get(nc, "MC") + name
            counts[name] = counts.get(name, 0) + 1
        return dict(sorted(counts.items()))

    def depth(self):
        """Greedy layer count: a gate goes one layer above the last gate touching any of its qubits."""
        _, conds, _, tptr, tidx, cptr, cidx = self.arrays()
        return int(kernels.greedy_depth(self.num_qubits, conds, tptr, tidx, cptr, cidx))

    def dump(self):
        """One gate per line: ``KIND targets=... controls=... angle=...``."""
        return "".join(self.gate(g).format() + "\n" for g in range(len(self)))

    @classmethod
    def parse(cls, text, num_qubits):
        circ = cls(num_qubits)
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            kind, *fields = line.split()
            kv = dict(f.split("=", 1) for f in fields)
            ints = lambda s: [int(x) for x in s.split(",") if x]  # noqa: E731
            cond = kv.get("cond")
            circ.add(kind, ints(kv.get("targets", "")), ints(kv.get("controls", "")),
                     float(kv.get("angle", 0.0)), None if cond is None else int(cond))
        return circ


def decompose_mcx(controls: Sequence[int], target: int, work: Sequence[int]):
    """Toffoli-tree realization of an MCX.

    Controls are AND-reduced pairwise into ``work`` qubits (which must start
    and end in |0>), the last pair hits ``target`` directly, then the tree is
    uncomputed.  Needs ``len(controls) - 2`` work qubits and has depth
    ``O(log len(controls))``.
    """
    controls = list(controls)
    if len(controls) <= 2:
        return [GateSpec("X", (target,), tuple(controls))]
    need = len(controls) - 2
    if len(work) < need:
        raise ValidationError(f"MCX with {len(controls)} controls needs {need} work qubits")
    pool = iter(work)
    compute = []
    level = controls
    while len(level) > 2:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            w = next(pool)
            compute.append(GateSpec("X", (w,), (level[i], level[i + 1])))
            nxt.append(w)
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return compute + [GateSpec("X", (target,), tuple(level))] + compute[::-1]


# -- dense states -------------------------------------------------------------

class DenseState:
    """Raw 2**q complex amplitudes (qubit 0 = least-significant index bit)."""

    def __init__(self, amplitudes, copy=True):
        amp = np.array(amplitudes, dtype=np.complex128, copy=copy)
        if amp.ndim != 1 or amp.size == 0 or amp.size & (amp.size - 1):
            raise BadShape("amplitude vector length must be a power of two")
        q = amp.size.bit_length() - 1
        if q > MAX_DENSE_QUBITS:
            raise TooLarge(f"{q} qubits exceeds the dense cap of {MAX_DENSE_QUBITS}; use the branch simulator")
        self.amplitudes = amp
        self.q = q

    @classmethod
    def zero(cls, q):
        if q > MAX_DENSE_QUBITS:
            raise TooLarge(f"{q} qubits exceeds the dense cap of {MAX_DENSE_QUBITS}; use the branch simulator")
        amp = np.zeros(1 << q, dtype=np.complex128)
        amp[0] = 1.0
        return cls(amp, copy=False)

    @classmethod
    def basis(cls, q, index):
        st = cls.zero(q)
        st.amplitudes[0] = 0.0
        st.amplitudes[index] = 1.0
        return st

    def copy(self):
        return DenseState(self.amplitudes)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def apply(self, gate: GateSpec):
        return apply_gate(self, gate)

    def run(self, circ: Circuit, start=0, stop=None):
        """Apply gates ``start:stop`` of ``circ`` in place."""
        if circ.num_qubits > self.q:
            raise BadIndex(f"circuit uses {circ.num_qubits} qubits, state has {self.q}")
        stop = len(circ) if stop is None else stop
        kernels.dense_run(self.amplitudes, self.q, *circ.arrays(), start, stop)
        return self

    def probability_of(self, qubit, value):
        return probability_of(self, qubit, value)

    def to_json(self):
        return json.dumps([[float(a.real), float(a.imag)] for a in self.amplitudes])

    @classmethod
    def from_json(cls, text):
        pairs = np.asarray(json.loads(text), dtype=np.float64).reshape(-1, 2)
        return cls(pairs[:, 0] + 1j * pairs[:, 1])


def apply_gate(state: DenseState, g: GateSpec) -> DenseState:
    """Apply one gate in place and return the state."""
    for i in g.targets + g.controls:
        if not 0 <= i < state.q:
            raise BadIndex(f"qubit {i} outside [0, {state.q})")
    c = Circuit(state.q).append(g)
    kernels.dense_run(state.amplitudes, state.q, *c.arrays(), 0, 1)
    return state


def _bit_view(state, qubit):
    if not 0 <= qubit < state.q:
        raise BadIndex(f"qubit {qubit} outside [0, {state.q})")
    # axis 1 of this view is the requested qubit
    return state.amplitudes.reshape(-1, 2, 1 << qubit)


def probability_of(state: DenseState, qubit: int, value: int) -> float:
    v = _bit_view(state, qubit)[:, int(value)]
    return float(np.vdot(v, v).real)


def post_select(state: DenseState, qubit: int, value: int) -> DenseState:
    """Project onto ``qubit == value`` and renormalize (returns a new state)."""
    p = probability_of(state, qubit, value)
    if p <= 1e-14:
        raise ImpossibleOutcome(f"P(q{qubit}={value}) = {p:.3g}")
    out = state.amplitudes.copy()
    _bit_view(DenseState(out, copy=False), qubit)[:, 1 - int(value)] = 0.0
    return DenseState(out / np.sqrt(p), copy=False)


def fidelity(a, b) -> float:
    """|<a|b>|^2 for two states or amplitude vectors (normalized internally)."""
    va = np.asarray(a.amplitudes if isinstance(a, DenseState) else a, dtype=np.complex128).ravel()
    vb = np.asarray(b.amplitudes if isinstance(b, DenseState) else b, dtype=np.complex128).ravel()
    if va.shape != vb.shape:
        raise BadShape(f"dimension mismatch {va.size} vs {vb.size}")
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0 or nb == 0:
        raise BadState("zero vector has no fidelity")
    return float(min(1.0, abs(np.vdot(va, vb)) ** 2 / (na * na * nb * nb)))


def marginal(state: DenseState, qubits: Sequence[int]) -> np.ndarray:
    """Reduced amplitudes on ``qubits`` assuming every other qubit is |0>.

    Returns the sub-vector indexed by the listed qubits (first listed = least
    significant) together with the leaked probability outside that subspace.
    """
    qubits = list(qubits)
    idx = np.zeros(1 << len(qubits), dtype=np.int64)
    for b, q in enumerate(qubits):
        idx |= ((np.arange(idx.size) >> b) & 1) << q
    sub = state.amplitudes[idx]
    leak = max(0.0, 1.0 - float(np.vdot(sub, sub).real))
    return sub, leak
