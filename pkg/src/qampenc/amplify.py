"""Amplitude amplification on the encoder output.

The Grover operator is ``Q = -E S0 E^dag S`` with ``S = Z`` on FLAG and
``S0 = I - 2|0><0|``.  Since ``E S0 E^dag = I - 2|psi><psi|`` this is
``Q = (2|psi><psi| - I) S``, which is what :func:`grover_step` applies on
the (n+1)-qubit SYS x FLAG space.  The gate-level version in
:func:`run_dense_amplification` exists to check that identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoder import EncodingPlan, ReducedOutput, reduce_dense, run_branch_sim, run_dense_oracle
from .errors import BadDensity, BadState, ValidationError
from .kernels import K_X, K_Z
from .simcore import Circuit, DenseState, decompose_mcx, fidelity

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class AASchedule:
    rho: float
    theta_a: float
    m: int
    predicted_success: float

    @property
    def near_half(self):
        """True when rho is just above 1/2, where m = 0 and the success floor is tight."""
        return 0.5 <= self.rho < 0.5 + 1e-3


def schedule(rho: float) -> AASchedule:
    rho = float(rho)
    if not 0.0 < rho <= 1.0 or math.isnan(rho):
        raise BadDensity(f"rho must lie in (0, 1], got {rho}")
    theta = math.asin(math.sqrt(rho))
    # the guard keeps exact integers (rho = 1/2, 1/4 ...) from flooring one step low
    m = int(math.floor(math.pi / (4 * theta) + 1e-12))
    return AASchedule(rho, theta, m, math.sin((2 * m + 1) * theta) ** 2)


def _split(state):
    half = state.shape[0] // 2
    return state[:half], state[half:]


def grover_step(state, psi):
    """One application of ``Q = (2|psi><psi| - I) Z_FLAG`` on SYS x FLAG.

    Both vectors are laid out with FLAG as the top index bit, i.e. the
    FLAG=0 block first.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if abs(np.vdot(psi, psi).real - 1.0) > _NORM_TOL:
        raise BadState("psi must be normalized")
    out = np.array(state, dtype=np.complex128)
    if out.shape != psi.shape:
        raise BadState("state and psi differ in dimension")
    _split(out)[1][:] *= -1.0
    return 2.0 * np.vdot(psi, out) * psi - out


def amplify(red: ReducedOutput, m=None):
    """Apply ``m`` Grover steps (default: the schedule for ``red.rho``).

    Returns ``(state, achieved_success, m)`` where ``state`` is the joint
    SYS x FLAG vector.
    """
    if m is None:
        m = schedule(red.rho).m
    psi = red.state
    st = psi.copy()
    for _ in range(m):
        st = grover_step(st, psi)
    good = _split(st)[1]
    return st, float(np.vdot(good, good).real), m


def build_s0_circuit(q: int) -> Circuit:
    """Reflection ``I - 2|0..0><0..0|`` on qubits ``0..q-1``.

    Layout: X on every qubit, an MCX from qubits ``0..q-2`` onto an ancilla
    ``a = q``, CZ(a, q-1), the MCX again and the X layer again.  The MCX
    needs ``q - 3`` extra work qubits, placed at ``q+1 ...``; all ancillas
    start and end in |0>.
    """
    if q < 2:
        raise ValidationError("S0 needs q >= 2")
    anc = q
    work = list(range(q + 1, q + 1 + max(0, q - 3)))
    c = Circuit(q + 1 + len(work))
    _s0_into(c, list(range(q - 1)), q - 1, anc, work)
    return c


def _s0_into(c, ctrl, last, anc, work):
    qs = ctrl + [last]
    c.begin("s0.x")
    c._raw(K_X, qs)
    c.begin("s0.mcx")
    mcx = decompose_mcx(ctrl, anc, work)
    c.extend(mcx)
    c.begin("s0.cz")
    c._raw(K_Z, [last], [anc])
    c.begin("s0.mcx_dag")
    c.extend(mcx[::-1])
    c.begin("s0.x_dag")
    c._raw(K_X, qs)
    c.end()


def s0_for_plan(plan: EncodingPlan) -> Circuit:
    """S0 on SYS x FLAG of ``plan``, borrowing clean plan ancillas.

    Between ``E^dag`` and ``E`` every qubit other than SYS and FLAG is |0>
    (each register is restored by its own mirrored segment), so reflecting
    about |0> on SYS x FLAG equals the reflection on the full register.
    The ancilla is C_1 and the MCX work qubits come from the AND pool.
    """
    pool = [q for name, qs in plan.layout.items() if name.startswith("W") or name.startswith("CTRL")
            for q in qs]
    need = max(0, plan.n - 2)
    if len(pool) < need:
        raise ValidationError("not enough clean ancillas for S0")
    c = Circuit(plan.num_qubits)
    _s0_into(c, plan.layout["SYS"], plan.flag, plan.layout["C0"][0], pool[:need])
    return c


def run_dense_amplification(plan: EncodingPlan, m: int):
    """Gate-level ``(-E S0 E^dag S)^m E|0>``; returns (DenseState, leaked probability)."""
    E = plan.circuit
    Einv = E.inverse()
    s0 = s0_for_plan(plan)
    st = run_dense_oracle(plan)
    for _ in range(m):
        z = Circuit(plan.num_qubits)._raw(K_Z, [plan.flag])
        st.run(z).run(Einv).run(s0).run(E)
        st.amplitudes *= -1.0
    _, leak = reduce_dense(plan, st)
    return st, leak


@dataclass(frozen=True)
class AAResult:
    m: int
    rho: float
    predicted_success: float
    achieved_success: float
    fidelity_vs_target: float
    sys_state: np.ndarray
    near_half: bool

    def to_dict(self):
        return {"m": self.m, "rho": self.rho, "predicted_success": self.predicted_success,
                "achieved_success": self.achieved_success, "fidelity_vs_target": self.fidelity_vs_target,
                "near_half": self.near_half}


def run_amplified_encoding(plan: EncodingPlan) -> AAResult:
    """Encode, amplify with the scheduled m, and post-select FLAG=1."""
    red, _ = run_branch_sim(plan)
    sch = schedule(red.rho)
    st, achieved, m = amplify(red, sch.m)
    good = _split(st)[1]
    sys_state = good / np.linalg.norm(good)
    return AAResult(m, red.rho, sch.predicted_success, achieved,
                    fidelity(sys_state, plan.target), sys_state, sch.near_half)


def reduced_state_from_rho(rho: float):
    """Two-level model state sqrt(1-rho)|B>|0> + sqrt(rho)|G>|1> on one SYS qubit."""
    return np.array([math.sqrt(1 - rho), 0.0, 0.0, math.sqrt(rho)], dtype=np.complex128)


def dense_state_of(st: DenseState, plan: EncodingPlan):
    return reduce_dense(plan, st)[0]
