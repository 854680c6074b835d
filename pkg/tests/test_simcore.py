import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qampenc.errors import BadIndex, BadShape, ImpossibleOutcome, TooLarge, ValidationError
from qampenc.simcore import (MAX_DENSE_QUBITS, Circuit, DenseState, GateSpec, apply_gate,
                             decompose_mcx, fidelity, marginal, post_select, probability_of)

from conftest import gate_unitary, unit_vector

Q = 4


@st.composite
def gates(draw, q=Q):
    kind = draw(st.sampled_from(["X", "H", "RY", "PHASE", "Z", "SWAP"]))
    qubits = draw(st.permutations(range(q)))
    nt = 2 if kind == "SWAP" else 1
    nc = draw(st.integers(0, q - nt))
    angle = draw(st.floats(-7, 7, allow_nan=False)) if kind in ("RY", "PHASE") else 0.0
    return GateSpec(kind, tuple(qubits[:nt]), tuple(qubits[nt:nt + nc]), angle)


@given(gates(), st.integers(0, 2 ** 32 - 1))
def test_gate_matches_kron_oracle(g, seed):
    psi = unit_vector(np.random.default_rng(seed), 1 << Q, complex_=True)
    U = gate_unitary(Q, g.kind, g.targets, g.controls, g.angle)
    out = apply_gate(DenseState(psi), g).amplitudes
    np.testing.assert_allclose(out, U @ psi, atol=1e-12)


@given(st.lists(gates(), min_size=1, max_size=12), st.integers(0, 2 ** 32 - 1))
def test_circuit_unitary_and_inverse(gs, seed):
    psi = unit_vector(np.random.default_rng(seed), 1 << Q, complex_=True)
    c = Circuit(Q).extend(gs)
    st_ = DenseState(psi).run(c)
    assert st_.norm() == pytest.approx(1.0, abs=1e-12)
    st_.run(c.inverse())
    np.testing.assert_allclose(st_.amplitudes, psi, atol=1e-10)


def test_multi_target_x():
    st_ = DenseState.zero(3).apply(GateSpec("X", (0, 2)))
    assert abs(st_.amplitudes[0b101]) == pytest.approx(1.0)


@pytest.mark.parametrize("cond,expect", [(None, 1), (1, 1), (0, 0)])
def test_classical_condition(cond, expect):
    c = Circuit(1)
    c.add("X", [0], cond=cond)
    st_ = DenseState.zero(1).run(c)
    assert abs(st_.amplitudes[expect]) == pytest.approx(1.0)


@pytest.mark.parametrize("k", range(1, 7))
def test_mcx_decomposition_truth_table(k):
    controls = list(range(k))
    target = k
    work = list(range(k + 1, k + 1 + max(0, k - 2)))
    q = k + 1 + len(work)
    c = Circuit(q).extend(decompose_mcx(controls, target, work))
    for x in range(1 << (k + 1)):
        st_ = DenseState.basis(q, x).run(c)
        want = x ^ (1 << target) if all((x >> i) & 1 for i in controls) else x
        assert abs(st_.amplitudes[want]) == pytest.approx(1.0), (k, x)


def test_mcx_depth_is_logarithmic():
    k = 16
    c = Circuit(2 * k).extend(decompose_mcx(range(k), k, range(k + 1, 2 * k)))
    assert c.depth() == 2 * math.ceil(math.log2(k)) - 1


def test_mcx_needs_work():
    with pytest.raises(ValidationError):
        decompose_mcx([0, 1, 2, 3], 4, [5])


def test_gate_validation():
    with pytest.raises(ValidationError):
        GateSpec("FOO", (0,))
    with pytest.raises(ValidationError):
        GateSpec("X", (0,), (0,))
    with pytest.raises(ValidationError):
        GateSpec("SWAP", (0,))
    with pytest.raises(BadIndex):
        Circuit(2).add("X", [2])


def test_aliases_normalize():
    assert GateSpec("CX", 1, 0).kind == "X"
    assert GateSpec("cphase", 1, 0, 0.5).kind == "PHASE"
    assert GateSpec("RY", 0, angle=0.3).inverse().angle == -0.3


def test_dump_parse_round_trip():
    c = Circuit(3)
    c.add("H", [0]).add("CRY", [1], [0], 0.125).add("X", [2], [0, 1], cond=1).add("SWAP", [0, 2])
    again = Circuit.parse(c.dump(), 3)
    assert again.dump() == c.dump()
    assert list(again) == list(c)


def test_gate_counts_and_depth():
    c = Circuit(4)
    c.add("H", [0]).add("X", [1], [0]).add("X", [2], [0, 1]).add("X", [3], [0, 1, 2]).add("X", [3], cond=0)
    assert c.gate_counts() == {"CCX": 1, "CX": 1, "H": 1, "MCX": 1}
    assert c.depth() == 4


def test_segments_and_inverse_names():
    c = Circuit(2)
    c.begin("a")
    c.add("H", [0])
    c.begin("b")
    c.add("X", [1]).add("Z", [0])
    c.end()
    assert c.segment("b") == ("b", 1, 3)
    assert c.segments == [("a", 0, 1), ("b", 1, 3)]
    assert c.inverse().segments == [("b_dag", 0, 2), ("a_dag", 2, 3)]


def test_probability_and_post_select(rng):
    psi = unit_vector(rng, 8, complex_=True)
    st_ = DenseState(psi)
    p1 = probability_of(st_, 1, 1)
    idx = [i for i in range(8) if (i >> 1) & 1]
    assert p1 == pytest.approx(np.sum(np.abs(psi[idx]) ** 2))
    ps = post_select(st_, 1, 1)
    assert ps.norm() == pytest.approx(1.0)
    assert ps.probability_of(1, 1) == pytest.approx(1.0)
    with pytest.raises(ImpossibleOutcome):
        post_select(DenseState.zero(2), 0, 1)


def test_fidelity_rules(rng):
    a = unit_vector(rng, 4, complex_=True)
    assert fidelity(a, a * np.exp(0.7j) * 3) == pytest.approx(1.0)
    with pytest.raises(BadShape):
        fidelity(a, np.ones(8))


def test_marginal_reports_leak():
    amp = np.zeros(8, dtype=complex)
    amp[0b001] = amp[0b100] = 1 / math.sqrt(2)
    sub, leak = marginal(DenseState(amp), [0, 1])
    np.testing.assert_allclose(np.abs(sub), [0, 1 / math.sqrt(2), 0, 0])
    assert leak == pytest.approx(0.5)


def test_dense_cap():
    with pytest.raises(TooLarge):
        DenseState.zero(MAX_DENSE_QUBITS + 1)
    with pytest.raises(BadShape):
        DenseState(np.ones(3))


def test_json_round_trip(rng):
    st_ = DenseState(unit_vector(rng, 4, complex_=True))
    np.testing.assert_array_equal(DenseState.from_json(st_.to_json()).amplitudes, st_.amplitudes)


def test_swap_permutes_bits():
    for x in itertools.product([0, 1], repeat=3):
        i = x[0] | x[1] << 1 | x[2] << 2
        out = DenseState.basis(3, i).apply(GateSpec("SWAP", (0, 2))).amplitudes
        assert abs(out[x[2] | x[1] << 1 | x[0] << 2]) == pytest.approx(1.0)
