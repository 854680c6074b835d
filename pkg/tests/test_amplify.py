import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qampenc.amplify import (amplify, build_s0_circuit, grover_step, reduced_state_from_rho,
                             run_amplified_encoding, run_dense_amplification, schedule)
from qampenc.encoder import ReducedOutput, build_plan, reduce_dense, run_branch_sim
from qampenc.errors import BadDensity, BadState
from qampenc.preprocess import compute_theta, preprocess, quantize_theta
from qampenc.simcore import DenseState, fidelity

from conftest import EXAMPLE, unit_vector


def _two_level(rho):
    st_ = reduced_state_from_rho(rho)
    return ReducedOutput.from_amplitudes(st_[:2], st_[2:])


@pytest.mark.parametrize("rho,m", [(0.625, 0), (0.01, 7), (1.0, 0), (0.25, 1), (0.5, 1), (0.1, 2)])
def test_schedule_m(rho, m):
    assert schedule(rho).m == m


@pytest.mark.parametrize("rho", [0.0, -0.1, 1.5, float("nan")])
def test_schedule_rejects(rho):
    with pytest.raises(BadDensity):
        schedule(rho)


@given(st.floats(1e-4, 1.0))
def test_amplification_law(rho):
    sch = schedule(rho)
    _, success, m = amplify(_two_level(rho))
    assert m == sch.m
    assert success == pytest.approx(math.sin((2 * m + 1) * math.asin(math.sqrt(rho))) ** 2, abs=1e-10)
    assert success >= max(1 - rho, rho) - 1e-12


def test_grover_step_matches_rotation_matrix():
    # Q on the two-level (bad, good) plane is a rotation by 2 theta
    rho = 0.2
    t = math.asin(math.sqrt(rho))
    psi = reduced_state_from_rho(rho)
    st_ = psi.copy()
    for m in range(1, 5):
        st_ = grover_step(st_, psi)
        assert abs(st_[3]) ** 2 == pytest.approx(math.sin((2 * m + 1) * t) ** 2, abs=1e-12)


def test_grover_step_checks_norm():
    with pytest.raises(BadState):
        grover_step(np.ones(4), np.ones(4))


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_s0_reflection(q):
    c = build_s0_circuit(q)
    dim = 1 << q
    for x in range(dim):
        out = DenseState.basis(c.num_qubits, x).run(c).amplitudes
        assert out[x] == pytest.approx(-1.0 if x == 0 else 1.0)


def test_dense_amplification_matches_reduced():
    v = unit_vector(np.random.default_rng(3), 4)
    v[0] *= 0.05
    plan = build_plan(quantize_theta(compute_theta(v), 4), 2)
    red, _ = run_branch_sim(plan)
    for m in (1, 2):
        st_, leak = run_dense_amplification(plan, m)
        dred, _ = reduce_dense(plan, st_)
        expect, _, _ = amplify(red, m)
        assert leak < 1e-10
        assert fidelity(dred.state, expect) >= 1 - 1e-9
        np.testing.assert_allclose(dred.state, expect, atol=1e-9)


def test_amplified_encoding_example():
    plan = build_plan(preprocess(EXAMPLE, 6).B, 2)
    res = run_amplified_encoding(plan)
    assert res.m == 0
    assert res.achieved_success == pytest.approx(res.rho)
    assert res.fidelity_vs_target == pytest.approx(1.0, abs=1e-12)


def test_amplified_sparse_vector_target():
    v = np.zeros(16)
    v[5] = 1.0
    v[9] = 0.3
    plan = build_plan(preprocess(v, 8).B, 4)
    res = run_amplified_encoding(plan)
    assert res.m >= 1
    assert res.achieved_success == pytest.approx(res.predicted_success, abs=1e-10)
    assert res.fidelity_vs_target == pytest.approx(1.0, abs=1e-10)


def test_near_half_flag():
    assert schedule(0.5004).near_half and not schedule(0.4).near_half
