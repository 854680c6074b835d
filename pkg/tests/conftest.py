import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("qampenc", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qampenc")

EXAMPLE = np.array([1, 2, -1, 2, -1, 2, 1, 2], dtype=float) / np.sqrt(20)


def unit_vector(rng, N, complex_=False):
    v = rng.standard_normal(N)
    if complex_:
        v = v + 1j * rng.standard_normal(N)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# gate matrices for the kron-product oracle
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_Z = np.diag([1, -1]).astype(complex)


def ry(a):
    c, s = np.cos(a / 2), np.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def phase(a):
    return np.diag([1, np.exp(1j * a)])


def base_matrix(kind, angle=0.0):
    return {"X": _X, "H": _H, "Z": _Z, "RY": ry(angle), "PHASE": phase(angle)}[kind]


def gate_unitary(q, kind, targets, controls=(), angle=0.0):
    """Full 2**q matrix built column by column from index arithmetic (qubit 0 = LSB)."""
    N = 1 << q
    U = np.zeros((N, N), dtype=complex)
    for col in range(N):
        if any(not (col >> c) & 1 for c in controls):
            U[col, col] = 1
            continue
        if kind == "SWAP":
            a, b = targets
            ba, bb = (col >> a) & 1, (col >> b) & 1
            row = col & ~(1 << a) & ~(1 << b) | (bb << a) | (ba << b)
            U[row, col] = 1
            continue
        amps = {col: 1.0 + 0j}
        for t in targets:
            m = base_matrix(kind, angle)
            nxt = {}
            for idx, a in amps.items():
                bit = (idx >> t) & 1
                for out in (0, 1):
                    if m[out, bit] != 0:
                        j = idx & ~(1 << t) | (out << t)
                        nxt[j] = nxt.get(j, 0) + m[out, bit] * a
            amps = nxt
        for j, a in amps.items():
            U[j, col] += a
    return U


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
