import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

from bellqec.core import DensityMatrix, StateVector
from bellqec.pauli import PauliString

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")


@st.composite
def state_vectors(draw, min_qubits=1, max_qubits=3):
    n = draw(st.integers(min_qubits, max_qubits))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(amps / np.linalg.norm(amps))


@st.composite
def density_matrices(draw, min_qubits=1, max_qubits=3):
    n = draw(st.integers(min_qubits, max_qubits))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(1 << n, 1 << n)) + 1j * rng.normal(size=(1 << n, 1 << n))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


@st.composite
def pauli_strings(draw, n=None, max_qubits=5, hermitian=False):
    if n is None:
        n = draw(st.integers(1, max_qubits))
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    p = PauliString(n, x=x, z=z)
    phase = draw(st.sampled_from((0, 2) if hermitian else (0, 1, 2, 3)))
    for _ in range(phase):
        p = PauliString(n, x=p.x, z=p.z, phase=(p.phase + 1) % 4)
    return p


def random_unitary(n, rng):
    a = rng.normal(size=(1 << n, 1 << n)) + 1j * rng.normal(size=(1 << n, 1 << n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
