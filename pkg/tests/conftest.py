import functools

import numpy as np
import pytest

from cartansynth.pauli import PauliString, PauliSum

_P = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_matrix(p):
    """Dense matrix by explicit Kronecker products; independent of the package's oracle."""
    label = p.label if isinstance(p, PauliString) else p
    return functools.reduce(np.kron, [_P[c] for c in label])


def kron_sum(A: PauliSum):
    M = np.zeros((2**A.n, 2**A.n), dtype=complex)
    for p, c in A.items():
        M += c * kron_matrix(p)
    return M


def layer_unitary(layer, n):
    """prod_i exp(i theta_i P_i), leftmost factor first."""
    I = np.eye(2**n, dtype=complex)
    U = I
    for p, t in layer:
        U = U @ (np.cos(t) * I + 1j * np.sin(t) * kron_matrix(p))
    return U


def random_string(rng, n, allow_identity=False):
    while True:
        p = PauliString.from_label("".join(rng.choice(list("IXYZ"), n)))
        if allow_identity or not p.is_identity():
            return p


def random_sum(rng, n, terms=4):
    return PauliSum(n, {random_string(rng, n): float(rng.normal()) for _ in range(terms)})


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> None:
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[num] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
