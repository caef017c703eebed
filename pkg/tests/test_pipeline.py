import numpy as np
import pytest

from cartansynth.models import ModelParams, build_model
from cartansynth.oracle import circuit_unitary, exact_unitary, unitary_distance
from cartansynth.pauli import PauliSum
from cartansynth.pipeline import choose_generators, compile_hamiltonian, reduced_k_layer, support_order
from cartansynth.rewrite import PatternError, pile_order, tfxy_k_order


def test_support_order():
    from cartansynth.pauli import PauliString as P
    ks = [P.from_label(s) for s in ("IYX", "YXI", "YZX", "IXY")]
    assert [p.label for p in support_order(ks)] == ["YXI", "YZX", "IXY", "IYX"]


def test_auto_order_for_tfxy_is_triangle_order():
    H = build_model(ModelParams("TFXY", 5, sigma=1.0))
    c = compile_hamiltonian(H)
    assert list(c.result.k_fact.k_basis) == tfxy_k_order(5)
    assert reduced_k_layer(c.result) is not None


def test_unknown_ansatz():
    H = build_model(ModelParams("TFIM", 3, sigma=1.0))
    with pytest.raises(ValueError):
        compile_hamiltonian(H, ansatz="spiral")
    with pytest.raises(PatternError):
        compile_hamiltonian(H, ansatz="pile")


@pytest.mark.parametrize("n", [3, 4, 6])
def test_pile_ansatz_cross_validates_rewrite(n):
    H = build_model(ModelParams("TFXY", n, sigma=1.0, seed=5))
    direct = compile_hamiltonian(H, ansatz="pile")
    rewritten = compile_hamiltonian(H)
    assert list(direct.result.k_fact.k_basis) == pile_order(n)
    assert direct.k_circuit(reduce=True).cnot_count == rewritten.k_circuit(reduce=True).cnot_count == n * (n - 1)
    for t in (0.5, 5.0):
        U = exact_unitary(H, t)
        assert unitary_distance(circuit_unitary(direct.circuit(t, reduce=True)), U) <= 1e-9
        assert unitary_distance(circuit_unitary(rewritten.circuit(t, reduce=True)), U) <= 1e-9


@pytest.mark.parametrize("kind,n", [("TFIM", 4), ("XY", 4), ("Heisenberg", 3)])
def test_other_models_end_to_end(kind, n):
    H = build_model(ModelParams(kind, n, sigma=1.0, seed=1, a=list(np.linspace(0.5, 1.5, n - 1))))
    c = compile_hamiltonian(H, cap=4**n)
    assert c.k_circuit(reduce=True).cnot_count == c.k_circuit().cnot_count  # no compression outside TFXY
    for t in (0.5, 5.0):
        assert unitary_distance(circuit_unitary(c.circuit(t)), exact_unitary(H, t)) <= 1e-8


def test_file_hamiltonian_end_to_end():
    H = PauliSum.from_labels({"XXI": 0.4, "IYY": -0.9, "ZII": 0.3, "IXX": 0.2})
    c = compile_hamiltonian(H)
    assert unitary_distance(circuit_unitary(c.circuit(3.0)), exact_unitary(H, 3.0)) <= 1e-8
