"""End-to-end compilation: Hamiltonian -> algebra -> Cartan split -> K, h -> circuits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import AlgebraBasis, generate_algebra
from .cartan import CartanSplit, decompose_algebra
from .circuits import GateCircuit, RotationLayer, lower_layer, synthesize_evolution
from .khk import DecompositionResult, SolverConfig, solve
from .pauli import PauliString, PauliSum
from .rewrite import PatternError, pile_order, reduce_tfxy_layer, tfxy_k_order

ANSATZ = ("auto", "support", "canonical", "pile")


def support_order(k_basis: Sequence[PauliString]) -> list[PauliString]:
    """Sort generators by leftmost site, then rightmost site, then label.

    Products in this order stay well conditioned far more often than in the
    weight-first canonical order.
    """
    return sorted(k_basis, key=lambda p: (p.support[0], p.support[-1], p.label))


def choose_generators(split: CartanSplit, ansatz: str = "auto") -> list[PauliString]:
    if ansatz not in ANSATZ:
        raise ValueError(f"unknown ansatz {ansatz!r}; choose from {', '.join(ANSATZ)}")
    n = split.n
    if ansatz == "canonical":
        return list(split.k_basis)
    if ansatz == "pile":
        gens = pile_order(n)
        if not set(gens) <= set(split.k_basis):
            raise PatternError("pile ansatz needs the TFXY k")
        return gens
    if ansatz == "auto" and n >= 2 and set(split.k_basis) == set(tfxy_k_order(n)):
        return tfxy_k_order(n)
    return support_order(split.k_basis)


def reduced_k_layer(result: DecompositionResult) -> RotationLayer | None:
    """Compressed K as same-bond pairs, or None when K is not TFXY-shaped."""
    kf = result.k_fact
    if list(kf.k_basis) == pile_order(result.n):
        return kf.layer()
    try:
        return reduce_tfxy_layer(kf.k_basis, kf.angles)
    except PatternError:
        return None


def k_circuit(result: DecompositionResult, reduce: bool = False) -> GateCircuit:
    if reduce:
        layer = reduced_k_layer(result)
        if layer is not None:
            return lower_layer(layer, result.n, merge_pairs=True, source="K")
    return lower_layer(result.k_fact.layer(), result.n, merge_pairs=False, source="K")


def evolution_circuit(result: DecompositionResult, t: float, reduce: bool = False) -> GateCircuit:
    """U(t) circuit; with ``reduce`` the compressed K is used when available."""
    layer = reduced_k_layer(result) if reduce else None
    return synthesize_evolution(result, t, k_layer=layer)


@dataclass
class Compilation:
    H: PauliSum
    algebra: AlgebraBasis
    split: CartanSplit
    result: DecompositionResult
    ansatz: str

    @property
    def n(self) -> int:
        return self.H.n

    def reduced_k_layer(self) -> RotationLayer | None:
        return reduced_k_layer(self.result)

    def k_circuit(self, reduce: bool = False) -> GateCircuit:
        return k_circuit(self.result, reduce)

    def circuit(self, t: float, reduce: bool = False) -> GateCircuit:
        return evolution_circuit(self.result, t, reduce)


def compile_hamiltonian(H: PauliSum, config: SolverConfig | None = None, cap: int | None = None,
                        h_seed: int | str | None = 0, ansatz: str = "auto") -> Compilation:
    g = generate_algebra(H, cap)
    split = decompose_algebra(H, g, h_seed)
    gens = choose_generators(split, ansatz)
    result = solve(split, H, config, generators=gens)
    return Compilation(H, g, split, result, ansatz)
