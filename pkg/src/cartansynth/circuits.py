"""Gate-level circuits and lowering of Pauli-exponential layers.

Conventions used throughout:

* A ``RotationLayer`` is a list of ``(P, theta)`` read as the matrix product
  ``exp(i theta_0 P_0) exp(i theta_1 P_1) ...`` (leftmost factor first).
* A ``GateCircuit`` lists gates in application order, so lowering a layer
  emits its factors right to left.
* ``RZ(phi) = exp(-i phi Z / 2)``, likewise ``RX``, ``RY``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .pauli import PauliString, commutes

RotationLayer = list[tuple[PauliString, float]]

GATE_KINDS = ("CNOT", "RX", "RY", "RZ", "H", "S", "SDG")
_QASM_NAMES = {"CNOT": "cx", "RX": "rx", "RY": "ry", "RZ": "rz", "H": "h", "S": "s", "SDG": "sdg"}


@dataclass(frozen=True)
class Gate:
    kind: str
    sites: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate {self.kind!r}")
        if len(self.sites) != (2 if self.kind == "CNOT" else 1):
            raise ValueError(f"{self.kind} takes {2 if self.kind == 'CNOT' else 1} sites, got {self.sites}")
        if (self.angle is not None) != (self.kind in ("RX", "RY", "RZ")):
            raise ValueError(f"{self.kind} angle mismatch")
        if self.angle is not None and not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")

    def inverse(self) -> "Gate":
        if self.angle is not None:
            return Gate(self.kind, self.sites, -self.angle)
        return Gate({"S": "SDG", "SDG": "S"}.get(self.kind, self.kind), self.sites)

    def to_dict(self) -> dict:
        d: dict = {"gate": self.kind, "sites": list(self.sites)}
        if self.angle is not None:
            d["angle"] = self.angle
        return d


def cnot(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def rz(q: int, phi: float) -> Gate:
    return Gate("RZ", (q,), float(phi))


def rx(q: int, phi: float) -> Gate:
    return Gate("RX", (q,), float(phi))


@dataclass
class GateCircuit:
    n: int
    gates: list[Gate] = field(default_factory=list)
    source: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if any(not 0 <= s < self.n for s in g.sites):
            raise ValueError(f"gate {g} acts outside {self.n} qubits")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def __add__(self, other: "GateCircuit") -> "GateCircuit":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        return GateCircuit(self.n, self.gates + other.gates, self.source)

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> "GateCircuit":
        return GateCircuit(self.n, [g.inverse() for g in reversed(self.gates)], self.source)

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == "CNOT")

    def to_qasm(self) -> str:
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n}];"]
        for g in self.gates:
            args = ",".join(f"q[{s}]" for s in g.sites)
            name = _QASM_NAMES[g.kind]
            lines.append(f"{name}({g.angle!r}) {args};" if g.angle is not None else f"{name} {args};")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "source": self.source,
            "cnot_count": self.cnot_count,
            "meta": self.meta,
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "GateCircuit":
        gates = [Gate(g["gate"], tuple(g["sites"]), g.get("angle")) for g in d["gates"]]
        return cls(d["n"], gates, d.get("source", ""), d.get("meta", {}))


def cnot_count(c: GateCircuit) -> int:
    return c.cnot_count


def pauli_rotation_circuit(angle: float, P: PauliString) -> GateCircuit:
    """Gates for ``exp(-i angle P)``: basis change, CNOT ladder, RZ(2 angle), undo."""
    if P.is_identity():
        raise ValueError("cannot lower a rotation about the identity")
    sup = P.support
    pre: list[Gate] = []
    post: list[Gate] = []
    for s in sup:
        L = P.letter(s)
        if L == "X":
            pre.append(Gate("H", (s,)))
            post.append(Gate("H", (s,)))
        elif L == "Y":
            pre.append(rx(s, math.pi / 2))
            post.append(rx(s, -math.pi / 2))
    ladder = [cnot(a, b) for a, b in zip(sup, sup[1:])]
    gates = pre + ladder + [rz(sup[-1], 2.0 * angle)] + ladder[::-1] + post
    return GateCircuit(P.n, gates, "rotation")


# --- two-qubit commuting pairs --------------------------------------------------

_PAULI_2 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_H2 = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S2 = np.diag([1, 1j])


def _conj_letter(U: np.ndarray, L: str) -> tuple[int, str]:
    """``U P_L U^dag = sign * P_out`` for a single-qubit Clifford ``U``."""
    M = U @ _PAULI_2[L] @ U.conj().T
    for out in "XYZ":
        c = np.trace(_PAULI_2[out] @ M).real / 2
        if abs(abs(c) - 1) < 1e-9:
            return (1 if c > 0 else -1), out
    raise AssertionError("not a Clifford")


@lru_cache(maxsize=None)
def _single_cliffords() -> tuple[tuple[tuple[str, ...], dict], ...]:
    """The 24 single-qubit Cliffords as shortest H/S words with their Pauli action."""
    found: dict[tuple, tuple[str, ...]] = {}
    out = []
    for length in range(0, 8):
        for word in itertools.product("HS", repeat=length):
            U = np.eye(2, dtype=complex)
            for w in word:
                U = (_H2 if w == "H" else _S2) @ U
            action = tuple(_conj_letter(U, L) for L in "XYZ")
            if action not in found:
                found[action] = word
                out.append((word, dict(zip("XYZ", action))))
        if len(out) == 24:
            break
    return tuple(out)


def _word_gates(word: Sequence[str], q: int) -> list[Gate]:
    return [Gate("H" if w == "H" else "S", (q,)) for w in word]


def _find_frame(pa: str, qa: str, target_p: str, target_q: str):
    for word, act in _single_cliffords():
        sp, lp = act[pa]
        sq, lq = act[qa]
        if lp == target_p and lq == target_q:
            return word, sp, sq
    raise ValueError(f"no Clifford maps ({pa}, {qa}) to ({target_p}, {target_q})")


def is_pair_block(P: PauliString, Q: PauliString) -> bool:
    """Two commuting strings on the same two sites with different letters on each."""
    if P.weight != 2 or P.support != Q.support or not commutes(P, Q):
        return False
    return all(P.letter(s) != Q.letter(s) for s in P.support)


def pair_rotation_circuit(theta: float, P: PauliString, phi: float, Q: PauliString) -> GateCircuit:
    """Gates for ``exp(i (theta P + phi Q))`` with two CNOTs.

    Single-qubit Cliffords send P to +-XX and Q to +-ZZ; there
    ``CNOT (XX) CNOT = X_a`` and ``CNOT (ZZ) CNOT = Z_b``.
    """
    if not is_pair_block(P, Q):
        raise ValueError(f"{P.label}, {Q.label} do not form a two-site commuting pair")
    a, b = P.support
    wa, sa_p, sa_q = _find_frame(P.letter(a), Q.letter(a), "X", "Z")
    wb, sb_p, sb_q = _find_frame(P.letter(b), Q.letter(b), "X", "Z")
    sp, sq = sa_p * sb_p, sa_q * sb_q
    frame = _word_gates(wa, a) + _word_gates(wb, b)
    core = [cnot(a, b), rx(a, -2.0 * theta * sp), rz(b, -2.0 * phi * sq), cnot(a, b)]
    undo = [g.inverse() for g in reversed(frame)]
    return GateCircuit(P.n, frame + core + undo, "pair")


def lower_layer(layer: RotationLayer, n: int, merge_pairs: bool = True, source: str = "") -> GateCircuit:
    """Gates for the product ``prod exp(i theta P)`` of a rotation layer.

    With ``merge_pairs`` adjacent factors forming a two-site commuting pair
    are emitted as one 2-CNOT block.  Zero-angle factors are skipped.
    """
    circ = GateCircuit(n, [], source)
    items = [(P, float(t)) for P, t in layer if t != 0.0]
    blocks: list[list[tuple[PauliString, float]]] = []
    i = 0
    while i < len(items):
        if merge_pairs and i + 1 < len(items) and is_pair_block(items[i][0], items[i + 1][0]):
            blocks.append([items[i], items[i + 1]])
            i += 2
        else:
            blocks.append([items[i]])
            i += 1
    for blk in reversed(blocks):
        if len(blk) == 2:
            (P, t), (Q, u) = blk
            circ.extend(pair_rotation_circuit(t, P, u, Q).gates)
        else:
            P, t = blk[0]
            if P.is_identity():
                continue  # global phase
            circ.extend(pauli_rotation_circuit(-t, P).gates)
    return circ


def evolution_layer(k_layer: RotationLayer, h_terms: Sequence[tuple[PauliString, float]], t: float) -> RotationLayer:
    """``K exp(-i t h) K^dag`` as one layer; only the middle angles depend on ``t``."""
    middle = [(p, -t * c) for p, c in h_terms]
    return list(k_layer) + middle + [(P, -a) for P, a in reversed(k_layer)]


def synthesize_evolution(result, t: float, k_layer: RotationLayer | None = None,
                         merge_pairs: bool | None = None) -> GateCircuit:
    """Circuit for ``U(t) = K exp(-i h t) K^dag`` from a decomposition result.

    ``k_layer`` replaces the raw factorization of K (e.g. the compressed
    TFXY form); it must represent the same unitary.  Pair merging defaults
    to on only in that case, so the raw circuit keeps one block per factor.
    """
    if merge_pairs is None:
        merge_pairs = k_layer is not None
    layer = list(k_layer) if k_layer is not None else result.k_fact.layer()
    h_terms = list(zip(result.h_basis, map(float, result.h_coeffs)))
    full = evolution_layer(layer, h_terms, t)
    circ = lower_layer(full, result.n, merge_pairs=merge_pairs, source="evolution")
    k_circ = lower_layer(layer, result.n, merge_pairs=merge_pairs)
    circ.meta = {"t": t, "k_cnots": k_circ.cnot_count, "total_cnots": circ.cnot_count}
    return circ
