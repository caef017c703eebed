"""Dense-matrix ground truth: operators, circuit simulation, Trotter baseline."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .circuits import Gate, GateCircuit, lower_layer, pauli_rotation_circuit
from .pauli import PauliString, PauliSum

DEFAULT_CAP = 12


class OracleCapExceeded(ValueError):
    pass


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise OracleCapExceeded(f"dense oracle limited to {cap} qubits, got {n}")


def pauli_matrix(P: PauliString) -> np.ndarray:
    """Dense ``P``: ``P|b> = i^y (-1)^popcount(z & b) |b ^ x>`` in kron order."""
    dim = 1 << P.n
    b = np.arange(dim, dtype=np.int64)
    parity = np.bitwise_count(b & P.z) & 1
    vals = (1j ** P.y_count) * (1 - 2 * parity.astype(np.float64))
    M = np.zeros((dim, dim), dtype=complex)
    M[b ^ P.x, b] = vals
    return M


def dense_operator(A: PauliSum, cap: int = DEFAULT_CAP) -> np.ndarray:
    _check_cap(A.n, cap)
    dim = 1 << A.n
    M = np.zeros((dim, dim), dtype=complex)
    b = np.arange(dim, dtype=np.int64)
    for P, c in A.items():
        parity = np.bitwise_count(b & P.z) & 1
        M[b ^ P.x, b] += c * (1j ** P.y_count) * (1 - 2 * parity.astype(np.float64))
    return M


class Spectral:
    """Eigendecomposition of a Hermitian operator, reused across evolution times."""

    def __init__(self, H: PauliSum | np.ndarray, cap: int = DEFAULT_CAP):
        M = dense_operator(H, cap) if isinstance(H, PauliSum) else np.asarray(H)
        self.evals, self.evecs = np.linalg.eigh(M)

    def unitary(self, t: float) -> np.ndarray:
        return (self.evecs * np.exp(-1j * t * self.evals)) @ self.evecs.conj().T

    def evolve(self, psi: np.ndarray, t: float) -> np.ndarray:
        return self.evecs @ (np.exp(-1j * t * self.evals) * (self.evecs.conj().T @ psi))


def exact_unitary(H: PauliSum, t: float, cap: int = DEFAULT_CAP) -> np.ndarray:
    return Spectral(H, cap).unitary(t)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j])


def gate_matrix(g: Gate) -> np.ndarray:
    if g.kind == "H":
        return _H
    if g.kind == "S":
        return _S
    if g.kind == "SDG":
        return _S.conj()
    c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
    if g.kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if g.kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if g.kind == "RZ":
        return np.diag([c - 1j * s, c + 1j * s])
    raise ValueError(f"{g.kind} is not a single-qubit gate")


def apply_gate(state: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Apply ``g`` to a (2^n,) vector or (2^n, m) block of columns."""
    cols = state.reshape(1 << n, -1)
    m = cols.shape[1]
    if g.kind == "CNOT":
        c, t = g.sites
        psi = cols.reshape([2] * n + [m]).copy()
        idx: list = [slice(None)] * (n + 1)
        idx[c] = 1
        sub = psi[tuple(idx)]
        tt = t if t < c else t - 1
        psi[tuple(idx)] = np.flip(sub, axis=tt)
        return psi.reshape(state.shape)
    q = g.sites[0]
    G = gate_matrix(g)
    psi = cols.reshape(1 << q, 2, 1 << (n - q - 1), m)
    out = np.einsum("ab,ibjm->iajm", G, psi)
    return out.reshape(state.shape)


def simulate(c: GateCircuit, psi: np.ndarray) -> np.ndarray:
    for g in c.gates:
        psi = apply_gate(psi, g, c.n)
    return psi


def circuit_unitary(c: GateCircuit, cap: int = DEFAULT_CAP) -> np.ndarray:
    _check_cap(c.n, cap)
    return simulate(c, np.eye(1 << c.n, dtype=complex))


def unitary_distance(U: np.ndarray, V: np.ndarray) -> float:
    """``min_phi || U - exp(i phi) V ||_2``.

    All eigenvalues of V^dag U lie on the unit circle; the best phase sits in
    the middle of the shortest arc covering them, and the distance is the
    chord from there to the arc's end.
    """
    phases = np.sort(np.angle(np.linalg.eigvals(V.conj().T @ U)))
    if len(phases) == 1:
        return 0.0
    gaps = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
    arc = 2 * np.pi - gaps.max()
    return float(2 * math.sin(arc / 4))


def _step_groups(H: PauliSum, grouping: str) -> list[list[tuple[PauliString, float]]]:
    if grouping not in ("bond", "per-term"):
        raise ValueError(f"unknown grouping {grouping!r}")
    items = [(p, float(c)) for p, c in H.items() if not p.is_identity()]
    groups: list[list[tuple[PauliString, float]]] = []
    rest = []
    by_bond: dict[int, list] = {}
    for p, c in items:
        sup = p.support
        if len(sup) == 2 and sup[1] == sup[0] + 1:
            by_bond.setdefault(sup[0], []).append((p, c))
        else:
            rest.append((p, c))
    for b in sorted(by_bond):
        groups.append(by_bond[b])
    groups += [[it] for it in rest]
    if grouping == "per-term":
        return [[it] for g in groups for it in g]
    return groups


def trotter_circuit(H: PauliSum, t: float, steps: int, grouping: str = "bond") -> GateCircuit:
    """First-order product formula; gates applied bonds left to right, then the rest.

    With ``grouping="bond"`` a bond's commuting XX + YY pair becomes one
    2-CNOT block.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    dt = t / steps
    one = GateCircuit(H.n, [], "trotter")
    for grp in _step_groups(H, grouping):
        if len(grp) == 2 and grouping == "bond":
            one.extend(lower_layer([(p, -c * dt) for p, c in grp], H.n, merge_pairs=True).gates)
        else:
            for p, c in grp:
                one.extend(pauli_rotation_circuit(c * dt, p).gates)
    circ = GateCircuit(H.n, one.gates * steps, "trotter")
    circ.meta = {"t": t, "steps": steps, "grouping": grouping, "total_cnots": circ.cnot_count}
    return circ


def displacement_observable(n: int) -> PauliSum:
    """``sum_r r (1 - Z_r) / 2`` with sites counted from 0."""
    terms = {PauliString.identity(n): sum(r for r in range(n)) / 2.0}
    for r in range(1, n):
        terms[PauliString.single(n, r, "Z")] = -r / 2.0
    return PauliSum(n, terms)


def displacement_diagonal(n: int) -> np.ndarray:
    """Eigenvalues of the displacement operator on the computational basis."""
    b = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n)
    for r in range(n):
        out += r * ((b >> (n - 1 - r)) & 1)
    return out


def basis_state(n: int, flipped: Sequence[int] = ()) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[sum(1 << (n - 1 - s) for s in flipped)] = 1.0
    return psi

