"""Involutions on Pauli-string algebras, the k + m split, and a Cartan subalgebra of m."""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Sequence

from .algebra import AlgebraBasis
from .pauli import PauliError, PauliString, PauliSum, commutes

CLASSES = ("AI", "AII", "AIII")
EXHAUSTIVE_PAIR_LIMIT = 10**6
SAMPLED_PAIRS = 10**5


class CartanError(RuntimeError):
    pass


@dataclass(frozen=True)
class InvolutionDescriptor:
    """``AI``/``AII``: theta(g) = -B g^T B;  ``AIII``: theta(g) = B g B."""

    kind: str
    B: PauliString

    def __post_init__(self):
        if self.kind not in CLASSES:
            raise ValueError(f"unknown involution class {self.kind!r}")
        if self.kind in ("AI", "AII") and (self.B.y_count % 2 == 1) != (self.kind == "AII"):
            raise ValueError(f"class {self.kind} needs a string with {'odd' if self.kind == 'AII' else 'even'} Y count, got {self.B.label}")

    def to_dict(self) -> dict:
        return {"class": self.kind, "B": self.B.label}


def apply_involution(desc: InvolutionDescriptor, p: PauliString) -> int:
    """Sign ``s`` with theta(p) = s p."""
    if desc.B.n != p.n:
        raise PauliError(f"size mismatch: {desc.B.n} vs {p.n} qubits")
    c = 1 if commutes(desc.B, p) else -1
    if desc.kind == "AIII":
        return c
    return -c if p.y_count % 2 == 0 else c


def _candidates(n: int, g: AlgebraBasis):
    yield InvolutionDescriptor("AI", PauliString.identity(n))
    singles = sorted(
        (PauliString.single(n, s, L) for s in range(n) for L in "XYZ"), key=PauliString.sort_key
    )
    for pool in (singles, g.elements):
        for B in pool:
            yield InvolutionDescriptor("AII" if B.y_count % 2 else "AI", B)
            yield InvolutionDescriptor("AIII", B)


def find_involution(H: PauliSum, g: AlgebraBasis) -> InvolutionDescriptor:
    """First candidate in the search order that negates every generator of ``H``."""
    gens = list(H.strings()) + list(getattr(H, "closure_strings", ()))
    tried = 0
    for desc in _candidates(H.n, g):
        tried += 1
        if all(apply_involution(desc, p) == -1 for p in gens):
            return desc
    raise CartanError(f"no single-string involution negates H (searched {tried} candidates)")


@dataclass(frozen=True)
class CartanSplit:
    g: AlgebraBasis
    k_basis: tuple[PauliString, ...]
    m_basis: tuple[PauliString, ...]
    h_basis: tuple[PauliString, ...]
    involution: InvolutionDescriptor

    @property
    def n(self) -> int:
        return self.g.n

    def with_h(self, h_basis: Sequence[PauliString]) -> "CartanSplit":
        return replace(self, h_basis=tuple(h_basis))

    def summary(self) -> dict:
        return {
            "involution": self.involution.to_dict(),
            "dim_g": len(self.g),
            "dim_k": len(self.k_basis),
            "dim_m": len(self.m_basis),
            "dim_h": len(self.h_basis),
            "k": [p.label for p in self.k_basis],
            "m": [p.label for p in self.m_basis],
            "h": [p.label for p in self.h_basis],
        }


def check_relations(g: AlgebraBasis, desc: InvolutionDescriptor, seed: int = 0) -> None:
    """Verify [k,k] in k, [m,m] in k, [k,m] in m by pairwise products.

    Exhaustive up to ``EXHAUSTIVE_PAIR_LIMIT`` pairs, otherwise a seeded sample.
    """
    els = g.elements
    sign = {p: apply_involution(desc, p) for p in els}
    N = len(els)
    npairs = N * (N - 1) // 2
    if npairs <= EXHAUSTIVE_PAIR_LIMIT:
        pairs = ((i, j) for i in range(N) for j in range(i + 1, N))
    else:
        rng = random.Random(seed)
        pairs = ((i, j) for i, j in (rng.sample(range(N), 2) for _ in range(SAMPLED_PAIRS)))
    for i, j in pairs:
        p, q = els[i], els[j]
        if commutes(p, q):
            continue
        r = PauliString(g.n, p.x ^ q.x, p.z ^ q.z)
        if r not in g.index:
            raise CartanError(f"[{p.label}, {q.label}] = {r.label} is outside the algebra")
        if sign[r] != sign[p] * sign[q]:
            raise CartanError(f"involution does not preserve [{p.label}, {q.label}]")


def cartan_split(g: AlgebraBasis, desc: InvolutionDescriptor, H: PauliSum, check: bool = True) -> CartanSplit:
    k = [p for p in g.elements if apply_involution(desc, p) == 1]
    m = [p for p in g.elements if apply_involution(desc, p) == -1]
    mset = set(m)
    outside = [p.label for p in H.strings() if p not in mset]
    if outside:
        raise CartanError(f"Hamiltonian terms not in m: {', '.join(outside)}")
    if check:
        check_relations(g, desc)
    return CartanSplit(
        g,
        tuple(sorted(k, key=PauliString.sort_key)),
        tuple(sorted(m, key=PauliString.sort_key)),
        (),
        desc,
    )


def cartan_subalgebra(split: CartanSplit, seed_index: int = 0) -> tuple[PauliString, ...]:
    """Greedy maximal commuting set in m grown from ``m_basis[seed_index]``.

    Returned in canonical order.
    """
    m = split.m_basis
    if not m:
        raise CartanError("m is empty")
    if not 0 <= seed_index < len(m):
        raise IndexError(f"seed index {seed_index} out of range for |m| = {len(m)}")
    h = [m[seed_index]]
    for p in m:
        if p != h[0] and all(commutes(p, q) for q in h):
            h.append(p)
    return tuple(sorted(h, key=PauliString.sort_key))


def is_maximal_abelian(h: Sequence[PauliString], m: Sequence[PauliString]) -> bool:
    hs = set(h)
    if any(not commutes(a, b) for a in h for b in h):
        return False
    return all(any(not commutes(p, q) for q in h) for p in m if p not in hs)


def decompose_algebra(H: PauliSum, g: AlgebraBasis, h_seed: int | str | None = 0) -> CartanSplit:
    """Involution search, split, and Cartan subalgebra in one call.

    ``h_seed`` is an index into ``m_basis`` or the label of an m string.
    """
    desc = find_involution(H, g)
    split = cartan_split(g, desc, H)
    if isinstance(h_seed, str):
        p = PauliString.from_label(h_seed)
        if p not in split.m_basis:
            raise CartanError(f"h seed {h_seed} is not in m")
        idx = split.m_basis.index(p)
    else:
        idx = h_seed or 0
    return split.with_h(cartan_subalgebra(split, idx))
