"""Commutator closure of a set of Pauli strings (the Hamiltonian algebra)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .pauli import PauliError, PauliString, PauliSum, commutes

# numpy path packs each string into int64 words; wider chains use plain ints
_VECTOR_MAX_N = 62


class AlgebraCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int, n: int):
        self.size, self.cap, self.n = size, cap, n
        hint = "exponential growth (Heisenberg-like, ~4^(n-1))" if size > 4 * n * n else "polynomial growth"
        super().__init__(
            f"algebra closure exceeded cap {cap} (reached {size} elements at n={n}); "
            f"size suggests {hint}; raise the cap to continue"
        )


@dataclass(frozen=True)
class AlgebraBasis:
    n: int
    elements: tuple[PauliString, ...]
    index: dict[PauliString, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.index:
            object.__setattr__(self, "index", {p: i for i, p in enumerate(self.elements)})

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.elements)

    def __contains__(self, p: object) -> bool:
        return p in self.index

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.elements]

    def is_closed(self) -> bool:
        """Exhaustive pairwise check that every nonzero commutator lands in the basis."""
        els = self.elements
        for i, p in enumerate(els):
            for q in els[i + 1:]:
                if not commutes(p, q) and PauliString(self.n, p.x ^ q.x, p.z ^ q.z) not in self.index:
                    return False
        return True


def default_cap(n: int) -> int:
    return 16 * n * n


def _canonical(strings: Iterable[PauliString]) -> list[PauliString]:
    return sorted(set(strings), key=PauliString.sort_key)


def close_strings(n: int, generators: Sequence[PauliString], cap: int | None = None) -> AlgebraBasis:
    """Breadth-first commutator closure of ``generators``.

    Each round commutes the previous round's discoveries against everything
    known so far; the new strings are appended in canonical order, so the
    result does not depend on the order of ``generators``.
    """
    cap = default_cap(n) if cap is None else cap
    gens = _canonical(generators)
    if not gens:
        raise PauliError("cannot close an empty generator set")
    if any(g.n != n for g in gens):
        raise PauliError("generator size mismatch")
    if any(g.is_identity() for g in gens):
        gens = [g for g in gens if not g.is_identity()]
    if cap < len(gens):
        raise ValueError(f"cap {cap} is below the number of generators {len(gens)}")

    elements = list(gens)
    seen = set(elements)
    frontier = list(elements)
    vector = n <= _VECTOR_MAX_N
    if vector:
        xs = np.array([p.x for p in elements], dtype=np.int64)
        zs = np.array([p.z for p in elements], dtype=np.int64)

    while frontier:
        found: set[PauliString] = set()
        if vector:
            for p in frontier:
                anti = (np.bitwise_count((xs & p.z) ^ (zs & p.x)) & 1).astype(bool)
                if not anti.any():
                    continue
                rx, rz = xs[anti] ^ p.x, zs[anti] ^ p.z
                for a, b in zip(rx.tolist(), rz.tolist()):
                    r = PauliString(n, a, b)
                    if r not in seen:
                        found.add(r)
        else:
            for p in frontier:
                for q in elements:
                    if not commutes(p, q):
                        r = PauliString(n, p.x ^ q.x, p.z ^ q.z)
                        if r not in seen:
                            found.add(r)
        frontier = _canonical(found)
        if len(elements) + len(frontier) > cap:
            raise AlgebraCapExceeded(len(elements) + len(frontier), cap, n)
        elements.extend(frontier)
        seen.update(frontier)
        if vector and frontier:
            xs = np.concatenate([xs, np.array([p.x for p in frontier], dtype=np.int64)])
            zs = np.concatenate([zs, np.array([p.z for p in frontier], dtype=np.int64)])
    return AlgebraBasis(n, tuple(elements))


def generate_algebra(H: PauliSum, cap: int | None = None) -> AlgebraBasis:
    """Closure of the Pauli terms of ``H`` (plus any extra closure strings it carries)."""
    if len(H) == 0 and not getattr(H, "closure_strings", ()):
        raise PauliError("zero Hamiltonian has no algebra")
    gens = list(H.strings()) + list(getattr(H, "closure_strings", ()))
    return close_strings(H.n, gens, cap)


def expected_dimension(kind: str, n: int) -> int:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if kind == "XY":
        return n * (n - 1)
    if kind in ("TFIM", "TFXY"):
        return n * (2 * n - 1)
    if kind == "Heisenberg":
        return 4 ** (n - 1) - 4
    raise ValueError(f"no closed-form dimension for model kind {kind!r}")


def _hat(n: int, i: int, a: str, j: int, b: str) -> PauliString:
    """``a`` on site i, Z on the sites strictly between, ``b`` on site j."""
    letters = {i: a, j: b}
    letters.update({s: "Z" for s in range(i + 1, j)})
    return PauliString.from_sites(n, letters)


def predicted_strings(kind: str, n: int) -> set[PauliString]:
    """Closed-form basis of the nearest-neighbour model algebras."""
    out: set[PauliString] = set()
    if kind in ("XY", "TFXY", "TFIM"):
        for i in range(n):
            for j in range(i + 1, n):
                d = j - i
                if kind == "XY":
                    pairs = ("XX", "YY") if d % 2 else ("XY", "YX")
                else:
                    pairs = ("XX", "YY", "XY", "YX")
                for ab in pairs:
                    out.add(_hat(n, i, ab[0], j, ab[1]))
        if kind != "XY":
            out.update(PauliString.single(n, s, "Z") for s in range(n))
        if kind == "TFIM":
            # the Ising chain is the XY-with-field chain with X and Z exchanged
            out = {PauliString(n, p.z, p.x) for p in out}
        return out
    if kind == "Heisenberg":
        full = (1 << n) - 1
        xn, yn, zn = PauliString(n, full, 0), PauliString(n, full, full), PauliString(n, 0, full)
        for x in range(1 << n):
            for z in range(1 << n):
                p = PauliString(n, x, z)
                if p.is_identity() or not (commutes(p, xn) and commutes(p, yn)):
                    continue
                out.add(p)
        if n > 2:
            out -= {xn, yn, zn}
        return out
    raise ValueError(f"no closed-form basis for model kind {kind!r}")


@dataclass
class StructureReport:
    ok: bool
    missing: list[str]
    unexpected: list[str]

    def __bool__(self) -> bool:
        return self.ok


def verify_structure(basis: AlgebraBasis, kind: str) -> StructureReport:
    """Compare a computed basis with the closed-form string set for ``kind``."""
    want = predicted_strings(kind, basis.n)
    have = set(basis.elements)
    missing = sorted(want - have, key=PauliString.sort_key)
    extra = sorted(have - want, key=PauliString.sort_key)
    return StructureReport(not missing and not extra, [p.label for p in missing], [p.label for p in extra])
