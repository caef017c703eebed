"""Pauli strings in symplectic (x, z) encoding and real-weighted Pauli sums.

Site ``k`` of an ``n``-qubit string is stored at bit ``n - 1 - k`` of the
``x`` and ``z`` integers, so the leftmost letter is the most significant
qubit.  This is the same ordering as ``np.kron`` over the letters, which
keeps the dense oracle trivial.

Letters: (x, z) = (0, 0) I, (1, 0) X, (1, 1) Y, (0, 1) Z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


class PauliError(ValueError):
    """Malformed Pauli input or a size mismatch between operands."""


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True, slots=True)
class PauliString:
    """A signless n-qubit Pauli operator."""

    n: int
    x: int
    z: int

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        n = len(label)
        if n == 0:
            raise PauliError("empty Pauli label")
        x = z = 0
        for k, ch in enumerate(label.upper()):
            try:
                xb, zb = _LETTER_BITS[ch]
            except KeyError:
                raise PauliError(f"invalid Pauli letter {ch!r} at position {k} in {label!r}") from None
            shift = n - 1 - k
            x |= xb << shift
            z |= zb << shift
        return cls(n, x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> "PauliString":
        """``letter`` on ``site`` (0-based), identity elsewhere."""
        xb, zb = _LETTER_BITS[letter]
        shift = n - 1 - site
        return cls(n, xb << shift, zb << shift)

    @classmethod
    def from_sites(cls, n: int, letters: Mapping[int, str]) -> "PauliString":
        x = z = 0
        for site, letter in letters.items():
            if not 0 <= site < n:
                raise PauliError(f"site {site} out of range for n={n}")
            xb, zb = _LETTER_BITS[letter]
            x |= xb << (n - 1 - site)
            z |= zb << (n - 1 - site)
        return cls(n, x, z)

    @property
    def label(self) -> str:
        n = self.n
        return "".join(
            _BITS_LETTER[((self.x >> (n - 1 - k)) & 1, (self.z >> (n - 1 - k)) & 1)]
            for k in range(n)
        )

    def letter(self, site: int) -> str:
        shift = self.n - 1 - site
        return _BITS_LETTER[((self.x >> shift) & 1, (self.z >> shift) & 1)]

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> (self.n - 1 - k)) & 1 for k in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> (self.n - 1 - k)) & 1 for k in range(self.n))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x | self.z
        return tuple(k for k in range(self.n) if (mask >> (self.n - 1 - k)) & 1)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def sort_key(self) -> tuple[int, str]:
        # letters I < X < Y < Z are already in ASCII order
        return (self.weight, self.label)

    def __lt__(self, other: "PauliString") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def _check(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise PauliError(f"size mismatch: {p.n} vs {q.n} qubits")


def multiply(p: PauliString, q: PauliString) -> tuple[int, PauliString]:
    """Return ``(k, r)`` with ``p @ q == 1j**k * r``."""
    _check(p, q)
    rx, rz = p.x ^ q.x, p.z ^ q.z
    k = (
        _popcount(p.x & p.z)
        + _popcount(q.x & q.z)
        - _popcount(rx & rz)
        + 2 * _popcount(p.z & q.x)
    ) & 3
    return k, PauliString(p.n, rx, rz)


def commutes(p: PauliString, q: PauliString) -> bool:
    _check(p, q)
    return _popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def commutator(p: PauliString, q: PauliString) -> tuple[int, PauliString] | None:
    """``[p, q] = 2 * 1j**k * r`` for anticommuting inputs, ``None`` otherwise.

    The factor 2 is left to the caller.
    """
    if commutes(p, q):
        return None
    return multiply(p, q)


def i_power(k: int) -> complex:
    return (1, 1j, -1, -1j)[k & 3]


class PauliSum:
    """Linear combination of Pauli strings on a fixed number of qubits.

    Zero coefficients are dropped on construction.  Iteration follows the
    canonical string order (weight, then letters).
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[PauliString, complex] | Iterable[tuple[PauliString, complex]] = (), *, tol: float = 0.0):
        self.n = n
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, complex] = {}
        for p, c in items:
            if p.n != n:
                raise PauliError(f"term {p.label} has {p.n} qubits, expected {n}")
            acc[p] = acc.get(p, 0.0) + c
        self._terms = {
            p: (c.real if isinstance(c, complex) and c.imag == 0 else c)
            for p, c in acc.items()
            if abs(c) > tol
        }

    @classmethod
    def from_labels(cls, terms: Mapping[str, complex] | Iterable[tuple[str, complex]]) -> "PauliSum":
        items = list(terms.items() if isinstance(terms, Mapping) else terms)
        if not items:
            raise PauliError("cannot infer qubit count from an empty term list")
        strings = [(PauliString.from_label(lbl), c) for lbl, c in items]
        return cls(strings[0][0].n, strings)

    @property
    def terms(self) -> dict[PauliString, complex]:
        return dict(self._terms)

    def strings(self) -> list[PauliString]:
        return sorted(self._terms, key=PauliString.sort_key)

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        for p in self.strings():
            yield p, self._terms[p]

    def coeff(self, p: PauliString | str) -> complex:
        if isinstance(p, str):
            p = PauliString.from_label(p)
        return self._terms.get(p, 0.0)

    def is_hermitian(self) -> bool:
        return all(not isinstance(c, complex) or c.imag == 0 for c in self._terms.values())

    def norm(self) -> float:
        """Norm induced by the normalized trace inner product."""
        return math.sqrt(sum(abs(c) ** 2 for c in self._terms.values()))

    def scaled(self, s: float) -> "PauliSum":
        return PauliSum(self.n, {p: s * c for p, c in self._terms.items()})

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n != other.n:
            raise PauliError(f"size mismatch: {self.n} vs {other.n} qubits")
        return PauliSum(self.n, list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scaled(-1.0)

    def __mul__(self, s: float) -> "PauliSum":
        return self.scaled(s)

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.strings())

    def __contains__(self, p: object) -> bool:
        return p in self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return self.n == other.n and all(abs(self.coeff(p) - other.coeff(p)) <= atol for p in keys)

    def __repr__(self) -> str:
        body = " + ".join(f"{c:.6g}*{p.label}" for p, c in self.items())
        return f"PauliSum({body or '0'})"


def inner_product(a: PauliSum, b: PauliSum) -> float:
    """``tr(a b) / 2**n`` for Hermitian sums: the shared-string coefficient dot product."""
    if a.n != b.n:
        raise PauliError(f"size mismatch: {a.n} vs {b.n} qubits")
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    bt = big._terms
    total = 0.0
    for p, c in small._terms.items():
        d = bt.get(p)
        if d is not None:
            total += c * d
    return float(total.real) if isinstance(total, complex) else float(total)


def conjugate_by_rotation(theta: float, k: PauliString, a: PauliSum) -> PauliSum:
    """Exact ``exp(i theta k) a exp(-i theta k)``.

    Terms commuting with ``k`` are untouched; an anticommuting term ``c p``
    becomes ``cos(2 theta) c p + sin(2 theta) c (i k p)``, and ``i k p`` is a
    signed Pauli string.
    """
    if k.n != a.n:
        raise PauliError(f"size mismatch: {k.n} vs {a.n} qubits")
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    out: dict[PauliString, complex] = {}
    for p, c in a._terms.items():
        if commutes(k, p):
            out[p] = out.get(p, 0.0) + c
            continue
        ph, r = multiply(k, p)
        sign = i_power(ph + 1).real
        out[p] = out.get(p, 0.0) + c2 * c
        out[r] = out.get(r, 0.0) + s2 * sign * c
    return PauliSum(a.n, out)
