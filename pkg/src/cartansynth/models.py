"""Nearest-neighbour spin-chain Hamiltonians and the JSON Hamiltonian format."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pauli import PauliError, PauliString, PauliSum

KINDS = ("XY", "TFIM", "TFXY", "Heisenberg", "File")


class ModelError(ValueError):
    pass


class HamiltonianParseError(ModelError):
    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class Hamiltonian(PauliSum):
    """A Pauli sum with real coefficients.

    ``closure_strings`` are extra strings fed to the algebra closure on top
    of the terms themselves.  Transverse-field models use it to keep the
    field strings in the algebra when a sampled field is exactly zero.
    """

    __slots__ = ("closure_strings", "kind")

    def __init__(self, n, terms=(), *, closure_strings: Sequence[PauliString] = (), kind: str = "File"):
        super().__init__(n, terms)
        for p, c in self._terms.items():
            if isinstance(c, complex):
                raise ModelError(f"coefficient of {p.label} is not real: {c}")
            if not math.isfinite(c):
                raise ModelError(f"coefficient of {p.label} is not finite: {c}")
        self.closure_strings = tuple(closure_strings)
        self.kind = kind

    @classmethod
    def from_sum(cls, s: PauliSum, **kw) -> "Hamiltonian":
        return cls(s.n, s.terms, **kw)

    def generators(self) -> list[PauliString]:
        return sorted(set(self.strings()) | set(self.closure_strings), key=PauliString.sort_key)

    def scaled(self, s: float) -> "Hamiltonian":
        return Hamiltonian(
            self.n, {p: s * c for p, c in self._terms.items()},
            closure_strings=self.closure_strings, kind=self.kind,
        )


@dataclass
class ModelParams:
    """Parameters for :func:`build_model`.

    ``a``, ``b``, ``c`` default to unit couplings.  For TFIM/TFXY the field
    vector is ``fields`` when given, otherwise ``n`` samples of
    ``Normal(0, sigma**2)`` from :func:`normal_samples` with ``seed``.
    """

    kind: str
    n: int
    a: Sequence[float] | None = None
    b: Sequence[float] | None = None
    c: Sequence[float] | None = None
    fields: Sequence[float] | None = None
    sigma: float = 0.0
    seed: int = 0
    normalize: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.kind not in KINDS or self.kind == "File":
            raise ModelError(f"unsupported model kind {self.kind!r}; expected one of XY, TFIM, TFXY, Heisenberg")
        if self.n < 2:
            raise ModelError(f"n must be >= 2, got {self.n}")
        if not self.sigma >= 0:
            raise ModelError(f"sigma must be >= 0, got {self.sigma}")
        for name in ("a", "b", "c"):
            vals = getattr(self, name)
            if vals is not None and len(vals) != self.n - 1:
                raise ModelError(f"{name} needs {self.n - 1} bond values, got {len(vals)}")
        if self.fields is not None and len(self.fields) != self.n:
            raise ModelError(f"fields needs {self.n} site values, got {len(self.fields)}")


def normal_samples(count: int, sigma: float, seed: int) -> np.ndarray:
    """``count`` draws from Normal(0, sigma**2), reproducible across languages.

    Raw 64-bit words come from Philox4x64-10 keyed by ``seed`` with a zero
    counter.  Each normal uses two words: ``u = (w >> 11) * 2**-53`` and
    Box-Muller ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`` (cosine branch only).
    """
    if count == 0:
        return np.zeros(0)
    bitgen = np.random.Philox(key=seed & (2**64 - 1))
    words = bitgen.random_raw(2 * count).astype(np.uint64)
    u = (words >> np.uint64(11)).astype(np.float64) * 2.0**-53
    u1, u2 = u[0::2], u[1::2]
    z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
    return sigma * z


def _bond(n: int, i: int, letter: str) -> PauliString:
    return PauliString.from_sites(n, {i: letter, i + 1: letter})


def build_model(params: ModelParams) -> Hamiltonian:
    """Open-boundary nearest-neighbour chain.

    XY:         sum a_i X_i X_{i+1} + b_i Y_i Y_{i+1}
    TFXY:       sum a_i X_i X_{i+1} + b_i Y_i Y_{i+1} + sum h_i Z_i
    TFIM:       sum a_i Z_i Z_{i+1} + sum h_i X_i
    Heisenberg: sum a_i XX + b_i YY + c_i ZZ
    """
    params.validate()
    n, kind = params.n, params.kind
    ones = [1.0] * (n - 1)
    a = list(params.a) if params.a is not None else ones
    b = list(params.b) if params.b is not None else ones
    c = list(params.c) if params.c is not None else ones
    terms: dict[PauliString, float] = {}
    closure: list[PauliString] = []

    def add(p: PauliString, v: float) -> None:
        if v != 0.0:
            terms[p] = terms.get(p, 0.0) + float(v)

    if kind in ("XY", "TFXY", "Heisenberg"):
        for i in range(n - 1):
            add(_bond(n, i, "X"), a[i])
            add(_bond(n, i, "Y"), b[i])
            if kind == "Heisenberg":
                add(_bond(n, i, "Z"), c[i])
    if kind == "TFIM":
        for i in range(n - 1):
            add(_bond(n, i, "Z"), a[i])
    if kind in ("TFIM", "TFXY"):
        h = np.asarray(params.fields, float) if params.fields is not None else normal_samples(n, params.sigma, params.seed)
        letter = "Z" if kind == "TFXY" else "X"
        for i in range(n):
            p = PauliString.single(n, i, letter)
            closure.append(p)
            add(p, float(h[i]))
    if not terms:
        raise ModelError("model has no nonzero terms")
    H = Hamiltonian(n, terms, closure_strings=closure, kind=kind)
    return normalize_hamiltonian(H) if params.normalize else H


def normalize_hamiltonian(H: Hamiltonian) -> Hamiltonian:
    """Scale so that the raw trace ``tr(H^2) = 2^n sum_j H_j^2`` equals 1."""
    sq = sum(c * c for c in H.terms.values())
    if sq == 0:
        raise ModelError("zero Hamiltonian cannot be normalized")
    return H.scaled(1.0 / math.sqrt(2.0**H.n * sq))


def raw_trace_norm_sq(H: PauliSum) -> float:
    return 2.0**H.n * sum(abs(c) ** 2 for c in H.terms.values())


def parse_hamiltonian_file(text: str) -> Hamiltonian:
    """Parse ``{"n": int, "terms": [{"pauli": str, "coeff": float}, ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise HamiltonianParseError(e.msg, f"line {e.lineno} column {e.colno}") from None
    if not isinstance(doc, dict):
        raise HamiltonianParseError("top level must be an object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise HamiltonianParseError(f"'n' must be a positive integer, got {n!r}", "n")
    raw = doc.get("terms")
    if not isinstance(raw, list):
        raise HamiltonianParseError("'terms' must be a list", "terms")
    if not raw:
        raise HamiltonianParseError("zero Hamiltonian: empty terms list", "terms")
    terms: list[tuple[PauliString, float]] = []
    for idx, t in enumerate(raw):
        loc = f"terms[{idx}]"
        if not isinstance(t, dict):
            raise HamiltonianParseError("term must be an object", loc)
        label = t.get("pauli")
        if not isinstance(label, str):
            raise HamiltonianParseError("'pauli' must be a string", f"{loc}.pauli")
        if len(label) != n:
            raise HamiltonianParseError(f"dimension mismatch: {label!r} has length {len(label)}, expected {n}", f"{loc}.pauli")
        try:
            p = PauliString.from_label(label)
        except PauliError as e:
            raise HamiltonianParseError(str(e), f"{loc}.pauli") from None
        coeff = t.get("coeff")
        if isinstance(coeff, bool) or not isinstance(coeff, (int, float)):
            raise HamiltonianParseError(f"'coeff' must be a real number, got {coeff!r}", f"{loc}.coeff")
        if not math.isfinite(coeff):
            raise HamiltonianParseError("'coeff' must be finite", f"{loc}.coeff")
        terms.append((p, float(coeff)))
    H = Hamiltonian(n, terms, kind="File")
    if len(H) == 0:
        raise HamiltonianParseError("zero Hamiltonian: all coefficients cancel", "terms")
    return H


def hamiltonian_to_json(H: PauliSum) -> str:
    return json.dumps(
        {"n": H.n, "terms": [{"pauli": p.label, "coeff": float(c.real if isinstance(c, complex) else c)} for p, c in H.items()]},
        indent=2,
    )
