"""Compression of the TFXY K circuit from O(n^3) to n(n-1) CNOTs.

Notation (0-based sites, ``L = n - 1``):

* red strings ``Y_a Z...Z X_j`` and green strings ``X_a Z...Z Y_j`` (a < j);
  the nearest-neighbour ones on bond ``b`` are ``Y_b X_{b+1}`` and
  ``X_b Y_{b+1}``.
* a *triangle* anchored at ``a`` is ``prod_{j=a+1..L} exp(i t_j Y_a..X_j)``.
* a *V* over bonds ``lo..hi`` is bonds ``hi, hi-1, ..., lo, lo+1, ..., hi``
  and a *Lambda* is ``lo, ..., hi, ..., lo`` (nearest-neighbour factors).

Every step is an exact identity in an su(2) spanned by three strings,
evaluated in its 2x2 representation.  Passes:

1. triangle -> V by repeatedly splitting the last two factors;
2. V <-> Lambda by induction on the span (``flip_zigzag``);
3. the product of all Vs of one colour -> a pile of descending runs
   ``prod_{a} (hi, hi-1, ..., a)`` (``pile_zigzags``);
4. nearest-neighbour reds commute with nearest-neighbour greens, so the two
   piles interleave into same-bond commuting pairs of 2 CNOTs each.
"""
from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from .circuits import GateCircuit, RotationLayer, lower_layer
from .pauli import PauliString, commutes, i_power, multiply

log = logging.getLogger(__name__)

FLAVORS = {"YX": ("Y", "X"), "XY": ("X", "Y")}


class PatternError(ValueError):
    pass


def hat(n: int, i: int, j: int, flavor: str) -> PauliString:
    a, b = FLAVORS[flavor]
    letters = {i: a, j: b}
    letters.update({s: "Z" for s in range(i + 1, j)})
    return PauliString.from_sites(n, letters)


def nn(n: int, bond: int, flavor: str) -> PauliString:
    return hat(n, bond, bond + 1, flavor)


def tfxy_k_order(n: int) -> list[PauliString]:
    """All red triangles (anchors ascending), then all green ones."""
    return [hat(n, a, j, fl) for fl in ("YX", "XY") for a in range(n - 1) for j in range(a + 1, n)]


def pile_order(n: int) -> list[PauliString]:
    """Generators of the compressed K: same-bond red/green pairs in pile order."""
    top = n - 2
    out = []
    for a in range(top + 1):
        for b in range(top, a - 1, -1):
            out += [nn(n, b, "YX"), nn(n, b, "XY")]
    return out


# --- su(2) Euler steps -----------------------------------------------------------

_SIG = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frame(P: PauliString, Q: PauliString) -> dict[PauliString, np.ndarray]:
    """2x2 images of P, Q and their product string.

    With R = -i P Q the triple obeys the Pauli relations, so P -> X, Q -> Y,
    R -> Z is faithful on everything the three exponentials generate.
    """
    if commutes(P, Q):
        raise PatternError(f"{P.label} and {Q.label} commute; no su(2) triple")
    k, r = multiply(P, Q)
    sign = i_power(k - 1).real  # R = -i P Q = i^(k-1) r
    return {P: _SIG["X"], Q: _SIG["Y"], r: sign * _SIG["Z"]}


def _su2(frame, factors) -> np.ndarray:
    U = np.eye(2, dtype=complex)
    for S, t in factors:
        U = U @ (math.cos(t) * np.eye(2) + 1j * math.sin(t) * frame[S])
    return U


def euler_abc(U: np.ndarray, MA: np.ndarray, MB: np.ndarray) -> tuple[float, float, float]:
    """Angles with ``U = exp(i a MA) exp(i b MB) exp(i c MA)`` in SU(2).

    ``MA``, ``MB`` are anticommuting (signed) Pauli matrices.  The middle
    angle is taken with ``cos b >= 0``; when either of a + c, a - c is
    undetermined the tie is broken with ``c = 0``.
    """
    MC = -1j * MA @ MB
    u0 = np.trace(U).real / 2
    uA = (np.trace(MA @ U) / 2j).real
    uB = (np.trace(MB @ U) / 2j).real
    uC = (np.trace(MC @ U) / 2j).real
    cb = math.hypot(u0, uA)
    sb = math.hypot(uB, uC)
    b = math.atan2(sb, cb)
    tiny = 1e-14
    s = math.atan2(uA, u0) if cb > tiny else 0.0
    d = math.atan2(-uC, uB) if sb > tiny else 0.0
    if sb <= tiny:
        return s, b, 0.0
    if cb <= tiny:
        return d, b, 0.0
    return 0.5 * (s + d), b, 0.5 * (s - d)


def _rewrite(factors: Sequence[tuple[PauliString, float]], A: PauliString, B: PauliString) -> tuple[float, float, float]:
    fr = _frame(A, B)
    return euler_abc(_su2(fr, factors), fr[A], fr[B])


def euler_rocket(alpha: float, beta: float, i: int, j: int, flavor: str = "YX", n: int | None = None) -> tuple[float, float, float]:
    """``exp(i alpha F_ij) exp(i beta F_i,j+1) = exp(i a N_j) exp(i b F_ij) exp(i c N_j)``.

    ``F`` are hat strings of the given flavour and ``N_j`` the
    nearest-neighbour string on bond j.
    """
    if not 0 <= i < j:
        raise ValueError(f"need 0 <= i < j, got {i}, {j}")
    n = n if n is not None else j + 2
    F1, F2, N = hat(n, i, j, flavor), hat(n, i, j + 1, flavor), nn(n, j, flavor)
    return _rewrite([(F1, alpha), (F2, beta)], N, F1)


def _swap_triple(n: int, flavor: str, outer: int, inner: int, angles) -> tuple[float, float, float]:
    """(outer, inner, outer) bonds -> (inner, outer, inner) with the same product."""
    P, Q = nn(n, outer, flavor), nn(n, inner, flavor)
    return _rewrite(list(zip((P, Q, P), angles)), Q, P)


# --- layer parsing ---------------------------------------------------------------

def _classify(P: PauliString) -> tuple[str, int, int]:
    sup = P.support
    if len(sup) < 2:
        raise PatternError(f"{P.label} is not a hat string")
    i, j = sup[0], sup[-1]
    for fl, (a, b) in FLAVORS.items():
        if P == hat(P.n, i, j, fl):
            return fl, i, j
    raise PatternError(f"{P.label} is not a hat string")


def _bonds(layer: RotationLayer) -> tuple[int, str, list[tuple[int, float]]]:
    if not layer:
        raise PatternError("empty layer")
    n = layer[0][0].n
    flavor = None
    out = []
    for P, t in layer:
        fl, i, j = _classify(P)
        if j != i + 1:
            raise PatternError(f"{P.label} is not nearest-neighbour")
        if flavor not in (None, fl):
            raise PatternError("mixed flavours in one layer")
        flavor = fl
        out.append((i, float(t)))
    return n, flavor, out


def _layer(n: int, flavor: str, fs: Sequence[tuple[int, float]]) -> RotationLayer:
    return [(nn(n, b, flavor), t) for b, t in fs]


def _shape(fs: Sequence[tuple[int, float]]) -> list[int]:
    return [b for b, _ in fs]


def _v_bonds(lo: int, hi: int) -> list[int]:
    return list(range(hi, lo - 1, -1)) + list(range(lo + 1, hi + 1))


def _lambda_bonds(lo: int, hi: int) -> list[int]:
    return list(range(lo, hi + 1)) + list(range(hi - 1, lo - 1, -1))


# --- passes on (bond, angle) lists ------------------------------------------------

def _triangle_to_v(n: int, flavor: str, a: int, angles: Sequence[float]) -> list[tuple[int, float]]:
    top = a + len(angles)  # last site of the triangle
    cur = list(angles)
    left: list[tuple[int, float]] = []
    right: list[tuple[int, float]] = []
    last = top
    while len(cur) >= 2:
        p, q, r = euler_rocket(cur[-2], cur[-1], a, last - 1, flavor, n)
        left.append((last - 1, p))
        right.insert(0, (last - 1, r))
        cur = cur[:-2] + [q]
        last -= 1
    return left + [(a, cur[0])] + right


def _v_to_lambda(n: int, flavor: str, fs: list[tuple[int, float]]) -> list[tuple[int, float]]:
    if len(fs) == 1:
        return list(fs)
    lo = min(_shape(fs))
    k = _shape(fs).index(lo)
    x, y, z = fs[k - 1][1], fs[k][1], fs[k + 1][1]
    al, be, ga = _swap_triple(n, flavor, lo + 1, lo, (x, y, z))
    inner = fs[:k - 1] + [(lo + 1, be)] + fs[k + 2:]
    return [(lo, al)] + _v_to_lambda(n, flavor, inner) + [(lo, ga)]


def _lambda_to_v(n: int, flavor: str, fs: list[tuple[int, float]]) -> list[tuple[int, float]]:
    if len(fs) == 1:
        return list(fs)
    hi = max(_shape(fs))
    k = _shape(fs).index(hi)
    x, y, z = fs[k - 1][1], fs[k][1], fs[k + 1][1]
    al, be, ga = _swap_triple(n, flavor, hi - 1, hi, (x, y, z))
    inner = fs[:k - 1] + [(hi - 1, be)] + fs[k + 2:]
    return [(hi, al)] + _lambda_to_v(n, flavor, inner) + [(hi, ga)]


def _pile(n: int, flavor: str, vs: list[list[tuple[int, float]]], top: int) -> list[tuple[int, float]]:
    """Collapse V(lo..top), V(lo+1..top), ..., V(top..top) into descending runs."""
    out: list[tuple[int, float]] = []
    vs = [list(v) for v in vs]
    while len(vs) > 1:
        zig_len = top - min(_shape(vs[0])) + 1
        out += vs[0][:zig_len]
        carry = vs[0][zig_len:]
        nxt = []
        for v in vs[1:]:
            lo = min(_shape(v))
            zl = top - lo + 1
            zig, zag = v[:zl], v[zl:]
            if carry:
                lam = carry[:-1] + [(top, carry[-1][1] + zig[0][1])] + zig[1:]
                nxt.append(_lambda_to_v(n, flavor, lam))
            else:
                nxt.append(zig)
            carry = zag
        if carry:
            # only a bare top bond can be left over; it meets the last factor
            (b, t), = carry
            last = nxt[-1]
            last[-1] = (top, last[-1][1] + t)
        vs = nxt
    return out + vs[0]


# --- public layer-level API ----------------------------------------------------------

def triangle_to_zigzag(layer: RotationLayer) -> RotationLayer:
    """Rewrite a triangle ``prod_j exp(i t_j F_{a,j})`` (j = a+1, a+2, ...) as a V."""
    if not layer:
        raise PatternError("empty layer")
    n = layer[0][0].n
    fl, a, j0 = _classify(layer[0][0])
    for idx, (P, _) in enumerate(layer):
        if P != hat(n, a, a + 1 + idx, fl):
            raise PatternError(f"factor {idx} ({P.label}) breaks the triangle pattern")
    return _layer(n, fl, _triangle_to_v(n, fl, a, [t for _, t in layer]))


def flip_zigzag(layer: RotationLayer) -> RotationLayer:
    """V <-> Lambda over the same bonds, preserving the product."""
    n, fl, fs = _bonds(layer)
    shape = _shape(fs)
    lo, hi = min(shape), max(shape)
    if shape == _v_bonds(lo, hi):
        return _layer(n, fl, _v_to_lambda(n, fl, fs))
    if shape == _lambda_bonds(lo, hi):
        return _layer(n, fl, _lambda_to_v(n, fl, fs))
    raise PatternError(f"bond sequence {shape} is neither a V nor a Lambda")


def pile_zigzags(layer: RotationLayer) -> RotationLayer:
    """Product of Vs anchored at lo, lo+1, ..., top (all ending at ``top``) -> pile."""
    n, fl, fs = _bonds(layer)
    shape = _shape(fs)
    top = max(shape)
    lo = min(shape)
    vs = []
    pos = 0
    for a in range(lo, top + 1):
        want = _v_bonds(a, top)
        if shape[pos:pos + len(want)] != want:
            raise PatternError(f"expected V({a}..{top}) at position {pos}")
        vs.append(fs[pos:pos + len(want)])
        pos += len(want)
    if pos != len(fs):
        raise PatternError("trailing factors after the last V")
    return _layer(n, fl, _pile(n, fl, vs, top))


def _colour_pile(n: int, flavor: str, angles: Sequence[float]) -> list[tuple[int, float]]:
    """Raw triangles of one colour (``tfxy_k_order`` layout) -> pile bonds."""
    top = n - 2
    vs = []
    pos = 0
    for a in range(n - 1):
        size = n - 1 - a
        vs.append(_triangle_to_v(n, flavor, a, angles[pos:pos + size]))
        pos += size
    return _pile(n, flavor, vs, top)


def reduce_tfxy_layer(k_basis: Sequence[PauliString], angles: Sequence[float]) -> RotationLayer:
    """Compressed K as a layer of same-bond (red, green) commuting pairs."""
    if not k_basis:
        raise PatternError("empty K")
    n = k_basis[0].n
    if list(k_basis) != tfxy_k_order(n):
        raise PatternError("K generators are not the TFXY triangle order")
    half = len(k_basis) // 2
    reds = _colour_pile(n, "YX", list(angles[:half]))
    greens = _colour_pile(n, "XY", list(angles[half:]))
    assert _shape(reds) == _shape(greens)
    out: RotationLayer = []
    for (b, t), (_, u) in zip(reds, greens):
        out += [(nn(n, b, "YX"), t), (nn(n, b, "XY"), u)]
    return out


def reduce_tfxy_k(k_fact) -> GateCircuit:
    """Gate circuit for K with n(n-1) CNOTs; raw lowering with a warning if K is not TFXY-shaped."""
    n = k_fact.k_basis[0].n
    try:
        layer = reduce_tfxy_layer(k_fact.k_basis, k_fact.angles)
    except PatternError as e:
        log.warning("TFXY compression not applicable (%s); lowering K factor by factor", e)
        return lower_layer(k_fact.layer(), n, merge_pairs=False, source="K")
    return lower_layer(layer, n, merge_pairs=True, source="K")


def raw_k_cnots(n: int) -> int:
    return 2 * n * (n * n - 1) // 3


def reduced_k_cnots(n: int) -> int:
    return n * (n - 1)
