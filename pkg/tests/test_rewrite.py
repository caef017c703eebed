import math

import numpy as np
import pytest

from cartansynth.circuits import lower_layer
from cartansynth.khk import KFactorization
from cartansynth.oracle import circuit_unitary, unitary_distance
from cartansynth.pauli import PauliString
from cartansynth.rewrite import (PatternError, euler_abc, euler_rocket, flip_zigzag, hat, nn, pile_order, pile_zigzags,
                                 raw_k_cnots, reduce_tfxy_k, reduce_tfxy_layer, reduced_k_cnots, tfxy_k_order,
                                 triangle_to_zigzag)

from conftest import layer_unitary

P = PauliString.from_label


def dist(a, b, n):
    return unitary_distance(layer_unitary(a, n), layer_unitary(b, n))


def triangle(n, a, angles, flavor="YX"):
    return [(hat(n, a, j, flavor), t) for j, t in zip(range(a + 1, n), angles)]


def v_layer(n, lo, hi, angles, flavor="YX"):
    bonds = list(range(hi, lo - 1, -1)) + list(range(lo + 1, hi + 1))
    return [(nn(n, b, flavor), t) for b, t in zip(bonds, angles)]


def test_hat_strings():
    assert hat(5, 0, 3, "YX") == P("YZZXI")
    assert hat(5, 1, 2, "XY") == P("IXYII")


def test_euler_rocket_trivial_cases():
    assert euler_rocket(0.0, 0.0, 0, 1) == (0.0, 0.0, 0.0)
    a, b, c = euler_rocket(0.37, 0.0, 0, 1)
    assert (a, b, c) == pytest.approx((0.0, 0.37, 0.0), abs=1e-15)


@pytest.mark.parametrize("flavor", ["YX", "XY"])
def test_euler_rocket_dense(flavor, rng):
    n = 4
    for _ in range(20):
        al, be = rng.uniform(-3, 3, 2)
        i, j = 0, int(rng.integers(1, 3))
        a, b, c = euler_rocket(al, be, i, j, flavor, n)
        lhs = [(hat(n, i, j, flavor), al), (hat(n, i, j + 1, flavor), be)]
        rhs = [(nn(n, j, flavor), a), (hat(n, i, j, flavor), b), (nn(n, j, flavor), c)]
        assert dist(lhs, rhs, n) <= 1e-12


def test_euler_abc_gimbal():
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]])
    for b in (0.0, math.pi / 2):
        U = (math.cos(0.4) * np.eye(2) + 1j * math.sin(0.4) * X) @ (math.cos(b) * np.eye(2) + 1j * math.sin(b) * Y)
        a, bb, c = euler_abc(U, X, Y)
        assert c == 0.0
        V = (math.cos(a) * np.eye(2) + 1j * math.sin(a) * X) @ (math.cos(bb) * np.eye(2) + 1j * math.sin(bb) * Y)
        assert np.allclose(U, V)


def test_triangle_base_case_unchanged():
    lay = triangle(3, 1, [0.4])
    assert triangle_to_zigzag(lay) == lay


@pytest.mark.parametrize("n,a", [(5, 0), (6, 0), (6, 2)])
def test_triangle_to_zigzag(n, a, rng):
    for _ in range(5):
        lay = triangle(n, a, rng.uniform(-2, 2, n - 1 - a))
        z = triangle_to_zigzag(lay)
        hi = n - 2
        assert [p for p, _ in z] == [nn(n, b, "YX") for b in list(range(hi, a - 1, -1)) + list(range(a + 1, hi + 1))]
        assert dist(lay, z, n) <= 1e-10


def test_triangle_pattern_errors():
    with pytest.raises(PatternError):
        triangle_to_zigzag([(hat(4, 0, 2, "YX"), 0.1), (hat(4, 0, 1, "YX"), 0.1)])
    with pytest.raises(PatternError):
        triangle_to_zigzag([])


@pytest.mark.parametrize("lo,hi", [(0, 1), (0, 4), (1, 3)])
def test_flip(lo, hi, rng):
    n = 6
    for _ in range(5):
        v = v_layer(n, lo, hi, rng.uniform(-2, 2, 2 * (hi - lo) + 1))
        lam = flip_zigzag(v)
        assert [p for p, _ in lam] == [nn(n, b, "YX") for b in list(range(lo, hi + 1)) + list(range(hi - 1, lo - 1, -1))]
        assert dist(v, lam, n) <= 1e-10
        back = flip_zigzag(lam)
        assert [p for p, _ in back] == [p for p, _ in v]
        assert dist(back, v, n) <= 1e-10


def test_flip_pattern_error():
    with pytest.raises(PatternError):
        flip_zigzag([(nn(4, 0, "YX"), 0.1), (nn(4, 2, "YX"), 0.1)])
    with pytest.raises(PatternError):
        flip_zigzag([(nn(4, 0, "YX"), 0.1), (nn(4, 0, "XY"), 0.1)])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pile(n, rng):
    top = n - 2
    for _ in range(5):
        layer = []
        for a in range(top + 1):
            layer += v_layer(n, a, top, rng.uniform(-2, 2, 2 * (top - a) + 1))
        out = pile_zigzags(layer)
        want = [nn(n, b, "YX") for a in range(top + 1) for b in range(top, a - 1, -1)]
        assert [p for p, _ in out] == want
        assert dist(layer, out, n) <= 1e-10


def test_pile_base_case():
    n = 3
    layer = v_layer(n, 0, 1, [0.1, 0.2, 0.3]) + v_layer(n, 1, 1, [0.4])
    out = pile_zigzags(layer)
    assert [p for p, _ in out] == [nn(n, 1, "YX"), nn(n, 0, "YX"), nn(n, 1, "YX")]
    assert dist(layer, out, n) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_reduce_tfxy(n, rng):
    order = tfxy_k_order(n)
    for _ in range(3):
        ang = rng.uniform(-2, 2, len(order))
        raw = list(zip(order, ang))
        red = reduce_tfxy_layer(order, ang)
        assert [p for p, _ in red] == pile_order(n)
        assert dist(raw, red, n) <= 1e-10
        kc = reduce_tfxy_k(KFactorization(tuple(order), ang))
        assert kc.cnot_count == reduced_k_cnots(n) == n * (n - 1)
        assert lower_layer(raw, n, merge_pairs=False).cnot_count == raw_k_cnots(n)
        assert unitary_distance(circuit_unitary(kc), layer_unitary(raw, n)) <= 1e-10


def test_counts_closed_forms():
    assert (raw_k_cnots(5), reduced_k_cnots(5)) == (80, 20)
    assert (raw_k_cnots(2), reduced_k_cnots(2)) == (4, 2)
    assert 2 * reduced_k_cnots(10) == 180 and 2 * raw_k_cnots(10) == 1320


def test_reduce_falls_back_on_foreign_basis(caplog):
    k = KFactorization((P("YZ"), P("ZY")), np.array([0.1, 0.2]))
    with pytest.raises(PatternError):
        reduce_tfxy_layer(k.k_basis, k.angles)
    c = reduce_tfxy_k(k)
    assert "not applicable" in caplog.text
    assert c.cnot_count == 4
