import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cartansynth.pauli import (PauliError, PauliString, PauliSum, commutator, commutes, conjugate_by_rotation,
                               i_power, inner_product, multiply)

from conftest import kron_matrix, kron_sum, random_string, random_sum

P = PauliString.from_label
labels = lambda n: st.text(alphabet="IXYZ", min_size=n, max_size=n)


def test_letter_encoding_round_trip():
    p = P("IXYZ")
    assert p.label == "IXYZ"
    assert p.x_bits == (0, 1, 1, 0) and p.z_bits == (0, 0, 1, 1)
    assert p.weight == 3 and p.y_count == 1 and p.support == (1, 2, 3)


def test_bad_letter_rejected():
    with pytest.raises(PauliError, match="A"):
        P("XA")


@pytest.mark.parametrize("a,b,ph,r", [("X", "Y", 1, "Z"), ("ZY", "IX", 3, "ZZ"), ("XYZ", "XYZ", 0, "III")])
def test_multiply_examples(a, b, ph, r):
    assert multiply(P(a), P(b)) == (ph, P(r))


def test_size_mismatch():
    for f in (multiply, commutes, commutator):
        with pytest.raises(PauliError):
            f(P("X"), P("XX"))


def test_commutes_examples():
    assert not commutes(P("X"), P("Y"))
    assert commutes(P("XI"), P("IX"))
    assert commutes(P("ZZ"), P("YY"))


def test_commutator_examples():
    assert commutator(P("ZZ"), P("XI")) == (1, P("YZ"))
    assert commutator(P("ZZ"), P("IX")) == (1, P("ZY"))
    assert commutator(P("XI"), P("IX")) is None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_multiply_and_commutes_exhaustive_against_dense(n):
    strings = ["".join(t) for t in itertools.product("IXYZ", repeat=n)]
    for a, b in itertools.product(strings, repeat=2):
        ph, r = multiply(P(a), P(b))
        A, B = kron_matrix(a), kron_matrix(b)
        assert np.allclose(A @ B, i_power(ph) * kron_matrix(r))
        assert commutes(P(a), P(b)) == np.allclose(A @ B, B @ A)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 6).flatmap(lambda n: st.tuples(labels(n), labels(n), labels(n))))
def test_multiply_associative_and_dense(abc):
    a, b, c = map(P, abc)
    p1, ab = multiply(a, b)
    p2, abc1 = multiply(ab, c)
    p3, bc = multiply(b, c)
    p4, abc2 = multiply(a, bc)
    assert abc1 == abc2 and (p1 + p2 - p3 - p4) % 4 == 0
    assert np.allclose(kron_matrix(a) @ kron_matrix(b), i_power(p1) * kron_matrix(ab))


def test_inner_product_examples():
    g = 0.37
    B1, B2 = 0.8, -0.4
    v = PauliSum.from_labels({"IX": 1.0, "XI": g})
    H = PauliSum.from_labels({"ZZ": 1.0, "IX": B1, "XI": B2})
    assert inner_product(v, H) == pytest.approx(B1 + g * B2)
    assert inner_product(PauliSum.from_labels({"XYZ": 1}), PauliSum.from_labels({"XYZ": 1})) == 1
    assert inner_product(PauliSum.from_labels({"ZZ": 1}), PauliSum.from_labels({"YY": 1})) == 0


def test_inner_product_matches_trace(rng):
    for _ in range(20):
        A, B = random_sum(rng, 3), random_sum(rng, 3)
        assert inner_product(A, B) == pytest.approx(np.trace(kron_sum(A) @ kron_sum(B)).real / 8)
        assert inner_product(A, A) > 0
    assert inner_product(PauliSum(2), PauliSum(2)) == 0


def test_conjugation_identity_angle(rng):
    A = random_sum(rng, 3)
    assert conjugate_by_rotation(0.0, P("XYZ"), A).allclose(A)


def test_conjugation_two_site_tfim_diagonalizes():
    A = PauliSum.from_labels({"ZZ": 1.0, "IX": 1.0})
    out = conjugate_by_rotation(-math.pi / 8, P("ZY"), A)
    assert out.allclose(PauliSum.from_labels({"IX": math.sqrt(2)}))
    # the other sign of the angle rotates onto ZZ instead
    assert conjugate_by_rotation(math.pi / 8, P("ZY"), A).allclose(PauliSum.from_labels({"ZZ": math.sqrt(2)}))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_conjugation_matches_dense(rng, n):
    import scipy.linalg as sl

    for _ in range(10):
        k = random_string(rng, n)
        A = random_sum(rng, n, terms=5)
        th = rng.uniform(-np.pi, np.pi)
        U = sl.expm(1j * th * kron_matrix(k))
        want = U @ kron_sum(A) @ U.conj().T
        got = conjugate_by_rotation(th, k, A)
        assert np.abs(kron_sum(got) - want).max() <= 1e-12
        assert got.norm() == pytest.approx(A.norm(), abs=1e-12)
        assert got.is_hermitian()


def test_paulisum_canonical_order_and_zero_drop():
    s = PauliSum.from_labels([("ZZ", 1.0), ("XI", 2.0), ("IY", 0.0)])
    assert [p.label for p in s.strings()] == ["XI", "ZZ"]
