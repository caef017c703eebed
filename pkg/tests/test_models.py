import json
import math

import numpy as np
import pytest

from cartansynth.models import (HamiltonianParseError, ModelError, ModelParams, build_model, hamiltonian_to_json,
                                normal_samples, normalize_hamiltonian, parse_hamiltonian_file, raw_trace_norm_sq)
from cartansynth.pauli import PauliString, PauliSum

P = PauliString.from_label


def test_tfim_two_site_terms():
    H = build_model(ModelParams("TFIM", 2, fields=[0.3, 0.7]))
    assert H.terms == {P("ZZ"): 1.0, P("XI"): 0.3, P("IX"): 0.7}


def test_tfxy_zero_sigma_drops_fields_but_keeps_closure_strings():
    H = build_model(ModelParams("TFXY", 3, sigma=0.0))
    assert set(H.strings()) == {P("XXI"), P("YYI"), P("IXX"), P("IYY")}
    assert all(c == 1.0 for c in H.terms.values())
    assert set(H.closure_strings) == {P("ZII"), P("IZI"), P("IIZ")}


def test_seeded_fields_reproducible():
    a = build_model(ModelParams("TFXY", 6, sigma=1.0, seed=5))
    b = build_model(ModelParams("TFXY", 6, sigma=1.0, seed=5))
    c = build_model(ModelParams("TFXY", 6, sigma=1.0, seed=6))
    assert a.terms == b.terms and a.terms != c.terms


def test_normal_samples_distribution():
    z = normal_samples(20000, 2.0, 11)
    assert abs(z.mean()) < 0.05 and abs(z.std() - 2.0) < 0.05
    assert np.array_equal(z[:5], normal_samples(5, 2.0, 11))


def test_heisenberg_and_xy_forms():
    H = build_model(ModelParams("Heisenberg", 3, a=[1, 2], b=[3, 4], c=[5, 6]))
    assert H.coeff("IZZ") == 6 and H.coeff("XXI") == 1 and len(H) == 6
    X = build_model(ModelParams("XY", 4))
    assert len(X) == 6 and all(p.support[1] - p.support[0] == 1 for p in X)


@pytest.mark.parametrize("kind", ["XY", "TFIM", "TFXY", "Heisenberg"])
def test_models_even_y_and_open_boundary(kind):
    H = build_model(ModelParams(kind, 5, sigma=1.0, seed=2))
    for p, c in H.items():
        assert p.y_count in (0, 2)
        assert isinstance(c, float)
        assert max(p.support) < 5
        assert len(p.support) == 1 or p.support[1] == p.support[0] + 1


@pytest.mark.parametrize("params", [
    ModelParams("Ising", 3), ModelParams("XY", 1), ModelParams("TFXY", 3, sigma=-1),
    ModelParams("XY", 3, a=[1.0]), ModelParams("TFIM", 3, fields=[1, 2]),
])
def test_invalid_params(params):
    with pytest.raises(ModelError):
        build_model(params)


def test_normalize_examples():
    H = build_model(ModelParams("TFIM", 2, a=[2.0], fields=[0, 0]))
    assert normalize_hamiltonian(H).terms == {P("ZZ"): 0.5}  # 2 ZZ / sqrt(4 * 4)
    T = normalize_hamiltonian(build_model(ModelParams("TFXY", 10, sigma=1.0, seed=3)))
    assert raw_trace_norm_sq(T) == pytest.approx(1.0, abs=1e-14)
    again = normalize_hamiltonian(T)
    assert max(abs(again.coeff(p) - c) for p, c in T.items()) <= 1e-15
    assert again.closure_strings == T.closure_strings


def test_parse_file_round_trip():
    text = '{"n":2,"terms":[{"pauli":"ZZ","coeff":1.0},{"pauli":"IX","coeff":0.5}]}'
    H = parse_hamiltonian_file(text)
    assert H.n == 2 and H.terms == {P("ZZ"): 1.0, P("IX"): 0.5}
    assert parse_hamiltonian_file(hamiltonian_to_json(H)).terms == H.terms


@pytest.mark.parametrize("text,where", [
    ('{"n":2,"terms":[{"pauli":"XA","coeff":1}]}', "terms[0].pauli"),
    ('{"n":2,"terms":[]}', "terms"),
    ('{"n":2,"terms":[{"pauli":"XXX","coeff":1}]}', "terms[0].pauli"),
    ('{"n":2,"terms":[{"pauli":"XX","coeff":"1"}]}', "terms[0].coeff"),
    ('{"n":2,"terms":[{"pauli":"XX","coeff":1},\n{"pauli":"XX","coeff":-1}]}', "terms"),
    ('{"n":2,\n "terms": [}', "line 2"),
    ('{"n":0,"terms":[]}', "n"),
])
def test_parse_errors_carry_location(text, where):
    with pytest.raises(HamiltonianParseError) as e:
        parse_hamiltonian_file(text)
    assert where in str(e.value)


def test_parse_error_messages():
    with pytest.raises(HamiltonianParseError, match="A"):
        parse_hamiltonian_file('{"n":2,"terms":[{"pauli":"XA","coeff":1}]}')
    with pytest.raises(HamiltonianParseError, match="zero Hamiltonian"):
        parse_hamiltonian_file('{"n":2,"terms":[]}')
