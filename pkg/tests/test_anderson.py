import numpy as np
import pytest

from cartansynth.anderson import anderson_run


@pytest.fixture(scope="module")
def small():
    return anderson_run(5, 1.0, 3, np.linspace(0, 10, 6), (2, 5))


def test_series_shapes_and_labels(small):
    s = small
    assert len(s.times) == len(s.n_exact) == len(s.n_cartan) == 6
    assert sorted(s.n_trotter) == [16, 40]  # 2 (n - 1) CNOTs per step
    assert s.trotter_steps == {16: 2, 40: 5}
    assert s.cartan_cnots == 2 * 5 * 4
    assert np.all(s.n_exact >= 0) and np.all(s.n_cartan >= 0)


def test_time_zero_row(small):
    assert small.n_exact[0] <= 1e-7 and small.n_cartan[0] <= 1e-7
    assert all(v[0] <= 1e-7 for v in small.n_trotter.values())


def test_cartan_tracks_exact(small):
    assert small.err_cartan.max() <= 1e-8


def test_csv_format(small):
    lines = small.to_csv().splitlines()
    assert lines[0] == "t,N_exact,N_cartan,N_trotter_16,N_trotter_40,err_cartan,err_trotter_16,err_trotter_40"
    assert len(lines) == 7
    row = lines[3].split(",")
    assert len(row) == 8
    assert all(len(x.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 12 for x in row)


def test_deterministic(small):
    again = anderson_run(5, 1.0, 3, np.linspace(0, 10, 6), (2, 5))
    assert again.to_csv() == small.to_csv()
