"""Spread of a single spin flip in a disordered TFXY chain: Cartan circuit vs Trotter."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .khk import SolverConfig
from .models import ModelParams, build_model
from .oracle import DEFAULT_CAP, OracleCapExceeded, Spectral, basis_state, displacement_diagonal, simulate, trotter_circuit
from .pipeline import compile_hamiltonian

DEFAULT_TIMES = np.linspace(0.0, 40.0, 81)
DEFAULT_BUDGETS = (10, 74)


@dataclass
class ExperimentSeries:
    n: int
    sigma: float
    seed: int
    times: np.ndarray
    n_exact: np.ndarray
    n_cartan: np.ndarray
    cartan_cnots: int
    n_trotter: dict[int, np.ndarray] = field(default_factory=dict)  # keyed by CNOT count
    trotter_steps: dict[int, int] = field(default_factory=dict)

    @property
    def err_cartan(self) -> np.ndarray:
        return np.abs(self.n_cartan - self.n_exact)

    def err_trotter(self, cnots: int) -> np.ndarray:
        return np.abs(self.n_trotter[cnots] - self.n_exact)

    def to_csv(self) -> str:
        budgets = sorted(self.n_trotter)
        cols = ["t", "N_exact", "N_cartan"] + [f"N_trotter_{b}" for b in budgets]
        cols += ["err_cartan"] + [f"err_trotter_{b}" for b in budgets]
        data = [self.times, self.n_exact, self.n_cartan] + [self.n_trotter[b] for b in budgets]
        data += [self.err_cartan] + [self.err_trotter(b) for b in budgets]
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for row in zip(*data):
            buf.write(",".join(f"{v:.12g}" for v in row) + "\n")
        return buf.getvalue()


def _displacement(psi: np.ndarray, n2: np.ndarray) -> float:
    return float(np.sqrt(max(np.dot(np.abs(psi) ** 2, n2), 0.0)))


def anderson_run(n: int, sigma: float, seed: int, times: Sequence[float] = DEFAULT_TIMES,
                 budgets: Sequence[int] = DEFAULT_BUDGETS, config: SolverConfig | None = None,
                 cap: int = DEFAULT_CAP) -> ExperimentSeries:
    """Displacement ``sqrt(<N^2>)`` of an excitation started on site 0.

    ``budgets`` are Trotter step counts; the series labels each by its CNOT
    total.  Decomposition failures propagate as ``SolveError``.
    """
    if n > cap:
        raise OracleCapExceeded(f"dense oracle limited to {cap} qubits, got {n}")
    H = build_model(ModelParams("TFXY", n, sigma=sigma, seed=seed, normalize=True))
    comp = compile_hamiltonian(H, config)
    spec = Spectral(H, cap)
    psi0 = basis_state(n, [0])
    n2 = displacement_diagonal(n) ** 2
    times = np.asarray(times, dtype=float)

    exact = np.array([_displacement(spec.evolve(psi0, t), n2) for t in times])
    cartan = []
    cnots = 0
    for t in times:
        c = comp.circuit(float(t), reduce=True)
        cnots = c.cnot_count
        cartan.append(_displacement(simulate(c, psi0), n2))
    series = ExperimentSeries(n, sigma, seed, times, exact, np.array(cartan), cnots)
    for steps in budgets:
        vals = []
        label = 0
        for t in times:
            c = trotter_circuit(H, float(t), steps)
            label = c.cnot_count
            vals.append(_displacement(simulate(c, psi0), n2))
        series.n_trotter[label] = np.array(vals)
        series.trotter_steps[label] = steps
    return series
