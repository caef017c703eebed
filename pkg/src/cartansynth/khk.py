"""Find K in exp(i k) and h in the Cartan subalgebra with H = K h K^dag.

K is the ordered product ``prod_j exp(i theta_j k_j)``.  The angles come from
minimizing ``f(theta) = <K v K^dag, H>`` where ``v = sum_i gamma^i h_i`` has
incommensurate weights; at any critical point ``K^dag H K`` lies in h.

Everything lives in coordinates over the m basis.  Conjugating an m vector
by one factor is a set of disjoint plane rotations, precomputed once per
generator (:class:`PairTables`) and run by the kernels in :mod:`.kernels`.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares, minimize

from . import kernels
from .cartan import CartanSplit
from .pauli import PauliString, PauliSum, commutes, conjugate_by_rotation, i_power, multiply

log = logging.getLogger(__name__)

DEFAULT_GAMMA = math.log(2.0)


class SplitLeakError(RuntimeError):
    """A conjugation left span(m); the split is not a Cartan decomposition."""


class SolveError(RuntimeError):
    def __init__(self, message: str, best_residual: float | None = None):
        self.best_residual = best_residual
        super().__init__(message)


@dataclass(frozen=True)
class PairTables:
    generators: tuple[PauliString, ...]
    m_basis: tuple[PauliString, ...]
    ptr: np.ndarray
    pa: np.ndarray
    pb: np.ndarray
    ps: np.ndarray

    @property
    def index(self) -> dict[PauliString, int]:
        return {p: i for i, p in enumerate(self.m_basis)}

    def vector(self, A: PauliSum) -> np.ndarray:
        idx = self.index
        x = np.zeros(len(self.m_basis))
        for p, c in A.items():
            j = idx.get(p)
            if j is None:
                raise SplitLeakError(f"{p.label} is not in m")
            x[j] = float(c.real if isinstance(c, complex) else c)
        return x

    def to_sum(self, x: np.ndarray, tol: float = 0.0) -> PauliSum:
        n = self.m_basis[0].n
        return PauliSum(n, {p: float(c) for p, c in zip(self.m_basis, x) if abs(c) > tol})


def build_tables(generators: Sequence[PauliString], m_basis: Sequence[PauliString]) -> PairTables:
    index = {p: i for i, p in enumerate(m_basis)}
    ptr = [0]
    pa: list[int] = []
    pb: list[int] = []
    ps: list[float] = []
    for k in generators:
        for a, p in enumerate(m_basis):
            if commutes(k, p):
                continue
            ph, r = multiply(k, p)
            b = index.get(r)
            if b is None:
                raise SplitLeakError(f"[{k.label}, {p.label}] = {r.label} leaves m")
            if a < b:
                pa.append(a)
                pb.append(b)
                ps.append(i_power(ph + 1).real)
        ptr.append(len(pa))
    return PairTables(
        tuple(generators), tuple(m_basis),
        np.asarray(ptr, dtype=np.int_), np.asarray(pa, dtype=np.int_),
        np.asarray(pb, dtype=np.int_), np.asarray(ps, dtype=np.float64),
    )


@dataclass(frozen=True)
class VElement:
    gamma: float
    h_basis: tuple[PauliString, ...]
    coefficients: tuple[float, ...]

    def as_sum(self) -> PauliSum:
        return PauliSum(self.h_basis[0].n, dict(zip(self.h_basis, self.coefficients)))


def build_v(h_basis: Sequence[PauliString], gamma: float = DEFAULT_GAMMA) -> VElement:
    if not h_basis:
        raise ValueError("h basis is empty")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if gamma ** len(h_basis) < 1e-12:
        warnings.warn(
            f"gamma^{len(h_basis)} = {gamma ** len(h_basis):.3g} is below 1e-12; "
            "the smallest weights of v are lost to rounding",
            RuntimeWarning, stacklevel=2,
        )
    return VElement(gamma, tuple(h_basis), tuple(gamma ** (i + 1) for i in range(len(h_basis))))


@dataclass(frozen=True)
class KFactorization:
    """K = prod_i exp(i angles[i] k_basis[i]) with i ascending left to right."""

    k_basis: tuple[PauliString, ...]
    angles: np.ndarray

    def __post_init__(self):
        if len(self.k_basis) != len(self.angles):
            raise ValueError(f"{len(self.k_basis)} generators but {len(self.angles)} angles")

    def layer(self) -> list[tuple[PauliString, float]]:
        return [(k, float(a)) for k, a in zip(self.k_basis, self.angles)]


@dataclass
class SolverConfig:
    gamma: float = DEFAULT_GAMMA
    grad_tol: float = 1e-6
    residual_tol: float = 1e-6
    max_iters: int = 2000
    max_restarts: int = 8
    seed: int = 0
    refine_evals: int = 2000
    init_scale: float = 0.1


@dataclass
class DecompositionResult:
    k_fact: KFactorization
    h_basis: tuple[PauliString, ...]
    h_coeffs: np.ndarray
    residual_off_h: float
    grad_norm: float
    iterations: int
    restarts: int
    cost: float = float("nan")
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def n(self) -> int:
        return self.h_basis[0].n

    def h_element(self) -> PauliSum:
        return PauliSum(self.n, dict(zip(self.h_basis, map(float, self.h_coeffs))))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k_basis": [p.label for p in self.k_fact.k_basis],
            "angles": [float(a) for a in self.k_fact.angles],
            "h_basis": [p.label for p in self.h_basis],
            "h_coeffs": [float(c) for c in self.h_coeffs],
            "residual_off_h": self.residual_off_h,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "cost": self.cost,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecompositionResult":
        k = tuple(PauliString.from_label(s) for s in d["k_basis"])
        return cls(
            KFactorization(k, np.asarray(d["angles"], dtype=float)),
            tuple(PauliString.from_label(s) for s in d["h_basis"]),
            np.asarray(d["h_coeffs"], dtype=float),
            float(d["residual_off_h"]), float(d["grad_norm"]),
            int(d["iterations"]), int(d["restarts"]), float(d.get("cost", "nan")),
        )


def _generators(split: CartanSplit, generators: Sequence[PauliString] | None) -> tuple[PauliString, ...]:
    return tuple(split.k_basis if generators is None else generators)


def cost(theta, split: CartanSplit, v: VElement, H: PauliSum, generators=None) -> float:
    t = build_tables(_generators(split, generators), split.m_basis)
    return kernels.cost_grad(np.asarray(theta, float), t.vector(v.as_sum()), t.vector(H), t.ptr, t.pa, t.pb, t.ps)[0]


def gradient(theta, split: CartanSplit, v: VElement, H: PauliSum, generators=None) -> np.ndarray:
    t = build_tables(_generators(split, generators), split.m_basis)
    return kernels.cost_grad(np.asarray(theta, float), t.vector(v.as_sum()), t.vector(H), t.ptr, t.pa, t.pb, t.ps)[1]


def extract_h(k_fact: KFactorization, H: PauliSum, h_basis: Sequence[PauliString]) -> tuple[np.ndarray, float]:
    """Coefficients of K^dag H K over ``h_basis`` and the norm of the rest."""
    A = H
    for k, a in zip(k_fact.k_basis, k_fact.angles):
        A = conjugate_by_rotation(-float(a), k, A)
    coeffs = np.array([float(np.real(A.coeff(p))) for p in h_basis])
    hs = set(h_basis)
    residual = math.sqrt(sum(abs(c) ** 2 for p, c in A.items() if p not in hs))
    return coeffs, residual


def _extract_vec(t: PairTables, angles: np.ndarray, hvec: np.ndarray, h_idx: np.ndarray) -> tuple[np.ndarray, float]:
    y = kernels.apply_chain(hvec.copy(), angles, np.arange(len(angles), dtype=np.int_), t.ptr, t.pa, t.pb, t.ps, -1.0)
    mask = np.ones(len(y), dtype=bool)
    mask[h_idx] = False
    return y[h_idx].copy(), float(np.linalg.norm(y[mask]))


def _refine(t: PairTables, theta: np.ndarray, hunit: np.ndarray, off: np.ndarray, max_nfev: int) -> np.ndarray:
    """Levenberg-Marquardt on the off-h part of K^dag H K.

    The cost is flat to fourth order along directions where the product
    chart is nearly singular, so its minimizer is only resolved to about
    sqrt(machine epsilon).  The off-h coordinates themselves vanish at any
    exact solution and are computed to full precision.
    """
    def res(th):
        return kernels.residual_jacobian(th, hunit, t.ptr, t.pa, t.pb, t.ps)[0][off]

    def jac(th):
        return kernels.residual_jacobian(th, hunit, t.ptr, t.pa, t.pb, t.ps)[1][off]

    method = "lm" if off.sum() >= len(theta) else "trf"
    out = least_squares(res, theta, jac=jac, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    return out.x if np.linalg.norm(res(out.x)) <= np.linalg.norm(res(theta)) else theta


def solve(split: CartanSplit, H: PauliSum, config: SolverConfig | None = None,
          generators: Sequence[PauliString] | None = None) -> DecompositionResult:
    """Minimize f from small seeded starts until K^dag H K lands in h.

    The optimization runs on H / |H| so ``grad_tol`` does not depend on the
    Hamiltonian's scale; ``residual_tol`` is relative to |H|.
    """
    cfg = config or SolverConfig()
    if not split.h_basis:
        raise ValueError("split has no Cartan subalgebra; call cartan_subalgebra first")
    gens = _generators(split, generators)
    t = build_tables(gens, split.m_basis)
    hnorm = H.norm()
    if hnorm == 0:
        raise ValueError("zero Hamiltonian")
    hvec = t.vector(H)
    hunit = hvec / hnorm
    v = build_v(split.h_basis, cfg.gamma)
    vvec = t.vector(v.as_sum())
    idx = t.index
    h_idx = np.array([idx[p] for p in split.h_basis], dtype=np.int_)
    off = np.ones(len(hvec), dtype=bool)
    off[h_idx] = False
    tol = cfg.residual_tol * hnorm

    def fg(theta, vvec=vvec):
        f, g = kernels.cost_grad(theta, vvec, hunit, t.ptr, t.pa, t.pb, t.ps)
        if not math.isfinite(f):
            raise SolveError(f"non-finite cost at iterate {theta!r}")
        return f, g

    def finish(theta, iters, restarts, g):
        coeffs, res = _extract_vec(t, theta, hvec, h_idx)
        return DecompositionResult(
            KFactorization(gens, theta), tuple(split.h_basis), coeffs, res,
            float(np.linalg.norm(g)), iters, restarts, fg(theta)[0], cfg,
        )

    zero = np.zeros(len(gens))
    _, res0 = _extract_vec(t, zero, hvec, h_idx)
    if res0 <= tol:
        return finish(zero, 0, 0, fg(zero)[1])

    best: DecompositionResult | None = None
    for attempt in range(cfg.max_restarts + 1):
        rng = np.random.default_rng([cfg.seed, attempt])
        theta0 = rng.uniform(-cfg.init_scale, cfg.init_scale, len(gens))
        # later attempts reassign the weights of v, which selects a different
        # (Weyl-equivalent) extremum and often a better-conditioned one
        w = vvec.copy()
        if attempt:
            w[h_idx] = vvec[h_idx][rng.permutation(len(h_idx))]
        opt = minimize(fg, theta0, args=(w,), jac=True, method="BFGS",
                       options={"gtol": cfg.grad_tol, "maxiter": cfg.max_iters, "norm": 2})
        theta = _refine(t, opt.x, hunit, off, cfg.refine_evals) if cfg.refine_evals else opt.x
        r = finish(theta, int(opt.nit), attempt, fg(theta)[1])
        log.debug("attempt %d: nit=%d |grad|=%.3g residual=%.3g", attempt, opt.nit, r.grad_norm, r.residual_off_h)
        if r.residual_off_h <= tol and r.grad_norm <= cfg.grad_tol:
            return r
        if best is None or r.residual_off_h < best.residual_off_h:
            best = r
    assert best is not None
    raise SolveError(
        f"no extremum with residual <= {tol:.3g} after {cfg.max_restarts + 1} attempts "
        f"(best residual {best.residual_off_h:.3g})",
        best.residual_off_h,
    )
