"""Global work, local work and the work deficit.

All quantities are in bits (units of kT ln 2). The one-way deficit is the
smallest entropy increase Alice can cause by completely dephasing her whole
system in some basis before handing it to Bob:

    delta_one_way = min_U S(sum_i (P_i x I) rho (P_i x I)) - S(rho)
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from workdeficit.channels import BasisAngles, generator_unitary, qubit_basis
from workdeficit.errors import DimensionError, FamilyMismatchError
from workdeficit.qstate import (
    BipartiteState,
    PureState,
    partial_trace,
    qubit_count,
    schmidt_decompose,
    shannon_entropy,
    tensor_states,
    von_neumann_entropy,
)
from workdeficit.states import maxcorr_coefficients

MAX_TOTAL_DIM = 64
ALICE_DIMS = (2, 3, 4)
THREADS_ENV = "WORKDEFICIT_THREADS"


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not (self.f_tol > 0 and self.x_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class DeficitReport:
    n: Optional[int]
    w_total: Optional[float]
    w_local: Optional[float]
    s_a: float
    s_b: float
    s_total: float
    delta_one_way: float
    lower_bound: float
    best_basis: BasisAngles
    closed_form: Optional[float] = None
    closed_form_family: Optional[str] = None
    direction: str = "A->B"
    winner_restart: int = 0
    iterations: int = 0
    evaluations: int = 0
    restarts: int = 0
    seed: int = 0
    restart_values: tuple[float, ...] = field(default=(), repr=False)


# -- closed forms ----------------------------------------------------------------

def total_work(s: BipartiteState) -> float:
    """n - S(rho) for an n-qubit state."""
    return s.n_qubits - von_neumann_entropy(s.rho)


def classical_work(p: Sequence[float]) -> float:
    """n - H(X) for a distribution over n-bit strings."""
    p = np.asarray(p, dtype=float).reshape(-1)
    return qubit_count(p.size) - shannon_entropy(p)


def deficit_lower_bound(s: BipartiteState) -> float:
    s_a = von_neumann_entropy(partial_trace(s, "A"))
    s_b = von_neumann_entropy(partial_trace(s, "B"))
    return max(s_a, s_b) - von_neumann_entropy(s.rho)


def pure_state_deficit(psi: PureState) -> float:
    """Entropy of the squared Schmidt coefficients (the entanglement of psi)."""
    weights = schmidt_decompose(psi).coefficients ** 2
    return shannon_entropy(weights / weights.sum())


def maxcorr_deficit(s: BipartiteState) -> float:
    """S(rho_A) - S(rho) for rho = sum_ij sigma_ij |ii><jj|."""
    maxcorr_coefficients(s)
    return von_neumann_entropy(partial_trace(s, "A")) - von_neumann_entropy(s.rho)


def closed_form(s: BipartiteState) -> tuple[Optional[float], Optional[str]]:
    """Known exact deficit for pure and maximally correlated states, else (None, None)."""
    w = np.linalg.eigvalsh(s.rho)
    if w[-1] > 1 - 1e-9:
        return von_neumann_entropy(partial_trace(s, "A")), "pure"
    try:
        return maxcorr_deficit(s), "max_correlated"
    except FamilyMismatchError:
        return None, None


# -- optimizer -------------------------------------------------------------------

def _angles_to_unitary(x: np.ndarray, d: int) -> np.ndarray:
    if d == 2:
        return qubit_basis(x[0], x[1])
    return generator_unitary(x, d)


def _block_entropy(r4: np.ndarray, u: np.ndarray) -> float:
    """S of rho dephased on Alice in the columns of u.

    After rotating Alice into the basis only the diagonal Alice blocks
    survive, so the spectrum is the union of the block spectra.
    """
    blocks = np.einsum("ai,ci,abcd->ibd", u.conj(), u, r4)
    w = np.linalg.eigvalsh(blocks).reshape(-1)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def _start_points(s: BipartiteState, cfg: OptimizerConfig) -> list[np.ndarray]:
    d = s.dim_a
    w, v = np.linalg.eigh(partial_trace(s, "A"))
    starts = [np.array(BasisAngles.from_unitary(v[:, ::-1]).params)]
    if cfg.restarts > 1:
        starts.append(np.zeros(2 if d == 2 else d * d))
    key = cfg.seed % 2 ** 64
    for r in range(len(starts), cfg.restarts):
        rng = np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, r]))
        if d == 2:
            starts.append(np.array([rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)]))
        else:
            starts.append(rng.uniform(-np.pi, np.pi, size=d * d))
    return starts


def _thread_count(restarts: int) -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    n = int(raw)
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, min(n, restarts))


def _local_search(r4: np.ndarray, d: int, x0: np.ndarray, cfg: OptimizerConfig):
    def f(x):
        return _block_entropy(r4, _angles_to_unitary(x, d))

    step = 0.25
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(len(x0))])
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.max_iters,
            "xatol": cfg.x_tol,
            "fatol": cfg.f_tol,
            "initial_simplex": simplex,
        },
    )
    return float(res.fun), np.asarray(res.x), int(res.nit), int(res.nfev)


def one_way_deficit(
    s: BipartiteState,
    cfg: Optional[OptimizerConfig] = None,
    reverse: bool = False,
) -> DeficitReport:
    """Minimize the entropy Alice's complete dephasing adds, over her bases.

    With ``reverse=True`` the parties swap roles and Bob dephases instead.
    Restart 0 starts from the eigenbasis of the sender's reduced state,
    restart 1 from the computational basis and the rest from points drawn
    with a Philox generator keyed on ``cfg.seed`` and the restart index, so
    the result does not depend on how restarts are scheduled.
    """
    cfg = cfg or OptimizerConfig()
    s_orig = s
    if reverse:
        s = s.swapped()
    if s.dim_a not in ALICE_DIMS:
        raise DimensionError(f"sender dimension {s.dim_a} not in {ALICE_DIMS}")
    if s.dim > MAX_TOTAL_DIM:
        raise DimensionError(f"total dimension {s.dim} exceeds {MAX_TOTAL_DIM}")

    d = s.dim_a
    r4 = s.rho.reshape(s.dim_a, s.dim_b, s.dim_a, s.dim_b)
    starts = _start_points(s, cfg)
    threads = _thread_count(cfg.restarts)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            runs = list(pool.map(lambda x0: _local_search(r4, d, x0, cfg), starts))
    else:
        runs = [_local_search(r4, d, x0, cfg) for x0 in starts]

    winner = min(range(len(runs)), key=lambda i: (runs[i][0], i))
    best_val, best_x, nit, _ = runs[winner]

    s_total = von_neumann_entropy(s.rho)
    s_a = von_neumann_entropy(partial_trace(s_orig, "A"))
    s_b = von_neumann_entropy(partial_trace(s_orig, "B"))
    delta = best_val - s_total
    try:
        n = s.n_qubits
        w_total = n - s_total
        w_local = w_total - delta
    except DimensionError:
        n = w_total = w_local = None
    cf, family = closed_form(s)
    return DeficitReport(
        n=n,
        w_total=w_total,
        w_local=w_local,
        s_a=s_a,
        s_b=s_b,
        s_total=s_total,
        delta_one_way=delta,
        lower_bound=max(s_a, s_b) - s_total,
        best_basis=BasisAngles(d, tuple(best_x)).canonical(),
        closed_form=cf,
        closed_form_family=family,
        direction="B->A" if reverse else "A->B",
        winner_restart=winner,
        iterations=nit,
        evaluations=sum(r[3] for r in runs),
        restarts=cfg.restarts,
        seed=cfg.seed,
        restart_values=tuple(r[0] - s_total for r in runs),
    )


def additivity_check(s: BipartiteState, cfg: Optional[OptimizerConfig] = None) -> tuple[float, float]:
    """(one-way deficit of rho, one-way deficit of rho (x) rho).

    In the two-copy state Alice holds both A parts as one system.
    """
    if s.dim > 4:
        raise DimensionError("additivity check is limited to states of total dimension <= 4")
    single = one_way_deficit(s, cfg).delta_one_way
    double = one_way_deficit(tensor_states(s, s), cfg).delta_one_way
    return single, double


# -- grid oracle -------------------------------------------------------------------

@dataclass(frozen=True)
class GridResult:
    value: float
    theta: float
    phi: float
    grid_theta: int
    grid_phi: int


def grid_search(s: BipartiteState, grid_theta: int = 181, grid_phi: int = 360) -> GridResult:
    """Exhaustive search of qubit bases for Alice on a (theta, phi) grid.

    Evaluated by explicitly summing the projected states and diagonalizing
    the full dephased matrix, independently of the optimizer's objective.
    """
    if s.dim_a != 2:
        raise DimensionError("the grid oracle needs a qubit on Alice's side")
    if grid_theta < 1 or grid_phi < 1:
        raise ValueError("grid sizes must be positive")
    thetas = np.linspace(0.0, np.pi, grid_theta)
    phis = 2 * np.pi * np.arange(grid_phi) / grid_phi
    eye_b = np.eye(s.dim_b)
    s0 = von_neumann_entropy(s.rho)

    best = (np.inf, 0.0, 0.0)
    for theta in thetas:
        c = np.cos(theta / 2)
        sn = np.sin(theta / 2)
        e0 = np.stack([np.full(grid_phi, c, dtype=complex), np.exp(1j * phis) * sn], axis=1)
        e1 = np.stack([-np.exp(-1j * phis) * sn, np.full(grid_phi, c, dtype=complex)], axis=1)
        out = 0
        for e in (e0, e1):
            proj = np.einsum("ga,gb->gab", e, e.conj())
            full = np.einsum("gab,cd->gacbd", proj, eye_b).reshape(grid_phi, s.dim, s.dim)
            out = out + full @ s.rho @ full
        w = np.linalg.eigvalsh(out)
        w = np.where(w > 0, w, 1.0)
        ent = -np.sum(w * np.log2(w), axis=1)
        j = int(np.argmin(ent))
        if ent[j] < best[0]:
            best = (float(ent[j]), float(theta), float(phis[j]))
    return GridResult(best[0] - s0, best[1], best[2], grid_theta, grid_phi)


def oracle_one_way_deficit(s: BipartiteState, grid_theta: int = 181, grid_phi: int = 360) -> float:
    return grid_search(s, grid_theta, grid_phi).value
