"""Generators for the state families used throughout the package."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from workdeficit.errors import FamilyMismatchError
from workdeficit.qstate import (
    HERMITIAN_TOL,
    PSD_TOL,
    TRACE_TOL,
    BipartiteState,
    LocalBasis,
    PureState,
)

FAMILIES = (
    "max_entangled",
    "cc_pair",
    "classically_correlated",
    "max_correlated",
    "phi_mixture",
    "random_mixed",
    "random_pure",
)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    dim_a: Optional[int] = None
    dim_b: Optional[int] = None
    d: Optional[int] = None
    p: Optional[float] = None
    probs: Optional[Any] = None
    sigma: Optional[Any] = None
    basis_a: Optional[LocalBasis] = None
    basis_b: Optional[LocalBasis] = None
    rank: Optional[int] = None
    seed: int = 0


@dataclass(frozen=True)
class Diagnostics:
    hermitian_residual: float
    trace_residual: float
    min_eigenvalue: float
    hermitian_ok: bool
    trace_ok: bool
    psd_ok: bool

    @property
    def ok(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.psd_ok


def validate(s: BipartiteState) -> Diagnostics:
    herm, trace, min_eig = s.residuals()
    return Diagnostics(
        hermitian_residual=herm,
        trace_residual=trace,
        min_eigenvalue=min_eig,
        hermitian_ok=herm <= HERMITIAN_TOL,
        trace_ok=trace <= TRACE_TOL,
        psd_ok=min_eig >= -PSD_TOL,
    )


def _ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def max_entangled(d: int = 2) -> PureState:
    if d < 2:
        raise ValueError("d must be at least 2")
    psi = sum(np.kron(_ket(i, d), _ket(i, d)) for i in range(d)) / np.sqrt(d)
    return PureState(psi, d, d)


def cc_pair() -> BipartiteState:
    """(|00><00| + |11><11|) / 2."""
    return classically_correlated(np.diag([0.5, 0.5]))


def classically_correlated(
    probs,
    basis_a: Optional[LocalBasis] = None,
    basis_b: Optional[LocalBasis] = None,
) -> BipartiteState:
    """sum_ij p_ij |i_A j_B><i_A j_B| in the given local bases (computational by default)."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 2:
        raise ValueError("probability table must be two-dimensional")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probability table must be nonnegative and sum to 1")
    da, db = p.shape
    ua = (basis_a or LocalBasis.computational(da)).u
    ub = (basis_b or LocalBasis.computational(db)).u
    if ua.shape[0] != da or ub.shape[0] != db:
        raise ValueError("basis dimensions do not match the probability table")
    w = np.kron(ua, ub)
    rho = w @ np.diag(p.reshape(-1).astype(complex)) @ w.conj().T
    return BipartiteState(rho, da, db)


def _check_density(m: np.ndarray, name: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square")
    if np.max(np.abs(m - m.conj().T)) > 1e-9:
        raise ValueError(f"{name} must be Hermitian")
    if abs(np.trace(m) - 1) > 1e-9:
        raise ValueError(f"{name} must have unit trace")
    if np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0] < -1e-9:
        raise ValueError(f"{name} must be positive semidefinite")


def max_correlated(sigma) -> BipartiteState:
    """sum_ij sigma_ij |ii><jj| for a density matrix sigma."""
    sigma = np.asarray(sigma, dtype=complex)
    _check_density(sigma, "sigma")
    d = sigma.shape[0]
    rho = np.zeros((d * d, d * d), dtype=complex)
    diag = np.arange(d) * (d + 1)
    rho[np.ix_(diag, diag)] = sigma
    return BipartiteState(rho, d, d)


def maxcorr_coefficients(s: BipartiteState, tol: float = 1e-9) -> np.ndarray:
    """Recover sigma from a state sum_ij sigma_ij |ii><jj|.

    Raises FamilyMismatchError when the state has weight anywhere else.
    """
    if s.dim_a != s.dim_b:
        raise FamilyMismatchError("maximally correlated states need equal local dimensions")
    d = s.dim_a
    diag = np.arange(d) * (d + 1)
    sigma = s.rho[np.ix_(diag, diag)]
    rest = s.rho.copy()
    rest[np.ix_(diag, diag)] = 0
    if rest.size and np.max(np.abs(rest)) > tol:
        raise FamilyMismatchError(
            f"state has weight {np.max(np.abs(rest)):.3g} outside the |ii><jj| block"
        )
    return sigma


def phi_mixture(p: float) -> BipartiteState:
    """p Phi+ + (1 - p) Phi-, with Phi+- = (|00> +- |11>)/sqrt 2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    # written in closed form so that p = 1/2 gives cc_pair exactly
    return max_correlated(np.array([[0.5, p - 0.5], [p - 0.5, 0.5]]))


def random_density(dim: int, rank: Optional[int], rng: np.random.Generator) -> np.ndarray:
    """Ginibre ensemble: G G^dagger / Tr, with G of shape (dim, rank)."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}]")
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_mixed(dim_a: int, dim_b: int, rank: Optional[int] = None, seed: int = 0) -> BipartiteState:
    rng = np.random.default_rng(seed)
    return BipartiteState(random_density(dim_a * dim_b, rank, rng), dim_a, dim_b)


def random_pure(dim_a: int, dim_b: int, seed: int = 0) -> PureState:
    rng = np.random.default_rng(seed)
    d = dim_a * dim_b
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(psi / np.linalg.norm(psi), dim_a, dim_b)


def gen(spec: FamilySpec):
    """Build the state described by ``spec``.

    Pure families (max_entangled, random_pure) return a PureState; the rest
    return a BipartiteState.
    """
    f = spec.family
    if f == "max_entangled":
        return max_entangled(spec.d or 2)
    if f == "cc_pair":
        return cc_pair()
    if f == "classically_correlated":
        if spec.probs is None:
            raise ValueError("classically_correlated needs a probability table")
        return classically_correlated(spec.probs, spec.basis_a, spec.basis_b)
    if f == "max_correlated":
        if spec.sigma is None:
            raise ValueError("max_correlated needs sigma")
        return max_correlated(spec.sigma)
    if f == "phi_mixture":
        if spec.p is None:
            raise ValueError("phi_mixture needs p")
        return phi_mixture(spec.p)
    if f == "random_mixed":
        return random_mixed(spec.dim_a or 2, spec.dim_b or 2, spec.rank, spec.seed)
    if f == "random_pure":
        return random_pure(spec.dim_a or 2, spec.dim_b or 2, spec.seed)
    raise ValueError(f"unknown family {f!r}; expected one of {', '.join(FAMILIES)}")
