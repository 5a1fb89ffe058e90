"""Dense density-matrix primitives for two-party states.

Joint indices are Alice-major: basis state |a>|b> sits at ``a * dim_b + b``.
All entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from workdeficit.errors import DimensionError, InvalidStateError

Party = Literal["A", "B"]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
UNITARY_TOL = 1e-9
# looser than HERMITIAN_TOL so that products of valid states stay accepted
EIG_HERMITIAN_TOL = 1e-9


def check_party(party: str) -> Party:
    if party not in ("A", "B"):
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    return party  # type: ignore[return-value]


def qubit_count(dim: int) -> int:
    """Number of qubits in a register of dimension ``dim`` (a power of two)."""
    if dim < 1 or dim & (dim - 1):
        raise DimensionError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1


@dataclass(frozen=True)
class LocalBasis:
    """Orthonormal basis of one subsystem; the columns of ``u`` are the vectors."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionError(f"basis matrix must be square, got shape {u.shape}")
        if not is_unitary(u):
            raise ValueError("basis matrix is not unitary")
        object.__setattr__(self, "u", u)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    @classmethod
    def computational(cls, dim: int) -> LocalBasis:
        return cls(np.eye(dim, dtype=complex))

    def projectors(self) -> list[np.ndarray]:
        return [np.outer(col, col.conj()) for col in self.u.T]


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


@dataclass(frozen=True)
class BipartiteState:
    rho: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        d = self.dim_a * self.dim_b
        if self.dim_a < 1 or self.dim_b < 1 or rho.shape != (d, d):
            raise DimensionError(
                f"rho has shape {rho.shape}, expected ({d}, {d}) for dims "
                f"({self.dim_a}, {self.dim_b})"
            )
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def n_qubits(self) -> int:
        return qubit_count(self.dim_a) + qubit_count(self.dim_b)

    def reduced(self, party: Party) -> np.ndarray:
        return partial_trace(self, party)

    def swapped(self) -> BipartiteState:
        """Same state with the roles of Alice and Bob exchanged."""
        t = self.rho.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)
        t = t.transpose(1, 0, 3, 2).reshape(self.dim, self.dim)
        return BipartiteState(t, self.dim_b, self.dim_a)

    def residuals(self) -> tuple[float, float, float]:
        """(hermiticity, trace, smallest eigenvalue) of ``rho``."""
        herm = float(np.max(np.abs(self.rho - self.rho.conj().T)))
        trace = float(abs(np.trace(self.rho) - 1.0))
        min_eig = float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])
        return herm, trace, min_eig

    def is_valid(self) -> bool:
        herm, trace, min_eig = self.residuals()
        return herm <= HERMITIAN_TOL and trace <= TRACE_TOL and min_eig >= -PSD_TOL

    def require_valid(self) -> BipartiteState:
        herm, trace, min_eig = self.residuals()
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"rho is not Hermitian (residual {herm:.3g})")
        if trace > TRACE_TOL:
            raise InvalidStateError(f"rho does not have unit trace (residual {trace:.3g})")
        if min_eig < -PSD_TOL:
            raise InvalidStateError(f"rho is not positive semidefinite (eigenvalue {min_eig:.3g})")
        return self


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if psi.size != self.dim_a * self.dim_b:
            raise DimensionError(
                f"{psi.size} amplitudes do not match dims ({self.dim_a}, {self.dim_b})"
            )
        norm = float(np.vdot(psi, psi).real)
        if abs(norm - 1.0) > 1e-10:
            raise InvalidStateError(f"pure state is not normalized (|psi|^2 = {norm!r})")
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    def density(self) -> BipartiteState:
        return BipartiteState(np.outer(self.amplitudes, self.amplitudes.conj()), self.dim_a, self.dim_b)


@dataclass(frozen=True)
class SchmidtForm:
    """psi = sum_i coefficients[i] * basis_a.u[:, i] (x) basis_b.u[:, i]."""

    coefficients: np.ndarray
    basis_a: LocalBasis
    basis_b: LocalBasis

    def reconstruct(self) -> np.ndarray:
        k = len(self.coefficients)
        ua = self.basis_a.u[:, :k]
        ub = self.basis_b.u[:, :k]
        return np.einsum("i,ai,bi->ab", self.coefficients, ua, ub).reshape(-1)


def tensor_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.kron(x, y)


def product_state(rho_a: np.ndarray, rho_b: np.ndarray) -> BipartiteState:
    return BipartiteState(np.kron(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0])


def tensor_states(s: BipartiteState, t: BipartiteState) -> BipartiteState:
    """s (x) t regrouped so Alice holds both A parts and Bob both B parts."""
    da, db, ea, eb = s.dim_a, s.dim_b, t.dim_a, t.dim_b
    big = np.kron(s.rho, t.rho).reshape(da, db, ea, eb, da, db, ea, eb)
    big = big.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    d = da * db * ea * eb
    return BipartiteState(big.reshape(d, d), da * ea, db * eb)


def partial_trace(s: BipartiteState, keep: Party) -> np.ndarray:
    """Reduced density matrix of the party ``keep``."""
    keep = check_party(keep)
    t = s.rho.reshape(s.dim_a, s.dim_b, s.dim_a, s.dim_b)
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    return np.einsum("aiaj->ij", t)


def reduce_qubits(rho: np.ndarray, keep: Sequence[int], n_qubits: int) -> np.ndarray:
    """Reduced density matrix of the listed qubits (qubit 0 most significant).

    The kept qubits appear in ascending order in the result.
    """
    keep = sorted(keep)
    if not keep:
        return np.ones((1, 1), dtype=complex) * np.trace(rho)
    drop = [q for q in range(n_qubits) if q not in keep]
    t = rho.reshape([2] * (2 * n_qubits))
    perm = keep + drop + [n_qubits + q for q in keep] + [n_qubits + q for q in drop]
    t = t.transpose(perm)
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("iaja->ij", t)


def eigh_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    resid = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if resid > EIG_HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (residual {resid:.3g})")
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def eigvals_hermitian(m: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in ascending order."""
    return eigh_hermitian(m)[0]


def _entropy_of_spectrum(w: np.ndarray) -> float:
    if w.size and w.min() < -PSD_TOL:
        raise InvalidStateError(f"negative eigenvalue {w.min():.3g}")
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(m: np.ndarray) -> float:
    """-Tr m log2 m.

    Eigenvalues in [-1e-9, 0) are treated as zero; anything more negative
    raises :class:`InvalidStateError`.
    """
    return max(_entropy_of_spectrum(eigvals_hermitian(m)), 0.0)


def shannon_entropy(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float).reshape(-1)
    if np.any(p < 0):
        raise ValueError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    p = p[p > 0]
    return max(float(-np.sum(p * np.log2(p))), 0.0)


def schmidt_decompose(psi: PureState) -> SchmidtForm:
    m = psi.amplitudes.reshape(psi.dim_a, psi.dim_b)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    order = np.argsort(-s, kind="stable")
    k = len(s)
    ua = u.copy()
    ua[:, :k] = u[:, order]
    vb = vh.T.copy()
    vb[:, :k] = vh.T[:, order]
    return SchmidtForm(s[order], LocalBasis(ua), LocalBasis(vb))


def is_cc_in_basis(s: BipartiteState, basis_a: LocalBasis, basis_b: LocalBasis, tol: float = 1e-9) -> bool:
    """True iff rho is diagonal in the product basis basis_a (x) basis_b."""
    if basis_a.dim != s.dim_a or basis_b.dim != s.dim_b:
        raise DimensionError("basis dimensions do not match the state")
    w = np.kron(basis_a.u, basis_b.u)
    r = w.conj().T @ s.rho @ w
    off = r - np.diag(np.diag(r))
    return float(np.max(np.abs(off))) <= tol
