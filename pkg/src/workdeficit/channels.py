"""Elementary operations available to the two parties: pure ancillas,
local unitaries and complete local dephasing."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from workdeficit.errors import DimensionError
from workdeficit.qstate import (
    BipartiteState,
    LocalBasis,
    Party,
    check_party,
    is_unitary,
)

__all__ = [
    "BasisAngles",
    "LocalBasis",
    "add_ancilla",
    "apply_local_unitary",
    "apply_on_qubits",
    "cnot",
    "dephase_local",
    "dephase_qubit",
    "generator_unitary",
    "qubit_basis",
]


def qubit_basis(theta: float, phi: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(-1j * phi) * s],
         [np.exp(1j * phi) * s, c]],
        dtype=complex,
    )


@lru_cache(maxsize=None)
def _generator_indices(d: int):
    iu = np.triu_indices(d, 1)
    return np.diag_indices(d), iu, (iu[1], iu[0]), len(iu[0])


def _hermitian_from_params(params: np.ndarray, d: int) -> np.ndarray:
    diag, iu, il, m = _generator_indices(d)
    h = np.empty((d, d), dtype=complex)
    h[diag] = params[:d]
    z = params[d:d + m] + 1j * params[d + m:d + 2 * m]
    h[iu] = z
    h[il] = z.conj()
    return h


def _params_from_hermitian(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    iu = np.triu_indices(d, 1)
    return np.concatenate([np.diag(h).real, h[iu].real, h[iu].imag])


def generator_unitary(params: Sequence[float], d: int) -> np.ndarray:
    """exp(iH) for the Hermitian H built from d*d real parameters."""
    params = np.asarray(params, dtype=float)
    if params.shape != (d * d,):
        raise DimensionError(f"expected {d * d} generator parameters, got {params.shape}")
    return expm(1j * _hermitian_from_params(params, d))


@dataclass(frozen=True)
class BasisAngles:
    """Real parameterization of a local basis.

    For ``dim == 2`` the parameters are ``(theta, phi)`` and the basis
    columns are (cos t/2, e^{i phi} sin t/2) and (-e^{-i phi} sin t/2, cos t/2).
    For larger ``dim`` they are the ``dim**2`` entries of a Hermitian
    generator H and the basis is exp(iH).
    """

    dim: int
    params: tuple[float, ...]

    def __post_init__(self):
        params = tuple(float(x) for x in self.params)
        expected = 2 if self.dim == 2 else self.dim ** 2
        if self.dim < 2 or len(params) != expected:
            raise DimensionError(f"bad parameter count {len(params)} for dim {self.dim}")
        object.__setattr__(self, "params", params)

    @property
    def theta(self) -> float:
        return self.params[0]

    @property
    def phi(self) -> float:
        return self.params[1]

    def unitary(self) -> np.ndarray:
        if self.dim == 2:
            return qubit_basis(*self.params)
        return generator_unitary(self.params, self.dim)

    def to_basis(self) -> LocalBasis:
        return LocalBasis(self.unitary())

    def canonical(self) -> BasisAngles:
        """Qubit angles folded into theta in [0, pi], phi in [0, 2 pi).

        The folded angles describe the same basis up to column phases.
        """
        if self.dim != 2:
            return self
        theta, phi = self.params
        theta = theta % (2 * np.pi)
        if theta > np.pi:
            theta, phi = 2 * np.pi - theta, phi + np.pi
        phi = phi % (2 * np.pi)
        if np.isclose(phi, 2 * np.pi, rtol=0, atol=1e-15):
            phi = 0.0
        return BasisAngles(2, (theta, phi))

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> BasisAngles:
        """Angles whose basis matches the columns of ``u`` up to phases."""
        u = np.asarray(u, dtype=complex)
        d = u.shape[0]
        if d == 2:
            theta = 2 * np.arccos(np.clip(abs(u[0, 0]), 0.0, 1.0))
            if abs(u[0, 0]) < 1e-15 or abs(u[1, 0]) < 1e-15:
                phi = 0.0
            else:
                phi = float(np.angle(u[1, 0]) - np.angle(u[0, 0]))
            return cls(2, (theta, phi)).canonical()
        # spectral log: H = sum_k arg(w_k) P_k is Hermitian for unitary u
        w, v = np.linalg.eig(u)
        h = (v * np.angle(w)) @ np.linalg.inv(v)
        h = 0.5 * (h + h.conj().T)
        return cls(d, tuple(_params_from_hermitian(h)))


def _local_operator(s: BipartiteState, party: Party, op: np.ndarray) -> np.ndarray:
    if party == "A":
        if op.shape != (s.dim_a, s.dim_a):
            raise DimensionError(f"operator shape {op.shape} does not match Alice dim {s.dim_a}")
        return np.kron(op, np.eye(s.dim_b))
    if op.shape != (s.dim_b, s.dim_b):
        raise DimensionError(f"operator shape {op.shape} does not match Bob dim {s.dim_b}")
    return np.kron(np.eye(s.dim_a), op)


def dephase_local(s: BipartiteState, party: Party, basis: LocalBasis) -> BipartiteState:
    """sum_i (P_i (x) I) rho (P_i (x) I) with P_i the rank-one projectors of ``basis``."""
    party = check_party(party)
    out = np.zeros_like(s.rho)
    for p in basis.projectors():
        full = _local_operator(s, party, p)
        out += full @ s.rho @ full
    return BipartiteState(out, s.dim_a, s.dim_b)


def apply_local_unitary(s: BipartiteState, party: Party, u: np.ndarray) -> BipartiteState:
    party = check_party(party)
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("operator is not unitary")
    full = _local_operator(s, party, u)
    return BipartiteState(full @ s.rho @ full.conj().T, s.dim_a, s.dim_b)


def add_ancilla(s: BipartiteState, party: Party, anc_dim: int = 2) -> BipartiteState:
    """Attach |0><0| of dimension ``anc_dim`` after the party's existing system."""
    party = check_party(party)
    if anc_dim < 2:
        raise DimensionError("ancilla dimension must be at least 2")
    zero = np.zeros((anc_dim, anc_dim), dtype=complex)
    zero[0, 0] = 1.0
    big = np.kron(s.rho, zero)
    if party == "B":
        return BipartiteState(big, s.dim_a, s.dim_b * anc_dim)
    da, db, k = s.dim_a, s.dim_b, anc_dim
    t = big.reshape(da, db, k, da, db, k).transpose(0, 2, 1, 3, 5, 4)
    return BipartiteState(t.reshape(s.dim * k, s.dim * k), da * k, db)


def cnot(control: int, target: int, total_qubits: int) -> np.ndarray:
    """Permutation matrix of a CNOT on ``total_qubits`` qubits, qubit 0 most significant."""
    if control == target:
        raise ValueError("control and target must differ")
    for q in (control, target):
        if not 0 <= q < total_qubits:
            raise ValueError(f"qubit {q} out of range for {total_qubits} qubits")
    d = 2 ** total_qubits
    idx = np.arange(d)
    cbit = (idx >> (total_qubits - 1 - control)) & 1
    flipped = idx ^ (cbit << (total_qubits - 1 - target))
    m = np.zeros((d, d), dtype=complex)
    m[flipped, idx] = 1.0
    return m


def apply_on_qubits(rho: np.ndarray, op: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """op rho op^dagger with ``op`` acting on ``qubits`` (in the listed order)."""
    qubits = list(qubits)
    k = len(qubits)
    if len(set(qubits)) != k:
        raise ValueError(f"repeated qubit in {qubits}")
    op = np.asarray(op, dtype=complex).reshape([2] * (2 * k))
    t = rho.reshape([2] * (2 * n_qubits))
    t = np.tensordot(op, t, axes=(list(range(k, 2 * k)), qubits))
    t = np.moveaxis(t, list(range(k)), qubits)
    cols = [n_qubits + q for q in qubits]
    t = np.tensordot(t, op.conj(), axes=(cols, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(2 * n_qubits - k, 2 * n_qubits)), cols)
    d = 2 ** n_qubits
    return t.reshape(d, d)


def dephase_qubit(rho: np.ndarray, qubit: int, basis: LocalBasis, n_qubits: int) -> np.ndarray:
    if basis.dim != 2:
        raise DimensionError("a single qubit is dephased in a two-dimensional basis")
    return sum(apply_on_qubits(rho, p, [qubit], n_qubits) for p in basis.projectors())
