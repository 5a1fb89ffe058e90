"""Replay of two-party protocols built from ancillas, local unitaries and
dephase-and-send steps, with the local work bookkeeping.

Qubits are numbered in the order they appear in the joint state, qubit 0
most significant. Ancillas are appended at the end.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from workdeficit import channels
from workdeficit.channels import BasisAngles
from workdeficit.errors import DimensionError, LocalityError
from workdeficit.qstate import (
    BipartiteState,
    LocalBasis,
    Party,
    check_party,
    is_unitary,
    qubit_count,
    reduce_qubits,
    von_neumann_entropy,
)

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class AddAncilla:
    party: Party


@dataclass(frozen=True)
class LocalUnitary:
    party: Party
    qubits: tuple[int, ...]
    unitary: np.ndarray = field(compare=False)
    name: Optional[str] = None


@dataclass(frozen=True)
class DephaseAndSend:
    party: Party
    qubit: int
    basis: BasisAngles
    to: Party


Step = Union[AddAncilla, LocalUnitary, DephaseAndSend]

_CNOT = channels.cnot(0, 1, 2)
COMPUTATIONAL = BasisAngles(2, (0.0, 0.0))


def cnot_step(party: Party, control: int, target: int) -> LocalUnitary:
    return LocalUnitary(party, (control, target), _CNOT, name="cnot")


@dataclass(frozen=True)
class ProtocolLedger:
    joint: np.ndarray
    holders: tuple[str, ...]
    n_original: int

    @property
    def n_qubits(self) -> int:
        return len(self.holders)

    @property
    def k(self) -> int:
        return self.n_qubits - self.n_original

    def held_by(self, party: Party) -> list[int]:
        return [q for q, h in enumerate(self.holders) if h == party]


@dataclass(frozen=True)
class WorkResult:
    w_local: float
    s_a_final: float
    s_b_final: float
    k: int
    n: int
    n_a_final: int
    n_b_final: int


def ledger_init(s: BipartiteState, holders: Optional[Sequence[str]] = None) -> ProtocolLedger:
    na, nb = qubit_count(s.dim_a), qubit_count(s.dim_b)
    default = ("A",) * na + ("B",) * nb
    if holders is None:
        holders = default
    holders = tuple(holders)
    if holders != default:
        raise ValueError(
            f"holders {holders} are inconsistent with a {na}+{nb} qubit split; expected {default}"
        )
    return ProtocolLedger(np.array(s.rho, dtype=complex), holders, na + nb)


def ledger_apply(ledger: ProtocolLedger, step: Step) -> ProtocolLedger:
    m = ledger.n_qubits
    if isinstance(step, AddAncilla):
        party = check_party(step.party)
        zero = np.array([[1, 0], [0, 0]], dtype=complex)
        return replace(ledger, joint=np.kron(ledger.joint, zero), holders=ledger.holders + (party,))

    if isinstance(step, LocalUnitary):
        party = check_party(step.party)
        for q in step.qubits:
            if not 0 <= q < m:
                raise DimensionError(f"qubit {q} does not exist ({m} live qubits)")
            if ledger.holders[q] != party:
                raise LocalityError(
                    f"party {party} cannot act on qubit {q} held by {ledger.holders[q]}"
                )
        u = np.asarray(step.unitary, dtype=complex)
        dim = 2 ** len(step.qubits)
        if u.shape != (dim, dim):
            raise DimensionError(f"unitary shape {u.shape} does not fit {len(step.qubits)} qubits")
        if not is_unitary(u):
            raise ValueError("local-unitary step carries a non-unitary matrix")
        joint = channels.apply_on_qubits(ledger.joint, u, step.qubits, m)
        return replace(ledger, joint=joint)

    if isinstance(step, DephaseAndSend):
        party, to = check_party(step.party), check_party(step.to)
        q = step.qubit
        if not 0 <= q < m:
            raise DimensionError(f"qubit {q} does not exist ({m} live qubits)")
        if ledger.holders[q] != party:
            raise LocalityError(f"party {party} cannot send qubit {q} held by {ledger.holders[q]}")
        if step.basis.dim != 2:
            raise DimensionError("dephase-send needs a qubit basis")
        joint = channels.dephase_qubit(ledger.joint, q, step.basis.to_basis(), m)
        holders = ledger.holders[:q] + (to,) + ledger.holders[q + 1:]
        return replace(ledger, joint=joint, holders=holders)

    raise TypeError(f"not a protocol step: {step!r}")


def replay(ledger: ProtocolLedger, steps: Sequence[Step]) -> ProtocolLedger:
    for step in steps:
        ledger = ledger_apply(ledger, step)
    return ledger


def ledger_finalize(ledger: ProtocolLedger) -> WorkResult:
    m = ledger.n_qubits
    qa, qb = ledger.held_by("A"), ledger.held_by("B")
    s_a = von_neumann_entropy(reduce_qubits(ledger.joint, qa, m)) if qa else 0.0
    s_b = von_neumann_entropy(reduce_qubits(ledger.joint, qb, m)) if qb else 0.0
    per_party = len(qa) - s_a + len(qb) - s_b - ledger.k
    net = ledger.n_original - s_a - s_b
    if abs(per_party - net) > CONSISTENCY_TOL:
        raise AssertionError(f"local work accounting disagrees: {per_party!r} vs {net!r}")
    return WorkResult(
        w_local=net,
        s_a_final=s_a,
        s_b_final=s_b,
        k=ledger.k,
        n=ledger.n_original,
        n_a_final=len(qa),
        n_b_final=len(qb),
    )


# -- builtin scripts ---------------------------------------------------------

BUILTINS = ("cc_measure_send", "schmidt_dephase", "maxcorr_dephase")


def cc_measure_send(ledger: ProtocolLedger) -> list[Step]:
    """Measure-copy-send-erase, pairing Alice's j-th qubit with Bob's j-th.

    For each pair: (a) Alice adds a meter qubit and copies her bit into it,
    (b, c) dephases the meter and sends it to Bob, (d) Bob uses it as the
    control of a CNOT on his bit, (e) sends it back, (f) Alice un-copies.
    """
    qa, qb = ledger.held_by("A"), ledger.held_by("B")
    if not qa or not qb:
        raise ValueError("cc_measure_send needs qubits on both sides")
    steps: list[Step] = []
    meter = ledger.n_qubits
    for a, b in zip(qa, qb):
        steps += [
            AddAncilla("A"),
            cnot_step("A", a, meter),
            DephaseAndSend("A", meter, COMPUTATIONAL, "B"),
            cnot_step("B", meter, b),
            DephaseAndSend("B", meter, COMPUTATIONAL, "A"),
            cnot_step("A", a, meter),
        ]
        meter += 1
    return steps


def schmidt_dephase(ledger: ProtocolLedger, basis: LocalBasis) -> list[Step]:
    """Alice dephases her whole register in ``basis`` and sends it to Bob."""
    qa = ledger.held_by("A")
    if basis.dim != 2 ** len(qa):
        raise DimensionError(f"basis of dim {basis.dim} does not fit Alice's {len(qa)} qubits")
    if len(qa) == 1:
        return [DephaseAndSend("A", qa[0], BasisAngles.from_unitary(basis.u), "B")]
    # rotate the basis onto the computational one, then dephase qubit by qubit
    steps: list[Step] = [LocalUnitary("A", tuple(qa), basis.u.conj().T)]
    steps += [DephaseAndSend("A", q, COMPUTATIONAL, "B") for q in qa]
    return steps


def maxcorr_dephase(ledger: ProtocolLedger) -> list[Step]:
    return [DephaseAndSend("A", q, COMPUTATIONAL, "B") for q in ledger.held_by("A")]


def builtin_script(name: str, ledger: ProtocolLedger, basis: Optional[LocalBasis] = None) -> list[Step]:
    name = name.replace("-", "_")
    if name == "cc_measure_send":
        return cc_measure_send(ledger)
    if name == "schmidt_dephase":
        if basis is None:
            raise ValueError("schmidt_dephase needs Alice's Schmidt basis")
        return schmidt_dephase(ledger, basis)
    if name == "maxcorr_dephase":
        return maxcorr_dephase(ledger)
    raise ValueError(f"unknown builtin script {name!r}; expected one of {', '.join(BUILTINS)}")


# -- script records ------------------------------------------------------------

def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _pairs_to_matrix(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix must be a nested array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def step_to_record(step: Step) -> dict:
    if isinstance(step, AddAncilla):
        return {"op": "add-ancilla", "party": step.party, "qubits": [], "basis": None, "to": None, "unitary": None}
    if isinstance(step, LocalUnitary):
        unitary = step.name if step.name == "cnot" else _matrix_to_pairs(step.unitary)
        return {"op": "local-unitary", "party": step.party, "qubits": list(step.qubits),
                "basis": None, "to": None, "unitary": unitary}
    if isinstance(step, DephaseAndSend):
        return {"op": "dephase-send", "party": step.party, "qubits": [step.qubit],
                "basis": {"theta": step.basis.theta, "phi": step.basis.phi},
                "to": step.to, "unitary": None}
    raise TypeError(f"not a protocol step: {step!r}")


def step_from_record(rec: dict) -> Step:
    if not isinstance(rec, dict):
        raise ValueError(f"step record must be an object, got {type(rec).__name__}")
    op = rec.get("op")
    party = check_party(rec.get("party"))
    qubits = [int(q) for q in rec.get("qubits") or []]
    if op == "add-ancilla":
        return AddAncilla(party)
    if op == "local-unitary":
        u = rec.get("unitary")
        if u == "cnot":
            if len(qubits) != 2:
                raise ValueError("cnot acts on exactly two qubits [control, target]")
            return cnot_step(party, qubits[0], qubits[1])
        if u is None:
            raise ValueError("local-unitary step needs a unitary")
        return LocalUnitary(party, tuple(qubits), _pairs_to_matrix(u))
    if op == "dephase-send":
        if len(qubits) != 1:
            raise ValueError("dephase-send acts on exactly one qubit")
        b = rec.get("basis")
        angles = COMPUTATIONAL if b is None else BasisAngles(2, (float(b["theta"]), float(b["phi"])))
        to = rec.get("to")
        if to is None:
            to = "B" if party == "A" else "A"
        return DephaseAndSend(party, qubits[0], angles, check_party(to))
    raise ValueError(f"unknown step op {op!r}")
