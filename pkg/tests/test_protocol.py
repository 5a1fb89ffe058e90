import numpy as np
import pytest

from conftest import ket, proj
from workdeficit import states
from workdeficit.channels import BasisAngles
from workdeficit.errors import DimensionError, LocalityError
from workdeficit.protocol import (
    AddAncilla,
    DephaseAndSend,
    LocalUnitary,
    builtin_script,
    cnot_step,
    ledger_apply,
    ledger_finalize,
    ledger_init,
    replay,
    step_from_record,
    step_to_record,
)
from workdeficit.qstate import (
    BipartiteState,
    LocalBasis,
    partial_trace,
    reduce_qubits,
    schmidt_decompose,
    von_neumann_entropy,
)

COMP = BasisAngles(2, (0.0, 0.0))


def test_init_counts_qubits(cc, singlet):
    assert ledger_init(cc).n_original == 2
    assert ledger_init(singlet, ["A", "B"]).n_original == 2
    one = ledger_init(BipartiteState(proj([1, 0]), 2, 1))
    assert one.n_original == 1 and one.holders == ("A",) and one.k == 0


def test_init_rejects_non_qubit_dims():
    with pytest.raises(DimensionError):
        ledger_init(states.random_mixed(3, 2, seed=0))
    with pytest.raises(ValueError):
        ledger_init(states.cc_pair(), ["B", "A"])


def test_add_ancilla_step(cc):
    led = ledger_apply(ledger_init(cc), AddAncilla("A"))
    assert led.n_qubits == 3 and led.k == 1 and led.holders == ("A", "B", "A")


def test_dephase_send_on_cc_copy_keeps_state(cc):
    led = ledger_init(cc)
    led = replay(led, [AddAncilla("A"), cnot_step("A", 0, 2)])
    after = ledger_apply(led, DephaseAndSend("A", 2, COMP, "B"))
    np.testing.assert_allclose(after.joint, led.joint, atol=1e-15)
    assert after.holders == ("A", "B", "B")


def test_dephase_send_on_singlet_copy_kills_coherence(singlet):
    led = replay(ledger_init(singlet), [AddAncilla("A"), cnot_step("A", 0, 2)])
    assert np.max(np.abs(led.joint - np.diag(np.diag(led.joint)))) > 0.4
    after = ledger_apply(led, DephaseAndSend("A", 2, COMP, "B"))
    assert np.max(np.abs(after.joint - np.diag(np.diag(after.joint)))) <= 1e-15


def test_locality_violations(cc):
    led = ledger_init(cc)
    with pytest.raises(LocalityError):
        ledger_apply(led, cnot_step("A", 0, 1))
    with pytest.raises(LocalityError):
        ledger_apply(led, DephaseAndSend("A", 1, COMP, "B"))
    with pytest.raises(DimensionError):
        ledger_apply(led, cnot_step("A", 0, 5))


def test_cc_measure_send_on_cc_pair(cc):
    led = ledger_init(cc)
    steps = builtin_script("cc_measure_send", led)
    assert [type(s).__name__ for s in steps] == [
        "AddAncilla", "LocalUnitary", "DephaseAndSend", "LocalUnitary", "DephaseAndSend", "LocalUnitary",
    ]
    final = replay(led, steps)
    assert final.holders == ("A", "B", "A")
    # Alice: original bit back where it was, meter reset; Bob: |0>
    np.testing.assert_allclose(reduce_qubits(final.joint, [0, 2], 3), np.kron(np.eye(2) / 2, proj([1, 0])), atol=1e-12)
    np.testing.assert_allclose(reduce_qubits(final.joint, [1], 3), proj([1, 0]), atol=1e-12)
    np.testing.assert_allclose(reduce_qubits(final.joint, [0], 3), partial_trace(cc, "A"), atol=1e-9)
    r = ledger_finalize(final)
    assert r.w_local == pytest.approx(1.0, abs=1e-9)
    assert r.k == 1


def test_cc_measure_send_on_singlet(singlet):
    led = ledger_init(singlet)
    final = replay(led, builtin_script("cc-measure-send", led))
    assert ledger_finalize(final).w_local == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(reduce_qubits(final.joint, [0], 3), partial_trace(singlet, "A"), atol=1e-9)


def test_empty_protocol_on_pure_product():
    r = ledger_finalize(ledger_init(BipartiteState(proj(ket(0, 0)), 2, 2)))
    assert r.w_local == pytest.approx(2.0, abs=1e-12)


def test_schmidt_dephase_on_singlet(singlet):
    led = ledger_init(singlet)
    basis = schmidt_decompose(states.max_entangled(2)).basis_a
    r = ledger_finalize(replay(led, builtin_script("schmidt_dephase", led, basis)))
    assert r.w_local == pytest.approx(1.0, abs=1e-9)
    assert r.n_a_final == 0


def test_schmidt_dephase_multi_qubit_alice():
    psi = states.random_pure(4, 2, seed=3)
    s = psi.density()
    led = ledger_init(s)
    basis = schmidt_decompose(psi).basis_a
    r = ledger_finalize(replay(led, builtin_script("schmidt_dephase", led, basis)))
    expected = 3 - von_neumann_entropy(partial_trace(s, "A"))
    assert r.w_local == pytest.approx(expected, abs=1e-9)


def test_maxcorr_dephase_on_diagonal_sigma():
    s = states.max_correlated(np.diag([0.3, 0.7]))
    led = ledger_init(s)
    final = replay(led, builtin_script("maxcorr_dephase", led))
    np.testing.assert_allclose(final.joint, s.rho, atol=1e-15)


def test_unknown_builtin(cc):
    with pytest.raises(ValueError):
        builtin_script("teleport", ledger_init(cc))


@pytest.mark.parametrize(
    "s",
    [states.cc_pair(), states.max_entangled(2).density(), states.phi_mixture(0.8),
     states.random_mixed(2, 2, seed=5), states.random_mixed(2, 2, rank=1, seed=6)],
)
@pytest.mark.parametrize("name", ["cc_measure_send", "schmidt_dephase", "maxcorr_dephase"])
def test_scripted_protocols_respect_bound(s, name):
    led = ledger_init(s)
    _, v = np.linalg.eigh(partial_trace(s, "A"))
    steps = builtin_script(name, led, LocalBasis(v))
    counts = []
    for st in steps:
        led = ledger_apply(led, st)
        counts.append(led.n_qubits - led.k)
    assert set(counts) <= {2}
    r = ledger_finalize(led)
    sa = von_neumann_entropy(partial_trace(s, "A"))
    sb = von_neumann_entropy(partial_trace(s, "B"))
    assert r.w_local <= 2 - max(sa, sb) + 1e-9
    per_party = r.n_a_final - r.s_a_final + r.n_b_final - r.s_b_final - r.k
    assert per_party == pytest.approx(r.w_local, abs=1e-9)


def test_step_records_round_trip():
    u = states.random_unitary(2, np.random.default_rng(0))
    steps = [
        AddAncilla("B"),
        cnot_step("A", 0, 2),
        LocalUnitary("A", (0,), u),
        DephaseAndSend("A", 2, BasisAngles(2, (0.3, 1.2)), "B"),
    ]
    back = [step_from_record(step_to_record(s)) for s in steps]
    assert back[0] == steps[0]
    assert back[1].name == "cnot" and back[1].qubits == (0, 2)
    np.testing.assert_allclose(back[2].unitary, u)
    assert back[3] == steps[3]


@pytest.mark.parametrize(
    "rec",
    [
        {"op": "teleport", "party": "A"},
        {"op": "add-ancilla", "party": "C"},
        {"op": "local-unitary", "party": "A", "qubits": [0], "unitary": None},
        {"op": "dephase-send", "party": "A", "qubits": [0, 1]},
    ],
)
def test_bad_step_records(rec):
    with pytest.raises(ValueError):
        step_from_record(rec)
