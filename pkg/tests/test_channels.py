import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ket, proj
from workdeficit import states
from workdeficit.channels import (
    BasisAngles,
    add_ancilla,
    apply_local_unitary,
    apply_on_qubits,
    cnot,
    dephase_local,
    dephase_qubit,
    generator_unitary,
    qubit_basis,
)
from workdeficit.errors import DimensionError
from workdeficit.qstate import (
    BipartiteState,
    LocalBasis,
    partial_trace,
    reduce_qubits,
    von_neumann_entropy,
)

COMP = LocalBasis.computational(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_dephase_leaves_cc_state_alone(cc):
    out = dephase_local(cc, "A", COMP)
    np.testing.assert_allclose(out.rho, cc.rho, atol=1e-15)


def test_dephase_destroys_singlet_coherence(singlet):
    out = dephase_local(singlet, "A", COMP)
    expected = 0.5 * (proj(ket(0, 0)) + proj(ket(1, 1)))
    np.testing.assert_allclose(out.rho, expected, atol=1e-15)


def test_dephase_in_eigenbasis_of_product():
    rng = np.random.default_rng(0)
    ra, rb = states.random_density(2, None, rng), states.random_density(2, None, rng)
    s = BipartiteState(np.kron(ra, rb), 2, 2)
    out = dephase_local(s, "A", LocalBasis(np.linalg.eigh(ra)[1]))
    np.testing.assert_allclose(out.rho, s.rho, atol=1e-12)


def test_dephase_dimension_mismatch(cc):
    with pytest.raises(DimensionError):
        dephase_local(cc, "A", LocalBasis.computational(3))


def test_local_unitary_examples():
    s = BipartiteState(proj(ket(0, 0)), 2, 2)
    assert np.array_equal(apply_local_unitary(s, "A", np.eye(2)).rho, s.rho)
    np.testing.assert_allclose(apply_local_unitary(s, "A", SX).rho, proj(ket(1, 0)))
    with pytest.raises(ValueError):
        apply_local_unitary(s, "B", np.diag([1, 2]))


def test_local_unitary_preserves_spectrum():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = BipartiteState(states.random_density(6, None, rng), 2, 3)
        u = states.random_unitary(3, rng)
        out = apply_local_unitary(s, "B", u)
        np.testing.assert_allclose(np.linalg.eigvalsh(out.rho), np.linalg.eigvalsh(s.rho), atol=1e-9)
        assert von_neumann_entropy(out.rho) == pytest.approx(von_neumann_entropy(s.rho), abs=1e-9)


def test_add_ancilla_to_cc_alice(cc):
    out = add_ancilla(cc, "A", 2)
    assert (out.dim_a, out.dim_b) == (4, 2)
    assert von_neumann_entropy(out.rho) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(partial_trace(out, "A"), np.kron(partial_trace(cc, "A"), proj([1, 0])), atol=1e-15)


@pytest.mark.parametrize("party", ["A", "B"])
def test_add_ancilla_is_removable(party):
    s = states.random_mixed(2, 3, seed=9)
    out = add_ancilla(s, party, 3)
    assert von_neumann_entropy(out.rho) == pytest.approx(von_neumann_entropy(s.rho), abs=1e-10)
    if party == "A":
        t = out.rho.reshape(2, 3, 3, 2, 3, 3)
        back = np.einsum("akbckd->abcd", t).reshape(6, 6)
    else:
        t = out.rho.reshape(2, 3, 3, 2, 3, 3)
        back = np.einsum("abkcdk->abcd", t).reshape(6, 6)
    assert np.max(np.abs(back - s.rho)) <= 1e-12


def test_cnot_basics():
    c = cnot(0, 1, 2)
    np.testing.assert_array_equal(c @ ket(1, 0), ket(1, 1))
    np.testing.assert_array_equal(c @ c, np.eye(4))
    c3 = cnot(2, 0, 3)
    np.testing.assert_array_equal(c3 @ ket(0, 1, 1), ket(1, 1, 1))
    with pytest.raises(ValueError):
        cnot(1, 1, 2)
    with pytest.raises(ValueError):
        cnot(0, 2, 2)


def test_cnot_copies_alice_bit_onto_bob(cc):
    out = cnot(0, 1, 2) @ cc.rho @ cnot(0, 1, 2)
    np.testing.assert_allclose(reduce_qubits(out, [1], 2), proj([1, 0]), atol=1e-15)


def test_apply_on_qubits_matches_kron():
    rng = np.random.default_rng(4)
    rho = states.random_density(8, None, rng)
    u = states.random_unitary(4, rng)
    full = np.kron(np.eye(2), u)
    np.testing.assert_allclose(apply_on_qubits(rho, u, [1, 2], 3), full @ rho @ full.conj().T, atol=1e-12)
    # reversed qubit order swaps the roles of the operator's factors
    swap = cnot(0, 1, 2) @ cnot(1, 0, 2) @ cnot(0, 1, 2)
    full = np.kron(np.eye(2), swap @ u @ swap)
    np.testing.assert_allclose(apply_on_qubits(rho, u, [2, 1], 3), full @ rho @ full.conj().T, atol=1e-12)


def test_dephase_qubit_agrees_with_dephase_local():
    s = states.random_mixed(2, 2, seed=8)
    b = BasisAngles(2, (0.7, 1.9)).to_basis()
    np.testing.assert_allclose(dephase_qubit(s.rho, 0, b, 2), dephase_local(s, "A", b).rho, atol=1e-12)
    np.testing.assert_allclose(dephase_qubit(s.rho, 1, b, 2), dephase_local(s, "B", b).rho, atol=1e-12)


def test_qubit_basis_columns():
    u = qubit_basis(0.8, 2.1)
    assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-12
    np.testing.assert_allclose(u[:, 0], [np.cos(0.4), np.exp(2.1j) * np.sin(0.4)])


def test_generator_unitary_is_unitary():
    rng = np.random.default_rng(5)
    for d in (3, 4):
        u = generator_unitary(rng.normal(size=d * d), d)
        assert np.max(np.abs(u.conj().T @ u - np.eye(d))) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_angles_round_trip_up_to_phases(d):
    rng = np.random.default_rng(d)
    for _ in range(10):
        u = states.random_unitary(d, rng)
        v = BasisAngles.from_unitary(u).unitary()
        overlap = np.abs(u.conj().T @ v)
        np.testing.assert_allclose(overlap, np.eye(d), atol=1e-9)


def test_canonical_angles_in_range():
    for theta, phi in [(4.0, -1.0), (-0.3, 7.5), (np.pi, 0.0), (2 * np.pi + 0.1, 0.2)]:
        a = BasisAngles(2, (theta, phi))
        c = a.canonical()
        assert 0 <= c.theta <= np.pi and 0 <= c.phi < 2 * np.pi
        np.testing.assert_allclose(np.abs(a.unitary().conj().T @ c.unitary()), np.eye(2), atol=1e-12)


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def _random_pair(seed):
    rng = np.random.default_rng(seed)
    da, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    s = BipartiteState(states.random_density(da * db, int(rng.integers(1, da * db + 1)), rng), da, db)
    return s, LocalBasis(states.random_unitary(da, rng))


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_dephasing_properties(seed):
    s, basis = _random_pair(seed)
    once = dephase_local(s, "A", basis)
    twice = dephase_local(once, "A", basis)
    assert von_neumann_entropy(once.rho) >= von_neumann_entropy(s.rho) - 1e-9
    assert np.max(np.abs(twice.rho - once.rho)) <= 1e-10
    assert abs(np.trace(once.rho) - 1) <= 1e-10
    assert once.is_valid()
    w = np.kron(basis.u, np.eye(s.dim_b))
    before = np.diag(w.conj().T @ s.rho @ w)
    after = np.diag(w.conj().T @ once.rho @ w)
    assert np.max(np.abs(before - after)) <= 1e-10
    assert np.max(np.abs(partial_trace(once, "B") - partial_trace(s, "B"))) <= 1e-10
