"""Dense statevector backend tests."""

import math

import numpy as np
import pytest

from shadowenc.statevector import (
    Gate,
    Statevector,
    ancilla_z_expectation,
    apply_circuit,
    apply_gate,
    basis_state,
    fidelity_exact,
    from_coeffs,
    gate_matrix,
    inner_product,
    random_state,
    zero_state,
)

SQ2 = 1.0 / math.sqrt(2.0)


def random_gate(rng, n):
    kinds = ["RX", "RY", "RZ", "H", "S", "X", "Z"] + (["CNOT"] if n >= 2 else [])
    kind = rng.choice(kinds)
    if kind == "CNOT":
        c, t = rng.choice(n, size=2, replace=False)
        return Gate("CNOT", (int(c), int(t)))
    q = int(rng.integers(n))
    angle = float(rng.uniform(0, 2 * np.pi)) if kind in ("RX", "RY", "RZ") else None
    return Gate(kind, (q,), angle)


class TestApplyGate:
    def test_h_on_zero(self):
        out = apply_gate(zero_state(1), Gate("H", (0,)))
        np.testing.assert_allclose(out.amps, [SQ2, SQ2], atol=1e-15)

    def test_rz_on_zero_is_diagonal_phase(self):
        theta = 0.37
        out = apply_gate(zero_state(1), Gate("RZ", (0,), theta))
        np.testing.assert_allclose(out.amps[0], np.exp(-0.5j * theta), atol=1e-15)
        assert out.amps[1] == 0

    def test_cnot_on_10(self):
        # |10> -> |11> with control qubit 0 (MSB)
        out = apply_gate(basis_state(2, 0b10), Gate("CNOT", (0, 1)))
        np.testing.assert_allclose(out.amps, basis_state(2, 0b11).amps)

    def test_cnot_leaves_control_zero_alone(self):
        out = apply_gate(basis_state(2, 0b01), Gate("CNOT", (0, 1)))
        np.testing.assert_allclose(out.amps, basis_state(2, 0b01).amps)

    def test_cnot_reversed_targets(self):
        out = apply_gate(basis_state(2, 0b01), Gate("CNOT", (1, 0)))
        np.testing.assert_allclose(out.amps, basis_state(2, 0b11).amps)

    def test_single_qubit_gate_site(self):
        # X on qubit 2 of |000> gives |001>
        out = apply_gate(zero_state(3), Gate("X", (2,)))
        np.testing.assert_allclose(out.amps, basis_state(3, 0b001).amps)

    def test_matches_kron_expansion(self):
        rng = np.random.default_rng(11)
        state = random_state(3, rng)
        theta = 1.234
        got = apply_gate(state, Gate("RY", (1,), theta))
        full = np.kron(np.kron(np.eye(2), gate_matrix(Gate("RY", (0,), theta))), np.eye(2))
        np.testing.assert_allclose(got.amps, full @ state.amps, atol=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            apply_gate(zero_state(2), Gate("H", (2,)))

    def test_duplicate_cnot_targets(self):
        with pytest.raises(ValueError):
            Gate("CNOT", (1, 1))


class TestInnerProduct:
    def test_self_overlap_is_one(self):
        psi = random_state(3, np.random.default_rng(0))
        assert abs(inner_product(psi, psi) - 1.0) < 1e-12

    def test_orthogonal_basis_states(self):
        assert inner_product(basis_state(1, 0), basis_state(1, 1)) == 0

    def test_against_elementwise_sum(self):
        rng = np.random.default_rng(42)
        a, b = random_state(3, rng), random_state(3, rng)
        expected = sum(a.amps[k].conjugate() * b.amps[k] for k in range(8))
        assert abs(inner_product(a, b) - expected) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(zero_state(2), zero_state(3))


class TestFidelity:
    def test_identical(self):
        psi = random_state(4, np.random.default_rng(1))
        assert abs(fidelity_exact(psi, psi) - 1.0) < 1e-12

    def test_orthogonal(self):
        assert fidelity_exact(basis_state(1, 0), basis_state(1, 1)) == 0.0

    def test_global_phase_invariance(self):
        psi = random_state(3, np.random.default_rng(2))
        rotated = Statevector(3, np.exp(0.7j) * psi.amps)
        assert abs(fidelity_exact(psi, rotated) - 1.0) < 1e-12


class TestAncillaZ:
    def test_definite_zero(self):
        psi = random_state(2, np.random.default_rng(3))
        amps = np.zeros(8, dtype=complex)
        amps[:4] = psi.amps  # ancilla (qubit 0) in |0>
        assert abs(ancilla_z_expectation(Statevector(3, amps), 0) - 1.0) < 1e-12

    def test_balanced_superposition(self):
        state = apply_gate(zero_state(3), Gate("H", (0,)))
        assert abs(ancilla_z_expectation(state, 0)) < 1e-12

    def test_probabilities_sum_to_one(self):
        psi = random_state(4, np.random.default_rng(4))
        z = ancilla_z_expectation(psi, 2)
        assert -1.0 <= z <= 1.0

    def test_phase_invariance(self):
        psi = random_state(3, np.random.default_rng(5))
        rotated = Statevector(3, np.exp(1.3j) * psi.amps)
        assert abs(ancilla_z_expectation(psi, 1) - ancilla_z_expectation(rotated, 1)) < 1e-12


class TestCircuitProperties:
    def test_norm_preserved_over_random_sequences(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for _ in range(200):
            n = int(rng.integers(1, 7))
            depth = int(rng.integers(1, 51))
            state = random_state(n, rng)
            for _ in range(depth):
                state = apply_gate(state, random_gate(rng, n))
            worst = max(worst, abs(state.norm() - 1.0))
        assert worst < 1e-9

    def test_gate_then_inverse_restores_state(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            state = random_state(n, rng)
            g = random_gate(rng, n)
            back = apply_circuit(apply_gate(state, g), g.inverse())
            np.testing.assert_allclose(back.amps, state.amps, atol=1e-10)


def test_from_coeffs_validates_norm():
    with pytest.raises(ValueError):
        from_coeffs([1.0, 1.0])
    sv = from_coeffs([1.0, 1.0], normalize=True)
    assert abs(sv.norm() - 1.0) < 1e-12
