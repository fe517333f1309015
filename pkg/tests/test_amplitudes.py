"""Stabilizer amplitude engine vs the dense simulator."""

import numpy as np
import pytest

from shadowenc import _fast
from shadowenc.amplitudes import amplitude, basis_overlap_row, overlap_with_target
from shadowenc.clifford import (
    identity_tableau,
    sample_random_clifford,
    tableau_of_circuit,
)
from shadowenc.statevector import (
    Gate,
    apply_circuit,
    basis_state,
    random_state,
    zero_state,
)

CLIFFORD_KINDS = ["H", "S", "X", "Z", "CNOT"]


def random_clifford_circuit(rng, n, depth):
    gates = []
    kinds = CLIFFORD_KINDS if n >= 2 else CLIFFORD_KINDS[:-1]
    for _ in range(depth):
        kind = rng.choice(kinds)
        if kind == "CNOT":
            c, t = rng.choice(n, 2, replace=False)
            gates.append(Gate("CNOT", (int(c), int(t))))
        else:
            gates.append(Gate(kind, (int(rng.integers(n)),)))
    return gates


def circuit_to_ops(gates):
    code = {"H": _fast.OP_H, "S": _fast.OP_S, "X": _fast.OP_X, "Z": _fast.OP_Z,
            "CNOT": _fast.OP_CNOT}
    ops = np.zeros((len(gates), 3), dtype=np.int64)
    for i, g in enumerate(gates):
        ops[i, 0] = code[g.kind]
        ops[i, 1] = g.targets[0]
        ops[i, 2] = g.targets[1] if g.kind == "CNOT" else 0
    return ops


def affine_full_state(n, ops, m, start, invert=0):
    cols = np.zeros(n + 2, dtype=np.int64)
    L = np.zeros(n + 2, dtype=np.int64)
    Q = np.zeros(n + 2, dtype=np.int64)
    meta = np.zeros(3, dtype=np.int64)
    _fast.aff_init(cols, L, Q, meta, start)
    _fast.aff_apply_ops(cols, L, Q, meta, n, ops, m, invert)
    return np.array(
        [_fast.aff_amplitude(cols, L, Q, meta, n, y) for y in range(1 << n)]
    )


class TestAffinePropagation:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_dense_gate_by_gate(self, n):
        rng = np.random.default_rng(n * 101)
        for trial in range(20):
            depth = int(rng.integers(1, 40))
            gates = random_clifford_circuit(rng, n, depth)
            start = int(rng.integers(1 << n))
            ops = circuit_to_ops(gates)
            dense = basis_state(n, start)
            for cut in range(1, depth + 1):
                dense = apply_circuit(basis_state(n, start), gates[:cut])
                got = affine_full_state(n, ops, cut, start)
                np.testing.assert_allclose(got, dense.amps, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_inverse_propagation(self, n):
        rng = np.random.default_rng(n * 7 + 5)
        for _ in range(10):
            gates = random_clifford_circuit(rng, n, 30)
            ops = circuit_to_ops(gates)
            b = int(rng.integers(1 << n))
            got = affine_full_state(n, ops, len(gates), b, invert=1)
            inv_gates = []
            for g in reversed(gates):
                inv_gates.extend(g.inverse())
            dense = apply_circuit(basis_state(n, b), inv_gates)
            np.testing.assert_allclose(got, dense.amps, atol=1e-12)


class TestAmplitude:
    def test_identity_is_delta(self):
        t = identity_tableau(3)
        for b in range(8):
            for k in range(8):
                want = 1.0 if b == k else 0.0
                assert abs(amplitude(t, b, k) - want) < 1e-14

    def test_hadamard_column(self):
        t = tableau_of_circuit(1, [Gate("H", (0,))])
        s = 1 / np.sqrt(2)
        assert abs(amplitude(t, 0, 0) - s) < 1e-14
        assert abs(amplitude(t, 1, 0) - s) < 1e-14
        assert abs(amplitude(t, 1, 1) + s) < 1e-14

    def test_accepts_bit_sequences(self):
        t = tableau_of_circuit(2, [Gate("X", (1,))])
        assert abs(amplitude(t, [0, 1], (0, 0)) - 1.0) < 1e-14
        assert abs(amplitude(t, "01", "00") - 1.0) < 1e-14
        with pytest.raises(ValueError):
            amplitude(t, [0, 1, 0], 0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_matches_dense_simulation(self, n):
        rng = np.random.default_rng(n * 13)
        for _ in range(8):
            t = sample_random_clifford(n, rng)
            u = t.to_unitary()
            for _ in range(10):
                b = int(rng.integers(1 << n))
                k = int(rng.integers(1 << n))
                assert abs(amplitude(t, b, k) - u[b, k]) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_phase_coherence_per_column(self, n):
        # {<b|U|k>}_b equals the dense column up to ONE common phase
        rng = np.random.default_rng(n * 19 + 2)
        for _ in range(5):
            t = sample_random_clifford(n, rng)
            u = t.to_unitary()
            k = int(rng.integers(1 << n))
            col = np.array([amplitude(t, b, k) for b in range(1 << n)])
            dense = u[:, k]
            nz = np.argmax(np.abs(dense))
            phase = col[nz] / dense[nz]
            assert abs(abs(phase) - 1.0) < 1e-10
            np.testing.assert_allclose(col, phase * dense, atol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_amplitude_unitarity(self, n):
        rng = np.random.default_rng(n * 23)
        t = sample_random_clifford(n, rng)
        for k in range(min(1 << n, 8)):
            total = sum(abs(amplitude(t, b, k)) ** 2 for b in range(1 << n))
            assert abs(total - 1.0) < 1e-10

    def test_basis_overlap_row_matches_amplitudes(self):
        rng = np.random.default_rng(77)
        t = sample_random_clifford(4, rng)
        b = 9
        row = basis_overlap_row(t, b)
        for k in range(16):
            assert abs(row[k] - amplitude(t, b, k)) < 1e-12


class TestOverlap:
    def test_one_hot_reduces_to_amplitude(self):
        rng = np.random.default_rng(5)
        t = sample_random_clifford(3, rng)
        for k in (0, 3, 7):
            coeffs = np.zeros(8, dtype=complex)
            coeffs[k] = 1.0
            assert abs(overlap_with_target(t, 2, coeffs) - amplitude(t, 2, k)) < 1e-12

    def test_identity_returns_coefficient(self):
        rng = np.random.default_rng(6)
        coeffs = random_state(3, rng).amps
        t = identity_tableau(3)
        for b in range(8):
            assert abs(overlap_with_target(t, b, coeffs) - coeffs[b]) < 1e-12

    def test_matches_dense_inner_product(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            t = sample_random_clifford(3, rng)
            coeffs = random_state(3, rng).amps
            b = int(rng.integers(8))
            dense = t.to_unitary()
            want = dense[b, :] @ coeffs
            assert abs(overlap_with_target(t, b, coeffs) - want) < 1e-10

    def test_norm_validation(self):
        t = identity_tableau(2)
        with pytest.raises(ValueError):
            overlap_with_target(t, 0, np.array([1.0, 1.0, 0, 0]))

    def test_floor_skips_small_terms(self):
        rng = np.random.default_rng(9)
        t = sample_random_clifford(3, rng)
        coeffs = np.zeros(8, dtype=complex)
        coeffs[1] = 1e-9
        coeffs[5] = np.sqrt(1 - 1e-18)
        full = overlap_with_target(t, 4, coeffs)
        floored = overlap_with_target(t, 4, coeffs, floor=1e-6)
        only_big = coeffs[5] * amplitude(t, 4, 5)
        assert abs(floored - only_big) < 1e-12
        assert abs(full - (only_big + coeffs[1] * amplitude(t, 4, 1))) < 1e-12
