"""Compact Hadamard classifier tests, including the quantum-classical
kernel identity."""

import numpy as np
import pytest

from shadowenc.chc import (
    ClassifierLayout,
    TrainingSet,
    build_compact_state,
    build_psi_init,
    classify_exact,
    classify_state,
    classify_trained,
    kernel_sum_reference,
    layout_for,
    phi_for_imbalance,
)
from shadowenc.statevector import Statevector, ancilla_z_expectation


def random_training_set(rng, n_pairs=None, n_features=None):
    n_pairs = n_pairs or int(rng.integers(1, 9))
    n_features = n_features or int(rng.integers(2, 9))
    plus = rng.normal(size=(n_pairs, n_features))
    minus = rng.normal(size=(n_pairs, n_features))
    w = rng.uniform(0.2, 1.0, size=n_pairs)
    return TrainingSet(plus, minus, weights=w / w.sum())


class TestCompactState:
    def test_one_hot_composition(self):
        s = 1 / np.sqrt(2)
        xp = np.array([1.0, 0, 0, 0]) * s
        xm = np.array([0, 1.0, 0, 0]) * s
        out = build_compact_state(xp, xm)
        np.testing.assert_allclose(out, [s, 1j * s, 0, 0], atol=1e-15)

    def test_always_unit_norm(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            dim = int(rng.integers(2, 9))
            out = build_compact_state(rng.normal(size=dim), rng.normal(size=dim))
            assert abs(np.linalg.norm(out) - 1.0) < 1e-12

    def test_zero_pads(self):
        out = build_compact_state([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
        assert len(out) == 4 and out[3] == 0

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            build_compact_state([0.0, 0.0], [1.0, 0.0])


class TestPhi:
    def test_balanced(self):
        assert phi_for_imbalance(4, 4) == pytest.approx(np.pi / 4)

    def test_tangent_value(self):
        assert phi_for_imbalance(1000, 1732) == pytest.approx(np.pi / 3, abs=1e-3)

    def test_degenerate_class(self):
        with pytest.raises(ValueError):
            phi_for_imbalance(0, 5)


class TestPsiInit:
    def test_iris_scale_layout(self):
        rng = np.random.default_rng(1)
        train = random_training_set(rng, n_pairs=4, n_features=4)
        layout = layout_for(train)
        assert (layout.n_feature_qubits, layout.n_index_qubits) == (2, 2)
        assert layout.total_qubits == 5
        psi = build_psi_init(train, rng.normal(size=4), layout)
        assert psi.amps.shape == (32,)
        assert abs(psi.norm() - 1.0) < 1e-12

    def test_block_structure(self):
        # pair j occupies contiguous feature amplitudes behind each ancilla half
        rng = np.random.default_rng(2)
        train = random_training_set(rng, n_pairs=2, n_features=2)
        layout = layout_for(train)
        test = rng.normal(size=2)
        psi = build_psi_init(train, test, layout)
        amps = psi.amps.reshape(2, 2, 2)
        t_unit = test / np.linalg.norm(test)
        for j in range(2):
            expect = np.sqrt(train.weights[j] / 2) * np.exp(-1j * layout.phi) * t_unit
            np.testing.assert_allclose(amps[1, j], expect, atol=1e-12)

    def test_single_pair_balanced_split(self):
        x = np.array([3.0, 4.0])
        train = TrainingSet(x, x, weights=np.array([1.0]))
        layout = layout_for(train, phi=0.0)
        psi = build_psi_init(train, x, layout)
        assert abs(psi.norm() - 1.0) < 1e-12
        assert abs(ancilla_z_expectation(psi, 0)) < 1e-12  # Pr(0) = Pr(1) = 1/2

    def test_norm_always_one(self):
        rng = np.random.default_rng(3)
        for mode in ("per-vector", "global"):
            for _ in range(10):
                train = random_training_set(rng)
                layout = layout_for(train)
                psi = build_psi_init(train, rng.normal(size=train.n_features),
                                     layout, norm_mode=mode)
                assert abs(psi.norm() - 1.0) < 1e-12

    def test_block_size_violation(self):
        rng = np.random.default_rng(4)
        train = random_training_set(rng, n_pairs=3, n_features=4)
        layout = ClassifierLayout(2, 1, np.pi / 4)
        with pytest.raises(ValueError):
            build_psi_init(train, rng.normal(size=4), layout)


class TestKernelIdentity:
    @pytest.mark.parametrize("mode", ["per-vector", "global"])
    def test_quantum_equals_classical_50_instances(self, mode):
        rng = np.random.default_rng(50)
        for _ in range(50):
            train = random_training_set(rng)
            phi = float(rng.uniform(0, np.pi / 2))
            layout = layout_for(train, phi=phi)
            test = rng.normal(size=train.n_features)
            psi = build_psi_init(train, test, layout, norm_mode=mode)
            got = classify_exact(psi, layout).sigma_z
            want = kernel_sum_reference(train, test, phi, norm_mode=mode)
            assert abs(got - want) < 1e-12

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(6)
        train = random_training_set(rng)
        layout = layout_for(train)
        test = rng.normal(size=train.n_features)
        psi = build_psi_init(train, test, layout)
        rotated = Statevector(psi.n_qubits, np.exp(0.7j) * psi.amps)
        a = classify_exact(psi, layout).sigma_z
        b = classify_exact(rotated, layout).sigma_z
        assert abs(a - b) < 1e-12

    def test_label_flip_on_negated_test(self):
        rng = np.random.default_rng(7)
        train = random_training_set(rng)
        layout = layout_for(train)
        test = rng.normal(size=train.n_features)
        a = classify_exact(build_psi_init(train, test, layout), layout).sigma_z
        b = classify_exact(build_psi_init(train, -test, layout), layout).sigma_z
        assert abs(a + b) < 1e-12

    def test_swapping_blocks_negates_kernel(self):
        rng = np.random.default_rng(8)
        train = random_training_set(rng, n_pairs=3)
        swapped = TrainingSet(train.minus_vectors, train.plus_vectors,
                              weights=train.weights)
        test = rng.normal(size=train.n_features)
        a = kernel_sum_reference(train, test, np.pi / 4)
        b = kernel_sum_reference(swapped, test, np.pi / 4)
        assert abs(a + b) < 1e-12

    def test_orthogonal_test_vector_is_tie(self):
        # training data lives in the first two coordinates, test in the others
        plus = np.array([[1.0, 0.0, 0, 0], [0.5, 0.5, 0, 0]])
        minus = np.array([[0.0, 1.0, 0, 0], [0.25, 0.75, 0, 0]])
        train = TrainingSet(plus, minus)
        layout = layout_for(train)
        res = classify_exact(build_psi_init(train, [0, 0, 1.0, 1.0], layout), layout)
        assert res.tie
        assert res.label == 1
        assert abs(res.sigma_z) < 1e-12

    def test_single_pair_constructive_case(self):
        plus = np.array([[1.0, 0.0]])
        minus = np.array([[0.0, 1.0]])
        train = TrainingSet(plus, minus, weights=np.array([1.0]))
        got = kernel_sum_reference(train, [1.0, 0.0], np.pi / 4)
        # cos(pi/4) * (1/sqrt(2)) = 1/2
        assert got == pytest.approx(0.5)
        layout = layout_for(train)
        res = classify_exact(build_psi_init(train, [1.0, 0.0], layout), layout)
        assert res.label == 1


class TestTrainedMode:
    def test_exactly_encoded_state_matches_exact(self):
        rng = np.random.default_rng(9)
        train = random_training_set(rng, n_pairs=2, n_features=4)
        layout = layout_for(train)
        test = rng.normal(size=4)
        psi = build_psi_init(train, test, layout)
        exact = classify_exact(psi, layout)
        trained_path = classify_state(psi, layout, mode="trained")
        assert trained_path.sigma_z == pytest.approx(exact.sigma_z, abs=1e-15)
        assert trained_path.label == exact.label

    def test_shot_sampling_confidence(self):
        rng = np.random.default_rng(10)
        train = random_training_set(rng, n_pairs=2, n_features=4)
        layout = layout_for(train)
        test = rng.normal(size=4)
        psi = build_psi_init(train, test, layout)
        exact = classify_exact(psi, layout).sigma_z
        shots = 10**6
        res = classify_state(psi, layout, mode="trained", shots=shots,
                             rng=np.random.default_rng(11))
        # binomial: sd of sigma_z ~ 1/sqrt(shots); 5e-3 is 5 sigma
        assert abs(res.sigma_z - exact) < 5e-3
        assert res.shots == shots

    def test_qubit_count_checked(self):
        from shadowenc.ansatz import random_init

        spec, params = random_init(3, 1, seed=0)
        layout = ClassifierLayout(2, 2, np.pi / 4)
        with pytest.raises(ValueError):
            classify_trained(spec, params, layout)

    def test_trained_circuit_end_to_end(self):
        from shadowenc.ansatz import random_init
        from shadowenc.training import TrainingConfig, train as train_circuit

        rng = np.random.default_rng(12)
        tset = random_training_set(rng, n_pairs=2, n_features=2)
        layout = layout_for(tset)
        test = rng.normal(size=2)
        psi = build_psi_init(tset, test, layout)
        spec, init = random_init(layout.total_qubits, 6, seed=3)
        cfg = TrainingConfig(iterations=150, mode="exact",
                             lr_schedule=((150, 0.05),), seed=3)
        params, trace = train_circuit(spec, init, psi.amps, cfg)
        assert trace.records[-1].exact_fidelity > 0.98
        got = classify_trained(spec, params, layout)
        want = classify_exact(psi, layout)
        assert got.label == want.label
