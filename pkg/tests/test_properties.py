"""Property-based invariants (hypothesis)."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from shadowenc.chc import TrainingSet, build_compact_state, kernel_sum_reference, phi_for_imbalance
from shadowenc.shadows import ShadowBudget, shadow_budget
from shadowenc.statevector import (
    Gate,
    Statevector,
    apply_gate,
    fidelity_exact,
    inner_product,
)

finite_floats = st.floats(min_value=-50, max_value=50, allow_nan=False)


def unit_vectors(dim):
    return arrays(np.float64, (2, dim), elements=finite_floats).filter(
        lambda m: np.linalg.norm(m[0]) > 1e-3 and np.linalg.norm(m[1]) > 1e-3
    )


@st.composite
def random_states(draw, n_qubits=2):
    dim = 2**n_qubits
    re = draw(arrays(np.float64, dim, elements=finite_floats))
    im = draw(arrays(np.float64, dim, elements=finite_floats))
    vec = re + 1j * im
    nrm = np.linalg.norm(vec)
    if nrm < 1e-6:
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
        nrm = 1.0
    return Statevector(n_qubits, vec / nrm)


@given(random_states(), random_states())
@settings(max_examples=60, deadline=None)
def test_inner_product_conjugate_symmetry(a, b):
    assert inner_product(a, b) == complex(np.conj(inner_product(b, a)))


@given(random_states(), random_states())
@settings(max_examples=60, deadline=None)
def test_fidelity_symmetric_and_bounded(a, b):
    f = fidelity_exact(a, b)
    assert -1e-12 <= f <= 1.0 + 1e-12
    assert abs(f - fidelity_exact(b, a)) < 1e-12


@given(random_states(), st.floats(0, 2 * math.pi))
@settings(max_examples=60, deadline=None)
def test_fidelity_phase_invariance(a, alpha):
    rotated = Statevector(a.n_qubits, np.exp(1j * alpha) * a.amps)
    assert abs(fidelity_exact(a, rotated) - 1.0) < 1e-10


@given(random_states(), st.sampled_from(["H", "S", "X", "Z"]),
       st.integers(0, 1), st.floats(0, 4 * math.pi))
@settings(max_examples=60, deadline=None)
def test_gates_preserve_norm(state, kind, q, angle):
    out = apply_gate(state, Gate(kind, (q,)))
    out = apply_gate(out, Gate("RY", (1 - q,), angle))
    assert abs(out.norm() - 1.0) < 1e-10


@given(unit_vectors(5))
@settings(max_examples=80, deadline=None)
def test_compact_state_unit_norm(pair):
    out = build_compact_state(pair[0], pair[1])
    assert abs(np.linalg.norm(out) - 1.0) < 1e-12
    assert len(out) == 8  # padded to the next power of two


@given(unit_vectors(4), arrays(np.float64, 4, elements=finite_floats).filter(
    lambda v: np.linalg.norm(v) > 1e-3))
@settings(max_examples=60, deadline=None)
def test_kernel_antisymmetry_under_block_swap(pair, test_vec):
    tset = TrainingSet(pair[0], pair[1])
    swapped = TrainingSet(pair[1], pair[0])
    a = kernel_sum_reference(tset, test_vec, math.pi / 4)
    b = kernel_sum_reference(swapped, test_vec, math.pi / 4)
    assert abs(a + b) < 1e-12


@given(st.floats(1e-3, 0.5), st.floats(1e-3, 0.5), st.integers(1, 100))
@settings(max_examples=80, deadline=None)
def test_budget_monotone(eps_small, eps_big, n_obs):
    lo, hi = sorted((eps_small, eps_big))
    assert shadow_budget(ShadowBudget(lo, n_obs)) >= shadow_budget(ShadowBudget(hi, n_obs))


@given(st.integers(1, 10_000), st.integers(1, 10_000))
@settings(max_examples=80, deadline=None)
def test_phi_in_first_quadrant(m_plus, m_minus):
    phi = phi_for_imbalance(m_plus, m_minus)
    assert 0 < phi < math.pi / 2
    if m_plus == m_minus:
        assert abs(phi - math.pi / 4) < 1e-12
