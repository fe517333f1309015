"""Classical-shadow snapshot collection and fidelity/gradient estimation.

One snapshot is a (random Clifford, measured bitstring) pair taken from the
model state.  With the inverted channel (2^n + 1) rho - I, each snapshot
contributes (2^n + 1) |<b|U|Data>|^2 - 1 to the fidelity estimate, and the
estimate is the empirical mean over snapshots.  Single-snapshot values lie
far outside [0, 1]; only the mean is meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _fast
from .amplitudes import basis_overlap_row, overlap_with_target
from .ansatz import AnsatzSpec, build_state_from_ops, compile_ops
from .clifford import CliffordTableau, draw_clifford_randoms, enumerate_cliffords
from .statevector import Statevector, fidelity_exact


@dataclass
class Snapshot:
    """One classical-shadow sample of the model state."""

    clifford: CliffordTableau
    outcome: int  # measured bitstring as a basis index (qubit 0 = MSB)


@dataclass
class ShadowBudget:
    epsilon: float
    n_observables: int = 1
    max_shadow_norm_sq: float = 1.0  # Tr(rho^2) = 1 for pure-state fidelity
    constant: float = 1.0  # planning knob; the bound hides constants

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.n_observables < 1:
            raise ValueError("need at least one observable")


@dataclass
class FidelityEstimate:
    value: float
    n_shot: int


def shadow_budget(budget: ShadowBudget) -> int:
    """Snapshot count ceil(C * ln(max(L, 2)) * norm^2 / eps^2)."""
    l_eff = max(budget.n_observables, 2)
    raw = budget.constant * math.log(l_eff) * budget.max_shadow_norm_sq
    return int(math.ceil(raw / budget.epsilon**2))


def _validated_target(coeffs, n: int) -> np.ndarray:
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if coeffs.shape != (1 << n,):
        raise ValueError("target coefficient vector has wrong length")
    nrm = np.linalg.norm(coeffs)
    if abs(nrm - 1.0) > 1e-6:
        raise ValueError(f"target coefficients not unit norm (|c| = {nrm})")
    return coeffs


def collect_snapshots(
    spec: AnsatzSpec,
    params: np.ndarray,
    n_shot: int,
    rng: np.random.Generator,
    force_clifford: CliffordTableau | None = None,
) -> list[Snapshot]:
    """Measure the model state through fresh random Cliffords.

    ``force_clifford`` pins every shot to one unitary (test hook)."""
    if n_shot < 1:
        raise ValueError("n_shot must be >= 1")
    n = spec.n_qubits
    ops_a, pmap = compile_ops(spec)
    state = build_state_from_ops(ops_a, pmap, n, np.asarray(params, dtype=float))
    if force_clifford is None:
        kd, bd, sd = draw_clifford_randoms(n, rng, n_shot)
    unifs = rng.random(n_shot)
    angles = np.zeros(1)
    out = []
    for i in range(n_shot):
        if force_clifford is None:
            rows = np.empty(2 * n, dtype=np.int64)
            _fast.symplectic_rows(n, kd[i], bd[i], rows)
            tx = np.empty(2 * n, dtype=np.int64)
            tz = np.empty(2 * n, dtype=np.int64)
            tp = np.empty(2 * n, dtype=np.int64)
            _fast.symplectic_to_tableau(n, rows, sd[i], tx, tz, tp)
            tab = CliffordTableau(n, tx, tz, tp)
        else:
            tab = force_clifford
        ops, m = tab.ops()
        work = state.copy()
        _fast.apply_ops(work, n, ops, angles, m)
        probs = np.abs(work) ** 2
        b = int(_fast.sample_index(probs, unifs[i]))
        out.append(Snapshot(tab, b))
    return out


def estimate_fidelity(snapshots, target_coeffs, floor: float = 0.0) -> FidelityEstimate:
    """Empirical-mean shadow estimate of |<Data|model>|^2 from snapshots."""
    if not snapshots:
        raise ValueError("no snapshots")
    n = snapshots[0].clifford.n_qubits
    coeffs = _validated_target(target_coeffs, n)
    scale = (1 << n) + 1
    total = 0.0
    for snap in snapshots:
        ov = overlap_with_target(snap.clifford, snap.outcome, coeffs, floor)
        total += scale * abs(ov) ** 2 - 1.0
    return FidelityEstimate(total / len(snapshots), len(snapshots))


def sample_fidelity_estimate(
    state: Statevector | np.ndarray,
    target_coeffs,
    n_shot: int,
    rng: np.random.Generator,
    floor: float = 0.0,
) -> FidelityEstimate:
    """Fused collect-and-estimate over fresh snapshots of a prepared state."""
    if n_shot < 1:
        raise ValueError("n_shot must be >= 1")
    amps = state.amps if isinstance(state, Statevector) else np.asarray(state)
    amps = np.ascontiguousarray(amps, dtype=np.complex128)
    n = int(np.log2(len(amps)))
    coeffs = _validated_target(target_coeffs, n)
    kd, bd, sd = draw_clifford_randoms(n, rng, n_shot)
    unifs = rng.random(n_shot)
    value = _fast.estimate_batch(amps, coeffs, n, kd, bd, sd, unifs, floor)
    return FidelityEstimate(float(value), n_shot)


def estimate_gradient(
    spec: AnsatzSpec,
    params: np.ndarray,
    target_coeffs,
    n_shot_per_shift: int,
    rng: np.random.Generator,
    scale: float = 0.5,
    floor: float = 0.0,
) -> np.ndarray:
    """Parameter-shift gradient of the fidelity from fresh shadow estimates.

    Component r is scale * (f(theta_r + pi/2) - f(theta_r - pi/2)); the exact
    derivative corresponds to scale = 1/2 for exp(-i theta sigma / 2) gates.
    """
    if n_shot_per_shift < 1:
        raise ValueError("n_shot_per_shift must be >= 1")
    params = np.asarray(params, dtype=float)
    n = spec.n_qubits
    coeffs = _validated_target(target_coeffs, n)
    ops, pmap = compile_ops(spec)
    grad = np.empty(spec.n_params)
    for r in range(spec.n_params):
        shifted_values = []
        for sign in (1.0, -1.0):
            shifted = params.copy()
            shifted[r] += sign * np.pi / 2.0
            amps = build_state_from_ops(ops, pmap, n, shifted)
            est = sample_fidelity_estimate(amps, coeffs, n_shot_per_shift, rng, floor)
            shifted_values.append(est.value)
        grad[r] = scale * (shifted_values[0] - shifted_values[1])
    return grad


def exact_gradient(
    spec: AnsatzSpec, params: np.ndarray, target_coeffs, scale: float = 0.5
) -> np.ndarray:
    """Parameter-shift gradient with the exact fidelity oracle."""
    params = np.asarray(params, dtype=float)
    n = spec.n_qubits
    coeffs = _validated_target(target_coeffs, n)
    ops, pmap = compile_ops(spec)
    grad = np.empty(spec.n_params)
    for r in range(spec.n_params):
        vals = []
        for sign in (1.0, -1.0):
            shifted = params.copy()
            shifted[r] += sign * np.pi / 2.0
            amps = build_state_from_ops(ops, pmap, n, shifted)
            vals.append(abs(np.vdot(coeffs, amps)) ** 2)
        grad[r] = scale * (vals[0] - vals[1])
    return grad


def exact_fidelity_of_params(spec: AnsatzSpec, params, target_coeffs) -> float:
    ops, pmap = compile_ops(spec)
    amps = build_state_from_ops(ops, pmap, spec.n_qubits, np.asarray(params, float))
    return float(abs(np.vdot(np.asarray(target_coeffs, np.complex128), amps)) ** 2)


# ---------------------------------------------------------------------------
# exhaustive channel check (n <= 2)
# ---------------------------------------------------------------------------


def build_channel_tables(n: int):
    """Per group element: (dense unitary, stabilizer amplitude table).

    The dense matrix supplies outcome probabilities; the amplitude table is
    evaluated through the stabilizer engine so the two routes stay
    independent."""
    tables = []
    for tab in enumerate_cliffords(n):
        dense = tab.to_unitary()
        amp_rows = np.vstack([basis_overlap_row(tab, b) for b in range(1 << n)])
        tables.append((dense, amp_rows))
    return tables


def exact_estimator_expectation(model_coeffs, target_coeffs, tables) -> float:
    """E[f_hat] over the full Clifford group x outcomes: should equal the
    exact fidelity (this is the inverted-channel identity, executably)."""
    model = np.asarray(model_coeffs, dtype=np.complex128)
    target = np.asarray(target_coeffs, dtype=np.complex128)
    dim = len(model)
    scale = dim + 1
    total = 0.0
    for dense, amp_rows in tables:
        probs = np.abs(dense @ model) ** 2
        overlaps = amp_rows @ target
        estimates = scale * np.abs(overlaps) ** 2 - 1.0
        total += float(probs @ estimates)
    return total / len(tables)


# ---------------------------------------------------------------------------
# snapshot dump (portable text form)
# ---------------------------------------------------------------------------


def format_snapshot(snap: Snapshot) -> str:
    n = snap.clifford.n_qubits
    toks = []
    for g in snap.clifford.circuit():
        if g.kind == "CNOT":
            toks.append(f"CX:{g.targets[0]},{g.targets[1]}")
        else:
            toks.append(f"{g.kind}:{g.targets[0]}")
    bits = format(snap.outcome, f"0{n}b")
    return " ".join(toks) + "\t" + bits


def dump_snapshots(snapshots, path):
    with open(path, "w", encoding="utf-8") as fh:
        for snap in snapshots:
            fh.write(format_snapshot(snap) + "\n")
