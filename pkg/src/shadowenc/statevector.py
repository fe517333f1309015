"""Dense complex statevector simulation.

This is the exact reference backend: gate application, inner products,
fidelity and ancilla expectation values. Everything else in the package is
checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import MAX_QUBITS

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ROTATION_KINDS + ("H", "S", "X", "Z", "CNOT")

_SQ2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, target qubit(s) and, for rotations, an angle.

    Rotations follow the convention exp(-i * angle * sigma / 2).
    """

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CNOT":
            if len(self.targets) != 2:
                raise ValueError("CNOT takes (control, target)")
            if self.targets[0] == self.targets[1]:
                raise ValueError("CNOT control and target must differ")
        elif len(self.targets) != 1:
            raise ValueError(f"{self.kind} takes exactly one target")
        if self.kind in ROTATION_KINDS and self.angle is None:
            raise ValueError(f"{self.kind} requires an angle")

    def inverse(self) -> list["Gate"]:
        if self.kind in ROTATION_KINDS:
            return [Gate(self.kind, self.targets, -self.angle)]
        if self.kind == "S":
            # S^dagger = Z S
            return [Gate("Z", self.targets), Gate("S", self.targets)]
        return [Gate(self.kind, self.targets, self.angle)]


@dataclass
class Statevector:
    """Dense n-qubit state. Qubit 0 is the most significant index bit."""

    n_qubits: int
    amps: np.ndarray = field(default=None)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        if self.amps is None:
            self.amps = np.zeros(2**self.n_qubits, dtype=np.complex128)
            self.amps[0] = 1.0
        else:
            self.amps = np.asarray(self.amps, dtype=np.complex128)
            if self.amps.shape != (2**self.n_qubits,):
                raise ValueError("amplitude array has wrong length")

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def zero_state(n_qubits: int) -> Statevector:
    return Statevector(n_qubits)


def basis_state(n_qubits: int, index: int) -> Statevector:
    if not 0 <= index < 2**n_qubits:
        raise ValueError("basis index out of range")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(n_qubits, amps)


def from_coeffs(coeffs, normalize: bool = False) -> Statevector:
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    n = int(np.log2(len(coeffs)))
    if 2**n != len(coeffs):
        raise ValueError("coefficient vector length must be a power of two")
    nrm = np.linalg.norm(coeffs)
    if nrm == 0:
        raise ValueError("zero coefficient vector")
    if normalize:
        coeffs = coeffs / nrm
    elif abs(nrm - 1.0) > 1e-6:
        raise ValueError(f"coefficients not unit norm (|c| = {nrm})")
    return Statevector(n, coeffs)


def random_state(n_qubits: int, rng: np.random.Generator) -> Statevector:
    raw = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return Statevector(n_qubits, raw / np.linalg.norm(raw))


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense matrix of a gate (2x2, or 4x4 for CNOT in (control, target) order)."""
    if gate.kind in ROTATION_KINDS:
        c = np.cos(gate.angle / 2.0)
        s = np.sin(gate.angle / 2.0)
        if gate.kind == "RX":
            return np.array([[c, -1j * s], [-1j * s, c]])
        if gate.kind == "RY":
            return np.array([[c, -s], [s, c]])
        return np.array([[np.exp(-0.5j * gate.angle), 0], [0, np.exp(0.5j * gate.angle)]])
    if gate.kind == "H":
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128)
    if gate.kind == "S":
        return np.array([[1, 0], [0, 1j]], dtype=np.complex128)
    if gate.kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=np.complex128)
    if gate.kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=np.complex128)
    # CNOT on (control, target)
    m = np.eye(4, dtype=np.complex128)
    m[2, 2] = m[3, 3] = 0
    m[2, 3] = m[3, 2] = 1
    return m


def _check_target(n_qubits: int, q: int):
    if not 0 <= q < n_qubits:
        raise ValueError(f"qubit index {q} out of range for {n_qubits} qubits")


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Apply a gate, returning a new Statevector."""
    n = state.n_qubits
    for q in gate.targets:
        _check_target(n, q)
    amps = state.amps
    if gate.kind == "CNOT":
        ctrl, targ = gate.targets
        idx = np.arange(2**n)
        cbit = (idx >> (n - 1 - ctrl)) & 1
        flipped = idx ^ (1 << (n - 1 - targ))
        out = amps.copy()
        sel = cbit == 1
        out[idx[sel]] = amps[flipped[sel]]
        return Statevector(n, out)
    (q,) = gate.targets
    u = gate_matrix(gate)
    view = amps.reshape(2**q, 2, 2 ** (n - q - 1))
    out = np.einsum("ab,ibj->iaj", u, view).reshape(-1)
    return Statevector(n, out)


def apply_circuit(state: Statevector, gates) -> Statevector:
    for g in gates:
        state = apply_gate(state, g)
    return state


def inner_product(a: Statevector, b: Statevector) -> complex:
    """<a|b> = sum_k conj(a_k) b_k."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different qubit counts")
    return complex(np.vdot(a.amps, b.amps))


def fidelity_exact(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2; invariant under global phases of either argument."""
    return float(abs(inner_product(a, b)) ** 2)


def ancilla_z_expectation(state: Statevector, ancilla: int = 0) -> float:
    """Pr(0) - Pr(1) for a Z measurement on one qubit, others traced out."""
    n = state.n_qubits
    _check_target(n, ancilla)
    probs = state.probabilities()
    bit = (np.arange(2**n) >> (n - 1 - ancilla)) & 1
    p1 = float(probs[bit == 1].sum())
    p0 = float(probs[bit == 0].sum())
    return p0 - p1


def circuit_unitary(n_qubits: int, gates) -> np.ndarray:
    """Dense unitary of a gate sequence (oracle helper; O(4^n))."""
    dim = 2**n_qubits
    cols = np.empty((dim, dim), dtype=np.complex128)
    for k in range(dim):
        cols[:, k] = apply_circuit(basis_state(n_qubits, k), gates).amps
    return cols
