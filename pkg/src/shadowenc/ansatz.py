"""Hardware-efficient parameterized circuit: one single-qubit rotation per
qubit per layer (axis drawn from {X, Y, Z}) followed by an entangling CNOT
pattern.  Parameter count R = layers * n_qubits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fast
from .statevector import Gate, Statevector

ENTANGLERS = ("linear",)
_AXIS_TO_OP = {"X": _fast.OP_RX, "Y": _fast.OP_RY, "Z": _fast.OP_RZ}


@dataclass(frozen=True)
class AnsatzSpec:
    """Circuit layout: per-layer rotation axes plus the entangler pattern."""

    n_qubits: int
    layers: int
    axes: tuple[str, ...]  # one string of length n_qubits per layer
    entangler: str = "linear"

    def __post_init__(self):
        if self.n_qubits < 1 or self.layers < 1:
            raise ValueError("n_qubits and layers must be positive")
        if len(self.axes) != self.layers:
            raise ValueError("need one axis string per layer")
        for row in self.axes:
            if len(row) != self.n_qubits or any(c not in "XYZ" for c in row):
                raise ValueError(f"bad axis row {row!r}")
        if self.entangler not in ENTANGLERS:
            raise ValueError(f"unknown entangler {self.entangler!r}")

    @property
    def n_params(self) -> int:
        return self.layers * self.n_qubits

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "layers": self.layers,
            "axes": list(self.axes),
            "entangler": self.entangler,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnsatzSpec":
        return cls(d["n_qubits"], d["layers"], tuple(d["axes"]), d["entangler"])


def random_init(n_qubits: int, layers: int, seed) -> tuple[AnsatzSpec, np.ndarray]:
    """Random axes and angles (axes uniform over {X,Y,Z}, angles over [0, 2pi))."""
    if n_qubits < 1 or layers < 1:
        raise ValueError("n_qubits and layers must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    axes = tuple(
        "".join(rng.choice(("X", "Y", "Z"))) if n_qubits == 1
        else "".join(rng.choice(("X", "Y", "Z"), size=n_qubits))
        for _ in range(layers)
    )
    spec = AnsatzSpec(n_qubits, layers, axes)
    params = rng.uniform(0.0, 2.0 * np.pi, size=spec.n_params)
    return spec, params


def circuit(spec: AnsatzSpec, params: np.ndarray) -> list[Gate]:
    """Gate list of the ansatz; parameter r drives layer r // n, qubit r % n."""
    params = np.asarray(params, dtype=float)
    if params.shape != (spec.n_params,):
        raise ValueError(
            f"expected {spec.n_params} parameters, got {params.shape}"
        )
    gates = []
    n = spec.n_qubits
    for layer in range(spec.layers):
        for q in range(n):
            axis = spec.axes[layer][q]
            gates.append(Gate(f"R{axis}", (q,), float(params[layer * n + q])))
        if layer < spec.layers - 1 and n > 1:
            for q in range(n - 1):
                gates.append(Gate("CNOT", (q, q + 1)))
    return gates


def compile_ops(spec: AnsatzSpec) -> tuple[np.ndarray, np.ndarray]:
    """Opcode rows plus the map gate -> parameter index (-1 for CNOTs)."""
    n = spec.n_qubits
    rows = []
    pmap = []
    for layer in range(spec.layers):
        for q in range(n):
            rows.append((_AXIS_TO_OP[spec.axes[layer][q]], q, 0))
            pmap.append(layer * n + q)
        if layer < spec.layers - 1 and n > 1:
            for q in range(n - 1):
                rows.append((_fast.OP_CNOT, q, q + 1))
                pmap.append(-1)
    return np.array(rows, dtype=np.int64), np.array(pmap, dtype=np.int64)


def build_state_from_ops(ops: np.ndarray, pmap: np.ndarray, n: int,
                         params: np.ndarray) -> np.ndarray:
    angles = np.where(pmap >= 0, params[pmap], 0.0)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    _fast.apply_ops(amps, n, ops, angles, ops.shape[0])
    return amps


def build_state(spec: AnsatzSpec, params: np.ndarray) -> Statevector:
    """U(params)|0...0> as a dense state."""
    params = np.asarray(params, dtype=float)
    if params.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} parameters, got {params.shape}")
    ops, pmap = compile_ops(spec)
    return Statevector(spec.n_qubits, build_state_from_ops(ops, pmap, spec.n_qubits, params))
