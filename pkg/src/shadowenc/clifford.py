"""Uniform random Clifford sampling and tableau-to-circuit synthesis.

A tableau stores the conjugation action of a Clifford unitary: row i is the
image of X_i, row n+i the image of Z_i, each a Pauli ``i^p prod X^x Z^z``
with bitmasks in basis-index positions (qubit 0 = most significant bit).
The sampler maps independent uniform draws bijectively onto group elements
(canonical symplectic construction plus uniform sign bits), so group
elements are exactly equiprobable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import MAX_QUBITS
from . import _fast
from .statevector import Gate, circuit_unitary

_OP_TO_KIND = {
    _fast.OP_H: "H",
    _fast.OP_S: "S",
    _fast.OP_X: "X",
    _fast.OP_Z: "Z",
    _fast.OP_CNOT: "CNOT",
}
_KIND_TO_OP = {v: k for k, v in _OP_TO_KIND.items()}


@dataclass
class CliffordTableau:
    """Symplectic + phase representation of an n-qubit Clifford unitary."""

    n_qubits: int
    tx: np.ndarray
    tz: np.ndarray
    tp: np.ndarray
    _ops: np.ndarray | None = field(default=None, repr=False)
    _n_ops: int = field(default=-1, repr=False)

    def is_valid(self) -> bool:
        return bool(_fast.tableau_is_valid(self.n_qubits, self.tx, self.tz, self.tp))

    def key(self) -> bytes:
        """Canonical hashable identity (one per group element, phases included)."""
        return self.tx.tobytes() + self.tz.tobytes() + self.tp.tobytes()

    def ops(self) -> tuple[np.ndarray, int]:
        """Synthesized opcode rows (cached)."""
        if self._ops is None:
            buf = _fast.synth_buffer(self.n_qubits)
            m = _fast.synthesize(
                self.n_qubits, self.tx.copy(), self.tz.copy(), self.tp.copy(), buf
            )
            self._ops = buf[:m].copy()
            self._n_ops = m
        return self._ops, self._n_ops

    def circuit(self) -> list[Gate]:
        ops, m = self.ops()
        gates = []
        for g in range(m):
            code, a, b = int(ops[g, 0]), int(ops[g, 1]), int(ops[g, 2])
            kind = _OP_TO_KIND[code]
            gates.append(Gate(kind, (a, b) if kind == "CNOT" else (a,)))
        return gates

    def to_unitary(self) -> np.ndarray:
        """Dense unitary of the synthesized circuit (oracle helper)."""
        return circuit_unitary(self.n_qubits, self.circuit())


def identity_tableau(n: int) -> CliffordTableau:
    tx = np.zeros(2 * n, dtype=np.int64)
    tz = np.zeros(2 * n, dtype=np.int64)
    tp = np.zeros(2 * n, dtype=np.int64)
    for q in range(n):
        tx[q] = 1 << (n - 1 - q)
        tz[n + q] = 1 << (n - 1 - q)
    return CliffordTableau(n, tx, tz, tp)


def tableau_from_draws(n: int, kdraws, bitdraws, signs: int) -> CliffordTableau:
    rows = np.empty(2 * n, dtype=np.int64)
    _fast.symplectic_rows(n, np.asarray(kdraws, dtype=np.int64),
                          np.asarray(bitdraws, dtype=np.int64), rows)
    tx = np.empty(2 * n, dtype=np.int64)
    tz = np.empty(2 * n, dtype=np.int64)
    tp = np.empty(2 * n, dtype=np.int64)
    _fast.symplectic_to_tableau(n, rows, np.int64(signs), tx, tz, tp)
    return CliffordTableau(n, tx, tz, tp)


def draw_clifford_randoms(n: int, rng: np.random.Generator, size: int):
    """Raw uniform draws for ``size`` Cliffords: per-level symplectic indices
    plus sign masks.  Kept separate so compiled batch kernels can consume the
    same stream."""
    kdraws = np.empty((size, n), dtype=np.int64)
    bitdraws = np.empty((size, n), dtype=np.int64)
    for j in range(1, n + 1):
        kdraws[:, j - 1] = rng.integers(1, (1 << (2 * j)), size=size, dtype=np.int64)
        bitdraws[:, j - 1] = rng.integers(0, 1 << (2 * j - 1), size=size, dtype=np.int64)
    signdraws = rng.integers(0, 1 << (2 * n), size=size, dtype=np.int64)
    return kdraws, bitdraws, signdraws


def sample_random_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """A uniformly distributed element of the n-qubit Clifford group
    (modulo global phase)."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in [1, {MAX_QUBITS}]")
    kdraws, bitdraws, signdraws = draw_clifford_randoms(n, rng, 1)
    return tableau_from_draws(n, kdraws[0], bitdraws[0], int(signdraws[0]))


def tableau_to_circuit(t: CliffordTableau) -> list[Gate]:
    """Sequence over {H, S, CNOT, X, Z} realizing the tableau's unitary up to
    global phase (conjugation action matches exactly, signs included)."""
    if not t.is_valid():
        raise ValueError("invalid tableau")
    return t.circuit()


def tableau_of_circuit(n: int, gates) -> CliffordTableau:
    """Conjugation action of a Clifford gate sequence."""
    t = identity_tableau(n)
    for g in gates:
        if g.kind not in _KIND_TO_OP:
            raise ValueError(f"{g.kind} is not in the Clifford gate set")
        code = _KIND_TO_OP[g.kind]
        posa = n - 1 - g.targets[0]
        posb = n - 1 - g.targets[1] if g.kind == "CNOT" else 0
        _fast._conj_gate(t.tx, t.tz, t.tp, 2 * n, code, posa, posb)
    return t


def symplectic_count(n: int) -> int:
    """|Sp(2n, F_2)|."""
    total = 1
    for j in range(1, n + 1):
        total *= (1 << (2 * j - 1)) * ((1 << (2 * j)) - 1)
    return total


def clifford_count(n: int) -> int:
    """Group size modulo global phase: 4^n * |Sp(2n, F_2)|."""
    return (4**n) * symplectic_count(n)


def enumerate_cliffords(n: int):
    """Every element of the n-qubit Clifford group (n <= 2: 24 or 11520)."""
    if n > 2:
        raise ValueError("full enumeration is only supported for n <= 2")
    level_draws = []
    for j in range(1, n + 1):
        ks = range(1, 1 << (2 * j))
        bs = range(1 << (2 * j - 1))
        level_draws.append([(k, b) for k in ks for b in bs])
    out = []
    for combo in product(*level_draws):
        kdraws = [c[0] for c in combo]
        bitdraws = [c[1] for c in combo]
        for signs in range(1 << (2 * n)):
            out.append(tableau_from_draws(n, kdraws, bitdraws, signs))
    return out
