"""Variational complex-amplitude encoding with classical-shadow fidelity
estimation, plus a compact Hadamard classifier.

Qubit convention used throughout: qubit 0 is the most significant bit of a
computational-basis index, so the ancilla ("top wire") selects the upper or
lower half of an amplitude array.
"""

__version__ = "0.1.0"

MAX_QUBITS = 30
