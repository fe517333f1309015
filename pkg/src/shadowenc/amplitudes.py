"""Phase-exact stabilizer amplitudes <b|U|k> for Clifford U.

Each call propagates a computational-basis state through the tableau's
synthesized circuit in an affine-subspace form, so the cost is polynomial in
the qubit count (no 2^n factor).  Values are deterministic per (U, b, k) and
carry consistent phases: for fixed U the whole amplitude table equals the
dense matrix of the synthesized circuit entry-for-entry.
"""

from __future__ import annotations

import numpy as np

from . import _fast
from .clifford import CliffordTableau


def _as_index(bits, n: int) -> int:
    """Accept a basis index or an iterable of bits (qubit 0 first)."""
    if isinstance(bits, (int, np.integer)):
        idx = int(bits)
    elif isinstance(bits, str):
        if len(bits) != n:
            raise ValueError(f"bitstring length {len(bits)} != {n}")
        idx = int(bits, 2)
    else:
        seq = list(bits)
        if len(seq) != n:
            raise ValueError(f"bitstring length {len(seq)} != {n}")
        idx = 0
        for b in seq:
            idx = (idx << 1) | (int(b) & 1)
    if not 0 <= idx < (1 << n):
        raise ValueError("basis index out of range")
    return idx


def _workspace(n: int):
    cols = np.zeros(n + 2, dtype=np.int64)
    L = np.zeros(n + 2, dtype=np.int64)
    Q = np.zeros(n + 2, dtype=np.int64)
    meta = np.zeros(3, dtype=np.int64)
    return cols, L, Q, meta


def amplitude(t: CliffordTableau, b, k) -> complex:
    """Exact complex <b|U|k>, including phase."""
    n = t.n_qubits
    bi = _as_index(b, n)
    ki = _as_index(k, n)
    ops, m = t.ops()
    cols, L, Q, meta = _workspace(n)
    _fast.aff_init(cols, L, Q, meta, ki)
    _fast.aff_apply_ops(cols, L, Q, meta, n, ops, m, 0)
    return complex(_fast.aff_amplitude(cols, L, Q, meta, n, bi))


def basis_overlap_row(t: CliffordTableau, b) -> np.ndarray:
    """The row vector {<b|U|k>}_k, via one backward propagation of |b>."""
    n = t.n_qubits
    bi = _as_index(b, n)
    ops, m = t.ops()
    cols, L, Q, meta = _workspace(n)
    _fast.aff_init(cols, L, Q, meta, bi)
    _fast.aff_apply_ops(cols, L, Q, meta, n, ops, m, 1)
    out = np.empty(1 << n, dtype=np.complex128)
    for k in range(1 << n):
        # <b|U|k> = conj(<k|U^dag|b>)
        out[k] = np.conj(_fast.aff_amplitude(cols, L, Q, meta, n, k))
    return out


def overlap_with_target(t: CliffordTableau, b, coeffs, floor: float = 0.0) -> complex:
    """sum_k coeffs_k <b|U|k>, skipping coefficients with |c_k| <= floor."""
    n = t.n_qubits
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != (1 << n,):
        raise ValueError("coefficient vector has wrong length")
    nrm = np.linalg.norm(coeffs)
    if abs(nrm - 1.0) > 1e-6:
        raise ValueError(f"target coefficients not unit norm (|c| = {nrm})")
    bi = _as_index(b, n)
    ops, m = t.ops()
    cols, L, Q, meta = _workspace(n)
    _fast.aff_init(cols, L, Q, meta, bi)
    _fast.aff_apply_ops(cols, L, Q, meta, n, ops, m, 1)
    return complex(_fast.aff_dot_conj(cols, L, Q, meta, n, coeffs, floor))
