"""Compact Hadamard classifier: pack paired training vectors into real and
imaginary amplitude parts, interfere them with the test vector through one
ancilla Hadamard, and classify by the sign of the ancilla Z expectation.

State layout on n + m + 1 qubits (qubit 0 = ancilla = most significant bit):
basis index = ancilla * 2^(m+n) + j * 2^n + d, with j the pair index over m
qubits and d the feature index over n qubits, so each pair's feature block
is contiguous.

Two data normalization conventions are supported:

- "per-vector" (default): every training vector is scaled to norm 1/sqrt(2)
  individually, so each compact pair is exactly unit norm.
- "global": all training vectors are divided by one shared constant (the
  largest pair norm) and the assembled state is renormalized as a whole.

The classical kernel-sum reference mirrors whichever convention is used, so
the quantum expectation and the classical sum agree identically in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statevector import Gate, Statevector, ancilla_z_expectation, apply_gate

NORM_MODES = ("per-vector", "global")

TIE_EPS = 1e-12


@dataclass
class TrainingSet:
    """Labeled vectors in block order: the +1 class first, then the -1 class.
    ``weights`` are per-pair b_j with sum 1 (uniform 2/M by default)."""

    plus_vectors: np.ndarray
    minus_vectors: np.ndarray
    weights: np.ndarray | None = None
    plus_name: str = "+1"
    minus_name: str = "-1"

    def __post_init__(self):
        self.plus_vectors = np.atleast_2d(np.asarray(self.plus_vectors, dtype=float))
        self.minus_vectors = np.atleast_2d(np.asarray(self.minus_vectors, dtype=float))
        if self.plus_vectors.shape[1] != self.minus_vectors.shape[1]:
            raise ValueError("class blocks have different feature dimensions")
        if self.weights is None:
            self.weights = np.full(self.n_pairs, 1.0 / self.n_pairs)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (self.n_pairs,):
                raise ValueError("need one weight per pair")
            if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-9:
                raise ValueError("weights must be non-negative and sum to 1")

    @property
    def n_features(self) -> int:
        return self.plus_vectors.shape[1]

    @property
    def m_plus(self) -> int:
        return self.plus_vectors.shape[0]

    @property
    def m_minus(self) -> int:
        return self.minus_vectors.shape[0]

    @property
    def n_pairs(self) -> int:
        return max(self.m_plus, self.m_minus)

    @property
    def labels(self) -> np.ndarray:
        return np.concatenate([np.ones(self.m_plus), -np.ones(self.m_minus)])


@dataclass(frozen=True)
class ClassifierLayout:
    n_feature_qubits: int  # ceil(log2 N)
    n_index_qubits: int  # ceil(log2 (M/2))
    phi: float

    @property
    def total_qubits(self) -> int:
        return self.n_feature_qubits + self.n_index_qubits + 1


@dataclass
class ClassificationResult:
    sigma_z: float
    label: int
    mode: str
    shots: int | None = None
    tie: bool = False


def phi_for_imbalance(m_plus: int, m_minus: int) -> float:
    """Relative phase compensating class imbalance: atan(M-/M+), pi/4 when
    balanced."""
    if m_plus < 1 or m_minus < 1:
        raise ValueError("both classes need at least one vector")
    return math.atan(m_minus / m_plus)


def layout_for(train: TrainingSet, phi: float | None = None) -> ClassifierLayout:
    n = math.ceil(math.log2(train.n_features)) if train.n_features > 1 else 0
    m = math.ceil(math.log2(train.n_pairs)) if train.n_pairs > 1 else 0
    if phi is None:
        phi = phi_for_imbalance(train.m_plus, train.m_minus)
    return ClassifierLayout(n, m, phi)


def _pair_matrices(train: TrainingSet) -> tuple[np.ndarray, np.ndarray]:
    """Plus/minus vectors as (n_pairs, N) blocks, zero-padding the smaller
    class (imbalanced sets)."""
    pairs = train.n_pairs
    plus = np.zeros((pairs, train.n_features))
    minus = np.zeros((pairs, train.n_features))
    plus[: train.m_plus] = train.plus_vectors
    minus[: train.m_minus] = train.minus_vectors
    return plus, minus


def _scaled_pairs(train: TrainingSet, norm_mode: str):
    """Apply the normalization convention.  Returns scaled (plus, minus)
    blocks and the squared norm of the assembled (pre-renormalization)
    initial state."""
    if norm_mode not in NORM_MODES:
        raise ValueError(f"norm_mode must be one of {NORM_MODES}")
    plus, minus = _pair_matrices(train)
    if norm_mode == "per-vector":
        for block, count in ((plus, train.m_plus), (minus, train.m_minus)):
            for j in range(count):
                nrm = np.linalg.norm(block[j])
                if nrm == 0:
                    raise ValueError(f"zero-norm training vector (pair {j})")
                block[j] /= nrm * math.sqrt(2.0)
        state_norm_sq = 1.0
    else:
        pair_norms_sq = (plus**2).sum(axis=1) + (minus**2).sum(axis=1)
        top = float(pair_norms_sq.max())
        if top == 0:
            raise ValueError("all training vectors have zero norm")
        plus = plus / math.sqrt(top)
        minus = minus / math.sqrt(top)
        scaled_sq = pair_norms_sq / top
        state_norm_sq = float(np.dot(train.weights, (scaled_sq + 1.0) / 2.0))
    return plus, minus, state_norm_sq


def _unit_test_vector(test_vector) -> np.ndarray:
    vec = np.asarray(test_vector, dtype=float)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValueError("zero-norm test vector")
    return vec / nrm


def build_compact_state(x_plus, x_minus, n_qubits: int | None = None) -> np.ndarray:
    """Compact pair state: coefficient l is x+_l + i x-_l after the
    per-vector normalization, zero-padded to 2^n."""
    xp = np.asarray(x_plus, dtype=float)
    xm = np.asarray(x_minus, dtype=float)
    if xp.shape != xm.shape:
        raise ValueError("pair vectors have different dimensions")
    for v in (xp, xm):
        if np.linalg.norm(v) == 0:
            raise ValueError("zero-norm input vector")
    xp = xp / (np.linalg.norm(xp) * math.sqrt(2.0))
    xm = xm / (np.linalg.norm(xm) * math.sqrt(2.0))
    if n_qubits is None:
        n_qubits = max(1, math.ceil(math.log2(len(xp))))
    if len(xp) > (1 << n_qubits):
        raise ValueError("feature dimension exceeds 2^n")
    out = np.zeros(1 << n_qubits, dtype=np.complex128)
    out[: len(xp)] = xp + 1j * xm
    return out


def build_psi_init(
    train: TrainingSet,
    test_vector,
    layout: ClassifierLayout,
    norm_mode: str = "per-vector",
) -> Statevector:
    """The pre-Hadamard classifier state on n + m + 1 qubits: training pairs
    behind ancilla |0>, the (repeated) test vector behind ancilla |1> with
    relative phase e^(-i phi)."""
    n = layout.n_feature_qubits
    m = layout.n_index_qubits
    if train.n_pairs > (1 << m):
        raise ValueError(f"{train.n_pairs} pairs exceed 2^{m} index states")
    if train.n_features > (1 << n):
        raise ValueError(f"{train.n_features} features exceed 2^{n} amplitudes")
    plus, minus, state_norm_sq = _scaled_pairs(train, norm_mode)
    test = _unit_test_vector(test_vector)
    dim_d = 1 << n
    amps = np.zeros((2, 1 << m, dim_d), dtype=np.complex128)
    phase = np.exp(-1j * layout.phi)
    for j in range(train.n_pairs):
        root = math.sqrt(train.weights[j] / 2.0)
        amps[0, j, : train.n_features] = root * (plus[j] + 1j * minus[j])
        amps[1, j, : train.n_features] = root * phase * test
    amps = amps.reshape(-1)
    amps /= math.sqrt(state_norm_sq)
    state = Statevector(layout.total_qubits, amps)
    if abs(state.norm() - 1.0) > 1e-9:
        raise ValueError(f"initial state norm {state.norm()} != 1")
    return state


def classify_state(
    state: Statevector,
    layout: ClassifierLayout,
    mode: str,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> ClassificationResult:
    """Apply the ancilla Hadamard and read the label off <sigma_z>."""
    if state.n_qubits != layout.total_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, layout needs {layout.total_qubits}"
        )
    final = apply_gate(state, Gate("H", (0,)))
    sigma_z = ancilla_z_expectation(final, 0)
    if shots is not None:
        if rng is None:
            rng = np.random.default_rng()
        p0 = (1.0 + sigma_z) / 2.0
        ones = rng.binomial(shots, min(max(p0, 0.0), 1.0))
        sigma_z = 2.0 * ones / shots - 1.0
    tie = abs(sigma_z) < TIE_EPS
    label = 1 if (sigma_z > 0 or tie) else -1
    return ClassificationResult(float(sigma_z), label, mode, shots, tie)


def classify_exact(psi_init: Statevector, layout: ClassifierLayout) -> ClassificationResult:
    return classify_state(psi_init, layout, mode="exact")


def classify_trained(
    spec,
    trained_params,
    layout: ClassifierLayout,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> ClassificationResult:
    """Classify from a trained encoder circuit instead of the exact state.
    A global phase on the trained state cannot change the outcome."""
    from .ansatz import build_state

    if spec.n_qubits != layout.total_qubits:
        raise ValueError(
            f"ansatz has {spec.n_qubits} qubits, layout needs {layout.total_qubits}"
        )
    state = build_state(spec, trained_params)
    return classify_state(state, layout, mode="trained", shots=shots, rng=rng)


def kernel_sum_reference(
    train: TrainingSet,
    test_vector,
    phi: float,
    norm_mode: str = "per-vector",
) -> float:
    """Classical weighted kernel sum equal to the exact <sigma_z>: with
    kappa_j the complex overlap of the test state with pair j,
    sum_j b_j (cos(phi) Re kappa_j - sin(phi) Im kappa_j), divided by the
    state normalization in global mode."""
    plus, minus, state_norm_sq = _scaled_pairs(train, norm_mode)
    test = _unit_test_vector(test_vector)
    kappa = plus @ test + 1j * (minus @ test)
    value = float(
        np.dot(train.weights, math.cos(phi) * kappa.real - math.sin(phi) * kappa.imag)
    )
    return value / state_norm_sq
