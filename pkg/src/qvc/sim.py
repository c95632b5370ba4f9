"""Dense statevector simulation of n-qubit circuits.

Conventions, fixed for the whole package:

* qubit 0 is the least-significant bit of the basis index (little-endian);
* ``RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]``;
* ``RZ(t) = diag(e^{-it/2}, e^{it/2})``, ``P(t) = diag(1, e^{it})``;
* ``RXX/RYY/RZZ(t) = exp(-i t/2 * XX/YY/ZZ)``;
* controlled gates act on the target only when the control bit is 1, with
  ``qubits[0]`` the control and ``qubits[1]`` the target.

The production path updates amplitudes in place through index masking and
never materializes a full-circuit matrix; :func:`dense_unitary_oracle`
builds one (Kronecker embedding plus matrix exponentials) and exists to
cross-check the fast path in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

MAX_QUBITS = 24  # 2^24 complex doubles ~ 256 MB, a sane desk-scale ceiling
ORACLE_MAX_QUBITS = 6

FIXED_GATES = frozenset({"H", "X", "Y", "Z", "CX", "CY", "CZ"})
ANGLE_GATES = frozenset(
    {"P", "RX", "RY", "RZ", "CRX", "CRY", "CRZ", "RXX", "RYY", "RZZ", "CPhase"}
)
GATE_KINDS = FIXED_GATES | ANGLE_GATES
TWO_QUBIT_GATES = frozenset(
    {"CX", "CY", "CZ", "CRX", "CRY", "CRZ", "RXX", "RYY", "RZZ", "CPhase"}
)
# Diagonal in the computational basis: applying one never changes any |amp|^2.
DIAGONAL_GATES = frozenset({"Z", "P", "RZ", "CZ", "CRZ", "RZZ", "CPhase"})

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_FIXED_1Q = {
    "H": np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class GateInstance:
    """One concrete gate: kind, qubit indices, and a bound angle if rotational."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        expected = 2 if self.kind in TWO_QUBIT_GATES else 1
        if len(qubits) != expected:
            raise ValueError(f"{self.kind} takes {expected} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind} qubits must be distinct, got {qubits}")
        if self.kind in ANGLE_GATES:
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")


@dataclass
class QuantumState:
    """Complex amplitude vector over the 2^n computational basis states."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def zero_state(num_qubits: int) -> QuantumState:
    """Return |0...0> on ``num_qubits`` qubits."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}"
        )
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = 1.0
    return QuantumState(num_qubits, amps)


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Dense 2x2 or 4x4 matrix for one gate.

    Two-qubit matrices are written in the basis ordered by
    ``2*bit(qubits[0]) + bit(qubits[1])``, i.e. the first listed qubit is the
    high bit of the pair index.
    """
    if kind in _FIXED_1Q:
        return _FIXED_1Q[kind]
    if kind in ("CX", "CY", "CZ"):
        return _controlled(_FIXED_1Q[kind[1:]])
    t = angle
    if t is None:
        raise ValueError(f"{kind} requires an angle")
    c, s = math.cos(t / 2.0), math.sin(t / 2.0)
    if kind == "P":
        return np.array([[1, 0], [0, np.exp(1j * t)]], dtype=complex)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex)
    if kind in ("CRX", "CRY", "CRZ"):
        return _controlled(gate_matrix(kind[1:], t))
    if kind == "CPhase":
        return np.diag([1, 1, 1, np.exp(1j * t)]).astype(complex)
    if kind == "RXX":
        m = np.diag([c, c, c, c]).astype(complex)
        anti = -1j * s
        m[0, 3] = m[3, 0] = m[1, 2] = m[2, 1] = anti
        return m
    if kind == "RYY":
        m = np.diag([c, c, c, c]).astype(complex)
        m[0, 3] = m[3, 0] = 1j * s
        m[1, 2] = m[2, 1] = -1j * s
        return m
    if kind == "RZZ":
        e_m, e_p = np.exp(-0.5j * t), np.exp(0.5j * t)
        return np.diag([e_m, e_p, e_p, e_m]).astype(complex)
    raise ValueError(f"unknown gate kind {kind!r}")


def _controlled(u: np.ndarray) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = u
    return m


def _check_qubits(gate: GateInstance, num_qubits: int) -> None:
    for q in gate.qubits:
        if not 0 <= q < num_qubits:
            raise ValueError(
                f"qubit {q} out of range for a {num_qubits}-qubit state"
            )


def apply_gate(state: QuantumState, gate: GateInstance) -> QuantumState:
    """Apply ``gate`` to ``state`` in place and return the state."""
    _check_qubits(gate, state.num_qubits)
    amps = state.amplitudes
    if len(gate.qubits) == 1:
        _apply_1q(amps, gate_matrix(gate.kind, gate.angle), gate.qubits[0])
    else:
        _apply_2q(amps, gate_matrix(gate.kind, gate.angle), gate.qubits)
    return state


def apply_circuit(state: QuantumState, gates) -> QuantumState:
    """Apply a gate sequence in order; returns the mutated state."""
    for gate in gates:
        apply_gate(state, gate)
    return state


def _apply_1q(amps: np.ndarray, m: np.ndarray, q: int) -> None:
    # View axes: (higher bits, bit q, lower bits); updates are in place.
    v = amps.reshape(-1, 2, 1 << q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    v[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1


def _pair_index_groups(dim: int, qubits: tuple[int, ...]) -> list[np.ndarray]:
    """Basis indices grouped by the two selected bits: (00, 01, 10, 11)."""
    ma, mb = 1 << qubits[0], 1 << qubits[1]
    idx = np.arange(dim)
    base = idx[((idx & ma) == 0) & ((idx & mb) == 0)]
    return [base, base | mb, base | ma, base | ma | mb]


def _apply_2q(amps: np.ndarray, m: np.ndarray, qubits: tuple[int, ...]) -> None:
    groups = _pair_index_groups(amps.size, qubits)
    vecs = np.stack([amps[g] for g in groups])
    out = m @ vecs
    for k, g in enumerate(groups):
        amps[g] = out[k]


def expectation_z(state: QuantumState, qubit: int) -> float:
    """<Z> on one qubit: sum of |amp|^2 signed by that basis bit."""
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(
            f"qubit {qubit} out of range for a {state.num_qubits}-qubit state"
        )
    probs = np.abs(state.amplitudes) ** 2
    p1 = probs.reshape(-1, 2, 1 << qubit)[:, 1, :].sum()
    return float(1.0 - 2.0 * p1)


# -- batched evaluation ------------------------------------------------------
#
# The sweep evaluates one circuit shape on many samples; amplitudes for the
# whole batch live in a (batch, 2^n) array so each gate is one vectorized
# update. Only diagonal phase gates ever carry per-sample angles (the feature
# map's P gates); everything else is one shared matrix per gate.


def zero_states(batch: int, num_qubits: int) -> np.ndarray:
    """(batch, 2^n) amplitudes, each row |0...0>."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}"
        )
    amps = np.zeros((batch, 1 << num_qubits), dtype=complex)
    amps[:, 0] = 1.0
    return amps


def apply_gate_batch(amps: np.ndarray, kind: str, qubits, angle=None) -> None:
    """Apply one gate to every row of a (batch, 2^n) amplitude array.

    ``angle`` may be a scalar or, for the diagonal P gate only, a per-sample
    vector of length ``batch``.
    """
    qubits = tuple(qubits)
    per_sample = isinstance(angle, np.ndarray) and angle.ndim == 1
    if per_sample:
        if kind not in ("P", "RX", "RY", "RZ"):
            raise ValueError(
                f"per-sample angles are only supported for 1-qubit rotations, got {kind}"
            )
        q = qubits[0]
        v = amps.reshape(amps.shape[0], -1, 2, 1 << q)
        if kind == "P":
            v[:, :, 1, :] *= np.exp(1j * angle)[:, None, None]
            return
        if kind == "RZ":
            phase = np.exp(0.5j * angle)[:, None, None]
            v[:, :, 0, :] *= phase.conj()
            v[:, :, 1, :] *= phase
            return
        c = np.cos(0.5 * angle)[:, None, None]
        s = np.sin(0.5 * angle)[:, None, None]
        a0 = v[:, :, 0, :].copy()
        a1 = v[:, :, 1, :]
        if kind == "RY":
            v[:, :, 0, :] = c * a0 - s * a1
            v[:, :, 1, :] = s * a0 + c * a1
        else:  # RX
            v[:, :, 0, :] = c * a0 - 1j * s * a1
            v[:, :, 1, :] = -1j * s * a0 + c * a1
        return
    scalar = None if angle is None else float(angle)
    m = gate_matrix(kind, scalar)
    if len(qubits) == 1:
        q = qubits[0]
        v = amps.reshape(amps.shape[0], -1, 2, 1 << q)
        a0 = v[:, :, 0, :].copy()
        a1 = v[:, :, 1, :]
        v[:, :, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
        v[:, :, 1, :] = m[1, 0] * a0 + m[1, 1] * a1
        return
    groups = _pair_index_groups(amps.shape[1], qubits)
    vecs = np.stack([amps[:, g] for g in groups])  # (4, batch, dim/4)
    out = np.einsum("ij,jbn->ibn", m, vecs)
    for k, g in enumerate(groups):
        amps[:, g] = out[k]


def expectation_z_batch(amps: np.ndarray, qubit: int) -> np.ndarray:
    """Per-row <Z> on one qubit of a (batch, 2^n) amplitude array."""
    probs = np.abs(amps) ** 2
    p1 = probs.reshape(amps.shape[0], -1, 2, 1 << qubit)[:, :, 1, :].sum(axis=(1, 2))
    return 1.0 - 2.0 * p1


# -- dense oracle (test cross-check) ----------------------------------------
#
# Built from a different primitive set than the production path: 1-qubit
# matrices are embedded with np.kron, two-qubit rotations come out of a true
# matrix exponential, and controlled gates are assembled from projector
# algebra. Agreement between the two paths is therefore meaningful.

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def _embed_1q(m: np.ndarray, q: int, num_qubits: int) -> np.ndarray:
    full = np.kron(m, np.eye(1 << q, dtype=complex))
    high = num_qubits - q - 1
    return np.kron(np.eye(1 << high, dtype=complex), full)


def _gate_unitary(gate: GateInstance, num_qubits: int) -> np.ndarray:
    from scipy.linalg import expm  # test-only dependency, imported lazily

    kind, t = gate.kind, gate.angle
    if len(gate.qubits) == 1:
        return _embed_1q(gate_matrix(kind, t), gate.qubits[0], num_qubits)
    a, b = gate.qubits
    if kind in ("RXX", "RYY", "RZZ"):
        pauli = _FIXED_1Q[kind[1]]
        pp = _embed_1q(pauli, a, num_qubits) @ _embed_1q(pauli, b, num_qubits)
        return expm(-0.5j * t * pp)
    # Remaining two-qubit gates are controlled-U: P0 (x) I + P1 (x) U.
    if kind in ("CX", "CY", "CZ"):
        u = _FIXED_1Q[kind[1:]]
    elif kind == "CPhase":
        u = gate_matrix("P", t)
    else:
        u = gate_matrix(kind[1:], t)
    return _embed_1q(_P0, a, num_qubits) + _embed_1q(_P1, a, num_qubits) @ _embed_1q(
        u, b, num_qubits
    )


def dense_unitary_oracle(gates, num_qubits: int) -> np.ndarray:
    """Full 2^n x 2^n unitary of a gate sequence. Refuses n > 6 (scale guard)."""
    if num_qubits > ORACLE_MAX_QUBITS:
        raise ConfigurationError(
            f"dense oracle is limited to {ORACLE_MAX_QUBITS} qubits, got {num_qubits}"
        )
    u = np.eye(1 << num_qubits, dtype=complex)
    for gate in gates:
        _check_qubits(gate, num_qubits)
        u = _gate_unitary(gate, num_qubits) @ u
    return u
