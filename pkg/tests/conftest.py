"""Shared fixtures and random-circuit helpers."""

import numpy as np
import pytest

from qvc.sim import ANGLE_GATES, GATE_KINDS, TWO_QUBIT_GATES, GateInstance


def random_gate(rng: np.random.Generator, num_qubits: int) -> GateInstance:
    """One random gate valid on a register of ``num_qubits`` qubits."""
    kinds = sorted(GATE_KINDS) if num_qubits >= 2 else sorted(GATE_KINDS - TWO_QUBIT_GATES)
    kind = kinds[rng.integers(len(kinds))]
    n_q = 2 if kind in TWO_QUBIT_GATES else 1
    qubits = tuple(rng.choice(num_qubits, size=n_q, replace=False).tolist())
    angle = float(rng.uniform(-2 * np.pi, 2 * np.pi)) if kind in ANGLE_GATES else None
    return GateInstance(kind, qubits, angle)


def random_circuit(rng: np.random.Generator, num_qubits: int, num_gates: int):
    return [random_gate(rng, num_qubits) for _ in range(num_gates)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
