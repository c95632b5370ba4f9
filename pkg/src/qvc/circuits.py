"""Parameterized circuit templates: entanglement schedules, the ZZ feature
map, and the ansatz families, with exact trainable-parameter accounting.

A template is an ordered gate list whose angles are either fixed numbers,
references to feature slots (raw encoded values), derived pair phases
``(pi - v_i) * (pi - v_j)``, or trainable slots. Templates are immutable once
built and safe to share.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .sim import ANGLE_GATES, GATE_KINDS, GateInstance
from .sim import MAX_QUBITS

ENTANGLEMENT_KINDS = ("ln", "fl", "pw", "rl", "cl", "sca")
ANSATZ_KINDS = ("ra", "ptd", "es", "ep_is", "ep_fs")

# Default gate block for one qubit in an efficient-SU2 rotation layer.
# Gates drawn from {RX, RY, RZ} are trainable, Pauli gates are not.
ES_DEFAULT_BLOCK = ("RY", "Z")


def pair_phase(vi: float, vj: float) -> float:
    """Entangling phase of the ZZ feature map: (pi - vi) * (pi - vj)."""
    return (math.pi - vi) * (math.pi - vj)


def entanglement_pairs(
    kind: str, num_qubits: int, repetition_index: int = 0
) -> list[tuple[int, int]]:
    """Ordered (control, target) schedule for one entanglement layer.

    ``repetition_index`` only matters for ``sca``, whose layout rotates with
    the repetition and swaps control/target on odd repetitions.
    """
    if kind not in ENTANGLEMENT_KINDS:
        raise ConfigurationError(f"unknown entanglement kind {kind!r}")
    if num_qubits < 2:
        raise ConfigurationError(
            f"entanglement needs at least 2 qubits, got {num_qubits}"
        )
    if repetition_index < 0:
        raise ConfigurationError("repetition_index must be >= 0")
    n = num_qubits
    linear = [(i, i + 1) for i in range(n - 1)]
    if kind == "ln":
        return linear
    if kind == "rl":
        return linear[::-1]
    if kind == "fl":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    if kind == "pw":
        return [(i, i + 1) for i in range(0, n - 1, 2)] + [
            (i, i + 1) for i in range(1, n - 1, 2)
        ]
    # cl: long-range pair first (control = last qubit), then the linear run.
    circular = [(n - 1, 0)] + linear if n > 2 else [(n - 1, 0)]
    if kind == "cl":
        return circular
    # sca: rotate every index by the repetition, swap direction on odd
    # repetitions, and start the layer at the shifted position.
    b = repetition_index % n
    pairs = [((c + b) % n, (t + b) % n) for c, t in circular]
    if repetition_index % 2 == 1:
        pairs = [(t, c) for c, t in pairs]
    return pairs[b:] + pairs[:b]


@dataclass(frozen=True)
class TemplateGate:
    """One gate slot in a template.

    Exactly one of ``angle`` (fixed), ``feature_slot``, ``phi`` (feature pair),
    or ``theta_slot`` is set for rotational gates; fixed gates carry none.
    The referenced value is multiplied by ``scale`` when bound.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    feature_slot: int | None = None
    phi: tuple[int, int] | None = None
    theta_slot: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        refs = [
            self.angle is not None,
            self.feature_slot is not None,
            self.phi is not None,
            self.theta_slot is not None,
        ]
        if self.kind in ANGLE_GATES:
            if sum(refs) != 1:
                raise ValueError(
                    f"{self.kind} needs exactly one angle source, got {sum(refs)}"
                )
        elif any(refs):
            raise ValueError(f"{self.kind} takes no angle source")
        if self.phi is not None:
            object.__setattr__(self, "phi", (int(self.phi[0]), int(self.phi[1])))


@dataclass(frozen=True)
class CircuitTemplate:
    """Ordered gate list with symbolic parameter slots.

    A template references either feature slots (feature map) or trainable
    slots (ansatz), never both.
    """

    num_qubits: int
    gates: tuple[TemplateGate, ...]
    num_trainable: int
    num_feature_slots: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        theta_used = set()
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(f"gate qubit {q} outside template register")
            if gate.theta_slot is not None:
                if not 0 <= gate.theta_slot < self.num_trainable:
                    raise ValueError(f"theta slot {gate.theta_slot} out of range")
                theta_used.add(gate.theta_slot)
            if gate.feature_slot is not None and not (
                0 <= gate.feature_slot < self.num_feature_slots
            ):
                raise ValueError(f"feature slot {gate.feature_slot} out of range")
            if gate.phi is not None and not all(
                0 <= i < self.num_feature_slots for i in gate.phi
            ):
                raise ValueError(f"phi slots {gate.phi} out of range")
        if self.num_trainable and self.num_feature_slots:
            raise ValueError("a template carries feature slots or theta slots, not both")
        if theta_used != set(range(self.num_trainable)):
            missing = sorted(set(range(self.num_trainable)) - theta_used)
            raise ValueError(f"unused trainable slots: {missing}")


def build_zz_feature_map(num_features: int) -> CircuitTemplate:
    """ZZ feature map with linear entanglement, one repetition.

    One qubit per feature: H on every qubit, a phase of twice the encoded
    value on each, then for each linear pair (i, j) a CX / P(2 * phase(i, j))
    / CX entangling unit on the target qubit j.
    """
    if not 2 <= num_features <= MAX_QUBITS:
        raise ConfigurationError(
            f"num_features must be in 2..{MAX_QUBITS}, got {num_features}"
        )
    n = num_features
    gates: list[TemplateGate] = [TemplateGate("H", (q,)) for q in range(n)]
    gates += [TemplateGate("P", (q,), feature_slot=q, scale=2.0) for q in range(n)]
    for i, j in entanglement_pairs("ln", n):
        gates.append(TemplateGate("CX", (i, j)))
        gates.append(TemplateGate("P", (j,), phi=(i, j), scale=2.0))
        gates.append(TemplateGate("CX", (i, j)))
    return CircuitTemplate(n, tuple(gates), num_trainable=0, num_feature_slots=n)


def ansatz_entanglement_layout(kind: str, entangle: str) -> str:
    """Entanglement layout actually used by an ansatz for a labeled structure.

    The Pauli two-design only admits a pairwise layout, so any label collapses
    to ``pw`` there; every other ansatz uses the label as-is.
    """
    if kind == "ptd":
        return "pw"
    return entangle


def build_ansatz(
    kind: str,
    num_qubits: int,
    num_rep: int,
    entangle: str,
    rng_seed: int = 0,
    es_block: tuple[str, ...] = ES_DEFAULT_BLOCK,
) -> CircuitTemplate:
    """Build one ansatz template.

    ``num_rep`` alternating (rotation, entanglement) blocks plus a final
    rotation layer. ``rng_seed`` only matters for ``ptd``, whose rotation
    gates are drawn uniformly from {RX, RY, RZ}.
    """
    if kind not in ANSATZ_KINDS:
        raise ConfigurationError(f"unknown ansatz kind {kind!r}")
    if entangle not in ENTANGLEMENT_KINDS:
        raise ConfigurationError(f"unknown entanglement kind {entangle!r}")
    if num_qubits < 2:
        raise ConfigurationError(f"ansatz needs at least 2 qubits, got {num_qubits}")
    if num_qubits > MAX_QUBITS:
        raise ConfigurationError(f"ansatz capped at {MAX_QUBITS} qubits")
    if num_rep < 1:
        raise ConfigurationError(f"num_rep must be >= 1, got {num_rep}")
    if kind == "ptd" and entangle != "pw":
        raise ConfigurationError(
            "the Pauli two-design admits only pairwise entanglement; "
            f"got {entangle!r}"
        )
    builder = {
        "ra": _build_ra,
        "ptd": _build_ptd,
        "es": _build_es,
        "ep_is": _build_ep,
        "ep_fs": _build_ep,
    }[kind]
    if kind == "es":
        return builder(num_qubits, num_rep, entangle, es_block)
    if kind in ("ep_is", "ep_fs"):
        return builder(num_qubits, num_rep, entangle, with_cphase=(kind == "ep_fs"))
    if kind == "ptd":
        return builder(num_qubits, num_rep, rng_seed)
    return builder(num_qubits, num_rep, entangle)


def _build_ra(n: int, reps: int, entangle: str) -> CircuitTemplate:
    gates: list[TemplateGate] = []
    slot = 0
    for rep in range(reps):
        for q in range(n):
            gates.append(TemplateGate("RY", (q,), theta_slot=slot))
            slot += 1
        for c, t in entanglement_pairs(entangle, n, rep):
            gates.append(TemplateGate("CX", (c, t)))
    for q in range(n):
        gates.append(TemplateGate("RY", (q,), theta_slot=slot))
        slot += 1
    return CircuitTemplate(n, tuple(gates), num_trainable=slot, num_feature_slots=0)


def _build_ptd(n: int, reps: int, rng_seed: int) -> CircuitTemplate:
    rng = np.random.default_rng(rng_seed)
    gates: list[TemplateGate] = [
        TemplateGate("RY", (q,), angle=math.pi / 4) for q in range(n)
    ]
    slot = 0
    for rep in range(reps + 1):
        for q in range(n):
            rot = rng.choice(("RX", "RY", "RZ"))
            gates.append(TemplateGate(str(rot), (q,), theta_slot=slot))
            slot += 1
        if rep < reps:
            for c, t in entanglement_pairs("pw", n, rep):
                gates.append(TemplateGate("CZ", (c, t)))
    return CircuitTemplate(n, tuple(gates), num_trainable=slot, num_feature_slots=0)


def _build_es(n: int, reps: int, entangle: str, block: tuple[str, ...]) -> CircuitTemplate:
    trainable = {"RX", "RY", "RZ"}
    for g in block:
        if g not in trainable and g not in ("X", "Y", "Z", "H"):
            raise ConfigurationError(f"unsupported rotation-block gate {g!r}")
    gates: list[TemplateGate] = []
    slot = 0

    def rotation_layer():
        nonlocal slot
        for g in block:
            for q in range(n):
                if g in trainable:
                    gates.append(TemplateGate(g, (q,), theta_slot=slot + q))
                else:
                    gates.append(TemplateGate(g, (q,)))
            if g in trainable:
                slot += n

    for rep in range(reps):
        rotation_layer()
        for c, t in entanglement_pairs(entangle, n, rep):
            gates.append(TemplateGate("CX", (c, t)))
    rotation_layer()
    return CircuitTemplate(n, tuple(gates), num_trainable=slot, num_feature_slots=0)


def _build_ep(n: int, reps: int, entangle: str, with_cphase: bool) -> CircuitTemplate:
    gates: list[TemplateGate] = []
    slot = 0
    for rep in range(reps):
        for q in range(n):
            gates.append(TemplateGate("RZ", (q,), theta_slot=slot))
            slot += 1
        for c, t in entanglement_pairs(entangle, n, rep):
            # RXX and RYY of one unit share a single trainable slot.
            gates.append(TemplateGate("RXX", (c, t), theta_slot=slot))
            gates.append(TemplateGate("RYY", (c, t), theta_slot=slot))
            slot += 1
            if with_cphase:
                gates.append(TemplateGate("CPhase", (c, t), theta_slot=slot))
                slot += 1
    for q in range(n):
        gates.append(TemplateGate("RZ", (q,), theta_slot=slot))
        slot += 1
    return CircuitTemplate(n, tuple(gates), num_trainable=slot, num_feature_slots=0)


def bind(template: CircuitTemplate, feature_values, theta) -> list[GateInstance]:
    """Substitute concrete values into a template's slots."""
    v = np.asarray(feature_values, dtype=float)
    th = np.asarray(theta, dtype=float)
    if v.shape != (template.num_feature_slots,):
        raise ValueError(
            f"expected {template.num_feature_slots} feature values, got {v.shape}"
        )
    if th.shape != (template.num_trainable,):
        raise ValueError(
            f"expected {template.num_trainable} trainable values, got {th.shape}"
        )
    bound: list[GateInstance] = []
    for gate in template.gates:
        if gate.kind not in ANGLE_GATES:
            bound.append(GateInstance(gate.kind, gate.qubits))
            continue
        if gate.angle is not None:
            value = gate.angle
        elif gate.feature_slot is not None:
            value = v[gate.feature_slot]
        elif gate.phi is not None:
            value = pair_phase(v[gate.phi[0]], v[gate.phi[1]])
        else:
            value = th[gate.theta_slot]
        bound.append(GateInstance(gate.kind, gate.qubits, gate.scale * value))
    return bound


# -- JSON serialization ------------------------------------------------------

def template_to_dict(template: CircuitTemplate) -> dict:
    gates = []
    for g in template.gates:
        entry: dict = {"kind": g.kind, "qubits": list(g.qubits)}
        if g.angle is not None:
            entry["angle"] = g.angle
        if g.feature_slot is not None:
            entry["feature_slot"] = g.feature_slot
        if g.phi is not None:
            entry["phi"] = list(g.phi)
        if g.theta_slot is not None:
            entry["theta_slot"] = g.theta_slot
        if g.scale != 1.0:
            entry["scale"] = g.scale
        gates.append(entry)
    return {
        "num_qubits": template.num_qubits,
        "num_trainable": template.num_trainable,
        "num_feature_slots": template.num_feature_slots,
        "gates": gates,
    }


def template_from_dict(data: dict) -> CircuitTemplate:
    gates = []
    for entry in data["gates"]:
        gates.append(
            TemplateGate(
                kind=entry["kind"],
                qubits=tuple(entry["qubits"]),
                angle=entry.get("angle"),
                feature_slot=entry.get("feature_slot"),
                phi=tuple(entry["phi"]) if "phi" in entry else None,
                theta_slot=entry.get("theta_slot"),
                scale=entry.get("scale", 1.0),
            )
        )
    return CircuitTemplate(
        num_qubits=data["num_qubits"],
        gates=tuple(gates),
        num_trainable=data["num_trainable"],
        num_feature_slots=data["num_feature_slots"],
    )


def template_to_json(template: CircuitTemplate, indent: int | None = 2) -> str:
    return json.dumps(template_to_dict(template), indent=indent)


def template_from_json(text: str) -> CircuitTemplate:
    return template_from_dict(json.loads(text))
