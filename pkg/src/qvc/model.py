"""Trainable binary classifier: feature map + ansatz + per-qubit Z readout.

Decoding: the classifier score is the arithmetic mean of the per-qubit Z
expectations; a sample is labeled valid when the score is >= 0 (ties pass
through). Training targets are +1 for valid and -1 for invalid, and the
objective is the mean squared error between score and target.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .circuits import (
    CircuitTemplate,
    ansatz_entanglement_layout,
    bind,
    build_ansatz,
    build_zz_feature_map,
)
from .cobyla import OptimizerConfig, OptimizationResult, initial_theta, minimize
from .data import INVALID, VALID, Dataset, ScalingSpec, apply_scaling, label_name
from .sim import (
    ANGLE_GATES,
    apply_circuit,
    apply_gate_batch,
    expectation_z,
    expectation_z_batch,
    zero_state,
    zero_states,
)

MODEL_FORMAT = "qvc-model"


@dataclass(frozen=True)
class Prediction:
    per_qubit_z: np.ndarray
    score: float

    @property
    def label_value(self) -> int:
        return VALID if self.score >= 0.0 else INVALID

    @property
    def label(self) -> str:
        return label_name(self.label_value)


@dataclass(frozen=True)
class QnnModel:
    """Feature map and ansatz templates plus bound trainable angles.

    The builder metadata (ansatz kind, entanglement label, repetitions, seed)
    is carried for persistence; hand-assembled models may leave it unset.
    """

    feature_map: CircuitTemplate
    ansatz: CircuitTemplate
    theta: np.ndarray
    scaling: ScalingSpec
    feature_names: tuple[str, ...]
    ansatz_kind: str | None = None
    entanglement: str | None = None
    num_rep: int | None = None
    rng_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        n = self.feature_map.num_qubits
        if self.ansatz.num_qubits != n:
            raise ValueError("feature map and ansatz disagree on qubit count")
        if self.scaling.num_features != n or len(self.feature_names) != n:
            raise ValueError("scaling spec and feature names must cover every qubit")
        if self.theta.shape != (self.ansatz.num_trainable,):
            raise ValueError(
                f"theta must have length {self.ansatz.num_trainable}, "
                f"got {self.theta.shape}"
            )

    @property
    def num_qubits(self) -> int:
        return self.feature_map.num_qubits


def build_qnn(
    ansatz_kind: str,
    entanglement: str,
    num_rep: int,
    scaling: ScalingSpec,
    feature_names,
    rng_seed: int = 0,
    theta=None,
) -> QnnModel:
    """Assemble the standard model: ZZ feature map plus one ansatz family.

    The entanglement label is stored as given; the layout collapses to ``pw``
    for the Pauli two-design.
    """
    num_qubits = scaling.num_features
    feature_map = build_zz_feature_map(num_qubits)
    layout = ansatz_entanglement_layout(ansatz_kind, entanglement)
    ansatz = build_ansatz(ansatz_kind, num_qubits, num_rep, layout, rng_seed)
    if theta is None:
        theta = np.zeros(ansatz.num_trainable)
    return QnnModel(
        feature_map=feature_map,
        ansatz=ansatz,
        theta=theta,
        scaling=scaling,
        feature_names=feature_names,
        ansatz_kind=ansatz_kind,
        entanglement=entanglement,
        num_rep=num_rep,
        rng_seed=rng_seed,
    )


def forward(model: QnnModel, raw_features, theta=None) -> Prediction:
    """Classify one sample: scale, encode, run the ansatz, read out <Z>."""
    x = np.asarray(raw_features, dtype=float)
    if x.shape != (model.num_qubits,):
        raise ValueError(
            f"expected {model.num_qubits} features, got shape {x.shape}"
        )
    theta = model.theta if theta is None else np.asarray(theta, dtype=float)
    encoded = apply_scaling(model.scaling, x)
    state = zero_state(model.num_qubits)
    apply_circuit(state, bind(model.feature_map, encoded, []))
    apply_circuit(state, bind(model.ansatz, [], theta))
    z = np.array([expectation_z(state, q) for q in range(model.num_qubits)])
    return Prediction(per_qubit_z=z, score=float(z.mean()))


def scores(model: QnnModel, raw_rows, theta=None) -> np.ndarray:
    """Classifier scores for a whole (m, n) feature matrix, batch-evaluated.

    Agrees with per-sample :func:`forward` to numerical precision; kept as a
    separate vectorized path because training evaluates the objective many
    hundreds of times.
    """
    rows = np.atleast_2d(np.asarray(raw_rows, dtype=float))
    if rows.shape[1] != model.num_qubits:
        raise ValueError(
            f"expected {model.num_qubits} features per row, got {rows.shape[1]}"
        )
    theta = model.theta if theta is None else np.asarray(theta, dtype=float)
    if theta.shape != (model.ansatz.num_trainable,):
        raise ValueError(
            f"theta must have length {model.ansatz.num_trainable}, got {theta.shape}"
        )
    encoded = apply_scaling(model.scaling, rows)
    amps = zero_states(rows.shape[0], model.num_qubits)
    _run_template_batch(amps, model.feature_map, encoded, None)
    _run_template_batch(amps, model.ansatz, None, theta)
    z = np.stack(
        [expectation_z_batch(amps, q) for q in range(model.num_qubits)], axis=1
    )
    return z.mean(axis=1)


def _run_template_batch(amps, template, features, theta) -> None:
    for gate in template.gates:
        if gate.kind not in ANGLE_GATES:
            apply_gate_batch(amps, gate.kind, gate.qubits)
            continue
        if gate.angle is not None:
            angle = gate.scale * gate.angle
        elif gate.feature_slot is not None:
            angle = gate.scale * features[:, gate.feature_slot]
        elif gate.phi is not None:
            i, j = gate.phi
            angle = gate.scale * (math.pi - features[:, i]) * (math.pi - features[:, j])
        else:
            angle = gate.scale * theta[gate.theta_slot]
        apply_gate_batch(amps, gate.kind, gate.qubits, angle)


def loss(model: QnnModel, dataset: Dataset, theta) -> float:
    """Mean squared error between scores and the +/-1 targets."""
    if dataset.num_rows == 0:
        raise ValueError("loss needs a non-empty dataset")
    s = scores(model, dataset.rows, theta)
    return float(np.mean((s - dataset.labels) ** 2))


def accuracy(model: QnnModel, dataset: Dataset) -> float:
    """Fraction of samples whose predicted label matches the true label."""
    if dataset.num_rows == 0:
        raise ValueError("accuracy needs a non-empty dataset")
    s = scores(model, dataset.rows)
    predicted = np.where(s >= 0.0, VALID, INVALID)
    return float(np.mean(predicted == dataset.labels))


def confusion_counts(model: QnnModel, dataset: Dataset) -> dict[str, int]:
    """Counts keyed by (true, predicted) pairs, valid treated as positive."""
    s = scores(model, dataset.rows)
    predicted = np.where(s >= 0.0, VALID, INVALID)
    return {
        "true_valid_pred_valid": int(np.sum((dataset.labels == VALID) & (predicted == VALID))),
        "true_valid_pred_invalid": int(np.sum((dataset.labels == VALID) & (predicted == INVALID))),
        "true_invalid_pred_valid": int(np.sum((dataset.labels == INVALID) & (predicted == VALID))),
        "true_invalid_pred_invalid": int(np.sum((dataset.labels == INVALID) & (predicted == INVALID))),
    }


def fit(
    model: QnnModel,
    train: Dataset,
    config: OptimizerConfig,
    trace_path=None,
) -> tuple[QnnModel, OptimizationResult]:
    """Train the model's angles by minimizing the squared-error objective."""
    theta0 = initial_theta(model.ansatz.num_trainable, config.seed)
    result = minimize(
        lambda theta: loss(model, train, theta), theta0, config, trace_path
    )
    return replace(model, theta=result.best_theta), result


# -- persistence --------------------------------------------------------------

def model_to_dict(model: QnnModel) -> dict:
    if model.ansatz_kind is None:
        raise ValueError("only models built by build_qnn() can be persisted")
    return {
        "format": MODEL_FORMAT,
        "ansatz": model.ansatz_kind,
        "entanglement": model.entanglement,
        "num_rep": model.num_rep,
        "num_qubits": model.num_qubits,
        "rng_seed": model.rng_seed,
        "theta": [float(v) for v in model.theta],
        "scaling_min": [float(v) for v in model.scaling.minima],
        "scaling_max": [float(v) for v in model.scaling.maxima],
        "feature_names": list(model.feature_names),
    }


def model_from_dict(data: dict) -> QnnModel:
    if data.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} document")
    scaling = ScalingSpec(
        np.array(data["scaling_min"], dtype=float),
        np.array(data["scaling_max"], dtype=float),
    )
    return build_qnn(
        ansatz_kind=data["ansatz"],
        entanglement=data["entanglement"],
        num_rep=data["num_rep"],
        scaling=scaling,
        feature_names=tuple(data["feature_names"]),
        rng_seed=data["rng_seed"],
        theta=np.array(data["theta"], dtype=float),
    )


def save_model(model: QnnModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> QnnModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
