"""Classifier model: decoding rule, objective, persistence, batch consistency."""

import math

import numpy as np
import pytest

from qvc.circuits import CircuitTemplate, TemplateGate, build_zz_feature_map
from qvc.data import INVALID, VALID, Dataset, ScalingSpec
from qvc.model import (
    QnnModel,
    accuracy,
    build_qnn,
    confusion_counts,
    forward,
    load_model,
    loss,
    model_to_dict,
    save_model,
    scores,
)
from qvc.sim import apply_circuit, expectation_z, zero_state
from qvc.circuits import bind


def identity_scaling(n):
    """Raw features already in [0, pi] pass through unchanged."""
    return ScalingSpec(np.zeros(n), np.full(n, math.pi))


def names(n):
    return tuple(f"f{i}" for i in range(n))


def ry_encoding_model(n):
    """Hand-built model: RY(feature) per qubit, no trainable gates.

    Per-qubit <Z> is cos(feature), so scores are easy to stage for the
    arithmetic checks below.
    """
    fmap = CircuitTemplate(
        n,
        tuple(TemplateGate("RY", (q,), feature_slot=q) for q in range(n)),
        num_trainable=0,
        num_feature_slots=n,
    )
    ansatz = CircuitTemplate(n, (), num_trainable=0, num_feature_slots=0)
    return QnnModel(fmap, ansatz, np.zeros(0), identity_scaling(n), names(n))


class TestForward:
    def test_zero_theta_scores_zero_and_valid(self):
        model = build_qnn("ra", "fl", 1, identity_scaling(3), names(3))
        pred = forward(model, [0.3, 2.0, 1.1])
        assert pred.score == pytest.approx(0.0, abs=1e-12)
        assert pred.label == "valid"  # tie-break: score >= 0 passes through

    def test_hand_built_flip_model(self):
        fmap = CircuitTemplate(2, (), num_trainable=0, num_feature_slots=2)
        ansatz = CircuitTemplate(
            2,
            (
                TemplateGate("RY", (0,), theta_slot=0),
                TemplateGate("RY", (1,), theta_slot=1),
            ),
            num_trainable=2,
            num_feature_slots=0,
        )
        model = QnnModel(
            fmap, ansatz, np.array([math.pi, math.pi]), identity_scaling(2), names(2)
        )
        pred = forward(model, [0.1, 0.2])
        np.testing.assert_allclose(pred.per_qubit_z, [-1.0, -1.0], atol=1e-12)
        assert pred.score == pytest.approx(-1.0)
        assert pred.label == "invalid"

    def test_score_bounded_on_best_combination(self):
        rng = np.random.default_rng(77)
        model = build_qnn("ep_is", "sca", 7, identity_scaling(5), names(5), rng_seed=1)
        rows = rng.uniform(0, math.pi, size=(1000, 5))
        thetas = rng.uniform(-math.pi, math.pi, size=model.ansatz.num_trainable)
        s = scores(model, rows, thetas)
        assert np.all(np.abs(s) <= 1.0 + 1e-12)

    def test_deterministic_and_repeatable(self):
        model = build_qnn("ep_fs", "cl", 2, identity_scaling(3), names(3), rng_seed=9)
        model = QnnModel(
            model.feature_map,
            model.ansatz,
            np.linspace(-1, 1, model.ansatz.num_trainable),
            model.scaling,
            model.feature_names,
        )
        a = forward(model, [0.5, 1.5, 2.5])
        b = forward(model, [0.5, 1.5, 2.5])
        assert a.score == b.score
        assert np.array_equal(a.per_qubit_z, b.per_qubit_z)

    def test_wrong_feature_count(self):
        model = build_qnn("ra", "ln", 1, identity_scaling(3), names(3))
        with pytest.raises(ValueError):
            forward(model, [0.1, 0.2])


class TestBatchConsistency:
    @pytest.mark.parametrize("kind,entangle", [("ra", "fl"), ("ep_fs", "sca"), ("ptd", "pw"), ("es", "pw")])
    def test_scores_match_forward(self, kind, entangle):
        rng = np.random.default_rng(5)
        model = build_qnn(kind, entangle, 2, identity_scaling(4), names(4), rng_seed=3)
        theta = rng.uniform(-math.pi, math.pi, model.ansatz.num_trainable)
        rows = rng.uniform(0, math.pi, size=(17, 4))
        batched = scores(model, rows, theta)
        single = np.array([forward(model, row, theta).score for row in rows])
        np.testing.assert_allclose(batched, single, atol=1e-12)


class TestLoss:
    def test_perfect_scores_zero_loss(self):
        model = ry_encoding_model(2)
        ds = Dataset(names(2), np.array([[0.0, 0.0]]), np.array([VALID]))
        assert loss(model, ds, []) == pytest.approx(0.0, abs=1e-12)

    def test_single_sample_midpoint(self):
        model = ry_encoding_model(2)
        ds = Dataset(
            names(2), np.array([[math.pi / 2, math.pi / 2]]), np.array([VALID])
        )
        assert loss(model, ds, []) == pytest.approx(1.0, abs=1e-12)

    def test_two_sample_arithmetic(self):
        # scores (0.5, -0.5) against targets (+1, +1): (0.25 + 2.25) / 2
        model = ry_encoding_model(2)
        ds = Dataset(
            names(2),
            np.array(
                [[math.pi / 3, math.pi / 3], [2 * math.pi / 3, 2 * math.pi / 3]]
            ),
            np.array([VALID, VALID]),
        )
        assert loss(model, ds, []) == pytest.approx(1.25, abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(8)
        model = build_qnn("ra", "ln", 2, identity_scaling(3), names(3))
        ds = Dataset(
            names(3),
            rng.uniform(0, math.pi, size=(20, 3)),
            np.where(rng.uniform(size=20) < 0.5, VALID, INVALID),
        )
        for _ in range(20):
            theta = rng.uniform(-math.pi, math.pi, model.ansatz.num_trainable)
            value = loss(model, ds, theta)
            assert 0.0 <= value <= 4.0

    def test_empty_dataset_rejected(self):
        model = ry_encoding_model(2)
        ds = Dataset(names(2), np.zeros((0, 2)), np.zeros(0, dtype=int))
        with pytest.raises(ValueError):
            loss(model, ds, [])
        with pytest.raises(ValueError):
            accuracy(model, ds)


class TestAccuracy:
    def staged_dataset(self, raw_and_labels):
        rows = np.array([r for r, _ in raw_and_labels])
        labels = np.array([l for _, l in raw_and_labels])
        return Dataset(names(2), rows, labels)

    def test_all_correct(self):
        model = ry_encoding_model(2)
        ds = self.staged_dataset(
            [([0.0, 0.0], VALID), ([math.pi, math.pi], INVALID)]
        )
        assert accuracy(model, ds) == 1.0

    def test_all_wrong(self):
        model = ry_encoding_model(2)
        ds = self.staged_dataset(
            [([0.0, 0.0], INVALID), ([math.pi, math.pi], VALID)]
        )
        assert accuracy(model, ds) == 0.0

    def test_three_of_four(self):
        model = ry_encoding_model(2)
        ds = self.staged_dataset(
            [
                ([0.0, 0.0], VALID),
                ([0.0, 0.0], VALID),
                ([math.pi, math.pi], VALID),
                ([math.pi, math.pi], INVALID),
            ]
        )
        assert accuracy(model, ds) == 0.75

    def test_confusion_counts(self):
        model = ry_encoding_model(2)
        ds = self.staged_dataset(
            [
                ([0.0, 0.0], VALID),
                ([math.pi, math.pi], VALID),
                ([0.0, 0.0], INVALID),
                ([math.pi, math.pi], INVALID),
            ]
        )
        counts = confusion_counts(model, ds)
        assert counts == {
            "true_valid_pred_valid": 1,
            "true_valid_pred_invalid": 1,
            "true_invalid_pred_valid": 1,
            "true_invalid_pred_invalid": 1,
        }


class TestDiagonalAnsatzDegeneracy:
    def test_diagonal_gates_cannot_move_expectations(self):
        # An ansatz made only of RZ rotations and diagonal entanglers leaves
        # every <Z> exactly where the feature map put it; the excitation
        # preserving family owes its expressivity to the RXX/RYY mixers.
        rng = np.random.default_rng(4)
        fmap = build_zz_feature_map(3)
        encoded = rng.uniform(0, math.pi, 3)
        base = apply_circuit(zero_state(3), bind(fmap, encoded, []))
        base_z = [expectation_z(base, q) for q in range(3)]

        diag_ansatz = CircuitTemplate(
            3,
            (
                TemplateGate("RZ", (0,), theta_slot=0),
                TemplateGate("RZ", (1,), theta_slot=1),
                TemplateGate("RZ", (2,), theta_slot=2),
                TemplateGate("RZZ", (0, 1), theta_slot=3),
                TemplateGate("CPhase", (1, 2), theta_slot=4),
                TemplateGate("CZ", (0, 2)),
            ),
            num_trainable=5,
            num_feature_slots=0,
        )
        theta = rng.uniform(-math.pi, math.pi, 5)
        state = apply_circuit(zero_state(3), bind(fmap, encoded, []))
        apply_circuit(state, bind(diag_ansatz, [], theta))
        after_z = [expectation_z(state, q) for q in range(3)]
        np.testing.assert_allclose(after_z, base_z, atol=1e-12)


class TestPersistence:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(10)
        skeleton = build_qnn("ep_is", "cl", 3, identity_scaling(4), names(4), rng_seed=11)
        model = build_qnn(
            "ep_is", "cl", 3, identity_scaling(4), names(4), rng_seed=11,
            theta=rng.uniform(-math.pi, math.pi, skeleton.ansatz.num_trainable),
        )
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        assert np.array_equal(back.theta, model.theta)
        assert back.feature_names == model.feature_names
        assert np.array_equal(back.scaling.minima, model.scaling.minima)
        x = rng.uniform(0, math.pi, 4)
        assert forward(back, x).score == forward(model, x).score

    def test_ptd_round_trip_reproduces_sampled_gates(self, tmp_path):
        model = build_qnn("ptd", "fl", 2, identity_scaling(3), names(3), rng_seed=21)
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        assert [g.kind for g in back.ansatz.gates] == [
            g.kind for g in model.ansatz.gates
        ]
        assert back.entanglement == "fl"  # label kept, layout collapsed to pw

    def test_hand_built_not_persistable(self):
        with pytest.raises(ValueError):
            model_to_dict(ry_encoding_model(2))


class TestModelValidation:
    def test_theta_length_checked(self):
        with pytest.raises(ValueError):
            build_qnn("ra", "ln", 1, identity_scaling(3), names(3), theta=np.zeros(5))

    def test_scaling_length_checked(self):
        fmap = build_zz_feature_map(3)
        ansatz = CircuitTemplate(3, (), 0, 0)
        with pytest.raises(ValueError):
            QnnModel(fmap, ansatz, np.zeros(0), identity_scaling(2), names(3))
