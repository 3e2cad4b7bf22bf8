"""Objective terms against hand-worked values and an independent oracle."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dcs import (
    FunctionSet,
    ObjectiveEvaluator,
    ObjectiveWeights,
    PreconditionError,
    TriangularMembership,
    ValidationError,
    default_function_set,
    evaluate,
    objective_value,
    per_class_accuracy,
    predict,
    z_cobias,
    z_err,
    z_pmi,
)
from dcs.objective import EvalReport, combine_terms
from conftest import make_dataset

EXACT = 1e-12


class TestPredict:
    def test_all_k0_is_raw_argmax(self, four_row_dataset):
        fs = default_function_set()
        preds = predict(four_row_dataset, fs, (1, 1))
        raw = np.argmax(four_row_dataset.probabilities, axis=1) + 1
        assert np.array_equal(preds, raw)

    def test_tie_breaks_to_lowest_index(self):
        ds = make_dataset([[0.4, 0.4, 0.1], [0.2, 0.3, 0.3]], [1, 2])
        fs = default_function_set()
        preds = predict(ds, fs, (1, 1, 1))
        assert preds[0] == 1
        assert preds[1] == 2

    def test_all_zero_row_predicts_class_1(self):
        # every class's correction maps its probability to 0
        fs = FunctionSet(
            memberships=(
                TriangularMembership(0.0, 1.0, 1.0),
                TriangularMembership(0.0, 0.0, 0.1),
            ),
            num_weights=1,
        )
        ds = make_dataset([[0.9, 0.8]], [2])
        preds = predict(ds, fs, (2, 2))
        assert preds[0] == 1

    def test_labels_are_one_based(self, four_row_dataset):
        fs = default_function_set()
        preds = predict(four_row_dataset, fs, (1, 1))
        assert set(np.unique(preds)) <= {1, 2}


class TestErr:
    def test_one_of_four(self):
        assert z_err(np.array([1, 1, 2, 2]), np.array([1, 2, 2, 2])) == 0.25

    def test_perfect(self):
        assert z_err(np.array([1, 2]), np.array([1, 2])) == 0.0

    def test_all_wrong(self):
        assert z_err(np.array([2, 1]), np.array([1, 2])) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            z_err(np.array([1]), np.array([1, 2]))


class TestPerClassAccuracy:
    def test_direct_counts(self):
        acc = per_class_accuracy(
            np.array([1, 1, 2, 2]), np.array([1, 2, 2, 2]), 2
        )
        assert acc[0] == 1.0
        assert abs(acc[1] - 2 / 3) <= EXACT

    def test_absent_class_is_nan(self):
        acc = per_class_accuracy(np.array([1, 2]), np.array([1, 2]), 3)
        assert math.isnan(acc[2])

    def test_single_correct_instance(self):
        acc = per_class_accuracy(np.array([2]), np.array([2]), 2)
        assert acc[1] == 1.0
        assert math.isnan(acc[0])


class TestCobias:
    def test_three_class_mean_pair_gap(self):
        # accs (1.0, 0.5, 0.5): pairs |1-.5| + |1-.5| + |.5-.5| over 3
        preds = np.array([1, 1, 2, 3, 2, 3])
        labels = np.array([1, 1, 2, 2, 3, 3])
        assert abs(z_cobias(preds, labels, 3) - 1 / 3) <= EXACT

    def test_equal_accuracies_give_zero(self):
        preds = np.array([1, 2])
        labels = np.array([1, 2])
        assert z_cobias(preds, labels, 2) == 0.0

    def test_two_class_gap(self):
        # A_1 = 0.8 (4 of 5), A_2 = 0.6 (3 of 5)
        preds = np.array([1, 1, 1, 1, 2, 2, 2, 2, 1, 1])
        labels = np.array([1, 1, 1, 1, 1, 2, 2, 2, 2, 2])
        assert abs(z_cobias(preds, labels, 2) - 0.2) <= EXACT

    def test_absent_classes_shrink_divisor(self):
        # class 3 absent: only the (1,2) pair counts
        preds = np.array([1, 2, 2, 2])
        labels = np.array([1, 1, 2, 2])
        assert abs(z_cobias(preds, labels, 3) - 0.5) <= EXACT

    def test_fewer_than_two_present_classes_rejected(self):
        with pytest.raises(PreconditionError):
            z_cobias(np.array([1, 1]), np.array([1, 1]), 2)

    @given(st.permutations([1, 2, 3]))
    def test_relabel_invariance(self, perm):
        preds = np.array([1, 1, 2, 3, 3, 2])
        labels = np.array([1, 2, 2, 3, 3, 1])
        mapping = {i + 1: perm[i] for i in range(3)}
        p2 = np.array([mapping[v] for v in preds])
        l2 = np.array([mapping[v] for v in labels])
        assert abs(
            z_cobias(preds, labels, 3) - z_cobias(p2, l2, 3)
        ) <= EXACT


class TestPmi:
    def test_hand_worked_value(self):
        got = z_pmi(np.array([1, 1, 2, 2]), np.array([1, 2, 2, 2]), 2)
        expected = -(math.log(2) + math.log(4 / 3))
        assert abs(got - expected) <= EXACT
        assert abs(got - (-0.98083)) < 1e-5

    def test_perfect_balanced_two_class(self):
        got = z_pmi(np.array([1, 2, 1, 2]), np.array([1, 2, 1, 2]), 2)
        assert abs(got - (-2 * math.log(2))) <= EXACT
        assert abs(got - (-1.38629)) < 1e-5

    def test_never_predicted_class_hits_floor(self):
        # class 2 true-present but never predicted: its term is ln(1e-12)
        got = z_pmi(np.array([1, 1, 1, 1]), np.array([1, 1, 2, 2]), 2)
        class1 = math.log((2 / 4) / ((4 / 4) * (2 / 4)))
        assert abs(got - (-(class1 + math.log(1e-12)))) <= 1e-9

    def test_absent_class_skipped(self):
        with_absent = z_pmi(np.array([1, 2]), np.array([1, 2]), 3)
        without = z_pmi(np.array([1, 2]), np.array([1, 2]), 2)
        assert with_absent == without


def steering_dataset():
    """Two-class set where the PMI floor decides the optimum.

    Five confident class-1 rows, three narrow class-1 rows, and two narrow
    class-2 rows whose raw argmax is class 1. Error alone tolerates never
    predicting class 2; the ln(1e-12) floor does not.
    """
    rows = [[0.9, 0.2]] * 5 + [[0.7, 0.65]] * 3 + [[0.7, 0.6]] * 2
    labels = [1] * 8 + [2] * 2
    return make_dataset(rows, labels)


def steering_catalog():
    return FunctionSet(
        memberships=(TriangularMembership(0.0, 1.0, 1.0),),
        num_weights=5,
    )


def brute_force_best(ds, fs, weights):
    """Independent oracle: plain-python enumeration of all selections."""
    best = None
    for xi in itertools.product(range(1, fs.size + 1), repeat=ds.num_classes):
        z = objective_value(ds, fs, xi, weights)
        if best is None or z < best[1]:
            best = (xi, z)
    return best


class TestPmiSteering:
    def test_floor_steers_away_from_never_predicting(self):
        ds = steering_dataset()
        fs = steering_catalog()
        err_only = ObjectiveWeights.from_mode("err")
        err_pmi = ObjectiveWeights.from_mode("err+pmi", tau=1.0)

        xi_err, z_err_best = brute_force_best(ds, fs, err_only)
        xi_pmi, z_pmi_best = brute_force_best(ds, fs, err_pmi)

        preds_err = predict(ds, fs, xi_err)
        preds_pmi = predict(ds, fs, xi_pmi)
        # error alone never predicts class 2 (cost 0.2 is minimal);
        # adding the PMI term makes class 2 predictions worth having
        assert 2 not in preds_err
        assert 2 in preds_pmi

    def test_pmi_optimum_still_has_low_error(self):
        ds = steering_dataset()
        fs = steering_catalog()
        err_pmi = ObjectiveWeights.from_mode("err+pmi", tau=1.0)
        xi, _ = brute_force_best(ds, fs, err_pmi)
        preds = predict(ds, fs, xi)
        assert z_err(preds, ds.labels) <= 0.3


class TestCombination:
    def test_weighted_sum(self):
        w = ObjectiveWeights(beta=1.0, tau=0.0)
        z = combine_terms(0.25, 1 / 3, -99.0, w)
        assert abs(z - (0.25 + 1 / 3)) <= EXACT

    def test_err_only_ablation(self):
        w = ObjectiveWeights.from_mode("err")
        z = combine_terms(0.25, 1 / 3, -5.0, w)
        assert z == 0.25

    def test_err_pmi_ablation(self):
        w = ObjectiveWeights.from_mode("err+pmi", tau=0.5)
        z = combine_terms(0.25, 1 / 3, -2.0, w)
        assert z == 0.25 + 0.5 * (-2.0)

    def test_full_mode_objective_on_dataset(self, four_row_dataset):
        fs = default_function_set()
        w = ObjectiveWeights(beta=1.0, tau=0.0)
        z = objective_value(four_row_dataset, fs, (1, 1), w)
        assert abs(z - (0.25 + 1 / 3)) < EXACT
        assert abs(z - 0.58333) < 1e-5

    def test_all_k0_equals_uncorrected_objective(self, four_row_dataset):
        fs = default_function_set()
        w = ObjectiveWeights(beta=1.0, tau=1.0)
        raw_preds = np.argmax(four_row_dataset.probabilities, axis=1) + 1
        labels = four_row_dataset.labels
        manual = (
            z_err(raw_preds, labels)
            + z_cobias(raw_preds, labels, 2)
            + z_pmi(raw_preds, labels, 2)
        )
        assert objective_value(four_row_dataset, fs, (1, 1), w) == manual

    def test_requires_one_enabled_term(self):
        with pytest.raises(ValidationError):
            ObjectiveWeights(
                enable_err=False, enable_cobias=False, enable_pmi=False
            )

    def test_rejects_negative_weights(self):
        with pytest.raises(ValidationError):
            ObjectiveWeights(beta=-0.1)
        with pytest.raises(ValidationError):
            ObjectiveWeights(tau=-1.0)

    def test_from_mode_wiring(self):
        full = ObjectiveWeights.from_mode("full", beta=2.0, tau=0.5)
        assert (full.beta, full.tau) == (2.0, 0.5)
        assert full.enable_err and full.enable_cobias and full.enable_pmi
        err = ObjectiveWeights.from_mode("err")
        assert err.beta == 0.0 and err.tau == 0.0
        assert not err.enable_cobias and not err.enable_pmi
        ep = ObjectiveWeights.from_mode("err+pmi", tau=0.7)
        assert ep.beta == 0.0 and ep.tau == 0.7
        assert not ep.enable_cobias and ep.enable_pmi
        with pytest.raises(ValidationError):
            ObjectiveWeights.from_mode("nope")


class TestEvaluatorEquivalence:
    def test_bit_identical_to_plain_path(self, four_row_dataset):
        fs = default_function_set()
        w = ObjectiveWeights(beta=1.0, tau=1.0)
        ev = ObjectiveEvaluator(four_row_dataset, fs, w)
        rng = np.random.default_rng(0)
        for _ in range(50):
            xi = tuple(rng.integers(1, fs.size + 1, size=2))
            assert ev.value(xi) == objective_value(four_row_dataset, fs, xi, w)

    def test_deterministic_repeat(self, four_row_dataset):
        fs = default_function_set()
        w = ObjectiveWeights(beta=1.0, tau=1.0)
        xi = (13, 25)
        a = objective_value(four_row_dataset, fs, xi, w)
        b = objective_value(four_row_dataset, fs, xi, w)
        assert a == b


class TestEvaluate:
    def test_report_fields(self, four_row_dataset):
        fs = default_function_set()
        w = ObjectiveWeights(beta=1.0, tau=1.0)
        report = evaluate(four_row_dataset, fs, (1, 1), w)
        assert report.overall_accuracy + report.err == 1.0
        assert report.class_counts == (1, 3)
        assert report.cobias is not None and 0.0 <= report.cobias <= 1.0
        assert report.correction_kinds == ("membership", "membership")
        assert report.z_value == combine_terms(
            report.err, report.cobias, report.pmi_sum, w
        )

    def test_report_round_trip(self, four_row_dataset):
        fs = default_function_set()
        w = ObjectiveWeights(beta=0.5, tau=2.0)
        report = evaluate(four_row_dataset, fs, (13, 25), w)
        again = EvalReport.from_dict(report.to_dict())
        assert again == report

    def test_disabled_cobias_still_reported(self, four_row_dataset):
        fs = default_function_set()
        w = ObjectiveWeights.from_mode("err")
        report = evaluate(four_row_dataset, fs, (1, 1), w)
        assert report.cobias is not None
        assert report.z_value == report.err
