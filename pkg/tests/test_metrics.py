"""Evaluation metrics and effect size against hand computations."""

import numpy as np
import pytest

from deepfeat.metrics import cohens_d, confusion_matrix, report_from_predictions


class TestReport:
    def test_all_correct(self):
        y = np.array([0, 1, 2, 0, 1, 2])
        r = report_from_predictions(y, y, 3)
        assert r.accuracy == 1.0
        assert r.macro_f1 == 1.0
        assert np.trace(r.confusion) == 6

    def test_always_predict_one_class(self):
        actual = np.array([0] * 5 + [1] * 5)
        predicted = np.zeros(10, dtype=int)
        r = report_from_predictions(actual, predicted, 2)
        assert r.accuracy == 0.5
        # class A: P=0.5 R=1 F1=2/3; class B: 0 -> macro 1/3
        assert abs(r.macro_f1 - 1.0 / 3.0) < 1e-12
        assert r.per_class_f1[0] == pytest.approx(2.0 / 3.0)
        assert r.per_class_f1[1] == 0.0

    def test_accuracy_is_trace_over_total(self):
        rng = np.random.default_rng(0)
        actual = rng.integers(4, size=200)
        predicted = rng.integers(4, size=200)
        r = report_from_predictions(actual, predicted, 4)
        m = r.confusion
        assert r.accuracy == np.trace(m) / m.sum()

    def test_row_sums_are_support(self):
        actual = np.array([0, 0, 1, 2, 2, 2])
        predicted = np.array([0, 1, 1, 0, 2, 2])
        m = confusion_matrix(actual, predicted, 3)
        np.testing.assert_array_equal(m.sum(axis=1), [2, 1, 3])

    def test_empty_split_rejected(self):
        with pytest.raises(ValueError):
            report_from_predictions(np.array([]), np.array([]), 2)

    def test_macro_f1_equals_accuracy_on_balanced_diagonal(self):
        actual = np.repeat(np.arange(4), 10)
        r = report_from_predictions(actual, actual, 4)
        assert r.macro_f1 == r.accuracy == 1.0

    def test_absent_class_contributes_zero(self):
        # class 2 never appears and is never predicted
        actual = np.array([0, 0, 1, 1])
        predicted = np.array([0, 0, 1, 1])
        r = report_from_predictions(actual, predicted, 3)
        assert r.per_class_f1[2] == 0.0
        assert abs(r.macro_f1 - 2.0 / 3.0) < 1e-12


class TestCohensD:
    def test_identical_series_zero(self):
        assert cohens_d([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_hand_fixture(self):
        assert abs(cohens_d([2.0, 4.0], [1.0, 3.0]) - 1.0 / np.sqrt(2.0)) < 1e-12

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError):
            cohens_d([1.0, 1.0], [0.0, 0.0])

    def test_needs_two_runs(self):
        with pytest.raises(ValueError):
            cohens_d([1.0], [0.0, 1.0])

    def test_antisymmetric(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=6), rng.normal(1.0, 1.0, size=8)
        assert cohens_d(a, b) == pytest.approx(-cohens_d(b, a), rel=1e-12)
