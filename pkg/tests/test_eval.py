import math

import numpy as np
import pytest

from dataclasses import replace

from gbpl import evaluation as ev
from gbpl.surrogate import FullFeedbackDataset


class TestOracleWelfare:
    def test_single_row(self):
        data = FullFeedbackDataset(np.zeros((1, 1)), np.array([[3.0, 1.0]]))
        assert ev.oracle_welfare(data) == 3.0

    def test_constant_outcomes(self):
        data = FullFeedbackDataset(np.zeros((5, 1)), np.full((5, 3), 2.5))
        assert ev.oracle_welfare(data) == 2.5

    def test_dominates_every_policy(self):
        rng = np.random.default_rng(0)
        data = FullFeedbackDataset(rng.standard_normal((50, 2)), rng.standard_normal((50, 4)))
        oracle = ev.oracle_welfare(data)
        for _ in range(50):
            g = rng.gamma(1.0, 1.0, size=(50, 4))
            delta = g / g.sum(axis=1, keepdims=True)
            assert ev.test_welfare(data, delta, "randomized") <= oracle + 1e-12
            assert ev.test_welfare(data, delta, "deterministic") <= oracle + 1e-12


class TestTestWelfare:
    def test_always_treat(self):
        rng = np.random.default_rng(1)
        data = FullFeedbackDataset(rng.standard_normal((30, 1)), rng.standard_normal((30, 2)))
        ones = np.column_stack([np.ones(30), np.zeros(30)])
        assert ev.test_welfare(data, ones, "deterministic") == pytest.approx(
            data.y[:, 0].mean(), abs=1e-12
        )

    def test_oracle_onehot_recovers_oracle(self):
        rng = np.random.default_rng(2)
        data = FullFeedbackDataset(rng.standard_normal((30, 1)), rng.standard_normal((30, 3)))
        onehot = np.zeros((30, 3))
        onehot[np.arange(30), data.y.argmax(axis=1)] = 1.0
        assert ev.test_welfare(data, onehot, "deterministic") == pytest.approx(
            ev.oracle_welfare(data), abs=1e-12
        )

    def test_uniform_randomized(self):
        rng = np.random.default_rng(3)
        data = FullFeedbackDataset(rng.standard_normal((40, 1)), rng.standard_normal((40, 3)))
        uniform = np.full((40, 3), 1.0 / 3.0)
        assert ev.test_welfare(data, uniform, "randomized") == pytest.approx(
            data.y.mean(axis=1).mean(), abs=1e-12
        )

    def test_deterministic_ties_to_lowest_column(self):
        data = FullFeedbackDataset(np.zeros((2, 1)), np.array([[1.0, 0.0], [0.0, 1.0]]))
        half = np.full((2, 2), 0.5)
        assert ev.test_welfare(data, half, "deterministic") == 0.5  # picks column 0 twice


class TestSelectZeta:
    def test_single_candidate(self):
        rng = np.random.default_rng(4)
        val = FullFeedbackDataset(rng.standard_normal((10, 1)), rng.standard_normal((10, 2)))
        delta = np.column_stack([np.ones(10), np.zeros(10)])
        assert ev.select_zeta_by_validation([(0.5, delta)], val) == 0.5

    def test_ties_take_smallest(self):
        rng = np.random.default_rng(5)
        val = FullFeedbackDataset(rng.standard_normal((10, 1)), rng.standard_normal((10, 2)))
        delta = np.column_stack([np.ones(10), np.zeros(10)])
        cands = [(1.0, delta), (0.01, delta.copy()), (0.1, delta.copy())]
        assert ev.select_zeta_by_validation(cands, val) == 0.01

    def test_dominating_policy_wins(self):
        data = FullFeedbackDataset(np.zeros((4, 1)), np.array([[1.0, 0.0]] * 4))
        always = np.column_stack([np.ones(4), np.zeros(4)])
        never = np.column_stack([np.zeros(4), np.ones(4)])
        assert ev.select_zeta_by_validation([(1.0, never), (0.1, always)], data) == 0.1


class TestPacBayes:
    def test_hand_example_trivial_delta(self):
        inputs = ev.PacBayesInputs(
            empirical_risk_mean=0.0, kl=0.0, n=100, delta=1.0, v=1.0, b=1.0, lam=0.1
        )
        assert ev.pac_bayes_bound(inputs) == pytest.approx(0.05, abs=1e-12)

    def test_hand_example_full(self):
        inputs = ev.PacBayesInputs(
            empirical_risk_mean=0.5, kl=math.log(2.0), n=1000, delta=0.05, v=2.0, b=1.0, lam=0.01
        )
        expected = 0.5 + (math.log(2.0) + math.log(1.0 / 0.05)) / 10.0 + 0.01
        assert ev.pac_bayes_bound(inputs) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.87889, abs=5e-6)

    def test_two_sided_hand_example(self):
        inputs = ev.PacBayesInputs(
            empirical_risk_mean=0.0, kl=0.0, n=100, delta=0.5, v=1.0, b=1.0, lam=0.1
        )
        assert ev.pac_bayes_two_sided(inputs) == pytest.approx(
            math.log(4.0) / 10.0 + 0.05, abs=1e-12
        )

    def test_two_sided_at_doubled_delta_matches_one_sided_gap(self):
        base = ev.PacBayesInputs(
            empirical_risk_mean=0.0, kl=0.3, n=250, delta=0.04, v=1.5, b=2.0, lam=0.2
        )
        doubled = replace(base, delta=2.0 * base.delta)
        assert ev.pac_bayes_two_sided(doubled) == pytest.approx(
            ev.pac_bayes_bound(base), abs=1e-12
        )

    def test_two_sided_dominates_one_sided(self):
        inputs = ev.PacBayesInputs(
            empirical_risk_mean=0.0, kl=1.0, n=50, delta=0.1, v=1.0, b=1.0, lam=0.5
        )
        assert ev.pac_bayes_two_sided(inputs) >= ev.pac_bayes_bound(inputs)

    def test_lambda_star_dominates_random_feasible(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            inputs = ev.PacBayesInputs(
                empirical_risk_mean=float(rng.uniform(0, 1)),
                kl=float(rng.uniform(0, 5)),
                n=int(rng.integers(10, 10_000)),
                delta=float(rng.uniform(0.01, 0.5)),
                v=float(rng.uniform(0.1, 4.0)),
                b=float(rng.uniform(0.2, 3.0)),
                lam=0.1,
            )
            star = ev.pac_bayes_lambda_star(inputs)
            at_star = ev.pac_bayes_bound(replace(inputs, lam=star))
            for lam in rng.uniform(1e-9, (1 - 1e-9) / inputs.b, size=20):
                assert at_star <= ev.pac_bayes_bound(replace(inputs, lam=float(lam))) + 1e-12

    def test_monotonicity(self):
        base = ev.PacBayesInputs(
            empirical_risk_mean=0.2, kl=1.0, n=100, delta=0.1, v=1.0, b=1.0, lam=0.3
        )
        for kl2 in (2.0, 4.0, 8.0):
            assert ev.pac_bayes_bound(replace(base, kl=kl2)) > ev.pac_bayes_bound(base)
        for d2 in (0.05, 0.01):
            assert ev.pac_bayes_bound(replace(base, delta=d2)) > ev.pac_bayes_bound(base)
        for n2 in (200, 1000):
            assert ev.pac_bayes_bound(replace(base, n=n2)) < ev.pac_bayes_bound(base)

    def test_invalid_lambda_rejected(self):
        with pytest.raises(ValueError):
            ev.PacBayesInputs(
                empirical_risk_mean=0.0, kl=0.0, n=10, delta=0.1, v=1.0, b=2.0, lam=0.6
            )


class TestAggregate:
    def _trial(self, method, w, r, seed=0):
        return ev.TrialResult(method_id=method, welfare=w, regret=r, seed=seed)

    def test_identical_trials(self):
        rows = [self._trial("m", 0.7, 0.1)] * 5
        agg = ev.aggregate(rows)
        assert agg.welfare_var == 0.0 and agg.welfare_se == 0.0
        assert agg.welfare_mean == pytest.approx(0.7)

    def test_two_point_sample(self):
        agg = ev.aggregate([self._trial("m", 0.0, 0.0), self._trial("m", 1.0, 1.0)])
        assert agg.welfare_mean == 0.5
        assert agg.welfare_var == pytest.approx(0.5, abs=1e-15)
        assert agg.welfare_se == pytest.approx(0.5, abs=1e-15)

    def test_streaming_oracle(self):
        # Welford's online update as an independent recomputation
        rng = np.random.default_rng(7)
        vals = rng.standard_normal(1000)
        regs = rng.standard_normal(1000)
        rows = [self._trial("m", w, r) for w, r in zip(vals, regs)]
        agg = ev.aggregate(rows)
        mean, m2, count = 0.0, 0.0, 0
        for v in vals:
            count += 1
            d = v - mean
            mean += d / count
            m2 += d * (v - mean)
        assert abs(agg.welfare_mean - mean) < 1e-10
        assert abs(agg.welfare_var - m2 / (count - 1)) < 1e-10
        assert abs(agg.welfare_se - math.sqrt(m2 / (count - 1) / count)) < 1e-10

    def test_requires_two_trials(self):
        with pytest.raises(ValueError):
            ev.aggregate([self._trial("m", 0.5, 0.1)])

    def test_rejects_mixed_methods(self):
        with pytest.raises(ValueError):
            ev.aggregate([self._trial("a", 0.5, 0.1), self._trial("b", 0.5, 0.1)])
