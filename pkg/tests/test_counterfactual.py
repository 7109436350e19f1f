import numpy as np
import pytest

from conftest import analytic_grad, finite_diff_grad, max_rel_error, total_loss
from gbpl import counterfactual as cf
from gbpl import nnet
from gbpl.losses import MaskedRegressionLoss
from gbpl.posterior import TrainConfig
from gbpl.surrogate import FullFeedbackDataset, verify_equivalence_binary


def _simplex_rows(rng, n, k):
    g = rng.gamma(1.0, 1.0, size=(n, k))
    return g / g.sum(axis=1, keepdims=True)


class TestActionCoding:
    def test_binary_roundtrip(self):
        a = np.array([1, 2, 2, 1])
        b = cf.to_binary_labels(a)
        assert np.array_equal(b, [1, 0, 0, 1])
        assert np.array_equal(cf.from_binary_labels(b), a)

    def test_action_columns(self):
        logged = cf.LoggedDataset(np.zeros((3, 1)), np.array([1, 0, 1]), np.zeros(3), k=2)
        assert np.array_equal(logged.action_columns(), [0, 1, 0])
        logged_k = cf.LoggedDataset(np.zeros((3, 1)), np.array([1, 3, 2]), np.zeros(3), k=3)
        assert np.array_equal(logged_k.action_columns(), [0, 2, 1])

    def test_label_validation(self):
        with pytest.raises(ValueError):
            cf.LoggedDataset(np.zeros((2, 1)), np.array([1, 2]), np.zeros(2), k=2)
        with pytest.raises(ValueError):
            cf.LoggedDataset(np.zeros((2, 1)), np.array([0, 1]), np.zeros(2), k=3)


class TestIpwPseudoOutcomes:
    def test_treated_row(self):
        logged = cf.LoggedDataset(np.zeros((1, 1)), np.array([1]), np.array([2.0]), k=2)
        e = np.array([[0.5, 0.5]])
        np.testing.assert_allclose(cf.ipw_pseudo_outcomes(logged, e), [[4.0, 0.0]])

    def test_control_row(self):
        logged = cf.LoggedDataset(np.zeros((1, 1)), np.array([0]), np.array([-1.0]), k=2)
        e = np.array([[0.75, 0.25]])
        np.testing.assert_allclose(cf.ipw_pseudo_outcomes(logged, e), [[0.0, -4.0]])

    def test_below_floor_rejected(self):
        logged = cf.LoggedDataset(np.zeros((1, 1)), np.array([1]), np.array([1.0]), k=2)
        with pytest.raises(ValueError):
            cf.ipw_pseudo_outcomes(logged, np.array([[1e-9, 1.0 - 1e-9]]))

    def test_uniform_logging_column_means(self):
        # with uniform 1/K logging and unit outcomes, each column mean is a
        # binomial proportion times K, so it concentrates at 1
        rng = np.random.default_rng(0)
        n, k = 100_000, 4
        a = rng.integers(1, k + 1, size=n)
        logged = cf.LoggedDataset(np.zeros((n, 1)), a, np.ones(n), k=k)
        e = np.full((n, k), 1.0 / k)
        tilde = cf.ipw_pseudo_outcomes(logged, e)
        for col in range(k):
            se = tilde[:, col].std(ddof=1) / np.sqrt(n)
            assert abs(tilde[:, col].mean() - 1.0) < 3.0 * se


class TestDrPseudoOutcomes:
    def test_exact_nuisances_noiseless(self):
        rng = np.random.default_rng(1)
        n, k = 50, 3
        x = rng.standard_normal((n, 2))
        gamma = rng.standard_normal((n, k))
        a = rng.integers(1, k + 1, size=n)
        cols = a - 1
        y_obs = gamma[np.arange(n), cols]
        e = _simplex_rows(rng, n, k) * 0.8 + 0.2 / k
        e /= e.sum(axis=1, keepdims=True)
        logged = cf.LoggedDataset(x, a, y_obs, k=k)
        np.testing.assert_allclose(cf.dr_pseudo_outcomes(logged, e, gamma), gamma, atol=1e-12)

    def test_hand_example(self):
        logged = cf.LoggedDataset(np.zeros((1, 1)), np.array([1]), np.array([3.0]), k=2)
        e = np.array([[0.5, 0.5]])
        gamma = np.array([[1.0, 0.0]])
        np.testing.assert_allclose(cf.dr_pseudo_outcomes(logged, e, gamma), [[5.0, 0.0]])


def _conditional_mc(rng, n, e_row, gamma_row, e_hat_row, gamma_hat_row, kind):
    """Simulate logged draws at one fixed covariate point and return the
    column means of the pseudo-outcome matrix with their standard errors."""
    k = len(e_row)
    u = rng.random(n)
    cum = np.cumsum(e_row)
    cols = (u[:, None] > cum[None, :]).sum(axis=1)
    y = gamma_row[cols] + rng.standard_normal(n)
    a = cols + 1 if k > 2 else np.where(cols == 0, 1, 0)
    logged = cf.LoggedDataset(np.zeros((n, 1)), a, y, k=k)
    e_hat = np.tile(e_hat_row, (n, 1))
    if kind == "ipw":
        tilde = cf.ipw_pseudo_outcomes(logged, e_hat)
    else:
        tilde = cf.dr_pseudo_outcomes(logged, e_hat, np.tile(gamma_hat_row, (n, 1)))
    return tilde.mean(axis=0), tilde.std(axis=0, ddof=1) / np.sqrt(n)


class TestConditionalMeanTargets:
    """The pseudo-outcome conditional mean must match the true outcome
    regression whenever the propensity (IPW) or either nuisance (DR) is
    correct, checked by Monte Carlo at fixed covariate points."""

    def setup_method(self):
        self.rng = np.random.default_rng(2)
        self.k = 3
        self.e = np.array([0.5, 0.3, 0.2])
        self.gamma = np.array([1.0, -0.5, 2.0])
        self.wrong_e = np.array([0.2, 0.3, 0.5])
        self.wrong_gamma = self.gamma + np.array([2.0, -3.0, 1.0])

    def _assert_matches(self, kind, e_hat, gamma_hat, n=60_000):
        means, ses = _conditional_mc(self.rng, n, self.e, self.gamma, e_hat, gamma_hat, kind)
        for a in range(self.k):
            assert abs(means[a] - self.gamma[a]) < 3.0 * ses[a]

    def test_ipw_true_propensity(self):
        self._assert_matches("ipw", self.e, None)

    def test_dr_true_propensity_wrong_regression(self):
        self._assert_matches("dr", self.e, self.wrong_gamma)

    def test_dr_wrong_propensity_true_regression(self):
        self._assert_matches("dr", self.wrong_e, self.gamma)


class TestPseudoDifference:
    def test_matches_column_difference(self):
        rng = np.random.default_rng(3)
        n = 200
        a = rng.choice([1, 0], size=n)
        y = rng.standard_normal(n)
        e1 = rng.uniform(0.2, 0.8, size=n)
        e = np.column_stack([e1, 1.0 - e1])
        gamma = rng.standard_normal((n, 2))
        logged = cf.LoggedDataset(rng.standard_normal((n, 2)), a, y, k=2)
        for kind, g in (("ipw", None), ("dr", gamma)):
            diff = cf.pseudo_difference_binary(logged, e, g, kind=kind)
            if kind == "ipw":
                mat = cf.ipw_pseudo_outcomes(logged, e)
            else:
                mat = cf.dr_pseudo_outcomes(logged, e, gamma)
            np.testing.assert_allclose(diff, mat[:, 0] - mat[:, 1], rtol=0, atol=1e-12)

    def test_hand_ipw_value(self):
        logged = cf.LoggedDataset(np.zeros((1, 1)), np.array([1]), np.array([2.0]), k=2)
        e = np.array([[0.5, 0.5]])
        assert cf.pseudo_difference_binary(logged, e, kind="ipw")[0] == 4.0

    def test_dr_exact_nuisances_noiseless(self):
        rng = np.random.default_rng(4)
        n = 30
        gamma = rng.standard_normal((n, 2))
        a = rng.choice([1, 0], size=n)
        cols = np.where(a == 1, 0, 1)
        y = gamma[np.arange(n), cols]
        e1 = rng.uniform(0.3, 0.7, size=n)
        e = np.column_stack([e1, 1.0 - e1])
        logged = cf.LoggedDataset(np.zeros((n, 1)), a, y, k=2)
        got = cf.pseudo_difference_binary(logged, e, gamma, kind="dr")
        np.testing.assert_allclose(got, gamma[:, 0] - gamma[:, 1], atol=1e-12)


class TestNuisanceSet:
    def test_bounds_enforced(self):
        ok = cf.NuisanceSet(np.array([[0.3, 0.7], [0.5, 0.5]]), epsilon_clip=0.1)
        assert ok.epsilon_clip == 0.1
        with pytest.raises(ValueError):
            cf.NuisanceSet(np.array([[0.01, 0.99]]), epsilon_clip=0.05)
        with pytest.raises(ValueError):
            cf.NuisanceSet(np.array([[0.3, 1.2]]), epsilon_clip=0.05)

    def test_optional_fields(self):
        rng = np.random.default_rng(0)
        gamma = rng.standard_normal((3, 2))
        ns = cf.NuisanceSet(np.full((3, 2), 0.5), gamma_hat=gamma,
                            fold_id=np.array([0, 1, 0]))
        assert np.array_equal(ns.gamma_hat, gamma)
        assert np.array_equal(ns.fold_id, [0, 1, 0])


class TestClipPropensities:
    def test_floor_holds_even_after_normalization(self):
        e = np.array([[0.98, 0.01, 0.01], [0.4, 0.35, 0.25]])
        out = cf.clip_propensities(e, 0.1)
        assert np.all(out >= 0.1 - 1e-12)
        np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(out[1], e[1], atol=1e-12)  # feasible rows unchanged

    def test_clip_at_one_over_k_forces_uniform(self):
        e = np.array([[0.9, 0.05, 0.05]])
        np.testing.assert_allclose(cf.clip_propensities(e, 1.0 / 3.0), 1.0 / 3.0)


class TestFitPropensity:
    def _uniform_logged(self, rng, n, k):
        x = rng.standard_normal((n, 5))
        cols = rng.integers(0, k, size=n)
        a = np.where(cols == 0, 1, 0) if k == 2 else cols + 1
        return cf.LoggedDataset(x, a, np.zeros(n), k=k)

    def test_uniform_logging_recovered(self):
        rng = np.random.default_rng(5)
        for k, model in ((2, "logistic"), (4, "softmax")):
            logged = self._uniform_logged(rng, 10_000, k)
            e = cf.fit_propensity(logged, model, clip=0.01)
            assert np.mean(np.abs(e - 1.0 / k)) < 0.05

    def test_separable_saturates_at_clip_without_overflow(self):
        rng = np.random.default_rng(6)
        n = 500
        x = rng.standard_normal((n, 1))
        a = (x[:, 0] > 0).astype(int)
        logged = cf.LoggedDataset(x, a, np.zeros(n), k=2)
        clip = 0.05
        e = cf.fit_propensity(logged, "logistic", clip=clip)
        assert np.all(np.isfinite(e))
        assert e.min() == pytest.approx(clip, abs=1e-9)
        assert e.max() == pytest.approx(1.0 - clip, abs=1e-9)

    def test_clip_floor_contract(self):
        rng = np.random.default_rng(7)
        logged = self._uniform_logged(rng, 400, 3)
        e = cf.fit_propensity(logged, "softmax", clip=0.1)
        assert e.min() >= 0.1 - 1e-12

    def test_unobserved_action_named_in_error(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((50, 2))
        logged = cf.LoggedDataset(x, np.full(50, 1), np.zeros(50), k=3)
        with pytest.raises(ValueError, match="action 2"):
            cf.fit_propensity(logged, "softmax")


class TestFitOutcomeRegression:
    def test_noiseless_linear_fit(self):
        rng = np.random.default_rng(9)
        n, d, k = 5000, 3, 2
        x = rng.standard_normal((n, d))
        betas = rng.standard_normal((d, k))
        gamma = x @ betas
        cols = rng.integers(0, k, size=n)
        a = np.where(cols == 0, 1, 0)
        y_obs = gamma[np.arange(n), cols]
        logged = cf.LoggedDataset(x, a, y_obs, k=k)
        arch = nnet.MlpArchitecture(d, (), k, nnet.HEAD_IDENTITY)
        cfg = TrainConfig(learning_rate=1e-2, batch_size=256, max_epochs=200, patience=30, seed=0)
        gamma_hat = cf.fit_outcome_regression(logged, arch, cfg)
        rmse = np.sqrt(np.mean((gamma_hat - gamma) ** 2, axis=0))
        assert np.all(rmse < 0.05)

    def test_cross_fitting_uses_out_of_fold_models(self):
        # outcomes are constant per fold, so out-of-fold predictions must
        # carry the other fold's constant
        rng = np.random.default_rng(10)
        n = 400
        x = rng.standard_normal((n, 2))
        fold_id = np.arange(n) % 2
        y_obs = fold_id.astype(float)  # fold 0 -> 0, fold 1 -> 1
        a = np.ones(n, dtype=int)
        logged = cf.LoggedDataset(x, a, y_obs, k=2)
        arch = nnet.MlpArchitecture(2, (), 2, nnet.HEAD_IDENTITY)
        cfg = TrainConfig(learning_rate=5e-2, batch_size=128, max_epochs=100, patience=100, seed=1)
        gamma_hat = cf.fit_outcome_regression(logged, arch, cfg, fold_id=fold_id)
        assert np.all(np.abs(gamma_hat[fold_id == 0, 0] - 1.0) < 0.1)
        assert np.all(np.abs(gamma_hat[fold_id == 1, 0] - 0.0) < 0.1)

    def test_single_fold_is_in_sample(self):
        rng = np.random.default_rng(11)
        n = 100
        x = rng.standard_normal((n, 2))
        logged = cf.LoggedDataset(x, np.ones(n, dtype=int), rng.standard_normal(n), k=2)
        arch = nnet.MlpArchitecture(2, (), 2, nnet.HEAD_IDENTITY)
        cfg = TrainConfig(learning_rate=1e-2, batch_size=64, max_epochs=5, patience=5, seed=2)
        out = cf.fit_outcome_regression(logged, arch, cfg)
        assert out.shape == (n, 2)

    def test_empty_fold_rejected(self):
        rng = np.random.default_rng(12)
        n = 10
        logged = cf.LoggedDataset(
            rng.standard_normal((n, 2)), np.ones(n, dtype=int), np.zeros(n), k=2
        )
        with pytest.raises(ValueError):
            cf.fit_outcome_regression(logged, fold_id=np.zeros(n, dtype=int))

    def test_masked_gradient_zero_on_unobserved_columns(self):
        # column 1 is never observed, so every parameter feeding only that
        # output must have exactly zero gradient; FD agrees on the rest
        rng = np.random.default_rng(13)
        n, d, k = 30, 2, 2
        x = rng.standard_normal((n, d))
        y = rng.standard_normal(n)
        cols = np.zeros(n, dtype=np.intp)
        arch = nnet.MlpArchitecture(d, (), k, nnet.HEAD_IDENTITY)
        adapter = MaskedRegressionLoss(nnet.Batch(x, y), cols)
        params = rng.standard_normal(arch.param_count)
        grad = analytic_grad(arch, params, adapter)
        w_grad = grad[: d * k].reshape(d, k)
        assert np.all(w_grad[:, 1] == 0.0)
        assert grad[d * k + 1] == 0.0  # bias of the unobserved column
        coords = rng.choice(arch.param_count, size=arch.param_count, replace=False)
        fd = finite_diff_grad(lambda w: total_loss(arch, w, adapter), params, coords)
        assert max_rel_error(grad[coords], fd) < 1e-5


class TestIpwEquivalence:
    def _logged_with_truth(self, rng, n, k):
        x = rng.standard_normal((n, 2))
        e = _simplex_rows(rng, n, k) * 0.7 + 0.3 / k
        e /= e.sum(axis=1, keepdims=True)
        cols = (rng.random(n)[:, None] > np.cumsum(e, axis=1)).sum(axis=1)
        y = rng.standard_normal((n, k))
        y_obs = y[np.arange(n), cols]
        a = cols + 1 if k > 2 else np.where(cols == 0, 1, 0)
        return cf.LoggedDataset(x, a, y_obs, k=k, true_propensity=e)

    def test_onehot_grid(self):
        rng = np.random.default_rng(14)
        logged = self._logged_with_truth(rng, 50, 3)
        grid = []
        for a in range(3):
            onehot = np.zeros((50, 3))
            onehot[:, a] = 1.0
            grid.append(onehot)
        report = cf.ipw_welfare_equivalence_check(logged, grid, 0.5)
        assert report.equal
        assert report.max_affine_error < 1e-10

    def test_single_policy(self):
        rng = np.random.default_rng(15)
        logged = self._logged_with_truth(rng, 20, 3)
        report = cf.ipw_welfare_equivalence_check(logged, [_simplex_rows(rng, 20, 3)], 1.0)
        assert report.equal

    def test_random_grid_identity(self):
        rng = np.random.default_rng(16)
        logged = self._logged_with_truth(rng, 60, 4)
        grid = [_simplex_rows(rng, 60, 4) for _ in range(20)]
        report = cf.ipw_welfare_equivalence_check(logged, grid, 2.0)
        assert report.equal
        assert report.max_affine_error < 1e-10

    def test_requires_true_propensity(self):
        rng = np.random.default_rng(17)
        logged = cf.LoggedDataset(
            rng.standard_normal((10, 2)), np.ones(10, dtype=int), np.zeros(10), k=3
        )
        with pytest.raises(ValueError):
            cf.ipw_welfare_equivalence_check(logged, [np.full((10, 3), 1 / 3)], 1.0)


class TestBinaryObjectiveWithPseudoDifferences:
    def test_equivalence_report_holds_verbatim(self):
        # the binary surrogate identity is pure algebra in the difference, so
        # substituting the IPW pseudo-outcome columns leaves it intact
        rng = np.random.default_rng(18)
        n = 80
        x = rng.standard_normal((n, 3))
        e1 = rng.uniform(0.25, 0.75, size=n)
        e = np.column_stack([e1, 1.0 - e1])
        a = np.where(rng.random(n) < e1, 1, 0)
        y_obs = rng.standard_normal(n) + (a == 1)
        logged = cf.LoggedDataset(x, a, y_obs, k=2, true_propensity=e)
        tilde = cf.ipw_pseudo_outcomes(logged, e)
        pseudo_data = FullFeedbackDataset(x, tilde)
        grid = [rng.uniform(0, 1, size=n) for _ in range(9)]
        for zeta in (0.05, 0.5, 2.0):
            report = verify_equivalence_binary(pseudo_data, grid, zeta)
            assert report.equal
            assert report.max_affine_error < 1e-10
        diff = cf.pseudo_difference_binary(logged, e, kind="ipw")
        np.testing.assert_allclose(pseudo_data.outcome_diff(), diff, atol=1e-12)


class TestPseudoOutcomeWelfareIdentity:
    def test_dr_penalized_welfare_equals_risk_differences(self):
        # pseudo-outcome penalized welfare differences equal surrogate risk
        # differences with the penalty at half the scale, sign flipped
        rng = np.random.default_rng(19)
        n, k = 40, 3
        x = rng.standard_normal((n, 2))
        e = _simplex_rows(rng, n, k) * 0.6 + 0.4 / k
        e /= e.sum(axis=1, keepdims=True)
        cols = (rng.random(n)[:, None] > np.cumsum(e, axis=1)).sum(axis=1)
        y = rng.standard_normal((n, k))
        a = cols + 1
        logged = cf.LoggedDataset(x, a, y[np.arange(n), cols], k=k, true_propensity=e)
        gamma_hat = rng.standard_normal((n, k))  # arbitrary; identity is algebraic
        tilde = cf.dr_pseudo_outcomes(logged, e, gamma_hat)
        pseudo = FullFeedbackDataset(x, tilde)
        from gbpl.surrogate import verify_equivalence_fullvector

        report = verify_equivalence_fullvector(pseudo, [_simplex_rows(rng, n, k) for _ in range(8)], 0.9)
        assert report.equal
        assert report.max_affine_error < 1e-10
