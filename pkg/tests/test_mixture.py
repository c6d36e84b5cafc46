import numpy as np
import pytest

from pwltree.adaptive_tree import AdaptiveTreeRegressor
from pwltree.datagen import generate
from pwltree.fixed_tree import FixedTreeRegressor
from pwltree.mixture import (
    DirectMixtureRegressor,
    batch_best_weights,
    empirical_strong_convexity,
    model_estimate,
    regret,
)
from pwltree.trees import NodeLabel, ROOT


def lbl(bits):
    return NodeLabel.from_string(bits)


class TestModelEstimate:
    def test_trivial_partition(self):
        assert model_estimate(frozenset({ROOT}), {ROOT: 3.25}) == 3.25

    def test_hard_four_cell_partition(self):
        # input inside cell "00": only that leaf's scaled estimate survives
        h = {lbl("00"): 1.75, lbl("01"): 0.0, lbl("10"): 0.0, lbl("11"): 0.0}
        part = frozenset(h)
        assert model_estimate(part, h) == 1.75

    def test_soft_depth_one_partition(self):
        h = {lbl("0"): 0.5 * 2.0, lbl("1"): 0.5 * (-1.0)}
        assert model_estimate(frozenset(h), h) == pytest.approx(0.5)

    def test_missing_member_raises(self):
        with pytest.raises(KeyError):
            model_estimate(frozenset({lbl("0"), lbl("1")}), {lbl("0"): 1.0})


class TestDirectPredict:
    def test_zero_weights(self):
        lrn = DirectMixtureRegressor(2, 2, mode="hard")
        assert lrn.predict(np.array([0.5, 0.5, 1.0])).y_hat == 0.0

    def test_unit_weight_selects_one_model(self):
        lrn = DirectMixtureRegressor(2, 2, mode="hard")
        rng = np.random.default_rng(0)
        lrn.v = rng.normal(size=lrn.v.shape)
        x = np.array([0.3, -0.8, 1.0])
        for k in range(len(lrn.partitions)):
            lrn.w_vec[:] = 0.0
            lrn.w_vec[k] = 1.0
            pred = lrn.predict(x)
            assert pred.y_hat == pytest.approx(float(pred.model_estimates[k]))

    def test_depth_four_has_677_models(self):
        lrn = DirectMixtureRegressor(4, 2, mode="hard")
        assert len(lrn.partitions) == 677
        with pytest.raises(ValueError):
            DirectMixtureRegressor(5, 2)


class TestDirectUpdate:
    def test_zero_error_is_a_no_op(self):
        lrn = DirectMixtureRegressor(1, 2, mode="hard")
        x = np.array([1.0, 0.0, 1.0])
        pred = lrn.predict(x)
        lrn.update(x, pred.y_hat, pred)
        assert not lrn.w_vec.any()

    def test_depth_zero_is_scalar_lms_on_root_estimate(self):
        lrn = DirectMixtureRegressor(0, 2, mode="hard", mu=0.1)
        lrn.v[0] = np.array([1.0, 0.0, 0.0])
        x = np.array([2.0, 0.0, 1.0])
        pred = lrn.predict(x)
        assert pred.y_hat == pytest.approx(lrn.w_vec[0] * 2.0)
        lrn.update(x, 1.0, pred)
        assert lrn.w_vec[0] == pytest.approx(0.1 * 1.0 * 2.0)

    def test_node_weight_bookkeeping_tracks_collapsed_weights(self):
        stream = generate("matched", 500, seed=13)
        fast = FixedTreeRegressor(2, 2, mu=0.01)
        slow = DirectMixtureRegressor(2, 2, mode="hard", mu=0.01)
        for x, d in zip(stream.extended, stream.targets):
            fast.step(x, d)
            slow.step(x, d)
            mapped = slow.node_weight_image(fast.w)
            np.testing.assert_allclose(mapped, slow.w_vec, rtol=0, atol=1e-12)

    def test_soft_trajectory_equivalence(self):
        stream = generate("mismatched", 400, seed=17)
        fast = AdaptiveTreeRegressor(2, 2, mu=0.005, s_plus=0.01)
        slow = DirectMixtureRegressor(2, 2, mode="soft", mu=0.005, s_plus=0.01)
        for x, d in zip(stream.extended, stream.targets):
            y1, _ = fast.step(x, d)
            y2, _ = slow.step(x, d)
            assert abs(y1 - y2) <= 1e-9 * (1 + abs(y2))
        np.testing.assert_allclose(fast.theta, slow.theta, rtol=1e-9)


class TestBatchBestWeights:
    def test_recovers_exact_generating_weights(self):
        rng = np.random.default_rng(5)
        D = rng.normal(size=(200, 5))
        w0 = rng.normal(size=5)
        w_hat = batch_best_weights(D, D @ w0)
        np.testing.assert_allclose(w_hat, w0, atol=1e-8)

    def test_short_history_falls_back_to_ridge(self):
        rng = np.random.default_rng(6)
        D = rng.normal(size=(3, 5))
        y = rng.normal(size=3)
        w_hat = batch_best_weights(D, y)
        assert np.isfinite(w_hat).all()
        residual = float(np.sum((y - D @ w_hat) ** 2))
        assert residual >= 0.0

    def test_rank_deficient_history(self):
        rng = np.random.default_rng(7)
        col = rng.normal(size=(100, 1))
        D = np.hstack([col, col, col])  # rank one
        y = rng.normal(size=100)
        w_hat = batch_best_weights(D, y)
        assert np.isfinite(w_hat).all()

    def test_regret_non_negative_on_stationary_prefixes(self):
        stream = generate("matched", 2000, seed=19)
        lrn = DirectMixtureRegressor(1, 2, mode="hard", mu=0.01)
        D = np.empty((2000, 2))
        e2 = np.empty(2000)
        for t, (x, d) in enumerate(zip(stream.extended, stream.targets)):
            pred = lrn.predict(x)
            D[t] = pred.model_estimates
            e2[t] = (d - pred.y_hat) ** 2
            lrn.update(x, d, pred)
        for n in (100, 500, 2000):
            assert regret(e2[:n], D[:n], stream.targets[:n]) >= 0.0


class TestStrongConvexity:
    def test_known_second_moment(self):
        D = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 0.0], [0.0, 2.0]])
        # gram = diag(0.5, 2.0) -> smallest eigenvalue 0.5
        assert empirical_strong_convexity(D) == pytest.approx(0.5)

    def test_depth_two_model_estimates_are_structurally_dependent(self):
        # the four-cell and the two-half models pair up: their estimate sums
        # coincide for every input, so the gram matrix is always singular
        lrn = DirectMixtureRegressor(2, 2, mode="hard")
        rng = np.random.default_rng(23)
        lrn.v = rng.normal(size=lrn.v.shape)
        D = np.array([
            lrn.predict(np.append(rng.normal(size=2), 1.0)).model_estimates
            for _ in range(100)
        ])
        assert empirical_strong_convexity(D) < 1e-12
