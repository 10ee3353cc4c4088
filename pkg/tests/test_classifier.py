import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocnn.classifier import (
    OcnnModel,
    OcnnParams,
    classify,
    classify_batch,
    decide,
    jknn,
    nn1k,
    nn11,
    nnj1,
    ratio_of,
    score,
    self_neighbour_distances,
)
from ocnn.core import fit_minmax
from ocnn.errors import DimensionError, ParameterError

import oracles
from conftest import random_instance

TRIANGLE = [(0, 0), (1, 0), (0, 1)]


class TestScore:
    def test_two_point_training_set(self):
        s = score(nn11([(0, 0), (0, 1)]), (0, 3))
        assert (s.dbar_j, s.dbar_k, s.ratio) == (2.0, 1.0, 2.0)

    def test_triangle_j2_k2(self):
        s = score(jknn(TRIANGLE, 2, 2), (2, 0))
        ref = oracles.score(TRIANGLE, (2, 0), 2, 2)
        assert s.dbar_j == pytest.approx(1.5, abs=1e-12)
        assert s.dbar_k == pytest.approx((3 + math.sqrt(2)) / 4, abs=1e-12)
        assert s.ratio == pytest.approx(1.5 / ((3 + math.sqrt(2)) / 4), abs=1e-12)
        assert s.ratio == pytest.approx(1.359245, abs=1e-6)
        assert (s.dbar_j, s.dbar_k, s.ratio) == pytest.approx(ref, rel=1e-12)

    def test_duplicate_gives_zero_over_zero(self):
        s = score(nn11([(1, 1), (1, 1), (4, 4)]), (1, 1))
        assert (s.dbar_j, s.dbar_k, s.ratio) == (0.0, 0.0, 0.0)

    def test_positive_over_zero_is_infinite(self):
        s = score(nn11([(1, 1), (1, 1)]), (2, 1))
        assert s.dbar_k == 0.0 and s.ratio == math.inf

    def test_self_excluded_by_index_not_value(self):
        kd = self_neighbour_distances(np.array([[0.0], [0.0], [3.0]]), 1)
        assert kd[:, 0].tolist() == [0.0, 0.0, 3.0]

    @pytest.mark.parametrize("J, K", [(4, 1), (1, 3)])
    def test_parameters_exceed_rows(self, J, K):
        with pytest.raises(ParameterError):
            jknn(TRIANGLE, J, K)

    def test_query_dimension(self):
        with pytest.raises(DimensionError):
            score(nn11(TRIANGLE), (1, 2, 3))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
    def test_matches_brute_force(self, seed, J, K):
        rng = np.random.default_rng(seed)
        X = rng.integers(0, 4, (15, 2)).astype(float)  # ties and duplicates
        Q = rng.integers(-1, 5, (6, 2)).astype(float)
        dj, dk, r = jknn(X, J, K).score_batch(Q)
        for i, z in enumerate(Q):
            ref = oracles.score(X.tolist(), z.tolist(), J, K)
            assert dj[i] == pytest.approx(ref[0], rel=1e-12, abs=1e-12)
            assert dk[i] == pytest.approx(ref[1], rel=1e-12, abs=1e-12)
            if math.isinf(ref[2]):
                assert math.isinf(r[i])
            else:
                assert r[i] == pytest.approx(ref[2], rel=1e-12, abs=1e-12)


class TestRatio:
    @pytest.mark.parametrize(
        "j, k, expected", [(0.0, 0.0, 0.0), (1.0, 0.0, math.inf), (3.0, 2.0, 1.5), (0.0, 2.0, 0.0)]
    )
    def test_conventions(self, j, k, expected):
        assert ratio_of(j, k) == expected


class TestClassify:
    @pytest.mark.parametrize(
        "ratio, theta, accepted",
        [(2.0, 1.0, False), (2.0, 2.5, True), (0.0, 0.1, True), (1.0, 1.0, False), (math.inf, 1e300, False)],
    )
    def test_decision_rule(self, ratio, theta, accepted):
        assert bool(decide(ratio, theta)) is accepted

    def test_two_point_example_rejected_then_accepted(self):
        m = nn11([(0, 0), (0, 1)])
        assert classify(m, (0, 3)) is False
        assert classify(m.with_theta(2.5), (0, 3)) is True

    def test_boundary_is_reject(self):
        # ratio exactly 2
        assert classify(nn11([(0, 0), (0, 1)], theta=2.0), (0, 3)) is False

    def test_empty_batch(self):
        assert classify_batch(nn11(TRIANGLE), np.empty((0, 2))).shape == (0,)

    def test_single_query_batch(self):
        m = nn11(TRIANGLE)
        assert classify_batch(m, [(0.2, 0.1)]).tolist() == [classify(m, (0.2, 0.1))]

    def test_batch_matches_elementwise_oracle(self):
        m = nn11(TRIANGLE)
        Q = [(0.1, 0.1), (2, 0), (0.5, 0.5)]
        assert classify_batch(m, Q).tolist() == [oracles.accepts(TRIANGLE, q, 1, 1, 1.0) for q in Q]
        assert classify_batch(m, Q).tolist() == [classify(m, q) for q in Q]

    def test_batch_dimension(self):
        with pytest.raises(DimensionError):
            classify_batch(nn11(TRIANGLE), [(1, 2, 3)])


class TestModel:
    @pytest.mark.parametrize("kwargs", [{"J": 0}, {"K": -1}, {"theta": 0.0}, {"theta": -1.0}, {"J": 1.5}])
    def test_invalid_params(self, kwargs):
        with pytest.raises(ParameterError):
            OcnnParams(**kwargs)

    def test_training_matrix_is_frozen(self):
        src = np.array(TRIANGLE, dtype=float)
        m = nn11(src)
        src[0, 0] = 99.0
        assert m.train[0, 0] == 0.0
        with pytest.raises(ValueError):
            m.train[0, 0] = 1.0

    def test_prepare_uses_recorded_scaling(self):
        raw = np.array([[0.0, 10.0], [2.0, 30.0]])
        norm = fit_minmax(raw)
        m = nn11(np.array([[0.0, 0.0], [1.0, 1.0]]), norm=norm)
        assert m.prepare([[1.0, 20.0]]).tolist() == [[0.5, 0.5]]

    def test_presets_share_one_code_path(self):
        X, Q = random_instance(11)
        assert np.array_equal(nn1k(X, 3).score_batch(Q)[2], jknn(X, 1, 3).score_batch(Q)[2])
        assert np.array_equal(nnj1(X, 4).score_batch(Q)[2], jknn(X, 4, 1).score_batch(Q)[2])


class TestVariantRelations:
    """Relations between the 11NN, 1KNN and J1NN variants at theta = 1."""

    @pytest.mark.parametrize("seed", range(10))
    def test_accept_11nn_subset_of_accept_1knn(self, seed):
        X, Q = random_instance(seed)
        base = nn11(X).classify_batch(Q)
        for K in range(2, 11):
            assert not np.any(base & ~nn1k(X, K).classify_batch(Q))

    def test_j1nn_can_accept_what_11nn_rejects(self):
        # the averaged denominator over the J neighbours need not dominate
        # the single-neighbour one: 11NN ratio 1/1, J1NN(J=2) 1.25/1.75
        X = [(0.0,), (1.0,), (3.5,)]
        assert oracles.score(X, (2.0,), 1, 1)[2] == 1.0
        assert classify(nn11(X), (2.0,)) is False
        assert classify(nnj1(X, 2), (2.0,)) is True
        assert oracles.accepts(X, (2.0,), 2, 1, 1.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_theta_monotone(self, seed):
        X, Q = random_instance(seed)
        m = jknn(X, 2, 3)
        prev = np.zeros(len(Q), bool)
        for theta in (0.25, 0.5, 1, 2, 4):
            cur = m.with_theta(theta).classify_batch(Q)
            assert not np.any(prev & ~cur)
            prev = cur

    def test_large_theta_accepts_every_finite_ratio(self):
        X, Q = random_instance(3)
        r = nn11(X).score_batch(Q)[2]
        assert np.all(nn11(X, theta=1e300).classify_batch(Q) == np.isfinite(r))
