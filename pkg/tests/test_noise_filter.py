import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ocnn.errors import NoiseBudgetError, ParameterError
from ocnn.noise_filter import (
    IqrConfig,
    centre_distances,
    class_center,
    fence_mask,
    iqr_reject,
    quartiles,
    split_distances,
)

import oracles

OUTLIER_FIXTURE = [1.0, 2.0, 3.0, 4.0, 100.0]


class TestCentre:
    @pytest.mark.parametrize(
        "rows, centre",
        [([(0, 0), (2, 2)], [1, 1]), ([(3, 7)], [3, 7]), ([(1, 0), (0, 1), (2, 2)], [1, 1])],
    )
    def test_examples(self, rows, centre):
        assert class_center(rows).tolist() == centre

    def test_distances_match_oracle(self):
        X = np.random.default_rng(0).random((30, 4))
        c = X.mean(axis=0)
        np.testing.assert_allclose(centre_distances(X), [oracles.dist(x, c) for x in X], rtol=1e-12)


class TestQuartiles:
    @pytest.mark.parametrize(
        "values, q, expected",
        [(OUTLIER_FIXTURE, 0.25, 2.0), (OUTLIER_FIXTURE, 0.75, 4.0), ([5], 0.25, 5.0),
         ([5], 0.75, 5.0), ([1, 3], 0.25, 1.5)],
    )
    def test_examples(self, values, q, expected):
        assert quartiles(values, q) == expected

    def test_empty(self):
        with pytest.raises(ParameterError):
            quartiles([], 0.5)

    def test_q_range(self):
        with pytest.raises(ParameterError):
            quartiles([1, 2], 1.5)

    def test_thousand_random_arrays(self):
        rng = np.random.default_rng(20)
        for _ in range(1000):
            v = rng.standard_normal(int(rng.integers(1, 60))) * 10
            for q in (0.25, 0.75):
                got = quartiles(v, q)
                assert abs(got - oracles.quantile(v, q)) <= 1e-12
                assert abs(got - np.quantile(v, q)) <= 1e-12


class TestSplitDistances:
    def test_far_row_rejected(self):
        s = split_distances(OUTLIER_FIXTURE, IqrConfig(omega=1.5, min_rejected=1))
        assert s.rejected.tolist() == [4]
        assert s.retained.tolist() == [0, 1, 2, 3]
        assert s.omega_used == 1.5

    def test_omega_decays_until_far_row_fenced(self):
        cfg = IqrConfig(omega=100.0, min_rejected=1)
        s = split_distances(OUTLIER_FIXTURE, cfg)
        # trace the schedule by hand: fence 4 + 2 * omega must drop below 100
        omega = 100.0
        while not 4 + 2 * omega < 100:
            omega *= 0.9
        assert s.omega_used == omega
        assert s.rejected.tolist() == [4]

    def test_lower_fence(self):
        d = [0.1, 10, 11, 12, 13]
        s = split_distances(d, IqrConfig(omega=0.5, min_rejected=1))
        assert s.rejected.tolist() == [0]
        s2 = split_distances(d, IqrConfig(omega=0.5, min_rejected=1, lower_fence=False, omega_floor=0.01))
        assert 0 not in s2.rejected.tolist()

    def test_identical_rows_exhaust_budget(self):
        with pytest.raises(NoiseBudgetError):
            iqr_reject(np.ones((10, 3)), IqrConfig(min_rejected=1))

    def test_unreachable_count(self):
        with pytest.raises(NoiseBudgetError):
            split_distances(OUTLIER_FIXTURE, IqrConfig(min_rejected=3))

    def test_too_few_rows(self):
        with pytest.raises(NoiseBudgetError):
            split_distances([1.0, 2.0], IqrConfig(min_rejected=2))

    @pytest.mark.parametrize(
        "kwargs", [{"omega": 0.01}, {"omega_decay": 1.0}, {"omega_floor": 0.0}, {"min_rejected": 0}]
    )
    def test_bad_config(self, kwargs):
        with pytest.raises(ParameterError):
            IqrConfig(**kwargs)

    def test_rows_match_distance_split(self):
        X = np.random.default_rng(2).standard_normal((40, 3))
        a = iqr_reject(X, IqrConfig(min_rejected=2))
        b = split_distances(centre_distances(X), IqrConfig(min_rejected=2))
        assert a.rejected.tolist() == b.rejected.tolist()
        assert a.omega_used == b.omega_used

    @settings(max_examples=80, deadline=None)
    @given(arrays(np.float64, st.integers(8, 40), elements=st.floats(0, 100)),
           st.integers(1, 4), st.floats(0.5, 3.0))
    def test_split_properties(self, dist, need, omega):
        cfg = IqrConfig(omega=omega, min_rejected=need)
        try:
            s = split_distances(dist, cfg)
        except NoiseBudgetError:
            w = omega
            while w >= cfg.omega_floor:
                assert fence_mask(dist, w).sum() < need
                w *= cfg.omega_decay
            return
        both = np.concatenate([s.retained, s.rejected])
        assert sorted(both.tolist()) == list(range(len(dist)))
        assert len(s.rejected) >= need
        assert cfg.omega_floor <= s.omega_used <= omega
        q1, q3 = oracles.quantile(dist, 0.25), oracles.quantile(dist, 0.75)
        hi = q3 + s.omega_used * (q3 - q1)
        lo = q1 - s.omega_used * (q3 - q1)
        assert all(dist[i] > hi or dist[i] < lo for i in s.rejected)
        assert all(lo <= dist[i] <= hi for i in s.retained)
