import math

import numpy as np
import pytest

from densenest.network import (Architecture, SymmetryElement, forward,
                               log_likelihood, make_loglike, pack,
                               symmetry_group, symmetry_transform, unpack)

SIGMA_1 = 0.7310585786300049      # sigmoid(1), hand-evaluated oracle


def random_theta(rng, scale=5.0):
    return rng.uniform(-scale, scale, size=9)


def test_architecture_parameter_count():
    assert Architecture().n_params == 9


def test_pack_unpack_roundtrip():
    theta = np.arange(9.0)
    w, b, v, c = unpack(theta)
    np.testing.assert_array_equal(w, [[0.0, 1.0], [2.0, 3.0]])
    np.testing.assert_array_equal(pack(w, b, v, c), theta)


class TestForward:
    def test_zero_parameters_give_half(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = rng.normal(size=2)
            assert forward(np.zeros(9), x) == 0.5

    def test_hand_evaluated_composition(self):
        # W=I, b=0, v=(1,1), c=0 at x=(0,0): sigma(1*0.5 + 1*0.5) = sigma(1)
        theta = pack(np.eye(2), [0, 0], [1, 1], 0.0)
        assert forward(theta, np.array([0.0, 0.0])) == pytest.approx(SIGMA_1, abs=1e-12)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(1)
        theta = random_theta(rng)
        xs = rng.normal(size=(50, 2))
        batch = forward(theta, xs)
        singles = [forward(theta, x) for x in xs]
        np.testing.assert_allclose(batch, singles, rtol=0, atol=1e-14)

    def test_output_in_open_interval(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            y = forward(random_theta(rng), rng.uniform(-3, 3, size=2))
            assert 0.0 < y < 1.0

    def test_monotone_in_output_bias(self):
        rng = np.random.default_rng(3)
        theta = random_theta(rng)
        x = rng.normal(size=2)
        values = []
        for c in np.linspace(-3, 3, 13):
            t = theta.copy()
            t[8] = c
            values.append(forward(t, x))
        assert np.all(np.diff(values) > 0)


class TestLogLikelihood:
    def test_zero_params_on_220_points(self):
        rng = np.random.default_rng(4)
        points = rng.normal(size=(220, 2))
        labels = np.r_[np.ones(130, dtype=int), np.zeros(90, dtype=int)]
        got = log_likelihood(np.zeros(9), (points, labels))
        assert got == pytest.approx(220 * math.log(0.5), abs=1e-9)

    def test_single_point_from_forward_example(self):
        theta = pack(np.eye(2), [0, 0], [1, 1], 0.0)
        got = log_likelihood(theta, (np.zeros((1, 2)), np.array([1])))
        assert got == pytest.approx(math.log(SIGMA_1), abs=1e-12)

    def test_always_non_positive(self):
        rng = np.random.default_rng(5)
        points = rng.normal(size=(40, 2))
        labels = rng.integers(0, 2, size=40)
        for _ in range(100):
            assert log_likelihood(random_theta(rng), (points, labels)) <= 0.0

    def test_empty_dataset_warns_and_returns_zero(self):
        with pytest.warns(UserWarning):
            got = log_likelihood(np.zeros(9), (np.empty((0, 2)), np.empty(0, dtype=int)))
        assert got == 0.0

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError):
            log_likelihood(np.zeros(9), (np.zeros((2, 2)), np.array([0, 2])))

    def test_finite_at_saturating_parameters(self):
        theta = np.full(9, 5.0)
        got = log_likelihood(theta, (np.full((5, 2), 5.0), np.zeros(5, dtype=int)))
        assert np.isfinite(got)

    def test_finite_difference_sanity(self):
        # central differences at two step sizes: O(h^2) consistency per parameter
        rng = np.random.default_rng(6)
        points = rng.normal(size=(30, 2))
        labels = rng.integers(0, 2, size=30)
        theta = rng.uniform(-2, 2, size=9)

        def ll(t):
            return log_likelihood(t, (points, labels))

        for i in range(9):
            grads = []
            for h in (1e-4, 5e-5):
                tp, tm = theta.copy(), theta.copy()
                tp[i] += h
                tm[i] -= h
                grads.append((ll(tp) - ll(tm)) / (2 * h))
            assert np.isfinite(grads).all()
            # both estimates agree to much better than their own size
            assert grads[0] == pytest.approx(grads[1], rel=1e-4, abs=1e-6)

    def test_fast_closure_matches_reference(self):
        rng = np.random.default_rng(7)
        points = rng.normal(size=(64, 2))
        labels = rng.integers(0, 2, size=64)
        fast = make_loglike((points, labels))
        plain = make_loglike((points, labels), compiled=False)
        for _ in range(300):
            theta = random_theta(rng, scale=6.0)
            ref = log_likelihood(theta, (points, labels))
            assert fast(theta) == pytest.approx(ref, rel=0, abs=1e-9)
            assert plain(theta) == pytest.approx(ref, rel=0, abs=1e-9)


class TestSymmetry:
    def test_group_order_is_eight(self):
        assert len(symmetry_group(2)) == 8

    def test_identity_element(self):
        theta = np.arange(9.0)
        ident = SymmetryElement((0, 1), (1, 1))
        np.testing.assert_array_equal(symmetry_transform(theta, ident), theta)

    def test_single_flip_example(self):
        theta = pack(np.eye(2), [0, 0], [1, 1], 0.0)
        flipped = symmetry_transform(theta, SymmetryElement((0, 1), (-1, 1)))
        np.testing.assert_allclose(flipped,
                                   pack([[-1, 0], [0, 1]], [0, 0], [-1, 1], 1.0))
        rng = np.random.default_rng(8)
        for _ in range(100):
            x = rng.normal(size=2)
            assert forward(flipped, x) == pytest.approx(forward(theta, x), abs=1e-12)

    def test_orbit_of_generic_point_has_eight_distinct_members(self):
        rng = np.random.default_rng(9)
        theta = random_theta(rng)
        orbit = [symmetry_transform(theta, g) for g in symmetry_group(2)]
        distinct = {tuple(np.round(t, 12)) for t in orbit}
        assert len(distinct) == 8

    def test_forward_invariant_over_orbit(self):
        rng = np.random.default_rng(10)
        theta = random_theta(rng)
        xs = rng.normal(size=(100, 2))
        base = forward(theta, xs)
        for g in symmetry_group(2):
            np.testing.assert_allclose(forward(symmetry_transform(theta, g), xs),
                                       base, atol=1e-10, rtol=0)

    def test_log_likelihood_invariant_over_orbit(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            theta = random_theta(rng)
            points = rng.normal(size=(20, 2))
            labels = rng.integers(0, 2, size=20)
            base = log_likelihood(theta, (points, labels))
            for g in symmetry_group(2):
                other = log_likelihood(symmetry_transform(theta, g), (points, labels))
                assert other == pytest.approx(base, abs=1e-10)

    def test_invalid_elements_rejected(self):
        with pytest.raises(ValueError):
            SymmetryElement((0, 0), (1, 1))
        with pytest.raises(ValueError):
            SymmetryElement((0, 1), (1, 2))
