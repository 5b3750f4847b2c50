import math
import types

import numpy as np
import pytest
from scipy.special import logsumexp

from densenest.analysis import (LogLikSummary, PosteriorSampleSet,
                                loglik_diagnostic, mode_report,
                                prediction_grid, prominent_modes,
                                weight_shares)
from densenest.data import Dataset, GridSpec, XorRecipe, bounding_grid, generate
from densenest.network import forward
from densenest.prior import PriorSpec
from densenest.sampler import SamplerConfig, posterior_samples, run_nested_sampling
from densenest.toys import bimodal_loglike


def fake_run(leaf_log_z, log_z=None, extra_nonleaf=True):
    """Minimal run-like object: a cluster tree with chosen leaf evidences."""
    clusters = []
    if extra_nonleaf:
        clusters.append(types.SimpleNamespace(
            id=0, parent=None, log_z_local=-1.0, log_z_local_err=0.1,
            n_dead=10, n_live_final=0, is_leaf=False))
    for k, lz in enumerate(leaf_log_z, start=1):
        clusters.append(types.SimpleNamespace(
            id=k, parent=0, log_z_local=lz, log_z_local_err=0.1,
            n_dead=10, n_live_final=5, is_leaf=True))
    run = types.SimpleNamespace(
        clusters=clusters,
        log_z=(logsumexp(leaf_log_z) if log_z is None else log_z),
        run_id="fake")
    run.leaf_clusters = lambda: [c for c in run.clusters if c.is_leaf]
    return run


class TestProminentModes:
    def test_single_leaf(self):
        assert prominent_modes(fake_run([-10.0])) == [1]

    def test_both_within_ratio(self):
        assert prominent_modes(fake_run([-10.0, -13.0])) == [1, 2]

    def test_far_leaf_excluded(self):
        assert prominent_modes(fake_run([-10.0, -20.0])) == [1]

    def test_exact_threshold_included(self):
        cut = -10.0 + math.log(1e-3)
        assert prominent_modes(fake_run([-10.0, cut])) == [1, 2]

    def test_invariant_under_common_shift(self):
        base = [-10.0, -12.0, -18.0]
        shifted = [v + 123.4 for v in base]
        assert prominent_modes(fake_run(base)) == prominent_modes(fake_run(shifted))

    def test_ordered_by_local_evidence(self):
        assert prominent_modes(fake_run([-12.0, -10.0, -11.0])) == [2, 3, 1]

    def test_weight_shares_sum_to_one(self):
        shares = weight_shares(fake_run([-10.0, -11.0, -12.5]))
        assert sum(shares.values()) == pytest.approx(1.0, abs=1e-9)


def grid_3x3():
    return GridSpec(x1_min=-1.0, x2_min=-1.0, spacing=1.0, n1=3, n2=3)


class TestPredictionGrid:
    def test_constant_network_gives_half_everywhere(self):
        samples = PosteriorSampleSet(theta=np.zeros((10, 9)),
                                     mode_labels=np.zeros(10, dtype=int))
        grid = prediction_grid(samples, grid_3x3())
        np.testing.assert_array_equal(grid.values, np.full((3, 3), 0.5))

    def test_values_in_unit_interval(self):
        rng = np.random.default_rng(0)
        samples = PosteriorSampleSet(theta=rng.uniform(-5, 5, size=(50, 9)),
                                     mode_labels=np.zeros(50, dtype=int))
        grid = prediction_grid(samples, grid_3x3())
        assert np.all(grid.values >= 0.0) and np.all(grid.values <= 1.0)

    def test_mode_filter_and_mixture_identity(self):
        rng = np.random.default_rng(1)
        theta = rng.uniform(-5, 5, size=(100, 9))
        labels = np.r_[np.zeros(60, dtype=int), np.ones(40, dtype=int)]
        samples = PosteriorSampleSet(theta=theta, mode_labels=labels)
        full = prediction_grid(samples, grid_3x3())
        g0 = prediction_grid(samples, grid_3x3(), mode=0)
        g1 = prediction_grid(samples, grid_3x3(), mode=1)
        mix = 0.6 * g0.values + 0.4 * g1.values
        np.testing.assert_allclose(full.values, mix, atol=1e-12)

    def test_empty_mode_filter_is_an_error(self):
        samples = PosteriorSampleSet(theta=np.zeros((5, 9)),
                                     mode_labels=np.zeros(5, dtype=int))
        with pytest.raises(ValueError, match="mode label 7"):
            prediction_grid(samples, grid_3x3(), mode=7)

    def test_csv_format(self, tmp_path):
        samples = PosteriorSampleSet(theta=np.zeros((3, 9)),
                                     mode_labels=np.zeros(3, dtype=int))
        grid = prediction_grid(samples, grid_3x3())
        path = tmp_path / "grid.csv"
        grid.save_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x1,x2,mean_y"
        assert len(lines) == 1 + 9
        assert lines[1].startswith("-1,-1,")


class TestLogLikDiagnostic:
    def test_constant_predictor(self):
        samples = PosteriorSampleSet(theta=np.zeros((20, 9)),
                                     mode_labels=np.zeros(20, dtype=int))
        data = generate(XorRecipe(), seed=0)
        summary = loglik_diagnostic(samples, data)
        assert summary.mean == pytest.approx(math.log(0.5), abs=1e-12)
        assert summary.min == summary.max == summary.mean
        assert len(summary.values) == 20

    def test_symmetry_transformed_set_identical(self):
        from densenest.network import symmetry_group, symmetry_transform
        rng = np.random.default_rng(2)
        theta = rng.uniform(-5, 5, size=(16, 9))
        g = symmetry_group(2)[5]
        transformed = np.array([symmetry_transform(t, g) for t in theta])
        data = generate(XorRecipe(counts=(5, 5, 5, 5)), seed=3)
        a = loglik_diagnostic(PosteriorSampleSet(theta, np.zeros(16, dtype=int)), data)
        b = loglik_diagnostic(PosteriorSampleSet(transformed, np.zeros(16, dtype=int)), data)
        np.testing.assert_allclose(a.values, b.values, atol=1e-10)

    def test_per_point_normalisation(self):
        # the diagnostic is per data point, so train and test sizes compare
        rng = np.random.default_rng(3)
        theta = rng.uniform(-1, 1, size=(5, 9))
        small = generate(XorRecipe(counts=(2, 2, 2, 2)), seed=4)
        doubled = Dataset(points=np.tile(small.points, (2, 1)),
                          labels=np.tile(small.labels, 2))
        a = loglik_diagnostic(PosteriorSampleSet(theta, np.zeros(5, dtype=int)), small)
        b = loglik_diagnostic(PosteriorSampleSet(theta, np.zeros(5, dtype=int)), doubled)
        np.testing.assert_allclose(a.values, b.values, atol=1e-12)


class TestModeReportOnBimodalToy:
    @pytest.fixture(scope="class")
    def toy_setup(self):
        run = run_nested_sampling(bimodal_loglike, PriorSpec(5.0, "full"),
                                  SamplerConfig(n_live=400, seed=21), dim=2)
        samples = posterior_samples(run, n=1000, seed=22)
        return run, samples

    def test_two_prominent_modes(self, toy_setup):
        run, _ = toy_setup
        assert len(prominent_modes(run)) == 2

    def test_label_frequencies_match_weight_shares(self, toy_setup):
        run, samples = toy_setup
        shares = weight_shares(run)
        for mode in prominent_modes(run):
            freq = np.mean(samples.mode_labels == mode)
            sigma = math.sqrt(shares[mode] * (1 - shares[mode]) / len(samples))
            assert abs(freq - shares[mode]) <= 3 * sigma + 1e-9

    def test_full_grid_is_share_weighted_mixture(self, toy_setup):
        # 2-D toy networks make no sense; use a 9-param stand-in sample set
        rng = np.random.default_rng(23)
        labels = rng.integers(0, 2, size=400)
        samples = PosteriorSampleSet(theta=rng.uniform(-5, 5, (400, 9)),
                                     mode_labels=labels)
        grid = grid_3x3()
        full = prediction_grid(samples, grid)
        parts = [prediction_grid(samples, grid, mode=m) for m in (0, 1)]
        freqs = [np.mean(labels == m) for m in (0, 1)]
        mix = freqs[0] * parts[0].values + freqs[1] * parts[1].values
        np.testing.assert_allclose(full.values, mix, atol=1e-12)


class TestModeReportStructure:
    def test_reports_for_xor_like_samples(self):
        rng = np.random.default_rng(24)
        train = generate(XorRecipe(counts=(4, 4, 4, 4)), seed=25)
        suite = [generate(XorRecipe(counts=(4, 4, 4, 4)), seed=26 + k,
                          provenance=f"test-{k}") for k in range(1, 3)]
        run = fake_run([-10.0, -11.0])
        labels = np.r_[np.ones(70, dtype=int), np.full(30, 2, dtype=int)]
        samples = PosteriorSampleSet(theta=rng.uniform(-5, 5, (100, 9)),
                                     mode_labels=labels)
        reports = mode_report(run, samples, train, suite, spacing=0.5)
        assert [r.mode_id for r in reports] == [1, 2, None]
        assert reports[-1].weight_share == 1.0
        assert reports[-1].n_samples == 100
        shares = sum(r.weight_share for r in reports[:-1])
        assert shares == pytest.approx(1.0, abs=1e-9)
        for rep in reports:
            assert rep.grid.values.shape == (reports[0].grid.grid.n1,
                                             reports[0].grid.grid.n2)
            assert len(rep.test_per_set) == 2
            assert rep.test_pooled.values.shape == (rep.n_samples,)
            assert rep.train.mean <= 0.0
