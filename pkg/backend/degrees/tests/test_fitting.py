import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from degrees.distributions import ModelId, PledParams, TpaParams, tabulate
from degrees.empirical import DegreeHistogram, EmpiricalDistribution, truncate_renormalize
from degrees.exceptions import (
    InsufficientDataError, InvalidParameterError, MismatchedSupportError, SearchFailureError,
    ZeroVarianceError,
)
from degrees.fitting import (
    FitConfig, fit_model, fit_pled, fit_tpa, log_ccdf_residuals, pearson_r, r_squared,
)


def exact_table(params, degrees):
    """Model pmf/ccdf as an empirical distribution, ccdf carried verbatim"""
    evaluation = tabulate(params, degrees)
    return EmpiricalDistribution(
        d_min=params.d_min,
        degrees=np.array(evaluation.degrees),
        pmf=np.array(evaluation.pmf),
        ccdf=np.array(evaluation.ccdf),
        eta=1.0,
        tail_mass=float(evaluation.ccdf[-1] - evaluation.pmf[-1]),
        source_label=params.digest(),
    )


def geometric_table(ratio, d_min, end):
    x = np.arange(d_min, end)
    return EmpiricalDistribution(
        d_min=d_min,
        degrees=x,
        pmf=(1 - ratio) * ratio ** (x - d_min),
        ccdf=ratio ** (x - d_min),
        eta=1.0,
        tail_mass=ratio ** (end - d_min),
    )


class PearsonTests(SimpleTestCase):

    def test_linear_relation(self):
        self.assertAlmostEqual(pearson_r([1, 2, 3, 4], [2, 4, 6, 8]), 1.0)
        self.assertAlmostEqual(pearson_r([1, 2, 3, 4], [8, 6, 4, 2]), -1.0)

    def test_matches_numpy(self):
        rng = np.random.default_rng(3)
        u, v = rng.normal(size=50), rng.normal(size=50)
        self.assertAlmostEqual(pearson_r(u, v), float(np.corrcoef(u, v)[0, 1]), places=12)

    def test_too_few_points(self):
        with self.assertRaises(InsufficientDataError):
            pearson_r([1, 2], [1, 2])

    def test_zero_variance(self):
        with self.assertRaises(ZeroVarianceError):
            pearson_r([1, 1, 1], [1, 2, 3])
        with self.assertRaises(ZeroVarianceError):
            pearson_r([1, 2, 3], [5, 5, 5])


class FitConfigTests(SimpleTestCase):

    def test_defaults(self):
        config = FitConfig()
        self.assertEqual(config.a2_range, (2, 2000))
        self.assertEqual(config.grid_density, 64)
        self.assertEqual(config.refine_shrink, 0.5)

    def test_validation(self):
        bad = (
            {'a2_range': (0, 10)},
            {'a2_range': (20, 10)},
            {'w_range': (0.0, 1.0)},
            {'c_range': (5.0, 1.0)},
            {'grid_density': 1},
            {'refine_iterations': 0},
            {'refine_shrink': 1.0},
            {'sum_tol': 1e-3},
            {'r_space': 'cubic'},
            {'weighting': 'inverse'},
            {'threads': -1},
        )
        for overrides in bad:
            with self.subTest(**{key: str(value) for key, value in overrides.items()}):
                with self.assertRaises(InvalidParameterError):
                    FitConfig(**overrides)

    def test_threads_do_not_change_the_digest(self):
        self.assertEqual(FitConfig(threads=1).digest(), FitConfig(threads=6).digest())
        self.assertNotEqual(FitConfig().digest(), FitConfig(grid_density=8).digest())

    @override_settings(TAILFIT_GRID_DENSITY=9, TAILFIT_THREADS=2)
    def test_from_settings(self):
        config = FitConfig.from_settings(refine_iterations=7, r_space=None)
        self.assertEqual(config.grid_density, 9)
        self.assertEqual(config.threads, 2)
        self.assertEqual(config.refine_iterations, 7)
        self.assertEqual(config.r_space, 'log')


class ResidualTests(SimpleTestCase):

    def test_exact_model_has_zero_residuals(self):
        params = TpaParams(17, 1.4, 2)
        dist = exact_table(params, np.arange(2, 120))
        residuals = log_ccdf_residuals(params, dist)
        self.assertEqual(len(residuals), 118)
        for res in residuals:
            self.assertAlmostEqual(res.log10_empirical, res.log10_model, places=12)
        r, r2 = r_squared(params, dist)
        self.assertAlmostEqual(r2, 1.0, places=12)
        r_linear, _ = r_squared(params, dist, space='linear')
        self.assertAlmostEqual(r_linear, 1.0, places=12)

    def test_mismatched_support(self):
        dist = exact_table(TpaParams(17, 1.4, 2), np.arange(2, 50))
        with self.assertRaises(MismatchedSupportError):
            log_ccdf_residuals(TpaParams(17, 1.4, 1), dist)

    def test_residuals_cover_observed_degrees(self):
        hist = DegreeHistogram(((2, 4), (3, 3), (4, 2), (5, 1)))
        dist = truncate_renormalize(hist, 2)
        residuals = log_ccdf_residuals(TpaParams(5, 1.0, 2), dist)
        self.assertEqual([res.degree for res in residuals], [2, 3, 4, 5])


class FitTpaTests(SimpleTestCase):

    def test_self_fit_recovers_parameters(self):
        dist = exact_table(TpaParams(17, 1.4, 2), np.arange(2, 300))
        report = fit_tpa(dist, FitConfig())
        self.assertEqual(report.model_id, ModelId.TPA)
        self.assertEqual(report.params.a2, 17)
        self.assertAlmostEqual(report.params.w, 1.4, delta=1e-6)
        self.assertGreaterEqual(report.r_squared, 1 - 1e-9)
        self.assertLessEqual(report.sse_log_ccdf, report.grid_min_sse)

    def test_geometric_data_selects_smallest_threshold(self):
        dist = geometric_table(0.6, 2, 40)
        report = fit_tpa(dist, FitConfig())
        self.assertEqual(report.params.a2, 2)
        self.assertAlmostEqual(report.params.a2 / (report.params.a2 + report.params.w), 0.6, delta=1e-6)

    def test_deterministic_across_thread_counts(self):
        dist = exact_table(TpaParams(40, 0.9, 2), np.arange(2, 400))
        config = dict(grid_density=12, refine_iterations=30)
        single = fit_tpa(dist, FitConfig(threads=1, **config))
        pooled = fit_tpa(dist, FitConfig(threads=4, **config))
        self.assertEqual(single.params, pooled.params)
        self.assertEqual(single.sse_log_ccdf, pooled.sse_log_ccdf)
        self.assertEqual(single.residuals, pooled.residuals)

    def test_insufficient_data(self):
        hist = DegreeHistogram(((2, 5), (3, 3), (4, 1)))
        with self.assertRaises(InsufficientDataError):
            fit_tpa(truncate_renormalize(hist, 2), FitConfig())

    def test_count_weighting_needs_counts(self):
        dist = exact_table(TpaParams(17, 1.4, 2), np.arange(2, 100))
        with self.assertRaises(InvalidParameterError):
            fit_tpa(dist, FitConfig(weighting='counts', grid_density=4))

    def test_count_weighting_on_histogram(self):
        counts = {x: int(round(1e6 * 0.5 ** (x - 1))) for x in range(1, 15)}
        dist = truncate_renormalize(DegreeHistogram.from_counts(counts), 1)
        report = fit_tpa(dist, FitConfig(weighting='counts', a2_range=(1, 50), grid_density=16))
        self.assertEqual(report.params.a2, 1)
        self.assertAlmostEqual(report.params.w, 1.0, delta=0.01)


class FitPledTests(SimpleTestCase):
    config = FitConfig(grid_density=16, c_range=(10.0, 1e4), refine_iterations=200)

    def test_self_fit_recovers_parameters(self):
        dist = exact_table(PledParams(1.63, 350.0, 2), np.arange(2, 2000))
        report = fit_pled(dist, self.config)
        self.assertEqual(report.model_id, ModelId.PLED)
        self.assertAlmostEqual(report.params.b, 1.63, delta=0.02)
        self.assertAlmostEqual(report.params.c, 350.0, delta=0.05 * 350)
        self.assertGreaterEqual(report.r_squared, 1 - 1e-6)

    def test_fit_model_dispatch(self):
        dist = exact_table(PledParams(1.63, 350.0, 2), np.arange(2, 2000))
        report = fit_model('pled', dist, self.config)
        self.assertEqual(report.model_id, ModelId.PLED)
        self.assertEqual(set(report.params_dict()), {'b', 'c'})

    def test_geometric_data_gives_zero_exponent(self):
        # exp(-1/20) per step is PLED with b = 0, c = 20
        dist = geometric_table(math.exp(-1 / 20), 2, 300)
        config = FitConfig(grid_density=16, b_range=(-0.5, 1.5), c_range=(2.0, 1e3), refine_iterations=200)
        report = fit_pled(dist, config)
        self.assertAlmostEqual(report.params.b, 0.0, delta=0.05)
        self.assertAlmostEqual(report.params.c, 20.0, delta=0.05 * 20)

    def test_refinement_stops_at_output_resolution(self):
        dist = exact_table(PledParams(1.63, 350.0, 2), np.arange(2, 500))
        config = FitConfig(grid_density=8, c_range=(10.0, 1e4), refine_iterations=100_000)
        with self.assertLogs('degrees', level='DEBUG') as logs:
            fit_pled(dist, config)
        rounds = [line for line in logs.output if 'PLED round' in line]
        self.assertLess(len(rounds), 400)

    def test_non_finite_everywhere_is_a_search_failure(self):
        # with c <= 2 the ccdf at degree 5000 underflows to zero at every grid point
        hist = DegreeHistogram(((2, 50), (3, 20), (4, 10), (5, 5), (6, 2), (5000, 1)))
        dist = truncate_renormalize(hist, 2)
        config = FitConfig(grid_density=2, b_range=(0.5, 1.0), c_range=(1.0, 2.0), refine_iterations=1)
        with self.assertRaises(SearchFailureError):
            fit_pled(dist, config)


class ReportTests(SimpleTestCase):

    def test_params_dict_labels(self):
        dist = exact_table(TpaParams(17, 1.4, 2), np.arange(2, 300))
        report = fit_tpa(dist, FitConfig(grid_density=8))
        values = report.params_dict()
        self.assertEqual(set(values), {'a2', 'w', 'gamma'})
        self.assertAlmostEqual(values['gamma'], 1 + values['w'])
        self.assertTrue(math.isfinite(report.sse_log_ccdf))
        self.assertGreater(report.evaluations, 64)
