import numpy as np
import pytest

from roughscale.acsr import select_tau_max
from roughscale.dataio import MarketSeries
from roughscale.errors import DataError, ParameterError
from roughscale.experiments import (
    BucketCorrelation,
    GridConfig,
    GridRecord,
    GridResult,
    RBergomiBase,
    bucket_correlations,
    empirical_h_experiment,
    grid_mean_matrix,
    real_data_pipeline,
    synthetic_grid,
)
from roughscale.ghe import estimate_scaling, estimate_scaling_from_returns
from roughscale.pathgen import RBergomiParams, simulate_rbergomi
from roughscale.rng import substream

FAST = dict(n_steps=1200, tau_max_value=100)


def small_config(**overrides):
    kwargs = dict(
        h_values=(0.1, 0.4),
        lambda_values=(-0.5, 0.5),
        replications=2,
        base_seed=11,
        **FAST,
    )
    kwargs.update(overrides)
    return GridConfig(**kwargs)


class TestSyntheticGrid:
    def test_shape_complete(self):
        result = synthetic_grid(small_config(replications=3))
        assert len(result.records) == 2 * 2 * 3
        assert result.failures == ()
        keys = {(r.h_index, r.lambda_index, r.replication) for r in result.records}
        assert len(keys) == 12

    def test_worker_counts_agree(self):
        config = small_config()
        serial = synthetic_grid(config, workers=1)
        parallel = synthetic_grid(config, workers=2)
        assert serial.records == parallel.records

    def test_reruns_identical(self):
        config = small_config()
        a = synthetic_grid(config)
        b = synthetic_grid(config)
        assert a.records == b.records

    def test_cell_failures_recorded_not_fatal(self):
        # tau_max too close to the series length fails every cell's estimate
        config = small_config(n_steps=220, tau_max_value=200)
        result = synthetic_grid(config)
        assert result.records == ()
        assert len(result.failures) == 8
        assert "increments" in result.failures[0].message

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            small_config(h_values=())
        with pytest.raises(ParameterError):
            small_config(h_values=(0.0, 0.5))
        with pytest.raises(ParameterError):
            small_config(lambda_values=(-2.0,))
        with pytest.raises(ParameterError):
            small_config(replications=0)
        with pytest.raises(ParameterError):
            small_config(tau_max_mode="guess")

    def test_acsr_mode_selects_per_cell(self):
        config = small_config(h_values=(0.1,), lambda_values=(0.0,),
                              replications=1, tau_max_mode="acsr")
        result = synthetic_grid(config)
        assert len(result.records) == 1
        assert 5 <= result.records[0].tau_max_used <= 1200 // 4

    def test_mean_matrix_layout(self):
        result = synthetic_grid(small_config())
        matrix = grid_mean_matrix(result, "b_price")
        assert matrix.shape == (2, 2)
        sub = [r.b_price for r in result.records
               if r.h_index == 0 and r.lambda_index == 1]
        assert matrix[0, 1] == pytest.approx(np.mean(sub))


def synthetic_records(h_values, reps, maker):
    """Build a GridResult by hand with prescribed estimate pairs."""
    records = []
    for hi, h in enumerate(h_values):
        for rep in range(reps):
            for li, (x, y) in enumerate(maker(h, rep)):
                records.append(GridRecord(
                    h_index=hi, lambda_index=li, replication=rep,
                    hurst=h, lam=0.0, tau_max_used=100,
                    h_vol=x, b_vol=0.0, h_price=0.5, b_price=y,
                    p_vol=1.0, p_price=1.0,
                ))
    config = GridConfig(h_values=tuple(h_values), lambda_values=(0.0,) * 4,
                        replications=reps, n_steps=1200)
    return GridResult(config=config, records=tuple(records), failures=())


class TestBucketCorrelations:
    def test_exact_positive_dependence(self):
        def maker(h, rep):
            base = np.array([0.0, 1.0, 2.0, 3.0]) + rep
            return [(h + 0.01 * v, 0.05 * (h + 0.01 * v)) for v in base]

        result = synthetic_records([0.05, 0.15], 3, maker)
        buckets = bucket_correlations(result, "h_vol", "b_price")
        assert len(buckets) == 2
        for b in buckets:
            assert b.pearson_mean == pytest.approx(1.0)
            assert b.spearman_mean == pytest.approx(1.0)
            assert not b.insufficient

    def test_insufficient_bucket_marked(self):
        def maker(h, rep):
            return [(h, 0.0), (h, 0.1)]  # constant x: no correlation defined

        records = []
        for rep in range(2):
            for li, (x, y) in enumerate(maker(0.05, rep)):
                records.append(GridRecord(0, li, rep, 0.05, 0.0, 100,
                                          x, 0.0, 0.5, y, 1.0, 1.0))
        config = GridConfig(h_values=(0.05,), lambda_values=(0.0, 0.0),
                            replications=2, n_steps=1200)
        result = GridResult(config=config, records=tuple(records), failures=())
        buckets = bucket_correlations(result)
        assert buckets[0].insufficient

    def test_pooled_mode(self):
        def maker(h, rep):
            rng = substream(1000 + int(h * 100), rep)
            xs = rng.standard_normal(4)
            return [(h + 0.01 * x, 0.05 * x + 0.001 * rng.standard_normal())
                    for x in xs]

        result = synthetic_records([0.05], 5, maker)
        pooled = bucket_correlations(result, pool_replications=True)
        assert pooled[0].pearson_mean > 0.9
        assert pooled[0].pearson_pvalue < 0.01

    def test_bucket_edges_follow_half_open_convention(self):
        def maker(h, rep):
            return [(h + 0.001 * k, 0.001 * k) for k in range(4)]

        result = synthetic_records([0.1, 0.2], 2, maker)
        buckets = bucket_correlations(result)
        assert buckets[0].low == pytest.approx(0.0)
        assert buckets[0].high == pytest.approx(0.1)
        assert buckets[1].low == pytest.approx(0.1)

    def test_estimate_name_validation(self):
        result = synthetic_records([0.1], 2, lambda h, r: [(h, 0.0)] * 4)
        with pytest.raises(ParameterError):
            bucket_correlations(result, "h_volatility", "b_price")

    def test_multi_h_bucket_shows_positive_low_h_dependence(self):
        # with several roughness inputs inside one bucket, the between-input
        # effect dominates: rougher volatility goes with stronger price
        # multiscaling, so the bucket correlation is clearly positive at
        # low hurst (single-input buckets see only the weak within-cell
        # sampling coupling and cannot express this)
        config = GridConfig(
            h_values=(0.02, 0.05, 0.08), lambda_values=(0.0,),
            replications=20, n_steps=5000, base_seed=7,
        )
        result = synthetic_grid(config, workers=2)
        bucket = bucket_correlations(result, "h_vol", "b_price", 0.1)[0]
        assert bucket.pearson_mean > 0.3
        assert bucket.pearson_pvalue < 0.01


class TestEmpiricalH:
    def test_single_lambda_single_rep_shape(self):
        res = empirical_h_experiment(
            h_list=(0.08, 0.1, 0.12, 0.09, 0.11),
            tau_max_list=(100,) * 5,
            lambda_values=(0.0,),
            replications=1,
            n_steps=1200,
            base_seed=3,
        )
        assert res.pearson_by_rep.shape == (1, 1)
        assert len(res.records) == 5
        assert np.isfinite(res.pearson_mean[0])

    def test_misaligned_lists_rejected(self):
        with pytest.raises(ParameterError):
            empirical_h_experiment(
                h_list=(0.1,) * 30, tau_max_list=(100,) * 31,
                lambda_values=(0.0,), replications=1,
            )

    def test_deterministic_across_workers(self):
        kwargs = dict(
            h_list=(0.08, 0.1, 0.12), tau_max_list=(100,) * 3,
            lambda_values=(-0.5, 0.5), replications=2, n_steps=1200,
            base_seed=5,
        )
        a = empirical_h_experiment(**kwargs, workers=1)
        b = empirical_h_experiment(**kwargs, workers=2)
        assert a.records == b.records
        np.testing.assert_array_equal(a.pearson_by_rep, b.pearson_by_rep)


def toy_library(n_symbols=5, n_steps=1500, seed=42):
    dates = np.busday_offset(np.datetime64("2010-01-04"), np.arange(n_steps),
                             roll="forward").astype("datetime64[D]")
    lib = {}
    for i in range(n_symbols):
        params = RBergomiParams(hurst=0.08 + 0.02 * i, n_steps=n_steps, seed=seed)
        pair = simulate_rbergomi(params, substream(seed, 50, i))
        noise = substream(seed, 51, i).standard_normal(n_steps)
        symbol = f"IDX{i}"
        lib[symbol] = MarketSeries(
            symbol=symbol,
            dates=dates,
            close_price=pair.price[1:],
            open_to_close=np.diff(np.log(pair.price)),
            rv10=pair.variance[1:] * np.exp(0.2 * noise - 0.02),
            rv5=pair.variance[1:],
        )
    return lib


@pytest.fixture(scope="module")
def library():
    return toy_library()


class TestRealDataPipeline:
    def test_rows_and_dependence(self, library):
        result = real_data_pipeline(library, proxy_test="line-fit", workers=2)
        assert len(result.rows) == 5
        assert result.failures == {}
        assert set(result.outlier_sets) == {"rv10", "rv5"}
        assert -1.0 <= result.dependence.raw_pearson.coefficient <= 1.0

    def test_composition_matches_manual_steps(self, library):
        result = real_data_pipeline(library, proxy_test="line-fit")
        series = library["IDX2"]
        fit = select_tau_max(series.open_to_close)
        price_rep = estimate_scaling_from_returns(
            series.open_to_close, fit.tau_star, proxy_test="line-fit"
        )
        vol_rep = estimate_scaling(series.rv10, fit.tau_star,
                                   proxy_test="line-fit")
        row = next(r for r in result.rows if r.symbol == "IDX2")
        assert row.tau_star == fit.tau_star
        assert row.h_price == price_rep.hurst
        assert row.b_price == price_rep.multiscaling_proxy
        assert row.h_vol == vol_rep.hurst
        assert row.b_vol == vol_rep.multiscaling_proxy

    def test_close_to_close_return_kind(self, library):
        result = real_data_pipeline(library, return_kind="close_to_close",
                                    proxy_test="line-fit")
        assert len(result.rows) == 5

    def test_failures_listed_and_survivors_used(self, library):
        broken = dict(library)
        dates = library["IDX0"].dates
        broken["BAD"] = MarketSeries(
            symbol="BAD", dates=dates,
            close_price=np.ones(dates.size),  # constant: ACF undefined
            open_to_close=np.zeros(dates.size),
            rv10=np.ones(dates.size),
            rv5=np.ones(dates.size),
        )
        result = real_data_pipeline(broken, proxy_test="line-fit")
        assert "BAD" in result.failures
        assert len(result.rows) == 5

    def test_empty_dataset_rejected(self):
        with pytest.raises(DataError):
            real_data_pipeline({})

    def test_deterministic(self, library):
        a = real_data_pipeline(library, proxy_test="line-fit")
        b = real_data_pipeline(library, proxy_test="line-fit", workers=2)
        assert a.rows == b.rows
        assert a.outlier_sets == b.outlier_sets
        assert (a.dependence.robust_pearson.coefficient
                == b.dependence.robust_pearson.coefficient)
