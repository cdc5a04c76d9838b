"""
Tests for the simulation study: grid, generation, reporting scenarios,
per-dataset evaluation, aggregation and the grid runner.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest
from pydantic import ValidationError

from median_meta.errors import DomainError, EmptyInputError
from median_meta.estimators import summarize_sample
from median_meta.schema import (
    Approach,
    PooledEstimate,
    SkewLevel,
    Target,
)
from median_meta.simulation import (
    APE_CUTOFF,
    SIMULATED_COMBOS,
    PerformanceRecord,
    Scenario,
    ScalingStep,
    SimConfig,
    aggregate,
    approaches_for,
    assign_reporting,
    compare_weighted_unweighted,
    compute_scale_m,
    dataset_skewness,
    default_grid,
    draw_outcomes,
    draw_study_size,
    evaluate_dataset,
    generate_dataset,
    median_share,
    reporting_rates,
    run_config,
    run_grid,
    run_grid_async,
    summarize_factors,
    true_values,
)
from median_meta.simulation.config import format_variance
from median_meta.simulation.generation import MAX_STUDY_SIZE
from median_meta.stats.normality import looks_normal
from median_meta.stats.skewness import classify_skew
from tests.factories import means_study, quartile_study


def _config(**overrides) -> SimConfig:
    values = dict(
        k_studies=15,
        size_median=50,
        tau2=0.25,
        sigma2=0.25,
        scaling_step=ScalingStep.MEDIAN_IS_5,
        scenario=Scenario.ALL_MEDIANS_Q1Q3,
        replications=2,
        seed=11,
    )
    values.update(overrides)
    return SimConfig(**values)


def _record(**overrides) -> PerformanceRecord:
    values = dict(
        approach=Approach.MM,
        scenario=Scenario.ALL_MEDIANS_Q1Q3,
        scaling_step=ScalingStep.MEDIAN_IS_5,
        k_studies=15,
        size_median=50,
        tau2=0.25,
        sigma2=0.25,
        dataset_index=0,
        estimate=5.5,
        truth=5.0,
        pe=10.0,
        ape=10.0,
        sq_err=0.25,
        covered=True,
        ci_low=4.0,
        ci_high=6.0,
        mean_skb=0.15,
        skew_level=SkewLevel.MEDIUM,
    )
    values.update(overrides)
    return PerformanceRecord(**values)


class TestSimConfig:
    """Test SimConfig and the default grid."""

    def test_default_grid_size(self):
        grid = default_grid(replications=1)
        assert len(grid) == 2 * 2 * 13 * 2 * 4
        designs = {c.design for c in grid}
        assert len(designs) == 52

    def test_rejects_unknown_combo(self):
        with pytest.raises(ValidationError):
            _config(tau2=0.5, sigma2=0.5)

    def test_rejects_size_median(self):
        with pytest.raises(ValidationError):
            _config(size_median=75)

    def test_combos(self):
        assert len(SIMULATED_COMBOS) == 13
        assert (1 / 16, 4) not in SIMULATED_COMBOS

    def test_design_id_shared_across_step_and_scenario(self):
        a = _config()
        b = _config(
            scaling_step=ScalingStep.MEAN_IS_5,
            scenario=Scenario.MIXED,
        )
        c = _config(tau2=1.0, sigma2=1.0)
        assert a.design_id == b.design_id
        assert a.design_id != c.design_id

    def test_streams_independent(self):
        config = _config()
        first = config.data_rng(0).random(4)
        again = config.data_rng(0).random(4)
        other = config.data_rng(1).random(4)
        reporting = config.reporting_rng(0).random(4)
        assert np.array_equal(first, again)
        assert not np.array_equal(first, other)
        assert not np.array_equal(first, reporting)

    @pytest.mark.parametrize(
        ("step", "scenario", "expected"),
        [
            (
                ScalingStep.MEDIAN_IS_5,
                Scenario.MIXED,
                (Approach.MM, Approach.WM),
            ),
            (
                ScalingStep.MEAN_IS_5,
                Scenario.ALL_MEDIANS_Q1Q3,
                (Approach.T1_FE, Approach.T1_RE),
            ),
            (
                ScalingStep.MEAN_IS_5,
                Scenario.ALL_MEANS,
                (Approach.MEANS_FE, Approach.MEANS_RE),
            ),
            (
                ScalingStep.MEAN_IS_5,
                Scenario.MIXED,
                (
                    Approach.T1_FE,
                    Approach.T1_RE,
                    Approach.T2_FE,
                    Approach.T2_RE,
                ),
            ),
        ],
    )
    def test_approaches_for(self, step, scenario, expected):
        config = _config(scaling_step=step, scenario=scenario)
        assert approaches_for(config) == expected

    def test_format_variance(self):
        assert format_variance(1 / 16) == "1/16"
        assert format_variance(4.0) == "4"

    def test_label(self):
        assert "tau2=1/4" in _config().label


class TestGeneration:
    """Test study sizes, scaling and outcome draws."""

    @pytest.mark.parametrize("size_median", [50, 100])
    def test_study_size_window(self, rng, size_median):
        sizes = [draw_study_size(size_median, rng) for _ in range(2000)]
        assert min(sizes) >= 25
        assert max(sizes) <= MAX_STUDY_SIZE[size_median]
        assert abs(np.median(sizes) - size_median) < 0.2 * size_median

    def test_study_size_bad_median(self, rng):
        with pytest.raises(DomainError):
            draw_study_size(70, rng)

    @pytest.mark.parametrize(("tau2", "sigma2"), SIMULATED_COMBOS)
    def test_truth_targets(self, tau2, sigma2):
        median_truth = true_values(ScalingStep.MEDIAN_IS_5, tau2, sigma2)
        mean_truth = true_values(ScalingStep.MEAN_IS_5, tau2, sigma2)
        assert median_truth.true_median == pytest.approx(5.0)
        assert mean_truth.true_mean == pytest.approx(5.0)
        assert mean_truth.true_median < 5.0
        assert median_truth.true_mean > 5.0

    def test_scale_m(self):
        assert compute_scale_m(
            ScalingStep.MEAN_IS_5, 1.0, 1.0
        ) == pytest.approx(5 * math.exp(-1))

    def test_outcomes_proportional_to_m(self):
        sizes = [30, 40, 50]
        e1, a = draw_outcomes(
            5.0, 1.0, 0.25, sizes, np.random.default_rng(3)
        )
        e2, b = draw_outcomes(
            2.0, 1.0, 0.25, sizes, np.random.default_rng(3)
        )
        assert np.array_equal(e1, e2)
        assert [len(x) for x in a] == sizes
        for x, y in zip(a, b):
            assert np.allclose(x / y, 2.5)

    def test_outcome_median_matches_truth(self):
        rng = np.random.default_rng(8)
        for tau2, sigma2 in SIMULATED_COMBOS:
            _, samples = draw_outcomes(
                5.0, tau2, sigma2, [10] * 100_000, rng
            )
            pooled = np.concatenate(samples)
            assert np.median(pooled) == pytest.approx(5.0, rel=0.05)

    def test_negative_variance(self, rng):
        with pytest.raises(DomainError):
            draw_outcomes(5.0, -1.0, 1.0, [30], rng)

    def test_dataset(self):
        config = _config()
        dataset = generate_dataset(config, config.data_rng(0))
        assert len(dataset.studies) == 15
        assert dataset.summaries[0].id == "s01"
        assert dataset.summaries[-1].id == "s15"
        for study in dataset.studies:
            assert study.summary.n == len(study.raw)
            assert study.summary.has_quartiles
            assert study.summary.has_mean_se

    def test_dataset_reproducible(self):
        config = _config()
        a = generate_dataset(config, config.data_rng(1))
        b = generate_dataset(config, config.data_rng(1))
        for x, y in zip(a.studies, b.studies):
            assert np.array_equal(x.raw, y.raw)

    def test_steps_share_data_up_to_scale(self):
        median_cfg = _config()
        mean_cfg = _config(scaling_step=ScalingStep.MEAN_IS_5)
        a = generate_dataset(median_cfg, median_cfg.data_rng(0))
        b = generate_dataset(mean_cfg, mean_cfg.data_rng(0))
        ratio = a.m_scale / b.m_scale
        for x, y in zip(a.studies, b.studies):
            assert np.allclose(x.raw, y.raw * ratio)


class TestSkewOccupancy:
    """Skew cells follow the within-study variance alone."""

    EXPECTED = {
        1 / 16: SkewLevel.LOW,
        1 / 4: SkewLevel.MEDIUM,
        1.0: SkewLevel.HIGH,
        4.0: SkewLevel.VERY_HIGH,
    }

    def test_population_bowley_by_sigma2(self):
        # quartiles of a log-normal give tanh(z_0.75 * sigma / 2)
        z = 0.6744897501960817
        for sigma2, level in self.EXPECTED.items():
            skb = math.tanh(z * math.sqrt(sigma2) / 2)
            assert classify_skew(skb) is level

    def test_skewness_ignores_between_study_variance(self):
        sizes = [40, 120, 300] * 10
        means = []
        for tau2 in (1 / 16, 4.0):
            _, samples = draw_outcomes(
                5.0, tau2, 1.0, sizes, np.random.default_rng(8)
            )
            summaries = [
                summarize_sample(s, id=f"s{i}")
                for i, s in enumerate(samples)
            ]
            means.append(dataset_skewness(summaries))
        assert means[0] == pytest.approx(means[1], abs=1e-12)

    @pytest.mark.parametrize(("tau2", "sigma2"), SIMULATED_COMBOS)
    def test_modal_cell(self, tau2, sigma2):
        config = _config(
            k_studies=50, size_median=100, tau2=tau2, sigma2=sigma2
        )
        levels = Counter(
            classify_skew(
                dataset_skewness(
                    generate_dataset(config, config.data_rng(r)).summaries
                )
            )
            for r in range(30)
        )
        assert levels.most_common(1)[0][0] is self.EXPECTED[sigma2]

    def test_low_skew_observed_at_largest_tau2(self):
        config = _config(
            k_studies=50, size_median=100, tau2=4.0, sigma2=1 / 16
        )
        dataset = generate_dataset(config, config.data_rng(0))
        skb = dataset_skewness(dataset.summaries)
        assert classify_skew(skb) in (SkewLevel.LOW, SkewLevel.MEDIUM)

    def test_no_very_high_skew_at_smallest_tau2(self):
        sigma2s = [s for t, s in SIMULATED_COMBOS if t == 1 / 16]
        assert max(sigma2s) == 1 / 4


class TestReporting:
    """Test reporting scenarios."""

    @pytest.fixture
    def dataset(self):
        config = _config(k_studies=50, tau2=1.0, sigma2=1.0)
        return generate_dataset(config, config.data_rng(0))

    def test_quartiles(self, dataset, rng):
        reported = assign_reporting(
            dataset, Scenario.ALL_MEDIANS_Q1Q3, rng
        )
        for study in reported:
            assert study.has_quartiles
            assert not study.has_range
            assert not study.has_mean_se
        assert median_share(reported) == 1.0

    def test_range(self, dataset, rng):
        reported = assign_reporting(
            dataset, Scenario.ALL_MEDIANS_MINMAX, rng
        )
        assert all(
            s.has_range and not s.has_quartiles for s in reported
        )

    def test_means(self, dataset, rng):
        reported = assign_reporting(dataset, Scenario.ALL_MEANS, rng)
        assert all(s.has_mean_se and s.median is None for s in reported)
        assert median_share(reported) == 0.0

    def test_mixed(self, dataset, rng):
        reported = assign_reporting(dataset, Scenario.MIXED, rng)
        for generated, study in zip(dataset.studies, reported):
            if looks_normal(generated.raw):
                assert study.has_mean_se
            else:
                assert study.has_quartiles != study.has_range
        # sigma2 = 1 is strongly skewed
        assert median_share(reported) > 0.75

    def test_mixed_reproducible(self, dataset):
        a = assign_reporting(
            dataset, Scenario.MIXED, np.random.default_rng(5)
        )
        b = assign_reporting(
            dataset, Scenario.MIXED, np.random.default_rng(5)
        )
        assert a == b

    def test_median_share_empty(self):
        assert median_share([]) == 0.0


class TestEvaluation:
    """Test PerformanceRecord and evaluate_dataset."""

    def test_from_estimate(self):
        estimate = PooledEstimate(
            target=Target.MEDIAN,
            point=6.0,
            ci_low=4.5,
            ci_high=7.0,
            k=15,
        )
        record = PerformanceRecord.from_estimate(
            Approach.MM,
            estimate,
            5.0,
            _config(),
            dataset_index=3,
            mean_skb=0.3,
        )
        assert record.pe == pytest.approx(20.0)
        assert record.ape == pytest.approx(20.0)
        assert record.sq_err == pytest.approx(1.0)
        assert record.covered
        assert record.skew_level is SkewLevel.HIGH
        assert record.to_row()["approach"] == "MM"

    def test_skewness_from_quartiles(self):
        studies = [
            quartile_study("a", 40, 1.0, 2.0, 4.0),
            quartile_study("b", 40, 1.0, 2.0, 3.0),
            means_study("c", 40, 2.0, 0.1),
        ]
        assert dataset_skewness(studies) == pytest.approx(1 / 6)
        assert dataset_skewness([means_study("c", 40, 2.0, 0.1)]) is None

    def test_scores_each_approach(self):
        config = _config()
        dataset = generate_dataset(config, config.data_rng(0))
        reported = assign_reporting(
            dataset, config.scenario, config.reporting_rng(0)
        )
        truth = true_values(config.scaling_step, 0.25, 0.25)
        records = evaluate_dataset(
            reported, truth, approaches_for(config), config
        )
        assert [r.approach for r in records] == [
            Approach.MM,
            Approach.WM,
        ]
        assert all(r.truth == pytest.approx(5.0) for r in records)
        assert all(r.median_share == 1.0 for r in records)

    def test_means_scenario_binned_by_generated_skew(self):
        config = _config(
            scaling_step=ScalingStep.MEAN_IS_5,
            scenario=Scenario.ALL_MEANS,
        )
        dataset = generate_dataset(config, config.data_rng(0))
        reported = assign_reporting(
            dataset, config.scenario, config.reporting_rng(0)
        )
        truth = true_values(config.scaling_step, 0.25, 0.25)
        assert (
            evaluate_dataset(
                reported, truth, approaches_for(config), config
            )
            == []
        )
        records = evaluate_dataset(
            reported,
            truth,
            approaches_for(config),
            config,
            generated=dataset.summaries,
        )
        assert len(records) == 2
        assert records[0].truth == pytest.approx(5.0)

    def test_failing_approach_skipped(self):
        config = _config()
        reported = [
            quartile_study("a", 40, 1.0, 2.0, 4.0),
            quartile_study("b", 40, 1.0, 2.5, 3.0),
        ]
        truth = true_values(config.scaling_step, 0.25, 0.25)
        records = evaluate_dataset(
            reported,
            truth,
            (Approach.MEANS_FE, Approach.MM),
            config,
        )
        assert [r.approach for r in records] == [Approach.MM]


class TestAggregation:
    """Test aggregate, factor summaries, rates and MM/WM pairing."""

    def test_cells_cover_every_skew_level(self):
        records = [
            _record(dataset_index=i, ape=float(i), pe=float(i))
            for i in range(5)
        ]
        cells = aggregate(records)
        assert [c.skew_level for c in cells] == list(SkewLevel)
        observed = [c for c in cells if c.observed]
        assert len(observed) == 1
        cell = observed[0]
        assert cell.skew_level is SkewLevel.MEDIUM
        assert cell.n_datasets == 5
        assert cell.ape.med == 2.0
        assert cell.ape.q1 == 1.0
        assert cell.ape.q3 == 3.0
        assert cell.coverage == 1.0
        empty = cells[0]
        assert empty.ape is None
        assert empty.to_row()["ape_med"] is None

    def test_ape_cutoff(self):
        records = [
            _record(dataset_index=0, ape=10.0),
            _record(dataset_index=1, ape=APE_CUTOFF + 1, covered=False),
        ]
        cell = next(c for c in aggregate(records) if c.observed)
        assert cell.n_datasets == 1
        assert cell.coverage == 1.0

    def test_cutoff_leaving_nothing_gives_na(self):
        cells = aggregate([_record(ape=APE_CUTOFF * 2)])
        assert len(cells) == 4
        assert not any(c.observed for c in cells)

    def test_coverage_fraction(self):
        records = [
            _record(dataset_index=i, covered=i % 4 != 0)
            for i in range(8)
        ]
        cell = next(c for c in aggregate(records) if c.observed)
        assert cell.coverage == pytest.approx(0.75)

    def test_empty_records(self):
        assert aggregate([]) == []
        assert summarize_factors([]) == []
        assert reporting_rates([]) == []
        out = compare_weighted_unweighted([])
        assert [d.n_datasets for d in out] == [0, 0]
        assert out[0].mm_ape_med is None

    def test_heterogeneity_means_skip_missing(self):
        records = [
            _record(
                approach=Approach.T1_RE,
                dataset_index=i,
                tau2_hat=tau2_hat,
                i2=i2,
            )
            for i, (tau2_hat, i2) in enumerate(
                [(0.1, 20.0), (None, None), (0.3, 40.0)]
            )
        ]
        cell = next(c for c in aggregate(records) if c.observed)
        assert cell.mean_tau2_hat == pytest.approx(0.2)
        assert cell.mean_i2 == pytest.approx(30.0)
        assert aggregate([_record()])[1].mean_tau2_hat is None

    def test_cells_ordered_by_design(self):
        records = [
            _record(approach=Approach.WM, tau2=1.0, sigma2=1.0),
            _record(approach=Approach.MM, tau2=1.0, sigma2=1.0),
            _record(approach=Approach.MM),
        ]
        cells = aggregate(records)
        assert [(c.approach, c.tau2) for c in cells[::4]] == [
            (Approach.MM, 0.25),
            (Approach.MM, 1.0),
            (Approach.WM, 1.0),
        ]

    def test_factor_summaries(self):
        records = [
            _record(dataset_index=0, tau2=0.25, ape=2.0),
            _record(dataset_index=1, tau2=1.0, sigma2=1.0, ape=4.0),
        ]
        summaries = summarize_factors(records)
        tau = [s for s in summaries if s.factor == "tau2"]
        assert {s.level for s in tau} == {"0.25", "1"}
        k = [s for s in summaries if s.factor == "k_studies"]
        assert len(k) == 1
        assert k[0].n_datasets == 2
        assert k[0].ape_med == 3.0

    def test_reporting_rates_count_datasets_once(self):
        records = [
            _record(
                approach=approach,
                scenario=Scenario.MIXED,
                scaling_step=ScalingStep.MEAN_IS_5,
                dataset_index=i,
                median_share=share,
                skew_level=level,
            )
            for i, (share, level) in enumerate(
                [(1.0, SkewLevel.HIGH), (0.6, SkewLevel.LOW)]
            )
            for approach in (Approach.T1_FE, Approach.T2_RE)
        ]
        records.append(_record())
        rates = {
            (r.dimension, r.level): r
            for r in reporting_rates(records)
        }
        overall = rates[("overall", "all")]
        assert overall.n_datasets == 2
        assert overall.n_studies == 30
        assert overall.median_share == pytest.approx(0.8)
        assert rates[("skew_level", "High")].median_share == 1.0
        assert rates[
            ("skew_level", "Low")
        ].median_share == pytest.approx(0.6)

    def test_mm_wm_discrepancy(self):
        records = [
            _record(approach=Approach.MM, dataset_index=0, estimate=5.0),
            _record(
                approach=Approach.WM,
                dataset_index=0,
                estimate=11.0,
                ape=120.0,
            ),
            _record(approach=Approach.MM, dataset_index=1, ape=4.0),
            _record(approach=Approach.WM, dataset_index=1, ape=6.0),
            _record(approach=Approach.MM, dataset_index=2),
        ]
        out = {d.group: d for d in compare_weighted_unweighted(records)}
        assert out["wm_gt_2mm"].n_datasets == 1
        assert out["wm_gt_2mm"].wm_ape_med == 120.0
        assert out["other"].n_datasets == 1
        assert out["other"].mm_ape_med == 4.0

    def test_sort_key_orders_records(self):
        a = _record(dataset_index=1)
        b = replace(a, dataset_index=0)
        assert sorted([a, b], key=PerformanceRecord.sort_key) == [b, a]


class TestRunner:
    """Test run_config and the grid runner."""

    def test_run_config(self, small_config):
        records = run_config(small_config)
        assert len(records) == 3 * 2
        assert {r.dataset_index for r in records} == {0, 1, 2}

    def test_run_config_deterministic(self, small_config):
        a = [r.to_row() for r in run_config(small_config)]
        b = [r.to_row() for r in run_config(small_config)]
        assert a == b

    def test_result_independent_of_grid_order(self, small_config):
        other = small_config.model_copy(
            update={"scenario": Scenario.ALL_MEDIANS_MINMAX}
        )
        forward = run_grid([small_config, other])
        backward = run_grid([other, small_config])
        assert [r.to_row() for r in forward.records] == [
            r.to_row() for r in backward.records
        ]
        assert forward.n_configs == 2
        assert forward.dropped == 0

    def test_callback(self, small_config):
        seen = []
        run_grid(
            [small_config],
            on_config_done=lambda c, n: seen.append((c, n)),
        )
        assert seen == [(small_config, 6)]

    def test_cells(self, small_config):
        result = run_grid([small_config])
        # MM and WM, four skew levels each
        assert len(result.cells) == 8
        assert sum(c.n_datasets for c in result.cells) == 6

    def test_empty_grid(self):
        with pytest.raises(EmptyInputError):
            run_grid([])

    async def test_workers_give_same_records(self, small_config):
        grid = [
            small_config,
            small_config.model_copy(update={"seed": 8}),
        ]
        serial = await run_grid_async(grid, workers=1)
        parallel = await run_grid_async(grid, workers=2)
        assert [r.to_row() for r in serial.records] == [
            r.to_row() for r in parallel.records
        ]
