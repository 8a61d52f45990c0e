import json

import pytest

from fbmvar.errors import ConfigError, RegimeError
from fbmvar.experiments import (
    ExperimentConfig,
    run_clt,
    run_conjecture_quarter,
    run_corollary,
    run_critical_high,
    run_experiment,
    run_noncentral,
    run_small_h,
    run_trapezoid,
)


def small_cfg(**kw):
    base = dict(
        experiment_id="clt",
        hurst=0.5,
        order=3,
        weight="one",
        levels=(8, 10),
        replicates=400,
        master_seed=1,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            small_cfg(replicates=50)
        with pytest.raises(ConfigError):
            small_cfg(levels=(10, 8))
        with pytest.raises(ConfigError):
            small_cfg(experiment_id="bogus")

    def test_default_levels(self):
        cfg = ExperimentConfig("trapezoid", hurst=0.5, order=2, replicates=100)
        assert cfg.levels == (6, 8, 10, 12, 14)

    def test_threads_not_in_canonical_config(self):
        assert "threads" not in small_cfg(threads=4).canonical_dict()


class TestRegimeContracts:
    def test_small_h_mismatch(self):
        with pytest.raises(RegimeError):
            run_small_h(small_cfg(experiment_id="small_h", hurst=0.3, order=2))

    def test_clt_mismatch_at_critical(self):
        with pytest.raises(RegimeError):
            run_clt(small_cfg(hurst=0.75, order=2))

    def test_critical_high_mismatch(self):
        with pytest.raises(RegimeError):
            run_critical_high(small_cfg(experiment_id="critical_high", hurst=0.74, order=2))

    def test_noncentral_mismatch(self):
        with pytest.raises(RegimeError):
            run_noncentral(small_cfg(experiment_id="noncentral", hurst=0.75, order=2))

    def test_conjecture_mismatch(self):
        with pytest.raises(RegimeError):
            run_conjecture_quarter(
                small_cfg(experiment_id="conjecture_quarter", hurst=0.3, order=2)
            )

    def test_corollary_parity(self):
        with pytest.raises(RegimeError):
            run_corollary(
                small_cfg(experiment_id="corollary", hurst=0.6, order=3,
                          corollary_item=4)
            )
        with pytest.raises(RegimeError):
            run_corollary(small_cfg(experiment_id="corollary", hurst=0.4, order=3))


class TestDeterminism:
    def test_reports_byte_identical(self):
        cfg = small_cfg()
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        assert a.to_json() == b.to_json()

    def test_thread_count_does_not_change_report(self):
        serial = run_experiment(small_cfg())
        parallel = run_experiment(small_cfg(threads=2))
        assert serial.to_json() == parallel.to_json()

    def test_wall_clock_excluded_from_json(self):
        rep = run_experiment(small_cfg())
        assert rep.wall_clock_seconds is not None
        assert "wall_clock" not in rep.to_json()
        payload = json.loads(rep.to_json())
        assert payload["schema"] == "fbmvar-report/1"


class TestCltExperiment:
    def test_brownian_unweighted(self):
        # H = 1/2, f == 1: Var(2^(-n/2) V_n) = 1/q! exactly at every level
        rep = run_clt(small_cfg(replicates=3000))
        assert rep.verdict == "PASS"
        assert rep.summary["sigma2"] == pytest.approx(1 / 6, rel=1e-12)
        assert rep.summary["variance_rel_err"] < 0.05
        assert rep.summary["ks_p"] > 0.01
        assert all("variance_se" in e for e in rep.levels)

    def test_weighted_slope(self):
        rep = run_clt(
            small_cfg(hurst=0.6, order=2, weight="cos:1.0", levels=(11,),
                      replicates=3000, master_seed=3, slope_rtol=0.15)
        )
        assert rep.verdict == "PASS"
        assert rep.levels[-1]["statistic"] == "conditional_variance_slope"


class TestSmallH:
    def test_decreasing_distance(self):
        rep = run_small_h(
            ExperimentConfig(
                "small_h", hurst=0.1, order=3, weight="cos:1.0",
                levels=(5, 6, 7, 8, 9, 10), replicates=800, master_seed=6,
            )
        )
        # (0.1, 3): squared distance decays like 2^(-0.4 n): 5 doublings = 4x
        assert rep.verdict == "PASS"
        stats = [e["stat"] for e in rep.levels]
        assert stats[-1] < stats[0]


class TestTrapezoid:
    def test_brownian_square(self):
        # H = 1/2, f = x^2: classical midpoint identity, fast convergence
        rep = run_trapezoid(
            ExperimentConfig(
                "trapezoid", hurst=0.5, order=2, weight="poly:0,0,1",
                levels=(6, 8, 10, 12), replicates=400, master_seed=8,
            )
        )
        assert rep.verdict == "PASS"
        assert rep.summary["arm"] == "convergence"

    def test_counterexample_arm_detected(self):
        rep = run_trapezoid(
            ExperimentConfig(
                "trapezoid", hurst=1 / 6, order=2, weight="poly:0,0,0,1",
                levels=(6, 8, 10), replicates=400, master_seed=9,
            )
        )
        assert rep.summary["arm"] == "counterexample"
        assert rep.verdict == "PASS"


class TestNoncentral:
    def test_identity_weight(self):
        rep = run_noncentral(
            ExperimentConfig(
                "noncentral", hurst=0.9, order=2, weight="one",
                levels=(6, 7), replicates=150, master_seed=10,
            )
        )
        assert rep.verdict == "PASS"
        assert rep.summary["identity_max_sq"] <= 1e-24

    def test_coupled_distance_decreases(self):
        rep = run_noncentral(
            ExperimentConfig(
                "noncentral", hurst=0.9, order=2, weight="cos:1.0",
                levels=(5, 6, 7, 8), replicates=300, master_seed=11,
            )
        )
        assert rep.verdict == "PASS"
        rels = [e["stat"] for e in rep.levels]
        assert rels[-1] < 0.15


class TestCorollary:
    def test_item_detection(self):
        cfg = small_cfg(experiment_id="corollary", hurst=0.9, order=2)
        rep = run_corollary(
            ExperimentConfig(
                "corollary", hurst=0.9, order=2, weight="one",
                levels=(5, 6), replicates=150, master_seed=12, fine_offset=5,
            )
        )
        assert rep.summary["item"] == 6

    def test_item4_brownian_collapse(self):
        rep = run_corollary(
            ExperimentConfig(
                "corollary", hurst=0.5, order=2, weight="one",
                levels=(10,), replicates=4000, master_seed=13,
            )
        )
        assert rep.verdict == "PASS"
        assert rep.summary["sigma_tilde2"] == pytest.approx(2.0, rel=1e-12)

    def test_item5_arbitration_q4(self):
        # at q = 4 the printed and pattern-consistent constants differ; the
        # empirical variance picks out the corrected one
        rep = run_corollary(
            ExperimentConfig(
                "corollary", hurst=0.75, order=4, weight="one",
                levels=(12,), replicates=2000, master_seed=14, slope_rtol=0.15,
            )
        )
        assert rep.verdict == "PASS"
        assert rep.summary["matched_variant"] == "corrected"
        assert not rep.summary["matches"]["printed"]

    def test_item1_odd_q(self):
        rep = run_corollary(
            ExperimentConfig(
                "corollary", hurst=0.7, order=3, weight="cos:1.0",
                levels=(6, 8, 10), replicates=600, master_seed=15,
            )
        )
        assert rep.summary["item"] == 1
        assert rep.verdict == "PASS"


class TestConjecture:
    def test_q3_runs_flagged(self):
        rep = run_conjecture_quarter(
            ExperimentConfig(
                "conjecture_quarter", hurst=1 / 6, order=3, weight="cos:1.0",
                levels=(9,), replicates=300, master_seed=16,
            )
        )
        assert "EXPLORATORY" in rep.flags
        assert "UNPROVEN" in rep.flags

    def test_q2_unweighted_variance(self):
        # f == 1 kills the drift: mean -> 0, variance -> sigma^2_{1/4,2}
        rep = run_conjecture_quarter(
            ExperimentConfig(
                "conjecture_quarter", hurst=0.25, order=2, weight="one",
                levels=(12,), replicates=3000, master_seed=17,
                variance_rtol=0.05,
            )
        )
        assert rep.verdict == "PASS"
        assert abs(rep.summary["drift_target"]) < 1e-15
        assert "EXPLORATORY" in rep.flags


def test_report_csv_and_tsv():
    rep = run_experiment(small_cfg())
    csv = rep.per_level_csv()
    assert csv.splitlines()[0].startswith("level,")
    tsv = rep.plot_tsv()
    assert tsv.splitlines()[0] == "n\tstat\tyerr"
    assert len(tsv.splitlines()) == 1 + len(rep.levels)
