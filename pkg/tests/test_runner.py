import math

import numpy as np
import pytest

from vlcfed import (
    ConfigError,
    SimConfig,
    build_config,
    generate_topology,
    load_config_file,
    make_synthetic,
    run_rf_only,
    usba,
)
from vlcfed.runner import (
    ExperimentError,
    emit_report,
    run_experiment,
    sweep_bandwidth,
    sweep_users,
)


@pytest.fixture
def small_setup():
    data = make_synthetic(120, seed=0)
    cfg = SimConfig(n_users=8, global_rounds=5, test_size=10)
    return cfg, data


class TestRunRfOnly:
    def test_single_outdoor_user_matches_hybrid(self):
        cfg = SimConfig(n_users=1, indoor_fraction=0.0)
        topo = generate_topology(cfg, seed=2)
        hy = usba(topo, cfg, "hybrid")
        rf = run_rf_only(topo, cfg)
        assert hy.selection == rf.selection
        assert hy.bandwidth == rf.bandwidth
        assert hy.converged == rf.converged

    def test_rf_only_never_beats_hybrid_at_defaults(self):
        cfg = SimConfig(n_users=40)
        for seed in range(6):
            topo = generate_topology(cfg, seed)
            assert run_rf_only(topo, cfg).selection.size <= usba(topo, cfg).selection.size


class TestRunExperiment:
    def test_record_count_and_order(self, small_setup):
        cfg, data = small_setup
        report = run_experiment(cfg, [3, 1], data, train=False)
        assert len(report.records) == 4
        assert [(r.seed, r.mode) for r in report.records] == [
            (3, "hybrid"),
            (3, "rf_only"),
            (1, "hybrid"),
            (1, "rf_only"),
        ]

    def test_training_populates_r2(self, small_setup):
        cfg, data = small_setup
        report = run_experiment(cfg, [0], data, modes=("hybrid",))
        rec = report.records[0]
        assert len(rec.r2_trace) == cfg.global_rounds
        assert rec.final_r2 == rec.r2_trace[-1]
        assert math.isfinite(rec.final_r2)

    def test_shard_size_follows_partition(self, small_setup):
        cfg, data = small_setup
        report = run_experiment(cfg, [0], data, train=False)
        # 120 rows - 10 test = 110; 110 // 8 = 13 samples/user
        assert report.records[0].objective % 13 == 0

    def test_errors_carry_seed_context(self, small_setup):
        cfg, data = small_setup
        bad = SimConfig(n_users=200, global_rounds=5)  # more users than rows
        with pytest.raises(ExperimentError, match="seed 7"):
            run_experiment(bad, [7], data, train=False)

    def test_requires_seeds(self, small_setup):
        cfg, data = small_setup
        with pytest.raises(ValueError):
            run_experiment(cfg, [], data)


class TestSweeps:
    def test_sweep_users_covers_grid(self, small_setup):
        cfg, data = small_setup
        report = sweep_users(cfg, [0], data, [4, 8], train=False)
        assert sorted({r.n_users for r in report.records}) == [4, 8]
        assert len(report.records) == 4

    def test_sweep_bandwidth_covers_grid(self, small_setup):
        cfg, data = small_setup
        pairs = [(10e6, 20e6), (20e6, 40e6)]
        report = sweep_bandwidth(cfg, [0], data, pairs, train=False)
        got = sorted({(r.rf_total_bandwidth_hz, r.vlc_total_bandwidth_hz) for r in report.records})
        assert got == sorted(pairs)


class TestEmitReport:
    def test_files_and_determinism(self, small_setup, tmp_path):
        cfg, data = small_setup
        report = run_experiment(cfg, [0, 1], data)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        paths1 = emit_report(report, str(out1))
        report2 = run_experiment(cfg, [0, 1], data)
        paths2 = emit_report(report2, str(out2))
        for key in ("records", "summary", "manifest"):
            a = open(paths1[key], "rb").read()
            b = open(paths2[key], "rb").read()
            assert a == b
        header = open(paths1["records"]).readline().strip().split(",")
        assert header[:3] == ["mode", "seed", "n_users"]
        lines = open(paths1["records"]).read().strip().splitlines()
        assert len(lines) == 1 + 4

    def test_summary_means(self, small_setup, tmp_path):
        cfg, data = small_setup
        report = run_experiment(cfg, [0, 1], data, train=False)
        paths = emit_report(report, str(tmp_path))
        rows = open(paths["summary"]).read().strip().splitlines()
        header = rows[0].split(",")
        by_mode = {}
        for line in rows[1:]:
            cells = dict(zip(header, line.split(",")))
            by_mode[cells["mode"]] = cells
        raw = {
            mode: np.mean([r.n_selected for r in report.records if r.mode == mode])
            for mode in ("hybrid", "rf_only")
        }
        for mode in raw:
            assert float(by_mode[mode]["mean_n_selected"]) == pytest.approx(raw[mode])
            assert int(by_mode[mode]["runs"]) == 2

    def test_empty_report_rejected(self, small_setup, tmp_path):
        cfg, data = small_setup
        report = run_experiment(cfg, [0], data, train=False)
        report.records = []
        with pytest.raises(ValueError):
            emit_report(report, str(tmp_path))


class TestConfigResolution:
    def test_validation_names_fields(self):
        with pytest.raises(ConfigError, match="optical_power_w"):
            SimConfig(optical_power_w=-2.0).validate()
        with pytest.raises(ConfigError, match="t_round_s"):
            SimConfig(t_round_s=0.0).validate()
        with pytest.raises(ConfigError, match="indoor_fraction"):
            SimConfig(indoor_fraction=1.5).validate()
        with pytest.raises(ConfigError, match="uplink_interference_w"):
            SimConfig(uplink_interference_w=-1e-12).validate()

    def test_table_defaults(self):
        cfg = SimConfig()
        assert cfg.optical_power_w == 9.0
        assert cfg.vlc_total_bandwidth_hz == 40e6
        assert cfg.pd_area_m2 == 1e-4
        assert cfg.half_intensity_angle_deg == 60.0
        assert cfg.filter_gain == 1.0
        assert cfg.fov_half_angle_deg == 90.0
        assert cfg.refractive_index == 1.5
        assert cfg.conversion_efficiency == 0.53
        assert cfg.vlc_noise_psd == 1e-21
        assert cfg.rf_noise_psd == 1e-21
        assert cfg.rf_total_bandwidth_hz == 20e6
        assert cfg.bs_tx_power_w == 1.0
        assert cfg.n_users == 50
        assert cfg.t_round_s == 2.5
        assert cfg.energy_budget_j == 2.0
        assert cfg.capacitance_coeff == 2e-28
        assert cfg.payload_bits == 1e6

    def test_file_and_cli_priority(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# comment\n"
            "n_users = 12\n"
            "t_round_s = 1.5\n"
            "cycles_per_sample_range = 1e4, 2e4\n"
            "initial_bandwidth = none\n"
        )
        overrides = load_config_file(str(path))
        assert overrides["n_users"] == 12
        assert overrides["cycles_per_sample_range"] == (1e4, 2e4)
        assert overrides["initial_bandwidth"] is None
        cfg = build_config(str(path), n_users=20)
        assert cfg.n_users == 20  # CLI overrides file
        assert cfg.t_round_s == 1.5  # file overrides defaults

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("frequencyy = 3\n")
        with pytest.raises(ConfigError, match="frequencyy"):
            load_config_file(str(path))
