import json

import pytest

import gigadc.cli as cli
import gigadc.report as report_mod
from gigadc.errors import ConfigError
from gigadc.report import emit, emit_csv, report_json_bytes, run
from gigadc.scenario import load_scenario, parse_scenario, scenario_hash

SMALL_RAW = {
    "schema_version": 1,
    "name": "small",
    "budget_usd": 1e11,
    "compute_fraction": 0.7,
    "models": ["dense-100t"],
    "sweep": {"axis": "scale-out", "values_gbps": [400, 800, 1600]},
    "topology": {"hosts": 4096, "rails": 4, "planes": 4},
    "flowsim": {"hosts": 64, "tiers": 2, "radix": 16, "link_gbps": 100,
                "flow_size_bytes": 2e6, "participation": 1.0,
                "trials": 5, "seed": 7},
    "inference": {"table": "100t", "tokens": [512, 2048]},
}


class TestScenarioParsing:
    def test_builtin_scenarios_load(self):
        dense = load_scenario("paper-dense")
        moe = load_scenario("paper-moe")
        assert dense.name == "paper-dense"
        assert [n for n, _ in moe.models] == ["moe-8x17t"]
        assert dense.hash != moe.hash

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_scenario({"schema_version": 1, "modles": ["dense-100t"]})

    def test_unknown_nested_key_names_section(self):
        with pytest.raises(ConfigError, match="network"):
            parse_scenario({"schema_version": 1,
                            "network": {"scale_up_gpbs": 800}})

    def test_schema_version_required(self):
        with pytest.raises(ConfigError, match="schema_version"):
            parse_scenario({"name": "x"})
        with pytest.raises(ConfigError, match="schema_version"):
            parse_scenario({"schema_version": 2})

    def test_network_overrides_fold_into_hardware(self):
        s = parse_scenario({"schema_version": 1,
                            "network": {"scale_up_gbps": 800,
                                        "scale_out_gbps": 400}})
        assert s.hardware.accelerator.scale_up_bw == 1e11
        assert s.hardware.accelerator.scale_out_bw == 5e10

    def test_hash_is_stable_and_content_sensitive(self):
        a = scenario_hash(SMALL_RAW)
        b = scenario_hash(json.loads(json.dumps(SMALL_RAW)))
        assert a == b
        changed = dict(SMALL_RAW, budget_usd=2e11)
        assert scenario_hash(changed) != a

    def test_missing_file_and_unknown_builtin(self):
        with pytest.raises(ConfigError, match="neither"):
            load_scenario("no-such-scenario")

    def test_json_error_carries_line(self, tmp_path):
        bad = tmp_path / "bad.scenario"
        bad.write_text('{"schema_version": 1,,}')
        with pytest.raises(ConfigError, match="line"):
            load_scenario(str(bad))

    def test_bad_scaling_law(self):
        with pytest.raises(ConfigError, match="scaling"):
            parse_scenario({"schema_version": 1, "scaling_law": "chinchilla-9"})


class TestRun:
    def test_shipped_dense_anchors(self):
        rep = run(load_scenario("paper-dense"), sections=("models",))
        model = rep["models"]["dense-100t"]
        assert model["parallelism"]["dp_replicas_total"] == 696
        assert abs(model["step_time"]["exposed_fraction"] - 0.05) < 0.015

    def test_shipped_moe_anchors(self):
        rep = run(load_scenario("paper-moe"), sections=("models",))
        st = rep["models"]["moe-8x17t"]["step_time"]
        assert abs(st["exposed_fraction"] - 0.20) < 0.02
        stage2 = st["dp_stages"][1]
        assert abs(stage2["time_s"] * 1e3 - 112) < 1.5
        assert abs(stage2["masked_s"] * 1e3 - 90) <= 3.0

    def test_report_is_versioned_and_hashed(self):
        rep = run(parse_scenario(dict(SMALL_RAW)), sections=())
        assert rep["schema_version"] == 1
        assert rep["tool_version"]
        assert len(rep["scenario"]["hash"]) == 16

    def test_sections_select_work(self):
        rep = run(parse_scenario(dict(SMALL_RAW)), sections=("topology",))
        assert "topology" in rep and "sweep" not in rep and "flowsim" not in rep

    def test_no_sweep_key_when_absent(self):
        raw = {k: v for k, v in SMALL_RAW.items() if k != "sweep"}
        rep = run(parse_scenario(raw), sections=("sweep", "models"))
        assert "sweep" not in rep

    def test_full_run_deterministic_bytes(self):
        a = report_json_bytes(run(parse_scenario(dict(SMALL_RAW))))
        b = report_json_bytes(run(parse_scenario(json.loads(json.dumps(SMALL_RAW)))))
        assert a == b


class TestEmit:
    def test_json_round_trip(self, tmp_path):
        rep = run(parse_scenario(dict(SMALL_RAW)), sections=("topology",))
        path = tmp_path / "report.json"
        emit(rep, "json", str(path))
        assert json.loads(path.read_text()) == rep

    def test_csv_sweep_rows(self, tmp_path):
        rep = run(parse_scenario(dict(SMALL_RAW)), sections=("sweep",))
        path = tmp_path / "sweep.csv"
        emit(rep, "csv", str(path))
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 1 + 3  # header + one row per swept value
        assert lines[0].startswith("axis_name,axis_value_bps,model,")

    def test_unwritable_path_raises_oserror(self, tmp_path):
        rep = {"schema_version": 1}
        with pytest.raises(OSError):
            emit(rep, "json", str(tmp_path / "missing-dir" / "x.json"))

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ConfigError):
            emit({}, "yaml", str(tmp_path / "x"))

    def test_atomic_leaves_no_temp_files(self, tmp_path):
        emit({"schema_version": 1, "x": 1.5}, "json", str(tmp_path / "r.json"))
        assert sorted(p.name for p in tmp_path.iterdir()) == ["r.json"]

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="non-finite"):
            emit({"x": float("inf")}, "json", str(tmp_path / "r.json"))

    def test_csv_bytes_deterministic(self, tmp_path):
        rows = report_mod.flow_records(SMALL_RAW["flowsim"])
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(rows, report_mod.FLOW_COLUMNS, str(a))
        emit_csv(report_mod.flow_records(SMALL_RAW["flowsim"]),
                 report_mod.FLOW_COLUMNS, str(b))
        assert a.read_bytes() == b.read_bytes()


class TestCli:
    def test_plan_writes_report(self, tmp_path, capsys):
        out = tmp_path / "plan.json"
        rc = cli.main(["plan", "--scenario", "paper-dense", "--quiet",
                       "--out", str(out)])
        assert rc == 0
        rep = json.loads(out.read_text())
        assert rep["models"]["dense-100t"]["parallelism"]["tensor_degree"] == 18

    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = cli.main(["sweep", "--scenario", "paper-moe", "--axis", "scale-out",
                       "--values", "400,800", "--quiet", "--format", "csv",
                       "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 3

    def test_topo_table(self, tmp_path, capsys):
        rc = cli.main(["topo", "--scenario", "paper-dense", "--hosts", "4096",
                       "--rails", "4", "--planes", "4"])
        assert rc == 0
        assert "fat-tree" in capsys.readouterr().out

    def test_facility_prints_area_note(self, capsys):
        rc = cli.main(["facility", "--scenario", "paper-dense"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "households" in out
        assert "2.41e9" in out or "factor of 1000" in out

    def test_infer_defaults(self, capsys):
        rc = cli.main(["infer", "--scenario", "paper-moe", "--table", "50t",
                       "--tokens", "512"])
        assert rc == 0
        assert "tok/s" in capsys.readouterr().out

    def test_config_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.scenario"
        bad.write_text(json.dumps({"schema_version": 1, "bogus_key": 1}))
        rc = cli.main(["plan", "--scenario", str(bad), "--quiet"])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_infeasible_exit_3(self, tmp_path, capsys):
        tiny = tmp_path / "tiny.scenario"
        tiny.write_text(json.dumps({"schema_version": 1, "budget_usd": 1e6}))
        rc = cli.main(["plan", "--scenario", str(tiny), "--quiet"])
        assert rc == 3
        assert "infeasible" in capsys.readouterr().err

    def test_io_error_exit_1(self, tmp_path, capsys):
        rc = cli.main(["plan", "--scenario", "paper-dense", "--quiet",
                       "--out", str(tmp_path / "nope" / "x.json")])
        assert rc == 1

    def test_flowsim_with_flow_csv(self, tmp_path):
        small = tmp_path / "fs.scenario"
        small.write_text(json.dumps({
            "schema_version": 1,
            "flowsim": {"hosts": 64, "tiers": 2, "radix": 16, "link_gbps": 100,
                        "flow_size_bytes": 2e6, "trials": 3, "seed": 5},
        }))
        flows = tmp_path / "flows.csv"
        rc = cli.main(["flowsim", "--scenario", str(small), "--quiet",
                       "--flows-csv", str(flows)])
        assert rc == 0
        header = flows.read_text().split("\n", 1)[0]
        assert header == "policy,participation,trial,flow_id,fct_s,inflation"
