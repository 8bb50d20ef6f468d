import json

import pytest

from landalloc.cli import main
from landalloc.harness import (
    ExperimentConfig,
    ExperimentConfigError,
    build_engine_config,
    combined_front_entries,
    record_from_dict,
    record_to_json,
    run_experiment,
)
from landalloc.instance_io import GeneratorSpec, generate_synthetic, load_instance, save_instance


@pytest.fixture
def instance_path(tmp_path):
    inst = generate_synthetic(
        GeneratorSpec(grid_width=3, grid_height=3, use_count=3, floor_range=(1, 2), rng_seed=4)
    )
    return save_instance(inst, tmp_path / "inst.landalloc.json")


@pytest.fixture
def experiment_doc(instance_path, tmp_path):
    return {
        "instance": str(instance_path),
        "output": str(tmp_path / "bundle"),
        "seeds": [1, 2],
        "engines": [
            {
                "label": "CR+DES", "algorithm": "CR_DES",
                "population_size": 12, "generations": 10,
                "operators": {"mutation_plot_budget": 2},
            },
            {
                "label": "SOA", "algorithm": "SOA",
                "population_size": 12, "generations": 10,
                "soa_a": 0.5, "soa_b": 0.5,
            },
        ],
    }


@pytest.fixture
def config_path(experiment_doc, tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(experiment_doc))
    return path


class TestGenerateCommand:
    def test_writes_deterministic_file(self, tmp_path, capsys):
        out1 = tmp_path / "a.landalloc.json"
        out2 = tmp_path / "b.landalloc.json"
        assert main(["generate", "--grid", "2x1", "--uses", "2", "--seed", "7",
                     "--out", str(out1)]) == 0
        assert main(["generate", "--grid", "2x1", "--uses", "2", "--seed", "7",
                     "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert load_instance(out1).n_plots == 2

    def test_full_scale_grid(self, tmp_path):
        out = tmp_path / "big.landalloc.json"
        assert main(["generate", "--grid", "43x30", "--seed", "1", "--out", str(out)]) == 0
        assert load_instance(out).n_plots == 1290

    def test_invalid_grid_is_usage_error(self, tmp_path, capsys):
        rc = main(["generate", "--grid", "0x5", "--out", str(tmp_path / "x.json")])
        assert rc == 1
        assert "usage error" in capsys.readouterr().err

    def test_malformed_grid_is_usage_error(self, tmp_path):
        assert main(["generate", "--grid", "abc", "--out", str(tmp_path / "x.json")]) == 1

    def test_missing_subcommand_is_usage_error(self):
        assert main([]) == 1

    def test_spec_document_matches_flags(self, tmp_path):
        spec = {"grid_width": 2, "grid_height": 2, "use_count": 2, "rng_seed": 9}
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["generate", "--spec", str(spec_path), "--out", str(out1)]) == 0
        assert main(["generate", "--grid", "2x2", "--uses", "2", "--seed", "9",
                     "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_spec_document_flag_override(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"grid_width": 2, "grid_height": 2, "rng_seed": 1}))
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["generate", "--spec", str(spec_path), "--out", str(out1)]) == 0
        assert main(["generate", "--spec", str(spec_path), "--seed", "2",
                     "--out", str(out2)]) == 0
        assert out1.read_bytes() != out2.read_bytes()

    def test_spec_document_unknown_field_rejected(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"grid_width": 2, "grid_height": 2, "nope": 1}))
        assert main(["generate", "--spec", str(spec_path),
                     "--out", str(tmp_path / "x.json")]) == 1

    def test_grid_required_without_spec(self, tmp_path):
        assert main(["generate", "--out", str(tmp_path / "x.json")]) == 1


class TestRunCommand:
    def test_run_produces_expected_bundle(self, config_path, tmp_path, capsys):
        assert main(["run", "--config", str(config_path)]) == 0
        bundle = tmp_path / "bundle"
        manifest = json.loads((bundle / "manifest.json").read_text())
        assert len(manifest["runs"]) == 4  # 2 engines x 2 seeds
        assert all(r["status"] == "ok" for r in manifest["runs"])
        run_files = sorted((bundle / "runs").glob("*.json"))
        assert len(run_files) == 4
        assert (bundle / "instance.landalloc.json").exists()
        assert len(list((bundle / "combined").glob("*.json"))) == 2

    def test_rerun_is_byte_identical(self, config_path, tmp_path):
        bundle = tmp_path / "bundle"
        assert main(["run", "--config", str(config_path)]) == 0
        first = {
            p.name: p.read_bytes() for p in sorted((bundle / "runs").glob("*.json"))
        }
        first["manifest"] = (bundle / "manifest.json").read_bytes()
        assert main(["run", "--config", str(config_path)]) == 0
        second = {
            p.name: p.read_bytes() for p in sorted((bundle / "runs").glob("*.json"))
        }
        second["manifest"] = (bundle / "manifest.json").read_bytes()
        assert first == second

    def test_seed_override(self, config_path, tmp_path):
        assert main(["run", "--config", str(config_path), "--seeds", "5"]) == 0
        manifest = json.loads((tmp_path / "bundle" / "manifest.json").read_text())
        assert [r["seed"] for r in manifest["runs"]] == [5, 5]

    def test_bad_config_is_validation_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        assert main(["run", "--config", str(bad)]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2

    def test_duplicate_labels_rejected(self, experiment_doc, tmp_path):
        experiment_doc["engines"].append(dict(experiment_doc["engines"][0]))
        path = tmp_path / "dup.json"
        path.write_text(json.dumps(experiment_doc))
        assert main(["run", "--config", str(path)]) == 2


class TestReportCommand:
    def test_report_regeneration_byte_identical(self, config_path, tmp_path):
        assert main(["run", "--config", str(config_path)]) == 0
        bundle = tmp_path / "bundle"
        assert main(["report", "--bundle", str(bundle)]) == 0
        report_dir = bundle / "report"
        first = {p.name: p.read_bytes() for p in sorted(report_dir.iterdir())}
        assert first, "report files expected"
        assert main(["report", "--bundle", str(bundle)]) == 0
        second = {p.name: p.read_bytes() for p in sorted(report_dir.iterdir())}
        assert first == second

    def test_report_contents(self, config_path, tmp_path):
        main(["run", "--config", str(config_path)])
        bundle = tmp_path / "bundle"
        main(["report", "--bundle", str(bundle)])
        report = bundle / "report"
        for name in (
            "runs_metrics.csv", "indicators.csv", "types.csv", "landuse.csv",
            "stats.json", "fronts.svg", "hv.svg", "summary.txt",
        ):
            assert (report / name).exists(), name
        stats_doc = json.loads((report / "stats.json").read_text())
        for metric, entry in stats_doc["metrics"].items():
            if "cld" in entry:
                assert entry["cld"]["consistent"] is True
        svg = (report / "fronts.svg").read_text()
        assert "<svg" in svg and "actual land-use" in svg

    def test_report_on_missing_bundle_is_validation_error(self, tmp_path):
        assert main(["report", "--bundle", str(tmp_path / "nothing")]) == 2


class TestVerifyCommand:
    def test_clean_bundle_verifies(self, config_path, tmp_path, capsys):
        main(["run", "--config", str(config_path)])
        assert main(["verify", "--bundle", str(tmp_path / "bundle")]) == 0

    def test_missing_run_file_detected(self, config_path, tmp_path, capsys):
        main(["run", "--config", str(config_path)])
        bundle = tmp_path / "bundle"
        victim = sorted((bundle / "runs").glob("*.json"))[0]
        victim.unlink()
        assert main(["verify", "--bundle", str(bundle)]) == 3
        assert "missing" in capsys.readouterr().err

    def test_corrupted_instance_detected(self, config_path, tmp_path, capsys):
        main(["run", "--config", str(config_path)])
        bundle = tmp_path / "bundle"
        inst_file = bundle / "instance.landalloc.json"
        inst_file.write_text(inst_file.read_text() + "\n")
        assert main(["verify", "--bundle", str(bundle)]) == 2
        assert "hash" in capsys.readouterr().err

    def test_failed_status_detected(self, config_path, tmp_path):
        main(["run", "--config", str(config_path)])
        bundle = tmp_path / "bundle"
        manifest = json.loads((bundle / "manifest.json").read_text())
        manifest["runs"][0]["status"] = "failed"
        manifest["runs"][0]["error"] = "boom"
        (bundle / "manifest.json").write_text(json.dumps(manifest))
        assert main(["verify", "--bundle", str(bundle)]) == 3


class TestHarnessInternals:
    def test_record_roundtrip(self, instance_path):
        import landalloc as la

        inst = load_instance(instance_path)
        cfg = la.EngineConfig(algorithm="CR_DES", population_size=10, generations=8, seed=3)
        rec = la.run_engine(inst, cfg)
        text = record_to_json("L", rec)
        label, back = record_from_dict(json.loads(text), inst)
        assert label == "L"
        assert record_to_json("L", back) == text

    def test_combined_front_is_nondominated_union(self, instance_path):
        import landalloc as la
        from oracles import naive_pareto_set

        inst = load_instance(instance_path)
        recs = [
            la.run_engine(
                inst,
                la.EngineConfig(algorithm="MSBX_NSGA2", population_size=10, generations=8, seed=s),
            )
            for s in (1, 2, 3)
        ]
        entries = combined_front_entries(recs)
        pts = [(e["compatibility"], e["price"]) for e in entries]
        allpts = [
            (i.objectives.compatibility, i.objectives.price)
            for r in recs
            for i in r.front()
        ]
        assert set(pts) == naive_pareto_set(allpts)

    def test_engine_entry_relaxation_defaults(self, instance_path):
        inst = load_instance(instance_path)
        label, cfg = build_engine_config(
            {"label": "X", "algorithm": "CR_DES", "gamma_search": 0.8}, inst
        )
        assert cfg.relax.gamma_search == 0.8
        assert cfg.relax.gamma_final == inst.gamma
        assert cfg.relax.mu_search == inst.mu

    def test_workers_parallel_matches_serial(self, experiment_doc, tmp_path):
        doc = dict(experiment_doc)
        doc["output"] = str(tmp_path / "serial")
        cfg = ExperimentConfig.from_dict(doc)
        run_experiment(cfg)
        doc2 = dict(experiment_doc)
        doc2["output"] = str(tmp_path / "parallel")
        doc2["workers"] = 2
        run_experiment(ExperimentConfig.from_dict(doc2))
        serial = {p.name: p.read_bytes() for p in sorted((tmp_path / "serial" / "runs").glob("*"))}
        parallel = {p.name: p.read_bytes() for p in sorted((tmp_path / "parallel" / "runs").glob("*"))}
        assert serial == parallel

    def test_bad_entries_raise_config_error(self, instance_path):
        inst = load_instance(instance_path)
        with pytest.raises(ExperimentConfigError):
            build_engine_config({"label": "X"}, inst)
        with pytest.raises(ExperimentConfigError):
            build_engine_config(
                {"label": "X", "algorithm": "CR_DES", "nonsense": 5}, inst
            )
        with pytest.raises(ExperimentConfigError):
            ExperimentConfig.from_dict({"instance": "x", "engines": [], "seeds": [1]})
        with pytest.raises(ExperimentConfigError):
            ExperimentConfig.from_dict(
                {"instance": "x", "engines": [{"label": "A", "algorithm": "SOA"}], "seeds": [1, 1]}
            )
