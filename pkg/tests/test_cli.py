import json

import pytest

import axkit.cli as cli
import axkit.dataset as ds
import axkit.estimate as est
import axkit.mathprog as mp
import axkit.netlist as nl


def run(*argv):
    return cli.main(list(argv))


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Shared pipeline directory: netlist -> dataset -> models -> pool."""
    root = tmp_path_factory.mktemp("cliwork")
    assert run("gen", "--mul", "4", "--signed", "--out-dir", str(root)) == 0
    net = root / "mul4s.json"
    assert run("characterize", "--netlist", str(net), "--exhaustive",
               "--out-dir", str(root), "--threads", "2") == 0
    data = root / "dataset.csv"
    for metric in ("pdplut", "avg_abs_rel_err"):
        assert run("fit", "--dataset", str(data), "--metric", metric,
                   "--ranking-metric", "avg_abs_rel_err",
                   "--out", f"model_{metric}.json", "--out-dir", str(root)) == 0
    assert run("map", "--ppa-model", str(root / "model_pdplut.json"),
               "--behav-model", str(root / "model_avg_abs_rel_err.json"),
               "--dataset", str(data), "--wt-step", "0.25",
               "--schedule", "0,45", "--out-dir", str(root)) == 0
    return root


# ---------------------------------------------------------------------------
# exit codes


def test_usage_errors_exit_1():
    assert run() == 1
    assert run("frobnicate") == 1
    assert run("gen") == 1                          # missing --mul/--add
    assert run("gen", "--mul", "4", "--add", "3") == 1    # mutually exclusive
    assert run("fit", "--dataset", "x.csv") == 1    # missing --metric


def test_help_exits_0(capsys):
    assert run("--help") == 0
    assert "run-all" in capsys.readouterr().out


def test_missing_input_file_exits_1(tmp_path):
    assert run("characterize", "--netlist", str(tmp_path / "nope.json"),
               "--out-dir", str(tmp_path)) == 1


def test_validation_error_exits_1(tmp_path, workdir):
    assert run("fit", "--dataset", str(workdir / "dataset.csv"),
               "--metric", "pdplut", "--n-quad", "99",
               "--out-dir", str(tmp_path)) == 1


def test_unexpected_exception_exits_2(tmp_path, monkeypatch, capsys):
    def boom(args, status):
        raise RuntimeError("wires crossed")
    monkeypatch.setattr(cli, "cmd_gen", boom)
    assert run("gen", "--mul", "2", "--out-dir", str(tmp_path)) == 2
    assert "wires crossed" in capsys.readouterr().err


def test_json_status_on_stderr(tmp_path, capsys):
    assert run("gen", "--add", "3", "--out-dir", str(tmp_path), "--json") == 0
    payload = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert payload["status"] == "ok"
    assert payload["command"] == "gen"
    assert payload["netlist"] == "add3u"
    assert len(payload["outputs"]) == 1


def test_json_status_reports_errors(tmp_path, capsys):
    assert run("analyze", "--dataset", str(tmp_path / "ghost.csv"),
               "--out-dir", str(tmp_path), "--json") == 1
    err = capsys.readouterr().err
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["status"] == "error"


def test_bad_threads_rejected(tmp_path, workdir):
    assert run("characterize", "--netlist", str(workdir / "mul4s.json"),
               "--threads", "0", "--out-dir", str(tmp_path)) == 1


# ---------------------------------------------------------------------------
# gen / characterize


def test_gen_writes_loadable_netlist(workdir):
    net = nl.load_netlist(workdir / "mul4s.json")
    assert net.name == "mul4s"
    assert net.removable_count == 10


def test_characterize_corners_only(tmp_path, workdir):
    assert run("characterize", "--netlist", str(workdir / "mul4s.json"),
               "--patterns", "none", "--out-dir", str(tmp_path)) == 0
    lines = (tmp_path / "dataset.csv").read_text().splitlines()
    assert len(lines) == 3                          # header + both corners


def test_characterize_exhaustive_row_count(workdir):
    lines = (workdir / "dataset.csv").read_text().splitlines()
    assert len(lines) == 1025


def test_characterize_matches_library_bytes(tmp_path, workdir):
    assert run("characterize", "--netlist", str(workdir / "mul4s.json"),
               "--n-random", "30", "--windows", "1,2", "--seed", "5",
               "--out", "cli.csv", "--out-dir", str(tmp_path)) == 0
    net = nl.load_netlist(workdir / "mul4s.json")
    plan = ds.SamplingPlan(n_random=30, seed=5,
                           pattern_families=ds.PATTERN_FAMILIES,
                           window_sizes=(1, 2))
    data = ds.build_dataset(net, plan, threads=2)
    ds.save_csv(data, tmp_path / "api.csv")
    assert (tmp_path / "cli.csv").read_bytes() == (tmp_path / "api.csv").read_bytes()


def test_characterize_thread_count_never_changes_bytes(tmp_path, workdir):
    for t in ("1", "3"):
        assert run("characterize", "--netlist", str(workdir / "mul4s.json"),
                   "--n-random", "25", "--seed", "9", "--threads", t,
                   "--out", f"t{t}.csv", "--out-dir", str(tmp_path)) == 0
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t3.csv").read_bytes()


# ---------------------------------------------------------------------------
# analyze / fit / map


def test_analyze_outputs(tmp_path, workdir, capsys):
    assert run("analyze", "--dataset", str(workdir / "dataset.csv"),
               "--out-dir", str(tmp_path)) == 0
    lines = (tmp_path / "correlation.csv").read_text().splitlines()
    assert lines[0] == "metric,i,j,r"
    assert len(lines) == 1 + 2 * (10 + 45)          # two default metrics
    assert (tmp_path / "heatmap_avg_abs_rel_err.svg").exists()
    assert (tmp_path / "heatmap_pdplut.svg").exists()


def test_fit_prints_report_and_saves_model(tmp_path, workdir, capsys):
    assert run("fit", "--dataset", str(workdir / "dataset.csv"),
               "--metric", "pdplut", "--n-quad", "10",
               "--out-dir", str(tmp_path)) == 0
    out = capsys.readouterr().out
    report = json.loads(out.splitlines()[0])
    assert report["n_quad"] == 10
    assert 0.0 < report["r2_train"] <= 1.0
    model = est.load_model(tmp_path / "model_pdplut_poly.json")
    assert model.kind == "poly"
    assert len(model.payload.quad_terms) == 10


def test_fit_tree_kind(tmp_path, workdir):
    assert run("fit", "--dataset", str(workdir / "dataset.csv"),
               "--metric", "power", "--kind", "tree_ensemble",
               "--out-dir", str(tmp_path)) == 0
    model = est.load_model(tmp_path / "model_power_tree_ensemble.json")
    assert model.kind == "tree_ensemble"


def test_map_pool_loads(workdir):
    pool = mp.load_pool(workdir / "pool.json")
    assert pool.const_sf == 1.0
    assert len(pool.solutions) >= 1
    assert all(s.optimality == "proven" for s in pool.solutions)


# ---------------------------------------------------------------------------
# experiments


def test_dse_ground_truth_run(tmp_path, workdir, capsys):
    assert run("dse", "--netlist", str(workdir / "mul4s.json"),
               "--dataset", str(workdir / "dataset.csv"),
               "--pool", str(workdir / "pool.json"),
               "--methods", "GA,MaP+GA", "--n-seeds", "1",
               "--pop", "8", "--generations", "2",
               "--out-dir", str(tmp_path)) == 0
    out = capsys.readouterr().out
    assert "ppf_hv=" in out
    assert (tmp_path / "fronts_GA_0.csv").exists()
    assert (tmp_path / "fronts_MaP_GA_0.csv").exists()
    assert (tmp_path / "hv_summary.csv").exists()
    assert (tmp_path / "fronts.svg").exists()


def test_dse_map_without_pool_exits_1(tmp_path, workdir):
    assert run("dse", "--netlist", str(workdir / "mul4s.json"),
               "--dataset", str(workdir / "dataset.csv"),
               "--methods", "MaP", "--out-dir", str(tmp_path)) == 1


def test_dse_estimator_fitness_needs_models(tmp_path, workdir):
    assert run("dse", "--netlist", str(workdir / "mul4s.json"),
               "--dataset", str(workdir / "dataset.csv"),
               "--fitness", "estimator", "--methods", "GA",
               "--out-dir", str(tmp_path)) == 1


def test_app_experiment_run(tmp_path, capsys):
    assert run("gen", "--mul", "8", "--signed", "--out-dir", str(tmp_path)) == 0
    assert run("characterize", "--netlist", str(tmp_path / "mul8s.json"),
               "--patterns", "none", "--n-random", "6", "--seed", "3",
               "--out-dir", str(tmp_path), "--threads", "2") == 0
    assert run("app", "--kernel", "gemv_classify",
               "--netlist", str(tmp_path / "mul8s.json"),
               "--dataset", str(tmp_path / "dataset.csv"),
               "--methods", "GA", "--n-seeds", "1",
               "--pop", "4", "--generations", "1",
               "--out-dir", str(tmp_path / "exp")) == 0
    assert (tmp_path / "exp" / "fronts_GA_0.csv").exists()
    summary = (tmp_path / "exp" / "hv_summary.csv").read_text().splitlines()
    assert len(summary) == 2


# ---------------------------------------------------------------------------
# run-all


def _run_config(out_dir, **overrides):
    cfg = {
        "name": "tiny",
        "generator": {"kind": "multiplier", "width": 4, "signed": True},
        "sampling": {"n_random": 60},
        "metrics": {"ppa": "pdplut", "behav": "avg_abs_rel_err"},
        "estimator": {"kind": "poly", "n_quad": "full"},
        "map": {"wt_step": 0.25, "n_quad_schedule": [0, 10]},
        "dse": {"methods": ["GA", "MaP+GA"], "n_seeds": 1,
                "pop": 8, "generations": 3},
        "const_sf": [0.8],
        "seed": 1,
        "out_dir": str(out_dir),
    }
    cfg.update(overrides)
    return cfg


def test_run_all_pipeline(tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(_run_config(tmp_path / "arts")))
    assert run("run-all", "--config", str(cfg_path)) == 0
    arts = tmp_path / "arts"
    for name in ("netlist.json", "dataset.csv", "correlation.csv",
                 "heatmap_pdplut.svg", "heatmap_avg_abs_rel_err.svg",
                 "model_pdplut.json", "model_avg_abs_rel_err.json",
                 "pool_sf0_8.json"):
        assert (arts / name).exists(), name
    sf_dir = arts / "dse_sf0_8"
    assert (sf_dir / "fronts_GA_0.csv").exists()
    assert (sf_dir / "fronts_MaP_GA_0.csv").exists()
    assert (sf_dir / "hv_summary.csv").exists()


def test_run_all_flag_overrides(tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(_run_config(tmp_path / "ignored")))
    assert run("run-all", "--config", str(cfg_path),
               "--out-dir", str(tmp_path / "actual")) == 0
    assert not (tmp_path / "ignored").exists()
    assert (tmp_path / "actual" / "dataset.csv").exists()


def test_run_all_rejects_bad_config(tmp_path):
    bad = _run_config(tmp_path / "x")
    bad["dse"]["methods"] = ["SimulatedAnnealing"]
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps(bad))
    assert run("run-all", "--config", str(cfg_path)) == 1

    del bad["dse"]["methods"]
    bad["extra_key"] = True
    cfg_path.write_text(json.dumps(bad))
    assert run("run-all", "--config", str(cfg_path)) == 1

    cfg_path.write_text("{not json")
    assert run("run-all", "--config", str(cfg_path)) == 1


def test_run_all_rejects_missing_netlist_path(tmp_path):
    cfg = _run_config(tmp_path / "x", generator={"netlist": "missing.json"})
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    assert run("run-all", "--config", str(cfg_path)) == 1
