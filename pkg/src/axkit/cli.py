"""Command-line front end for the approximate-operator toolkit.

Subcommands map one-to-one onto the library stages:

  gen           build a multiplier/adder netlist and save it as JSON
  characterize  sample configurations and write the metrics dataset CSV
  analyze       correlation report CSV plus per-metric heatmap SVGs
  fit           fit a surrogate model and save it as JSON
  map           solve the weight x quadratic-term sweep into a solution pool
  dse           run the search-method comparison experiment
  app           same experiment driven by an application kernel's error
  run-all       execute the whole pipeline from a JSON run-configuration file

Exit codes: 0 success, 1 validation/usage error, 2 unexpected runtime error.
`--json` additionally emits a machine-parseable status object on stderr.
Every artifact written here is byte-identical to the corresponding library
call with the same seed and parameters; `--threads` never changes content.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import jsonschema

from . import apps, charac, dataset as ds, dse, estimate, mathprog, stats
from . import netlist as nl
from .errors import AxkitError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

DEFAULT_ANALYZE_METRICS = ("avg_abs_rel_err", "pdplut")


# ---------------------------------------------------------------------------
# small shared helpers


def _resolve_threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1")
        return args.threads
    return os.cpu_count() or 1


def _out_dir(args) -> Path:
    path = Path(args.out_dir or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(status: dict, path) -> None:
    status["outputs"].append(str(path))
    print(f"wrote {path}")


def _infer_config_length(path) -> int:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            next(reader)                         # header
            row = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: no data rows to infer L from")
    return len(row[0])


def _load_dataset(path) -> ds.Dataset:
    return ds.ingest_csv(path, _infer_config_length(path))


def _parse_metric_list(text: str) -> tuple[str, ...]:
    if text == "all":
        return tuple(charac.METRIC_COLUMNS)
    names = tuple(m.strip() for m in text.split(",") if m.strip())
    for m in names:
        if m not in charac.METRIC_COLUMNS:
            raise ValidationError(f"unknown metric {m!r}")
    if not names:
        raise ValidationError("empty metric list")
    return names


def _setup_deterministic_svg():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "axkit"
    return plt


def _save_heatmap(report: stats.CorrelationReport, path) -> None:
    plt = _setup_deterministic_svg()
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(report.multivariate, vmin=-1.0, vmax=1.0, cmap="coolwarm")
    ax.set_xlabel("LUT index")
    ax.set_ylabel("LUT index")
    ax.set_title(f"pairwise correlation, {report.metric_name}")
    fig.colorbar(im, ax=ax)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _fit_poly_with_ranking(data: ds.Dataset, metric: str, ranking_metric: str,
                           n_quad, seed: int):
    """Fit a polynomial surrogate whose quadratic terms follow a chosen ranking.

    `n_quad` may be an int, "full" (every pair) or "default" (the estimate
    module budget).  The MaP sweep needs models carrying the full ranked
    list, so "full" is the pipeline default.
    """
    ranked = stats.rank_quadratic_features(data, ranking_metric)
    if n_quad == "full":
        budget = len(ranked)
    elif n_quad == "default":
        budget = estimate.default_quad_budget(data.L)
    else:
        budget = int(n_quad)
        if not 0 <= budget <= len(ranked):
            raise ValidationError(f"--n-quad must lie in [0, {len(ranked)}]")
    model, report = estimate.fit_poly(data, metric, ranked[:budget], split_seed=seed)
    return estimate.Estimator("poly", model), report, ranked


def _report_dict(report: estimate.FitReport) -> dict:
    return {k: getattr(report, k) for k in
            ("r2_train", "r2_test", "mae_train", "mae_test",
             "mse_train", "mse_test", "n_quad")}


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args, status) -> None:
    if args.mul is not None:
        net = nl.build_multiplier(args.mul, signed=args.signed)
    else:
        net = nl.build_adder(args.add)
    path = _out_dir(args) / (args.out or f"{net.name}.json")
    nl.save_netlist(net, path)
    status["netlist"] = net.name
    status["removable_luts"] = net.removable_count
    _emit(status, path)


def _sampling_plan(args, L: int) -> ds.SamplingPlan:
    if args.patterns == "all":
        families = ds.PATTERN_FAMILIES
    elif args.patterns == "none":
        families = ()
    else:
        families = tuple(p.strip() for p in args.patterns.split(",") if p.strip())
    windows = tuple(int(w) for w in args.windows.split(","))
    n_random = (1 << L) if args.exhaustive else args.n_random
    return ds.SamplingPlan(n_random=n_random, seed=args.seed or 0,
                           pattern_families=families, window_sizes=windows)


def cmd_characterize(args, status) -> None:
    net = nl.load_netlist(args.netlist)
    plan = _sampling_plan(args, net.removable_count)
    data = ds.build_dataset(net, plan, threads=_resolve_threads(args))
    path = _out_dir(args) / args.out
    ds.save_csv(data, path)
    status["rows"] = len(data.records)
    _emit(status, path)


def cmd_analyze(args, status) -> None:
    data = _load_dataset(args.dataset)
    metrics = _parse_metric_list(args.metrics)
    reports = [stats.correlation_report(data, m) for m in metrics]
    out = _out_dir(args)
    csv_path = out / args.out
    stats.save_reports_csv(reports, csv_path)
    _emit(status, csv_path)
    for rep in reports:
        svg = out / f"heatmap_{rep.metric_name}.svg"
        _save_heatmap(rep, svg)
        _emit(status, svg)
        for w in rep.warnings:
            print(f"warning [{rep.metric_name}]: {w}", file=sys.stderr)
    status["pairs"] = data.L * (data.L - 1) // 2


def cmd_fit(args, status) -> None:
    data = _load_dataset(args.dataset)
    seed = args.seed or 0
    if args.kind == "poly":
        est, report, _ = _fit_poly_with_ranking(
            data, args.metric, args.ranking_metric or args.metric,
            args.n_quad, seed)
    else:
        est, report = estimate.fit_estimator(data, args.metric, args.kind, seed)
    path = _out_dir(args) / (args.out or f"model_{args.metric}_{args.kind}.json")
    estimate.save_model(est, path)
    status["fit_report"] = _report_dict(report)
    print(json.dumps(status["fit_report"], sort_keys=True))
    _emit(status, path)


def _require_poly(est, which: str) -> estimate.PolyModel:
    if est.kind != "poly":
        raise ValidationError(f"{which} model must be polynomial for the MaP sweep")
    return est.payload


def cmd_map(args, status) -> None:
    data = _load_dataset(args.dataset)
    ppa_model = _require_poly(estimate.load_model(args.ppa_model), "ppa")
    behav_model = _require_poly(estimate.load_model(args.behav_model), "behav")
    ranked = stats.rank_quadratic_features(data, args.ranking_metric
                                           or behav_model.metric_name)
    schedule = None
    if args.schedule:
        schedule = tuple(int(q) for q in args.schedule.split(","))
    maxima = data.maxima(ppa_model.metric_name, behav_model.metric_name)
    pool = mathprog.build_pool(
        ppa_model, behav_model, args.const_sf, ranked,
        wt_step=args.wt_step, n_quad_schedule=schedule,
        dataset_maxima=maxima, seed=args.seed or 0)
    path = _out_dir(args) / args.out
    mathprog.save_pool(pool, path)
    status["pool_size"] = len(pool.solutions)
    _emit(status, path)


def _ga_settings(args) -> dse.GaSettings:
    return dse.GaSettings(
        pop_size=args.pop, max_generations=args.generations,
        crossover_rate=args.crossover, mutation_rate=args.mutation,
        seed=args.seed or 0, constraint_mode=args.constraint_mode)


def _experiment_setup(args, net: nl.Netlist, data: ds.Dataset,
                      kernel=None) -> dse.ExperimentSetup:
    pool = mathprog.load_pool(args.pool) if args.pool else None
    ppa_est = behav_est = None
    if args.fitness == "estimator":
        if not (args.ppa_model and args.behav_model):
            raise ValidationError(
                "--fitness estimator needs --ppa-model and --behav-model")
        ppa_est = estimate.load_model(args.ppa_model)
        behav_est = estimate.load_model(args.behav_model)
    if kernel is None:
        maxima = data.maxima(args.ppa_metric, args.behav_metric)
    else:
        # app error has no dataset column; anchor B_MAX at the fully removed
        # operator unless the caller pins it explicitly
        p_max, _ = data.maxima(args.ppa_metric, args.ppa_metric)
        b_max = args.behav_max
        if b_max is None:
            zeros = nl.all_zeros(net.removable_count)
            b_max = apps.app_behav(kernel, nl.product_table(net, zeros))
        if b_max <= 0:
            raise ValidationError(
                "app behavioral scale is not positive; pass --behav-max")
        maxima = (p_max, float(b_max))
    return dse.ExperimentSetup(
        netlist=net, dataset_maxima=maxima,
        ppa_metric=args.ppa_metric, behav_metric=args.behav_metric,
        settings=_ga_settings(args), pool=pool, fitness=args.fitness,
        ppa_estimator=ppa_est, behav_estimator=behav_est, app=kernel)


def _run_experiment_cmd(args, status, kernel=None) -> None:
    net = nl.load_netlist(args.netlist)
    data = _load_dataset(args.dataset)
    methods = tuple(m.strip() for m in args.methods.split(","))
    setup = _experiment_setup(args, net, data, kernel)
    out = _out_dir(args)
    report = dse.run_experiment(setup, args.const_sf, methods=methods,
                                n_seeds=args.n_seeds, out_dir=out)
    for method, seed, ppf_hv, vpf_hv in report.summary:
        print(f"{method} seed={seed} ppf_hv={ppf_hv:.6f} vpf_hv={vpf_hv:.6f}")
    status["summary"] = [
        {"method": m, "seed": s, "ppf_hv": p, "vpf_hv": v}
        for m, s, p, v in report.summary]
    for name in sorted(os.listdir(out)):
        if name.startswith(("fronts_", "hv_")) or name == "fronts.svg":
            status["outputs"].append(str(out / name))
    print(f"report written under {out}")


def cmd_dse(args, status) -> None:
    _run_experiment_cmd(args, status)


def cmd_app(args, status) -> None:
    kernel = apps.make_kernel(args.kernel)
    args.behav_metric = "app_behav"
    _run_experiment_cmd(args, status, kernel=kernel)


# ---------------------------------------------------------------------------
# run-all pipeline


RUN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["generator", "sampling", "metrics", "estimator",
                 "map", "dse", "const_sf", "seed", "out_dir"],
    "properties": {
        "name": {"type": "string"},
        "generator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["multiplier", "adder"]},
                "width": {"type": "integer", "minimum": 2},
                "signed": {"type": "boolean"},
                "netlist": {"type": "string"},
            },
        },
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "exhaustive": {"type": "boolean"},
                "n_random": {"type": "integer", "minimum": 0},
                "patterns": {"type": "array", "items": {"type": "string"}},
                "windows": {"type": "array", "items": {"type": "integer"}},
            },
        },
        "metrics": {
            "type": "object",
            "additionalProperties": False,
            "required": ["ppa", "behav"],
            "properties": {"ppa": {"type": "string"}, "behav": {"type": "string"}},
        },
        "estimator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["poly", "tree_ensemble"]},
                "n_quad": {"anyOf": [{"type": "integer", "minimum": 0},
                                     {"enum": ["full", "default"]}]},
            },
        },
        "map": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "wt_step": {"type": "number", "exclusiveMinimum": 0},
                "n_quad_schedule": {"type": "array",
                                    "items": {"type": "integer", "minimum": 0}},
            },
        },
        "dse": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "methods": {"type": "array",
                            "items": {"enum": list(dse.METHOD_NAMES)}},
                "n_seeds": {"type": "integer", "minimum": 1},
                "pop": {"type": "integer", "minimum": 2},
                "generations": {"type": "integer", "minimum": 1},
                "constraint_mode": {"enum": ["constraint_domination", "penalty"]},
            },
        },
        "const_sf": {"type": "array", "minItems": 1,
                     "items": {"type": "number", "exclusiveMinimum": 0}},
        "seed": {"type": "integer"},
        "out_dir": {"type": "string"},
    },
}


def _load_run_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    try:
        jsonschema.validate(cfg, RUN_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"run config invalid: {exc.message}")
    gen = cfg["generator"]
    if "netlist" in gen:
        if len(gen) != 1:
            raise ValidationError("generator: give either a netlist path or a recipe")
        if not Path(gen["netlist"]).exists():
            raise ValidationError(f"netlist file {gen['netlist']} does not exist")
    elif "kind" not in gen or "width" not in gen:
        raise ValidationError("generator needs kind and width (or a netlist path)")
    return cfg


def _sf_tag(sf: float) -> str:
    return f"sf{sf:g}".replace(".", "_")


def cmd_run_all(args, status) -> None:
    cfg = _load_run_config(args.config)
    seed = args.seed if args.seed is not None else cfg["seed"]
    out = Path(args.out_dir) if args.out_dir else Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    threads = _resolve_threads(args)

    gen = cfg["generator"]
    if "netlist" in gen:
        net = nl.load_netlist(gen["netlist"])
    elif gen["kind"] == "multiplier":
        net = nl.build_multiplier(gen["width"], signed=gen.get("signed", True))
    else:
        net = nl.build_adder(gen["width"])
    net_path = out / "netlist.json"
    nl.save_netlist(net, net_path)
    _emit(status, net_path)

    samp = cfg["sampling"]
    L = net.removable_count
    families = tuple(samp.get("patterns", ds.PATTERN_FAMILIES))
    n_random = (1 << L) if samp.get("exhaustive") else samp.get("n_random", 0)
    plan = ds.SamplingPlan(
        n_random=n_random, seed=seed, pattern_families=families,
        window_sizes=tuple(samp.get("windows", ds.DEFAULT_WINDOWS)))
    data = ds.build_dataset(net, plan, threads=threads)
    data_path = out / "dataset.csv"
    ds.save_csv(data, data_path)
    _emit(status, data_path)

    ppa_metric = cfg["metrics"]["ppa"]
    behav_metric = cfg["metrics"]["behav"]
    reports = [stats.correlation_report(data, m) for m in (behav_metric, ppa_metric)]
    corr_path = out / "correlation.csv"
    stats.save_reports_csv(reports, corr_path)
    _emit(status, corr_path)
    for rep in reports:
        svg = out / f"heatmap_{rep.metric_name}.svg"
        _save_heatmap(rep, svg)
        _emit(status, svg)

    est_cfg = cfg.get("estimator", {})
    kind = est_cfg.get("kind", "poly")
    if kind != "poly":
        raise ValidationError("run-all needs polynomial models for the MaP stage")
    n_quad = est_cfg.get("n_quad", "full")
    models = {}
    fit_reports = {}
    for metric in (ppa_metric, behav_metric):
        # both models share the behav ranking so the MaP prefix check holds;
        # with the default full budget the fitted function is ranking-invariant
        est, report, ranked = _fit_poly_with_ranking(
            data, metric, behav_metric, n_quad, seed)
        models[metric] = est
        fit_reports[metric] = _report_dict(report)
        model_path = out / f"model_{metric}.json"
        estimate.save_model(est, model_path)
        _emit(status, model_path)
    status["fit_reports"] = fit_reports

    map_cfg = cfg.get("map", {})
    dse_cfg = cfg.get("dse", {})
    maxima = data.maxima(ppa_metric, behav_metric)
    ranked = stats.rank_quadratic_features(data, behav_metric)
    settings = dse.GaSettings(
        pop_size=dse_cfg.get("pop", 64),
        max_generations=dse_cfg.get("generations", 250),
        seed=seed,
        constraint_mode=dse_cfg.get("constraint_mode", "constraint_domination"))
    methods = tuple(dse_cfg.get("methods", list(dse.METHOD_NAMES)))
    for sf in cfg["const_sf"]:
        pool = mathprog.build_pool(
            models[ppa_metric].payload, models[behav_metric].payload, sf, ranked,
            wt_step=map_cfg.get("wt_step", 0.05),
            n_quad_schedule=map_cfg.get("n_quad_schedule"),
            dataset_maxima=maxima, seed=seed)
        pool_path = out / f"pool_{_sf_tag(sf)}.json"
        mathprog.save_pool(pool, pool_path)
        _emit(status, pool_path)

        setup = dse.ExperimentSetup(
            netlist=net, dataset_maxima=maxima, ppa_metric=ppa_metric,
            behav_metric=behav_metric, settings=settings, pool=pool,
            fitness="ground_truth")
        sf_dir = out / f"dse_{_sf_tag(sf)}"
        sf_dir.mkdir(parents=True, exist_ok=True)
        report = dse.run_experiment(setup, sf, methods=methods,
                                    n_seeds=dse_cfg.get("n_seeds", 10),
                                    out_dir=sf_dir)
        for name in sorted(os.listdir(sf_dir)):
            status["outputs"].append(str(sf_dir / name))
        for method, s, ppf_hv, vpf_hv in report.summary:
            print(f"const_sf={sf:g} {method} seed={s} "
                  f"ppf_hv={ppf_hv:.6f} vpf_hv={vpf_hv:.6f}")
    print(f"pipeline artifacts under {out}")


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sub) -> None:
    sub.add_argument("--seed", type=int, default=None,
                     help="global RNG seed (default 0, or the run config's)")
    sub.add_argument("--out-dir", default=None,
                     help="directory for artifacts (default current dir)")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker pool cap (default: available parallelism)")
    sub.add_argument("--json", action="store_true",
                     help="emit a machine-parseable status object on stderr")


def _add_experiment_flags(sub, behav_choices=True) -> None:
    sub.add_argument("--netlist", required=True)
    sub.add_argument("--dataset", required=True,
                     help="characterization CSV supplying constraint maxima")
    sub.add_argument("--pool", default=None, help="MaP solution pool JSON")
    sub.add_argument("--methods", default="GA,MaP,MaP+GA")
    sub.add_argument("--const-sf", type=float, default=1.0)
    sub.add_argument("--n-seeds", type=int, default=10)
    sub.add_argument("--pop", type=int, default=64)
    sub.add_argument("--generations", type=int, default=250)
    sub.add_argument("--crossover", type=float, default=0.9)
    sub.add_argument("--mutation", type=float, default=None)
    sub.add_argument("--constraint-mode", default="constraint_domination",
                     choices=("constraint_domination", "penalty"))
    sub.add_argument("--fitness", default="ground_truth",
                     choices=("ground_truth", "estimator"))
    sub.add_argument("--ppa-model", default=None)
    sub.add_argument("--behav-model", default=None)
    sub.add_argument("--ppa-metric", default="pdplut",
                     choices=charac.PPA_COLUMNS)
    if behav_choices:
        sub.add_argument("--behav-metric", default="avg_abs_rel_err",
                         choices=charac.BEHAV_COLUMNS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axkit",
        description="approximate arithmetic operator synthesis and exploration")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="generate an operator netlist")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--mul", type=int, help="multiplier bit width")
    group.add_argument("--add", type=int, help="adder bit width")
    p.add_argument("--signed", action="store_true",
                   help="two's-complement multiplier (default unsigned)")
    p.add_argument("--out", default=None, help="output filename")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = subs.add_parser("characterize", help="sample and measure configurations")
    p.add_argument("--netlist", required=True)
    p.add_argument("--n-random", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true",
                   help="measure every configuration (2^L rows)")
    p.add_argument("--patterns", default="all",
                   help='"all", "none", or comma list of pattern families')
    p.add_argument("--windows", default="1,2,3")
    p.add_argument("--out", default="dataset.csv")
    _add_common(p)
    p.set_defaults(func=cmd_characterize)

    p = subs.add_parser("analyze", help="correlation analysis of a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--metrics", default=",".join(DEFAULT_ANALYZE_METRICS),
                   help='comma list of metric names, or "all"')
    p.add_argument("--out", default="correlation.csv")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("fit", help="fit a surrogate model")
    p.add_argument("--dataset", required=True)
    p.add_argument("--metric", required=True, choices=charac.METRIC_COLUMNS)
    p.add_argument("--kind", default="poly", choices=("poly", "tree_ensemble"))
    p.add_argument("--n-quad", default="full",
                   help='quadratic-term budget: int, "full", or "default"')
    p.add_argument("--ranking-metric", default=None, choices=charac.METRIC_COLUMNS,
                   help="metric whose pair ranking orders the quadratic terms")
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = subs.add_parser("map", help="solve the scalarized sweep into a pool")
    p.add_argument("--ppa-model", required=True)
    p.add_argument("--behav-model", required=True)
    p.add_argument("--dataset", required=True,
                   help="characterization CSV supplying maxima and the ranking")
    p.add_argument("--const-sf", type=float, default=1.0)
    p.add_argument("--wt-step", type=float, default=0.05)
    p.add_argument("--schedule", default=None,
                   help="comma list of quadratic-term counts")
    p.add_argument("--ranking-metric", default=None, choices=charac.METRIC_COLUMNS)
    p.add_argument("--out", default="pool.json")
    _add_common(p)
    p.set_defaults(func=cmd_map)

    p = subs.add_parser("dse", help="search-method comparison experiment")
    _add_experiment_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_dse)

    p = subs.add_parser("app", help="application-kernel-driven experiment")
    p.add_argument("--kernel", required=True, choices=apps.KERNEL_KINDS)
    p.add_argument("--behav-max", type=float, default=None,
                   help="behavioral constraint scale (default: all-LUTs-removed error)")
    _add_experiment_flags(p, behav_choices=False)
    _add_common(p)
    p.set_defaults(func=cmd_app)

    p = subs.add_parser("run-all", help="full pipeline from a run config file")
    p.add_argument("--config", required=True, help="JSON run-configuration file")
    _add_common(p)
    p.set_defaults(func=cmd_run_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit 2 for usage problems; those are validation errors
        return EXIT_OK if not exc.code else EXIT_VALIDATION
    status = {"command": args.command, "status": "ok", "outputs": []}
    try:
        args.func(args, status)
    except (AxkitError, FileNotFoundError, json.JSONDecodeError) as exc:
        status["status"] = "error"
        status["error"] = str(exc)
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps(status, sort_keys=True), file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:                      # pragma: no cover - safety net
        status["status"] = "error"
        status["error"] = f"{type(exc).__name__}: {exc}"
        print(f"internal error: {status['error']}", file=sys.stderr)
        if args.json:
            print(json.dumps(status, sort_keys=True), file=sys.stderr)
        return EXIT_RUNTIME
    if args.json:
        print(json.dumps(status, sort_keys=True), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
