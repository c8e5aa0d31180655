"""Multi-objective design-space exploration.

NSGA-II (fast non-dominated sorting, crowding distance, tournament
selection, single-point crossover, per-bit mutation) searches the
configuration space for minimal (circuit-cost, behavioral-error) pairs,
optionally seeded with the optimization pool.  Constraint handling defaults
to constraint-domination: feasible individuals beat infeasible ones, and
within each class plain objective dominance applies (sound here because the
constraints are upper bounds on the two objectives themselves).

Fronts come in two kinds: PPF (points scored by the search's own fitness,
i.e. possibly estimator-predicted) and VPF (the same configs re-scored by
exhaustive ground-truth characterization, then re-filtered).  Hypervolume is
the exact dominated area against a reference point, computed after dividing
both objectives by const_sf-scaled dataset maxima.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import charac
from . import netlist as nl
from .dataset import format_value
from .errors import ValidationError

log = logging.getLogger(__name__)

METHOD_NAMES = ("GA", "MaP", "MaP+GA")


@dataclass(frozen=True)
class GaSettings:
    pop_size: int = 64
    max_generations: int = 250
    tournament_size: int = 2
    crossover_rate: float = 0.9
    mutation_rate: float | None = None      # None means 1/L
    seed: int = 0
    constraint_mode: str = "constraint_domination"   # or "penalty"

    def validate(self) -> None:
        if self.pop_size < 2 or self.pop_size % 2:
            raise ValidationError("pop_size must be even and >= 2")
        if self.max_generations < 1:
            raise ValidationError("max_generations must be >= 1")
        if self.tournament_size < 1:
            raise ValidationError("tournament_size must be >= 1")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValidationError("crossover_rate must lie in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValidationError("mutation_rate must lie in [0, 1]")
        if self.constraint_mode not in ("constraint_domination", "penalty"):
            raise ValidationError(f"unknown constraint mode {self.constraint_mode!r}")


@dataclass(frozen=True)
class ParetoFront:
    points: tuple[tuple[nl.Config, float, float], ...]
    kind: str                                # PPF | VPF

    def values(self) -> np.ndarray:
        return np.array([(p, b) for _, p, b in self.points], dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class HvReport:
    hypervolume: float
    reference_point: tuple[float, float]
    normalization: tuple[float, float, float]    # P_MAX, B_MAX, const_sf


# ---------------------------------------------------------------------------
# dominance machinery


def _domination_matrix(objs: np.ndarray, feas: np.ndarray, mode: str) -> np.ndarray:
    if mode == "penalty":
        objs = objs + np.where(feas[:, None], 0.0, 1e9)
        feas = np.ones(len(objs), dtype=bool)
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dom = le & lt
    tier = feas[:, None] & ~feas[None, :]
    same = feas[:, None] == feas[None, :]
    return tier | (same & dom)


def _front_ranks(dom: np.ndarray) -> np.ndarray:
    n = len(dom)
    counts = dom.sum(axis=0).astype(np.int64)
    ranks = np.full(n, -1, dtype=np.int64)
    r = 0
    while (ranks < 0).any():
        members = np.where((counts == 0) & (ranks < 0))[0]
        if len(members) == 0:       # defensive; cannot happen with a strict order
            members = np.where(ranks < 0)[0]
        ranks[members] = r
        counts -= dom[members].sum(axis=0)
        counts[members] = -1
        r += 1
    return ranks


def _crowding(objs: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    n = len(objs)
    dist = np.zeros(n)
    for r in np.unique(ranks):
        idx = np.where(ranks == r)[0]
        if len(idx) <= 2:
            dist[idx] = np.inf
            continue
        for k in range(objs.shape[1]):
            vals = objs[idx, k]
            order = np.argsort(vals, kind="stable")
            lo, hi = vals[order[0]], vals[order[-1]]
            dist[idx[order[0]]] = dist[idx[order[-1]]] = np.inf
            if hi > lo:
                gaps = (vals[order[2:]] - vals[order[:-2]]) / (hi - lo)
                dist[idx[order[1:-1]]] += gaps
    return dist


# ---------------------------------------------------------------------------
# NSGA-II


def nsga2(evalfn, L: int, settings: GaSettings, seed_pop=None,
          generations: int | None = None, on_generation=None):
    """Run the genetic search; returns the final population.

    evalfn(config) -> (ppa, behav, feasible).  The population is a list of
    (config, ppa, behav, feasible) tuples.  `generations` caps (never raises)
    the settings' max_generations; 0 returns the evaluated initial
    population.  Fully deterministic for a fixed seed.
    """
    settings.validate()
    rng = np.random.default_rng(settings.seed)
    mut = settings.mutation_rate if settings.mutation_rate is not None else 1.0 / L
    n_pop = settings.pop_size
    gens = settings.max_generations if generations is None \
        else min(generations, settings.max_generations)

    configs: list[nl.Config] = []
    seen: set[nl.Config] = set()
    for cfg in (seed_pop or []):
        cfg = nl.check_config(cfg, L)
        if cfg not in seen:
            seen.add(cfg)
            configs.append(cfg)

    evals = 0

    def score(batch):
        nonlocal evals
        out = []
        for cfg in batch:
            p, b, f = evalfn(cfg)
            out.append((float(p), float(b), bool(f)))
            evals += 1
        return out

    if len(configs) > n_pop:
        log.info("dse: truncating %d seed configs to population size %d",
                 len(configs), n_pop)
        scored = score(configs)
        objs = np.array([s[:2] for s in scored])
        feas = np.array([s[2] for s in scored])
        ranks = _front_ranks(_domination_matrix(objs, feas, settings.constraint_mode))
        crowd = _crowding(objs, ranks)
        order = sorted(range(len(configs)), key=lambda i: (ranks[i], -crowd[i], i))
        configs = [configs[i] for i in order[:n_pop]]
        seen = set(configs)
        evals = 0                    # the real run re-scores the survivors below

    tries = 0
    while len(configs) < n_pop:
        cfg = tuple(int(b) for b in rng.integers(0, 2, L))
        tries += 1
        if cfg in seen or tries > 50 * n_pop:
            if tries > 50 * n_pop:
                configs.append(cfg)
            continue
        seen.add(cfg)
        configs.append(cfg)

    scored = score(configs)
    pop = [(c, *s) for c, s in zip(configs, scored)]

    def rank_crowd(population):
        objs = np.array([(p, b) for _, p, b, _ in population])
        feas = np.array([f for _, _, _, f in population])
        ranks = _front_ranks(_domination_matrix(objs, feas, settings.constraint_mode))
        return ranks, _crowding(objs, ranks)

    ranks, crowd = rank_crowd(pop)
    if on_generation is not None:
        on_generation(0, evals, list(pop))

    for gen in range(gens):
        def pick() -> int:
            contenders = rng.integers(0, n_pop, settings.tournament_size)
            return min(contenders, key=lambda i: (ranks[i], -crowd[i], i))

        children: list[nl.Config] = []
        while len(children) < n_pop:
            pa, pb = list(pop[pick()][0]), list(pop[pick()][0])
            if rng.random() < settings.crossover_rate and L > 1:
                cut = int(rng.integers(1, L))
                pa, pb = pa[:cut] + pb[cut:], pb[:cut] + pa[cut:]
            for child in (pa, pb):
                flips = rng.random(L) < mut
                cfg = tuple(int(b) ^ int(f) for b, f in zip(child, flips))
                if len(children) < n_pop:
                    children.append(cfg)

        union = pop + [(c, *s) for c, s in zip(children, score(children))]
        u_ranks, u_crowd = rank_crowd(union)
        order = sorted(range(len(union)), key=lambda i: (u_ranks[i], -u_crowd[i], i))
        pop = [union[i] for i in order[:n_pop]]
        # re-rank within the survivors so tournament ranks are self-consistent
        ranks, crowd = rank_crowd(pop)
        if on_generation is not None:
            on_generation(gen + 1, evals, list(pop))
    return pop


# ---------------------------------------------------------------------------
# fronts and hypervolume


def pareto_filter(points, constraints=None, kind: str = "PPF") -> ParetoFront:
    """Drop constraint violators and dominated points; order by ascending ppa.

    `points` holds (config, ppa, behav) triples; duplicate configs keep their
    first occurrence, and distinct configs with identical objective values
    are all retained (neither dominates the other).
    """
    triples = []
    seen = set()
    for cfg, p, b in points:
        cfg = tuple(int(x) for x in cfg)
        if cfg in seen:
            continue
        seen.add(cfg)
        p, b = float(p), float(b)
        if constraints is not None:
            max_p, max_b = constraints
            if p > max_p or b > max_b:
                continue
        triples.append((cfg, p, b))
    if not triples:
        return ParetoFront(points=(), kind=kind)
    objs = np.array([(p, b) for _, p, b in triples])
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dominated = (le & lt).any(axis=0)
    kept = [t for t, d in zip(triples, dominated) if not d]
    kept.sort(key=lambda t: (t[1], t[2], t[0]))
    return ParetoFront(points=tuple(kept), kind=kind)


def hypervolume2d(front, reference_point) -> float:
    """Exact area dominated by the front up to the reference point."""
    ref_p, ref_b = float(reference_point[0]), float(reference_point[1])
    if isinstance(front, ParetoFront):
        pts = [(p, b) for _, p, b in front.points]
    else:
        pts = [(float(p), float(b)) for p, b in front]
    inside = [(p, b) for p, b in pts if p < ref_p and b < ref_b]
    if len(inside) < len(pts):
        log.warning("hypervolume2d: dropped %d point(s) not dominating the reference",
                    len(pts) - len(inside))
    if not inside:
        return 0.0
    inside.sort()
    area, prev_b = 0.0, ref_b
    for p, b in inside:
        if b < prev_b:
            area += (ref_p - p) * (prev_b - b)
            prev_b = b
    return area


def normalized_hypervolume(front, maxima: tuple[float, float],
                           const_sf: float) -> HvReport:
    p_max, b_max = maxima
    scale_p, scale_b = const_sf * p_max, const_sf * b_max
    if isinstance(front, ParetoFront):
        pts = [(p / scale_p, b / scale_b) for _, p, b in front.points]
    else:
        pts = [(p / scale_p, b / scale_b) for p, b in front]
    hv = hypervolume2d(pts, (1.0, 1.0))
    return HvReport(hypervolume=hv, reference_point=(1.0, 1.0),
                    normalization=(p_max, b_max, const_sf))


def vpf(front: ParetoFront, netlist: nl.Netlist,
        ppa_metric: str = "pdplut", behav_metric: str = "avg_abs_rel_err",
        constraints=None) -> ParetoFront:
    """Re-characterize a front's configs with ground truth and re-filter."""
    records = charac.characterize(netlist, [cfg for cfg, _, _ in front.points])
    points = [(r.config, r.metric(ppa_metric), r.metric(behav_metric)) for r in records]
    return pareto_filter(points, constraints=constraints, kind="VPF")


# ---------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentSetup:
    netlist: nl.Netlist
    dataset_maxima: tuple[float, float]
    ppa_metric: str = "pdplut"
    behav_metric: str = "avg_abs_rel_err"
    settings: GaSettings = field(default_factory=GaSettings)
    pool: object | None = None                 # SolutionPool for MaP seeding
    fitness: str = "ground_truth"              # or "estimator"
    ppa_estimator: object | None = None
    behav_estimator: object | None = None
    app: object | None = None                  # AppKernel for application-level error
    toggle_model: str = "gray"


@dataclass
class ExperimentReport:
    const_sf: float
    bounds: tuple[float, float]
    fronts: dict                               # (method, seed) -> (PPF, VPF)
    trajectory: list                           # (method, seed, evals, hv)
    summary: list                              # (method, seed, ppf_hv, vpf_hv)
    out_dir: str | None


def _ground_truth_fn(setup: ExperimentSetup):
    from . import apps                          # local import, avoids a cycle
    memo: dict[nl.Config, tuple[float, float]] = {}

    def measure(cfg: nl.Config) -> tuple[float, float]:
        got = memo.get(cfg)
        if got is None:
            ppa = charac.ppa_metrics(setup.netlist, cfg, setup.toggle_model)
            if setup.app is not None:
                behav = apps.app_behav(setup.app, nl.product_table(setup.netlist, cfg))
            else:
                behav = charac.behav_metrics(setup.netlist, cfg)
            p = getattr(ppa, setup.ppa_metric)
            b = behav if setup.app is not None else getattr(behav, setup.behav_metric)
            got = memo[cfg] = (float(p), float(b))
        return got

    return measure


def _fitness_fn(setup: ExperimentSetup, bounds: tuple[float, float]):
    max_p, max_b = bounds
    if setup.fitness == "ground_truth":
        measure = _ground_truth_fn(setup)

        def fn(cfg):
            p, b = measure(cfg)
            return p, b, p <= max_p and b <= max_b
        return fn
    if setup.fitness != "estimator":
        raise ValidationError(f"unknown fitness mode {setup.fitness!r}")
    if setup.ppa_estimator is None or setup.behav_estimator is None:
        raise ValidationError("estimator fitness needs both estimators")
    from .estimate import predict

    def fn(cfg):
        p = predict(setup.ppa_estimator, cfg)
        b = predict(setup.behav_estimator, cfg)
        return p, b, p <= max_p and b <= max_b
    return fn


def run_experiment(setup: ExperimentSetup, const_sf: float,
                   methods=("GA", "MaP", "MaP+GA"), n_seeds: int = 10,
                   generations: int | None = None,
                   out_dir=None) -> ExperimentReport:
    """Compare search methods under one constraint scaling factor.

    All GA variants get identical evaluation budgets; MaP is the search-free
    baseline (its pool scored by the same fitness).  Per run, the report
    holds the predicted front (PPF), the ground-truth re-characterized front
    (VPF), a normalized-hypervolume trajectory, and final hypervolumes.
    """
    for m in methods:
        if m not in METHOD_NAMES:
            raise ValidationError(f"unknown method {m!r}")
    if ("MaP" in methods or "MaP+GA" in methods) and setup.pool is None:
        raise ValidationError("MaP methods need setup.pool")
    p_max, b_max = setup.dataset_maxima
    bounds = (const_sf * p_max, const_sf * b_max)
    fitness = _fitness_fn(setup, bounds)
    gt = _ground_truth_fn(setup)
    L = setup.netlist.removable_count

    def make_vpf(ppf: ParetoFront) -> ParetoFront:
        pts = [(cfg, *gt(cfg)) for cfg, _, _ in ppf.points]
        return pareto_filter(pts, constraints=bounds, kind="VPF")

    fronts, trajectory, summary = {}, [], []
    for m_idx, method in enumerate(methods):
        if method == "MaP":
            pts = [(cfg, *fitness(cfg)[:2]) for cfg in setup.pool.configs()]
            ppf = pareto_filter(pts, constraints=bounds, kind="PPF")
            vpf_front = make_vpf(ppf)
            fronts[(method, 0)] = (ppf, vpf_front)
            summary.append((method, 0,
                            normalized_hypervolume(ppf, setup.dataset_maxima,
                                                   const_sf).hypervolume,
                            normalized_hypervolume(vpf_front, setup.dataset_maxima,
                                                   const_sf).hypervolume))
            continue
        seeds = setup.pool.configs() if method == "MaP+GA" else None
        for i in range(n_seeds):
            run_settings = replace(setup.settings,
                                   seed=setup.settings.seed + 1000 * m_idx + i)
            rows = []

            def snapshot(gen, evals, population):
                pts = [(c, p, b) for c, p, b, _ in population]
                hv = normalized_hypervolume(
                    pareto_filter(pts, constraints=bounds),
                    setup.dataset_maxima, const_sf).hypervolume
                rows.append((method, i, evals, hv))

            pop = nsga2(fitness, L, run_settings, seed_pop=seeds,
                        generations=generations, on_generation=snapshot)
            trajectory.extend(rows)
            ppf = pareto_filter([(c, p, b) for c, p, b, _ in pop],
                                constraints=bounds, kind="PPF")
            vpf_front = make_vpf(ppf)
            fronts[(method, i)] = (ppf, vpf_front)
            summary.append((method, i,
                            normalized_hypervolume(ppf, setup.dataset_maxima,
                                                   const_sf).hypervolume,
                            normalized_hypervolume(vpf_front, setup.dataset_maxima,
                                                   const_sf).hypervolume))

    report = ExperimentReport(const_sf=const_sf, bounds=bounds, fronts=fronts,
                              trajectory=trajectory, summary=summary,
                              out_dir=str(out_dir) if out_dir else None)
    if out_dir is not None:
        _write_report(report, Path(out_dir))
    return report


def _write_report(report: ExperimentReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for (method, seed), (ppf, vpf_front) in sorted(report.fronts.items()):
        name = f"fronts_{method.replace('+', '_')}_{seed}.csv"
        with open(out_dir / name, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("kind", "config", "ppa", "behav"))
            for front in (ppf, vpf_front):
                for cfg, p, b in front.points:
                    writer.writerow((front.kind, nl.format_config(cfg),
                                     format_value(p), format_value(b)))
    with open(out_dir / "hv_trajectory.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("method", "seed", "evals", "hv"))
        for method, seed, evals, hv in report.trajectory:
            writer.writerow((method, seed, evals, format_value(hv)))
    with open(out_dir / "hv_summary.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("method", "seed", "ppf_hv", "vpf_hv"))
        for method, seed, ppf_hv, vpf_hv in report.summary:
            writer.writerow((method, seed, format_value(ppf_hv), format_value(vpf_hv)))
    _plot_fronts(report, out_dir / "fronts.svg")


def _plot_fronts(report: ExperimentReport, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "axkit"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    markers = {"GA": "o", "MaP": "s", "MaP+GA": "^"}
    for (method, seed), (ppf, vpf_front) in sorted(report.fronts.items()):
        if seed != 0:
            continue
        vals = ppf.values()
        if len(vals):
            ax.scatter(vals[:, 0], vals[:, 1], marker=markers.get(method, "o"),
                       label=f"{method} PPF", alpha=0.8)
        vals = vpf_front.values()
        if len(vals):
            ax.scatter(vals[:, 0], vals[:, 1], marker=markers.get(method, "o"),
                       facecolors="none", edgecolors="gray", label=f"{method} VPF")
    ax.set_xlabel("circuit cost")
    ax.set_ylabel("behavioral error")
    ax.set_title(f"fronts at const_sf = {report.const_sf}")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
