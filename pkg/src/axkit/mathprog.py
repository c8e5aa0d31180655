"""Constrained pseudo-boolean optimization over LUT-usage configurations.

A problem instance carries two surrogate expressions (circuit cost and
behavioral error), each of the form

    v = intercept + sum_i c_i * l_i + sum_(i,j) c_ij * l_i * l_j

with the quadratic products restricted to a prefix of a correlation-ranked
pair list.  Both expressions are constrained from above (bounds are scaled
dataset maxima) and combined into one scalar objective

    minimize  wt_b * v_behav + (1 - wt_b) * v_ppa.

Two solvers are provided: exact depth-first branch-and-bound over the binary
variables (the optimistic completion bound adds every still-possible
negative monomial), and a seeded multi-start local search with an adaptive
penalty for constraint violations.  Solution values are always re-evaluated
through the canonical `MapProblem.evaluate`, so exhaustive-scan comparisons
are bit-exact.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace

import numpy as np

from . import netlist as nl
from .errors import ConfigurationError, ValidationError

log = logging.getLogger(__name__)

EXACT_MAX_L = 24
DEFAULT_RESTARTS = 8
DEFAULT_BUDGET = 400
CONST_SF_SWEEP = (0.2, 0.5, 0.8, 1.0, 1.2, 1.5)
_EPS = 1e-12


@dataclass(frozen=True)
class MapProblem:
    L: int
    wt_b: float
    max_ppa: float
    max_behav: float
    n_quad: int
    ppa_intercept: float
    ppa_linear: tuple[float, ...]
    ppa_quad: tuple[tuple[int, int, float], ...]
    behav_intercept: float
    behav_linear: tuple[float, ...]
    behav_quad: tuple[tuple[int, int, float], ...]
    ppa_metric: str = "ppa"
    behav_metric: str = "behav"

    def evaluate(self, config) -> tuple[float, float]:
        """Canonical support-variable values (fixed summation order)."""
        vp = self.ppa_intercept
        for i, c in enumerate(self.ppa_linear):
            vp += c * config[i]
        for i, j, c in self.ppa_quad:
            vp += c * (config[i] * config[j])
        vb = self.behav_intercept
        for i, c in enumerate(self.behav_linear):
            vb += c * config[i]
        for i, j, c in self.behav_quad:
            vb += c * (config[i] * config[j])
        return vp, vb

    def objective(self, vp: float, vb: float) -> float:
        return self.wt_b * vb + (1.0 - self.wt_b) * vp

    def is_feasible(self, vp: float, vb: float) -> bool:
        return vp <= self.max_ppa and vb <= self.max_behav

    def evaluate_many(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized counterpart used inside the heuristic search."""
        vp = np.full(len(X), self.ppa_intercept)
        vb = np.full(len(X), self.behav_intercept)
        for i, c in enumerate(self.ppa_linear):
            if c:
                vp += c * X[:, i]
        for i, j, c in self.ppa_quad:
            vp += c * X[:, i] * X[:, j]
        for i, c in enumerate(self.behav_linear):
            if c:
                vb += c * X[:, i]
        for i, j, c in self.behav_quad:
            vb += c * X[:, i] * X[:, j]
        return vp, vb


@dataclass(frozen=True)
class MapSolution:
    config: nl.Config
    v_ppa: float
    v_behav: float
    objective: float
    feasible: bool
    optimality: str                 # proven | heuristic
    wt_b: float | None = None
    n_quad: int | None = None
    const_sf: float | None = None


@dataclass(frozen=True)
class SolutionPool:
    solutions: tuple[MapSolution, ...]
    const_sf: float

    def configs(self) -> list[nl.Config]:
        return [s.config for s in self.solutions]


def formulate(ppa_model, behav_model, wt_b: float, const_sf: float,
              n_quad: int, dataset_maxima: tuple[float, float]) -> MapProblem:
    """Instantiate one problem from two fitted polynomial models.

    The quadratic terms of each model must be stored in ranked order;
    `n_quad` keeps the first n_quad of them and drops the rest.
    """
    if not 0.0 <= wt_b <= 1.0:
        raise ValidationError(f"wt_b must lie in [0, 1], got {wt_b}")
    if const_sf <= 0:
        raise ValidationError("const_sf must be positive")
    if ppa_model.L != behav_model.L:
        raise ValidationError("models disagree on L")
    L = ppa_model.L
    if n_quad > L * (L - 1) // 2:
        raise ValidationError(f"n_quad = {n_quad} exceeds C({L},2)")
    for model in (ppa_model, behav_model):
        if n_quad > len(model.quad_terms):
            raise ValidationError(
                f"model for {model.metric_name!r} has only {len(model.quad_terms)} "
                f"quadratic terms, need {n_quad}")
    p_max, b_max = float(dataset_maxima[0]), float(dataset_maxima[1])
    if p_max <= 0 or b_max <= 0:
        raise ValidationError("dataset maxima must be positive")
    return MapProblem(
        L=L, wt_b=float(wt_b),
        max_ppa=const_sf * p_max, max_behav=const_sf * b_max,
        n_quad=n_quad,
        ppa_intercept=ppa_model.intercept, ppa_linear=tuple(ppa_model.linear),
        ppa_quad=tuple(ppa_model.quad_terms[:n_quad]),
        behav_intercept=behav_model.intercept, behav_linear=tuple(behav_model.linear),
        behav_quad=tuple(behav_model.quad_terms[:n_quad]),
        ppa_metric=ppa_model.metric_name, behav_metric=behav_model.metric_name)


# ---------------------------------------------------------------------------
# exact branch and bound


def _bound(intercept, linear, quad, x, depth) -> float:
    """Optimistic lower bound given bits 0..depth-1 of x are fixed."""
    total = intercept
    for i, c in enumerate(linear):
        if i < depth:
            if x[i]:
                total += c
        elif c < 0.0:
            total += c
    for i, j, c in quad:
        if j < depth:
            if x[i] and x[j]:
                total += c
        elif i < depth and not x[i]:
            pass                    # product already forced to 0
        elif c < 0.0:
            total += c
    return total


def solve_exact(problem: MapProblem) -> MapSolution | None:
    """Provably optimal feasible solution, or None when none exists.

    Depth-first search assigns bits in index order trying 0 before 1, so the
    first optimum found (updates are strict-improvement only) is the
    lexicographically smallest among ties.
    """
    L = problem.L
    if L > EXACT_MAX_L:
        raise ConfigurationError(f"exact solver capped at L = {EXACT_MAX_L}, got {L}")
    x = [0] * L
    best: list = [None, 0.0]        # config, objective

    def descend(depth: int) -> None:
        bp = _bound(problem.ppa_intercept, problem.ppa_linear, problem.ppa_quad, x, depth)
        if bp > problem.max_ppa + _EPS:
            return
        bb = _bound(problem.behav_intercept, problem.behav_linear, problem.behav_quad,
                    x, depth)
        if bb > problem.max_behav + _EPS:
            return
        if best[0] is not None and problem.objective(bp, bb) > best[1] + _EPS:
            return
        if depth == L:
            vp, vb = problem.evaluate(x)
            if problem.is_feasible(vp, vb):
                obj = problem.objective(vp, vb)
                if best[0] is None or obj < best[1]:
                    best[0], best[1] = tuple(x), obj
            return
        x[depth] = 0
        descend(depth + 1)
        x[depth] = 1
        descend(depth + 1)
        x[depth] = 0

    descend(0)
    if best[0] is None:
        return None
    vp, vb = problem.evaluate(best[0])
    return MapSolution(config=best[0], v_ppa=vp, v_behav=vb,
                       objective=problem.objective(vp, vb),
                       feasible=True, optimality="proven",
                       wt_b=problem.wt_b, n_quad=problem.n_quad)


# ---------------------------------------------------------------------------
# heuristic search


def _violation(problem: MapProblem, vp, vb):
    return (np.maximum(0.0, vp - problem.max_ppa) / problem.max_ppa
            + np.maximum(0.0, vb - problem.max_behav) / problem.max_behav)


def _neighbors(x: np.ndarray) -> np.ndarray:
    L = len(x)
    rows = [x.copy() for _ in range(L + L * (L - 1) // 2)]
    k = 0
    for i in range(L):
        rows[k][i] ^= 1
        k += 1
    for i in range(L):
        for j in range(i + 1, L):
            rows[k][i] ^= 1
            rows[k][j] ^= 1
            k += 1
    return np.stack(rows)


def solve_heuristic(problem: MapProblem, seed: int,
                    restarts: int = DEFAULT_RESTARTS,
                    budget: int = DEFAULT_BUDGET) -> MapSolution:
    """Multi-start steepest descent over 1-flip and 2-flip moves.

    Infeasibility is handled by an adaptive penalty (violations normalized by
    the constraint bounds); `budget` caps improvement steps per start, so a
    zero budget returns the best raw start point.  Always returns a solution;
    the feasible flag reports whether the constraints were actually met.
    """
    rng = np.random.default_rng(seed)
    L = problem.L
    starts = [np.zeros(L, dtype=np.int64), np.ones(L, dtype=np.int64)]
    for r in range(max(0, restarts - 2)):
        density = (r + 0.5) / max(1, restarts - 2)
        starts.append((rng.random(L) < density).astype(np.int64))

    sp, sb = problem.evaluate_many(np.stack(starts))
    mu0 = 10.0 * (1.0 + float(np.abs(problem.objective(sp, sb)).max()))

    best_key, best_x = None, None
    for x in starts:
        x = x.copy()
        mu = mu0
        for _ in range(4):                     # penalty escalations
            steps = 0
            while steps < budget:
                cand = np.concatenate([x[None, :], _neighbors(x)])
                vp, vb = problem.evaluate_many(cand)
                pen = problem.objective(vp, vb) + mu * _violation(problem, vp, vb)
                pick = int(np.argmin(pen))
                if pick == 0 or pen[pick] >= pen[0] - 1e-15:
                    break
                x = cand[pick]
                steps += 1
            vp0, vb0 = problem.evaluate(x.tolist())
            if problem.is_feasible(vp0, vb0):
                break
            mu *= 10.0
        vp0, vb0 = problem.evaluate(x.tolist())
        viol = float(_violation(problem, np.array([vp0]), np.array([vb0]))[0])
        key = (not problem.is_feasible(vp0, vb0), viol, problem.objective(vp0, vb0),
               tuple(int(b) for b in x))
        if best_key is None or key < best_key:
            best_key, best_x = key, tuple(int(b) for b in x)

    vp, vb = problem.evaluate(best_x)
    return MapSolution(config=best_x, v_ppa=vp, v_behav=vb,
                       objective=problem.objective(vp, vb),
                       feasible=problem.is_feasible(vp, vb),
                       optimality="heuristic",
                       wt_b=problem.wt_b, n_quad=problem.n_quad)


# ---------------------------------------------------------------------------
# sweep pool


def default_quad_schedule(L: int) -> tuple[int, ...]:
    full = L * (L - 1) // 2
    return tuple(sorted({0, L // 2, L, min(2 * L, full), full}))


def build_pool(ppa_model, behav_model, const_sf: float, ranked_pairs,
               wt_step: float = 0.05, n_quad_schedule=None,
               dataset_maxima: tuple[float, float] | None = None,
               seed: int = 0) -> SolutionPool:
    """Solve the full (weight grid x quadratic-term schedule) sweep.

    Models must have been fit with quadratic terms in `ranked_pairs` order.
    Infeasible grid cells contribute nothing; duplicate optimal configs are
    kept once (first occurrence wins, scanning schedules outward and weights
    upward).
    """
    if dataset_maxima is None:
        raise ValidationError("build_pool requires dataset_maxima = (P_MAX, B_MAX)")
    steps = round(1.0 / wt_step)
    if steps < 1 or abs(steps * wt_step - 1.0) > 1e-9:
        raise ValidationError(f"wt_step = {wt_step} does not divide 1 evenly")
    weights = [i / steps for i in range(steps + 1)]

    L = ppa_model.L
    if n_quad_schedule is None:
        n_quad_schedule = default_quad_schedule(L)
    n_quad_schedule = sorted(set(int(q) for q in n_quad_schedule))
    need = max(n_quad_schedule)
    ranked = [tuple(p) for p in ranked_pairs]
    for model in (ppa_model, behav_model):
        stored = [(i, j) for i, j, _ in model.quad_terms[:need]]
        if stored != ranked[:need]:
            raise ValidationError(
                f"model for {model.metric_name!r} was not fit on the ranked pair prefix")

    chosen: dict[nl.Config, MapSolution] = {}
    for idx_q, n_quad in enumerate(n_quad_schedule):
        for idx_w, wt in enumerate(weights):
            problem = formulate(ppa_model, behav_model, wt, const_sf,
                                n_quad, dataset_maxima)
            if L <= EXACT_MAX_L:
                sol = solve_exact(problem)
            else:
                sol = solve_heuristic(problem, seed=seed + 101 * idx_q + idx_w)
                if not sol.feasible:
                    sol = None
            if sol is None:
                log.info("map: infeasible cell wt_b=%.2f n_quad=%d const_sf=%.2f",
                         wt, n_quad, const_sf)
                continue
            sol = replace(sol, const_sf=const_sf)
            chosen.setdefault(sol.config, sol)
    return SolutionPool(solutions=tuple(chosen.values()), const_sf=const_sf)


# ---------------------------------------------------------------------------
# serialization


def pool_to_json(pool: SolutionPool) -> dict:
    return {
        "const_sf": pool.const_sf,
        "solutions": [
            {"config": nl.format_config(s.config), "v_ppa": s.v_ppa,
             "v_behav": s.v_behav, "objective": s.objective,
             "feasible": s.feasible, "optimality": s.optimality,
             "wt_b": s.wt_b, "n_quad": s.n_quad, "const_sf": s.const_sf}
            for s in pool.solutions
        ],
    }


def pool_from_json(doc: dict) -> SolutionPool:
    try:
        sols = tuple(
            MapSolution(config=nl.parse_config(s["config"]), v_ppa=float(s["v_ppa"]),
                        v_behav=float(s["v_behav"]), objective=float(s["objective"]),
                        feasible=bool(s["feasible"]), optimality=s["optimality"],
                        wt_b=s.get("wt_b"), n_quad=s.get("n_quad"),
                        const_sf=s.get("const_sf"))
            for s in doc["solutions"])
        return SolutionPool(solutions=sols, const_sf=float(doc["const_sf"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed pool document: {exc}") from exc


def save_pool(pool: SolutionPool, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pool_to_json(pool), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_pool(path) -> SolutionPool:
    with open(path, "r", encoding="utf-8") as fh:
        return pool_from_json(json.load(fh))
