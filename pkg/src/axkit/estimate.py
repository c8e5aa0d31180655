"""Surrogate model fitting for characterized metrics.

Two estimator kinds share one interface:

* poly — least squares on the monomial basis {1, l_i, l_i*l_j} with the
  quadratic products taken as a prefix of a correlation-ranked pair list.
  The target is MinMax-scaled before fitting (fit on the training split);
  stored coefficients are mapped back to the raw metric scale so downstream
  optimization works in metric units.  FitReport errors are in scaled units.
* tree_ensemble — a bagged forest of depth-limited regression trees.
  scikit-learn is used only to fit; the trees are copied into plain arrays
  at fit time and every prediction afterwards walks those arrays directly.
  FitReport errors are in raw metric units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from sklearn.ensemble import RandomForestRegressor

from . import stats
from .errors import ValidationError

RIDGE_LAMBDA = 1e-8
COND_LIMIT = 1e12
N_TREES = 100
TREE_DEPTH = 6
BAG_FRACTION = 0.8
TEST_FRACTION = 0.2


def default_quad_budget(L: int) -> int:
    return min(2 * L, L * (L - 1) // 2)


@dataclass(frozen=True)
class PolyModel:
    metric_name: str
    L: int
    intercept: float
    linear: tuple[float, ...]
    quad_terms: tuple[tuple[int, int, float], ...]   # (i, j, coeff) with i < j
    target_min: float
    target_max: float
    rank_deficient: bool = False


@dataclass(frozen=True)
class TreeEnsembleModel:
    metric_name: str
    L: int
    trees: tuple[dict, ...]   # arrays: left, right, feature, threshold, value


@dataclass(frozen=True)
class Estimator:
    kind: str                               # poly | tree_ensemble
    payload: PolyModel | TreeEnsembleModel

    @property
    def metric_name(self) -> str:
        return self.payload.metric_name


@dataclass(frozen=True)
class FitReport:
    r2_train: float
    r2_test: float
    mae_train: float
    mae_test: float
    mse_train: float
    mse_test: float
    n_quad: int


def _split(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 2:
        raise ValidationError("need at least 2 rows to make a train/test split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_test = max(1, round(TEST_FRACTION * n))
    return perm[n_test:], perm[:n_test]


def _r2(y, pred) -> float:
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float(((y - pred) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0 if ss_res <= 1e-18 else 0.0
    return 1.0 - ss_res / ss_tot


def _report(y_train, p_train, y_test, p_test, n_quad) -> FitReport:
    return FitReport(
        r2_train=_r2(y_train, p_train), r2_test=_r2(y_test, p_test),
        mae_train=float(np.abs(y_train - p_train).mean()),
        mae_test=float(np.abs(y_test - p_test).mean()),
        mse_train=float(((y_train - p_train) ** 2).mean()),
        mse_test=float(((y_test - p_test) ** 2).mean()),
        n_quad=n_quad)


def _design(X: np.ndarray, quad_pairs) -> np.ndarray:
    cols = [np.ones(len(X)), *(X[:, k] for k in range(X.shape[1]))]
    cols += [X[:, i] * X[:, j] for i, j in quad_pairs]
    return np.column_stack(cols)


def check_quad_pairs(pairs, L: int) -> list[tuple[int, int]]:
    seen = set()
    out = []
    for pair in pairs:
        i, j = int(pair[0]), int(pair[1])
        if not 0 <= i < j < L:
            raise ValidationError(f"quadratic pair ({i},{j}) invalid for L = {L}")
        if (i, j) in seen:
            raise ValidationError(f"duplicate quadratic pair ({i},{j})")
        seen.add((i, j))
        out.append((i, j))
    return out


def fit_poly(dataset, metric: str, quad_terms, split_seed: int) -> tuple[PolyModel, FitReport]:
    X = dataset.config_matrix()
    y = dataset.metric_values(metric)
    L = X.shape[1]
    pairs = check_quad_pairs(quad_terms, L)
    train, test = _split(len(y), split_seed)

    t_min = float(y[train].min())
    t_max = float(y[train].max())
    denom = (t_max - t_min) or 1.0
    ys = (y - t_min) / denom

    A = _design(X, pairs)
    At = A[train]
    AtA = At.T @ At
    Aty = At.T @ ys[train]
    rank_deficient = False
    try:
        if np.linalg.cond(AtA) > COND_LIMIT:
            raise np.linalg.LinAlgError("ill-conditioned normal equations")
        w = np.linalg.solve(AtA, Aty)
    except np.linalg.LinAlgError:
        rank_deficient = True
        w = np.linalg.solve(AtA + RIDGE_LAMBDA * np.eye(len(AtA)), Aty)

    pred = A @ w
    report = _report(ys[train], pred[train], ys[test], pred[test], len(pairs))
    model = PolyModel(
        metric_name=metric, L=L,
        intercept=t_min + denom * float(w[0]),
        linear=tuple(denom * float(c) for c in w[1:1 + L]),
        quad_terms=tuple((i, j, denom * float(c))
                         for (i, j), c in zip(pairs, w[1 + L:])),
        target_min=t_min, target_max=t_max,
        rank_deficient=rank_deficient)
    return model, report


# ---------------------------------------------------------------------------
# prediction


def _poly_predict_many(model: PolyModel, X: np.ndarray) -> np.ndarray:
    out = np.full(len(X), model.intercept)
    for k, c in enumerate(model.linear):
        out += c * X[:, k]
    for i, j, c in model.quad_terms:
        out += c * X[:, i] * X[:, j]
    return out


def _tree_predict_many(model: TreeEnsembleModel, X: np.ndarray) -> np.ndarray:
    total = np.zeros(len(X))
    rows = np.arange(len(X))
    for tree in model.trees:
        left, right = tree["left"], tree["right"]
        nodes = np.zeros(len(X), dtype=np.int64)
        while True:
            interior = left[nodes] >= 0
            if not interior.any():
                break
            go_left = X[rows, tree["feature"][nodes]] <= tree["threshold"][nodes]
            nodes = np.where(interior, np.where(go_left, left[nodes], right[nodes]), nodes)
        total += tree["value"][nodes]
    return total / len(model.trees)


def predict_many(model, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    payload = model.payload if isinstance(model, Estimator) else model
    if X.shape[1] != payload.L:
        raise ValidationError(f"configs have {X.shape[1]} bits, model expects {payload.L}")
    if isinstance(payload, PolyModel):
        return _poly_predict_many(payload, X)
    return _tree_predict_many(payload, X)


def predict(model, config) -> float:
    return float(predict_many(model, np.asarray(config, dtype=float)[None, :])[0])


def fit_estimator(dataset, metric: str, kind: str, seed: int) -> tuple[Estimator, FitReport]:
    if kind == "poly":
        ranked = stats.rank_quadratic_features(dataset, metric)
        budget = default_quad_budget(dataset.L)
        model, report = fit_poly(dataset, metric, ranked[:budget], split_seed=seed)
        return Estimator("poly", model), report
    if kind != "tree_ensemble":
        raise ValidationError(f"unknown estimator kind {kind!r}")

    X = dataset.config_matrix()
    y = dataset.metric_values(metric)
    train, test = _split(len(y), seed)
    forest = RandomForestRegressor(
        n_estimators=N_TREES, max_depth=TREE_DEPTH, bootstrap=True,
        max_samples=BAG_FRACTION, random_state=seed, n_jobs=1)
    forest.fit(X[train], y[train])
    trees = []
    for est in forest.estimators_:
        t = est.tree_
        trees.append({
            "left": t.children_left.astype(np.int64),
            "right": t.children_right.astype(np.int64),
            "feature": np.maximum(t.feature, 0).astype(np.int64),  # leaves: unused
            "threshold": t.threshold.astype(float),
            "value": t.value[:, 0, 0].astype(float),
        })
    model = TreeEnsembleModel(metric_name=metric, L=X.shape[1], trees=tuple(trees))
    pred = _tree_predict_many(model, X)
    report = _report(y[train], pred[train], y[test], pred[test], 0)
    return Estimator("tree_ensemble", model), report


# ---------------------------------------------------------------------------
# serialization


def model_to_json(model) -> dict:
    if isinstance(model, Estimator):
        return {"kind": model.kind, "payload": model_to_json(model.payload)}
    if isinstance(model, PolyModel):
        return {"kind": "poly_payload", "metric": model.metric_name, "L": model.L,
                "intercept": model.intercept, "linear": list(model.linear),
                "quad_terms": [[i, j, c] for i, j, c in model.quad_terms],
                "target_min": model.target_min, "target_max": model.target_max,
                "rank_deficient": model.rank_deficient}
    if isinstance(model, TreeEnsembleModel):
        return {"kind": "tree_payload", "metric": model.metric_name, "L": model.L,
                "trees": [{k: v.tolist() for k, v in t.items()} for t in model.trees]}
    raise ValidationError(f"cannot serialize {type(model).__name__}")


def model_from_json(doc: dict):
    try:
        kind = doc["kind"]
        if kind in ("poly", "tree_ensemble"):
            return Estimator(kind, model_from_json(doc["payload"]))
        if kind == "poly_payload":
            return PolyModel(doc["metric"], int(doc["L"]), float(doc["intercept"]),
                             tuple(float(c) for c in doc["linear"]),
                             tuple((int(i), int(j), float(c)) for i, j, c in doc["quad_terms"]),
                             float(doc["target_min"]), float(doc["target_max"]),
                             bool(doc["rank_deficient"]))
        if kind == "tree_payload":
            trees = tuple(
                {"left": np.array(t["left"], dtype=np.int64),
                 "right": np.array(t["right"], dtype=np.int64),
                 "feature": np.array(t["feature"], dtype=np.int64),
                 "threshold": np.array(t["threshold"], dtype=float),
                 "value": np.array(t["value"], dtype=float)}
                for t in doc["trees"])
            return TreeEnsembleModel(doc["metric"], int(doc["L"]), trees)
        raise ValidationError(f"unknown model kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed model document: {exc}") from exc


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
