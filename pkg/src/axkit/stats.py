"""Correlation analysis between LUT-usage bits and characterized metrics.

Bivariate analysis is plain sample Pearson correlation of one configuration
bit against a metric.  The joint ("multivariate") coefficient of a bit pair
is sqrt(R^2) of an intercept + two-regressor least-squares fit of the metric
on the pair, clamped to [0, 1].  Ranking all C(L,2) pairs by that value
gives the order in which quadratic product terms enter the surrogate models.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedCorrelationError, ValidationError


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValidationError("pearson needs two equal-length vectors")
    if len(xs) < 2:
        raise ValidationError("pearson needs at least 2 observations")
    xd, yd = xs - xs.mean(), ys - ys.mean()
    sx, sy = float(np.sqrt((xd ** 2).sum())), float(np.sqrt((yd ** 2).sum()))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("zero variance in correlation input")
    r = float((xd * yd).sum()) / (sx * sy)
    return min(max(r, -1.0), 1.0)


def _sqrt_r2(cols: list[np.ndarray], y: np.ndarray) -> float:
    """sqrt(R^2) of OLS on the given regressors; degenerate columns dropped."""
    ybar = y.mean()
    ss_tot = float(((y - ybar) ** 2).sum())
    if ss_tot <= 0.0:
        raise UndefinedCorrelationError("metric has zero variance")
    live = [c for c in cols if c.min() != c.max()]
    if not live:
        raise UndefinedCorrelationError("all regressors have zero variance")
    A = np.column_stack([np.ones(len(y))] + live)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot
    return float(np.sqrt(min(max(r2, 0.0), 1.0)))


def multivariate_r(dataset, lut_x: int, lut_y: int, metric: str) -> float:
    """Joint correlation of metric with the (lut_x, lut_y) usage bits."""
    X = dataset.config_matrix()
    y = dataset.metric_values(metric)
    if len(y) == 0:
        raise ValidationError("empty dataset")
    L = X.shape[1]
    if not (0 <= lut_x < L and 0 <= lut_y < L):
        raise ValidationError(f"LUT indices must lie in [0, {L})")
    i, j = sorted((lut_x, lut_y))  # canonical order keeps (x,y)/(y,x) bit-identical
    cols = [X[:, i]] if i == j else [X[:, i], X[:, j]]
    return _sqrt_r2(cols, y)


def _pair_values(dataset, metric: str) -> list[tuple[int, int, float | None]]:
    X = dataset.config_matrix()
    y = dataset.metric_values(metric)
    if len(y) == 0:
        raise ValidationError("empty dataset")
    L = X.shape[1]
    out = []
    for i in range(L):
        for j in range(i + 1, L):
            try:
                r = _sqrt_r2([X[:, i], X[:, j]], y)
            except UndefinedCorrelationError:
                r = None
            out.append((i, j, r))
    return out


def rank_quadratic_features(dataset, metric: str) -> list[tuple[int, int]]:
    """All C(L,2) index pairs, best joint correlation first.

    Ties break lexicographically; pairs whose correlation is undefined sort
    last (in lexicographic order among themselves).
    """
    pairs = _pair_values(dataset, metric)
    pairs.sort(key=lambda t: (t[2] is None, -(t[2] or 0.0), t[0], t[1]))
    return [(i, j) for i, j, _ in pairs]


@dataclass(frozen=True)
class CorrelationReport:
    metric_name: str
    bivariate: np.ndarray           # length L, signed Pearson r per bit
    multivariate: np.ndarray        # L x L symmetric, diagonal = |bivariate|
    ranking: tuple[tuple[int, int], ...]
    warnings: tuple[str, ...] = ()


def correlation_report(dataset, metric: str) -> CorrelationReport:
    """Full per-metric report; zero-variance entries become 0 with a warning."""
    X = dataset.config_matrix()
    y = dataset.metric_values(metric)
    if len(y) == 0:
        raise ValidationError("empty dataset")
    L = X.shape[1]
    warnings: list[str] = []
    bi = np.zeros(L)
    for i in range(L):
        try:
            bi[i] = pearson(X[:, i], y)
        except UndefinedCorrelationError:
            warnings.append(f"bit {i}: bivariate correlation undefined, reported as 0")
    multi = np.zeros((L, L))
    np.fill_diagonal(multi, np.abs(bi))
    pairs = _pair_values(dataset, metric)
    for i, j, r in pairs:
        if r is None:
            warnings.append(f"pair ({i},{j}): joint correlation undefined, reported as 0")
            r = 0.0
        multi[i, j] = multi[j, i] = r
    pairs.sort(key=lambda t: (t[2] is None, -(t[2] or 0.0), t[0], t[1]))
    ranking = tuple((i, j) for i, j, _ in pairs)
    return CorrelationReport(metric, bi, multi, ranking, tuple(warnings))


def save_reports_csv(reports: list[CorrelationReport], path) -> None:
    """Long-form export: metric,i,j,r.

    Rows with i == j carry the signed bivariate coefficient; rows with i < j
    carry the joint coefficient (the matrix diagonal is its absolute value).
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("metric", "i", "j", "r"))
        for rep in reports:
            L = len(rep.bivariate)
            for i in range(L):
                writer.writerow((rep.metric_name, i, i, repr(float(rep.bivariate[i]))))
                for j in range(i + 1, L):
                    writer.writerow((rep.metric_name, i, j,
                                     repr(float(rep.multivariate[i, j]))))
