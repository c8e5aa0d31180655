import pytest

import axkit.dataset as ds
import axkit.estimate as estimate
import axkit.mathprog as mathprog
import axkit.netlist as nl
import axkit.stats as stats


@pytest.fixture(scope="session")
def mul4s() -> nl.Netlist:
    return nl.build_multiplier(4, signed=True)


@pytest.fixture(scope="session")
def mul8s() -> nl.Netlist:
    return nl.build_multiplier(8, signed=True)


@pytest.fixture(scope="session")
def add3() -> nl.Netlist:
    return nl.build_adder(3)


@pytest.fixture(scope="session")
def full4_dataset(mul4s) -> ds.Dataset:
    plan = ds.SamplingPlan(n_random=1 << mul4s.removable_count, seed=0)
    return ds.build_dataset(mul4s, plan, threads=4)


@pytest.fixture(scope="session")
def behav_ranking(full4_dataset):
    return stats.rank_quadratic_features(full4_dataset, "avg_abs_rel_err")


@pytest.fixture(scope="session")
def poly_models(full4_dataset, behav_ranking):
    """Both surrogates fit on the shared behavioral ranking (MaP convention)."""
    models = {}
    for metric in ("pdplut", "avg_abs_rel_err"):
        model, _ = estimate.fit_poly(full4_dataset, metric, behav_ranking,
                                     split_seed=0)
        models[metric] = model
    return models


@pytest.fixture(scope="session")
def maxima4(full4_dataset):
    return full4_dataset.maxima("pdplut", "avg_abs_rel_err")


@pytest.fixture(scope="session")
def pool4(poly_models, behav_ranking, maxima4):
    return mathprog.build_pool(
        poly_models["pdplut"], poly_models["avg_abs_rel_err"], 1.0,
        behav_ranking, wt_step=0.05, dataset_maxima=maxima4, seed=0)


@pytest.fixture(scope="session")
def true_points(full4_dataset):
    """Ground-truth (config, pdplut, avg_abs_rel_err) for the whole 4x4 space."""
    return [(r.config, r.ppa.pdplut, r.behav.avg_abs_rel_err)
            for r in full4_dataset.records]
