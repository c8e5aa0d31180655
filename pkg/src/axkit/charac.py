"""Exhaustive behavioral error metrics and surrogate circuit-cost metrics.

Behavioral metrics compare a configuration's outputs against the all-ones
(accurate) configuration over the ENTIRE operand space.  Circuit metrics are
a deterministic surrogate: LUT count is the configuration popcount, delay is
the longest live combinational path (LUT = 1.0 units, carry cell = 0.1), and
power is the total output-net toggle count over a Gray-code walk of the
operand space, scaled by the number of input vectors.  pdp and pdplut are
defined as the exact products power*cpd and power*cpd*luts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import netlist as nl
from .errors import ValidationError

LUT_DELAY = 1.0
CARRY_DELAY = 0.1

BEHAV_COLUMNS = ("avg_abs_err", "avg_abs_rel_err", "prob_err", "max_abs_err")
PPA_COLUMNS = ("power", "cpd", "luts", "pdp", "pdplut")
METRIC_COLUMNS = BEHAV_COLUMNS + PPA_COLUMNS


@dataclass(frozen=True)
class BehavMetrics:
    avg_abs_err: float
    avg_abs_rel_err: float   # zero-accurate operand pairs are skipped
    prob_err: float          # percent of operand pairs with any error
    max_abs_err: float


@dataclass(frozen=True)
class PpaMetrics:
    power: float
    cpd: float
    luts: int
    pdp: float
    pdplut: float


@dataclass(frozen=True)
class MetricsRecord:
    config: nl.Config
    behav: BehavMetrics
    ppa: PpaMetrics
    source: str = "simulated"            # simulated | ingested
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def metric(self, name: str) -> float:
        if name in BEHAV_COLUMNS:
            return getattr(self.behav, name)
        if name in PPA_COLUMNS:
            return getattr(self.ppa, name)
        raise ValidationError(f"unknown metric {name!r}")


def behav_metrics(netlist: nl.Netlist, config: nl.Config) -> BehavMetrics:
    """Error statistics of one configuration over all operand pairs."""
    L = netlist.removable_count
    acc = nl.product_table(netlist, nl.all_ones(L)).table
    app = nl.product_table(netlist, config).table
    err = np.abs(acc - app)
    nz = acc != 0
    rel = float((err[nz] / np.abs(acc[nz])).mean()) if nz.any() else 0.0
    return BehavMetrics(
        avg_abs_err=float(err.mean()),
        avg_abs_rel_err=rel,
        prob_err=100.0 * np.count_nonzero(err) / err.size,
        max_abs_err=float(err.max()),
    )


def _assoc_lut(netlist: nl.Netlist, cell: nl.CarryCell):
    kind, drv = netlist.driver_of(cell.sel)
    return drv if kind in ("lut", "lut5") and drv.removable else None


def _arrival_times(netlist: nl.Netlist, config: nl.Config) -> dict[str, float]:
    times = {nl.CONST_ZERO: 0.0, nl.CONST_ONE: 0.0}
    for pi in netlist.inputs:
        times[pi] = 0.0
    for kind, cell in netlist.topo_cells():
        if kind == "lut":
            removed = cell.removable and not config[cell.id]
            t = 0.0 if removed else max(times[n] for n in cell.inputs) + LUT_DELAY
            times[cell.out] = times[cell.out5] = t
        else:
            lut = _assoc_lut(netlist, cell)
            if lut is not None and not config[lut.id]:
                # truncated position: sum just passes carry_in, carry_out is constant
                times[cell.sum] = times[cell.cin] + CARRY_DELAY
                times[cell.cout] = 0.0
            else:
                times[cell.sum] = max(times[cell.sel], times[cell.cin]) + CARRY_DELAY
                times[cell.cout] = max(times[cell.sel], times[cell.din],
                                       times[cell.cin]) + CARRY_DELAY
    return times


_GRAY_ORDERS: dict[int, np.ndarray] = {}


def _input_order(nbits: int, toggle_model: str) -> np.ndarray:
    if toggle_model == "lex":
        return np.arange(1 << nbits, dtype=np.uint32)
    if toggle_model != "gray":
        raise ValidationError(f"unknown toggle model {toggle_model!r}")
    order = _GRAY_ORDERS.get(nbits)
    if order is None:
        t = np.arange(1 << nbits, dtype=np.uint32)
        order = _GRAY_ORDERS[nbits] = t ^ (t >> 1)
    return order


def ppa_metrics(netlist: nl.Netlist, config: nl.Config,
                toggle_model: str = "gray") -> PpaMetrics:
    """Surrogate cost metrics; pure function of (netlist, config)."""
    config = nl.check_config(config, netlist.removable_count)
    luts = int(sum(config))
    cpd = max(_arrival_times(netlist, config)[o] for o in netlist.outputs)

    m, n = netlist.widths
    order = _input_order(m + n, toggle_model)
    nets = nl.simulate_nets(netlist, config)
    total = 0
    for lut in netlist.luts:
        if lut.removable and not config[lut.id]:
            continue
        walk = nets[lut.out][order]
        total += int(np.count_nonzero(walk[1:] != walk[:-1]))
        if lut.init5 is not None:
            walk = nets[lut.out5][order]
            total += int(np.count_nonzero(walk[1:] != walk[:-1]))
    for cell in netlist.carries:
        for net in (cell.sum, cell.cout):
            walk = nets[net][order]
            total += int(np.count_nonzero(walk[1:] != walk[:-1]))
    power = total / len(order)
    pdp = power * cpd
    pdplut = pdp * luts
    return PpaMetrics(power=power, cpd=cpd, luts=luts, pdp=pdp, pdplut=pdplut)


def characterize_one(netlist: nl.Netlist, config: nl.Config,
                     toggle_model: str = "gray") -> MetricsRecord:
    config = nl.check_config(config, netlist.removable_count)
    return MetricsRecord(config=config,
                         behav=behav_metrics(netlist, config),
                         ppa=ppa_metrics(netlist, config, toggle_model))


def characterize(netlist: nl.Netlist, configs: list[nl.Config],
                 threads: int = 1, toggle_model: str = "gray") -> list[MetricsRecord]:
    """Batch characterization, order-preserving and thread-count independent."""
    configs = [nl.check_config(c, netlist.removable_count) for c in configs]
    if len(set(configs)) != len(configs):
        raise ValidationError("duplicate configs in characterization batch")
    if not configs:
        return []
    # warm the shared accurate-table cache before fanning out
    nl.product_table(netlist, nl.all_ones(netlist.removable_count))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(
                lambda c: characterize_one(netlist, c, toggle_model), configs))
    return [characterize_one(netlist, c, toggle_model) for c in configs]
