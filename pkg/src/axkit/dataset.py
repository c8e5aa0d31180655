"""Characterization dataset generation, persistence, and ingestion.

Sampling combines i.i.d. uniform random configurations with deterministic
pattern families (runs and alternating textures swept across the bit vector).
Datasets round-trip through a CSV with the header

    config,avg_abs_err,avg_abs_rel_err,prob_err,max_abs_err,power,cpd,luts,pdp,pdplut,source

where config is a bitstring (index 0 leftmost) and floats are written with
repr() so every value survives the round trip exactly.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import charac
from . import netlist as nl
from .errors import CapacityError, ValidationError

PATTERN_FAMILIES = ("runs_of_ones", "runs_of_zeros", "alternating", "sliding_window")
DEFAULT_WINDOWS = (1, 2, 3)
CSV_HEADER = ("config",) + charac.METRIC_COLUMNS + ("source",)


@dataclass(frozen=True)
class SamplingPlan:
    n_random: int = 0
    seed: int = 0
    pattern_families: tuple[str, ...] = PATTERN_FAMILIES
    window_sizes: tuple[int, ...] = DEFAULT_WINDOWS

    def validate(self, L: int) -> None:
        if self.n_random < 0:
            raise ValidationError("n_random must be >= 0")
        bad = [f for f in self.pattern_families if f not in PATTERN_FAMILIES]
        if bad:
            raise ValidationError(f"unknown pattern families {bad}")
        if any(not 1 <= w <= L for w in self.window_sizes):
            raise ValidationError(f"window sizes must lie in [1, {L}]")


@dataclass
class Dataset:
    netlist_name: str
    L: int
    records: list[charac.MetricsRecord]
    provenance: str  # random | pattern | combined | ingested

    def configs(self) -> list[nl.Config]:
        return [r.config for r in self.records]

    def metric_values(self, name: str) -> np.ndarray:
        return np.array([r.metric(name) for r in self.records], dtype=float)

    def config_matrix(self) -> np.ndarray:
        return np.array([r.config for r in self.records], dtype=float)

    def maxima(self, ppa_metric: str, behav_metric: str) -> tuple[float, float]:
        return (float(self.metric_values(ppa_metric).max()),
                float(self.metric_values(behav_metric).max()))


def sample_random(L: int, n: int, seed: int) -> list[nl.Config]:
    """n distinct uniform configs; n == 2^L enumerates the whole space."""
    if L > 60:
        raise CapacityError(f"L = {L} too wide for duplicate-free sampling")
    if n > (1 << L):
        raise CapacityError(f"cannot draw {n} distinct configs from a 2^{L} space")
    if n == (1 << L):
        return [cfg for cfg in itertools.product((0, 1), repeat=L)]
    rng = np.random.default_rng(seed)
    picked: dict[nl.Config, None] = {}
    while len(picked) < n:
        block = rng.integers(0, 2, size=(max(n - len(picked), 16), L), dtype=np.int64)
        for row in block:
            if len(picked) == n:
                break
            picked.setdefault(tuple(int(b) for b in row), None)
    return list(picked)


def sample_patterns(L: int, plan: SamplingPlan) -> list[nl.Config]:
    """Deterministic pattern configs; always includes the two corner configs."""
    plan.validate(L)
    out: dict[nl.Config, None] = {nl.all_ones(L): None, nl.all_zeros(L): None}

    def add(bits):
        out.setdefault(tuple(bits), None)

    for family in plan.pattern_families:
        for w in plan.window_sizes:
            if family == "alternating":
                # block wave with half-period w, both phases
                wave = [1 - ((k // w) & 1) for k in range(L)]
                add(wave)
                add([1 - b for b in wave])
                continue
            for off in range(L - w + 1):
                if family == "runs_of_zeros":
                    bits = [1] * L
                    bits[off:off + w] = [0] * w
                    add(bits)
                elif family == "runs_of_ones":
                    bits = [0] * L
                    bits[off:off + w] = [1] * w
                    add(bits)
                else:  # sliding_window: alternating fill, both phases, both backgrounds
                    for bg in (1, 0):
                        for phase in (0, 1):
                            bits = [bg] * L
                            bits[off:off + w] = [(k + phase) & 1 for k in range(w)]
                            add(bits)
    return list(out)


def build_dataset(netlist: nl.Netlist, plan: SamplingPlan,
                  threads: int = 1) -> Dataset:
    """Sample per the plan, characterize, and assemble a Dataset.

    Pattern configs come first; random draws that duplicate a pattern are
    dropped (the pattern keeps the slot), so record order is deterministic.
    """
    L = netlist.removable_count
    plan.validate(L)
    patterns = sample_patterns(L, plan) if plan.pattern_families else \
        [nl.all_ones(L), nl.all_zeros(L)]
    randoms = sample_random(L, plan.n_random, plan.seed) if plan.n_random else []
    seen = set(patterns)
    merged = patterns + [c for c in randoms if c not in seen]
    if plan.n_random and plan.pattern_families:
        provenance = "combined"
    elif plan.n_random:
        provenance = "random"
    else:
        provenance = "pattern"
    records = charac.characterize(netlist, merged, threads=threads)
    return Dataset(netlist.name, L, records, provenance)


# ---------------------------------------------------------------------------
# CSV persistence


def format_value(v) -> str:
    return repr(int(v)) if isinstance(v, (int, np.integer)) else repr(float(v))


def save_csv(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in dataset.records:
            row = [nl.format_config(rec.config)]
            row += [format_value(rec.metric(m)) for m in charac.METRIC_COLUMNS]
            row.append(rec.source)
            writer.writerow(row)


def ingest_csv(path, L: int) -> Dataset:
    """Load a characterization CSV, validating each row.

    Structural problems (wrong column count, bad numbers, wrong config
    length, negative metrics) raise with the offending line number; a pdp or
    pdplut that disagrees with its factors beyond 1e-6 relative only flags
    the record with a warning.
    """
    records = []
    seen: set[nl.Config] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        if tuple(header) != CSV_HEADER:
            raise ValidationError(f"{path}: line 1: header must be {','.join(CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise ValidationError(
                    f"{path}: line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
            try:
                config = nl.parse_config(row[0])
            except ValidationError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from None
            if len(config) != L:
                raise ValidationError(
                    f"{path}: line {lineno}: config length {len(config)} != L = {L}")
            if config in seen:
                raise ValidationError(f"{path}: line {lineno}: duplicate config")
            seen.add(config)
            try:
                vals = {m: float(x) for m, x in zip(charac.METRIC_COLUMNS, row[1:-1])}
            except ValueError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from None
            negative = [m for m, v in vals.items() if v < 0]
            if negative:
                raise ValidationError(f"{path}: line {lineno}: negative {negative[0]}")
            if not 0 <= vals["prob_err"] <= 100:
                raise ValidationError(f"{path}: line {lineno}: prob_err outside [0, 100]")
            source = row[-1]
            if source not in ("simulated", "ingested"):
                raise ValidationError(f"{path}: line {lineno}: bad source {source!r}")
            warnings = []
            for name, lhs, rhs in (("pdp", vals["pdp"], vals["power"] * vals["cpd"]),
                                   ("pdplut", vals["pdplut"], vals["pdp"] * vals["luts"])):
                if abs(lhs - rhs) > 1e-6 * max(abs(lhs), abs(rhs), 1e-30):
                    warnings.append(f"{name} inconsistent with factors at line {lineno}")
            records.append(charac.MetricsRecord(
                config=config,
                behav=charac.BehavMetrics(*(vals[m] for m in charac.BEHAV_COLUMNS)),
                ppa=charac.PpaMetrics(vals["power"], vals["cpd"], int(vals["luts"]),
                                      vals["pdp"], vals["pdplut"]),
                source=source,
                warnings=tuple(warnings)))
    name = str(path)
    return Dataset(netlist_name=name, L=L, records=records, provenance="ingested")
