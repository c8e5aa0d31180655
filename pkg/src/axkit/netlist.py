"""LUT + carry-chain netlist model for approximate arithmetic operators.

A netlist is a DAG of dual-output lookup tables (up to six inputs) and
carry-chain cells.  Every removable LUT is governed by one bit of a binary
configuration tuple (bit i controls the LUT with id i).  Clearing the bit
removes the LUT: both of its outputs drive constant 0, and any carry cell
whose select input is fed by that LUT has both its select (propagate) and
data (generate/bypass) inputs forced to 0, so the cell degenerates to
``sum = carry_in``, ``carry_out = 0`` and the bit position is truncated.

Carry cell semantics (MUXCY/XORCY style):

    sum       = select XOR carry_in
    carry_out = carry_in if select else data_in

Net namespace: the reserved constants "0" and "1", the primary input names,
derived LUT output names ("l<id>" for the full-input function, "l<id>.o5"
for the lower-five-input one), and the explicit sum / carry-out names of the
carry cells.  Output bit lists are LSB first.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigurationError, DomainError, ValidationError

Config = tuple[int, ...]

CONST_ZERO = "0"
CONST_ONE = "1"
MAX_LUT_INPUTS = 6
MAX_ENUM_BITS = 20  # cap for exhaustive operand-pair enumeration (2**20 pairs)

# Removable-LUT counts the multiplier generator is tuned to hit.  The packing
# of partial-product bits onto dual-output LUTs is relaxed (pairs split back
# into single-output LUTs, LSB first) until the target is met.
_REMOVABLE_TARGETS = {(4, True): 10, (8, True): 36}


# ---------------------------------------------------------------------------
# configuration tuples


def all_ones(length: int) -> Config:
    return (1,) * length


def all_zeros(length: int) -> Config:
    return (0,) * length


def parse_config(text: str) -> Config:
    """Parse a bitstring such as "1011" (index 0 is the leftmost character)."""
    if not text or any(c not in "01" for c in text):
        raise ValidationError(f"config bitstring must be non-empty 0/1 text, got {text!r}")
    return tuple(int(c) for c in text)

def format_config(config: Config) -> str:
    return "".join(str(int(b)) for b in config)

def check_config(config: Config, length: int) -> Config:
    config = tuple(int(b) for b in config)
    if len(config) != length:
        raise ValidationError(f"config has {len(config)} bits, netlist needs {length}")
    if any(b not in (0, 1) for b in config):
        raise ValidationError("config bits must be 0 or 1")
    return config


# ---------------------------------------------------------------------------
# cells


@dataclass(frozen=True)
class LutCell:
    """Dual-output lookup table.

    ``init`` is the truth table of the full-input function (bit k gives the
    output for input pattern k, inputs[0] being the least significant index
    bit).  ``init5`` optionally holds a second truth table over the lower
    min(5, n) inputs.  ``id`` doubles as the removal-order index: removable
    LUTs carry ids 0..L-1.
    """

    id: int
    inputs: tuple[str, ...]
    init: int
    removable: bool
    init5: int | None = None

    @property
    def out(self) -> str:
        return f"l{self.id}"

    @property
    def out5(self) -> str:
        return f"l{self.id}.o5"

    def validate(self) -> None:
        k = len(self.inputs)
        if not 1 <= k <= MAX_LUT_INPUTS:
            raise ValidationError(f"LUT {self.id}: needs 1..6 inputs, has {k}")
        if not 0 <= self.init < (1 << (1 << k)):
            raise ValidationError(f"LUT {self.id}: init has bits above 2^{k} input patterns")
        if self.init5 is not None:
            k5 = min(5, k)
            if not 0 <= self.init5 < (1 << (1 << k5)):
                raise ValidationError(f"LUT {self.id}: init5 has bits above 2^{k5} patterns")


@dataclass(frozen=True)
class CarryCell:
    """One carry-chain position: select/propagate, data/generate, ripple in/out."""

    sel: str
    din: str
    cin: str
    sum: str
    cout: str


def _truth(fn, nbits: int) -> int:
    """Build a truth-table integer from fn(bit tuple) over nbits inputs."""
    t = 0
    for pattern in range(1 << nbits):
        bits = tuple((pattern >> k) & 1 for k in range(nbits))
        if fn(bits):
            t |= 1 << pattern
    return t


# ---------------------------------------------------------------------------
# netlist


class Netlist:
    """Immutable-by-convention operator netlist with a compiled evaluator.

    Construction validates all structural invariants (net resolution,
    acyclicity, dense removal ids, truth-table widths, constant chain heads)
    and precomputes a topological evaluation order used by both the scalar
    and the vectorized evaluation paths.
    """

    def __init__(self, name: str, widths: tuple[int, int], signed: bool,
                 inputs: list[str], outputs: list[str],
                 luts: list[LutCell], carries: list[CarryCell]):
        self.name = name
        self.widths = (int(widths[0]), int(widths[1]))
        self.signed = bool(signed)
        self.inputs = list(inputs)
        self.outputs = list(outputs)
        self.luts = list(luts)
        self.carries = list(carries)
        self._validate()
        self._compile()
        self._table_cache: dict[Config, ProductTable] = {}

    # -- structure ----------------------------------------------------------

    @property
    def removable_count(self) -> int:
        return sum(1 for l in self.luts if l.removable)

    def _validate(self) -> None:
        if len(set(self.inputs)) != len(self.inputs):
            raise ValidationError("duplicate primary input names")
        for lut in self.luts:
            lut.validate()
        ids = [l.id for l in self.luts]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate LUT ids")
        rem = sorted(l.id for l in self.luts if l.removable)
        if rem != list(range(len(rem))):
            raise ValidationError("removable LUT ids must be exactly 0..L-1")

        drivers: dict[str, tuple[str, object]] = {
            CONST_ZERO: ("const", 0), CONST_ONE: ("const", 1)}
        for name in self.inputs:
            self._claim(drivers, name, ("input", name))
        for lut in self.luts:
            self._claim(drivers, lut.out, ("lut", lut))
            self._claim(drivers, lut.out5, ("lut5", lut))
        for cell in self.carries:
            self._claim(drivers, cell.sum, ("sum", cell))
            self._claim(drivers, cell.cout, ("cout", cell))
        self._drivers = drivers

        for lut in self.luts:
            for net in lut.inputs:
                self._resolve(net, f"LUT {lut.id}")
        couts = {c.cout for c in self.carries}
        for i, cell in enumerate(self.carries):
            for net in (cell.sel, cell.din, cell.cin):
                self._resolve(net, f"carry {i}")
            # a chain head (carry_in not driven by another cell) must sit on a constant
            if cell.cin not in couts and cell.cin not in (CONST_ZERO, CONST_ONE):
                raise ValidationError(f"carry {i}: chain head carry_in {cell.cin!r} is not a constant")
        for net in self.outputs:
            self._resolve(net, "outputs")

    @staticmethod
    def _claim(drivers, name, who) -> None:
        if name in drivers:
            raise ValidationError(f"net {name!r} driven more than once")
        drivers[name] = who

    def _resolve(self, net: str, ctx: str):
        try:
            return self._drivers[net]
        except KeyError:
            raise ValidationError(f"{ctx}: unknown net {net!r}") from None

    def driver_of(self, net: str) -> tuple[str, object]:
        """(kind, payload) where kind is const|input|lut|lut5|sum|cout."""
        return self._resolve(net, "driver_of")

    # -- compiled form ------------------------------------------------------

    def _compile(self) -> None:
        ids: dict[str, int] = {CONST_ZERO: 0, CONST_ONE: 1}
        for name in self.inputs:
            ids[name] = len(ids)
        for lut in self.luts:
            ids[lut.out] = len(ids)
            ids[lut.out5] = len(ids)
        for cell in self.carries:
            ids[cell.sum] = len(ids)
            ids[cell.cout] = len(ids)
        self._net_ids = ids
        self._n_nets = len(ids)

        def cell_of(net):
            kind, payload = self._drivers[net]
            if kind in ("lut", "lut5"):
                return ("lut", payload)
            if kind in ("sum", "cout"):
                return ("carry", payload)
            return None

        nodes = [("lut", l) for l in self.luts] + [("carry", c) for c in self.carries]
        key = {id(obj): i for i, (_, obj) in enumerate(nodes)}
        indeg = [0] * len(nodes)
        consumers: list[list[int]] = [[] for _ in nodes]
        for i, (kind, obj) in enumerate(nodes):
            nets = obj.inputs if kind == "lut" else (obj.sel, obj.din, obj.cin)
            for net in nets:
                dep = cell_of(net)
                if dep is not None:
                    consumers[key[id(dep[1])]].append(i)
                    indeg[i] += 1
        order, queue = [], deque(i for i, d in enumerate(indeg) if d == 0)
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in consumers[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    queue.append(j)
        if len(order) != len(nodes):
            raise ValidationError("netlist graph has a combinational cycle")
        self._topo = [nodes[i] for i in order]

        steps = []
        for kind, obj in self._topo:
            if kind == "lut":
                k = len(obj.inputs)
                table = np.array([(obj.init >> p) & 1 for p in range(1 << k)], dtype=np.uint8)
                if obj.init5 is not None:
                    k5 = min(5, k)
                    table5 = np.array([(obj.init5 >> p) & 1 for p in range(1 << k5)], dtype=np.uint8)
                else:
                    k5, table5 = 0, None
                steps.append(("lut", tuple(ids[n] for n in obj.inputs), table,
                              ids[obj.out], table5, k5, ids[obj.out5],
                              obj.id if obj.removable else -1))
            else:
                sel_kind, sel_drv = self._drivers[obj.sel]
                assoc = sel_drv.id if sel_kind in ("lut", "lut5") and sel_drv.removable else -1
                steps.append(("carry", ids[obj.sel], ids[obj.din], ids[obj.cin],
                              ids[obj.sum], ids[obj.cout], assoc))
        self._steps = steps
        self._pi_cache: dict[int, np.ndarray] | None = None

    def topo_cells(self) -> list[tuple[str, object]]:
        """Cells in the compiled topological evaluation order."""
        return list(self._topo)

    def nets_downstream_of_lut(self, lut_id: int) -> frozenset[str]:
        """All nets with a dependency path through the given LUT."""
        lut = next(l for l in self.luts if l.id == lut_id)
        tainted = {lut.out, lut.out5}
        for kind, obj in self._topo:
            if kind == "lut":
                if any(n in tainted for n in obj.inputs):
                    tainted.update((obj.out, obj.out5))
            else:
                if obj.sel in tainted or obj.din in tainted or obj.cin in tainted:
                    tainted.update((obj.sum, obj.cout))
        return frozenset(tainted)

    # -- evaluation ---------------------------------------------------------

    def _encode_operand(self, value: int, width: int, which: str) -> int:
        if self.signed:
            lo, hi = -(1 << (width - 1)), (1 << (width - 1)) - 1
        else:
            lo, hi = 0, (1 << width) - 1
        if not lo <= value <= hi:
            raise DomainError(f"operand {which}={value} outside [{lo}, {hi}] for {self.name}")
        return value & ((1 << width) - 1)

    def _decode_output(self, value):
        if self.signed:
            w = len(self.outputs)
            return value - ((value >> (w - 1)) << w)
        return value

    def _run_scalar(self, config: Config, pis: dict[str, int]) -> dict[str, int]:
        vals = [0] * self._n_nets
        vals[1] = 1
        ids = self._net_ids
        for name, v in pis.items():
            vals[ids[name]] = v
        for step in self._steps:
            if step[0] == "lut":
                _, in_ids, table, out6, table5, k5, out5, bit = step
                if bit >= 0 and not config[bit]:
                    continue  # outputs stay 0
                idx = 0
                for k, nid in enumerate(in_ids):
                    idx |= vals[nid] << k
                vals[out6] = int(table[idx])
                if table5 is not None:
                    vals[out5] = int(table5[idx & ((1 << k5) - 1)])
            else:
                _, sel_id, din_id, cin_id, sum_id, cout_id, assoc = step
                if assoc >= 0 and not config[assoc]:
                    sel, din = 0, 0
                else:
                    sel, din = vals[sel_id], vals[din_id]
                cin = vals[cin_id]
                vals[sum_id] = sel ^ cin
                vals[cout_id] = cin if sel else din
        return {name: vals[i] for name, i in self._net_ids.items()}

    def _run_vector(self, config: Config, pis: dict[str, np.ndarray], size: int) -> list:
        zeros = np.zeros(size, dtype=np.uint8)
        vals: list = [zeros] * self._n_nets
        vals[1] = np.ones(size, dtype=np.uint8)
        ids = self._net_ids
        for name, arr in pis.items():
            vals[ids[name]] = arr
        for step in self._steps:
            if step[0] == "lut":
                _, in_ids, table, out6, table5, k5, out5, bit = step
                if bit >= 0 and not config[bit]:
                    continue
                idx = np.zeros(size, dtype=np.uint8)
                for k, nid in enumerate(in_ids):
                    idx |= vals[nid] << k
                vals[out6] = table[idx]
                if table5 is not None:
                    vals[out5] = table5[idx & ((1 << k5) - 1)]
            else:
                _, sel_id, din_id, cin_id, sum_id, cout_id, assoc = step
                if assoc >= 0 and not config[assoc]:
                    sel = din = zeros
                else:
                    sel, din = vals[sel_id], vals[din_id]
                cin = vals[cin_id]
                vals[sum_id] = sel ^ cin
                vals[cout_id] = np.where(sel, cin, din).astype(np.uint8)
        return vals

    def _full_space_pis(self) -> tuple[dict[str, np.ndarray], int]:
        m, n = self.widths
        if m + n > MAX_ENUM_BITS:
            raise CapacityError(f"operand space 2^{m + n} exceeds 2^{MAX_ENUM_BITS}")
        size = 1 << (m + n)
        if self._pi_cache is None:
            combined = np.arange(size, dtype=np.uint32)
            a_idx, b_idx = combined >> n, combined & ((1 << n) - 1)
            pis = {}
            for k in range(m):
                pis[f"a{k}"] = ((a_idx >> k) & 1).astype(np.uint8)
            for k in range(n):
                pis[f"b{k}"] = ((b_idx >> k) & 1).astype(np.uint8)
            # generated netlists use a{k}/b{k}; loaded ones must match widths
            missing = [p for p in self.inputs if p not in pis]
            if missing:
                raise ValidationError(f"primary inputs {missing} do not follow a<k>/b<k> naming")
            self._pi_cache = pis
        return self._pi_cache, size

    def _outputs_from_vals(self, vals, ids=None):
        ids = ids or self._net_ids
        total = np.zeros(len(vals[0]) if isinstance(vals[0], np.ndarray) else 1, dtype=np.int64)
        for k, net in enumerate(self.outputs):
            total += vals[ids[net]].astype(np.int64) << k
        return self._decode_output(total)


def evaluate(netlist: Netlist, config: Config, operands: tuple[int, int]) -> int:
    """Scalar evaluation of one operand pair under the given configuration."""
    config = check_config(config, netlist.removable_count)
    m, n = netlist.widths
    a = netlist._encode_operand(int(operands[0]), m, "a")
    b = netlist._encode_operand(int(operands[1]), n, "b")
    pis = {f"a{k}": (a >> k) & 1 for k in range(m)}
    pis.update({f"b{k}": (b >> k) & 1 for k in range(n)})
    missing = [p for p in netlist.inputs if p not in pis]
    if missing:
        raise ValidationError(f"primary inputs {missing} do not follow a<k>/b<k> naming")
    vals = netlist._run_scalar(config, pis)
    total = 0
    for k, net in enumerate(netlist.outputs):
        total += vals[net] << k
    w = len(netlist.outputs)
    if netlist.signed and total >= 1 << (w - 1):
        total -= 1 << w
    return int(total)


def evaluate_batch(netlist: Netlist, config: Config, a_values, b_values) -> np.ndarray:
    """Vectorized evaluation over parallel arrays of operand values."""
    config = check_config(config, netlist.removable_count)
    m, n = netlist.widths
    a = np.asarray(a_values, dtype=np.int64)
    b = np.asarray(b_values, dtype=np.int64)
    if a.shape != b.shape:
        raise DomainError("operand arrays must have matching shapes")
    for arr, w, which in ((a, m, "a"), (b, n, "b")):
        lo = -(1 << (w - 1)) if netlist.signed else 0
        hi = (1 << (w - 1)) - 1 if netlist.signed else (1 << w) - 1
        if arr.size and (arr.min() < lo or arr.max() > hi):
            raise DomainError(f"operand array {which} outside [{lo}, {hi}]")
    a_bits = (a & ((1 << m) - 1)).ravel()
    b_bits = (b & ((1 << n) - 1)).ravel()
    pis = {f"a{k}": ((a_bits >> k) & 1).astype(np.uint8) for k in range(m)}
    pis.update({f"b{k}": ((b_bits >> k) & 1).astype(np.uint8) for k in range(n)})
    vals = netlist._run_vector(config, pis, a.size)
    total = np.zeros(a.size, dtype=np.int64)
    for k, net in enumerate(netlist.outputs):
        total += vals[netlist._net_ids[net]].astype(np.int64) << k
    w = len(netlist.outputs)
    if netlist.signed:
        total -= (total >> (w - 1)) << w
    return total.reshape(a.shape)


class ProductTable:
    """Dense operand-pair output table, indexed by the raw operand values."""

    def __init__(self, table: np.ndarray, widths: tuple[int, int], signed: bool):
        self.table = table
        self.widths = widths
        self.signed = signed

    def lookup(self, a_values, b_values) -> np.ndarray:
        m, n = self.widths
        a = np.asarray(a_values, dtype=np.int64) & ((1 << m) - 1)
        b = np.asarray(b_values, dtype=np.int64) & ((1 << n) - 1)
        return self.table[a, b]

    def entry(self, a: int, b: int) -> int:
        return int(self.lookup(np.asarray(a), np.asarray(b)))


def product_table(netlist: Netlist, config: Config) -> ProductTable:
    """Exhaustive output table over the full operand space (capacity 2^20)."""
    config = check_config(config, netlist.removable_count)
    cached = netlist._table_cache.get(config)
    if cached is not None:
        return cached
    m, n = netlist.widths
    pis, size = netlist._full_space_pis()
    vals = netlist._run_vector(config, pis, size)
    flat = netlist._outputs_from_vals(vals)
    table = ProductTable(flat.reshape(1 << m, 1 << n), (m, n), netlist.signed)
    if all(config) or not any(config) or len(netlist._table_cache) < 4:
        netlist._table_cache[config] = table  # all-ones/all-zeros tables stay hot
    return table


def simulate_nets(netlist: Netlist, config: Config) -> dict[str, np.ndarray]:
    """Values of every net over the full operand space (for activity analysis)."""
    config = check_config(config, netlist.removable_count)
    pis, size = netlist._full_space_pis()
    vals = netlist._run_vector(config, pis, size)
    return {name: vals[i] for name, i in netlist._net_ids.items()}


# ---------------------------------------------------------------------------
# generators


def build_adder(width: int) -> Netlist:
    """Unsigned ripple-carry adder; one removable dual-output LUT per bit."""
    if not 2 <= width <= 16:
        raise ConfigurationError(f"adder width must be 2..16, got {width}")
    luts, carries = [], []
    for i in range(width):
        init = _truth(lambda v: v[0] ^ v[1], 2)       # propagate = a XOR b
        init5 = _truth(lambda v: v[0] & v[1], 2)      # generate  = a AND b
        lut = LutCell(id=i, inputs=(f"a{i}", f"b{i}"), init=init, removable=True, init5=init5)
        luts.append(lut)
        carries.append(CarryCell(sel=lut.out, din=lut.out5,
                                 cin=CONST_ZERO if i == 0 else f"c{i - 1}",
                                 sum=f"s{i}", cout=f"c{i}"))
    outputs = [f"s{i}" for i in range(width)] + [f"c{width - 1}"]
    inputs = [f"a{i}" for i in range(width)] + [f"b{i}" for i in range(width)]
    return Netlist(f"add{width}u", (width, width), False, inputs, outputs, luts, carries)


def _row_groups(width: int, unpack: int) -> list[list[tuple[int, ...]]]:
    """Partial-product packing plan: per row, index groups of size 1 or 2.

    Adjacent bits share one dual-output LUT by default; `unpack` pairs
    (row-major, LSB first) are split back into single-output LUTs so the
    total removable count can be tuned.
    """
    plans = []
    for _ in range(width):
        groups: list[tuple[int, ...]] = []
        i = 0
        while i < width:
            if i + 1 < width:
                groups.append((i, i + 1))
                i += 2
            else:
                groups.append((i,))
                i += 1
        plans.append(groups)
    for row in range(width):
        if unpack == 0:
            break
        expanded: list[tuple[int, ...]] = []
        for g in plans[row]:
            if len(g) == 2 and unpack > 0:
                expanded.extend([(g[0],), (g[1],)])
                unpack -= 1
            else:
                expanded.append(g)
        plans[row] = expanded
    if unpack:
        raise ConfigurationError("removable-count target exceeds unpackable pairs")
    return plans


def build_multiplier(width: int, signed: bool = True) -> Netlist:
    """Array multiplier: row-by-row fused partial-product/accumulate chains.

    Signed mode uses the Baugh-Wooley identity: border partial products are
    complemented and the two correction constants (2^N and 2^(2N-1)) are
    emitted by always-one LUTs, so removing every LUT still forces all
    outputs to 0.  Row j adds its N partial-product bits to the running
    accumulator on one carry chain spanning bit positions j..j+N-1; the
    chain's final carry-out becomes accumulator bit j+N.
    """
    if not 2 <= width <= 8:
        raise ConfigurationError(f"multiplier width must be 2..8, got {width}")
    n = width
    per_row = (n + 1) // 2
    natural = n * per_row + (2 if signed else 0)
    target = _REMOVABLE_TARGETS.get((n, signed), natural)
    plans = _row_groups(n, target - natural)

    def complemented(i: int, j: int) -> bool:
        return signed and ((i == n - 1) != (j == n - 1))

    def pp_fn(i, j, ai, bj):
        v = ai & bj
        return (1 - v) if complemented(i, j) else v

    n_row_luts = sum(len(g) for g in plans)
    const_lo_id, const_hi_id = n_row_luts, n_row_luts + 1

    luts: list[LutCell] = []
    carries: list[CarryCell] = []
    acc: dict[int, str] = {}
    next_id = 0

    # row 0: bare partial products, no accumulation yet
    for g in plans[0]:
        if len(g) == 1:
            i = g[0]
            lut = LutCell(next_id, (f"a{i}", "b0"),
                          _truth(lambda v, i=i: pp_fn(i, 0, v[0], v[1]), 2), True)
            acc[i] = lut.out
        else:
            i, h = g
            lut = LutCell(next_id, (f"a{i}", f"a{h}", "b0"),
                          _truth(lambda v, h=h: pp_fn(h, 0, v[1], v[2]), 3), True,
                          init5=_truth(lambda v, i=i: pp_fn(i, 0, v[0], v[2]), 3))
            acc[i], acc[h] = lut.out5, lut.out
        luts.append(lut)
        next_id += 1
    acc[n] = f"l{const_lo_id}" if signed else CONST_ZERO

    # rows 1..n-1: fused add of row j's partial products at positions j..j+n-1
    for j in range(1, n):
        sel_net: dict[int, str] = {}
        for g in plans[j]:
            if len(g) == 1:
                i = g[0]
                p = j + i
                lut = LutCell(next_id, (f"a{i}", f"b{j}", acc[p]),
                              _truth(lambda v, i=i, j=j: pp_fn(i, j, v[0], v[1]) ^ v[2], 3), True)
                sel_net[p] = lut.out
            else:
                i, h = g
                plo, phi = j + i, j + h
                lut = LutCell(next_id, (f"a{i}", f"a{h}", f"b{j}", acc[plo], acc[phi]),
                              _truth(lambda v, h=h, j=j: pp_fn(h, j, v[1], v[2]) ^ v[4], 5), True,
                              init5=_truth(lambda v, i=i, j=j: pp_fn(i, j, v[0], v[2]) ^ v[3], 5))
                sel_net[plo], sel_net[phi] = lut.out5, lut.out
            luts.append(lut)
            next_id += 1
        for p in range(j, j + n):
            carries.append(CarryCell(sel=sel_net[p], din=acc[p],
                                     cin=CONST_ZERO if p == j else f"r{j}c{p - 1}",
                                     sum=f"r{j}s{p}", cout=f"r{j}c{p}"))
            acc[p] = f"r{j}s{p}"
        acc[j + n] = f"r{j}c{j + n - 1}"

    outputs = [acc[k] for k in range(2 * n - 1)]
    if signed:
        # correction constants 2^n and 2^(2n-1), emitted by always-one LUTs
        ones = _truth(lambda v: 1, 1)
        luts.append(LutCell(const_lo_id, (CONST_ZERO,), ones, True))
        luts.append(LutCell(const_hi_id, (CONST_ZERO,), ones, True))
        top = 2 * n - 1
        carries.append(CarryCell(sel=f"l{const_hi_id}", din=CONST_ZERO, cin=acc[top],
                                 sum=f"fs{top}", cout=f"fc{top}"))
        outputs.append(f"fs{top}")
    else:
        outputs.append(acc[2 * n - 1])

    inputs = [f"a{i}" for i in range(n)] + [f"b{i}" for i in range(n)]
    name = f"mul{n}{'s' if signed else 'u'}"
    return Netlist(name, (n, n), signed, inputs, outputs, luts, carries)


# ---------------------------------------------------------------------------
# serialization


def netlist_to_json(netlist: Netlist) -> dict:
    return {
        "name": netlist.name,
        "widths": list(netlist.widths),
        "signed": netlist.signed,
        "inputs": list(netlist.inputs),
        "outputs": list(netlist.outputs),
        "luts": [
            {"id": l.id, "inputs": list(l.inputs), "init": f"0x{l.init:x}",
             "init5": None if l.init5 is None else f"0x{l.init5:x}",
             "removable": l.removable}
            for l in netlist.luts
        ],
        "carries": [
            {"sel": c.sel, "din": c.din, "cin": c.cin, "sum": c.sum, "cout": c.cout}
            for c in netlist.carries
        ],
    }


def netlist_from_json(doc: dict) -> Netlist:
    try:
        luts = [LutCell(id=int(l["id"]), inputs=tuple(l["inputs"]),
                        init=int(l["init"], 16), removable=bool(l["removable"]),
                        init5=None if l.get("init5") is None else int(l["init5"], 16))
                for l in doc["luts"]]
        carries = [CarryCell(sel=c["sel"], din=c["din"], cin=c["cin"],
                             sum=c["sum"], cout=c["cout"])
                   for c in doc["carries"]]
        return Netlist(doc["name"], tuple(doc["widths"]), doc["signed"],
                       list(doc["inputs"]), list(doc["outputs"]), luts, carries)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed netlist document: {exc}") from exc


def save_netlist(netlist: Netlist, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(netlist_to_json(netlist), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_netlist(path) -> Netlist:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"netlist file is not valid JSON: {exc}") from exc
    return netlist_from_json(doc)
