"""Independent reference implementations used to check the library.

Everything here is deliberately naive and written against the documented
behavior only: recursive netlist interpretation, textbook statistics
formulas, double-loop dominance scans.  None of it shares code with the
package internals.
"""

from __future__ import annotations

import itertools

import numpy as np


# ---------------------------------------------------------------------------
# netlist interpretation


def naive_eval(netlist, config, a_val: int, b_val: int) -> int:
    """Recursive net-by-net interpreter with memoization."""
    m, n = netlist.widths
    a_bits = a_val & ((1 << m) - 1)
    b_bits = b_val & ((1 << n) - 1)
    pis = {f"a{k}": (a_bits >> k) & 1 for k in range(m)}
    pis.update({f"b{k}": (b_bits >> k) & 1 for k in range(n)})

    lut_o6 = {l.out: l for l in netlist.luts}
    lut_o5 = {l.out5: l for l in netlist.luts if l.init5 is not None}
    by_sum = {c.sum: c for c in netlist.carries}
    by_cout = {c.cout: c for c in netlist.carries}
    memo: dict[str, int] = {}

    def removed(l) -> bool:
        return l.removable and not config[l.id]

    def sel_forced(cell) -> bool:
        drv = lut_o6.get(cell.sel) or lut_o5.get(cell.sel)
        return drv is not None and removed(drv)

    def value(net: str) -> int:
        if net in memo:
            return memo[net]
        if net == "0":
            r = 0
        elif net == "1":
            r = 1
        elif net in pis:
            r = pis[net]
        elif net in lut_o6 or net in lut_o5:
            l = lut_o6.get(net) or lut_o5[net]
            if removed(l):
                r = 0
            elif net == l.out:
                idx = sum(value(inp) << k for k, inp in enumerate(l.inputs))
                r = (l.init >> idx) & 1
            else:
                nb = min(5, len(l.inputs))
                idx = sum(value(inp) << k for k, inp in enumerate(l.inputs[:nb]))
                r = (l.init5 >> idx) & 1
        elif net in by_sum or net in by_cout:
            cell = by_sum.get(net) or by_cout[net]
            cin = value(cell.cin)
            if sel_forced(cell):
                sel, din = 0, 0
            else:
                sel, din = value(cell.sel), value(cell.din)
            r = (sel ^ cin) if net == cell.sum else (cin if sel else din)
        else:
            raise AssertionError(f"unknown net {net}")
        memo[net] = r
        return r

    total = sum(value(net) << k for k, net in enumerate(netlist.outputs))
    w = len(netlist.outputs)
    if netlist.signed and total >= 1 << (w - 1):
        total -= 1 << w
    return total


# ---------------------------------------------------------------------------
# statistics


def two_regressor_r(x1, x2, y) -> float:
    """Textbook multiple-correlation formula for two regressors."""
    def corr(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        du, dv = u - u.mean(), v - v.mean()
        denom = np.sqrt((du * du).sum() * (dv * dv).sum())
        return float((du * dv).sum() / denom)

    r1, r2, r12 = corr(x1, y), corr(x2, y), corr(x1, x2)
    if abs(abs(r12) - 1.0) < 1e-12:
        return abs(r1)                  # collinear regressors carry one signal
    r_sq = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * r12) / (1.0 - r12 * r12)
    return float(np.sqrt(min(max(r_sq, 0.0), 1.0)))


def pinv_r2(X, y) -> float:
    """Coefficient of determination via pseudo-inverse (intercept included)."""
    A = np.column_stack([np.ones(len(y)), X])
    beta = np.linalg.pinv(A) @ y
    resid = y - A @ beta
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    if ss_tot == 0.0:
        return 1.0 if ss_res <= 1e-18 else 0.0
    return 1.0 - ss_res / ss_tot


def walk_tree(tree: dict, x) -> float:
    """Single-sample decision-tree descent."""
    node = 0
    while tree["left"][node] != -1:
        if x[tree["feature"][node]] <= tree["threshold"][node]:
            node = tree["left"][node]
        else:
            node = tree["right"][node]
    return float(tree["value"][node])


# ---------------------------------------------------------------------------
# optimization and fronts


def scan_map_problem(problem):
    """Exhaustive lexicographic scan using the problem's own evaluator.

    Returns (config, objective) of the best feasible point, or None.  Strict
    improvement scanning in lex order reproduces the documented tie rule.
    """
    best = None
    for bits in itertools.product((0, 1), repeat=problem.L):
        vp, vb = problem.evaluate(bits)
        if not problem.is_feasible(vp, vb):
            continue
        obj = problem.objective(vp, vb)
        if best is None or obj < best[1]:
            best = (bits, obj)
    return best


def double_loop_front(points):
    """O(n^2) non-dominated filter over (ppa, behav) minimization pairs."""
    keep = []
    for i, (pi, bi) in enumerate(points):
        dominated = False
        for j, (pj, bj) in enumerate(points):
            if j == i:
                continue
            if pj <= pi and bj <= bi and (pj < pi or bj < bi):
                dominated = True
                break
        if not dominated:
            keep.append((pi, bi))
    return keep


def rectangle_union_hv(points, ref) -> float:
    """Dominated-area union computed from first principles.

    Decomposes the union of rectangles [p, ref_p) x [b, ref_b) along the
    sorted distinct p coordinates; within each vertical strip the height is
    set by the best b among points at or left of the strip.
    """
    rp, rb = ref
    pts = [(p, b) for p, b in points if p < rp and b < rb]
    if not pts:
        return 0.0
    xs = sorted({p for p, _ in pts}) + [rp]
    area = 0.0
    for left, right in zip(xs, xs[1:]):
        heights = [rb - b for p, b in pts if p <= left]
        if heights:
            area += (right - left) * max(heights)
    return area
