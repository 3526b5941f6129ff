"""Closed-form dispatch to the optimal transmission graph.

Every closed-form choice is checked against the shortest-path optimality
conditions of the uncapacitated flow problem before it is reported as
certified: with node potentials ``pi`` given by the cost to the collector
along the chosen tree, the tree is optimal iff no edge ``(i, j)`` has
``pi_i > E_ij + pi_j``.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from .errors import TooLarge
from .graphs import (
    Solution,
    TransmissionGraph,
    cell_graph,
    enumerate_extended,
    next_hops,
    realize,
)
from .model import CostModel, Monomial, MultiTerm, NetworkInstance, TwoTerm, total_energy
from .oracle import oracle_cap, oracle_min
from .thresholds import (
    ThresholdTable,
    classify_exponent,
    exponent_table,
    lambda_table,
)

log = logging.getLogger(__name__)

OPTIMALITY_RTOL = 1e-10


def potentials(inst: NetworkInstance, model: CostModel, hops) -> np.ndarray:
    """Cost from every node to the collector along the tree ``hops``."""
    cost = model.cost_matrix(inst.coords)
    pi = np.full(inst.n + 1, np.nan)
    pi[0] = 0.0
    for i in range(1, inst.n + 1):
        path = []
        j = i
        while np.isnan(pi[j]):
            path.append(j)
            j = hops[j - 1]
        for node in reversed(path):
            pi[node] = cost[node, hops[node - 1]] + pi[hops[node - 1]]
    return pi


def optimality_violation(inst: NetworkInstance, model: CostModel, hops) -> float:
    """Largest relative amount by which some edge undercuts the tree's potentials."""
    cost = model.cost_matrix(inst.coords)
    pi = potentials(inst, model, hops)
    reduced = cost[1:, :] + pi[None, :] - pi[1:, None]
    worst = -float(np.min(reduced))
    return max(0.0, worst) / max(float(np.max(pi)), 1e-300)


def is_tree_optimal(inst: NetworkInstance, model: CostModel, hops) -> bool:
    return optimality_violation(inst, model, hops) <= OPTIMALITY_RTOL


def _fmt(v: float) -> str:
    return format(v, ".6g")


def describe_cell(table: ThresholdTable, cell: int) -> str:
    if cell == -1:
        return "[1, inf)"
    hi = table.boundary(cell)
    lo = table.boundary(cell + 1)
    lo_s = "-inf" if math.isinf(lo) else f"a_{cell + 1}={_fmt(lo)}"
    hi_s = "1" if cell == 0 else f"a_{cell}={_fmt(hi)}"
    return f"[{lo_s}, {hi_s}]"


def _certified(inst, model, graph, regime, alternatives=(), cap=None) -> Solution:
    hops = next_hops(inst, graph)
    if not is_tree_optimal(inst, model, hops):
        log.info("closed-form choice %s failed the optimality check", graph.label)
        return search(inst, model,
                      regime + f"; closed-form choice {graph.label} failed the optimality check",
                      cap=cap)
    flow = realize(inst, graph)
    return Solution(graph, flow, total_energy(inst, model, flow), regime, True,
                    tuple(alternatives))


def search(inst: NetworkInstance, model: CostModel, regime: str,
           cap: Optional[int] = None) -> Solution:
    """Best graph of the extended family, refined by the oracle when small enough.

    The result is never certified.
    """
    cands = enumerate_extended(inst)
    flows = [realize(inst, g) for g in cands]
    energies = [total_energy(inst, model, f) for f in flows]
    best = int(np.argmin(energies))
    graph, flow, energy = cands[best], flows[best], energies[best]
    if is_tree_optimal(inst, model, next_hops(inst, graph)):
        return Solution(graph, flow, energy,
                        regime + f"; best candidate {graph.label} passes the optimality check",
                        False)
    cap = oracle_cap() if cap is None else cap
    try:
        ref = oracle_min(inst, model, cap=cap)
    except TooLarge:
        return Solution(graph, flow, energy,
                        regime + f"; best candidate {graph.label}, optimality unknown", False)
    if ref.energy < energy * (1 - 1e-12):
        note = f"; oracle improves on {graph.label}"
        return Solution(ref.graph, ref.flow, ref.energy, regime + note, False, trees=ref.trees)
    return Solution(graph, flow, energy, regime + f"; {graph.label} confirmed by oracle", False)


# -- monomial ------------------------------------------------------------------


def solve_monomial(inst: NetworkInstance, a: float,
                   table: Optional[ThresholdTable] = None) -> Solution:
    table = exponent_table(inst) if table is None else table
    cell, tie = classify_exponent(table, a)
    graph = cell_graph(cell)
    regime = f"monomial a={_fmt(a)} in cell {cell} {describe_cell(table, cell)}"
    alternatives = ()
    if tie and cell + 1 <= table.n_prime:
        alternatives = (cell_graph(cell + 1),)
        regime += f"; boundary tie with {alternatives[0].label}"
    return _certified(inst, Monomial(a), graph, regime, alternatives)


def solve_multiterm(inst: NetworkInstance, model: MultiTerm,
                    cap: Optional[int] = None) -> Solution:
    """Shared exponent cell picks the graph; two distinct cells fall back to the two-term solver."""
    terms = [(lam, alpha) for lam, alpha in model.terms() if lam > 0]
    if not terms:
        raise ValueError("all coefficients are zero")
    table = exponent_table(inst)
    cells = []
    for _, alpha in terms:
        cell, tie = classify_exponent(table, alpha)
        cells.append({cell, cell + 1} if tie and cell + 1 <= table.n_prime else {cell})
    shared = set.intersection(*cells)
    if shared:
        cell = min(shared)
        regime = (f"{len(terms)}-term cost, all exponents in cell {cell} "
                  f"{describe_cell(table, cell)}")
        return _certified(inst, model, cell_graph(cell), regime, cap=cap)
    alphas = sorted({alpha for _, alpha in terms}, reverse=True)
    if len(alphas) == 2:
        hi = sum(lam for lam, alpha in terms if alpha == alphas[0])
        lo = sum(lam for lam, alpha in terms if alpha == alphas[1])
        sol = solve_twoterm(inst, alphas[0], alphas[1], lo / hi, cap=cap)
        return Solution(sol.graph, sol.flow, total_energy(inst, model, sol.flow),
                        f"scaled by {_fmt(hi)}: " + sol.regime, sol.certified,
                        sol.alternatives, sol.trees)
    return search(inst, model, f"{len(terms)}-term cost spanning several cells", cap)


# -- two-term ----------------------------------------------------------------


def twoterm_claim(table: ThresholdTable, a: float, b: float,
                  lam: float) -> tuple[Optional[int], str, tuple[int, ...]]:
    """Exponent cell whose graph the closed-form results name, for ``a > b``.

    Returns ``(cell or None, reason, tied cells)``; ``None`` marks a
    lambda range the closed-form results leave open.
    """
    ca, _ = classify_exponent(table, a)
    cb, _ = classify_exponent(table, b)
    pattern = f"cells ({ca}, {cb})"
    if ca == cb:
        return ca, f"{pattern}: shared cell", ()

    if ca == -1 and cb == 0:
        l0, l0p = table.value("lambda_0"), table.value("lambda_0'")
        if l0 is not None and lam <= l0:
            return -1, f"{pattern}: lambda <= lambda_0={_fmt(l0)}", (0,) if lam == l0 and l0 == l0p else ()
        if l0p is not None and lam >= l0p:
            return 0, f"{pattern}: lambda >= lambda_0'={_fmt(l0p)}", ()
        return None, f"{pattern}: gap between lambda_0 and lambda_0'", ()

    if ca >= 0 and cb == ca + 1:
        t = table.value("lambda_k", cb)
        if t is None:
            return None, f"{pattern}: lambda_{cb} degenerate", ()
        if lam <= t:
            return ca, f"{pattern}: lambda <= lambda_{cb}={_fmt(t)}", (cb,) if lam == t else ()
        return cb, f"{pattern}: lambda > lambda_{cb}={_fmt(t)}", ()

    if ca >= 0:
        seq = [table.value("lambda_k", j) for j in range(ca + 1, cb + 1)]
        if all(t is not None for t in seq) and all(x < y for x, y in zip(seq, seq[1:])):
            passed = sum(1 for t in seq if lam > t)
            cell = ca + passed
            tied = tuple(ca + i + 1 for i, t in enumerate(seq) if lam == t)
            return cell, f"{pattern}: ordered lambda_{ca + 1}..lambda_{cb}, {passed} passed", tied
        if ca == 0:
            l0p, t = table.value("lambda_0'"), table.value("lambda_k", cb)
            if l0p is not None and lam <= l0p:
                return 0, f"{pattern}: lambda <= lambda_0'={_fmt(l0p)}", ()
            if t is not None and lam >= t:
                return cb, f"{pattern}: lambda >= lambda_{cb}={_fmt(t)}", ()
        return None, f"{pattern}: lambda thresholds unordered or degenerate", ()

    l0, t = table.value("lambda_0"), table.value("lambda_k", cb)
    if l0 is not None and lam <= l0:
        return -1, f"{pattern}: lambda <= lambda_0={_fmt(l0)}", ()
    if t is not None and lam >= t:
        return cb, f"{pattern}: lambda >= lambda_{cb}={_fmt(t)}", ()
    return None, f"{pattern}: gap between lambda_0 and lambda_{cb}", ()


def solve_twoterm(inst: NetworkInstance, a: float, b: float, lam: float,
                  cap: Optional[int] = None) -> Solution:
    """Optimal graph for ``d**a + lam * d**b``."""
    model = TwoTerm(a, b, lam)
    head = f"two-term a={_fmt(a)} b={_fmt(b)} lambda={_fmt(lam)}"

    def rewrap(sol: Solution, note: str) -> Solution:
        return Solution(sol.graph, sol.flow, total_energy(inst, model, sol.flow),
                        f"{head}: {note}; " + sol.regime, sol.certified,
                        sol.alternatives, sol.trees)

    if lam == 0:
        return rewrap(solve_monomial(inst, a), "lambda=0 reduces to the a-term")
    if a == b:
        return rewrap(solve_monomial(inst, a), "equal exponents scale the a-term")
    if inst.n == 1:
        return _certified(inst, model, cell_graph(0), f"{head}: single sensor", cap=cap)

    hi, lo, lam_eff = a, b, lam
    note = ""
    if a < b:
        hi, lo, lam_eff = b, a, 1.0 / lam
        note = f"; rescaled to a={_fmt(hi)} b={_fmt(lo)} lambda={_fmt(lam_eff)}"
    table = lambda_table(inst, hi, lo)
    cell, reason, tied = twoterm_claim(table, hi, lo, lam_eff)
    regime = head + note + "; " + reason
    if cell is None:
        return search(inst, model, regime + "; uncertified", cap)
    alternatives = tuple(cell_graph(c) for c in tied)
    return _certified(inst, model, cell_graph(cell), regime, alternatives, cap=cap)


def solve(inst: NetworkInstance, model: CostModel, cap: Optional[int] = None) -> Solution:
    """Dispatch on the cost model type."""
    if isinstance(model, Monomial):
        return solve_monomial(inst, model.a)
    if isinstance(model, TwoTerm):
        return solve_twoterm(inst, model.a, model.b, model.lam, cap=cap)
    if isinstance(model, MultiTerm):
        return solve_multiterm(inst, model, cap=cap)
    return search(inst, model, "general cost model; uncertified", cap)


def graph_energy(inst: NetworkInstance, model: CostModel, g: TransmissionGraph) -> float:
    return total_energy(inst, model, realize(inst, g))


__all__ = [
    "describe_cell",
    "graph_energy",
    "is_tree_optimal",
    "optimality_violation",
    "potentials",
    "search",
    "solve",
    "solve_monomial",
    "solve_multiterm",
    "solve_twoterm",
    "twoterm_claim",
]
