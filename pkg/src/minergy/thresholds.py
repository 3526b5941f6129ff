"""Exponent roots, exponent cells and lambda crossovers.

For a monomial cost the optimal graph only changes where routing a sensor
``k`` of the near half through the farthest sensor costs exactly as much as
sending straight to the collector. Those exponents split the real line into
cells, each owned by one canonical graph. For a two-term cost the switch
points in ``lambda`` are crossovers between the energies of adjacent graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import IndexOutOfRange, MultipleRoots, NoBracket, ParallelCosts
from .graphs import (
    DIRECT,
    DIRECT_PERTURBED,
    NEXT_HOP,
    NEXT_HOP_PERTURBED,
    TransmissionGraph,
    cell_graph,
    n_prime,
    realize,
    split,
)
from .model import Monomial, NetworkInstance, TwoTerm, total_energy

ROOT_TOL = 1e-10
MAX_DOUBLINGS = 2000
SCAN_STEP = 0.01


class RootNotConverged(NoBracket):
    pass


def root_function(inst: NetworkInstance, k: int, a: float) -> float:
    """``|x_N - x_k|**a + x_N**a - x_k**a``; negative means relaying via N pays off."""
    xn, xk = inst.positions[-1], inst.positions[k - 1]
    return abs(xn - xk) ** a + xn ** a - xk ** a


def find_a_root(inst: NetworkInstance, k: int, tol: float = ROOT_TOL) -> float:
    """Exponent at which sensor ``k`` is indifferent between direct and relayed.

    Brackets by doubling the step below ``a = 1`` until the root function turns
    negative, then bisects to adjacent floats. The search runs on the root
    function divided by ``x_k**a``, which has the same sign and stays finite.
    """
    if not 1 <= k <= n_prime(inst):
        raise IndexOutOfRange(f"k={k} outside [1, {n_prime(inst)}]")
    xn, xk = inst.positions[-1], inst.positions[k - 1]
    if not xk < xn / 2:
        raise NoBracket(f"x_{k}={xk} is not below x_N/2={xn / 2}")
    r_far = (xn - xk) / xk
    r_col = xn / xk

    def g(a):
        return r_far ** a + r_col ** a - 1.0

    hi, step = 1.0, 1.0
    lo = hi - step
    for _ in range(MAX_DOUBLINGS):
        if not math.isfinite(lo):
            break
        if g(lo) < 0:
            break
        hi = lo
        step *= 2
        lo = 1.0 - step
    else:
        raise NoBracket(f"no sign change for k={k} after {MAX_DOUBLINGS} doublings")
    if not math.isfinite(lo) or g(lo) >= 0:
        raise NoBracket(f"no sign change for k={k}")

    _check_single_root(g, lo, k)

    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    root = min((lo, hi), key=lambda a: abs(root_function(inst, k, a)))
    residual = abs(root_function(inst, k, root))
    if residual > tol:
        raise RootNotConverged(
            f"root for k={k} has residual {residual:.3e} above {tol:.1e}")
    return root


def _check_single_root(g, lo: float, k: int) -> None:
    grid = np.arange(lo, 1.0 + SCAN_STEP / 2, SCAN_STEP)
    with np.errstate(over="ignore"):
        signs = np.sign(g(grid))
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    if changes > 1:
        raise MultipleRoots(f"root function for k={k} changes sign {changes} times")


# -- tables ------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaThreshold:
    """Crossover between ``below`` (preferred for smaller lambda) and ``above``."""

    name: str
    k: int
    below: TransmissionGraph
    above: TransmissionGraph
    value: float
    closed_form: Optional[float]
    status: str
    residual: float

    @property
    def usable(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True, eq=False)
class ThresholdTable:
    positions: tuple[float, ...]
    a_roots: tuple[float, ...]
    root_residuals: tuple[float, ...]
    a: Optional[float] = None
    b: Optional[float] = None
    lambdas: dict = field(default_factory=dict)

    @property
    def n_prime(self) -> int:
        return len(self.a_roots)

    def boundary(self, k: int) -> float:
        """``a_0 = 1``, ``a_k`` for ``1 <= k <= N'`` and ``a_{N'+1} = -inf``."""
        if k == 0:
            return 1.0
        if k == self.n_prime + 1:
            return -math.inf
        return self.a_roots[k - 1]

    @property
    def degenerate(self) -> bool:
        return self.a is not None and self.a == self.b

    def get(self, name: str, k: int = 0) -> Optional[LambdaThreshold]:
        return self.lambdas.get((name, k))

    def value(self, name: str, k: int = 0) -> Optional[float]:
        t = self.get(name, k)
        return t.value if t is not None and t.usable else None


def exponent_table(inst: NetworkInstance, tol: float = ROOT_TOL) -> ThresholdTable:
    roots = tuple(find_a_root(inst, k, tol) for k in range(1, n_prime(inst) + 1))
    for a_hi, a_lo in zip(roots, roots[1:]):
        if not a_lo < a_hi:
            raise MultipleRoots("exponent roots are not strictly decreasing")
    residuals = tuple(abs(root_function(inst, k, r)) for k, r in enumerate(roots, start=1))
    return ThresholdTable(inst.positions, roots, residuals)


class ExponentCell(NamedTuple):
    index: int
    tie: bool


def classify_exponent(table: ThresholdTable, a: float) -> ExponentCell:
    """Cell ``k`` with ``a`` in ``[a_{k+1}, a_k]``; ``-1`` means ``a >= 1``.

    On a boundary the lower index is returned with ``tie`` set.
    """
    if a > 1:
        return ExponentCell(-1, False)
    if a == 1:
        return ExponentCell(-1, True)
    above = sum(1 for r in table.a_roots if r > a)
    tie = any(r == a for r in table.a_roots)
    return ExponentCell(above, tie)


def lambda_crossover(inst: NetworkInstance, a: float, b: float,
                     g1: TransmissionGraph, g2: TransmissionGraph) -> float:
    """Lambda at which ``g1`` and ``g2`` cost the same under ``d**a + lam*d**b``."""
    f1, f2 = realize(inst, g1), realize(inst, g2)
    a1 = total_energy(inst, Monomial(a), f1)
    a2 = total_energy(inst, Monomial(a), f2)
    b1 = total_energy(inst, Monomial(b), f1)
    b2 = total_energy(inst, Monomial(b), f2)
    if abs(b1 - b2) <= 1e-15 * max(abs(b1), abs(b2)):
        raise ParallelCosts(f"{g1.label} and {g2.label} have equal b-energy")
    return (a2 - a1) / (b1 - b2)


def _ratio(num: float, den: float) -> float:
    try:
        return num / den
    except ZeroDivisionError:
        return math.nan


def closed_form_lambdas(n: int, a: float, b: float) -> dict:
    """Closed-form crossovers on the regular line ``x_i = i``."""
    npr = (n - 2) // 2 if n % 2 == 0 else (n - 1) // 2
    out = {}
    if n >= 2:
        out[("lambda_0", 0)] = _ratio(2.0 ** a - 2.0, 2.0 - 2.0 ** b)
        m = n - npr - 1
        if m > 0:
            out[("lambda_0'", 0)] = _ratio(
                float(n) ** a - float(m) ** a - float(npr + 1) ** a,
                float(m) ** b + float(npr + 1) ** b - float(n) ** b)
    for k in range(1, npr + 1):
        out[("lambda_k", k)] = _ratio(
            float(n - k) ** a + float(n) ** a - float(k) ** a,
            float(k) ** b - float(n - k) ** b - float(n) ** b)
    return out


def _pairs(inst: NetworkInstance):
    pairs = []
    if inst.n >= 2:
        pairs.append(("lambda_0", 0, NEXT_HOP, NEXT_HOP_PERTURBED))
        if n_prime(inst) + 1 < inst.n:
            pairs.append(("lambda_0'", 0, DIRECT, DIRECT_PERTURBED))
    for k in range(1, n_prime(inst) + 1):
        pairs.append(("lambda_k", k, cell_graph(k - 1), split(k)))
    return pairs


def lambda_table(inst: NetworkInstance, a: float, b: float,
                 tol: float = ROOT_TOL) -> ThresholdTable:
    """Exponent roots plus every lambda crossover for ``d**a + lam*d**b``.

    ``lambda_0`` separates next-hop from its perturbation, ``lambda_0'``
    direct from its perturbation, and ``lambda_k`` the split graphs
    ``k - 1`` and ``k`` (split 0 being the direct graph). Values come from
    realized-graph crossovers; on regular instances the closed forms are
    stored alongside for comparison.
    """
    base = exponent_table(inst, tol)
    closed = closed_form_lambdas(inst.n, a, b) if inst.is_regular else {}
    lambdas = {}
    for name, k, below, above in _pairs(inst):
        try:
            value = lambda_crossover(inst, a, b, below, above)
        except ParallelCosts:
            lambdas[(name, k)] = LambdaThreshold(
                name, k, below, above, math.nan, closed.get((name, k)), "parallel", math.nan)
            continue
        status = "ok" if math.isfinite(value) and value > 0 else "degenerate"
        residual = math.nan
        if math.isfinite(value) and value >= 0:
            model = TwoTerm(a, b, value)
            e1 = total_energy(inst, model, realize(inst, below))
            e2 = total_energy(inst, model, realize(inst, above))
            residual = abs(e1 - e2) / max(abs(e1), abs(e2))
        lambdas[(name, k)] = LambdaThreshold(
            name, k, below, above, value, closed.get((name, k)), status, residual)
    return ThresholdTable(base.positions, base.a_roots, base.root_residuals, a, b, lambdas)
