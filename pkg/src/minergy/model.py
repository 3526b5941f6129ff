"""Network instances, distance cost models, flow matrices and energy evaluation.

Energy and data are dimensionless throughout. Node 0 is the collector at the
origin; sensors are numbered 1..N in order of increasing position.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateDistance,
    DegenerateGain,
    DimensionMismatch,
    InvalidInstance,
    NegativeLambda,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class NetworkInstance:
    """Sensors on the positive half line, collector at ``x_0 = 0``."""

    positions: tuple[float, ...]
    data: tuple[float, ...]

    def __post_init__(self):
        pos = tuple(float(x) for x in self.positions)
        dat = tuple(float(q) for q in self.data)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "data", dat)
        if len(pos) < 1:
            raise InvalidInstance("an instance needs at least one sensor")
        if len(pos) != len(dat):
            raise InvalidInstance(
                f"{len(pos)} positions but {len(dat)} data volumes")
        if not all(math.isfinite(x) for x in pos + dat):
            raise InvalidInstance("positions and data must be finite")
        if pos[0] <= 0:
            raise InvalidInstance("positions must be strictly positive")
        for i in range(1, len(pos)):
            if pos[i] <= pos[i - 1]:
                raise InvalidInstance(
                    f"positions must be strictly increasing (x_{i} >= x_{i + 1})")
        if any(q <= 0 for q in dat):
            raise InvalidInstance("data volumes must be strictly positive")

    @classmethod
    def regular(cls, n: int, data: float | Sequence[float] = 1.0) -> "NetworkInstance":
        """The line network with ``x_i = i``."""
        if n < 1:
            raise InvalidInstance("an instance needs at least one sensor")
        if isinstance(data, (int, float)):
            data = [float(data)] * n
        return cls(tuple(float(i) for i in range(1, n + 1)), tuple(data))

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def is_regular(self) -> bool:
        return all(x == i for i, x in enumerate(self.positions, start=1))

    @property
    def coords(self) -> np.ndarray:
        """Positions including the collector, indexed by node number."""
        return np.array((0.0,) + self.positions)

    def x(self, i: int) -> float:
        return 0.0 if i == 0 else self.positions[i - 1]

    def Q(self, i: int) -> float:
        return self.data[i - 1]

    def scaled(self, c: float) -> "NetworkInstance":
        return NetworkInstance(self.positions, tuple(c * q for q in self.data))


# -- cost models -------------------------------------------------------------


class CostModel:
    """Per-unit transmission cost between two points."""

    def edge_cost(self, xi: float, xj: float) -> float:
        raise NotImplementedError

    def cost_matrix(self, coords: np.ndarray) -> np.ndarray:
        """Dense cost matrix over ``coords``; the diagonal is ``inf``."""
        n = len(coords)
        out = np.full((n, n), np.inf)
        for i in range(n):
            for j in range(n):
                if i != j:
                    out[i, j] = self.edge_cost(coords[i], coords[j])
        return out

    def scaled(self, c: float) -> "CostModel":
        raise NotImplementedError


class DistanceCost(CostModel):
    """Cost of the form ``sum_n lam_n * d**alpha_n``."""

    def terms(self) -> tuple[tuple[float, float], ...]:
        raise NotImplementedError

    def _active(self):
        return [(lam, alpha) for lam, alpha in self.terms() if lam != 0]

    def edge_cost(self, xi: float, xj: float) -> float:
        d = abs(xi - xj)
        active = self._active()
        if d == 0:
            if any(alpha <= 0 for _, alpha in active):
                raise DegenerateDistance(
                    f"zero distance at x={xi} with a nonpositive exponent")
            return 0.0
        return self.at_distance(d)

    def at_distance(self, d):
        total = 0.0
        for lam, alpha in self._active():
            total = total + (d ** alpha if lam == 1.0 else lam * d ** alpha)
        return total

    def cost_matrix(self, coords: np.ndarray) -> np.ndarray:
        d = np.abs(coords[:, None] - coords[None, :])
        np.fill_diagonal(d, 1.0)
        out = np.asarray(self.at_distance(d), dtype=float)
        np.fill_diagonal(out, np.inf)
        return out

    def scaled(self, c: float) -> "MultiTerm":
        return MultiTerm(tuple((c * lam, alpha) for lam, alpha in self.terms()))


@dataclass(frozen=True)
class Monomial(DistanceCost):
    a: float

    def terms(self):
        return ((1.0, float(self.a)),)

    def at_distance(self, d):
        return d ** self.a


@dataclass(frozen=True)
class TwoTerm(DistanceCost):
    """``d**a + lam * d**b``."""

    a: float
    b: float
    lam: float

    def __post_init__(self):
        if not self.lam >= 0:
            raise NegativeLambda(f"lambda must be >= 0, got {self.lam}")

    def terms(self):
        return ((1.0, float(self.a)), (float(self.lam), float(self.b)))

    def at_distance(self, d):
        if self.lam == 0:
            return d ** self.a
        return d ** self.a + self.lam * d ** self.b


@dataclass(frozen=True)
class MultiTerm(DistanceCost):
    """Sum of monomials; ``pairs`` holds ``(lam_n, alpha_n)``."""

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pairs = tuple((float(lam), float(alpha)) for lam, alpha in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ValueError("a multi-term cost needs at least one term")
        for lam, _ in pairs:
            if not lam >= 0:
                raise NegativeLambda(f"lambda must be >= 0, got {lam}")

    def terms(self):
        return self.pairs


@dataclass(frozen=True)
class InverseGain(CostModel):
    """Cost ``1 / gain(x, y)`` for an arbitrary positive gain function."""

    gain: Callable[[float, float], float]
    name: str = "custom"

    def edge_cost(self, xi, xj):
        if xi == xj:
            raise DegenerateGain(f"gain undefined on the coincident pair x={xi}")
        g = self.gain(xi, xj)
        if not g > 0:
            raise DegenerateGain(f"gain must be positive, got {g}")
        return 1.0 / g


def edge_cost(model: CostModel, xi: float, xj: float) -> float:
    return model.edge_cost(xi, xj)


# -- flows -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FlowMatrix:
    """``q[i, j]`` is the amount node ``i`` sends directly to node ``j``."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 2:
            raise DimensionMismatch(f"flow matrix must be square (N+1)x(N+1), got {q.shape}")
        if np.any(q < 0) or not np.all(np.isfinite(q)):
            raise ValueError("flow entries must be finite and nonnegative")
        if np.any(np.diag(q) != 0):
            raise ValueError("self-edges are not allowed")
        if np.any(q[0] != 0):
            raise ValueError("the collector does not transmit")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @classmethod
    def zeros(cls, n: int) -> "FlowMatrix":
        return cls(np.zeros((n + 1, n + 1)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> "FlowMatrix":
        q = np.zeros((n + 1, n + 1))
        for i, j, amount in edges:
            q[i, j] += amount
        return cls(q)

    @property
    def n(self) -> int:
        return self.q.shape[0] - 1

    def edges(self) -> list[tuple[int, int, float]]:
        """Positive entries ordered by sender, then receiver."""
        rows, cols = np.nonzero(self.q)
        return [(int(i), int(j), float(self.q[i, j])) for i, j in zip(rows, cols)]

    def scaled(self, c: float) -> "FlowMatrix":
        return FlowMatrix(c * self.q)

    def __getitem__(self, key):
        return self.q[key]


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    max_residual: float
    residuals: tuple[float, ...] = field(repr=False)

    def __bool__(self):
        return self.feasible


def check_feasible(inst: NetworkInstance, q: FlowMatrix,
                   tol: float = DEFAULT_TOL) -> FeasibilityReport:
    """Outflow of each sensor must equal its own data plus its inflow.

    ``residuals[i - 1]`` is the absolute imbalance at sensor ``i``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if q.n != inst.n:
        raise DimensionMismatch(f"flow is for N={q.n}, instance has N={inst.n}")
    m = q.q
    out = m.sum(axis=1)[1:]
    inflow = m.sum(axis=0)[1:]
    res = np.abs(out - np.asarray(inst.data) - inflow)
    worst = float(res.max())
    return FeasibilityReport(worst <= tol, worst, tuple(float(r) for r in res))


def total_energy(inst: NetworkInstance, model: CostModel, q: FlowMatrix) -> float:
    """Sum of ``q[i, j] * E(x_i, x_j)`` over edges that carry flow."""
    if q.n != inst.n:
        raise DimensionMismatch(f"flow is for N={q.n}, instance has N={inst.n}")
    coords = inst.coords
    total = 0.0
    for i, j, amount in q.edges():
        total += amount * model.edge_cost(coords[i], coords[j])
    return total


# -- additivity ----------------------------------------------------------------


class Additivity(enum.Enum):
    SUPER = "super"
    SUB = "sub"
    NEITHER = "neither"


def superadditivity_check(model: CostModel, xi: float, xj: float,
                          xk: float) -> tuple[Additivity, float]:
    """Classify ``E(xi,xk) - E(xi,xj) - E(xj,xk)`` for ``xi >= xj >= xk >= 0``.

    Returns the class and the slack. Zero slack (within rounding) counts as
    sub-additive.
    """
    if not (xi >= xj >= xk >= 0):
        raise ValueError("expected an ordered triple xi >= xj >= xk >= 0")
    direct = model.edge_cost(xi, xk)
    hop1 = model.edge_cost(xi, xj)
    hop2 = model.edge_cost(xj, xk)
    slack = direct - hop1 - hop2
    if not math.isfinite(slack):
        return Additivity.NEITHER, slack
    scale = max(abs(direct), abs(hop1), abs(hop2))
    if abs(slack) <= 1e-12 * scale:
        return Additivity.SUB, 0.0
    return (Additivity.SUPER if slack > 0 else Additivity.SUB), slack


def additivity_profile(model: CostModel,
                       triples: Iterable[tuple[float, float, float]]) -> Additivity:
    """Aggregate classification over many triples; mixed signs give NEITHER."""
    seen = set()
    for t in triples:
        kind, slack = superadditivity_check(model, *t)
        if kind is Additivity.NEITHER:
            return kind
        if slack != 0:
            seen.add(kind)
    if len(seen) > 1:
        return Additivity.NEITHER
    return seen.pop() if seen else Additivity.SUB
