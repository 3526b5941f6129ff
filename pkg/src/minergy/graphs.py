"""Canonical transmission graphs and their closed-form flow weights."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import IndexOutOfRange
from .model import FlowMatrix, NetworkInstance


class GraphKind(enum.Enum):
    NEXT_HOP = "T0"
    DIRECT = "T1"
    SPLIT = "Tk+1"
    NEXT_HOP_PERTURBED = "T0+"
    DIRECT_PERTURBED = "T1+"


@dataclass(frozen=True)
class TransmissionGraph:
    kind: GraphKind
    k: Optional[int] = None

    def __post_init__(self):
        if (self.kind is GraphKind.SPLIT) != (self.k is not None):
            raise ValueError("only split graphs carry an index k")

    @property
    def label(self) -> str:
        if self.kind is GraphKind.SPLIT:
            return f"T{self.k + 1}({self.k})"
        return self.kind.value

    def __str__(self):
        return self.label

    @classmethod
    def parse(cls, label: str) -> "TransmissionGraph":
        for kind in GraphKind:
            if kind is not GraphKind.SPLIT and label == kind.value:
                return cls(kind)
        if label.startswith("T") and label.endswith(")") and "(" in label:
            return split(int(label[label.index("(") + 1:-1]))
        raise ValueError(f"unknown graph label {label!r}")


NEXT_HOP = TransmissionGraph(GraphKind.NEXT_HOP)
DIRECT = TransmissionGraph(GraphKind.DIRECT)
NEXT_HOP_PERTURBED = TransmissionGraph(GraphKind.NEXT_HOP_PERTURBED)
DIRECT_PERTURBED = TransmissionGraph(GraphKind.DIRECT_PERTURBED)


def split(k: int) -> TransmissionGraph:
    """Nodes ``1..k`` relay through node ``N``; the rest send directly."""
    return TransmissionGraph(GraphKind.SPLIT, int(k))


def n_prime(inst: NetworkInstance) -> int:
    """Number of sensors strictly inside ``(0, x_N / 2)``."""
    if inst.is_regular:
        n = inst.n
        return (n - 2) // 2 if n % 2 == 0 else (n - 1) // 2
    half = inst.positions[-1] / 2
    return sum(1 for x in inst.positions if x < half)


def next_hops(inst: NetworkInstance, g: TransmissionGraph) -> tuple[int, ...]:
    """Receiver of each sensor ``1..N`` in graph ``g`` (entry ``i - 1``)."""
    n = inst.n
    kind = g.kind
    if kind is GraphKind.NEXT_HOP:
        return tuple(range(0, n))
    if kind is GraphKind.DIRECT:
        return (0,) * n
    if kind is GraphKind.SPLIT:
        if not 1 <= g.k <= n_prime(inst):
            raise IndexOutOfRange(
                f"split index k={g.k} outside [1, {n_prime(inst)}]")
        return tuple(n if i <= g.k else 0 for i in range(1, n + 1))
    if n < 2:
        raise IndexOutOfRange(f"{g.label} needs at least two sensors")
    if kind is GraphKind.NEXT_HOP_PERTURBED:
        hops = list(range(0, n))
        hops[n - 1] = n - 2
        return tuple(hops)
    if kind is GraphKind.DIRECT_PERTURBED:
        relay = n_prime(inst) + 1
        if relay >= n:
            raise IndexOutOfRange(f"no relay below node {n} for {g.label}")
        hops = [0] * n
        hops[n - 1] = relay
        return tuple(hops)
    raise ValueError(f"unhandled graph kind {kind}")


def flow_from_next_hops(inst: NetworkInstance, hops) -> FlowMatrix:
    """Each sensor forwards its own data plus everything it receives.

    ``hops`` must describe a tree rooted at the collector.
    """
    n = inst.n
    load = np.array((0.0,) + inst.data)
    # children before parents: process sensors by decreasing depth
    depth = [0] * (n + 1)
    for i in range(1, n + 1):
        j, d = i, 0
        while j != 0:
            j = hops[j - 1]
            d += 1
            if d > n:
                raise ValueError("next-hop assignment contains a cycle")
        depth[i] = d
    q = np.zeros((n + 1, n + 1))
    for i in sorted(range(1, n + 1), key=lambda i: (-depth[i], i)):
        j = hops[i - 1]
        q[i, j] = load[i]
        load[j] += load[i]
    return FlowMatrix(q)


def realize(inst: NetworkInstance, g: TransmissionGraph) -> FlowMatrix:
    return flow_from_next_hops(inst, next_hops(inst, g))


def enumerate_canonical(inst: NetworkInstance) -> list[TransmissionGraph]:
    """``[T0, T1, Split(1), ..., Split(N')]``."""
    return [NEXT_HOP, DIRECT] + [split(k) for k in range(1, n_prime(inst) + 1)]


def enumerate_extended(inst: NetworkInstance) -> list[TransmissionGraph]:
    """Canonical family plus the two perturbed graphs where they exist."""
    out = enumerate_canonical(inst)
    for g in (NEXT_HOP_PERTURBED, DIRECT_PERTURBED):
        try:
            next_hops(inst, g)
        except IndexOutOfRange:
            continue
        out.append(g)
    return out


def cell_graph(cell: int) -> TransmissionGraph:
    """Graph owning exponent cell ``cell`` (-1 next-hop, 0 direct, k split)."""
    if cell == -1:
        return NEXT_HOP
    if cell == 0:
        return DIRECT
    if cell > 0:
        return split(cell)
    raise IndexOutOfRange(f"no exponent cell {cell}")


def identify(inst: NetworkInstance, hops) -> Optional[TransmissionGraph]:
    """Return the named graph whose routing equals ``hops``, if any."""
    hops = tuple(hops)
    for g in enumerate_extended(inst):
        if next_hops(inst, g) == hops:
            return g
    return None


@dataclass(frozen=True, eq=False)
class Solution:
    """A routing decision with its flow and total energy.

    ``certified`` is true only when a closed-form result selected the graph
    and the choice passed the shortest-path optimality check.
    """

    graph: Optional[TransmissionGraph]
    flow: FlowMatrix
    energy: float
    regime: str
    certified: bool
    alternatives: tuple[TransmissionGraph, ...] = ()
    trees: tuple[Any, ...] = ()
    energies: Optional[np.ndarray] = None

    @property
    def label(self) -> str:
        if self.graph is not None:
            return self.graph.label
        hops = next_hops_of(self.flow)
        return "tree[" + " ".join(f"{i}->{j}" for i, j in enumerate(hops, start=1)) + "]"


def next_hops_of(flow: FlowMatrix) -> tuple[int, ...]:
    """Receiver of each sensor in an unsplit flow; raises if a sensor splits."""
    hops = []
    for i in range(1, flow.n + 1):
        targets = np.nonzero(flow.q[i])[0]
        if len(targets) != 1:
            raise ValueError(f"sensor {i} does not send to exactly one receiver")
        hops.append(int(targets[0]))
    return tuple(hops)
