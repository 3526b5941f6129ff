"""Exhaustive ground truth over unsplit routing trees.

With a linear objective the optimum sits on a vertex of the flow polytope,
and those vertices are exactly the routing trees in which every sensor sends
all of its traffic to one receiver. Trees are enumerated through Pruefer
sequences on the N+1 nodes, decoded in vectorised batches.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import TooLarge
from .graphs import Solution, flow_from_next_hops, identify
from .model import CostModel, FlowMatrix, NetworkInstance, total_energy

DEFAULT_CAP = 8
CAP_ENV = "MINERGY_ORACLE_CAP"
TIE_RTOL = 1e-12
_CHUNK = 1 << 16


def oracle_cap() -> int:
    value = os.environ.get(CAP_ENV)
    if value is None or value.strip() == "":
        return DEFAULT_CAP
    return int(value)


@dataclass(frozen=True)
class RoutingTree:
    """``next_hop[i - 1]`` is the receiver of sensor ``i`` (0 = collector)."""

    next_hop: tuple[int, ...]

    def __post_init__(self):
        hops = tuple(int(j) for j in self.next_hop)
        object.__setattr__(self, "next_hop", hops)
        n = len(hops)
        for i, j in enumerate(hops, start=1):
            if not 0 <= j <= n or j == i:
                raise ValueError(f"invalid receiver {j} for sensor {i}")
        for i in range(1, n + 1):
            j, steps = i, 0
            while j != 0:
                j = hops[j - 1]
                steps += 1
                if steps > n:
                    raise ValueError("routing tree contains a cycle")

    @property
    def n(self) -> int:
        return len(self.next_hop)

    def flow(self, inst: NetworkInstance) -> FlowMatrix:
        return flow_from_next_hops(inst, self.next_hop)

    def __str__(self):
        return " ".join(f"{i}->{j}" for i, j in enumerate(self.next_hop, start=1))


def tree_count(n: int) -> int:
    """Rooted labelled trees on ``n + 1`` vertices with a fixed root."""
    return (n + 1) ** (n - 1)


def _check_cap(n: int, cap: Optional[int]) -> None:
    cap = oracle_cap() if cap is None else cap
    if n > cap:
        raise TooLarge(f"N={n} exceeds the oracle cap of {cap}")


def _sequences(n: int, codes: np.ndarray) -> np.ndarray:
    """Pruefer sequences (labels ``0..n``) for the given lexicographic ranks."""
    codes = codes.astype(np.int64, copy=True)
    seq = np.empty((len(codes), n - 1), dtype=np.int64)
    for pos in range(n - 2, -1, -1):
        seq[:, pos] = codes % (n + 1)
        codes //= n + 1
    return seq


def _initial_degree(n: int, seq: np.ndarray, rows: np.ndarray) -> np.ndarray:
    degree = np.ones((len(seq), n + 1), dtype=np.int64)
    for pos in range(n - 1):
        degree[rows, seq[:, pos]] += 1
    return degree


def _decode(n: int, codes: np.ndarray) -> np.ndarray:
    """Parent arrays for the Pruefer sequences of rank ``codes``.

    Labels ``0..n-1`` are sensors ``1..n`` and label ``n`` is the collector,
    which as the largest label is never removed and so acts as the root.
    Returns an ``(m, n + 1)`` array indexed by node number with column 0 = 0.
    """
    seq = _sequences(n, codes)
    m = len(seq)
    rows = np.arange(m)
    degree = _initial_degree(n, seq, rows)
    parent = np.empty((m, n + 1), dtype=np.int64)
    for pos in range(n - 1):
        leaf = np.argmax(degree == 1, axis=1)
        parent[rows, leaf] = seq[:, pos]
        degree[rows, leaf] = 0
        degree[rows, seq[:, pos]] -= 1
    last = np.argmax(degree[:, :n] == 1, axis=1)
    parent[rows, last] = n
    # relabel: sensor label L -> node L + 1, collector label n -> node 0
    nodes = np.where(parent[:, :n] == n, 0, parent[:, :n] + 1)
    out = np.zeros((m, n + 1), dtype=np.int64)
    out[:, 1:] = nodes
    return out


def _energies(n: int, start: int, stop: int, cost: np.ndarray, data: np.ndarray) -> np.ndarray:
    """Total energies of trees ``start..stop-1``, fused with the decoding.

    A Pruefer leaf is removed only after all of its children, so its load is
    final at removal and can be charged to the edge towards its parent.
    ``cost`` and ``data`` are in label order.
    """
    seq = _sequences(n, np.arange(start, stop, dtype=np.int64))
    m = len(seq)
    rows = np.arange(m)
    degree = _initial_degree(n, seq, rows)
    load = np.zeros((m, n + 1))
    load[:, :n] = data
    energy = np.zeros(m)
    for pos in range(n - 1):
        leaf = np.argmax(degree == 1, axis=1)
        par = seq[:, pos]
        moved = load[rows, leaf]
        energy += moved * cost[leaf, par]
        load[rows, par] += moved
        degree[rows, leaf] = 0
        degree[rows, par] -= 1
    last = np.argmax(degree[:, :n] == 1, axis=1)
    energy += load[rows, last] * cost[last, n]
    return energy


def _batches(n: int) -> Iterator[np.ndarray]:
    total = tree_count(n)
    for start in range(0, total, _CHUNK):
        yield _decode(n, np.arange(start, min(total, start + _CHUNK)))


def enumerate_trees(n: int, cap: Optional[int] = None) -> Iterator[RoutingTree]:
    """Every routing tree on ``n`` sensors exactly once, in a fixed order."""
    if n < 1:
        raise ValueError("N must be at least 1")
    _check_cap(n, cap)
    for batch in _batches(n):
        for row in batch:
            yield RoutingTree(tuple(int(j) for j in row[1:]))


def tree_energies(inst: NetworkInstance, model: CostModel,
                  cap: Optional[int] = None) -> np.ndarray:
    """Energy of every routing tree, in enumeration order."""
    n = inst.n
    _check_cap(n, cap)
    cost = model.cost_matrix(inst.coords)
    # node order (0, 1..n) -> label order (1..n, 0)
    perm = np.r_[1:n + 1, 0]
    cost_lbl = cost[np.ix_(perm, perm)]
    data = np.asarray(inst.data)
    total = tree_count(n)
    return np.concatenate([
        _energies(n, start, min(total, start + _CHUNK), cost_lbl, data)
        for start in range(0, total, _CHUNK)])


def oracle_min(inst: NetworkInstance, model: CostModel, *,
               with_energies: bool = False,
               cap: Optional[int] = None) -> Solution:
    """Minimum total energy over all routing trees.

    Every tree within ``TIE_RTOL`` relative of the minimum is reported in
    ``trees``; ``energies`` holds the sorted energy of every tree on request.
    """
    energies = tree_energies(inst, model, cap)
    best = float(energies.min())
    tied = np.nonzero(energies <= best + TIE_RTOL * abs(best))[0]
    trees = tuple(RoutingTree(tuple(int(j) for j in row[1:])) for row in _decode(inst.n, tied))
    flow = trees[0].flow(inst)
    return Solution(
        graph=identify(inst, trees[0].next_hop),
        flow=flow,
        energy=total_energy(inst, model, flow),
        regime=f"exhaustive search over {len(energies)} routing trees",
        certified=True,
        trees=trees,
        energies=np.sort(energies) if with_energies else None,
    )
