"""Signal power, SINR capacity and interference-free transmission schedules.

A transmitter at ``x_i`` reaching ``x_j`` must emit ``P0 / gain(x_i, x_j)`` so
the receiver sees power ``P0``. Capacity follows the Shannon-Hartley form with
the SINR in place of the signal-to-noise ratio. Interference only lowers
capacity, so optimal schedules transmit one link at a time at the constant
capacity ``C0 = log(1 + P0 / N0)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .errors import DegenerateGain, InfeasibleFlow, ScheduleError
from .model import (
    CostModel,
    FlowMatrix,
    InverseGain,
    Monomial,
    NetworkInstance,
    TwoTerm,
    check_feasible,
)


@dataclass(frozen=True)
class PowerGain:
    """``gain = d**(-a)``."""

    a: float

    def __call__(self, x: float, y: float) -> float:
        d = abs(x - y)
        if d == 0:
            raise DegenerateGain(f"gain undefined on the coincident pair x={x}")
        return d ** (-self.a)

    @property
    def spec(self) -> str:
        return f"mono:{self.a:g}"


@dataclass(frozen=True)
class TwoTermGain:
    """``gain = 1 / (d**a + lam * d**b)``."""

    a: float
    b: float
    lam: float

    def __call__(self, x: float, y: float) -> float:
        d = abs(x - y)
        if d == 0:
            raise DegenerateGain(f"gain undefined on the coincident pair x={x}")
        return 1.0 / (d ** self.a + self.lam * d ** self.b)

    @property
    def spec(self) -> str:
        return f"twoterm:{self.a:g},{self.b:g},{self.lam:g}"


def parse_gain(spec: str):
    """``"mono:a"`` or ``"twoterm:a,b,lambda"``."""
    kind, _, args = spec.partition(":")
    try:
        values = [float(v) for v in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"bad gain parameters in {spec!r}") from None
    if kind == "mono" and len(values) == 1:
        return PowerGain(values[0])
    if kind == "twoterm" and len(values) == 3:
        if values[2] < 0:
            raise ValueError("gain lambda must be >= 0")
        return TwoTermGain(*values)
    raise ValueError(f"unknown gain spec {spec!r}; expected mono:a or twoterm:a,b,lambda")


@dataclass(frozen=True)
class RadioParams:
    P0: float
    N0: float
    gain: Callable[[float, float], float]
    log_base: float = 2.0

    def __post_init__(self):
        if not self.P0 > 0 or not self.N0 > 0:
            raise ValueError("P0 and N0 must be positive")
        if not (self.log_base > 0 and self.log_base != 1):
            raise ValueError("log base must be positive and not 1")

    @property
    def C0(self) -> float:
        """Interference-free capacity."""
        return math.log1p(self.P0 / self.N0) / math.log(self.log_base)

    def inverse_gain(self, x: float, y: float) -> float:
        g = self.gain(x, y)
        if not g > 0:
            raise DegenerateGain(f"gain must be positive, got {g}")
        return 1.0 / g


Pair = tuple[float, float]


def sinr_value(params: RadioParams, xi: float, xj: float,
               interferers: Iterable[Pair] = ()) -> float:
    """SINR at ``xj`` for the link ``xi -> xj`` while each ``(xk, xm)`` pair transmits."""
    if xi == xj:
        raise DegenerateGain(f"link from x={xi} to itself")
    load = 0.0
    for xk, xm in interferers:
        if xk == xm:
            raise DegenerateGain(f"interfering pair at x={xk} is coincident")
        if (xk, xm) == (xi, xj):
            raise ValueError("a link cannot interfere with itself")
        # interferer emits P0/gain(xk, xm); it reaches xj attenuated by gain(xk, xj)
        load += params.inverse_gain(xk, xm) * params.gain(xk, xj)
    return params.P0 / (params.N0 + params.P0 * load)


def capacity(params: RadioParams, xi: float, xj: float,
             interferers: Iterable[Pair] = ()) -> float:
    # log1p keeps small SINRs distinguishable
    return math.log1p(sinr_value(params, xi, xj, interferers)) / math.log(params.log_base)


def interference_penalty_check(params: RadioParams, xi: float, xj: float,
                               interferers: Iterable[Pair]) -> bool:
    """True when the interferers strictly lower the capacity of the link."""
    interferers = list(interferers)
    if not interferers:
        raise ValueError("need at least one interferer")
    return capacity(params, xi, xj, interferers) < capacity(params, xi, xj)


# -- reduction to the flow problem ---------------------------------------------


@dataclass(frozen=True)
class Scaling:
    """Maps between flow-problem amounts and transmission times.

    In the reduced problem flows are ``P0 * t`` and the data volumes are
    ``(P0 / C0) * Q``.
    """

    P0: float
    C0: float

    def times_from_reduced(self, q: FlowMatrix) -> FlowMatrix:
        return q.scaled(1.0 / self.P0)

    def data_from_reduced(self, q: FlowMatrix) -> FlowMatrix:
        return q.scaled(self.C0 / self.P0)

    def times_from_data(self, q: FlowMatrix) -> FlowMatrix:
        return q.scaled(1.0 / self.C0)


def gain_cost_model(gain) -> CostModel:
    """Cost ``1 / gain``, as a distance cost when the gain is a built-in."""
    if isinstance(gain, PowerGain):
        return Monomial(gain.a)
    if isinstance(gain, TwoTermGain):
        return TwoTerm(gain.a, gain.b, gain.lam)
    return InverseGain(gain)


def reduce_to_flow(inst: NetworkInstance,
                   params: RadioParams) -> tuple[NetworkInstance, CostModel, Scaling]:
    scale = params.P0 / params.C0
    reduced = NetworkInstance(inst.positions, tuple(scale * q for q in inst.data))
    return reduced, gain_cost_model(params.gain), Scaling(params.P0, params.C0)


# -- schedules ---------------------------------------------------------------


@dataclass(frozen=True)
class Slot:
    sender: int
    receiver: int
    start: float
    end: float
    rate: float
    amount: float
    energy: float
    duration: float


@dataclass(frozen=True)
class Schedule:
    slots: tuple[Slot, ...]
    node_energy: tuple[float, ...]

    @property
    def total_energy(self) -> float:
        return math.fsum(self.node_energy)

    @property
    def makespan(self) -> float:
        return self.slots[-1].end if self.slots else 0.0

    def to_csv(self, fmt: Callable[[float], str] = repr) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sender", "receiver", "start", "end", "rate", "amount", "slot_energy"])
        for s in self.slots:
            w.writerow([s.sender, s.receiver, fmt(s.start), fmt(s.end),
                        fmt(s.rate), fmt(s.amount), fmt(s.energy)])
        return buf.getvalue()


def _transmit_order(flow: FlowMatrix, inst: NetworkInstance) -> list[int]:
    """Senders in causal order, farthest ready sender first."""
    n = flow.n
    pending_in = [0] * (n + 1)
    for i, j, _ in flow.edges():
        pending_in[j] += 1
    ready = [i for i in range(1, n + 1) if pending_in[i] == 0]
    order = []
    while ready:
        ready.sort(key=lambda i: (inst.x(i), i))
        i = ready.pop()
        order.append(i)
        for j in range(n + 1):
            if flow.q[i, j] > 0 and j != 0:
                pending_in[j] -= 1
                if pending_in[j] == 0:
                    ready.append(j)
    if len(order) != n:
        raise InfeasibleFlow("flow contains a cycle, no causal schedule exists")
    return order


def make_schedule(inst: NetworkInstance, params: RadioParams, flow: FlowMatrix,
                  tol: float = 1e-9) -> Schedule:
    """One slot per positive flow entry, sequential, at rate ``C0``.

    A sensor starts only after all of its inflows have finished.
    """
    report = check_feasible(inst, flow, tol)
    if not report.feasible:
        raise InfeasibleFlow(f"flow is infeasible (max residual {report.max_residual:.3g})")
    c0 = params.C0
    coords = inst.coords
    clock = 0.0
    slots = []
    node_energy = [0.0] * inst.n
    for i in _transmit_order(flow, inst):
        for j in sorted(range(inst.n + 1), key=lambda j: -coords[j]):
            amount = flow.q[i, j]
            if amount <= 0:
                continue
            duration = amount / c0
            energy = params.P0 * params.inverse_gain(coords[i], coords[j]) * duration
            slots.append(Slot(i, j, clock, clock + duration, c0, amount, energy, duration))
            node_energy[i - 1] += energy
            clock += duration
    return Schedule(tuple(slots), tuple(node_energy))


def validate_schedule(schedule: Schedule, params: Optional[RadioParams] = None,
                      rtol: float = 1e-12) -> None:
    """Raise ``ScheduleError`` on overlap, broken causality or ``q != c * t``."""
    slots = sorted(schedule.slots, key=lambda s: (s.start, s.end))
    for a, b in zip(slots, slots[1:]):
        if b.start < a.end:
            raise ScheduleError(
                f"slots {a.sender}->{a.receiver} and {b.sender}->{b.receiver} overlap")
    last_in: dict[int, float] = {}
    first_out: dict[int, float] = {}
    for s in slots:
        if s.end < s.start:
            raise ScheduleError("slot ends before it starts")
        if not math.isclose(s.amount, s.rate * s.duration, rel_tol=1e-9):
            raise ScheduleError(f"slot {s.sender}->{s.receiver}: amount != rate * duration")
        if params is not None and s.rate > params.C0 * (1 + rtol):
            raise ScheduleError(f"slot {s.sender}->{s.receiver} exceeds capacity")
        last_in[s.receiver] = max(last_in.get(s.receiver, 0.0), s.end)
        first_out[s.sender] = min(first_out.get(s.sender, math.inf), s.start)
    for node, t in first_out.items():
        if last_in.get(node, 0.0) > t:
            raise ScheduleError(f"node {node} transmits before its inflow completes")


def schedule_objective(inst: NetworkInstance, params: RadioParams,
                       schedule: Schedule) -> float:
    """``P0 * sum gain^-1 * t`` evaluated directly from slot durations."""
    coords = inst.coords
    return math.fsum(params.P0 * params.inverse_gain(coords[s.sender], coords[s.receiver])
                     * s.duration for s in schedule.slots)
