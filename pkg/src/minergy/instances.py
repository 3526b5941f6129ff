"""Line-oriented instance files.

::

    # comment
    3
    1.0 1.0
    2.0 1.0
    3.5 2.0

or the shorthand ``regular N [Q]`` for ``x_i = i`` with every ``Q_i = Q``.
"""

from __future__ import annotations

from pathlib import Path

from .errors import InstanceParseError, InvalidInstance
from .model import NetworkInstance


def parse_instance(text: str) -> NetworkInstance:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append((lineno, line))
    if not lines:
        raise InstanceParseError(1, "empty instance file")

    lineno, head = lines[0]
    tokens = head.split()
    if tokens[0] == "regular":
        if len(lines) > 1:
            raise InstanceParseError(lines[1][0], "unexpected content after regular shorthand")
        if len(tokens) not in (2, 3):
            raise InstanceParseError(lineno, "expected 'regular N [Q]'")
        try:
            n = int(tokens[1])
            q = float(tokens[2]) if len(tokens) == 3 else 1.0
        except ValueError:
            raise InstanceParseError(lineno, f"bad regular shorthand {head!r}") from None
        try:
            return NetworkInstance.regular(n, q)
        except InvalidInstance as exc:
            raise InstanceParseError(lineno, str(exc)) from None

    try:
        n = int(head)
    except ValueError:
        raise InstanceParseError(lineno, f"expected sensor count, got {head!r}") from None
    if n < 1:
        raise InstanceParseError(lineno, "sensor count must be at least 1")
    body = lines[1:]
    if len(body) != n:
        at = body[n][0] if len(body) > n else (body[-1][0] + 1 if body else lineno + 1)
        raise InstanceParseError(at, f"expected {n} sensor lines, found {len(body)}")

    positions, data = [], []
    prev = 0.0
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 2:
            raise InstanceParseError(lineno, f"expected 'x Q', got {line!r}")
        try:
            x, q = float(parts[0]), float(parts[1])
        except ValueError:
            raise InstanceParseError(lineno, f"non-numeric value in {line!r}") from None
        if not x > prev:
            raise InstanceParseError(
                lineno, f"position {parts[0]} is not strictly above the previous one ({prev:g})")
        if not q > 0:
            raise InstanceParseError(lineno, f"data volume {parts[1]} must be positive")
        positions.append(x)
        data.append(q)
        prev = x
    try:
        return NetworkInstance(tuple(positions), tuple(data))
    except InvalidInstance as exc:
        raise InstanceParseError(body[0][0], str(exc)) from None


def serialize_instance(inst: NetworkInstance) -> str:
    rows = [str(inst.n)] + [f"{x!r} {q!r}" for x, q in zip(inst.positions, inst.data)]
    return "\n".join(rows) + "\n"


def load_instance(path: str | Path) -> NetworkInstance:
    return parse_instance(Path(path).read_text())
