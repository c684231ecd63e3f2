"""The ``netprice v1`` instance format and deterministic result output.

Format (one directive per line, ``#`` starts a comment)::

    netprice v1
    agents <n>
    groups <k>               # optional, default 1
    agent <i> <g> <a> <b>    # 1-based agent index, 1-based group id
    edge <j> <i> <w>         # T[j][i] = w: influence FROM j ON i

Numbers are exact: ``3``, ``-2/7`` or finite decimals such as ``0.125``.
Edges that are not listed are zero.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Union

from .core import (
    GroupedInstance,
    Instance,
    PiecewiseEquilibrium,
    PricingOutcome,
    format_rat,
    structure_label,
    structure_of,
    to_rat,
)
from .errors import ValidationError

HEADER = "netprice v1"
EDGE_NOTE = "# edge j i w: influence FROM agent j ON agent i"


class FormatError(ValidationError):
    """Malformed instance text; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateAgent(FormatError):
    pass


class DuplicateEdge(FormatError):
    pass


class UnknownAgentRef(FormatError):
    pass


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(lineno, f"expected an integer, got {token!r}") from None


def _rat(token: str, lineno: int) -> Fraction:
    try:
        return to_rat(token)
    except (ValidationError, TypeError):
        raise FormatError(lineno, f"expected an exact rational, got {token!r}") from None


def parse_instance(text: str) -> GroupedInstance:
    n = None
    k = 1
    seen_header = False
    agents: dict = {}
    edges: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not seen_header:
            if tok != ["netprice", "v1"]:
                raise FormatError(lineno, f"expected header {HEADER!r}")
            seen_header = True
            continue
        head = tok[0]
        if head == "agents" and len(tok) == 2:
            if n is not None:
                raise FormatError(lineno, "agent count given twice")
            n = _int(tok[1], lineno)
            if n < 1:
                raise FormatError(lineno, "agent count must be positive")
        elif head == "groups" and len(tok) == 2:
            k = _int(tok[1], lineno)
            if k < 1:
                raise FormatError(lineno, "group count must be positive")
        elif head == "agent" and len(tok) == 5:
            if n is None:
                raise FormatError(lineno, "'agents' must precede agent lines")
            i, g = _int(tok[1], lineno), _int(tok[2], lineno)
            if not 1 <= i <= n:
                raise UnknownAgentRef(lineno, f"agent {i} outside 1..{n}")
            if i in agents:
                raise DuplicateAgent(lineno, f"agent {i} defined twice")
            agents[i] = (g, _rat(tok[3], lineno), _rat(tok[4], lineno), lineno)
        elif head == "edge" and len(tok) == 4:
            if n is None:
                raise FormatError(lineno, "'agents' must precede edge lines")
            j, i = _int(tok[1], lineno), _int(tok[2], lineno)
            for ref in (j, i):
                if not 1 <= ref <= n:
                    raise UnknownAgentRef(lineno, f"agent {ref} outside 1..{n}")
            if (j, i) in edges:
                raise DuplicateEdge(lineno, f"edge {j} -> {i} given twice")
            edges[(j, i)] = _rat(tok[3], lineno)
        else:
            raise FormatError(lineno, f"cannot parse {line!r}")
    if not seen_header:
        raise FormatError(1, f"missing header {HEADER!r}")
    if n is None:
        raise FormatError(1, "missing 'agents' line")
    missing = [i for i in range(1, n + 1) if i not in agents]
    if missing:
        raise UnknownAgentRef(1, f"no agent line for agent {missing[0]}")
    for i, (g, _, _, lineno) in agents.items():
        if not 1 <= g <= k:
            raise FormatError(lineno, f"group {g} outside 1..{k}")
    T = [[Fraction(0)] * n for _ in range(n)]
    for (j, i), w in edges.items():
        T[j - 1][i - 1] = w
    inst = Instance(
        [agents[i][1] for i in range(1, n + 1)],
        [agents[i][2] for i in range(1, n + 1)],
        T,
    )
    return GroupedInstance(inst, k, tuple(agents[i][0] - 1 for i in range(1, n + 1)))


def serialize_instance(obj: Union[Instance, GroupedInstance]) -> str:
    """Canonical text: every agent listed, nonzero edges sorted by (j, i)."""
    ginst = obj if isinstance(obj, GroupedInstance) else GroupedInstance.single(obj)
    inst = ginst.instance
    lines = [HEADER, EDGE_NOTE, f"agents {inst.n}", f"groups {ginst.k}"]
    for i in range(inst.n):
        lines.append(
            f"agent {i + 1} {ginst.groups[i] + 1} {format_rat(inst.a[i])} {format_rat(inst.b[i])}"
        )
    for j in range(inst.n):
        for i in range(inst.n):
            if inst.T[j][i]:
                lines.append(f"edge {j + 1} {i + 1} {format_rat(inst.T[j][i])}")
    return "\n".join(lines) + "\n"


def parse_probvec(text: str) -> tuple:
    """Read ``q = [1/2, 1/4]``, a bare bracketed list, or whitespace/comma
    separated rationals."""
    body = text.strip()
    if body.startswith("{"):
        data = json.loads(body)
        return tuple(to_rat(v) for v in data["q"])
    if "=" in body:
        body = body.split("=", 1)[1]
    body = body.strip().strip("[]")
    tokens = [t for t in body.replace(",", " ").split() if t]
    if not tokens:
        raise ValidationError("empty probability vector")
    q = tuple(to_rat(t) for t in tokens)
    if any(not 0 <= v <= 1 for v in q):
        raise ValidationError("probabilities must lie in [0, 1]")
    return q


def _vec(values) -> str:
    return "[" + ", ".join(format_rat(v) for v in values) + "]"


def _machine_rat(x):
    return None if x is None else f"{x.numerator}/{x.denominator}"


def _interval(pwl: PiecewiseEquilibrium, seg) -> str:
    lo = "-inf" if seg.lo is None else format_rat(seg.lo)
    hi = "+inf" if seg.hi is None else format_rat(seg.hi)
    if pwl.side.value == "pess":
        return f"[{lo}, {hi})" if seg.lo is not None else f"({lo}, {hi})"
    return f"({lo}, {hi}]" if seg.hi is not None else f"({lo}, {hi})"


def _pwl_text(pwl: PiecewiseEquilibrium) -> str:
    side = "pessimistic" if pwl.side.value == "pess" else "optimistic"
    lines = [f"{side} equilibrium: {len(pwl.segments)} segments"]
    if any(pwl.offsets):
        lines.append(f"offsets = {_vec(pwl.offsets)}")
    segs = pwl.segments
    for idx, seg in enumerate(segs):
        mid = seg.midpoint()
        lines.append(f"segment {idx + 1} p in {_interval(pwl, seg)} structure {structure_label(structure_of(seg.at(mid)))}")
        for i, (c0, c1) in enumerate(zip(seg.c0, seg.c1)):
            lines.append(f"  q{i + 1} = {format_rat(c0)} + ({format_rat(c1)})*p")
        if idx + 1 < len(segs):
            t = seg.lo
            above, below = seg.at(t), segs[idx + 1].at(t)
            marker = " jump" if above != below else ""
            lines.append(f"breakpoint {format_rat(t)}{marker}")
    return "\n".join(lines) + "\n"


def _pwl_machine(pwl: PiecewiseEquilibrium) -> dict:
    segs = pwl.segments
    out = []
    for idx, seg in enumerate(segs):
        out.append(
            {
                "lo": _machine_rat(seg.lo),
                "hi": _machine_rat(seg.hi),
                "c0": [_machine_rat(c) for c in seg.c0],
                "c1": [_machine_rat(c) for c in seg.c1],
                "structure": structure_label(structure_of(seg.at(seg.midpoint()))),
                "jump_at_lo": seg.lo is not None and seg.at(seg.lo) != segs[idx + 1].at(seg.lo),
            }
        )
    return {
        "kind": "piecewise",
        "side": pwl.side.value,
        "offsets": [_machine_rat(d) for d in pwl.offsets],
        "pivoted": pwl.pivoted,
        "segments": out,
    }


def _price_text(price) -> str:
    return _vec(price) if isinstance(price, tuple) else format_rat(price)


def serialize_equilibrium(obj, fmt: str = "text") -> str:
    """Render a piecewise equilibrium, a probability vector or a pricing
    outcome.  ``fmt='machine'`` gives sorted-key JSON."""
    if fmt not in ("text", "machine"):
        raise ValidationError(f"unknown output format {fmt!r}")
    machine = fmt == "machine"
    if isinstance(obj, PiecewiseEquilibrium):
        if machine:
            return json.dumps(_pwl_machine(obj), sort_keys=True) + "\n"
        return _pwl_text(obj)
    if isinstance(obj, PricingOutcome):
        if machine:
            price = obj.price
            doc = {
                "kind": "pricing",
                "price": [_machine_rat(p) for p in price] if isinstance(price, tuple) else _machine_rat(price),
                "revenue": _machine_rat(obj.revenue),
                "attained": obj.attained,
            }
            return json.dumps(doc, sort_keys=True) + "\n"
        attained = "yes" if obj.attained else "no (supremum at left limit)"
        return (
            f"price = {_price_text(obj.price)}\n"
            f"revenue = {format_rat(obj.revenue)}\n"
            f"attained: {attained}\n"
        )
    q = tuple(to_rat(v) for v in obj)
    if machine:
        return json.dumps({"kind": "probvec", "q": [_machine_rat(v) for v in q]}, sort_keys=True) + "\n"
    return f"q = {_vec(q)}\n"
