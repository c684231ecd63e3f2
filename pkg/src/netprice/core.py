"""Domain types for the network pricing game.

All numbers are :class:`fractions.Fraction`.  Agents are indexed from 0 inside
the library; the file format and CLI use 1-based indices.  The influence
matrix follows the convention ``T[j][i]`` = utility agent ``i`` receives from
agent ``j`` when both buy.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from .errors import (
    DegenerateInterval,
    DimensionMismatch,
    NegativeInfluence,
    NegativeLowerBound,
    SelfLoop,
    ValidationError,
)

Rat = Fraction
Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rat(value: Union[int, str, Rational, float, Decimal]) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings may be integers, ``num/den`` or finite decimals (``"0.125"`` is
    read as ``1/8``).  Floats go through their shortest ``repr`` so that
    ``0.1`` means one tenth rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational, Decimal)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def rat_vector(values: Iterable) -> tuple:
    return tuple(to_rat(v) for v in values)


def rat_matrix(rows: Iterable[Iterable]) -> tuple:
    return tuple(rat_vector(r) for r in rows)


def format_rat(x: Fraction) -> str:
    """``num/den``, or plain ``num`` for integers."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Instance:
    """A pricing game: value intervals ``[a_i, b_i]`` and influences ``T``.

    Construction validates everything except the sign of ``T``; use
    :func:`validate_instance` with ``require_nonneg_influence=True`` where the
    monotone theory is needed.
    """

    a: tuple
    b: tuple
    T: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", rat_vector(self.a))
        object.__setattr__(self, "b", rat_vector(self.b))
        object.__setattr__(self, "T", rat_matrix(self.T))
        validate_instance(self, require_nonneg_influence=False)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def has_negative_influence(self) -> bool:
        return any(w < 0 for row in self.T for w in row)

    def column_sums(self) -> tuple:
        """Total influence received by each agent, ``sum_j T[j][i]``."""
        n = self.n
        return tuple(sum((self.T[j][i] for j in range(n)), ZERO) for i in range(n))


def validate_instance(inst: Instance, require_nonneg_influence: bool = True) -> None:
    n = len(inst.a)
    if n < 1:
        raise DimensionMismatch("an instance needs at least one agent")
    if len(inst.b) != n:
        raise DimensionMismatch(f"a has {n} entries but b has {len(inst.b)}")
    if len(inst.T) != n or any(len(row) != n for row in inst.T):
        raise DimensionMismatch(f"influence matrix must be {n}x{n}")
    for i in range(n):
        if inst.a[i] < 0:
            raise NegativeLowerBound(f"agent {i + 1}: a = {format_rat(inst.a[i])} < 0")
        if inst.a[i] >= inst.b[i]:
            raise DegenerateInterval(
                f"agent {i + 1}: interval [{format_rat(inst.a[i])}, {format_rat(inst.b[i])}] is empty or a point"
            )
        if inst.T[i][i] != 0:
            raise SelfLoop(f"agent {i + 1} influences itself")
    if require_nonneg_influence:
        for j in range(n):
            for i in range(n):
                if inst.T[j][i] < 0:
                    raise NegativeInfluence(
                        f"influence from agent {j + 1} on agent {i + 1} is negative"
                    )


@dataclass(frozen=True)
class NormalizedInfluence:
    """``L[i][j] = T[j][i] / (b_i - a_i)`` and ``y_i = 1 / (b_i - a_i)``."""

    L: tuple
    y: tuple


def normalized_influence(inst: Instance) -> NormalizedInfluence:
    n = inst.n
    widths = [inst.b[i] - inst.a[i] for i in range(n)]
    L = tuple(tuple(inst.T[j][i] / widths[i] for j in range(n)) for i in range(n))
    y = tuple(ONE / w for w in widths)
    return NormalizedInfluence(L, y)


class Mark(enum.Enum):
    ZERO = "0"
    STAR = "*"
    ONE = "1"

    def __str__(self) -> str:
        return self.value


def structure_of(q: Sequence[Fraction]) -> tuple:
    out = []
    for v in q:
        if v == 0:
            out.append(Mark.ZERO)
        elif v == 1:
            out.append(Mark.ONE)
        elif 0 < v < 1:
            out.append(Mark.STAR)
        else:
            raise ValidationError(f"probability {v} outside [0, 1]")
    return tuple(out)


def structure_label(s: Sequence[Mark]) -> str:
    return "".join(m.value for m in s)


@dataclass(frozen=True)
class Partition:
    zero: frozenset
    working: frozenset
    one: frozenset


def partition_of(s: Sequence[Mark]) -> Partition:
    return Partition(
        frozenset(i for i, m in enumerate(s) if m is Mark.ZERO),
        frozenset(i for i, m in enumerate(s) if m is Mark.STAR),
        frozenset(i for i, m in enumerate(s) if m is Mark.ONE),
    )


class Side(enum.Enum):
    PESSIMISTIC = "pess"
    OPTIMISTIC = "opt"

    @classmethod
    def parse(cls, text: Union[str, "Side"]) -> "Side":
        if isinstance(text, Side):
            return text
        key = text.strip().lower()
        for side in cls:
            if key in (side.value, side.name.lower()):
                return side
        raise ValidationError(f"unknown side {text!r}")


@dataclass(frozen=True)
class AffineSegment:
    """``q(p) = c0 + c1 * p`` between two breakpoints.

    ``lo is None`` stands for minus infinity and ``hi is None`` for plus
    infinity.  Which endpoint is included depends on the owning
    :class:`PiecewiseEquilibrium`'s side.
    """

    lo: Union[Fraction, None]
    hi: Union[Fraction, None]
    c0: tuple
    c1: tuple

    def at(self, p: Fraction) -> tuple:
        return tuple(c + d * p for c, d in zip(self.c0, self.c1))

    def midpoint(self) -> Fraction:
        if self.lo is None and self.hi is None:
            return ZERO
        if self.lo is None:
            return self.hi - 1
        if self.hi is None:
            return self.lo + 1
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class PiecewiseEquilibrium:
    """An equilibrium as a function of the (sweep) price.

    Segments are listed top-down: ``segments[0]`` reaches ``+inf`` and
    ``segments[-1]`` reaches ``-inf``.  Pessimistic segments are closed below,
    ``[lo, hi)``; optimistic ones are closed above, ``(lo, hi]``.  ``offsets``
    records per-agent price shifts the curve was computed for.
    """

    side: Side
    segments: tuple
    offsets: tuple = ()
    pivoted: bool = False
    _keys: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # Ascending finite breakpoints, used for bisection.
        keys = tuple(seg.lo for seg in reversed(self.segments[:-1]))
        object.__setattr__(self, "_keys", keys)

    @property
    def n(self) -> int:
        return len(self.segments[0].c0)

    @property
    def breakpoints(self) -> tuple:
        """Finite breakpoints in descending order."""
        return tuple(reversed(self._keys))

    def segment_index(self, p: Fraction) -> int:
        if self.side is Side.PESSIMISTIC:
            pos = bisect.bisect_right(self._keys, p)
        else:
            pos = bisect.bisect_left(self._keys, p)
        return len(self.segments) - 1 - pos

    def segment_at(self, p) -> AffineSegment:
        return self.segments[self.segment_index(to_rat(p))]

    def __call__(self, p) -> tuple:
        return evaluate(self, p)


def evaluate(pwl: PiecewiseEquilibrium, p) -> tuple:
    p = to_rat(p)
    return pwl.segments[pwl.segment_index(p)].at(p)


@dataclass(frozen=True)
class GroupedInstance:
    """An instance with a fixed partition of agents into ``k`` price groups.

    ``groups[i]`` is the 0-based group id of agent ``i``.
    """

    instance: Instance
    k: int
    groups: tuple

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(int(g) for g in self.groups))
        if self.k < 1:
            raise ValidationError("group count k must be at least 1")
        if len(self.groups) != self.instance.n:
            raise DimensionMismatch("every agent needs exactly one group")
        for i, g in enumerate(self.groups):
            if not 0 <= g < self.k:
                raise ValidationError(f"agent {i + 1}: group {g + 1} outside 1..{self.k}")

    @classmethod
    def single(cls, inst: Instance) -> "GroupedInstance":
        return cls(inst, 1, (0,) * inst.n)

    def agent_prices(self, group_prices: Sequence) -> tuple:
        group_prices = rat_vector(group_prices)
        if len(group_prices) != self.k:
            raise DimensionMismatch(f"expected {self.k} group prices, got {len(group_prices)}")
        return tuple(group_prices[g] for g in self.groups)

    def offsets(self, group_prices: Sequence) -> tuple:
        """Per-agent shifts above the cheapest group price."""
        group_prices = rat_vector(group_prices)
        base = min(group_prices)
        return tuple(group_prices[g] - base for g in self.groups)


@dataclass(frozen=True)
class PricingOutcome:
    """Best price (scalar or per-group vector), its revenue, and whether the
    revenue is actually attained there or only approached from below."""

    price: Union[Fraction, tuple]
    revenue: Fraction
    attained: bool = True


def agent_utility(decisions: Sequence[int], i: int, v_i, p, inst: Instance) -> Fraction:
    if len(decisions) != inst.n:
        raise DimensionMismatch("decision vector length must equal n")
    if not decisions[i]:
        return ZERO
    bonus = sum((inst.T[j][i] for j in range(inst.n) if decisions[j]), ZERO)
    return to_rat(v_i) - to_rat(p) + bonus
