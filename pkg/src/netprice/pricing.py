"""Revenue curves and price optimizers.

Revenue on each equilibrium segment is a quadratic in the sweep parameter, so
every optimizer here is exact: compare segment endpoints and interior
vertices.  Jumps in the pessimistic curve make the supremum unattained; such
results carry ``attained=False`` and the left-limit revenue.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    ONE,
    ZERO,
    GroupedInstance,
    Instance,
    PiecewiseEquilibrium,
    PricingOutcome,
    Side,
    evaluate,
    rat_vector,
    to_rat,
    validate_instance,
)
from .errors import EpsOutOfRange, GridTooLarge, ValidationError, ZeroBasePrice
from .linesweep import build_subproblem, pessimistic_sweep, sweep


@dataclass(frozen=True)
class RevenuePiece:
    """``R(p) = A p^2 + B p + C`` on one segment of the equilibrium."""

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    A: Fraction
    B: Fraction
    C: Fraction

    def __call__(self, p: Fraction) -> Fraction:
        return (self.A * p + self.B) * p + self.C


@dataclass(frozen=True)
class RevenueCurve:
    side: Side
    pieces: tuple

    def __call__(self, p) -> Fraction:
        return revenue_curve_at(self, to_rat(p))


def revenue_curve(pwl: PiecewiseEquilibrium, weights=None, offsets=None) -> RevenueCurve:
    """Revenue ``sum_i (w_i p + d_i) q_i(p)`` per segment.

    ``weights`` defaults to all ones and ``offsets`` to ``pwl.offsets``; the
    scaled family uses weights equal to the base prices.
    """
    n = pwl.n
    w = (ONE,) * n if weights is None else rat_vector(weights)
    d = (pwl.offsets or (ZERO,) * n) if offsets is None else rat_vector(offsets)
    pieces = []
    for seg in pwl.segments:
        A = sum((w[i] * seg.c1[i] for i in range(n)), ZERO)
        B = sum((w[i] * seg.c0[i] + d[i] * seg.c1[i] for i in range(n)), ZERO)
        C = sum((d[i] * seg.c0[i] for i in range(n)), ZERO)
        pieces.append(RevenuePiece(seg.lo, seg.hi, A, B, C))
    return RevenueCurve(pwl.side, tuple(pieces))


def revenue_curve_at(curve: RevenueCurve, p: Fraction) -> Fraction:
    for piece in curve.pieces:
        if _contains(curve.side, piece.lo, piece.hi, p):
            return piece(p)
    raise AssertionError("segments do not cover the real line")


def _contains(side: Side, lo, hi, p) -> bool:
    if side is Side.PESSIMISTIC:
        return (lo is None or lo <= p) and (hi is None or p < hi)
    return (lo is None or lo < p) and (hi is None or p <= hi)


def revenue_at(pwl: PiecewiseEquilibrium, offsets, p) -> Fraction:
    """Expected revenue ``sum_i (p + offsets_i) q_i(p)``."""
    p = to_rat(p)
    q = evaluate(pwl, p)
    d = (ZERO,) * len(q) if offsets is None else rat_vector(offsets)
    return sum(((p + d[i]) * q[i] for i in range(len(q))), ZERO)


@dataclass(frozen=True)
class _Candidate:
    revenue: Fraction
    price: Fraction
    attained: bool

    def beats(self, other: Optional["_Candidate"]) -> bool:
        if other is None:
            return True
        if self.revenue != other.revenue:
            return self.revenue > other.revenue
        if self.attained != other.attained:
            return self.attained
        return self.price < other.price


def maximize_curve(curve: RevenueCurve, floor: Fraction = ZERO) -> _Candidate:
    """Supremum of ``curve`` over ``p > floor``.

    Excluded interval ends contribute their one-sided limits with
    ``attained=False``.
    """
    pess = curve.side is Side.PESSIMISTIC
    best = None
    for piece in curve.pieces:
        lo, hi = piece.lo, piece.hi
        if hi is not None and hi <= floor:
            continue
        if hi is None and (piece.A > 0 or (piece.A == 0 and piece.B > 0)):
            raise ValidationError("revenue is unbounded above")
        if lo is None or lo <= floor:
            left, left_in = floor, False
        else:
            left, left_in = lo, pess
        cands = [_Candidate(piece(left), left, left_in)]
        if hi is not None:
            cands.append(_Candidate(piece(hi), hi, not pess))
        if piece.A < 0:
            v = -piece.B / (2 * piece.A)
            if left < v and (hi is None or v < hi):
                cands.append(_Candidate(piece(v), v, True))
        for c in cands:
            if c.beats(best):
                best = c
    return best


def optimal_uniform_price(pwl: PiecewiseEquilibrium) -> PricingOutcome:
    best = maximize_curve(revenue_curve(pwl, offsets=(ZERO,) * pwl.n))
    return PricingOutcome(best.price, best.revenue, best.attained)


def optimal_shifted(ginst: GroupedInstance, base: Sequence, side=Side.PESSIMISTIC) -> PricingOutcome:
    """Best price vector of the form ``base + x * 1`` with every price positive."""
    base = rat_vector(base)
    if len(base) != ginst.k:
        raise ValidationError(f"expected {ginst.k} base prices")
    if any(p < 0 for p in base):
        raise ValidationError("base prices must be nonnegative")
    offsets = ginst.offsets(base)
    pwl = sweep(ginst.instance, side, offsets)
    best = maximize_curve(revenue_curve(pwl, offsets=offsets))
    shift = best.price - min(base)
    return PricingOutcome(tuple(p + shift for p in base), best.revenue, best.attained)


def scaled_instance(ginst: GroupedInstance, base: Sequence) -> Instance:
    """Instance in units of each agent's base price (price ``xi`` for all)."""
    inst = ginst.instance
    beta = ginst.agent_prices(base)
    n = inst.n
    return Instance(
        [inst.a[i] / beta[i] for i in range(n)],
        [inst.b[i] / beta[i] for i in range(n)],
        [[inst.T[j][i] / beta[i] for i in range(n)] for j in range(n)],
    )


def optimal_scaled(ginst: GroupedInstance, base: Sequence, side=Side.PESSIMISTIC) -> PricingOutcome:
    """Best price vector of the form ``xi * base`` with ``xi > 0``."""
    base = rat_vector(base)
    if len(base) != ginst.k:
        raise ValidationError(f"expected {ginst.k} base prices")
    if any(p <= 0 for p in base):
        raise ZeroBasePrice("scaled family needs strictly positive base prices")
    pwl = sweep(scaled_instance(ginst, base), side)
    best = maximize_curve(revenue_curve(pwl, weights=ginst.agent_prices(base), offsets=(ZERO,) * pwl.n))
    return PricingOutcome(tuple(best.price * p for p in base), best.revenue, best.attained)


def group_revenue_bound(ginst: GroupedInstance, group: int) -> Fraction:
    """Best revenue from ``group`` when every other group gets the product free."""
    inst = ginst.instance
    members = [i for i in range(inst.n) if ginst.groups[i] == group]
    if not members:
        return ZERO
    others = [i for i in range(inst.n) if ginst.groups[i] != group]
    sub = build_subproblem(inst, others)[0] if others else inst
    return optimal_uniform_price(pessimistic_sweep(sub)).revenue


def fptas_grid(eps: Fraction, R: Fraction, k: int, n: int) -> list:
    """Per-group price grid ``{0} + {(1+eps)^j p_min : 0 <= j <= J}``."""
    p_min = eps * R / (2 * k * n)
    target = Fraction(2 * k * n) / eps
    J, power = 0, ONE
    while power < target:
        power *= 1 + eps
        J += 1
    return [ZERO] + [p_min * (1 + eps) ** j for j in range(J + 1)]


class _SweepCache:
    """Pessimistic sweeps keyed by per-agent offsets; grids reuse them heavily."""

    def __init__(self, ginst: GroupedInstance):
        self.ginst = ginst
        self.cache: dict = {}

    def sweep(self, offsets) -> PiecewiseEquilibrium:
        pwl = self.cache.get(offsets)
        if pwl is None:
            pwl = self.cache[offsets] = pessimistic_sweep(self.ginst.instance, offsets)
        return pwl

    def curve(self, group_prices) -> RevenueCurve:
        offsets = self.ginst.offsets(group_prices)
        return revenue_curve(self.sweep(offsets), offsets=offsets)

    def revenue(self, group_prices) -> Fraction:
        offsets = self.ginst.offsets(group_prices)
        return revenue_at(self.sweep(offsets), offsets, min(group_prices))


def _better(rev, vec, best) -> bool:
    return best is None or rev > best[0] or (rev == best[0] and vec < best[1])


def fptas(ginst: GroupedInstance, eps) -> PricingOutcome:
    """(1 - eps)-approximate revenue-optimal group prices (pessimistic side)."""
    eps = to_rat(eps)
    if not 0 < eps < 1:
        raise EpsOutOfRange("eps must lie strictly between 0 and 1")
    validate_instance(ginst.instance, require_nonneg_influence=True)
    k, n = ginst.k, ginst.instance.n
    R = sum((group_revenue_bound(ginst, g) for g in range(k)), ZERO)
    grid = fptas_grid(eps, R, k, n)
    cache = _SweepCache(ginst)
    best = None
    for vec in itertools.product(grid, repeat=k):
        rev = cache.revenue(vec)
        if _better(rev, vec, best):
            best = (rev, vec)
    return PricingOutcome(tuple(best[1]), best[0], True)


DEFAULT_GRID_CAP = 10**9


def grid_bruteforce_opt(ginst: GroupedInstance, lo, hi, step, cap: int = DEFAULT_GRID_CAP) -> PricingOutcome:
    """Best pessimistic revenue over the grid ``{lo + j*step}^k`` inside ``[lo, hi]``.

    Grid vectors sharing the same differences lie on one sweep; along it the
    revenue is piecewise quadratic, so each segment's best grid point is found
    next to its vertex or at its ends instead of by visiting every point.
    """
    lo, hi, step = to_rat(lo), to_rat(hi), to_rat(step)
    if not lo < hi or step <= 0:
        raise ValidationError("grid needs lo < hi and step > 0")
    if lo < 0:
        raise ValidationError("grid prices must be nonnegative")
    k = ginst.k
    J = math.floor((hi - lo) / step)
    if (J + 1) ** k > cap:
        raise GridTooLarge(f"{(J + 1) ** k} grid vectors exceed the cap of {cap}")
    cache = _SweepCache(ginst)
    best = None
    for pattern in _difference_patterns(J, k):
        top = J - max(pattern)
        diffs = tuple(step * d for d in pattern)
        curve = cache.curve(tuple(lo + d for d in diffs))
        for piece in curve.pieces:
            # Grid indices j with lo + j*step inside the piece's half-open range.
            j0 = 0 if piece.lo is None else max(0, math.ceil((piece.lo - lo) / step))
            j1 = top if piece.hi is None else min(top, math.ceil((piece.hi - lo) / step) - 1)
            if j0 > j1:
                continue
            js = {j0, j1}
            if piece.A < 0:
                v = (-piece.B / (2 * piece.A) - lo) / step
                for j in (math.floor(v), math.ceil(v)):
                    if j0 <= j <= j1:
                        js.add(j)
            for j in sorted(js):
                t = lo + j * step
                rev = piece(t)
                vec = tuple(t + d for d in diffs)
                if _better(rev, vec, best):
                    best = (rev, vec)
    return PricingOutcome(best[1], best[0], True)


def _difference_patterns(J: int, k: int):
    """Integer vectors in ``[0, J]^k`` whose minimum is 0, each once."""
    for z in range(k):
        for head in itertools.product(range(1, J + 1), repeat=z):
            for tail in itertools.product(range(J + 1), repeat=k - z - 1):
                yield head + (0,) + tail
