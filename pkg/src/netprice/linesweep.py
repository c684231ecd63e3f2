"""Exact line sweep for the pessimistic and optimistic equilibria.

The pessimistic equilibrium is traced from ``p = +inf`` downwards.  Between
events the working set ``W`` (agents strictly between 0 and 1) moves along
``(I - L_WW)^{-1} y_W``; an event fires when a zero agent's best response
reaches 0 or a working agent's reaches 1.  When ``rho(L_WW) >= 1`` the curve
jumps: a pivot agent that is certain to buy below the current price is found
from a quasi-eigenvector, locked at 1, and the sweep restarts on the smaller
instance whose intervals absorb the locked agents' influence.

The optimistic equilibrium is the pessimistic equilibrium of the reflected
game ``q -> 1 - q``, ``p -> -p``; running the same sweep on that game is the
upward sweep that locks agents at 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from gmpy2 import mpq

from .core import (
    ONE,
    ZERO,
    AffineSegment,
    GroupedInstance,
    Instance,
    Partition,
    PiecewiseEquilibrium,
    Side,
    evaluate,
    rat_vector,
    validate_instance,
)
from .errors import DimensionMismatch, InternalInvariantViolation, ValidationError
from .linalg import inverse_of_i_minus, matvec, solve_linear, submatrix


@dataclass(frozen=True)
class SweepState:
    """Snapshot of the sweep at threshold price ``p`` after the event updates.

    ``value[i] = [x + L q]_i`` is agent ``i``'s unclipped best response at
    ``p``; ``q`` is the equilibrium there.
    """

    t: int
    p: Fraction
    q: tuple
    partition: Partition
    value: tuple
    y: tuple


@dataclass(frozen=True)
class PivotCertificate:
    W1: tuple
    W2: tuple
    u: tuple
    k: int

    @property
    def w(self) -> int:
        return self.W2[-1]


def find_pivot(state: SweepState, L: Sequence[Sequence[Fraction]]) -> PivotCertificate:
    """Pick an agent that buys with certainty just below ``state.p``.

    Working agents are added in ascending index order until the spectral gate
    fails on the prefix ``W2 = W1 + [w]``.  The quasi-eigenvector is
    ``u_W1 = (I - L_W1W1)^{-1} L_W1,w`` with ``u_w = 1``; the pivot minimises
    ``(1 - q_k) / u_k`` over ``u_k != 0`` (smallest index on ties).
    """
    order = sorted(state.partition.working)
    n = len(state.q)
    for size in range(2, len(order) + 1):
        W2 = order[:size]
        if inverse_of_i_minus(submatrix(L, W2, W2)) is not None:
            continue
        W1, w = W2[:-1], W2[-1]
        inv1 = inverse_of_i_minus(submatrix(L, W1, W1))
        if inv1 is None:
            raise InternalInvariantViolation("gate failed on a prefix that passed before")
        u = [ZERO] * n
        for idx, val in zip(W1, matvec(inv1, [L[i][w] for i in W1])):
            u[idx] = val
        u[w] = ONE
        best_k, best = None, None
        for idx in W2:
            if u[idx] == 0:
                continue
            if u[idx] < 0:
                raise InternalInvariantViolation("quasi-eigenvector has a negative entry")
            ratio = (1 - state.q[idx]) / u[idx]
            if best is None or ratio < best:
                best_k, best = idx, ratio
        return PivotCertificate(tuple(W1), tuple(W2), tuple(u), best_k)
    raise InternalInvariantViolation("no prefix of the working set fails the spectral gate")


def _shifted(a, b, T, active, locked):
    """Intervals of ``active`` agents once every ``locked`` agent buys for sure."""
    a2, b2 = [], []
    for i in active:
        shift = sum((T[j][i] for j in locked), a[i] * 0)
        a2.append(a[i] + shift)
        b2.append(b[i] + shift)
    return a2, b2


def build_subproblem(inst: Instance, locked: Sequence[int]):
    """Instance on the agents outside ``locked`` with intervals shifted by the
    locked agents' influence.  Returns ``(sub_instance, mapping)`` where
    ``mapping[s]`` is the original index of sub-agent ``s``.
    """
    locked = sorted(set(locked))
    if not locked or len(locked) >= inst.n:
        raise ValidationError("locked set must be a nonempty proper subset of the agents")
    active = [i for i in range(inst.n) if i not in set(locked)]
    a2, b2 = _shifted(inst.a, inst.b, inst.T, active, locked)
    T2 = [[inst.T[j][i] for i in active] for j in active]
    return Instance(a2, b2, T2), tuple(active)


class _SegmentSink:
    """Collects segments in original coordinates, clipped below a ceiling."""

    def __init__(self, n: int):
        self.n = n
        self.segments: list = []
        self.ceiling: Optional[Fraction] = None
        self.active: list = list(range(n))
        self.locked: set = set()

    def emit(self, lo, hi, c0_local, c1_local):
        if self.ceiling is not None:
            if lo is not None and lo >= self.ceiling:
                return
            if hi is None or hi > self.ceiling:
                hi = self.ceiling
        c0 = [ONE if i in self.locked else ZERO for i in range(self.n)]
        c1 = [ZERO] * self.n
        for s, i in enumerate(self.active):
            c0[i] = c0_local[s]
            c1[i] = c1_local[s]
        self.segments.append(AffineSegment(lo, hi, tuple(c0), tuple(c1)))


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise InternalInvariantViolation(message)


def _pessimistic_segments(a, b, T, diag_dominant: bool = False):
    """Core downward sweep on raw interval data (any sign of ``a``, ``b``).

    Returns ``(segments, pivoted)`` with segments top-down.  Arithmetic runs
    on GMP rationals and is converted back to ``Fraction`` on the way out.
    """
    a = [mpq(x) for x in a]
    b = [mpq(x) for x in b]
    T = [[mpq(x) for x in row] for row in T]
    segments, pivoted = _sweep_loop(a, b, T, diag_dominant)
    return [_as_fraction_segment(seg) for seg in segments], pivoted


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _as_fraction_segment(seg: AffineSegment) -> AffineSegment:
    return AffineSegment(
        None if seg.lo is None else _frac(seg.lo),
        None if seg.hi is None else _frac(seg.hi),
        tuple(map(_frac, seg.c0)),
        tuple(map(_frac, seg.c1)),
    )


def _sweep_loop(a, b, T, diag_dominant):
    MZERO, MONE = mpq(0), mpq(1)
    n0 = len(a)
    sink = _SegmentSink(n0)
    pivoted = False
    t = 0
    while True:
        active = sink.active
        m = len(active)
        A, B = _shifted(a, b, T, active, sorted(sink.locked))
        width = [B[s] - A[s] for s in range(m)]
        y = [MONE / w for w in width]
        L = [[T[active[j]][active[i]] / width[i] for j in range(m)] for i in range(m)]
        nbrs = [[(j, L[i][j]) for j in range(m) if L[i][j]] for i in range(m)]

        p = max(B)
        q = [MZERO] * m
        sink.emit(p, None, q, [MZERO] * m)
        Z, W, O = set(range(m)), set(), set()

        while True:
            t += 1
            value = []
            for i in range(m):
                v = (B[i] - p) / width[i]
                for j, lij in nbrs[i]:
                    if q[j]:
                        v += lij * q[j]
                value.append(v)

            # Event updates at the threshold price.
            for i in sorted(Z):
                _check(value[i] <= 0, f"zero-set agent has positive best response at p={p}")
                if value[i] == 0:
                    Z.discard(i)
                    W.add(i)
            for i in sorted(W):
                _check(0 <= value[i] <= 1, f"working agent outside [0,1] at p={p}")
                if value[i] == 1:
                    W.discard(i)
                    O.add(i)
            for i in O:
                _check(value[i] >= 1, f"one-set agent best response below 1 at p={p}")

            if not Z and not W:
                sink.emit(None, p, [MONE] * m, [MZERO] * m)
                return sink.segments, pivoted

            Ws = sorted(W)
            inv = inverse_of_i_minus(submatrix(L, Ws, Ws)) if Ws else []
            if inv is not None:
                ell = [MZERO] * m
                for s, v in zip(Ws, matvec(inv, [y[i] for i in Ws])):
                    ell[s] = v
                for i in Z:
                    ell[i] = y[i] + sum((L[i][j] * ell[j] for j in Ws if L[i][j]), MZERO)
                for i in Z | W:
                    _check(ell[i] > 0, "sweep direction is not strictly positive")
                eps = min(
                    [-value[i] / ell[i] for i in Z] + [(1 - value[i]) / ell[i] for i in Ws]
                )
                _check(eps > 0, "next event is not strictly below the current price")
                new_p = p - eps
                c0 = [MONE if i in O else MZERO for i in range(m)]
                c1 = [MZERO] * m
                for i in Ws:
                    c1[i] = -ell[i]
                    c0[i] = value[i] + p * ell[i]
                sink.emit(new_p, p, c0, c1)
                for i in Ws:
                    q[i] = value[i] + eps * ell[i]
                for i in O:
                    q[i] = MONE
                p = new_p
                continue

            # Equilibrium jump: lock a pivot and restart on the subproblem.
            _check(len(Ws) >= 2, "spectral gate failed on a single agent")
            _check(not diag_dominant, "diagonal-dominant instance reached the pivot branch")
            state = SweepState(
                t,
                p,
                tuple(value[i] if i in W else (MONE if i in O else MZERO) for i in range(m)),
                Partition(frozenset(Z), frozenset(W), frozenset(O)),
                tuple(value),
                tuple(y),
            )
            cert = find_pivot(state, L)
            pivoted = True
            newly = {active[i] for i in O} | {active[cert.k]}
            sink.locked |= newly
            sink.active = [i for i in active if i not in newly]
            sink.ceiling = p if sink.ceiling is None else min(sink.ceiling, p)
            break


def _mirror(a, b, T):
    """Intervals of the reflected game ``q -> 1 - q``, ``p -> -p``."""
    n = len(a)
    col = [sum((T[j][i] for j in range(n)), ZERO) for i in range(n)]
    return [-b[i] - col[i] for i in range(n)], [-a[i] - col[i] for i in range(n)]


def _prepare(inst: Instance, offsets):
    validate_instance(inst, require_nonneg_influence=True)
    n = inst.n
    offsets = (ZERO,) * n if offsets is None else rat_vector(offsets)
    if len(offsets) != n:
        raise DimensionMismatch(f"expected {n} offsets, got {len(offsets)}")
    if any(d < 0 for d in offsets):
        raise ValidationError("price offsets must be nonnegative")
    a = [inst.a[i] - offsets[i] for i in range(n)]
    b = [inst.b[i] - offsets[i] for i in range(n)]
    L_rows = [sum((inst.T[j][i] for j in range(n)), ZERO) / (inst.b[i] - inst.a[i]) for i in range(n)]
    dd = all(r < 1 for r in L_rows)
    return a, b, offsets, dd


def pessimistic_sweep(inst: Instance, offsets: Optional[Sequence] = None) -> PiecewiseEquilibrium:
    """Pessimistic equilibrium when agent ``i`` pays ``p + offsets[i]``, as a
    piecewise-affine function of ``p``."""
    a, b, offsets, dd = _prepare(inst, offsets)
    segments, pivoted = _pessimistic_segments(a, b, inst.T, dd)
    return PiecewiseEquilibrium(Side.PESSIMISTIC, tuple(segments), offsets, pivoted)


def optimistic_sweep(inst: Instance, offsets: Optional[Sequence] = None) -> PiecewiseEquilibrium:
    a, b, offsets, dd = _prepare(inst, offsets)
    ma, mb = _mirror(a, b, inst.T)
    mirrored, pivoted = _pessimistic_segments(ma, mb, inst.T, dd)
    segments = []
    for seg in reversed(mirrored):
        segments.append(
            AffineSegment(
                None if seg.hi is None else -seg.hi,
                None if seg.lo is None else -seg.lo,
                tuple(1 - c for c in seg.c0),
                seg.c1,
            )
        )
    return PiecewiseEquilibrium(Side.OPTIMISTIC, tuple(segments), offsets, pivoted)


def sweep(inst: Instance, side=Side.PESSIMISTIC, offsets: Optional[Sequence] = None) -> PiecewiseEquilibrium:
    side = Side.parse(side)
    if side is Side.PESSIMISTIC:
        return pessimistic_sweep(inst, offsets)
    return optimistic_sweep(inst, offsets)


def equilibrium_at_price_vector(ginst: GroupedInstance, prices: Sequence, side=Side.PESSIMISTIC) -> tuple:
    """Extremal equilibrium under per-group prices, via one offset sweep."""
    prices = rat_vector(prices)
    if len(prices) != ginst.k:
        raise DimensionMismatch(f"expected {ginst.k} prices, got {len(prices)}")
    if any(p < 0 for p in prices):
        raise ValidationError("prices must be nonnegative")
    pwl = sweep(ginst.instance, side, ginst.offsets(prices))
    return evaluate(pwl, min(prices))
