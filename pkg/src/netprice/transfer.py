"""Best-response (transfer) map, fixed-point iteration and equilibrium checks.

Unlike the sweep, nothing here requires nonnegative influences.  ``prices``
is either a single rational (uniform pricing) or one rational per agent.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

from .core import ONE, ZERO, GroupedInstance, Instance, rat_vector, to_rat
from .errors import DimensionMismatch, ValidationError

DEFAULT_TOL = Fraction(1, 10**9)

Prices = Union[Fraction, int, str, Sequence]


def agent_price_vector(inst: Instance, prices: Prices) -> tuple:
    """Expand a uniform price to one entry per agent."""
    if isinstance(prices, (list, tuple)):
        vec = rat_vector(prices)
        if len(vec) != inst.n:
            raise DimensionMismatch(f"expected {inst.n} agent prices, got {len(vec)}")
        return vec
    return (to_rat(prices),) * inst.n


def group_price_vector(ginst: GroupedInstance, group_prices: Sequence) -> tuple:
    return ginst.agent_prices(group_prices)


def _med01(x):
    if x <= 0:
        return ZERO if isinstance(x, Fraction) else 0.0
    if x >= 1:
        return ONE if isinstance(x, Fraction) else 1.0
    return x


def g_value(inst: Instance, prices: Prices, q: Sequence) -> tuple:
    """Unclipped best-response probabilities ``(b_i - p_i + sum_j T[j][i] q_j) / (b_i - a_i)``."""
    n = inst.n
    if len(q) != n:
        raise DimensionMismatch(f"q has {len(q)} entries, expected {n}")
    p = agent_price_vector(inst, prices)
    q = rat_vector(q)
    T = inst.T
    out = []
    for i in range(n):
        s = inst.b[i] - p[i]
        for j in range(n):
            w = T[j][i]
            if w and q[j]:
                s += w * q[j]
        out.append(s / (inst.b[i] - inst.a[i]))
    return tuple(out)


def transfer(inst: Instance, prices: Prices, q: Sequence) -> tuple:
    return tuple(_med01(v) for v in g_value(inst, prices, q))


class _FloatTransfer:
    """Double-precision twin of :func:`transfer` for long oracle runs."""

    def __init__(self, inst: Instance, prices: Prices):
        n = inst.n
        p = agent_price_vector(inst, prices)
        self.n = n
        self.base = [float((inst.b[i] - p[i]) / (inst.b[i] - inst.a[i])) for i in range(n)]
        self.cols = [
            [(j, float(inst.T[j][i] / (inst.b[i] - inst.a[i]))) for j in range(n) if inst.T[j][i]]
            for i in range(n)
        ]

    def __call__(self, q):
        out = []
        for i in range(self.n):
            s = self.base[i]
            for j, w in self.cols[i]:
                s += w * q[j]
            out.append(0.0 if s <= 0.0 else 1.0 if s >= 1.0 else s)
        return out


def iterate_fixed_point(
    inst: Instance,
    prices: Prices,
    start: Union[str, Sequence] = "zero",
    max_iters: int = 10_000,
    tol=DEFAULT_TOL,
    exact: bool = True,
):
    """Apply the transfer map repeatedly from ``start``.

    Returns ``(q, converged, iters)`` where ``q`` is the ``iters``-th iterate.
    The run stops at the first iterate whose image moves by at most ``tol`` in
    max-norm (``converged=True``) or after ``max_iters`` applications.  With
    ``tol=0`` and exact arithmetic, ``max_iters=m`` returns exactly
    ``f^m(start)`` unless a fixed point is hit earlier.

    ``exact=False`` runs in floats; use it for long runs where exact
    denominators would grow without bound.
    """
    n = inst.n
    if isinstance(start, str):
        if start not in ("zero", "one"):
            raise ValidationError(f"start must be 'zero', 'one' or a vector, not {start!r}")
        q = [ZERO if start == "zero" else ONE] * n
    else:
        q = list(rat_vector(start))
        if len(q) != n:
            raise DimensionMismatch("start vector has the wrong length")
    tol = to_rat(tol)
    if exact:
        step = lambda v: list(transfer(inst, prices, v))  # noqa: E731
    else:
        step = _FloatTransfer(inst, prices)
        q = [float(v) for v in q]
        tol = float(tol)
    for m in range(max_iters + 1):
        nxt = step(q)
        change = max((abs(u - v) for u, v in zip(nxt, q)), default=0)
        if change <= tol:
            return tuple(q), True, m
        if m == max_iters:
            break
        q = nxt
    return tuple(q), False, max_iters


def is_equilibrium_exact(inst: Instance, prices: Prices, q: Sequence) -> bool:
    q = rat_vector(q)
    return transfer(inst, prices, q) == q


def is_eps_approx_equilibrium(inst: Instance, prices: Prices, q: Sequence, eps) -> bool:
    eps = to_rat(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    q = rat_vector(q)
    image = transfer(inst, prices, q)
    return all(abs(u - v) < eps for u, v in zip(q, image))
