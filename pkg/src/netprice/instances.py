"""Generators for named instance families, random test instances and the
bimatrix-game gadget with negative influences.

Generated instances are 0-indexed; docstrings use the 1-based agent numbers
the families are usually described with.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import ZERO, GroupedInstance, Instance, rat_matrix, to_rat
from .errors import DegenerateExtraction, DeltaOutOfRange, DimensionMismatch, ValidationError

HALF = Fraction(1, 2)
EXPSTRUCT_HALF_WIDTH = Fraction(1, 2**20)


def gen_counterexample(n: int) -> Instance:
    """Chain on which plain best-response iteration needs ``~2^n`` steps at ``p = 1``.

    Agent 1 values in ``[0, 2]``, the rest in ``[0, 1]``; agent ``i`` pushes
    ``i + 1`` with weight 1/2 along the chain and the last two agents push
    each other with weight 1.
    """
    if n < 3:
        raise ValidationError("the counterexample family needs n >= 3")
    a = [0] * n
    b = [2] + [1] * (n - 1)
    T = [[ZERO] * n for _ in range(n)]
    for i in range(n - 2):
        T[i][i + 1] = HALF
    T[n - 2][n - 1] = T[n - 1][n - 2] = Fraction(1)
    return Instance(a, b, T)


def gen_jump() -> Instance:
    """Two unit-interval agents with mutual influence 2; the pessimistic
    equilibrium drops from (1, 1) to (0, 0) at ``p = 1``."""
    return Instance([0, 0], [1, 1], [[0, 2], [2, 0]])


def _pow2_ceil_half(j: int) -> Fraction:
    """``2^ceil(j/2 - 1)`` for a 1-based index ``j``."""
    return Fraction(2) ** math.ceil(Fraction(j, 2) - 1)


def gen_expstruct(n: int, half_width: Fraction = EXPSTRUCT_HALF_WIDTH) -> GroupedInstance:
    """Two-price family whose pessimistic structure count grows like ``2^(n/2)``.

    Odd agents form group 1 and even agents group 2.  Agent ``j`` influences
    each earlier agent ``i`` at odd distance with weight ``2^ceil(j/2-1)``,
    except its own pair partner (``j`` even, ``i = j - 1``).  Values are the
    fixed numbers ``2^ceil(i/2-1)``, widened to ``[v - h, v + h]`` because
    point intervals are not supported.
    """
    if n < 2 or n % 2:
        raise ValidationError("expstruct needs an even n >= 2")
    half_width = to_rat(half_width)
    T = [[ZERO] * n for _ in range(n)]
    for j in range(1, n + 1):
        for i in range(1, j):
            if (j - i) % 2 == 1 and not (j % 2 == 0 and i == j - 1):
                T[j - 1][i - 1] = _pow2_ceil_half(j)
    values = [_pow2_ceil_half(i) for i in range(1, n + 1)]
    inst = Instance([v - half_width for v in values], [v + half_width for v in values], T)
    return GroupedInstance(inst, 2, tuple((i - 1) % 2 for i in range(1, n + 1)))


def gen_random(
    n: int,
    edge_density,
    seed: int,
    enforce_diag_dominant: bool = False,
    max_value=10,
) -> Instance:
    """Seeded random instance with quarter-unit rational data.

    Endpoints satisfy ``0 <= a < b <= max_value``.  Each ordered pair gets an
    edge with probability ``edge_density``.  With ``enforce_diag_dominant``
    every agent's incoming influence is scaled so that its normalized row sum
    is at most 9/10.
    """
    if n < 1:
        raise ValidationError("n must be positive")
    density = float(edge_density)
    if not 0 <= density <= 1:
        raise ValidationError("edge density must lie in [0, 1]")
    rng = random.Random(seed)
    top = int(to_rat(max_value) * 4)
    if top < 1:
        raise ValidationError("max_value must be at least 1/4")
    a, b = [], []
    for _ in range(n):
        lo = rng.randint(0, top - 1)
        hi = rng.randint(lo + 1, top)
        a.append(Fraction(lo, 4))
        b.append(Fraction(hi, 4))
    T = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            if i != j and rng.random() < density:
                T[j][i] = Fraction(rng.randint(1, top), 4)
    if enforce_diag_dominant:
        cap = Fraction(9, 10)
        for i in range(n):
            row = sum((T[j][i] for j in range(n)), ZERO) / (b[i] - a[i])
            if row > cap:
                scale = cap / row
                for j in range(n):
                    T[j][i] *= scale
    return Instance(a, b, T)


@dataclass(frozen=True)
class BimatrixGame:
    """Square two-player game; ``A[i][j]`` is the row player's payoff for
    strategies ``(i, j)``.  Entries lie in ``[-1, 1]``."""

    A: tuple
    B: tuple

    def __post_init__(self):
        object.__setattr__(self, "A", rat_matrix(self.A))
        object.__setattr__(self, "B", rat_matrix(self.B))
        n = len(self.A)
        for M in (self.A, self.B):
            if len(M) != n or any(len(row) != n for row in M):
                raise DimensionMismatch("payoff matrices must be square and equal-sized")
            if any(not -1 <= x <= 1 for row in M for x in row):
                raise ValidationError("payoffs must lie in [-1, 1]")

    @property
    def n(self) -> int:
        return len(self.A)


@dataclass(frozen=True)
class PPADRoles:
    """Agent indices of the gadget: ``X[i]``, ``Y[i]``, ``U[i][j]``, ``V[i][j]``."""

    n: int
    X: tuple
    Y: tuple
    U: tuple
    V: tuple
    price: Fraction = HALF


def gen_ppad(game: BimatrixGame, delta) -> tuple:
    """Pricing instance (negative influences, price 1/2) whose approximate
    equilibria encode approximate Nash equilibria of ``game``.

    Returns ``(instance, roles)``.  ``U[i][j]`` reads player 2's mix through
    edges ``Y_k -> U_ij`` of weight ``A[j][k] - A[i][k]`` and, once it buys,
    suppresses ``X_i`` with weight -1; ``V`` mirrors this for player 2.
    """
    delta = to_rat(delta)
    if not 0 < delta < HALF:
        raise DeltaOutOfRange("delta must lie in (0, 1/2)")
    m = game.n
    X = tuple(range(m))
    Y = tuple(range(m, 2 * m))
    U = tuple(tuple(2 * m + i * m + j for j in range(m)) for i in range(m))
    V = tuple(tuple(2 * m + m * m + i * m + j for j in range(m)) for i in range(m))
    N = 2 * m + 2 * m * m
    a = [ZERO] * N
    b = [Fraction(1)] * N
    T = [[ZERO] * N for _ in range(N)]
    lo, hi = HALF - delta, HALF - delta + delta * delta
    for i in range(m):
        for j in range(m):
            u, v = U[i][j], V[i][j]
            a[u], b[u] = lo, hi
            a[v], b[v] = lo, hi
            for k in range(m):
                T[Y[k]][u] = game.A[j][k] - game.A[i][k]
                T[X[k]][v] = game.B[k][j] - game.B[k][i]
            T[u][X[i]] = Fraction(-1)
            T[v][Y[i]] = Fraction(-1)
    return Instance(a, b, T), PPADRoles(m, X, Y, U, V)


def _normalize_block(values: Sequence[Fraction], delta: Fraction, name: str) -> tuple:
    kept = [v if v > delta else ZERO for v in values]
    total = sum(kept, ZERO)
    if total == 0:
        raise DegenerateExtraction(f"every {name} coordinate is at most delta")
    return tuple(v / total for v in kept)


def extract_bimatrix(q: Sequence, roles: PPADRoles, delta) -> tuple:
    """Mixed strategies ``(x*, y*)`` read off a gadget probability vector:
    coordinates at most ``delta`` are dropped and each block L1-normalized."""
    delta = to_rat(delta)
    q = [to_rat(v) for v in q]
    x = _normalize_block([q[i] for i in roles.X], delta, "X")
    y = _normalize_block([q[i] for i in roles.Y], delta, "Y")
    return x, y


def best_response_violation(game: BimatrixGame, x: Sequence, y: Sequence) -> Fraction:
    """Largest payoff gap ``<A_j - A_i, y>`` over strategies ``i`` still
    played by the row player (and symmetrically for the column player)."""
    m = game.n
    row_pay = [sum((game.A[i][k] * y[k] for k in range(m)), ZERO) for i in range(m)]
    col_pay = [sum((game.B[k][j] * x[k] for k in range(m)), ZERO) for j in range(m)]
    worst = ZERO
    for i in range(m):
        if x[i] > 0:
            worst = max(worst, max(row_pay) - row_pay[i])
        if y[i] > 0:
            worst = max(worst, max(col_pay) - col_pay[i])
    return worst
