"""Dense linear algebra over the rationals.

Everything here is exact; pivots are the first nonzero entry of each column,
so results are deterministic and never depend on magnitudes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .core import ONE, ZERO, Instance, normalized_influence
from .errors import DimensionMismatch, NonNegativityViolated, SingularMatrixError


def _units(M):
    """Zero and one of the same number type as ``M``'s entries (so GMP
    rationals stay GMP rationals)."""
    z = M[0][0] * 0
    return z, z + 1


def identity(n: int, zero=ZERO, one=ONE) -> list:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def submatrix(M: Sequence[Sequence[Fraction]], rows: Sequence[int], cols: Sequence[int]) -> list:
    return [[M[i][j] for j in cols] for i in rows]


def matvec(M: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list:
    start = v[0] * 0 if len(v) else ZERO
    return [sum((m * x for m, x in zip(row, v) if m), start) for row in M]


def i_minus(M: Sequence[Sequence[Fraction]]) -> list:
    """``I - M`` for a square ``M``."""
    n = len(M)
    if n == 0:
        return []
    zero, one = _units(M)
    return [[(one if i == j else zero) - M[i][j] for j in range(n)] for i in range(n)]


def _check_square(A) -> int:
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionMismatch("matrix is not square")
    return n


def _eliminate(A, B) -> list:
    """Gauss-Jordan on the augmented system ``[A | B]``; returns ``A^{-1} B``.

    ``B`` is a list of rows (n x m).  Raises :class:`SingularMatrixError`.
    """
    n = len(A)
    m = len(B[0]) if B else 0
    aug = [list(A[i]) + list(B[i]) for i in range(n)]
    width = n + m
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        prow = aug[col]
        inv = 1 / prow[col]
        if inv != 1:
            prow = [x * inv for x in prow]
            aug[col] = prow
        nz = [c for c in range(col + 1, width) if prow[c] != 0]
        for r in range(n):
            if r == col:
                continue
            row = aug[r]
            factor = row[col]
            if factor == 0:
                continue
            row[col] = factor * 0
            for c in nz:
                row[c] -= factor * prow[c]
    return [row[n:] for row in aug]


def solve_linear(A: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list:
    """Exact solution of ``A x = rhs``; raises :class:`SingularMatrixError`."""
    n = _check_square(A)
    if len(rhs) != n:
        raise DimensionMismatch(f"right-hand side has {len(rhs)} entries, expected {n}")
    if n == 0:
        return []
    return [row[0] for row in _eliminate(A, [[Fraction(v)] for v in rhs])]


def invert(A: Sequence[Sequence[Fraction]]) -> list:
    n = _check_square(A)
    if n == 0:
        return []
    return _eliminate(A, identity(n, *_units(A)))


def inverse_of_i_minus(M: Sequence[Sequence[Fraction]]):
    """``(I - M)^{-1}`` if it exists and is entrywise nonnegative, else ``None``.

    For nonnegative ``M`` this is exactly the test ``rho(M) < 1``.
    """
    try:
        inv = invert(i_minus(M))
    except SingularMatrixError:
        return None
    if any(x < 0 for row in inv for x in row):
        return None
    return inv


def spectral_radius_below_one(M: Sequence[Sequence[Fraction]]) -> bool:
    """Decide ``rho(M) < 1`` for a nonnegative matrix without eigenvalues.

    ``I - M`` is invertible with a nonnegative inverse exactly when the
    Perron root of ``M`` is below one.
    """
    _check_square(M)
    if any(x < 0 for row in M for x in row):
        raise NonNegativityViolated("spectral gate needs a nonnegative matrix")
    return inverse_of_i_minus(M) is not None


def is_strictly_diag_dominant(inst: Instance) -> bool:
    L = normalized_influence(inst).L
    return all(sum(row, ZERO) < 1 for row in L)
