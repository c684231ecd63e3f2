from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from netprice.core import Instance
from netprice.errors import DimensionMismatch, NonNegativityViolated, SingularMatrixError
from netprice.linalg import (
    i_minus,
    inverse_of_i_minus,
    invert,
    is_strictly_diag_dominant,
    matvec,
    solve_linear,
    spectral_radius_below_one,
)
from oracles import gauss_solve, perron_bounds

small = st.integers(min_value=-6, max_value=6).map(lambda k: F(k, 3))
nonneg = st.integers(min_value=0, max_value=6).map(lambda k: F(k, 4))


def square(elements, max_n=4):
    return st.integers(min_value=1, max_value=max_n).flatmap(
        lambda n: st.lists(st.lists(elements, min_size=n, max_size=n), min_size=n, max_size=n)
    )


def test_inverse_2x2_cramer():
    A = [[F(2), F(1)], [F(7), F(4)]]
    det = 2 * 4 - 1 * 7
    assert invert(A) == [[F(4, det), F(-1, det)], [F(-7, det), F(2, det)]]


def test_inverse_3x3_adjugate():
    A = [[F(1), F(2), F(3)], [F(0), F(1), F(4)], [F(5), F(6), F(0)]]
    # det = 1, adjugate worked out by hand
    assert invert(A) == [[-24, 18, 5], [20, -15, -4], [-5, 4, 1]]


def test_solve_needs_pivoting():
    assert solve_linear([[F(0), F(1)], [F(1), F(0)]], [F(3), F(5)]) == [5, 3]


def test_singular_and_shape_errors():
    with pytest.raises(SingularMatrixError):
        invert([[F(1), F(2)], [F(2), F(4)]])
    with pytest.raises(DimensionMismatch):
        solve_linear([[F(1), F(2)]], [F(1)])
    with pytest.raises(DimensionMismatch):
        solve_linear([[F(1)]], [F(1), F(2)])
    assert solve_linear([], []) == []


@given(square(small), st.data())
def test_solve_matches_reference(A, data):
    n = len(A)
    rhs = data.draw(st.lists(small, min_size=n, max_size=n))
    ref = gauss_solve(A, rhs)
    if ref is None:
        with pytest.raises(SingularMatrixError):
            solve_linear(A, rhs)
    else:
        x = solve_linear(A, rhs)
        assert x == ref
        assert matvec(A, x) == rhs


@given(square(small))
def test_inverse_is_two_sided(A):
    assume(gauss_solve(A, [F(0)] * len(A)) is not None)
    inv = invert(A)
    n = len(A)
    eye = [[F(int(i == j)) for j in range(n)] for i in range(n)]
    prod = [[sum(A[i][k] * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    prod2 = [[sum(inv[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert prod == eye == prod2


class TestSpectralGate:
    def test_hand_cases(self):
        assert not spectral_radius_below_one([[F(0), F(2)], [F(2), F(0)]])
        assert spectral_radius_below_one([[F(0), F(3, 5)], [F(3, 5), F(0)]])
        assert not spectral_radius_below_one([[F(0), F(1)], [F(1), F(0)]])
        assert spectral_radius_below_one([[F(0)]])
        assert not spectral_radius_below_one([[F(1)]])

    def test_negative_entry_rejected(self):
        with pytest.raises(NonNegativityViolated):
            spectral_radius_below_one([[F(0), F(-1)], [F(0), F(0)]])

    @given(square(nonneg, max_n=6))
    def test_row_sum_bounds(self, M):
        # Perron root lies between the smallest and largest row sum.
        sums = [sum(row) for row in M]
        if max(sums) < 1:
            assert spectral_radius_below_one(M)
        if min(sums) >= 1:
            assert not spectral_radius_below_one(M)

    @given(square(nonneg, max_n=5))
    def test_agrees_with_power_iteration(self, M):
        lo, hi = perron_bounds(M)
        if hi < 1 - 1e-6:
            assert spectral_radius_below_one(M)
        elif lo > 1 + 1e-6:
            assert not spectral_radius_below_one(M)

    @given(square(nonneg, max_n=4))
    def test_inverse_nonnegative_when_gate_passes(self, M):
        inv = inverse_of_i_minus(M)
        if inv is not None:
            assert all(x >= 0 for row in inv for x in row)
            assert invert(i_minus(M)) == inv


def test_diag_dominance_uses_normalized_rows():
    # widths 2 and 1: normalized incoming rows 1/2 and 1/2
    inst = Instance([0, 0], [2, 1], [[0, F(1, 2)], [1, 0]])
    assert is_strictly_diag_dominant(inst)
    inst = Instance([0, 0], [1, 1], [[0, 1], [0, 0]])
    assert not is_strictly_diag_dominant(inst)
