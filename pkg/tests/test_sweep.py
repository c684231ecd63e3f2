import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import instances
from netprice.core import GroupedInstance, Instance, Partition, Side, evaluate, normalized_influence
from netprice.errors import DimensionMismatch, NegativeInfluence, ValidationError
from netprice.instances import gen_counterexample, gen_jump, gen_random
from netprice.linesweep import (
    SweepState,
    build_subproblem,
    equilibrium_at_price_vector,
    find_pivot,
    optimistic_sweep,
    pessimistic_sweep,
    sweep,
)
from netprice.transfer import g_value, is_equilibrium_exact, iterate_fixed_point, transfer
from oracles import extremal_fixed_points


def sample_prices(pwl, extra=()):
    """Every breakpoint, every segment midpoint, and points just around them."""
    pts = set(extra)
    for seg in pwl.segments:
        pts.add(seg.midpoint())
        for t in (seg.lo, seg.hi):
            if t is not None:
                pts.update({t, t - F(1, 1000), t + F(1, 1000)})
    return sorted(pts)


class TestJump:
    def test_pessimistic(self):
        pwl = pessimistic_sweep(gen_jump())
        assert pwl.breakpoints == (1,)
        assert evaluate(pwl, 1) == (0, 0)
        assert evaluate(pwl, F(999, 1000)) == (1, 1)
        assert evaluate(pwl, 7) == (0, 0)
        assert pwl.pivoted

    def test_optimistic(self):
        # (1, 1) stays a fixed point as long as 1 - p + 2 >= 1, i.e. p <= 2.
        pwl = optimistic_sweep(gen_jump())
        assert pwl.breakpoints == (2,)
        assert evaluate(pwl, 2) == (1, 1)
        assert evaluate(pwl, F(2001, 1000)) == (0, 0)
        assert evaluate(pwl, 1) == (1, 1)

    def test_sweep_dispatch(self):
        inst = gen_jump()
        assert sweep(inst, "opt") == optimistic_sweep(inst)
        assert sweep(inst) == pessimistic_sweep(inst)


class TestCounterexample:
    def test_n4_segments(self):
        pwl = pessimistic_sweep(gen_counterexample(4))
        assert pwl.breakpoints == (2, F(6, 5), F(14, 13), F(22, 21), 1, F(2, 5), 0)
        seg = pwl.segment_at(F(41, 40))
        assert (seg.lo, seg.hi) == (1, F(22, 21))
        assert seg.c0 == (1, F(3, 2), 1, 2)
        assert seg.c1 == (F(-1, 2), F(-5, 4), 0, -1)
        # the pessimistic curve jumps at 22/21
        assert evaluate(pwl, F(22, 21)) == (F(10, 21), F(4, 21), F(1, 21), 0)
        assert evaluate(pwl, F(22, 21) - F(1, 10**4))[2:] == (1, 2 - (F(22, 21) - F(1, 10**4)))

    @pytest.mark.parametrize("n", [3, 4, 5, 8, 12])
    def test_value_at_one(self, n):
        q = evaluate(pessimistic_sweep(gen_counterexample(n)), 1)
        assert q == tuple(F(1, 2 ** (i + 1)) for i in range(n - 2)) + (1, 1)

    def test_segment_count(self):
        for n in (4, 8, 16):
            pwl = pessimistic_sweep(gen_counterexample(n))
            assert len(pwl.segments) <= 2 * n + 1


class TestFindPivot:
    @staticmethod
    def _state(inst, p, q):
        value = g_value(inst, p, q)
        working = frozenset(i for i in range(inst.n) if 0 < q[i] < 1 or value[i] == 0 and q[i] == 0)
        zero = frozenset(i for i in range(inst.n) if q[i] == 0) - working
        one = frozenset(range(inst.n)) - working - zero
        y = normalized_influence(inst).y
        return SweepState(0, F(p), tuple(q), Partition(zero, working, one), value, y)

    def test_jump(self):
        inst = gen_jump()
        cert = find_pivot(self._state(inst, 1, (F(0), F(0))), normalized_influence(inst).L)
        assert cert.W1 == (0,) and cert.W2 == (0, 1) and cert.w == 1
        assert cert.u == (2, 1)
        assert cert.k == 0

    def test_unit_cycle_tie_goes_to_smallest_index(self):
        inst = Instance([0, 0], [1, 1], [[0, 1], [1, 0]])
        cert = find_pivot(self._state(inst, 1, (F(0), F(0))), normalized_influence(inst).L)
        assert cert.u == (1, 1) and cert.k == 0

    def test_counterexample_at_22_21(self):
        inst = gen_counterexample(4)
        q = (F(10, 21), F(4, 21), F(1, 21), F(0))
        state = self._state(inst, F(22, 21), q)
        assert state.partition.working == {0, 1, 2, 3}
        cert = find_pivot(state, normalized_influence(inst).L)
        assert cert.W1 == (0, 1, 2) and cert.w == 3
        assert cert.u == (0, 0, 1, 1)
        assert cert.k == 2


def test_build_subproblem():
    inst = Instance([0, 0, 0], [1, 2, 3], [[0, 1, 2], [0, 0, 5], [1, 0, 0]])
    sub, mapping = build_subproblem(inst, [1])
    assert mapping == (0, 2)
    assert sub.a == (0, 5) and sub.b == (1, 8)
    assert sub.T == ((0, 2), (1, 0))


@settings(max_examples=80)
@given(instances(max_n=4))
def test_matches_bruteforce_extremal_fixed_points(inst):
    pess, opt = pessimistic_sweep(inst), optimistic_sweep(inst)
    for p in sample_prices(pess, sample_prices(opt)):
        least, greatest, complete = extremal_fixed_points(inst.a, inst.b, inst.T, p)
        if not complete:
            continue
        assert evaluate(pess, p) == least
        assert evaluate(opt, p) == greatest


@settings(max_examples=40)
@given(instances(min_n=2, max_n=4), st.data())
def test_offsets_match_bruteforce(inst, data):
    d = data.draw(st.lists(st.integers(0, 8).map(lambda k: F(k, 4)), min_size=inst.n, max_size=inst.n))
    pess, opt = pessimistic_sweep(inst, d), optimistic_sweep(inst, d)
    for p in sample_prices(pess, sample_prices(opt)):
        least, greatest, complete = extremal_fixed_points(inst.a, inst.b, inst.T, [p + x for x in d])
        if complete:
            assert evaluate(pess, p) == least
            assert evaluate(opt, p) == greatest


@settings(max_examples=60)
@given(instances(max_n=6))
def test_structural_properties(inst):
    n = inst.n
    for side in Side:
        pwl = sweep(inst, side)
        assert len(pwl.segments) <= 2 * n + 1
        for p in sample_prices(pwl):
            q = evaluate(pwl, p)
            assert transfer(inst, p, q) == q
        # segments are listed top-down and tile the line
        segs = pwl.segments
        assert segs[0].hi is None and segs[-1].lo is None
        assert all(s.lo == t.hi for s, t in zip(segs, segs[1:]))
    pess, opt = sweep(inst, "pess"), sweep(inst, "opt")
    prev = None
    for p in sample_prices(pess, sample_prices(opt)):
        lo, hi = evaluate(pess, p), evaluate(opt, p)
        assert all(x <= y for x, y in zip(lo, hi))
        if prev is not None:
            assert all(x <= y for x, y in zip(lo, prev))
        prev = lo


def test_pessimistic_is_iteration_limit_from_below():
    rng = random.Random(7)
    for seed in range(20):
        inst = gen_random(5, F(1, 2), seed, enforce_diag_dominant=True)
        pess, opt = pessimistic_sweep(inst), optimistic_sweep(inst)
        assert not pess.pivoted
        for _ in range(5):
            p = F(rng.randint(0, 400), 40)
            # diagonal dominance: one equilibrium, iteration converges geometrically
            assert evaluate(pess, p) == evaluate(opt, p)
            q, converged, _ = iterate_fixed_point(inst, p, "zero", tol=F(1, 10**9), exact=False)
            assert converged
            assert max(abs(float(x) - y) for x, y in zip(evaluate(pess, p), q)) <= 1e-7


def test_equilibrium_at_price_vector():
    inst = Instance([0, 0], [1, 1], [[0, 2], [2, 0]])
    g = GroupedInstance(inst, 2, (0, 1))
    q = equilibrium_at_price_vector(g, [F(1, 2), F(7, 4)])
    assert is_equilibrium_exact(inst, [F(1, 2), F(7, 4)], q)
    least, _, _ = extremal_fixed_points(inst.a, inst.b, inst.T, [F(1, 2), F(7, 4)])
    assert q == least
    with pytest.raises(DimensionMismatch):
        equilibrium_at_price_vector(g, [1])
    with pytest.raises(ValidationError):
        equilibrium_at_price_vector(g, [-1, 1])


def test_rejects_bad_input():
    with pytest.raises(NegativeInfluence):
        pessimistic_sweep(Instance([0, 0], [1, 1], [[0, -1], [0, 0]]))
    with pytest.raises(ValidationError):
        pessimistic_sweep(gen_jump(), [F(-1), F(0)])
    with pytest.raises(DimensionMismatch):
        optimistic_sweep(gen_jump(), [F(0)])
