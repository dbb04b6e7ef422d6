import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from acgm.trace import IterationRecord
from acgm.wtu import (
    MATVEC_COSTS,
    CostModel,
    cumulative_wtu,
    equal_overhead_rd,
    fista_bt_iteration_wtu,
    iteration_wtu,
    search_overhead,
    stall_wtu,
)

costs = st.floats(0.0, 100.0)


def test_derived_costs():
    m = CostModel(t_f=1.0, t_g=2.0, t_psi=3.0, t_p=0.5)
    assert m.t_F == 3.0
    assert m.t_T == 2.5
    with pytest.raises(ValueError):
        CostModel(t_f=-1.0)


def test_stall_table():
    assert stall_wtu(MATVEC_COSTS, True, True) == 0.0
    assert stall_wtu(MATVEC_COSTS, True, False) == 1.0
    assert stall_wtu(MATVEC_COSTS, False) == 3.0
    with pytest.raises(ValueError):
        stall_wtu(MATVEC_COSTS, False, False)


def test_iteration_wtu_examples():
    assert iteration_wtu(MATVEC_COSTS, 0, False, False) == 2.0
    assert iteration_wtu(MATVEC_COSTS, 1, False, False) == 5.0
    assert iteration_wtu(MATVEC_COSTS, 0, True, True) == 3.0
    # an overshoot costs nothing extra when the monotonicity test is off
    assert iteration_wtu(MATVEC_COSTS, 0, True, False) == 2.0
    assert iteration_wtu(MATVEC_COSTS, 2, True, True) == 2.0 + 6.0 + 1.0
    with pytest.raises(ValueError):
        iteration_wtu(MATVEC_COSTS, -1, False, False)


def test_fista_bt_iteration_wtu_examples():
    assert fista_bt_iteration_wtu(MATVEC_COSTS, 0) == 2.0
    assert fista_bt_iteration_wtu(MATVEC_COSTS, 1) == 3.0
    assert fista_bt_iteration_wtu(MATVEC_COSTS, 2) == 4.0


def test_equal_overhead_rule():
    rd = equal_overhead_rd(MATVEC_COSTS, 0.9)
    assert rd == pytest.approx(0.9 ** (2.0 / 3.0), rel=1e-15)
    assert rd == pytest.approx(0.93217, abs=5e-6)
    a = search_overhead(MATVEC_COSTS, 2.0, rd, "ACGM")
    b = search_overhead(MATVEC_COSTS, 2.0, 0.9, "AMGS")
    assert abs(a - b) <= 1e-10
    # direct evaluation of both overhead expressions
    assert b == pytest.approx(-4 * math.log(0.9) / (2 * 2 * math.log(2.0)), rel=1e-15)


def test_search_overhead_edge_cases():
    assert search_overhead(MATVEC_COSTS, 2.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        search_overhead(MATVEC_COSTS, 1.0, 0.9)
    with pytest.raises(ValueError):
        search_overhead(MATVEC_COSTS, 2.0, 0.0)
    with pytest.raises(ValueError):
        search_overhead(MATVEC_COSTS, 2.0, 0.9, "FGM")


def test_search_overhead_increases_with_decrease_strength():
    vals = [search_overhead(MATVEC_COSTS, 2.0, rd) for rd in (0.99, 0.95, 0.9, 0.5)]
    assert vals == sorted(vals)


@given(costs, st.floats(1e-3, 100.0), costs, costs)
def test_equal_overhead_rule_any_costs(t_f, t_g, t_psi, t_p):
    m = CostModel(t_f, t_g, t_psi, t_p)
    rd = equal_overhead_rd(m, 0.9)
    a = search_overhead(m, 2.0, rd, "ACGM")
    b = search_overhead(m, 2.0, 0.9, "AMGS")
    assert a == pytest.approx(b, rel=1e-10, abs=1e-14)


@given(st.lists(st.tuples(st.integers(0, 5), st.booleans()), max_size=40), st.booleans())
def test_cumulative_wtu_additive(steps, monotone):
    recs = [IterationRecord(k=i + 1, L=1.0, backtracks=bt, overshoot=ov, F=0.0, A=1.0)
            for i, (bt, ov) in enumerate(steps)]
    cum = cumulative_wtu(recs, MATVEC_COSTS, monotone)
    assert np.all(np.diff([0.0] + cum) >= 0)
    expected = sum(iteration_wtu(MATVEC_COSTS, bt, ov, monotone) for bt, ov in steps)
    assert (cum[-1] if cum else 0.0) == expected
    if not monotone:
        assert expected == 2 * len(steps) + 3 * sum(bt for bt, _ in steps)
