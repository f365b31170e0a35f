from __future__ import annotations

import random
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratos import (
    EMPTY_POLICY,
    EmptyPortfolio,
    HPolicy,
    InvalidPolicy,
    Item,
    PolicyStep,
    SliceKey,
    Thresholds,
    ZeroTotal,
    build_snapshot,
    classify_snapshot,
    effective_t_a,
    hhi,
    hhi_bounds,
    hhi_report,
    simulate_threshold_impact,
)
from stratos.model import ClassLabel

from .conftest import LADDER_VALUES, SKEWED_VALUES, EVEN_VALUES, snapshot_from_values
from .oracles import hhi_exact


def test_skewed_portfolio_index():
    snap = snapshot_from_values(SKEWED_VALUES)
    index = hhi(snap)
    assert index.h == pytest.approx(3754, abs=1)
    assert index.n == 4
    # pin against the exact rational oracle
    assert index.h == pytest.approx(float(hhi_exact(SKEWED_VALUES)), abs=1e-9)


def test_even_portfolio_index_exact():
    snap = snapshot_from_values(EVEN_VALUES)
    assert hhi(snap).h == 2500.0


def test_single_item_max_concentration():
    snap = snapshot_from_values([123])
    assert hhi(snap).h == 10_000.0


def test_zero_total_rejected():
    snap = snapshot_from_values([0, 0])
    with pytest.raises(ZeroTotal):
        hhi(snap)


def test_bounds():
    assert hhi_bounds(4) == (2500.0, 10_000.0)
    assert hhi_bounds(1) == (10_000.0, 10_000.0)
    assert hhi_bounds(2) == (5000.0, 10_000.0)
    with pytest.raises(EmptyPortfolio):
        hhi_bounds(0)


def test_bounds_hold_on_random_slices():
    rng = random.Random(20240311)
    for _ in range(500):
        n = rng.randint(1, 200)
        values = [rng.randint(1, 10**6) for _ in range(n)]
        index = hhi(snapshot_from_values(values))
        lo, hi = hhi_bounds(n)
        assert lo - 1e-9 <= index.h <= hi + 1e-9


def test_extremes_characterize_distribution():
    rng = random.Random(7)
    n = rng.randint(2, 50)
    even = snapshot_from_values([37] * n)
    assert hhi(even).h == pytest.approx(10_000 / n, abs=1e-9)
    solo = snapshot_from_values([10**6] + [0] * (n - 1))
    assert hhi(solo).h == 10_000.0


def test_equal_value_ratio_law_power_of_two():
    # doubling the item count of an even portfolio halves the index, exactly
    for n1, k in [(2, 1), (3, 2), (5, 1), (7, 3), (10, 2)]:
        n2 = n1 * 2**k
        h1 = hhi(snapshot_from_values([85] * n1)).h
        h2 = hhi(snapshot_from_values([85] * n2)).h
        assert h2 / h1 == n1 / n2


def test_equal_value_ratio_law_general_within_tolerance():
    rng = random.Random(99)
    for _ in range(50):
        n1, n2 = rng.randint(1, 300), rng.randint(1, 300)
        h1 = hhi(snapshot_from_values([41] * n1)).h
        h2 = hhi(snapshot_from_values([41] * n2)).h
        assert h2 / h1 == pytest.approx(n1 / n2, rel=1e-12)


def test_merging_two_items_increases_index():
    rng = random.Random(5)
    for _ in range(50):
        values = [rng.randint(1, 1000) for _ in range(rng.randint(3, 20))]
        merged = sorted(values[2:] + [values[0] + values[1]], reverse=True)
        h_before = hhi(snapshot_from_values(values)).h
        h_after = hhi(snapshot_from_values(merged)).h
        total = sum(values)
        expected_jump = 10_000 * 2 * values[0] * values[1] / (total * total)
        assert h_after - h_before == pytest.approx(expected_jump, rel=1e-9)
        assert h_after > h_before


def test_scale_invariance():
    values = [180, 90, 50, 20]
    h1 = hhi(snapshot_from_values(values)).h
    h2 = hhi(snapshot_from_values([v * 735 for v in values])).h
    assert h1 == h2


# --------------------------------------------------------------------- report

def test_report_by_category(category_mix_listed_snapshot):
    rows = hhi_report(category_mix_listed_snapshot, ["category"])
    by_member = {dict(key.filter)["category"]: index for key, index in rows}
    assert by_member["Q"].h == 10_000.0 and by_member["Q"].n == 1
    assert by_member["R"].h == 10_000.0 and by_member["R"].n == 1
    assert by_member["P"].h == pytest.approx(float(hhi_exact([1000, 950, 900, 850])), abs=1e-9)
    # sorted by index descending, ties by key: Q before R, P last
    members = [dict(key.filter)["category"] for key, _ in rows]
    assert members == ["Q", "R", "P"]


def test_report_no_dimensions_is_whole_portfolio(ladder_snapshot):
    rows = hhi_report(ladder_snapshot, [])
    assert len(rows) == 1
    key, index = rows[0]
    assert key == SliceKey()
    assert index.h == hhi(ladder_snapshot).h


def test_report_near_floor_when_top_share_is_tiny():
    # a flat portfolio: the index sits at its n-item floor, far below 10^4
    n = 556
    snap = build_snapshot(
        Item(f"i{k:04d}", Decimal(100), hierarchy=(("brand", "flat"),)) for k in range(n)
    )
    rows = hhi_report(snap, ["brand"])
    index = rows[0][1]
    top_share = 100 / (100 * n)
    assert top_share < 0.01
    assert index.h == pytest.approx(10_000 / n, rel=1e-12)
    assert index.h == pytest.approx(18, abs=0.5)


# --------------------------------------------------------------------- policy

def concentrated_slice():
    """Top item ~26% of revenue, index ~872: one A at t_a=0.25, several at 0.40."""
    return snapshot_from_values([2600] + [264] * 28)


def test_policy_validation():
    with pytest.raises(InvalidPolicy):
        HPolicy(steps=(PolicyStep(100, 0.3), PolicyStep(100, 0.4)))  # h_min not increasing
    with pytest.raises(InvalidPolicy):
        HPolicy(steps=(PolicyStep(100, 0.4), PolicyStep(200, 0.3)))  # values decreasing
    with pytest.raises(InvalidPolicy):
        HPolicy(steps=(PolicyStep(100, -0.1),), mode="add")
    with pytest.raises(InvalidPolicy):
        HPolicy(steps=(), mode="scale")


def test_empty_policy_returns_base():
    assert effective_t_a(0.25, 875.0, EMPTY_POLICY, t_b=0.65) == 0.25


def test_override_policy_fires_above_step():
    policy = HPolicy(steps=(PolicyStep(h_min=800.0, value=0.40),))
    snap = concentrated_slice()
    index = hhi(snap)
    assert 800 <= index.h <= 1000
    assert effective_t_a(0.25, index, policy, t_b=0.65) == 0.40
    assert effective_t_a(0.25, 18.0, policy, t_b=0.65) == 0.25  # below the step floor

    # the point of raising t_a: the concentrated slice gains A items
    low = classify_snapshot(snap, Thresholds(0.25, 0.65, 0.95))
    high = classify_snapshot(snap, Thresholds(0.40, 0.65, 0.95))
    assert low.a_count == 1
    assert high.a_count > 1


def test_add_mode_and_highest_step_wins():
    policy = HPolicy(
        steps=(PolicyStep(2500.0, 0.10), PolicyStep(5000.0, 0.20)), mode="add"
    )
    assert effective_t_a(0.25, 2499.9, policy, t_b=0.65) == 0.25
    assert effective_t_a(0.25, 2500.0, policy, t_b=0.65) == pytest.approx(0.35)
    assert effective_t_a(0.25, 9000.0, policy, t_b=0.65) == pytest.approx(0.45)


def test_result_clamped_below_t_b():
    policy = HPolicy(steps=(PolicyStep(0.0, 0.99),))
    result = effective_t_a(0.25, 5000.0, policy, t_b=0.65)
    assert result < 0.65
    assert result == pytest.approx(0.65, abs=1e-6)


def test_monotone_in_index():
    policy = HPolicy(
        steps=(PolicyStep(1000.0, 0.30), PolicyStep(3000.0, 0.40), PolicyStep(6000.0, 0.50))
    )
    values = [effective_t_a(0.25, h, policy, t_b=0.65) for h in range(0, 10001, 250)]
    assert values == sorted(values)


# ------------------------------------------------------------------- simulate

def test_simulate_ladder(ladder_snapshot):
    rows = simulate_threshold_impact(
        ladder_snapshot, [0.25, 0.5], 0.65, 0.95, baseline_t_a=0.25
    )
    assert [r.a_count for r in rows] == [2, 4]
    assert rows[0].a_revenue_share == pytest.approx(190 / 550, abs=1e-12)
    assert rows[1].a_revenue_share == pytest.approx(340 / 550, abs=1e-12)
    assert rows[0].entering == () and rows[0].leaving == ()
    assert rows[1].entering == ("Item 3", "Item 4")
    assert rows[1].leaving == ()


def test_simulate_single_item_always_one_A():
    snap = snapshot_from_values([50])
    rows = simulate_threshold_impact(snap, [0.1, 0.3, 0.6], 0.65, 0.95, baseline_t_a=0.25)
    assert [r.a_count for r in rows] == [1, 1, 1]


def test_simulate_empty_candidates():
    snap = snapshot_from_values([50])
    assert simulate_threshold_impact(snap, [], 0.65, 0.95) == []


def test_simulate_candidate_out_of_range(ladder_snapshot):
    with pytest.raises(ValueError):
        simulate_threshold_impact(ladder_snapshot, [0.7], 0.65, 0.95)


def test_simulate_counts_and_shares_monotone(ladder_snapshot):
    candidates = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55]
    rows = simulate_threshold_impact(ladder_snapshot, candidates, 0.65, 0.95)
    counts = [r.a_count for r in rows]
    shares = [r.a_revenue_share for r in rows]
    assert counts == sorted(counts)
    assert shares == sorted(shares)
    for row in rows:
        assert row.a_revenue_share >= min(row.t_a, 1.0) - 1e-9
