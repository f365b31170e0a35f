from __future__ import annotations

from decimal import Decimal

import pytest

from stratos import Item, PortfolioSnapshot, Thresholds, build_snapshot

LADDER_VALUES = [100, 90, 80, 70, 60, 50, 40, 30, 20, 10]
SKEWED_VALUES = [180, 90, 50, 20]
EVEN_VALUES = [85, 85, 85, 85]
BLEND_LADDER_VALUES = [100, 90, 80, 70, 60, 50, 40, 30, 20]

CATEGORY_MIX_LISTED = [
    ("Item 1", "P", 1000),
    ("Item 2", "P", 950),
    ("Item 3", "P", 900),
    ("Item 4", "P", 850),
    ("Item 5", "Q", 800),
    ("Item 6", "R", 750),
]


def snapshot_from_values(values, prefix="Item") -> PortfolioSnapshot:
    return build_snapshot(
        Item(id=f"{prefix} {i:02d}", value=Decimal(str(v))) for i, v in enumerate(values, 1)
    )


@pytest.fixture
def ladder_snapshot() -> PortfolioSnapshot:
    return build_snapshot(
        Item(id=f"Item {i}", value=Decimal(v)) for i, v in enumerate(LADDER_VALUES, 1)
    )


@pytest.fixture
def ladder_csv(tmp_path) -> str:
    path = tmp_path / "table1.csv"
    lines = ["item_id,value"] + [f"Item {i},{v}" for i, v in enumerate(LADDER_VALUES, 1)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def _categorized(item_id: str, category: str, value) -> Item:
    return Item(id=item_id, value=Decimal(value), hierarchy=(("category", category),))


@pytest.fixture
def category_mix_listed_snapshot() -> PortfolioSnapshot:
    """Just the six listed items; categories P, Q, R."""
    return build_snapshot(_categorized(i, c, v) for i, c, v in CATEGORY_MIX_LISTED)


@pytest.fixture
def category_mix_golden_snapshot() -> PortfolioSnapshot:
    """Six listed items plus 59 filler items of $250 each; total $20000.

    Fillers F01-F38 sit in category P (total 13200, coverage 0.2803 after the
    first pass), F39-F50 in Q (total 3800, coverage 0.2105: under-represented),
    F51-F59 in R (total 3000, coverage exactly 0.25: not under-represented).
    """
    items = [_categorized(i, c, v) for i, c, v in CATEGORY_MIX_LISTED]
    for k in range(1, 60):
        category = "P" if k <= 38 else ("Q" if k <= 50 else "R")
        items.append(_categorized(f"F{k:02d}", category, 250))
    snap = build_snapshot(items)
    assert snap.total_value == Decimal(20000)
    return snap


@pytest.fixture
def category_mix_worked_snapshot() -> PortfolioSnapshot:
    """Alternative filler mix realizing the worked slice numbers exactly:
    P holds only the four listed items (coverage 1 after pass one), Q totals
    $4000 (coverage 0.2), R absorbs the rest; portfolio total $20000."""
    items = [_categorized(i, c, v) for i, c, v in CATEGORY_MIX_LISTED]
    items += [_categorized(f"QF{k:02d}", "Q", 200) for k in range(1, 17)]  # 3200
    items += [_categorized(f"RF{k:02d}", "R", 150) for k in range(1, 78)]  # 11550
    snap = build_snapshot(items)
    assert snap.total_value == Decimal(20000)
    return snap


@pytest.fixture
def blend_ladder_snapshot() -> PortfolioSnapshot:
    return build_snapshot(
        Item(id=f"Item {i}", value=Decimal(v)) for i, v in enumerate(BLEND_LADDER_VALUES, 1)
    )


@pytest.fixture
def default_thresholds() -> Thresholds:
    return Thresholds(0.25, 0.65, 0.95)
