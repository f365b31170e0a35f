"""Concentration scoring of portfolio slices and the concentration-driven t_a adjustment.

The index is the classic sum of squared value shares scaled by 10^4, so it
ranges from 10^4/n (all items equal) up to 10^4 (one item holds everything).
The mapping from index values to a raised t_a is deliberately configuration,
not code: portfolios differ too much for a universal rule, so a policy is an
ordered step table reviewed by planners.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .classifier import classify_snapshot
from .errors import EmptyPortfolio, InvalidPolicy, ZeroTotal
from .model import ClassLabel, PortfolioSnapshot, SliceKey, Thresholds

H_CEILING = 10_000.0

#: Minimum distance kept between an adjusted t_a and t_b.
_T_B_GAP = 1e-9


@dataclass(frozen=True)
class ConcentrationIndex:
    """Concentration of one slice: the index value and the slice size it was computed on."""

    h: float
    n: int

    @property
    def floor(self) -> float:
        return H_CEILING / self.n

    @property
    def ceiling(self) -> float:
        return H_CEILING


@dataclass(frozen=True)
class PolicyStep:
    h_min: float
    value: float


@dataclass(frozen=True)
class HPolicy:
    """Step table mapping concentration to a t_a override (or increment).

    Steps apply from their h_min upward; the highest matching step wins.
    `mode` is "override" (value replaces t_a) or "add" (value is added to it).
    """

    steps: tuple[PolicyStep, ...] = ()
    mode: str = "override"

    def __post_init__(self) -> None:
        if self.mode not in ("override", "add"):
            raise InvalidPolicy(f"policy mode must be 'override' or 'add', got {self.mode!r}")
        object.__setattr__(self, "steps", tuple(self.steps))
        prev_h = -np.inf
        prev_v = -np.inf
        for step in self.steps:
            if step.h_min <= prev_h:
                raise InvalidPolicy("policy h_min values must be strictly increasing")
            if step.value < prev_v:
                raise InvalidPolicy("policy values must be non-decreasing in h_min")
            if self.mode == "override" and step.value <= 0:
                raise InvalidPolicy("override values must be positive fractions")
            if self.mode == "add" and step.value < 0:
                raise InvalidPolicy("added increments must be nonnegative")
            prev_h, prev_v = step.h_min, step.value

    @property
    def is_empty(self) -> bool:
        return not self.steps


EMPTY_POLICY = HPolicy()

#: Starting point for calibration only; every portfolio should tune its own
#: steps by reviewing its concentration report and simulating the impact.
ILLUSTRATIVE_POLICY = HPolicy(
    steps=(PolicyStep(h_min=2500.0, value=0.10), PolicyStep(h_min=5000.0, value=0.20)),
    mode="add",
)


def hhi_units(units: Sequence[int] | np.ndarray) -> float:
    """Index from raw integer minor-unit values; exact up to one float rounding."""
    ints = [int(u) for u in units]
    total = sum(ints)
    if not ints:
        raise EmptyPortfolio("cannot score an empty slice")
    if total == 0:
        raise ZeroTotal("cannot score a slice with zero total value")
    sq = sum(u * u for u in ints)
    return (10_000 * sq) / (total * total)


def hhi(slice_snapshot: PortfolioSnapshot) -> ConcentrationIndex:
    """Concentration of a slice, computed on slice-local value shares."""
    if slice_snapshot.is_empty:
        raise EmptyPortfolio("cannot score an empty slice")
    return ConcentrationIndex(h=hhi_units(slice_snapshot.unit_values), n=slice_snapshot.n)


def hhi_bounds(n: int) -> tuple[float, float]:
    """(lowest, highest) index attainable with n items."""
    if n < 1:
        raise EmptyPortfolio("bounds need at least one item")
    return (H_CEILING / n, H_CEILING)


def hhi_report(
    snapshot: PortfolioSnapshot, dimensions: Sequence[str]
) -> list[tuple[SliceKey, ConcentrationIndex]]:
    """One row per member combination of `dimensions`, sorted by index descending.

    Zero-value groups are omitted (their shares are undefined). Rows carry n so
    readers can tell which indexes are directly comparable; equal index values
    are ordered by slice key.
    """
    rows = []
    for key, positions in snapshot.group_indices(dimensions):
        units = snapshot.unit_values[positions]
        if int(units.sum()) == 0:
            continue
        rows.append(
            (SliceKey(filter=frozenset(key)), ConcentrationIndex(h=hhi_units(units), n=len(units)))
        )
    rows.sort(key=lambda row: (-row[1].h, sorted(row[0].filter)))
    return rows


def effective_t_a(
    base_t_a: float, index: ConcentrationIndex | float, policy: HPolicy, *, t_b: float
) -> float:
    """t_a after applying the policy step matching the slice's concentration.

    Returns the base below the first step. The result is kept strictly inside
    (0, t_b) and is non-decreasing in the index.
    """
    h = index.h if isinstance(index, ConcentrationIndex) else float(index)
    chosen = None
    for step in policy.steps:
        if h >= step.h_min:
            chosen = step
        else:
            break
    if chosen is None:
        result = base_t_a
    elif policy.mode == "override":
        result = chosen.value
    else:
        result = base_t_a + chosen.value
    result = min(result, t_b - _T_B_GAP)
    if result <= 0:
        raise InvalidPolicy(f"policy yields non-positive t_a ({result}) below t_b={t_b}")
    return result


@dataclass(frozen=True)
class ImpactRow:
    """What one candidate t_a would do to the A class of a slice."""

    t_a: float
    a_count: int
    a_revenue_share: float
    entering: tuple[str, ...]
    leaving: tuple[str, ...]


def simulate_threshold_impact(
    slice_snapshot: PortfolioSnapshot,
    candidates: Iterable[float],
    t_b: float,
    t_c: float,
    *,
    baseline_t_a: float = 0.25,
) -> list[ImpactRow]:
    """Classify the slice at each candidate t_a and report the A class deltas.

    Entering/leaving id tuples are relative to the baseline threshold and
    sorted by id for stable output.
    """
    candidates = list(candidates)
    for c in list(candidates) + [baseline_t_a]:
        if not (0.0 < c < t_b):
            raise ValueError(f"candidate t_a {c} must lie in (0, t_b={t_b})")
    if not candidates:
        return []
    if slice_snapshot.is_empty:
        raise EmptyPortfolio("cannot simulate on an empty slice")
    if slice_snapshot.total_units == 0:
        raise ZeroTotal("cannot simulate on a slice with zero total value")

    ids = slice_snapshot.item_ids()
    units = slice_snapshot.unit_values

    def a_set(t_a: float) -> tuple[list[str], int]:
        assignment = classify_snapshot(slice_snapshot, Thresholds(t_a, t_b, t_c))
        members = [ids[i] for i, lb in enumerate(assignment.labels) if lb is ClassLabel.A]
        a_units = sum(int(units[i]) for i in range(len(members)))
        return members, a_units

    baseline_ids = set(a_set(baseline_t_a)[0])
    total = slice_snapshot.total_units
    rows = []
    for cand in candidates:
        members, a_units = a_set(cand)
        member_set = set(members)
        rows.append(
            ImpactRow(
                t_a=cand,
                a_count=len(members),
                a_revenue_share=a_units / total,
                entering=tuple(sorted(member_set - baseline_ids)),
                leaving=tuple(sorted(baseline_ids - member_set)),
            )
        )
    return rows
