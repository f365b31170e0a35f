"""Two-stage, multi-pass stratification.

Stage one walks an ordered list of passes, each classifying groups of a
chosen scope and grouping; a group is only touched while the items already in
the top class cover less of its revenue than the (possibly
concentration-adjusted) t_a, so passes are cumulative and idempotent. Stage
two classifies everything left over as one pool against thresholds rescaled
by the revenue share stage one removed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable

import numpy as np

from .classifier import cut_index, renormalize_thresholds, share_lt
from .concentration import EMPTY_POLICY, HPolicy, effective_t_a, hhi_units
from .errors import EmptyPortfolio, SchemaError
from .model import (
    ClassLabel,
    DEFAULT_NEW_CUTOFF_MONTHS,
    DEFAULT_THRESHOLDS,
    PortfolioSnapshot,
    Thresholds,
    _units_to_decimal,
)

STAGE_TWO = "stage-2"


@dataclass(frozen=True)
class PassSpec:
    """One stage-one pass: where to look (scope), how to split (group_by), and
    optional per-pass thresholds and concentration policy."""

    name: str
    scope: str = "all"
    group_by: tuple[str, ...] = ()
    thresholds: Thresholds | None = None
    concentration_policy: HPolicy | None = None

    def __post_init__(self) -> None:
        if not self.name or self.name == STAGE_TWO:
            raise SchemaError(f"invalid pass name {self.name!r}")
        if self.scope not in ("all", "new", "inline"):
            raise SchemaError(f"pass {self.name!r}: unknown scope {self.scope!r}")
        object.__setattr__(self, "group_by", tuple(self.group_by))


@dataclass(frozen=True)
class StratifyConfig:
    passes: tuple[PassSpec, ...]
    thresholds: Thresholds = DEFAULT_THRESHOLDS
    renormalize: str = "actual"
    new_item_cutoff_months: int = DEFAULT_NEW_CUTOFF_MONTHS
    a_share_cap: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "passes", tuple(self.passes))
        if not self.passes:
            raise SchemaError("config needs at least one pass")
        names = [p.name for p in self.passes]
        if len(set(names)) != len(names):
            raise SchemaError("pass names must be unique")
        if self.renormalize not in ("actual", "nominal"):
            raise SchemaError(f"renormalize must be 'actual' or 'nominal', got {self.renormalize!r}")
        if self.new_item_cutoff_months < 0:
            raise SchemaError("new_item_cutoff_months must be nonnegative")
        if self.a_share_cap is not None and not (0.0 < self.a_share_cap <= 1.0):
            raise SchemaError("a_share_cap must be in (0, 1]")


def default_config() -> StratifyConfig:
    """A single unconstrained pass over the whole portfolio with default thresholds."""
    return StratifyConfig(passes=(PassSpec(name="unconstrained"),))


@dataclass(frozen=True)
class GroupOutcome:
    """Audit record for one group a pass looked at."""

    members: tuple[tuple[str, str], ...]
    n: int
    h: float | None
    coverage: float | None
    effective_t_a: float | None
    underrepresented: bool
    new_a_count: int
    new_a_value: Decimal


@dataclass(frozen=True)
class PassOutcome:
    name: str
    scope: str
    group_by: tuple[str, ...]
    groups: tuple[GroupOutcome, ...]
    new_a_count: int
    new_a_value: Decimal
    halted_by_cap: bool = False


@dataclass(frozen=True)
class Stage2Outcome:
    mode: str
    removed_share: float
    t_b_prime: float | None
    t_c_prime: float | None
    note: str  # ok | no-b-class | all-d | zero-total | empty


@dataclass(frozen=True, slots=True)
class ItemOutcome:
    item_id: str
    label: ClassLabel
    assigned_by: str
    share_at_assignment: float


class StratificationResult:
    """Per-item labels with provenance, plus the pass-by-pass summary.

    Rows follow the snapshot's sort order; every item appears exactly once.
    Top-class items carry the name of the pass that added them, everything
    else carries "stage-2"; the share is the item's cumulative share within
    the slice it was labeled in.
    """

    __slots__ = (
        "_snapshot",
        "_codes",
        "_origin_idx",
        "_origins",
        "_share_at",
        "passes",
        "stage2",
        "_rows_cache",
    )

    def __init__(
        self,
        snapshot: PortfolioSnapshot,
        codes: np.ndarray,
        origin_idx: np.ndarray,
        origins: tuple[str, ...],
        share_at: np.ndarray,
        passes: tuple[PassOutcome, ...],
        stage2: Stage2Outcome,
    ):
        self._snapshot = snapshot
        self._codes = codes
        self._origin_idx = origin_idx
        self._origins = origins
        self._share_at = share_at
        self.passes = passes
        self.stage2 = stage2
        self._rows_cache: tuple[ItemOutcome, ...] | None = None
        codes.setflags(write=False)
        origin_idx.setflags(write=False)
        share_at.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self._codes)

    @property
    def labels(self) -> tuple[ClassLabel, ...]:
        return tuple(ClassLabel(int(c)) for c in self._codes)

    @property
    def rows(self) -> tuple[ItemOutcome, ...]:
        if self._rows_cache is None:
            ids = self._snapshot.item_ids()
            self._rows_cache = tuple(
                ItemOutcome(
                    item_id=ids[i],
                    label=ClassLabel(int(self._codes[i])),
                    assigned_by=self._origins[int(self._origin_idx[i])],
                    share_at_assignment=float(self._share_at[i]),
                )
                for i in range(self.n)
            )
        return self._rows_cache

    def iter_rows(self) -> Iterable[tuple[str, str, str, float]]:
        """(item_id, class name, assigned_by, share) in portfolio order, without
        materializing row objects."""
        ids = self._snapshot.item_ids()
        names = ("A", "B", "C", "D")
        codes = self._codes
        origin_idx = self._origin_idx
        share_at = self._share_at
        origins = self._origins
        for i in range(self.n):
            yield ids[i], names[codes[i]], origins[origin_idx[i]], float(share_at[i])

    def label_of(self, item_id: str) -> ClassLabel:
        ids = self._snapshot.item_ids()
        return ClassLabel(int(self._codes[ids.index(item_id)]))

    def a_ids(self) -> set[str]:
        ids = self._snapshot.item_ids()
        return {ids[i] for i in np.nonzero(self._codes == ClassLabel.A.value)[0]}

    def class_counts(self) -> dict[ClassLabel, int]:
        counts = np.bincount(self._codes, minlength=4)
        return {label: int(counts[label.value]) for label in ClassLabel}

    def class_value(self) -> dict[ClassLabel, Decimal]:
        units = self._snapshot.unit_values
        scale = self._snapshot.unit_scale
        return {
            label: _units_to_decimal(int(units[self._codes == label.value].sum()), scale)
            for label in ClassLabel
        }

    @property
    def a_count(self) -> int:
        return int((self._codes == ClassLabel.A.value).sum())

    @property
    def a_value(self) -> Decimal:
        units = self._snapshot.unit_values
        return _units_to_decimal(
            int(units[self._codes == ClassLabel.A.value].sum()), self._snapshot.unit_scale
        )

    @property
    def a_share(self) -> float:
        total = self._snapshot.total_units
        if total == 0:
            return 0.0
        units = self._snapshot.unit_values
        return int(units[self._codes == ClassLabel.A.value].sum()) / total


def is_underrepresented(
    slice_snapshot: PortfolioSnapshot, current_a_ids: set[str], t_a: float
) -> bool:
    """True when the already-top-class items cover strictly less than t_a of the
    slice's revenue. Empty and zero-value slices are never under-represented:
    there is nothing meaningful to promote."""
    if slice_snapshot.is_empty or slice_snapshot.total_units == 0:
        return False
    mask = np.isin(slice_snapshot.id_array, sorted(current_a_ids))
    covered = int(slice_snapshot.unit_values[mask].sum())
    return share_lt(covered / slice_snapshot.total_units, t_a)


@dataclass(frozen=True)
class _GroupEval:
    key: tuple[tuple[str, str], ...]
    positions: np.ndarray
    h: float | None
    coverage: float | None
    t_a_eff: float | None
    underrepresented: bool
    new_ranks: list[int]
    shares: np.ndarray | None


def _evaluate_group(
    key: tuple[tuple[str, str], ...],
    positions: np.ndarray,
    units: np.ndarray,
    a_mask: np.ndarray,
    t: Thresholds,
    policy: HPolicy,
) -> _GroupEval:
    gunits = units[positions]
    gtotal = int(gunits.sum())
    if len(positions) == 0 or gtotal == 0:
        return _GroupEval(key, positions, None, None, None, False, [], None)
    h = hhi_units(gunits)
    t_a_eff = t.t_a if policy.is_empty else effective_t_a(t.t_a, h, policy, t_b=t.t_b)
    ga_mask = a_mask[positions]
    coverage = int(gunits[ga_mask].sum()) / gtotal
    if not share_lt(coverage, t_a_eff):
        return _GroupEval(key, positions, h, coverage, t_a_eff, False, [], None)
    shares = np.cumsum(gunits).astype(np.float64) / float(gtotal)
    k_a = cut_index(shares, t_a_eff)
    new_ranks = [r for r in range(k_a) if not ga_mask[r]]
    return _GroupEval(key, positions, h, coverage, t_a_eff, True, new_ranks, shares)


def _execute_pass(
    snapshot: PortfolioSnapshot,
    spec: PassSpec,
    a_mask: np.ndarray,
    base_thresholds: Thresholds,
    cutoff_months: int,
    workers: int,
) -> tuple[list[tuple[int, float]], PassOutcome]:
    """Evaluate one pass against the current top-class mask.

    Returns the newly selected (position, slice share) pairs and the audit
    outcome; the caller applies the mask update. Groups are disjoint, so they
    are evaluated independently (possibly in parallel) and assembled in
    lexicographic key order.
    """
    t = spec.thresholds or base_thresholds
    policy = spec.concentration_policy or EMPTY_POLICY
    scope_idx = snapshot.scope_indices(spec.scope, cutoff_months)
    groups = snapshot.group_indices(spec.group_by, within=scope_idx)
    units = snapshot.unit_values

    def run(group: tuple[tuple[tuple[str, str], ...], np.ndarray]) -> _GroupEval:
        return _evaluate_group(group[0], group[1], units, a_mask, t, policy)

    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            evals = list(pool.map(run, groups))
    else:
        evals = [run(g) for g in groups]

    scale = snapshot.unit_scale
    new_positions: list[tuple[int, float]] = []
    outcomes = []
    pass_new_units = 0
    pass_new_count = 0
    for ev in evals:
        group_units = 0
        for rank in ev.new_ranks:
            pos = int(ev.positions[rank])
            new_positions.append((pos, float(ev.shares[rank])))
            group_units += int(units[pos])
        pass_new_units += group_units
        pass_new_count += len(ev.new_ranks)
        outcomes.append(
            GroupOutcome(
                members=ev.key,
                n=len(ev.positions),
                h=ev.h,
                coverage=ev.coverage,
                effective_t_a=ev.t_a_eff,
                underrepresented=ev.underrepresented,
                new_a_count=len(ev.new_ranks),
                new_a_value=_units_to_decimal(group_units, scale),
            )
        )

    outcome = PassOutcome(
        name=spec.name,
        scope=spec.scope,
        group_by=spec.group_by,
        groups=tuple(outcomes),
        new_a_count=pass_new_count,
        new_a_value=_units_to_decimal(pass_new_units, scale),
    )
    return new_positions, outcome


def run_pass(
    snapshot: PortfolioSnapshot,
    spec: PassSpec,
    current_a: set[str],
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    *,
    cutoff_months: int = DEFAULT_NEW_CUTOFF_MONTHS,
    workers: int = 1,
) -> dict[str, float]:
    """Newly selected top-class items for one pass, as id -> slice share.

    Only items not already in `current_a` are returned; groups whose coverage
    already meets the pass's effective t_a contribute nothing.
    """
    if snapshot.is_empty:
        raise EmptyPortfolio("cannot run a pass on an empty portfolio")
    a_mask = np.isin(snapshot.id_array, sorted(current_a))
    new_positions, _ = _execute_pass(snapshot, spec, a_mask, thresholds, cutoff_months, workers)
    ids = snapshot.item_ids()
    return {ids[pos]: share for pos, share in new_positions}


def stratify(
    snapshot: PortfolioSnapshot, config: StratifyConfig, *, workers: int = 1
) -> StratificationResult:
    """Run every stage-one pass in order, then classify the remainder.

    Passes only ever add top-class items. The remainder is labeled as one
    pool against thresholds rescaled by the removed revenue share: the actual
    share in "actual" mode, the configured t_a in "nominal" mode. When the
    removed share already reaches t_b (or t_c) the remainder is labeled C/D
    only (or all D).
    """
    if snapshot.is_empty:
        raise EmptyPortfolio("cannot stratify an empty portfolio")

    n = snapshot.n
    units = snapshot.unit_values
    total = snapshot.total_units
    t = config.thresholds

    a_mask = np.zeros(n, dtype=bool)
    origin_idx = np.full(n, len(config.passes), dtype=np.uint16)
    share_at = np.zeros(n, dtype=np.float64)
    origins = tuple(p.name for p in config.passes) + (STAGE_TWO,)

    pass_outcomes: list[PassOutcome] = []
    halted = False
    for pi, spec in enumerate(config.passes):
        if config.a_share_cap is not None and not halted:
            a_units = int(units[a_mask].sum())
            if total > 0 and not share_lt(a_units / total, config.a_share_cap):
                halted = True
        if halted:
            pass_outcomes.append(
                PassOutcome(
                    name=spec.name,
                    scope=spec.scope,
                    group_by=spec.group_by,
                    groups=(),
                    new_a_count=0,
                    new_a_value=_units_to_decimal(0, snapshot.unit_scale),
                    halted_by_cap=True,
                )
            )
            continue
        new_positions, outcome = _execute_pass(
            snapshot, spec, a_mask, t, config.new_item_cutoff_months, workers
        )
        for pos, share in new_positions:
            a_mask[pos] = True
            origin_idx[pos] = pi
            share_at[pos] = share
        pass_outcomes.append(outcome)

    codes = np.full(n, ClassLabel.D.value, dtype=np.uint8)
    codes[a_mask] = ClassLabel.A.value

    rem_positions = np.nonzero(~a_mask)[0]
    a_units_total = total - int(units[rem_positions].sum())
    if config.renormalize == "actual":
        removed = (a_units_total / total) if total > 0 else 0.0
    else:
        removed = t.t_a

    if len(rem_positions) == 0:
        stage2 = Stage2Outcome(config.renormalize, removed, None, None, "empty")
    else:
        rem_units = units[rem_positions]
        rem_total = int(rem_units.sum())
        if rem_total == 0:
            stage2 = Stage2Outcome(config.renormalize, removed, None, None, "zero-total")
        else:
            shares = np.cumsum(rem_units).astype(np.float64) / float(rem_total)
            share_at[rem_positions] = shares
            if not share_lt(removed, t.t_c):
                stage2 = Stage2Outcome(config.renormalize, removed, None, None, "all-d")
            elif not share_lt(removed, t.t_b):
                t_c_prime = (t.t_c - removed) / (1.0 - removed)
                k_c = cut_index(shares, t_c_prime, straddle=False)
                codes[rem_positions[:k_c]] = ClassLabel.C.value
                stage2 = Stage2Outcome(config.renormalize, removed, None, t_c_prime, "no-b-class")
            else:
                t_prime = renormalize_thresholds(t, removed)
                k_b = cut_index(shares, t_prime.t_b)
                k_c = max(k_b, cut_index(shares, t_prime.t_c, straddle=False))
                codes[rem_positions[:k_c]] = ClassLabel.C.value
                codes[rem_positions[:k_b]] = ClassLabel.B.value
                stage2 = Stage2Outcome(
                    config.renormalize, removed, t_prime.t_b, t_prime.t_c, "ok"
                )

    return StratificationResult(
        snapshot=snapshot,
        codes=codes,
        origin_idx=origin_idx,
        origins=origins,
        share_at=share_at,
        passes=tuple(pass_outcomes),
        stage2=stage2,
    )
