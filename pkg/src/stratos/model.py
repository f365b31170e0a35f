"""Core domain types: items, thresholds, slice keys, and the immutable sorted portfolio snapshot.

Money is held exactly: every value is normalized to integer minor units at a
single per-portfolio decimal scale, so totals and prefix sums never drift.
Shares and other fractions are derived from those integers with a single
float rounding each.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateItem,
    EmptyPortfolio,
    NegativeValue,
    SchemaError,
    UnknownDimension,
)

#: Tolerance used for every share-vs-threshold comparison. Two fractions closer
#: than this are treated as equal, and equality belongs to the higher class.
SHARE_TOLERANCE = 1e-12

#: Age (in months) below which an item counts as "new"; overridable per call.
DEFAULT_NEW_CUTOFF_MONTHS = 12

#: Largest number of decimal places accepted in a money amount.
MAX_VALUE_DECIMALS = 12

_SCOPES = ("all", "new", "inline")

# int64 headroom for exact prefix sums; checked at snapshot build time.
_MAX_TOTAL_UNITS = 2**62


class ClassLabel(enum.IntEnum):
    """The four priority classes, ordered A < B < C < D (A is highest priority)."""

    A = 0
    B = 1
    C = 2
    D = 3

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Item:
    """One sellable unit: an id, a nonnegative money value, and its hierarchy position."""

    id: str
    value: Decimal
    hierarchy: tuple[tuple[str, str], ...] = ()
    age_months: int | None = None


@dataclass(frozen=True, slots=True)
class Thresholds:
    """The ordered cumulative-share boundaries (t_a, t_b, t_c), each in (0, 1)."""

    t_a: float
    t_b: float
    t_c: float

    def __post_init__(self) -> None:
        if not (0.0 < self.t_a < self.t_b < self.t_c < 1.0):
            raise SchemaError(
                f"thresholds must satisfy 0 < t_a < t_b < t_c < 1, got "
                f"({self.t_a}, {self.t_b}, {self.t_c})"
            )


DEFAULT_THRESHOLDS = Thresholds(0.25, 0.65, 0.95)


@dataclass(frozen=True, slots=True)
class SliceKey:
    """Selects a sub-portfolio: fixed hierarchy members plus a new/in-line scope.

    An empty filter with scope "all" selects the whole portfolio. Items without
    a recorded age count as in-line.
    """

    filter: frozenset[tuple[str, str]] = frozenset()
    scope: str = "all"

    def __post_init__(self) -> None:
        if self.scope not in _SCOPES:
            raise SchemaError(f"scope must be one of {_SCOPES}, got {self.scope!r}")
        if not isinstance(self.filter, frozenset):
            object.__setattr__(self, "filter", frozenset(self.filter))
        dims = [d for d, _ in self.filter]
        if len(dims) != len(set(dims)):
            raise SchemaError("slice filter fixes some dimension more than once")

    def describe(self) -> str:
        parts = [f"{d}={m}" for d, m in sorted(self.filter)]
        if self.scope != "all":
            parts.append(f"scope={self.scope}")
        return ",".join(parts) if parts else "(whole portfolio)"


def _decimal_to_parts(value: Decimal) -> tuple[int, int]:
    """Return (mantissa, frac_digits) such that value == mantissa / 10**frac_digits."""
    sign, digits, exp = value.as_tuple()
    if not isinstance(exp, int):
        raise NegativeValue(f"value {value} is not a finite amount")
    mantissa = int("".join(map(str, digits)))
    if sign:
        mantissa = -mantissa
    if exp >= 0:
        return mantissa * 10**exp, 0
    return mantissa, -exp


def _units_to_decimal(units: int, scale: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 60
        return Decimal(units).scaleb(-scale)


class PortfolioSnapshot:
    """An immutable portfolio, sorted by value descending with id as tie-break.

    Internally column-major: ids, integer minor-unit values (exact at a shared
    decimal scale), one member column per hierarchy dimension, and optional
    ages. All derived computations in this package read these columns; `items`
    materializes row objects on demand.
    """

    __slots__ = (
        "_ids",
        "_units",
        "_scale",
        "_dims",
        "_member_cols",
        "_ages",
        "_total_units",
        "_items_cache",
        "_float_values_cache",
    )

    def __init__(
        self,
        ids: np.ndarray,
        units: np.ndarray,
        scale: int,
        dims: tuple[str, ...],
        member_cols: tuple[np.ndarray, ...],
        ages: np.ndarray | None,
        total_units: int,
    ):
        # Internal constructor: columns must already be sorted and validated.
        self._ids = ids
        self._units = units
        self._scale = scale
        self._dims = dims
        self._member_cols = member_cols
        self._ages = ages
        self._total_units = total_units
        self._items_cache: tuple[Item, ...] | None = None
        self._float_values_cache: np.ndarray | None = None
        for arr in (ids, units, *member_cols):
            arr.setflags(write=False)
        if ages is not None:
            ages.setflags(write=False)

    # ------------------------------------------------------------------ basics

    @property
    def n(self) -> int:
        return len(self._ids)

    @property
    def is_empty(self) -> bool:
        return self.n == 0

    @property
    def total_value(self) -> Decimal:
        return _units_to_decimal(self._total_units, self._scale)

    @property
    def dimensions(self) -> tuple[str, ...]:
        return self._dims

    @property
    def items(self) -> tuple[Item, ...]:
        if self._items_cache is None:
            ages = self._ages
            members = self._member_cols
            dims = self._dims
            self._items_cache = tuple(
                Item(
                    id=str(self._ids[i]),
                    value=_units_to_decimal(int(self._units[i]), self._scale),
                    hierarchy=tuple((d, str(col[i])) for d, col in zip(dims, members)),
                    age_months=None if ages is None or ages[i] < 0 else int(ages[i]),
                )
                for i in range(self.n)
            )
        return self._items_cache

    def item_ids(self) -> list[str]:
        return self._ids.tolist()

    @property
    def id_array(self) -> np.ndarray:
        return self._ids

    @property
    def has_ages(self) -> bool:
        return self._ages is not None

    def value_floats(self) -> np.ndarray:
        """Values in major units as float64 (one rounding per element)."""
        if self._float_values_cache is None:
            arr = self._units.astype(np.float64) / float(10**self._scale)
            arr.setflags(write=False)
            self._float_values_cache = arr
        return self._float_values_cache

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PortfolioSnapshot):
            return NotImplemented
        if self.n != other.n or self._dims != other._dims:
            return False
        if not np.array_equal(self._ids, other._ids):
            return False
        s = max(self._scale, other._scale)
        u1 = self._units.astype(object) * 10 ** (s - self._scale)
        u2 = other._units.astype(object) * 10 ** (s - other._scale)
        if not np.array_equal(u1, u2):
            return False
        for a, b in zip(self._member_cols, other._member_cols):
            if not np.array_equal(a, b):
                return False
        a1 = self._ages if self._ages is not None else np.full(self.n, -1, dtype=np.int32)
        a2 = other._ages if other._ages is not None else np.full(other.n, -1, dtype=np.int32)
        return np.array_equal(a1, a2)

    def __repr__(self) -> str:
        return f"PortfolioSnapshot(n={self.n}, total={self.total_value}, dims={self._dims})"

    # ------------------------------------------------------------- engine-side

    @property
    def unit_values(self) -> np.ndarray:
        """Exact minor-unit values (int64), aligned with the sorted order."""
        return self._units

    @property
    def unit_scale(self) -> int:
        return self._scale

    @property
    def total_units(self) -> int:
        return self._total_units

    def unit_prefix_sums(self) -> np.ndarray:
        """Exact cumulative minor-unit sums; overflow ruled out at build time."""
        return np.cumsum(self._units)

    def scope_indices(self, scope: str, cutoff_months: int = DEFAULT_NEW_CUTOFF_MONTHS) -> np.ndarray:
        """Positions of the items in the given scope, in sorted order."""
        if scope not in _SCOPES:
            raise SchemaError(f"scope must be one of {_SCOPES}, got {scope!r}")
        if scope == "all":
            return np.arange(self.n, dtype=np.intp)
        if self._ages is None:
            is_new = np.zeros(self.n, dtype=bool)
        else:
            is_new = (self._ages >= 0) & (self._ages < cutoff_months)
        mask = is_new if scope == "new" else ~is_new
        return np.nonzero(mask)[0].astype(np.intp)

    def dim_index(self, dimension: str) -> int:
        try:
            return self._dims.index(dimension)
        except ValueError:
            raise UnknownDimension(
                f"unknown hierarchy dimension {dimension!r}; portfolio has {list(self._dims)}"
            ) from None

    def group_indices(
        self, dimensions: Sequence[str], within: np.ndarray | None = None
    ) -> list[tuple[tuple[tuple[str, str], ...], np.ndarray]]:
        """Disjoint groups for each member combination of `dimensions`.

        Returns (key, positions) pairs in lexicographic key order; positions
        stay ascending, i.e. each group preserves the global sort order. With
        no dimensions there is a single unconstrained group.
        """
        if within is None:
            within = np.arange(self.n, dtype=np.intp)
        if not dimensions:
            return [((), within)]
        col_ids = [self.dim_index(d) for d in dimensions]
        if len(set(col_ids)) != len(col_ids):
            raise SchemaError(f"duplicate dimension in grouping: {list(dimensions)}")
        if len(within) == 0:
            return []

        # Positional codes give lexicographic group order; compaction after each
        # dimension keeps them inside int64 regardless of cardinalities.
        code = np.zeros(len(within), dtype=np.int64)
        for ci in col_ids:
            col = self._member_cols[ci][within]
            uniq, inv = np.unique(col, return_inverse=True)
            code = code * len(uniq) + inv
            _, code = np.unique(code, return_inverse=True)
            code = code.astype(np.int64)

        order = np.argsort(code, kind="stable")
        sorted_codes = code[order]
        _, starts = np.unique(sorted_codes, return_index=True)
        groups = []
        for gi, start in enumerate(starts):
            end = int(starts[gi + 1]) if gi + 1 < len(starts) else len(sorted_codes)
            positions = np.sort(within[order[int(start) : end]])
            first = int(positions[0])
            key = tuple(
                (d, str(self._member_cols[ci][first])) for d, ci in zip(dimensions, col_ids)
            )
            groups.append((key, positions))
        return groups

    # ---------------------------------------------------------------- slicing

    def slice(self, key: SliceKey, *, cutoff_months: int = DEFAULT_NEW_CUTOFF_MONTHS) -> PortfolioSnapshot:
        """Sub-snapshot of the items matching every filter pair and the scope.

        Preserves the global sort order; the result may be empty (flagged via
        `is_empty`).
        """
        mask = np.ones(self.n, dtype=bool)
        for dim, member in sorted(key.filter):
            col = self._member_cols[self.dim_index(dim)]
            mask &= col == member
        if key.scope != "all":
            scope_mask = np.zeros(self.n, dtype=bool)
            scope_mask[self.scope_indices(key.scope, cutoff_months)] = True
            mask &= scope_mask
        return self.take(np.nonzero(mask)[0].astype(np.intp))

    def take(self, positions: np.ndarray) -> PortfolioSnapshot:
        """Sub-snapshot at the given ascending positions (engine helper)."""
        units = self._units[positions]
        # subset sums cannot overflow: the full total was bounds-checked at build
        return PortfolioSnapshot(
            ids=self._ids[positions],
            units=units,
            scale=self._scale,
            dims=self._dims,
            member_cols=tuple(col[positions] for col in self._member_cols),
            ages=None if self._ages is None else self._ages[positions],
            total_units=int(units.sum()) if len(units) else 0,
        )


def slice_portfolio(
    snapshot: PortfolioSnapshot, key: SliceKey, *, cutoff_months: int = DEFAULT_NEW_CUTOFF_MONTHS
) -> PortfolioSnapshot:
    """Function form of `PortfolioSnapshot.slice`."""
    return snapshot.slice(key, cutoff_months=cutoff_months)


def _coerce_value(raw: object) -> Decimal:
    if isinstance(raw, Decimal):
        return raw
    if isinstance(raw, int):
        return Decimal(raw)
    if isinstance(raw, str):
        return Decimal(raw)
    if isinstance(raw, float):
        # floats arrive via their shortest decimal representation
        return Decimal(str(raw))
    raise SchemaError(f"unsupported value type {type(raw).__name__}")


def build_snapshot(items: Iterable[Item]) -> PortfolioSnapshot:
    """Validate and sort items into an immutable snapshot.

    Order is value descending with id ascending as tie-break, so any
    permutation of the same item set builds an identical snapshot. Zero-value
    items are admitted and sort last.
    """
    items = list(items)
    if not items:
        raise EmptyPortfolio("a portfolio needs at least one item")

    dims: tuple[str, ...] | None = None
    mantissas: list[int] = []
    fracs: list[int] = []
    scale = 0
    for it in items:
        if not it.id:
            raise SchemaError("item ids must be nonempty strings")
        mantissa, frac = _decimal_to_parts(_coerce_value(it.value))
        if mantissa < 0:
            raise NegativeValue(f"item {it.id!r} has negative value {it.value}")
        if frac > MAX_VALUE_DECIMALS:
            raise SchemaError(
                f"item {it.id!r}: more than {MAX_VALUE_DECIMALS} decimal places in {it.value}"
            )
        mantissas.append(mantissa)
        fracs.append(frac)
        scale = max(scale, frac)
        item_dims = tuple(d for d, _ in it.hierarchy)
        if dims is None:
            dims = item_dims
        elif item_dims != dims:
            raise SchemaError(
                f"item {it.id!r} has hierarchy dimensions {item_dims}, expected {dims}"
            )
        if len(set(item_dims)) != len(item_dims):
            raise SchemaError(f"item {it.id!r} repeats a hierarchy dimension")
        if it.age_months is not None and it.age_months < 0:
            raise SchemaError(f"item {it.id!r} has negative age_months")

    assert dims is not None
    pow10 = [10**k for k in range(scale + 1)]
    units = [m * pow10[scale - f] for m, f in zip(mantissas, fracs)]

    ids = [it.id for it in items]
    member_cols = [[m for _, m in it.hierarchy] for it in items]
    ages = [(-1 if it.age_months is None else it.age_months) for it in items]
    has_ages = any(a >= 0 for a in ages)

    return _assemble(
        ids=ids,
        units=units,
        scale=scale,
        dims=dims,
        member_rows=member_cols,
        ages=ages if has_ages else None,
    )


def _assemble(
    ids: list[str],
    units: list[int],
    scale: int,
    dims: tuple[str, ...],
    member_rows: list[list[str]],
    ages: list[int] | None,
) -> PortfolioSnapshot:
    """Shared tail of snapshot construction: uniqueness, overflow, sort."""
    total = sum(units)
    if total >= _MAX_TOTAL_UNITS:
        raise SchemaError(
            "portfolio total exceeds the supported exact-arithmetic range; "
            "reduce value precision or split the portfolio"
        )

    id_arr = np.array(ids)
    unit_arr = np.array(units, dtype=np.int64)
    order = np.lexsort((id_arr, -unit_arr))

    sorted_ids = id_arr[order]
    if len(sorted_ids) > 1:
        by_id = np.sort(id_arr)
        dup = by_id[:-1] == by_id[1:]
        if dup.any():
            raise DuplicateItem(f"duplicate item id {by_id[:-1][dup][0]!r}")

    transposed = tuple(zip(*member_rows)) if dims else ()
    member_cols = tuple(np.array(col)[order] for col in transposed)
    age_arr = None
    if ages is not None:
        age_arr = np.array(ages, dtype=np.int32)[order]

    return PortfolioSnapshot(
        ids=sorted_ids,
        units=unit_arr[order],
        scale=scale,
        dims=dims,
        member_cols=member_cols,
        ages=age_arr,
        total_units=int(total),
    )
