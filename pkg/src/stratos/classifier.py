"""Single-slice ABCD classification over cumulative revenue shares.

The class boundaries are inclusive (a share exactly on a threshold belongs to
the higher class), and an item whose cumulative share crosses t_a or t_b is
pulled up into the class it straddles into. The top class is guaranteed at
least one member whenever the slice has positive revenue. There is no pull-up
at t_c: an item whose share exceeds t_c is D, which keeps the C/D boundary a
hard cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateRenormalization, EmptyPortfolio, ZeroTotal
from .model import ClassLabel, PortfolioSnapshot, Thresholds, SHARE_TOLERANCE


def share_leq(x: float, t: float) -> bool:
    """x <= t under the shared comparison tolerance."""
    return x <= t + SHARE_TOLERANCE


def share_lt(x: float, t: float) -> bool:
    """x < t, strictly beyond the shared comparison tolerance."""
    return x < t - SHARE_TOLERANCE


@dataclass(frozen=True)
class CumulativeShares:
    """C_1..C_n for a sorted slice, with the implicit C_0 = 0.

    Non-decreasing, C_1 > 0, and C_n = 1 within tolerance.
    """

    shares: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.shares, dtype=np.float64)
        if arr.ndim != 1 or len(arr) == 0:
            raise EmptyPortfolio("cumulative shares need at least one entry")
        if np.any(np.diff(arr) < 0):
            raise ValueError("cumulative shares must be non-decreasing")
        if not arr[0] > 0:
            raise ValueError("C_1 must be positive")
        if abs(float(arr[-1]) - 1.0) > SHARE_TOLERANCE:
            raise ValueError(f"C_n must equal 1, got {arr[-1]!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "shares", arr)

    @classmethod
    def from_sequence(cls, shares: Sequence[float]) -> "CumulativeShares":
        return cls(np.array(shares, dtype=np.float64))

    def c(self, k: int) -> float:
        """C_k with C_0 = 0."""
        if k == 0:
            return 0.0
        return float(self.shares[k - 1])

    def __len__(self) -> int:
        return len(self.shares)


@dataclass(frozen=True)
class ClassAssignment:
    """Labels aligned with the sorted slice; never increasing in priority down the list."""

    labels: tuple[ClassLabel, ...]

    def count(self, label: ClassLabel) -> int:
        return sum(1 for x in self.labels if x is label)

    @property
    def a_count(self) -> int:
        return self.count(ClassLabel.A)

    def __len__(self) -> int:
        return len(self.labels)


def cumulative_shares(snapshot: PortfolioSnapshot) -> CumulativeShares:
    """Fraction of total value contributed by the top k items, for every k.

    Prefix sums are exact integers; each share is a single float rounding of
    an exact ratio.
    """
    if snapshot.is_empty:
        raise EmptyPortfolio("cannot compute shares of an empty portfolio")
    if snapshot.total_units == 0:
        raise ZeroTotal("portfolio has zero total value; shares are undefined")
    return CumulativeShares(share_array(snapshot.unit_prefix_sums(), snapshot.total_units))


def share_array(prefix_units: np.ndarray, total_units: int) -> np.ndarray:
    return prefix_units.astype(np.float64) / float(total_units)


def cut_index(shares: np.ndarray, threshold: float, *, straddle: bool = True) -> int:
    """Rank of the last item inside the class whose boundary is `threshold`.

    `shares` must be non-decreasing. The class holds every item whose own
    cumulative share is within the threshold (inclusive); with `straddle`, the
    single item whose share interval crosses the threshold is included too,
    which also guarantees a nonempty class for the top boundary.
    """
    n = len(shares)
    within = int(np.searchsorted(shares, threshold + SHARE_TOLERANCE, side="right"))
    if not straddle:
        return within
    crossed = 1 + min(int(np.searchsorted(shares, threshold - SHARE_TOLERANCE, side="left")), n - 1)
    return max(within, crossed)


def class_cuts(shares: np.ndarray, t: Thresholds) -> tuple[int, int, int]:
    """(k_a, k_b, k_c): the last A, B, and C ranks; D is everything beyond."""
    k_a = cut_index(shares, t.t_a)
    k_b = max(k_a, cut_index(shares, t.t_b))
    k_c = max(k_b, cut_index(shares, t.t_c, straddle=False))
    return k_a, k_b, k_c


_LABEL_BY_CODE = (ClassLabel.A, ClassLabel.B, ClassLabel.C, ClassLabel.D)


def label_codes(shares: np.ndarray, t: Thresholds) -> np.ndarray:
    """uint8 label codes (0=A..3=D) for every rank; engine-side fast path."""
    k_a, k_b, k_c = class_cuts(shares, t)
    codes = np.full(len(shares), ClassLabel.D.value, dtype=np.uint8)
    codes[:k_c] = ClassLabel.C.value
    codes[:k_b] = ClassLabel.B.value
    codes[:k_a] = ClassLabel.A.value
    return codes


def classify(shares: CumulativeShares, t: Thresholds) -> ClassAssignment:
    """Assign A/B/C/D to every rank of a sorted slice.

    The top item is always A (its share interval starts at zero and either
    stays within t_a or crosses it).
    """
    codes = label_codes(shares.shares, t)
    return ClassAssignment(tuple(_LABEL_BY_CODE[c] for c in codes))


def classify_snapshot(snapshot: PortfolioSnapshot, t: Thresholds) -> ClassAssignment:
    """Classify a whole snapshot; a zero-total portfolio is all D (nothing to prioritize)."""
    if snapshot.is_empty:
        raise EmptyPortfolio("cannot classify an empty portfolio")
    if snapshot.total_units == 0:
        return ClassAssignment((ClassLabel.D,) * snapshot.n)
    return classify(cumulative_shares(snapshot), t)


def renormalize_thresholds(t: Thresholds, removed_share: float) -> Thresholds:
    """Rescale thresholds for reclassifying the remainder after some revenue share is removed.

    Applies the unique affine map sending removed_share -> 0 and 1 -> 1 to t_b
    and t_c (and, as a placeholder, to t_a, which later stages do not use).
    Raises DegenerateRenormalization when the removed share already meets or
    exceeds t_b, leaving no room for a B class.
    """
    if not 0.0 <= removed_share < 1.0:
        raise ValueError(f"removed_share must be in [0, 1), got {removed_share}")
    if not share_lt(removed_share, t.t_b):
        raise DegenerateRenormalization(
            f"removed share {removed_share:.6f} leaves no room below t_b={t.t_b}",
            removed_share=removed_share,
        )
    rest = 1.0 - removed_share
    t_b = (t.t_b - removed_share) / rest
    t_c = (t.t_c - removed_share) / rest
    t_c = min(t_c, 1.0 - 1e-15)
    if share_lt(removed_share, t.t_a):
        t_a = (t.t_a - removed_share) / rest
    else:
        t_a = t_b / 2.0  # placeholder: the rescaled triple has no meaningful A boundary
    return Thresholds(t_a=max(t_a, 1e-15), t_b=t_b, t_c=t_c)
