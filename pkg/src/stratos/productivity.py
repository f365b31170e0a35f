"""Prefix productivity of a sorted portfolio and the optimal blend with a fixed second portfolio.

Productivity at depth p is the average value of the top p items, a
non-increasing sequence for a portfolio sorted high to low. Blending a fixed
second portfolio (j items, total value J) with the top p items gives a
combined average that first rises while each next item is worth more than the
running blend, peaks, and then falls; the peak is where a value threshold for
the top class stops paying for itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

import numpy as np

from .classifier import cumulative_shares
from .errors import EmptyPortfolio
from .model import PortfolioSnapshot


@dataclass(frozen=True)
class ProductivityCurve:
    """S_1..S_n (average value of the top p items) plus the value sequence it came from."""

    s: tuple[float, ...]
    revenues: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.s:
            raise EmptyPortfolio("a productivity curve needs at least one item")
        if len(self.s) != len(self.revenues):
            raise ValueError("s and revenues must be index-aligned")

    @classmethod
    def from_revenues(cls, revenues: Sequence[float]) -> "ProductivityCurve":
        values = [float(r) for r in revenues]
        if any(b > a for a, b in zip(values, values[1:])):
            raise ValueError("revenues must be sorted high to low")
        if any(v < 0 for v in values):
            raise ValueError("revenues must be nonnegative")
        prefix = np.cumsum(np.array(values, dtype=np.float64))
        s = prefix / np.arange(1, len(values) + 1, dtype=np.float64)
        return cls(s=tuple(float(x) for x in s), revenues=tuple(values))

    def __len__(self) -> int:
        return len(self.s)


@dataclass(frozen=True)
class BlendSpec:
    """The fixed second portfolio: item count j and total value J."""

    j: int
    J: float

    def __post_init__(self) -> None:
        if self.j < 1:
            raise ValueError(f"second portfolio needs at least one item, got j={self.j}")
        J = float(self.J) if not isinstance(self.J, Decimal) else float(self.J)
        if J < 0:
            raise ValueError(f"second portfolio value must be nonnegative, got J={self.J}")
        object.__setattr__(self, "J", J)

    @property
    def s_j(self) -> float:
        """Productivity of the second portfolio on its own."""
        return self.J / self.j


@dataclass(frozen=True)
class BlendCurve:
    """Combined productivity T_1..T_n, its peak index, and the cumulative share at the peak."""

    t: tuple[float, ...]
    p_star: int
    t_a_star: float
    t0: float

    def __len__(self) -> int:
        return len(self.t)


def productivity_curve(snapshot: PortfolioSnapshot) -> ProductivityCurve:
    """S_p for every depth p of the sorted snapshot, in one pass."""
    if snapshot.is_empty:
        raise EmptyPortfolio("cannot build a productivity curve for an empty portfolio")
    return ProductivityCurve.from_revenues(snapshot.value_floats().tolist())


def optimal_blend_point(curve: ProductivityCurve, blend: BlendSpec) -> tuple[int, float]:
    """(p_star, residual): the blend-maximizing depth and how close the peak item's
    value sits to the blended average there.

    The combined average rises at step p exactly when the p-th value exceeds
    the previous blend, so the peak is the deepest p whose value still clears
    it; ties resolve to the smallest depth. The residual r_{p_star} - T_{p_star}
    shrinks as the value grid gets finer.
    """
    r = curve.revenues
    j, J = blend.j, blend.J
    p_star = 1
    prefix = 0.0
    for p, value in enumerate(r, start=1):
        # value > T_{p-1}, cross-multiplied to stay exact for integer-valued data
        if p == 1 or value * (p - 1 + j) > prefix + J:
            p_star = p
        prefix += value
    t_p_star = (sum(r[:p_star]) + J) / (p_star + j)
    return p_star, r[p_star - 1] - t_p_star


def blend_curve(curve: ProductivityCurve, blend: BlendSpec) -> BlendCurve:
    """T_p = (p*S_p + J)/(p + j) for every depth, plus the peak and its cumulative share."""
    n = len(curve)
    prefix = np.cumsum(np.array(curve.revenues, dtype=np.float64))
    t = (prefix + blend.J) / (np.arange(1, n + 1, dtype=np.float64) + blend.j)
    p_star, _ = optimal_blend_point(curve, blend)
    total = float(prefix[-1])
    t_a_star = float(prefix[p_star - 1]) / total if total > 0 else 0.0
    return BlendCurve(
        t=tuple(float(x) for x in t),
        p_star=p_star,
        t_a_star=t_a_star,
        t0=blend.s_j,
    )


def solve_t_a(snapshot: PortfolioSnapshot, blend: BlendSpec) -> float:
    """The cumulative share at the blend-maximizing depth, used as a derived t_a.

    Models the case where the given second portfolio (the top-class items every
    later pass would contribute) is fixed, and the first, unconstrained pass
    should stop exactly where the combined average value per item peaks.
    """
    shares = cumulative_shares(snapshot)
    p_star, _ = optimal_blend_point(productivity_curve(snapshot), blend)
    return shares.c(p_star)
