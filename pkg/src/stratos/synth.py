"""Deterministic synthetic portfolios for benchmarks and load tests.

Values follow a truncated power law (most revenue in few items); the
hierarchy is a proper four-level tree where each member has exactly one
parent, so hierarchy passes group realistically.
"""

from __future__ import annotations

import csv
import random
from pathlib import Path
from typing import IO, Iterator

DIMENSIONS = ("division", "brand", "category", "subcategory")

_FANOUT = (3, 12, 5, 4)  # children per node at each level below the root


def generate_rows(
    n: int, *, seed: int = 0, alpha: float = 1.2, max_value: float = 250_000.0
) -> Iterator[tuple[str, str, str, str, str, str, str]]:
    """Yield (item_id, value, division, brand, category, subcategory, age_months) rows."""
    rng = random.Random(seed)
    brands_per_div = _FANOUT[1]
    cats_per_brand = _FANOUT[2]
    subs_per_cat = _FANOUT[3]
    for i in range(n):
        div = rng.randrange(_FANOUT[0])
        brand = div * brands_per_div + rng.randrange(brands_per_div)
        cat = brand * cats_per_brand + rng.randrange(cats_per_brand)
        sub = cat * subs_per_cat + rng.randrange(subs_per_cat)
        value = min(max_value, 50.0 * rng.paretovariate(alpha))
        age = rng.randrange(0, 60) if rng.random() < 0.9 else None
        yield (
            f"SKU{i:07d}",
            f"{value:.2f}",
            f"DIV{div:02d}",
            f"BR{brand:03d}",
            f"CAT{cat:04d}",
            f"SUB{sub:05d}",
            "" if age is None else str(age),
        )


def write_portfolio_csv(target: str | Path | IO[str], n: int, *, seed: int = 0) -> None:
    """Write a synthetic portfolio CSV with the standard four-level hierarchy."""

    def _write(fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["item_id", "value", *DIMENSIONS, "age_months"])
        writer.writerows(generate_rows(n, seed=seed))

    if hasattr(target, "write"):
        _write(target)  # type: ignore[arg-type]
    else:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
