"""File formats: portfolio CSV, config JSON, result CSV, and the JSON summary sidecar.

Portfolio files are UTF-8, comma-delimited, LF-terminated. The header needs
an `item_id` and a `value` column; an optional `age_months` column holds
integer months of sales history; every other column is a hierarchy dimension,
in header order. Values are plain nonnegative decimals (no currency symbols,
grouping, or exponents).

All output is deterministic: the same inputs produce byte-identical files.
Fractions are written with 6 decimal places; money amounts keep their exact
decimal representation.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import IO, Iterable, Sequence

import jsonschema

from . import __version__
from .concentration import ConcentrationIndex, HPolicy, ImpactRow, PolicyStep
from .errors import (
    DuplicateItem,
    EmptyPortfolio,
    NegativeValue,
    ParseError,
    SchemaError,
)
from .model import (
    MAX_VALUE_DECIMALS,
    PortfolioSnapshot,
    SliceKey,
    Thresholds,
    _assemble,
)
from .segmentation import PassSpec, StratificationResult, StratifyConfig, default_config

RESULT_COLUMNS = ("item_id", "class", "assigning_pass", "slice_C_k")

_RESERVED_COLUMNS = ("item_id", "value", "age_months")


def format_share(x: float) -> str:
    return f"{x:.6f}"


def _parse_value(raw: str, line: int) -> tuple[int, int]:
    """Parse a plain decimal into (mantissa, frac_digits); exact, no float step."""
    s = raw.strip()
    if not s:
        raise ParseError("empty value", line)
    body = s[1:] if s[0] in "+-" else s
    int_part, dot, frac_part = body.partition(".")
    if not (int_part or frac_part) or not (int_part + frac_part).isdigit():
        raise ParseError(f"value {raw!r} is not a plain decimal number", line)
    if dot and not frac_part:
        frac_part = ""
    if len(frac_part) > MAX_VALUE_DECIMALS:
        raise ParseError(f"value {raw!r} has more than {MAX_VALUE_DECIMALS} decimal places", line)
    mantissa = int(int_part + frac_part) if (int_part + frac_part) else 0
    if s[0] == "-" and mantissa != 0:
        raise NegativeValue(f"line {line}: negative value {raw!r}")
    return mantissa, len(frac_part)


def load_portfolio_stream(stream: Iterable[str]) -> PortfolioSnapshot:
    """Build a snapshot from CSV text lines; single streaming parse."""
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyPortfolio("portfolio file is empty") from None

    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        raise SchemaError("portfolio header has duplicate column names")
    for required in ("item_id", "value"):
        if required not in header:
            raise SchemaError(f"portfolio header is missing the {required!r} column")

    id_col = header.index("item_id")
    value_col = header.index("value")
    age_col = header.index("age_months") if "age_months" in header else None
    dim_cols = [i for i, h in enumerate(header) if h not in _RESERVED_COLUMNS]
    dims = tuple(header[i] for i in dim_cols)
    width = len(header)

    ids: list[str] = []
    mantissas: list[int] = []
    fracs: list[int] = []
    member_rows: list[list[str]] = []
    ages: list[int] = []
    has_ages = False
    scale = 0
    interned: dict[str, str] = {}

    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} columns, got {len(row)}", line)
        item_id = row[id_col].strip()
        if not item_id:
            raise ParseError("empty item_id", line)
        mantissa, frac = _parse_value(row[value_col], line)
        if frac > scale:
            scale = frac
        age = -1
        if age_col is not None:
            cell = row[age_col].strip()
            if cell:
                try:
                    age = int(cell)
                except ValueError:
                    raise ParseError(f"age_months {cell!r} is not an integer", line) from None
                if age < 0:
                    raise ParseError(f"age_months must be nonnegative, got {cell!r}", line)
                has_ages = True
        ids.append(item_id)
        mantissas.append(mantissa)
        fracs.append(frac)
        ages.append(age)
        member_rows.append([interned.setdefault(row[i], row[i]) for i in dim_cols])

    if not ids:
        raise EmptyPortfolio("portfolio file has a header but no rows")

    pow10 = [10**k for k in range(scale + 1)]
    units = [m * pow10[scale - f] for m, f in zip(mantissas, fracs)]
    return _assemble(
        ids=ids,
        units=units,
        scale=scale,
        dims=dims,
        member_rows=member_rows,
        ages=ages if has_ages else None,
    )


def load_portfolio(path: str | Path) -> PortfolioSnapshot:
    """Load a portfolio CSV file from disk."""
    with open(path, encoding="utf-8", newline="") as fh:
        return load_portfolio_stream(fh)


def load_portfolio_text(text: str) -> PortfolioSnapshot:
    return load_portfolio_stream(text.splitlines())


def dump_portfolio(snapshot: PortfolioSnapshot, fh: IO[str]) -> None:
    """Write a snapshot back to portfolio CSV (sorted order, exact values)."""
    writer = csv.writer(fh, lineterminator="\n")
    has_ages = snapshot.has_ages
    header = ["item_id", "value", *snapshot.dimensions] + (["age_months"] if has_ages else [])
    writer.writerow(header)
    for item in snapshot.items:
        row = [item.id, str(item.value), *[m for _, m in item.hierarchy]]
        if has_ages:
            row.append("" if item.age_months is None else str(item.age_months))
        writer.writerow(row)


# --------------------------------------------------------------------- config

CONFIG_SCHEMA: dict = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "thresholds": {"$ref": "#/$defs/thresholds"},
        "renormalize": {"enum": ["actual", "nominal"]},
        "new_item_cutoff_months": {"type": "integer", "minimum": 0},
        "a_share_cap": {"type": ["number", "null"], "exclusiveMinimum": 0, "maximum": 1},
        "passes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "scope": {"enum": ["all", "new", "inline"]},
                    "group_by": {"type": "array", "items": {"type": "string", "minLength": 1}},
                    "thresholds": {"$ref": "#/$defs/thresholds"},
                    "concentration_policy": {"$ref": "#/$defs/policy"},
                },
            },
        },
    },
    "$defs": {
        "thresholds": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t_a", "t_b", "t_c"],
            "properties": {
                "t_a": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "t_b": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "t_c": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "policy": {
            "type": ["object", "null"],
            "additionalProperties": False,
            "required": ["mode", "steps"],
            "properties": {
                "mode": {"enum": ["override", "add"]},
                "steps": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["h_min", "value"],
                        "properties": {
                            "h_min": {"type": "number", "minimum": 0},
                            "value": {"type": "number"},
                        },
                    },
                },
            },
        },
    },
}


def _thresholds_from_dict(doc: dict) -> Thresholds:
    return Thresholds(t_a=doc["t_a"], t_b=doc["t_b"], t_c=doc["t_c"])


def _policy_from_dict(doc: dict | None) -> HPolicy | None:
    if doc is None:
        return None
    return HPolicy(
        steps=tuple(PolicyStep(h_min=s["h_min"], value=s["value"]) for s in doc["steps"]),
        mode=doc["mode"],
    )


def config_from_dict(doc: dict) -> StratifyConfig:
    """Validate a config document and build the typed config."""
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"config: {exc.message}") from None
    passes_doc = doc.get("passes", [{"name": "unconstrained"}])
    passes = tuple(
        PassSpec(
            name=p["name"],
            scope=p.get("scope", "all"),
            group_by=tuple(p.get("group_by", ())),
            thresholds=_thresholds_from_dict(p["thresholds"]) if "thresholds" in p else None,
            concentration_policy=_policy_from_dict(p.get("concentration_policy")),
        )
        for p in passes_doc
    )
    defaults = default_config()
    return StratifyConfig(
        passes=passes,
        thresholds=(
            _thresholds_from_dict(doc["thresholds"])
            if "thresholds" in doc
            else defaults.thresholds
        ),
        renormalize=doc.get("renormalize", defaults.renormalize),
        new_item_cutoff_months=doc.get(
            "new_item_cutoff_months", defaults.new_item_cutoff_months
        ),
        a_share_cap=doc.get("a_share_cap"),
    )


def config_to_dict(config: StratifyConfig) -> dict:
    """Inverse of `config_from_dict`; round-trips exactly."""
    doc: dict = {
        "thresholds": {
            "t_a": config.thresholds.t_a,
            "t_b": config.thresholds.t_b,
            "t_c": config.thresholds.t_c,
        },
        "renormalize": config.renormalize,
        "new_item_cutoff_months": config.new_item_cutoff_months,
        "a_share_cap": config.a_share_cap,
        "passes": [],
    }
    for p in config.passes:
        entry: dict = {"name": p.name, "scope": p.scope, "group_by": list(p.group_by)}
        if p.thresholds is not None:
            entry["thresholds"] = {
                "t_a": p.thresholds.t_a,
                "t_b": p.thresholds.t_b,
                "t_c": p.thresholds.t_c,
            }
        if p.concentration_policy is not None:
            entry["concentration_policy"] = {
                "mode": p.concentration_policy.mode,
                "steps": [
                    {"h_min": s.h_min, "value": s.value}
                    for s in p.concentration_policy.steps
                ],
            }
        doc["passes"].append(entry)
    return doc


def load_config(path: str | Path) -> StratifyConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"config {path}: top level must be an object")
    return config_from_dict(doc)


# -------------------------------------------------------------------- results

def write_result_csv(result: StratificationResult, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for item_id, label, origin, share in result.iter_rows():
        writer.writerow([item_id, label, origin, format_share(share)])


def summary_dict(
    result: StratificationResult,
    snapshot: PortfolioSnapshot,
    config: StratifyConfig,
    *,
    run_meta: dict | None = None,
) -> dict:
    """The JSON sidecar: per-pass counts and revenue, per-slice concentration,
    coverage, and class totals. Deterministic; any run metadata sits under "run"."""
    counts = result.class_counts()
    values = result.class_value()
    doc = {
        "portfolio": {"n": snapshot.n, "total_value": str(snapshot.total_value)},
        "config": config_to_dict(config),
        "classes": {
            label.name: {"count": counts[label], "value": str(values[label])}
            for label in counts
        },
        "a_coverage": format_share(result.a_share),
        "passes": [
            {
                "name": p.name,
                "scope": p.scope,
                "group_by": list(p.group_by),
                "new_a_count": p.new_a_count,
                "new_a_value": str(p.new_a_value),
                "halted_by_cap": p.halted_by_cap,
                "groups": [
                    {
                        "members": {d: m for d, m in g.members},
                        "n": g.n,
                        "h": None if g.h is None else round(g.h, 4),
                        "coverage": None if g.coverage is None else format_share(g.coverage),
                        "effective_t_a": (
                            None if g.effective_t_a is None else format_share(g.effective_t_a)
                        ),
                        "underrepresented": g.underrepresented,
                        "new_a_count": g.new_a_count,
                        "new_a_value": str(g.new_a_value),
                    }
                    for g in p.groups
                ],
            }
            for p in result.passes
        ],
        "stage2": {
            "mode": result.stage2.mode,
            "removed_share": format_share(result.stage2.removed_share),
            "t_b_prime": (
                None if result.stage2.t_b_prime is None else format_share(result.stage2.t_b_prime)
            ),
            "t_c_prime": (
                None if result.stage2.t_c_prime is None else format_share(result.stage2.t_c_prime)
            ),
            "note": result.stage2.note,
        },
        "run": {"tool": f"stratos {__version__}", **(run_meta or {})},
    }
    return doc


def write_summary_json(doc: dict, fh: IO[str]) -> None:
    json.dump(doc, fh, indent=2, sort_keys=True)
    fh.write("\n")


def write_hhi_report_csv(
    rows: Sequence[tuple[SliceKey, ConcentrationIndex]], dimensions: Sequence[str], fh: IO[str]
) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([*dimensions, "n", "h", "h_floor"])
    for key, index in rows:
        members = dict(key.filter)
        writer.writerow(
            [*(members.get(d, "") for d in dimensions), index.n, f"{index.h:.4f}", f"{index.floor:.4f}"]
        )


def write_impact_csv(rows: Sequence[ImpactRow], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t_a", "a_count", "a_revenue_share", "entering", "leaving"])
    for row in rows:
        writer.writerow(
            [
                format_share(row.t_a),
                row.a_count,
                format_share(row.a_revenue_share),
                ";".join(row.entering),
                ";".join(row.leaving),
            ]
        )
