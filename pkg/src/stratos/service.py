"""HTTP/JSON facade for interactive calibration.

Uploaded portfolios become immutable in-memory snapshots behind opaque ids;
every other endpoint is a pure function of a registered snapshot and the
request body, so repeated requests return identical bodies. Fractions are
serialized as 6-decimal strings for cross-client byte stability; exact money
amounts are serialized as decimal strings.
"""

from __future__ import annotations

import itertools
import threading
from collections import OrderedDict
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .classifier import cumulative_shares
from .concentration import hhi_report, simulate_threshold_impact
from .errors import (
    EmptyPortfolio,
    PortfolioError,
    SchemaError,
    UnknownDimension,
    ZeroTotal,
)
from .io import config_from_dict, format_share, load_portfolio_text, summary_dict
from .model import DEFAULT_THRESHOLDS, PortfolioSnapshot
from .productivity import BlendSpec, blend_curve, optimal_blend_point, productivity_curve
from .segmentation import stratify

DEFAULT_MAX_UPLOAD_BYTES = 100 * 1024 * 1024


class PortfolioHandle:
    __slots__ = ("portfolio_id", "snapshot")

    def __init__(self, portfolio_id: str, snapshot: PortfolioSnapshot):
        self.portfolio_id = portfolio_id
        self.snapshot = snapshot


class PortfolioRegistry:
    """Single-writer/multi-reader store of immutable snapshots, unique ids per lifetime.

    With a spill directory, uploads are also written to disk and the in-memory
    set is bounded: least-recently-used snapshots are dropped and reloaded
    from their spilled CSV on demand, so long calibration sessions do not
    accumulate memory.
    """

    def __init__(self, spill_dir: str | Path | None = None, max_in_memory: int = 64) -> None:
        self._lock = threading.Lock()
        self._by_id: OrderedDict[str, PortfolioHandle] = OrderedDict()
        self._counter = itertools.count(1)
        self._spill_dir = Path(spill_dir) if spill_dir is not None else None
        self._max_in_memory = max(1, max_in_memory)
        if self._spill_dir is not None:
            self._spill_dir.mkdir(parents=True, exist_ok=True)

    def _spill_path(self, portfolio_id: str) -> Path:
        assert self._spill_dir is not None
        return self._spill_dir / f"{portfolio_id}.csv"

    def register(self, snapshot: PortfolioSnapshot, raw_csv: str | None = None) -> PortfolioHandle:
        with self._lock:
            handle = PortfolioHandle(f"p{next(self._counter):06d}", snapshot)
            self._by_id[handle.portfolio_id] = handle
            if self._spill_dir is not None:
                if raw_csv is not None:
                    self._spill_path(handle.portfolio_id).write_text(raw_csv, encoding="utf-8")
                while len(self._by_id) > self._max_in_memory:
                    self._by_id.popitem(last=False)
            return handle

    def get(self, portfolio_id: str) -> PortfolioHandle | None:
        with self._lock:
            handle = self._by_id.get(portfolio_id)
            if handle is not None:
                self._by_id.move_to_end(portfolio_id)
                return handle
        if self._spill_dir is None:
            return None
        path = self._spill_path(portfolio_id)
        if not path.exists():
            return None
        snapshot = load_portfolio_text(path.read_text(encoding="utf-8"))
        with self._lock:
            handle = self._by_id.get(portfolio_id)
            if handle is None:
                handle = PortfolioHandle(portfolio_id, snapshot)
                self._by_id[handle.portfolio_id] = handle
                while len(self._by_id) > self._max_in_memory:
                    self._by_id.popitem(last=False)
            return handle


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app(
    *,
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES,
    cors_origins: tuple[str, ...] = ("*",),
    spill_dir: str | Path | None = None,
    max_in_memory: int = 64,
) -> FastAPI:
    app = FastAPI(title="stratos calibration service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = PortfolioRegistry(spill_dir=spill_dir, max_in_memory=max_in_memory)
    app.state.registry = registry

    @app.post("/v1/portfolios")
    async def upload_portfolio(request: Request) -> Response:
        body = await request.body()
        if len(body) > max_upload_bytes:
            return _error(413, f"upload exceeds {max_upload_bytes} bytes")
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            return _error(400, "portfolio must be UTF-8 text")
        try:
            snapshot = load_portfolio_text(text)
        except PortfolioError as exc:
            return _error(400, str(exc))
        handle = registry.register(snapshot, raw_csv=text)
        return JSONResponse(
            {
                "portfolio_id": handle.portfolio_id,
                "n": snapshot.n,
                "total_value": str(snapshot.total_value),
            }
        )

    def _resolve(portfolio_id: str) -> PortfolioHandle | JSONResponse:
        handle = registry.get(portfolio_id)
        if handle is None:
            return _error(404, f"unknown portfolio {portfolio_id!r}")
        return handle

    @app.post("/v1/portfolios/{portfolio_id}/stratify")
    async def stratify_portfolio(portfolio_id: str, request: Request) -> Response:
        handle = _resolve(portfolio_id)
        if isinstance(handle, JSONResponse):
            return handle
        try:
            doc = await request.json()
        except Exception:
            return _error(422, "body must be a JSON config document")
        if not isinstance(doc, dict):
            return _error(422, "config must be a JSON object")
        try:
            config = config_from_dict(doc)
            result = stratify(handle.snapshot, config)
        except (SchemaError, EmptyPortfolio) as exc:
            return _error(422, str(exc))
        items = [
            {
                "item_id": item_id,
                "class": label,
                "assigned_by": origin,
                "share": format_share(share),
            }
            for item_id, label, origin, share in result.iter_rows()
        ]
        summary = summary_dict(result, handle.snapshot, config)
        summary.pop("run", None)  # keep bodies pure functions of (snapshot, request)
        return JSONResponse({"items": items, "summary": summary})

    @app.get("/v1/portfolios/{portfolio_id}/hhi")
    async def concentration_report(portfolio_id: str, dims: str = "") -> Response:
        handle = _resolve(portfolio_id)
        if isinstance(handle, JSONResponse):
            return handle
        dimensions = [d for d in dims.split(",") if d]
        try:
            rows = hhi_report(handle.snapshot, dimensions)
        except (UnknownDimension, SchemaError, EmptyPortfolio, ZeroTotal) as exc:
            return _error(422, str(exc))
        sizes = {index.n for _, index in rows}
        return JSONResponse(
            {
                "rows": [
                    {
                        "members": dict(sorted(key.filter)),
                        "n": index.n,
                        "h": round(index.h, 4),
                        "h_floor": round(index.floor, 4),
                    }
                    for key, index in rows
                ],
                "mixed_n": len(sizes) > 1,
            }
        )

    @app.post("/v1/portfolios/{portfolio_id}/simulate")
    async def simulate(portfolio_id: str, request: Request) -> Response:
        handle = _resolve(portfolio_id)
        if isinstance(handle, JSONResponse):
            return handle
        try:
            doc = await request.json()
        except Exception:
            return _error(422, "body must be a JSON object")
        if not isinstance(doc, dict) or "candidates" not in doc:
            return _error(422, "body must contain a 'candidates' array")
        candidates = doc["candidates"]
        if not isinstance(candidates, list) or not all(
            isinstance(c, (int, float)) for c in candidates
        ):
            return _error(422, "'candidates' must be an array of numbers")
        t_b = doc.get("t_b", DEFAULT_THRESHOLDS.t_b)
        t_c = doc.get("t_c", DEFAULT_THRESHOLDS.t_c)
        baseline = doc.get("baseline_t_a", DEFAULT_THRESHOLDS.t_a)
        try:
            rows = simulate_threshold_impact(
                handle.snapshot, candidates, t_b, t_c, baseline_t_a=baseline
            )
        except (ValueError, PortfolioError) as exc:
            return _error(422, str(exc))
        return JSONResponse(
            {
                "rows": [
                    {
                        "t_a": format_share(row.t_a),
                        "a_count": row.a_count,
                        "a_revenue_share": format_share(row.a_revenue_share),
                        "entering": list(row.entering),
                        "leaving": list(row.leaving),
                    }
                    for row in rows
                ]
            }
        )

    @app.get("/v1/portfolios/{portfolio_id}/productivity")
    async def productivity(portfolio_id: str, j: int, J: float) -> Response:
        handle = _resolve(portfolio_id)
        if isinstance(handle, JSONResponse):
            return handle
        try:
            blend = BlendSpec(j=j, J=J)
            curve = productivity_curve(handle.snapshot)
            blended = blend_curve(curve, blend)
            p_star, residual = optimal_blend_point(curve, blend)
        except (ValueError, PortfolioError) as exc:
            return _error(422, str(exc))
        shares = (
            cumulative_shares(handle.snapshot).shares.tolist()
            if handle.snapshot.total_units > 0
            else [0.0] * handle.snapshot.n
        )
        return JSONResponse(
            {
                "s": list(curve.s),
                "t": list(blended.t),
                "t0": blended.t0,
                "p_star": p_star,
                "t_a_star": format_share(blended.t_a_star),
                "residual": residual,
                "shares": [format_share(x) for x in shares],
            }
        )

    return app
