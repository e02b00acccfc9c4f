"""Authoring session and HTTP service.

A session owns one chart: the current spec, its layout graph and simulation
state, and a revision counter that increments by exactly one per accepted
edit. Edits are atomic: they apply to a copy, validate, relayout
incrementally (warm start, capped tick budget) and only then replace the
session state; a rejected edit changes nothing.

Endpoints: GET /api/chart, /api/layout, /api/svg, /api/config; POST /api/ops,
/api/save, /api/relayout; long-poll GET /api/updates broadcasts
{revision, layout} after each accepted op.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import asdict, dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .config import RenderConfig, config_to_json
from .graph import build_graph
from .layout import incremental_relayout, init_positions, run
from .model import (
    ChartSpec,
    ChartError,
    LabelDef,
    LinkDef,
    StreamDef,
    Violation,
    parse_labels,
    parse_links,
    parse_streams,
    serialize,
    validate,
)
from .render import render_layout

EDIT_REHEAT_ALPHA = 0.3
EDIT_TICK_BUDGET = 120


class EditRejection(ChartError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass
class AddStream:
    t0: float
    t1: float
    color: str
    parent: str | None = None


@dataclass
class AddLink:
    """Link two entities; a null endpoint creates a new stream for it.

    When ``src`` (or ``dst``) is empty the drag started (or ended) on the
    canvas: a fresh stream spanning ``src_span``/``dst_span`` is created and
    the link attached to it, as one atomic op.
    """

    src: str | None
    t0: float
    dst: str | None
    t1: float | None = None
    merge: bool = False
    src_span: tuple[float, float] | None = None
    dst_span: tuple[float, float] | None = None
    color: str = "#888888"


@dataclass
class SetSizeAt:
    stream: str
    t: float
    size: float


@dataclass
class AddLabel:
    stream: str
    t: float
    text: str
    type: str = "in"
    size: float = 1.0


@dataclass
class DeleteEntity:
    kind: str  # stream | link | label
    id: str


@dataclass
class ReplaceCsv:
    table: str  # streams | links | labels
    text: str


EditOp = AddStream | AddLink | SetSizeAt | AddLabel | DeleteEntity | ReplaceCsv

_OP_TYPES = {
    "add_stream": (AddStream, {"t0", "t1", "color", "parent"}),
    "add_link": (
        AddLink,
        {"from": "src", "t0": None, "to": "dst", "t1": None, "merge": None,
         "fromSpan": "src_span", "toSpan": "dst_span", "color": None},
    ),
    "set_size_at": (SetSizeAt, {"stream", "t", "size"}),
    "add_label": (AddLabel, {"stream", "t", "text", "type", "size"}),
    "delete": (DeleteEntity, {"kind", "id"}),
    "replace_csv": (ReplaceCsv, {"table", "text"}),
}


def parse_op(data: dict) -> EditOp:
    """Decode a JSON op body ({"op": ..., ...fields}) into an EditOp.

    Raises:
        EditRejection: unknown op or missing/unusable fields.
    """
    kind = data.get("op")
    if kind not in _OP_TYPES:
        raise EditRejection([Violation("ops", str(kind), "unknown op type")])
    cls, fields_spec = _OP_TYPES[kind]
    kwargs = {}
    if isinstance(fields_spec, dict):  # json key -> attribute renames
        for key, attr in fields_spec.items():
            if key in data:
                kwargs[attr or key] = data[key]
    else:
        for key in fields_spec:
            if key in data:
                kwargs[key] = data[key]
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise EditRejection([Violation("ops", kind, f"bad op fields: {exc}")]) from None


class Session:
    """Single-owner authoring session with serialized edits."""

    def __init__(self, spec: ChartSpec, config: RenderConfig | None = None):
        self.config = config or RenderConfig()
        violations = validate(spec, step=self.config.step)
        if violations:
            raise EditRejection(violations)
        self.spec = spec
        self.revision = 0
        self.last_edit_ticks = 0
        self._cond = threading.Condition()
        self._relayout_full()

    # -- layout management

    def _relayout_full(self):
        self.graph = build_graph(
            self.spec, step=self.config.step, canvas=self.config.canvas,
            default_size=self.config.default_size, base_font_px=self.config.base_font_px,
        )
        self.state = init_positions(self.graph, self.config.force, self.config.canvas,
                                    seed=self.config.seed)
        run(self.state, self.graph, self.config.force, self.config.canvas)

    def relayout(self) -> None:
        """Full cold relayout of the current spec (explicit API call)."""
        with self._cond:
            self._relayout_full()
            self._cond.notify_all()

    # -- edit application

    def apply(self, op: EditOp) -> dict:
        """Apply one edit; returns {"revision", "created_id"?}.

        Raises:
            EditRejection: validation failed; session state is unchanged.
        """
        with self._cond:
            try:
                new_spec, created_id = _transform(self.spec, op, self.config)
            except EditRejection:
                raise
            except (ValueError, TypeError) as exc:
                raise EditRejection(
                    [Violation("ops", type(op).__name__, f"bad value: {exc}")]
                ) from None
            violations = validate(new_spec, step=self.config.step)
            if violations:
                raise EditRejection(violations)
            new_graph = build_graph(
                new_spec, step=self.config.step, canvas=self.config.canvas,
                default_size=self.config.default_size, base_font_px=self.config.base_font_px,
            )
            new_state = incremental_relayout(
                self.state, self.graph, new_graph, self.config.force, reheat=EDIT_REHEAT_ALPHA
            )
            before = new_state.tick_count
            run(new_state, new_graph, self.config.force, self.config.canvas,
                max_ticks=EDIT_TICK_BUDGET)
            self.spec, self.graph, self.state = new_spec, new_graph, new_state
            self.last_edit_ticks = new_state.tick_count - before
            self.revision += 1
            self._cond.notify_all()
            result = {"revision": self.revision}
            if created_id is not None:
                result["created_id"] = created_id
            return result

    # -- views

    def layout_json(self) -> dict:
        nodes = [
            {
                "id": nd.id, "kind": nd.kind, "owner": nd.owner, "t": nd.t,
                "x": nd.x, "y": float(self.state.y[nd.id]), "size": nd.size,
                "parent": nd.parent,
            }
            for nd in self.graph.nodes
        ]
        return {"revision": self.revision, "nodes": nodes}

    def chart_json(self) -> dict:
        return {
            "revision": self.revision,
            "streams": [
                {"id": s.id, "t0": s.t0, "t1": s.t1, "color": s.color,
                 "sizes": [[t, v] for t, v in s.sizes], "parent": s.parent}
                for s in self.spec.streams
            ],
            "links": [
                {"from": l.src, "t0": l.t0, "to": l.dst, "t1": l.t1, "merge": l.merge}
                for l in self.spec.links
            ],
            "labels": [asdict(l) for l in self.spec.labels],
        }

    def svg_bytes(self) -> bytes:
        return render_layout(self.spec, self.graph, self.state, self.config).data

    def wait_for_update(self, since: int, timeout: float) -> bool:
        """Block until revision exceeds *since*; False on timeout."""
        deadline = time.monotonic() + timeout
        with self._cond:
            while self.revision <= since:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
                self._cond.wait(remaining)
            return True

    def save(self, directory: str) -> None:
        streams_csv, links_csv, labels_csv = serialize(self.spec)
        os.makedirs(directory, exist_ok=True)
        for name, text in (
            ("streams.csv", streams_csv), ("links.csv", links_csv), ("labels.csv", labels_csv),
        ):
            with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
                fh.write(text)


def _next_stream_id(spec: ChartSpec) -> str:
    existing = {s.id for s in spec.streams}
    n = 1
    while f"S{n}" in existing:
        n += 1
    return f"S{n}"


def _transform(spec: ChartSpec, op: EditOp, config: RenderConfig) -> tuple[ChartSpec, str | None]:
    """Pure spec transformation; never mutates the input."""
    new = spec.copy()
    created = None
    if isinstance(op, AddStream):
        created = _next_stream_id(new)
        new.streams.append(
            StreamDef(id=created, t0=float(op.t0), t1=float(op.t1), color=op.color,
                      parent=op.parent)
        )
    elif isinstance(op, AddLink):
        src, dst = op.src, op.dst
        t1_eff = float(op.t1) if op.t1 is not None else float(op.t0) + config.step
        if not src and not dst:
            raise EditRejection(
                [Violation("links", "-", "link needs at least one existing endpoint")]
            )
        if not src:
            span = op.src_span or (float(op.t0), t1_eff)
            created = src = _next_stream_id(new)
            new.streams.append(
                StreamDef(id=src, t0=min(span[0], float(op.t0)),
                          t1=max(span[1], float(op.t0)), color=op.color)
            )
        if not dst:
            span = op.dst_span or (float(op.t0), t1_eff)
            created = dst = _next_stream_id(new)
            new.streams.append(
                StreamDef(id=dst, t0=min(span[0], t1_eff), t1=max(span[1], t1_eff),
                          color=op.color)
            )
        new.links.append(
            LinkDef(src=src, t0=float(op.t0), dst=dst,
                    t1=float(op.t1) if op.t1 is not None else None, merge=bool(op.merge))
        )
    elif isinstance(op, SetSizeAt):
        s = new.stream_by_id(op.stream)
        if s is None:
            raise EditRejection([Violation("streams", op.stream, "unknown stream")])
        knots = [(t, v) for t, v in s.sizes if t != float(op.t)]
        knots.append((float(op.t), float(op.size)))
        s.sizes = sorted(knots)
    elif isinstance(op, AddLabel):
        new.labels.append(
            LabelDef(stream=op.stream, t=float(op.t), text=op.text, type=op.type,
                     size=float(op.size))
        )
    elif isinstance(op, DeleteEntity):
        if op.kind == "stream":
            victim = new.stream_by_id(op.id)
            if victim is None:
                raise EditRejection([Violation("streams", op.id, "unknown stream")])
            for child in new.streams:
                if child.parent == op.id:
                    child.parent = victim.parent  # re-parent to grandparent
            new.streams = [s for s in new.streams if s.id != op.id]
            new.links = [l for l in new.links if op.id not in (l.src, l.dst)]
            new.labels = [l for l in new.labels if l.stream != op.id]
        elif op.kind in ("link", "label"):
            seq = new.links if op.kind == "link" else new.labels
            try:
                idx = int(op.id)
                seq.pop(idx)
            except (ValueError, IndexError):
                raise EditRejection(
                    [Violation(op.kind + "s", op.id, "unknown entity index")]
                ) from None
        else:
            raise EditRejection([Violation("ops", op.kind, "unknown entity kind")])
    elif isinstance(op, ReplaceCsv):
        try:
            if op.table == "streams":
                new.streams = parse_streams(op.text)
            elif op.table == "links":
                new.links = parse_links(op.text)
            elif op.table == "labels":
                new.labels = parse_labels(op.text)
            else:
                raise EditRejection([Violation("ops", op.table, "unknown table")])
        except EditRejection:
            raise
        except ChartError as exc:
            raise EditRejection([Violation(op.table, "-", str(exc))]) from None
    else:  # pragma: no cover
        raise EditRejection([Violation("ops", type(op).__name__, "unsupported op")])
    return new, created


# ---------------------------------------------------------------------------
# HTTP app

def load_session(data_dir: str, config: RenderConfig | None = None) -> Session:
    """Create a session from streams/links/labels CSV files in *data_dir*."""

    def read(name: str) -> str:
        path = os.path.join(data_dir, name)
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                return fh.read()
        return ""

    spec = ChartSpec(
        streams=parse_streams(read("streams.csv")) if read("streams.csv").strip() else [],
        links=parse_links(read("links.csv")) if read("links.csv").strip() else [],
        labels=parse_labels(read("labels.csv")) if read("labels.csv").strip() else [],
    )
    return Session(spec, config)


def create_app(session: Session, data_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="orcha authoring service")

    @app.get("/api/chart")
    def get_chart():
        return session.chart_json()

    @app.get("/api/layout")
    def get_layout():
        return session.layout_json()

    @app.get("/api/svg")
    def get_svg(rev: int | None = None):
        if rev is not None and rev != session.revision:
            return JSONResponse(
                status_code=409,
                content={"error": "stale revision", "revision": session.revision},
            )
        return Response(content=session.svg_bytes(), media_type="image/svg+xml")

    @app.get("/api/config")
    def get_config():
        return config_to_json(session.config)

    @app.post("/api/ops")
    async def post_op(request: Request):
        body = await request.json()
        try:
            op = parse_op(body)
            return session.apply(op)
        except EditRejection as exc:
            return JSONResponse(
                status_code=422,
                content={
                    "violations": [asdict(v) for v in exc.violations],
                    "revision": session.revision,
                },
            )

    @app.post("/api/save")
    def post_save():
        if data_dir is None:
            return JSONResponse(status_code=400, content={"error": "no data directory"})
        session.save(data_dir)
        return {"saved": True, "revision": session.revision}

    @app.post("/api/relayout")
    def post_relayout():
        session.relayout()
        return session.layout_json()

    @app.get("/api/updates")
    def get_updates(since: int = 0, timeout: float = 25.0):
        changed = session.wait_for_update(since, min(timeout, 60.0))
        layout = session.layout_json()
        return {"revision": layout["revision"], "layout": layout["nodes"], "changed": changed}

    static_dir = os.environ.get("ORCHA_STATIC_DIR")
    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def serve(port: int, data_dir: str, config: RenderConfig | None = None, host: str = "127.0.0.1"):
    """Run the authoring service (blocking)."""
    import uvicorn

    session = load_session(data_dir, config)
    app = create_app(session, data_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
