"""Chart data model and the three-table CSV format.

A chart is authored as three CSV tables: streams (colored bands over a time
interval, optionally nested), links (short connections between streams, with
an optional merge flag), and labels (text attached to a stream as one of the
three classes ``in`` / ``out`` / ``on``).

All parse functions preserve declaration order; the layout's initial node
stacking depends on it.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace

from .colors import is_valid_color

log = logging.getLogger(__name__)

LABEL_TYPES = ("in", "out", "on")

STREAMS_HEADER = ["id", "t0", "t1", "color", "size", "parent"]
LINKS_HEADER = ["from", "t0", "to", "t1", "merge"]
LABELS_HEADER = ["stream", "t", "text", "type", "size"]


class ChartError(Exception):
    """Base class for chart data errors."""


class ParseError(ChartError):
    """Malformed CSV input. ``row`` is the 1-based physical line number."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


@dataclass(frozen=True)
class Violation:
    """One validation failure, addressed to a table entity."""

    table: str
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.table}[{self.entity}]: {self.message}"


class ValidationError(ChartError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass
class StreamDef:
    """A topic band over ``[t0, t1]``; ``sizes`` are (time, thickness) knots."""

    id: str
    t0: float
    t1: float
    color: str
    sizes: list[tuple[float, float]] = field(default_factory=list)
    parent: str | None = None


@dataclass
class LinkDef:
    """A connection from stream ``src`` at ``t0`` to stream ``dst``.

    ``t1`` is the optional end time (defaults to one step after ``t0`` at
    build time). ``merge=True`` means the source flows into the destination
    instead of leaving a small anchor node nested there.
    """

    src: str
    t0: float
    dst: str
    t1: float | None = None
    merge: bool = False


@dataclass
class LabelDef:
    """Text attached to a stream: type ``in``, ``out`` or ``on``; size in em."""

    stream: str
    t: float
    text: str
    type: str = "in"
    size: float = 1.0


@dataclass
class ChartSpec:
    """The authored document: streams, links and labels in declaration order."""

    streams: list[StreamDef] = field(default_factory=list)
    links: list[LinkDef] = field(default_factory=list)
    labels: list[LabelDef] = field(default_factory=list)

    def stream_by_id(self, sid: str) -> StreamDef | None:
        for s in self.streams:
            if s.id == sid:
                return s
        return None

    def copy(self) -> "ChartSpec":
        return ChartSpec(
            streams=[replace(s, sizes=list(s.sizes)) for s in self.streams],
            links=[replace(l) for l in self.links],
            labels=[replace(l) for l in self.labels],
        )


# ---------------------------------------------------------------------------
# parsing

def _read_rows(csv_text: str, expected: list[str], table: str):
    """Yield (line_num, dict) per data row, mapping expected header names.

    Unknown extra columns are ignored with a warning; missing required
    columns are a ParseError.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{table}: missing header row") from None
    names = [h.strip().lower() for h in header]
    missing = [c for c in expected if c not in names]
    if missing:
        raise ParseError(f"{table}: header misses column(s) {', '.join(missing)}", row=1)
    extra = [c for c in names if c not in expected]
    if extra:
        log.warning("%s: ignoring unknown column(s) %s", table, ", ".join(extra))
    index = {c: names.index(c) for c in expected}
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(names):
            raise ParseError(
                f"{table}: expected {len(names)} cells, got {len(row)}", row=reader.line_num
            )
        # structural cells are stripped; free-text cells stay verbatim
        yield reader.line_num, {
            c: row[index[c]] if c == "text" else row[index[c]].strip() for c in expected
        }


def _parse_time(cell: str, what: str, row: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"non-numeric {what}: {cell!r}", row=row) from None


def _parse_sizes(cell: str, row: int) -> list[tuple[float, float]]:
    """Parse a size cell: ``t/size`` pairs separated by ``;`` (e.g. ``5/10``)."""
    if not cell:
        return []
    out = []
    for part in cell.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split("/")
        if len(bits) != 2:
            raise ParseError(f"malformed size pair: {part!r}", row=row)
        out.append((_parse_time(bits[0], "size time", row), _parse_time(bits[1], "size value", row)))
    return out


def parse_streams(csv_text: str) -> list[StreamDef]:
    """Parse the streams table (``id,t0,t1,color,size,parent``).

    Raises:
        ParseError: malformed row (wrong arity, non-numeric time).
        ValidationError: duplicate stream id.
    """
    streams: list[StreamDef] = []
    seen: set[str] = set()
    for line, cells in _read_rows(csv_text, STREAMS_HEADER, "streams"):
        sid = cells["id"]
        if not sid:
            raise ParseError("empty stream id", row=line)
        if sid in seen:
            raise ValidationError([Violation("streams", sid, "duplicate stream id")])
        seen.add(sid)
        streams.append(
            StreamDef(
                id=sid,
                t0=_parse_time(cells["t0"], "t0", line),
                t1=_parse_time(cells["t1"], "t1", line),
                color=cells["color"],
                sizes=_parse_sizes(cells["size"], line),
                parent=cells["parent"] or None,
            )
        )
    return streams


def parse_links(csv_text: str) -> list[LinkDef]:
    """Parse the links table (``from,t0,to,t1,merge``)."""
    links: list[LinkDef] = []
    for line, cells in _read_rows(csv_text, LINKS_HEADER, "links"):
        merge_cell = cells["merge"].lower()
        if merge_cell in ("true", "1", "yes"):
            merge = True
        elif merge_cell in ("", "false", "0", "no"):
            merge = False
        else:
            raise ParseError(f"bad merge flag: {cells['merge']!r}", row=line)
        links.append(
            LinkDef(
                src=cells["from"],
                t0=_parse_time(cells["t0"], "t0", line),
                dst=cells["to"],
                t1=_parse_time(cells["t1"], "t1", line) if cells["t1"] else None,
                merge=merge,
            )
        )
    return links


def parse_labels(csv_text: str) -> list[LabelDef]:
    """Parse the labels table (``stream,t,text,type,size``).

    Raises:
        ValidationError: unknown label type token.
    """
    labels: list[LabelDef] = []
    for line, cells in _read_rows(csv_text, LABELS_HEADER, "labels"):
        typ = cells["type"].lower()
        if typ not in LABEL_TYPES:
            raise ValidationError(
                [Violation("labels", cells["stream"], f"unknown label type {cells['type']!r}")]
            )
        labels.append(
            LabelDef(
                stream=cells["stream"],
                t=_parse_time(cells["t"], "t", line),
                text=cells["text"],
                type=typ,
                size=_parse_time(cells["size"], "size", line),
            )
        )
    return labels


def parse_spec(streams_csv: str, links_csv: str = "", labels_csv: str = "") -> ChartSpec:
    """Parse all three tables; empty texts mean empty tables."""
    return ChartSpec(
        streams=parse_streams(streams_csv) if streams_csv.strip() else [],
        links=parse_links(links_csv) if links_csv.strip() else [],
        labels=parse_labels(labels_csv) if labels_csv.strip() else [],
    )


# ---------------------------------------------------------------------------
# validation

def _parent_chain_cyclic(spec: ChartSpec, sid: str) -> bool:
    by_id = {s.id: s for s in spec.streams}
    seen = set()
    cur: str | None = sid
    while cur is not None:
        if cur in seen:
            return True
        seen.add(cur)
        nxt = by_id.get(cur)
        cur = nxt.parent if nxt else None
    return False


def validate(spec: ChartSpec, step: float | None = None) -> list[Violation]:
    """Collect every violation in *spec*; an empty list means valid.

    Total: never raises on structurally parseable input. When *step* is
    given, link end times defaulted to ``t0 + step`` are range-checked too.
    """
    out: list[Violation] = []
    by_id: dict[str, StreamDef] = {}
    for s in spec.streams:
        if s.id in by_id:
            out.append(Violation("streams", s.id, "duplicate stream id"))
        by_id[s.id] = s

    for s in spec.streams:
        if s.t0 > s.t1:
            out.append(Violation("streams", s.id, f"t0 {s.t0} exceeds t1 {s.t1}"))
        if not is_valid_color(s.color):
            out.append(Violation("streams", s.id, f"invalid color {s.color!r}"))
        prev_t = None
        for t, size in s.sizes:
            if not (s.t0 <= t <= s.t1):
                out.append(Violation("streams", s.id, f"size time {t} outside [{s.t0}, {s.t1}]"))
            if size <= 0:
                out.append(Violation("streams", s.id, f"non-positive size {size} at t={t}"))
            if prev_t is not None and t <= prev_t:
                out.append(Violation("streams", s.id, "size times not strictly increasing"))
            prev_t = t
        if s.parent is not None:
            p = by_id.get(s.parent)
            if p is None:
                out.append(Violation("streams", s.id, f"unknown parent {s.parent!r}"))
            elif _parent_chain_cyclic(spec, s.id):
                out.append(Violation("streams", s.id, "parent cycle"))
            elif not (p.t0 <= s.t0 and s.t1 <= p.t1):
                out.append(
                    Violation(
                        "streams", s.id,
                        f"parent interval [{p.t0}, {p.t1}] does not contain [{s.t0}, {s.t1}]",
                    )
                )

    for i, link in enumerate(spec.links):
        ent = f"{link.src}->{link.dst}#{i}"
        src = by_id.get(link.src)
        dst = by_id.get(link.dst)
        if link.src == link.dst:
            out.append(Violation("links", ent, "link endpoints must differ"))
        if src is None:
            out.append(Violation("links", ent, f"unknown stream {link.src!r}"))
        elif not (src.t0 <= link.t0 <= src.t1):
            out.append(Violation("links", ent, f"t0 {link.t0} outside source interval"))
        if dst is None:
            out.append(Violation("links", ent, f"unknown stream {link.dst!r}"))
        else:
            if link.t1 is not None:
                if link.t1 <= link.t0:
                    out.append(Violation("links", ent, "link must advance time (t1 > t0)"))
                elif not (dst.t0 <= link.t1 <= dst.t1):
                    out.append(Violation("links", ent, f"t1 {link.t1} outside target interval"))
            elif step is not None:
                t1 = link.t0 + step
                if not (dst.t0 <= t1 <= dst.t1):
                    out.append(
                        Violation("links", ent, f"effective end time {t1} outside target interval")
                    )

    for i, lab in enumerate(spec.labels):
        ent = f"{lab.stream}@{lab.t}#{i}"
        s = by_id.get(lab.stream)
        if s is None:
            out.append(Violation("labels", ent, f"unknown stream {lab.stream!r}"))
        elif not (s.t0 <= lab.t <= s.t1):
            out.append(Violation("labels", ent, "label time outside stream interval"))
        if lab.size <= 0:
            out.append(Violation("labels", ent, f"non-positive size {lab.size}"))
        if lab.type not in LABEL_TYPES:
            out.append(Violation("labels", ent, f"unknown label type {lab.type!r}"))

    return out


# ---------------------------------------------------------------------------
# serialization

def _fmt_num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _fmt_sizes(sizes: list[tuple[float, float]]) -> str:
    return ";".join(f"{_fmt_num(t)}/{_fmt_num(s)}" for t, s in sizes)


def _write_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def serialize(spec: ChartSpec) -> tuple[str, str, str]:
    """Serialize to (streams_csv, links_csv, labels_csv).

    Round trip: ``parse_spec(*serialize(s))`` equals ``s`` field-exactly.
    """
    streams = _write_csv(
        STREAMS_HEADER,
        [
            [s.id, _fmt_num(s.t0), _fmt_num(s.t1), s.color, _fmt_sizes(s.sizes), s.parent or ""]
            for s in spec.streams
        ],
    )
    links = _write_csv(
        LINKS_HEADER,
        [
            [
                l.src,
                _fmt_num(l.t0),
                l.dst,
                _fmt_num(l.t1) if l.t1 is not None else "",
                "true" if l.merge else "",
            ]
            for l in spec.links
        ],
    )
    labels = _write_csv(
        LABELS_HEADER,
        [
            [lab.stream, _fmt_num(lab.t), lab.text, lab.type, _fmt_num(lab.size)]
            for lab in spec.labels
        ],
    )
    return streams, links, labels


def spec_bytes(spec: ChartSpec) -> bytes:
    """Canonical byte form of a spec (used for atomicity checks)."""
    return "\x1e".join(serialize(spec)).encode("utf-8")
