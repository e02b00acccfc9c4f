import pytest
from hypothesis import given, strategies as st

from orcha.model import (
    ChartSpec,
    LabelDef,
    LinkDef,
    ParseError,
    StreamDef,
    ValidationError,
    parse_labels,
    parse_links,
    parse_spec,
    parse_streams,
    serialize,
    validate,
)


class TestParseStreams:
    def test_basic_row(self):
        rows = parse_streams("id,t0,t1,color,size,parent\nA,2,6,#D73,,\n")
        assert rows == [StreamDef(id="A", t0=2.0, t1=6.0, color="#D73", sizes=[], parent=None)]

    def test_size_pair(self):
        rows = parse_streams("id,t0,t1,color,size,parent\nB,3,9,blue,5/10,\n")
        assert rows[0].sizes == [(5.0, 10.0)]

    def test_size_list(self):
        rows = parse_streams("id,t0,t1,color,size,parent\nB,0,9,blue,3/8;5/10,\n")
        assert rows[0].sizes == [(3.0, 8.0), (5.0, 10.0)]

    def test_empty_data_section(self):
        assert parse_streams("id,t0,t1,color,size,parent\n") == []

    def test_non_numeric_time_names_row(self):
        with pytest.raises(ParseError, match="row 3"):
            parse_streams("id,t0,t1,color,size,parent\nA,1,2,red,,\nB,x,2,red,,\n")

    def test_wrong_arity(self):
        with pytest.raises(ParseError, match="row 2"):
            parse_streams("id,t0,t1,color,size,parent\nA,1,2\n")

    def test_duplicate_id_is_validation_error(self):
        with pytest.raises(ValidationError, match="duplicate"):
            parse_streams("id,t0,t1,color,size,parent\nA,1,2,red,,\nA,3,4,red,,\n")

    def test_extra_column_ignored(self, caplog):
        rows = parse_streams("id,t0,t1,color,size,parent,note\nA,1,2,red,,,hi\n")
        assert rows[0].id == "A"

    def test_quoted_text_cell(self):
        rows = parse_streams('id,t0,t1,color,size,parent\n"A, the first",1,2,red,,\n')
        assert rows[0].id == "A, the first"


class TestParseLinks:
    def test_merge_true(self):
        rows = parse_links("from,t0,to,t1,merge\nA,3,B,,true\n")
        assert rows == [LinkDef(src="A", t0=3.0, dst="B", t1=None, merge=True)]

    def test_merge_blank_is_false(self):
        rows = parse_links("from,t0,to,t1,merge\nC,4,A,,\n")
        assert rows == [LinkDef(src="C", t0=4.0, dst="A", t1=None, merge=False)]

    def test_explicit_t1(self):
        rows = parse_links("from,t0,to,t1,merge\nC,4,A,6,\n")
        assert rows[0].t1 == 6.0

    def test_empty(self):
        assert parse_links("from,t0,to,t1,merge\n") == []

    def test_bad_merge_token(self):
        with pytest.raises(ParseError):
            parse_links("from,t0,to,t1,merge\nA,3,B,,maybe\n")


class TestParseLabels:
    def test_in_label(self):
        rows = parse_labels("stream,t,text,type,size\nA,4,inside label,in,3\n")
        assert rows == [LabelDef(stream="A", t=4.0, text="inside label", type="in", size=3.0)]

    def test_out_label(self):
        rows = parse_labels("stream,t,text,type,size\nB,6,outside ...,out,5\n")
        assert rows[0].type == "out" and rows[0].size == 5.0

    def test_unknown_type(self):
        with pytest.raises(ValidationError, match="unknown label type"):
            parse_labels("stream,t,text,type,size\nA,4,zzz,x,3\n")


class TestValidate:
    def test_fig2a_is_valid(self, fig2a_spec):
        assert validate(fig2a_spec, step=1.0) == []

    def test_label_time_outside_interval(self, fig2a_spec):
        fig2a_spec.labels.append(LabelDef(stream="A", t=1.0, text="x", type="in", size=1.0))
        msgs = [v.message for v in validate(fig2a_spec)]
        assert any("outside stream interval" in m for m in msgs)

    def test_parent_cycle(self):
        spec = ChartSpec(streams=[StreamDef(id="C", t0=0, t1=1, color="red", parent="C")])
        msgs = [v.message for v in validate(spec)]
        assert any("cycle" in m for m in msgs)

    def test_parent_interval_containment(self):
        spec = ChartSpec(
            streams=[
                StreamDef(id="P", t0=2, t1=4, color="red"),
                StreamDef(id="K", t0=1, t1=3, color="blue", parent="P"),
            ]
        )
        msgs = [v.message for v in validate(spec)]
        assert any("does not contain" in m for m in msgs)

    def test_reports_all_violations_not_just_first(self):
        spec = ChartSpec(
            streams=[StreamDef(id="A", t0=5, t1=1, color="nope")],
            links=[LinkDef(src="A", t0=0, dst="Z")],
            labels=[LabelDef(stream="W", t=0, text="x", type="in", size=-1)],
        )
        violations = validate(spec)
        assert len(violations) >= 4

    def test_validate_is_total_on_junk(self):
        spec = ChartSpec(
            streams=[StreamDef(id="", t0=float("nan"), t1=0, color="")],
            links=[LinkDef(src="", t0=0, dst="")],
        )
        validate(spec)  # must not raise

    def test_non_monotone_sizes(self):
        spec = ChartSpec(
            streams=[StreamDef(id="A", t0=0, t1=9, color="red", sizes=[(5, 2), (3, 4)])]
        )
        msgs = [v.message for v in validate(spec)]
        assert any("strictly increasing" in m for m in msgs)

    def test_link_effective_end_needs_step(self):
        spec = ChartSpec(
            streams=[
                StreamDef(id="A", t0=0, t1=9, color="red"),
                StreamDef(id="B", t0=0, t1=4, color="blue"),
            ],
            links=[LinkDef(src="A", t0=4, dst="B")],
        )
        assert validate(spec) == []
        msgs = [v.message for v in validate(spec, step=1.0)]
        assert any("effective end time" in m for m in msgs)


class TestRoundTrip:
    def test_fig2a_round_trip(self, fig2a_spec):
        streams, links, labels = serialize(fig2a_spec)
        assert parse_spec(streams, links, labels) == fig2a_spec

    def test_empty_spec_serializes_headers(self):
        streams, links, labels = serialize(ChartSpec())
        assert streams == "id,t0,t1,color,size,parent\n"
        assert links == "from,t0,to,t1,merge\n"
        assert labels == "stream,t,text,type,size\n"

    def test_size_pair_cell(self):
        spec = ChartSpec(streams=[StreamDef(id="B", t0=3, t1=9, color="blue", sizes=[(5, 10)])])
        streams, _, _ = serialize(spec)
        assert "5/10" in streams


_ids = st.text(
    alphabet="ABCxyz0189 _-Ö一,", min_size=1, max_size=8
).map(str.strip).filter(bool)


@st.composite
def chart_specs(draw) -> ChartSpec:
    n = draw(st.integers(1, 5))
    ids = draw(st.lists(_ids, min_size=n, max_size=n, unique=True))
    streams = []
    for sid in ids:
        t0 = draw(st.integers(0, 8))
        t1 = draw(st.integers(t0, 10))
        sizes = draw(
            st.lists(
                st.tuples(
                    st.integers(t0 * 2, t1 * 2).map(lambda v: v / 2),
                    st.floats(0.5, 40, allow_nan=False),
                ),
                max_size=3,
            )
        )
        sizes = sorted({t: s for t, s in sizes}.items())
        parent = None
        enclosing = [s.id for s in streams if s.t0 <= t0 and t1 <= s.t1]
        if enclosing and draw(st.booleans()):
            parent = enclosing[0]
        streams.append(
            StreamDef(id=sid, t0=t0, t1=t1, color=draw(st.sampled_from(["red", "#0AC", "#DD7733"])),
                      sizes=sizes, parent=parent)
        )
    labels = []
    for _ in range(draw(st.integers(0, 4))):
        s = draw(st.sampled_from(streams))
        labels.append(
            LabelDef(
                stream=s.id,
                t=draw(st.floats(s.t0, s.t1, allow_nan=False)),
                text=draw(st.text(alphabet='ab c,"\'—é\n0', max_size=20)),
                type=draw(st.sampled_from(["in", "out", "on"])),
                size=draw(st.floats(0.5, 6, allow_nan=False)),
            )
        )
    return ChartSpec(streams=streams, labels=labels)


@given(chart_specs())
def test_round_trip_property(spec):
    if validate(spec):
        return  # only valid specs are contractually round-trippable
    streams, links, labels = serialize(spec)
    assert parse_spec(streams, links, labels) == spec
