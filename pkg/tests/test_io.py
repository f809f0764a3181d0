import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherecensus.canon import canonical_key
from spherecensus.chirotope import classify
from spherecensus.geometry import generate_from_simplex
from spherecensus.io import (
    CertificateRecord,
    ParseError,
    SphereRecord,
    emit_certificate_record,
    emit_compact,
    emit_realization,
    emit_record,
    fmt_rational,
    parse_certificate_record,
    parse_compact,
    parse_rational,
    parse_realization,
    parse_record,
    read_spheres,
    realization_from_polytope,
    write_spheres,
)

from conftest import NINE_VERTEX, spheres


def test_compact_roundtrip_is_exact():
    for compact, _ in NINE_VERTEX:
        rec = parse_record(compact)
        assert rec.n == 9
        assert emit_compact(rec.complex, rec.order) == compact
        obj = json.loads(emit_record(rec))
        assert obj["compact"] == compact


def test_nine_vertex_first_row():
    cx = parse_compact(NINE_VERTEX[0][0])
    assert cx.n == 9 and len(cx.facets) == 10


@pytest.mark.parametrize(
    "line,needle",
    [
        ("[1123,2345]", "repeated vertex"),
        ("[12345,1234]", "contained"),
        ("[12a45]", "bad facet token"),
        ("[12045]", "vertex 0"),
        ("12345,1234", "not a compact or JSON record"),
        ('{"n": 5, "facets": [[1,2,3,4,9]]}', "outside 1..5"),
        ('{"facets": [[1,2]], "status": "weird"}', "unknown status"),
    ],
)
def test_parse_errors(line, needle):
    with pytest.raises(ParseError, match=needle) as exc:
        parse_record(line, 4)
    assert exc.value.line == 4


def test_parse_error_offset():
    with pytest.raises(ParseError) as exc:
        parse_record("[12345,1234]", 2)
    assert exc.value.offset == 7


def test_general_roundtrip_and_key_check():
    for cx in spheres(7):
        line = emit_record(SphereRecord(cx))
        rec = parse_record(line)
        assert rec.complex == cx
        assert emit_record(rec) == line
    obj = json.loads(emit_record(SphereRecord(spheres(7)[0])))
    obj["key"] = canonical_key(spheres(7)[1]).hex()
    with pytest.raises(ParseError, match="key"):
        parse_record(json.dumps(obj))


def test_file_roundtrip_skips_comments(tmp_path):
    path = tmp_path / "s.txt"
    write_spheres(path, [SphereRecord(cx) for cx in spheres(6)])
    text = "# header\n\n" + path.read_text()
    path.write_text(text)
    got = list(read_spheres(path, with_lines=True))
    assert [i for i, _ in got] == [3, 4, 5, 6]
    assert [r.complex for _, r in got] == spheres(6)


def test_status_moves_forward_only():
    rec = SphereRecord(spheres(6)[0])
    rec.advance("unresolved")
    rec.advance("polytope-realized")
    with pytest.raises(ValueError):
        rec.advance("certified-nonrealizable")
    with pytest.raises(ValueError):
        rec.advance("sphere")


@settings(max_examples=200, deadline=None)
@given(st.fractions(max_denominator=10**12))
def test_rational_roundtrip(x):
    assert parse_rational(fmt_rational(x)) == x


def test_rational_format():
    assert fmt_rational(Fraction(-3, 6)) == "-1/2"
    assert fmt_rational(Fraction(4)) == "4"
    with pytest.raises(ParseError):
        parse_rational("1/0")


def test_realization_roundtrip():
    for P in generate_from_simplex(6)[6].values():
        rec = realization_from_polytope(P, "barycenter")
        back = parse_realization(emit_realization(rec))
        assert back.coords == list(P.vertices)
        assert back.key == P.key and back.rule == "barycenter"
    with pytest.raises(ParseError):
        parse_realization('{"coords": [], "n": 5}', 3)


def test_certificate_record_roundtrip():
    rec = parse_record(NINE_VERTEX[0][0])
    res = classify(rec.complex)
    line = emit_certificate_record(
        CertificateRecord(rec.complex, canonical_key(rec.complex), res.status, res.stage, res.certificate)
    )
    back = parse_certificate_record(line)
    assert back.status == "certified-nonrealizable" and back.stage == "gp"
    assert back.certificate.data == res.certificate.data
    assert emit_certificate_record(back) == line
