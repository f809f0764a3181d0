import pytest

from spherecensus.canon import canonical_key
from spherecensus.chirotope import classify
from spherecensus.geometry import generate_from_simplex
from spherecensus.io import CertificateRecord, SphereRecord, parse_record, realization_from_polytope
from spherecensus.lattice import build_face_poset, vertex_edge_graph
from spherecensus.report import (
    MergeError,
    analyze_multipartite,
    build_report,
    flag_gaps,
    merge_classification,
    multipartite_parts,
)

from conftest import OCTAHEDRON, SIMPLEX4, NINE_VERTEX, spheres


@pytest.fixture(scope="module")
def census7():
    recs = [SphereRecord(cx) for n in (5, 6, 7) for cx in spheres(n)]
    levels = generate_from_simplex(7, "barycenter")
    reals = [realization_from_polytope(P) for n in (5, 6, 7) for P in levels[n].values()]
    return merge_classification(recs, reals, [])


def test_octahedron_and_pentagon():
    lat = build_face_poset(OCTAHEDRON)
    assert multipartite_parts(6, vertex_edge_graph(lat)) == (2, 2, 2)
    assert multipartite_parts(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]) is None
    assert multipartite_parts(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]) == (1, 1, 1, 1)


def test_analyze_multipartite_simplex():
    assert analyze_multipartite([SIMPLEX4]) == [((1, 1, 1, 1, 1), 1)]


def test_report_by_facets_n7(census7):
    table = build_report(census7, "facets")
    assert table.conservation_errors() == []
    assert table.row("(7, *, *, *)").spheres == 31
    assert table.row("(7, *, *, *)").distinct == 15
    assert table.row("(7, *, *, 9)").spheres == 7
    assert table.row("(*, *, *, *)").polytopes == 36
    text = table.to_text()
    assert text.splitlines()[0].startswith("f-vector")
    assert len(table.to_tsv().splitlines()) == len(table.rows) + 1


def test_report_orders_and_groupings(census7):
    fv = build_report(census7, "fvector")
    labels = [r.label for r in fv.groups]
    assert labels[:3] == ["(5, 10, 10, 5)", "(6, 13, 13, 6)", "(6, 14, 15, 7)"]
    assert labels.index("(7, 16, 16, 7)") < labels.index("(7, 17, 17, 7)") < labels.index("(7, 17, 18, 8)")
    assert fv.row((7, 17, 18, 8)).spheres == 4 and fv.row((7, 17, 18, 8)).distinct == 2
    fl = build_report(census7, "flagfvector")
    assert fl.row("(5,10,10,5;20)").spheres == 1
    assert fl.conservation_errors() == []
    with pytest.raises(ValueError):
        build_report(census7, "vertices")


def test_merge_refuses_bad_input(census7):
    recs = [SphereRecord(cx) for cx in spheres(6)]
    P = generate_from_simplex(6)[6].values()[0]
    real = realization_from_polytope(P)
    res_cert = classify(parse_record(NINE_VERTEX[0][0]).complex)
    cx9 = parse_record(NINE_VERTEX[0][0]).complex
    foreign = CertificateRecord(cx9, canonical_key(cx9), res_cert.status, res_cert.stage, res_cert.certificate)
    with pytest.raises(MergeError, match="matches no sphere"):
        merge_classification(recs, [], [foreign])
    fake = CertificateRecord(real.complex, real.key, "certified-nonrealizable", "gp", res_cert.certificate)
    with pytest.raises(MergeError, match="both realized and certified"):
        merge_classification(recs, [real], [fake])
    with pytest.raises(MergeError, match="twice"):
        merge_classification(recs + recs[:1])


def test_flag_gaps_nine_vertex():
    recs = []
    certs = []
    for compact, _ in NINE_VERTEX:
        rec = parse_record(compact)
        res = classify(rec.complex)
        recs.append(rec)
        certs.append(CertificateRecord(rec.complex, canonical_key(rec.complex), res.status, res.stage, res.certificate))
    merged = merge_classification(recs, [], certs)
    gaps = flag_gaps(merged)
    by_label = {g.label: g for g in gaps}
    assert set(by_label) == {"(9,25,26,10;50)", "(9,27,29,11;53)", "(9,27,30,12;57)"}
    row = by_label["(9,25,26,10;50)"]
    assert (row.spheres, row.polytopes, row.nonrealizable) == (1, 0, 1)
    assert by_label["(9,27,29,11;53)"].spheres == 2
