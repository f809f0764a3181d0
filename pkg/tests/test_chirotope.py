import json
import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherecensus import chirotope as ch
from spherecensus.chirotope import (
    Certificate,
    PartialChirotope,
    PropagationContradiction,
    bfp_search,
    biquadratic_rows,
    check_gp,
    classify,
    derive_partial_chirotope,
    gp_impossible,
    propagate,
    rule_applications,
    tuple_sign,
    verify_certificate,
)
from spherecensus.geometry import chirotope_from_points, generate_from_simplex
from spherecensus.io import certificate_from_dict, certificate_to_dict
from spherecensus.lattice import FacetComplex, build_face_poset, mask_of, vertices_of

from conftest import SIMPLEX4, NINE_VERTEX, gale_facets, parse_compact, spheres


@pytest.fixture(scope="module")
def polytopes7():
    levels = generate_from_simplex(7, "barycenter")
    return [P for n in (5, 6, 7) for P in levels[n].values()]


def brute_rules(cx):
    """Zero brackets and (mask1, mask2, parity) links straight from the rule statements."""
    facets = [set(vertices_of(f)) for f in cx.facets]
    lat = build_face_poset(cx)
    ridges = {frozenset(vertices_of(r)) for r in lat.faces_of_rank(3)}
    allv = set(range(1, cx.n + 1))
    zeros = {mask_of(b) for f in facets for b in combinations(sorted(f), 5)}
    links = set()
    for f in facets:
        for abcd in permutations(sorted(f), 4):
            for e in allv - f:
                for e2 in allv - f:
                    if e != e2:
                        t1, t2 = abcd + (e,), abcd + (e2,)
                        links.add((mask_of(t1), mask_of(t2), tuple_sign(t1) * tuple_sign(t2)))
    for f, g in combinations(facets, 2):
        r = f & g
        if frozenset(r) not in ridges:
            continue
        for abc in combinations(sorted(r), 3):
            for d in f - r:
                for d2 in g - r:
                    for e in allv - f - g:
                        t1, t2 = abc + (d, e), abc + (d2, e)
                        links.add((mask_of(t1), mask_of(t2), -tuple_sign(t1) * tuple_sign(t2)))
    return zeros, links


def test_tuple_sign():
    assert tuple_sign((1, 2, 3, 4, 5)) == 1
    assert tuple_sign((2, 1, 3, 4, 5)) == -1
    assert tuple_sign((5, 4, 3, 2, 1)) == 1
    assert tuple_sign((1, 1, 2, 3, 4)) == 0


@settings(max_examples=200, deadline=None)
@given(st.permutations([1, 2, 3, 4, 5]), st.permutations([1, 2, 3, 4, 5]))
def test_alternating(p, q):
    chi = PartialChirotope(7, {mask_of((1, 3, 4, 6, 7)): -1})
    base = (1, 3, 4, 6, 7)
    t = tuple(base[i - 1] for i in p)
    u = tuple(t[i - 1] for i in q)
    assert chi[t] == tuple_sign(t) * -1
    assert chi[u] == tuple_sign(q) * chi[t]
    assert chi[(1, 3, 3, 6, 7)] == 0


def test_gp_impossible_patterns():
    assert gp_impossible((1, 1, 1))
    assert gp_impossible((1, 0, 1))
    assert gp_impossible((0, -1, 0))
    assert not gp_impossible((0, 0, 0))
    assert not gp_impossible((1, -1, 1))
    assert not gp_impossible((1, -1, 0))


def test_rules_match_brute_force(spheres_upto7):
    for cx in spheres_upto7:
        zeros, rule2, rule3 = rule_applications(cx)
        bz, blinks = brute_rules(cx)
        assert set(zeros) == bz
        got = {(mask_of(a.t1), mask_of(a.t2), a.bracket_parity()) for a in rule2 + rule3}
        sym = lambda s: s | {(b, a, p) for a, b, p in s}
        assert sym(got) == sym(blinks)


def test_derived_signs_satisfy_every_rule(spheres_upto7):
    for cx in spheres_upto7:
        der = derive_partial_chirotope(cx)
        known = der.chirotope.known
        zeros, links = brute_rules(cx)
        for m in zeros:
            assert known[m] == 0
        for a, b, p in links:
            if a in known and b in known and known[a] and known[b]:
                assert known[a] == p * known[b]
            if a in known and b in known:
                assert (known[a] == 0) == (known[b] == 0)


def test_derived_signs_agree_with_geometry(polytopes7):
    for P in polytopes7:
        cx = P.complex()
        geo = chirotope_from_points(P.vertices)
        der = derive_partial_chirotope(cx).chirotope
        prop = propagate(der).chirotope
        signs = set()
        for m, s in prop.known.items():
            g = geo.known[m]
            if s == 0:
                assert g == 0
            else:
                assert g != 0
                signs.add(s * g)
        assert len(signs) <= 1, "derived chirotope equals the geometric one up to one global sign"
        assert not bfp_search(prop).found


def test_order_independence(spheres_upto7):
    for cx in spheres_upto7:
        a = derive_partial_chirotope(cx)
        b = derive_partial_chirotope(cx, order="reverse")
        assert a.chirotope == b.chirotope
        assert propagate(a.chirotope).chirotope == propagate(a.chirotope, order="reverse").chirotope


def test_anchor_sign_flips_everything():
    cx = spheres(7)[5]
    a = derive_partial_chirotope(cx).chirotope
    b = derive_partial_chirotope(cx, anchor_sign=-1).chirotope
    assert a.negated() == b
    assert a.equal_up_to_sign(b)


def test_simplex_has_no_forced_bracket():
    # the only bracket of the simplex is constrained by no rule
    der = derive_partial_chirotope(SIMPLEX4)
    assert len(der.chirotope) == 0 and der.anchor is None
    assert classify(SIMPLEX4).status == "unresolved"


@pytest.mark.parametrize("compact,flag", NINE_VERTEX)
def test_nine_vertex_certified(compact, flag):
    cx = parse_compact(compact)
    res = classify(cx)
    assert res.status == "certified-nonrealizable"
    ok, msg = verify_certificate(res.certificate, cx)
    assert ok, msg
    again = certificate_from_dict(json.loads(json.dumps(certificate_to_dict(res.certificate))))
    assert verify_certificate(again, cx) == (True, "ok")


def test_tampered_gp_certificate_fails():
    cx = parse_compact(NINE_VERTEX[0][0])
    cert = classify(cx).certificate
    assert cert.kind == "gp-violation"
    vals = list(cert.data["values"])
    vals[0] = -vals[0]
    bad = Certificate(cert.kind, {"triple": cert.data["triple"], "values": tuple(vals)}, cert.n)
    assert not verify_certificate(bad, cx)[0]
    # a certificate is tied to its sphere: the cyclic polytope C(9,4) is realizable
    cyclic = FacetComplex.from_facets(gale_facets(9))
    assert not verify_certificate(cert, cyclic)[0]


def _random_points(rng, n, d=4, lo=-6, hi=6):
    return [tuple(Fraction(rng.randint(lo, hi)) for _ in range(d)) for _ in range(n)]


def test_propagation_contradiction_certificate():
    """Flip one sign of a realizable chirotope, hide part of it, and check
    that the contradiction found by propagation replays from its steps."""
    rng = random.Random(7)
    found = 0
    for _ in range(200):
        geo = chirotope_from_points(_random_points(rng, 7))
        known = dict(geo.known)
        masks = sorted(known)
        flip = rng.choice([m for m in masks if known[m]])
        known[flip] = -known[flip]
        for m in rng.sample(masks, 8):
            if m != flip:
                del known[m]
        chi = PartialChirotope(7, known)
        if check_gp(chi) is not None:
            continue
        try:
            propagate(chi)
        except PropagationContradiction as exc:
            cert = exc.certificate
            replayed = ch._replay(chi.known, cert.data["steps"], 7)
            kind, g = cert.data["conflict"]
            vals = ch._ordered_values(replayed, g.brackets(), [tuple_sign(t) for t in g.tuples()])
            if kind == "gp":
                assert None not in vals and gp_impossible(ch._effective(vals))
            else:
                missing = [j for j, v in enumerate(vals) if v is None]
                assert len(missing) == 1 and ch._forced(vals, missing[0])[0] == "conflict"
            found += 1
    assert found > 0


def test_bfp_multipliers_cancel_on_random_chirotopes():
    rng = random.Random(3)
    found = 0
    for _ in range(40):
        known = {mask_of(b): rng.choice([-1, 1]) for b in combinations(range(1, 8), 5)}
        chi = PartialChirotope(7, known)
        res = bfp_search(chi)
        if not res.found:
            continue
        found += 1
        valid = {(r.plus, r.minus, r.strict) for r in biquadratic_rows(chi)}
        ineqs = [r for r in res.rows if r.strict]
        eqs = [r for r in res.rows if not r.strict]
        assert all((r.plus, r.minus, r.strict) in valid for r in ineqs + eqs)
        y, z = res.multipliers, res.eq_multipliers
        assert all(w >= 0 for w in y) and any(w > 0 for w in y)
        total = {}
        for w, r in zip(list(y) + list(z), ineqs + eqs):
            for b in r.plus:
                total[b] = total.get(b, 0) + w
            for b in r.minus:
                total[b] = total.get(b, 0) - w
        assert all(v == 0 for v in total.values())
    assert found > 0


def test_realizable_chirotopes_have_no_bfp():
    rng = random.Random(11)
    for _ in range(15):
        geo = chirotope_from_points(_random_points(rng, 7))
        assert check_gp(geo) is None
        assert not bfp_search(geo).found


def test_stage_limits():
    cx = parse_compact(NINE_VERTEX[0][0])
    assert classify(cx, "gp").stage == "gp"
    with pytest.raises(ValueError):
        classify(cx, "nope")
    res = classify(spheres(7)[3], "propagate")
    assert res.status == "unresolved" and res.s1 >= res.s0
