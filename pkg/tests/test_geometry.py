import random
from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from spherecensus.canon import canonical_key
from spherecensus.geometry import (
    Arrangement,
    Cuboid,
    DegenerateError,
    _prepare,
    bounding_cuboid,
    convex_hull,
    generate_from_simplex,
    generate_polytopes,
    interior_point_barycenter,
    interior_point_simple,
    predicted_insertion,
    standard_simplex,
    verify_realization,
)
from spherecensus.lattice import build_face_poset, f_vector

from conftest import gale_facets

F = Fraction


def nullvector(rows):
    """One nonzero solution of rows . h = 0 (exact), or None if only zero."""
    m = [list(map(F, r)) for r in rows]
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        m[r] = [x / m[r][c] for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                m[i] = [a - m[i][c] * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    h = [F(0)] * ncols
    h[free[0]] = F(1)
    for i, c in enumerate(pivots):
        h[c] = -m[i][free[0]]
    return h


def affine_rank(pts):
    if len(pts) <= 1:
        return len(pts) - 1
    base = pts[0]
    rows = [[F(a) - F(b) for a, b in zip(p, base)] for p in pts[1:]]
    return np.linalg.matrix_rank(np.array(rows, dtype=float)) if rows else 0


def brute_hull(pts):
    """(vertex set, set of facet vertex sets) of conv(pts), by exhaustion."""
    d = len(pts[0])
    uniq = sorted(set(tuple(map(F, p)) for p in pts))
    facets = set()
    for sub in combinations(uniq, d):
        h = nullvector([[1] + list(p) for p in sub])
        if h is None or affine_rank(list(sub)) != d - 1:
            continue
        vals = [h[0] + sum(a * b for a, b in zip(h[1:], p)) for p in uniq]
        if all(v <= 0 for v in vals) or all(v >= 0 for v in vals):
            facets.add(frozenset(p for p, v in zip(uniq, vals) if v == 0))
    verts = set()
    for p in uniq:
        others = [q for q in uniq if q != p]
        # p is a vertex iff it is not a convex combination of the others
        A_eq = np.array([[float(c) for c in q] + [0] for q in others]).T
        A_eq = np.vstack([A_eq[:-1], np.ones(len(others))])
        b_eq = np.array([float(c) for c in p] + [1])
        res = linprog(np.zeros(len(others)), A_eq=A_eq[:, :], b_eq=b_eq, bounds=[(0, None)] * len(others), method="highs")
        if res.status != 0:
            verts.add(p)
    return verts, {frozenset(f & verts) for f in facets}


def hull_sets(P):
    verts = set(P.vertices)
    return verts, {frozenset(P.vertices[i] for i in inc) for _, inc in P.facets}


def random_points(rng, k, d, lo=-3, hi=3):
    return [tuple(F(rng.randint(lo, hi)) for _ in range(d)) for _ in range(k)]


def check_hull_instance(pts):
    d = len(pts[0])
    if affine_rank(sorted(set(pts))) < d:
        with pytest.raises(DegenerateError):
            convex_hull(pts)
        return
    P = convex_hull(pts)
    assert P.invariant_violations() == []
    assert hull_sets(P) == brute_hull(pts)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([2, 3, 4]), st.integers(3, 8))
def test_hull_matches_brute_force(seed, d, k):
    check_hull_instance(random_points(random.Random(seed), k, d))


def test_simplex_and_absorbed_point():
    P = convex_hull(standard_simplex(4))
    assert len(P.vertices) == 5 and len(P.facets) == 5
    assert all(len(inc) == 4 for _, inc in P.facets)
    Q = convex_hull(standard_simplex(4) + [tuple(F(1, 5) for _ in range(4))])
    assert len(Q.vertices) == 5
    with pytest.raises(DegenerateError):
        convex_hull([(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (0, 0, 1, 0)])


def test_moment_curve_gale_evenness():
    pts = [(t, t**2, t**3, t**4) for t in range(1, 9)]
    P = convex_hull(pts)
    assert f_vector(build_face_poset(P.complex())) == (8, 28, 40, 20)
    order = {tuple(map(F, p)): i + 1 for i, p in enumerate(pts)}
    got = {tuple(sorted(order[P.vertices[i]] for i in inc)) for _, inc in P.facets}
    assert got == set(gale_facets(8))


def lp_face_exists(hyps, box, sign):
    """Oracle: is {x in box : sign(h_i(x)) = sign_i for all i} nonempty?"""
    d = len(box.lower)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for h, s in zip(hyps, sign):
        a = [float(v) for v in h[1:]]
        if s == 0:
            A_eq.append(a + [0.0])
            b_eq.append(-float(h[0]))
        else:
            # s * (h0 + a.x) >= t
            A_ub.append([-s * v for v in a] + [1.0])
            b_ub.append(s * float(h[0]))
    bounds = [(float(l), float(u)) for l, u in zip(box.lower, box.upper)] + [(None, 1.0)]
    c = [0.0] * d + [-1.0]
    res = linprog(c, A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq or None, b_eq=b_eq or None,
                  bounds=bounds, method="highs")
    if res.status != 0:
        return False
    return -res.fun > 1e-9 or not A_ub


def random_arrangement(rng, d, k):
    while True:
        hs = [tuple(rng.randint(-3, 3) for _ in range(d + 1)) for _ in range(k)]
        if all(any(h[1:]) for h in hs) and len(set(hs)) == k:
            try:
                return hs, bounding_cuboid(hs)
            except ValueError:
                continue


@pytest.mark.parametrize("seed,d,k", [(1, 2, 3), (2, 2, 4), (3, 3, 3), (4, 3, 4), (5, 2, 5)])
def test_arrangement_faces_match_lp_oracle(seed, d, k):
    hs, box = random_arrangement(random.Random(seed), d, k)
    arr = Arrangement(hs, box)
    got = {f.sign for f in arr.faces()}
    prim = arr.hyperplanes
    want = {s for s in product((-1, 0, 1), repeat=k) if lp_face_exists(prim, box, s)}
    assert got == want


def test_simplex_arrangement_oracle_and_probes():
    P = convex_hull(standard_simplex(4))
    hs = [h for h, _ in P.facets]
    box = bounding_cuboid(hs)
    assert box.lower == (-1,) * 4 and box.upper == (2,) * 4
    arr = Arrangement(hs, box)
    faces = arr.faces()
    assert len(faces) == 211
    assert sum(1 for f in faces if 0 not in f.sign) == 31
    want = {s for s in product((-1, 0, 1), repeat=5) if lp_face_exists(arr.hyperplanes, box, s)}
    assert {f.sign for f in faces} == want
    probe_partition(arr, random.Random(0), 200)


def probe_partition(arr, rng, count):
    """Random points of the box each lie in exactly one listed face."""
    signs = {(f.pos, f.neg) for f in arr.faces()}
    lo, up = arr.box.lower, arr.box.upper
    hits = 0
    for i in range(count):
        if i % 4 == 0:
            # land on a hyperplane now and then
            h = arr.hyperplanes[rng.randrange(arr.k)]
            j = next(c for c in range(1, len(h)) if h[c])
            x = [F(rng.randint(0, 60), 60) * (u - l) + l for l, u in zip(lo, up)]
            rest = sum(F(h[c]) * x[c - 1] for c in range(1, len(h)) if c != j)
            x[j - 1] = -(F(h[0]) + rest) / h[j]
            if not arr.box.contains(x):
                continue
        else:
            x = [F(rng.randint(0, 997), 997) * (u - l) + l for l, u in zip(lo, up)]
        assert arr.sign_at(x) in signs
        hits += 1
    assert hits > count // 2


def test_point_rules_stay_in_their_face():
    P = convex_hull(standard_simplex(4))
    arr = Arrangement([h for h, _ in P.facets], bounding_cuboid([h for h, _ in P.facets]))
    for face in arr.faces():
        for rule in (interior_point_barycenter, interior_point_simple):
            assert arr.sign_at(rule(face)) == (face.pos, face.neg)


def test_prediction_matches_hull():
    levels = generate_from_simplex(6, "barycenter")
    for Q in levels[6].values():
        seed = _prepare(Q)
        arr = Arrangement(seed.hyperplanes, bounding_cuboid(seed.hyperplanes))
        for face in arr.faces():
            p = interior_point_barycenter(face)
            hull = convex_hull(list(Q.vertices) + [p])
            cx = predicted_insertion(seed, face.pos, face.neg)
            if cx is None:
                assert len(hull.vertices) <= len(Q.vertices)
            else:
                assert len(hull.vertices) == len(Q.vertices) + 1
                assert hull.key == canonical_key(cx)


def test_generation_counts_and_rules():
    bary = generate_from_simplex(7, "barycenter")
    assert [len(bary[k]) for k in (5, 6, 7)] == [1, 4, 31]
    simple = generate_from_simplex(6, "simple")
    assert simple[6].keys() == bary[6].keys()
    for P in bary[7].values():
        assert verify_realization(P.complex(), P.vertices) == (True, "ok")


def test_generation_worker_and_order_independence():
    seeds = generate_from_simplex(6, "barycenter")[6].values()
    a = generate_polytopes(seeds, 7, "barycenter")
    b = generate_polytopes(seeds[::-1], 7, "barycenter", workers=2)
    assert a.keys() == b.keys()
    assert all(a[k].vertices == b[k].vertices for k in a)
    with pytest.raises(ValueError):
        generate_polytopes(seeds, 8)
    with pytest.raises(ValueError):
        generate_polytopes(seeds, 7, "nope")


def test_verify_realization_rejects():
    levels = generate_from_simplex(6, "barycenter")
    P, Q = levels[6].values()[:2]
    assert not verify_realization(P.complex(), Q.vertices)[0]
    assert not verify_realization(P.complex(), P.vertices[:-1])[0]
    assert not verify_realization(P.complex(), list(P.vertices[:-1]) + [P.vertices[0]])[0]


def test_cuboid():
    box = Cuboid((0, 0), (1, 2))
    assert box.contains((F(1, 2), 2)) and not box.contains((2, 0))
    with pytest.raises(ValueError):
        Cuboid((0, 0), (0, 1))


def test_insertion_stability():
    """Two different relative-interior points of one face give the same type."""
    rng = random.Random(7)
    seeds = generate_from_simplex(6, "barycenter")[6].values()
    faces = []
    for Q in seeds:
        hs = [h for h, _ in Q.facets]
        faces += [(Q, f) for f in Arrangement(hs, bounding_cuboid(hs)).faces()]
    for Q, face in rng.sample(faces, 100):
        verts = face.vertices
        pts = []
        for _ in range(2):
            w = [F(rng.randint(1, 9)) for _ in verts]
            total = sum(w)
            pts.append(tuple(sum(wi * v[c] for wi, v in zip(w, verts)) / total for c in range(4)))
        a, b = (convex_hull(list(Q.vertices) + [p]) for p in pts)
        assert len(a.vertices) == len(b.vertices)
        assert a.key == b.key


def test_replacement_keeps_simpler_coordinates():
    from spherecensus.canon import Registry
    from spherecensus.geometry import _prefer

    P = convex_hull(standard_simplex(4))
    big = convex_hull([tuple(7 * c for c in v) for v in standard_simplex(4)])
    assert P.key == big.key and big.score > P.score
    reg = Registry(prefer=_prefer)
    reg.insert_if_new(P.key, P)
    assert not reg.insert_if_new(big.key, big)
    assert reg[P.key] is P
    reg = Registry(prefer=_prefer)
    reg.insert_if_new(big.key, big)
    reg.insert_if_new(P.key, P)
    assert reg[P.key] is P
