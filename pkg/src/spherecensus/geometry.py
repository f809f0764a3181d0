"""Exact rational polytopes, hyperplane arrangements and inductive generation.

A hyperplane is an integer vector ``h = (h0, h1, ..., hd)`` standing for
``{x : h0 + h1 x1 + ... + hd xd = 0}``.  Facet hyperplanes of a polytope are
oriented inward: ``h . (1, x) <= 0`` on the polytope, so a point with negative
value is beneath the facet and a point with positive value is beyond it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd, lcm
from typing import Callable, Iterable, Sequence

import numpy as np

from .canon import CanonicalKey, Registry, canonical_key
from .chirotope import PartialChirotope
from .lattice import FacetComplex, popcount

log = logging.getLogger(__name__)

Point = tuple  # tuple of Fraction


class DegenerateError(ValueError):
    def __init__(self, dim: int, ambient: int):
        super().__init__(f"points span an affine space of dimension {dim}, not {ambient}")
        self.dim = dim


# --- exact linear algebra ----------------------------------------------------------


def _rank(rows: Sequence[Sequence]) -> int:
    m = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / p[c]
                m[i] = [a - f * b for a, b in zip(m[i], p)]
        rank += 1
    return rank


def affine_dimension(points: Sequence[Point]) -> int:
    if not points:
        return -1
    base = points[0]
    return _rank([[a - b for a, b in zip(p, base)] for p in points[1:]]) if len(points) > 1 else 0


def _det(m: list[list[int]]) -> int:
    """Integer determinant by fraction-free elimination."""
    a = [list(r) for r in m]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def primitive(v: Iterable) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers, keeping its orientation."""
    v = [Fraction(x) for x in v]
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        raise ValueError("zero vector")
    return tuple(x // g for x in ints)


def normalize_hyperplane(h: Iterable) -> tuple[int, ...]:
    """Primitive integer vector with positive leading nonzero entry."""
    p = primitive(h)
    lead = next(x for x in p if x)
    return p if lead > 0 else tuple(-x for x in p)


def hyperplane_through(points: Sequence[Point]) -> tuple[int, ...] | None:
    """Primitive ``h`` with ``h . (1, x) = 0`` on all points, or None if the
    points do not determine a unique hyperplane."""
    d = len(points[0])
    m = [[Fraction(1)] + [Fraction(c) for c in p] for p in points]
    # reduced row echelon form
    pivots = []
    r = 0
    for c in range(d + 1):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if r != d:
        return None
    free = next(c for c in range(d + 1) if c not in pivots)
    h = [Fraction(0)] * (d + 1)
    h[free] = Fraction(1)
    for i, c in enumerate(pivots):
        h[c] = -m[i][free]
    return primitive(h)


def evaluate(h: Sequence[int], x: Sequence) -> Fraction:
    return h[0] + sum(hi * xi for hi, xi in zip(h[1:], x))


def simplicity(values: Iterable[Fraction]) -> int:
    """max(|numerator| + denominator) over the given rationals."""
    return max((abs(Fraction(v).numerator) + Fraction(v).denominator for v in values), default=0)


def matrix_simplicity(points: Iterable[Point]) -> int:
    return max((simplicity(p) for p in points), default=0)


# --- polytopes and hulls ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RationalPolytope:
    vertices: tuple[Point, ...]
    facets: tuple[tuple[tuple[int, ...], frozenset], ...]

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def complex(self) -> FacetComplex:
        masks = tuple(sum(1 << i for i in vs) for _, vs in self.facets)
        return FacetComplex(len(self.vertices), masks, self.dim)

    @property
    def key(self) -> CanonicalKey:
        cached = self.__dict__.get("_key")
        if cached is None:
            cached = canonical_key(self.complex())
            object.__setattr__(self, "_key", cached)
        return cached

    @property
    def score(self) -> int:
        return matrix_simplicity(self.vertices)

    def invariant_violations(self) -> list[str]:
        out = []
        for j, (h, inc) in enumerate(self.facets):
            if h != primitive(h):
                out.append(f"facet {j} hyperplane is not primitive")
            for i, v in enumerate(self.vertices):
                s = evaluate(h, v)
                if i in inc and s != 0:
                    out.append(f"vertex {i} is not on facet {j}")
                if i not in inc and s >= 0:
                    out.append(f"vertex {i} is not strictly beneath facet {j}")
        return out


def standard_simplex(d: int = 4) -> list[Point]:
    pts = [tuple(Fraction(0) for _ in range(d))]
    for i in range(d):
        pts.append(tuple(Fraction(int(i == j)) for j in range(d)))
    return pts


def convex_hull(points: Sequence[Sequence]) -> RationalPolytope:
    """Beneath-beyond hull with exact orientation tests.

    Facets are vertex sets of supporting hyperplanes, so coplanar pieces
    are already merged.  Points inside the hull or on its boundary without
    being vertices are dropped; duplicates are allowed.
    """
    pts = [tuple(Fraction(c) for c in p) for p in points]
    if not pts:
        raise DegenerateError(-1, 0)
    d = len(pts[0])
    basis = [0]
    for i in range(1, len(pts)):
        if affine_dimension([pts[j] for j in basis] + [pts[i]]) == len(basis):
            basis.append(i)
            if len(basis) == d + 1:
                break
    if len(basis) < d + 1:
        raise DegenerateError(len(basis) - 1, d)
    center = tuple(sum(pts[i][c] for i in basis) / (d + 1) for c in range(d))

    def oriented(h):
        return h if evaluate(h, center) < 0 else tuple(-x for x in h)

    facets: dict[tuple, set[int]] = {}
    for drop in basis:
        sub = [i for i in basis if i != drop]
        h = oriented(hyperplane_through([pts[i] for i in sub]))
        facets[h] = set(sub)
    in_hull = set(basis)
    for i, p in enumerate(pts):
        if i in in_hull:
            continue
        vals = {h: evaluate(h, p) for h in facets}
        if all(v <= 0 for v in vals.values()):
            continue
        visible = [h for h, v in vals.items() if v > 0]
        beneath = [h for h, v in vals.items() if v < 0]
        new: dict[tuple, set[int]] = {}
        for hv in visible:
            fv = facets[hv]
            for hb in beneath:
                ridge = fv & facets[hb]
                if len(ridge) < d - 1:
                    continue
                rpts = [pts[j] for j in ridge]
                if affine_dimension(rpts) != d - 2:
                    continue
                h = hyperplane_through(rpts + [p])
                if h is None:
                    continue
                h = oriented(h)
                if h in new or h in facets:
                    continue
                new[h] = None
        for h, v in vals.items():
            if v > 0:
                del facets[h]
            elif v == 0:
                facets[h].add(i)
        in_hull.add(i)
        for h in new:
            facets[h] = {j for j in in_hull if evaluate(h, pts[j]) == 0} | {i}
    # A point is a vertex iff the normals of its facets have full rank.
    vertex_ids = []
    for j in sorted(in_hull):
        normals = [h[1:] for h, inc in facets.items() if j in inc]
        if len(normals) >= d and _rank(normals) == d:
            vertex_ids.append(j)
    # Drop later duplicates of an earlier vertex.
    seen = {}
    for j in vertex_ids:
        seen.setdefault(pts[j], j)
    vertex_ids = [j for j in vertex_ids if seen[pts[j]] == j]
    index = {j: k for k, j in enumerate(vertex_ids)}
    out = []
    for h, inc in facets.items():
        out.append((h, frozenset(index[j] for j in inc if j in index)))
    out.sort(key=lambda f: (sorted(f[1]), f[0]))
    return RationalPolytope(tuple(pts[j] for j in vertex_ids), tuple(out))


def verify_realization(sphere: FacetComplex, coords: Sequence[Sequence]) -> tuple[bool, str]:
    if len(coords) != sphere.n:
        return False, f"expected {sphere.n} points, got {len(coords)}"
    try:
        P = convex_hull(coords)
    except DegenerateError as exc:
        return False, str(exc)
    if len(P.vertices) != sphere.n:
        return False, f"hull has {len(P.vertices)} vertices, expected {sphere.n}"
    bad = P.invariant_violations()
    if bad:
        return False, bad[0]
    if P.key != canonical_key(sphere):
        return False, "hull is not combinatorially equivalent to the sphere"
    return True, "ok"


def chirotope_from_points(points: Sequence[Point]) -> PartialChirotope:
    """Signs of the determinants of homogenised 5-tuples (labels 1..n)."""
    pts = [tuple(Fraction(c) for c in p) for p in points]
    d = len(pts[0])
    n = len(pts)
    den = lcm(*(c.denominator for p in pts for c in p))
    rows = [[den] + [int(c * den) for c in p] for p in pts]
    known = {}
    for t in combinations(range(n), d + 1):
        s = _det([rows[i] for i in t])
        known[sum(1 << i for i in t)] = (s > 0) - (s < 0)
    return PartialChirotope(n, known)


# --- arrangements ----------------------------------------------------------------


@dataclass(frozen=True)
class Cuboid:
    lower: Point
    upper: Point

    def __post_init__(self):
        if any(lo >= up for lo, up in zip(self.lower, self.upper)):
            raise ValueError("cuboid needs lower < upper in every coordinate")

    def contains(self, x) -> bool:
        return all(lo <= c <= up for lo, c, up in zip(self.lower, x, self.upper))


def _solve_integer(rows: list[tuple[list[int], int]]):
    """Cramer solution ``(numerators, denominator > 0)`` or None if singular."""
    A = [r for r, _ in rows]
    D = _det(A)
    if D == 0:
        return None
    nums = []
    for j in range(len(A)):
        Aj = [r[:j] + [b] + r[j + 1:] for r, b in rows]
        nums.append(_det(Aj))
    if D < 0:
        D = -D
        nums = [-x for x in nums]
    g = reduce(gcd, nums, D)
    return tuple(x // g for x in nums), D // g


def arrangement_vertices(hyperplanes: Sequence[Sequence[int]]) -> list[Point]:
    hs = [primitive(h) for h in hyperplanes]
    d = len(hs[0]) - 1
    out = set()
    for sub in combinations(hs, d):
        sol = _solve_integer([(list(h[1:]), -h[0]) for h in sub])
        if sol is not None:
            nums, den = sol
            out.add(tuple(Fraction(x, den) for x in nums))
    return sorted(out)


def bounding_cuboid(hyperplanes: Sequence[Sequence[int]], padding: int = 1) -> Cuboid:
    verts = arrangement_vertices(hyperplanes)
    if not verts:
        raise ValueError("the arrangement has no vertices (fewer than d independent hyperplanes)")
    d = len(verts[0])
    lower = tuple(min(v[i] for v in verts) - padding for i in range(d))
    upper = tuple(max(v[i] for v in verts) + padding for i in range(d))
    return Cuboid(lower, upper)


class ArrangementFace:
    """Face ``F_alpha`` of an arrangement clipped to a cuboid."""

    __slots__ = ("arrangement", "pos", "neg", "_vertices")

    def __init__(self, arrangement: "Arrangement", pos: int, neg: int):
        self.arrangement = arrangement
        self.pos = pos
        self.neg = neg
        self._vertices = None

    @property
    def sign(self) -> tuple[int, ...]:
        return tuple((self.pos >> i & 1) - (self.neg >> i & 1) for i in range(self.arrangement.k))

    @property
    def vertices(self) -> list[Point]:
        if self._vertices is None:
            self._vertices = self.arrangement.face_vertices(self.pos, self.neg)
        return self._vertices

    @property
    def dimension(self) -> int:
        return affine_dimension(self.vertices)

    @property
    def point(self) -> Point:
        return interior_point_barycenter(self)

    def __repr__(self) -> str:
        s = "".join("+" if v > 0 else "-" if v < 0 else "0" for v in self.sign)
        return f"ArrangementFace({s})"


class Arrangement:
    """Sign-vector structure of hyperplanes inside a cuboid.

    Clipped vertices are the points where ``d`` independent hyperplanes of
    the arrangement or of the cuboid meet inside the cuboid.  The faces are
    exactly the conformal joins of their sign vectors: a face's points of
    its closure are the clipped vertices with sign vector below it, and the
    barycenter of any conformal set of them realises their join.
    """

    def __init__(self, hyperplanes: Sequence[Sequence], box: Cuboid):
        self.hyperplanes = [primitive(h) for h in hyperplanes]
        self.box = box
        self.k = len(self.hyperplanes)
        self.d = len(box.lower)
        if self.k > 62:
            raise ValueError("at most 62 hyperplanes are supported")
        self._clip()
        self._faces = None

    def _clip(self) -> None:
        d = self.d
        rows = [(list(h[1:]), -h[0]) for h in self.hyperplanes]
        for i in range(d):
            for c in (self.box.lower[i], self.box.upper[i]):
                c = Fraction(c)
                e = [0] * d
                e[i] = c.denominator
                rows.append((e, c.numerator))
        pts = {}
        k = self.k
        box = self.box
        for j in range(min(d, k), -1, -1):
            for sub in combinations(range(k), j):
                for bsub in combinations(range(k, len(rows)), d - j):
                    axes = [(b - k) // 2 for b in bsub]
                    if len(set(axes)) != len(axes):
                        continue
                    sol = _solve_integer([rows[r] for r in sub + bsub])
                    if sol is None or sol in pts:
                        continue
                    nums, den = sol
                    if all(box.lower[a] * den <= x <= box.upper[a] * den for a, x in enumerate(nums)):
                        pts[sol] = None
        self.points = list(pts)
        pospos = np.zeros(len(self.points), dtype=np.int64)
        negneg = np.zeros(len(self.points), dtype=np.int64)
        for idx, (nums, den) in enumerate(self.points):
            p = n_ = 0
            for i, h in enumerate(self.hyperplanes):
                s = h[0] * den + sum(a * b for a, b in zip(h[1:], nums))
                if s > 0:
                    p |= 1 << i
                elif s < 0:
                    n_ |= 1 << i
            pospos[idx] = p
            negneg[idx] = n_
        self.vpos = pospos
        self.vneg = negneg

    def faces(self) -> list[ArrangementFace]:
        if self._faces is None:
            self._faces = [ArrangementFace(self, p, n) for p, n in self._join_closure()]
        return self._faces

    def _join_closure(self) -> list[tuple[int, int]]:
        vp, vn = self.vpos, self.vneg
        start = set(zip(vp.tolist(), vn.tolist()))
        seen = set(start)
        frontier = sorted(start)
        while frontier:
            nxt = set()
            for p, n in frontier:
                ok = ((vp & n) | (vn & p)) == 0
                grow = ((vp & ~p) | (vn & ~n)) != 0
                sel = ok & grow
                if not sel.any():
                    continue
                jp = (vp[sel] | p).tolist()
                jn = (vn[sel] | n).tolist()
                for pair in zip(jp, jn):
                    if pair not in seen:
                        seen.add(pair)
                        nxt.add(pair)
            frontier = sorted(nxt)
        return sorted(seen, key=lambda s: (popcount(s[0] | s[1]), s))

    def face_vertex_ids(self, pos: int, neg: int) -> list[int]:
        sel = ((self.vpos & ~pos) | (self.vneg & ~neg)) == 0
        return np.nonzero(sel)[0].tolist()

    def face_vertices(self, pos: int, neg: int) -> list[Point]:
        out = []
        for i in self.face_vertex_ids(pos, neg):
            nums, den = self.points[i]
            out.append(tuple(Fraction(x, den) for x in nums))
        return out

    def sign_at(self, x: Sequence) -> tuple[int, int]:
        p = n = 0
        for i, h in enumerate(self.hyperplanes):
            s = evaluate(h, x)
            if s > 0:
                p |= 1 << i
            elif s < 0:
                n |= 1 << i
        return p, n


def arrangement_faces(hyperplanes: Sequence[Sequence], box: Cuboid) -> list[ArrangementFace]:
    """All nonempty faces of the arrangement clipped to ``box``."""
    return Arrangement(hyperplanes, box).faces()


def interior_point_barycenter(face: ArrangementFace) -> Point:
    verts = face.vertices
    m = len(verts)
    return tuple(sum(v[i] for v in verts) / m for i in range(len(verts[0])))


SIMPLE_POOL = 12
_PRIME = (1 << 61) - 1


def _rank_mod(vectors: list[list[int]]) -> int:
    """Rank over GF(p); never exceeds the rank over the rationals."""
    m = [[x % _PRIME for x in v] for v in vectors]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], _PRIME - 2, _PRIME)
        prow = [x * inv % _PRIME for x in m[rank]]
        m[rank] = prow
        for i in range(rank + 1, len(m)):
            f = m[i][c]
            if f:
                m[i] = [(a - f * b) % _PRIME for a, b in zip(m[i], prow)]
        rank += 1
    return rank


def interior_point_simple(face: ArrangementFace) -> Point:
    """Barycenter of an affinely spanning vertex subset with the smallest
    simplicity score (ties: lexicographically smallest point).

    Subsets have between ``j + 1`` and ``j + 3`` elements for a face of
    dimension ``j`` and are drawn from the ``SIMPLE_POOL`` simplest vertices
    (all of them if the pool does not span the face).
    """
    verts = face.vertices
    j = affine_dimension(verts)
    if j == 0:
        return verts[0]
    order = sorted(verts, key=lambda v: (simplicity(v), v))
    pool = order[:SIMPLE_POOL]
    if affine_dimension(pool) < j:
        pool = order
    d = len(pool[0])
    den = lcm(*(c.denominator for v in pool for c in v))
    ints = [[int(c * den) for c in v] for v in pool]
    best = None
    for size in range(j + 1, min(j + 3, len(pool)) + 1):
        for sub in combinations(range(len(pool)), size):
            base = ints[sub[0]]
            diffs = [[a - b for a, b in zip(ints[i], base)] for i in sub[1:]]
            if _rank_mod(diffs) != j and affine_dimension([pool[i] for i in sub]) != j:
                continue
            pt = tuple(Fraction(sum(ints[i][c] for i in sub), size * den) for c in range(d))
            cand = (simplicity(pt), pt)
            if best is None or cand < best:
                best = cand
    return best[1]


POINT_RULES: dict[str, Callable[[ArrangementFace], Point]] = {
    "barycenter": interior_point_barycenter,
    "simple": interior_point_simple,
}


# --- inductive generation --------------------------------------------------------


@dataclass
class _Seed:
    polytope: RationalPolytope
    masks: list[int]
    hyperplanes: list[tuple[int, ...]]
    ridge_pairs: list[tuple[int, int]]
    full: int


def _prepare(Q: RationalPolytope) -> _Seed:
    hs = [h for h, _ in Q.facets]
    masks = [sum(1 << i for i in inc) for _, inc in Q.facets]
    d = Q.dim
    pairs = []
    for a, b in combinations(range(len(masks)), 2):
        common = masks[a] & masks[b]
        if popcount(common) >= d - 1:
            ids = [i for i in range(len(Q.vertices)) if common >> i & 1]
            if affine_dimension([Q.vertices[i] for i in ids]) == d - 2:
                pairs.append((a, b))
    return _Seed(Q, masks, hs, pairs, (1 << len(Q.vertices)) - 1)


def predicted_insertion(seed: _Seed, pos: int, neg: int) -> FacetComplex | None:
    """Combinatorial type of ``conv(Q + p)`` for ``p`` with sign vector
    ``(pos, neg)`` against the facet hyperplanes of ``Q``, or None if some
    vertex of ``Q`` is lost or ``p`` lies in ``Q``.

    Old facets survive when ``p`` is beneath them, absorb ``p`` when it lies
    on their hyperplane, and each ridge between a beneath and a beyond facet
    spans a new facet with ``p``.
    """
    if not pos:
        return None
    masks = seed.masks
    kept = 0
    for i, m in enumerate(masks):
        if neg >> i & 1:
            kept |= m
    if kept != seed.full:
        return None
    n = len(seed.polytope.vertices) + 1
    pbit = 1 << (n - 1)
    facets = []
    for i, m in enumerate(masks):
        if neg >> i & 1:
            facets.append(m)
        elif not pos >> i & 1:
            facets.append(m | pbit)
    for a, b in seed.ridge_pairs:
        sa = (pos >> a & 1) - (neg >> a & 1)
        sb = (pos >> b & 1) - (neg >> b & 1)
        if sa * sb == -1:
            facets.append(masks[a] & masks[b] | pbit)
    return FacetComplex(n, tuple(facets), seed.polytope.dim)


@dataclass
class GenerationStats:
    faces: int = 0
    candidates: int = 0
    hulls: int = 0
    replaced: int = 0


def _prefer(new: RationalPolytope, old: RationalPolytope) -> bool:
    return new.score < old.score


def _generate_from(seed_poly: RationalPolytope, rule: str, registry: Registry, stats: GenerationStats) -> None:
    point_rule = POINT_RULES[rule]
    seed = _prepare(seed_poly)
    box = bounding_cuboid(seed.hyperplanes)
    arr = Arrangement(seed.hyperplanes, box)
    base_score = seed_poly.score
    key_cache: dict[tuple, CanonicalKey] = {}
    for face in arr.faces():
        stats.faces += 1
        cx = predicted_insertion(seed, face.pos, face.neg)
        if cx is None:
            continue
        stats.candidates += 1
        key = key_cache.get(cx.facets)
        if key is None:
            key = key_cache[cx.facets] = canonical_key(cx)
        old = registry.get(key)
        if old is not None and base_score >= old.score:
            continue
        p = point_rule(face)
        if arr.sign_at(p) != (face.pos, face.neg):
            raise AssertionError("interior point left its face")
        if old is not None and matrix_simplicity([p]) >= old.score:
            continue
        P = convex_hull(list(seed_poly.vertices) + [p])
        stats.hulls += 1
        if P.key != key:
            raise AssertionError("hull type differs from the predicted insertion type")
        if old is None:
            registry.insert_if_new(key, P)
        elif _prefer(P, old):
            registry.insert_if_new(key, P)
            stats.replaced += 1


def _generate_shard(args):
    seeds, rule = args
    reg = Registry(prefer=_prefer)
    stats = GenerationStats()
    for Q in seeds:
        _generate_from(Q, rule, reg, stats)
    return reg, stats


def generate_polytopes(seeds: Iterable[RationalPolytope], k: int, point_rule: str = "barycenter",
                       workers: int = 1, stats: GenerationStats | None = None) -> Registry:
    """Polytopes with ``k`` vertices obtained by adding one point from each
    face of each seed's facet arrangement.

    Seeds are processed in key order, so the result does not depend on the
    input order; with several workers, contiguous shards are merged in that
    same order under the same replacement policy.
    """
    if point_rule not in POINT_RULES:
        raise ValueError(f"unknown point rule {point_rule!r}")
    seeds = sorted(seeds, key=lambda Q: Q.key)
    for Q in seeds:
        if len(Q.vertices) != k - 1:
            raise ValueError(f"seed has {len(Q.vertices)} vertices, expected {k - 1}")
    stats = stats if stats is not None else GenerationStats()
    if workers <= 1 or len(seeds) <= 1:
        reg, st = _generate_shard((seeds, point_rule))
        parts = [(reg, st)]
    else:
        from multiprocessing import Pool

        size = -(-len(seeds) // workers)
        shards = [seeds[i:i + size] for i in range(0, len(seeds), size)]
        with Pool(workers) as pool:
            parts = pool.map(_generate_shard, [(s, point_rule) for s in shards])
    out = Registry(prefer=_prefer)
    for reg, st in parts:
        for key, P in reg.items():
            out.insert_if_new(key, P)
        stats.faces += st.faces
        stats.candidates += st.candidates
        stats.hulls += st.hulls
        stats.replaced += st.replaced
    return out


def generate_from_simplex(k: int, point_rule: str = "barycenter", workers: int = 1,
                          d: int = 4) -> dict[int, Registry]:
    """Iterate generation from the standard simplex up to ``k`` vertices."""
    start = convex_hull(standard_simplex(d))
    levels = {d + 1: Registry(prefer=_prefer)}
    levels[d + 1].insert_if_new(start.key, start)
    for j in range(d + 2, k + 1):
        levels[j] = generate_polytopes(levels[j - 1].values(), j, point_rule, workers)
    return levels
