"""Enumeration of combinatorial 3-spheres by repeated untriangulation.

Starting from simplicial seeds, two facets sharing a ridge are replaced by
their union; each candidate is deduplicated by canonical key and kept when its
face lattice passes the sphere tests.  Failed candidates are memoised by key
only.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from .canon import CanonicalKey, Registry, canonical_key
from .lattice import FacetComplex, LatticeError, build_face_poset, check_sphere, iter_bits, vertices_of

log = logging.getLogger(__name__)

MAX_SIMPLICIAL_N = 8


class SeedValidationError(ValueError):
    pass


@dataclass(frozen=True)
class UntriangulationStep:
    parent: CanonicalKey
    f1: int
    f2: int
    child: CanonicalKey


def untriangulate(cx: FacetComplex, f1: int, f2: int) -> FacetComplex:
    """Replace facets ``f1`` and ``f2`` by their union.

    ``f1 & f2`` must be a ridge of the lattice of ``cx``.  The result is not
    checked for being a sphere.
    """
    if f1 not in cx.facets or f2 not in cx.facets or f1 == f2:
        raise ValueError("f1 and f2 must be two distinct facets of the complex")
    lat = build_face_poset(cx)
    r = f1 & f2
    if r not in lat or lat.rank_of(r) != cx.d - 1:
        raise ValueError(f"{vertices_of(f1)} and {vertices_of(f2)} do not meet in a ridge")
    return _merge(cx, f1, f2)


def _merge(cx: FacetComplex, f1: int, f2: int) -> FacetComplex:
    rest = tuple(f for f in cx.facets if f != f1 and f != f2)
    return FacetComplex(cx.n, rest + (f1 | f2,), cx.d)


def _prefilter(cx: FacetComplex, f1: int, f2: int) -> bool:
    """Cheap necessary conditions for the merge of ``f1`` and ``f2``."""
    u = f1 | f2
    r = f1 & f2
    for g in cx.facets:
        if g == f1 or g == f2:
            continue
        if g & u == g:
            return False
        if g & f1 and g & f2 and not g & r:
            return False
    return True


def ridge_pairs(cx: FacetComplex, lat=None):
    """Pairs of facets meeting in a ridge (a rank ``d - 1`` face)."""
    if lat is None:
        lat = build_face_poset(cx)
    ridges = set(lat.faces_of_rank(cx.d - 1))
    return [(f, g) for f, g in combinations(cx.facets, 2) if f & g in ridges]


@dataclass
class EnumerationResult:
    types: Registry
    non_types: set = field(default_factory=set)
    candidates: int = 0
    prefiltered: int = 0
    lattice_checks: int = 0
    steps: list = field(default_factory=list)


def _enumerate_shard(seeds, record_steps=False) -> EnumerationResult:
    result = EnumerationResult(Registry())
    types, non = result.types, result.non_types
    stack = [(s, None) for s in reversed(list(seeds))]
    while stack:
        cx, parent = stack.pop()
        key = canonical_key(cx)
        if parent is not None and record_steps:
            result.steps.append((parent, key))
        if key in types or key in non:
            continue
        result.lattice_checks += 1
        chk = check_sphere(cx)
        if not chk.ok:
            non.add(key)
            continue
        types.insert_if_new(key, cx)
        for f1, f2 in reversed(ridge_pairs(cx, chk.lattice)):
            result.candidates += 1
            if not _prefilter(cx, f1, f2):
                result.prefiltered += 1
                continue
            stack.append((_merge(cx, f1, f2), key))
    return result


def _shard_worker(args):
    seeds, record = args
    return _enumerate_shard(seeds, record)


def enumerate_spheres(seeds, workers: int = 1, record_steps: bool = False) -> EnumerationResult:
    """All types reachable from ``seeds`` by untriangulation that are spheres.

    With ``workers > 1`` the seeds are split round-robin into shards that are
    processed independently and merged by key union (first shard wins on
    payloads), so the key set does not depend on the worker count.
    """
    seeds = list(seeds)
    if workers <= 1 or len(seeds) <= 1:
        return _enumerate_shard(seeds, record_steps)
    from multiprocessing import Pool

    shards = [seeds[i::workers] for i in range(workers)]
    with Pool(workers) as pool:
        parts = pool.map(_shard_worker, [(s, record_steps) for s in shards])
    merged = EnumerationResult(Registry())
    for part in parts:
        merged.types.merge(part.types)
        merged.non_types |= part.non_types
        merged.candidates += part.candidates
        merged.prefiltered += part.prefiltered
        merged.lattice_checks += part.lattice_checks
        merged.steps.extend(part.steps)
    merged.non_types -= merged.types.keys()
    return merged


class _SimplicialSearch:
    """Depth-first closure of open ridges with orderly new-vertex labels."""

    def __init__(self, n: int):
        self.n = n
        self.max_facets = n * (n - 3) // 2
        self.facets: list[int] = []
        self.facet_set: set[int] = set()
        self.ridge_count: dict[int, int] = {}
        self.link: dict[int, list[int]] = {}
        self.closed: set[int] = set()
        self.found = Registry()
        self.leaves = 0

    @staticmethod
    def _sub(mask: int, k: int) -> list[int]:
        bits = [1 << b for b in iter_bits(mask)]
        return [sum(c) for c in combinations(bits, k)]

    def _closes_cycle(self, pairs: list[int], new: int) -> bool | None:
        """None: fine and open; True: closes the whole link; False: closes a
        proper sub-cycle (reject)."""
        x, y = [1 << b for b in iter_bits(new)]
        seen = x
        while True:
            nxt = seen
            for p in pairs:
                if p & seen:
                    nxt |= p
            if nxt == seen:
                break
            seen = nxt
        if not seen & y:
            return None
        return sum(1 for p in pairs if p & seen) == len(pairs)

    def _add(self, t: int) -> list | None:
        """Add facet ``t``; return an undo record or None if rejected."""
        edges = self._sub(t, 2)
        touched = []
        ok = True
        for e in edges:
            if e in self.closed:
                ok = False
                break
            pairs = self.link.setdefault(e, [])
            state = self._closes_cycle(pairs, t ^ e)
            if state is False:
                ok = False
                break
            pairs.append(t ^ e)
            touched.append(e)
            if state:
                self.closed.add(e)
        if not ok:
            for e in touched:
                pair = t ^ e
                self.link[e].remove(pair)
                self.closed.discard(e)
            return None
        for tri in self._sub(t, 3):
            self.ridge_count[tri] = self.ridge_count.get(tri, 0) + 1
        self.facets.append(t)
        self.facet_set.add(t)
        return touched

    def _remove(self, t: int, touched: list) -> None:
        self.facets.pop()
        self.facet_set.discard(t)
        for tri in self._sub(t, 3):
            c = self.ridge_count[tri] - 1
            if c:
                self.ridge_count[tri] = c
            else:
                del self.ridge_count[tri]
        for e in touched:
            self.link[e].remove(t ^ e)
            self.closed.discard(e)

    def _vertex_links_ok(self) -> bool:
        for v in range(self.n):
            bit = 1 << v
            tris = [f ^ bit for f in self.facets if f & bit]
            if not tris:
                return False
            verts = 0
            edges = set()
            for t in tris:
                verts |= t
                edges.update(self._sub(t, 2))
            if verts.bit_count() - len(edges) + len(tris) != 2:
                return False
            seen = tris[0]
            grow = True
            while grow:
                grow = False
                for t in tris:
                    if t & seen and t & ~seen:
                        seen |= t
                        grow = True
            if seen != verts:
                return False
        return True

    def run(self):
        self._add(0b1111)
        self._dfs(4)
        return self.found

    def _dfs(self, used: int) -> None:
        open_ridges = [r for r, c in self.ridge_count.items() if c == 1]
        if not open_ridges:
            if used == self.n and self._vertex_links_ok():
                self.leaves += 1
                cx = FacetComplex(self.n, tuple(self.facets))
                self.found.insert_if_new(canonical_key(cx), cx)
            return
        if len(self.facets) >= self.max_facets:
            return
        r = min(open_ridges)
        top = used + 1 if used < self.n else used
        for a in range(top):
            bit = 1 << a
            if r & bit:
                continue
            t = r | bit
            if t in self.facet_set:
                continue
            if any(self.ridge_count.get(tri, 0) >= 2 for tri in self._sub(t, 3)):
                continue
            touched = self._add(t)
            if touched is None:
                continue
            self._dfs(max(used, a + 1))
            self._remove(t, touched)


def enumerate_simplicial(n: int) -> list[FacetComplex]:
    """All simplicial 3-spheres on exactly ``n`` vertices, up to isomorphism.

    Every completed complex is a closed combinatorial 3-manifold with
    spherical vertex links; for ``n <= 8`` these are all spheres.
    """
    if n > MAX_SIMPLICIAL_N:
        raise ValueError(
            f"simplicial enumeration is limited to n <= {MAX_SIMPLICIAL_N}; "
            "supply an external seed census (ingest_seeds, or enumerate-spheres --seeds)"
        )
    if n < 5:
        return []
    found = _SimplicialSearch(n).run()
    seeds = [found[k] for k in sorted(found)]
    for s in seeds:
        if not check_sphere(s).ok:
            raise AssertionError("simplicial search produced a non-sphere")
    return seeds


def ingest_seeds(path) -> list[FacetComplex]:
    """Read, validate and deduplicate a sphere file."""
    from .io import read_spheres

    seeds = []
    seen = {}
    for lineno, rec in read_spheres(Path(path), with_lines=True):
        cx = rec.complex
        chk = check_sphere(cx)
        if not chk.ok:
            raise SeedValidationError(f"line {lineno}: not a sphere (failed {chk.failed} check)")
        key = canonical_key(cx)
        if key in seen:
            warnings.warn(f"line {lineno}: duplicate of line {seen[key]}, skipped")
            continue
        seen[key] = lineno
        seeds.append(cx)
    return seeds
