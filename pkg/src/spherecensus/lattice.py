"""Facet complexes, their face lattices, and the combinatorial sphere tests.

Vertices are labelled ``1..n``; internally a set of vertices is an ``int``
bitmask with bit ``v - 1`` standing for vertex ``v``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

MAX_VERTICES = 15


class LatticeError(ValueError):
    """Raised when a facet complex cannot be turned into a face lattice."""


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << (v - 1)
    return m


def vertices_of(mask: int) -> tuple[int, ...]:
    out = []
    v = 1
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return mask.bit_count()


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the bit positions (0-based) set in ``mask``."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class FacetComplex:
    """A candidate sphere given by its vertex count and facet vertex sets.

    ``facets`` is kept as a sorted tuple of bitmasks so that equal complexes
    compare and hash equal.  ``d`` is the rank parameter: a combinatorial
    ``(d-1)``-sphere has a face lattice of rank ``d + 1``.
    """

    n: int
    facets: tuple[int, ...]
    d: int = 4

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise LatticeError(f"vertex count {self.n} outside 1..{MAX_VERTICES}")
        full = (1 << self.n) - 1
        for f in self.facets:
            if f & ~full:
                raise LatticeError(f"facet {vertices_of(f)} uses a vertex > {self.n}")
        object.__setattr__(self, "facets", tuple(sorted(set(self.facets))))

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]], n: int | None = None, d: int = 4) -> "FacetComplex":
        masks = [mask_of(f) for f in facets]
        if n is None:
            n = max((m.bit_length() for m in masks), default=0)
        return cls(n, tuple(masks), d)

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def facet_lists(self) -> list[tuple[int, ...]]:
        return [vertices_of(f) for f in self.facets]

    def invariant_violations(self) -> list[str]:
        """Necessary conditions on a facet set; empty when all hold."""
        problems = []
        for f in self.facets:
            if popcount(f) < self.d:
                problems.append(f"facet {vertices_of(f)} has fewer than {self.d} vertices")
        for f, g in combinations(self.facets, 2):
            if f & g in (f, g):
                problems.append(f"facet {vertices_of(f & g)} is contained in another facet")
        for v in range(self.n):
            deg = sum(1 for f in self.facets if f >> v & 1)
            if deg < self.d:
                problems.append(f"vertex {v + 1} lies in only {deg} facets")
        return problems

    def relabel(self, perm: dict[int, int] | list[int]) -> "FacetComplex":
        """Apply a vertex relabelling ``v -> perm[v]`` (labels 1..n)."""
        if isinstance(perm, list):
            perm = {i + 1: p for i, p in enumerate(perm)}
        return FacetComplex(
            self.n, tuple(mask_of(perm[v] for v in vertices_of(f)) for f in self.facets), self.d
        )


class FVector(NamedTuple):
    f0: int
    f1: int
    f2: int
    f3: int


class FlagFVector(NamedTuple):
    f0: int
    f1: int
    f2: int
    f3: int
    f02: int

    def __str__(self) -> str:
        return f"({self.f0},{self.f1},{self.f2},{self.f3};{self.f02})"


@dataclass(frozen=True, eq=False)
class FaceLattice:
    """Intersection-closed poset of faces, bottom ``0`` and top the vertex set.

    ``faces`` is ordered by size then bitmask value.  ``below[i]`` and
    ``above[i]`` are bitmasks over face *indices* for the strict down- and
    up-sets of face ``i``.  ``rank[i]`` is the length of the longest chain
    from the bottom to face ``i``.
    """

    n: int
    faces: tuple[int, ...]
    below: tuple[int, ...]
    above: tuple[int, ...]
    rank: tuple[int, ...]
    _index: dict = field(repr=False, default=None)

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self.faces) - 1

    @property
    def height(self) -> int:
        return self.rank[self.top]

    def index(self, face: int) -> int | None:
        return self._index.get(face)

    def __contains__(self, face: int) -> bool:
        return face in self._index

    def __len__(self) -> int:
        return len(self.faces)

    def faces_of_rank(self, r: int) -> list[int]:
        return [f for f, k in zip(self.faces, self.rank) if k == r]

    def rank_of(self, face: int) -> int:
        return self.rank[self._index[face]]

    def covers(self, i: int) -> list[int]:
        """Indices of the faces covered by face ``i``."""
        below = self.below[i]
        inner = 0
        for j in iter_bits(below):
            inner |= self.below[j]
        return list(iter_bits(below & ~inner))

    def level_sizes(self) -> tuple[int, ...]:
        sizes = [0] * (self.height + 1)
        for k in self.rank:
            sizes[k] += 1
        return tuple(sizes)

    def coatoms(self) -> list[int]:
        return [self.faces[j] for j in self.covers(self.top)]


def build_face_poset(cx: FacetComplex, strict: bool = True) -> FaceLattice:
    """Intersection closure of the facets, with bottom and top added.

    With ``strict`` a facet equal to the whole vertex set (next to other
    facets) is rejected; otherwise it is identified with the top.
    """
    full = cx.vertex_mask
    if strict and len(cx.facets) > 1 and full in cx.facets:
        raise LatticeError("a facet equals the full vertex set")
    used = 0
    for f in cx.facets:
        used |= f
    faces = set(cx.facets)
    # The closure is seeded with the facets and the single vertices; every
    # intersection of facets is then reached by intersecting with facets.
    faces.update(1 << v for v in iter_bits(used))
    frontier = list(faces)
    facets = cx.facets
    while frontier:
        nxt = []
        for x in frontier:
            for f in facets:
                y = x & f
                if y and y not in faces:
                    faces.add(y)
                    nxt.append(y)
        frontier = nxt
    faces.discard(full)
    ordered = [0] + sorted(faces, key=lambda m: (popcount(m), m)) + [full]
    index = {f: i for i, f in enumerate(ordered)}
    size = len(ordered)
    below = [0] * size
    for i in range(1, size):
        fi = ordered[i]
        b = 1  # bottom
        for j in range(1, i):
            fj = ordered[j]
            if fj & fi == fj and fj != fi:
                b |= 1 << j
        below[i] = b
    above = [0] * size
    for i in range(size):
        for j in iter_bits(below[i]):
            above[j] |= 1 << i
    rank = [0] * size
    for i in range(1, size):
        rank[i] = 1 + max(rank[j] for j in iter_bits(below[i]))
    return FaceLattice(cx.n, tuple(ordered), tuple(below), tuple(above), tuple(rank), index)


def is_graded_rank(lat: FaceLattice, r: int) -> bool:
    """Every maximal chain has length exactly ``r``."""
    if lat.rank[lat.top] != r:
        return False
    rank = lat.rank
    for i in range(1, len(lat.faces)):
        ri = rank[i] - 1
        for j in lat.covers(i):
            if rank[j] != ri:
                return False
    return True


def _parity_masks(lat: FaceLattice) -> tuple[int, int]:
    odd = even = 0
    for i, k in enumerate(lat.rank):
        if k & 1:
            odd |= 1 << i
        else:
            even |= 1 << i
    return odd, even


def is_eulerian(lat: FaceLattice) -> bool:
    """Each closed interval ``[x, y]`` with ``x < y`` has as many odd- as
    even-rank elements."""
    odd, even = _parity_masks(lat)
    below, above = lat.below, lat.above
    for i in range(1, len(lat.faces)):
        for j in iter_bits(below[i]):
            interval = (above[j] & below[i]) | (1 << i) | (1 << j)
            if (interval & odd).bit_count() != (interval & even).bit_count():
                return False
    return True


def _connected(members: int, below, above) -> bool:
    if not members:
        return False
    start = members & -members
    seen = start
    frontier = start
    while frontier:
        reach = 0
        for z in iter_bits(frontier):
            reach |= below[z] | above[z]
        reach &= members & ~seen
        seen |= reach
        frontier = reach
    return seen == members


def is_interval_connected(lat: FaceLattice) -> bool:
    """Open intervals ``(x, y)`` of length at least 3 are connected as
    comparability graphs."""
    rank, below, above = lat.rank, lat.below, lat.above
    for i in range(1, len(lat.faces)):
        for j in iter_bits(below[i]):
            if rank[i] - rank[j] < 3:
                continue
            if not _connected(above[j] & below[i], below, above):
                return False
    return True


class SphereCheck(NamedTuple):
    ok: bool
    failed: str | None
    lattice: FaceLattice | None


def check_sphere(cx: FacetComplex) -> SphereCheck:
    """Run the three lattice tests; report the first one that fails."""
    try:
        lat = build_face_poset(cx)
    except LatticeError:
        return SphereCheck(False, "degenerate", None)
    if not is_graded_rank(lat, cx.d + 1):
        return SphereCheck(False, "graded", lat)
    if not is_eulerian(lat):
        return SphereCheck(False, "eulerian", lat)
    if not is_interval_connected(lat):
        return SphereCheck(False, "interval-connected", lat)
    return SphereCheck(True, None, lat)


def is_sphere(cx: FacetComplex) -> bool:
    return check_sphere(cx).ok


def f_vector(lat: FaceLattice) -> tuple[int, ...]:
    """Face counts by dimension (ranks ``1..height-1``)."""
    sizes = lat.level_sizes()
    counts = tuple(sizes[1:-1])
    return FVector(*counts) if len(counts) == 4 else counts


def flag_f_vector(lat: FaceLattice) -> FlagFVector:
    if lat.height != 5:
        raise LatticeError("flag f-vector is defined here for rank-5 lattices")
    # The fifth entry counts vertex-facet incidences, the convention of the
    # published census tables (it equals #(vertex, 2-face) - 2 f2 + 2 f3).
    incidences = sum(popcount(f) for f in lat.faces_of_rank(4))
    return FlagFVector(*f_vector(lat), incidences)


def vertex_two_face_incidences(lat: FaceLattice) -> int:
    return sum(popcount(f) for f in lat.faces_of_rank(3))


def vertex_edge_graph(lat: FaceLattice) -> set[tuple[int, int]]:
    """Edges of the graph formed by the rank-2 faces, as sorted label pairs."""
    return {vertices_of(e) for e in lat.faces_of_rank(2)}
