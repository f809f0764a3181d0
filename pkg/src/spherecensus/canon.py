"""Canonical forms of vertex-facet incidence structures and a dedup registry.

The incidence structure is treated as a bipartite graph whose two sides
(vertices, facets) carry different colours.  A canonical vertex ordering is
found by equitable colour refinement plus individualisation search; the key is
the relabelled facet list with the lexicographically smallest row sequence.
"""
from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator

from .lattice import FacetComplex, iter_bits


@dataclass(frozen=True)
class CanonicalKey:
    """Relabelling-invariant byte string; the full form is the identity."""

    raw: bytes
    digest: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        d = hashlib.blake2b(self.raw, digest_size=8).digest()
        object.__setattr__(self, "digest", int.from_bytes(d, "big"))

    def __hash__(self) -> int:
        return self.digest

    def hex(self) -> str:
        return self.raw.hex()

    @classmethod
    def fromhex(cls, text: str) -> "CanonicalKey":
        return cls(bytes.fromhex(text))

    def __lt__(self, other: "CanonicalKey") -> bool:
        return self.raw < other.raw

    def __str__(self) -> str:
        return self.hex()


def _refine(vcol: list[int], fcol: list[int], vf: list[list[int]], fv: list[list[int]]):
    """Equitable refinement of the vertex and facet colourings.

    New colours are ranks of (old colour, sorted neighbour colours) and so
    depend only on the coloured structure, never on the input labelling.
    """
    nv = len(set(vcol))
    nf = len(set(fcol))
    while True:
        fsig = [(fcol[f], tuple(sorted([vcol[v] for v in fv[f]]))) for f in range(len(fv))]
        table = {s: i for i, s in enumerate(sorted(set(fsig)))}
        fcol = [table[s] for s in fsig]
        vsig = [(vcol[v], tuple(sorted([fcol[f] for f in vf[v]]))) for v in range(len(vf))]
        table = {s: i for i, s in enumerate(sorted(set(vsig)))}
        vcol = [table[s] for s in vsig]
        nv2 = len(table)
        nf2 = len(set(fcol))
        if nv2 == nv and nf2 == nf:
            return vcol, fcol
        nv, nf = nv2, nf2


def _certificate(vcol: list[int], facets: tuple[int, ...]) -> tuple[int, ...]:
    rows = []
    for f in facets:
        m = 0
        for v in iter_bits(f):
            m |= 1 << vcol[v]
        rows.append(m)
    rows.sort()
    return tuple(rows)


class _Search:
    def __init__(self, n: int, facets: tuple[int, ...]):
        self.n = n
        self.facets = facets
        self.fv = [list(iter_bits(f)) for f in facets]
        self.vf = [[i for i, f in enumerate(facets) if f >> v & 1] for v in range(n)]
        self.best = None
        self.best_perm = None
        self.automorphisms: list[list[int]] = []

    def run(self):
        vcol, fcol = _refine([0] * self.n, [0] * len(self.facets), self.vf, self.fv)
        self._visit(vcol, fcol, [])
        return self.best, self.best_perm

    def _orbit_rep(self, prefix: list[int]) -> list[int]:
        """Union-find parents under automorphisms fixing ``prefix`` pointwise."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.automorphisms:
            if all(g[p] == p for p in prefix):
                for x in range(self.n):
                    a, b = find(x), find(g[x])
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        return [find(x) for x in range(self.n)]

    def _visit(self, vcol, fcol, prefix):
        counts = {}
        for c in vcol:
            counts[c] = counts.get(c, 0) + 1
        if len(counts) == self.n:
            cert = _certificate(vcol, self.facets)
            if self.best is None or cert < self.best:
                self.best, self.best_perm = cert, vcol
            elif cert == self.best:
                inv = [0] * self.n
                for v, c in enumerate(self.best_perm):
                    inv[c] = v
                self.automorphisms.append([inv[vcol[v]] for v in range(self.n)])
            return
        # Smallest non-singleton cell, ties broken by lowest colour.
        target = min((k, c) for c, k in counts.items() if k > 1)[1]
        cell = [v for v in range(self.n) if vcol[v] == target]
        done = []
        for v in cell:
            if done:
                orbit = self._orbit_rep(prefix)
                if any(orbit[v] == orbit[w] for w in done):
                    continue
            child = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(vcol)]
            cv, cf = _refine(child, fcol, self.vf, self.fv)
            self._visit(cv, cf, prefix + [v])
            done.append(v)


def canonical_labelling(n: int, facets: Iterable[int]) -> tuple[tuple[int, ...], list[int]]:
    """Return ``(canonical rows, perm)`` where ``perm[v]`` is the new 0-based
    position of old vertex bit ``v``."""
    facets = tuple(sorted(set(facets)))
    if n == 0:
        return (), []
    best, perm = _Search(n, facets).run()
    return best, perm


def canonical_key(cx: FacetComplex) -> CanonicalKey:
    """Key equal for two complexes iff a vertex relabelling maps one onto the other."""
    if not cx.facets:
        raise ValueError("canonical_key needs a non-empty complex")
    rows, _ = canonical_labelling(cx.n, cx.facets)
    width = 2 if cx.n <= 16 else (cx.n + 7) // 8
    raw = bytes([cx.n, len(rows)]) + b"".join(r.to_bytes(width, "big") for r in rows)
    return CanonicalKey(raw)


def canonical_form(cx: FacetComplex) -> FacetComplex:
    """The complex relabelled into its canonical vertex order."""
    rows, _ = canonical_labelling(cx.n, cx.facets)
    return FacetComplex(cx.n, rows, cx.d)


def complex_from_key(key: CanonicalKey, d: int = 4) -> FacetComplex:
    raw = key.raw
    n, m = raw[0], raw[1]
    rows = [int.from_bytes(raw[2 + 2 * i: 4 + 2 * i], "big") for i in range(m)]
    return FacetComplex(n, tuple(rows), d)


class Registry:
    """Map from canonical key to one stored payload.

    ``insert_if_new`` is atomic.  When ``prefer`` is given, a colliding insert
    replaces the stored payload if ``prefer(new, old)`` is true.
    """

    def __init__(self, prefer: Callable[[Any, Any], bool] | None = None):
        self._items: dict[CanonicalKey, Any] = {}
        self._lock = threading.Lock()
        self.prefer = prefer

    def insert_if_new(self, key: CanonicalKey, payload: Any) -> bool:
        with self._lock:
            if key not in self._items:
                self._items[key] = payload
                return True
            if self.prefer is not None and self.prefer(payload, self._items[key]):
                self._items[key] = payload
            return False

    def __getstate__(self):
        return {"items": self._items, "prefer": self.prefer}

    def __setstate__(self, state):
        self._items = state["items"]
        self.prefer = state["prefer"]
        self._lock = threading.Lock()

    def merge(self, other: "Registry") -> "Registry":
        """Union of key sets; on collisions the receiver's payload stays
        unless the replacement policy prefers the incoming one."""
        for k, v in other.items():
            self.insert_if_new(k, v)
        return self

    def __contains__(self, key: CanonicalKey) -> bool:
        return key in self._items

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[CanonicalKey]:
        return iter(self._items)

    def __getitem__(self, key: CanonicalKey):
        return self._items[key]

    def get(self, key, default=None):
        return self._items.get(key, default)

    def keys(self) -> set[CanonicalKey]:
        return set(self._items)

    def items(self):
        return list(self._items.items())

    def values(self):
        return list(self._items.values())
