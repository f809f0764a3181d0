"""Classification merge, census tables and graph analyses."""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .canon import canonical_key
from .io import CertificateRecord, RealizationRecord, SphereRecord
from .lattice import build_face_poset, vertex_edge_graph

GROUPINGS = ("facets", "fvector", "flagfvector")


class MergeError(ValueError):
    pass


def merge_classification(
    spheres: Iterable[SphereRecord],
    realizations: Iterable[RealizationRecord] = (),
    certificates: Iterable[CertificateRecord] = (),
) -> list[SphereRecord]:
    """Attach statuses to sphere records.

    Refuses (MergeError) unknown keys, records whose facets disagree with
    their key, and spheres that are both realized and certified.
    """
    by_key: dict = {}
    out = []
    for rec in spheres:
        rec.ensure_metadata()
        if rec.key in by_key:
            raise MergeError(f"sphere {rec.key.hex()} appears twice")
        fresh = SphereRecord(rec.complex, rec.key, rec.fvector, rec.flag, "sphere", rec.order)
        by_key[rec.key] = fresh
        out.append(fresh)
    realized = set()
    for r in realizations:
        if r.key not in by_key:
            raise MergeError(f"realization {r.key.hex()} matches no sphere")
        if canonical_key(r.complex) != r.key:
            raise MergeError(f"realization {r.key.hex()}: facets do not match the key")
        realized.add(r.key)
    certified = set()
    unresolved = set()
    for c in certificates:
        if c.key not in by_key:
            raise MergeError(f"certificate record {c.key.hex()} matches no sphere")
        if canonical_key(c.complex) != c.key:
            raise MergeError(f"certificate record {c.key.hex()}: facets do not match the key")
        if c.status == "certified-nonrealizable":
            if c.certificate is None:
                raise MergeError(f"{c.key.hex()} is marked certified but carries no certificate")
            certified.add(c.key)
        else:
            unresolved.add(c.key)
    both = realized & certified
    if both:
        sample = ", ".join(sorted(k.hex() for k in both)[:3])
        raise MergeError(f"{len(both)} spheres are both realized and certified non-realizable: {sample}")
    for key, rec in by_key.items():
        if key in realized:
            rec.advance("polytope-realized")
        elif key in certified:
            rec.advance("certified-nonrealizable")
        elif key in unresolved:
            rec.advance("unresolved")
    return out


# --- tables ------------------------------------------------------------------------


@dataclass
class ReportRow:
    group: tuple
    label: str
    spheres: int = 0
    polytopes: int = 0
    nonrealizable: int = 0
    unresolved: int = 0
    distinct: int | None = None  # f-vectors (by facets) or flag f-vectors (by fvector)
    total: bool = False

    def as_dict(self) -> dict:
        d = {
            "group": self.label,
            "spheres": self.spheres,
            "polytopes": self.polytopes,
            "nonrealizable": self.nonrealizable,
            "unresolved": self.unresolved,
        }
        if self.distinct is not None:
            d["distinct"] = self.distinct
        if self.total:
            d["total"] = True
        return d


@dataclass
class ReportTable:
    by: str
    rows: list[ReportRow] = field(default_factory=list)

    @property
    def groups(self) -> list[ReportRow]:
        return [r for r in self.rows if not r.total]

    def row(self, label_or_group) -> ReportRow:
        for r in self.rows:
            if r.label == label_or_group or r.group == label_or_group:
                return r
        raise KeyError(label_or_group)

    def conservation_errors(self) -> list[str]:
        errs = []
        for r in self.rows:
            if r.spheres != r.polytopes + r.nonrealizable + r.unresolved:
                errs.append(f"{r.label}: {r.spheres} != {r.polytopes} + {r.nonrealizable} + {r.unresolved}")
        grand = [r for r in self.rows if r.total and r.group == ("*",)]
        if grand:
            g = grand[0]
            for attr in ("spheres", "polytopes", "nonrealizable", "unresolved"):
                s = sum(getattr(r, attr) for r in self.groups)
                if s != getattr(g, attr):
                    errs.append(f"column {attr}: groups sum to {s}, total says {getattr(g, attr)}")
        return errs

    def header(self) -> list[str]:
        first = {"facets": "f-vector", "fvector": "f-vector", "flagfvector": "flag f-vector"}[self.by]
        cols = [first, "3-spheres", "4-polytopes", "non-realizable", "unresolved"]
        if self.by == "facets":
            cols.append("# of f-vectors")
        elif self.by == "fvector":
            cols.append("# of flag f-vectors")
        return cols

    def _cells(self, r: ReportRow) -> list[str]:
        cells = [r.label, str(r.spheres), str(r.polytopes), str(r.nonrealizable), str(r.unresolved)]
        if self.by != "flagfvector":
            cells.append("" if r.distinct is None else str(r.distinct))
        return cells

    def to_text(self) -> str:
        table = [self.header()] + [self._cells(r) for r in self.rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
        lines = []
        for i, row in enumerate(table):
            lines.append("  ".join(c.ljust(w) if j == 0 else c.rjust(w) for j, (c, w) in enumerate(zip(row, widths))))
            if i == 0:
                lines.append("-" * len(lines[0]))
        return "\n".join(lines)

    def to_tsv(self) -> str:
        return "\n".join("\t".join(cells) for cells in [self.header()] + [self._cells(r) for r in self.rows])

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(r.as_dict()) for r in self.rows)


def _fv_label(fv) -> str:
    return "(" + ", ".join(str(x) for x in fv) + ")"


def _flag_label(fl) -> str:
    return "(" + ",".join(str(x) for x in fl[:4]) + ";" + str(fl[4]) + ")"


def _fv_order(fv):
    # vertices, then facets, then edges: the printed census order
    return (fv[0], fv[3], fv[1], fv[2]) + tuple(fv[4:])


def _tally(row: ReportRow, rec: SphereRecord) -> None:
    row.spheres += 1
    if rec.status == "polytope-realized":
        row.polytopes += 1
    elif rec.status == "certified-nonrealizable":
        row.nonrealizable += 1
    else:
        row.unresolved += 1


def build_report(records: Sequence[SphereRecord], by: str) -> ReportTable:
    if by not in GROUPINGS:
        raise ValueError(f"unknown grouping {by!r}; expected one of {GROUPINGS}")
    for rec in records:
        rec.ensure_metadata()
    table = ReportTable(by)
    grand = ReportRow(("*",), "(*, *, *, *)", total=True)
    if by == "facets":
        groups: dict = defaultdict(list)
        for rec in records:
            groups[(rec.fvector[0], rec.fvector[3])].append(rec)
        for n in sorted({g[0] for g in groups}):
            sub = ReportRow((n, "*"), f"({n}, *, *, *)", total=True)
            fvs = set()
            for g in sorted(k for k in groups if k[0] == n):
                row = ReportRow(g, f"({n}, *, *, {g[1]})")
                members = groups[g]
                for rec in members:
                    _tally(row, rec)
                    _tally(sub, rec)
                    _tally(grand, rec)
                row.distinct = len({rec.fvector for rec in members})
                fvs |= {rec.fvector for rec in members}
                table.rows.append(row)
            sub.distinct = len(fvs)
            table.rows.append(sub)
        grand.distinct = len({rec.fvector for rec in records})
    else:
        attr = "fvector" if by == "fvector" else "flag"
        groups = defaultdict(list)
        for rec in records:
            value = getattr(rec, attr)
            if value is None:
                raise ValueError(f"record {rec.key.hex()} has no {attr}")
            groups[tuple(value)].append(rec)
        label = _fv_label if by == "fvector" else _flag_label
        for g in sorted(groups, key=_fv_order):
            row = ReportRow(g, label(g))
            for rec in groups[g]:
                _tally(row, rec)
                _tally(grand, rec)
            if by == "fvector":
                row.distinct = len({rec.flag for rec in groups[g]})
            table.rows.append(row)
    table.rows.append(grand)
    return table


# --- analyses ----------------------------------------------------------------------


def multipartite_parts(n: int, edges: Iterable[tuple[int, int]]) -> tuple[int, ...] | None:
    """Part sizes (descending) if the graph on ``1..n`` is complete multipartite.

    A graph is complete multipartite exactly when non-adjacency is an
    equivalence relation, i.e. the complement is a disjoint union of cliques.
    """
    adj = {v: set() for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    parts = []
    seen = set()
    for v in range(1, n + 1):
        if v in seen:
            continue
        part = {v} | {u for u in adj if u != v and u not in adj[v]}
        for u in part:
            if (part - {u}) & adj[u]:
                return None
        seen |= part
        parts.append(len(part))
    return tuple(sorted(parts, reverse=True))


def analyze_multipartite(realizations: Iterable) -> list[tuple[tuple[int, ...], int]]:
    """(partition multiset, count) over polytopes whose graph is complete multipartite.

    Accepts RealizationRecords, SphereRecords or bare FacetComplexes.
    """
    counts = Counter()
    for r in realizations:
        cx = getattr(r, "complex", r)
        lat = build_face_poset(cx)
        parts = multipartite_parts(cx.n, vertex_edge_graph(lat))
        if parts is not None:
            counts[parts] += 1
    return sorted(counts.items(), key=lambda kv: kv[0], reverse=True)


def flag_gaps(records: Sequence[SphereRecord]) -> list[ReportRow]:
    """Flag f-vector groups that contain spheres but no realized polytope."""
    table = build_report(records, "flagfvector")
    return [r for r in table.groups if r.spheres and not r.polytopes]
