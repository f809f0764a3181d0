"""Partial chirotopes forced by the incidences of a 3-sphere.

A bracket is a 5-subset of the vertices, stored as a bitmask; the value of an
ordered 5-tuple is the value of its sorted bracket times the sign of the
sorting permutation.  The pipeline derives signs from three incidence rules,
checks three-term Grassmann-Pluecker relations, propagates signs through
relations with one unknown bracket, and finally looks for a biquadratic final
polynomial with the exact LP solver.  Each obstruction becomes a certificate
that :func:`verify_certificate` re-checks from the sphere alone.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .lattice import FacetComplex, build_face_poset, check_sphere, iter_bits, mask_of, vertices_of
from .lp import LinearSystem, check_witness, solve


def tuple_sign(t: Sequence[int]) -> int:
    """Sign of the permutation sorting ``t`` (0 if an entry repeats)."""
    if len(set(t)) != len(t):
        return 0
    inv = 0
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            if t[i] > t[j]:
                inv += 1
    return -1 if inv & 1 else 1


def _bracket(t: Sequence[int]) -> tuple[int, int]:
    """(sorted bracket mask, sign of ordered tuple relative to it)."""
    return mask_of(t), tuple_sign(t)


class PartialChirotope:
    """Alternating sign map defined on a set of sorted 5-subsets of ``1..n``."""

    def __init__(self, n: int, known: dict[int, int] | None = None):
        self.n = n
        self.known: dict[int, int] = dict(known or {})

    def __getitem__(self, t: Sequence[int]) -> int:
        mask, s = _bracket(t)
        if s == 0:
            return 0
        return s * self.known[mask]

    def get(self, t: Sequence[int], default=None):
        mask, s = _bracket(t)
        if s == 0:
            return 0
        if mask not in self.known:
            return default
        return s * self.known[mask]

    def __contains__(self, t) -> bool:
        if isinstance(t, int):
            return t in self.known
        return mask_of(t) in self.known

    def __len__(self) -> int:
        return len(self.known)

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialChirotope) and self.n == other.n and self.known == other.known

    def domain(self) -> set[int]:
        return set(self.known)

    def items(self):
        """(sorted vertex tuple, sign) pairs in bracket order."""
        return [(vertices_of(m), self.known[m]) for m in sorted(self.known, key=vertices_of)]

    def negated(self) -> "PartialChirotope":
        return PartialChirotope(self.n, {m: -s for m, s in self.known.items()})

    def copy(self) -> "PartialChirotope":
        return PartialChirotope(self.n, self.known)

    def is_complete(self) -> bool:
        from math import comb

        return len(self.known) == comb(self.n, 5)

    def equal_up_to_sign(self, other: "PartialChirotope") -> bool:
        return self == other or self == other.negated()

    def __repr__(self) -> str:
        return f"PartialChirotope(n={self.n}, |domain|={len(self.known)})"


# --- Grassmann-Pluecker triples ------------------------------------------------


@dataclass(frozen=True)
class GPTriple:
    """Relation [xab][xcd] - [xac][xbd] + [xad][xbc] = 0."""

    x: tuple[int, int, int]
    abcd: tuple[int, int, int, int]

    def tuples(self) -> list[tuple[int, ...]]:
        a, b, c, d = self.abcd
        x = self.x
        return [x + (a, b), x + (c, d), x + (a, c), x + (b, d), x + (a, d), x + (b, c)]

    def brackets(self) -> list[int]:
        return [mask_of(t) for t in self.tuples()]


# Terms are pairs of positions in GPTriple.tuples(); the middle term carries
# the minus sign of the relation.
_TERMS = ((0, 1), (2, 3), (4, 5))
_TERM_SIGN = (1, -1, 1)


@lru_cache(maxsize=None)
def gp_triples(n: int) -> tuple:
    """All triples for ``n`` elements, each as (GPTriple, masks, signs)."""
    out = []
    for x in combinations(range(1, n + 1), 3):
        rest = [v for v in range(1, n + 1) if v not in x]
        for abcd in combinations(rest, 4):
            g = GPTriple(x, abcd)
            ts = g.tuples()
            out.append((g, tuple(mask_of(t) for t in ts), tuple(tuple_sign(t) for t in ts)))
    return tuple(out)


@lru_cache(maxsize=None)
def _triples_by_bracket(n: int) -> dict[int, list[int]]:
    index: dict[int, list[int]] = {}
    for i, (_, masks, _) in enumerate(gp_triples(n)):
        for m in masks:
            index.setdefault(m, []).append(i)
    return index


def _effective(vals: Sequence[int]) -> tuple[int, int, int]:
    return tuple(_TERM_SIGN[k] * vals[i] * vals[j] for k, (i, j) in enumerate(_TERMS))


def gp_impossible(effective: Sequence[int]) -> bool:
    """True iff no magnitudes make the signed terms sum to zero."""
    nz = [e for e in effective if e]
    return bool(nz) and all(e == nz[0] for e in nz)


def _ordered_values(chi: dict[int, int], masks, signs):
    return [None if m not in chi else chi[m] * s for m, s in zip(masks, signs)]


def check_gp(chi: PartialChirotope):
    """First violated relation among those with all six brackets defined.

    Returns ``(GPTriple, six ordered values)`` or None.
    """
    known = chi.known
    for g, masks, signs in gp_triples(chi.n):
        vals = _ordered_values(known, masks, signs)
        if None in vals:
            continue
        if gp_impossible(_effective(vals)):
            return g, tuple(vals)
    return None


# --- Incidence rules -------------------------------------------------------------


@dataclass(frozen=True)
class RuleApplication:
    """One use of rule 2 or rule 3 relating two ordered 5-tuples.

    rule 2: ``t1 = abcd + (e,)`` and ``t2 = abcd + (e',)`` with ``abcd`` in
    ``facets[0]`` and ``e, e'`` outside; chi(t1) = chi(t2).
    rule 3: ``t1 = abc + (d, e)``, ``t2 = abc + (d', e)`` with ``abc`` in the
    ridge ``facets[0] & facets[1]``, ``d`` in ``facets[0]`` only, ``d'`` in
    ``facets[1]`` only, ``e`` outside both; chi(t1) = -chi(t2).
    """

    rule: int
    facets: tuple[tuple[int, ...], ...]
    t1: tuple[int, ...]
    t2: tuple[int, ...]

    @property
    def relation(self) -> int:
        return 1 if self.rule == 2 else -1

    def bracket_parity(self) -> int:
        """chi(sorted t1) = parity * chi(sorted t2)."""
        return self.relation * tuple_sign(self.t1) * tuple_sign(self.t2)

    def valid_for(self, facet_masks: set[int], ridges: set[int]) -> bool:
        t1, t2 = self.t1, self.t2
        if len(set(t1)) != 5 or len(set(t2)) != 5:
            return False
        if self.rule == 2:
            if len(self.facets) != 1:
                return False
            f = mask_of(self.facets[0])
            if f not in facet_masks or t1[:4] != t2[:4] or t1[4] == t2[4]:
                return False
            return mask_of(t1[:4]) & ~f == 0 and not f >> (t1[4] - 1) & 1 and not f >> (t2[4] - 1) & 1
        if self.rule == 3:
            if len(self.facets) != 2:
                return False
            f, g = (mask_of(x) for x in self.facets)
            r = f & g
            if f not in facet_masks or g not in facet_masks or r not in ridges:
                return False
            if t1[:3] != t2[:3] or t1[4] != t2[4]:
                return False
            abc = mask_of(t1[:3])
            d, d2, e = 1 << (t1[3] - 1), 1 << (t2[3] - 1), 1 << (t1[4] - 1)
            return abc & ~r == 0 and d & f and not d & r and d2 & g and not d2 & r and not e & (f | g)
        return False

    def to_dict(self) -> dict:
        return {"rule": self.rule, "facets": [list(f) for f in self.facets], "t1": list(self.t1), "t2": list(self.t2)}

    @classmethod
    def from_dict(cls, d: dict) -> "RuleApplication":
        return cls(int(d["rule"]), tuple(tuple(f) for f in d["facets"]), tuple(d["t1"]), tuple(d["t2"]))


def _ridges(cx: FacetComplex) -> list[tuple[int, int, int]]:
    """(ridge, f, g) for every pair of facets meeting in a ridge."""
    lat = build_face_poset(cx)
    ranks = set(lat.faces_of_rank(cx.d - 1))
    out = []
    for f, g in combinations(sorted(cx.facets, key=vertices_of), 2):
        if f & g in ranks:
            out.append((f & g, f, g))
    return out


def rule_applications(cx: FacetComplex):
    """All rule-2 and rule-3 applications plus rule-1 zero brackets.

    Returns ``(zeros, rule2, rule3)`` where zeros maps a bracket mask to a
    facet containing it.
    """
    full = cx.vertex_mask
    zeros: dict[int, int] = {}
    rule2 = []
    rule3 = []
    facets = sorted(cx.facets, key=vertices_of)
    for f in facets:
        fv = vertices_of(f)
        for five in combinations(fv, 5):
            zeros.setdefault(mask_of(five), f)
        outside = vertices_of(full & ~f)
        for abcd in combinations(fv, 4):
            for e, e2 in combinations(outside, 2):
                rule2.append(RuleApplication(2, (fv,), abcd + (e,), abcd + (e2,)))
    for r, f, g in _ridges(cx):
        rv = vertices_of(r)
        fo = vertices_of(f & ~r)
        go = vertices_of(g & ~r)
        outside = vertices_of(full & ~(f | g))
        for abc in combinations(rv, 3):
            for d in fo:
                for d2 in go:
                    for e in outside:
                        rule3.append(
                            RuleApplication(3, (vertices_of(f), vertices_of(g)), abc + (d, e), abc + (d2, e))
                        )
    return zeros, rule2, rule3


# --- Certificates ----------------------------------------------------------------


@dataclass
class Certificate:
    """Non-realizability certificate.

    kind ``rule-conflict``: ``data = {"root": rule-3 application showing the
    root bracket is nonzero, "path": applications, "end": "odd-cycle" |
    "zero", "zero_facet": facet}``.
    kind ``gp-violation``: ``data = {"triple": (x, abcd), "values": six
    ordered values}``.
    kind ``propagation-contradiction``: ``data = {"steps": [(triple,
    bracket tuple, sign)], "conflict": (kind, triple)}``.
    kind ``bfp``: ``data = {"steps": deductions completing the chirotope,
    "chirotope": [(tuple, sign)], "inequalities": [...], "equalities": [...],
    "multipliers": [...], "eq_multipliers": [...]}``.
    """

    kind: str
    data: dict
    n: int
    stage: str = ""

    def to_dict(self) -> dict:
        from .io import certificate_to_dict

        return certificate_to_dict(self)


class RuleConflict(Exception):
    def __init__(self, certificate: Certificate):
        super().__init__("incidence rules force contradictory signs")
        self.certificate = certificate


@dataclass
class Derivation:
    chirotope: PartialChirotope
    anchor: RuleApplication | None
    undetermined_components: int = 0


def _path(parent: dict, node: int) -> list:
    """Applications from the BFS root down to ``node``."""
    out = []
    while parent[node] is not None:
        prev, app = parent[node]
        out.append(app)
        node = prev
    out.reverse()
    return out


def derive_partial_chirotope(sphere: FacetComplex, order: str = "forward", anchor_sign: int = 1) -> Derivation:
    """Signs forced by the incidence rules, with one rule-3 instance set to
    ``anchor_sign``.

    Brackets linked by rule 2/3 form components with relative parities.
    A component reaching a rule-1 bracket is zero; the component of the anchor
    is signed; any other component stays undefined.  Raises
    :class:`RuleConflict` when a component that must be nonzero (it holds a
    rule-3 bracket) is forced to zero by a rule-1 bracket or an odd cycle.
    """
    zeros, rule2, rule3 = rule_applications(sphere)
    apps = rule2 + rule3
    if order == "reverse":
        apps = apps[::-1]
    adj: dict[int, list] = {}
    for app in apps:
        b1, b2 = mask_of(app.t1), mask_of(app.t2)
        p = app.bracket_parity()
        adj.setdefault(b1, []).append((b2, p, app))
        adj.setdefault(b2, []).append((b1, p, app))
    nonzero_reason: dict[int, RuleApplication] = {}
    for app in sorted(rule3, key=_app_sort_key):
        nonzero_reason.setdefault(mask_of(app.t1), app)
        nonzero_reason.setdefault(mask_of(app.t2), app)
    anchor = min(rule3, key=_app_sort_key) if rule3 else None
    anchor_mask = mask_of(anchor.t1) if anchor else None

    known: dict[int, int] = {m: 0 for m in zeros}
    seen: set[int] = set()
    undetermined = 0
    # Roots are chosen canonically so the result does not depend on order.
    nodes = sorted(adj, key=lambda m: (m != anchor_mask, m not in nonzero_reason, vertices_of(m)))
    for root in nodes:
        if root in seen:
            continue
        parity = {root: 1}
        parent = {root: None}
        queue = deque([root])
        odd = None
        zero_at = None
        while queue:
            u = queue.popleft()
            if zero_at is None and u in zeros:
                zero_at = u
            for v, p, app in adj[u]:
                if v not in parity:
                    parity[v] = parity[u] * p
                    parent[v] = (u, app)
                    queue.append(v)
                elif odd is None and parity[v] != parity[u] * p:
                    odd = (u, v, app)
        seen.update(parity)
        must_be_nonzero = root in nonzero_reason
        if must_be_nonzero and (odd is not None or zero_at is not None):
            if odd is not None:
                u, v, app = odd
                path = _path(parent, u) + [app] + _reverse_path(parent, v)
                data = {"root": nonzero_reason[root], "root_bracket": vertices_of(root), "path": path, "end": "odd-cycle"}
            else:
                data = {
                    "root": nonzero_reason[root],
                    "root_bracket": vertices_of(root),
                    "path": _path(parent, zero_at),
                    "end": "zero",
                    "zero_facet": vertices_of(zeros[zero_at]),
                }
            raise RuleConflict(Certificate("rule-conflict", data, sphere.n, "derive"))
        if zero_at is not None or odd is not None:
            for m in parity:
                known[m] = 0
        elif root == anchor_mask:
            # chi(anchor.t1) = anchor_sign as an ordered tuple
            base = anchor_sign * tuple_sign(anchor.t1)
            for m, p in parity.items():
                known[m] = base * p
        else:
            undetermined += 1
    return Derivation(PartialChirotope(sphere.n, known), anchor, undetermined)


def _reverse_path(parent: dict, node: int) -> list:
    return _path(parent, node)[::-1]


def _app_sort_key(app: RuleApplication):
    f, g = app.facets
    ridge = tuple(sorted(set(f) & set(g)))
    return (ridge, f, g, app.t1[4], app.t1[:3], app.t1[3], app.t2[3])


# --- Propagation -----------------------------------------------------------------


@dataclass(frozen=True)
class Deduction:
    triple: GPTriple
    bracket: tuple[int, ...]
    sign: int

    def to_list(self):
        return [list(self.triple.x), list(self.triple.abcd), list(self.bracket), self.sign]

    @classmethod
    def from_list(cls, row) -> "Deduction":
        return cls(GPTriple(tuple(row[0]), tuple(row[1])), tuple(row[2]), int(row[3]))


class PropagationContradiction(Exception):
    def __init__(self, certificate: Certificate):
        super().__init__("sign propagation reached a contradiction")
        self.certificate = certificate


def _forced(vals, idx):
    """Deduce the value at position ``idx`` (the only unknown) of a triple.

    Returns ``("value", v)``, ``("none", None)`` or ``("conflict", None)``.
    """
    k = idx // 2
    partner = idx ^ 1
    others = [e for kk, e in enumerate(_effective_partial(vals, k)) if kk != k]
    s, t = others
    if s == 0 and t == 0:
        need = 0
    elif s == 0 or t == 0:
        need = -(s or t)
    elif s == t:
        need = -s
    else:
        return "none", None
    p = vals[partner]
    if need == 0:
        return ("value", 0) if p != 0 else ("none", None)
    if p == 0:
        return "conflict", None
    # effective = term_sign * v * p
    return "value", need * _TERM_SIGN[k] * p


def _effective_partial(vals, skip):
    out = []
    for k, (i, j) in enumerate(_TERMS):
        out.append(0 if k == skip else _TERM_SIGN[k] * vals[i] * vals[j])
    return out


@dataclass
class Propagation:
    chirotope: PartialChirotope
    deductions: list[Deduction]


def propagate(chi: PartialChirotope, order: str = "forward") -> Propagation:
    """Extend ``chi`` through relations with exactly one unknown bracket.

    Raises :class:`PropagationContradiction` carrying the deductions the
    conflict depends on.
    """
    n = chi.n
    triples = gp_triples(n)
    by_bracket = _triples_by_bracket(n)
    known = dict(chi.known)
    steps: list[tuple[int, int, int]] = []  # (triple index, mask, sorted value)
    step_of: dict[int, int] = {}
    idx_order = range(len(triples)) if order == "forward" else range(len(triples) - 1, -1, -1)
    queue = deque(idx_order)
    queued = set(queue)

    def fail(kind, t):
        raise PropagationContradiction(_contradiction_certificate(n, triples, steps, step_of, kind, t))

    while queue:
        t = queue.popleft()
        queued.discard(t)
        g, masks, signs = triples[t]
        vals = _ordered_values(known, masks, signs)
        missing = [i for i, v in enumerate(vals) if v is None]
        if not missing:
            if gp_impossible(_effective(vals)):
                fail("gp", t)
            continue
        if len(missing) != 1:
            continue
        idx = missing[0]
        kind, v = _forced(vals, idx)
        if kind == "conflict":
            fail("partner-zero", t)
        if kind == "none":
            continue
        m = masks[idx]
        known[m] = v * signs[idx]
        step_of[m] = len(steps)
        steps.append((t, m, known[m]))
        for t2 in by_bracket[m]:
            if t2 not in queued:
                queue.append(t2)
                queued.add(t2)
    deductions = [Deduction(triples[t][0], vertices_of(m), v) for t, m, v in steps]
    return Propagation(PartialChirotope(n, known), deductions)


def _contradiction_certificate(n, triples, steps, step_of, kind, t) -> Certificate:
    need = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        for m in triples[cur][1]:
            s = step_of.get(m)
            if s is not None and s not in need:
                need.add(s)
                stack.append(steps[s][0])
    kept = [Deduction(triples[tt][0], vertices_of(m), v) for i, (tt, m, v) in enumerate(steps) if i in need]
    g = triples[t][0]
    return Certificate(
        "propagation-contradiction",
        {"steps": kept, "conflict": (kind, g)},
        n,
        "propagate",
    )


# --- Biquadratic final polynomials -----------------------------------------------


@dataclass(frozen=True)
class BiquadraticRow:
    """``sum(plus) - sum(minus)`` of bracket logarithms, ``> 0`` or ``= 0``."""

    plus: tuple[tuple[int, ...], tuple[int, ...]]
    minus: tuple[tuple[int, ...], tuple[int, ...]]
    strict: bool
    triple: GPTriple

    def to_dict(self):
        return {
            "plus": [list(b) for b in self.plus],
            "minus": [list(b) for b in self.minus],
            "strict": self.strict,
            "x": list(self.triple.x),
            "abcd": list(self.triple.abcd),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(tuple(b) for b in d["plus"]),
            tuple(tuple(b) for b in d["minus"]),
            bool(d["strict"]),
            GPTriple(tuple(d["x"]), tuple(d["abcd"])),
        )


def biquadratic_rows(chi: PartialChirotope) -> list[BiquadraticRow]:
    """Inequalities between term magnitudes implied by complete relations."""
    rows = []
    seen = set()
    for g, masks, signs in gp_triples(chi.n):
        vals = _ordered_values(chi.known, masks, signs)
        if None in vals:
            continue
        eff = _effective(vals)
        terms = [tuple(vertices_of(masks[i]) for i in pair) for pair in _TERMS]
        nonzero = [k for k in range(3) if eff[k]]
        new = []
        if len(nonzero) == 3:
            for o in range(3):
                rest = [k for k in range(3) if k != o]
                if eff[rest[0]] == eff[rest[1]] != eff[o]:
                    new = [(terms[o], terms[k], True) for k in rest]
        elif len(nonzero) == 2 and eff[nonzero[0]] == -eff[nonzero[1]]:
            p, q = sorted((terms[nonzero[0]], terms[nonzero[1]]))
            new = [(p, q, False)]
        for plus, minus, strict in new:
            key = (tuple(sorted(plus)), tuple(sorted(minus)), strict)
            if key in seen:
                continue
            seen.add(key)
            rows.append(BiquadraticRow(key[0], key[1], strict, g))
    return rows


def _bfp_system(chi: PartialChirotope, rows: list[BiquadraticRow]):
    variables = sorted({b for r in rows for b in r.plus + r.minus})
    col = {b: i for i, b in enumerate(variables)}
    nv = len(variables) + 1  # last variable is the slack epsilon
    ineq, eq = [], []
    for r in rows:
        a = [0] * nv
        for b in r.plus:
            a[col[b]] += 1
        for b in r.minus:
            a[col[b]] -= 1
        if r.strict:
            a[-1] = -1
            ineq.append((a, 0))
        else:
            eq.append((a, 0))
    cap = [0] * nv
    cap[-1] = -1
    ineq.append((cap, -1))
    obj = [0] * nv
    obj[-1] = 1
    return LinearSystem(nv, ineq, eq, obj), variables


@dataclass
class BFPResult:
    found: bool
    rows: list[BiquadraticRow]
    outcome: object
    multipliers: tuple = ()
    eq_multipliers: tuple = ()


def bfp_search(chi: PartialChirotope) -> BFPResult:
    """Look for a nonnegative combination of the strict rows (plus any
    combination of the equalities) that cancels to ``0 > 0``."""
    rows = biquadratic_rows(chi)
    strict = [r for r in rows if r.strict]
    if not strict:
        return BFPResult(False, rows, None)
    system, _ = _bfp_system(chi, rows)
    out = solve(system)
    if not check_witness(system, out):
        raise AssertionError("LP witness failed its re-check")
    # v = 0, eps = 0 is always feasible, so the LP has an optimum; the strict
    # system is infeasible iff that optimum is <= 0 (then it is 0 and the cap
    # row carries no weight).
    if out.optimum <= 0:
        y = out.y[:-1]
        return BFPResult(True, rows, out, tuple(y), tuple(out.z))
    return BFPResult(False, rows, out)


# --- Classification --------------------------------------------------------------


@dataclass
class Classification:
    status: str  # "certified-nonrealizable" | "unresolved"
    stage: str | None
    certificate: Certificate | None
    s0: int = 0
    s1: int = 0
    complete: bool = False


STAGES = ("gp", "propagate", "bfp", "all")


def classify(sphere: FacetComplex, stage: str = "all") -> Classification:
    """Run derive, GP check, propagation and BFP search; first obstruction wins.

    ``stage`` stops the pipeline after the named step.
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    try:
        der = derive_partial_chirotope(sphere)
    except RuleConflict as exc:
        return Classification("certified-nonrealizable", "derive", exc.certificate)
    chi = der.chirotope
    s0 = len(chi)
    hit = check_gp(chi)
    if hit is not None:
        g, vals = hit
        cert = Certificate("gp-violation", {"triple": g, "values": vals}, sphere.n, "gp")
        return Classification("certified-nonrealizable", "gp", cert, s0)
    if stage == "gp":
        return Classification("unresolved", None, None, s0)
    try:
        prop = propagate(chi)
    except PropagationContradiction as exc:
        return Classification("certified-nonrealizable", "propagate", exc.certificate, s0)
    chi1 = prop.chirotope
    if stage == "propagate":
        return Classification("unresolved", None, None, s0, len(chi1), chi1.is_complete())
    res = bfp_search(chi1)
    if res.found:
        cert = Certificate(
            "bfp",
            {
                "steps": prop.deductions,
                "chirotope": chi1.items(),
                "inequalities": [r for r in res.rows if r.strict],
                "equalities": [r for r in res.rows if not r.strict],
                "multipliers": res.multipliers,
                "eq_multipliers": res.eq_multipliers,
            },
            sphere.n,
            "bfp",
        )
        return Classification("certified-nonrealizable", "bfp", cert, s0, len(chi1), chi1.is_complete())
    return Classification("unresolved", None, None, s0, len(chi1), chi1.is_complete())


# --- Verification ----------------------------------------------------------------


class VerificationError(Exception):
    pass


def _replay(chi: dict[int, int], steps: Iterable[Deduction], n: int) -> dict[int, int]:
    known = dict(chi)
    for i, st in enumerate(steps):
        g = st.triple
        _check_triple(g, n, i)
        masks = g.brackets()
        signs = [tuple_sign(t) for t in g.tuples()]
        target = mask_of(st.bracket)
        if target not in masks:
            raise VerificationError(f"step {i}: bracket {st.bracket} is not in its relation")
        if target in known:
            raise VerificationError(f"step {i}: bracket {st.bracket} is already known")
        vals = _ordered_values(known, masks, signs)
        missing = [j for j, v in enumerate(vals) if v is None]
        if missing != [masks.index(target)]:
            raise VerificationError(f"step {i}: relation does not have exactly this bracket unknown")
        kind, v = _forced(vals, missing[0])
        if kind != "value" or v * signs[missing[0]] != st.sign:
            raise VerificationError(f"step {i}: deduction of {st.bracket} is not forced")
        known[target] = st.sign
    return known


def _check_triple(g: GPTriple, n: int, i) -> None:
    allv = list(g.x) + list(g.abcd)
    if (
        len(set(allv)) != 7
        or list(g.x) != sorted(g.x)
        or list(g.abcd) != sorted(g.abcd)
        or not all(1 <= v <= n for v in allv)
    ):
        raise VerificationError(f"step {i}: malformed relation {g}")


def verify_certificate(cert: Certificate, sphere: FacetComplex) -> tuple[bool, str]:
    """Re-check ``cert`` against ``sphere``; returns ``(ok, diagnostic)``."""
    try:
        _verify(cert, sphere)
    except VerificationError as exc:
        return False, str(exc)
    return True, "ok"


def _verify(cert: Certificate, sphere: FacetComplex) -> None:
    if cert.n != sphere.n:
        raise VerificationError("certificate is for a different vertex count")
    if not check_sphere(sphere).ok:
        raise VerificationError("input is not a combinatorial sphere")
    if cert.kind == "rule-conflict":
        _verify_rule_conflict(cert.data, sphere)
        return
    try:
        chi = derive_partial_chirotope(sphere).chirotope
    except RuleConflict:
        raise VerificationError("sphere has a rule conflict; certificate kind does not match")
    n = sphere.n
    if cert.kind == "gp-violation":
        g = cert.data["triple"]
        _check_triple(g, n, "relation")
        masks = g.brackets()
        signs = [tuple_sign(t) for t in g.tuples()]
        vals = _ordered_values(chi.known, masks, signs)
        if None in vals:
            raise VerificationError("relation uses a bracket outside the derived domain")
        if tuple(vals) != tuple(cert.data["values"]):
            raise VerificationError("stored signs differ from the derived chirotope")
        if not gp_impossible(_effective(vals)):
            raise VerificationError("sign pattern is compatible with the relation")
        return
    if cert.kind == "propagation-contradiction":
        known = _replay(chi.known, cert.data["steps"], n)
        kind, g = cert.data["conflict"]
        _check_triple(g, n, "conflict")
        masks = g.brackets()
        signs = [tuple_sign(t) for t in g.tuples()]
        vals = _ordered_values(known, masks, signs)
        if kind == "gp":
            if None in vals or not gp_impossible(_effective(vals)):
                raise VerificationError("final relation is not violated")
        elif kind == "partner-zero":
            missing = [j for j, v in enumerate(vals) if v is None]
            if len(missing) != 1 or _forced(vals, missing[0])[0] != "conflict":
                raise VerificationError("final relation does not force a nonzero term with a zero factor")
        else:
            raise VerificationError(f"unknown conflict kind {kind}")
        return
    if cert.kind == "bfp":
        known = _replay(chi.known, cert.data["steps"], n)
        stored = {mask_of(t): s for t, s in cert.data["chirotope"]}
        if stored != known:
            raise VerificationError("stored chirotope differs from the replayed one")
        full = PartialChirotope(n, known)
        valid = set()
        for r in biquadratic_rows(full):
            valid.add((r.plus, r.minus, r.strict))
        ineqs = cert.data["inequalities"]
        eqs = cert.data["equalities"]
        y = [Fraction(v) for v in cert.data["multipliers"]]
        z = [Fraction(v) for v in cert.data["eq_multipliers"]]
        if len(y) != len(ineqs) or len(z) != len(eqs):
            raise VerificationError("multiplier count does not match the row count")
        for i, r in enumerate(list(ineqs) + list(eqs)):
            if (tuple(sorted(r.plus)), tuple(sorted(r.minus)), r.strict) not in valid:
                raise VerificationError(f"row {i} is not implied by the chirotope")
            if r.strict != (i < len(ineqs)):
                raise VerificationError(f"row {i} has the wrong strictness")
        if any(w < 0 for w in y) or not any(w > 0 for w in y):
            raise VerificationError("multipliers must be nonnegative and not all zero")
        total: dict = {}
        for w, r in zip(y + z, list(ineqs) + list(eqs)):
            for b in r.plus:
                total[b] = total.get(b, 0) + w
            for b in r.minus:
                total[b] = total.get(b, 0) - w
        if any(v != 0 for v in total.values()):
            raise VerificationError("weighted rows do not cancel")
        return
    raise VerificationError(f"unknown certificate kind {cert.kind!r}")


def _verify_rule_conflict(data: dict, sphere: FacetComplex) -> None:
    facet_masks = set(sphere.facets)
    lat = build_face_poset(sphere)
    ridges = set(lat.faces_of_rank(sphere.d - 1))
    root_app: RuleApplication = data["root"]
    if root_app.rule != 3 or not root_app.valid_for(facet_masks, ridges):
        raise VerificationError("root reason is not a valid rule-3 application")
    root = mask_of(data["root_bracket"])
    if root not in (mask_of(root_app.t1), mask_of(root_app.t2)):
        raise VerificationError("root reason does not mention the root bracket")
    path = data["path"]
    cur = root
    start = cur
    parity = 1
    for i, app in enumerate(path):
        if not app.valid_for(facet_masks, ridges):
            raise VerificationError(f"application {i} does not follow from the incidences")
        b1, b2 = mask_of(app.t1), mask_of(app.t2)
        if cur == b1:
            cur = b2
        elif cur == b2:
            cur = b1
        else:
            raise VerificationError(f"application {i} does not continue the chain")
        parity *= app.bracket_parity()
    if data["end"] == "odd-cycle":
        if cur != start or parity != -1:
            raise VerificationError("chain is not an odd cycle")
    elif data["end"] == "zero":
        f = mask_of(data["zero_facet"])
        if f not in facet_masks or cur & ~f:
            raise VerificationError("chain does not end in a bracket inside a facet")
    else:
        raise VerificationError("unknown end condition")
