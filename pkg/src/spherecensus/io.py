"""Line-oriented interchange formats.

Sphere files hold one record per line, in either of two encodings:

* compact (n <= 9): ``[12345,12469,...]``, each facet written as its digits;
* general: a JSON object with ``n``, ``facets`` (lists of labels) and optional
  metadata (``key``, ``fvector``, ``flag``, ``status``, ``compact``).

Realization and certificate files are JSON lines; rationals are ``"p/q"``
strings.  Blank lines and lines starting with ``#`` are ignored everywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .canon import CanonicalKey, canonical_key
from .lattice import FacetComplex, LatticeError, build_face_poset, f_vector, flag_f_vector, mask_of, vertices_of

STATUSES = ("sphere", "polytope-realized", "certified-nonrealizable", "unresolved")


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, offset: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if offset is not None:
                where += f", offset {offset}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.offset = offset


# --- spheres -----------------------------------------------------------------------


@dataclass
class SphereRecord:
    complex: FacetComplex
    key: CanonicalKey | None = None
    fvector: tuple | None = None
    flag: tuple | None = None
    status: str = "sphere"
    order: tuple | None = None  # facet masks in source order, for lossless re-emission

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def n(self) -> int:
        return self.complex.n

    def ensure_metadata(self) -> "SphereRecord":
        if self.key is None:
            self.key = canonical_key(self.complex)
        if self.fvector is None or self.flag is None:
            lat = build_face_poset(self.complex)
            self.fvector = tuple(f_vector(lat))
            if lat.height == 5:
                self.flag = tuple(flag_f_vector(lat))
        return self

    def advance(self, status: str) -> None:
        """Move forward: sphere -> unresolved | realized | certified."""
        if status not in STATUSES:
            raise ValueError(f"unknown status {status!r}")
        order = {"sphere": 0, "unresolved": 1, "polytope-realized": 2, "certified-nonrealizable": 2}
        if order[status] < order[self.status] or (order[self.status] == 2 and status != self.status):
            raise ValueError(f"illegal status change {self.status} -> {status}")
        self.status = status


def parse_compact(text: str, line: int | None = None) -> FacetComplex:
    return _parse_compact(text, line)[0]


def _parse_compact(text: str, line: int | None):
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("compact record must be enclosed in brackets", line, 0)
    body = s[1:-1]
    facets = []
    offsets = []
    pos = 1
    for part in body.split(","):
        tok = part.strip()
        if not tok or not tok.isdigit():
            raise ParseError(f"bad facet token {part!r}", line, pos)
        if "0" in tok:
            raise ParseError(f"vertex 0 in facet {tok}", line, pos)
        if len(set(tok)) != len(tok):
            raise ParseError(f"repeated vertex in facet {tok}", line, pos)
        facets.append([int(c) for c in tok])
        offsets.append(pos)
        pos += len(part) + 1
    return _checked_order(facets, None, line, offsets)


def _checked(facets: list[list[int]], n: int | None, line) -> FacetComplex:
    return _checked_order(facets, n, line)[0]


def _checked_order(facets, n, line, offsets=None):
    if not facets:
        raise ParseError("no facets", line)
    if any(not f for f in facets):
        raise ParseError("empty facet", line)
    top = max(max(f) for f in facets)
    if n is None:
        n = top
    at = offsets or [None] * len(facets)
    for f, off in zip(facets, at):
        if not f:
            raise ParseError("empty facet", line, off)
        if len(set(f)) != len(f):
            raise ParseError(f"repeated vertex in facet {f}", line, off)
        if min(f) < 1 or max(f) > n:
            raise ParseError(f"vertex outside 1..{n} in facet {f}", line, off)
    masks = [mask_of(f) for f in facets]
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            if i != j and a & b == a:
                raise ParseError(f"facet {facets[i]} is contained in facet {facets[j]}", line, at[i])
    try:
        return FacetComplex(n, tuple(masks)), tuple(masks)
    except LatticeError as exc:
        raise ParseError(str(exc), line)


def emit_compact(cx: FacetComplex, order=None) -> str:
    if cx.n > 9:
        raise ValueError("compact form needs n <= 9")
    return "[" + ",".join("".join(str(v) for v in f) for f in _ordered_facets(cx, order)) + "]"


def _ordered_facets(cx: FacetComplex, order=None) -> list[tuple[int, ...]]:
    if order is not None and sorted(order) == list(cx.facets):
        return [vertices_of(f) for f in order]
    return sorted(cx.facet_lists())


def parse_record(text: str, line: int | None = None) -> SphereRecord:
    s = text.strip()
    if s.startswith("["):
        cx, order = _parse_compact(s, line)
        return SphereRecord(cx, order=order)
    try:
        obj = json.loads(s)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a compact or JSON record ({exc.msg})", line, exc.pos)
    if not isinstance(obj, dict) or "facets" not in obj:
        raise ParseError("JSON record needs a 'facets' field", line)
    facets = obj["facets"]
    if not all(isinstance(f, list) and all(isinstance(v, int) for v in f) for f in facets):
        raise ParseError("facets must be lists of integers", line)
    cx, order = _checked_order(facets, obj.get("n"), line)
    try:
        rec = SphereRecord(cx, status=obj.get("status", "sphere"), order=order)
    except ValueError as exc:
        raise ParseError(str(exc), line)
    if "key" in obj:
        rec.key = CanonicalKey.fromhex(obj["key"])
        if rec.key != canonical_key(cx):
            raise ParseError("stored key does not match the facets", line)
    if "fvector" in obj:
        rec.fvector = tuple(obj["fvector"])
    if "flag" in obj:
        rec.flag = tuple(obj["flag"])
    return rec


def emit_record(rec: SphereRecord) -> str:
    rec.ensure_metadata()
    obj = {
        "n": rec.n,
        "facets": [list(f) for f in _ordered_facets(rec.complex, rec.order)],
        "key": rec.key.hex(),
        "fvector": list(rec.fvector),
    }
    if rec.flag is not None:
        obj["flag"] = list(rec.flag)
    obj["status"] = rec.status
    if rec.n <= 9:
        obj["compact"] = emit_compact(rec.complex, rec.order)
    return json.dumps(obj, separators=(",", ":"))


def _lines(path: Path) -> Iterator[tuple[int, str]]:
    with open(path) as fh:
        for i, raw in enumerate(fh, 1):
            s = raw.strip()
            if s and not s.startswith("#"):
                yield i, s


def read_spheres(path, with_lines: bool = False):
    for i, s in _lines(Path(path)):
        rec = parse_record(s, i)
        yield (i, rec) if with_lines else rec


def write_spheres(path, records: Iterable[SphereRecord]) -> int:
    count = 0
    with open(path, "w") as fh:
        for rec in records:
            fh.write(emit_record(rec) + "\n")
            count += 1
    return count


# --- rationals, realizations -------------------------------------------------------


def fmt_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {s!r}")


@dataclass
class RealizationRecord:
    coords: list[tuple[Fraction, ...]]
    complex: FacetComplex
    key: CanonicalKey
    rule: str = ""

    @property
    def n(self) -> int:
        return self.complex.n


def realization_from_polytope(P, rule: str = "") -> RealizationRecord:
    return RealizationRecord([tuple(v) for v in P.vertices], P.complex(), P.key, rule)


def emit_realization(rec: RealizationRecord) -> str:
    obj = {
        "n": rec.n,
        "key": rec.key.hex(),
        "coords": [[fmt_rational(c) for c in v] for v in rec.coords],
        "facets": [list(f) for f in _ordered_facets(rec.complex)],
    }
    if rec.rule:
        obj["rule"] = rec.rule
    return json.dumps(obj, separators=(",", ":"))


def parse_realization(text: str, line: int | None = None) -> RealizationRecord:
    try:
        obj = json.loads(text)
        coords = [tuple(parse_rational(c) for c in v) for v in obj["coords"]]
        cx = _checked(obj["facets"], obj.get("n"), line)
        key = CanonicalKey.fromhex(obj["key"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed realization record ({exc})", line)
    except ParseError as exc:
        raise ParseError(str(exc), line)
    return RealizationRecord(coords, cx, key, obj.get("rule", ""))


def read_realizations(path) -> list[RealizationRecord]:
    return [parse_realization(s, i) for i, s in _lines(Path(path))]


def write_realizations(path, records: Iterable[RealizationRecord]) -> int:
    count = 0
    with open(path, "w") as fh:
        for rec in records:
            fh.write(emit_realization(rec) + "\n")
            count += 1
    return count


# --- certificates ------------------------------------------------------------------


def _encode(obj):
    from .chirotope import BiquadraticRow, Deduction, GPTriple, RuleApplication

    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, RuleApplication):
        return obj.to_dict()
    if isinstance(obj, Deduction):
        return obj.to_list()
    if isinstance(obj, BiquadraticRow):
        return obj.to_dict()
    if isinstance(obj, GPTriple):
        return {"x": list(obj.x), "abcd": list(obj.abcd)}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    return obj


def certificate_to_dict(cert) -> dict:
    return {"kind": cert.kind, "n": cert.n, "stage": cert.stage, "data": _encode(cert.data)}


def certificate_from_dict(obj: dict):
    from .chirotope import BiquadraticRow, Certificate, Deduction, GPTriple, RuleApplication

    kind = obj["kind"]
    d = obj["data"]

    def triple(t):
        return GPTriple(tuple(t["x"]), tuple(t["abcd"]))

    if kind == "rule-conflict":
        data = {
            "root": RuleApplication.from_dict(d["root"]),
            "root_bracket": tuple(d["root_bracket"]),
            "path": [RuleApplication.from_dict(a) for a in d["path"]],
            "end": d["end"],
        }
        if "zero_facet" in d:
            data["zero_facet"] = tuple(d["zero_facet"])
    elif kind == "gp-violation":
        data = {"triple": triple(d["triple"]), "values": tuple(d["values"])}
    elif kind == "propagation-contradiction":
        data = {
            "steps": [Deduction.from_list(s) for s in d["steps"]],
            "conflict": (d["conflict"][0], triple(d["conflict"][1])),
        }
    elif kind == "bfp":
        data = {
            "steps": [Deduction.from_list(s) for s in d["steps"]],
            "chirotope": [(tuple(t), int(s)) for t, s in d["chirotope"]],
            "inequalities": [BiquadraticRow.from_dict(r) for r in d["inequalities"]],
            "equalities": [BiquadraticRow.from_dict(r) for r in d["equalities"]],
            "multipliers": tuple(parse_rational(v) for v in d["multipliers"]),
            "eq_multipliers": tuple(parse_rational(v) for v in d["eq_multipliers"]),
        }
    else:
        raise ParseError(f"unknown certificate kind {kind!r}")
    return Certificate(kind, data, int(obj["n"]), obj.get("stage", ""))


@dataclass
class CertificateRecord:
    complex: FacetComplex
    key: CanonicalKey
    status: str
    stage: str | None
    certificate: object | None


def emit_certificate_record(rec: CertificateRecord) -> str:
    obj = {
        "n": rec.complex.n,
        "key": rec.key.hex(),
        "facets": [list(f) for f in _ordered_facets(rec.complex)],
        "status": rec.status,
        "stage": rec.stage,
        "certificate": certificate_to_dict(rec.certificate) if rec.certificate is not None else None,
    }
    return json.dumps(obj, separators=(",", ":"))


def parse_certificate_record(text: str, line: int | None = None) -> CertificateRecord:
    try:
        obj = json.loads(text)
        cx = _checked(obj["facets"], obj.get("n"), line)
        key = CanonicalKey.fromhex(obj["key"])
        cert = certificate_from_dict(obj["certificate"]) if obj.get("certificate") else None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError) and exc.line is not None:
            raise
        raise ParseError(f"malformed certificate record ({exc})", line)
    return CertificateRecord(cx, key, obj["status"], obj.get("stage"), cert)


def read_certificates(path) -> list[CertificateRecord]:
    return [parse_certificate_record(s, i) for i, s in _lines(Path(path))]


def write_certificates(path, records: Iterable[CertificateRecord]) -> int:
    count = 0
    with open(path, "w") as fh:
        for rec in records:
            fh.write(emit_certificate_record(rec) + "\n")
            count += 1
    return count
