"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import functools
import logging
import sys
import time
from collections import Counter
from pathlib import Path

import click

from . import io as sio
from .canon import canonical_key

log = logging.getLogger("spherecensus")

EXIT_VERIFY = 1
EXIT_INPUT = 2

workers_option = click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=1,
    envvar="SPHERECENSUS_WORKERS",
    show_default=True,
    help="Worker processes (also read from SPHERECENSUS_WORKERS).",
)


def _input_errors(fn):
    """Turn malformed-input exceptions into exit code 2 with a diagnostic."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        from .report import MergeError
        from .spheres import SeedValidationError

        try:
            return fn(*args, **kwargs)
        except (sio.ParseError, MergeError, SeedValidationError, FileNotFoundError, ValueError) as exc:
            name = getattr(exc, "filename", None)
            msg = f"{name}: {exc.strerror}" if isinstance(exc, FileNotFoundError) and name else str(exc)
            click.echo(f"error: {msg}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _located(path, exc):
    """Prefix a parse error with its file name."""
    return sio.ParseError(f"{path}: {exc}")


def _read_spheres(path) -> list[sio.SphereRecord]:
    try:
        return list(sio.read_spheres(path))
    except sio.ParseError as exc:
        raise _located(path, exc)


def _read(reader, path):
    try:
        return reader(path)
    except sio.ParseError as exc:
        raise _located(path, exc)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Census of combinatorial 3-spheres and rational 4-polytopes."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command("enumerate-simplicial")
@click.option("--n", "n", type=int, required=True, help="Number of vertices (at most 8).")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True)
@_input_errors
def enumerate_simplicial_cmd(n, out):
    """Simplicial 3-spheres on N vertices (seed file)."""
    from .spheres import enumerate_simplicial

    seeds = enumerate_simplicial(n)
    count = sio.write_spheres(out, (sio.SphereRecord(cx) for cx in seeds))
    click.echo(f"{count} simplicial spheres on {n} vertices -> {out}")


@main.command("enumerate-spheres")
@click.option("--seeds", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True)
@workers_option
@_input_errors
def enumerate_spheres_cmd(seeds, out, workers):
    """All combinatorial types reachable from SEEDS by untriangulation."""
    from .spheres import enumerate_spheres, ingest_seeds

    t = time.time()
    try:
        cxs = ingest_seeds(seeds)
    except sio.ParseError as exc:
        raise _located(seeds, exc)
    res = enumerate_spheres(cxs, workers=workers)
    records = [sio.SphereRecord(res.types[k], key=k) for k in sorted(res.types)]
    count = sio.write_spheres(out, records)
    click.echo(
        f"{count} spheres from {len(cxs)} seeds ({len(res.non_types)} non-spheres, "
        f"{res.candidates} candidates, {res.prefiltered} prefiltered, {time.time() - t:.1f}s) -> {out}"
    )


def _classify_one(args):
    from .chirotope import classify

    cx, stage = args
    return classify(cx, stage)


@main.command()
@click.option("--spheres", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True)
@click.option("--stage", type=click.Choice(["gp", "propagate", "bfp", "all"]), default="all", show_default=True)
@workers_option
@_input_errors
def certify(spheres, out, stage, workers):
    """Search for non-realizability certificates."""
    recs = _read_spheres(spheres)
    jobs = [(r.complex, stage) for r in recs]
    if workers > 1:
        from multiprocessing import Pool

        with Pool(workers) as pool:
            results = pool.map(_classify_one, jobs, chunksize=8)
    else:
        results = [_classify_one(j) for j in jobs]
    out_recs = []
    stages = Counter()
    for rec, res in zip(recs, results):
        key = rec.key or canonical_key(rec.complex)
        stages[res.stage or "unresolved"] += 1
        out_recs.append(sio.CertificateRecord(rec.complex, key, res.status, res.stage, res.certificate))
    sio.write_certificates(out, out_recs)
    summary = ", ".join(f"{k}: {v}" for k, v in sorted(stages.items()))
    click.echo(f"{len(recs)} spheres ({summary}) -> {out}")


def _load_polytopes(path):
    from .geometry import convex_hull

    return [convex_hull(r.coords) for r in _read(sio.read_realizations, path)]


@main.command()
@click.option("--start", default="simplex", show_default=True,
              help="'simplex' or a realization file whose polytopes seed the first step.")
@click.option("--k", "k", type=int, required=True, help="Largest vertex count to generate.")
@click.option("--rule", type=click.Choice(["barycenter", "simple", "both"]), default="both", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True)
@workers_option
@_input_errors
def realize(start, k, rule, out, workers):
    """Generate rational 4-polytopes by inserting points into arrangement faces."""
    from .geometry import convex_hull, generate_polytopes, standard_simplex

    if start == "simplex":
        base = [convex_hull(standard_simplex(4))]
    else:
        base = _load_polytopes(start)
        if not base:
            raise ValueError(f"{start}: no realizations")
    rules = ["barycenter", "simple"] if rule == "both" else [rule]
    best: dict = {}
    for P in base:
        best[P.key] = (P, "")
    for r in rules:
        level = list(base)
        j0 = max(len(P.vertices) for P in base)
        for j in range(j0 + 1, k + 1):
            t = time.time()
            reg = generate_polytopes(level, j, r, workers)
            level = [reg[key] for key in sorted(reg)]
            log.info("%s: %d polytopes with %d vertices (%.1fs)", r, len(level), j, time.time() - t)
            for P in level:
                cur = best.get(P.key)
                if cur is None or P.score < cur[0].score:
                    best[P.key] = (P, r)
    records = []
    for key in sorted(best, key=lambda kk: (len(best[kk][0].vertices), kk)):
        P, r = best[key]
        records.append(sio.realization_from_polytope(P, r))
    sio.write_realizations(out, records)
    per_n = Counter(rec.n for rec in records)
    click.echo(", ".join(f"n={n}: {c}" for n, c in sorted(per_n.items())) + f" -> {out}")


@main.command("classify")
@click.option("--spheres", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--realizations", type=click.Path(exists=True, dir_okay=False), multiple=True)
@click.option("--certs", type=click.Path(exists=True, dir_okay=False), multiple=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True)
@_input_errors
def classify_cmd(spheres, realizations, certs, out):
    """Merge realizations and certificates into sphere statuses."""
    from .report import merge_classification

    recs = _read_spheres(spheres)
    reals = [r for p in realizations for r in _read(sio.read_realizations, p)]
    # realizations of other vertex counts (e.g. a k=8 run merged with n=7 spheres) are ignored
    ns = {r.n for r in recs}
    reals = [r for r in reals if r.n in ns]
    cs = [c for p in certs for c in _read(sio.read_certificates, p)]
    merged = merge_classification(recs, reals, cs)
    sio.write_spheres(out, merged)
    counts = Counter(r.status for r in merged)
    click.echo(", ".join(f"{k}: {v}" for k, v in sorted(counts.items())) + f" -> {out}")


@main.command()
@click.option("--realizations", type=click.Path(exists=True, dir_okay=False))
@click.option("--certs", type=click.Path(exists=True, dir_okay=False))
@_input_errors
def verify(realizations, certs):
    """Re-check realizations and certificates independently."""
    from .chirotope import verify_certificate
    from .geometry import verify_realization

    if not realizations and not certs:
        raise click.UsageError("give --realizations and/or --certs")
    failures = 0
    checked = 0
    if realizations:
        for i, r in enumerate(_read(sio.read_realizations, realizations), 1):
            checked += 1
            if canonical_key(r.complex) != r.key:
                ok, msg = False, "stored key does not match the facets"
            else:
                ok, msg = verify_realization(r.complex, r.coords)
            if not ok:
                failures += 1
                click.echo(f"FAIL realization {i} ({r.key.hex()}): {msg}", err=True)
    if certs:
        for i, c in enumerate(_read(sio.read_certificates, certs), 1):
            if c.certificate is None:
                continue
            checked += 1
            if canonical_key(c.complex) != c.key:
                ok, msg = False, "stored key does not match the facets"
            else:
                ok, msg = verify_certificate(c.certificate, c.complex)
            if not ok:
                failures += 1
                click.echo(f"FAIL certificate {i} ({c.key.hex()}): {msg}", err=True)
    click.echo(f"{checked} checked, {failures} failed")
    if failures:
        sys.exit(EXIT_VERIFY)


@main.command()
@click.option("--by", type=click.Choice(["facets", "fvector", "flagfvector"]), required=True)
@click.option("--report", "report_file", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Classified sphere file written by 'classify'.")
@click.option("--format", "fmt", type=click.Choice(["text", "tsv", "json"]), default="text", show_default=True)
@_input_errors
def report(by, report_file, fmt):
    """Census table grouped by facet count, f-vector or flag f-vector."""
    from .report import build_report

    table = build_report(_read_spheres(report_file), by)
    click.echo({"text": table.to_text, "tsv": table.to_tsv, "json": table.to_jsonl}[fmt]())


@main.group()
def analyze():
    """Graph and flag f-vector analyses."""


@analyze.command("multipartite")
@click.option("--realizations", type=click.Path(exists=True, dir_okay=False), required=True)
@_input_errors
def analyze_multipartite_cmd(realizations):
    """Polytopes whose graph is complete multipartite, by part sizes."""
    from .report import analyze_multipartite

    rows = analyze_multipartite(_read(sio.read_realizations, realizations))
    for parts, count in rows:
        mark = "  (part larger than 2)" if max(parts) > 2 else ""
        click.echo(f"K_{{{','.join(map(str, parts))}}}\t{count}{mark}")


@analyze.command("flag-gaps")
@click.option("--report", "report_file", type=click.Path(exists=True, dir_okay=False), required=True)
@_input_errors
def analyze_flag_gaps_cmd(report_file):
    """Flag f-vectors carried by spheres but by no realized polytope."""
    from .report import flag_gaps

    rows = flag_gaps(_read_spheres(report_file))
    for r in rows:
        click.echo(f"{r.label}\tspheres={r.spheres}\tpolytopes={r.polytopes}\tnon-realizable={r.nonrealizable}")
    if not rows:
        click.echo("no gaps")


if __name__ == "__main__":  # pragma: no cover
    main()
