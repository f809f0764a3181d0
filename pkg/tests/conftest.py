import functools
import json
from itertools import combinations
from pathlib import Path

import pytest

from spherecensus import chirotope, lp
from spherecensus.lattice import FacetComplex

DATA = Path(__file__).parent / "data"

# Every LP solved anywhere in the test run has its witness re-checked here.
LP_CALLS = {"solved": 0, "failed": 0}
_raw_solve = lp.solve


@functools.wraps(_raw_solve)
def _checked_solve(system):
    out = _raw_solve(system)
    LP_CALLS["solved"] += 1
    if not lp.check_witness(system, out):
        LP_CALLS["failed"] += 1
        raise AssertionError(f"LP witness failed: {out.status}")
    return out


@pytest.fixture(scope="session", autouse=True)
def _audit_lp():
    mp = pytest.MonkeyPatch()
    mp.setattr(lp, "solve", _checked_solve)
    mp.setattr(chirotope, "solve", _checked_solve)
    yield LP_CALLS
    mp.undo()


def parse_compact(s):
    return FacetComplex.from_facets([[int(c) for c in f] for f in s.strip().strip("[]").split(",")])


def gale_facets(n, d=4):
    """Facets of the cyclic d-polytope on n vertices (Gale's evenness condition)."""
    out = []
    for f in combinations(range(1, n + 1), d):
        s = set(f)
        gaps = [i for i in range(1, n + 1) if i not in s]
        if all(sum(1 for k in f if i < k < j) % 2 == 0 for i, j in combinations(gaps, 2)):
            out.append(f)
    return out


def load_table(name):
    with open(DATA / name) as fh:
        return json.load(fh)


@functools.lru_cache(maxsize=None)
def spheres(n):
    from spherecensus.spheres import enumerate_simplicial, enumerate_spheres

    res = enumerate_spheres(enumerate_simplicial(n))
    return [res.types[k] for k in sorted(res.types)]


@pytest.fixture(scope="session")
def spheres_upto7():
    return [cx for n in (5, 6, 7) for cx in spheres(n)]


@pytest.fixture(scope="session")
def spheres8():
    return spheres(8)


OCTAHEDRON = FacetComplex.from_facets(
    [[1, 3, 5], [1, 3, 6], [1, 4, 5], [1, 4, 6], [2, 3, 5], [2, 3, 6], [2, 4, 5], [2, 4, 6]], d=3
)
SIMPLEX4 = FacetComplex.from_facets([[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 4, 5], [1, 3, 4, 5], [2, 3, 4, 5]])
NINE_VERTEX = [
    ("[12345,12469,12578,12678,13468,1358,23459,25679,346789,35789]", (9, 25, 26, 10, 50)),
    ("[12346,12357,12678,1345,14568,15789,2349,23579,24679,34589,46789]", (9, 27, 29, 11, 53)),
    ("[12345,12469,12567,13468,13578,1678,23489,2359,25679,35789,46789]", (9, 27, 29, 11, 53)),
    ("[12345,12468,12567,13458,15789,16789,23479,2357,24679,34689,3579,3589]", (9, 27, 30, 12, 57)),
    ("[1234,12358,1246,12567,13468,15789,16789,23457,24679,34579,34689,3589]", (9, 27, 30, 12, 57)),
]


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        tr.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    tr.write_line(f"LP solver calls re-checked this run: {LP_CALLS['solved']} ({LP_CALLS['failed']} failed)")
