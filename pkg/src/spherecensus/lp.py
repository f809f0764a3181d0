"""Exact rational linear programming with checkable witnesses.

Problems have free variables and are stated as

    maximize c.x  subject to  a_i.x >= b_i  (inequalities),  e_j.x = f_j.

They are solved through their dual in standard form,

    minimize -b.y - f.z  subject to  A^T y + E^T z = -c,  y >= 0,

which has one equality row per primal variable.  The tableau is kept in
integers with a common denominator (fraction-free pivoting) and entering and
leaving variables follow Bland's rule, so every run terminates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

Rational = Fraction


def _frac(x):
    """Exact coefficient: ``int`` when integral, otherwise ``Fraction``."""
    if isinstance(x, int):
        return x
    x = x if isinstance(x, Fraction) else Fraction(x)
    return x.numerator if x.denominator == 1 else x


@dataclass
class LinearSystem:
    nvars: int
    inequalities: list = field(default_factory=list)  # (a, b): a.x >= b
    equalities: list = field(default_factory=list)  # (e, f): e.x = f
    objective: tuple | None = None  # maximize c.x; None means feasibility

    def __post_init__(self):
        self.inequalities = [(tuple(map(_frac, a)), _frac(b)) for a, b in self.inequalities]
        self.equalities = [(tuple(map(_frac, a)), _frac(b)) for a, b in self.equalities]
        if self.objective is not None:
            self.objective = tuple(map(_frac, self.objective))
        for a, _ in self.inequalities + self.equalities:
            if len(a) != self.nvars:
                raise ValueError(f"row has {len(a)} coefficients, expected {self.nvars}")
        if self.objective is not None and len(self.objective) != self.nvars:
            raise ValueError("objective length does not match the variable count")

    def add_ge(self, a: Sequence, b) -> None:
        self.inequalities.append((tuple(map(_frac, a)), _frac(b)))

    def add_eq(self, a: Sequence, b) -> None:
        self.equalities.append((tuple(map(_frac, a)), _frac(b)))

    @property
    def c(self) -> tuple:
        return self.objective if self.objective is not None else (0,) * self.nvars


@dataclass
class LPOutcome:
    """``status`` is ``"feasible"``, ``"infeasible"`` or ``"unbounded"``.

    feasible: ``point``, ``optimum`` and duals ``y`` (>= 0), ``z`` with
      ``c + A^T y + E^T z = 0`` and ``c.x = -(b.y + f.z)``.
    infeasible: Farkas multipliers ``y`` (>= 0), ``z`` with ``A^T y + E^T z = 0``
      and ``b.y + f.z > 0``, i.e. the rows combine to ``0 >= positive``.
    unbounded: a feasible ``point`` and a ``ray`` with ``A ray >= 0``,
      ``E ray = 0`` and ``c.ray > 0``.
    """

    status: str
    point: tuple | None = None
    optimum: Fraction | None = None
    y: tuple | None = None
    z: tuple | None = None
    ray: tuple | None = None
    pivots: int = 0

    @property
    def farkas(self):
        return (self.y, self.z) if self.status == "infeasible" else None


class _Tableau:
    """Fraction-free simplex tableau for ``min g.w, M w = h, w >= 0``.

    Rows ``0`` and ``1`` are the phase-one and phase-two cost rows; the true
    entries are ``T[i][j] / D``.
    """

    def __init__(self, M: list[list[int]], g: list[int], h: list[int]):
        m = len(M)
        ncols = len(g)
        self.m = m
        self.ncols = ncols
        self.flip = [hi < 0 for hi in h]
        rows = []
        for i in range(m):
            s = -1 if self.flip[i] else 1
            row = [s * v for v in M[i]] + [0] * m + [s * h[i]]
            row[ncols + i] = 1
            rows.append(row)
        width = ncols + m + 1
        phase1 = [0] * width
        for row in rows:
            for j in range(ncols):
                phase1[j] -= row[j]
            phase1[-1] -= row[-1]
        phase2 = list(g) + [0] * m + [0]
        self.T = [phase1, phase2] + rows
        self.D = 1
        self.basis = [ncols + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r: int, s: int) -> None:
        T = self.T
        prow = T[r]
        p = prow[s]
        D = self.D
        for i in range(len(T)):
            if i == r:
                continue
            row = T[i]
            f = row[s]
            if f == 0:
                if p != D:
                    T[i] = [v * p // D for v in row]
            else:
                T[i] = [(v * p - f * w) // D for v, w in zip(row, prow)]
        self.D = p
        if p < 0:
            self.T = [[-v for v in row] for row in self.T]
            self.D = -p
        self.basis[r - 2] = s
        self.pivots += 1

    def run(self, cost_row: int, allowed: int) -> int | None:
        """Minimise with Bland's rule over columns ``< allowed``.

        Returns None at optimality, otherwise the unbounded entering column.
        """
        T = self.T
        while True:
            T = self.T
            crow = T[cost_row]
            s = next((j for j in range(allowed) if crow[j] < 0), None)
            if s is None:
                return None
            r = None
            for i in range(2, len(T)):
                a = T[i][s]
                if a <= 0:
                    continue
                if r is None:
                    r = i
                    continue
                # compare T[i][-1]/a with T[r][-1]/T[r][s]
                lhs = T[i][-1] * T[r][s]
                rhs = T[r][-1] * a
                if lhs < rhs or (lhs == rhs and self.basis[i - 2] < self.basis[r - 2]):
                    r = i
            if r is None:
                return s
            self.pivot(r, s)

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(self.T[i][j], self.D)


def _integer_rows(system: LinearSystem):
    """Columns of the dual matrix, scaled to integers, with their scales."""
    cols = []
    scales = []
    for a, b in system.inequalities:
        k = lcm(*(x.denominator for x in a), b.denominator)
        cols.append(([int(x * k) for x in a], int(b * k), [1]))
        scales.append(k)
    for a, b in system.equalities:
        k = lcm(*(x.denominator for x in a), b.denominator)
        cols.append(([int(x * k) for x in a], int(b * k), [1, -1]))
        scales.append(k)
    return cols, scales


def _solve_dual(system: LinearSystem, c: tuple):
    """Run both phases; returns (kind, data, pivots)."""
    n = system.nvars
    cols, scales = _integer_rows(system)
    ck = lcm(*(x.denominator for x in c)) if c else 1
    h = [int(-x * ck) for x in c]
    M = [[] for _ in range(n)]
    g = []
    owner = []  # (row index, sign) of each dual column
    for idx, (a, b, signs) in enumerate(cols):
        for s in signs:
            for i in range(n):
                M[i].append(s * a[i])
            g.append(-s * b)
            owner.append((idx, s))
    tab = _Tableau(M, g, h)
    ncols = len(g)
    if n == 0:
        return "optimal", (tab, owner, scales), 0
    tab.run(0, ncols)
    if tab.T[0][-1] != 0:
        return "dual-infeasible", (tab, owner, scales), tab.pivots
    # Drive basic artificials out where a real column can replace them.
    for r in range(2, len(tab.T)):
        if tab.basis[r - 2] >= ncols:
            s = next((j for j in range(ncols) if tab.T[r][j] != 0), None)
            if s is not None:
                tab.pivot(r, s)
    s = tab.run(1, ncols)
    if s is not None:
        return "dual-unbounded", (tab, owner, scales, s), tab.pivots
    return "optimal", (tab, owner, scales), tab.pivots


def _multipliers(tab: _Tableau, cost_row: int, base: int) -> list[Fraction]:
    """Simplex multipliers of the original dual rows from artificial reduced
    costs (artificial cost ``base``)."""
    out = []
    for i in range(tab.m):
        pi = base - tab.value(cost_row, tab.ncols + i)
        out.append(-pi if tab.flip[i] else pi)
    return out


def _collect(system, weights_by_col, owner, scales):
    ni = len(system.inequalities)
    y = [Fraction(0)] * ni
    z = [Fraction(0)] * len(system.equalities)
    for col, w in weights_by_col.items():
        idx, s = owner[col]
        val = w * scales[idx] * s
        if idx < ni:
            y[idx] += val
        else:
            z[idx - ni] += val
    return tuple(y), tuple(z)


def solve(system: LinearSystem) -> LPOutcome:
    """Solve exactly; the outcome always carries its witness."""
    c = system.c
    kind, data, pivots = _solve_dual(system, c)
    if kind == "optimal":
        tab, owner, scales = data
        pi = _multipliers(tab, 1, 0)
        x = tuple(-p for p in pi)
        weights = {}
        for r in range(2, len(tab.T)):
            j = tab.basis[r - 2]
            if j < tab.ncols:
                weights[j] = tab.value(r, -1)
        ck = lcm(*(v.denominator for v in c)) if c else 1
        weights = {j: w / ck for j, w in weights.items()}
        y, z = _collect(system, weights, owner, scales)
        opt = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
        return LPOutcome("feasible", point=x, optimum=opt, y=y, z=z, pivots=pivots)
    if kind == "dual-unbounded":
        tab, owner, scales, s = data
        weights = {s: Fraction(1)}
        for r in range(2, len(tab.T)):
            j = tab.basis[r - 2]
            a = tab.value(r, s)
            if j < tab.ncols and a:
                weights[j] = weights.get(j, 0) - a
        y, z = _collect(system, weights, owner, scales)
        return LPOutcome("infeasible", y=y, z=z, pivots=pivots)
    # Dual infeasible: the phase-one multipliers give a primal ray; decide
    # between unbounded and infeasible with a zero objective.
    tab = data[0]
    pi = _multipliers(tab, 0, 1)
    ray = tuple(-p for p in pi)
    zero = LinearSystem(system.nvars, system.inequalities, system.equalities, None)
    sub = solve(zero)
    if sub.status == "infeasible":
        sub.pivots += pivots
        return sub
    return LPOutcome("unbounded", point=sub.point, ray=ray, pivots=pivots + sub.pivots)


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x) if ai)


def _common(vec) -> tuple[list[int], int]:
    """Integer numerators over a common positive denominator."""
    den = lcm(*(Fraction(v).denominator for v in vec)) if vec else 1
    return [int(v * den) for v in vec], den


def check_witness(system: LinearSystem, outcome: LPOutcome) -> bool:
    """Independent re-check of the witness carried by ``outcome``."""
    A = system.inequalities
    E = system.equalities
    n = system.nvars
    c = system.c

    def feasible(x):
        if x is None or len(x) != n:
            return False
        X, den = _common(x)
        return all(_dot(a, X) >= b * den for a, b in A) and all(_dot(e, X) == f * den for e, f in E)

    def weights_ok(y, z):
        return y is not None and z is not None and len(y) == len(A) and len(z) == len(E) and all(w >= 0 for w in y)

    def combination(y, z):
        """(sum of weighted rows, weighted right-hand sides), scaled by den."""
        W, den = _common(list(y) + list(z))
        total = [0] * n
        rhs = 0
        for (a, b), w in zip(A + E, W):
            if not w:
                continue
            rhs += w * b
            for i, ai in enumerate(a):
                if ai:
                    total[i] += w * ai
        return total, rhs, den

    if outcome.status == "feasible":
        if not weights_ok(outcome.y, outcome.z) or not feasible(outcome.point):
            return False
        total, rhs, den = combination(outcome.y, outcome.z)
        if any(ci * den + t != 0 for ci, t in zip(c, total)):
            return False
        value = _dot(c, outcome.point)
        return value == Fraction(-rhs, den) == outcome.optimum
    if outcome.status == "infeasible":
        if not weights_ok(outcome.y, outcome.z):
            return False
        total, rhs, _ = combination(outcome.y, outcome.z)
        return all(t == 0 for t in total) and rhs > 0
    if outcome.status == "unbounded":
        d = outcome.ray
        if d is None or len(d) != n or not feasible(outcome.point):
            return False
        D, _ = _common(d)
        return all(_dot(a, D) >= 0 for a, _ in A) and all(_dot(e, D) == 0 for e, _ in E) and _dot(c, D) > 0
    return False
