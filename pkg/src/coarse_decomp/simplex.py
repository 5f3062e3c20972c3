"""Small dense two-phase simplex with Bland's rule.

Used as an independent reference for the LP layer, and for exact rational
solves (pass ``exact=True`` to work in fractions).  Problems have the form

    minimize c.x  subject to  A x <= b,  x >= 0.

Duals follow the scipy/HiGHS sign convention: ``duals[i] <= 0`` and
``b.duals`` equals the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class DenseResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list
    objective: object
    duals: list


def solve_dense(c: Sequence, A: Sequence[Sequence], b: Sequence, exact: bool = False,
                max_iter: int = 100_000) -> DenseResult:
    conv = Fraction if exact else float
    eps = 0 if exact else 1e-11
    m, n = len(A), len(c)
    flipped = [conv(b[i]) < 0 for i in range(m)]
    n_art = sum(flipped)
    width = n + m + n_art
    T: list[list] = []
    rhs: list = []
    basis: list[int] = []
    art = 0
    for i in range(m):
        row = [conv(a) for a in A[i]] + [conv(0)] * (m + n_art)
        row[n + i] = conv(1)
        r = conv(b[i])
        if flipped[i]:
            row = [-v for v in row]
            r = -r
            row[n + m + art] = conv(1)
            basis.append(n + m + art)
            art += 1
        else:
            basis.append(n + i)
        T.append(row)
        rhs.append(r)
    artificial = set(range(n + m, width))

    def pivot(pr, pc):
        piv = T[pr][pc]
        T[pr] = [v / piv for v in T[pr]]
        rhs[pr] = rhs[pr] / piv
        for i in range(m):
            if i != pr and T[i][pc] != 0:
                f = T[i][pc]
                Ti, Tp = T[i], T[pr]
                T[i] = [Ti[j] - f * Tp[j] for j in range(width)]
                rhs[i] = rhs[i] - f * rhs[pr]
        basis[pr] = pc

    def reduced(cost):
        rc = list(cost)
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0:
                Ti = T[i]
                for j in range(width):
                    rc[j] -= cb * Ti[j]
        return rc

    def run(cost, barred):
        for _ in range(max_iter):
            rc = reduced(cost)
            enter = next((j for j in range(width) if j not in barred and rc[j] < -eps), None)
            if enter is None:
                return "optimal", rc
            best = None
            for i in range(m):
                if T[i][enter] > eps:
                    ratio = rhs[i] / T[i][enter]
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded", rc
            pivot(best[1], enter)
        raise RuntimeError("simplex iteration limit")

    if n_art:
        cost1 = [conv(0)] * (n + m) + [conv(1)] * n_art
        run(cost1, set())
        phase1 = sum(rhs[i] for i in range(m) if basis[i] in artificial)
        if phase1 > (eps * 1000 if not exact else 0):
            return DenseResult("infeasible", [], None, [])
        for i in range(m):
            if basis[i] in artificial:
                col = next((j for j in range(n + m) if abs(T[i][j]) > eps), None)
                if col is not None:
                    pivot(i, col)
    cost2 = [conv(v) for v in c] + [conv(0)] * (m + n_art)
    status, rc = run(cost2, artificial)
    if status != "optimal":
        return DenseResult(status, [], None, [])
    x = [conv(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rhs[i]
    obj = sum(conv(c[j]) * x[j] for j in range(n))
    duals = [-rc[n + i] for i in range(m)]
    return DenseResult("optimal", x, obj, duals)
