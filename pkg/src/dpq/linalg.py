"""Exact sparse linear solves over the rationals."""

from dataclasses import dataclass
from fractions import Fraction


@dataclass
class SolveResult:
    solution: list | None   # one Fraction per unknown, or None if inconsistent
    rank: int
    n_unknowns: int
    n_equations: int


def solve_columns(columns: list[dict], rhs: dict) -> SolveResult:
    """Solve Σ_j x_j·columns[j] = rhs for sparse column vectors keyed by row labels.

    Gauss-Jordan elimination with pivots taken in column order; free unknowns
    are set to zero, so the returned solution is canonical for the column order.
    """
    row_keys = set(rhs)
    for col in columns:
        row_keys.update(col)
    order = sorted(row_keys)
    rindex = {k: i for i, k in enumerate(order)}

    rows: list[dict[int, Fraction]] = [dict() for _ in order]
    b = [Fraction(0)] * len(order)
    for j, col in enumerate(columns):
        for k, v in col.items():
            if v:
                rows[rindex[k]][j] = Fraction(v)
    for k, v in rhs.items():
        b[rindex[k]] = Fraction(v)

    # column -> set of rows with a nonzero entry, kept in sync during elimination
    where: dict[int, set] = {}
    for i, r in enumerate(rows):
        for j in r:
            where.setdefault(j, set()).add(i)

    used = set()
    pivots = {}
    for j in range(len(columns)):
        cands = sorted(i for i in where.get(j, ()) if i not in used)
        if not cands:
            continue
        p = min(cands, key=lambda i: (len(rows[i]), i))
        used.add(p)
        pivots[j] = p
        inv = 1 / rows[p][j]
        prow = {c: v * inv for c, v in rows[p].items()}
        rows[p] = prow
        b[p] *= inv
        for i in list(where[j]):
            if i == p:
                continue
            f = rows[i][j]
            ri = rows[i]
            for c, v in prow.items():
                nv = ri.get(c, 0) - f * v
                if nv:
                    if c not in ri:
                        where.setdefault(c, set()).add(i)
                    ri[c] = nv
                else:
                    if c in ri:
                        del ri[c]
                        where[c].discard(i)
            b[i] -= f * b[p]

    rank = len(pivots)
    for i, r in enumerate(rows):
        if not r and b[i]:
            return SolveResult(None, rank, len(columns), len(order))
    x = [Fraction(0)] * len(columns)
    for j, p in pivots.items():
        x[j] = b[p]
    return SolveResult(x, rank, len(columns), len(order))
