"""Exact feasibility of nonnegative combinations of symmetric maps.

Decides whether target = sum_k w_k S_k admits a solution with all w_k >= 0,
over the rationals.  On success the weights are returned; on failure a strict
separating certificate is produced: a symmetric Y with <Y, S_k> < 0 for every
k and <Y, target> > 0, where <A, B> = trace(A B).  Both branches are verified
exactly before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .linalg import MatQ, Rat, is_symmetric, mat_scale, trace_product


class StrongAlternativeError(RuntimeError):
    """Neither weights nor a strict certificate exist for this instance.

    Possible for contrived inputs (a weak separation may be the best there
    is); cannot occur when all maps have equal positive trace.
    """


@dataclass(frozen=True)
class Feasible:
    coefficients: tuple[Rat, ...]


@dataclass(frozen=True)
class Infeasible:
    certificate: MatQ


def _phase1(rows: Sequence[Sequence[Rat]], rhs: Sequence[Rat]) -> Optional[list[Rat]]:
    """Find x >= 0 with A x = b, or None.  Bland's rule, exact pivots."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    tab: list[list[Rat]] = []
    for i in range(m):
        row = [Fraction(x) for x in rows[i]]
        r = Fraction(rhs[i])
        if r < 0:
            row = [-x for x in row]
            r = -r
        art = [Fraction(1 if j == i else 0) for j in range(m)]
        tab.append(row + art + [r])
    total = n + m
    basis = list(range(n, total))
    in_basis = [False] * total
    for j in basis:
        in_basis[j] = True
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    while True:
        y = [cost[basis[i]] for i in range(m)]
        enter = -1
        for j in range(total):
            if in_basis[j]:
                continue
            rj = cost[j] - sum(y[i] * tab[i][j] for i in range(m) if tab[i][j])
            if rj < 0:
                enter = j
                break
        if enter < 0:
            objective = sum(y[i] * tab[i][total] for i in range(m))
            if objective != 0:
                return None
            x = [Fraction(0)] * n
            for i in range(m):
                if basis[i] < n:
                    x[basis[i]] = tab[i][total]
            return x
        leave = -1
        best: Optional[Rat] = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][total] / tab[i][enter]
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        # phase-1 objective is bounded below by zero, so a pivot always exists
        assert leave >= 0, "unbounded phase-1 objective"
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * z for x, z in zip(tab[i], tab[leave])]
        in_basis[basis[leave]] = False
        in_basis[enter] = True
        basis[leave] = enter


def _upper_indices(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def _normalized(y: MatQ) -> MatQ:
    top = max(abs(x) for row in y for x in row)
    assert top > 0
    return mat_scale(1 / top, y)


def lp_feasible_nonneg(
    maps: Sequence[MatQ], target: MatQ
) -> Union[Feasible, Infeasible]:
    """Exact strong-alternative feasibility test.

    Exactly one branch is returned: Feasible(w) with target = sum w_k maps_k,
    w >= 0, or Infeasible(Y) with a strictly separating symmetric Y.  Raises
    StrongAlternativeError when a strict Y does not exist either.
    """
    n = len(target)
    assert is_symmetric(target), "target must be symmetric"
    for s in maps:
        assert is_symmetric(s), "maps must be symmetric"
        assert len(s) == n
    coords = _upper_indices(n)
    rows = [[s[i][j] for s in maps] for (i, j) in coords]
    rhs = [target[i][j] for (i, j) in coords]
    x = _phase1(rows, rhs)
    if x is not None:
        w = tuple(x)
        for (i, j) in coords:
            assert sum(w[k] * maps[k][i][j] for k in range(len(maps))) == target[i][j]
        assert all(c >= 0 for c in w)
        return Feasible(coefficients=w)

    # Strict separation: <Y, S_k> <= -1 for all k and <Y, target> >= 1, with
    # Y = Y+ - Y- entrywise on the upper triangle, slack s_k, surplus v.
    npairs = len(coords)
    weight = {ij: (Fraction(1) if ij[0] == ij[1] else Fraction(2)) for ij in coords}
    nvars = 2 * npairs + len(maps) + 1
    sep_rows: list[list[Rat]] = []
    sep_rhs: list[Rat] = []
    for k, s in enumerate(maps):
        row = [Fraction(0)] * nvars
        for c, (i, j) in enumerate(coords):
            row[c] = weight[(i, j)] * s[i][j]
            row[npairs + c] = -row[c]
        row[2 * npairs + k] = Fraction(1)
        sep_rows.append(row)
        sep_rhs.append(Fraction(-1))
    row = [Fraction(0)] * nvars
    for c, (i, j) in enumerate(coords):
        row[c] = weight[(i, j)] * target[i][j]
        row[npairs + c] = -row[c]
    row[nvars - 1] = Fraction(-1)
    sep_rows.append(row)
    sep_rhs.append(Fraction(1))
    sol = _phase1(sep_rows, sep_rhs)
    if sol is None:
        raise StrongAlternativeError("no weights and no strict certificate")
    entries = [[Fraction(0)] * n for _ in range(n)]
    for c, (i, j) in enumerate(coords):
        v = sol[c] - sol[npairs + c]
        entries[i][j] = v
        entries[j][i] = v
    y = _normalized(tuple(tuple(r) for r in entries))
    for s in maps:
        assert trace_product(y, s) < 0
    assert trace_product(y, target) > 0
    return Infeasible(certificate=y)
