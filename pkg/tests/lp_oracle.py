"""Brute-force reference solver for small exact LPs.

Candidate vertices are solutions of square subsystems drawn from the
extended row system (declared rows plus lower-bound rows); candidate
extreme rays come from nullspaces of (n-1)-row subsystems.  This is
sound only when every variable has a finite lower bound: the feasible
region then contains no line, so if no enumerated ray improves the
objective the maximum is attained at an enumerated vertex.
"""

from itertools import combinations

from arbcheck import Q
from arbcheck.lp import (
    Infeasible,
    Optimal,
    Unbounded,
    check_farkas,
    check_feasible,
    check_ray,
    farkas_row_system,
    make_lp,
    solve_lp,
)
from arbcheck.rationals import dot

ZERO = Q(0)


def _solve_square(rows, rhs):
    """Unique solution of a square rational system, or None if singular."""
    n = len(rows)
    aug = [list(rows[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != ZERO), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Q(1) / aug[col][col]
        aug[col] = [c * inv for c in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != ZERO:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def _nullspace_ray(rows, n):
    """Generator of the nullspace when it is one-dimensional, else None."""
    mat = [list(r) for r in rows]
    pivots = []
    filled = 0
    for col in range(n):
        piv = next((i for i in range(filled, len(mat)) if mat[i][col] != ZERO), None)
        if piv is None:
            continue
        mat[filled], mat[piv] = mat[piv], mat[filled]
        inv = Q(1) / mat[filled][col]
        mat[filled] = [c * inv for c in mat[filled]]
        for i in range(len(mat)):
            if i != filled and mat[i][col] != ZERO:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[filled])]
        pivots.append(col)
        filled += 1
    if filled != n - 1:
        return None
    free = next(c for c in range(n) if c not in pivots)
    vec = [ZERO] * n
    vec[free] = Q(1)
    for i, col in enumerate(pivots):
        vec[col] = -mat[i][free]
    return vec


def _satisfies(rows, rhs, eqs, x):
    for row, b, eq in zip(rows, rhs, eqs):
        v = dot(row, x)
        if eq:
            if v != b:
                return False
        elif v > b:
            return False
    return True


def _recedes(rows, eqs, ray):
    if all(c == ZERO for c in ray):
        return False
    for row, eq in zip(rows, eqs):
        v = dot(row, ray)
        if eq:
            if v != ZERO:
                return False
        elif v > ZERO:
            return False
    return True


def enumerate_lp(lp):
    """Return ("infeasible", None), ("unbounded", None) or ("optimal", value)."""
    assert all(lo is not None for lo in lp.lower), "oracle needs pointed LPs"
    rows, rhs, eqs = farkas_row_system(lp)
    n = lp.n_vars
    m = len(rows)

    best = None
    for idx in combinations(range(m), n):
        x = _solve_square([rows[i] for i in idx], [rhs[i] for i in idx])
        if x is None or not _satisfies(rows, rhs, eqs, x):
            continue
        v = dot(lp.objective, x)
        if best is None or v > best:
            best = v
    if best is None:
        return ("infeasible", None)

    for idx in combinations(range(m), n - 1):
        ray = _nullspace_ray([rows[i] for i in idx], n)
        if ray is None:
            continue
        for cand in (ray, [-c for c in ray]):
            if _recedes(rows, eqs, cand) and dot(lp.objective, cand) > ZERO:
                return ("unbounded", None)
    return ("optimal", best)


def random_lp(rng):
    """Small random LP with every variable bounded below."""
    n = rng.randint(1, 4)
    m = rng.randint(1, 6)
    coef = lambda: Q(rng.randint(-3, 3))
    rows = [[coef() for _ in range(n)] for _ in range(m)]
    rhs = [Q(rng.randint(-4, 4)) for _ in range(m)]
    eqs = [rng.random() < 0.25 for _ in range(m)]
    obj = [coef() for _ in range(n)]
    lower = [Q(rng.randint(-3, 0)) for _ in range(n)]
    return make_lp(obj, rows, rhs, eqs, lower)


def oracle_check(lp):
    """Solve lp both ways; return (agrees, solver_outcome, oracle_status)."""
    got = solve_lp(lp)
    status, value = enumerate_lp(lp)
    if isinstance(got, Optimal):
        ok = (status == "optimal"
              and got.value == value
              and dot(lp.objective, got.point) == got.value
              and check_feasible(lp, got.point))
    elif isinstance(got, Unbounded):
        ok = status == "unbounded" and check_ray(lp, got.ray)
    elif isinstance(got, Infeasible):
        ok = status == "infeasible" and check_farkas(lp, got.certificate)
    else:
        ok = False
    return ok, got, (status, value)
