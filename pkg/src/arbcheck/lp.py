"""Exact linear programming over the rationals.

Problems are maximizations subject to rows ``A x <= b`` (equality rows
flagged) and per-variable bounds: each variable is either free or
bounded below. The solver is a two-phase primal simplex with Bland's
anti-cycling rule and exact pivots, so it terminates on every input and
its certificates are bit-exact.

Every outcome is re-verified before it leaves ``solve_lp``:

* an Optimal point is substituted into every row and bound;
* an Unbounded ray is checked to be a feasible direction with strictly
  positive objective growth;
* an Infeasible certificate is a Farkas vector over the *extended* row
  system of ``farkas_row_system`` -- the declared rows followed by one
  materialized row ``-x_j <= -lower_j`` per bounded variable. Over that
  system the certificate y satisfies y >= 0 on inequality rows,
  y^T A = 0 componentwise and y^T b < 0, which is a self-contained
  proof of infeasibility.

A failed re-verification raises InternalError; it signals a solver bug,
never bad input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import InputError, InternalError
from .rationals import ONE, ZERO, Q, Rational, RationalLike, Vector, as_rational, dot


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective . x  s.t.  rows[i] . x (<= or ==) rhs[i],
    x_j >= lower[j] where lower[j] is not None."""

    objective: Vector
    rows: tuple[Vector, ...]
    rhs: Vector
    equalities: tuple[bool, ...]
    lower: tuple[Optional[Rational], ...]

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_rows(self) -> int:
        return len(self.rows)


def make_lp(
    objective: Sequence[RationalLike],
    rows: Sequence[Sequence[RationalLike]],
    rhs: Sequence[RationalLike],
    equalities: Optional[Sequence[bool]] = None,
    lower: Optional[Sequence[Optional[RationalLike]]] = None,
) -> LinearProgram:
    """Coerce raw data into a dimension-checked LinearProgram."""
    obj = tuple(as_rational(c) for c in objective)
    n = len(obj)
    mat = tuple(tuple(as_rational(a) for a in row) for row in rows)
    for i, row in enumerate(mat):
        if len(row) != n:
            raise InputError(f"row {i} has {len(row)} coefficients, expected {n}")
    b = tuple(as_rational(v) for v in rhs)
    if len(b) != len(mat):
        raise InputError(f"{len(b)} right-hand sides for {len(mat)} rows")
    if equalities is None:
        eq = (False,) * len(mat)
    else:
        eq = tuple(bool(e) for e in equalities)
        if len(eq) != len(mat):
            raise InputError(f"{len(eq)} equality flags for {len(mat)} rows")
    if lower is None:
        lo: tuple[Optional[Rational], ...] = (None,) * n
    else:
        if len(lower) != n:
            raise InputError(f"{len(lower)} bounds for {n} variables")
        lo = tuple(None if v is None else as_rational(v) for v in lower)
    return LinearProgram(obj, mat, b, eq, lo)


@dataclass(frozen=True)
class Optimal:
    point: Vector
    value: Rational


@dataclass(frozen=True)
class Infeasible:
    certificate: Vector  # multipliers over farkas_row_system(lp)


@dataclass(frozen=True)
class Unbounded:
    ray: Vector


LpOutcome = Union[Optimal, Infeasible, Unbounded]


def farkas_row_system(lp: LinearProgram):
    """The row system Farkas certificates refer to: the declared rows,
    then one row -x_j <= -lower_j per bounded variable in increasing j.

    Returns (rows, rhs, equalities).
    """
    rows = list(lp.rows)
    rhs = list(lp.rhs)
    eqs = list(lp.equalities)
    n = lp.n_vars
    for j, lo in enumerate(lp.lower):
        if lo is None:
            continue
        row = [ZERO] * n
        row[j] = Q(-1)
        rows.append(tuple(row))
        rhs.append(-lo)
        eqs.append(False)
    return tuple(rows), tuple(rhs), tuple(eqs)


def check_feasible(lp: LinearProgram, point: Sequence[Rational]) -> bool:
    if len(point) != lp.n_vars:
        return False
    for j, lo in enumerate(lp.lower):
        if lo is not None and point[j] < lo:
            return False
    for row, b, eq in zip(lp.rows, lp.rhs, lp.equalities):
        lhs = dot(row, point)
        if eq:
            if lhs != b:
                return False
        elif lhs > b:
            return False
    return True


def check_ray(lp: LinearProgram, ray: Sequence[Rational]) -> bool:
    """Feasible recession direction with strictly positive objective growth."""
    if len(ray) != lp.n_vars:
        return False
    if all(not c for c in ray):
        return False
    for j, lo in enumerate(lp.lower):
        if lo is not None and ray[j] < 0:
            return False
    for row, eq in zip(lp.rows, lp.equalities):
        lhs = dot(row, ray)
        if eq:
            if lhs != 0:
                return False
        elif lhs > 0:
            return False
    return dot(lp.objective, ray) > 0


def check_farkas(lp: LinearProgram, certificate: Sequence[Rational]) -> bool:
    rows, rhs, eqs = farkas_row_system(lp)
    if len(certificate) != len(rows):
        return False
    for y, eq in zip(certificate, eqs):
        if not eq and y < 0:
            return False
    n = lp.n_vars
    for j in range(n):
        if sum((y * row[j] for y, row in zip(certificate, rows)), ZERO) != 0:
            return False
    return dot(certificate, rhs) < 0


class _Simplex:
    """Dense exact tableau. Columns: structural (one per free-variable
    half or shifted bounded variable), then one slack per inequality
    row, then artificials. The right-hand side is stored separately."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        n, m = lp.n_vars, lp.n_rows

        # x_j = y[plus_col] - y[minus_col] + shift   (minus_col None when bounded)
        self.plus_col: list[int] = []
        self.minus_col: list[Optional[int]] = []
        self.shift: list[Rational] = []
        ncols = 0
        for j in range(n):
            lo = lp.lower[j]
            self.plus_col.append(ncols)
            ncols += 1
            if lo is None:
                self.minus_col.append(ncols)
                ncols += 1
                self.shift.append(ZERO)
            else:
                self.minus_col.append(None)
                self.shift.append(lo)
        self.n_struct = ncols

        body: list[list[Rational]] = []
        rhs: list[Rational] = []
        for k in range(m):
            row = [ZERO] * self.n_struct
            for j, a in enumerate(lp.rows[k]):
                if a:
                    row[self.plus_col[j]] = a
                    mc = self.minus_col[j]
                    if mc is not None:
                        row[mc] = -a
            body.append(row)
            rhs.append(lp.rhs[k] - dot(lp.rows[k], self.shift))

        self.slack_col: list[Optional[int]] = [None] * m
        for k in range(m):
            if not lp.equalities[k]:
                self.slack_col[k] = ncols
                ncols += 1

        # flip rows with negative transformed rhs so phase 1 starts basic-feasible
        self.sigma: list[int] = []
        for k in range(m):
            self.sigma.append(-1 if rhs[k] < 0 else 1)

        self.art_col: list[Optional[int]] = [None] * m
        for k in range(m):
            if self.slack_col[k] is None or self.sigma[k] < 0:
                self.art_col[k] = ncols
                ncols += 1
        self.n_cols = ncols
        self.n_art = sum(1 for c in self.art_col if c is not None)

        self.T: list[list[Rational]] = []
        self.rhs: list[Rational] = []
        self.basis: list[int] = []
        self.active: list[bool] = [True] * m
        for k in range(m):
            full = [ZERO] * ncols
            s = self.sigma[k]
            for j, a in enumerate(body[k]):
                if a:
                    full[j] = a if s > 0 else -a
            sc = self.slack_col[k]
            if sc is not None:
                full[sc] = ONE if s > 0 else Q(-1)
            ac = self.art_col[k]
            if ac is not None:
                full[ac] = ONE
            self.T.append(full)
            self.rhs.append(rhs[k] if s > 0 else -rhs[k])
            self.basis.append(ac if ac is not None else sc)  # type: ignore[arg-type]
        self.init_basis = list(self.basis)
        self.art_start = ncols - self.n_art if self.n_art else ncols
        # generous cap; Bland's rule guarantees no cycling long before this
        self.max_pivots = 2000 + 50 * (m + 1) * (ncols + 1)
        self.pivots = 0

    # --- pivoting -------------------------------------------------------

    def _pivot(self, i: int, enter: int, reduced: list[Rational]) -> None:
        T, rhs = self.T, self.rhs
        prow = T[i]
        piv = prow[enter]
        if piv != 1:
            inv = 1 / piv
            for j, v in enumerate(prow):
                if v:
                    prow[j] = v * inv
            rhs[i] *= inv
        nz = [j for j, v in enumerate(prow) if v]
        for r in range(len(T)):
            if r == i or not self.active[r]:
                continue
            row = T[r]
            f = row[enter]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
                if rhs[i]:
                    rhs[r] -= f * rhs[i]
        f = reduced[enter]
        if f:
            for j in nz:
                reduced[j] -= f * prow[j]
        self.basis[i] = enter
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise InternalError("pivot budget exhausted; anti-cycling rule violated")

    def _optimize(self, reduced: list[Rational], allowed: list[bool]):
        """Bland's rule: entering = smallest allowed column with positive
        reduced cost; leaving = smallest ratio, ties by smallest basis
        column. Returns ('optimal', None) or ('unbounded', enter)."""
        T, rhs = self.T, self.rhs
        m = len(T)
        while True:
            enter = -1
            for j in range(self.n_cols):
                if allowed[j] and reduced[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal", None
            leave = -1
            best: Optional[Rational] = None
            for i in range(m):
                if not self.active[i]:
                    continue
                a = T[i][enter]
                if a > 0:
                    ratio = rhs[i] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded", enter
            self._pivot(leave, enter, reduced)

    # --- phases ---------------------------------------------------------

    def run(self) -> LpOutcome:
        lp = self.lp
        m = lp.n_rows

        if self.n_art:
            # price out the artificial basis rows: reduced = c1 - c1_B B^-1 A
            reduced = [ZERO] * self.n_cols
            for c in self.art_col:
                if c is not None:
                    reduced[c] = Q(-1)
            for i in range(m):
                if self.art_col[i] is not None:
                    row = self.T[i]
                    for j in range(self.n_cols):
                        if row[j]:
                            reduced[j] += row[j]
            allowed = [True] * self.n_cols
            status, _ = self._optimize(reduced, allowed)
            if status != "optimal":
                raise InternalError("phase 1 cannot be unbounded")
            value1 = ZERO
            for i in range(m):
                if self.active[i] and self.basis[i] >= self.art_start:
                    value1 -= self.rhs[i]
            if value1 != 0:
                return self._extract_infeasible(reduced)
            self._expel_artificials()

        reduced = [ZERO] * self.n_cols
        cost = [ZERO] * self.n_cols
        for j, c in enumerate(lp.objective):
            if c:
                cost[self.plus_col[j]] = c
                mc = self.minus_col[j]
                if mc is not None:
                    cost[mc] = -c
        for j in range(self.n_struct):
            reduced[j] = cost[j]
        for i in range(m):
            if not self.active[i]:
                continue
            cb = cost[self.basis[i]] if self.basis[i] < self.n_struct else ZERO
            if cb:
                row = self.T[i]
                for j in range(self.n_cols):
                    if row[j]:
                        reduced[j] -= cb * row[j]
        allowed = [True] * self.art_start + [False] * self.n_art
        status, enter = self._optimize(reduced, allowed)
        if status == "unbounded":
            return self._extract_ray(enter)  # type: ignore[arg-type]
        return self._extract_optimal()

    def _expel_artificials(self) -> None:
        """After a zero-value phase 1, pivot artificials out of the basis;
        rows where no structural or slack coefficient remains are
        redundant and dropped."""
        for i in range(len(self.T)):
            if not self.active[i] or self.basis[i] < self.art_start:
                continue
            row = self.T[i]
            enter = next((j for j in range(self.art_start) if row[j]), None)
            if enter is None:
                self.active[i] = False
                continue
            # rhs here is exactly 0, so any nonzero pivot keeps feasibility
            dummy = [ZERO] * self.n_cols
            self._pivot(i, enter, dummy)

    # --- outcome extraction ----------------------------------------------

    def _extract_optimal(self) -> Optimal:
        y = [ZERO] * self.n_cols
        for i, bi in enumerate(self.basis):
            if self.active[i]:
                y[bi] = self.rhs[i]
        point = []
        for j in range(self.lp.n_vars):
            v = y[self.plus_col[j]]
            mc = self.minus_col[j]
            if mc is not None:
                v = v - y[mc]
            point.append(v + self.shift[j])
        x = tuple(point)
        if not check_feasible(self.lp, x):
            raise InternalError("optimal point failed exact feasibility re-check")
        return Optimal(x, dot(self.lp.objective, x))

    def _extract_ray(self, enter: int) -> Unbounded:
        y = [ZERO] * self.n_cols
        y[enter] = ONE
        for i, bi in enumerate(self.basis):
            if self.active[i]:
                y[bi] = -self.T[i][enter]
        ray = []
        for j in range(self.lp.n_vars):
            v = y[self.plus_col[j]]
            mc = self.minus_col[j]
            if mc is not None:
                v = v - y[mc]
            ray.append(v)
        r = tuple(ray)
        if not check_ray(self.lp, r):
            raise InternalError("unbounded ray failed exact re-check")
        return Unbounded(r)

    def _extract_infeasible(self, reduced: list[Rational]) -> Infeasible:
        """Multipliers from the phase-1 duals. For tableau row i with
        initial basis column c (slack or artificial), pi_i equals the
        phase-1 cost of c minus its final reduced cost; undoing the row
        flips gives multipliers u for the declared rows, and
        z_j = u^T A_j >= 0 closes each bound row."""
        lp = self.lp
        cert: list[Rational] = []
        u: list[Rational] = []
        for k in range(lp.n_rows):
            c = self.init_basis[k]
            c1 = Q(-1) if c >= self.art_start else ZERO
            pi = c1 - reduced[c]
            u.append(pi if self.sigma[k] > 0 else -pi)
        cert.extend(u)
        for j in range(lp.n_vars):
            if lp.lower[j] is None:
                continue
            zj = sum((u[k] * lp.rows[k][j] for k in range(lp.n_rows)), ZERO)
            cert.append(zj)
        certificate = tuple(cert)
        if not check_farkas(lp, certificate):
            raise InternalError("Farkas certificate failed exact re-check")
        return Infeasible(certificate)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve exactly; outcome is deterministic for a fixed input."""
    if len(lp.rhs) != lp.n_rows or len(lp.equalities) != lp.n_rows:
        raise InputError("row metadata lengths disagree")
    if len(lp.lower) != lp.n_vars:
        raise InputError("bound vector length disagrees with objective")
    for i, row in enumerate(lp.rows):
        if len(row) != lp.n_vars:
            raise InputError(f"row {i} has wrong arity")
    return _Simplex(lp).run()
