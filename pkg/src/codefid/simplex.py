"""Exact rational simplex for bounded-variable linear programs.

Solves     maximize c^T x
           subject to A x = b,   l <= x <= u   (entrywise)

with arbitrary-precision rational arithmetic throughout (gmpy2.mpq when
available, fractions.Fraction otherwise).  Two phases with signed artificial
variables, Bland's pivoting rule, so termination is guaranteed under
degeneracy.  The artificial columns double as an explicit basis inverse,
from which exact dual multipliers are read off.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpq = Fraction

_ZERO = _mpq(0)
_ONE = _mpq(1)

MAX_PIVOTS = 200_000


class SimplexError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # 'optimal' | 'infeasible' | 'unbounded'
    x: list[Fraction] | None = None
    objective: Fraction | None = None
    duals: list[Fraction] | None = None
    reduced_costs: list[Fraction] | None = None
    basis: list[int] | None = None
    farkas: list[Fraction] | None = None
    pivots: int = 0


def _to_mpq(v):
    if isinstance(v, Fraction):
        return _mpq(v.numerator, v.denominator)
    return _mpq(v)


def _to_fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class _Tableau:
    """Dense tableau with n structural + m artificial columns."""

    def __init__(self, a_rows, b, lower, upper):
        self.m = len(a_rows)
        self.n = len(lower)
        self.lower = lower
        self.upper = upper
        self.at_upper = [False] * self.n  # nonbasic rest position
        self.pivots = 0
        for j in range(self.n):
            if lower[j] is None and upper[j] is None:
                raise SimplexError(f"variable {j} has no finite bound")
            if lower[j] is not None and upper[j] is not None and lower[j] > upper[j]:
                raise SimplexError(f"variable {j} has empty bound interval")
            if lower[j] is None:
                self.at_upper[j] = True
        # nonbasic value of a variable at its rest position
        self.t = [row[:] for row in a_rows]
        self.rhs = b[:]
        self.basis = []
        self.beta = []
        self.art_sign = []
        for i in range(self.m):
            resid = b[i]
            for j in range(self.n):
                v = self._nonbasic_value(j)
                if v != 0 and a_rows[i][j] != 0:
                    resid -= a_rows[i][j] * v
            sign = _ONE if resid >= 0 else -_ONE
            self.art_sign.append(sign)
            col = [_ZERO] * self.m
            col[i] = sign
            for r in range(self.m):
                self.t[r].append(col[r])
            self.basis.append(self.n + i)
            self.beta.append(resid if sign > 0 else -resid)

    def _nonbasic_value(self, j):
        if j >= self.n:
            return _ZERO
        return self.upper[j] if self.at_upper[j] else self.lower[j]

    def _bound(self, j, which):
        if j >= self.n:
            return _ZERO if which == "lower" else None
        return self.lower[j] if which == "lower" else self.upper[j]

    def reduced_costs(self, c):
        cb = [c[k] for k in self.basis]
        ncols = self.n + self.m
        z = []
        for j in range(ncols):
            acc = _ZERO
            for i in range(self.m):
                if cb[i] != 0:
                    acc += cb[i] * self.t[i][j]
            z.append(c[j] - acc)
        return z

    def optimize(self, c, forbidden):
        """Bland-rule primal simplex on the current basis; c has n+m entries."""
        while True:
            if self.pivots > MAX_PIVOTS:
                raise SimplexError("pivot limit exceeded")
            z = self.reduced_costs(c)
            basic = set(self.basis)
            enter = -1
            for j in range(self.n + self.m):
                if j in forbidden or j in basic:
                    continue
                if self.at_upper_col(j):
                    if z[j] < 0:
                        enter = j
                        break
                else:
                    if z[j] > 0:
                        enter = j
                        break
            if enter < 0:
                return
            self._pivot(enter)

    def at_upper_col(self, j):
        if j >= self.n:
            return False
        return self.at_upper[j]

    def _pivot(self, enter):
        self.pivots += 1
        sigma = -_ONE if self.at_upper_col(enter) else _ONE
        d = [self.t[i][enter] for i in range(self.m)]
        # ratio test: x_B(t) = beta - sigma * t * d, entering moves by sigma * t
        best_t = None
        leave_row = -1
        leave_to_upper = False
        lo_e = self._bound(enter, "lower")
        up_e = self._bound(enter, "upper")
        if lo_e is not None and up_e is not None:
            best_t = up_e - lo_e  # bound flip
        for i in range(self.m):
            step = sigma * d[i]
            k = self.basis[i]
            if step > 0:
                lb = self._bound(k, "lower")
                if lb is None:
                    continue
                ti = (self.beta[i] - lb) / step
                hits_upper = False
            elif step < 0:
                ub = self._bound(k, "upper")
                if ub is None:
                    continue
                ti = (ub - self.beta[i]) / (-step)
                hits_upper = True
            else:
                continue
            take = best_t is None or ti < best_t
            if not take and ti == best_t:
                # Bland tie-break: rows beat the bound flip, lowest basis index wins
                take = leave_row < 0 or self.basis[i] < self.basis[leave_row]
            if take:
                best_t = ti
                leave_row = i
                leave_to_upper = hits_upper
        if best_t is None:
            raise _Unbounded(enter)
        for i in range(self.m):
            if d[i] != 0:
                self.beta[i] -= sigma * best_t * d[i]
        if leave_row < 0:
            # bound flip: entering variable crosses to its other bound
            self.at_upper[enter] = not self.at_upper[enter]
            return
        enter_value = self._nonbasic_value(enter) + sigma * best_t
        leaving = self.basis[leave_row]
        if leaving < self.n:
            self.at_upper[leaving] = leave_to_upper
        piv = self.t[leave_row][enter]
        row = self.t[leave_row]
        inv = _ONE / piv
        for j in range(self.n + self.m):
            if row[j] != 0:
                row[j] *= inv
        self.rhs[leave_row] *= inv
        for i in range(self.m):
            if i == leave_row:
                continue
            f = self.t[i][enter]
            if f == 0:
                continue
            ri = self.t[i]
            for j in range(self.n + self.m):
                if row[j] != 0:
                    ri[j] -= f * row[j]
            self.rhs[i] -= f * self.rhs[leave_row]
        self.basis[leave_row] = enter
        self.beta[leave_row] = enter_value

    def solution(self):
        x = [self._nonbasic_value(j) for j in range(self.n)]
        for i, k in enumerate(self.basis):
            if k < self.n:
                x[k] = self.beta[i]
        return x

    def duals(self, c):
        """y = c_B B^{-1}, read from the artificial columns."""
        cb = [c[k] for k in self.basis]
        y = []
        for i in range(self.m):
            acc = _ZERO
            for r in range(self.m):
                if cb[r] != 0:
                    acc += cb[r] * self.t[r][self.n + i]
            y.append(acc * self.art_sign[i])
        return y


class _Unbounded(Exception):
    def __init__(self, col):
        self.col = col


def solve_exact_lp(a_rows, b, c, lower, upper) -> LPResult:
    """Maximize c.x subject to A x = b and l <= x <= u, exactly."""
    m = len(a_rows)
    n = len(c)
    a_q = [[_to_mpq(v) for v in row] for row in a_rows]
    b_q = [_to_mpq(v) for v in b]
    c_q = [_to_mpq(v) for v in c]
    lo_q = [None if v is None else _to_mpq(v) for v in lower]
    up_q = [None if v is None else _to_mpq(v) for v in upper]
    tab = _Tableau(a_q, b_q, lo_q, up_q)

    # phase 1: drive the artificials to zero
    c1 = [_ZERO] * n + [-_ONE] * m
    try:
        tab.optimize(c1, forbidden=frozenset())
    except _Unbounded:  # pragma: no cover - phase 1 objective is bounded
        raise SimplexError("phase 1 reported unbounded")
    infeas = -sum((c1[k] * tab.beta[i] for i, k in enumerate(tab.basis)), _ZERO)
    if infeas > 0:
        y = tab.duals(c1)
        return LPResult(status="infeasible", farkas=[_to_fraction(v) for v in y], pivots=tab.pivots)

    # phase 2: artificial columns may not re-enter
    c2 = c_q + [_ZERO] * m
    forbidden = frozenset(range(n, n + m))
    try:
        tab.optimize(c2, forbidden=forbidden)
    except _Unbounded:
        return LPResult(status="unbounded", pivots=tab.pivots)
    x = tab.solution()
    obj = sum((c_q[j] * x[j] for j in range(n)), _ZERO)
    y = tab.duals(c2)
    z = tab.reduced_costs(c2)
    return LPResult(
        status="optimal",
        x=[_to_fraction(v) for v in x],
        objective=_to_fraction(obj),
        duals=[_to_fraction(v) for v in y],
        reduced_costs=[_to_fraction(v) for v in z[:n]],
        basis=list(tab.basis),
        pivots=tab.pivots,
    )


def verify_optimal(a_rows, b, c, lower, upper, res: LPResult) -> None:
    """Exact primal/dual feasibility and complementary slackness; raises on failure."""
    if res.status != "optimal":
        raise SimplexError(f"cannot verify a result with status {res.status}")
    m, n = len(a_rows), len(c)
    x = [Fraction(v) for v in res.x]
    y = [Fraction(v) for v in res.duals]
    for i in range(m):
        lhs = sum(Fraction(a_rows[i][j]) * x[j] for j in range(n))
        if lhs != Fraction(b[i]):
            raise SimplexError(f"row {i} violated: {lhs} != {b[i]}")
    dual_obj = sum(y[i] * Fraction(b[i]) for i in range(m))
    for j in range(n):
        zj = Fraction(c[j]) - sum(y[i] * Fraction(a_rows[i][j]) for i in range(m))
        lo = lower[j]
        up = upper[j]
        if lo is not None and x[j] < Fraction(lo):
            raise SimplexError(f"variable {j} below lower bound")
        if up is not None and x[j] > Fraction(up):
            raise SimplexError(f"variable {j} above upper bound")
        if zj > 0:
            if up is None or x[j] != Fraction(up):
                raise SimplexError(f"variable {j}: positive reduced cost but not at upper bound")
            dual_obj += zj * Fraction(up)
        elif zj < 0:
            if lo is None or x[j] != Fraction(lo):
                raise SimplexError(f"variable {j}: negative reduced cost but not at lower bound")
            dual_obj += zj * Fraction(lo)
    if dual_obj != res.objective:
        raise SimplexError(f"strong duality gap: primal {res.objective} vs dual {dual_obj}")
