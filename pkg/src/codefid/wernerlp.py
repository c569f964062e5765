"""Exact symmetry-reduced linear programs for n uses of a Werner-Holevo channel.

The twirling symmetry of w(d, alpha)^(x)n collapses the fidelity SDP to an
(n+1)-variable LP over the coefficients x_k of Lambda in the basis of
projectors E^n_k (sums of n-fold S/A tensor products with k antisymmetric
factors).  Everything here is exact big-rational arithmetic; the closed-form
reduction matrix has an independent projector-algebra oracle for small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .problems import CodeClass, FeasiblePoint
from .simplex import LPResult, SimplexError, solve_exact_lp, verify_optimal
from .systems import (
    LabeledOperator,
    identity,
    max_entangled,
    merge_labels,
    partial_trace,
    partial_transpose,
    shape,
    sym_antisym,
    tensor,
    trace_product,
)


def m_matrix(n: int, d: int) -> list[list[Fraction]]:
    """Partial-transpose action on the E-basis, expressed in the Upsilon basis."""
    if n < 1 or d < 2:
        raise ValueError("m_matrix requires n >= 1 and d >= 2")
    half = Fraction(1, 2**n)
    out = []
    for i in range(n + 1):
        row = []
        for j in range(n + 1):
            acc = Fraction(0)
            for k in range(min(i, j) + 1):
                acc += (
                    math.comb(n - i, j - k)
                    * math.comb(i, k)
                    * Fraction(1 + d) ** (i - k)
                    * Fraction(1 - d) ** k
                )
            row.append(half * acc)
        out.append(row)
    return out


def g_vector(n: int, d: int) -> list[Fraction]:
    """Partial-trace scalars: Tr_B E^n_j = g_j * identity."""
    if n < 1 or d < 2:
        raise ValueError("g_vector requires n >= 1 and d >= 2")
    half = Fraction(1, 2**n)
    return [
        half * math.comb(n, j) * Fraction(d + 1) ** (n - j) * Fraction(d - 1) ** j
        for j in range(n + 1)
    ]


def objective_coefficients(n: int, d: int, alpha: Fraction) -> list[Fraction]:
    dn = Fraction(d) ** n
    return [
        dn * math.comb(n, j) * (1 - alpha) ** (n - j) * alpha**j
        for j in range(n + 1)
    ]


@dataclass
class WernerLP:
    """The (n+1)-variable exact LP for one (d, alpha, n, K, class) instance."""

    d: int
    n: int
    alpha: Fraction
    size: int
    cls: CodeClass
    c: list[Fraction]
    m: list[list[Fraction]]
    g: list[Fraction]
    ub: Fraction  # box bound d^-n on every x_j


def build(d: int, alpha, n: int, size, cls: CodeClass) -> WernerLP:
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    size = int(size)
    if size < 1:
        raise ValueError("code size must be >= 1")
    return WernerLP(
        d=d,
        n=n,
        alpha=alpha,
        size=size,
        cls=cls,
        c=objective_coefficients(n, d, alpha),
        m=m_matrix(n, d),
        g=g_vector(n, d),
        ub=Fraction(1, d**n),
    )


@dataclass
class RationalLPSolution:
    """Exact optimal vertex with the dual certificate of the assembled LP."""

    x: list[Fraction]
    value: Fraction
    duals: list[Fraction]
    reduced_costs: list[Fraction]
    basis: list[int]
    pivots: int
    system: dict = field(repr=False, default_factory=dict)

    def verify(self) -> None:
        """Exact feasibility and complementary-slackness check; raises on failure."""
        s = self.system
        verify_optimal(
            s["rows"], s["rhs"], s["c"], s["lower"], s["upper"],
            LPResult(status="optimal", x=s["full_x"], objective=self.value, duals=self.duals),
        )


def _assemble(lp: WernerLP):
    """Columns: x_0..x_n, then the EABound surplus, then one ranged slack per PPT row."""
    nv = lp.n + 1
    lower = [Fraction(0)] * nv
    upper: list = [lp.ub] * nv
    c = list(lp.c)
    t_col = None
    if lp.cls is CodeClass.EABOUND:
        t_col = len(lower)
        lower.append(Fraction(0))
        upper.append(None)
        c.append(Fraction(0))
    s_col = None
    if lp.cls.has_ppt:
        s_col = len(lower)
        bound = lp.ub / lp.size
        for _ in range(nv):
            lower.append(-bound)
            upper.append(bound)
            c.append(Fraction(0))
    ncols = len(lower)
    rows, rhs = [], []
    if lp.cls.has_ns or lp.cls is CodeClass.EABOUND:
        row = [Fraction(0)] * ncols
        row[:nv] = list(lp.g)
        if t_col is not None:
            row[t_col] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1, lp.size * lp.size))
    if lp.cls.has_ppt:
        for i in range(nv):
            row = [Fraction(0)] * ncols
            row[:nv] = list(lp.m[i])
            row[s_col + i] = Fraction(-1)
            rows.append(row)
            rhs.append(Fraction(0))
    return rows, rhs, c, lower, upper, nv


def exact_simplex(lp: WernerLP) -> RationalLPSolution:
    rows, rhs, c, lower, upper, nv = _assemble(lp)
    res = solve_exact_lp(rows, rhs, c, lower, upper)
    if res.status == "infeasible":
        raise SimplexError(f"LP infeasible; Farkas multipliers {res.farkas}")
    if res.status != "optimal":
        raise SimplexError(f"unexpected LP status {res.status}")
    return RationalLPSolution(
        x=res.x[:nv],
        value=res.objective,
        duals=res.duals,
        reduced_costs=res.reduced_costs,
        basis=res.basis,
        pivots=res.pivots,
        system={
            "rows": rows, "rhs": rhs, "c": c, "lower": lower, "upper": upper,
            "full_x": res.x,
        },
    )


def wh_fidelity(d: int, alpha, n: int, size, cls: CodeClass) -> Fraction:
    """Exact optimal channel fidelity over n uses of W(d, alpha) at code size K."""
    return exact_simplex(build(d, alpha, n, size, cls)).value


# -- lifting back to operators -------------------------------------------------


def _site_labels(n: int):
    return [(f"A'{i:02d}", f"B{i:02d}") for i in range(n)]


def e_projectors(n: int, d: int) -> list[LabeledOperator]:
    """E^n_k on flat (A', B) labels: sums of S/A products with k antisymmetric factors."""
    sites = _site_labels(n)
    sa = [sym_antisym(d, labels=(a, b), exact=True) for a, b in sites]
    out = []
    for k in range(n + 1):
        total = None
        for pattern in range(2**n):
            if bin(pattern).count("1") != k:
                continue
            term = None
            for site in range(n):
                f = sa[site][1] if (pattern >> site) & 1 else sa[site][0]
                term = f if term is None else tensor(term, f)
            total = term if total is None else total + term
        out.append(_flatten(total, n))
    return out


def upsilon_projectors(n: int, d: int) -> list[LabeledOperator]:
    """Upsilon^n_i on flat (A', B): products of (1-phi)/phi with i maximally entangled factors."""
    sites = _site_labels(n)
    phis = [max_entangled(d, labels=(a, b), exact=True) for a, b in sites]
    eyes = [identity(p.shape, exact=True) for p in phis]
    out = []
    for i in range(n + 1):
        total = None
        for pattern in range(2**n):
            if bin(pattern).count("1") != i:
                continue
            term = None
            for site in range(n):
                f = phis[site] if (pattern >> site) & 1 else (eyes[site] - phis[site])
                term = f if term is None else tensor(term, f)
            total = term if total is None else total + term
        out.append(_flatten(total, n))
    return out


def _flatten(x: LabeledOperator, n: int) -> LabeledOperator:
    sites = _site_labels(n)
    return merge_labels(x, [("A'", [a for a, _ in sites]), ("B", [b for _, b in sites])])


def lambda_from_x(x, n: int, d: int) -> FeasiblePoint:
    """Lift LP coefficients to the explicit (Lambda, rho) primal point."""
    if len(x) != n + 1:
        raise ValueError(f"expected {n + 1} coefficients, got {len(x)}")
    basis = e_projectors(n, d)
    lam = basis[0] * Fraction(x[0])
    for k in range(1, n + 1):
        lam = lam + basis[k] * Fraction(x[k])
    rho = identity(shape(("A'", d**n)), exact=True) * Fraction(1, d**n)
    return FeasiblePoint(lam=lam, rho=rho)


def brute_force_oracle(n: int, d: int):
    """Recompute (M, g) by explicit projector algebra on d^n x d^n operators.

    Partially transposes each E^n_k, expands it in the Upsilon basis (verifying
    membership entrywise), and reads the partial-trace scalars directly.
    """
    if n > 2 or d > 3:
        raise ValueError("oracle is intended for small instances (n <= 2, d <= 3)")
    es = e_projectors(n, d)
    ups = upsilon_projectors(n, d)
    m = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    g = []
    for k, e in enumerate(es):
        r = partial_transpose(e, ["B"])
        recon = None
        for i, up in enumerate(ups):
            coeff = Fraction(trace_product(up, r)) / Fraction(up.trace())
            m[i][k] = coeff
            contrib = up * coeff
            recon = contrib if recon is None else recon + contrib
        if not (recon.entries == r.entries).all():
            raise ArithmeticError(f"t_B E^{n}_{k} is not in the span of the Upsilon basis")
        t = partial_trace(e, ["B"])
        gamma = Fraction(t.entries[0, 0])
        eye = identity(t.shape, exact=True)
        if not (t.entries == (eye * gamma).entries).all():
            raise ArithmeticError(f"Tr_B E^{n}_{k} is not proportional to the identity")
        g.append(gamma)
    return m, g


def rate_schedule(c, n: int) -> int:
    """K_n = floor(c^n) with exact integer arithmetic."""
    c = Fraction(c)
    if c <= 1:
        raise ValueError("rate base must exceed 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    return (c.numerator**n) // (c.denominator**n)
