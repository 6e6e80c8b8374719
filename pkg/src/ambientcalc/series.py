"""Frobenius engine for the rho-singular operators of the ambient equations.

All operators here have the shape

    L[u] = a2 * rho * u'' + a1 * u' + a0 * u + S[u]

with rational constants a2 != 0, a1, a0 and a linear "spatial" operator S
acting on the coefficient functions (a Laplacian, -(1/8) d^2/dp^2, or zero).
The indicial polynomial is ``a2*s*(s-1) + a1*s``; its roots 0 and
``1 - a1/a2`` drive the analytic and the second (rho^{s2}) branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import sympy as sp

from .expr import Expr


class ObstructionError(Exception):
    """Analytic continuation blocked at a resonant order."""

    def __init__(self, order, obstruction):
        self.order = order
        self.obstruction = obstruction
        super().__init__(
            f"analytic obstruction at order {order}: {sp.sstr(obstruction)}"
        )


@dataclass(frozen=True)
class FrobeniusProblem:
    rho: sp.Symbol
    a2: sp.Rational
    a1: sp.Rational
    a0: sp.Rational = sp.Integer(0)
    spatial: Optional[Callable[[Expr], Expr]] = None
    source: Expr = sp.Integer(0)  # expansion in rho with Expr coefficients

    def indicial(self, s) -> Expr:
        return sp.cancel(self.a2 * s * (s - 1) + self.a1 * s)

    def apply(self, u: Expr) -> Expr:
        r = self.rho
        out = self.a2 * r * sp.diff(u, r, 2) + self.a1 * sp.diff(u, r) + self.a0 * u
        if self.spatial is not None:
            out += self.spatial(u)
        return out

    def residual(self, u: Expr) -> Expr:
        return sp.expand(self.apply(u) - self.source)


def indicial_roots(p: FrobeniusProblem) -> Tuple[sp.Rational, sp.Rational, bool]:
    """Both indicial roots plus a resonance flag.

    Resonance (root difference a nonnegative integer) is what makes log
    terms possible.
    """
    s1 = sp.Integer(0)
    s2 = sp.Rational(1) - sp.Rational(p.a1) / sp.Rational(p.a2)
    resonant = (s2 - s1).is_integer and s2 - s1 >= 0
    return s1, s2, bool(resonant)


@dataclass
class SeriesTerm:
    exponent: sp.Rational
    log_power: int
    coefficient: Expr


@dataclass
class SeriesSolution:
    """Truncated solution Sum coeff * rho^exponent * log(rho)^log_power."""

    rho: sp.Symbol
    terms: List[SeriesTerm] = field(default_factory=list)
    order: int = 0
    branch: str = "analytic"

    def add(self, exponent, coefficient, log_power: int = 0):
        coefficient = sp.expand(coefficient)
        if coefficient != 0:
            self.terms.append(SeriesTerm(sp.Rational(exponent), log_power,
                                         coefficient))

    def as_expr(self) -> Expr:
        r = self.rho
        return sp.Add(*[
            t.coefficient * r ** t.exponent * sp.log(r) ** t.log_power
            for t in self.terms
        ])

    def coefficient(self, exponent, log_power: int = 0) -> Expr:
        e = sp.Rational(exponent)
        return sp.expand(sp.Add(*[
            t.coefficient for t in self.terms
            if t.exponent == e and t.log_power == log_power
        ]))


def _source_coefficient(p: FrobeniusProblem, k: int) -> Expr:
    """Coefficient of rho^k in the (polynomial-in-rho) source."""
    src = sp.expand(p.source)
    if src == 0:
        return sp.Integer(0)
    return src.coeff(p.rho, k)


def solve_truncated(p: FrobeniusProblem, N: int, branch: str = "analytic",
                    initial: Expr = sp.Integer(0),
                    branch_data: Expr = sp.Integer(0)) -> SeriesSolution:
    """Truncated Frobenius solution of L[u] = source.

    branch "analytic": u = initial + sum_{k>=1} u_k rho^k.  At a resonant
    order m (indicial root) the recurrence numerator must vanish, otherwise
    an ObstructionError is raised; when it vanishes the free coefficient is
    set to zero (the second branch carries the ambiguity).

    branch "second": homogeneous branch u = rho^{s2} (branch_data + ...).
    """
    s1, s2, resonant = indicial_roots(p)
    sol = SeriesSolution(p.rho, order=N, branch=branch)
    if branch == "analytic":
        u_prev = sp.expand(initial)
        if u_prev != 0:
            sol.add(0, u_prev)
        for k in range(1, N + 1):
            num = _source_coefficient(p, k - 1) - p.a0 * u_prev
            if p.spatial is not None:
                num -= p.spatial(u_prev)
            num = sp.expand(num)
            I = p.indicial(k)
            if I == 0:
                if num != 0 and sp.simplify(num) != 0:
                    raise ObstructionError(k, num)
                u_k = sp.Integer(0)
            else:
                u_k = sp.expand(num / I)
            sol.add(k, u_k)
            u_prev = u_k
        return sol
    if branch == "second":
        w_prev = sp.expand(branch_data)
        sol.add(s2, w_prev)
        for k in range(1, N + 1):
            num = -p.a0 * w_prev
            if p.spatial is not None:
                num -= p.spatial(w_prev)
            I = p.indicial(s2 + k)
            if I == 0:
                raise ValueError(f"unexpected resonance at {s2 + k}")
            w_k = sp.expand(num / I)
            sol.add(s2 + k, w_k)
            w_prev = w_k
        sol.branch = "second"
        return sol
    raise ValueError(f"unknown branch {branch!r}")


def residual_lowest_order(p: FrobeniusProblem, u: Expr) -> Optional[sp.Rational]:
    """Lowest rho-exponent with nonvanishing residual coefficient.

    The residual of a truncated solution is expanded as a generalized series
    in rho (rational exponents, log powers); returns None when it vanishes
    identically.  This is the trusted certification route for any series,
    however it was produced: a truncation at order N is correct when the
    returned exponent is >= the guaranteed order.
    """
    r = p.rho
    res = sp.expand(p.residual(u))
    if res == 0:
        return None
    lg = sp.log(r)
    found = {}
    for t in res.as_ordered_terms():
        c, exps = _split_rho(t, r, lg)
        found[exps] = found.get(exps, sp.Integer(0)) + c
    out = None
    for (e, _lp), c in found.items():
        if sp.expand(c) != 0 and sp.simplify(c) != 0:
            if out is None or e < out:
                out = sp.Rational(e)
    return out


def _split_rho(term, r, lg):
    """(coefficient, (rho exponent, log power)) of a product term."""
    e = sp.Integer(0)
    lp = 0
    rest = sp.Integer(1)
    for f in sp.Mul.make_args(term):
        if f == r:
            e += 1
        elif f.is_Pow and f.base == r and f.exp.is_Rational:
            e += f.exp
        elif f == lg:
            lp += 1
        elif f.is_Pow and f.base == lg and f.exp.is_Integer:
            lp += int(f.exp)
        else:
            rest *= f
    return rest, (sp.Rational(e), lp)
