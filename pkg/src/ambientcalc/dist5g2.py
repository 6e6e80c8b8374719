"""Conformal structures from generic rank-2 distributions in dimension 5.

The family is defined by F = q^2 + f(x,y,p) + h(x,y) z.  This module builds
the representative metric from its five-coframe, the 7-dimensional ambient
ansatz with correction fields A, B, C, the linear second- and first-order
systems those fields satisfy, their series solutions (analytic and
rho^{5/2}-branch), the null coframe adapted to the exceptional holonomy
reduction, and the parallel 3-form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import sympy as sp

from .series import SeriesSolution
from .tensorcalc import (Chart, CoFrame, FormField, Metric, form_from_coframe_indices,
                         metric_from_coframe, substitute_chart, sym_pair, wedge_list)

x, y, z, p, q = sp.symbols("x y z p q", real=True)
t = sp.Symbol("t", positive=True)
rho = sp.Symbol("rho", positive=True)
r = sp.Symbol("r", positive=True)  # sqrt(rho) chart for non-smooth branches

BASE_COORDS = (x, y, z, p, q)
# the evaluation point used for every printed dimension sequence
BASE_POINT = {x: 0, y: 0, z: 0, p: 0, q: 1}
AMBIENT_POINT = {t: 1, rho: 1, **BASE_POINT}

SQRT2 = sp.sqrt(2)


@dataclass
class Dist5Spec:
    """Defining data: f = f(x, y, p), h = h(x, y)."""

    f: sp.Expr
    h: sp.Expr = sp.Integer(0)

    def __post_init__(self):
        self.f = sp.sympify(self.f)
        self.h = sp.sympify(self.h)
        bad_f = self.f.free_symbols - {x, y, p}
        bad_h = self.h.free_symbols - {x, y}
        if bad_f:
            raise ValueError(f"f may only depend on (x, y, p); found {bad_f}")
        if bad_h:
            raise ValueError(f"h may only depend on (x, y); found {bad_h}")


def base_chart() -> Chart:
    return Chart(BASE_COORDS, base_point=BASE_POINT)


def ambient_chart() -> Chart:
    return Chart((t,) + BASE_COORDS + (rho,), constraints=(t > 0, rho > 0),
                 base_point=AMBIENT_POINT)


def dist5_coframe(spec: Dist5Spec) -> CoFrame:
    """The five 1-forms theta^1..theta^5 in coordinates (x, y, z, p, q)."""
    f, h = spec.f, spec.h
    fp = sp.diff(f, p)
    fpp = sp.diff(f, p, 2)
    hx, hy = sp.diff(h, x), sp.diff(h, y)
    th1 = {y: 1, x: -p}
    th3 = {p: 2 * SQRT2, x: -2 * SQRT2 * q}
    th2 = {z: 1, x: -(q**2 + f + h * z)}
    for c, v in th3.items():
        th2[c] = th2.get(c, 0) - SQRT2 / 2 * q * v
    th4 = {x: 3}
    th5 = {q: -6, x: 3 * (2 * h * q + fp)}
    for c, v in th3.items():
        th5[c] = th5.get(c, 0) + SQRT2 * h / 2 * v
    c1 = sp.Rational(1, 10) * (9 * fpp + 4 * h**2 - 6 * (p * hy + hx))
    for c, v in th1.items():
        th5[c] = th5.get(c, 0) + c1 * v
    rows = []
    for d in (th1, th2, th3, th4, th5):
        rows.append([sp.expand(d.get(c, sp.Integer(0))) for c in BASE_COORDS])
    return CoFrame(base_chart(), rows)


_PAIRING = sp.Matrix([
    [0, 0, 0, 0, 1],
    [0, 0, 0, -1, 0],
    [0, 0, 1, 0, 0],
    [0, -1, 0, 0, 0],
    [1, 0, 0, 0, 0],
])


def dist5_metric(spec: Dist5Spec) -> Metric:
    """g = 2 theta^1 theta^5 - 2 theta^2 theta^4 + (theta^3)^2."""
    return metric_from_coframe(dist5_coframe(spec), _PAIRING, signature=(3, 2))


def schouten_coefficients(spec: Dist5Spec) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
    """(alpha, beta, gamma) with P = alpha (th1)^2 + 2 beta th1 th4 + gamma (th4)^2."""
    f, h = spec.f, spec.h
    alpha = -sp.Rational(3, 80) * sp.diff(f, p, 4)
    beta = -sp.Rational(1, 80) * (sp.diff(f, p, 3) + 6 * sp.diff(h, y))
    gamma = -sp.Rational(1, 15) * (
        (sp.diff(h, x) + p * sp.diff(h, y)) / 2
        + sp.diff(f, p, 2) / 12 - h**2 / 3
    )
    return sp.expand(alpha), sp.expand(beta), sp.expand(gamma)


@dataclass
class ABCFields:
    """Ambient correction fields, functions of (x, y, p, rho)."""

    A: sp.Expr
    B: sp.Expr
    C: sp.Expr

    def __post_init__(self):
        allowed = {x, y, p, rho}
        for name in "ABC":
            e = sp.sympify(getattr(self, name))
            setattr(self, name, e)
            extra = e.free_symbols - allowed
            if extra:
                raise ValueError(f"{name} may only depend on (x, y, p, rho); got {extra}")

    def at_rho0(self) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
        return tuple(sp.limit(e, rho, 0, "+") if e.has(rho) else e
                     for e in (self.A, self.B, self.C))

    def subs_rho(self, value) -> "ABCFields":
        return ABCFields(self.A.subs(rho, value), self.B.subs(rho, value),
                         self.C.subs(rho, value))


ZERO_ABC = ABCFields(sp.Integer(0), sp.Integer(0), sp.Integer(0))


def ambient_ansatz(spec: Dist5Spec, abc: ABCFields) -> Metric:
    """2 dt d(rho t) + t^2 (g + A (th1)^2 + 2 B th1 th4 + C (th4)^2)."""
    cf = dist5_coframe(spec)
    th1 = list(cf.matrix.row(0))
    th4 = list(cf.matrix.row(3))
    block = sp.Matrix(dist5_metric(spec).mat) \
        + abc.A * sym_pair(th1, th1) + 2 * abc.B * sym_pair(th1, th4) \
        + abc.C * sym_pair(th4, th4)
    n = 7
    g = sp.zeros(n, n)
    g[0, 0] = 2 * rho
    g[0, 6] = g[6, 0] = t
    for i in range(5):
        for j in range(5):
            g[1 + i, 1 + j] = t**2 * block[i, j]
    return Metric(ambient_chart(), g, validate=False, signature=(4, 3))


def L_op(e: sp.Expr) -> sp.Expr:
    """L = 2 rho d^2/drho^2 - 3 d/drho - (1/8) d^2/dp^2."""
    return (2 * rho * sp.diff(e, rho, 2) - 3 * sp.diff(e, rho)
            - sp.Rational(1, 8) * sp.diff(e, p, 2))


def second_order_residual(spec: Dist5Spec, abc: ABCFields):
    """Residuals of the linear system equivalent to Ric(ambient) = 0."""
    f, h = spec.f, spec.h
    hy, hx = sp.diff(h, y), sp.diff(h, x)
    rA = L_op(abc.A) - sp.Rational(9, 40) * sp.diff(f, p, 4)
    rB = L_op(abc.B) - (-sp.Rational(1, 36) * sp.diff(abc.A, p)
                        + sp.Rational(3, 40) * sp.diff(f, p, 3)
                        + sp.Rational(9, 20) * hy)
    rC = L_op(abc.C) - (-sp.Rational(1, 18) * sp.diff(abc.B, p)
                        + sp.Rational(1, 324) * abc.A
                        + sp.Rational(1, 30) * sp.diff(f, p, 2)
                        - sp.Rational(2, 15) * h**2
                        + sp.Rational(1, 5) * (p * hy + hx))
    return tuple(sp.expand(e) for e in (rA, rB, rC))


def first_order_residual(spec: Dist5Spec, abc: ABCFields):
    """Residuals of the first-order system whose solutions are ambient."""
    f, h = spec.f, spec.h
    hy, hx = sp.diff(h, y), sp.diff(h, x)
    A, B, C = abc.A, abc.B, abc.C
    r1 = sp.diff(B, p) - (sp.Rational(5, 9) * A
                          - sp.Rational(2, 9) * rho * sp.diff(A, rho))
    r2 = sp.diff(B, rho) - (-sp.Rational(1, 72) * sp.diff(A, p)
                            - sp.Rational(1, 40) * sp.diff(f, p, 3)
                            - sp.Rational(3, 20) * hy)
    r3 = sp.diff(C, rho) - (sp.Rational(1, 648) * A
                            - sp.Rational(1, 72) * sp.diff(B, p)
                            - sp.Rational(1, 90) * sp.diff(f, p, 2)
                            + sp.Rational(2, 45) * h**2
                            - sp.Rational(1, 15) * (p * hy + hx))
    r4 = sp.diff(C, p) - (sp.Rational(1, 324) * rho * sp.diff(A, p)
                          + sp.Rational(2, 3) * B
                          + sp.Rational(1, 180) * rho * sp.diff(f, p, 3)
                          + sp.Rational(1, 30) * rho * hy)
    return tuple(sp.expand(e) for e in (r1, r2, r3, r4))


def first_order_implies_second_order():
    """Symbolic derivation: the first-order system implies the second-order one.

    With A abstract and B_p, B_rho, C_p, C_rho substituted from the
    first-order system, returns the three second-order residuals, which must
    all be zero.  Executed once; instances are covered by randomized tests.
    """
    A = sp.Function("A")(x, y, p, rho)
    f = sp.Function("f")(x, y, p)
    h = sp.Function("h")(x, y)
    hy, hx = sp.diff(h, y), sp.diff(h, x)
    fp3 = sp.diff(f, p, 3)
    fp4 = sp.diff(f, p, 4)

    Bp = sp.Rational(5, 9) * A - sp.Rational(2, 9) * rho * sp.diff(A, rho)
    Brho = (-sp.Rational(1, 72) * sp.diff(A, p) - sp.Rational(1, 40) * fp3
            - sp.Rational(3, 20) * hy)
    # integrability of B forces the first second-order equation
    res1 = sp.expand(sp.diff(Brho, p) - sp.diff(Bp, rho)
                     + sp.Rational(1, 9) * (L_op(A) - sp.Rational(9, 40) * fp4))
    # LB from the two B-derivatives
    LB = (2 * rho * sp.diff(Brho, rho) - 3 * Brho
          - sp.Rational(1, 8) * sp.diff(Bp, p))
    res2 = sp.expand(LB - (-sp.Rational(1, 36) * sp.diff(A, p)
                           + sp.Rational(3, 40) * fp3 + sp.Rational(9, 20) * hy))
    # LC from the C-derivatives, using a B that realizes Bp/Brho
    B = sp.Function("B")(x, y, p, rho)
    Crho = (sp.Rational(1, 648) * A - sp.Rational(1, 72) * sp.diff(B, p)
            - sp.Rational(1, 90) * sp.diff(f, p, 2)
            + sp.Rational(2, 45) * h**2 - sp.Rational(1, 15) * (p * hy + hx))
    Cp = (sp.Rational(1, 324) * rho * sp.diff(A, p) + sp.Rational(2, 3) * B
          + sp.Rational(1, 180) * rho * fp3 + sp.Rational(1, 30) * rho * hy)
    LC = 2 * rho * sp.diff(Crho, rho) - 3 * Crho - sp.Rational(1, 8) * sp.diff(Cp, p)
    target = (-sp.Rational(1, 18) * sp.diff(B, p) + sp.Rational(1, 324) * A
              + sp.Rational(1, 30) * sp.diff(f, p, 2) - sp.Rational(2, 15) * h**2
              + sp.Rational(1, 5) * (p * hy + hx))
    res3 = sp.expand(LC - target)
    # replace B-derivatives by their first-order values
    res3 = res3.subs({sp.diff(B, rho, p): sp.diff(Brho, p),
                      sp.diff(B, p, 2): sp.diff(Bp, p),
                      sp.diff(B, rho): Brho,
                      sp.diff(B, p): Bp})
    res3 = sp.expand(res3)
    return res1, res2, res3


def analytic_series(spec: Dist5Spec, N: int) -> ABCFields:
    """Unique analytic solution of the second-order system, truncated at rho^N."""
    f, h = spec.f, spec.h
    hy, hx = sp.diff(h, y), sp.diff(h, x)
    A = sp.Integer(0)
    B = -sp.Rational(3, 20) * rho * hy
    C = (sp.Rational(2, 45) * rho * h**2
         - sp.Rational(1, 15) * rho * (p * hy + hx))
    for k in range(1, N + 1):
        denom = 2 ** (2 * k) * sp.factorial(2 * k)
        A += (sp.Rational(3, 5) * (2 * k - 1) * (2 * k - 3) / denom
              * sp.diff(f, p, 2 * k + 2) * rho**k)
        B += (-sp.Rational(1, 15) * (2 * k - 1) * (2 * k - 3) * (2 * k - 5) / denom
              * sp.diff(f, p, 2 * k + 1) * rho**k)
        C += (sp.Rational(2, 135) * (k - 3) * (2 * k - 1) * (2 * k - 3) * (2 * k - 5)
              / denom * sp.diff(f, p, 2 * k) * rho**k)
    return ABCFields(sp.expand(A), sp.expand(B), sp.expand(C))


def general_series(spec: Dist5Spec, alpha0, beta0, gamma0, N: int) -> ABCFields:
    """General solution: analytic part plus the rho^{5/2}-branch.

    alpha0, beta0, gamma0 are functions of (x, y, p); with all three zero
    this reduces to the analytic series.
    """
    for name, e in (("alpha0", alpha0), ("beta0", beta0), ("gamma0", gamma0)):
        extra = sp.sympify(e).free_symbols - {x, y, p}
        if extra:
            raise ValueError(f"{name} may only depend on (x, y, p); got {extra}")
    base = analytic_series(spec, N)
    A, B, C = base.A, base.B, base.C
    half = sp.Rational(5, 2)
    for k in range(0, N + 1):
        c = sp.Rational((k + 1) * (k + 2), 2 ** (2 * k)) / sp.factorial(2 * k + 5)
        A += 60 * c * sp.diff(alpha0, p, 2 * k) * rho ** (half + k)
        bterm = 9 * sp.diff(beta0, p, 2 * k)
        cterm = 81 * sp.diff(gamma0, p, 2 * k)
        if k >= 1:
            bterm += -2 * k * sp.diff(alpha0, p, 2 * k - 1)
            cterm += -36 * k * sp.diff(beta0, p, 2 * k - 1)
            cterm += 2 * k * (2 * k - 1) * sp.diff(alpha0, p, 2 * k - 2)
        B += sp.Rational(20, 3) * c * bterm * rho ** (half + k)
        C += sp.Rational(20, 27) * c * cterm * rho ** (half + k)
    return ABCFields(sp.expand(A), sp.expand(B), sp.expand(C))


# ---------------------------------------------------------------------------
# the null coframe and the invariant 3-form
# ---------------------------------------------------------------------------


def _lift_base_form(row) -> list:
    """Pad a 5-coordinate 1-form to the 7-dim ambient coordinates."""
    return [sp.Integer(0)] + list(row) + [sp.Integer(0)]


def g2_null_coframe(spec: Dist5Spec, abc: ABCFields) -> CoFrame:
    """The seven null-coframe 1-forms omega^1..omega^7 on the ambient chart."""
    cf = dist5_coframe(spec)
    th = [_lift_base_form(cf.matrix.row(i)) for i in range(5)]
    h = spec.h
    dt = [sp.Integer(1)] + [sp.Integer(0)] * 6
    drho = [sp.Integer(0)] * 6 + [sp.Integer(1)]

    def lin(*pairs):
        out = [sp.Integer(0)] * 7
        for coef, vec in pairs:
            for i, v in enumerate(vec):
                out[i] += coef * v
        return [sp.expand(e) for e in out]

    w1 = lin((9 * SQRT2, dt), (t * SQRT2 * h, th[3]))
    w2 = th[0]
    w3 = lin((-t * h * rho / 9, dt), (-t**2 * h / 9, drho), (-t**2, th[1]),
             (t**2 * abc.C / 2, th[3]))
    w4 = lin((t, th[2]))
    w5 = th[3]
    w6 = lin((t**2 * abc.A / 2, th[0]), (t**2 * abc.B, th[3]), (t**2, th[4]))
    w7 = lin((SQRT2 * rho / 18, dt), (SQRT2 * t / 18, drho))
    return CoFrame(ambient_chart(), [w1, w2, w3, w4, w5, w6, w7])


_OMEGA_PAIRING = sp.Matrix([
    [0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0],
])


def coframe_reconstruction_delta(spec: Dist5Spec, abc: ABCFields) -> sp.Matrix:
    """2w1w7 + 2w2w6 + 2w3w5 + (w4)^2 minus the ambient ansatz metric."""
    cf = g2_null_coframe(spec, abc)
    g = metric_from_coframe(cf, _OMEGA_PAIRING, signature=(4, 3))
    amb = ambient_ansatz(spec, abc)
    return (sp.Matrix(g.mat) - sp.Matrix(amb.mat)).applyfunc(sp.cancel)


def g2_three_form(spec: Dist5Spec, abc: ABCFields) -> FormField:
    """Upsilon = 2 w^123 - w^147 - w^246 - w^345 + w^567."""
    cf = g2_null_coframe(spec, abc)

    def w(*idx):
        return form_from_coframe_indices(cf, idx)

    out = w(1, 2, 3).scale(2) - w(1, 4, 7) - w(2, 4, 6) - w(3, 4, 5) + w(5, 6, 7)
    return out


def ambient_in_sqrt_chart(spec: Dist5Spec, abc: ABCFields) -> Metric:
    """Ambient ansatz pulled back under rho = r^2 (r > 0).

    In this chart the rho^{5/2}-branch metrics are polynomial, so holonomy
    jets at the base point are exact rationals.
    """
    amb = ambient_ansatz(spec, abc)
    new = Chart((t,) + BASE_COORDS + (r,), constraints=(t > 0, r > 0),
                base_point={t: 1, r: 1, **BASE_POINT})
    mapping = {c: c for c in (t,) + BASE_COORDS}
    mapping[rho] = r**2
    return substitute_chart(amb, new, mapping, signature=(4, 3))
