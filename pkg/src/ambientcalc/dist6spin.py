"""Bryant conformal structures from generic rank-3 distributions in dim 6.

The distribution is the annihilator of dy^1 + x^2 dx^3, dy^2 + f dx^1,
dy^3 + x^1 dx^2 with f_3 = df/dx^3 != 0.  For f = f(x^1,x^3) (and, with the
same coframe formulas, f = f(x^2,x^3)) the obstruction tensor vanishes and
the ambient metrics are 2 d(rho t) dt + t^2 (g + 2 rho P + rho^3 Q) with an
arbitrary trace-free ambiguity Q supported on the Schouten span.  This
module also builds the adapted 8-coframe and the parallel-form suite
(kappa, tilde-kappa, alpha, beta, phi-hat, phi) and the Heisenberg-holonomy
example with its parallel 1-forms and Ricci-flat scales.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import sympy as sp

from .tensorcalc import (Chart, CoFrame, FormField, Metric,
                         covariant_derivative_form, form_from_coframe_indices,
                         hodge_star, metric_from_coframe, sym_pair, wedge)

x1 = sp.Symbol("x1", positive=True)
x2, x3 = sp.symbols("x2 x3", real=True)
y1, y2, y3 = sp.symbols("y1 y2 y3", real=True)
t = sp.Symbol("t", positive=True)
rho = sp.Symbol("rho", real=True)

BASE_COORDS = (x1, x2, x3, y1, y2, y3)
# keeps f_3 != 0 for all shipped examples and avoids t = 0
BASE_POINT = {x1: 1, x2: 2, x3: 2, y1: 0, y2: 0, y3: 0}
AMBIENT_POINT = {t: 1, rho: 1, **BASE_POINT}

CLASSES = ("x1x3", "x2x3", "general")
# theta-frame support of the Schouten tensor per restricted class (1-based)
SCHOUTEN_SPAN = {"x1x3": (2, 4, 6), "x2x3": None}  # x2x3 span found at runtime


@dataclass
class Dist6Spec:
    f: sp.Expr
    klass: str = "x1x3"

    def __post_init__(self):
        self.f = sp.sympify(self.f)
        if self.klass not in CLASSES:
            raise ValueError(f"class must be one of {CLASSES}")
        extra = self.f.free_symbols - {x1, x2, x3}
        if extra:
            raise ValueError(f"f may only depend on (x1, x2, x3); got {extra}")
        f3 = sp.diff(self.f, x3)
        if sp.simplify(f3.subs(BASE_POINT)) == 0:
            raise ValueError("genericity requires f_3 != 0 at the base point")
        if self.klass == "x1x3" and self.f.has(x2):
            raise ValueError("x1x3 class requires f independent of x2")
        if self.klass == "x2x3" and self.f.has(x1):
            raise ValueError("x2x3 class requires f independent of x1")


def base_chart() -> Chart:
    return Chart(BASE_COORDS, base_point=BASE_POINT)


def ambient_chart() -> Chart:
    return Chart((t,) + BASE_COORDS + (rho,), constraints=(t > 0,),
                 base_point=AMBIENT_POINT)


def dist6_coframe(spec: Dist6Spec) -> CoFrame:
    """theta^1..theta^6 in coordinates (x1, x2, x3, y1, y2, y3)."""
    f = spec.f
    f1, f2, f3 = (sp.diff(f, v) for v in (x1, x2, x3))
    f12 = sp.diff(f, x1, 1, x2, 1)
    f13 = sp.diff(f, x1, 1, x3, 1)
    f23 = sp.diff(f, x2, 1, x3, 1)
    f33 = sp.diff(f, x3, 2)

    def comp(d):
        return [sp.expand(d.get(c, sp.Integer(0))) for c in BASE_COORDS]

    th1 = {y1: 1, x3: x2}
    th2 = {y2: 1, x1: f}
    th3 = {y3: 1, x2: x1}
    th4 = {x1: sp.Rational(3, 2) * f3**2}
    th5 = {x2: sp.Rational(3, 2) * f3}
    for c, v in th1.items():
        th5[c] = th5.get(c, 0) - sp.Rational(1, 2) * f33 * v
    th6 = {x3: sp.Rational(3, 2) * f3**2, x2: sp.Rational(3, 2) * f3 * f2}
    for c, v in th2.items():
        th6[c] = th6.get(c, 0) + sp.Rational(1, 2) * f13 * v
    for c, v in th1.items():
        th6[c] = th6.get(c, 0) + sp.Rational(1, 2) * (f3 * f23 - f2 * f33) * v
    for c, v in th3.items():
        th6[c] = th6.get(c, 0) + sp.Rational(1, 2) * (f2 * f13 - f3 * f12) * v
    return CoFrame(base_chart(), [comp(d) for d in (th1, th2, th3, th4, th5, th6)])


_PAIRING6 = sp.Matrix([
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
])


def dist6_metric(spec: Dist6Spec) -> Metric:
    """g = 2 th1 th4 + 2 th2 th5 + 2 th3 th6, signature (3,3)."""
    return metric_from_coframe(dist6_coframe(spec), _PAIRING6, signature=(3, 3))


def schouten_theta_frame(spec: Dist6Spec) -> sp.Matrix:
    """Schouten tensor components in the theta-coframe."""
    g = dist6_metric(spec)
    P = sp.Matrix(g.schouten())
    Th = sp.Matrix(dist6_coframe(spec).matrix)
    Thi = Th.inv()
    return (Thi.T * P * Thi).applyfunc(sp.cancel)


def schouten_span_indices(spec: Dist6Spec) -> Tuple[int, ...]:
    """1-based theta indices i with P in span{theta^i theta^j}."""
    Pt = schouten_theta_frame(spec)
    used = sorted({i for i in range(6) for j in range(6) if Pt[i, j] != 0}
                  | {j for i in range(6) for j in range(6) if Pt[i, j] != 0})
    return tuple(i + 1 for i in used)


@dataclass
class QTensor:
    """Ambiguity tensor: components Q_ij over the class's theta-span indices.

    Keys are 1-based sorted pairs like (2, 6); values are functions of the
    class's two base variables.
    """

    comps: Dict[Tuple[int, int], sp.Expr] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.comps.items():
            key = (min(i, j), max(i, j))
            clean[key] = clean.get(key, sp.Integer(0)) + sp.sympify(v)
        self.comps = clean

    def validate_for(self, spec: Dist6Spec):
        allowed_vars = {x1, x3} if spec.klass == "x1x3" else {x2, x3}
        span = set(span_for(spec))
        for (i, j), v in self.comps.items():
            if i not in span or j not in span:
                raise ValueError(f"Q_{i}{j} outside the Schouten span {sorted(span)}")
            extra = v.free_symbols - allowed_vars
            if extra:
                raise ValueError(f"Q_{i}{j} may only depend on {allowed_vars}")

    def matrix(self, spec: Dist6Spec) -> sp.Matrix:
        """Coordinate components sum Q_ij theta^i theta^j (2 Q_ij for i<j)."""
        Th = dist6_coframe(spec).matrix
        out = sp.zeros(6, 6)
        for (i, j), v in self.comps.items():
            thi = list(Th.row(i - 1))
            thj = list(Th.row(j - 1))
            factor = 1 if i == j else 2
            out += factor * v * sym_pair(thi, thj)
        return out


def span_for(spec: Dist6Spec) -> Tuple[int, ...]:
    if spec.klass == "general":
        raise ValueError("general class has no ambient ansatz span")
    cached = SCHOUTEN_SPAN.get(spec.klass)
    if cached is None:
        cached = schouten_span_indices(spec)
        SCHOUTEN_SPAN[spec.klass] = cached
    return cached


def bryant_ambient(spec: Dist6Spec, Q: Optional[QTensor] = None) -> Metric:
    """2 d(rho t) dt + t^2 (g + 2 rho P + rho^3 Q) on (t, x, y, rho).

    Restricted classes only; for general f the obstruction tensor need not
    vanish and no ansatz ambient exists (run obstruction6 first).
    """
    if spec.klass == "general":
        raise ValueError(
            "general-class f: obstruction may not vanish; no ansatz ambient")
    Q = Q or QTensor()
    Q.validate_for(spec)
    g = dist6_metric(spec)
    P = sp.Matrix(g.schouten())
    block = sp.Matrix(g.mat) + 2 * rho * P + rho**3 * Q.matrix(spec)
    n = 8
    gm = sp.zeros(n, n)
    gm[0, 0] = 2 * rho
    gm[0, 7] = gm[7, 0] = t
    for i in range(6):
        for j in range(6):
            gm[1 + i, 1 + j] = t**2 * sp.cancel(block[i, j])
    return Metric(ambient_chart(), gm, validate=False, signature=(4, 4))


def s_equation_residual(S: sp.Expr) -> sp.Expr:
    """rho S'' - 2 S', the linear ODE every ambiguity coefficient satisfies."""
    return sp.expand(rho * sp.diff(S, rho, 2) - 2 * sp.diff(S, rho))


# ---------------------------------------------------------------------------
# parallel forms (restricted class, coordinates adapted to f = f(x1, x3))
# ---------------------------------------------------------------------------


def kappa_form(spec: Dist6Spec) -> FormField:
    """kappa = f_3^{-1/3} theta^2 ^ theta^4 ^ theta^6 on the base manifold."""
    f3 = sp.diff(spec.f, x3)
    cf = dist6_coframe(spec)
    w = form_from_coframe_indices(cf, (2, 4, 6))
    return w.scale(f3 ** sp.Rational(-1, 3)).map(_powcancel)


def _powcancel(e):
    return sp.powsimp(sp.cancel(sp.powsimp(sp.expand(e), force=True)), force=True)


def _lift(row) -> list:
    return [sp.Integer(0)] + list(row) + [sp.Integer(0)]


def omega_coframe(spec: Dist6Spec) -> CoFrame:
    """The adapted 8-coframe for the Q = 0 ambient (f = f(x1, x3) class)."""
    if spec.klass != "x1x3":
        raise ValueError("omega coframe is built for the x1x3 class")
    f = spec.f
    f3 = sp.diff(f, x3)
    f13 = sp.diff(f, x1, 1, x3, 1)
    f33 = sp.diff(f, x3, 2)
    f113 = sp.diff(f, x1, 2, x3, 1)
    f133 = sp.diff(f, x1, 1, x3, 2)
    f333 = sp.diff(f, x3, 3)
    cf = dist6_coframe(spec)
    th = [_lift(cf.matrix.row(i)) for i in range(6)]
    dt = [sp.Integer(1)] + [sp.Integer(0)] * 7
    drho = [sp.Integer(0)] * 7 + [sp.Integer(1)]

    s1 = rho * (5 * f3 * f13**2 * f333 - 20 * f13**2 * f33**2
                + 3 * f3**2 * f133**2 + 4 * f3 * f33**2 * f113
                - 3 * f3**2 * f113 * f333) / (486 * f3 ** sp.Rational(22, 3))
    s2 = -2 * rho * (5 * f3 * f13 * f133 - 20 * f33 * f13**2
                     + 4 * f3 * f33 * f113) / (243 * f3 ** sp.Rational(22, 3))
    s3 = -2 * rho * (5 * f3 * f13 * f333 - 20 * f13 * f33**2
                     + 4 * f3 * f33 * f133) / (243 * f3 ** sp.Rational(22, 3))

    def lin(*pairs):
        out = [sp.Integer(0)] * 8
        for c, vec in pairs:
            for i, v in enumerate(vec):
                out[i] += c * v
        return [_powcancel(e) for e in out]

    w1 = lin((rho, dt), (t, drho),
             (-t * rho * 5 * f13 / (9 * f3**3), th[3]),
             (-t * rho * 4 * f33 / (9 * f3**3), th[5]))
    w2 = lin((-t**2 * 5 * f13 / (9 * f3**3), drho), (t**2, th[0]),
             (t**2 * rho * (85 * f33**2 - 27 * f3 * f113) / (81 * f3**6), th[3]))
    w3 = lin((-4 * f33 / (9 * f3 ** sp.Rational(4, 3)), drho),
             (f3 ** sp.Rational(5, 3), th[2]),
             (2 * rho * (80 * f33 * f13 - 27 * f3 * f133)
              / (81 * f3 ** sp.Rational(13, 3)), th[3]),
             (rho * (76 * f33**2 - 27 * f3 * f333)
              / (81 * f3 ** sp.Rational(13, 3)), th[5]))
    w4 = lin((t * s1, th[1]), (t * s2, th[3]),
             (-2 * t / (9 * f3 ** sp.Rational(4, 3)), th[4]), (t * s3, th[5]))
    w5 = lin((1, dt), (t * 5 * f13 / (9 * f3**3), th[3]),
             (t * 4 * f33 / (9 * f3**3), th[5]))
    w6 = lin((1, th[3]))
    w7 = lin((t**2 / f3 ** sp.Rational(5, 3), th[5]))
    w8 = lin((-sp.Rational(9, 2) * t * f3 ** sp.Rational(4, 3), th[1]))
    return CoFrame(ambient_chart(), [w1, w2, w3, w4, w5, w6, w7, w8])


def omega_form(cf: CoFrame, *idx) -> FormField:
    return form_from_coframe_indices(cf, idx)


def alpha_form(spec: Dist6Spec) -> FormField:
    """The parallel 2-form of the Q = 0 ambient (direct formula)."""
    f = spec.f
    f3 = sp.diff(f, x3)
    f13 = sp.diff(f, x1, 1, x3, 1)
    f33 = sp.diff(f, x3, 2)
    cf6 = dist6_coframe(spec)
    th = {i: _lift(cf6.matrix.row(i)) for i in range(6)}
    ch = ambient_chart()

    def oneform(vec):
        return FormField(ch, 1, {(a,): vec[a] for a in range(8) if vec[a] != 0})

    dt_f = FormField(ch, 1, {(0,): sp.Integer(1)})
    th2, th4, th6 = oneform(th[1]), oneform(th[3]), oneform(th[5])
    out = wedge(dt_f, th2).scale(-sp.Rational(9, 2) * t * f3 ** sp.Rational(4, 3))
    inner = wedge(th4, th6) \
        + wedge(th2, th4).scale(sp.Rational(5, 2) * f13) \
        + wedge(th2, th6).scale(2 * f33)
    out = out + inner.scale(t**2 / f3 ** sp.Rational(5, 3))
    return out.map(_powcancel)


def fcts_s(spec: Dist6Spec) -> sp.Expr:
    f = spec.f
    f3 = sp.diff(f, x3)
    f13 = sp.diff(f, x1, 1, x3, 1)
    f33 = sp.diff(f, x3, 2)
    f133 = sp.diff(f, x1, 1, x3, 2)
    return 2 * rho * (80 * f33 * f13 - 27 * f3 * f133) / (81 * f3 ** sp.Rational(13, 3))


def phi_hat_form(cf: CoFrame) -> FormField:
    """phi-hat in the omega coframe."""
    w = lambda *i: omega_form(cf, *i)
    return (w(1, 2, 5, 6) + w(1, 3, 5, 7) - w(1, 4, 5, 8) - w(1, 4, 6, 7).scale(2)
            - w(2, 3, 5, 8).scale(2) - w(2, 3, 6, 7) + w(2, 4, 6, 8)
            + w(3, 4, 7, 8))


def beta_form(spec: Dist6Spec, cf: CoFrame, alpha: FormField) -> FormField:
    s = fcts_s(spec)
    w = lambda *i: omega_form(cf, *i)
    mid = w(1, 5) + w(2, 6) + w(3, 7) + w(4, 8) - w(5, 8).scale(s)
    return wedge(alpha, mid).map(_powcancel)


def phi_form(spec: Dist6Spec, cf: CoFrame, alpha: FormField,
             kappa_tilde: FormField) -> FormField:
    s = fcts_s(spec)
    beta = beta_form(spec, cf, alpha)
    return (phi_hat_form(cf) + beta.scale(s) + kappa_tilde.scale(s**2 / 2)) \
        .map(_powcancel)


def xi_coframe_43(cf: CoFrame) -> CoFrame:
    """Pseudo-orthonormal coframe (a = sqrt(32)) turning phi-hat into the
    standard 14-term form with stabilizer spin(4,3)."""
    a = sp.sqrt(32)
    w = [list(cf.matrix.row(i)) for i in range(8)]

    def lin(*pairs):
        out = [sp.Integer(0)] * 8
        for c, vec in pairs:
            for i, v in enumerate(vec):
                out[i] += c * v
        return [_powcancel(e) for e in out]

    xi = [
        lin((-a / 64, w[0]), (a, w[4])),
        lin((a / 16, w[1]), (-a / 4, w[5])),
        lin((a / 8, w[2]), (-a / 8, w[6])),
        lin((a / 2, w[3]), (-a / 32, w[7])),
        lin((a / 16, w[1]), (a / 4, w[5])),
        lin((-a / 64, w[0]), (-a, w[4])),
        lin((-a / 2, w[3]), (-a / 32, w[7])),
        lin((-a / 8, w[2]), (-a / 8, w[6])),
    ]
    return CoFrame(cf.chart, xi)


def spin43_reference_form(xi: CoFrame) -> FormField:
    """The 14-term 4-form in the xi coframe whose stabilizer is spin(4,3)."""
    w = lambda *i: form_from_coframe_indices(xi, i)
    return (w(1, 2, 3, 4) - w(1, 2, 5, 6) + w(1, 2, 7, 8) - w(1, 3, 5, 7)
            - w(1, 3, 6, 8) - w(1, 4, 5, 8) + w(1, 4, 6, 7) + w(2, 3, 5, 8)
            - w(2, 3, 6, 7) - w(2, 4, 5, 7) - w(2, 4, 6, 8) + w(3, 4, 5, 6)
            - w(3, 4, 7, 8) + w(5, 6, 7, 8))


# ---------------------------------------------------------------------------
# the Heisenberg example f = x1 x3
# ---------------------------------------------------------------------------

C_PLUS = (9 + sp.sqrt(21)) / 6
C_MINUS = (9 - sp.sqrt(21)) / 6


def heisenberg_parallel_one_forms(spec: Dist6Spec):
    """phi^1, phi^2 = (x1)^{c+-} dt + c+- t / (9 (x1)^{c-+}) theta^4."""
    if sp.simplify(spec.f - x1 * x3) != 0:
        raise ValueError("the Heisenberg example requires f = x1 x3 exactly")
    cf = dist6_coframe(spec)
    th4 = _lift(cf.matrix.row(3))
    ch = ambient_chart()
    out = []
    for cpm, cmp_ in ((C_PLUS, C_MINUS), (C_MINUS, C_PLUS)):
        comps = {(0,): x1**cpm}
        for a in range(8):
            if th4[a] != 0:
                comps[(a,)] = comps.get((a,), 0) + cpm * t / (9 * x1**cmp_) * th4[a]
        out.append(FormField(ch, 1, comps))
    return out


def ricci_flat_scale_residual(c1, c2) -> sp.Matrix:
    """Ric of (c1 (x1)^{c+} - c2 (x1)^{c-})^{-2} g_{x1 x3} with symbolic c1, c2.

    Internally substitutes m = x1^{sqrt(21)/6} (positive) so that all
    components are rational in x1^{1/2} and m; the returned matrix must be
    zero.  The substitution is sound because m is transcendental over the
    rational functions of the coordinates.
    """
    spec = Dist6Spec(x1 * x3, "x1x3")
    m = sp.Symbol("m_aux", positive=True)
    x1h = sp.sqrt(x1)
    sigma = c1 * x1h**3 * m - c2 * x1h**3 / m
    g = dist6_metric(spec)
    gm = (sigma ** -2) * sp.Matrix(g.mat)

    # chart in which m is treated as an independent function of x1:
    # derivatives of m: dm/dx1 = (sqrt(21)/6) m / x1
    dm = sp.sqrt(21) / 6 * m / x1

    def d(e, v):
        out = sp.diff(e, v)
        if v == x1:
            out += sp.diff(e, m) * dm
        return sp.cancel(out)

    n = 6
    coords = list(BASE_COORDS)
    det = sp.cancel(gm.det(method="berkowitz"))
    ginv = gm.adjugate().applyfunc(lambda e: sp.cancel(e / det))
    gamma = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                v = sum(ginv[k, l] * (d(gm[l, j], coords[i])
                                      + d(gm[i, l], coords[j])
                                      - d(gm[i, j], coords[l]))
                        for l in range(n)) / 2
                v = sp.cancel(v)
                if v != 0:
                    gamma[(k, i, j)] = v

    def gam(k, i, j):
        if i > j:
            i, j = j, i
        return gamma.get((k, i, j), sp.Integer(0))

    ric = sp.zeros(n, n)
    for b in range(n):
        for c in range(b, n):
            v = sp.Integer(0)
            for a in range(n):
                v += d(gam(a, b, c), coords[a]) - d(gam(a, a, c), coords[b])
                v += sum(gam(a, a, e) * gam(e, b, c)
                         - gam(a, b, e) * gam(e, a, c) for e in range(n))
            v = sp.cancel(v)
            ric[b, c] = v
            ric[c, b] = v
    return ric
