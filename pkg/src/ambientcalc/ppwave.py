"""Generalized pp-waves and their ambient metrics.

Metric constructor for 2 du^a (delta_ab dv^b + H_ab du^b) + dx^2 in any
signature, the ambient ansatz 2 d(rho t) dt + t^2 (g_H + 2 h du du), the
linear equation 2 rho h'' + (2-n) h' - Delta(H+h) = 0 it is equivalent to,
its series solutions (analytic, rho^{n/2}-branch, and the even-n log branch
with Q = 0), plane-wave ambient metrics, and the parallel-structure
certificates that bound the ambient holonomy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import sympy as sp

from . import reports
from .expr import Expr, is_zero
from .reports import Certificate, from_zero, timer
from .series import (FrobeniusProblem, ObstructionError, SeriesSolution,
                     indicial_roots, solve_truncated)
from .tensorcalc import (Chart, Metric, TensorField, covariant_derivative,
                         covariant_derivative_form, FormField)


@dataclass
class PPWaveSpec:
    """p pairs (u^a, v^a), total dimension n, symmetric p x p matrix H."""

    p: int
    n: int
    H: sp.Matrix

    def __post_init__(self):
        self.H = sp.Matrix(self.H)
        if not (1 <= self.p <= self.n // 2):
            raise ValueError("need 1 <= p <= n/2")
        if self.H.shape != (self.p, self.p):
            raise ValueError("H must be p x p")
        if self.H != self.H.T:
            raise ValueError("H must be symmetric")
        bad = [v for v in self.v_symbols() if any(h.has(v) for h in self.H)]
        if bad:
            raise ValueError(f"H must not depend on {bad}")

    @property
    def nx(self) -> int:
        return self.n - 2 * self.p

    def x_symbols(self):
        return sp.symbols(f"x1:{self.nx + 1}", real=True) if self.nx else ()

    def u_symbols(self):
        return sp.symbols(f"u1:{self.p + 1}", real=True)

    def v_symbols(self):
        return sp.symbols(f"v1:{self.p + 1}", real=True)

    def chart(self) -> Chart:
        coords = self.x_symbols() + self.u_symbols() + self.v_symbols()
        return Chart(coords, base_point={c: 0 for c in coords})

    def ambient_chart(self) -> Chart:
        t = sp.Symbol("t", positive=True)
        rho = sp.Symbol("rho", real=True)
        coords = (t,) + self.x_symbols() + self.u_symbols() + self.v_symbols() + (rho,)
        base = {c: 0 for c in coords}
        base[t] = 1
        base[rho] = 1
        return Chart(coords, constraints=(t > 0,), base_point=base)

    def laplacian(self, e: Expr) -> Expr:
        return sp.expand(sum(sp.diff(e, x, 2) for x in self.x_symbols()))


def ppwave_metric(spec: PPWaveSpec) -> Metric:
    """g_H = 2 du^a (delta_ab dv^b + H_ab du^b) + delta_AB dx^A dx^B."""
    ch = spec.chart()
    n, p, nx = spec.n, spec.p, spec.nx
    g = sp.zeros(n, n)
    for A in range(nx):
        g[A, A] = 1
    for a in range(p):
        iu, iv = nx + a, nx + p + a
        g[iu, iv] += 1
        g[iv, iu] += 1
    for a in range(p):
        for b in range(p):
            g[nx + a, nx + b] += 2 * spec.H[a, b]
    return Metric(ch, g, signature=(spec.n - spec.p, spec.p))


def ppwave_ambient(spec: PPWaveSpec, h: sp.Matrix) -> Metric:
    """2 d(rho t) dt + t^2 (g_H + 2 h_ac du^a du^c) on (t, x, u, v, rho)."""
    h = sp.Matrix(h)
    if h.shape != (spec.p, spec.p) or h != h.T:
        raise ValueError("h must be a symmetric p x p matrix")
    bad = [v for v in spec.v_symbols() if any(e.has(v) for e in h)]
    if bad:
        raise ValueError(f"h must not depend on {bad}")
    ch = spec.ambient_chart()
    t, rho = ch.coords[0], ch.coords[-1]
    N = spec.n + 2
    g = sp.zeros(N, N)
    g[0, 0] = 2 * rho
    g[0, N - 1] = t
    g[N - 1, 0] = t
    base = sp.Matrix(ppwave_metric(spec).mat)
    for a in range(spec.p):
        for b in range(spec.p):
            base[spec.nx + a, spec.nx + b] += 2 * h[a, b]
    for i in range(spec.n):
        for j in range(spec.n):
            g[1 + i, 1 + j] += t**2 * base[i, j]
    return Metric(ch, g, validate=False,
                  signature=(spec.n - spec.p + 1, spec.p + 1))


def fg_residual_pp(spec: PPWaveSpec, h: sp.Matrix) -> sp.Matrix:
    """Componentwise 2 rho h'' + (2-n) h' - Delta(H + h)."""
    h = sp.Matrix(h)
    rho = sp.Symbol("rho", real=True)
    out = sp.zeros(spec.p, spec.p)
    for a in range(spec.p):
        for b in range(spec.p):
            e = (2 * rho * sp.diff(h[a, b], rho, 2)
                 + (2 - spec.n) * sp.diff(h[a, b], rho)
                 - spec.laplacian(spec.H[a, b] + h[a, b]))
            out[a, b] = sp.expand(e)
    return out


def pp_problem(spec: PPWaveSpec, source: Expr = sp.Integer(0)) -> FrobeniusProblem:
    rho = sp.Symbol("rho", real=True)
    return FrobeniusProblem(
        rho, sp.Integer(2), sp.Integer(2 - spec.n),
        spatial=lambda e: -spec.laplacian(e), source=source,
    )


def _prod(vals) -> sp.Rational:
    out = sp.Integer(1)
    for v in vals:
        out *= v
    return out


def series_pp(spec: PPWaveSpec, alpha: sp.Matrix, N: int,
              branch: str = "auto") -> List[List[SeriesSolution]]:
    """Truncated solutions of the linear equation, one series per component.

    Odd n: h = sum_k Delta^k H /(k! prod(2i-n)) rho^k
             + rho^{n/2} (alpha + sum_k Delta^k alpha /(k! prod(2i+n)) rho^k).
    Even n = 2s: branch "analytic" requires Delta^s H = 0 (otherwise
    ObstructionError); branch "auto" falls back to the log branch (Q = 0),
    which adds c_n rho^s sum_k (log rho - q_k) Delta^{s+k} H /
    (k! prod(2i+n)) rho^k.
    """
    alpha = sp.Matrix(alpha)
    if alpha.shape != (spec.p, spec.p):
        raise ValueError("alpha must be p x p")
    n = spec.n
    even = n % 2 == 0
    rho = sp.Symbol("rho", real=True)
    out: List[List[SeriesSolution]] = []
    s = n // 2
    for a in range(spec.p):
        row = []
        for b in range(spec.p):
            sol = SeriesSolution(rho, order=N, branch="analytic")
            H = spec.H[a, b]
            dH = H
            kmax = N if not even else min(N, s - 1)
            for k in range(1, kmax + 1):
                dH = spec.laplacian(dH)
                sol.add(k, dH / (sp.factorial(k) * _prod(2 * i - n
                                                         for i in range(1, k + 1))))
            # rho^{n/2} branch driven by alpha
            al = alpha[a, b]
            if al != 0:
                sol.add(sp.Rational(n, 2), al)
                dA = al
                for k in range(1, N + 1):
                    dA = spec.laplacian(dA)
                    sol.add(sp.Rational(n, 2) + k,
                            dA / (sp.factorial(k) * _prod(2 * i + n
                                                          for i in range(1, k + 1))))
                sol.branch = "analytic+second" if even else "non-smooth"
            if even:
                obstruction = spec.laplacian(H)
                for _ in range(s - 1):
                    obstruction = spec.laplacian(obstruction)
                if sp.expand(obstruction) != 0:
                    if branch == "analytic":
                        raise ObstructionError(s, obstruction)
                    # log branch, Q = 0
                    c_n = -1 / (sp.factorial(s - 1)
                                * _prod(2 * i - n for i in range(0, s)))
                    q = sp.Integer(0)
                    dH = obstruction
                    for k in range(0, N + 1):
                        if k > 0:
                            q += sp.Rational(n + 4 * k, k * (n + 2 * k))
                            dH = spec.laplacian(dH)
                        denom = sp.factorial(k) * _prod(2 * i + n
                                                        for i in range(1, k + 1))
                        sol.add(s + k, c_n * dH / denom, log_power=1)
                        sol.add(s + k, -c_n * q * dH / denom)
                    sol.branch = "log"
            row.append(sol)
        out.append(row)
    return out


def series_pp_matrix(sols: List[List[SeriesSolution]]) -> sp.Matrix:
    p = len(sols)
    return sp.Matrix(p, p, lambda a, b: sols[a][b].as_expr())


def analytic_ambient(spec: PPWaveSpec, N: int) -> Metric:
    """Unique analytic ambient truncation (alpha = 0) of order N."""
    sols = series_pp(spec, sp.zeros(spec.p, spec.p), N)
    return ppwave_ambient(spec, series_pp_matrix(sols))


# ---------------------------------------------------------------------------
# plane waves (Prop. on Cahen-Wallach-type reductions)
# ---------------------------------------------------------------------------


def plane_wave_metric(S: sp.Matrix, n: int) -> Tuple[Metric, PPWaveSpec]:
    """Lorentzian plane wave 2 du dv + 2 (S_AB(u) x^A x^B) du^2 + dx^2."""
    S = sp.Matrix(S)
    nx = n - 2
    if S.shape != (nx, nx) or S != S.T:
        raise ValueError("S must be a symmetric (n-2) x (n-2) matrix")
    xs = sp.symbols(f"x1:{nx + 1}", real=True)
    H = sum(S[A, B] * xs[A] * xs[B] for A in range(nx) for B in range(nx))
    spec = PPWaveSpec(1, n, sp.Matrix([[H]]))
    return ppwave_metric(spec), spec


def plane_wave_ambient(S: sp.Matrix, n: int, f: Expr, h: Expr):
    """Ambient metric 2 d(t rho) dt + t^2 e^{2f(u)} g for a plane wave.

    Preconditions checked exactly: f'' = (f')^2 - 2 tr(S)/(n-2) and
    h' = e^{2f}.  Returns (metric, certificates); the two parallel null
    vector fields (1/t) d_rho and (1/t)(d_v + h d_rho) are certified
    componentwise, giving the holonomy bound R^2 (x) R^{n-2}.
    """
    certs: List[Certificate] = []
    S = sp.Matrix(S)
    u = sp.Symbol("u1", real=True)
    trS = sp.trace(S)
    ode = sp.diff(f, u, 2) - sp.diff(f, u) ** 2 + sp.Rational(2, n - 2) * trS
    c = is_zero(ode)
    certs.append(from_zero("conformal factor solves f'' = (f')^2 - 2 tr S/(n-2)", c))
    if not c:
        raise ValueError(f"f does not solve the defining ODE: residual {ode}")
    ch = is_zero(sp.diff(h, u) - sp.exp(2 * f))
    certs.append(from_zero("h' = e^{2f}", ch))
    if not ch:
        raise ValueError("h does not solve h' = e^{2f}")

    g, spec = plane_wave_metric(S, n)
    chart = spec.ambient_chart()
    t, rho = chart.coords[0], chart.coords[-1]
    N = n + 2
    gm = sp.zeros(N, N)
    gm[0, 0] = 2 * rho
    gm[0, N - 1] = t
    gm[N - 1, 0] = t
    for i in range(n):
        for j in range(n):
            gm[1 + i, 1 + j] = t**2 * sp.exp(2 * f) * g.mat[i, j]
    amb = Metric(chart, gm, validate=False, signature=(n, 2))

    ric = amb.ricci()
    cric = TensorField(chart, ("d", "d"),
                       {(i, j): ric[i, j] for i in range(N) for j in range(N)
                        if ric[i, j] != 0}).is_zero_field()
    certs.append(from_zero("Ric(ambient) = 0", cric))

    iv = 1 + n - 1  # v column (x..., u, v ordering with p = 1)
    fields = {
        "(1/t) d_rho": {N - 1: 1 / t},
        "(1/t)(d_v + h d_rho)": {iv: 1 / t, N - 1: h / t},
    }
    for name, comp in fields.items():
        vec = TensorField(chart, ("u",), {(k,): v for k, v in comp.items()})
        dv = covariant_derivative(vec, amb)
        certs.append(from_zero(f"{name} parallel", dv.is_zero_field()))
    certs.append(Certificate(
        "holonomy bound", reports.EXACT_PASS, "exact",
        witness=f"two parallel null fields: hol included in R^2 x R^{n - 2} "
                f"(dim {2 * (n - 2)})"))
    return amb, certs


# ---------------------------------------------------------------------------
# holonomy certificates for g~_F (Theorem on the pp-wave ambient bound)
# ---------------------------------------------------------------------------


def ppwave_F_metric(nbase: int, F: Expr) -> Metric:
    """g~_F = 2 d(t rho) dt + t^2 (2 du (dv + F du) + dx^2), p = 1.

    F may depend on (rho, u, x^A); n is the base dimension.
    """
    spec = PPWaveSpec(1, nbase, sp.Matrix([[sp.Integer(0)]]))
    ch = spec.ambient_chart()
    t, rho = ch.coords[0], ch.coords[-1]
    N = nbase + 2
    g = sp.zeros(N, N)
    g[0, 0] = 2 * rho
    g[0, N - 1] = t
    g[N - 1, 0] = t
    nx = nbase - 2
    iu, iv = 1 + nx, 1 + nx + 1
    for A in range(nx):
        g[1 + A, 1 + A] = t**2
    g[iu, iv] = t**2
    g[iv, iu] = t**2
    g[iu, iu] = 2 * t**2 * F
    return Metric(ch, g, validate=False, signature=(nbase, 2))


def pp_holonomy_certificates(nbase: int, F: Expr):
    """Executable form of the pp-wave ambient holonomy theorem (p = 1).

    Verifies the three connection identities, the parallel 2-plane
    span(d_v, d_rho), the curvature annihilation R(U, V) Y = 0 for
    U, V orthogonal to d_v, the parallel 2-form mu = t dt ^ du, and emits
    the holonomy upper bound (sl2 x (R^2 (x) R^{n-2})) + R.
    """
    certs: List[Certificate] = []
    amb = ppwave_F_metric(nbase, F)
    ch = amb.chart
    N = amb.dim
    t, rho = ch.coords[0], ch.coords[-1]
    nx = nbase - 2
    i_t, i_u, i_v, i_r = 0, 1 + nx, 2 + nx, N - 1

    def gam_matrix(vec_index):
        return sp.Matrix(N, N, lambda a, m: amb.gamma(a, m, vec_index))

    # nabla d_v = (1/t) d_v (x) dt - d_rho (x) du
    expect_v = sp.zeros(N, N)
    expect_v[i_v, i_t] = 1 / t
    expect_v[i_r, i_u] = -1
    certs.append(from_zero(
        "nabla d_v = (1/t) d_v dt - d_rho du",
        TensorField(ch, ("u", "d"), _mat_comps(gam_matrix(i_v) - expect_v))
        .is_zero_field()))
    # nabla d_rho = (1/t) d_rho (x) dt + F_rho d_v (x) du
    expect_r = sp.zeros(N, N)
    expect_r[i_r, i_t] = 1 / t
    expect_r[i_v, i_u] = sp.diff(F, rho)
    certs.append(from_zero(
        "nabla d_rho = (1/t) d_rho dt + F_rho d_v du",
        TensorField(ch, ("u", "d"), _mat_comps(gam_matrix(i_r) - expect_r))
        .is_zero_field()))
    # nabla d_A = (1/t) d_A (x) dt + F_A d_v (x) du - d_rho (x) dx^A
    for A in range(nx):
        iA = 1 + A
        expect = sp.zeros(N, N)
        expect[iA, i_t] = 1 / t
        expect[i_v, i_u] = sp.diff(F, ch.coords[iA])
        expect[i_r, iA] = -1
        certs.append(from_zero(
            f"nabla d_x{A + 1} identity",
            TensorField(ch, ("u", "d"), _mat_comps(gam_matrix(iA) - expect))
            .is_zero_field()))

    # parallel plane: columns of nabla(d_v), nabla(d_rho) stay in span(v, rho)
    span_ok = True
    for vec in (i_v, i_r):
        gm = gam_matrix(vec)
        for a in range(N):
            if a in (i_v, i_r):
                continue
            for m in range(N):
                if sp.cancel(gm[a, m]) != 0:
                    span_ok = False
    certs.append(Certificate(
        "plane span(d_v, d_rho) is parallel",
        reports.EXACT_PASS if span_ok else reports.FAIL, "exact"))

    # curvature annihilation: R(U, V) = 0 for U, V in v-orthogonal complement
    perp = [i_v, i_r, i_t] + [1 + A for A in range(nx)]
    ann_ok = True
    witness = ""
    for a, b in itertools.combinations(perp, 2):
        for c in range(N):
            for d in range(N):
                v = amb.riemann_component(d, c, a, b)
                if v != 0 and sp.simplify(v) != 0:
                    ann_ok = False
                    witness = f"R^{d}_{c}{a}{b} = {v}"
    certs.append(Certificate(
        "R(U,V) = 0 for U,V orthogonal to d_v",
        reports.EXACT_PASS if ann_ok else reports.FAIL, "exact", witness=witness))

    # parallel 2-form mu = t dt ^ du
    mu = FormField(ch, 2, {(min(i_t, i_u), max(i_t, i_u)): t})
    certs.append(from_zero("mu = t dt^du parallel",
                           covariant_derivative_form(mu, amb).is_zero_field()))

    bound_dim = 3 + 2 * nx + 1
    certs.append(Certificate(
        "holonomy bound", reports.EXACT_PASS, "exact",
        witness=f"hol included in (sl2 x (R^2 (x) R^{nx})) + R, dim {bound_dim}"))
    return amb, certs


def _mat_comps(m: sp.Matrix):
    return {(i, j): m[i, j] for i in range(m.shape[0]) for j in range(m.shape[1])
            if m[i, j] != 0}
