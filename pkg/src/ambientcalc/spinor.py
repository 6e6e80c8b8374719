"""Real Clifford algebra Cl(4,3) and the parallel spinor of the ambient metrics.

The eight-dimensional real spinor representation is generated by seven
integer sigma-matrices satisfying s_i s_j + s_j s_i = 2 eta_ij I_8 with
eta = diag(1,1,1,1,-1,-1,-1) in the orthonormal xi-coframe built from the
null coframe.  The spin connection is

    nabla psi = d psi + (1/4) Gamma^{kl} s_k s_l psi,
    Gamma^{kl}(X) = g(nabla_X xi^k, xi^l).
"""

from __future__ import annotations

from typing import List, Sequence

import sympy as sp

from .tensorcalc import (Chart, CoFrame, Metric, TensorField,
                         covariant_derivative)

ETA = sp.diag(1, 1, 1, 1, -1, -1, -1)

_I2 = sp.eye(2)
_I4 = sp.eye(4)

GAMMA1 = sp.Matrix([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])
GAMMA2 = sp.Matrix([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]])
GAMMA3 = sp.Matrix([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
GAMMA4 = sp.Matrix(sp.BlockMatrix([[sp.zeros(2), -_I2], [_I2, sp.zeros(2)]]))
GAMMA5 = sp.Matrix(sp.BlockMatrix([[_I2, sp.zeros(2)], [sp.zeros(2), -_I2]]))


def _off(g):
    return sp.Matrix(sp.BlockMatrix([[sp.zeros(4), g], [g, sp.zeros(4)]]))


def sigma_matrices() -> List[sp.Matrix]:
    """The seven 8x8 generators of Cl(4,3) (entries in {-1, 0, 1})."""
    return [
        _off(GAMMA1),
        _off(GAMMA3),
        _off(GAMMA5),
        sp.Matrix(sp.BlockMatrix([[_I4, sp.zeros(4)], [sp.zeros(4), -_I4]])),
        _off(GAMMA2),
        _off(GAMMA4),
        sp.Matrix(sp.BlockMatrix([[sp.zeros(4), -_I4], [_I4, sp.zeros(4)]])),
    ]


def clifford_relation_table(sigmas: Sequence[sp.Matrix] | None = None):
    """All 49 anticommutators minus 2 eta_ij I_8; zero matrices when correct."""
    if sigmas is None:
        sigmas = sigma_matrices()
    out = {}
    for i in range(7):
        for j in range(7):
            out[(i, j)] = (sigmas[i] * sigmas[j] + sigmas[j] * sigmas[i]
                           - 2 * ETA[i, j] * sp.eye(8))
    return out


PSI = sp.Matrix([0, 1, -1, 0, 1, 0, 0, -1])


def xi_coframe(omega: CoFrame) -> CoFrame:
    """Orthonormal coframe from the dist5 null coframe omega^1..omega^7."""
    w = [list(omega.matrix.row(i)) for i in range(7)]
    s2h = sp.sqrt(2) / 2

    def lin(*pairs):
        out = [sp.Integer(0)] * 7
        for c, vec in pairs:
            for i, v in enumerate(vec):
                out[i] += c * v
        return [sp.expand(e) for e in out]

    xi = [
        lin((1, w[0]), (sp.Rational(1, 2), w[6])),
        lin((s2h, w[1]), (s2h, w[5])),
        lin((s2h, w[2]), (s2h, w[4])),
        w[3],
        lin((s2h, w[2]), (-s2h, w[4])),
        lin((s2h, w[1]), (-s2h, w[5])),
        lin((1, w[0]), (-sp.Rational(1, 2), w[6])),
    ]
    return CoFrame(omega.chart, xi)


def orthonormality_delta(g: Metric, xi: CoFrame) -> sp.Matrix:
    """sum eta_kk (xi^k)^2 minus g; zero iff xi is orthonormal for g."""
    m = xi.matrix.T * ETA * xi.matrix
    return (m - sp.Matrix(g.mat)).applyfunc(sp.cancel)


def spin_connection_forms(g: Metric, xi: CoFrame) -> list:
    """Gamma^{kl}_m = g(nabla_{d_m} xi^k, xi^l), a 7x7 antisymmetric matrix
    of coordinate 1-forms (indexed [k][l][m])."""
    delta = orthonormality_delta(g, xi)
    if any(sp.simplify(e) != 0 for e in delta):
        raise ValueError("xi coframe is not orthonormal for g")
    n = g.dim
    ginv = g.inverse()
    forms = [[None] * 7 for _ in range(7)]
    dxi = []
    for k in range(7):
        row = xi.matrix.row(k)
        T = TensorField(g.chart, ("d",),
                        {(a,): row[a] for a in range(n) if row[a] != 0})
        dxi.append(covariant_derivative(T, g))
    for k in range(7):
        for l in range(7):
            comp = []
            for m in range(n):
                v = sum(
                    ginv[a, b] * dxi[k].get((a, m)) * xi.matrix[l, b]
                    for a in range(n) for b in range(n)
                )
                comp.append(sp.cancel(v))
            forms[k][l] = comp
    return forms


def spin_connection_residual(g: Metric, xi: CoFrame,
                             psi: sp.Matrix | None = None) -> List[sp.Matrix]:
    """The 8 components of nabla psi per coordinate direction.

    Returns a list over coordinate directions m of 8-vectors
    (d psi + 1/4 Gamma^{kl} s_k s_l psi)(d_m); all zero iff psi is parallel.
    """
    if psi is None:
        psi = PSI
    psi = sp.Matrix(psi)
    sig = sigma_matrices()
    gammas = spin_connection_forms(g, xi)
    n = g.dim
    x = g.chart.coords
    out = []
    for m in range(n):
        vec = sp.Matrix([sp.diff(c, x[m]) for c in psi])
        for k in range(7):
            for l in range(7):
                c = gammas[k][l][m]
                if c != 0:
                    vec += sp.Rational(1, 4) * c * (sig[k] * sig[l] * psi)
        out.append(vec.applyfunc(sp.cancel))
    return out


def spin_action(E: sp.Matrix, sigmas: Sequence[sp.Matrix] | None = None) -> sp.Matrix:
    """Spinor action of E in so(eta) (frame components, mixed index E^k_l).

    lambda(E) = 1/4 sum_{k,l} E_{kl} s^k s^l with indices moved by eta;
    satisfies [lambda(E), c(v)] = c(E v) for Clifford multiplication c.
    """
    if sigmas is None:
        sigmas = sigma_matrices()
    lowered = ETA * sp.Matrix(E)  # E_{kl} = eta_{km} E^m_l
    out = sp.zeros(8, 8)
    for k in range(7):
        for l in range(7):
            if lowered[k, l] != 0:
                sk = ETA[k, k] * sigmas[k]  # s^k = eta^{kk} s_k
                sl = ETA[l, l] * sigmas[l]
                out += sp.Rational(1, 4) * lowered[k, l] * sk * sl
    return out
