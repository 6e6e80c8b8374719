"""Coordinate tensor calculus over exact symbolic scalars.

Metric -> Levi-Civita connection -> Riemann / Ricci / scalar curvature ->
Schouten / Weyl / Cotton / Bach -> dimension-6 obstruction tensor, plus
covariant derivatives of arbitrary tensors, exterior algebra and Hodge star.

Conventions (pinned by tests against the generalized pp-wave identities):

* ``R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`` and
  ``R(e_a, e_b) e_c = riem[d,c,a,b] e_d``;
* ``Ric(Y,Z) = trace(X -> R(X,Y)Z)``, which gives ``Ric = -Delta(H) du^2``
  on pp-waves;
* lowered curvature ``Rm[a,b,c,d] = g(R(e_a,e_b) e_c, e_d)``;
* the derivative slot added by ``covariant_derivative`` is the last lower
  index: ``(nabla T)[..., m] = nabla_m T[...]``;
* orientation is the chart's coordinate order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

import sympy as sp

from .expr import Expr, ZeroCertificate, ZeroResult, is_zero, normalize


def _cancel(e):
    return sp.cancel(sp.expand(e))


@dataclass(frozen=True)
class Chart:
    """Ordered coordinates with domain constraints and a base point."""

    coords: Tuple[sp.Symbol, ...]
    constraints: Tuple = ()
    base_point: Mapping[sp.Symbol, sp.Expr] = field(default_factory=dict)

    def __post_init__(self):
        names = [str(c) for c in self.coords]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, coord) -> int:
        return self.coords.index(coord)

    def base_subs(self):
        return dict(self.base_point)


def signature_of(matrix: sp.Matrix) -> Tuple[int, int]:
    """(p, q) = (positive, negative) inertia of an exact symmetric matrix.

    Symmetric elimination with 1x1 pivots and hyperbolic 2x2 blocks, exact
    over sympy numbers.
    """
    m = sp.Matrix(matrix)
    n = m.shape[0]
    pos = neg = 0
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if sp.simplify(m[i, i]) != 0), None)
        if piv is not None:
            d = m[piv, piv]
            if d.is_positive or (d.is_number and d > 0):
                pos += 1
            else:
                neg += 1
            rest = [j for j in idx if j != piv]
            for a in rest:
                for b in rest:
                    m[a, b] = sp.nsimplify(sp.radsimp(m[a, b] - m[a, piv] * m[piv, b] / d))
            idx = rest
            continue
        pair = next(
            ((i, j) for i in idx for j in idx if i < j and sp.simplify(m[i, j]) != 0),
            None,
        )
        if pair is None:
            raise ValueError("degenerate matrix in signature computation")
        i, j = pair
        # block [[0, b], [b, 0]] contributes one +1 and one -1
        pos += 1
        neg += 1
        b = m[i, j]
        rest = [x for x in idx if x not in (i, j)]
        for a in rest:
            for c in rest:
                m[a, c] = sp.nsimplify(
                    sp.radsimp(m[a, c] - (m[a, i] * m[j, c] + m[a, j] * m[i, c]) / b)
                )
        idx = rest
    return pos, neg


class Metric:
    """Semi-Riemannian metric on a chart, with cached curvature pipeline."""

    def __init__(self, chart: Chart, matrix, signature: Tuple[int, int] | None = None,
                 validate: bool = True):
        self.chart = chart
        self.mat = sp.ImmutableMatrix(sp.Matrix(matrix).applyfunc(_cancel))
        n = chart.dim
        if self.mat.shape != (n, n):
            raise ValueError("metric shape does not match chart dimension")
        if validate:
            for i in range(n):
                for j in range(i + 1, n):
                    if _cancel(self.mat[i, j] - self.mat[j, i]) != 0:
                        raise ValueError(f"metric not symmetric at ({i},{j})")
        base = self.at_base()
        if validate:
            if base.det() == 0:
                raise ValueError("metric degenerate at base point")
            sig = signature_of(base)
            if signature is not None and tuple(signature) != sig:
                raise ValueError(f"declared signature {signature} != computed {sig}")
            self.signature = sig
        else:
            self.signature = tuple(signature) if signature else None
        self._cache: Dict[str, object] = {}

    @property
    def dim(self) -> int:
        return self.chart.dim

    def at_base(self) -> sp.Matrix:
        return sp.Matrix(self.mat).subs(self.chart.base_subs())

    def _blocks(self):
        """Connected components of the nonzero off-diagonal pattern."""
        n = self.dim
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(n):
            for j in range(i + 1, n):
                if self.mat[i, j] != 0:
                    parent[find(i)] = find(j)
        groups: Dict[int, list] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def inverse(self) -> sp.ImmutableMatrix:
        """Exact symbolic inverse, computed blockwise via adjugate/det.

        Ambient metrics split into a (t, rho) corner block plus the base
        block, which keeps the adjugates small.
        """
        if "inv" not in self._cache:
            n = self.dim
            inv = sp.zeros(n, n)
            det = sp.Integer(1)
            for block in self._blocks():
                sub = self.mat[block, block]
                d = _cancel(sub.det(method="berkowitz"))
                if d == 0:
                    raise ValueError("metric determinant identically zero")
                adj = sub.adjugate()
                for a, i in enumerate(block):
                    for b, j in enumerate(block):
                        inv[i, j] = _cancel(adj[a, b] / d)
                det *= d
            self._cache["det"] = _cancel(det)
            self._cache["inv"] = sp.ImmutableMatrix(inv)
        return self._cache["inv"]

    def det(self) -> Expr:
        self.inverse()
        return self._cache["det"]

    def christoffel(self) -> Dict[Tuple[int, int, int], Expr]:
        """Gamma^k_ij (k, i<=j), cancelled."""
        if "gamma" not in self._cache:
            n = self.dim
            x = self.chart.coords
            g, ginv = self.mat, self.inverse()
            dg = [[[sp.diff(g[i, j], x[m]) for m in range(n)] for j in range(n)]
                  for i in range(n)]
            gamma = {}
            for k in range(n):
                for i in range(n):
                    for j in range(i, n):
                        s = sum(
                            ginv[k, l] * (dg[l][j][i] + dg[i][l][j] - dg[i][j][l])
                            for l in range(n)
                        )
                        v = _cancel(s / 2)
                        if v != 0:
                            gamma[(k, i, j)] = v
            self._cache["gamma"] = gamma
        return self._cache["gamma"]

    def gamma(self, k: int, i: int, j: int) -> Expr:
        if i > j:
            i, j = j, i
        return self.christoffel().get((k, i, j), sp.Integer(0))

    def riemann(self) -> Dict[Tuple[int, int, int, int], Expr]:
        """riem[(d, c, a, b)] with a < b; R(e_a,e_b)e_c = riem[d,c,a,b] e_d."""
        if "riem" not in self._cache:
            n = self.dim
            x = self.chart.coords
            riem = {}
            for a in range(n):
                for b in range(a + 1, n):
                    for c in range(n):
                        for d in range(n):
                            v = sp.diff(self.gamma(d, b, c), x[a]) - sp.diff(
                                self.gamma(d, a, c), x[b]
                            )
                            v += sum(
                                self.gamma(d, a, e) * self.gamma(e, b, c)
                                - self.gamma(d, b, e) * self.gamma(e, a, c)
                                for e in range(n)
                            )
                            v = _cancel(v)
                            if v != 0:
                                riem[(d, c, a, b)] = v
            self._cache["riem"] = riem
        return self._cache["riem"]

    def riemann_component(self, d, c, a, b) -> Expr:
        if a == b:
            return sp.Integer(0)
        if a > b:
            return -self.riemann().get((d, c, b, a), sp.Integer(0))
        return self.riemann().get((d, c, a, b), sp.Integer(0))

    def riemann_lowered(self) -> Dict[Tuple[int, int, int, int], Expr]:
        """Rm[(a, b, c, d)] = g(R(e_a,e_b)e_c, e_d), stored for a<b, all c,d."""
        if "rm" not in self._cache:
            n = self.dim
            rm = {}
            for (e, c, a, b), v in self.riemann().items():
                for d in range(n):
                    if self.mat[d, e] == 0:
                        continue
                    key = (a, b, c, d)
                    rm[key] = rm.get(key, sp.Integer(0)) + self.mat[d, e] * v
            self._cache["rm"] = {k: _cancel(v) for k, v in rm.items() if _cancel(v) != 0}
        return self._cache["rm"]

    def rm_component(self, a, b, c, d) -> Expr:
        if a == b or c == d:
            return sp.Integer(0)
        sign = 1
        if a > b:
            a, b, sign = b, a, -sign
        return sign * self.riemann_lowered().get((a, b, c, d), sp.Integer(0))

    def ricci(self) -> sp.ImmutableMatrix:
        """Ric[b,c] = riem[a,c,a,b] (trace of X -> R(X, e_b) e_c)."""
        if "ric" not in self._cache:
            n = self.dim
            ric = sp.zeros(n, n)
            for b in range(n):
                for c in range(b, n):
                    v = _cancel(
                        sum(self.riemann_component(a, c, a, b) for a in range(n))
                    )
                    ric[b, c] = v
                    ric[c, b] = v
            self._cache["ric"] = sp.ImmutableMatrix(ric)
        return self._cache["ric"]

    def scalar_curvature(self) -> Expr:
        if "scal" not in self._cache:
            n = self.dim
            ginv, ric = self.inverse(), self.ricci()
            self._cache["scal"] = _cancel(
                sum(ginv[i, j] * ric[i, j] for i in range(n) for j in range(n))
            )
        return self._cache["scal"]

    def schouten(self) -> sp.ImmutableMatrix:
        """P = (Ric - Scal/(2(n-1)) g) / (n-2), n >= 3."""
        n = self.dim
        if n < 3:
            raise ValueError("Schouten tensor needs dimension >= 3")
        if "schouten" not in self._cache:
            ric, scal = self.ricci(), self.scalar_curvature()
            P = (ric - scal / (2 * (n - 1)) * self.mat) / (n - 2)
            self._cache["schouten"] = sp.ImmutableMatrix(P.applyfunc(_cancel))
        return self._cache["schouten"]

    def weyl(self) -> Dict[Tuple[int, int, int, int], Expr]:
        """Totally trace-free part of Rm, stored for a<b (all c,d)."""
        n = self.dim
        if n < 4:
            raise ValueError("Weyl tensor needs dimension >= 4")
        if "weyl" not in self._cache:
            P, g = self.schouten(), self.mat
            out = {}
            for a in range(n):
                for b in range(a + 1, n):
                    for c in range(n):
                        for d in range(n):
                            kn = (
                                P[a, c] * g[b, d] + P[b, d] * g[a, c]
                                - P[a, d] * g[b, c] - P[b, c] * g[a, d]
                            )
                            v = _cancel(self.rm_component(a, b, c, d) + kn)
                            if v != 0:
                                out[(a, b, c, d)] = v
            self._cache["weyl"] = out
        return self._cache["weyl"]

    def weyl_component(self, a, b, c, d) -> Expr:
        if a == b:
            return sp.Integer(0)
        sign = 1
        if a > b:
            a, b, sign = b, a, -sign
        return sign * self.weyl().get((a, b, c, d), sp.Integer(0))

    def cotton(self) -> Dict[Tuple[int, int, int], Expr]:
        """C[i,j,k] = nabla_k P_ij - nabla_j P_ik."""
        if "cotton" not in self._cache:
            P = tensor_from_matrix(self, self.schouten())
            dP = covariant_derivative(P, self)
            n = self.dim
            out = {}
            for i in range(n):
                for j in range(n):
                    for k in range(j + 1, n):
                        v = _cancel(dP.get((i, j, k)) - dP.get((i, k, j)))
                        if v != 0:
                            out[(i, j, k)] = v
            self._cache["cotton"] = out
            self._cache["dP"] = dP
        return self._cache["cotton"]

    def cotton_component(self, i, j, k) -> Expr:
        if j == k:
            return sp.Integer(0)
        sign = 1
        if j > k:
            j, k, sign = k, j, -sign
        return sign * self.cotton().get((i, j, k), sp.Integer(0))

    def bach(self) -> sp.ImmutableMatrix:
        """B_ij = nabla^k C_ijk - P^kl W_kijl, n >= 4."""
        if "bach" not in self._cache:
            n = self.dim
            ginv = self.inverse()
            C = TensorField(
                self.chart, ("d", "d", "d"),
                {k: v for k, v in _expand_cotton(self).items()},
            )
            dC = covariant_derivative(C, self)
            Pup = raise_all(tensor_from_matrix(self, self.schouten()), self)
            B = sp.zeros(n, n)
            for i in range(n):
                for j in range(i, n):
                    divC = sum(
                        ginv[k, l] * dC.get((i, j, k, l))
                        for k in range(n) for l in range(n)
                    )
                    PW = sum(
                        Pup.get((k, l)) * self.weyl_component(k, i, j, l)
                        for k in range(n) for l in range(n)
                    )
                    v = _cancel(divC - PW)
                    B[i, j] = v
                    B[j, i] = v
            self._cache["bach"] = sp.ImmutableMatrix(B)
        return self._cache["bach"]


def _expand_cotton(g: Metric) -> Dict[Tuple[int, int, int], Expr]:
    n = g.dim
    g.cotton()
    return {
        (i, j, k): g.cotton_component(i, j, k)
        for i in range(n) for j in range(n) for k in range(n)
        if g.cotton_component(i, j, k) != 0
    }


@dataclass
class TensorField:
    """Dense-in-spirit, sparse-in-storage tensor with explicit slot kinds.

    ``kinds`` is a tuple of 'u' (contravariant) / 'd' (covariant) per slot;
    ``comps`` maps index tuples to nonzero components.
    """

    chart: Chart
    kinds: Tuple[str, ...]
    comps: Dict[Tuple[int, ...], Expr]
    symmetric: bool = False
    antisymmetric: bool = False

    def get(self, idx: Tuple[int, ...]) -> Expr:
        return self.comps.get(tuple(idx), sp.Integer(0))

    def set(self, idx, value):
        value = _cancel(value)
        if value == 0:
            self.comps.pop(tuple(idx), None)
        else:
            self.comps[tuple(idx)] = value

    @property
    def rank(self) -> int:
        return len(self.kinds)

    def map(self, fn) -> "TensorField":
        out = {}
        for k, v in self.comps.items():
            w = fn(v)
            if w != 0:
                out[k] = w
        return TensorField(self.chart, self.kinds, out, self.symmetric,
                           self.antisymmetric)

    def is_zero_field(self, constraints=()) -> ZeroCertificate:
        worst = ZeroCertificate(ZeroResult.ZERO, True, "all components")
        for k, v in sorted(self.comps.items()):
            c = is_zero(v, constraints)
            if c.result is ZeroResult.NONZERO:
                return ZeroCertificate(ZeroResult.NONZERO, c.exact,
                                       f"component {k}: {c.detail}")
            if c.result is ZeroResult.UNKNOWN:
                worst = ZeroCertificate(ZeroResult.UNKNOWN, False, f"component {k}")
            elif not c.exact and worst.exact:
                worst = ZeroCertificate(ZeroResult.ZERO, False, f"component {k} sampled")
        return worst


def tensor_from_matrix(g: Metric, m: sp.Matrix, kinds=("d", "d")) -> TensorField:
    comps = {}
    n = g.dim
    for i in range(n):
        for j in range(n):
            if m[i, j] != 0:
                comps[(i, j)] = m[i, j]
    return TensorField(g.chart, tuple(kinds), comps, symmetric=True)


def covariant_derivative(T: TensorField, g: Metric) -> TensorField:
    """Levi-Civita covariant derivative; derivative slot appended last.

    For each original slot the usual Gamma correction is applied:
    ``+Gamma^i_{m e} T^{..e..}`` for an upper slot holding index i,
    ``-Gamma^e_{m i} T^{..e..}`` for a lower one.
    """
    if T.chart is not g.chart and T.chart.coords != g.chart.coords:
        raise ValueError("tensor and metric charts differ")
    n = g.dim
    x = g.chart.coords
    gamma = g.christoffel()

    def gam(k, i, j):
        if i > j:
            i, j = j, i
        return gamma.get((k, i, j), sp.Integer(0))

    out: Dict[Tuple[int, ...], Expr] = {}

    def add(idx, val):
        if val == 0:
            return
        out[idx] = out.get(idx, sp.Integer(0)) + val

    for idx, v in T.comps.items():
        for m in range(n):
            add(idx + (m,), sp.diff(v, x[m]))
        for s, kind in enumerate(T.kinds):
            i_s = idx[s]
            for m in range(n):
                for new in range(n):
                    c = gam(new, m, i_s) if kind == "u" else -gam(i_s, m, new)
                    if c == 0:
                        continue
                    add(idx[:s] + (new,) + idx[s + 1:] + (m,), c * v)
    comps = {}
    for k, v in out.items():
        v = _cancel(v)
        if v != 0:
            comps[k] = v
    return TensorField(g.chart, T.kinds + ("d",), comps)


def raise_all(T: TensorField, g: Metric) -> TensorField:
    """Raise every 'd' slot with the inverse metric."""
    ginv = g.inverse()
    n = g.dim
    comps = T.comps
    kinds = list(T.kinds)
    for s, kind in enumerate(kinds):
        if kind != "d":
            continue
        new: Dict[Tuple[int, ...], Expr] = {}
        for idx, v in comps.items():
            for a in range(n):
                c = ginv[a, idx[s]]
                if c == 0:
                    continue
                tgt = idx[:s] + (a,) + idx[s + 1:]
                new[tgt] = new.get(tgt, sp.Integer(0)) + c * v
        comps = {k: _cancel(v) for k, v in new.items() if _cancel(v) != 0}
        kinds[s] = "u"
    return TensorField(T.chart, tuple(kinds), comps)


def obstruction6(g: Metric, return_terms: bool = False):
    """Fefferman-Graham obstruction tensor in dimension 6: eight summands.

    Returns the symmetric matrix O; with ``return_terms`` also the list of
    the eight summand matrices in the order they appear in the defining
    formula.
    """
    n = g.dim
    if n != 6:
        raise ValueError("obstruction tensor implemented for dimension 6 only")
    ginv = g.inverse()
    P = g.schouten()
    trP = _cancel(sum(ginv[k, l] * P[k, l] for k in range(n) for l in range(n)))
    Bm = g.bach()
    B = tensor_from_matrix(g, Bm)
    Bup = raise_all(B, g)
    Pt = tensor_from_matrix(g, P)
    Pup = raise_all(Pt, g)
    Pmix = TensorField(g.chart, ("u", "d"), {})  # P^k_m
    for k in range(n):
        for m in range(n):
            v = _cancel(sum(ginv[k, a] * P[a, m] for a in range(n)))
            if v != 0:
                Pmix.comps[(k, m)] = v
    C = TensorField(g.chart, ("d", "d", "d"), _expand_cotton(g))
    dB = covariant_derivative(B, g)
    ddB = covariant_derivative(dB, g)
    dC = covariant_derivative(C, g)

    x = g.chart.coords
    terms = [sp.zeros(n, n) for _ in range(8)]
    for i in range(n):
        for j in range(i, n):
            # 1: Laplacian of Bach
            t1 = sum(ginv[k, l] * ddB.get((i, j, k, l))
                     for k in range(n) for l in range(n))
            # 2: -2 W_kijl B^kl
            t2 = -2 * sum(g.weyl_component(k, i, j, l) * Bup.get((k, l))
                          for k in range(n) for l in range(n))
            # 3: -4 (P^k_k) B_ij
            t3 = -4 * trP * Bm[i, j]
            # 4: 8 P^kl nabla_l C_(ij)k
            t4 = 8 * sum(
                Pup.get((k, l))
                * sp.Rational(1, 2) * (dC.get((i, j, k, l)) + dC.get((j, i, k, l)))
                for k in range(n) for l in range(n)
            )
            # 5: -4 C^k_i^l C_ljk
            t5 = -4 * sum(
                ginv[k, a] * ginv[l, b] * C.get((a, i, b)) * C.get((l, j, k))
                for k in range(n) for l in range(n)
                for a in range(n) for b in range(n)
                if C.get((l, j, k)) != 0
            )
            # 6: 2 C_i^kl C_jkl
            t6 = 2 * sum(
                ginv[k, a] * ginv[l, b] * C.get((i, a, b)) * C.get((j, k, l))
                for k in range(n) for l in range(n)
                for a in range(n) for b in range(n)
                if C.get((j, k, l)) != 0
            )
            # 7: 4 C_ij^l nabla_l tr(P)
            t7 = 4 * sum(
                ginv[l, b] * C.get((i, j, b)) * sp.diff(trP, x[l])
                for l in range(n) for b in range(n)
            )
            # 8: -4 W_kijl P^k_m P^ml
            t8 = -4 * sum(
                g.weyl_component(k, i, j, l) * Pmix.comps.get((k, m), 0)
                * Pup.get((m, l))
                for k in range(n) for l in range(n) for m in range(n)
            )
            for t, val in zip(terms, (t1, t2, t3, t4, t5, t6, t7, t8)):
                v = _cancel(val)
                t[i, j] = v
                t[j, i] = v
    O = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            O[i, j] = _cancel(sum(t[i, j] for t in terms))
    if return_terms:
        return sp.ImmutableMatrix(O), [sp.ImmutableMatrix(t) for t in terms]
    return sp.ImmutableMatrix(O)


# ---------------------------------------------------------------------------
# coframes and exterior algebra
# ---------------------------------------------------------------------------


class CoFrame:
    """List of n one-forms on an n-dimensional chart (rows of ``matrix``)."""

    def __init__(self, chart: Chart, forms, validate: bool = True):
        self.chart = chart
        rows = forms.tolist() if isinstance(forms, sp.MatrixBase) else forms
        self.matrix = sp.ImmutableMatrix(
            [[_cancel(c) for c in row] for row in rows]
        )
        if self.matrix.shape != (chart.dim, chart.dim):
            raise ValueError("coframe must consist of n forms in n coordinates")
        if validate:
            det = self.matrix.subs(chart.base_subs()).det()
            if sp.simplify(det) == 0:
                raise ValueError("coframe degenerate at base point")

    def form(self, i: int) -> "FormField":
        comps = {}
        for a in range(self.chart.dim):
            if self.matrix[i, a] != 0:
                comps[(a,)] = self.matrix[i, a]
        return FormField(self.chart, 1, comps)

    def dual_frame(self) -> sp.ImmutableMatrix:
        """Rows are the frame vector fields X_i with theta^i(X_j) = delta^i_j."""
        inv = self.matrix.inv().applyfunc(_cancel)
        return sp.ImmutableMatrix(inv.T)


def metric_from_coframe(cf: CoFrame, q: sp.Matrix,
                        signature: Tuple[int, int] | None = None) -> Metric:
    """g_ab = q_ij theta^i_a theta^j_b (q constant symmetric)."""
    q = sp.Matrix(q)
    if q != q.T:
        raise ValueError("coefficient matrix must be symmetric")
    g = cf.matrix.T * q * cf.matrix
    return Metric(cf.chart, g.applyfunc(_cancel), signature=signature)


def _merge_sign(I: Tuple[int, ...], J: Tuple[int, ...]):
    """Sorted merge of disjoint tuples with permutation sign; None if overlap."""
    if set(I) & set(J):
        return None, 0
    merged = I + J
    perm = sorted(range(len(merged)), key=lambda k: merged[k])
    sign = 1
    seen = list(merged)
    # count inversions
    inv = 0
    for a in range(len(seen)):
        for b in range(a + 1, len(seen)):
            if seen[a] > seen[b]:
                inv += 1
    sign = -1 if inv % 2 else 1
    return tuple(sorted(merged)), sign


@dataclass
class FormField:
    """Differential k-form: components over strictly increasing index tuples."""

    chart: Chart
    degree: int
    comps: Dict[Tuple[int, ...], Expr]

    def __post_init__(self):
        clean = {}
        for idx, v in self.comps.items():
            if len(idx) != self.degree or list(idx) != sorted(set(idx)):
                raise ValueError(f"bad index tuple {idx} for degree {self.degree}")
            v = _cancel(v)
            if v != 0:
                clean[tuple(idx)] = v
        self.comps = clean

    def get(self, idx) -> Expr:
        """Component with full antisymmetry over arbitrary tuples."""
        idx = tuple(idx)
        if len(set(idx)) != len(idx):
            return sp.Integer(0)
        key = tuple(sorted(idx))
        inv = sum(
            1 for a in range(len(idx)) for b in range(a + 1, len(idx))
            if idx[a] > idx[b]
        )
        v = self.comps.get(key, sp.Integer(0))
        return -v if inv % 2 else v

    def __add__(self, other: "FormField") -> "FormField":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out.get(k, sp.Integer(0)) + v
        return FormField(self.chart, self.degree, out)

    def __sub__(self, other: "FormField") -> "FormField":
        return self + other.scale(-1)

    def scale(self, c) -> "FormField":
        return FormField(self.chart, self.degree,
                         {k: c * v for k, v in self.comps.items()})

    def map(self, fn) -> "FormField":
        return FormField(self.chart, self.degree,
                         {k: fn(v) for k, v in self.comps.items()})

    def to_tensor(self) -> TensorField:
        """Fully antisymmetric covariant tensor with all index orders."""
        comps = {}
        for idx in itertools.permutations(range(self.chart.dim), self.degree):
            v = self.get(idx)
            if v != 0:
                comps[idx] = v
        return TensorField(self.chart, ("d",) * self.degree, comps,
                           antisymmetric=True)

    def is_zero_form(self, constraints=()) -> ZeroCertificate:
        t = TensorField(self.chart, ("d",) * self.degree, dict(self.comps))
        return t.is_zero_field(constraints)


def wedge(a: FormField, b: FormField) -> FormField:
    if a.chart.coords != b.chart.coords:
        raise ValueError("chart mismatch")
    out: Dict[Tuple[int, ...], Expr] = {}
    for I, u in a.comps.items():
        for J, v in b.comps.items():
            K, sign = _merge_sign(I, J)
            if K is None:
                continue
            out[K] = out.get(K, sp.Integer(0)) + sign * u * v
    return FormField(a.chart, a.degree + b.degree, out)


def wedge_list(forms: Sequence[FormField]) -> FormField:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def form_from_coframe_indices(cf: CoFrame, indices: Sequence[int]) -> FormField:
    """theta^{i1} ^ ... ^ theta^{ik} for 1-based coframe indices."""
    return wedge_list([cf.form(i - 1) for i in indices])


def hodge_star(a: FormField, g: Metric) -> FormField:
    """Hodge star; orientation = chart coordinate order."""
    n = g.dim
    k = a.degree
    ginv = g.inverse()
    det = g.det()
    p, q = g.signature
    sgn = (-1) ** q
    vol = sp.sqrt(sgn * det)  # sqrt of |det g|, exact symbolic
    # raise all indices of a
    raised: Dict[Tuple[int, ...], Expr] = {}
    for I in itertools.combinations(range(n), k):
        v = sp.Integer(0)
        for J in itertools.permutations(range(n), k):
            aJ = a.get(J)
            if aJ == 0:
                continue
            coef = sp.Integer(1)
            for s in range(k):
                coef *= ginv[I[s], J[s]]
                if coef == 0:
                    break
            if coef != 0:
                v += coef * aJ
        v = _cancel(v)
        if v != 0:
            raised[I] = v
    out: Dict[Tuple[int, ...], Expr] = {}
    for I, v in raised.items():
        J = tuple(sorted(set(range(n)) - set(I)))
        _, sign = _merge_sign(I, J)
        out[J] = out.get(J, sp.Integer(0)) + sign * v * vol
    return FormField(g.chart, n - k, out)


def covariant_derivative_form(a: FormField, g: Metric) -> TensorField:
    """nabla a as a (0, k+1) tensor, derivative index last."""
    return covariant_derivative(a.to_tensor(), g)


def substitute_chart(g: Metric, new_chart: Chart,
                     mapping: Mapping[sp.Symbol, Expr],
                     signature=None) -> Metric:
    """Pull back g under old_coords = F(new_coords).

    ``mapping`` sends each old coordinate symbol to its expression in the new
    coordinates.
    """
    old = g.chart.coords
    n = len(old)
    if new_chart.dim != n:
        raise ValueError("dimension mismatch")
    J = sp.Matrix(
        [[sp.diff(mapping[old[i]], new_chart.coords[a]) for a in range(n)]
         for i in range(n)]
    )
    gm = sp.Matrix(g.mat).subs(mapping)
    new = (J.T * gm * J).applyfunc(_cancel)
    return Metric(new_chart, new, signature=signature or g.signature)


def sym_pair(alpha: Sequence[Expr], beta: Sequence[Expr]) -> sp.Matrix:
    """Matrix of the symmetric product with 2ab |-> g_ab = 1 normalization.

    ``sym_pair(a, b)[i, j] = (a_i b_j + a_j b_i)/2`` so that a metric display
    ``2 theta^1 theta^5`` translates to ``2*sym_pair(theta1, theta5)``.
    """
    n = len(alpha)
    a = sp.Matrix(n, 1, list(alpha))
    b = sp.Matrix(n, 1, list(beta))
    return (a * b.T + b * a.T) / 2
