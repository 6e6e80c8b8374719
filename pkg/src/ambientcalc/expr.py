"""Exact scalar expression kernel.

Thin layer over sympy providing the operations the geometry modules rely on:
exact differentiation, a documented normalization pipeline, a three-valued
zero test, and exact/high-precision evaluation.  Everything is immutable and
pure; expressions are ordinary sympy objects so the tensor modules can use
sympy arithmetic directly.

Normalization rules (applied by :func:`normalize`):

* rational constants are exact (sympy ``Rational``), square roots of
  rationals are kept exact with ``sqrt(a)**2 -> a``;
* ``cancel``/``expand`` put the rational-function subset into its unique
  ``p/q`` canonical form;
* for expressions containing sin/cos/sinh/cosh/exp/log, the hyperbolic and
  trigonometric functions are rewritten in terms of ``exp`` (this encodes
  ``sin^2+cos^2 -> 1`` and ``cosh^2-sinh^2 -> 1``), powers with equal bases
  are merged, and the result is cancelled again.

The zero test is exact on the rational-function subset (including rational
powers of positive symbols and powers with constant surd exponents); for
transcendental expressions it relies on the rewrite pipeline plus, as a last
resort, high-precision interval sampling which can only ever produce a
NonZero witness or a "probabilistic zero" verdict, never a wrong "Zero".
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import mpmath
import sympy as sp

Expr = sp.Expr
Scalar = Fraction

_FUNCTIONS = {
    "exp": sp.exp,
    "log": sp.log,
    "sin": sp.sin,
    "cos": sp.cos,
    "sinh": sp.sinh,
    "cosh": sp.cosh,
    "sqrt": sp.sqrt,
}

# default number of exact-rational sample points used by the probabilistic branch
SAMPLE_POINTS = 8
DEFAULT_PRECISION = 256


class ZeroResult(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ZeroCertificate:
    """Outcome of a zero test together with the trust level of the claim."""

    result: ZeroResult
    exact: bool
    detail: str = ""

    def __bool__(self) -> bool:
        return self.result is ZeroResult.ZERO


@dataclass(frozen=True)
class NumericValue:
    """High-precision enclosure of a real value: ``|value - mid| <= radius``."""

    mid: mpmath.mpf
    radius: mpmath.mpf

    def definitely_nonzero(self) -> bool:
        return abs(self.mid) > self.radius


@dataclass(frozen=True)
class Point:
    """Exact assignment of coordinates and parameters."""

    assignments: Mapping[sp.Symbol, sp.Expr]
    constraints: tuple = ()

    def subs_list(self):
        return list(self.assignments.items())


def symbols(names: str, **assumptions) -> tuple:
    """Declare coordinate/parameter symbols (reals by default)."""
    assumptions.setdefault("real", True)
    out = sp.symbols(names, **assumptions)
    return out if isinstance(out, tuple) else (out,)


def rational(p, q=1) -> sp.Rational:
    return sp.Rational(p, q)


def parse(text: str, names: Mapping[str, sp.Symbol]) -> Expr:
    """Parse the spec-file expression syntax (infix, ^ for powers, a/b rationals)."""
    from sympy.parsing.sympy_parser import (
        parse_expr,
        standard_transformations,
        convert_xor,
    )

    local = dict(_FUNCTIONS)
    local.update(names)
    try:
        e = parse_expr(
            text,
            local_dict=local,
            transformations=standard_transformations + (convert_xor,),
            evaluate=True,
        )
    except Exception as err:  # sympy raises a zoo of parse errors
        raise ValueError(f"cannot parse expression {text!r}: {err}") from None
    bad = [str(s) for s in e.free_symbols if s not in names.values()]
    if bad:
        raise ValueError(f"unknown symbols {sorted(bad)} in expression {text!r}")
    return e


def differentiate(e: Expr, v: sp.Symbol, order: int = 1) -> Expr:
    return sp.diff(sp.sympify(e), v, order)


def _has_transcendental(e: Expr) -> bool:
    return bool(e.atoms(sp.sin, sp.cos, sp.sinh, sp.cosh, sp.tanh, sp.exp, sp.log))


def normalize(e: Expr) -> Expr:
    """Canonical form on the rational subset; fixed rewrite system elsewhere."""
    e = sp.sympify(e)
    if e.is_Number:
        return sp.nsimplify(e) if e.is_Rational else sp.radsimp(e)
    if _has_transcendental(e):
        e = e.rewrite(sp.exp)
        e = sp.powsimp(e, deep=True)
    e = sp.cancel(sp.expand(e))
    return e


def print_canonical(e: Expr) -> str:
    """Deterministic text form (lexicographic term order) for reports."""
    return sp.sstr(normalize(e), order="lex")


def _random_rational(rng: random.Random) -> sp.Rational:
    return sp.Rational(rng.randint(-12, 12), rng.randint(1, 7))


def _sample_point(e: Expr, rng: random.Random, constraints=()) -> dict:
    subs = {}
    positive = {s for s in e.free_symbols if s.is_positive}
    for s in sorted(e.free_symbols, key=str):
        val = _random_rational(rng)
        if s in positive or any(
            c.has(s) for c in constraints
        ):  # keep declared-positive symbols positive
            val = abs(val) + sp.Rational(1, 3)
        subs[s] = val
    return subs


def _interval_eval(e: Expr, subs: Mapping, precision: int) -> NumericValue | None:
    """Rigorous interval evaluation via mpmath.iv; None when unsupported."""
    iv = mpmath.iv
    old = iv.prec
    iv.prec = precision
    try:
        val = _to_interval(e.subs(subs), iv)
    except (ValueError, TypeError, NotImplementedError, ZeroDivisionError):
        return None
    finally:
        iv.prec = old
    mid = mpmath.mpf((mpmath.mpf(val.a) + mpmath.mpf(val.b)) / 2)
    rad = mpmath.mpf((mpmath.mpf(val.b) - mpmath.mpf(val.a)) / 2)
    return NumericValue(mid, rad)


def _to_interval(e: Expr, iv):
    """Recursive interval evaluation of a number-valued sympy expression."""
    if e.is_Rational:
        return iv.mpf(e.p) / iv.mpf(e.q)
    if e is sp.pi:
        return iv.pi
    if e is sp.E:
        return iv.exp(1)
    if isinstance(e, sp.Add):
        out = iv.mpf(0)
        for a in e.args:
            out += _to_interval(a, iv)
        return out
    if isinstance(e, sp.Mul):
        out = iv.mpf(1)
        for a in e.args:
            out *= _to_interval(a, iv)
        return out
    if isinstance(e, sp.Pow):
        base = _to_interval(e.base, iv)
        if e.exp.is_Integer:
            return base ** int(e.exp)
        return iv.exp(_to_interval(e.exp, iv) * iv.log(base))
    table = {
        sp.exp: iv.exp,
        sp.log: iv.log,
        sp.sin: iv.sin,
        sp.cos: iv.cos,
        sp.sinh: lambda a: (iv.exp(a) - iv.exp(-a)) / 2,
        sp.cosh: lambda a: (iv.exp(a) + iv.exp(-a)) / 2,
        sp.tan: iv.tan,
        sp.tanh: lambda a: (iv.exp(2 * a) - 1) / (iv.exp(2 * a) + 1),
    }
    for fn, ivfn in table.items():
        if isinstance(e, fn):
            return ivfn(_to_interval(e.args[0], iv))
    raise NotImplementedError(f"interval evaluation of {e}")


def is_zero(e: Expr, constraints: Iterable = (), precision: int = DEFAULT_PRECISION,
            seed: int = 0) -> ZeroCertificate:
    """Three-valued zero test; exact on rational functions, honest elsewhere."""
    e = sp.sympify(e)
    if e.is_Number:
        if e == 0 or sp.radsimp(e) == 0:
            return ZeroCertificate(ZeroResult.ZERO, True, "constant")
        return ZeroCertificate(ZeroResult.NONZERO, True, "constant")
    n = normalize(e)
    if n == 0:
        return ZeroCertificate(ZeroResult.ZERO, True, "normalize")
    if not _has_transcendental(n):
        # canonical nonzero rational function (in symbols and their rational
        # or constant-surd powers): exactly nonzero as a function
        return ZeroCertificate(ZeroResult.NONZERO, True, "canonical form")
    s = sp.simplify(n)
    if s == 0:
        return ZeroCertificate(ZeroResult.ZERO, True, "simplify")
    # sampling fallback: NonZero witness or probabilistic zero
    rng = random.Random(seed)
    all_small = True
    for _ in range(SAMPLE_POINTS):
        subs = _sample_point(s, rng, constraints)
        enc = _interval_eval(s, subs, precision)
        if enc is None:
            return ZeroCertificate(ZeroResult.UNKNOWN, False, "evaluation failed")
        if enc.definitely_nonzero():
            return ZeroCertificate(
                ZeroResult.NONZERO, True, f"witness at {subs}: |value| > {enc.radius}"
            )
        if abs(enc.mid) + enc.radius > mpmath.mpf(2) ** (-precision // 2):
            all_small = False
    if all_small:
        return ZeroCertificate(ZeroResult.ZERO, False, "probabilistic (sampled)")
    return ZeroCertificate(ZeroResult.UNKNOWN, False, "samples inconclusive")


def evaluate(e: Expr, point: Point | Mapping, precision: int = DEFAULT_PRECISION):
    """Exact value when the substitution is exact, otherwise a NumericValue.

    Raises ValueError on domain violations (log of a non-positive exact value,
    even root of a negative one).
    """
    e = sp.sympify(e)
    subs = point.assignments if isinstance(point, Point) else point
    missing = [s for s in e.free_symbols if s not in subs]
    if missing:
        raise ValueError(f"point does not assign {sorted(map(str, missing))}")
    v = e.subs(subs)
    for l in v.atoms(sp.log):
        if l.args[0].is_number and l.args[0].is_positive is False:
            raise ValueError(f"log of non-positive value in {v}")
    for p in v.atoms(sp.Pow):
        if (p.base.is_number and p.base.is_negative
                and p.exp.is_Rational and not p.exp.is_Integer
                and p.exp.q % 2 == 0):
            raise ValueError(f"even root of negative value in {v}")
    v = sp.nsimplify(sp.radsimp(v)) if v.is_number else v
    if v.is_Rational:
        return Fraction(int(v.p), int(v.q))
    enc = _interval_eval(v, {}, precision)
    if enc is None:
        raise ValueError(f"cannot evaluate {v} numerically")
    return enc


def as_fraction(x: sp.Rational) -> Fraction:
    x = sp.Rational(x)
    return Fraction(int(x.p), int(x.q))
