import random
from fractions import Fraction

import sympy as sp
import pytest

from ambientcalc import expr
from ambientcalc.expr import ZeroResult, evaluate, is_zero, normalize, parse


rho = sp.Symbol("rho", positive=True)
p, x, y = sp.symbols("p x y", real=True)
k = sp.Symbol("k", real=True)


def test_differentiate_basics():
    assert expr.differentiate(p**4, p) == 4 * p**3
    assert expr.differentiate(rho ** sp.Rational(5, 2), rho) == sp.Rational(5, 2) * rho ** sp.Rational(3, 2)
    x1 = sp.Symbol("x1", real=True)
    assert sp.expand(expr.differentiate(sp.exp(2 * k * x1), x1) - 2 * k * sp.exp(2 * k * x1)) == 0


def test_normalize_canonical_rational():
    assert normalize((p + 1) ** 2 - p**2 - 2 * p - 1) == 0
    assert normalize(rho * rho ** sp.Rational(3, 2)) == rho ** sp.Rational(5, 2)
    assert normalize(sp.sin(p) ** 2 + sp.cos(p) ** 2) == 1
    assert normalize(sp.cosh(x) ** 2 - sp.sinh(x) ** 2) == 1
    # idempotence
    e = (p**3 - p) / (p - 1) + sp.sin(p) ** 2
    assert normalize(normalize(e)) == normalize(e)


def test_is_zero_trivial_cases():
    assert is_zero(sp.cosh(x) ** 2 - sp.sinh(x) ** 2 - 1).result is ZeroResult.ZERO
    assert is_zero((x + y) ** 2 - x**2 - 2 * x * y - y**2).result is ZeroResult.ZERO
    c = is_zero(rho ** sp.Rational(5, 2))
    assert c.result is ZeroResult.NONZERO and c.exact


def test_is_zero_exact_on_rational_subset():
    e = (p**2 - 1) / (p - 1) - p - 1
    c = is_zero(e)
    assert c.result is ZeroResult.ZERO and c.exact
    c2 = is_zero((p**2 - 1) / (p - 1) - p)
    assert c2.result is ZeroResult.NONZERO and c2.exact


def test_evaluate_exact():
    assert evaluate(p**4, {p: 2}) == Fraction(16)
    assert evaluate(rho ** sp.Rational(5, 2), {rho: 4}) == Fraction(32)
    cp = (9 + sp.sqrt(21)) / 6
    cm = (9 - sp.sqrt(21)) / 6
    assert evaluate(cp * cm, {}) == Fraction(5, 3)


def test_evaluate_numeric_enclosure():
    v = evaluate(sp.exp(x), {x: 1}, precision=128)
    import mpmath
    assert abs(v.mid - mpmath.e) < 1e-30
    assert v.radius < mpmath.mpf(2) ** -100


def test_evaluate_domain_errors():
    with pytest.raises(ValueError):
        evaluate(sp.log(x), {x: -1})
    with pytest.raises(ValueError):
        evaluate(sp.sqrt(x), {x: -4})
    with pytest.raises(ValueError):
        evaluate(x + y, {x: 1})


def test_parse_syntax():
    names = {"p": p, "rho": rho}
    assert parse("p^4 + 3/80", names) == p**4 + sp.Rational(3, 80)
    assert parse("sqrt(21)", names) == sp.sqrt(21)
    assert parse("cosh(2*rho^(1/2))", names) == sp.cosh(2 * sp.sqrt(rho))
    with pytest.raises(ValueError):
        parse("q + 1", names)
    with pytest.raises(ValueError):
        parse("p +* 1", names)


def test_print_canonical_deterministic():
    e = y * x + x**2 + 1
    assert expr.print_canonical(e) == expr.print_canonical(1 + x * y + x**2)


def test_clairaut_and_linearity_randomized():
    rng = random.Random(7)
    syms = [p, x, y]
    for _ in range(20):
        e = sum(
            sp.Rational(rng.randint(-5, 5), rng.randint(1, 4))
            * syms[rng.randrange(3)] ** rng.randint(0, 3)
            * syms[rng.randrange(3)] ** rng.randint(0, 2)
            for _ in range(4)
        )
        v, w = rng.sample(syms, 2)
        assert normalize(sp.diff(e, v, 1, w, 1) - sp.diff(e, w, 1, v, 1)) == 0
        a = sp.Rational(rng.randint(-4, 4), rng.randint(1, 3))
        e2 = syms[rng.randrange(3)] ** 2
        assert normalize(sp.diff(a * e + e2, v) - (a * sp.diff(e, v) + sp.diff(e2, v))) == 0


def test_derivative_vs_finite_difference():
    e = (p**3 + 2 * p) / (p**2 + 1)
    d = sp.diff(e, p)
    h = sp.Rational(1, 10**6)
    at = sp.Rational(3, 7)
    fd = (e.subs(p, at + h) - e.subs(p, at - h)) / (2 * h)
    exact = d.subs(p, at)
    assert abs(sp.Rational(fd - exact)) < sp.Rational(1, 10**9)
