"""Scalar backends and polynomial algebra."""

import random
from fractions import Fraction

import pytest

from henongreen.algebra import (
    ExactComplex,
    MonomialBudgetError,
    Poly1,
    Poly2,
    PolyMap2,
    format_scalar,
    poly1_eval,
    poly2_compose,
    polymap_compose,
    polymap_equal,
)


def EC(re, im=0):
    return ExactComplex(re, im)


def test_exact_complex_field_ops():
    a = EC(Fraction(1, 2), Fraction(3, 4))
    b = EC(Fraction(-2, 3), Fraction(5))
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a * (b + EC(1)) == a * b + a
    assert (a / b) * b == a
    assert EC(2) ** 10 == EC(1024)
    assert EC(0, 1) ** 2 == EC(-1)
    assert EC(3, 4).abs2() == Fraction(25)
    assert abs(EC(3, 4)) == 5.0


def test_exact_complex_rejects_floats():
    with pytest.raises(TypeError):
        EC(1) + 0.5
    with pytest.raises(TypeError):
        EC(1) * complex(1, 2)


def test_exact_arithmetic_is_exactly_distributive():
    rng = random.Random(0)

    def rand_ec():
        return EC(Fraction(rng.randint(-99, 99), rng.randint(1, 99)),
                  Fraction(rng.randint(-99, 99), rng.randint(1, 99)))

    for _ in range(200):
        a, b, c = rand_ec(), rand_ec(), rand_ec()
        assert a * (b + c) == a * b + a * c
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)


def test_float_backend_round_trips_through_repr():
    rng = random.Random(1)
    for _ in range(500):
        v = rng.uniform(-1e6, 1e6) * 10 ** rng.randint(-12, 12)
        assert float(repr(v)) == v


def test_poly1_eval_monomial():
    p = Poly1([0, 0, 1])  # y^2
    assert poly1_eval(p, 3) == 9


def test_poly1_eval_zero_poly():
    p = Poly1([0])
    assert p.degree == 0 and p.is_zero()
    assert poly1_eval(p, complex(12, 5)) == 0


def test_poly1_eval_complex_point_exact():
    # 2y^3 + y at 1+i: hand expansion gives -3 + 5i
    p = Poly1([EC(0), EC(1), EC(0), EC(2)])
    z = EC(1, 1)
    assert poly1_eval(p, z) == EC(-3, 5)
    # float backend agrees
    pf = p.as_float()
    v = poly1_eval(pf, complex(1, 1))
    assert abs(v - complex(-3, 5)) < 1e-12


def test_poly1_trims_leading_zeros():
    p = Poly1([1, 2, 0, 0])
    assert p.degree == 1
    assert p.coeffs == (1, 2)


def test_poly2_compose_projections():
    m = PolyMap2(Poly2.var_y(), Poly2({(0, 2): 1, (1, 0): -1}))  # (y, y^2 - x)
    assert poly2_compose(Poly2.var_x(), m) == Poly2.var_y()
    assert poly2_compose(Poly2.var_y(), m) == Poly2({(0, 2): 1, (1, 0): -1})


def test_poly2_compose_xy():
    # p = xy under (y, y^2 - x) -> y*(y^2 - x) = y^3 - xy
    m = PolyMap2(Poly2.var_y(), Poly2({(0, 2): 1, (1, 0): -1}))
    got = poly2_compose(Poly2({(1, 1): 1}), m)
    assert got == Poly2({(0, 3): 1, (1, 1): -1})


def test_polymap_compose_identity():
    ident = PolyMap2.identity()
    assert polymap_compose(ident, ident) == ident


def test_polymap_compose_henon_square():
    h = PolyMap2(Poly2.var_y(), Poly2({(0, 2): 1, (1, 0): -1}))
    hh = polymap_compose(h, h)
    # (y^2 - x, (y^2 - x)^2 - y), hand expanded
    assert hh.first == Poly2({(0, 2): 1, (1, 0): -1})
    assert hh.second == Poly2({(0, 4): 1, (1, 2): -2, (2, 0): 1, (0, 1): -1})
    # cross-check by pointwise evaluation at random points
    rng = random.Random(2)
    for _ in range(100):
        x = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        y = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        u, v = h.eval(*h.eval(x, y))
        uu, vv = hh.eval(x, y)
        assert abs(u - uu) < 1e-9 and abs(v - vv) < 1e-9


def test_polymap_compose_inverse_pair():
    shift = PolyMap2(Poly2({(1, 0): 1, (0, 0): 1}), Poly2.var_y())
    unshift = PolyMap2(Poly2({(1, 0): 1, (0, 0): -1}), Poly2.var_y())
    assert polymap_compose(shift, unshift) == PolyMap2.identity()


def test_polymap_equal_threshold_semantics():
    f = PolyMap2(Poly2.var_y(), Poly2({(0, 2): 1, (1, 0): -1}))
    g = PolyMap2(Poly2.var_y(), Poly2({(0, 2): 1, (1, 0): -1, (0, 0): 1e-12}))
    assert polymap_equal(f, f, 0.0)
    assert polymap_equal(f, g, 1e-9)
    assert not polymap_equal(f, g, 0.0)


def test_polymap_equal_detects_noncommuting_orders():
    h = PolyMap2(Poly2.var_y(), Poly2({(0, 2): 1, (1, 0): -1}))
    hp = PolyMap2(Poly2.var_y(), Poly2({(0, 3): 1, (1, 0): -1}))
    assert not polymap_equal(polymap_compose(h, hp), polymap_compose(hp, h), 0.0)


def test_eval_homomorphism_float_and_exact():
    rng = random.Random(3)
    m = PolyMap2(
        Poly2({(0, 1): EC(1), (1, 1): EC(2), (0, 0): EC(-1)}),
        Poly2({(0, 2): EC(1), (1, 0): EC(-1), (2, 0): EC(3)}),
    )
    p = Poly2({(2, 1): EC(1), (0, 3): EC(-2), (1, 0): EC(5)})
    comp = poly2_compose(p, m)
    for _ in range(50):
        x = EC(Fraction(rng.randint(-8, 8), rng.randint(1, 8)), Fraction(rng.randint(-8, 8), rng.randint(1, 8)))
        y = EC(Fraction(rng.randint(-8, 8), rng.randint(1, 8)), Fraction(rng.randint(-8, 8), rng.randint(1, 8)))
        assert comp.eval(x, y) == p.eval(*m.eval(x, y))
    # float route within relative 1e-10 at moderate points
    mf = PolyMap2(
        Poly2({(0, 1): 1.0, (1, 1): 2.0, (0, 0): -1.0}),
        Poly2({(0, 2): 1.0, (1, 0): -1.0, (2, 0): 3.0}),
    )
    pf = Poly2({(2, 1): 1.0, (0, 3): -2.0, (1, 0): 5.0})
    compf = poly2_compose(pf, mf)
    for _ in range(50):
        x = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        y = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        lhs = compf.eval(x, y)
        rhs = pf.eval(*mf.eval(x, y))
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


def _random_exact_polymap(rng, deg):
    def rand_poly():
        terms = {}
        for i in range(deg + 1):
            for j in range(deg + 1 - i):
                if rng.random() < 0.5:
                    terms[(i, j)] = EC(rng.randint(-4, 4), rng.randint(-4, 4))
        terms[(0, 0)] = terms.get((0, 0), EC(0)) + EC(1)
        return Poly2(terms)

    return PolyMap2(rand_poly(), rand_poly())


def test_polymap_compose_associative_exact():
    rng = random.Random(4)
    for _ in range(8):
        f = _random_exact_polymap(rng, 2)
        g = _random_exact_polymap(rng, 2)
        h = _random_exact_polymap(rng, 3)
        left = polymap_compose(polymap_compose(f, g), h)
        right = polymap_compose(f, polymap_compose(g, h))
        assert polymap_equal(left, right, 0.0)


def test_monomial_budget_fails_loudly():
    dense = Poly2({(i, j): 1 for i in range(40) for j in range(40)})
    with pytest.raises(MonomialBudgetError):
        dense.mul(dense, budget=100)


def test_graded_lex_text_form():
    p = Poly2({(0, 0): 1.0, (2, 0): 3.0, (0, 2): -1.0, (1, 0): 2.0})
    # leading first: degree 2 terms with larger x-power first
    assert p.text() == "(3.0) * x^2 * y^0 + (-1.0) * x^0 * y^2 + (2.0) * x^1 * y^0 + (1.0) * x^0 * y^0"


def test_format_scalar_exact():
    assert format_scalar(EC(Fraction(1, 2), Fraction(-3, 4))) == "1/2 - 3/4 i"
    assert format_scalar(EC(Fraction(1, 2))) == "1/2"
    assert format_scalar(complex(1.5, 0.25)) == "1.5+0.25i"
