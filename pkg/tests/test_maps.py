"""Henon words, automorphism words, classification, affine normal forms."""

import math
import random
from fractions import Fraction

import pytest

from henongreen.algebra import ExactComplex, Poly1
from henongreen.maps import (
    CASE_AFFINE,
    CASE_HENON,
    CASE_I,
    CASE_II,
    CASE_III,
    CASE_IV,
    INDET_ONE_ZERO_ZERO,
    INDET_W_ONE_ZERO,
    AffineMap,
    AutoWord,
    ElementaryMap,
    HenonFactor,
    HenonMap,
    affine_power,
    classify_word,
    henon_apply,
    henon_apply_inverse,
    henon_degree,
    henon_inverse_word,
    normalize_affine,
    word_expand,
)


def EC(re, im=0):
    return ExactComplex(re, im)


QUAD = HenonMap((HenonFactor(Poly1([0, 0, 1]), 1),))  # (y, y^2 - x)


def two_factor():
    return HenonMap(
        (
            HenonFactor(Poly1([0, 0, 1]), 1),  # p1 = y^2, delta1 = 1
            HenonFactor(Poly1([0, 0, 0, 1]), 2),  # p2 = y^3, delta2 = 2
        )
    )


def test_factor_invariants_enforced():
    with pytest.raises(ValueError):
        HenonFactor(Poly1([0, 1]), 1)  # degree 1
    with pytest.raises(ValueError):
        HenonFactor(Poly1([0, 0, 1]), 0)  # delta = 0
    with pytest.raises(ValueError):
        HenonMap(())


def test_henon_apply_hand_values():
    assert henon_apply(QUAD, (1, 2)) == (2, 3)
    assert henon_apply(QUAD, (0, 0)) == (0, 0)
    # two-factor word at (0, 1): H1 -> (1, 1), H2 -> (1, 1 - 2) = (1, -1)
    assert henon_apply(two_factor(), (0, 1)) == (1, -1)


def test_henon_apply_inverse_hand_value():
    assert henon_apply_inverse(QUAD, (2, 3)) == (1, 2)
    assert henon_apply_inverse(QUAD, (0, 0)) == (0, 0)


def test_inverse_round_trip_random():
    rng = random.Random(5)
    maps = [QUAD, two_factor()]
    for h in maps:
        hf = h.as_float()
        for _ in range(1000):
            z = (
                complex(rng.uniform(-3, 3), rng.uniform(-3, 3)),
                complex(rng.uniform(-3, 3), rng.uniform(-3, 3)),
            )
            w = henon_apply_inverse(hf, henon_apply(hf, z))
            err = abs(w[0] - z[0]) + abs(w[1] - z[1])
            norm = math.hypot(abs(z[0]), abs(z[1]))
            assert err <= 1e-10 * (1 + norm)


def test_henon_degree():
    assert henon_degree(QUAD) == 2
    assert henon_degree(two_factor()) == 6
    four = HenonMap((HenonFactor(Poly1([0, 0, 1]), 1),) * 4)
    assert henon_degree(four) == 16


def test_degree_matches_expansion_degree():
    for h in (QUAD, two_factor(), QUAD.iterate(3), QUAD.iterate(4)):
        if h.degree <= 16:
            assert word_expand(h).total_degree == h.degree


def test_word_expand_single_factor():
    e = word_expand(QUAD)
    assert e.first.text() == "(1) * x^0 * y^1"
    assert e.second.coeff(0, 2) == 1 and e.second.coeff(1, 0) == -1


def test_word_expand_pointwise_agreement():
    rng = random.Random(6)
    words = [QUAD, two_factor(), QUAD.iterate(2)]
    for h in words:
        pm = word_expand(h)
        hf = h.as_float()
        deg = h.degree
        for _ in range(100):
            z = (
                complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            )
            u, v = hf.apply(z)
            uu, vv = pm.eval(complex(z[0]), complex(z[1]))
            norm = math.hypot(abs(z[0]), abs(z[1]))
            bound = 1e-9 * (1 + norm**deg)
            assert abs(u - uu) <= bound and abs(v - vv) <= bound


def test_affine_power_translation():
    s = AffineMap(1, 0, 1, 0, 1, 0)
    p = affine_power(s, 5)
    assert p.apply((0, 0)) == (5, 0)


def test_affine_power_rotation_example():
    # a = i, f = 0, d = -1, g = 2, n = 2 -> (-x, y)
    s = AffineMap(complex(0, 1), 0, 0, 0, -1, 2)
    p = affine_power(s, 2)
    z = (complex(1.5, -2), complex(0.5, 3))
    direct = s.apply(s.apply(z))
    via = p.apply(z)
    assert abs(via[0] - direct[0]) < 1e-12 and abs(via[1] - direct[1]) < 1e-12
    assert abs(via[0] + z[0]) < 1e-12 and abs(via[1] - z[1]) < 1e-12


def test_affine_power_identity_power():
    s = AffineMap(EC(3), EC(0), EC(7), EC(0), EC(2), EC(-1))
    assert affine_power(s, 1) == s


def test_affine_power_exact_matches_composition():
    rng = random.Random(7)
    for _ in range(25):
        a = EC(rng.randint(1, 5), rng.randint(-3, 3))
        d = EC(rng.randint(-5, -1), rng.randint(-3, 3))
        s = AffineMap(a, EC(0), EC(rng.randint(-4, 4)), EC(0), d, EC(rng.randint(-4, 4)))
        n = rng.randint(1, 6)
        closed = affine_power(s, n)
        comp = s
        for _ in range(n - 1):
            comp = s.compose(comp)
        assert closed == comp


def test_affine_power_degenerate_a_equals_one_exact():
    s = AffineMap(EC(1), EC(0), EC(3), EC(0), EC(1), EC(-2))
    p = affine_power(s, 7)
    assert p == AffineMap(EC(1), EC(0), EC(21), EC(0), EC(1), EC(-14))


def test_normalize_affine_simple_example():
    # a(x, y) = (x + y, x), b = 1: a1 = (x + y, y), a2 = identity
    a = AffineMap(EC(1), EC(1), EC(0), EC(1), EC(0), EC(0))
    a1, a2 = normalize_affine(a, EC(1))
    rec = a1.compose(AffineMap.swap()).compose(a2)
    assert rec == a
    assert a1 == AffineMap(EC(1), EC(1), EC(0), EC(0), EC(1), EC(0))
    assert a2 == AffineMap(EC(1), EC(0), EC(0), EC(0), EC(1), EC(0))


def test_normalize_affine_swap_degenerate():
    # tau itself: first-row x-coefficient is 0, so c = 0 and a1 = (b x, y)
    tau = AffineMap(EC(0), EC(1), EC(0), EC(1), EC(0), EC(0))
    a1, a2 = normalize_affine(tau, EC(1))
    assert a1 == AffineMap(EC(1), EC(0), EC(0), EC(0), EC(1), EC(0))
    assert a1.compose(AffineMap.swap()).compose(a2) == tau


def test_normalize_affine_general_example():
    a = AffineMap(EC(2), EC(3), EC(1), EC(5), EC(7), EC(2))
    a1, a2 = normalize_affine(a, EC(5))
    # s2 = (3 - (2/5)*7)/5, r2 = (1 - (2/5)*2)/5
    assert a2.d == EC(Fraction(3) - Fraction(2, 5) * 7) / EC(5)
    assert a2.g == EC(Fraction(1) - Fraction(2, 5) * 2) / EC(5)
    assert a1.compose(AffineMap.swap()).compose(a2) == a


def test_normalize_affine_random_exact_recomposition():
    rng = random.Random(8)
    done = 0
    while done < 100:
        vals = [EC(Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                   Fraction(rng.randint(-9, 9), rng.randint(1, 9))) for _ in range(6)]
        a_, b_, f_, c_, d_, g_ = vals
        if not bool(c_) or not bool(a_ * d_ - b_ * c_):
            continue
        a = AffineMap(a_, b_, f_, c_, d_, g_)
        b = EC(rng.randint(1, 9), rng.randint(0, 3))
        a1, a2 = normalize_affine(a, b)
        assert a1.compose(AffineMap.swap()).compose(a2) == a
        done += 1


def test_normalize_affine_rejects_elementary():
    with pytest.raises(ValueError):
        normalize_affine(AffineMap(EC(1), EC(0), EC(0), EC(0), EC(1), EC(0)), EC(1))


# -- classification ----------------------------------------------------------


def _a():
    # non-elementary affine: (x + y, x)
    return AffineMap(EC(1), EC(1), EC(0), EC(1), EC(0), EC(0))


def _e():
    # non-affine elementary: (x + y^2, y)
    return ElementaryMap(EC(1), EC(1), EC(0), Poly1([EC(0), EC(0), EC(1)]))


def test_classifier_case_matrix():
    a, e = _a(), _e()
    cases = {
        (a, e): (CASE_I, INDET_ONE_ZERO_ZERO, INDET_W_ONE_ZERO),
        (e, a): (CASE_III, INDET_W_ONE_ZERO, INDET_ONE_ZERO_ZERO),
        (a, e, a): (CASE_II, None, None),
        (e, a, e): (CASE_IV, None, None),
    }
    for letters, (case, fwd, bwd) in cases.items():
        wc = classify_word(AutoWord.from_composition(letters))
        assert wc.case == case
        assert wc.indeterminacy_fwd == fwd
        assert wc.indeterminacy_bwd == bwd


def test_classifier_pure_affine_and_henon():
    assert classify_word(AutoWord((_a(),))).case == CASE_AFFINE
    wc = classify_word(AutoWord(QUAD.factors))
    assert wc.case == CASE_HENON
    assert wc.indeterminacy_fwd == INDET_ONE_ZERO_ZERO
    assert wc.w_bwd == 0


def test_classifier_merges_adjacent_same_kind():
    a, e = _a(), _e()
    w1 = AutoWord.from_composition((a, e))
    w2 = AutoWord.from_composition((a, e, e))  # e o e merges to one elementary
    w3 = AutoWord.from_composition((a, a, e))  # a o a merges to one affine
    assert classify_word(w1).case == classify_word(w2).case == classify_word(w3).case == CASE_I


def test_classifier_invariant_under_elementary_affine_glue():
    a, e = _a(), _e()
    glue = AffineMap(EC(2), EC(1), EC(0), EC(0), EC(1), EC(3))  # affine AND elementary-form
    w_plain = AutoWord.from_composition((a, e))
    w_glued = AutoWord.from_composition((a, glue, e))
    assert classify_word(w_plain).case == classify_word(w_glued).case == CASE_I


def test_classifier_inverse_swaps_cases_and_indeterminacy():
    a, e = _a(), _e()
    w = AutoWord.from_composition((a, e))
    wc = classify_word(w)
    wc_inv = classify_word(w.invert())
    assert wc.case == CASE_I and wc_inv.case == CASE_III
    assert wc_inv.indeterminacy_fwd == wc.indeterminacy_bwd
    assert wc_inv.indeterminacy_bwd == wc.indeterminacy_fwd


def test_classifier_case_iii_w_value_tracks_conjugation():
    # e o a is an inverse-Henon orientation with I+ = [0:1:0];
    # conjugating by L(x, y) = (x + 3y, y) moves it to [3:1:0].
    a, e = _a(), _e()
    base = AutoWord.from_composition((e, a))
    wc = classify_word(base)
    assert wc.case == CASE_III and wc.w_fwd == 0
    L = AffineMap(EC(1), EC(3), EC(0), EC(0), EC(1), EC(0))
    conj = AutoWord.from_composition((L,) + (e, a) + (L.inverse(),))
    wc2 = classify_word(conj)
    assert wc2.case == CASE_III
    assert wc2.w_fwd == EC(3)
    assert wc2.w_heuristic


def test_classifier_rejects_mixed_henon_words():
    with pytest.raises(ValueError):
        classify_word(AutoWord((QUAD.factors[0], _a())))


def test_word_apply_matches_expansion_for_mixed_word():
    rng = random.Random(9)
    w = AutoWord.from_composition((_a(), _e(), _a().inverse()))
    pm = word_expand(w)
    wf = w.as_float()
    for _ in range(50):
        z = (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
             complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))
        u, v = wf.apply(z)
        uu, vv = pm.eval(complex(z[0]), complex(z[1]))
        assert abs(u - uu) < 1e-9 and abs(v - vv) < 1e-9


def test_henon_inverse_word_matches_apply_inverse():
    rng = random.Random(10)
    for h in (QUAD, two_factor()):
        word = henon_inverse_word(h)
        hf = h.as_float()
        wf = word.as_float()
        for _ in range(50):
            z = (complex(rng.uniform(-3, 3), rng.uniform(-3, 3)),
                 complex(rng.uniform(-3, 3), rng.uniform(-3, 3)))
            direct = hf.apply_inverse(z)
            via = wf.apply(z)
            assert abs(direct[0] - via[0]) < 1e-10 and abs(direct[1] - via[1]) < 1e-10


def test_conjugate_inverse_is_henon_word():
    h = two_factor()
    tilde = h.conjugate_inverse()
    assert isinstance(tilde, HenonMap)
    assert tilde.degree == h.degree
    # tau o H^{-1} o tau pointwise
    hf = h.as_float()
    tf = tilde.as_float()
    z = (complex(0.3, -0.4), complex(1.1, 0.2))
    lhs = tf.apply(z)
    swapped = hf.apply_inverse((z[1], z[0]))
    assert abs(lhs[0] - swapped[1]) < 1e-12 and abs(lhs[1] - swapped[0]) < 1e-12


def test_elementary_inverse_round_trip_exact():
    e = ElementaryMap(EC(2), EC(3), EC(-1), Poly1([EC(1), EC(0), EC(5)]))
    ei = e.inverse()
    z = (EC(Fraction(1, 3)), EC(Fraction(-2, 7)))
    w = ei.apply(e.apply(z))
    assert w[0] == z[0] and w[1] == z[1]
