"""Henon maps, affine/elementary automorphism words, and their algebra.

A Henon map is a finite composition of factors

    (x, y) |-> (y, p(y) - delta * x),   deg p >= 2,  delta != 0,

stored first-applied-first: ``HenonMap(factors=(f1, f2))`` applies f1 and
then f2.  Polynomial automorphism words (:class:`AutoWord`) mix affine
letters (x, y) -> (a x + b y + f, c x + d y + g) and elementary letters
(x, y) -> (alpha x + p(y), beta y + gamma), again first-applied-first.
``AutoWord.from_composition`` accepts letters in composition order (leftmost
applied last) for code that reads like the usual "F = a1 o e1 o ..." notation.

The classifier reduces a mixed word to its alternating affine/elementary
pattern and names one of four structural cases, together with the forward and
backward indeterminacy points on the line at infinity when the case pins
them down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from .algebra import (
    ExactComplex,
    Poly1,
    Poly2,
    PolyMap2,
    Scalar,
    polymap_compose,
    scalar_abs,
    scalar_is_zero,
    to_complex,
)

Point = Tuple[Scalar, Scalar]


class EscapedRangeError(ArithmeticError):
    """A float orbit left the representable range (treated as deep escape)."""


# ---------------------------------------------------------------------------
# Letters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HenonFactor:
    """One factor (x, y) -> (y, p(y) - delta*x) with deg p >= 2, delta != 0."""

    p: Poly1
    delta: Scalar

    def __post_init__(self):
        if self.p.degree < 2:
            raise ValueError(f"factor polynomial must have degree >= 2, got {self.p.degree}")
        if scalar_is_zero(self.p.lead):
            raise ValueError("factor polynomial has zero leading coefficient")
        if scalar_is_zero(self.delta):
            raise ValueError("delta must be nonzero")

    @property
    def degree(self) -> int:
        return self.p.degree

    @property
    def lead(self):
        return self.p.lead

    def apply(self, z: Point) -> Point:
        x, y = z
        return (y, self.p(y) - self.delta * x)

    def apply_inverse(self, z: Point) -> Point:
        x, y = z
        return ((self.p(x) - y) / self.delta, x)

    def expand(self) -> PolyMap2:
        second = Poly2(
            {(1, 0): -self.delta} | {(0, k): c for k, c in enumerate(self.p.coeffs)}
        )
        return PolyMap2(Poly2.var_y(), second)

    def as_float(self) -> "HenonFactor":
        return HenonFactor(self.p.as_float(), to_complex(self.delta))


@dataclass(frozen=True)
class AffineMap:
    """(x, y) -> (a x + b y + f, c x + d y + g) with ad - bc != 0."""

    a: Scalar
    b: Scalar
    f: Scalar
    c: Scalar
    d: Scalar
    g: Scalar

    def __post_init__(self):
        if scalar_is_zero(self.det):
            raise ValueError("affine map is singular (ad - bc = 0)")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(1, 0, 0, 0, 1, 0)

    @staticmethod
    def swap() -> "AffineMap":
        """The coordinate swap tau(x, y) = (y, x)."""
        return AffineMap(0, 1, 0, 1, 0, 0)

    @staticmethod
    def diagonal(s1, s2) -> "AffineMap":
        return AffineMap(s1, 0, 0, 0, s2, 0)

    def is_elementary(self) -> bool:
        """True iff the lower-left coefficient vanishes (triangular form)."""
        return scalar_is_zero(self.c)

    def apply(self, z: Point) -> Point:
        x, y = z
        return (self.a * x + self.b * y + self.f, self.c * x + self.d * y + self.g)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self o other (other applied first)."""
        o = other
        return AffineMap(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.a * o.f + self.b * o.g + self.f,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
            self.c * o.f + self.d * o.g + self.g,
        )

    def inverse(self) -> "AffineMap":
        det = self.det
        ia = self.d / det
        ib = -self.b / det
        ic = -self.c / det
        id_ = self.a / det
        return AffineMap(
            ia, ib, -(ia * self.f + ib * self.g),
            ic, id_, -(ic * self.f + id_ * self.g),
        )

    def expand(self) -> PolyMap2:
        return PolyMap2(
            Poly2({(1, 0): self.a, (0, 1): self.b, (0, 0): self.f}),
            Poly2({(1, 0): self.c, (0, 1): self.d, (0, 0): self.g}),
        )

    def as_float(self) -> "AffineMap":
        return AffineMap(*(to_complex(v) for v in (self.a, self.b, self.f, self.c, self.d, self.g)))


@dataclass(frozen=True)
class ElementaryMap:
    """(x, y) -> (alpha x + p(y), beta y + gamma) with alpha*beta != 0."""

    alpha: Scalar
    beta: Scalar
    gamma: Scalar
    p: Poly1

    def __post_init__(self):
        if scalar_is_zero(self.alpha) or scalar_is_zero(self.beta):
            raise ValueError("elementary map requires alpha != 0 and beta != 0")

    def is_affine(self) -> bool:
        return self.p.degree <= 1

    def apply(self, z: Point) -> Point:
        x, y = z
        return (self.alpha * x + self.p(y), self.beta * y + self.gamma)

    def compose(self, other: "ElementaryMap") -> "ElementaryMap":
        """self o other (other applied first); elementary maps are closed."""
        o = other
        # alpha*(alpha_o x + p_o(y)) + p(beta_o y + gamma_o)
        p_new = o.p.scale(self.alpha).add(self.p.compose_linear(o.beta, o.gamma))
        return ElementaryMap(
            self.alpha * o.alpha,
            self.beta * o.beta,
            self.beta * o.gamma + self.gamma,
            p_new,
        )

    def inverse(self) -> "ElementaryMap":
        inv_beta = 1 / self.beta
        p_inner = self.p.compose_linear(inv_beta, -self.gamma * inv_beta)
        return ElementaryMap(
            1 / self.alpha,
            inv_beta,
            -self.gamma * inv_beta,
            p_inner.scale(-1 / self.alpha),
        )

    def to_affine(self) -> AffineMap:
        if not self.is_affine():
            raise ValueError("elementary map with deg p >= 2 is not affine")
        b = self.p.coeffs[1] if self.p.degree >= 1 else 0
        return AffineMap(self.alpha, b, self.p.coeffs[0], 0, self.beta, self.gamma)

    def expand(self) -> PolyMap2:
        first = Poly2({(1, 0): self.alpha} | {(0, k): c for k, c in enumerate(self.p.coeffs)})
        return PolyMap2(first, Poly2({(0, 1): self.beta, (0, 0): self.gamma}))

    def as_float(self) -> "ElementaryMap":
        return ElementaryMap(
            to_complex(self.alpha), to_complex(self.beta), to_complex(self.gamma), self.p.as_float()
        )


Letter = Union[AffineMap, ElementaryMap, HenonFactor]


def affine_from_elementary_form(a: AffineMap) -> ElementaryMap:
    """View a triangular affine map (c = 0) as a degree-<=1 elementary map."""
    if not a.is_elementary():
        raise ValueError("affine map with c != 0 has no elementary form")
    return ElementaryMap(a.a, a.d, a.g, Poly1([a.f, a.b]))


# ---------------------------------------------------------------------------
# Henon words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HenonMap:
    """Composition word of Henon factors, applied first-to-last."""

    factors: Tuple[HenonFactor, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a Henon map needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def degree(self) -> int:
        d = 1
        for f in self.factors:
            d *= f.degree
        return d

    def apply(self, z: Point) -> Point:
        for f in self.factors:
            z = f.apply(z)
        return z

    def apply_inverse(self, z: Point) -> Point:
        for f in reversed(self.factors):
            z = f.apply_inverse(z)
        return z

    def iterate(self, n: int) -> "HenonMap":
        if n < 1:
            raise ValueError("iterate count must be >= 1")
        return HenonMap(self.factors * n)

    def then(self, other: "HenonMap") -> "HenonMap":
        """The composition (other o self): self applied first."""
        return HenonMap(self.factors + other.factors)

    def conjugate_inverse(self) -> "HenonMap":
        """The Henon word tau o H^{-1} o tau (swap-conjugated inverse).

        Factorwise: (y, p(y) - delta x)^{-1} swap-conjugates to the factor
        (y, (p/delta)(y) - (1/delta) x); the factor order reverses.
        """
        out = []
        for f in reversed(self.factors):
            inv_delta = 1 / f.delta
            out.append(HenonFactor(f.p.scale(inv_delta), inv_delta))
        return HenonMap(tuple(out))

    def expand(self, budget: int | None = None) -> PolyMap2:
        acc = PolyMap2.identity()
        for f in self.factors:
            acc = polymap_compose(f.expand(), acc, budget)
        return acc

    def as_float(self) -> "HenonMap":
        return HenonMap(tuple(f.as_float() for f in self.factors))


def henon_apply(h: HenonMap, z: Point) -> Point:
    """Apply h; raises EscapedRangeError if a float orbit leaves range."""
    w = h.apply(z)
    _check_finite(w)
    return w


def henon_apply_inverse(h: HenonMap, z: Point) -> Point:
    w = h.apply_inverse(z)
    _check_finite(w)
    return w


def _check_finite(z: Point):
    for c in z:
        if isinstance(c, ExactComplex):
            continue
        zc = complex(c)
        if not (_finite(zc.real) and _finite(zc.imag)):
            raise EscapedRangeError("orbit escaped the representable float range")


def _finite(v: float) -> bool:
    return v == v and abs(v) != float("inf")


def henon_degree(h: HenonMap) -> int:
    return h.degree


def henon_inverse_word(h: HenonMap) -> "AutoWord":
    """H^{-1} as an affine/elementary word.

    Each inverse factor ((p(x) - y)/delta, x) equals e o tau with
    tau the swap and e(x, y) = (-x/delta + p(y)/delta, y).
    """
    letters: list[Letter] = []
    for f in reversed(h.factors):
        inv_delta = 1 / f.delta
        letters.append(AffineMap.swap())
        letters.append(ElementaryMap(-inv_delta, 1, 0, f.p.scale(inv_delta)))
    return AutoWord(tuple(letters))


# ---------------------------------------------------------------------------
# Automorphism words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AutoWord:
    """Word of affine / elementary / Henon letters, applied first-to-last."""

    letters: Tuple[Letter, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValueError("empty word")
        object.__setattr__(self, "letters", tuple(self.letters))

    @staticmethod
    def from_composition(letters: Sequence[Letter]) -> "AutoWord":
        """Build from composition order: leftmost letter applied last."""
        return AutoWord(tuple(reversed(list(letters))))

    def apply(self, z: Point) -> Point:
        for letter in self.letters:
            z = letter.apply(z)
        return z

    def invert(self) -> "AutoWord":
        out = []
        for letter in reversed(self.letters):
            if isinstance(letter, HenonFactor):
                raise ValueError(
                    "Henon-factor letters have no letter-level inverse; "
                    "use HenonMap.apply_inverse or henon_inverse_word"
                )
            out.append(letter.inverse())
        return AutoWord(tuple(out))

    def expand(self, budget: int | None = None) -> PolyMap2:
        acc = PolyMap2.identity()
        for letter in self.letters:
            acc = polymap_compose(letter.expand(), acc, budget)
        return acc

    def as_float(self) -> "AutoWord":
        return AutoWord(tuple(letter.as_float() for letter in self.letters))


def apply_word(w: Union[AutoWord, HenonMap], z: Point) -> Point:
    return w.apply(z)


def word_expand(w: Union[AutoWord, HenonMap], budget: int | None = None) -> PolyMap2:
    """Exact bivariate expansion, pointwise equal to the word's action."""
    return w.expand(budget)


# ---------------------------------------------------------------------------
# Structure of affine maps
# ---------------------------------------------------------------------------


def affine_power(s: AffineMap, n: int) -> AffineMap:
    """Closed form of s^n for diagonal-affine s(x, y) = (a x + f, d y + g).

    Uses the geometric-sum form (a^n x + f (a^n - 1)/(a - 1), ...) with the
    a = 1 (resp. d = 1) degeneration n*f (resp. n*g).
    """
    if n < 1:
        raise ValueError("power must be a positive integer")
    if not (scalar_is_zero(s.b) and scalar_is_zero(s.c)):
        raise ValueError("closed-form power requires a diagonal-affine map")

    def comp(a, f):
        an = a**n
        if scalar_is_zero(a - 1):
            return an, f * n
        return an, f * ((an - 1) / (a - 1))

    an, fn = comp(s.a, s.f)
    dn, gn = comp(s.d, s.g)
    return AffineMap(an, 0, fn, 0, dn, gn)


def normalize_affine(a: AffineMap, bparam: Scalar) -> Tuple[AffineMap, AffineMap]:
    """Split a non-elementary affine map as a = a1 o tau o a2.

    a1(x, y) = (b x + c y, y) with c = a.a/a.c, and
    a2(x, y) = (a.c x + a.d y + a.g, s2 y + r2); any b != 0 is admissible.
    Degenerate a.a = 0 gives c = 0 and a1 = (b x, y), which still factors
    exactly.
    """
    if scalar_is_zero(bparam):
        raise ValueError("b parameter must be nonzero")
    if a.is_elementary():
        raise ValueError("map is elementary affine (c = 0); nothing to normalize")
    # In the (alpha_i, beta_i, delta_i) reading of the rows:
    # first row (a.a, a.b, a.f), second row (a.c, a.d, a.g).
    c = a.a / a.c
    s2 = (a.b - c * a.d) / bparam
    r2 = (a.f - c * a.g) / bparam
    a1 = AffineMap(bparam, c, 0, 0, 1, 0)
    a2 = AffineMap(a.c, a.d, a.g, 0, s2, r2)
    return a1, a2


# ---------------------------------------------------------------------------
# Word classification
# ---------------------------------------------------------------------------

CASE_I = "Case-i"
CASE_II = "Case-ii"
CASE_III = "Case-iii"
CASE_IV = "Case-iv"
CASE_AFFINE = "affine"
CASE_HENON = "henon-word"

INDET_ONE_ZERO_ZERO = "[1:0:0]"
INDET_W_ONE_ZERO = "[w:1:0]"


@dataclass(frozen=True)
class WordClass:
    """Structural case of a word plus its indeterminacy data at infinity.

    ``w_fwd`` / ``w_bwd`` carry the w of a resolved [w:1:0] point; they stay
    None when the point is [1:0:0], absent, or unresolved.  ``w_heuristic``
    marks w values recovered numerically from leading coefficients.
    """

    case: str
    indeterminacy_fwd: Optional[str]
    indeterminacy_bwd: Optional[str]
    w_fwd: Optional[Scalar] = None
    w_bwd: Optional[Scalar] = None
    w_heuristic: bool = False


class _Token:
    __slots__ = ("value", "can_affine", "can_elementary")

    def __init__(self, value):
        self.value = value
        if isinstance(value, AffineMap):
            self.can_affine = True
            self.can_elementary = value.is_elementary()
        elif isinstance(value, ElementaryMap):
            self.can_elementary = True
            self.can_affine = value.is_affine()
        else:
            raise TypeError(f"unsupported letter {value!r}")


def _merge_tokens(tokens: list[_Token]) -> list[_Token]:
    """Merge adjacent same-kind letters until the word alternates strictly."""
    changed = True
    while changed and len(tokens) > 1:
        changed = False
        for k in range(len(tokens) - 1):
            left, right = tokens[k], tokens[k + 1]
            # left applied first; composite is right o left
            if left.can_affine and right.can_affine:
                la = left.value if isinstance(left.value, AffineMap) else left.value.to_affine()
                ra = right.value if isinstance(right.value, AffineMap) else right.value.to_affine()
                tokens[k : k + 2] = [_Token(ra.compose(la))]
                changed = True
                break
            if left.can_elementary and right.can_elementary:
                le = (
                    left.value
                    if isinstance(left.value, ElementaryMap)
                    else affine_from_elementary_form(left.value)
                )
                re = (
                    right.value
                    if isinstance(right.value, ElementaryMap)
                    else affine_from_elementary_form(right.value)
                )
                tokens[k : k + 2] = [_Token(re.compose(le))]
                changed = True
                break
    return tokens


def classify_word(w: AutoWord, resolve_w: bool = True) -> WordClass:
    """Reduce a word to its alternating pattern and name its case.

    Pure Henon-factor words classify as henon-word directly; mixed
    Henon/affine words are rejected.  For resolved cases the indeterminacy
    points are reported; the w of a [w:1:0] point is recovered from the
    leading form of the expanded dominant component and flagged heuristic.
    """
    kinds = {type(letter) for letter in w.letters}
    if HenonFactor in kinds:
        if kinds != {HenonFactor}:
            raise ValueError("words mixing Henon factors with affine/elementary letters are not classified")
        return WordClass(CASE_HENON, INDET_ONE_ZERO_ZERO, INDET_W_ONE_ZERO, w_bwd=0)

    tokens = _merge_tokens([_Token(v) for v in w.letters])

    if len(tokens) == 1:
        t = tokens[0]
        if t.can_affine:
            return WordClass(CASE_AFFINE, None, None)
        # single non-affine elementary letter: degenerate starts-E/ends-E word
        return WordClass(CASE_IV, None, None)

    # tokens are in application order; composition order reads them reversed
    first_applied = tokens[0]
    last_applied = tokens[-1]
    starts_affine = last_applied.can_affine  # leftmost letter of the composition
    ends_affine = first_applied.can_affine  # rightmost letter of the composition

    if starts_affine and not ends_affine:
        case = CASE_I
    elif not starts_affine and ends_affine:
        case = CASE_III
    elif starts_affine and ends_affine:
        case = CASE_II
    else:
        case = CASE_IV

    if case == CASE_I:
        w_bwd, heuristic = _resolve_w(_invert_tokens(tokens)) if resolve_w else (None, True)
        return WordClass(CASE_I, INDET_ONE_ZERO_ZERO, INDET_W_ONE_ZERO, None, w_bwd, heuristic)
    if case == CASE_III:
        w_fwd, heuristic = _resolve_w(tokens) if resolve_w else (None, True)
        return WordClass(CASE_III, INDET_W_ONE_ZERO, INDET_ONE_ZERO_ZERO, w_fwd, None, heuristic)
    return WordClass(case, None, None)


def _invert_tokens(tokens: list[_Token]) -> list[_Token]:
    return [_Token(t.value.inverse()) for t in reversed(tokens)]


def _resolve_w(tokens: list[_Token]) -> Tuple[Optional[Scalar], bool]:
    """w of the [w:1:0] indeterminacy point, from the dominant leading form.

    Heuristic: expands the word, takes the top homogeneous form of the
    maximal-degree component, and accepts only a perfect power lead*(x-w*y)^D;
    anything else is reported unresolved.
    """
    word = AutoWord(tuple(t.value for t in tokens))
    try:
        pm = word.expand()
    except Exception:
        return None, True
    deg = pm.total_degree
    comp = pm.first if pm.first.total_degree == deg else pm.second
    top = {i: c for (i, j), c in comp.terms() if i + j == deg}
    lead = top.get(deg)
    if lead is None or scalar_is_zero(lead):
        return None, True
    w_val = -(top.get(deg - 1, 0) / (deg * lead)) if deg >= 1 else None
    if w_val is None:
        return None, True
    # verify top == lead * (x - w y)^D
    power = Poly2({(1, 0): 1, (0, 1): -w_val})
    acc = Poly2.const(lead)
    for _ in range(deg):
        acc = acc.mul(power)
    residual = max(
        (
            scalar_abs(acc.coeff(i, deg - i) - top.get(i, 0))
            for i in range(deg + 1)
        ),
        default=0.0,
    )
    scale = max(scalar_abs(lead), 1.0)
    if residual > 1e-9 * scale:
        return None, True
    return w_val, True
