"""Complex scalars and sparse bivariate polynomials over two backends.

Everything downstream (map words, symbolic expansion, the identity checks)
is built on three layers defined here:

  Scalar   -- either a Python ``complex`` (float backend) or an
              :class:`ExactComplex` (pair of ``Fraction``s, exact backend).
  Poly1    -- dense univariate polynomial, coefficients indexed by power.
  Poly2 /
  PolyMap2 -- sparse bivariate polynomial {(i, j): coeff} and a pair of them
              representing a polynomial self-map of C^2.

The exact backend exists so that identity checks (commutation relations,
iterate coincidence, recomposition of affine factorizations) can be decided
by bit-exact coefficient comparison instead of floating thresholds.  The two
backends are never mixed inside one polynomial: ExactComplex refuses
arithmetic with floats rather than silently losing exactness.

All values are immutable after construction; every operation is a pure
function, safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

# Compositions whose sparse expansion would exceed this many monomials fail
# loudly instead of thrashing.
MONOMIAL_BUDGET = 10**6


class MonomialBudgetError(Exception):
    """Raised when a polynomial operation would exceed the monomial budget."""


_RationalLike = Union[int, Fraction]


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot build an exact rational from {v!r}")


class ExactComplex:
    """Complex number with exact rational real and imaginary parts.

    Arithmetic with ints and Fractions is allowed (they embed exactly);
    arithmetic with floats or complex is rejected so exactness can never be
    lost by accident.  Use :meth:`to_complex` for an explicit conversion.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactComplex is immutable")

    # -- coercion helpers -------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactComplex(other, 0)
        return None

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactComplex(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        return ExactComplex(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (ExactComplex(1) / self) ** (-n)
        result = ExactComplex(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.sqrt(float(self.abs2()))

    def __repr__(self):
        return f"ExactComplex({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[complex, ExactComplex]


def as_exact(v) -> ExactComplex:
    """Build an ExactComplex from an int, Fraction, string or ExactComplex."""
    if isinstance(v, ExactComplex):
        return v
    return ExactComplex(_as_fraction(v), 0)


def is_exact(s) -> bool:
    return isinstance(s, (ExactComplex, int, Fraction))


def scalar_abs(s) -> float:
    """|s| as a float, for either backend."""
    if isinstance(s, ExactComplex):
        return abs(s)
    return abs(complex(s))


def scalar_abs2(s):
    """Squared modulus: exact Fraction on the exact backend, float otherwise."""
    if isinstance(s, ExactComplex):
        return s.abs2()
    if isinstance(s, (int, Fraction)):
        return Fraction(s) * Fraction(s)
    z = complex(s)
    return z.real * z.real + z.imag * z.imag


def to_complex(s) -> complex:
    if isinstance(s, ExactComplex):
        return s.to_complex()
    return complex(s)


def scalar_is_zero(s) -> bool:
    if isinstance(s, ExactComplex):
        return not bool(s)
    return s == 0


def format_scalar(s) -> str:
    """Report form of a scalar: 'a+bi' decimals or 'p/q + r/s i' fractions."""
    if isinstance(s, (int, Fraction)):
        return str(s)
    if isinstance(s, ExactComplex):
        if s.im == 0:
            return str(s.re)
        if s.re == 0:
            return f"{s.im} i"
        sign = "-" if s.im < 0 else "+"
        return f"{s.re} {sign} {abs(s.im)} i"
    z = complex(s)
    if z.imag == 0:
        return repr(z.real)
    if z.real == 0:
        return f"{z.imag!r}i"
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------


class Poly1:
    """Dense univariate polynomial; coeffs[k] multiplies y^k.

    The zero polynomial is stored as a single zero coefficient with degree 0;
    otherwise the leading coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = list(coeffs)
        if not cs:
            cs = [0]
        while len(cs) > 1 and scalar_is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly1 is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.degree == 0 and scalar_is_zero(self.coeffs[0])

    def __call__(self, z):
        # Horner evaluation; exact on the exact backend.
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, Poly1):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def add(self, other: "Poly1") -> "Poly1":
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else 0
            b = other.coeffs[k] if k < len(other.coeffs) else 0
            out.append(a + b)
        return Poly1(out)

    def scale(self, s) -> "Poly1":
        return Poly1([c * s for c in self.coeffs])

    def mul(self, other: "Poly1") -> "Poly1":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly1(out)

    def compose_linear(self, b, g) -> "Poly1":
        """p(b*y + g), computed by Horner over Poly1 arithmetic."""
        lin = Poly1([g, b])
        acc = Poly1([self.coeffs[-1]])
        for c in reversed(self.coeffs[:-1]):
            acc = acc.mul(lin).add(Poly1([c]))
        return acc

    def as_float(self) -> "Poly1":
        return Poly1([to_complex(c) for c in self.coeffs])

    def abs_coeff_sum_below_lead(self) -> float:
        return sum(scalar_abs(c) for c in self.coeffs[:-1])

    def __repr__(self):
        return f"Poly1({list(self.coeffs)!r})"


def poly1_eval(p: Poly1, z):
    """Horner-style evaluation of p at z."""
    return p(z)


# ---------------------------------------------------------------------------
# Sparse bivariate polynomials
# ---------------------------------------------------------------------------


def _grlex_key(exp):
    i, j = exp
    return (-(i + j), -i)


class Poly2:
    """Sparse bivariate polynomial {(i, j): coeff}, no stored zeros.

    Iteration and text output follow graded-lex order (total degree first,
    then x-power), leading monomial first, so serialized forms are
    byte-stable.
    """

    __slots__ = ("_terms", "total_degree")

    def __init__(self, terms: Mapping):
        cleaned = {}
        for exp, c in terms.items():
            i, j = exp
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent pair {exp}")
            if not scalar_is_zero(c):
                cleaned[(i, j)] = c
        object.__setattr__(self, "_terms", cleaned)
        deg = max((i + j for (i, j) in cleaned), default=0)
        object.__setattr__(self, "total_degree", deg)

    def __setattr__(self, name, value):
        raise AttributeError("Poly2 is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly2":
        return Poly2({})

    @staticmethod
    def const(c) -> "Poly2":
        return Poly2({(0, 0): c})

    @staticmethod
    def var_x() -> "Poly2":
        return Poly2({(1, 0): 1})

    @staticmethod
    def var_y() -> "Poly2":
        return Poly2({(0, 1): 1})

    # -- queries -----------------------------------------------------------

    def terms(self):
        """Monomials in graded-lex order, leading first."""
        return [(exp, self._terms[exp]) for exp in sorted(self._terms, key=_grlex_key)]

    def coeff(self, i: int, j: int):
        return self._terms.get((i, j), 0)

    def num_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def eval(self, x, y):
        # evaluation at inexact points coerces exact coefficients to complex
        inexact = isinstance(x, (float, complex)) or isinstance(y, (float, complex))
        acc = 0
        for (i, j), c in self._terms.items():
            if inexact and isinstance(c, ExactComplex):
                c = c.to_complex()
            acc = acc + c * x**i * y**j
        return acc

    # -- arithmetic ----------------------------------------------------------

    def add(self, other: "Poly2") -> "Poly2":
        out = dict(self._terms)
        for exp, c in other._terms.items():
            if exp in out:
                out[exp] = out[exp] + c
            else:
                out[exp] = c
        return Poly2(out)

    def sub(self, other: "Poly2") -> "Poly2":
        out = dict(self._terms)
        for exp, c in other._terms.items():
            if exp in out:
                out[exp] = out[exp] - c
            else:
                out[exp] = -c
        return Poly2(out)

    def neg(self) -> "Poly2":
        return Poly2({exp: -c for exp, c in self._terms.items()})

    def scale(self, s) -> "Poly2":
        return Poly2({exp: c * s for exp, c in self._terms.items()})

    def mul(self, other: "Poly2", budget: int | None = None) -> "Poly2":
        limit = MONOMIAL_BUDGET if budget is None else budget
        if self.num_terms() * other.num_terms() > 64 * limit:
            raise MonomialBudgetError(
                f"product of {self.num_terms()} x {other.num_terms()} terms "
                f"exceeds the monomial budget {limit}"
            )
        out = {}
        for (i1, j1), a in self._terms.items():
            for (i2, j2), b in other._terms.items():
                exp = (i1 + i2, j1 + j2)
                if exp in out:
                    out[exp] = out[exp] + a * b
                else:
                    out[exp] = a * b
            if len(out) > limit:
                raise MonomialBudgetError(
                    f"intermediate result exceeds the monomial budget {limit}"
                )
        return Poly2(out)

    def __eq__(self, other):
        if not isinstance(other, Poly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]))))

    def max_coeff_diff(self, other: "Poly2") -> float:
        """max |coefficient difference| between self and other, as a float."""
        worst = 0.0
        exps = set(self._terms) | set(other._terms)
        for exp in exps:
            d = self.coeff(*exp) - other.coeff(*exp)
            worst = max(worst, scalar_abs(d))
        return worst

    def text(self) -> str:
        """Graded-lex monomial list ``c * x^i * y^j``, leading first."""
        if self.is_zero():
            return "0"
        parts = []
        for (i, j), c in self.terms():
            parts.append(f"({format_scalar(c)}) * x^{i} * y^{j}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly2({self._terms!r})"


class PolyMap2:
    """Pair of Poly2 components: a polynomial self-map of C^2."""

    __slots__ = ("first", "second")

    def __init__(self, first: Poly2, second: Poly2):
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMap2 is immutable")

    @staticmethod
    def identity() -> "PolyMap2":
        return PolyMap2(Poly2.var_x(), Poly2.var_y())

    @property
    def total_degree(self) -> int:
        return max(self.first.total_degree, self.second.total_degree)

    def eval(self, x, y):
        return (self.first.eval(x, y), self.second.eval(x, y))

    def __eq__(self, other):
        if not isinstance(other, PolyMap2):
            return NotImplemented
        return self.first == other.first and self.second == other.second

    def __repr__(self):
        return f"PolyMap2({self.first!r}, {self.second!r})"


def poly2_compose(p: Poly2, m: PolyMap2, budget: int | None = None) -> Poly2:
    """Substitute x <- m.first, y <- m.second into p.

    Horner over the x-power rows, each row itself evaluated by Horner in
    m.second, so the cost is one Poly2 multiplication per power instead of
    one per monomial.
    """
    if p.is_zero():
        return Poly2.zero()
    rows: dict[int, dict[int, object]] = {}
    for (i, j), c in p._terms.items():
        rows.setdefault(i, {})[j] = c
    max_i = max(rows)

    def row_poly(i: int) -> Poly2:
        row = rows.get(i)
        if row is None:
            return Poly2.zero()
        max_j = max(row)
        acc = Poly2.const(row[max_j])
        for j in range(max_j - 1, -1, -1):
            acc = acc.mul(m.second, budget)
            if j in row:
                acc = acc.add(Poly2.const(row[j]))
        return acc

    acc = row_poly(max_i)
    for i in range(max_i - 1, -1, -1):
        acc = acc.mul(m.first, budget)
        r = row_poly(i)
        if not r.is_zero():
            acc = acc.add(r)
    return acc


def polymap_compose(f: PolyMap2, g: PolyMap2, budget: int | None = None) -> PolyMap2:
    """(f o g): apply g first, then f."""
    return PolyMap2(
        poly2_compose(f.first, g, budget),
        poly2_compose(f.second, g, budget),
    )


def polymap_equal(f: PolyMap2, g: PolyMap2, tol: float) -> bool:
    """True iff every coefficient difference has modulus <= tol.

    On the exact backend tol must be 0 and the comparison is bit-exact.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if tol == 0:
        return f.first == g.first and f.second == g.second
    return (
        f.first.max_coeff_diff(g.first) <= tol
        and f.second.max_coeff_diff(g.second) <= tol
    )
