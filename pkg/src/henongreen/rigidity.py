"""Mechanical verification of the rigidity identities.

These are sampled or symbolic checks of the relations that constrain which
automorphisms can preserve Green level sets of a Henon word:

  * functoriality        G+ o H = d * G+ and G- o H = G-/d  (sampled),
  * level invariance     G+ constant on F-images of a level set (sampled
                         necessary condition, never a proof),
  * scaled commutation   H2 o H1 = C o H1 o H2 with C = (delta_- x,
                         delta_+ y), checked by exact symbolic expansion,
  * two-level constants  predicted |delta_+-| from level offsets, plus the
                         exact leading-coefficient relation
                         c_{H1}^{d2} c_{H2} = delta_+ c_{H2}^{d1} c_{H1},
  * iterate coincidence  exact search for F^m = H^n with a degree pre-filter,
  * affine normal forms  the coefficient tests (a x + f, d y + g) with
                         |a| = |d| = 1, and the triangular form c = 0.

Orientation convention: the scaled-commutation check compares H2 o H1
against C o (H1 o H2), with delta_- scaling the first component and delta_+
the second (the second components of the two orders differ by delta_+).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .algebra import (
    ExactComplex,
    PolyMap2,
    Scalar,
    is_exact,
    polymap_compose,
    polymap_equal,
    scalar_abs,
    scalar_abs2,
    to_complex,
)
from .boettcher import leading_constant
from .green import (
    DEFAULT_MAXITER,
    certified_radius,
    green_minus,
    green_plus,
    in_K_plus,
    sample_level_plus,
)
from .maps import AffineMap, AutoWord, HenonMap, word_expand

VERDICT_PASS = "PASS"
VERDICT_FAIL = "FAIL"


def _render_report(kind: str, verdict: str, fields: Sequence[Tuple[str, object]]) -> str:
    """Structured verifier report: stable field order for golden tests."""
    lines = [f"verdict: {verdict}", f"check: {kind}"]
    for name, value in fields:
        if isinstance(value, float):
            lines.append(f"{name}: {value:.6e}")
        else:
            lines.append(f"{name}: {value}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FunctorialReport:
    samples: int
    max_residual_plus: float
    max_residual_minus: float
    tolerance: float
    verdict: str

    def render(self) -> str:
        return _render_report(
            "functorial",
            self.verdict,
            [
                ("samples", self.samples),
                ("max_residual_plus", self.max_residual_plus),
                ("max_residual_minus", self.max_residual_minus),
                ("tolerance", self.tolerance),
            ],
        )

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_PASS


@dataclass(frozen=True)
class InvarianceReport:
    level: float
    samples: int
    max_deviation: float
    tolerance: float
    verdict: str

    def render(self) -> str:
        return _render_report(
            "invariance",
            self.verdict,
            [
                ("level", self.level),
                ("samples", self.samples),
                ("max_deviation", self.max_deviation),
                ("tolerance", self.tolerance),
            ],
        )

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_PASS


@dataclass(frozen=True)
class CommutationReport:
    """Outcome of the scaled-commutation expansion check.

    ``holds`` means every coefficient of expand(H2 o H1) matches the
    corresponding coefficient of expand(C o H1 o H2) within the tolerance;
    the predicted moduli restate |delta_-| and |delta_+| of the given C.
    """

    holds: bool
    delta_minus: Scalar
    delta_plus: Scalar
    max_residual: float
    predicted_modulus_minus: float
    predicted_modulus_plus: float
    tolerance: float

    def render(self) -> str:
        return _render_report(
            "scaled-commutation (H2 o H1 vs C o H1 o H2; C = (d- x, d+ y))",
            VERDICT_PASS if self.holds else VERDICT_FAIL,
            [
                ("delta_minus_modulus", self.predicted_modulus_minus),
                ("delta_plus_modulus", self.predicted_modulus_plus),
                ("max_residual", self.max_residual),
                ("tolerance", self.tolerance),
            ],
        )


@dataclass(frozen=True)
class TwoLevelReport:
    """Predicted scaling moduli from level offsets plus the constant check."""

    delta_plus_modulus: float
    delta_minus_modulus: float
    constant_relation_residual: float

    def render(self) -> str:
        return _render_report(
            "two-level-constants",
            VERDICT_PASS,
            [
                ("delta_plus_modulus", self.delta_plus_modulus),
                ("delta_minus_modulus", self.delta_minus_modulus),
                ("constant_relation_residual", self.constant_relation_residual),
            ],
        )


# ---------------------------------------------------------------------------
# Sampled verifiers
# ---------------------------------------------------------------------------


def _escape_samples(h: HenonMap, n: int, rng: random.Random, maxiter: int):
    """Random points with positive forward escape rate, near the filtration."""
    radius = certified_radius(h).R
    out = []
    attempts = 0
    while len(out) < n and attempts < 200 * n:
        attempts += 1
        t = radius * (1.2 + 2.0 * rng.random())
        phase = 2.0 * math.pi * rng.random()
        x = (rng.random() - 0.5) * 2.0 * radius
        y = t * complex(math.cos(phase), math.sin(phase))
        g = green_plus(h, (x, y), 1e-11, maxiter)
        if g.escaped and not g.range_escape:
            out.append((complex(x), y))
    if len(out) < n:
        raise ValueError("could not sample enough escaping points")
    return out


def verify_functorial(
    h: HenonMap,
    n_samples: int = 1000,
    tol: float = 1e-6,
    maxiter: int = DEFAULT_MAXITER,
    seed: int = 7,
    _perturb=None,
) -> FunctorialReport:
    """Sampled check of G+ o H = d G+ and G- o H = G-/d in an escape annulus."""
    rng = random.Random(seed)
    d = h.degree
    worst_plus = 0.0
    worst_minus = 0.0
    samples = _escape_samples(h, n_samples, rng, maxiter)
    h_float = h.as_float()
    for idx, z in enumerate(samples):
        image = h_float.apply(z)
        gp_z = green_plus(h, z, 1e-11, maxiter).value
        gp_hz = green_plus(h, image, 1e-11, maxiter).value
        if _perturb is not None:
            gp_hz += _perturb(idx)
        worst_plus = max(worst_plus, abs(gp_hz - d * gp_z))
        gm_z = green_minus(h, z, 1e-11, maxiter).value
        gm_hz = green_minus(h, image, 1e-11, maxiter).value
        worst_minus = max(worst_minus, abs(gm_hz - gm_z / d))
    verdict = VERDICT_PASS if max(worst_plus, worst_minus) <= tol else VERDICT_FAIL
    return FunctorialReport(len(samples), worst_plus, worst_minus, tol, verdict)


def verify_invariance(
    h: HenonMap,
    f: Union[AutoWord, HenonMap, AffineMap],
    c: float,
    n_samples: int = 100,
    tol: float = 1e-6,
    maxiter: int = DEFAULT_MAXITER,
    seed: int = 11,
) -> InvarianceReport:
    """Sampled necessary condition for F(K_{H,c}+) = K_{H,c}+.

    For c > 0 the samples lie on the level set {G+ = c} (located by ray
    bisection); for c = 0 they are certified members of the bounded-orbit
    set.  Each sample is pushed through F and the Green value compared.
    This is evidence, never a proof of complete invariance.
    """
    if c < 0:
        raise ValueError("level must be nonnegative")
    rng = random.Random(seed)
    radius = certified_radius(h).R
    f_float = f.as_float()
    worst = 0.0
    used = 0
    attempts = 0
    while used < n_samples and attempts < 400 * n_samples:
        attempts += 1
        if c > 0:
            x0 = (rng.random() - 0.5) * 2.0
            theta = 2.0 * math.pi * rng.random()
            try:
                lp = sample_level_plus(h, c, (x0, theta), tol=min(1e-8, tol / 10), maxiter=maxiter)
            except Exception:
                continue
            z = lp.point
            target = lp.achieved_level
        else:
            z = (
                complex((rng.random() - 0.5) * 2.0, (rng.random() - 0.5) * 2.0),
                complex((rng.random() - 0.5) * 2.0, (rng.random() - 0.5) * 2.0),
            )
            if in_K_plus(h, z, maxiter) is not True:
                continue
            target = 0.0
        image = f_float.apply(z)
        g_image = green_plus(h, image, min(1e-10, tol / 10), maxiter).value
        worst = max(worst, abs(g_image - target))
        used += 1
    if used < n_samples:
        raise ValueError(
            f"could only place {used}/{n_samples} samples on level {c} "
            f"(filtration radius {radius})"
        )
    verdict = VERDICT_PASS if worst <= tol else VERDICT_FAIL
    return InvarianceReport(c, used, worst, tol, verdict)


# ---------------------------------------------------------------------------
# Symbolic verifiers
# ---------------------------------------------------------------------------


def check_commutation_scaled(
    h1: HenonMap,
    h2: HenonMap,
    scaling: Tuple[Scalar, Scalar],
    tol: float = 0.0,
    budget: int | None = None,
) -> CommutationReport:
    """Expand H2 o H1 and C o H1 o H2 and compare coefficients.

    ``scaling`` is (delta_minus, delta_plus): C(x, y) = (delta_- x,
    delta_+ y).  On the exact backend use tol = 0 for a bit-exact verdict.
    """
    delta_minus, delta_plus = scaling
    left = h1.then(h2).expand(budget)  # H2 o H1
    right = h2.then(h1).expand(budget)  # H1 o H2
    scaled = PolyMap2(right.first.scale(delta_minus), right.second.scale(delta_plus))
    holds = polymap_equal(left, scaled, tol)
    residual = max(
        left.first.max_coeff_diff(scaled.first),
        left.second.max_coeff_diff(scaled.second),
    )
    return CommutationReport(
        holds,
        delta_minus,
        delta_plus,
        residual,
        scalar_abs(delta_minus),
        scalar_abs(delta_plus),
        tol,
    )


def two_level_delta(
    h1: HenonMap,
    h2: HenonMap,
    c1: float,
    c2: float,
    d1: float,
    d2: float,
) -> TwoLevelReport:
    """Predicted |delta_+| and |delta_-| for coinciding level pairs.

    With level offsets c = c1 - c2 (forward) and d = d1 - d2 (backward),

        |delta_+| = exp(c (d_{H1}-1)(d_{H2}-1)),
        |delta_-| = exp(d (d_{H1}-1)(d_{H2}-1)).

    Independently, delta_+ is evaluated from the exact leading-coefficient
    relation c_{H1}^{d_{H2}} c_{H2} = delta_+ c_{H2}^{d_{H1}} c_{H1}, and its
    modulus compared against the prediction at the offset forced by the
    leading constants, c = log|c_{H1}|/(d_{H1}-1) - log|c_{H2}|/(d_{H2}-1).
    On the exact backend the comparison is made on squared moduli and the
    residual is exactly zero.
    """
    deg1 = h1.degree
    deg2 = h2.degree
    expo = (deg1 - 1) * (deg2 - 1)
    delta_plus_mod = math.exp((c1 - c2) * expo)
    delta_minus_mod = math.exp((d1 - d2) * expo)

    k1 = leading_constant(h1).c_H
    k2 = leading_constant(h2).c_H
    # delta_+ from the constant relation
    if is_exact(k1) and is_exact(k2):
        e1 = k1 if isinstance(k1, ExactComplex) else ExactComplex(k1)
        e2 = k2 if isinstance(k2, ExactComplex) else ExactComplex(k2)
        ratio_abs2 = (e1 ** deg2 * e2 / (e2 ** deg1 * e1)).abs2()
        # |delta_+|^2 predicted at the forced offset: (|c1|^2)^(d2-1)/(|c2|^2)^(d1-1)
        predicted_abs2 = Fraction(e1.abs2()) ** (deg2 - 1) / Fraction(e2.abs2()) ** (deg1 - 1)
        residual = 0.0 if ratio_abs2 == predicted_abs2 else float(abs(ratio_abs2 - predicted_abs2)) ** 0.5
    else:
        z1 = to_complex(k1)
        z2 = to_complex(k2)
        ratio = z1**deg2 * z2 / (z2**deg1 * z1)
        predicted = abs(z1) ** (deg2 - 1) / abs(z2) ** (deg1 - 1)
        residual = abs(abs(ratio) - predicted)
    return TwoLevelReport(delta_plus_mod, delta_minus_mod, residual)


def iterate_coincidence(
    f: Union[HenonMap, AutoWord],
    h: HenonMap,
    mmax: int,
    nmax: int,
    budget: int | None = None,
) -> Optional[Tuple[int, int]]:
    """Least (m, n), lexicographically, with F^m = H^n exactly, or None.

    Degrees are compared first (deg F^m = deg H^n is necessary), so most
    pairs are rejected without expansion; the survivors are compared by exact
    symbolic expansion.
    """
    if mmax < 1 or nmax < 1:
        raise ValueError("mmax and nmax must be positive")
    base_f = word_expand(f, budget)
    base_h = word_expand(h, budget)
    deg_f = base_f.total_degree
    deg_h = base_h.total_degree

    f_powers = {1: base_f}
    h_powers = {1: base_h}

    def power(cache, base, k):
        if k not in cache:
            cache[k] = polymap_compose(base, power(cache, base, k - 1), budget)
        return cache[k]

    for m in range(1, mmax + 1):
        for n in range(1, nmax + 1):
            if deg_f**m != deg_h**n:
                continue
            fm = power(f_powers, base_f, m)
            hn = power(h_powers, base_h, n)
            if polymap_equal(fm, hn, 0.0):
                return (m, n)
    return None


def check_affine_form(s: AffineMap, mode: str, tol: float = 1e-12) -> bool:
    """Coefficient test of the two affine normal forms.

    mode 'K-plus-form': b = c = 0 and |a| = |d| = 1 (within tol on floats,
    exact on the exact backend); mode 'level-form': c = 0.
    """
    if mode == "level-form":
        return _is_zero_scalar(s.c, tol)
    if mode == "K-plus-form":
        return (
            _is_zero_scalar(s.b, tol)
            and _is_zero_scalar(s.c, tol)
            and _is_unit_modulus(s.a, tol)
            and _is_unit_modulus(s.d, tol)
        )
    raise ValueError(f"unknown mode {mode!r}")


def _is_zero_scalar(v, tol: float) -> bool:
    if is_exact(v):
        return scalar_abs2(v) == 0
    return scalar_abs(v) <= tol


def _is_unit_modulus(v, tol: float) -> bool:
    if is_exact(v):
        return scalar_abs2(v) == 1
    return abs(scalar_abs(v) - 1.0) <= tol
