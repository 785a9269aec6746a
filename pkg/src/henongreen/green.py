"""Escape-rate Green functions with certified error bounds.

The forward Green function of a Henon word H of degree d is the escape rate

    G+(z) = lim (1/d^n) log+ ||H^n(z)||,

zero exactly on the set of bounded forward orbits.  The computation rests on
the filtration of C^2 near infinity,

    V+ = {|x| < |y|, |y| > R},  V- = {|y| < |x|, |x| > R},  V = {|x|,|y| <= R},

for a radius R certified so that every factor maps V+ into V+ while at least
doubling |y| (and the inverse factors do the same on V- with |x|).  Once the
orbit enters V+ the engine telescopes log|y| with a geometric tail bound, so
every returned value carries a sound error bound rather than a heuristic one.

Levels and clipped values: G_{c}(z) = max(G(z) - c, 0); points of the level
set {G = c} are located by bisection along rays.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from ._purekernel import STATUS_ESCAPED, STATUS_RANGE, MapData
from .algebra import scalar_abs, to_complex
from .maps import AutoWord, HenonMap

DEFAULT_TOL = 1e-10
DEFAULT_MAXITER = 1000

REGION_V_PLUS = "Vplus"
REGION_V_MINUS = "Vminus"
REGION_V = "V"

UNDECIDED = None  # tri-state return of in_K_plus: True / False / UNDECIDED


class CertificationError(Exception):
    """Filtration certification failed; the coefficients are pathological."""


class BracketingError(Exception):
    """A level-set ray search could not bracket the requested level."""


@dataclass(frozen=True)
class FactorCertificate:
    """Grid-certified bounds for one factor at the chosen radius."""

    r_formula_fwd: float
    r_formula_bwd: float
    margin_fwd: float
    margin_bwd: float


@dataclass(frozen=True)
class FiltrationRadius:
    """Certified filtration radius R with its per-factor certificate data."""

    R: float
    certificates: Tuple[FactorCertificate, ...]
    grid_points: int
    doublings: int


@dataclass(frozen=True)
class GreenValue:
    """An escape-rate estimate with a sound error bound.

    escaped=False forces value = 0; ``undecided`` marks a bounded-budget
    result whose certificate is weaker than the requested tolerance (only
    possible near the Julia boundary or with a tiny iteration cap).
    ``range_escape`` marks orbits that left the representable float range,
    which callers treat as deep escape.
    """

    value: float
    error_bound: float
    iterations: int
    escaped: bool
    undecided: bool = False
    range_escape: bool = False


@dataclass(frozen=True)
class LevelPoint:
    """A sampled member of a Green level set {G+ = c}."""

    point: Tuple[complex, complex]
    achieved_level: float
    residual: float


@dataclass(frozen=True)
class MultiplierEstimate:
    """Median ratio G_c(F(z))/G_c(z) over a sample set, b- = 1/b+."""

    b_plus: float
    b_minus: float
    residual: float
    samples_used: int


# ---------------------------------------------------------------------------
# Filtration
# ---------------------------------------------------------------------------

_ANGLES = [2.0 * math.pi * k / 8.0 + 0.1 for k in range(8)]
_SHELLS = [1.0, 1.5, 2.0, 4.0, 8.0]
_RATIOS = [0.0, 0.25, 0.5, 0.75, 1.0]


def _factor_margins(factor, radius: float) -> Tuple[float, float, int]:
    """Worst certified slack of the doubling bounds on the sample grid.

    Forward: |p(y) - delta*x| - 2|y| over |y| >= max(|x|, R);
    backward: |p(x) - y| - 2|delta||x| over |x| >= max(|y|, R).
    """
    coeffs = [to_complex(c) for c in factor.p.coeffs]
    delta = to_complex(factor.delta)

    def p_eval(z: complex) -> complex:
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * z + c
        return acc

    margin_fwd = math.inf
    margin_bwd = math.inf
    count = 0
    for shell in _SHELLS:
        big = radius * shell
        for ratio in _RATIOS:
            small = big * ratio
            for th_big in _ANGLES:
                zb = big * cmath.exp(1j * th_big)
                for th_small in _ANGLES:
                    zs = small * cmath.exp(1j * th_small)
                    count += 1
                    margin_fwd = min(margin_fwd, abs(p_eval(zb) - delta * zs) - 2.0 * big)
                    margin_bwd = min(
                        margin_bwd, abs(p_eval(zb) - zs) - 2.0 * abs(delta) * big
                    )
    return margin_fwd, margin_bwd, count


def filtration_radius(h: HenonMap, max_doublings: int = 60) -> FiltrationRadius:
    """Certified radius of the invariant filtration for h.

    Seeds R from the per-factor coefficient formulas (forward and backward),
    then certifies the doubling bounds on a grid of boundary-adjacent sample
    points; on a failed margin the radius doubles and the grid check repeats.
    """
    r_fwd = []
    r_bwd = []
    for f in h.factors:
        lead = scalar_abs(f.p.lead)
        lower = f.p.abs_coeff_sum_below_lead()
        ad = scalar_abs(f.delta)
        r_fwd.append(max(1.0, (2.0 + ad + lower) / lead))
        r_bwd.append(max(1.0, (1.0 + lower + 2.0 * ad) / lead))
    radius = max(max(r_fwd), max(r_bwd))

    for doubling in range(max_doublings + 1):
        certs = []
        total = 0
        ok = True
        for j, f in enumerate(h.factors):
            mf, mb, count = _factor_margins(f, radius)
            total += count
            certs.append(FactorCertificate(r_fwd[j], r_bwd[j], mf, mb))
            if mf < 0.0 or mb < 0.0:
                ok = False
        if ok:
            return FiltrationRadius(radius, tuple(certs), total, doubling)
        radius *= 2.0
    raise CertificationError(
        f"filtration certification failed after {max_doublings} doublings; "
        "the factor coefficients are pathological"
    )


def region_of(z: Tuple[complex, complex], fr: Union[FiltrationRadius, float]) -> str:
    """Strict membership in Vplus / Vminus / V; boundary ties resolve to V."""
    radius = fr.R if isinstance(fr, FiltrationRadius) else float(fr)
    ax = abs(to_complex(z[0]))
    ay = abs(to_complex(z[1]))
    if ay > ax and ay > radius:
        return REGION_V_PLUS
    if ax > ay and ax > radius:
        return REGION_V_MINUS
    return REGION_V


# ---------------------------------------------------------------------------
# Map data cache
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _cached(h: HenonMap) -> Tuple[FiltrationRadius, MapData]:
    fr = filtration_radius(h)
    return fr, kernels.build_map_data(h, fr.R)


def map_data(h: HenonMap) -> MapData:
    return _cached(h)[1]


def certified_radius(h: HenonMap) -> FiltrationRadius:
    return _cached(h)[0]


def growth_constants(h: HenonMap) -> Tuple[float, float]:
    """(K, C): |G+ - log|y|| <= K on V+, and G+ <= max(log+|x|,log+|y|) + C.

    K sums the phase constants' worst case with a numerically evaluated
    telescoping tail from |y| = R; C is the coefficient-derived global chain
    constant.  Both are sound but not claimed minimal.
    """
    md = map_data(h)
    k_phase = max(abs(k) for k in md.kq)
    tail = 0.0
    weight = 1.0
    lower = md.radius
    for _ in range(2000):
        weight /= md.d_min
        r = md.m_max / lower
        if r >= 1.0:
            # cannot happen for a certified radius, but keep the bound finite
            term = weight * (math.log(2.0) + abs(math.log(lower)) + 10.0)
        else:
            term = weight * (-math.log(1.0 - r))
        tail += term
        lower *= 2.0
        if term < 1e-15:
            break
    return k_phase + tail, md.c_l3


# ---------------------------------------------------------------------------
# Green values
# ---------------------------------------------------------------------------


def _to_point(z) -> Tuple[complex, complex]:
    return (to_complex(z[0]), to_complex(z[1]))


def _wrap(value, err, iters, status, tol) -> GreenValue:
    if status == STATUS_ESCAPED:
        return GreenValue(value, err, iters, True)
    if status == STATUS_RANGE:
        return GreenValue(value, err, iters, True, range_escape=True)
    return GreenValue(0.0, err, iters, False, undecided=err > tol)


def green_plus(
    h: HenonMap,
    z,
    tol: float = DEFAULT_TOL,
    maxiter: int = DEFAULT_MAXITER,
) -> GreenValue:
    """Certified forward escape rate G+ at z."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, y = _to_point(z)
    md = map_data(h)
    value, err, iters, status = kernels.green_plus_point(md, x, y, tol, maxiter)
    return _wrap(value, err, iters, status, tol)


def green_minus(
    h: HenonMap,
    z,
    tol: float = DEFAULT_TOL,
    maxiter: int = DEFAULT_MAXITER,
) -> GreenValue:
    """Certified backward escape rate G- at z (mirror of green_plus)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, y = _to_point(z)
    md = map_data(h)
    value, err, iters, status = kernels.green_minus_point(md, x, y, tol, maxiter)
    return _wrap(value, err, iters, status, tol)


def green_plus_batch(
    h: HenonMap,
    xs: np.ndarray,
    ys: np.ndarray,
    tol: float = DEFAULT_TOL,
    maxiter: int = DEFAULT_MAXITER,
    force_engine: Optional[str] = None,
):
    """Vectorized forward Green values; see kernels.green_plus_batch."""
    md = map_data(h)
    return kernels.green_plus_batch(md, xs, ys, tol, maxiter, force_engine)


def in_K_plus(h: HenonMap, z, maxiter: int = DEFAULT_MAXITER):
    """False iff the orbit enters V+ within maxiter sweeps; True iff it stays
    in V u V-; UNDECIDED (None) when the orbit leaves the float range first."""
    md = map_data(h)
    x, y = _to_point(z)
    r = md.radius
    for _ in range(maxiter):
        ax = abs(x)
        ay = abs(y)
        if ay > ax and ay > r:
            return False
        for q in range(md.m):
            cs = md.coeffs[q]
            acc = cs[-1]
            for k in range(len(cs) - 2, -1, -1):
                acc = acc * y + cs[k]
            x, y = y, acc - md.deltas[q] * x
        if not (math.isfinite(y.real) and math.isfinite(y.imag) and math.isfinite(x.real) and math.isfinite(x.imag)):
            return UNDECIDED
    ax = abs(x)
    ay = abs(y)
    if ay > ax and ay > r:
        return False
    return True


def green_clipped(
    h: HenonMap,
    z,
    c: float,
    tol: float = DEFAULT_TOL,
    maxiter: int = DEFAULT_MAXITER,
) -> GreenValue:
    """max(G+ - c, 0) with the error bound inherited from G+."""
    if c < 0:
        raise ValueError("clip level c must be nonnegative")
    g = green_plus(h, z, tol, maxiter)
    return GreenValue(
        max(g.value - c, 0.0),
        g.error_bound,
        g.iterations,
        g.escaped,
        g.undecided,
        g.range_escape,
    )


def escape_partials(h: HenonMap, z, maxiter: int = DEFAULT_MAXITER, count: int = 8):
    """Successive sweep-boundary partial estimates after filtration entry."""
    md = map_data(h)
    x, y = _to_point(z)
    return kernels.escape_partials(md, x, y, maxiter, count)


# ---------------------------------------------------------------------------
# Level sets
# ---------------------------------------------------------------------------

_BISECT_T_MIN = 1e-6
_BISECT_T_MAX = 1e12


def sample_level_plus(
    h: HenonMap,
    c: float,
    ray: Tuple[complex, float],
    tol: float = 1e-8,
    maxiter: int = DEFAULT_MAXITER,
) -> LevelPoint:
    """A point with G+ = c on the ray z(t) = (x0, t e^{i theta}), t > 0.

    Bisection between a t with G+ < c and one with G+ > c; below the
    filtration region this brackets the first crossing found.
    """
    if c <= 0:
        raise ValueError("level c must be positive")
    x0, theta = to_complex(ray[0]), float(ray[1])
    direction = cmath.exp(1j * theta)
    gtol = min(tol / 8.0, 1e-10)

    def g(t: float) -> float:
        return green_plus(h, (x0, t * direction), gtol, maxiter).value

    radius = certified_radius(h).R
    t_hi = max(2.0 * radius, 1.0)
    while g(t_hi) <= c:
        t_hi *= 2.0
        if t_hi > _BISECT_T_MAX:
            raise BracketingError(f"no point with G+ > {c} on the ray below t = {_BISECT_T_MAX}")
    t_lo = t_hi / 2.0
    while g(t_lo) >= c:
        t_lo /= 2.0
        if t_lo < _BISECT_T_MIN:
            raise BracketingError(f"no point with G+ < {c} on the ray above t = {_BISECT_T_MIN}")

    t_mid = t_hi
    for _ in range(200):
        t_mid = 0.5 * (t_lo + t_hi)
        val = g(t_mid)
        if abs(val - c) <= tol:
            achieved = val
            break
        if val > c:
            t_hi = t_mid
        else:
            t_lo = t_mid
    else:
        raise BracketingError("bisection failed to reach the requested residual")
    return LevelPoint((x0, t_mid * direction), achieved, abs(achieved - c))


def estimate_multiplier(
    h: HenonMap,
    f: Union[AutoWord, HenonMap],
    c: float,
    samples: Sequence[Tuple[complex, complex]],
    tol: float = 1e-9,
    maxiter: int = DEFAULT_MAXITER,
) -> MultiplierEstimate:
    """Median of the ratios G_{c}(F(z)) / G_{c}(z) over the usable samples.

    Samples with G_{c} <= 10*tol are discarded (too close to the zero set);
    the residual is the worst deviation of a ratio from the median.
    """
    ratios = []
    f_float = f.as_float()
    for z in samples:
        base = green_clipped(h, z, c, tol, maxiter)
        if base.value <= 10.0 * tol:
            continue
        image = f_float.apply(_to_point(z))
        moved = green_clipped(h, image, c, tol, maxiter)
        ratios.append(moved.value / base.value)
    if not ratios:
        raise ValueError("no usable samples: all have G_c at or below 10*tol")
    ratios.sort()
    n = len(ratios)
    median = ratios[n // 2] if n % 2 else 0.5 * (ratios[n // 2 - 1] + ratios[n // 2])
    residual = max(abs(r - median) for r in ratios)
    b_minus = math.inf if median == 0.0 else 1.0 / median
    return MultiplierEstimate(median, b_minus, residual, n)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

GREEN_CSV_COLUMNS = (
    "x_re",
    "x_im",
    "y_re",
    "y_im",
    "G_value",
    "error_bound",
    "iterations",
    "escaped",
)


def write_green_csv(path, rows) -> None:
    """Rows of (point, GreenValue) in the fixed column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GREEN_CSV_COLUMNS)
        for (x, y), g in rows:
            x = to_complex(x)
            y = to_complex(y)
            writer.writerow(
                [
                    repr(x.real),
                    repr(x.imag),
                    repr(y.real),
                    repr(y.imag),
                    repr(g.value),
                    repr(g.error_bound),
                    g.iterations,
                    int(g.escaped),
                ]
            )
