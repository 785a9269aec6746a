"""Boettcher coordinates of a Henon word near infinity.

For a word H = H_m o ... o H_1 of factors (y, p_j(y) - delta_j x) with
leading coefficients c_j and degrees d_j, there are non-vanishing holomorphic
functions phi+ on V+ and phi- on V- with

    phi+(H(z))      = c_H  * phi+(z)^d,      phi+(x, y) ~ y,
    phi-(H^{-1}(z)) = c'_H * phi-(z)^d,      phi-(x, y) ~ x,

where the leading constants are the degree-weighted coefficient products

    c_H  = prod_j c_j^(d_{j+1} ... d_m)          (empty product = 1),
    c'_H = prod_j (c_j / delta_j)^(d_{j-1} ... d_1).

phi+ is evaluated as the telescoping product

    phi+(z) = y_0 * prod_k u_k^(1/D_{k+1}),
    u_k = y_{k+1} / (c_{j(k)} * y_k^{d_{j(k)}}),

one factor application per step, principal roots throughout.  The factors
u_k tend to 1 geometrically in V+, so principal roots glue into the correct
holomorphic branch; the branch-safety margin |u_k - 1| < 1/2 is enforced and
violations are refused rather than risking a sheet jump.  The bridge to the
Green function is

    G+(z) = log|phi+(z)| + log|c_H| / (d - 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .algebra import ExactComplex, Scalar, is_exact, scalar_abs, to_complex
from .green import DEFAULT_TOL, REGION_V_MINUS, REGION_V_PLUS, certified_radius, map_data, region_of
from .maps import HenonMap


class OutsideFiltrationError(ValueError):
    """The point is not in the required filtration region."""


class BranchSafetyError(ArithmeticError):
    """A telescoping factor left the branch-safety disk |u - 1| < 1/2."""


@dataclass(frozen=True)
class BoettcherConstants:
    """The leading constants c_H and c'_H together with the degree."""

    c_H: Scalar
    c_H_prime: Scalar
    degree: int


@dataclass(frozen=True)
class BoettcherValue:
    """A truncated telescoping product with a sound absolute error bound."""

    value: complex
    error_bound: float
    terms_used: int


def leading_constant(h: HenonMap) -> BoettcherConstants:
    """Evaluate both product formulas; exact on the exact backend."""
    factors = h.factors
    m = len(factors)
    exact = all(is_exact(f.p.lead) and is_exact(f.delta) for f in factors)
    if exact:
        def conv(v):
            return v if isinstance(v, ExactComplex) else ExactComplex(v)
    else:
        conv = to_complex

    c_h = conv(1)
    for j in range(m):
        e = 1
        for k in range(j + 1, m):
            e *= factors[k].degree
        c_h = c_h * conv(factors[j].p.lead) ** e
    c_h_prime = conv(1)
    for j in range(m):
        e = 1
        for k in range(j):
            e *= factors[k].degree
        c_h_prime = c_h_prime * (conv(factors[j].p.lead) / conv(factors[j].delta)) ** e
    return BoettcherConstants(c_h, c_h_prime, h.degree)


def _principal_root(u: complex, n_inv: float) -> complex:
    # u^(n_inv) with the principal logarithm; u stays near 1 by construction.
    return cmath.exp(cmath.log(u) * n_inv)


def _telescope(orbit_step, z0: complex, tol: float, m: int, degrees, leads, m_max: float, label: str) -> BoettcherValue:
    """Shared telescoping product for phi+ and phi-.

    orbit_step(k) advances the orbit one factor application and returns the
    new tracked coordinate; degrees/leads are indexed by cycle phase, m_max
    bounds |u_k - 1| * |coord_k| over every factor.  The remaining log-sum
    after truncation is at most

        weight * (2*m_max/|coord|) * (2*d_min/(2*d_min - 1)),

    since each later term shrinks by at least 1/(2*d_min); the bound is valid
    once |coord| >= 2*m_max (so |log|u|| <= 2|u - 1| applies throughout).
    """
    d_min = min(degrees)
    tail_scale = 4.0 * m_max / (2.0 * d_min - 1.0)
    two_m_max = 2.0 * m_max
    value = z0
    weight = 1.0
    coord = z0
    terms = 0
    # conservative cap; the tail at least halves every step
    for k in range(4096):
        phase = k % m
        tail = weight * tail_scale / abs(coord)
        if tail <= tol and abs(coord) >= two_m_max:
            err = abs(value) * math.expm1(tail) + 1e-15 * (1.0 + abs(value))
            return BoettcherValue(value, err, terms)
        new_coord = orbit_step(k)
        u = new_coord / (leads[phase] * coord ** degrees[phase])
        if abs(u - 1.0) >= 0.5:
            raise BranchSafetyError(
                f"telescoping factor left the branch-safety disk at step {k} "
                f"({label}); move deeper into the filtration region"
            )
        weight /= degrees[phase]
        value *= _principal_root(u, weight)
        coord = new_coord
        terms += 1
    raise ArithmeticError("telescoping product failed to converge within 4096 terms")


def boettcher_plus(h: HenonMap, z, tol: float = DEFAULT_TOL) -> BoettcherValue:
    """phi+ at a point of V+, with phi+(H z) = c_H phi+(z)^d and phi+ ~ y."""
    md = map_data(h)
    fr = certified_radius(h)
    x, y = to_complex(z[0]), to_complex(z[1])
    if region_of((x, y), fr) != REGION_V_PLUS:
        raise OutsideFiltrationError(f"point {z!r} is not in V+ (R = {fr.R})")

    state = [x, y]

    def step(k: int) -> complex:
        phase = k % md.m
        cs = md.coeffs[phase]
        acc = cs[-1]
        for i in range(len(cs) - 2, -1, -1):
            acc = acc * state[1] + cs[i]
        state[0], state[1] = state[1], acc - md.deltas[phase] * state[0]
        return state[1]

    leads = tuple(md.coeffs[j][-1] for j in range(md.m))
    return _telescope(step, y, tol, md.m, md.degrees, leads, md.m_max, "phi+")


def boettcher_minus(h: HenonMap, z, tol: float = DEFAULT_TOL) -> BoettcherValue:
    """phi- at a point of V-, with phi-(H^{-1} z) = c'_H phi-(z)^d, phi- ~ x."""
    md = map_data(h)
    fr = certified_radius(h)
    x, y = to_complex(z[0]), to_complex(z[1])
    if region_of((x, y), fr) != REGION_V_MINUS:
        raise OutsideFiltrationError(f"point {z!r} is not in V- (R = {fr.R})")

    state = [x, y]

    def step(k: int) -> complex:
        j = md.bwd_order[k % md.m]
        cs = md.coeffs[j]
        acc = cs[-1]
        for i in range(len(cs) - 2, -1, -1):
            acc = acc * state[0] + cs[i]
        state[0], state[1] = (acc - state[1]) / md.deltas[j], state[0]
        return state[0]

    degrees = tuple(md.degrees[j] for j in md.bwd_order)
    leads = tuple(md.coeffs[j][-1] / md.deltas[j] for j in md.bwd_order)
    return _telescope(step, x, tol, md.m, degrees, leads, md.m_max_bwd, "phi-")


def green_from_boettcher(h: HenonMap, z, tol: float = DEFAULT_TOL) -> float:
    """G+ via the bridge log|phi+| + log|c_H|/(d - 1); requires z in V+."""
    phi = boettcher_plus(h, z, tol)
    consts = leading_constant(h)
    return math.log(abs(phi.value)) + math.log(scalar_abs(consts.c_H)) / (h.degree - 1)
