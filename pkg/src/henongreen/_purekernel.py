"""Pure-Python escape engine: the reference implementation of the hot loop.

The compiled kernel in ``_fastkernel.pyx`` mirrors this file statement by
statement (same complex arithmetic written out on double pairs, same libm
calls, same truncation rule), so both engines produce bit-identical values.
Keep the two in sync when touching either.

Algorithm.  The forward escape rate of a point is computed by iterating the
factor word until the orbit enters the invariant region V+ = {|x| < |y|,
|y| > R}.  Inside V+ the y-coordinate at least doubles per factor step and
the partial estimates

    v_k = (1/D_k) * (log|y_k| + K_q)

converge geometrically, where D_k is the product of the factor degrees
applied so far, q is the position inside the factor cycle and K_q is the
closed-form sum of all future leading-coefficient contributions.  The
neglected correction terms are bounded by the telescoping tail

    tail = (4 * M_max / (2*d_min - 1)) * w / |y|,

valid once |y| >= 2*M_max, which shrinks by a factor >= 2*d_min per step;
iteration stops as soon as tail <= tol/2.  Orbits that stay out of V+ for
maxiter sweeps return value 0 with the certified bound
w * (max(log+|x|, log+|y|) + C), C the global growth constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite, log
from typing import Tuple

STATUS_INTERIOR = 0
STATUS_ESCAPED = 1
STATUS_RANGE = 2


@dataclass(frozen=True)
class MapData:
    """Flattened per-factor data consumed by both engines.

    Forward direction iterates factors 0..m-1 cyclically; the backward
    direction iterates inverse factors in reversed order (bwd_order[t] is the
    factor applied at backward phase t).
    """

    m: int
    degrees: Tuple[int, ...]
    coeffs: Tuple[Tuple[complex, ...], ...]
    deltas: Tuple[complex, ...]
    inv_deg: Tuple[float, ...]
    m_bnd: Tuple[float, ...]
    guard: Tuple[float, ...]
    kq: Tuple[float, ...]
    bwd_order: Tuple[int, ...]
    m_bnd_bwd: Tuple[float, ...]
    guard_bwd: Tuple[float, ...]
    kq_bwd: Tuple[float, ...]
    radius: float
    c_l3: float
    m_max: float
    m_max_bwd: float
    d_min: int
    degree: int


def _log_plus(t: float) -> float:
    return log(t) if t > 1.0 else 0.0


def green_plus_point(md: MapData, x: complex, y: complex, tol: float, maxiter: int):
    """(value, error_bound, sweeps, status) of the forward escape rate."""
    r = md.radius
    m = md.m
    w = 1.0
    q = 0
    sweeps = 0

    # escape search
    while True:
        ax = abs(x)
        ay = abs(y)
        if ay > ax and ay > r:
            break
        if sweeps >= maxiter:
            err = w * (max(_log_plus(ax), _log_plus(ay)) + md.c_l3)
            return 0.0, err, sweeps, STATUS_INTERIOR
        cs = md.coeffs[q]
        acc = cs[-1]
        for k in range(len(cs) - 2, -1, -1):
            acc = acc * y + cs[k]
        x, y = y, acc - md.deltas[q] * x
        if not (isfinite(y.real) and isfinite(y.imag)):
            value = w * max(_log_plus(ax), _log_plus(ay))
            err = w * (max(_log_plus(ax), _log_plus(ay)) + md.c_l3)
            return value, err, sweeps, STATUS_RANGE
        w *= md.inv_deg[q]
        q += 1
        if q == m:
            q = 0
            sweeps += 1

    # refinement inside V+
    tail_scale = 4.0 * md.m_max / (2.0 * md.d_min - 1.0)
    two_m_max = 2.0 * md.m_max
    while True:
        ay = abs(y)
        tail = w * tail_scale / ay
        if (tail <= 0.5 * tol and ay >= two_m_max) or ay > md.guard[q]:
            value = w * (log(ay) + md.kq[q])
            err = tail + 1e-14 * (1.0 + abs(value))
            return value, err, sweeps, STATUS_ESCAPED
        cs = md.coeffs[q]
        acc = cs[-1]
        for k in range(len(cs) - 2, -1, -1):
            acc = acc * y + cs[k]
        x, y = y, acc - md.deltas[q] * x
        w *= md.inv_deg[q]
        q += 1
        if q == m:
            q = 0
            sweeps += 1


def green_minus_point(md: MapData, x: complex, y: complex, tol: float, maxiter: int):
    """(value, error_bound, sweeps, status) of the backward escape rate.

    Mirror of the forward loop: inverse factors ((p(x) - y)/delta, x) applied
    in reversed factor order, region V- = {|y| < |x|, |x| > R}, telescoping on
    the x-coordinate.
    """
    r = md.radius
    m = md.m
    w = 1.0
    t = 0
    sweeps = 0

    while True:
        ax = abs(x)
        ay = abs(y)
        if ax > ay and ax > r:
            break
        if sweeps >= maxiter:
            err = w * (max(_log_plus(ax), _log_plus(ay)) + md.c_l3)
            return 0.0, err, sweeps, STATUS_INTERIOR
        j = md.bwd_order[t]
        cs = md.coeffs[j]
        acc = cs[-1]
        for k in range(len(cs) - 2, -1, -1):
            acc = acc * x + cs[k]
        x, y = (acc - y) / md.deltas[j], x
        if not (isfinite(x.real) and isfinite(x.imag)):
            value = w * max(_log_plus(ax), _log_plus(ay))
            err = w * (max(_log_plus(ax), _log_plus(ay)) + md.c_l3)
            return value, err, sweeps, STATUS_RANGE
        w *= md.inv_deg[j]
        t += 1
        if t == m:
            t = 0
            sweeps += 1

    tail_scale = 4.0 * md.m_max_bwd / (2.0 * md.d_min - 1.0)
    two_m_max = 2.0 * md.m_max_bwd
    while True:
        ax = abs(x)
        tail = w * tail_scale / ax
        if (tail <= 0.5 * tol and ax >= two_m_max) or ax > md.guard_bwd[t]:
            value = w * (log(ax) + md.kq_bwd[t])
            err = tail + 1e-14 * (1.0 + abs(value))
            return value, err, sweeps, STATUS_ESCAPED
        j = md.bwd_order[t]
        cs = md.coeffs[j]
        acc = cs[-1]
        for k in range(len(cs) - 2, -1, -1):
            acc = acc * x + cs[k]
        x, y = (acc - y) / md.deltas[j], x
        w *= md.inv_deg[j]
        t += 1
        if t == m:
            t = 0
            sweeps += 1


def escape_partials(md: MapData, x: complex, y: complex, maxiter: int, count: int):
    """Successive sweep-boundary partial estimates after entering V+.

    Returns a list of v_n values recorded at full-sweep boundaries once the
    orbit is inside V+, or an empty list if it never escapes within maxiter.
    Diagnostic helper for convergence-rate checks; not used by the engines.
    """
    r = md.radius
    m = md.m
    w = 1.0
    q = 0
    sweeps = 0
    entered = False
    out = []
    while len(out) < count:
        ax = abs(x)
        ay = abs(y)
        if not entered and ay > ax and ay > r:
            entered = True
        if entered and q == 0:
            out.append(w * (log(ay) + md.kq[0]))
        if not entered and sweeps >= maxiter:
            return []
        if ay > md.guard[q]:
            break
        cs = md.coeffs[q]
        acc = cs[-1]
        for k in range(len(cs) - 2, -1, -1):
            acc = acc * y + cs[k]
        x, y = y, acc - md.deltas[q] * x
        if not (isfinite(y.real) and isfinite(y.imag)):
            break
        w *= md.inv_deg[q]
        q += 1
        if q == m:
            q = 0
            sweeps += 1
    return out


def green_plus_batch(md: MapData, xs, ys, tol: float, maxiter: int, out_value, out_err, out_iter, out_status):
    """Evaluate the forward escape rate for a batch of points.

    xs/ys are sequences of complex; results are written into the four
    preallocated output arrays (value, error, sweeps, status).
    """
    for idx in range(len(xs)):
        v, e, it, st = green_plus_point(md, xs[idx], ys[idx], tol, maxiter)
        out_value[idx] = v
        out_err[idx] = e
        out_iter[idx] = it
        out_status[idx] = st
