"""Engine selection and per-map data packs for the escape engines.

At import time the compiled Cython kernel is preferred when present; the
pure-Python engine in ``_purekernel`` is the fallback.  Setting the
environment variable ``HENONGREEN_PURE=1`` forces the pure engine (used by
the benchmark and the cross-engine equality tests).  Both engines implement
the same arithmetic in the same order and produce bit-identical results.
"""

from __future__ import annotations

import math
import os
from typing import Optional

import numpy as np

from . import _purekernel
from ._purekernel import MapData
from .algebra import to_complex
from .maps import HenonMap

_fastkernel = None
if not os.environ.get("HENONGREEN_PURE"):
    try:
        from . import _fastkernel  # type: ignore[attr-defined]
    except ImportError:
        _fastkernel = None


def engine_name() -> str:
    """'compiled' when the Cython kernel is active, else 'pure'."""
    return "compiled" if _fastkernel is not None else "pure"


def have_compiled() -> bool:
    try:
        from . import _fastkernel as fk  # noqa: F401
    except ImportError:
        return False
    return True


_FLOAT_MAX_SAFE = 1e306


def build_map_data(h: HenonMap, radius: float) -> MapData:
    """Precompute the constants both engines need for one Henon word."""
    m = len(h.factors)
    degs = tuple(f.degree for f in h.factors)
    coeffs = tuple(tuple(to_complex(c) for c in f.p.coeffs) for f in h.factors)
    deltas = tuple(to_complex(f.delta) for f in h.factors)

    d_total = 1
    for dj in degs:
        d_total *= dj

    abs_lead = [abs(cs[-1]) for cs in coeffs]
    sum_lower = [sum(abs(c) for c in cs[:-1]) for cs in coeffs]
    abs_delta = [abs(dl) for dl in deltas]

    inv_deg = tuple(1.0 / dj for dj in degs)
    m_bnd = tuple((sum_lower[j] + abs_delta[j]) / abs_lead[j] for j in range(m))
    m_bnd_bwd = tuple((sum_lower[j] + 1.0) / abs_lead[j] for j in range(m))

    guard = []
    guard_bwd = []
    for j in range(m):
        s = abs_lead[j] + sum_lower[j] + abs_delta[j]
        guard.append((_FLOAT_MAX_SAFE / (s + 1.0)) ** (1.0 / degs[j]))
        s_bwd = (abs_lead[j] + sum_lower[j] + 1.0) / abs_delta[j]
        guard_bwd.append((_FLOAT_MAX_SAFE / (s_bwd + 1.0)) ** (1.0 / degs[j]))

    logc = [math.log(abs_lead[j]) for j in range(m)]
    logc_bwd = [math.log(abs_lead[j] / abs_delta[j]) for j in range(m)]

    geom = d_total / (d_total - 1.0)

    def phase_constants(order, logs):
        out = []
        for start in range(m):
            partial = 0.0
            prod = 1.0
            for step in range(m):
                j = order[(start + step) % m]
                prod *= degs[j]
                partial += logs[j] / prod
            out.append(partial * geom)
        return tuple(out)

    fwd_order = tuple(range(m))
    bwd_order = tuple(range(m - 1, -1, -1))
    kq = phase_constants(fwd_order, logc)
    kq_bwd = phase_constants(bwd_order, logc_bwd)

    # growth constant C for G <= max(log+|x|, log+|y|) + C, taken as the max
    # of the forward and backward chain constants so one field serves both.
    def growth_c(bvals, order):
        b_tot = 0.0
        for pos, j in enumerate(order):
            bj = max(0.0, math.log(bvals[j]))
            prod_later = 1.0
            for k in order[pos + 1 :]:
                prod_later *= degs[k]
            b_tot += bj * prod_later
        return b_tot / (d_total - 1.0)

    c_l3_fwd = growth_c(
        [abs_lead[j] + sum_lower[j] + abs_delta[j] for j in range(m)], fwd_order
    )
    c_l3_bwd = growth_c(
        [(abs_lead[j] + sum_lower[j] + 1.0) / abs_delta[j] for j in range(m)], bwd_order
    )

    return MapData(
        m=m,
        degrees=degs,
        coeffs=coeffs,
        deltas=deltas,
        inv_deg=inv_deg,
        m_bnd=m_bnd,
        guard=tuple(guard),
        kq=kq,
        bwd_order=bwd_order,
        m_bnd_bwd=m_bnd_bwd,
        guard_bwd=tuple(guard_bwd),
        kq_bwd=kq_bwd,
        radius=float(radius),
        c_l3=max(c_l3_fwd, c_l3_bwd),
        m_max=max(m_bnd),
        m_max_bwd=max(m_bnd_bwd),
        d_min=min(degs),
        degree=d_total,
    )


class _ArrayPack:
    """numpy view of a MapData, shaped for the compiled kernel."""

    def __init__(self, md: MapData):
        m = md.m
        kmax = max(len(cs) for cs in md.coeffs)
        self.ncoef = np.array([len(cs) for cs in md.coeffs], dtype=np.int32)
        self.coef_re = np.zeros((m, kmax), dtype=np.float64)
        self.coef_im = np.zeros((m, kmax), dtype=np.float64)
        for j, cs in enumerate(md.coeffs):
            for k, c in enumerate(cs):
                self.coef_re[j, k] = c.real
                self.coef_im[j, k] = c.imag
        self.delta_re = np.array([d.real for d in md.deltas], dtype=np.float64)
        self.delta_im = np.array([d.imag for d in md.deltas], dtype=np.float64)
        self.inv_deg = np.array(md.inv_deg, dtype=np.float64)
        self.guard = np.array(md.guard, dtype=np.float64)
        self.kq = np.array(md.kq, dtype=np.float64)
        self.radius = md.radius
        self.c_l3 = md.c_l3
        self.tail_scale = 4.0 * md.m_max / (2.0 * md.d_min - 1.0)
        self.two_m_max = 2.0 * md.m_max


_pack_cache: dict[int, _ArrayPack] = {}


def _array_pack(md: MapData) -> _ArrayPack:
    key = id(md)
    pack = _pack_cache.get(key)
    if pack is None:
        pack = _ArrayPack(md)
        _pack_cache[key] = pack
    return pack


def green_plus_batch(
    md: MapData,
    xs: np.ndarray,
    ys: np.ndarray,
    tol: float,
    maxiter: int,
    force_engine: Optional[str] = None,
):
    """Batch forward escape rates.

    xs/ys are complex128 arrays of equal length.  Returns (value, error,
    iterations, status) float64/float64/int32/int8 arrays.  ``force_engine``
    overrides the import-time selection ('pure' or 'compiled').
    """
    n = len(xs)
    out_value = np.empty(n, dtype=np.float64)
    out_err = np.empty(n, dtype=np.float64)
    out_iter = np.empty(n, dtype=np.int32)
    out_status = np.empty(n, dtype=np.int8)

    engine = force_engine or engine_name()
    if engine == "compiled":
        if _fastkernel is None:
            from . import _fastkernel as fk
        else:
            fk = _fastkernel
        pack = _array_pack(md)
        fk.green_plus_batch(
            pack.ncoef,
            pack.coef_re,
            pack.coef_im,
            pack.delta_re,
            pack.delta_im,
            pack.inv_deg,
            pack.guard,
            pack.kq,
            pack.radius,
            pack.c_l3,
            pack.tail_scale,
            pack.two_m_max,
            np.ascontiguousarray(xs.real),
            np.ascontiguousarray(xs.imag),
            np.ascontiguousarray(ys.real),
            np.ascontiguousarray(ys.imag),
            float(tol),
            int(maxiter),
            out_value,
            out_err,
            out_iter,
            out_status,
        )
    else:
        _purekernel.green_plus_batch(
            md, xs.tolist(), ys.tolist(), tol, maxiter, out_value, out_err, out_iter, out_status
        )
    return out_value, out_err, out_iter, out_status


def green_plus_point(md: MapData, x: complex, y: complex, tol: float, maxiter: int):
    return _purekernel.green_plus_point(md, x, y, tol, maxiter)


def green_minus_point(md: MapData, x: complex, y: complex, tol: float, maxiter: int):
    return _purekernel.green_minus_point(md, x, y, tol, maxiter)


def escape_partials(md: MapData, x: complex, y: complex, maxiter: int, count: int):
    return _purekernel.escape_partials(md, x, y, maxiter, count)
