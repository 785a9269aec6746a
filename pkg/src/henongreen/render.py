"""Grid evaluation of Green values over 2D slices of C^2, contours, images.

A :class:`SliceSpec` embeds a (u, v) rectangle into C^2 affinely,
z(u, v) = base + u*e1 + v*e2, and :func:`sample_grid` evaluates the forward
Green function at every pixel center (row-major, top row = v_max).  The grid
is deterministic: identical inputs give bit-identical value arrays whether
rows are evaluated serially or in parallel.

Contours are extracted by marching squares with the saddle ambiguity fixed
by the cell-center average rule; images are binary PPM (P6, maxval 255) so
goldens can be pinned byte-for-byte without any image dependency.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from ._purekernel import STATUS_ESCAPED, STATUS_INTERIOR
from .algebra import to_complex
from .green import DEFAULT_MAXITER, DEFAULT_TOL, map_data
from .maps import HenonMap
from .mapspec import serialize_map
from .util import atomic_write_bytes


@dataclass(frozen=True)
class SliceSpec:
    """Affine embedding of a pixel rectangle into C^2.

    base, e1, e2 are complex pairs; bounds = (u_min, u_max, v_min, v_max);
    resolution = (width, height) with width, height >= 2.  Pixel centers are
    sampled: u_i = u_min + (i + 1/2) du, v_j likewise, image row 0 at v_max.
    """

    base: Tuple[complex, complex]
    e1: Tuple[complex, complex]
    e2: Tuple[complex, complex]
    bounds: Tuple[float, float, float, float]
    resolution: Tuple[int, int]

    def __post_init__(self):
        w, h = self.resolution
        if w < 2 or h < 2:
            raise ValueError("resolution must be at least 2x2")
        if all(to_complex(c) == 0 for c in self.e1) and all(
            to_complex(c) == 0 for c in self.e2
        ):
            raise ValueError("slice directions e1, e2 must not both vanish")

    def pixel_centers(self):
        """(us, vs) axis arrays of pixel-center coordinates."""
        u_min, u_max, v_min, v_max = self.bounds
        w, h = self.resolution
        du = (u_max - u_min) / w
        dv = (v_max - v_min) / h
        us = u_min + du * (np.arange(w) + 0.5)
        vs = v_min + dv * (np.arange(h) + 0.5)
        return us, vs

    def embed(self, u: float, v: float) -> Tuple[complex, complex]:
        bx, by = (to_complex(self.base[0]), to_complex(self.base[1]))
        e1x, e1y = (to_complex(self.e1[0]), to_complex(self.e1[1]))
        e2x, e2y = (to_complex(self.e2[0]), to_complex(self.e2[1]))
        return (bx + u * e1x + v * e2x, by + u * e1y + v * e2y)


@dataclass(frozen=True)
class GridResult:
    """Green values over a slice: row-major arrays of shape (height, width).

    Row 0 holds the top of the image (largest v).  ``status`` uses the kernel
    codes (0 interior, 1 escaped, 2 range-escape); ``undecided`` flags
    interior cells whose certificate exceeds the requested tolerance.
    """

    slice: SliceSpec
    values: np.ndarray
    errors: np.ndarray
    iterations: np.ndarray
    status: np.ndarray
    undecided: np.ndarray
    map_digest: str
    tol: float
    maxiter: int

    def value_bytes(self) -> bytes:
        return self.values.tobytes()


def map_digest(h: HenonMap) -> str:
    return hashlib.sha256(serialize_map(h).encode()).hexdigest()


def sample_grid(
    h: HenonMap,
    spec: SliceSpec,
    tol: float = DEFAULT_TOL,
    maxiter: int = DEFAULT_MAXITER,
    workers: int = 1,
    force_engine: Optional[str] = None,
) -> GridResult:
    """G+ at every pixel center of the slice.

    ``workers`` > 1 splits rows across a thread pool; the result is identical
    to the serial evaluation because every pixel is independent.
    """
    md = map_data(h)
    us, vs = spec.pixel_centers()
    w, height = spec.resolution

    bx, by = (to_complex(spec.base[0]), to_complex(spec.base[1]))
    e1x, e1y = (to_complex(spec.e1[0]), to_complex(spec.e1[1]))
    e2x, e2y = (to_complex(spec.e2[0]), to_complex(spec.e2[1]))

    values = np.empty((height, w), dtype=np.float64)
    errors = np.empty((height, w), dtype=np.float64)
    iters = np.empty((height, w), dtype=np.int32)
    status = np.empty((height, w), dtype=np.int8)

    def eval_row(row: int):
        v = vs[height - 1 - row]  # row 0 at the top (v_max)
        xs = bx + us * e1x + v * e2x
        ys = by + us * e1y + v * e2y
        val, err, it, st = kernels.green_plus_batch(
            md, xs.astype(np.complex128), ys.astype(np.complex128), tol, maxiter, force_engine
        )
        values[row] = val
        errors[row] = err
        iters[row] = it
        status[row] = st

    if workers <= 1:
        for row in range(height):
            eval_row(row)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(eval_row, range(height)))

    undecided = (status == STATUS_INTERIOR) & (errors > tol)
    return GridResult(
        spec, values, errors, iters, status, undecided, map_digest(h), tol, maxiter
    )


def synthetic_grid(spec: SliceSpec, values: np.ndarray) -> GridResult:
    """Wrap a raw value field as a GridResult (for contour tests and tools)."""
    w, h = spec.resolution
    if values.shape != (h, w):
        raise ValueError(f"value field shape {values.shape} != (height, width) = {(h, w)}")
    zeros = np.zeros_like(values)
    return GridResult(
        spec,
        values.astype(np.float64),
        zeros,
        np.zeros((h, w), dtype=np.int32),
        np.where(values > 0, STATUS_ESCAPED, STATUS_INTERIOR).astype(np.int8),
        np.zeros((h, w), dtype=bool),
        "synthetic",
        0.0,
        0,
    )


# ---------------------------------------------------------------------------
# Marching squares
# ---------------------------------------------------------------------------


def _interp(pa, pb, va, vb, level):
    t = (level - va) / (vb - va)
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))


def contour_level(grid: GridResult, c: float) -> List[List[Tuple[float, float]]]:
    """Marching-squares isolines of the value field at level c > 0.

    Cell corners are pixel centers; vertices are linearly interpolated along
    cell edges; the two-saddle ambiguity is resolved by the sign of the cell
    average.  Segments are chained into polylines; an empty list means the
    level does not occur.
    """
    if c <= 0:
        raise ValueError("contour level must be positive")
    us, vs = grid.slice.pixel_centers()
    h, w = grid.values.shape
    vals = grid.values
    segments = []

    for row in range(h - 1):
        v_top = vs[h - 1 - row]
        v_bot = vs[h - 2 - row]
        for col in range(w - 1):
            u_l = us[col]
            u_r = us[col + 1]
            # corners: 0 top-left, 1 top-right, 2 bottom-right, 3 bottom-left
            c0 = vals[row, col]
            c1 = vals[row, col + 1]
            c2 = vals[row + 1, col + 1]
            c3 = vals[row + 1, col]
            idx = (
                (1 if c0 > c else 0)
                | (2 if c1 > c else 0)
                | (4 if c2 > c else 0)
                | (8 if c3 > c else 0)
            )
            if idx in (0, 15):
                continue
            p0 = (u_l, v_top)
            p1 = (u_r, v_top)
            p2 = (u_r, v_bot)
            p3 = (u_l, v_bot)
            top = lambda: _interp(p0, p1, c0, c1, c)
            right = lambda: _interp(p1, p2, c1, c2, c)
            bottom = lambda: _interp(p3, p2, c3, c2, c)
            left = lambda: _interp(p0, p3, c0, c3, c)
            if idx in (1, 14):
                segments.append((top(), left()))
            elif idx in (2, 13):
                segments.append((top(), right()))
            elif idx in (3, 12):
                segments.append((left(), right()))
            elif idx in (4, 11):
                segments.append((right(), bottom()))
            elif idx in (6, 9):
                segments.append((top(), bottom()))
            elif idx in (7, 8):
                segments.append((left(), bottom()))
            elif idx in (5, 10):
                # saddle: connect according to the cell-center average
                center_above = 0.25 * (c0 + c1 + c2 + c3) > c
                if (idx == 5) == center_above:
                    segments.append((top(), right()))
                    segments.append((left(), bottom()))
                else:
                    segments.append((top(), left()))
                    segments.append((right(), bottom()))

    return _chain_segments(segments)


def _chain_segments(segments):
    """Join shared-endpoint segments into polylines, scan order preserved."""
    by_point: dict = {}
    for sid, (a, b) in enumerate(segments):
        by_point.setdefault(a, []).append(sid)
        by_point.setdefault(b, []).append(sid)
    used = [False] * len(segments)
    polylines = []
    for sid in range(len(segments)):
        if used[sid]:
            continue
        used[sid] = True
        a, b = segments[sid]
        chain = [a, b]
        # extend forward from b, then backward from a
        for endpoint_idx in (1, 0):
            while True:
                tip = chain[-1] if endpoint_idx == 1 else chain[0]
                candidates = [t for t in by_point.get(tip, []) if not used[t]]
                if not candidates:
                    break
                t = candidates[0]
                used[t] = True
                pa, pb = segments[t]
                nxt = pb if pa == tip else pa
                if endpoint_idx == 1:
                    chain.append(nxt)
                else:
                    chain.insert(0, nxt)
        polylines.append(chain)
    return polylines


def write_contour_csv(path, polylines) -> None:
    """Polylines as CSV rows (polyline_id, vertex_index, u, v)."""
    lines = ["polyline_id,vertex_index,u,v"]
    for pid, poly in enumerate(polylines):
        for vid, (u, v) in enumerate(poly):
            lines.append(f"{pid},{vid},{u!r},{v!r}")
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode())


# ---------------------------------------------------------------------------
# Images
# ---------------------------------------------------------------------------

PALETTE_ESCAPE_LOG = "escape-log"
PALETTE_TWO_TONE = "two-tone"

_TONE_DARK = (18, 24, 48)
_TONE_LIGHT = (232, 240, 255)


def _gradient_table():
    # fixed 256-entry gradient: deep blue -> teal -> warm white
    table = []
    for i in range(256):
        t = i / 255.0
        r = int(round(255 * min(1.0, max(0.0, 1.8 * t - 0.4))))
        g = int(round(255 * min(1.0, max(0.0, 1.6 * t * t + 0.1 * t))))
        b = int(round(255 * min(1.0, 0.25 + 1.2 * t)))
        table.append((r, g, b))
    return tuple(table)


_GRADIENT = _gradient_table()


def render_bytes(grid: GridResult, palette: str, level: float = 0.5) -> bytes:
    """P6 PPM bytes for a grid under the chosen palette.

    escape-log maps t = G/(G+1) through the fixed 256-entry gradient;
    two-tone colors G < level dark and G >= level light.  Output bytes depend
    only on the grid values, the palette, and the level.
    """
    h, w = grid.values.shape
    header = f"P6\n{w} {h}\n255\n".encode()
    pixels = bytearray()
    if palette == PALETTE_TWO_TONE:
        for row in range(h):
            for col in range(w):
                tone = _TONE_DARK if grid.values[row, col] < level else _TONE_LIGHT
                pixels.extend(tone)
    elif palette == PALETTE_ESCAPE_LOG:
        for row in range(h):
            for col in range(w):
                g = grid.values[row, col]
                t = g / (g + 1.0) if g > 0 else 0.0
                r, gr, b = _GRADIENT[min(255, int(t * 256.0))]
                pixels.extend((r, gr, b))
    else:
        raise ValueError(f"unknown palette {palette!r}")
    return header + bytes(pixels)


def write_image(grid: GridResult, palette: str, path, level: float = 0.5) -> None:
    """Write the PPM atomically; byte-deterministic for fixed inputs."""
    try:
        atomic_write_bytes(path, render_bytes(grid, palette, level))
    except OSError as exc:
        raise OSError(f"failed to write image {path}: {exc}") from exc
