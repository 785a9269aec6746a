"""Supplementary coverage: parse invariants, other degrees, palettes."""

import math

import numpy as np
import pytest

from henongreen.algebra import Poly1
from henongreen.cli import main
from henongreen.green import green_minus, green_plus, growth_constants
from henongreen.maps import HenonFactor, HenonMap
from henongreen.mapspec import MapSpecError, parse_map_spec
from henongreen.render import (
    PALETTE_ESCAPE_LOG,
    SliceSpec,
    render_bytes,
    sample_grid,
)
from henongreen.rigidity import VERDICT_PASS, verify_functorial

CUBIC = HenonMap((HenonFactor(Poly1([0, 0, 0, 1]), 1),))
WORD6 = HenonMap(
    (HenonFactor(Poly1([0, 0, 2]), 1), HenonFactor(Poly1([0, 1, 0, 1]), 2))
)


def test_parse_rejects_degenerate_elementary():
    with pytest.raises(MapSpecError) as err:
        parse_map_spec('{"factors":[{"kind":"elementary","alpha":0,"beta":1,"gamma":0,"p":[0,0,1]}]}')
    assert "(factor 0)" in str(err.value)


def test_parse_rejects_singular_affine():
    with pytest.raises(MapSpecError) as err:
        parse_map_spec('{"factors":[{"kind":"affine","a":1,"b":2,"f":0,"c":2,"d":4,"g":0}]}')
    assert "singular" in str(err.value)


def test_parse_rejects_missing_fields():
    with pytest.raises(MapSpecError) as err:
        parse_map_spec('{"factors":[{"kind":"affine","a":1}]}')
    assert "missing fields" in str(err.value)


def test_functorial_holds_for_other_degrees():
    for h in (CUBIC, WORD6):
        report = verify_functorial(h, 100, 1e-6)
        assert report.verdict == VERDICT_PASS, (h.degree, report.max_residual_plus)


def test_functorial_minus_direction_values():
    # G-(H z) = G-(z)/d directly on a backward-escaping point
    h = CUBIC.as_float()
    z = (1e6, 0.3)
    g = green_minus(CUBIC, z, 1e-11)
    g_h = green_minus(CUBIC, h.apply(z), 1e-11)
    assert abs(g_h.value - g.value / 3.0) <= 1e-8


def test_growth_constants_multi_factor_finite():
    k_l1, c_l3 = growth_constants(WORD6)
    assert math.isfinite(k_l1) and k_l1 >= 0
    assert math.isfinite(c_l3) and c_l3 >= 0
    # L1 spot check inside V+
    z = (1.0, 40.0)
    g = green_plus(WORD6, z, 1e-11)
    assert abs(g.value - math.log(40.0)) <= k_l1 + 1e-9


def test_escape_log_palette_deterministic():
    quad = HenonMap((HenonFactor(Poly1([0, 0, 1]), 1),))
    spec = SliceSpec(base=(0, 0), e1=(0, 1), e2=(0, 1j), bounds=(-2, 2, -2, 2), resolution=(32, 32))
    g1 = sample_grid(quad, spec, 1e-10, 400)
    g2 = sample_grid(quad, spec, 1e-10, 400, workers=3)
    assert render_bytes(g1, PALETTE_ESCAPE_LOG) == render_bytes(g2, PALETTE_ESCAPE_LOG)


def test_cli_render_escape_log(tmp_path):
    spec = tmp_path / "m.json"
    spec.write_text('{"factors":[{"kind":"henon","p":[0,0,1],"delta":1}]}')
    outdir = tmp_path / "out"
    rc = main(
        [
            "render",
            "--map", str(spec),
            "--palette", "escape-log",
            "--width", "16", "--height", "16",
            "--out", str(outdir),
        ]
    )
    assert rc == 0
    assert (outdir / "slice.ppm").read_bytes().startswith(b"P6\n16 16\n255\n")


def test_grid_undecided_cells_flagged_with_small_budget():
    quad = HenonMap((HenonFactor(Poly1([0, 0, 1]), 1),))
    spec = SliceSpec(base=(0, 0), e1=(0, 1), e2=(0, 1j), bounds=(-1, 1, -1, 1), resolution=(8, 8))
    grid = sample_grid(quad, spec, 1e-10, maxiter=2)
    assert grid.undecided.any()
    deep = sample_grid(quad, spec, 1e-10, maxiter=400)
    assert not deep.undecided.any()
    assert np.all(deep.values >= 0)
