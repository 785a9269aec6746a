"""Map-spec parsing, serialization round trip, CLI dispatch and exit codes."""

import json

import pytest

from henongreen.algebra import ExactComplex
from henongreen.cli import main
from henongreen.maps import AutoWord, HenonMap
from henongreen.mapspec import MapSpecError, parse_map_spec, serialize_map

QUAD_SPEC = '{"factors":[{"kind":"henon","p":[0,0,1],"delta":1}]}'


def test_parse_canonical_henon():
    m = parse_map_spec(QUAD_SPEC)
    assert isinstance(m, HenonMap)
    assert m.degree == 2
    assert m.factors[0].delta == ExactComplex(1)


def test_parse_rejects_zero_delta():
    with pytest.raises(MapSpecError) as err:
        parse_map_spec('{"factors":[{"kind":"henon","p":[0,0,1],"delta":0}]}')
    assert str(err.value) == "delta must be nonzero (factor 0)"


def test_parse_complex_literal():
    m = parse_map_spec('{"factors":[{"kind":"henon","p":[0,0,1],"delta":{"re":1,"im":-1}}]}')
    assert m.factors[0].delta == ExactComplex(1, -1)


def test_parse_rational_strings_stay_exact():
    m = parse_map_spec('{"factors":[{"kind":"henon","p":[0,"1/3",1],"delta":"2/7"}]}')
    assert isinstance(m.factors[0].delta, ExactComplex)
    assert m.factors[0].delta == ExactComplex("2/7")


def test_parse_float_selects_float_backend():
    m = parse_map_spec('{"factors":[{"kind":"henon","p":[0,0,1.5],"delta":1}]}')
    assert isinstance(m.factors[0].delta, complex)
    assert m.factors[0].p.lead == 1.5


def test_parse_mixed_word():
    text = json.dumps(
        {
            "factors": [
                {"kind": "affine", "a": 1, "b": 1, "f": 0, "c": 1, "d": 0, "g": 0},
                {"kind": "elementary", "alpha": 1, "beta": 1, "gamma": 0, "p": [0, 0, 1]},
            ]
        }
    )
    m = parse_map_spec(text)
    assert isinstance(m, AutoWord)
    assert len(m.letters) == 2


def test_parse_position_annotated_json_error():
    with pytest.raises(MapSpecError) as err:
        parse_map_spec('{"factors": [}')
    assert "line 1" in str(err.value)


def test_parse_degree_invariant_message_carries_index():
    with pytest.raises(MapSpecError) as err:
        parse_map_spec('{"factors":[{"kind":"henon","p":[0,0,1],"delta":1},{"kind":"henon","p":[0,1],"delta":1}]}')
    assert "(factor 1)" in str(err.value)


def test_serialize_round_trip_exact():
    m = parse_map_spec('{"factors":[{"kind":"henon","p":[0,"1/3",1],"delta":{"re":1,"im":"-2/5"}}]}')
    again = parse_map_spec(serialize_map(m))
    assert again == m


def test_serialize_round_trip_word():
    text = json.dumps(
        {
            "factors": [
                {"kind": "affine", "a": 1, "b": 1, "f": 0, "c": 1, "d": 0, "g": 0},
                {"kind": "elementary", "alpha": 2, "beta": 1, "gamma": 3, "p": [1, 0, 4]},
            ]
        }
    )
    m = parse_map_spec(text)
    assert parse_map_spec(serialize_map(m)) == m


# -- CLI dispatch -------------------------------------------------------------


@pytest.fixture()
def specdir(tmp_path):
    (tmp_path / "m.json").write_text(QUAD_SPEC)
    (tmp_path / "cubic.json").write_text('{"factors":[{"kind":"henon","p":[0,0,0,1],"delta":1}]}')
    (tmp_path / "sigma.json").write_text(
        '{"factors":[{"kind":"affine","a":-1,"b":0,"f":0,"c":0,"d":-1,"g":0}]}'
    )
    (tmp_path / "bad.json").write_text('{"factors":[{"kind":"henon","p":[0,0,1],"delta":0}]}')
    return tmp_path


def test_cli_green_fixed_point(specdir, capsys):
    rc = main(["green", "--map", str(specdir / "m.json"), "--point", "0,0,0,0", "--tol", "1e-10"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "value=0.0" in out and "escaped=false" in out


def test_cli_green_real_point_shorthand(specdir, capsys):
    rc = main(["green", "--map", str(specdir / "m.json"), "--point", "0,0", "--tol", "1e-10"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "value=0.0" in out and "escaped=false" in out


def test_cli_green_malformed_point_is_usage_error(specdir, capsys):
    assert main(["green", "--map", str(specdir / "m.json"), "--point", "1,2,3"]) == 2


def test_cli_green_bad_spec_is_usage_error(specdir, capsys):
    rc = main(["green", "--map", str(specdir / "bad.json"), "--point", "0,0,0,0"])
    assert rc == 2
    assert "delta must be nonzero" in capsys.readouterr().err


def test_cli_usage_error_unknown_command(capsys):
    assert main(["definitely-not-a-command"]) == 2


def test_cli_commute_self(specdir, capsys):
    rc = main(["commute", "--map1", str(specdir / "m.json"), "--map2", str(specdir / "m.json"), "--C", "identity"])
    assert rc == 0
    assert "verdict: PASS" in capsys.readouterr().out


def test_cli_commute_mismatch_fails(specdir, capsys):
    rc = main(["commute", "--map1", str(specdir / "m.json"), "--map2", str(specdir / "cubic.json")])
    assert rc == 1


def test_cli_verify_invariance_self_shift_fails(specdir, capsys):
    rc = main(
        [
            "verify-invariance",
            "--map", str(specdir / "m.json"),
            "--F", str(specdir / "m.json"),
            "--c", "1",
            "--samples", "10",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 1
    assert "verdict: FAIL" in out
    # deviation follows the level shift c*(d-1) = 1
    dev = [ln for ln in out.splitlines() if ln.startswith("max_deviation")][0]
    assert abs(float(dev.split(":")[1]) - 1.0) < 1e-3


def test_cli_verify_invariance_symmetry_passes(specdir, capsys):
    rc = main(
        [
            "verify-invariance",
            "--map", str(specdir / "cubic.json"),
            "--F", str(specdir / "sigma.json"),
            "--c", "0.5",
            "--samples", "10",
        ]
    )
    assert rc == 0


def test_cli_coincide(specdir, capsys):
    rc = main(["coincide", "--F", str(specdir / "m.json"), "--map", str(specdir / "m.json")])
    assert rc == 0
    assert "m=1,n=1" in capsys.readouterr().out
    rc = main(["coincide", "--F", str(specdir / "cubic.json"), "--map", str(specdir / "m.json")])
    assert rc == 1


def test_cli_two_level(specdir, capsys):
    rc = main(
        ["two-level", "--map1", str(specdir / "m.json"), "--map2", str(specdir / "m.json"), "--c1", "1", "--c2", "1"]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "delta_plus_modulus: 1.000000e+00" in out


def test_cli_classify(specdir, capsys):
    rc = main(["classify", "--word", str(specdir / "m.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "case=henon-word" in out
    assert "indeterminacy_fwd=[1:0:0]" in out


def test_cli_classify_mixed_word(specdir, tmp_path, capsys):
    # letters applied first-to-last: elementary then non-elementary affine,
    # i.e. the composition a o e
    word = {
        "factors": [
            {"kind": "elementary", "alpha": 1, "beta": 1, "gamma": 0, "p": [0, 0, 1]},
            {"kind": "affine", "a": 1, "b": 1, "f": 0, "c": 1, "d": 0, "g": 0},
        ]
    }
    path = tmp_path / "word.json"
    path.write_text(json.dumps(word))
    rc = main(["classify", "--word", str(path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "case=Case-i" in out
    assert "indeterminacy_fwd=[1:0:0]" in out


def test_cli_boettcher(specdir, capsys):
    rc = main(["boettcher", "--map", str(specdir / "m.json"), "--point", "0,0,1000,0"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "c_H=1" in out


def test_cli_boettcher_outside_region_numeric_error(specdir, capsys):
    rc = main(["boettcher", "--map", str(specdir / "m.json"), "--point", "0,0,1,0"])
    assert rc == 3


def test_cli_render_manifest_and_artifacts(specdir, tmp_path, capsys):
    outdir = tmp_path / "out"
    rc = main(
        [
            "render",
            "--map", str(specdir / "m.json"),
            "--width", "16", "--height", "16",
            "--out", str(outdir),
            "--name", "img.ppm",
        ]
    )
    assert rc == 0
    manifest = json.loads((outdir / "manifest.json").read_text())
    names = {e["name"] for e in manifest["artifacts"]}
    assert names == {"img.ppm"}
    entry = manifest["artifacts"][0]
    from henongreen.util import sha256_bytes

    assert sha256_bytes((outdir / "img.ppm").read_bytes()) == entry["sha256"]
    # no temp droppings
    assert {p.name for p in outdir.iterdir()} == {"img.ppm", "manifest.json"}


def test_cli_contour_writes_csv(specdir, tmp_path):
    outdir = tmp_path / "cont"
    rc = main(
        [
            "contour",
            "--map", str(specdir / "m.json"),
            "--width", "32", "--height", "32",
            "--c", "0.5",
            "--out", str(outdir),
        ]
    )
    assert rc == 0
    text = (outdir / "contour.csv").read_text()
    assert text.splitlines()[0] == "polyline_id,vertex_index,u,v"


def test_cli_orbit(specdir, capsys):
    rc = main(["orbit", "--map", str(specdir / "m.json"), "--point", "0,0,3,0", "--steps", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.splitlines()[0] == "step,x_re,x_im,y_re,y_im"
    assert out.splitlines()[2].startswith("1,3.0,0.0,9.0")


def test_cli_env_override_maxiter(specdir, capsys, monkeypatch):
    monkeypatch.setenv("HENON_MAX_ITER", "7")
    rc = main(["green", "--map", str(specdir / "m.json"), "--point", "0,0,0,0"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "iterations=7" in out


def test_cli_verify_functorial(specdir, capsys):
    rc = main(["verify-functorial", "--map", str(specdir / "m.json"), "--samples", "50"])
    assert rc == 0
    assert "verdict: PASS" in capsys.readouterr().out
