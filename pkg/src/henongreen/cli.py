"""Command-line frontend.

Subcommands: green, orbit, render, contour, classify, boettcher,
verify-functorial, verify-invariance, commute, two-level, coincide.

Exit status: 0 success / verifier pass, 1 verifier fail (or no coincidence
found), 2 usage or spec-parse error, 3 numeric or budget error.  File
outputs go under --out (created on demand) and are written atomically; every
run with --out also writes manifest.json listing artifact names and SHA-256
digests.  HENON_MAX_ITER overrides the default iteration cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .algebra import MonomialBudgetError, format_scalar
from .boettcher import (
    BranchSafetyError,
    OutsideFiltrationError,
    boettcher_minus,
    boettcher_plus,
    green_from_boettcher,
    leading_constant,
)
from .green import (
    BracketingError,
    CertificationError,
    green_minus,
    green_plus,
    write_green_csv,
)
from .maps import AutoWord, EscapedRangeError, HenonMap, classify_word, henon_apply, henon_apply_inverse
from .mapspec import MapSpecError, parse_map_spec
from .render import (
    PALETTE_ESCAPE_LOG,
    PALETTE_TWO_TONE,
    SliceSpec,
    contour_level,
    render_bytes,
    sample_grid,
    write_contour_csv,
)
from .rigidity import (
    check_commutation_scaled,
    iterate_coincidence,
    two_level_delta,
    verify_functorial,
    verify_invariance,
)
from .util import atomic_write_bytes, sha256_bytes

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _default_maxiter() -> int:
    try:
        return int(os.environ.get("HENON_MAX_ITER", "1000"))
    except ValueError:
        return 1000


class _Output:
    """Collects artifacts under --out and writes the digest manifest."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.entries = []
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)

    def write(self, name: str, data: bytes):
        if not self.out_dir:
            return
        path = os.path.join(self.out_dir, name)
        atomic_write_bytes(path, data)
        self.entries.append({"name": name, "sha256": sha256_bytes(data), "bytes": len(data)})

    def finish(self):
        if self.out_dir:
            manifest = json.dumps({"artifacts": self.entries}, indent=2) + "\n"
            atomic_write_bytes(os.path.join(self.out_dir, "manifest.json"), manifest.encode())


def _load_map(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_map_spec(fh.read())


def _load_henon(path) -> HenonMap:
    m = _load_map(path)
    if not isinstance(m, HenonMap):
        raise MapSpecError(f"{path}: expected a pure Henon word")
    return m


def _parse_point(text: str):
    parts = text.split(",")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise MapSpecError(f"point components must be numbers (got {text!r})") from None
    if len(nums) == 4:
        xr, xi, yr, yi = nums
    elif len(nums) == 2:  # real shorthand x,y
        xr, yr = nums
        xi = yi = 0.0
    else:
        raise MapSpecError(f"point must be re,im,re,im or x,y (got {text!r})")
    return (complex(xr, xi), complex(yr, yi))


def _parse_pair(text: str, what: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise MapSpecError(f"{what} must be re,im,re,im (got {text!r})")
    xr, xi, yr, yi = (float(p) for p in parts)
    return (complex(xr, xi), complex(yr, yi))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_green(args) -> int:
    h = _load_henon(args.map)
    z = _parse_point(args.point)
    fn = green_minus if args.minus else green_plus
    g = fn(h, z, args.tol, args.maxiter)
    print(
        f"value={g.value!r} error_bound={g.error_bound!r} iterations={g.iterations} "
        f"escaped={'true' if g.escaped else 'false'}"
        + (" undecided=true" if g.undecided else "")
    )
    if args.out:
        out = _Output(args.out)
        name = "green_minus.csv" if args.minus else "green_plus.csv"
        path = os.path.join(args.out, name)
        write_green_csv(path, [(z, g)])
        with open(path, "rb") as fh:
            data = fh.read()
        out.entries.append({"name": name, "sha256": sha256_bytes(data), "bytes": len(data)})
        out.finish()
    return EXIT_OK


def _cmd_orbit(args) -> int:
    h = _load_henon(args.map).as_float()
    z = _parse_point(args.point)
    step = henon_apply_inverse if args.inverse else henon_apply
    lines = ["step,x_re,x_im,y_re,y_im"]
    cur = z
    lines.append(f"0,{cur[0].real!r},{cur[0].imag!r},{cur[1].real!r},{cur[1].imag!r}")
    for n in range(1, args.steps + 1):
        cur = step(h, cur)
        lines.append(f"{n},{cur[0].real!r},{cur[0].imag!r},{cur[1].real!r},{cur[1].imag!r}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    out = _Output(args.out)
    out.write("orbit.csv", text.encode())
    out.finish()
    return EXIT_OK


def _slice_from_args(args) -> SliceSpec:
    bounds = tuple(float(p) for p in args.bounds.split(","))
    if len(bounds) != 4:
        raise MapSpecError("bounds must be umin,umax,vmin,vmax")
    return SliceSpec(
        base=_parse_pair(args.base, "base"),
        e1=_parse_pair(args.e1, "e1"),
        e2=_parse_pair(args.e2, "e2"),
        bounds=bounds,
        resolution=(args.width, args.height),
    )


def _cmd_render(args) -> int:
    h = _load_henon(args.map)
    spec = _slice_from_args(args)
    grid = sample_grid(h, spec, args.tol, args.maxiter, workers=args.workers)
    data = render_bytes(grid, args.palette, args.c)
    out = _Output(args.out)
    out.write(args.name, data)
    out.finish()
    if not args.out:
        sys.stdout.buffer.write(data)
    else:
        print(f"wrote {args.name} ({len(data)} bytes, sha256 {sha256_bytes(data)})")
    return EXIT_OK


def _cmd_contour(args) -> int:
    h = _load_henon(args.map)
    spec = _slice_from_args(args)
    grid = sample_grid(h, spec, args.tol, args.maxiter, workers=args.workers)
    polylines = contour_level(grid, args.c)
    out = _Output(args.out)
    if args.out:
        path = os.path.join(args.out, "contour.csv")
        write_contour_csv(path, polylines)
        with open(path, "rb") as fh:
            data = fh.read()
        out.entries.append({"name": "contour.csv", "sha256": sha256_bytes(data), "bytes": len(data)})
    else:
        for pid, poly in enumerate(polylines):
            for vid, (u, v) in enumerate(poly):
                print(f"{pid},{vid},{u!r},{v!r}")
    out.finish()
    print(f"polylines={len(polylines)}", file=sys.stderr)
    return EXIT_OK


def _cmd_classify(args) -> int:
    m = _load_map(args.word)
    if isinstance(m, HenonMap):
        word = AutoWord(m.factors)
    else:
        word = m
    wc = classify_word(word)
    print(f"case={wc.case}")
    print(f"indeterminacy_fwd={wc.indeterminacy_fwd or 'none'}")
    print(f"indeterminacy_bwd={wc.indeterminacy_bwd or 'none'}")
    if wc.w_fwd is not None:
        print(f"w_fwd={format_scalar(wc.w_fwd)} heuristic={'true' if wc.w_heuristic else 'false'}")
    if wc.w_bwd is not None:
        print(f"w_bwd={format_scalar(wc.w_bwd)} heuristic={'true' if wc.w_heuristic else 'false'}")
    return EXIT_OK


def _cmd_boettcher(args) -> int:
    h = _load_henon(args.map)
    z = _parse_point(args.point)
    consts = leading_constant(h)
    if args.minus:
        val = boettcher_minus(h, z, args.tol)
    else:
        val = boettcher_plus(h, z, args.tol)
    print(f"value={val.value!r} error_bound={val.error_bound!r} terms={val.terms_used}")
    print(f"c_H={format_scalar(consts.c_H)} c_H_prime={format_scalar(consts.c_H_prime)} degree={consts.degree}")
    if not args.minus:
        print(f"green_bridge={green_from_boettcher(h, z, args.tol)!r}")
    return EXIT_OK


def _cmd_verify_functorial(args) -> int:
    h = _load_henon(args.map)
    report = verify_functorial(h, args.samples, args.tol, args.maxiter)
    text = report.render()
    print(text, end="")
    out = _Output(args.out)
    out.write("functorial_report.txt", text.encode())
    out.finish()
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _cmd_verify_invariance(args) -> int:
    h = _load_henon(args.map)
    f = _load_map(args.F)
    if isinstance(f, HenonMap) and args.F_inverse:
        raise MapSpecError("--F-inverse applies to affine/elementary words only")
    if args.F_inverse:
        f = f.invert()
    report = verify_invariance(h, f, args.c, args.samples, args.tol, args.maxiter)
    text = report.render()
    print(text, end="")
    out = _Output(args.out)
    out.write("invariance_report.txt", text.encode())
    out.finish()
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _parse_scaling(text: str):
    if text == "identity":
        return (1, 1)
    parts = text.split(",")
    if len(parts) == 2:
        return (float(parts[0]), float(parts[1]))
    if len(parts) == 4:
        return (
            complex(float(parts[0]), float(parts[1])),
            complex(float(parts[2]), float(parts[3])),
        )
    raise MapSpecError("--C must be 'identity', 'dm,dp', or 'dm_re,dm_im,dp_re,dp_im'")


def _cmd_commute(args) -> int:
    h1 = _load_henon(args.map1)
    h2 = _load_henon(args.map2)
    scaling = _parse_scaling(args.C)
    report = check_commutation_scaled(h1, h2, scaling, args.tol)
    text = report.render()
    print(text, end="")
    out = _Output(args.out)
    out.write("commutation_report.txt", text.encode())
    out.finish()
    return EXIT_OK if report.holds else EXIT_VERIFY_FAIL


def _cmd_two_level(args) -> int:
    h1 = _load_henon(args.map1)
    h2 = _load_henon(args.map2)
    report = two_level_delta(h1, h2, args.c1, args.c2, args.d1, args.d2)
    print(report.render(), end="")
    return EXIT_OK


def _cmd_coincide(args) -> int:
    f = _load_map(args.F)
    h = _load_henon(args.map)
    hit = iterate_coincidence(f, h, args.mmax, args.nmax)
    if hit is None:
        print("coincidence=none")
        return EXIT_VERIFY_FAIL
    print(f"coincidence=m={hit[0]},n={hit[1]}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="henongreen",
        description="Green functions, Boettcher coordinates and rigidity checks for Henon maps",
    )
    parser.add_argument("--version", action="version", version=f"henongreen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    maxiter_default = _default_maxiter()

    def add_common(p, with_out=True):
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--maxiter", type=int, default=maxiter_default)
        if with_out:
            p.add_argument("--out", default=None, help="output directory (with manifest.json)")

    p = sub.add_parser("green", help="Green value at a point")
    p.add_argument("--map", required=True)
    p.add_argument("--point", required=True, help="x_re,x_im,y_re,y_im")
    p.add_argument("--minus", action="store_true", help="backward Green function")
    add_common(p)
    p.set_defaults(func=_cmd_green)

    p = sub.add_parser("orbit", help="forward or backward orbit CSV")
    p.add_argument("--map", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_orbit)

    def add_grid(p):
        p.add_argument("--base", default="0,0,0,0")
        p.add_argument("--e1", default="0,0,1,0")
        p.add_argument("--e2", default="0,0,0,1")
        p.add_argument("--bounds", default="-2,2,-2,2")
        p.add_argument("--width", type=int, default=256)
        p.add_argument("--height", type=int, default=256)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("render", help="PPM image of a Green slice")
    p.add_argument("--map", required=True)
    add_grid(p)
    p.add_argument("--c", type=float, default=0.5, help="two-tone threshold level")
    p.add_argument("--palette", choices=[PALETTE_ESCAPE_LOG, PALETTE_TWO_TONE], default=PALETTE_TWO_TONE)
    p.add_argument("--name", default="slice.ppm")
    add_common(p)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("contour", help="level-set polylines as CSV")
    p.add_argument("--map", required=True)
    add_grid(p)
    p.add_argument("--c", type=float, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_contour)

    p = sub.add_parser("classify", help="structural case of an automorphism word")
    p.add_argument("--word", required=True)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("boettcher", help="Boettcher coordinate at a point")
    p.add_argument("--map", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--minus", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_boettcher)

    p = sub.add_parser("verify-functorial", help="sampled functorial identity check")
    p.add_argument("--map", required=True)
    p.add_argument("--samples", type=int, default=1000)
    add_common(p)
    p.set_defaults(func=_cmd_verify_functorial, tol=1e-6)

    p = sub.add_parser("verify-invariance", help="sampled level-set invariance check")
    p.add_argument("--map", required=True)
    p.add_argument("--F", required=True, help="map spec of the candidate automorphism")
    p.add_argument("--F-inverse", action="store_true", dest="F_inverse")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)
    add_common(p)
    p.set_defaults(func=_cmd_verify_invariance, tol=1e-6)

    p = sub.add_parser("commute", help="exact scaled-commutation check")
    p.add_argument("--map1", required=True)
    p.add_argument("--map2", required=True)
    p.add_argument("--C", default="identity")
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_commute)

    p = sub.add_parser("two-level", help="scaling moduli predicted from level offsets")
    p.add_argument("--map1", required=True)
    p.add_argument("--map2", required=True)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--c2", type=float, required=True)
    p.add_argument("--d1", type=float, default=0.0)
    p.add_argument("--d2", type=float, default=0.0)
    p.set_defaults(func=_cmd_two_level)

    p = sub.add_parser("coincide", help="search for coinciding iterates F^m = H^n")
    p.add_argument("--F", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--mmax", type=int, default=3)
    p.add_argument("--nmax", type=int, default=3)
    p.set_defaults(func=_cmd_coincide)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except (MapSpecError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        MonomialBudgetError,
        BracketingError,
        CertificationError,
        BranchSafetyError,
        OutsideFiltrationError,
        EscapedRangeError,
        ZeroDivisionError,
        OverflowError,
    ) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
