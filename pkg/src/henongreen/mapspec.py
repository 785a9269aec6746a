"""Text format for map words: line-oriented JSON, exact-rational friendly.

A spec is a JSON object {"factors": [...]} with one record per letter,
applied first-to-last:

    {"kind": "henon",      "p": [a0, a1, ...], "delta": s}
    {"kind": "affine",     "a": s, "b": s, "f": s, "c": s, "d": s, "g": s}
    {"kind": "elementary", "alpha": s, "beta": s, "gamma": s, "p": [...]}

Scalars s are either a real numeral or {"re": numeral, "im": numeral}; a
numeral is a JSON integer, a JSON float, or a string "p/q".  When every
numeral in the spec is an integer or a "p/q" string the map is built on the
exact backend; one float numeral anywhere selects the float backend.

An all-henon spec parses to a HenonMap, anything else to an AutoWord.
parse o serialize is the identity on canonical (serializer-emitted) specs.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import ExactComplex, Poly1, to_complex
from .maps import AffineMap, AutoWord, ElementaryMap, HenonFactor, HenonMap


class MapSpecError(ValueError):
    """Malformed or invariant-violating map spec."""


def _contains_float(v) -> bool:
    if isinstance(v, float):
        return True
    if isinstance(v, dict):
        return any(_contains_float(x) for x in v.values())
    if isinstance(v, list):
        return any(_contains_float(x) for x in v)
    return False


def _parse_numeral(v, exact: bool, where: str):
    if isinstance(v, bool):
        raise MapSpecError(f"boolean is not a numeral ({where})")
    if isinstance(v, int):
        return Fraction(v) if exact else float(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            frac = Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise MapSpecError(f"bad rational literal {v!r} ({where}): {exc}") from None
        return frac if exact else float(frac)
    raise MapSpecError(f"bad numeral {v!r} ({where})")


def _parse_scalar(v, exact: bool, where: str):
    if isinstance(v, dict):
        extra = set(v) - {"re", "im"}
        if extra:
            raise MapSpecError(f"unknown keys {sorted(extra)} in complex literal ({where})")
        re = _parse_numeral(v.get("re", 0), exact, where)
        im = _parse_numeral(v.get("im", 0), exact, where)
    else:
        re = _parse_numeral(v, exact, where)
        im = Fraction(0) if exact else 0.0
    if exact:
        return ExactComplex(re, im)
    return complex(re, im)


def _require(record: dict, keys, idx: int):
    missing = [k for k in keys if k not in record]
    if missing:
        raise MapSpecError(f"missing fields {missing} (factor {idx})")


def parse_map_spec(text: str):
    """Parse a map spec; returns a HenonMap or an AutoWord.

    Invariants of the target types are enforced with the offending factor
    index in the message (delta != 0, deg p >= 2, alpha*beta != 0,
    ad - bc != 0).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapSpecError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "factors" not in doc:
        raise MapSpecError('spec must be an object with a "factors" list')
    records = doc["factors"]
    if not isinstance(records, list) or not records:
        raise MapSpecError('"factors" must be a nonempty list')

    exact = not _contains_float(records)
    letters = []
    kinds = set()
    for idx, record in enumerate(records):
        if not isinstance(record, dict):
            raise MapSpecError(f"factor {idx} is not an object")
        kind = record.get("kind")
        kinds.add(kind)
        where = f"factor {idx}"
        try:
            if kind == "henon":
                _require(record, ("p", "delta"), idx)
                coeffs = [_parse_scalar(c, exact, where) for c in record["p"]]
                delta = _parse_scalar(record["delta"], exact, where)
                letters.append(HenonFactor(Poly1(coeffs), delta))
            elif kind == "affine":
                _require(record, ("a", "b", "f", "c", "d", "g"), idx)
                letters.append(
                    AffineMap(*(_parse_scalar(record[k], exact, where) for k in ("a", "b", "f", "c", "d", "g")))
                )
            elif kind == "elementary":
                _require(record, ("alpha", "beta", "gamma", "p"), idx)
                coeffs = [_parse_scalar(c, exact, where) for c in record["p"]]
                letters.append(
                    ElementaryMap(
                        _parse_scalar(record["alpha"], exact, where),
                        _parse_scalar(record["beta"], exact, where),
                        _parse_scalar(record["gamma"], exact, where),
                        Poly1(coeffs),
                    )
                )
            else:
                raise MapSpecError(f"unknown kind {kind!r} (factor {idx})")
        except MapSpecError:
            raise
        except ValueError as exc:
            # invariant violations from the type constructors
            msg = str(exc)
            if "delta" in msg:
                raise MapSpecError(f"delta must be nonzero (factor {idx})") from None
            raise MapSpecError(f"{msg} (factor {idx})") from None

    if kinds == {"henon"}:
        return HenonMap(tuple(letters))
    return AutoWord(tuple(letters))


def _emit_numeral(v):
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return int(v)
        return str(v)
    return float(v)


def _emit_scalar(s):
    if isinstance(s, ExactComplex):
        if s.im == 0:
            return _emit_numeral(s.re)
        return {"re": _emit_numeral(s.re), "im": _emit_numeral(s.im)}
    z = to_complex(s)
    if z.imag == 0:
        return z.real
    return {"re": z.real, "im": z.imag}


def serialize_map(m) -> str:
    """Canonical one-line JSON for a HenonMap or AutoWord."""
    records = []
    letters = m.factors if isinstance(m, HenonMap) else m.letters
    for letter in letters:
        if isinstance(letter, HenonFactor):
            records.append(
                {
                    "kind": "henon",
                    "p": [_emit_scalar(c) for c in letter.p.coeffs],
                    "delta": _emit_scalar(letter.delta),
                }
            )
        elif isinstance(letter, AffineMap):
            records.append(
                {
                    "kind": "affine",
                    **{k: _emit_scalar(getattr(letter, k)) for k in ("a", "b", "f", "c", "d", "g")},
                }
            )
        elif isinstance(letter, ElementaryMap):
            records.append(
                {
                    "kind": "elementary",
                    "alpha": _emit_scalar(letter.alpha),
                    "beta": _emit_scalar(letter.beta),
                    "gamma": _emit_scalar(letter.gamma),
                    "p": [_emit_scalar(c) for c in letter.p.coeffs],
                }
            )
        else:
            raise TypeError(f"cannot serialize letter {letter!r}")
    return json.dumps({"factors": records}, separators=(",", ":"))
