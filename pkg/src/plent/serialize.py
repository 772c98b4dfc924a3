"""JSON (de)serialization with bit-exact rational round-trips.

Rationals are encoded as two decimal strings ["num", "den"] so arbitrary
precision survives any JSON implementation.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .errors import ParseError
from .plmap import Interval, PLMap
from .relation import INC, DEC, HOR, VER, MonotoneArc, PLRelation


def rat_to_json(x: Fraction) -> list[str]:
    return [str(x.numerator), str(x.denominator)]


def rat_from_json(obj: Any, where: str = "rational") -> Fraction:
    try:
        num, den = obj
        num, den = int(num), int(den)
    except (TypeError, ValueError) as err:
        raise ParseError(f"{where}: expected [num, den] strings, got {obj!r}") from err
    if den == 0:
        raise ParseError(f"{where}: zero denominator")
    return Fraction(num, den)


def plmap_to_json(f: PLMap) -> dict:
    return {"breakpoints": [[rat_to_json(x), rat_to_json(y)] for x, y in f.breakpoints]}


def plmap_from_json(obj: Any, where: str = "plmap") -> PLMap:
    if not isinstance(obj, dict) or "breakpoints" not in obj:
        raise ParseError(f"{where}: expected an object with 'breakpoints'")
    pts = []
    for i, pair in enumerate(obj["breakpoints"]):
        try:
            xo, yo = pair
        except (TypeError, ValueError) as err:
            raise ParseError(f"{where}.breakpoints[{i}]: expected [x, y]") from err
        pts.append(
            (
                rat_from_json(xo, f"{where}.breakpoints[{i}].x"),
                rat_from_json(yo, f"{where}.breakpoints[{i}].y"),
            )
        )
    try:
        return PLMap(pts)
    except ValueError as err:
        raise ParseError(f"{where}: {err}") from err


def arc_to_json(arc: MonotoneArc) -> dict:
    out = {
        "dom": [rat_to_json(arc.dom.lo), rat_to_json(arc.dom.hi)],
        "ran": [rat_to_json(arc.ran.lo), rat_to_json(arc.ran.hi)],
        "direction": arc.kind,
    }
    if arc.kind != VER:
        out["homeo"] = plmap_to_json(arc.homeo)
    return out


def arc_from_json(obj: Any, where: str = "arc") -> MonotoneArc:
    if not isinstance(obj, dict) or "direction" not in obj:
        raise ParseError(f"{where}: expected an arc object with 'direction'")
    kind = obj["direction"]
    if kind == VER:
        try:
            x = rat_from_json(obj["dom"][0], f"{where}.dom")
            lo = rat_from_json(obj["ran"][0], f"{where}.ran.lo")
            hi = rat_from_json(obj["ran"][1], f"{where}.ran.hi")
            return MonotoneArc.vertical(x, Interval(lo, hi))
        except (KeyError, IndexError, TypeError, ValueError) as err:
            raise ParseError(f"{where}: malformed vertical arc") from err
    if kind not in (INC, DEC, HOR):
        raise ParseError(f"{where}: unknown direction {kind!r}")
    try:
        return MonotoneArc.from_map(plmap_from_json(obj["homeo"], f"{where}.homeo"))
    except ValueError as err:
        raise ParseError(f"{where}: {err}") from err


def relation_to_json(rel: PLRelation) -> dict:
    return {"arcs": [arc_to_json(a) for a in rel.arcs]}


def relation_from_json(obj: Any, where: str = "relation") -> PLRelation:
    if not isinstance(obj, dict) or "arcs" not in obj:
        raise ParseError(f"{where}: expected an object with 'arcs'")
    return PLRelation(
        [arc_from_json(a, f"{where}.arcs[{i}]") for i, a in enumerate(obj["arcs"])]
    )


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
