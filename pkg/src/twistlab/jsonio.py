"""JSON encoding for families, certificates, and reports.

Rationals are serialized as "num/den" strings so no consumer ever rounds;
polynomials and rational-function numerators/denominators are coefficient
arrays, lowest degree first.
"""

from __future__ import annotations

import json

from .curves import CubicCurve, CurvePoint
from .exactmath import RatFunc, UniPoly, rat_from_str, rat_to_str
from .twistforge import TwistFamily


def poly_to_json(p: UniPoly) -> list[str]:
    return [rat_to_str(c) for c in p.coeffs]


def poly_from_json(coeffs) -> UniPoly:
    return UniPoly([rat_from_str(c) for c in coeffs])


def ratfunc_to_json(r: RatFunc) -> dict:
    return {"num": poly_to_json(r.num), "den": poly_to_json(r.den)}


def ratfunc_from_json(d) -> RatFunc:
    return RatFunc(poly_from_json(d["num"]), poly_from_json(d["den"]))


def point_to_json(p: CurvePoint) -> dict:
    if p.is_infinity:
        return {"infinity": True}
    x = p.x if isinstance(p.x, RatFunc) else RatFunc(UniPoly([p.x]))
    y = p.y if isinstance(p.y, RatFunc) else RatFunc(UniPoly([p.y]))
    return {"x": ratfunc_to_json(x), "y": ratfunc_to_json(y)}


def point_from_json(d) -> CurvePoint:
    if d.get("infinity"):
        return CurvePoint(None, None)
    return CurvePoint(ratfunc_from_json(d["x"]), ratfunc_from_json(d["y"]))


def family_to_json(fam: TwistFamily) -> dict:
    f = fam.base.f
    return {
        "curve": {"e2": rat_to_str(f.coeff(2)), "e1": rat_to_str(f.coeff(1)), "e0": rat_to_str(f.coeff(0))},
        "g": poly_to_json(fam.g),
        "points": [point_to_json(p) for p in fam.points],
        "claimed_rank": fam.claimed_rank,
        "provenance": fam.provenance,
    }


def family_from_json(d) -> TwistFamily:
    """Decode a family without validating it (certification re-checks everything)."""
    cur = d["curve"]
    f = UniPoly([rat_from_str(cur["e0"]), rat_from_str(cur["e1"]), rat_from_str(cur["e2"]), 1])
    return TwistFamily(
        base=CubicCurve(f),
        g=poly_from_json(d["g"]),
        points=tuple(point_from_json(p) for p in d["points"]),
        claimed_rank=int(d["claimed_rank"]),
        provenance=dict(d.get("provenance", {})),
    )


def dump_json(obj: dict, path=None, compact: bool = False) -> str:
    text = json.dumps(obj, indent=None if compact else 2, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
