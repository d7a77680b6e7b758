"""The named twist families: hard-coded display data cross-validated against
the construction pipeline.

Each family id selects a base curve shape, parameter constraints, the display
polynomial g and any displayed points, and the pipeline recipe (permutations,
isogenies, conic data) that re-derives the family from first principles.
`build` returns the display-backed family; `build_pipeline` re-runs the
construction; `crosscheck` compares the two up to rational-function squares
and 2-torsion translation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .curves import CubicCurve, CurvePoint, three_isogeny, two_isogeny_quotient
from .exactmath import (
    ONE,
    RatFunc,
    UniPoly,
    compose,
    rat_to_str,
    ratfunc_sqrt,
    square_class,
)
from .twistforge import (
    ConicPoint,
    ForgeError,
    Mobius,
    TwistFamily,
    assemble_rank2,
    assemble_rank3,
    checked_family,
    conic_param_double,
    conic_param_single,
    conic_point_for,
    mobius_from_triples,
    twist_from_isogeny,
    twist_from_permutation,
)

FAMILY_IDS = (
    "cor3_2",
    "cor3_3",
    "mestre3_4",
    "thm4_1",
    "thm4_2a",
    "thm4_2b",
    "thm4_3",
    "thm4_5",
    "rem4_6",
)

DEFAULT_PARAMS: dict[str, dict[str, Fraction]] = {
    "cor3_2": {"a": Fraction(1), "b": Fraction(2)},
    "cor3_3": {"b": Fraction(3), "c": Fraction(1)},
    "mestre3_4": {"a": Fraction(1), "b": Fraction(2)},
    "thm4_1": {"a": Fraction(1)},
    "thm4_2a": {"a": Fraction(2)},
    "thm4_2b": {"a": Fraction(1)},
    "thm4_3": {"a": Fraction(2), "b": Fraction(1)},
    "thm4_5": {},
    "rem4_6": {},
}

EXPECTED_DEGREE = {
    "cor3_2": 6,
    "cor3_3": 6,
    "mestre3_4": 14,
    "thm4_1": 12,
    "thm4_2a": 12,
    "thm4_2b": 12,
    "thm4_3": 11,
    "thm4_5": 12,
    "rem4_6": 3,
}

CLAIMED_RANK = {
    "cor3_2": 2,
    "cor3_3": 2,
    "mestre3_4": 2,
    "thm4_1": 3,
    "thm4_2a": 3,
    "thm4_2b": 3,
    "thm4_3": 3,
    "thm4_5": 3,
    "rem4_6": 1,
}


class ConstraintError(ValueError):
    """A family hypothesis on the parameters is violated."""


@dataclass(frozen=True)
class FamilySpec:
    """A family id plus a full parameter assignment satisfying its constraints."""

    id: str
    params: dict[str, Fraction] = field(default_factory=dict)

    @staticmethod
    def make(family_id: str, params: dict | None = None) -> "FamilySpec":
        if family_id not in FAMILY_IDS:
            raise ConstraintError(f"unknown family id {family_id!r}")
        merged = dict(DEFAULT_PARAMS[family_id])
        for key, value in (params or {}).items():
            if key not in merged:
                raise ConstraintError(f"family {family_id} takes no parameter {key!r}")
            merged[key] = Fraction(value)
        spec = FamilySpec(family_id, merged)
        _check_constraints(spec)
        return spec


def _check_constraints(spec: FamilySpec):
    p = spec.params
    fid = spec.id
    if fid == "cor3_2":
        if p["a"] * p["b"] == 0:
            raise ConstraintError("cor3_2 requires a*b != 0")
        if p["a"] ** 2 == 4 * p["b"]:
            raise ConstraintError("cor3_2 requires a^2 != 4b (nonsingular cubic)")
    elif fid == "cor3_3":
        if p["b"] * p["c"] == 0:
            raise ConstraintError("cor3_3 requires b*c != 0")
        if p["b"] ** 3 == 54 * p["c"] ** 2:
            raise ConstraintError("cor3_3 requires b^3 != 54c^2 (nonsingular cubic)")
    elif fid == "mestre3_4":
        if p["a"] * p["b"] == 0:
            raise ConstraintError("mestre3_4 requires a*b != 0")
        if 4 * p["a"] ** 3 + 27 * p["b"] ** 2 == 0:
            raise ConstraintError("mestre3_4 requires 4a^3 + 27b^2 != 0 (nonsingular cubic)")
    elif fid == "thm4_1":
        if p["a"] == 0:
            raise ConstraintError("thm4_1 requires a != 0 (lambda = -2a^2 nonzero)")
    elif fid == "thm4_2a":
        if p["a"] in (0, 1, -1):
            raise ConstraintError("thm4_2a requires a not in {0, 1, -1}")
    elif fid == "thm4_2b":
        if p["a"] in (0, 2):
            raise ConstraintError("thm4_2b requires a not in {0, 2}")
        if p["a"] == Fraction(-1, 2):
            raise ConstraintError("thm4_2b requires a != -1/2 (lambda = 1 gives a singular cubic)")
    elif fid == "thm4_3":
        if p["a"] * p["b"] == 0:
            raise ConstraintError("thm4_3 requires a*b != 0")
        if p["a"] in (1, -1):
            raise ConstraintError("thm4_3 requires a != +-1 (nonsingular cubic)")


# ---------------------------------------------------------------------------
# Base cubics and shared construction data
# ---------------------------------------------------------------------------


def _f_two_torsion(a: Fraction, b: Fraction) -> UniPoly:
    # x^3 + a x^2 + b x, rational 2-torsion at the origin
    return UniPoly([0, b, a, 1])


def _f_lambda(lam: Fraction) -> UniPoly:
    # x (x - 1) (x - lambda)
    return UniPoly([0, lam, -(1 + lam), 1])


def _f_three_subgroup(b: Fraction, c: Fraction) -> UniPoly:
    # x^3 + (b^2/4c) x^2 + b x + c, rational order-3 subgroup above x = 0
    return UniPoly([c, b, b * b / (4 * c), 1])


def _lambda_2a(p: dict) -> Fraction:
    return (1 - p["a"] ** 2) / (p["a"] ** 2 + 2)


def _lambda_2b(p: dict) -> Fraction:
    return p["a"] * (p["a"] - 2) / (p["a"] ** 2 + 1)


def _k_linear_0l(lam: Fraction) -> UniPoly:
    # square class of f(h)/f for the 0 <-> lambda root swap
    return UniPoly([1, lam - 2]) * (1 - lam)


def _k_linear_01(lam: Fraction) -> UniPoly:
    # ... for the 0 <-> 1 root swap
    return UniPoly([-lam * lam, 2 * lam - 1]) * (lam * (1 - lam))


def _k_linear_cycle(lam: Fraction) -> UniPoly:
    # ... for the 3-cycle 0 -> lambda -> 1 -> 0
    return UniPoly([-lam, lam * lam - lam + 1]) * ((1 - lam) * lam)


def _k_linear_1l(lam: Fraction) -> UniPoly:
    # ... for the 1 <-> lambda root swap
    return UniPoly([-lam, lam + 1]) * lam


def _provenance(spec: FamilySpec, method: str, t_of_u: RatFunc | None, factor_polys, notes: str = "") -> dict:
    prov = {
        "family": spec.id,
        "params": {k: rat_to_str(v) for k, v in spec.params.items()},
        "method": method,
        "claimed_rank": CLAIMED_RANK[spec.id],
        "degree": EXPECTED_DEGREE[spec.id],
        "factor_polys": [[rat_to_str(c) for c in fp.coeffs] for fp in factor_polys],
    }
    if t_of_u is not None:
        prov["t_of_u"] = t_of_u.to_str("u")
    if notes:
        prov["notes"] = notes
    return prov


def _display_point(x: RatFunc, y: RatFunc) -> CurvePoint:
    return CurvePoint(x, y)


# ---------------------------------------------------------------------------
# Display-route builders (hard-coded formulas)
# ---------------------------------------------------------------------------


def _display_cor3_2(spec: FamilySpec) -> TwistFamily:
    a, b = spec.params["a"], spec.params["b"]
    f = _f_two_torsion(a, b)
    quartic = UniPoly([b ** 4, 0, 2 * b * b - a * a * b, 0, 1])
    g = UniPoly([b * b, 0, 1]) * quartic * (-a * b)
    p1 = _display_point(
        RatFunc(UniPoly([-b * b, 0, -1]), UniPoly([a * b])),
        RatFunc(ONE, UniPoly([a * a * b * b])),
    )
    p2 = _display_point(
        RatFunc(UniPoly([-b ** 3, 0, -b]), UniPoly([0, 0, a])),
        RatFunc(UniPoly([b]), UniPoly([0, 0, 0, a * a])),
    )
    factors = [UniPoly([-a * b]), UniPoly([b * b, 0, 1]), quartic]
    fam = TwistFamily(CubicCurve(f), g, (p1, p2), 2, _provenance(spec, "display", None, factors))
    return checked_family(fam)


def _display_cor3_3(spec: FamilySpec) -> TwistFamily:
    b, c = spec.params["b"], spec.params["c"]
    f = _f_three_subgroup(b, c)
    sextic = UniPoly(
        [
            54 * c ** 6 - b ** 3 * c ** 4,
            0,
            54 * c ** 4 + 2 * b ** 3 * c * c,
            0,
            18 * c * c - b ** 3,
            0,
            2,
        ]
    )
    g = sextic * (-b * c)
    p1 = _display_point(
        RatFunc(UniPoly([-3 * c * c, 0, -1]), UniPoly([2 * b * c])),
        RatFunc(ONE, UniPoly([4 * b * b * c * c])),
    )
    swing = UniPoly([0, 0, 1]) * (UniPoly([-c * c, 0, 1]) ** 2)  # u^2 (u^2 - c^2)^2
    x2 = RatFunc(g * c - swing * b ** 4, UniPoly([0, 0, 4 * b * b * c]) * UniPoly([3 * c * c, 0, 1]) ** 2)
    y2 = RatFunc(g * c + swing * (3 * b ** 4), UniPoly([0, 0, 0, 8 * b ** 3 * c]) * UniPoly([3 * c * c, 0, 1]) ** 3)
    factors = [UniPoly([-b * c]), sextic]
    fam = TwistFamily(
        CubicCurve(f), g, (p1, _display_point(x2, y2)), 2, _provenance(spec, "display", None, factors)
    )
    return checked_family(fam)


def _mestre_data(spec: FamilySpec):
    a, b = spec.params["a"], spec.params["b"]
    f = UniPoly([b, a, 0, 1])
    # the two covering substitutions, already reduced: h1 = -b(t^2+t+1)/(a(t+1)),
    # h2 = -b(t^3-1)/(a t (t^2-1)), evaluated at t = u^2
    u2 = RatFunc(UniPoly([0, 0, 1]))
    h1 = RatFunc(UniPoly([b, b, b]) * -1, UniPoly([a, a])).compose(u2)
    h2 = RatFunc(UniPoly([-b, 0, 0, b]) * -1, UniPoly([0, -a, 0, a])).compose(u2)
    bracket = UniPoly([1, 0, 1, 0, 1]) ** 3 * (b * b) + UniPoly([0, 0, 0, 0, 1]) * UniPoly([1, 0, 1]) ** 2 * a ** 3
    g_display = bracket * UniPoly([1, 0, 1]) * (-a * b)
    factors = [UniPoly([-a * b]), bracket, UniPoly([1, 0, 1])]
    return f, h1, h2, g_display, factors


def _mestre_family(spec: FamilySpec, use_display_g: bool) -> TwistFamily:
    f, h1, h2, g_display, factors = _mestre_data(spec)
    if use_display_g:
        g = g_display
        method = "display"
    else:
        g, _ = square_class(compose(f, h1))
        method = "double-cover"
    pts = []
    for x in (h1, h2):
        y = ratfunc_sqrt(compose(f, x) / RatFunc(g))
        y, _ = y.sign_normalized()
        pts.append(CurvePoint(x, y))
    fam = TwistFamily(
        CubicCurve(f),
        g,
        tuple(pts),
        2,
        _provenance(spec, method, None, factors, notes="points at x = h1(u^2), h2(u^2); u = sqrt(t)"),
    )
    return checked_family(fam)


def _thm4_1_display_data(spec: FamilySpec):
    a = spec.params["a"]
    lam = -2 * a * a
    f = _f_lambda(lam)
    d_poly = UniPoly([2 - lam, 0, lam * (2 * lam - 1)])
    n_poly = UniPoly(
        [
            (lam - 2) ** 2 * (lam + 1),
            -4 * lam * (lam - 1) * (lam - 2),
            2 * lam * (lam + 1) * (2 * lam ** 2 - 3 * lam + 2),
            -4 * lam * lam * (lam - 1) * (2 * lam - 1),
            lam * lam * (lam + 1) * (2 * lam - 1) ** 2,
        ]
    )
    factor2 = n_poly - d_poly * d_poly * 2
    factor3 = n_poly - d_poly * d_poly * (2 * lam)
    g = n_poly * factor2 * factor3 * 2
    return f, lam, d_poly, n_poly, factor2, factor3, g


def _display_thm4_1(spec: FamilySpec) -> TwistFamily:
    a = spec.params["a"]
    f, lam, d_poly, n_poly, f2, f3, g = _thm4_1_display_data(spec)
    p1 = _display_point(RatFunc(n_poly, d_poly * d_poly * 2), RatFunc(ONE, d_poly ** 3 * 4))
    inner = UniPoly([0, -1, 1]) * (4 * lam) * UniPoly([2 - lam, lam * (2 * lam - 1)])
    q2 = UniPoly([lam - 2, -2 * lam * (2 * lam - 1), lam * (2 * lam - 1)])
    p2 = _display_point(
        RatFunc((d_poly * d_poly - inner) * (lam * lam), q2 * q2),
        RatFunc(UniPoly([a * lam]), q2 ** 3),
    )
    q3 = UniPoly([lam - 2, -(2 * lam - 4), lam * (2 * lam - 1)])
    p3 = _display_point(
        RatFunc(d_poly * d_poly + inner, q3 * q3 * lam),
        RatFunc(UniPoly([-a]), q3 ** 3 * (lam * lam)),
    )
    factors = [UniPoly([2]), n_poly, f2, f3]
    fam = TwistFamily(CubicCurve(f), g, (p1, p2, p3), 3, _provenance(spec, "display", None, factors))
    return checked_family(fam)


def _display_thm4_3_g(spec: FamilySpec) -> tuple[UniPoly, list[UniPoly]]:
    a, b = spec.params["a"], spec.params["b"]
    q = a * a - 3 * a + 4
    factors = [
        UniPoly([0, -4 * b]),
        UniPoly([-a, (a - 1) ** 2]),
        UniPoly([-(a * a + 1) * (a - 1), a * a * q]),
        UniPoly([a + 1, -2 * a * (a - 1), a * q]),
        UniPoly([(a * a + 1) ** 2, -2 * a * (a - 1) ** 2 * (a * a + 1), a * (a + 1) * (a - 1) ** 2 * q]),
        UniPoly(
            [
                (a * a + 1) ** 2,
                -4 * a * (a - 1) ** 2 * (a * a + 1),
                2 * (a - 1) ** 2 * (3 * a ** 4 - 6 * a ** 3 + 5 * a * a + 2),
                -4 * a * a * (a - 1) ** 3 * q,
                a * a * (a - 1) ** 2 * q * q,
            ]
        ),
    ]
    g = ONE
    for fp in factors:
        g = g * fp
    return g, factors


def _display_thm4_5(spec: FamilySpec) -> TwistFamily:
    f = UniPoly([0, -1, 0, 1])
    g = UniPoly([1, 0, 0, 0, -33, 0, 0, 0, -33, 0, 0, 0, 1]) * 6
    p1 = _display_point(
        RatFunc(UniPoly([-1, 0, 6, 0, -1]), UniPoly([1, 0, 1]) ** 2 * 3),
        RatFunc(UniPoly([2]), UniPoly([1, 0, 1]) ** 3 * 9),
    )
    p2 = _display_point(
        RatFunc(UniPoly([-1, 0, -6, 0, -1]), UniPoly([-1, 0, 1]) ** 2 * 3),
        RatFunc(UniPoly([2]), UniPoly([-1, 0, 1]) ** 3 * 9),
    )
    p3 = _display_point(
        RatFunc(UniPoly([1, 0, 0, 0, 1]), UniPoly([0, 0, 6])),
        RatFunc(ONE, UniPoly([0, 0, 0, 36])),
    )
    factors = [UniPoly([6]), UniPoly([1, 0, 0, 0, 1]), UniPoly([1, 0, 6, 0, 1]), UniPoly([1, 0, -6, 0, 1])]
    fam = TwistFamily(CubicCurve(f), g, (p1, p2, p3), 3, _provenance(spec, "display", None, factors))
    return checked_family(fam)


REM4_6_G = UniPoly([1, -33, -33, 1]) * 6
# x-coordinate whose cubic image has the square class of REM4_6_G; the twist
# by REM4_6_G carries the resulting nonconstant point, pinning rank 1.
REM4_6_X = RatFunc(UniPoly([25, -10, 1]), UniPoly([24, 24]))


def _display_rem4_6(spec: FamilySpec) -> TwistFamily:
    f = UniPoly([0, -1, 0, 1])
    y = ratfunc_sqrt(compose(f, REM4_6_X) / RatFunc(REM4_6_G))
    y, _ = y.sign_normalized()
    factors = [UniPoly([6]), UniPoly([1, 1]), UniPoly([1, -34, 1])]
    fam = TwistFamily(
        CubicCurve(f),
        REM4_6_G,
        (CurvePoint(REM4_6_X, y),),
        1,
        _provenance(
            spec,
            "display",
            None,
            factors,
            notes="degree 3 pins rank exactly 1 by the genus bound; the twist by g(u^8) has rank 3, not 4",
        ),
    )
    return checked_family(fam)


# ---------------------------------------------------------------------------
# Pipeline-route builders (the constructive method)
# ---------------------------------------------------------------------------


def _pipeline_cor3_2(spec: FamilySpec) -> TwistFamily:
    a, b = spec.params["a"], spec.params["b"]
    f = _f_two_torsion(a, b)
    swap = Mobius(-b, 0, a, b)  # exchanges the two nonzero roots, fixes 0
    tid = twist_from_permutation(f, swap)
    par = conic_param_single(UniPoly([-b * b, -a * b]))
    fam = assemble_rank2(f, tid, par.t_of_u, _provenance(spec, "root-permutation", par.t_of_u, []))
    return fam


def _pipeline_cor3_3(spec: FamilySpec) -> TwistFamily:
    b, c = spec.params["b"], spec.params["c"]
    f = _f_three_subgroup(b, c)
    iso = three_isogeny(b, c)
    mu = Mobius(b ** 3 - 54 * c * c, 0, 12 * b * c, 18 * c * c)
    tid = twist_from_isogeny(f, iso, mu)
    par = conic_param_single(UniPoly([-3 * c * c, -2 * b * c]))
    fam = assemble_rank2(f, tid, par.t_of_u, _provenance(spec, "isogeny", par.t_of_u, []))
    return fam


def _pipeline_mestre3_4(spec: FamilySpec) -> TwistFamily:
    return _mestre_family(spec, use_display_g=False)


def _pipeline_thm4_1(spec: FamilySpec) -> TwistFamily:
    a = spec.params["a"]
    lam = -2 * a * a
    f = _f_lambda(lam)
    tid_01 = twist_from_permutation(f, mobius_from_triples((0, 1, lam), (1, 0, lam)))
    tid_0l = twist_from_permutation(f, mobius_from_triples((0, 1, lam), (lam, 1, 0)))
    t0 = (lam + 1) / 2
    r0 = a * (lam - 1)
    par = conic_param_double(_k_linear_01(lam), _k_linear_0l(lam), ConicPoint(t0, r0, r0))
    return assemble_rank3(f, tid_01, tid_0l, par.t_of_u, _provenance(spec, "two-permutations", par.t_of_u, []))


def _pipeline_thm4_2(spec: FamilySpec) -> TwistFamily:
    if spec.id == "thm4_2a":
        lam = _lambda_2a(spec.params)
    else:
        lam = _lambda_2b(spec.params)
    f = _f_lambda(lam)
    tid_0l = twist_from_permutation(f, mobius_from_triples((0, 1, lam), (lam, 1, 0)))
    tid_cyc = twist_from_permutation(f, mobius_from_triples((0, 1, lam), (lam, 0, 1)))
    tid_1l = twist_from_permutation(f, mobius_from_triples((0, 1, lam), (0, lam, 1)))
    if spec.id == "thm4_2a":
        ka, kb = _k_linear_0l(lam), _k_linear_cycle(lam)
        tid1, tid2 = tid_0l, tid_cyc
        t0 = 2 * lam / (lam + 1)
    else:
        ka, kb = _k_linear_cycle(lam), _k_linear_1l(lam)
        tid1, tid2 = tid_cyc, tid_1l
        t0 = 1 / lam
    pt = conic_point_for(ka, kb, t0)
    par = conic_param_double(ka, kb, pt)
    fam = assemble_rank3(f, tid1, tid2, par.t_of_u, _provenance(spec, "two-permutations", par.t_of_u, []))
    return _attach_quartic_factors(fam, par.t_of_u, (Fraction(0), Fraction(1), lam))


def _pipeline_thm4_3(spec: FamilySpec) -> TwistFamily:
    a, b = spec.params["a"], spec.params["b"]
    f = UniPoly([0, a * a * b * b, -(b + a * a * b), 1])  # x (x - b) (x - a^2 b)
    iso = two_isogeny_quotient(CubicCurve(f))
    q = a * a - 3 * a + 4
    mu = Mobius(a * (a + 1) * (a - 1) ** 2 * b, -a * (a + 1) * (a - 1) ** 2 * b * b, -q, a * (a + 1) * b)
    tid_iso = twist_from_isogeny(f, iso, mu)
    tid_perm = twist_from_permutation(f, mobius_from_triples((0, b, a * a * b), (0, a * a * b, b)))
    k1p = UniPoly([-a * (a + 1) * b, q]) * ((a - 1) * a * b)
    k2p = UniPoly([-a * a * b, a * a + 1]) * b
    pt = ConicPoint(a * a * b, (a - 1) ** 2 * a * b, a * a * b)
    par = conic_param_double(k1p, k2p, pt)
    return assemble_rank3(
        f, tid_iso, tid_perm, par.t_of_u, _provenance(spec, "isogeny+permutation", par.t_of_u, [])
    )


def _pipeline_thm4_5(spec: FamilySpec) -> TwistFamily:
    f = UniPoly([0, -1, 0, 1])
    tid1 = twist_from_permutation(f, mobius_from_triples((0, 1, -1), (-1, 0, 1)))
    tid2 = twist_from_permutation(f, mobius_from_triples((0, 1, -1), (-1, 1, 0)))
    pt = conic_point_for(tid1.k, tid2.k, Fraction(-1, 3))
    par = conic_param_double(tid1.k, tid2.k, pt)
    return assemble_rank3(f, tid1, tid2, par.t_of_u, _provenance(spec, "two-permutations", par.t_of_u, []))


def _pipeline_rem4_6(spec: FamilySpec) -> TwistFamily:
    f = UniPoly([0, -1, 0, 1])
    g, j = square_class(compose(f, REM4_6_X))
    y, _ = j.sign_normalized()
    fam = TwistFamily(
        CubicCurve(f),
        g,
        (CurvePoint(REM4_6_X, y),),
        1,
        _provenance(spec, "single-cover", None, []),
    )
    return checked_family(fam)


def _attach_quartic_factors(fam: TwistFamily, t_of_u: RatFunc, roots) -> TwistFamily:
    """Record the quartic split of g induced by the roots of the base cubic."""
    quartics = [(t_of_u - r).num for r in roots]
    product = ONE
    for qn in quartics:
        product = product * qn
    k, _ = square_class(RatFunc(product) / RatFunc(fam.g))
    if k != ONE:
        raise ForgeError("quartic factor split does not multiply to g up to squares")
    prov = dict(fam.provenance)
    prov["factor_polys"] = [[rat_to_str(c) for c in qn.coeffs] for qn in quartics]
    prov["quartic_split"] = True
    fam2 = TwistFamily(fam.base, fam.g, fam.points, fam.claimed_rank, prov)
    return checked_family(fam2)


_DISPLAY_BUILDERS: dict[str, Callable[[FamilySpec], TwistFamily]] = {
    "cor3_2": _display_cor3_2,
    "cor3_3": _display_cor3_3,
    "mestre3_4": lambda spec: _mestre_family(spec, use_display_g=True),
    "thm4_1": _display_thm4_1,
    "thm4_2a": _pipeline_thm4_2,  # no displayed data: the construction is the source
    "thm4_2b": _pipeline_thm4_2,
    "thm4_3": None,  # filled below (display g, derived points)
    "thm4_5": _display_thm4_5,
    "rem4_6": _display_rem4_6,
}

_PIPELINE_BUILDERS: dict[str, Callable[[FamilySpec], TwistFamily]] = {
    "cor3_2": _pipeline_cor3_2,
    "cor3_3": _pipeline_cor3_3,
    "mestre3_4": _pipeline_mestre3_4,
    "thm4_1": _pipeline_thm4_1,
    "thm4_2a": _pipeline_thm4_2,
    "thm4_2b": _pipeline_thm4_2,
    "thm4_3": _pipeline_thm4_3,
    "thm4_5": _pipeline_thm4_5,
    "rem4_6": _pipeline_rem4_6,
}


def _display_thm4_3(spec: FamilySpec) -> TwistFamily:
    """Display g (the factored degree-11 polynomial) with pipeline-derived points
    rescaled onto the display twist."""
    g_display, factors = _display_thm4_3_g(spec)
    pipe = _pipeline_thm4_3(spec)
    rho = ratfunc_sqrt(RatFunc(pipe.g) / RatFunc(g_display))
    pts = []
    for p in pipe.points:
        y, _ = (p.y * rho).sign_normalized()
        pts.append(CurvePoint(p.x, y))
    prov = _provenance(spec, "display-g+derived-points", None, factors)
    fam = TwistFamily(pipe.base, g_display, tuple(pts), 3, prov)
    return checked_family(fam)


_DISPLAY_BUILDERS["thm4_3"] = _display_thm4_3


def build(spec: FamilySpec) -> TwistFamily:
    """The catalog family: displayed g and points where available."""
    _check_constraints(spec)
    return _DISPLAY_BUILDERS[spec.id](spec)


def twist_identities(spec: FamilySpec) -> list:
    """The certified f(h) = k*f*j^2 identities underlying a family's construction.

    Families built without such identities (the double-cover route and the
    degree-3 tower base) return an empty list.
    """
    _check_constraints(spec)
    p = spec.params
    fid = spec.id
    if fid == "cor3_2":
        a, b = p["a"], p["b"]
        return [twist_from_permutation(_f_two_torsion(a, b), Mobius(-b, 0, a, b))]
    if fid == "cor3_3":
        b, c = p["b"], p["c"]
        mu = Mobius(b ** 3 - 54 * c * c, 0, 12 * b * c, 18 * c * c)
        return [twist_from_isogeny(_f_three_subgroup(b, c), three_isogeny(b, c), mu)]
    if fid == "thm4_1":
        lam = -2 * p["a"] ** 2
        f = _f_lambda(lam)
        return [
            twist_from_permutation(f, mobius_from_triples((0, 1, lam), (1, 0, lam))),
            twist_from_permutation(f, mobius_from_triples((0, 1, lam), (lam, 1, 0))),
        ]
    if fid in ("thm4_2a", "thm4_2b"):
        lam = _lambda_2a(p) if fid == "thm4_2a" else _lambda_2b(p)
        f = _f_lambda(lam)
        perms = ((lam, 1, 0), (lam, 0, 1)) if fid == "thm4_2a" else ((lam, 0, 1), (0, lam, 1))
        return [twist_from_permutation(f, mobius_from_triples((0, 1, lam), dst)) for dst in perms]
    if fid == "thm4_3":
        a, b = p["a"], p["b"]
        f = UniPoly([0, a * a * b * b, -(b + a * a * b), 1])
        q = a * a - 3 * a + 4
        mu = Mobius(a * (a + 1) * (a - 1) ** 2 * b, -a * (a + 1) * (a - 1) ** 2 * b * b, -q, a * (a + 1) * b)
        return [
            twist_from_isogeny(f, two_isogeny_quotient(CubicCurve(f)), mu),
            twist_from_permutation(f, mobius_from_triples((0, b, a * a * b), (0, a * a * b, b))),
        ]
    if fid == "thm4_5":
        f = UniPoly([0, -1, 0, 1])
        return [
            twist_from_permutation(f, mobius_from_triples((0, 1, -1), (-1, 0, 1))),
            twist_from_permutation(f, mobius_from_triples((0, 1, -1), (-1, 1, 0))),
        ]
    return []


def build_pipeline(spec: FamilySpec) -> TwistFamily:
    """The same family re-derived through the construction pipeline."""
    _check_constraints(spec)
    return _PIPELINE_BUILDERS[spec.id](spec)


GOLDEN_VERSION = "v1"


def golden_path(family_id: str):
    """Path of the frozen pipeline output for families whose points are derived."""
    from importlib.resources import files

    return files("twistlab").joinpath("data", "golden", GOLDEN_VERSION, f"{family_id}.json")


def load_golden(family_id: str) -> TwistFamily:
    import json

    from .jsonio import family_from_json

    with golden_path(family_id).open() as fh:
        return family_from_json(json.load(fh))


def rem4_6_tower() -> tuple[TwistFamily, TwistFamily, TwistFamily]:
    """Twists by g(u), g(u^2), g(u^4) for g = 6(u^3 - 33u^2 - 33u + 1),
    carrying 1, 2, and 3 independent points respectively."""
    spec = FamilySpec.make("rem4_6")
    fam1 = build(spec)
    f = fam1.base.f
    g2 = REM4_6_G.substitute_power(2)
    p1 = CurvePoint(
        RatFunc(UniPoly([-1, 6, -1]), UniPoly([1, 1]) ** 2 * 3),
        RatFunc(UniPoly([2]), UniPoly([1, 1]) ** 3 * 9),
    )
    p2 = CurvePoint(
        RatFunc(UniPoly([-1, -6, -1]), UniPoly([-1, 1]) ** 2 * 3),
        RatFunc(UniPoly([2]), UniPoly([-1, 1]) ** 3 * 9),
    )
    prov2 = {
        "family": "rem4_6",
        "params": {},
        "method": "tower-substitution",
        "claimed_rank": 2,
        "degree": 6,
        "factor_polys": [["6"], ["1", "0", "1"], ["1", "0", "-34", "0", "1"]],
        "notes": "points of the degree-12 family with u replaced by sqrt(u)",
    }
    fam2 = checked_family(TwistFamily(fam1.base, g2, (p1, p2), 2, prov2))
    fam3_display = build(FamilySpec.make("thm4_5"))
    prov3 = dict(fam3_display.provenance)
    prov3["notes"] = "tower top: same curve as the degree-12 family"
    fam3 = checked_family(
        TwistFamily(fam3_display.base, fam3_display.g, fam3_display.points, 3, prov3)
    )
    return fam1, fam2, fam3


# ---------------------------------------------------------------------------
# Crosscheck
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrosscheckReport:
    family: str
    params: dict[str, str]
    g_square_class_matches: bool
    point_matches: tuple[dict, ...]
    messages: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.g_square_class_matches and all(m["matched"] for m in self.point_matches)


def crosscheck(spec: FamilySpec) -> CrosscheckReport:
    """Compare the display-backed family against the pipeline-derived one.

    g must agree up to rational-function squares; every catalog point must map
    to a pipeline point up to sign and translation by rational 2-torsion.
    Discrepancies are itemized in the report, never silently passed.
    """
    cat = build(spec)
    pipe = build_pipeline(spec)
    messages: list[str] = []
    quotient = RatFunc(pipe.g) / RatFunc(cat.g)
    k, rho = square_class(quotient)
    g_ok = k == ONE
    if not g_ok:
        messages.append(f"g square-class quotient is {k.to_str('u')}, not 1")
        rho = None
    point_matches = []
    if rho is not None:
        curve = cat.curve()
        rescaled = [CurvePoint(p.x, p.y * rho) for p in pipe.points]
        torsion = curve.rational_two_torsion()
        for i, cp in enumerate(cat.points, start=1):
            found = None
            for rp in rescaled:
                if rp.x == cp.x:
                    found = "exact" if rp.y == cp.y else "negation"
                    break
            if found is None:
                for rp in rescaled:
                    for tor in torsion:
                        shifted = curve.add(rp, tor)
                        if not shifted.is_infinity and shifted.x == cp.x:
                            found = "two-torsion-translate"
                            break
                    if found:
                        break
            point_matches.append({"point": i, "matched": found is not None, "via": found or "none"})
            if found is None:
                messages.append(f"catalog point {i} not matched by any pipeline point")
    return CrosscheckReport(
        family=spec.id,
        params={k_: rat_to_str(v) for k_, v in spec.params.items()},
        g_square_class_matches=g_ok,
        point_matches=tuple(point_matches),
        messages=tuple(messages),
    )
