"""Weierstrass curves D*y^2 = f(x), their chord-tangent group law, and the
explicit degree-2 and degree-3 isogenies used by the twist constructions.

Coordinates live either in Q (`Fraction`) or in the rational function field
Q(u) (`RatFunc`); the group law is written once over a generic field element
type.  The law acts directly on the model D*y^2 = f(x) so that points can be
used verbatim, without short-Weierstrass coordinate changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exactmath import (
    ExactMathError,
    RatFunc,
    UniPoly,
    compose,
    discriminant_cubic,
    factorize,
    is_squarefree_int,
)

FieldElem = Union[Fraction, RatFunc]


class CurveError(ValueError):
    """A curve, point, or isogeny violated one of its construction hypotheses."""


def _is_constant_elem(x: FieldElem) -> bool:
    return not isinstance(x, RatFunc) or x.is_constant()


def evaluate_cubic(f: UniPoly, x: FieldElem) -> FieldElem:
    """f(x) for x in Q or Q(u)."""
    if isinstance(x, RatFunc):
        return compose(f, x)
    return f(x)


@dataclass(frozen=True)
class CubicCurve:
    """y^2 = f(x) with f a monic nonsingular cubic over Q."""

    f: UniPoly

    def __post_init__(self):
        if self.f.degree != 3 or self.f.leading() != 1:
            raise CurveError("curve cubic must be monic of degree 3")
        if discriminant_cubic(self.f) == 0:
            raise CurveError("singular cubic: repeated root (discriminant is zero)")

    @property
    def e2(self) -> Fraction:
        return self.f.coeff(2)

    @property
    def e1(self) -> Fraction:
        return self.f.coeff(1)

    @property
    def e0(self) -> Fraction:
        return self.f.coeff(0)

    def rational_two_torsion_x(self) -> list[Fraction]:
        """x-coordinates of the rational points of order 2 (rational roots of f)."""
        return rational_roots(self.f)

    def __repr__(self):
        return f"CubicCurve(y^2 = {self.f.to_str('x')})"


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) or the point at infinity (x is None)."""

    x: FieldElem | None
    y: FieldElem | None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def neg(self) -> "CurvePoint":
        if self.is_infinity:
            return self
        return CurvePoint(self.x, -self.y)

    def has_nonconstant_x(self) -> bool:
        return not self.is_infinity and not _is_constant_elem(self.x)

    def map_coords(self, fn) -> "CurvePoint":
        if self.is_infinity:
            return self
        return CurvePoint(fn(self.x), fn(self.y))

    def __repr__(self):
        if self.is_infinity:
            return "CurvePoint(infinity)"
        xs = self.x.to_str("u") if isinstance(self.x, RatFunc) else str(self.x)
        ys = self.y.to_str("u") if isinstance(self.y, RatFunc) else str(self.y)
        return f"CurvePoint({xs}, {ys})"


INFINITY = CurvePoint(None, None)


@dataclass(frozen=True)
class TwistedCurve:
    """D*y^2 = f(x) for a nonzero twisting element D.

    D in Q must be a squarefree integer (Q-twists are produced by
    specialization, which normalizes the square class); D in Q(u) is any
    nonzero rational function, usually the squarefree twist polynomial g.
    """

    base: CubicCurve
    d: FieldElem

    def __post_init__(self):
        d = self.d
        if isinstance(d, RatFunc):
            if d.is_zero():
                raise CurveError("twist by zero")
            return
        d = Fraction(d)
        if d == 0:
            raise CurveError("twist by zero")
        if d.denominator != 1 or not is_squarefree_int(d.numerator):
            raise CurveError("rational twist constant must be a squarefree integer")
        object.__setattr__(self, "d", d)

    # -- membership ----------------------------------------------------------

    def contains(self, pt: CurvePoint) -> bool:
        """Exact symbolic test of D*y^2 == f(x)."""
        if pt.is_infinity:
            return True
        lhs = self.d * pt.y * pt.y
        rhs = evaluate_cubic(self.base.f, pt.x)
        return lhs == rhs

    def _require(self, pt: CurvePoint):
        if not self.contains(pt):
            raise CurveError("point is not on the curve")

    # -- group law -----------------------------------------------------------

    def add(self, p: CurvePoint, q: CurvePoint) -> CurvePoint:
        """Chord-tangent addition on D*y^2 = f(x); infinity is the identity."""
        if p.is_infinity:
            return q
        if q.is_infinity:
            return p
        if p.x == q.x:
            if p.y + q.y == 0:
                return INFINITY
            # tangent: implicit differentiation of D y^2 = f(x)
            slope = evaluate_cubic(self.base.f.derivative(), p.x) / (2 * self.d * p.y)
        else:
            slope = (q.y - p.y) / (q.x - p.x)
        x3 = self.d * slope * slope - self.base.e2 - p.x - q.x
        y3 = -(p.y + slope * (x3 - p.x))
        return CurvePoint(x3, y3)

    def multiply(self, n: int, p: CurvePoint) -> CurvePoint:
        """n*P by double-and-add; 0*P is infinity."""
        if n < 0:
            return self.multiply(-n, p.neg())
        acc = INFINITY
        addend = p
        while n:
            if n & 1:
                acc = self.add(acc, addend)
            addend = self.add(addend, addend)
            n >>= 1
        return acc

    def rational_two_torsion(self) -> list[CurvePoint]:
        """The finite rational 2-torsion points (r, 0) of the twist."""
        zero: FieldElem = RatFunc(0) if isinstance(self.d, RatFunc) else Fraction(0)
        pts = []
        for r in self.base.rational_two_torsion_x():
            x: FieldElem = RatFunc(UniPoly([r])) if isinstance(self.d, RatFunc) else r
            pts.append(CurvePoint(x, zero))
        return pts

    def __repr__(self):
        ds = self.d.to_str("u") if isinstance(self.d, RatFunc) else str(self.d)
        return f"TwistedCurve(({ds})*y^2 = {self.base.f.to_str('x')})"


# ---------------------------------------------------------------------------
# Explicit isogenies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Isogeny:
    """(X, Y) -> (phi_x(X), Y*phi_y(X)) from `source` to `target`.

    The defining identity f_target(phi_x(X)) = f_source(X) * phi_y(X)^2 is
    verified symbolically at construction.
    """

    source: CubicCurve
    target: CubicCurve
    phi_x: RatFunc
    phi_y: RatFunc
    degree: int

    def __post_init__(self):
        lhs = compose(self.target.f, self.phi_x)
        rhs = RatFunc(self.source.f) * self.phi_y * self.phi_y
        if lhs != rhs:
            raise CurveError("isogeny identity f_target(phi_x) = f_source * phi_y^2 failed")


def two_isogeny_quotient(curve: CubicCurve) -> Isogeny:
    """Degree-2 isogeny from the quotient of `curve` by its 2-torsion point (0, 0).

    For f = x*(x^2 + A*x + B) the quotient curve is
    Y^2 = X*(X^2 - 2A*X + (A^2 - 4B)) and the map back down is
    phi_x = (X^2 - 2A*X + A^2 - 4B)/(4X), phi_y = (X^2 - (A^2 - 4B))/(8X^2).
    """
    f = curve.f
    if f.coeff(0) != 0:
        raise CurveError("(0, 0) is not on the curve: the cubic needs zero constant term")
    a_, b_ = f.coeff(2), f.coeff(1)
    disc_q = a_ * a_ - 4 * b_
    quotient = CubicCurve(UniPoly([0, disc_q, -2 * a_, 1]))
    phi_x = RatFunc(UniPoly([disc_q, -2 * a_, 1]), UniPoly([0, 4]))
    phi_y = RatFunc(UniPoly([-disc_q, 0, 1]), UniPoly([0, 0, 8]))
    return Isogeny(source=quotient, target=curve, phi_x=phi_x, phi_y=phi_y, degree=2)


def three_isogeny(b: Fraction, c: Fraction) -> Isogeny:
    """Degree-3 isogeny onto E: y^2 = x^3 + (b^2/4c)x^2 + bx + c from the curve
    it is 3-isogenous to via its order-3 subgroup {O, (0, +-sqrt(c))}.

    The source cubic is
        X^3 - (3b^2/4c)X^2 + (b(b^3 - 54c^2)/6c^2)X - (b^3 - 54c^2)^2/(108c^3)
    and the map is the rescaled quotient of the source by its own order-3
    subgroup at X = 0.  Requires b*c != 0 and b^3 != 54*c^2 (nonsingularity).
    """
    b, c = Fraction(b), Fraction(c)
    if b * c == 0:
        raise CurveError("three_isogeny requires b*c != 0")
    if b ** 3 == 54 * c ** 2:
        raise CurveError("three_isogeny requires b^3 != 54*c^2 (singular model)")
    m = b ** 3 - 54 * c ** 2
    target = CubicCurve(UniPoly([c, b, b * b / (4 * c), 1]))
    a4s = b * m / (6 * c * c)
    a6s = -(m ** 2) / (108 * c ** 3)
    source = CubicCurve(UniPoly([a6s, a4s, -3 * b * b / (4 * c), 1]))
    # quotient of the source by its X = 0 subgroup, then (x, y) -> ((x - b^2/c)/9, y/27)
    phi_x = RatFunc(UniPoly([4 * a6s, 2 * a4s, -b * b / c, 1]), UniPoly([0, 0, 9]))
    phi_y = RatFunc(UniPoly([-8 * a6s, -2 * a4s, 0, 1]), UniPoly([0, 0, 0, 27]))
    return Isogeny(source=source, target=target, phi_x=phi_x, phi_y=phi_y, degree=3)


# ---------------------------------------------------------------------------
# Rational roots (for 2-torsion bookkeeping)
# ---------------------------------------------------------------------------


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return divs


def rational_roots(f: UniPoly) -> list[Fraction]:
    """All rational roots of f, via the rational root theorem on its primitive part."""
    if f.is_zero():
        raise ExactMathError("zero polynomial has every root")
    roots = []
    g = f
    x_mult = 0
    while g.coeff(0) == 0 and g.degree > 0:
        g = UniPoly(g.coeffs[1:])
        x_mult += 1
    if x_mult:
        roots.append(Fraction(0))
    if g.degree <= 0:
        return roots
    _, prim = g.content_and_primitive()
    p0 = abs(prim.coeff(0).numerator)
    pl = abs(prim.leading().numerator)
    for num in _divisors(p0):
        for den in _divisors(pl):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if g(cand) == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)
