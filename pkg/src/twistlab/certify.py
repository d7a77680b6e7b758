"""Machine-checked rank certificates for twist families.

A certificate records, with replayable witnesses: symbolic on-curve checks,
nonconstancy (hence infinite order) of every point, an independence proof,
and the genus upper bound.  Independence is established either by the
u -> -u eigenvalue split (for a fixed/negated pair) or by specializing u to
rational numbers and running a mod-p relation sieve: a dependence over Q(u)
would survive every specialization and every good prime, so one fully sieved
specialization certifies the family.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import count, product

from .curves import CubicCurve, CurvePoint, TwistedCurve
from .exactmath import (
    ExactMathError,
    RatFunc,
    UniPoly,
    discriminant_cubic,
    is_probable_prime,
    rat_to_str,
    rational_sqrt,
    squarefree_part_int,
)
from .twistforge import TwistFamily, validate_family

# Reduced torsion orders divide 12, so a mod-p relation test only needs the
# 12-multiple of the candidate combination to vanish.
TORSION_EXPONENT_BOUND = 12

DEFAULT_SAMPLES = 3
DEFAULT_PRIME_BUDGET = 25
DEFAULT_RELATION_BOUND = 10
PRIME_FLOOR = 50


class CertifyError(ValueError):
    """A structural check failed; the message names the failing check."""

    def __init__(self, check_name: str, message: str = ""):
        self.check_name = check_name
        super().__init__(message or f"certification aborted at check {check_name!r}")


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "inconclusive"
    witness: dict

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "witness": self.witness}


@dataclass(frozen=True)
class RankCertificate:
    family: str
    params: dict
    checks: tuple[CheckResult, ...]
    certified_lower: int
    genus_upper: int

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "checks": [c.to_json() for c in self.checks],
            "certified_lower": self.certified_lower,
            "genus_upper": self.genus_upper,
        }


@dataclass(frozen=True)
class SpecializedTwist:
    """A numeric twist obtained from a family at u = u0, normalized so the
    twisting constant is the squarefree part of g(u0)."""

    u0: Fraction
    d: int
    base: CubicCurve
    points: tuple[CurvePoint, ...]

    def curve(self) -> TwistedCurve:
        return TwistedCurve(self.base, Fraction(self.d))

    def to_json(self) -> dict:
        return {
            "u0": rat_to_str(self.u0),
            "d": self.d,
            "points": [
                {"x": rat_to_str(p.x), "y": rat_to_str(p.y)} for p in self.points
            ],
        }


def genus_upper_bound(g: UniPoly) -> int:
    """Genus of s^2 = g(u) for squarefree g, which bounds the twist rank."""
    return (g.degree - 1) // 2


def specialize(fam: TwistFamily, u0) -> SpecializedTwist:
    """Substitute a rational u0, clearing the square part of g(u0) into the
    y-coordinates so the twist constant is a squarefree integer."""
    u0 = Fraction(u0)
    g_val = RatFunc(fam.g).evaluate(u0)
    if g_val == 0:
        raise CertifyError("specialize", f"u0 = {rat_to_str(u0)} is a root of g")
    d = squarefree_part_int(g_val.numerator * g_val.denominator)
    w = rational_sqrt(g_val / d)
    pts = []
    for i, p in enumerate(fam.points, start=1):
        try:
            x = p.x.evaluate(u0)
            y = p.y.evaluate(u0)
        except ExactMathError as exc:
            raise CertifyError("specialize", f"u0 = {rat_to_str(u0)} hits a pole of point {i}: {exc}")
        pts.append(CurvePoint(x, y * w))
    spec = SpecializedTwist(u0, d, fam.base, tuple(pts))
    curve = spec.curve()
    for i, p in enumerate(spec.points, start=1):
        if not curve.contains(p):
            raise CertifyError("specialize", f"specialized point {i} left the curve (internal error)")
    return spec


# ---------------------------------------------------------------------------
# Mod-p reduction
# ---------------------------------------------------------------------------


class BadPrimeError(ValueError):
    """The supplied prime does not give good reduction for this data."""


class _ModCurve:
    """D*y^2 = f(x) over F_p with the same chord-tangent law as in Q."""

    __slots__ = ("p", "d", "e2", "e1", "e0")

    def __init__(self, p: int, d: int, f: UniPoly):
        self.p = p
        self.d = d % p
        self.e2 = _mod_frac(f.coeff(2), p)
        self.e1 = _mod_frac(f.coeff(1), p)
        self.e0 = _mod_frac(f.coeff(0), p)

    def f_at(self, x: int) -> int:
        return (((x + self.e2) * x + self.e1) * x + self.e0) % self.p

    def fprime_at(self, x: int) -> int:
        return (3 * x * x + 2 * self.e2 * x + self.e1) % self.p

    def on_curve(self, pt) -> bool:
        if pt is None:
            return True
        x, y = pt
        return (self.d * y * y - self.f_at(x)) % self.p == 0

    def add(self, pt1, pt2):
        p = self.p
        if pt1 is None:
            return pt2
        if pt2 is None:
            return pt1
        x1, y1 = pt1
        x2, y2 = pt2
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return None
            slope = self.fprime_at(x1) * pow(2 * self.d * y1 % p, -1, p) % p
        else:
            slope = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (self.d * slope * slope - self.e2 - x1 - x2) % p
        y3 = (-(y1 + slope * (x3 - x1))) % p
        return (x3, y3)

    def mul(self, n: int, pt):
        if n < 0:
            n, pt = -n, self.neg(pt)
        acc = None
        while n:
            if n & 1:
                acc = self.add(acc, pt)
            pt = self.add(pt, pt)
            n >>= 1
        return acc

    def neg(self, pt):
        if pt is None:
            return None
        return (pt[0], (-pt[1]) % self.p)


def _mod_frac(q: Fraction, p: int) -> int:
    if q.denominator % p == 0:
        raise BadPrimeError(f"denominator divisible by {p}")
    return q.numerator * pow(q.denominator, -1, p) % p


def _reduce_point(pt: CurvePoint, p: int):
    try:
        return (_mod_frac(Fraction(pt.x), p), _mod_frac(Fraction(pt.y), p))
    except BadPrimeError:
        raise


def good_primes(spec: SpecializedTwist, how_many: int, floor: int = PRIME_FLOOR, seed: int = 0) -> list[int]:
    """Deterministic good-reduction primes above `floor` for the sieve.

    A seeded PRNG samples from a pool four times the budget, so certificates
    are reproducible for a fixed seed.
    """
    disc = discriminant_cubic(spec.base.f)
    bad = 2 * abs(spec.d) * abs(disc.numerator) * disc.denominator
    for coeff in spec.base.f.coeffs:
        bad *= coeff.denominator
    for pt in spec.points:
        bad *= Fraction(pt.x).denominator * Fraction(pt.y).denominator
        # a point reducing to (x, 0) mod p is 2-torsion there; harmless, keep p
    pool = []
    n = max(floor, 2) + 1
    while len(pool) < 4 * how_many:
        if is_probable_prime(n) and bad % n != 0:
            pool.append(n)
        n += 1
    rng = random.Random(seed)
    return sorted(rng.sample(pool, how_many))


@dataclass(frozen=True)
class SieveVerdict:
    independent: bool
    surviving: tuple[tuple[int, ...], ...]
    excluded: int
    primes_used: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "verdict": "independent-up-to-bound" if self.independent else "possible-relation",
            "surviving_vectors": [list(v) for v in self.surviving],
            "excluded_vectors": self.excluded,
            "primes": list(self.primes_used),
        }


def _relation_vectors(r: int, bound: int):
    # canonical sign: first nonzero coordinate positive
    for vec in product(range(-bound, bound + 1), repeat=r):
        for entry in vec:
            if entry > 0:
                yield vec
                break
            if entry < 0:
                break


def mod_p_relation_sieve(
    points, d: int, f: UniPoly, primes, bound: int = DEFAULT_RELATION_BOUND
) -> SieveVerdict:
    """Exclude integer relations sum(n_i P_i) in torsion with 0 < max|n_i| <= bound.

    A candidate vector survives a prime p when 12 * sum(n_i P_i) reduces to the
    identity mod p; vectors surviving every prime are reported, and the verdict
    is independent only when none survive.
    """
    pts = tuple(points)
    r = len(pts)
    if r == 0:
        return SieveVerdict(True, (), 0, tuple(primes))
    curve = TwistedCurve(CubicCurve(f), Fraction(d))
    for p in pts:
        if not curve.contains(p):
            raise CertifyError("sieve-input", "sieve input point is not on the curve")
    survivors = list(_relation_vectors(r, bound))
    total = len(survivors)
    used = []
    for p in primes:
        if not is_probable_prime(p):
            raise BadPrimeError(f"{p} is not prime")
        mc = _ModCurve(p, d, f)
        reduced = [_reduce_point(pt, p) for pt in pts]
        for rp in reduced:
            if not mc.on_curve(rp):
                raise BadPrimeError(f"bad reduction at {p}")
        # tables of n * (12 * P_i) so each candidate costs r-1 additions
        tables = []
        for rp in reduced:
            base = mc.mul(TORSION_EXPONENT_BOUND, rp)
            tab = {0: None}
            acc = None
            for n in range(1, bound + 1):
                acc = mc.add(acc, base)
                tab[n] = acc
                tab[-n] = mc.neg(acc)
            tables.append(tab)
        used.append(p)
        still = []
        for vec in survivors:
            acc = None
            for i, n in enumerate(vec):
                acc = mc.add(acc, tables[i][n])
            if acc is None:
                still.append(vec)
        survivors = still
        if not survivors:
            break
    return SieveVerdict(
        independent=not survivors,
        surviving=tuple(survivors),
        excluded=total - len(survivors),
        primes_used=tuple(used),
    )


# ---------------------------------------------------------------------------
# The u -> -u eigenvalue split
# ---------------------------------------------------------------------------


def _negate_u(r: RatFunc) -> RatFunc:
    flip_num = UniPoly([c if i % 2 == 0 else -c for i, c in enumerate(r.num.coeffs)])
    flip_den = UniPoly([c if i % 2 == 0 else -c for i, c in enumerate(r.den.coeffs)])
    return RatFunc(flip_num, flip_den)


def automorphism_classification(fam: TwistFamily) -> list[str] | None:
    """Classify each point under u -> -u as fixed / negated / moved.

    Applicable only when g is even (so the substitution acts on the twist);
    returns None otherwise.
    """
    if not fam.g.is_even():
        return None
    out = []
    for p in fam.points:
        x2, y2 = _negate_u(p.x), _negate_u(p.y)
        if x2 == p.x and y2 == p.y:
            out.append("fixed")
        elif x2 == p.x and y2 == -p.y:
            out.append("negated")
        else:
            out.append("moved")
    return out


# ---------------------------------------------------------------------------
# The certificate
# ---------------------------------------------------------------------------


def _candidate_u0s(fam: TwistFamily, how_many: int):
    """Deterministic specialization points avoiding roots, poles, and
    2-torsion degenerations."""
    found = []
    for n in count(2):
        u0 = Fraction(n)
        if RatFunc(fam.g).evaluate(u0) == 0:
            continue
        ok = True
        for p in fam.points:
            try:
                if p.y.evaluate(u0) == 0:
                    ok = False
                    break
                p.x.evaluate(u0)
            except ExactMathError:
                ok = False
                break
        if ok:
            found.append(u0)
            if len(found) == how_many:
                return found
    return found


def certify_family(
    fam: TwistFamily,
    samples: int = DEFAULT_SAMPLES,
    prime_budget: int = DEFAULT_PRIME_BUDGET,
    relation_bound: int = DEFAULT_RELATION_BOUND,
    seed: int = 0,
) -> RankCertificate:
    """Run every certificate check in order; structural failures abort with
    the failing check named, independence failures only lower the result."""
    checks: list[CheckResult] = []
    failures = validate_family(fam)
    curve = fam.curve()
    for i, p in enumerate(fam.points, start=1):
        name = f"on-curve[{i}]"
        ok = name not in failures and curve.contains(p)
        checks.append(CheckResult(name, "pass" if ok else "fail", {"point": i}))
        if not ok:
            raise CertifyError(name)
    for i, p in enumerate(fam.points, start=1):
        name = f"nonconstant-x[{i}]"
        ok = p.has_nonconstant_x()
        checks.append(
            CheckResult(name, "pass" if ok else "fail", {"point": i, "reason": "nonconstant x implies infinite order"})
        )
        if not ok:
            raise CertifyError(name)
    for name in ("g-squarefree", "g-nonconstant"):
        ok = name not in failures
        checks.append(CheckResult(name, "pass" if ok else "fail", {}))
        if not ok:
            raise CertifyError(name)

    genus = genus_upper_bound(fam.g)
    r = len(fam.points)
    certified = 1 if r >= 1 else 0
    independence_witness: dict = {"strategy": "single nonconstant point"} if r else {}

    if r == 2:
        classes = automorphism_classification(fam)
        if classes is not None and sorted(classes) == ["fixed", "negated"]:
            certified = 2
            independence_witness = {"strategy": "u->-u eigensplit", "classes": classes}
            checks.append(CheckResult("independence", "pass", independence_witness))
    if r >= 2 and certified < r:
        sieve_witnesses = []
        for u0 in _candidate_u0s(fam, samples):
            spec = specialize(fam, u0)
            primes = good_primes(spec, prime_budget, seed=seed)
            verdict = mod_p_relation_sieve(spec.points, spec.d, fam.base.f, primes, relation_bound)
            entry = {"u0": rat_to_str(u0), "d": spec.d, **verdict.to_json()}
            sieve_witnesses.append(entry)
            if verdict.independent:
                certified = r
                break
        if certified < r:
            # fall back to pair subsets before settling for a single point
            best = certified
            for u0 in _candidate_u0s(fam, 1):
                spec = specialize(fam, u0)
                primes = good_primes(spec, prime_budget, seed=seed)
                for i in range(r):
                    for j in range(i + 1, r):
                        verdict = mod_p_relation_sieve(
                            (spec.points[i], spec.points[j]), spec.d, fam.base.f, primes, relation_bound
                        )
                        if verdict.independent:
                            best = max(best, 2)
            certified = best
        independence_witness = {
            "strategy": "specialization + mod-p relation sieve",
            "relation_bound": relation_bound,
            "specializations": sieve_witnesses,
        }
        checks.append(
            CheckResult(
                "independence",
                "pass" if certified == r else "inconclusive",
                independence_witness,
            )
        )
    elif r == 1:
        checks.append(CheckResult("independence", "pass", independence_witness))

    checks.append(
        CheckResult(
            "genus-bound",
            "pass" if certified <= genus else "fail",
            {"genus_upper": genus, "certified_lower": certified},
        )
    )
    if certified > genus:
        raise CertifyError("genus-bound", "certified rank exceeded the genus bound (internal error)")
    prov = fam.provenance
    return RankCertificate(
        family=prov.get("family", "?"),
        params=prov.get("params", {}),
        checks=tuple(checks),
        certified_lower=certified,
        genus_upper=genus,
    )
