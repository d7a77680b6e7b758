"""Exact arithmetic over Q, Q[t], and Q(t).

Every value is immutable and every operation is exact: rationals are
`fractions.Fraction`, polynomials are dense coefficient tuples (lowest degree
first), and rational functions are reduced numerator/denominator pairs with a
monic denominator.  Nothing here ever rounds.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd as _int_gcd, isqrt
from typing import Iterable, Sequence, Union

Rat = Fraction

Scalar = Union[int, Fraction]


class ExactMathError(ArithmeticError):
    """Base error for exact-arithmetic violations (division by zero, bad degree...)."""


def rat_to_str(q: Fraction) -> str:
    """Serialize a rational as the decimal string "num/den" ("n" when den == 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rat_from_str(s: str) -> Fraction:
    return Fraction(s)


def _as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial over Q, coefficients lowest degree first.

    The zero polynomial has empty coefficients and degree -1.  Trailing zero
    coefficients are trimmed on construction, so equality is structural.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):  # immutable
        raise AttributeError("UniPoly is immutable")

    def __reduce__(self):
        return (UniPoly, (self.coeffs,))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(c: Scalar) -> "UniPoly":
        return UniPoly([c])

    @staticmethod
    def monomial(degree: int, c: Scalar = 1) -> "UniPoly":
        return UniPoly([0] * degree + [c])

    @staticmethod
    def from_roots(roots: Sequence[Scalar]) -> "UniPoly":
        p = ONE
        for r in roots:
            p = p * UniPoly([-_as_rat(r), 1])
        return p

    # -- structure ----------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ExactMathError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == UniPoly([other])
        return NotImplemented

    def __hash__(self):
        return hash(("UniPoly", self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other) -> "UniPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return UniPoly(
            a + b
            for a, b in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=Fraction(0))
        )

    def __sub__(self, other) -> "UniPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return UniPoly(
            a - b
            for a, b in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=Fraction(0))
        )

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly(c * other for c in self.coeffs)
        if not isinstance(other, UniPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other) -> "UniPoly":
        return (-self) + other

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return UniPoly([other])
        return NotImplemented

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ExactMathError("negative polynomial power; use RatFunc")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ExactMathError("polynomial division by zero")
        q: list[Fraction] = [Fraction(0)] * max(0, self.degree - other.degree + 1)
        rem = list(self.coeffs)
        d, lc = other.degree, other.leading()
        while len(rem) - 1 >= d and any(rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            shift = len(rem) - 1 - d
            factor = rem[-1] / lc
            q[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= factor * c
            rem.pop()
        return UniPoly(q), UniPoly(rem)

    def __floordiv__(self, other) -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "UniPoly":
        return divmod(self, other)[1]

    def __truediv__(self, other) -> "UniPoly":
        """Exact division; raises if the remainder is nonzero or scalar is zero."""
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ExactMathError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ExactMathError("inexact polynomial division")
        return q

    # -- field-flavored helpers ---------------------------------------------

    def monic(self) -> "UniPoly":
        if self.is_zero():
            raise ExactMathError("zero polynomial cannot be made monic")
        lc = self.leading()
        return self if lc == 1 else UniPoly(c / lc for c in self.coeffs)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd by the Euclidean algorithm (gcd(0, 0) is 0)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a if a.is_zero() else a.monic()

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, x):
        """Evaluate by Horner's rule; x may be a scalar, UniPoly, or RatFunc."""
        if isinstance(x, RatFunc):
            return compose(self, x)
        acc = x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_homog(self, p: "UniPoly", q: "UniPoly", n: int) -> "UniPoly":
        """Homogenized evaluation sum_i c_i p^i q^(n-i) for n >= degree."""
        if n < self.degree:
            raise ExactMathError("homogenization degree below polynomial degree")
        if self.is_zero():
            return ZERO
        # Horner in p with one factor of q folded in per step.
        acc = UniPoly([self.coeff(self.degree)])
        for i in range(self.degree - 1, -1, -1):
            acc = acc * p + UniPoly([self.coeff(i)]) * _pow_cache(q, self.degree - i)
        return acc * _pow_cache(q, n - self.degree)

    def content_and_primitive(self) -> tuple[Fraction, "UniPoly"]:
        """Write self = c * prim with prim in Z[t], content 1, positive leading coeff."""
        if self.is_zero():
            return Fraction(0), ZERO
        den_lcm = 1
        for c in self.coeffs:
            den_lcm = den_lcm * c.denominator // _int_gcd(den_lcm, c.denominator)
        ints = [c.numerator * (den_lcm // c.denominator) for c in self.coeffs]
        g = 0
        for v in ints:
            g = _int_gcd(g, v)
        sign = -1 if ints[-1] < 0 else 1
        prim = UniPoly(v // (sign * g) for v in ints)
        return Fraction(sign * g, den_lcm), prim

    def is_squarefree(self) -> bool:
        return self.is_constant() or self.gcd(self.derivative()).is_constant()

    def is_even(self) -> bool:
        """True when only even-degree coefficients are present."""
        return all(c == 0 for i, c in enumerate(self.coeffs) if i % 2 == 1)

    def substitute_power(self, m: int) -> "UniPoly":
        """Return p(t^m)."""
        out = [Fraction(0)] * (m * self.degree + 1) if not self.is_zero() else []
        for i, c in enumerate(self.coeffs):
            out[m * i] = c
        return UniPoly(out)

    # -- display -------------------------------------------------------------

    def to_str(self, var: str = "t") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            sign = " - " if c < 0 else (" + " if parts else "")
            mag = abs(c)
            if i == 0:
                body = rat_to_str(mag)
            else:
                t = var if i == 1 else f"{var}^{i}"
                body = t if mag == 1 else f"{rat_to_str(mag)}*{t}"
            if not parts and c < 0:
                sign = "-"
            parts.append(sign + body)
        return "".join(parts)

    def __repr__(self):
        return f"UniPoly('{self.to_str()}')"


_POW_CACHE: dict[tuple, UniPoly] = {}


def _pow_cache(p: UniPoly, n: int) -> UniPoly:
    key = (p.coeffs, n)
    got = _POW_CACHE.get(key)
    if got is None:
        got = p ** n
        if len(_POW_CACHE) > 4096:
            _POW_CACHE.clear()
        _POW_CACHE[key] = got
    return got


ZERO = UniPoly()
ONE = UniPoly([1])
T = UniPoly([0, 1])


def poly_arith(p: UniPoly, q: UniPoly, op: str):
    """Dispatch basic polynomial arithmetic by name; divmod returns a pair."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "divmod":
        return divmod(p, q)
    if op == "gcd":
        return p.gcd(q)
    raise ValueError(f"unknown polynomial op {op!r}")


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RatFunc:
    """Quotient of two polynomials over Q, reduced, with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE):
        if isinstance(num, (int, Fraction)):
            num = UniPoly([num])
        if isinstance(den, (int, Fraction)):
            den = UniPoly([den])
        if den.is_zero():
            raise ExactMathError("rational function with zero denominator")
        g = num.gcd(den)
        if not g.is_constant():
            num, den = num / g, den / g
        lc = den.leading()
        if lc != 1:
            num = num * (Fraction(1) / lc)
            den = den * (Fraction(1) / lc)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RatFunc is immutable")

    def __reduce__(self):
        return (RatFunc, (self.num, self.den))

    @staticmethod
    def constant(c: Scalar) -> "RatFunc":
        return RatFunc(UniPoly([c]))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def as_constant(self) -> Fraction:
        if not self.is_constant():
            raise ExactMathError("rational function is not constant")
        return self.num.coeff(0)

    def is_polynomial(self) -> bool:
        return self.den == ONE

    def as_poly(self) -> UniPoly:
        if not self.is_polynomial():
            raise ExactMathError("rational function is not a polynomial")
        return self.num

    # -- field operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc(UniPoly([other]))
        if isinstance(other, UniPoly):
            return RatFunc(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ExactMathError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc(self.den, self.num) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(("RatFunc", self.num.coeffs, self.den.coeffs))

    # -- evaluation / substitution -------------------------------------------

    def evaluate(self, x: Scalar) -> Fraction:
        """Evaluate at a rational point; raises on a pole."""
        x = _as_rat(x)
        d = self.den(x)
        if d == 0:
            raise ExactMathError(f"pole of rational function at {rat_to_str(x)}")
        return self.num(x) / d

    def compose(self, inner: "RatFunc") -> "RatFunc":
        """Substitute another rational function for the variable."""
        inner = self._coerce(inner)
        d = max(self.num.degree, self.den.degree, 0)
        p, q = inner.num, inner.den
        return RatFunc(self.num.eval_homog(p, q, d), self.den.eval_homog(p, q, d))

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def degree(self) -> int:
        """Degree as a map P^1 -> P^1 (max of numerator/denominator degrees)."""
        return max(self.num.degree, self.den.degree)

    def sign_normalized(self) -> tuple["RatFunc", int]:
        """Return (|self| with positive leading numerator coefficient, sign)."""
        if self.is_zero():
            return self, 1
        if self.num.leading() < 0:
            return -self, -1
        return self, 1

    def to_str(self, var: str = "t") -> str:
        if self.den == ONE:
            return self.num.to_str(var)
        return f"({self.num.to_str(var)})/({self.den.to_str(var)})"

    def __repr__(self):
        return f"RatFunc('{self.to_str()}')"


RF_ZERO = RatFunc(ZERO)
RF_ONE = RatFunc(ONE)
RF_T = RatFunc(T)


def compose(f: UniPoly, h) -> RatFunc:
    """f(h(t)) as a reduced rational function, for h in Q(t) (or Q[t], Q)."""
    if isinstance(h, (int, Fraction, UniPoly)):
        h = RatFunc(h)
    n = max(f.degree, 0)
    return RatFunc(f.eval_homog(h.num, h.den, n), _pow_cache(h.den, n))


# ---------------------------------------------------------------------------
# Squarefree structure
# ---------------------------------------------------------------------------


def squarefree_decompose(p: UniPoly) -> tuple[Fraction, list[tuple[UniPoly, int]]]:
    """Yun decomposition p = content * prod f_i^(m_i), f_i monic, squarefree, coprime.

    Returns (content, [(f_i, m_i)...]) with the trivial factors omitted; the
    result is re-expanded and checked against p before returning.
    """
    if p.is_zero():
        raise ExactMathError("zero polynomial has no squarefree decomposition")
    content = p.leading()
    if p.is_constant():
        return content, []
    mp = p.monic()
    factors: list[tuple[UniPoly, int]] = []
    g = mp.gcd(mp.derivative())
    b = mp / g
    c = mp.derivative() / g
    d = c - b.derivative()
    i = 1
    while not b.is_constant():
        a = b.gcd(d)
        if not a.is_constant():
            factors.append((a, i))
        b = b / a
        c = d / a
        d = c - b.derivative()
        i += 1
    check = ONE
    for f, m in factors:
        check = check * f ** m
    if check * content != p:
        raise ExactMathError("squarefree decomposition failed re-expansion check")
    return content, factors


def square_class(r) -> tuple[UniPoly, RatFunc]:
    """Split r = k * j^2 with k a canonical squarefree polynomial representative.

    k has integer coefficients, squarefree integer content, and carries the
    sign of the square class; j is sign-normalized with positive leading
    numerator coefficient.  The identity k * j^2 == r is checked exactly.
    """
    if isinstance(r, UniPoly):
        r = RatFunc(r)
    if r.is_zero():
        raise ExactMathError("square class of zero is undefined")
    p = r.num * r.den
    content, factors = squarefree_decompose(p)
    k0 = ONE
    s = ONE
    for f, m in factors:
        if m % 2 == 1:
            k0 = k0 * f
        s = s * f ** (m // 2)
    c2, prim = k0.content_and_primitive()
    c = content * c2
    d_int = squarefree_part_int(c.numerator * c.denominator)
    w = rational_sqrt(c / d_int)
    if w is None:  # pragma: no cover - c/d_int is a square by construction
        raise ExactMathError("square-class constant normalization failed")
    k = prim * d_int
    j, _ = (RatFunc(s, r.den) * w).sign_normalized()
    if RatFunc(k) * j * j != r:
        raise ExactMathError("square-class decomposition failed re-expansion check")
    return k, j


def ratfunc_sqrt(r: RatFunc) -> RatFunc:
    """Exact square root of a rational function which is a perfect square."""
    k, j = square_class(r)
    if k != ONE:
        raise ExactMathError("rational function is not a perfect square")
    return j


def discriminant_cubic(f: UniPoly) -> Fraction:
    """Discriminant of a monic cubic; zero exactly when f has a repeated root."""
    if f.degree != 3:
        raise ExactMathError("discriminant_cubic requires degree 3")
    if f.leading() != 1:
        raise ExactMathError("discriminant_cubic requires a monic cubic")
    p, q, r = f.coeff(2), f.coeff(1), f.coeff(0)
    return (
        18 * p * q * r - 4 * p ** 3 * r + p ** 2 * q ** 2 - 4 * q ** 3 - 27 * r ** 2
    )


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact nonnegative square root of a rational, or None if not a square."""
    q = _as_rat(q)
    if q < 0:
        return None
    a, b = q.numerator, q.denominator
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


# ---------------------------------------------------------------------------
# Integer factorization and squarefree parts
# ---------------------------------------------------------------------------


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = b"\x00" * len(range(p * p, limit + 1, p))
    return [i for i, f in enumerate(flags) if f]


_SMALL_PRIMES = _sieve(4096)
_TRIAL_PRIMES = [p for p in _SMALL_PRIMES if p <= 256]


def _prime_chunks() -> list[tuple[list[int], int]]:
    chunks = []
    mid = [p for p in _SMALL_PRIMES if p > 256]
    for i in range(0, len(mid), 64):
        block = mid[i : i + 64]
        prod = 1
        for p in block:
            prod *= p
        chunks.append((block, prod))
    return chunks


_PRIME_CHUNKS = _prime_chunks()

# Deterministic Miller-Rabin witnesses: the first twelve primes decide
# primality for everything below 3.317e24; the extended set is used above
# that as a safety margin for oversized inputs.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_EXTRA = (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)
_MR_PROVEN_BOUND = 3_317_044_064_679_887_385_961_981


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test, deterministic below 3.317e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:20]:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witnesses = _MR_WITNESSES if n < _MR_PROVEN_BOUND else _MR_WITNESSES + _MR_EXTRA
    for a in witnesses:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """Brent's cycle variant of Pollard rho; returns a nontrivial factor of composite odd n."""
    if n % 2 == 0:
        return 2
    for c in itertools.count(1):
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * (x - y) % n
                g = _int_gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = _int_gcd(x - ys, n)
        if g != n:
            return g
        # cycle degenerated; retry with the next polynomial constant


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {prime: exponent} (n must be nonzero)."""
    if n == 0:
        raise ExactMathError("cannot factor zero")
    n = abs(n)
    out: dict[int, int] = {}
    for p in _TRIAL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1 and n > 256 * 256:
        # batched trial division: one gcd per block of mid-sized primes
        for block, prod in _PRIME_CHUNKS:
            g = _int_gcd(n, prod)
            if g > 1:
                for p in block:
                    if g % p == 0:
                        while n % p == 0:
                            out[p] = out.get(p, 0) + 1
                            n //= p
                        g //= p
                        if g == 1:
                            break
            if n == 1:
                break
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        root = isqrt(m)
        if root * root == m:
            stack.extend((root, root))
            continue
        f = _brent_rho(m)
        stack.extend((f, m // f))
    return out


def squarefree_part_int(n: int) -> int:
    """The unique squarefree D with n = D * v^2 and sign(D) = sign(n)."""
    if n == 0:
        raise ExactMathError("squarefree part of zero is undefined")
    sign = -1 if n < 0 else 1
    d = 1
    for p, e in factorize(n).items():
        if e % 2 == 1:
            d *= p
    return sign * d


def is_squarefree_int(n: int) -> bool:
    if n == 0:
        return False
    n = abs(n)
    return all(e == 1 for e in factorize(n).values())
