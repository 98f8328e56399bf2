"""Exact coefficient fields.

Three kinds of scalars are supported:

* rationals, as :class:`fractions.Fraction` (always reduced, positive denominator);
* the Eisenstein field Q(zeta), zeta a primitive cube root of unity, as :class:`Eis`
  (a pair ``(a, b)`` of rationals standing for ``a + b*zeta``);
* prime fields F_q with ``q = 1 (mod 3)``, as :class:`Fq`.

Each kind has a field object (:data:`QQ`, :data:`QQZETA`, :func:`GF`) that converts,
formats, parses and extracts cube roots.  Elements are immutable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterator, Union


class FieldMismatchError(TypeError):
    """Raised when two scalars from different fields are combined."""


class SpecializationError(ValueError):
    """Raised when an element cannot be reduced modulo a prime."""


Scalar = Union[int, Fraction, "Eis", "Fq"]


def _icbrt(n: int) -> int:
    """Floor of the real cube root of a non-negative integer."""
    if n < 0:
        raise ValueError("negative input")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x * x * x > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def _exact_cbrt_int(n: int) -> int | None:
    r = _icbrt(abs(n))
    if r**3 != abs(n):
        return None
    return r if n >= 0 else -r


def rational_cbrt(x: Fraction) -> Fraction | None:
    """The rational cube root of ``x``, or None."""
    x = Fraction(x)
    num = _exact_cbrt_int(x.numerator)
    den = _exact_cbrt_int(x.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def rational_sqrt(x: Fraction) -> Fraction | None:
    """The non-negative rational square root of ``x``, or None."""
    x = Fraction(x)
    if x < 0:
        return None
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        return None
    return Fraction(n, d)


def _monotone_int_root(f, lo: int, hi: int) -> int | None:
    if lo > hi:
        return None
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo < 0) == (fhi < 0):
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    return None


def _integer_roots_depressed_cubic(p: int, r: int) -> list[int]:
    """Integer roots of ``s^3 + p*s + r``.

    Roots are bounded by ``1 + max(|p|, |r|)``; the cubic is monotone on each
    piece delimited by its critical points ``+-sqrt(-p/3)``, and each piece is bisected.
    """
    f = lambda s: s * s * s + p * s + r  # noqa: E731
    bound = 1 + max(abs(p), abs(r))
    if p >= 0:
        pieces = [(-bound, bound)]
    else:
        k_lo = isqrt(-p // 3)
        while (k_lo + 1) ** 2 * 3 <= -p:
            k_lo += 1
        k_hi = k_lo if 3 * k_lo * k_lo == -p else k_lo + 1
        pieces = [(-bound, -k_hi), (-k_lo, k_lo), (k_hi, bound)]
    roots = {s for lo, hi in pieces if (s := _monotone_int_root(f, lo, hi)) is not None}
    return sorted(roots)


# ---------------------------------------------------------------------------
# Eisenstein numbers


class Eis:
    """An element ``a + b*zeta`` of Q(zeta) with ``zeta^2 + zeta + 1 = 0``."""

    __slots__ = ("a", "b")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0) -> None:
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("Eis is immutable")

    @staticmethod
    def _coerce(other) -> Eis | None:
        if isinstance(other, Eis):
            return other
        if isinstance(other, (int, Fraction)):
            return Eis(other, 0)
        if isinstance(other, Fq):
            raise FieldMismatchError("cannot combine Q(zeta) and F_q elements")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Eis(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Eis(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Eis(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.a, self.b, o.a, o.b
        bd = b * d
        return Eis(a * c - bd, a * d + b * c - bd)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a - self.b

    def conjugate(self) -> Eis:
        # zeta -> zeta^2 = -1 - zeta
        return Eis(self.a - self.b, -self.b)

    def inverse(self) -> Eis:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(zeta)")
        c = self.conjugate()
        return Eis(c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Eis(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except FieldMismatchError:
            return False
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def sort_key(self):
        return (self.a, self.b)

    def __repr__(self):
        return f"Eis({self.a}, {self.b})"

    def __str__(self):
        return QQZETA.format(self)


# ---------------------------------------------------------------------------
# prime field elements


class Fq:
    """A residue modulo a prime ``q``."""

    __slots__ = ("r", "q")

    def __init__(self, r: int, q: int) -> None:
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r % q)

    def __setattr__(self, name, value):
        raise AttributeError("Fq is immutable")

    def _coerce(self, other) -> Fq | None:
        if isinstance(other, Fq):
            if other.q != self.q:
                raise FieldMismatchError(f"F_{self.q} vs F_{other.q}")
            return other
        if isinstance(other, int):
            return Fq(other, self.q)
        if isinstance(other, (Fraction, Eis)):
            raise FieldMismatchError("specialize characteristic-0 values first")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fq(self.r + o.r, self.q)

    __radd__ = __add__

    def __neg__(self):
        return Fq(-self.r, self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fq(self.r - o.r, self.q)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fq(o.r - self.r, self.q)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fq(self.r * o.r, self.q)

    __rmul__ = __mul__

    def inverse(self) -> Fq:
        if self.r == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.q}")
        return Fq(pow(self.r, -1, self.q), self.q)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return Fq(pow(self.r, n, self.q), self.q)

    def __eq__(self, other):
        if isinstance(other, Fq):
            return self.q == other.q and self.r == other.r
        if isinstance(other, int):
            return (other - self.r) % self.q == 0
        if isinstance(other, (Fraction, Eis)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash(self.r)

    def __bool__(self):
        return self.r != 0

    def __int__(self):
        return self.r

    def sort_key(self):
        return self.r

    def __repr__(self):
        return f"Fq({self.r}, {self.q})"

    def __str__(self):
        return f"{self.r} mod {self.q}"


# ---------------------------------------------------------------------------
# field objects


_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def _parse_rational(s: str) -> Fraction:
    m = _RAT_RE.match(s)
    if not m:
        raise ValueError(f"not a rational: {s!r}")
    return Fraction(int(m.group(1)), int(m.group(2) or 1))


def _format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RationalField:
    name = "rational"
    characteristic = 0
    is_finite = False

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __call__(self, x) -> Fraction:
        if isinstance(x, Eis):
            if x.b != 0:
                raise FieldMismatchError(f"{x} is not rational")
            return x.a
        if isinstance(x, Fq):
            raise FieldMismatchError("F_q element in Q")
        if isinstance(x, str):
            return self.parse(x)
        return Fraction(x)

    def cube_roots(self, x) -> list[Fraction]:
        r = rational_cbrt(self(x))
        return [] if r is None else [r]

    def sqrt_roots(self, x) -> list[Fraction]:
        r = rational_sqrt(self(x))
        if r is None:
            return []
        return [r] if r == 0 else [r, -r]

    def format(self, x) -> str:
        return _format_rational(self(x))

    def parse(self, s: str) -> Fraction:
        return _parse_rational(s)

    def sort_key(self, x):
        return self(x)

    def tag(self) -> str:
        return "rational"

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


_EIS_TERM_RE = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*(\*?\s*w)?")


class EisensteinField:
    """Q(zeta) with basis {1, zeta}; zeta is written ``w`` in text."""

    name = "eisenstein"
    characteristic = 0
    is_finite = False

    @property
    def zero(self) -> Eis:
        return Eis(0)

    @property
    def one(self) -> Eis:
        return Eis(1)

    @property
    def zeta(self) -> Eis:
        return Eis(0, 1)

    def __call__(self, x) -> Eis:
        if isinstance(x, Eis):
            return x
        if isinstance(x, (int, Fraction)):
            return Eis(x)
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fq):
            raise FieldMismatchError("F_q element in Q(zeta)")
        raise TypeError(f"cannot convert {x!r} to Q(zeta)")

    def cube_roots(self, x) -> list[Eis]:
        """All cube roots of ``x`` in Q(zeta).

        If ``y^3 = x`` then ``n = N(y)`` is the rational cube root of ``N(x)`` and
        ``t = Tr(y)`` is a rational root of ``t^3 - 3nt - Tr(x)``; ``y`` is then a
        root of ``Z^2 - tZ + n``, whose discriminant must be ``-3`` times a square.
        """
        x = self(x)
        if not x:
            return [Eis(0)]
        n = rational_cbrt(x.norm())
        if n is None:
            return []
        tr = x.trace()
        # clear denominators: t = s/M turns the cubic into a monic integer one in s
        m = 1
        for v in (n, tr):
            m = m * v.denominator // _gcd(m, v.denominator)
        p = -3 * n * m * m
        r = -tr * m**3
        assert p.denominator == 1 and r.denominator == 1
        roots = []
        for s in _integer_roots_depressed_cubic(int(p), int(r)):
            t = Fraction(s, m)
            k = rational_sqrt((4 * n - t * t) / 3)
            if k is None:
                continue
            # sqrt(-3) = 1 + 2*zeta
            for sign in (1, -1):
                y = Eis(t / 2 + sign * k / 2, sign * k)
                if y**3 == x and y not in roots:
                    roots.append(y)
        return sorted(roots, key=Eis.sort_key)

    def sqrt_roots(self, x) -> list[Eis]:
        """All square roots of ``x`` in Q(zeta), by the same norm/trace reduction."""
        x = self(x)
        if not x:
            return [Eis(0)]
        n = rational_sqrt(x.norm())
        if n is None:
            return []
        roots: list[Eis] = []
        for nn in (n, -n):
            # y + ybar = t with t^2 = Tr(x) + 2*N(y)
            t2 = x.trace() + 2 * nn
            t0 = rational_sqrt(t2)
            if t0 is None:
                continue
            for t in {t0, -t0}:
                k = rational_sqrt((4 * nn - t * t) / 3)
                if k is None:
                    continue
                for sign in (1, -1):
                    y = Eis(t / 2 + sign * k / 2, sign * k)
                    if y * y == x and y not in roots:
                        roots.append(y)
        return sorted(roots, key=Eis.sort_key)

    def format(self, x) -> str:
        x = self(x)
        if x.b == 0:
            return _format_rational(x.a)
        bpart = _format_rational(x.b) + "*w"
        if x.a == 0:
            return bpart
        sep = "" if x.b < 0 else "+"
        return _format_rational(x.a) + sep + bpart

    def parse(self, s: str) -> Eis:
        text = s.replace(" ", "")
        if not text:
            raise ValueError("empty scalar")
        a = Fraction(0)
        b = Fraction(0)
        pos = 0
        while pos < len(text):
            m = _EIS_TERM_RE.match(text, pos)
            if not m or m.end() == pos or not (m.group(2) or m.group(3)):
                raise ValueError(f"not an Eisenstein number: {s!r}")
            sign = -1 if m.group(1) == "-" else 1
            coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(3):
                if m.group(3).startswith("*") and not m.group(2):
                    raise ValueError(f"not an Eisenstein number: {s!r}")
                b += sign * coef
            else:
                a += sign * coef
            pos = m.end()
            if pos < len(text) and text[pos] not in "+-":
                raise ValueError(f"not an Eisenstein number: {s!r}")
        return Eis(a, b)

    def sort_key(self, x):
        return self(x).sort_key()

    def tag(self) -> str:
        return "eisenstein"

    def __repr__(self):
        return "QQ(zeta)"

    def __eq__(self, other):
        return isinstance(other, EisensteinField)

    def __hash__(self):
        return hash("QQzeta")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """F_q for a prime ``q = 1 (mod 3)``, so that F_q contains the cube roots of unity."""

    name = "prime-field"
    is_finite = True

    def __init__(self, q: int) -> None:
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
        if q % 3 != 1:
            raise ValueError(f"q = {q} is not 1 mod 3")
        self.q = q
        self.characteristic = q

    @property
    def zero(self) -> Fq:
        return Fq(0, self.q)

    @property
    def one(self) -> Fq:
        return Fq(1, self.q)

    @property
    def zeta(self) -> Fq:
        """The smallest residue of multiplicative order 3."""
        return Fq(_smallest_cube_root_of_unity(self.q), self.q)

    def __call__(self, x) -> Fq:
        if isinstance(x, Fq):
            if x.q != self.q:
                raise FieldMismatchError(f"F_{x.q} element in F_{self.q}")
            return x
        if isinstance(x, int):
            return Fq(x, self.q)
        if isinstance(x, str):
            return self.parse(x)
        raise FieldMismatchError(f"cannot place {x!r} in F_{self.q}; specialize it")

    def elements(self) -> Iterator[Fq]:
        for r in range(self.q):
            yield Fq(r, self.q)

    def cube_roots(self, x) -> list[Fq]:
        """Cube roots by a Tonelli-Shanks style reduction to the 3-Sylow subgroup."""
        x = self(x)
        q = self.q
        if x.r == 0:
            return [self.zero]
        if pow(x.r, (q - 1) // 3, q) != 1:
            return []
        s, t = 0, q - 1
        while t % 3 == 0:
            s += 1
            t //= 3
        # generator c of the 3-Sylow subgroup (order 3^s)
        z = 2
        while pow(z, (q - 1) // 3, q) == 1:
            z += 1
        c = pow(z, t, q)
        e = pow(3, -1, t) if t > 1 else 0  # 3e = 1 (mod t)
        k = (3 * e - 1) // t
        # (x^e)^3 = x * a^k with a = x^t in the Sylow subgroup; look for h^3 = a^-k
        base = pow(x.r, e, q)
        a = pow(x.r, t, q)
        b = pow(a, -k, q)
        # discrete log of b to base c in a group of order 3^s, digit by digit
        gamma = pow(c, 3 ** (s - 1), q)
        digits = {1: 0, gamma: 1, gamma * gamma % q: 2}
        log = 0
        for j in range(s):
            h = pow(pow(c, -log, q) * b % q, 3 ** (s - 1 - j), q)
            log += digits[h] * 3**j
        if log % 3:
            return []
        r = base * pow(c, log // 3, q) % q
        if pow(r, 3, q) != x.r:
            return []
        w = _smallest_cube_root_of_unity(q)
        return sorted({Fq(r, q), Fq(r * w, q), Fq(r * w * w, q)}, key=Fq.sort_key)

    def sqrt_roots(self, x) -> list[Fq]:
        x = self(x)
        q = self.q
        if x.r == 0:
            return [self.zero]
        if pow(x.r, (q - 1) // 2, q) != 1:
            return []
        # Tonelli-Shanks
        s, t = 0, q - 1
        while t % 2 == 0:
            s += 1
            t //= 2
        z = 2
        while pow(z, (q - 1) // 2, q) != q - 1:
            z += 1
        m, c, tt, r = s, pow(z, t, q), pow(x.r, t, q), pow(x.r, (t + 1) // 2, q)
        while tt != 1:
            i, t2 = 0, tt
            while t2 != 1:
                t2 = t2 * t2 % q
                i += 1
            b = pow(c, 1 << (m - i - 1), q)
            m, c, tt, r = i, b * b % q, tt * b * b % q, r * b % q
        return sorted({Fq(r, q), Fq(-r, q)}, key=Fq.sort_key)

    def format(self, x) -> str:
        return str(self(x))

    def parse(self, s: str) -> Fq:
        m = re.match(r"^\s*([+-]?\d+)\s*(?:mod\s*(\d+))?\s*$", s)
        if not m:
            raise ValueError(f"not a residue: {s!r}")
        if m.group(2) is not None and int(m.group(2)) != self.q:
            raise FieldMismatchError(f"residue modulo {m.group(2)} given for F_{self.q}")
        return Fq(int(m.group(1)), self.q)

    def sort_key(self, x):
        return self(x).r

    def tag(self) -> str:
        return f"gf({self.q})"

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))


@lru_cache(maxsize=None)
def _smallest_cube_root_of_unity(q: int) -> int:
    for w in range(2, q):
        if pow(w, 3, q) == 1:
            return w
    raise ValueError(f"F_{q} has no primitive cube root of unity")


QQ = RationalField()
QQZETA = EisensteinField()


@lru_cache(maxsize=None)
def GF(q: int) -> PrimeField:
    return PrimeField(q)


Field = Union[RationalField, EisensteinField, PrimeField]


def field_from_tag(tag: str) -> Field:
    if tag == "rational":
        return QQ
    if tag == "eisenstein":
        return QQZETA
    m = re.fullmatch(r"gf\((\d+)\)", tag)
    if m:
        return GF(int(m.group(1)))
    raise ValueError(f"unknown field tag {tag!r}")


def field_of(x) -> Field:
    if isinstance(x, Fq):
        return GF(x.q)
    if isinstance(x, Eis):
        return QQZETA
    if isinstance(x, (int, Fraction)):
        return QQ
    raise TypeError(f"not a scalar: {x!r}")


def common_field(values) -> Field:
    """The smallest supported field holding all ``values`` (ints and rationals embed)."""
    found = QQ
    for v in values:
        f = field_of(v)
        if f == QQ:
            continue
        if found == QQ:
            found = f
        elif found != f:
            raise FieldMismatchError(f"{found!r} vs {f!r}")
    return found


def parse_scalar(s: str, field: Field | None = None):
    """Parse the textual scalar encoding; without a field the kind is inferred."""
    if field is not None:
        return field.parse(s)
    m = re.match(r"^\s*[+-]?\d+\s*mod\s*(\d+)\s*$", s)
    if m:
        return GF(int(m.group(1))).parse(s)
    if "w" in s:
        return QQZETA.parse(s)
    return QQ.parse(s)


def format_scalar(x) -> str:
    return field_of(x).format(x)


# ---------------------------------------------------------------------------
# specialization Q(zeta) -> F_q


@dataclass(frozen=True)
class SpecializationMap:
    """The reduction ``a + b*zeta -> a + b*omega`` into F_q."""

    q: int
    omega: int

    def __post_init__(self):
        field = GF(self.q)  # validates q
        w = field(self.omega)
        if w**3 != 1 or w == 1:
            raise ValueError(f"{self.omega} is not a primitive cube root of unity mod {self.q}")
        object.__setattr__(self, "omega", w.r)

    @property
    def field(self) -> PrimeField:
        return GF(self.q)

    def __call__(self, x):
        return specialize(x, self)


def default_specialization(q: int) -> SpecializationMap:
    return SpecializationMap(q, _smallest_cube_root_of_unity(q))


def _reduce_rational(x: Fraction, q: int) -> int:
    x = Fraction(x)
    if x.denominator % q == 0:
        raise SpecializationError(f"denominator of {x} is divisible by {q}")
    return x.numerator * pow(x.denominator, -1, q) % q


def specialize(x, m: SpecializationMap) -> Fq:
    """Image of ``x`` under the reduction map ``m``."""
    if isinstance(x, Fq):
        if x.q != m.q:
            raise FieldMismatchError(f"F_{x.q} element under reduction mod {m.q}")
        return x
    if isinstance(x, (int, Fraction)):
        return Fq(_reduce_rational(Fraction(x), m.q), m.q)
    if isinstance(x, Eis):
        return Fq(_reduce_rational(x.a, m.q) + _reduce_rational(x.b, m.q) * m.omega, m.q)
    raise TypeError(f"cannot specialize {x!r}")
