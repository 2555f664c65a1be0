"""Exact arithmetic in the rational function field Q(p, x).

``p`` is the N-th root of the deformation parameter, so ``q = p**N``.
Every q-power that shows up in the algebras (including ``q**(2/N)``) is an
integer power of ``p``.  ``x`` is the free parameter of the differential
family and is kept symbolic.

Numerator and denominator are :class:`flint.fmpz_mpoly` polynomials in
``(p, x)``; they are kept coprime over Z with a positive leading
denominator coefficient, so structural equality is field equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
import random

import flint

__all__ = [
    "Scalar",
    "Field",
    "field",
    "constants",
    "eval_at",
    "PoleError",
    "MixedFieldError",
]

CTX = flint.fmpz_mpoly_ctx.get(("p", "x"), "deglex")
_P, _X = CTX.gens()
_ONE = CTX.constant(1)
_ZERO = CTX.constant(0)


class PoleError(ValueError):
    """Raised when a scalar is evaluated at one of its poles or at a degenerate q."""


class MixedFieldError(TypeError):
    """Raised when scalars built for different N are combined."""


class Scalar:
    """An element of Q(p, x), tagged with the rank N that fixes q = p^N."""

    __slots__ = ("num", "den", "N", "_hash")

    def __init__(self, num, den=None, N=1, _normalized=False):
        if isinstance(num, int):
            num = CTX.constant(num)
        if den is None:
            den = _ONE
        elif isinstance(den, int):
            den = CTX.constant(den)
        self.N = N
        self._hash = None
        if _normalized:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize(num, den)

    # -- construction helpers ---------------------------------------------

    def _new(self, num, den):
        return Scalar(num, den, self.N)

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.N != self.N:
                raise MixedFieldError(f"cannot combine scalars for N={self.N} and N={other.N}")
            return other
        if isinstance(other, int):
            return Scalar(CTX.constant(other), _ONE, self.N, _normalized=True)
        if isinstance(other, Fraction):
            return Scalar(CTX.constant(other.numerator), CTX.constant(other.denominator), self.N)
        return NotImplemented

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.N == other.N and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.N, str(self.num), str(self.den)))
        return self._hash

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            num = self.num + other.num
            if self.den.is_one():
                return Scalar(num, _ONE, self.N, _normalized=True)
            return self._new(num, self.den)
        return self._new(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.num, self.den, self.N, _normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return Scalar(_ZERO, _ONE, self.N, _normalized=True)
        if self.den.is_one() and other.den.is_one():
            return Scalar(self.num * other.num, _ONE, self.N, _normalized=True)
        # cross-cancel; both inputs are already reduced
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1, d2 = (self.num, other.den) if g1.is_one() else (self.num // g1, other.den // g1)
        n2, d1 = (other.num, self.den) if g2.is_one() else (other.num // g2, self.den // g2)
        return Scalar(*_sign_fix(n1 * n2, d1 * d2), N=self.N, _normalized=True)

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero scalar")
        return Scalar(*_sign_fix(self.den, self.num), N=self.N, _normalized=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        return Scalar(self.num**k, self.den**k, self.N, _normalized=True)

    def normalize(self) -> "Scalar":
        return Scalar(self.num, self.den, self.N)

    # -- inspection ---------------------------------------------------------

    def is_integer(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def degree_in_x(self) -> int:
        return max(self.num.degrees()[1], self.den.degrees()[1])

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"Scalar({to_string(self)!r}, N={self.N})"


def _sign_fix(num, den):
    if den.leading_coefficient() < 0:
        return -num, -den
    return num, den


def _normalize(num, den):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return _ZERO, _ONE
    if not den.is_one():
        g = num.gcd(den)
        if not g.is_one():
            num = num // g
            den = den // g
    return _sign_fix(num, den)


def to_string(s: Scalar) -> str:
    """Canonical text form, parseable by the expression grammar."""
    n = str(s.num)
    if s.den.is_one():
        return n
    if n in ("1", "-1"):
        return f"{n[:-1]}({s.den})^-1"
    return f"({n})*({s.den})^-1"


# -- the field for a fixed N ------------------------------------------------


class Field:
    """Named elements of Q(p, x) for a fixed N (q = p^N)."""

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("N must be a positive integer")
        self.N = N
        self.zero = Scalar(_ZERO, _ONE, N, _normalized=True)
        self.one = Scalar(_ONE, _ONE, N, _normalized=True)
        self.p = Scalar(_P, _ONE, N, _normalized=True)
        self.x = Scalar(_X, _ONE, N, _normalized=True)
        self.q = self.p**N
        self.lam = self.q - self.q.inv()
        self.nq = (self.q**N - self.q ** (-N)) / self.lam
        qn_lam = self.lam * self.q**N
        self.kq = qn_lam / (self.nq + qn_lam)

    def __call__(self, value) -> Scalar:
        if isinstance(value, Scalar):
            if value.N != self.N:
                raise MixedFieldError(f"scalar has N={value.N}, field has N={self.N}")
            return value
        if isinstance(value, int):
            return Scalar(CTX.constant(value), _ONE, self.N, _normalized=True)
        if isinstance(value, Fraction):
            return Scalar(CTX.constant(value.numerator), CTX.constant(value.denominator), self.N)
        raise TypeError(f"cannot convert {type(value).__name__} to Scalar")

    def qpow(self, k: int) -> Scalar:
        return self.p ** (self.N * k)

    def random(self, rng: random.Random, max_deg: int = 3, coeff: int = 5, with_x: bool = True) -> Scalar:
        """A random element with small integer coefficients (used by property tests)."""

        def poly():
            d = {}
            for _ in range(rng.randint(1, 4)):
                e = (rng.randint(-max_deg, max_deg), rng.randint(0, 2) if with_x else 0)
                d[e] = d.get(e, 0) + rng.randint(-coeff, coeff)
            # shift negative p-exponents into the denominator
            low = min(e[0] for e in d)
            shift = -low if low < 0 else 0
            return CTX.from_dict({(a + shift, b): c for (a, b), c in d.items() if c}), shift

        num, s1 = poly()
        den, s2 = poly()
        if den.is_zero():
            den = _ONE
        return Scalar(num * _P**s2, den * _P**s1, self.N)


@lru_cache(maxsize=None)
def field(N: int) -> Field:
    return Field(N)


def constants(N: int) -> tuple[Scalar, Scalar, Scalar]:
    """Return ``(lam, N_q, kappa_q)`` for rank N."""
    F = field(N)
    return F.lam, F.nq, F.kq


# -- evaluation ---------------------------------------------------------------


def _eval_poly(poly, p0: Fraction, x0: Fraction) -> Fraction:
    total = Fraction(0)
    for (a, b), c in poly.terms():
        total += int(c) * p0 ** int(a) * x0 ** int(b)
    return total


def eval_at(s: Scalar, p0=None, x0=0, *, q0=None) -> Fraction:
    """Evaluate ``s`` at ``p = p0``, ``x = x0`` exactly.

    Alternatively pass ``q0``; this only works when every power of ``p`` in
    ``s`` is a multiple of N (so the value is a rational function of q).
    Raises :class:`PoleError` at a pole of ``s`` and at the degenerate
    values ``p0 in {0, 1, -1}``; callers are expected to resample.
    """
    if q0 is not None:
        if p0 is not None:
            raise TypeError("pass either p0 or q0, not both")
        if Fraction(q0) in (0, 1, -1):
            raise PoleError(f"degenerate point q={q0}")
        N = s.N
        if any(int(a) % N for poly in (s.num, s.den) for a, _ in poly.monoms()):
            raise ValueError("scalar involves fractional powers of q")
        s = Scalar(s.num.deflate([N, 1]) if N > 1 else s.num, s.den.deflate([N, 1]) if N > 1 else s.den, 1)
        p0 = q0
    p0, x0 = Fraction(p0), Fraction(x0)
    if p0 in (0, 1, -1):
        raise PoleError(f"degenerate point p={p0}")
    d = _eval_poly(s.den, p0, x0)
    if d == 0:
        raise PoleError(f"pole at p={p0}, x={x0}")
    return _eval_poly(s.num, p0, x0) / d


def random_point(rng: random.Random, bound: int = 50) -> tuple[Fraction, Fraction]:
    while True:
        p0 = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if p0 not in (0, 1, -1):
            return p0, Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
