"""Exact arithmetic on homogeneous polynomials in (x, y) and on univariate
polynomials in t.

Coefficients are :class:`fractions.Fraction`.  A homogeneous polynomial of
degree ``d`` is stored densely as ``c_0 .. c_d`` meaning
``sum(c_i * x**i * y**(d - i))``.  Its dehomogenized representative is the
univariate ``u(t) = g(t, 1)``; together with the power of ``y`` dividing
``g`` it determines ``g`` completely.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

Rational = Fraction


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot convert {value!r} to a rational")


class PolynomialError(ValueError):
    pass


# --------------------------------------------------------------------------
# univariate


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial, ``coeffs[i]`` multiplies ``t**i``.

    Trailing zeros are stripped, so the zero polynomial has ``coeffs == ()``.
    """

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __add__(self, other: UniPoly) -> UniPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> UniPoly:
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + (-other)

    def __mul__(self, other) -> UniPoly:
        if not isinstance(other, UniPoly):
            c = as_rational(other)
            return UniPoly(c * a for a in self.coeffs)
        if self.is_zero or other.is_zero:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def divmod(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        if other.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly(), self
        quot = [Fraction(0)] * (dq + 1)
        lc = other.lc
        m = len(other.coeffs)
        for k in range(dq, -1, -1):
            q = rem[k + m - 1] / lc
            quot[k] = q
            if q:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= q * b
        return UniPoly(quot), UniPoly(rem[: m - 1])

    def __floordiv__(self, other: UniPoly) -> UniPoly:
        return self.divmod(other)[0]

    def __mod__(self, other: UniPoly) -> UniPoly:
        return self.divmod(other)[1]

    def derivative(self) -> UniPoly:
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> UniPoly:
        if self.is_zero:
            return self
        lc = self.lc
        return UniPoly(c / lc for c in self.coeffs)

    def __call__(self, t):
        """Horner evaluation; exact for rational ``t``."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def eval_float(self, t: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + float(c)
        return acc

    def __repr__(self) -> str:
        return f"UniPoly({[str(c) for c in self.coeffs]})"


def uni_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm (``gcd(0, 0) = 0``)."""
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(u: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm.  Returns ``[(f_i, i), ...]`` with ``u = lc * prod f_i**i``,
    each ``f_i`` monic, squarefree and pairwise coprime; constant factors omitted."""
    if u.is_zero:
        raise PolynomialError("squarefree decomposition of the zero polynomial")
    if u.degree < 1:
        return []
    du = u.derivative()
    a0 = uni_gcd(u, du)
    b = u // a0
    c = du // a0
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        a = uni_gcd(b, d)
        if a.degree > 0:
            out.append((a.monic(), i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


# --------------------------------------------------------------------------
# homogeneous bivariate


@dataclass(frozen=True)
class HomoPoly:
    """Homogeneous polynomial ``sum(c_i x^i y^(d-i))`` with exact coefficients.

    The zero polynomial has no degree; it is built with :meth:`zero` and has
    ``degree is None`` and ``coeffs == ()``.
    """

    degree: int | None
    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence = (), degree: int | None = None):
        cs = tuple(as_rational(c) for c in coeffs)
        if all(c == 0 for c in cs):
            object.__setattr__(self, "degree", None)
            object.__setattr__(self, "coeffs", ())
            return
        if degree is not None and degree != len(cs) - 1:
            raise PolynomialError("coefficient count must be degree + 1")
        object.__setattr__(self, "degree", len(cs) - 1)
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def zero(cls) -> HomoPoly:
        return cls(())

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> HomoPoly:
        """``c * x**i * y**j``."""
        cs = [0] * (i + j + 1)
        cs[i] = c
        return cls(cs)

    @property
    def is_zero(self) -> bool:
        return self.degree is None

    def coeff(self, i: int) -> Fraction:
        """Coefficient of ``x**i * y**(d - i)``."""
        if self.is_zero or not 0 <= i <= self.degree:
            return Fraction(0)
        return self.coeffs[i]

    # arithmetic ----------------------------------------------------------

    def __add__(self, other: HomoPoly) -> HomoPoly:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise PolynomialError(
                f"sum of degrees {self.degree} and {other.degree} is not homogeneous")
        return HomoPoly(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> HomoPoly:
        return HomoPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: HomoPoly) -> HomoPoly:
        return self + (-other)

    def __mul__(self, other) -> HomoPoly:
        if not isinstance(other, HomoPoly):
            c = as_rational(other)
            return HomoPoly(tuple(c * a for a in self.coeffs))
        if self.is_zero or other.is_zero:
            return HomoPoly.zero()
        out = [Fraction(0)] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return HomoPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> HomoPoly:
        if n < 0:
            raise PolynomialError("negative power of a polynomial")
        result = HomoPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomoPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # evaluation ----------------------------------------------------------

    def __call__(self, x, y):
        """Exact when ``x`` and ``y`` are rational, float otherwise."""
        if self.is_zero:
            return 0
        # homogeneous Horner: s_d = c_d, s_i = s_{i+1} * x + c_i * y^(d-i)
        acc = self.coeffs[-1]
        ypow = 1
        for c in reversed(self.coeffs[:-1]):
            ypow = ypow * y
            acc = acc * x + c * ypow
        return acc

    def float_coeffs(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)

    def __str__(self) -> str:
        return to_string(self)

    def __repr__(self) -> str:
        return f"HomoPoly({to_string(self)!r})"


def eval_float(coeffs: Sequence[float], x: float, y: float) -> float:
    """Float evaluation from precomputed float coefficients (hot path)."""
    if not coeffs:
        return 0.0
    acc = coeffs[-1]
    ypow = 1.0
    for i in range(len(coeffs) - 2, -1, -1):
        ypow *= y
        acc = acc * x + coeffs[i] * ypow
    return acc


def eval_poly(g: HomoPoly, x, y):
    """Evaluate ``g`` at ``(x, y)``; exact for rational inputs."""
    if isinstance(x, float) or isinstance(y, float):
        return eval_float(g.float_coeffs(), float(x), float(y))
    return g(x, y)


def partial_x(g: HomoPoly) -> HomoPoly:
    if g.is_zero or g.degree == 0:
        return HomoPoly.zero()
    return HomoPoly([i * g.coeffs[i] for i in range(1, g.degree + 1)])


def partial_y(g: HomoPoly) -> HomoPoly:
    if g.is_zero or g.degree == 0:
        return HomoPoly.zero()
    d = g.degree
    return HomoPoly([(d - i) * g.coeffs[i] for i in range(d)])


def angular_derivative(g: HomoPoly) -> HomoPoly:
    """``-y g_x + x g_y``: the homogeneous polynomial whose restriction to
    the unit circle is ``d/dphi g(cos phi, sin phi)``.  Degree is preserved."""
    if g.is_zero:
        return g
    gx, gy = partial_x(g), partial_y(g)
    out = HomoPoly.zero()
    if not gx.is_zero:
        out = out - HomoPoly.monomial(0, 1) * gx
    if not gy.is_zero:
        out = out + HomoPoly.monomial(1, 0) * gy
    return out


def euler_residual(g: HomoPoly, x, y) -> Fraction:
    """``x g_x + y g_y - deg(g) g`` at a rational point; identically zero."""
    if g.is_zero:
        raise PolynomialError("Euler residual of the zero polynomial")
    x, y = as_rational(x), as_rational(y)
    gx, gy = partial_x(g), partial_y(g)
    return x * gx(x, y) + y * gy(x, y) - g.degree * g(x, y)


def dehomogenize(g: HomoPoly) -> tuple[int, UniPoly]:
    """Split ``g = y**m * Homog(u)`` with ``u(t) = g(t, 1)`` and ``m = deg g - deg u``."""
    if g.is_zero:
        raise PolynomialError("cannot dehomogenize the zero polynomial")
    u = UniPoly(g.coeffs)
    return g.degree - u.degree, u


def homogenize(u: UniPoly, degree: int) -> HomoPoly:
    """Inverse of :func:`dehomogenize`: ``y**(degree - deg u) * u(x / y) * y**deg u``."""
    if u.is_zero:
        return HomoPoly.zero()
    if degree < u.degree:
        raise PolynomialError("target degree below the polynomial degree")
    cs = list(u.coeffs) + [Fraction(0)] * (degree - u.degree)
    return HomoPoly(cs)


def gcd_homo(g: HomoPoly, h: HomoPoly) -> HomoPoly:
    """Gcd normalized so its dehomogenized part is monic.

    The result is ``y**min(m_g, m_h) * Homog(gcd(u_g, u_h))``; a unit gcd
    comes back as the constant ``1``.
    """
    if g.is_zero or h.is_zero:
        raise PolynomialError("gcd with the zero polynomial")
    mg, ug = dehomogenize(g)
    mh, uh = dehomogenize(h)
    u = uni_gcd(ug, uh)
    m = min(mg, mh)
    return homogenize(u, u.degree + m)


def is_unit(g: HomoPoly) -> bool:
    return not g.is_zero and g.degree == 0


def divide_exact(g: HomoPoly, h: HomoPoly) -> HomoPoly | None:
    """Return ``q`` with ``g == q * h`` or ``None`` if ``h`` does not divide ``g``."""
    if h.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if g.is_zero:
        return g
    mg, ug = dehomogenize(g)
    mh, uh = dehomogenize(h)
    if mh > mg:
        return None
    q, r = ug.divmod(uh)
    if not r.is_zero:
        return None
    return homogenize(q, g.degree - h.degree)


# --------------------------------------------------------------------------
# printing


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_string(g: HomoPoly) -> str:
    """Canonical text, highest power of ``x`` first; parseable by ``parse_poly``."""
    if g.is_zero:
        return "0"
    d = g.degree
    parts: list[str] = []
    for i in range(d, -1, -1):
        c = g.coeffs[i]
        if c == 0:
            continue
        mono = []
        if i:
            mono.append("x" if i == 1 else f"x^{i}")
        if d - i:
            mono.append("y" if d - i == 1 else f"y^{d - i}")
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = "*".join(mono)
        elif a.denominator == 1:
            body = "*".join([_fmt_coeff(a)] + mono)
        else:
            body = "(" + _fmt_coeff(a) + ")*" + "*".join(mono)
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
