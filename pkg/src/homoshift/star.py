"""Property (*) and the angular factorization of a homogeneous polynomial.

Angular roots are the zeros of ``phi -> g(cos phi, sin phi)``.  They come
from exact Sturm isolation of ``u(t) = g(t, 1)`` (a real root ``t`` is the
direction ``(t, 1)``, angle ``atan2(1, t)``) plus the angle ``0`` carried by
every factor of ``y``.  Multiplicities are therefore exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .poly import (
    HomoPoly,
    PolynomialError,
    UniPoly,
    angular_derivative,
    as_rational,
    dehomogenize,
    eval_float,
    gcd_homo,
    homogenize,
    is_unit,
    partial_x,
    partial_y,
    squarefree_decomposition,
    to_string,
    uni_gcd,
)

HALF_PI = 0.5 * math.pi

# switch to the series branch of gamma this close to an angular root
SERIES_RADIUS = 1e-4
_SERIES_TERMS = 5


class StarError(ValueError):
    pass


# ------------------------------------------------------ root isolation


@dataclass(frozen=True)
class RootIsolation:
    intervals: list[tuple[Fraction, Fraction, int]]
    refined: list[float]

    @property
    def roots(self) -> list[tuple[float, int]]:
        return [(r, m) for r, (_, _, m) in zip(self.refined, self.intervals)]


def sturm_sequence(f: UniPoly) -> list[UniPoly]:
    seq = [f, f.derivative()]
    while not seq[-1].is_zero:
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_variations(seq: list[UniPoly], t: Fraction) -> int:
    signs = [s for s in (_sign(p(t)) for p in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_bound(f: UniPoly) -> Fraction:
    """A power of two strictly larger than every |root| of ``f``."""
    lc = abs(f.lc)
    bound = 1 + max((abs(c) / lc for c in f.coeffs[:-1]), default=Fraction(0))
    b = Fraction(1)
    while b <= bound:
        b *= 2
    return b


def real_roots(u: UniPoly, tol: float = 1e-12) -> RootIsolation:
    """Isolate and refine all real roots of ``u`` with exact multiplicities.

    Roots of the squarefree part are isolated by Sturm counts on half-open
    intervals ``(lo, hi]`` and refined by exact bisection until the interval
    is no wider than ``tol``; the multiplicity of each root is the index of
    the squarefree factor that vanishes on its interval.
    """
    if u.is_zero:
        raise PolynomialError("real roots of the zero polynomial")
    if u.degree < 1:
        return RootIsolation([], [])
    factors = squarefree_decomposition(u)
    sqf = UniPoly([1])
    for f, _ in factors:
        sqf = sqf * f
    seq = sturm_sequence(sqf)
    width = as_rational(tol)

    B = cauchy_bound(sqf)
    pending = [(-B, B, sign_variations(seq, -B) - sign_variations(seq, B))]
    isolated: list[tuple[Fraction, Fraction]] = []
    while pending:
        lo, hi, count = pending.pop()
        if count == 0:
            continue
        if count == 1:
            isolated.append((lo, hi))
            continue
        mid = _split_point(sqf, lo, hi)
        vm = sign_variations(seq, mid)
        pending.append((lo, mid, sign_variations(seq, lo) - vm))
        pending.append((mid, hi, vm - sign_variations(seq, hi)))

    intervals = []
    refined = []
    for lo, hi in sorted(isolated):
        lo, hi = _refine(sqf, lo, hi, width)
        mult = next(m for f, m in factors if _vanishes_on(f, lo, hi))
        intervals.append((lo, hi, mult))
        refined.append(float((lo + hi) / 2))
    return RootIsolation(intervals, refined)


def _split_point(f: UniPoly, lo: Fraction, hi: Fraction) -> Fraction:
    # Sturm counts on (a, b] need f(a) != 0, so never split at a root
    for num, den in ((1, 2), (3, 7), (4, 7), (2, 5), (3, 5)):
        mid = lo + (hi - lo) * num / den
        if f(mid) != 0:
            return mid
    raise AssertionError("squarefree polynomial vanishes at five points of an interval")


def _refine(f: UniPoly, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    # the single root lies in (lo, hi]
    if f(hi) == 0:
        return hi, hi
    s_lo = _sign(f(lo))
    while hi - lo > width * max(1, abs(lo), abs(hi)):
        mid = (lo + hi) / 2
        s = _sign(f(mid))
        if s == 0:
            return mid, mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _vanishes_on(f: UniPoly, lo: Fraction, hi: Fraction) -> bool:
    a, b = f(lo), f(hi)
    return a == 0 or b == 0 or _sign(a) != _sign(b)


# ------------------------------------------------------------ property (*)


@dataclass(frozen=True)
class StarReport:
    holds: bool
    via_squarefree: bool
    via_coprime_partials: bool
    detail: str

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "via_squarefree": self.via_squarefree,
            "via_coprime_partials": self.via_coprime_partials,
            "detail": self.detail,
        }


def is_star(g: HomoPoly) -> StarReport:
    """Decide property (*) from squarefreeness and, independently, from the
    coprimality of the partial derivatives."""
    if g.is_zero or g.degree < 2:
        raise StarError("property (*) needs a homogeneous polynomial of degree >= 2")
    m, u = dehomogenize(g)
    sqf_u = u.degree < 1 or uni_gcd(u, u.derivative()).degree == 0
    via_squarefree = m <= 1 and sqf_u

    gx, gy = partial_x(g), partial_y(g)
    if gx.is_zero or gy.is_zero:
        via_partials = False
        why = "g does not depend on both variables"
    else:
        common = gcd_homo(gx, gy)
        via_partials = is_unit(common)
        why = "g_x, g_y coprime" if via_partials else f"gcd(g_x, g_y) = {common}"

    if via_squarefree:
        detail = f"no repeated factors; {why}"
    elif m > 1:
        detail = f"y^{m} divides g; {why}"
    else:
        common = uni_gcd(u, u.derivative())
        detail = f"repeated factor {to_string(homogenize(common, common.degree))}; {why}"
    if via_squarefree != via_partials:
        detail += "; criteria DISAGREE"
    return StarReport(via_squarefree, via_squarefree, via_partials, detail)


# -------------------------------------------------------- angular factors


class AngularProfile:
    """``u(phi) = g(cos phi, sin phi)`` and its phi-derivatives.

    The k-th derivative is the restriction of ``D^k g`` to the unit circle,
    where ``D = -y d/dx + x d/dy``; the polynomials are computed exactly
    once and evaluated in floats.
    """

    def __init__(self, g: HomoPoly, order: int = 8):
        polys = [g]
        for _ in range(order):
            polys.append(angular_derivative(polys[-1]))
        self.g = g
        self._coeffs = [p.float_coeffs() for p in polys]

    def _extend(self, k: int) -> None:
        p = self.g
        polys = [p]
        for _ in range(k):
            polys.append(angular_derivative(polys[-1]))
        self._coeffs = [q.float_coeffs() for q in polys]

    def __call__(self, phi: float, k: int = 0) -> float:
        if k >= len(self._coeffs):
            self._extend(k + 4)
        return eval_float(self._coeffs[k], math.cos(phi), math.sin(phi))

    def quotient(self, phi: float, root: float, mult: int, shift: int = 0) -> float:
        """``u^(shift)(phi) / (phi - root)**mult`` with ``root`` a zero of
        order ``mult + shift`` of ``u``; series branch near the root."""
        delta = phi - root
        if abs(delta) < SERIES_RADIUS:
            total = 0.0
            for j in range(_SERIES_TERMS):
                total += self(root, shift + mult + j) * delta ** j / math.factorial(mult + j)
            return total
        return self(phi, shift) / delta ** mult


@dataclass(frozen=True)
class FactorDecomp:
    """Angular roots of ``g`` in the window ``[center - pi/2, center + pi/2)``.

    ``scale`` is the coefficient of ``x^deg(u) y^y_mult``, so that
    ``g = scale * y^y_mult * prod(x - t_i y)^(m_i) * tau / lc(tau)``.
    """

    y_mult: int
    linear_roots: list[tuple[float, int]]
    window_center: float
    tau_degree: int
    tau_positive: bool
    scale: float
    degree: int = field(default=0)

    @property
    def window(self) -> tuple[float, float]:
        return self.window_center - HALF_PI, self.window_center + HALF_PI

    @property
    def angles(self) -> list[float]:
        return [a for a, _ in self.linear_roots]

    def to_dict(self) -> dict:
        return {
            "y_mult": self.y_mult,
            "roots": [{"angle": a, "mult": m} for a, m in self.linear_roots],
            "tau_definite": self.tau_positive,
            "tau_degree": self.tau_degree,
            "window_center": self.window_center,
            "scale": self.scale,
        }


def into_window(angle: float, center: float) -> float:
    """Translate by a multiple of pi into ``[center - pi/2, center + pi/2)``."""
    lo = center - HALF_PI
    n = math.floor((angle - lo) / math.pi)
    out = angle - n * math.pi
    if out >= center + HALF_PI:
        out -= math.pi
    elif out < lo:
        out += math.pi
    return out


def factor_decomposition(g: HomoPoly, center: float = 0.0, tol: float = 1e-15) -> FactorDecomp:
    if g.is_zero:
        raise PolynomialError("factor decomposition of the zero polynomial")
    if g.degree < 1:
        raise PolynomialError("factor decomposition needs degree >= 1")
    m, u = dehomogenize(g)
    roots: list[tuple[float, int]] = []
    if m:
        roots.append((into_window(0.0, center), m))
    for t, mult in real_roots(u, tol).roots:
        roots.append((into_window(math.atan2(1.0, t), center), mult))
    roots.sort()
    tau_deg = g.degree - sum(k for _, k in roots)
    decomp = FactorDecomp(m, roots, center, tau_deg, True, float(u.lc), g.degree)
    return FactorDecomp(m, roots, center, tau_deg, _tau_definite(g, decomp), float(u.lc), g.degree)


def _tau_definite(g: HomoPoly, decomp: FactorDecomp, samples: int = 720) -> bool:
    """Sampled check that ``u(phi) / prod sin(phi - phi_i)^m_i`` keeps one sign."""
    if decomp.tau_degree % 2:
        return False
    prof = AngularProfile(g, order=max([m for _, m in decomp.linear_roots], default=0) + 6)
    signs = set()
    lo, _ = decomp.window
    for j in range(samples):
        phi = lo + (j + 0.5) * math.pi / samples
        val = gamma_of(g, decomp, phi, prof) * math.prod(
            ((phi - a) / math.sin(phi - a)) ** m if abs(phi - a) > 1e-12 else 1.0
            for a, m in decomp.linear_roots)
        if val == 0 or not math.isfinite(val):
            return False
        signs.add(val > 0)
    return len(signs) == 1


def gamma_of(g: HomoPoly, decomp: FactorDecomp, phi: float,
             profile: AngularProfile | None = None) -> float:
    """Smooth nonvanishing ``gamma`` with ``g(cos, sin) = gamma * prod(phi - phi_i)``."""
    lo, hi = decomp.window
    if not lo < phi < hi:
        raise StarError(f"phi = {phi} outside the open window ({lo}, {hi})")
    prof = profile or AngularProfile(g, order=max([m for _, m in decomp.linear_roots], default=0) + 6)
    roots = decomp.linear_roots
    if not roots:
        return prof(phi)
    nearest = min(range(len(roots)), key=lambda i: abs(phi - roots[i][0]))
    root, mult = roots[nearest]
    value = prof.quotient(phi, root, mult)
    for i, (a, m) in enumerate(roots):
        if i != nearest:
            value /= (phi - a) ** m
    return value


def a_exponent(g: HomoPoly, phi: float, match_tol: float = 1e-9) -> int:
    """Multiplicity of ``phi`` (mod pi) as an angular root of ``g``; 0 if none."""
    decomp = factor_decomposition(g, center=phi)
    return sum(m for a, m in decomp.linear_roots if abs(a - phi) <= match_tol)
