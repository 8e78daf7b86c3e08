"""Polar blow-up ``P_k(phi, rho) = (rho^k cos phi, rho^k sin phi)`` and the
objects it transports: vector fields, scalar functions and maps."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .expr import VARS_POLAR, BinOp, Call, Num, SmoothFn, Var, substitute
from .field import PlaneField, hamiltonian
from .poly import HomoPoly, eval_float
from .star import SERIES_RADIUS, AngularProfile, a_exponent

TWO_PI = 2.0 * math.pi
BOUNDARY_RHO = 1e-8

Point = tuple[float, float]
PlaneMap = Callable[[float, float], Point]


class HalfPlanePoint(NamedTuple):
    phi: float
    rho: float


class LiftError(ValueError):
    pass


class EquivarianceError(LiftError):
    pass


def p_map(k: int, a) -> Point:
    phi, rho = a
    r = rho ** k
    return (r * math.cos(phi), r * math.sin(phi))


def p_inverse(k: int, z, phi_hint: float = 0.0) -> HalfPlanePoint:
    """Preimage of ``z != O`` whose angle is the branch nearest ``phi_hint``."""
    x, y = float(z[0]), float(z[1])
    if x == 0.0 and y == 0.0:
        raise LiftError("the origin has no preimage angle")
    rho = math.hypot(x, y) ** (1.0 / k)
    base = math.atan2(y, x)
    phi = base + TWO_PI * round((phi_hint - base) / TWO_PI)
    return HalfPlanePoint(phi, rho)


# ---------------------------------------------------------------- fields


@dataclass(frozen=True)
class HalfPlaneField:
    """Lift ``F`` of a planar field through ``P = P_1``; ``F = 0`` on the boundary."""

    source: PlaneField
    k: int = 1

    @property
    def t_max(self) -> float:
        return self.source.t_max

    @property
    def escape(self) -> float:
        return self.source.escape

    def __call__(self, phi: float, rho: float) -> tuple[float, float]:
        if rho < BOUNDARY_RHO:
            return (0.0, 0.0)
        c, s = math.cos(phi), math.sin(phi)
        g1, g2 = self.source(rho * c, rho * s)
        return ((-g1 * s + g2 * c) / rho, g1 * c + g2 * s)

    rhs = __call__

    def level(self, phi: float, rho: float) -> float:
        return self.source.level(rho * math.cos(phi), rho * math.sin(phi))

    @staticmethod
    def radius(phi: float, rho: float) -> float:
        return abs(rho)


def lift_field(field_: PlaneField) -> HalfPlaneField:
    if field_.g.degree < 2:
        raise LiftError("lifting needs G(O) = 0, i.e. deg g >= 2")
    return HalfPlaneField(field_, 1)


def f1_formula(g: HomoPoly, eta, a) -> float:
    """Closed form ``(p+1) g(P(a)) eta(P(a)) / rho^2`` of the angular component."""
    phi, rho = a
    if rho == 0:
        raise LiftError("closed form of F1 is undefined on the boundary")
    x, y = rho * math.cos(phi), rho * math.sin(phi)
    e = 1.0 if eta is None else eta(x, y)
    return g.degree * eval_float(g.float_coeffs(), x, y) * e / rho ** 2


@dataclass(frozen=True)
class GammaSamplers:
    """``gamma1(phi) = F1 / (rho^(p-1) (phi - root)^a)`` and
    ``gamma2(phi) = F2 / (rho^p (phi - root)^(a-1))`` (the latter only for a >= 1)."""

    root: float
    a: int
    p: int
    lift: HalfPlaneField
    profile: AngularProfile

    def gamma1(self, phi: float, rho: float = 1.0) -> float:
        d = phi - self.root
        if self.a and abs(d) < SERIES_RADIUS:
            return (self.p + 1) * self.profile.quotient(phi, self.root, self.a)
        return self.lift(phi, rho)[0] / (rho ** (self.p - 1) * d ** self.a)

    def gamma2(self, phi: float, rho: float = 1.0) -> float:
        if self.a < 1:
            raise LiftError("gamma2 is only defined at angular roots (a >= 1)")
        d = phi - self.root
        if self.a > 1 and abs(d) < SERIES_RADIUS:
            return -self.profile.quotient(phi, self.root, self.a - 1, shift=1)
        return self.lift(phi, rho)[1] / (rho ** self.p * d ** (self.a - 1))


def extract_gammas(g: HomoPoly, root: float, a: int | None = None,
                   check_tol: float = 1e-8) -> GammaSamplers:
    """Samplers for the smooth factors of the lifted Hamiltonian field at ``root``.

    Raises :class:`LiftError` when the quotients depend on ``rho``.
    """
    if a is None:
        a = a_exponent(g, root)
    lift = lift_field(hamiltonian(g))
    sampler = GammaSamplers(root, a, g.degree - 1, lift, AngularProfile(g, order=a + 8))
    for off in (-0.7, -0.3, 0.2, 0.5, 1.1):
        phi = root + off
        for fn in (sampler.gamma1, sampler.gamma2) if a else (sampler.gamma1,):
            lo, hi = fn(phi, 0.5), fn(phi, 1.5)
            if abs(lo - hi) > check_tol * max(1.0, abs(lo)):
                raise LiftError(f"gamma depends on rho at phi = {phi}: {lo} vs {hi}")
    return sampler


# ------------------------------------------------------------- functions


def pullback(k: int, f) -> Callable[[float, float], float]:
    """``f o P_k`` as a function of ``(phi, rho)``.

    A :class:`SmoothFn` in ``(x, y)`` is substituted symbolically and keeps
    its origin value as the boundary value; other callables are wrapped.
    """
    if isinstance(f, SmoothFn) and f.variables == ("x", "y"):
        rk = Var("rho") if k == 1 else BinOp("^", Var("rho"), Num(k))
        ast = substitute(f.ast, {
            "x": BinOp("*", rk, Call("cos", Var("phi"))),
            "y": BinOp("*", rk, Call("sin", Var("phi"))),
        })
        text = f"({f.text}) o P_{k}" if f.text else ""
        return SmoothFn(ast, VARS_POLAR, f.value_at_origin, text)
    return _Pullback(f, k)


@dataclass(frozen=True)
class _Pullback:
    f: Callable
    k: int

    def __call__(self, phi: float, rho: float) -> float:
        if rho == 0:
            return self.f(0.0, 0.0)
        return self.f(*p_map(self.k, (phi, rho)))


@dataclass(frozen=True)
class Pushforward:
    fhat: Callable
    k: int

    def __call__(self, x: float, y: float) -> float:
        if x == 0 and y == 0:
            return self.fhat(0.0, 0.0)
        return self.fhat(*p_inverse(self.k, (x, y), 0.0))


def pushforward(k: int, fhat, check_samples: int = 64, tol: float = 1e-10,
                seed: int = 0) -> Pushforward:
    """Function on the plane whose pullback is ``fhat``.

    ``fhat`` must be 2*pi-periodic in ``phi`` and constant on ``rho = 0``;
    both are checked on samples.
    """
    rng = np.random.default_rng(seed)
    for phi, rho in zip(rng.uniform(-np.pi, np.pi, check_samples),
                        rng.uniform(0.05, 1.5, check_samples)):
        v0, v1 = fhat(phi, rho), fhat(phi + TWO_PI, rho)
        if abs(v0 - v1) > tol * max(1.0, abs(v0)):
            raise LiftError(f"function is not 2*pi-periodic in phi (at {phi}, {rho})")
    edge = [fhat(phi, 0.0) for phi in np.linspace(0.0, TWO_PI, 9)]
    if max(edge) - min(edge) > tol * max(1.0, abs(edge[0])):
        raise LiftError("function is not constant on the boundary rho = 0")
    return Pushforward(fhat, k)


# ------------------------------------------------------------------ maps


def _wrap(a: float) -> float:
    """Representative of ``a`` modulo 2*pi in ``(-pi, pi]``."""
    r = math.remainder(a, TWO_PI)
    return math.pi if r == -math.pi else r


@dataclass(frozen=True)
class LiftedMap:
    """``h_hat`` with ``P_k o h_hat = h o P_k``.

    The angle is unwrapped continuously along ``phi`` from ``phi = 0``,
    where the branch nearest 0 is taken, and extended to all ``phi`` by
    ``h_hat_1(phi + 2 pi) = h_hat_1(phi) + 2 pi``.
    """

    h: PlaneMap
    k: int = 1
    unwrap_step: float = math.pi / 8

    def angle(self, phi: float, rho: float) -> float:
        n = math.floor(phi / TWO_PI)
        phi0 = phi - n * TWO_PI
        x, y = self.h(*p_map(self.k, (0.0, rho)))
        theta = math.atan2(y, x)
        prev = theta
        steps = max(1, math.ceil(phi0 / self.unwrap_step))
        for j in range(1, steps + 1):
            x, y = self.h(*p_map(self.k, (phi0 * j / steps, rho)))
            cur = math.atan2(y, x)
            theta += _wrap(cur - prev)
            prev = cur
        return theta + n * TWO_PI

    def __call__(self, phi: float, rho: float) -> HalfPlanePoint:
        if rho == 0:
            return HalfPlanePoint(phi, 0.0)
        x, y = self.h(*p_map(self.k, (phi, rho)))
        return HalfPlanePoint(self.angle(phi, rho), math.hypot(x, y) ** (1.0 / self.k))

    def winding(self, rho: float) -> float:
        """``h_hat_1(2 pi) - h_hat_1(0)`` by unwrapping a full turn."""
        x, y = self.h(*p_map(self.k, (0.0, rho)))
        prev = math.atan2(y, x)
        total = 0.0
        steps = math.ceil(TWO_PI / self.unwrap_step)
        for j in range(1, steps + 1):
            x, y = self.h(*p_map(self.k, (TWO_PI * j / steps, rho)))
            cur = math.atan2(y, x)
            total += _wrap(cur - prev)
            prev = cur
        return total


def lift_map(k: int, h: PlaneMap, domain: tuple[float, float] = (0.1, 1.0),
             n_check: int = 8, tol: float = 1e-10) -> LiftedMap:
    """Lift a map fixing only ``O`` through ``P_k``.

    ``domain`` is the annulus ``inner <= |z| <= outer`` on which ``h`` avoids
    ``O`` and winds once around it; both are verified on ``n_check`` circles.
    """
    lifted = LiftedMap(h, k)
    inner, outer = domain
    for r in np.linspace(inner, outer, n_check):
        rho = float(r) ** (1.0 / k)
        for phi in np.linspace(0.0, TWO_PI, 12, endpoint=False):
            hx, hy = h(*p_map(k, (phi, rho)))
            if hx == 0 and hy == 0:
                raise LiftError(f"map sends {p_map(k, (phi, rho))} to the origin")
        w = lifted.winding(rho)
        if abs(w - TWO_PI) > tol * TWO_PI:
            raise EquivarianceError(f"lift is not Z-equivariant on rho = {rho}: winding {w}")
    return lifted


@dataclass(frozen=True)
class DescendedMap:
    hhat: Callable[[float, float], tuple[float, float]]
    k: int = 1

    def __call__(self, x: float, y: float) -> Point:
        if x == 0 and y == 0:
            return (0.0, 0.0)
        return p_map(self.k, self.hhat(*p_inverse(self.k, (x, y), 0.0)))


def descend_map(k: int, hhat, domain: tuple[float, float] = (0.1, 1.0),
                n_check: int = 8, tol: float = 1e-10, seed: int = 0) -> DescendedMap:
    """The planar map ``h`` with ``h o P_k = P_k o hhat``.

    Checks on samples that the result does not depend on the chosen angle
    branch, which is what Z-equivariance of ``hhat`` guarantees.
    """
    rng = np.random.default_rng(seed)
    inner, outer = domain
    for _ in range(n_check):
        phi = float(rng.uniform(0.0, TWO_PI))
        rho = float(rng.uniform(inner, outer)) ** (1.0 / k)
        a = p_map(k, hhat(phi, rho))
        b = p_map(k, hhat(phi + TWO_PI, rho))
        if math.hypot(a[0] - b[0], a[1] - b[1]) > tol * max(1.0, math.hypot(*a)):
            raise EquivarianceError(f"descended map depends on the angle branch at {(phi, rho)}")
    return DescendedMap(hhat, k)


__all__ = [
    "DescendedMap",
    "EquivarianceError",
    "GammaSamplers",
    "HalfPlaneField",
    "HalfPlanePoint",
    "LiftError",
    "LiftedMap",
    "Pushforward",
    "descend_map",
    "extract_gammas",
    "f1_formula",
    "lift_field",
    "lift_map",
    "p_inverse",
    "p_map",
    "pullback",
    "pushforward",
]
