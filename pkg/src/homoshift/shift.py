"""Flow times along orbits and recovery of shift functions ``alpha`` with
``h(z) = flow(z, alpha(z))``."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .expr import SmoothFn
from .field import PlaneField, flow
from .jets import JetReport, flatness_report
from .ode import FlowError, StepUnderflow, TimeLimitExceeded, integrate, march
from .poly import HomoPoly
from .star import AngularProfile, StarError, a_exponent, factor_decomposition, into_window

LEVEL_TOL = 1e-9
ODE_TOL = 1e-12
HOLE_FRACTION = 0.05

Point = tuple[float, float]


class LevelMismatch(ValueError):
    pass


class NotOnOrbit(FlowError):
    pass


# ------------------------------------------------------------ flow time


@dataclass(frozen=True)
class OrbitSegment:
    source: Point
    target: Point
    t_lo: float
    t_hi: float
    tau: float
    residual: float


def _rhs(field_):
    return field_.rhs


def _dist(z, b) -> float:
    return math.hypot(z[0] - b[0], z[1] - b[1])


def _approach_rate(z, f, b) -> float:
    """``d/dt |z - b|^2 / 2``."""
    return (z[0] - b[0]) * f[0] + (z[1] - b[1]) * f[1]


def _newton_time(rhs, z, t, b, tol, t_max, radius, escape, iters=12):
    """Polish ``t`` so that ``z(t)`` hits ``b``, moving along the orbit by
    the flow-box correction ``dt = (b - z) . G / |G|^2``."""
    for _ in range(iters):
        gx, gy = rhs(*z)
        n2 = gx * gx + gy * gy
        if n2 == 0:
            break
        dt = ((b[0] - z[0]) * gx + (b[1] - z[1]) * gy) / n2
        if dt == 0:
            break
        z = integrate(rhs, z, dt, tol, t_max, radius, escape)
        t += dt
        if abs(dt) <= 1e-15 * max(1.0, abs(t)):
            break
    return z, t


def _locate_minimum(step, rhs, b, direction):
    """Time inside ``step`` where the distance to ``b`` stops decreasing."""
    lo, hi = step.t0, step.t1
    d_lo = direction * _approach_rate(step.z0, step.f0, b)
    d_hi = direction * _approach_rate(step.z1, step.f1, b)
    for it in range(60):
        # regula falsi with bisection safeguard
        if d_hi != d_lo:
            mid = lo + (hi - lo) * (-d_lo) / (d_hi - d_lo)
        else:
            mid = 0.5 * (lo + hi)
        if not (min(lo, hi) < mid < max(lo, hi)) or it % 3 == 2:
            mid = 0.5 * (lo + hi)
        zm = step.dense(mid)
        dm = direction * _approach_rate(zm, rhs(*zm), b)
        if dm < 0:
            lo, d_lo = mid, dm
        else:
            hi, d_hi = mid, dm
        if abs(hi - lo) <= 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def orbit_segment(field_, a: Point, b: Point, tol: float = 1e-10, t_max: float | None = None,
                  ode_tol: float = ODE_TOL, level_tol: float = LEVEL_TOL) -> OrbitSegment:
    """Locate ``b`` on the orbit of ``a``.

    Both time directions are marched in lockstep (always advancing the one
    that is behind in ``|t|``).  Each place where the distance to ``b`` has
    a local minimum is refined by Newton steps along the orbit and accepted
    when the residual is within ``tol``; the accepted time of smallest
    ``|t|`` wins, so on closed orbits the representative nearest 0 is
    returned.
    """
    a = (float(a[0]), float(a[1]))
    b = (float(b[0]), float(b[1]))
    if a == b:
        return OrbitSegment(a, b, 0.0, 0.0, 0.0, 0.0)
    rhs = _rhs(field_)
    fa = rhs(*a)
    if fa == (0.0, 0.0) or rhs(*b) == (0.0, 0.0):
        raise NotOnOrbit(f"{a if fa == (0.0, 0.0) else b} is a fixed point of the field")
    ga, gb = field_.level(*a), field_.level(*b)
    if abs(ga - gb) > level_tol * (1.0 + abs(ga)):
        raise LevelMismatch(f"points lie on different levels: g(a) = {ga!r}, g(b) = {gb!r}")
    t_max = field_.t_max if t_max is None else t_max

    marches = {d: march(rhs, a, d, ode_tol, None, t_max, field_.radius, field_.escape)
               for d in (1.0, -1.0)}
    reach = {1.0: 0.0, -1.0: 0.0}
    stopped: dict[float, str] = {}
    best: OrbitSegment | None = None
    closest = math.inf
    while len(stopped) < 2:
        d = min((k for k in marches if k not in stopped), key=lambda k: reach[k])
        if best is not None and reach[d] > abs(best.tau):
            break
        try:
            step = next(marches[d])
        except StopIteration:
            stopped[d] = "end"
            continue
        except (FlowError, OverflowError, ValueError) as exc:
            stopped[d] = type(exc).__name__
            continue
        reach[d] = abs(step.t1)
        closest = min(closest, _dist(step.z1, b))
        r0 = d * _approach_rate(step.z0, step.f0, b)
        r1 = d * _approach_rate(step.z1, step.f1, b)
        if not (r0 < 0 <= r1):
            continue
        t_c = _locate_minimum(step, rhs, b, d)
        try:
            z_c = integrate(rhs, step.z0, t_c - step.t0, ode_tol, t_max, field_.radius, field_.escape)
            z_c, t_c = _newton_time(rhs, z_c, t_c, b, ode_tol, t_max, field_.radius, field_.escape)
        except FlowError:
            continue
        res = _dist(z_c, b)
        if res <= tol and (best is None or abs(t_c) < abs(best.tau)):
            lo, hi = sorted((step.t0, step.t1))
            best = OrbitSegment(a, b, min(lo, t_c), max(hi, t_c), t_c, res)
    if best is None:
        why = ", ".join(f"{'forward' if k > 0 else 'backward'}: {v}" for k, v in sorted(stopped.items()))
        raise NotOnOrbit(f"no approach to {b} within tolerance from {a} "
                         f"(closest {closest:.3g}; {why})")
    return best


def flow_time(field_, a: Point, b: Point, tol: float = 1e-10, t_max: float | None = None,
              ode_tol: float = ODE_TOL, level_tol: float = LEVEL_TOL) -> float:
    """Time ``tau`` with ``flow(a, tau) = b`` (smallest ``|tau|`` if several)."""
    return orbit_segment(field_, a, b, tol, t_max, ode_tol, level_tol).tau


def orbit_period(field_, z: Point, tol: float = 1e-10, t_max: float | None = None) -> float | None:
    """Period of the orbit through ``z`` or ``None`` if it does not close up within ``t_max``."""
    rhs = _rhs(field_)
    z = (float(z[0]), float(z[1]))
    t_max = field_.t_max if t_max is None else t_max
    left = False
    try:
        for step in march(rhs, z, 1.0, ODE_TOL, None, t_max, field_.radius, field_.escape):
            if not left:
                left = _approach_rate(step.z1, step.f1, z) > 0
                continue
            if _approach_rate(step.z0, step.f0, z) < 0 <= _approach_rate(step.z1, step.f1, z):
                t_c = _locate_minimum(step, rhs, z, 1.0)
                z_c = integrate(rhs, step.z0, t_c - step.t0, ODE_TOL)
                z_c, t_c = _newton_time(rhs, z_c, t_c, z, ODE_TOL, t_max, None, math.inf)
                if _dist(z_c, z) <= tol:
                    return t_c
    except FlowError:
        return None
    return None


# ------------------------------------------------- closed-form times


def _gamma2_at_root(g: HomoPoly, phi_i: float) -> float:
    # F2 = -rho^p u'(phi), so on a simple root gamma2(phi_i) = -u'(phi_i)
    return -AngularProfile(g, order=2)(phi_i, 1)


def separatrix_time(g: HomoPoly, phi_i: float, rho_from: float, rho_to: float) -> float:
    """Time to move along the invariant ray ``phi = phi_i`` from radius
    ``rho_from`` to ``rho_to`` under the Hamiltonian field of ``g``."""
    if rho_from <= 0 or rho_to <= 0:
        raise ValueError("radii on an invariant ray must be positive")
    if a_exponent(g, phi_i) != 1:
        raise StarError(f"phi = {phi_i} is not a simple angular root of g")
    if rho_from == rho_to:
        return 0.0
    p = g.degree - 1
    gam = _gamma2_at_root(g, phi_i)
    if p == 1:
        return math.log(rho_to / rho_from) / gam
    return (rho_to ** (1 - p) - rho_from ** (1 - p)) / ((1 - p) * gam)


def sector_time(g: HomoPoly, a, phi_target: float, quad_tol: float = 1e-11) -> float:
    """Time for the lifted Hamiltonian flow to carry ``a = (phi, rho)`` to
    angle ``phi_target`` inside one sector between angular roots.

    Along the orbit ``rho`` follows the level set ``g(P(phi, rho)) = c``,
    so ``dt = d theta / ((p+1) rho(theta)^(p-1) u(theta))``.
    """
    phi, rho = float(a[0]), float(a[1])
    if phi_target == phi:
        return 0.0
    if rho <= 0:
        raise ValueError("sector_time needs rho > 0")
    prof = AngularProfile(g, order=1)
    n = g.degree
    lo, hi = sorted((phi, phi_target))
    decomp = factor_decomposition(g, center=0.5 * (lo + hi))
    for root, _ in decomp.linear_roots:
        # roots repeat with period pi
        k = math.ceil((lo - root) / math.pi)
        if root + k * math.pi <= hi:
            raise StarError(f"arc [{lo}, {hi}] crosses the angular root {root + k * math.pi}")
    c = rho ** n * prof(phi)

    def integrand(theta: float) -> float:
        u = prof(theta)
        r = (c / u) ** (1.0 / n)
        return 1.0 / (n * r ** (n - 2) * u)

    value, err = quad(integrand, phi, phi_target, epsabs=quad_tol, epsrel=quad_tol, limit=200)
    if not math.isfinite(value) or err > 1e3 * quad_tol * max(1.0, abs(value)):
        raise ArithmeticError(f"quadrature did not converge (estimate {value}, error {err})")
    return value


def hadamard_quotient(f: Callable[[float], float], x: float, y: float, quad_n: int = 20,
                      fprime: Callable[[float], float] | None = None) -> float:
    """``int_0^1 f'(x + s y) ds``, so that ``f(x + y) - f(x) = y * result``.

    ``f`` is a one-variable :class:`SmoothFn` (differentiated symbolically)
    unless ``fprime`` is given.
    """
    if fprime is None:
        if not isinstance(f, SmoothFn) or len(f.variables) != 1:
            raise TypeError("pass fprime or a one-variable SmoothFn")
        fprime = f.derivative(f.variables[0])
    nodes, weights = np.polynomial.legendre.leggauss(quad_n)
    s = 0.5 * (nodes + 1.0)
    return float(sum(0.5 * w * fprime(x + si * y) for si, w in zip(s, weights)))


@dataclass(frozen=True)
class FlatQuotient:
    """``fhat / rho^t`` (0 on the boundary) with numeric flatness witnesses."""

    fhat: Callable
    t: int
    flat: bool
    input_flat: bool
    report: JetReport

    def __call__(self, phi: float, rho: float) -> float:
        if rho == 0:
            return 0.0
        return self.fhat(phi, rho) / rho ** self.t


def flat_divide(fhat: Callable, t: int, strips=(0.3, 0.2, 0.15, 0.1),
                max_order: int = 3) -> FlatQuotient:
    """Divide a function flat on ``rho = 0`` by ``rho^t``.

    The verdict is that of the quotient; a non-flat input yields a quotient
    whose verdict is false rather than an exception.
    """
    input_report = flatness_report(fhat, max_order, list(strips), "halfplane")
    probe = FlatQuotient(fhat, t, False, input_report.flat, input_report)
    report = flatness_report(probe, max_order, list(strips), "halfplane")
    return FlatQuotient(fhat, t, report.flat and input_report.flat, input_report.flat, report)


# ------------------------------------------------------------ shift maps


@dataclass(frozen=True)
class ShiftMap:
    """``z -> flow(z, alpha(z))``; fixes the origin."""

    field: PlaneField
    alpha: Callable[[float, float], float]
    tol: float = ODE_TOL

    def __call__(self, x: float, y: float) -> Point:
        if x == 0 and y == 0:
            return (0.0, 0.0)
        return flow(self.field, (x, y), self.alpha(x, y), self.tol)


def make_shift_map(field_: PlaneField, alpha: Callable, tol: float = ODE_TOL) -> ShiftMap:
    return ShiftMap(field_, alpha, tol)


@dataclass(frozen=True)
class AnnulusGrid:
    """``n_radial x n_angular`` points on ``inner <= |z| <= outer``.

    With only ``n`` given the grid is about twice as wide in angle as in
    radius: 200 points are 10 radii times 20 angles starting at angle 0.
    """

    inner: float = 0.3
    outer: float = 1.0
    n: int = 200

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise ValueError("annulus needs 0 < inner < outer")
        if self.n < 1:
            raise ValueError("grid needs at least one point")

    @property
    def shape(self) -> tuple[int, int]:
        n_rad = max(1, round(math.sqrt(self.n / 2)))
        return n_rad, max(1, self.n // n_rad)

    def points(self) -> list[Point]:
        n_rad, n_ang = self.shape
        radii = np.linspace(self.inner, self.outer, n_rad) if n_rad > 1 else [self.outer]
        out = []
        for r in radii:
            for j in range(n_ang):
                th = 2 * math.pi * j / n_ang
                out.append((float(r * math.cos(th)), float(r * math.sin(th))))
        return out


@dataclass
class ShiftSample:
    """Recovered shift function on a grid.

    ``grid`` rows are ``(z, alpha, residual)``; every grid point is either
    there or in ``failures`` with the reason.
    """

    grid: list[tuple[Point, float, float]]
    failures: list[tuple[Point, str]]
    tol: float
    flatness: JetReport | None = None
    separatrix_deviation: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((r for _, _, r in self.grid), default=0.0)

    @property
    def ok(self) -> bool:
        return not self.failures and self.max_residual <= self.tol

    def alpha_error(self, alpha_ref: Callable) -> float:
        return max((abs(a - alpha_ref(*z)) for z, a, _ in self.grid), default=0.0)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "points": [{"x": z[0], "y": z[1], "alpha": a, "residual": r} for z, a, r in self.grid],
            "failures": [{"x": z[0], "y": z[1], "reason": why} for z, why in self.failures],
            "separatrix_deviation": self.separatrix_deviation,
            "flatness": None if self.flatness is None else self.flatness.to_dict(),
            **({"meta": self.meta} if self.meta else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "alpha", "residual"])
        for z, a, r in self.grid:
            w.writerow([repr(z[0]), repr(z[1]), repr(a), repr(r)])
        return buf.getvalue()


@dataclass(frozen=True)
class RecoveredAlpha:
    """``alpha`` evaluated on demand by a flow-time search; 0 at the origin."""

    field: PlaneField
    h: Callable
    tol: float = 1e-10

    def __call__(self, x: float, y: float) -> float:
        if x == 0 and y == 0:
            return 0.0
        return flow_time(self.field, (x, y), self.h(x, y), self.tol)


def _simple_ray(g: HomoPoly, z: Point, roots) -> float | None:
    phi = math.atan2(z[1], z[0])
    for root, mult in roots:
        if mult == 1 and abs(into_window(phi, root) - root) < 1e-12:
            return phi
    return None


def recover_shift(field_: PlaneField, h: Callable, grid: AnnulusGrid = AnnulusGrid(),
                  tol: float = 1e-7, search_tol: float = 1e-10,
                  strips: list[float] | None = None, flat_angles: int = 8) -> ShiftSample:
    """Sample ``alpha`` with ``h(z) = flow(z, alpha(z))`` on ``grid``.

    Points where ``h`` cannot be evaluated or no flow time is found are
    listed in ``failures``.  On simple separatrix rays of a Hamiltonian
    field the closed-form ray time is compared with the search result.
    ``strips`` (radii, optional because it is costly) attaches a flatness
    report for ``alpha`` at the origin.
    """
    rows: list[tuple[Point, float, float]] = []
    failures: list[tuple[Point, str]] = []
    roots = factor_decomposition(field_.g).linear_roots if field_.eta_is_one else []
    sep_dev = None
    for z in grid.points():
        try:
            hz = h(*z)
        except (FlowError, ArithmeticError, ValueError) as exc:
            failures.append((z, f"map undefined: {type(exc).__name__}: {exc}"))
            continue
        try:
            alpha = flow_time(field_, z, hz, search_tol)
            landed = flow(field_, z, alpha)
        except (FlowError, LevelMismatch) as exc:
            failures.append((z, f"{type(exc).__name__}: {exc}"))
            continue
        rows.append((z, alpha, _dist(landed, hz)))
        phi = _simple_ray(field_.g, z, roots)
        if phi is not None:
            ray = separatrix_time(field_.g, phi, math.hypot(*z), math.hypot(*hz))
            dev = abs(ray - alpha)
            sep_dev = dev if sep_dev is None else max(sep_dev, dev)
    report = None
    if strips:
        report = flatness_report(RecoveredAlpha(field_, h, search_tol), 3, strips, "plane",
                                 n_angles=flat_angles)
    return ShiftSample(rows, failures, tol, report, sep_dev)


def regular_point_shift(field_: PlaneField, h: Callable, z: Point, tol: float = 1e-10) -> float:
    """Shift at a regular point by Newton iteration in flow-box coordinates,
    starting from time 0; valid when ``h(z)`` is near ``z`` on its orbit."""
    z = (float(z[0]), float(z[1]))
    rhs = field_.rhs
    if rhs(*z) == (0.0, 0.0):
        raise ValueError(f"{z} is a singular point of the field")
    b = h(*z)
    if _dist(z, b) == 0:
        return 0.0
    zt, t = _newton_time(rhs, z, 0.0, b, ODE_TOL, field_.t_max, field_.radius, field_.escape, iters=50)
    if _dist(zt, b) > tol:
        raise NotOnOrbit(f"flow-box iteration did not reach {b} (residual {_dist(zt, b):.3g})")
    return t


__all__ = [
    "AnnulusGrid",
    "FlatQuotient",
    "LevelMismatch",
    "NotOnOrbit",
    "OrbitSegment",
    "RecoveredAlpha",
    "ShiftMap",
    "ShiftSample",
    "StepUnderflow",
    "TimeLimitExceeded",
    "flat_divide",
    "flow_time",
    "hadamard_quotient",
    "make_shift_map",
    "orbit_period",
    "orbit_segment",
    "recover_shift",
    "regular_point_shift",
    "sector_time",
    "separatrix_time",
]
