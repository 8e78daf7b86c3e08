"""Adaptive Dormand-Prince 5(4) integrator for planar autonomous systems.

State is a pair of floats and the right-hand side a callable
``rhs(u, v) -> (du, dv)``.  Everything is scalar Python: the systems here
are two-dimensional and called thousands of times with short horizons,
where per-call overhead dominates.

Local error control is mixed absolute/relative with a single tolerance;
between accepted steps a cubic Hermite interpolant provides dense output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

Rhs = Callable[[float, float], tuple[float, float]]

T_MAX = 50.0
MIN_STEP = 1e-14
MAX_STEPS = 20_000

# Dormand & Prince (1980) tableau, FSAL
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                                22 / 525, -1 / 40)


class FlowError(RuntimeError):
    pass


class StepUnderflow(FlowError):
    pass


class TimeLimitExceeded(FlowError):
    pass


class StepLimitExceeded(FlowError):
    pass


class FlowEscape(FlowError):
    """Trajectory left the working region (finite-time blow-up or divergence)."""


@dataclass(frozen=True)
class Step:
    """One accepted step from ``t0`` to ``t1`` (``t1 < t0`` when marching backwards)."""

    t0: float
    z0: tuple[float, float]
    f0: tuple[float, float]
    t1: float
    z1: tuple[float, float]
    f1: tuple[float, float]

    def dense(self, t: float) -> tuple[float, float]:
        """Cubic Hermite interpolation inside the step."""
        h = self.t1 - self.t0
        if h == 0:
            return self.z0
        s = (t - self.t0) / h
        s2, s3 = s * s, s * s * s
        h00 = 2 * s3 - 3 * s2 + 1
        h10 = s3 - 2 * s2 + s
        h01 = -2 * s3 + 3 * s2
        h11 = s3 - s2
        return (h00 * self.z0[0] + h10 * h * self.f0[0] + h01 * self.z1[0] + h11 * h * self.f1[0],
                h00 * self.z0[1] + h10 * h * self.f0[1] + h01 * self.z1[1] + h11 * h * self.f1[1])


def _initial_step(rhs: Rhs, z, f, tol: float, direction: float) -> float:
    sx = tol + tol * abs(z[0])
    sy = tol + tol * abs(z[1])
    d0 = math.hypot(z[0] / sx, z[1] / sy)
    d1 = math.hypot(f[0] / sx, f[1] / sy)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    z1 = (z[0] + direction * h0 * f[0], z[1] + direction * h0 * f[1])
    f1 = rhs(*z1)
    d2 = math.hypot((f1[0] - f[0]) / sx, (f1[1] - f[1]) / sy) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def _dopri_step(rhs: Rhs, z, k1, h: float):
    x, y = z
    k2 = rhs(x + h * _A21 * k1[0], y + h * _A21 * k1[1])
    k3 = rhs(x + h * (_A31 * k1[0] + _A32 * k2[0]),
             y + h * (_A31 * k1[1] + _A32 * k2[1]))
    k4 = rhs(x + h * (_A41 * k1[0] + _A42 * k2[0] + _A43 * k3[0]),
             y + h * (_A41 * k1[1] + _A42 * k2[1] + _A43 * k3[1]))
    k5 = rhs(x + h * (_A51 * k1[0] + _A52 * k2[0] + _A53 * k3[0] + _A54 * k4[0]),
             y + h * (_A51 * k1[1] + _A52 * k2[1] + _A53 * k3[1] + _A54 * k4[1]))
    k6 = rhs(x + h * (_A61 * k1[0] + _A62 * k2[0] + _A63 * k3[0] + _A64 * k4[0] + _A65 * k5[0]),
             y + h * (_A61 * k1[1] + _A62 * k2[1] + _A63 * k3[1] + _A64 * k4[1] + _A65 * k5[1]))
    xn = x + h * (_B1 * k1[0] + _B3 * k3[0] + _B4 * k4[0] + _B5 * k5[0] + _B6 * k6[0])
    yn = y + h * (_B1 * k1[1] + _B3 * k3[1] + _B4 * k4[1] + _B5 * k5[1] + _B6 * k6[1])
    k7 = rhs(xn, yn)
    ex = h * (_E1 * k1[0] + _E3 * k3[0] + _E4 * k4[0] + _E5 * k5[0] + _E6 * k6[0] + _E7 * k7[0])
    ey = h * (_E1 * k1[1] + _E3 * k3[1] + _E4 * k4[1] + _E5 * k5[1] + _E6 * k6[1] + _E7 * k7[1])
    return (xn, yn), k7, ex, ey


def march(rhs: Rhs, z0: tuple[float, float], direction: float = 1.0, tol: float = 1e-12,
          t_end: float | None = None, t_max: float = T_MAX,
          radius: Callable[[float, float], float] | None = None,
          escape: float = math.inf, max_steps: int = MAX_STEPS) -> Iterator[Step]:
    """Yield accepted steps starting at time 0.

    Marches in ``direction`` (+1 or -1) until ``|t| == t_end`` when given;
    otherwise indefinitely, raising :class:`TimeLimitExceeded` past
    ``t_max``.  ``radius(z) > escape`` raises :class:`FlowEscape`; more
    than ``max_steps`` attempted steps raise :class:`StepLimitExceeded`.
    """
    if direction not in (1.0, -1.0, 1, -1):
        raise ValueError("direction must be +1 or -1")
    if t_end is not None and t_end > t_max:
        raise TimeLimitExceeded(f"requested time {t_end} exceeds t_max = {t_max}")
    z = (float(z0[0]), float(z0[1]))
    f = rhs(*z)
    s = 0.0
    h = _initial_step(rhs, z, f, tol, direction)
    horizon = t_max if t_end is None else t_end
    attempts = 0
    while s < horizon:
        attempts += 1
        if attempts > max_steps:
            raise StepLimitExceeded(f"more than {max_steps} steps before t = {direction * s}, z = {z}")
        last = False
        if s + h >= horizon:
            h = horizon - s
            last = True
        hs = direction * h
        zn, fn, ex, ey = _dopri_step(rhs, z, f, hs)
        err = max(abs(ex) / (tol + tol * max(abs(z[0]), abs(zn[0]))),
                  abs(ey) / (tol + tol * max(abs(z[1]), abs(zn[1]))))
        if not (math.isfinite(zn[0]) and math.isfinite(zn[1])):
            err = math.inf
        if err <= 1.0:
            s_new = horizon if last else s + h
            yield Step(direction * s, z, f, direction * s_new, zn, fn)
            s, z, f = s_new, zn, fn
            if radius is not None and radius(*z) > escape:
                raise FlowEscape(f"trajectory escaped the working region at t = {direction * s}")
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = max(0.2, 0.9 * err ** -0.2) if math.isfinite(err) else 0.2
        h *= factor
        floor = MIN_STEP * max(1.0, s)
        if h < floor and horizon - s > floor:
            raise StepUnderflow(f"step size underflow at t = {direction * s}, z = {z}")
    if t_end is None:
        raise TimeLimitExceeded(f"no event before t_max = {t_max}")


def integrate(rhs: Rhs, z0: tuple[float, float], t: float, tol: float = 1e-12,
              t_max: float = T_MAX, radius=None, escape: float = math.inf) -> tuple[float, float]:
    """Position at time ``t``; returns ``z0`` unchanged when ``t == 0``."""
    if t == 0:
        return (float(z0[0]), float(z0[1]))
    if abs(t) > t_max:
        raise TimeLimitExceeded(f"|t| = {abs(t)} exceeds t_max = {t_max}")
    z = z0
    for step in march(rhs, z0, 1.0 if t > 0 else -1.0, tol, abs(t), t_max, radius, escape):
        z = step.z1
    return z
