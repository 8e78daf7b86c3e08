"""The field ``G = eta * (-g_y, g_x)`` and its local flow."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .expr import SmoothFn, constant_fn
from .ode import T_MAX, FlowError, integrate, march
from .poly import HomoPoly, PolynomialError, eval_float, partial_x, partial_y, to_string

DEFAULT_TOL = 1e-12


class MultiplierError(ValueError):
    pass


@dataclass(frozen=True)
class PlaneField:
    """Evaluator for ``G = eta * H`` with ``H = (-g_y, g_x)``.

    ``escape`` bounds the working region: trajectories leaving the disk of
    that radius raise :class:`~homoshift.ode.FlowEscape`.
    """

    g: HomoPoly
    eta: SmoothFn
    t_max: float = T_MAX
    escape: float = 1e3
    _gx: tuple = field(default=(), repr=False, compare=False)
    _gy: tuple = field(default=(), repr=False, compare=False)
    _g: tuple = field(default=(), repr=False, compare=False)
    _unit: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_gx", partial_x(self.g).float_coeffs())
        object.__setattr__(self, "_gy", partial_y(self.g).float_coeffs())
        object.__setattr__(self, "_g", self.g.float_coeffs())
        unit = self.eta.is_constant and self.eta(0.0, 0.0) == 1.0
        object.__setattr__(self, "_unit", unit)

    @property
    def p_plus_1(self) -> int:
        return self.g.degree

    @property
    def p(self) -> int:
        return self.g.degree - 1

    @property
    def eta_is_one(self) -> bool:
        return self._unit

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        a = -eval_float(self._gy, x, y)
        b = eval_float(self._gx, x, y)
        if self._unit:
            return (a, b)
        e = self.eta(x, y)
        return (e * a, e * b)

    rhs = __call__

    def hamiltonian_at(self, x: float, y: float) -> tuple[float, float]:
        return (-eval_float(self._gy, x, y), eval_float(self._gx, x, y))

    def level(self, x: float, y: float) -> float:
        return eval_float(self._g, x, y)

    @staticmethod
    def radius(x: float, y: float) -> float:
        return math.hypot(x, y)

    def describe(self) -> dict:
        return {"g": to_string(self.g), "eta": str(self.eta), "p_plus_1": self.p_plus_1}


def hamiltonian(g: HomoPoly, t_max: float = T_MAX, escape: float = 1e3) -> PlaneField:
    if g.is_zero or g.degree < 1:
        raise PolynomialError("the Hamiltonian field needs a non-constant polynomial")
    return PlaneField(g, constant_fn(1.0), t_max, escape)


def with_multiplier(field_: PlaneField, eta: SmoothFn, domain_radius: float,
                    samples: int = 201) -> PlaneField:
    """Scale by ``eta`` after checking it has no zero or sign change on a
    ``samples x samples`` grid of the disk of ``domain_radius``."""
    xs = np.linspace(-domain_radius, domain_radius, samples)
    X, Y = np.meshgrid(xs, xs)
    inside = X ** 2 + Y ** 2 <= domain_radius ** 2
    vals = eta.evaluate_array(X[inside], Y[inside])
    if not np.all(np.isfinite(vals)):
        raise MultiplierError("multiplier is undefined somewhere on the disk")
    if np.any(vals == 0) or (vals.min() < 0 < vals.max()):
        raise MultiplierError("multiplier vanishes or changes sign on the disk")
    return PlaneField(field_.g, eta, field_.t_max, field_.escape)


def flow(field_: PlaneField, z, t: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``G(z, t)``: the point reached from ``z`` after time ``t``."""
    return integrate(field_.rhs, z, t, tol, field_.t_max, field_.radius, field_.escape)


@dataclass(frozen=True)
class Trajectory:
    points: list[tuple[float, float, float]]
    tol_used: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "y"])
        for t, x, y in self.points:
            w.writerow([repr(t), repr(x), repr(y)])
        return buf.getvalue()

    def to_jsonl(self) -> str:
        return "".join(json.dumps({"t": t, "x": x, "y": y}) + "\n" for t, x, y in self.points)


def orbit_trace(field_: PlaneField, z, t_span: tuple[float, float], n: int = 100,
                tol: float = DEFAULT_TOL) -> Trajectory:
    """Sample the orbit through ``z`` (the state at time ``t_span[0]``) at ``n``
    evenly spaced times.

    Samples are taken from the dense output of integrator steps, then the
    final point is the integrator's own endpoint.
    """
    t0, t1 = t_span
    z = (float(z[0]), float(z[1]))
    if t1 == t0 or n <= 1:
        return Trajectory([(t0, z[0], z[1])], tol)
    times = np.linspace(t0, t1, n)
    out = [(float(t0), z[0], z[1])]
    direction = 1.0 if t1 > t0 else -1.0
    k = 1
    last = None
    for step in march(field_.rhs, z, direction, tol, abs(t1 - t0), field_.t_max,
                      field_.radius, field_.escape):
        last = step
        while k < n - 1 and direction * (times[k] - t0) <= direction * step.t1:
            tk = float(times[k])
            zt = step.dense(tk - t0)
            out.append((tk, float(zt[0]), float(zt[1])))
            k += 1
    out.append((float(t1), last.z1[0], last.z1[1]))
    return Trajectory(out, tol)


def conservation_residual(field_: PlaneField, traj: Trajectory) -> float:
    """``max |g(z_i) - g(z_0)|`` along the trajectory."""
    if not traj.points:
        raise ValueError("empty trajectory")
    _, x0, y0 = traj.points[0]
    g0 = field_.level(x0, y0)
    return max(abs(field_.level(x, y) - g0) for _, x, y in traj.points)


__all__ = [
    "FlowError",
    "MultiplierError",
    "PlaneField",
    "Trajectory",
    "conservation_residual",
    "flow",
    "hamiltonian",
    "orbit_trace",
    "with_multiplier",
]
