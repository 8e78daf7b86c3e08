"""Finite-difference jets: strip sups of partial derivatives, a flatness
verdict, and C^r norms on rectangles.

All partials use product central stencils, evaluated at steps ``h`` and
``2h`` and combined by one level of Richardson extrapolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

REL_STEP = 1e-3
# an order is judged flat when, going inward, its sups fall at least like
# rho^KAPPA_MIN on the last strip and the decay rate is still increasing
KAPPA_MIN = 4.0
KAPPA_GAIN = 2.0
_EPS = np.finfo(float).eps


@lru_cache(maxsize=None)
def central_weights(order: int) -> tuple[tuple[int, Fraction], ...]:
    """Weights of the narrowest central stencil for the ``order``-th derivative."""
    if order == 0:
        return ((0, Fraction(1)),)
    half = (order + 1) // 2
    offsets = list(range(-half, half + 1))
    n = len(offsets)
    # solve sum_j w_j o_j^i = order! * [i == order] for i < n, exactly
    rows = [[Fraction(o) ** i for o in offsets] + [Fraction(math.factorial(order) if i == order else 0)]
            for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        for r in range(n):
            if r != c and rows[r][c] != 0:
                f = rows[r][c] / rows[c][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    w = [rows[i][n] / rows[i][i] for i in range(n)]
    return tuple((o, wi) for o, wi in zip(offsets, w) if wi != 0)


class _Stencil:
    """Cached evaluations of ``f`` at ``(u + a h, v + b h)`` for integer ``a, b``."""

    def __init__(self, f: Callable, u: float, v: float, h: float):
        self.f, self.u, self.v, self.h = f, u, v, h
        self.cache: dict[tuple[int, int], float] = {}

    def at(self, a: int, b: int) -> float:
        key = (a, b)
        if key not in self.cache:
            self.cache[key] = float(self.f(self.u + a * self.h, self.v + b * self.h))
        return self.cache[key]

    def partial(self, i: int, j: int, scale: int = 1) -> float:
        total = 0.0
        for a, wa in central_weights(i):
            for b, wb in central_weights(j):
                total += float(wa * wb) * self.at(a * scale, b * scale)
        return total / (scale * self.h) ** (i + j)

    def richardson(self, i: int, j: int) -> float:
        if i + j == 0:
            return self.at(0, 0)
        return (4.0 * self.partial(i, j) - self.partial(i, j, 2)) / 3.0

    @property
    def magnitude(self) -> float:
        return max((abs(v) for v in self.cache.values() if math.isfinite(v)), default=0.0)


def partials(f: Callable, u: float, v: float, order: int, h: float) -> dict[tuple[int, int], float]:
    """All partials ``d^i/du^i d^j/dv^j f`` with ``i + j == order``."""
    st = _Stencil(f, u, v, h)
    return {(i, order - i): st.richardson(i, order - i) for i in range(order + 1)}


@dataclass(frozen=True)
class JetReport:
    """Sup over each strip of all order-r partials.

    ``sups[r][j]`` belongs to ``strips[j]`` (decreasing radii); ``floors[r]``
    is the round-off level below which an order-r sup counts as zero.
    """

    orders: list[int]
    strips: list[float]
    sups: list[list[float]]
    floors: list[float]
    decay_rates: list[list[float]]
    verdicts: list[bool]
    domain: str

    @property
    def flat(self) -> bool:
        return all(self.verdicts)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain,
            "orders": self.orders,
            "strips": self.strips,
            "sups": self.sups,
            "floors": self.floors,
            "decay_rates": self.decay_rates,
            "verdicts": self.verdicts,
            "flat": self.flat,
        }


def _order_verdict(sups: list[float], strips: list[float], floor: float) -> tuple[bool, list[float]]:
    if all(s <= floor for s in sups):
        return True, []
    s = [max(v, floor, 1e-300) for v in sups]
    rates = [math.log(s[j] / s[j + 1]) / math.log(strips[j] / strips[j + 1])
             for j in range(len(s) - 1)]
    if not rates:
        return False, rates
    if sups[-1] <= floor:
        # vanished to round-off on the innermost strip without growing inward
        return all(b <= a for a, b in zip(s, s[1:])), rates
    ok = s[-1] < s[-2] and rates[-1] >= KAPPA_MIN
    if len(rates) > 1:
        ok = ok and rates[-1] >= rates[-2] + KAPPA_GAIN
    return ok, rates


def flatness_report(f: Callable[[float, float], float], max_order: int,
                    strips: list[float], domain: str = "halfplane",
                    n_angles: int = 16, rel_step: float = REL_STEP) -> JetReport:
    """Decide numerically whether ``f`` is flat at ``O`` (``domain='plane'``)
    or on the boundary ``rho = 0`` (``domain='halfplane'``).

    Strip ``rho <= rho_j`` is probed on its outer edge: the circle of radius
    ``rho_j`` in the plane, or the segment ``{(phi, rho_j)}`` over one
    period in the half-plane.  A flat function has partial derivatives that
    decay faster than any power of ``rho``; a power ``rho^m`` shows a
    constant log-log rate.
    """
    if domain not in ("plane", "halfplane"):
        raise ValueError("domain must be 'plane' or 'halfplane'")
    strips = sorted((float(s) for s in strips), reverse=True)
    if len(strips) < 2 or strips[-1] <= 0:
        raise ValueError("need at least two positive strip radii")
    h = rel_step * strips[0]
    angles = np.linspace(0.0, 2 * math.pi, n_angles, endpoint=False)
    orders = list(range(max_order + 1))
    sups = [[0.0] * len(strips) for _ in orders]
    mag = 0.0
    for j, rho in enumerate(strips):
        for th in angles:
            if domain == "plane":
                u, v = rho * math.cos(th), rho * math.sin(th)
            else:
                u, v = float(th), rho
            st = _Stencil(f, u, v, h)
            for r in orders:
                for i in range(r + 1):
                    val = abs(st.richardson(i, r - i))
                    if not math.isfinite(val):
                        val = math.inf
                    sups[r][j] = max(sups[r][j], val)
            mag = max(mag, st.magnitude)
    floors = [256 * _EPS * mag / h ** r for r in orders]
    verdicts, rates = [], []
    for r in orders:
        ok, kap = _order_verdict(sups[r], strips, floors[r])
        verdicts.append(bool(ok))
        rates.append(kap)
    return JetReport(orders, strips, sups, floors, rates, verdicts, domain)


def cr_norm(f: Callable, K: tuple[float, float, float, float], r: int, grid_n: int = 21,
            rel_step: float = REL_STEP) -> float:
    """``sum_components sum_{|i| <= r} sup_K |D^i f|`` on a ``grid_n x grid_n`` grid
    of ``K = (x0, x1, y0, y1)``; ``f`` may return a scalar or a sequence."""
    x0, x1, y0, y1 = K
    h = rel_step * max(x1 - x0, y1 - y0, 1e-12)
    probe = f(x0, y0)
    n_comp = len(probe) if isinstance(probe, (tuple, list, np.ndarray)) else 0
    comps = range(n_comp) if n_comp else [None]
    total = 0.0
    for c in comps:
        fc = f if c is None else (lambda x, y, c=c: f(x, y)[c])
        sups: dict[tuple[int, int], float] = {}
        for x in np.linspace(x0, x1, grid_n):
            for y in np.linspace(y0, y1, grid_n):
                st = _Stencil(fc, float(x), float(y), h)
                for order in range(r + 1):
                    for i in range(order + 1):
                        key = (i, order - i)
                        sups[key] = max(sups.get(key, 0.0), abs(st.richardson(*key)))
        total += sum(sups.values())
    return total


__all__ = ["JetReport", "central_weights", "cr_norm", "flatness_report", "partials"]
