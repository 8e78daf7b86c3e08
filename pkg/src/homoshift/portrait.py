"""Phase portraits: level curves of ``g`` plus optional orbit polylines, as SVG."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from skimage import measure  # noqa: E402

from .field import PlaneField  # noqa: E402
from .ode import FlowError, march  # noqa: E402
from .poly import HomoPoly  # noqa: E402
from .star import factor_decomposition  # noqa: E402


@dataclass(frozen=True)
class PortraitSpec:
    levels: tuple[float, ...] = ()
    seeds: tuple[tuple[float, float], ...] = ()
    size: int = 480
    radius: float = 1.5
    grid_n: int = 256
    orbit_time: float = 10.0
    stroke: float = 1.2
    color: str = "#1f4e79"
    orbit_color: str = "#c0392b"

    def __post_init__(self):
        if not self.levels and not self.seeds:
            raise ValueError("portrait needs at least one level or one orbit seed")
        if self.size < 16 or self.grid_n < 8 or self.radius <= 0:
            raise ValueError("portrait size, grid and radius must be positive")


@dataclass
class Portrait:
    svg: str
    contours: dict[float, list[np.ndarray]] = field(default_factory=dict)
    orbits: list[np.ndarray] = field(default_factory=list)

    def closed_count(self, level: float) -> int:
        return sum(1 for c in self.contours.get(level, []) if np.array_equal(c[0], c[-1]))


def level_curves(g: HomoPoly, level: float, radius: float, grid_n: int) -> list[np.ndarray]:
    """Marching-squares polylines of ``g = level`` on ``[-radius, radius]^2``.

    Level 0 is returned as the separatrix lines through ``O`` (the zero set
    of a homogeneous polynomial is a union of lines), which contouring
    cannot resolve at the singular point.
    """
    if level == 0:
        lines = []
        for phi, _ in factor_decomposition(g).linear_roots:
            c, s = math.cos(phi), math.sin(phi)
            lines.append(np.array([[-radius * c, -radius * s], [radius * c, radius * s]]))
        return lines
    xs = np.linspace(-radius, radius, grid_n)
    X, Y = np.meshgrid(xs, xs)
    Z = np.zeros_like(X)
    d = g.degree
    for i, c in enumerate(g.float_coeffs()):
        if c:
            Z += c * X ** i * Y ** (d - i)
    step = xs[1] - xs[0]
    out = []
    for rc in measure.find_contours(Z, level):
        # find_contours returns (row, col) = (y index, x index)
        out.append(np.column_stack([xs[0] + rc[:, 1] * step, xs[0] + rc[:, 0] * step]))
    return out


def orbit_polyline(field_: PlaneField, seed, spec: PortraitSpec, tol: float = 1e-9) -> np.ndarray:
    """Orbit through ``seed`` traced both ways until it leaves the frame or
    the time budget runs out; closed orbits stop after one turn."""
    halves = []
    box = spec.radius * 1.05
    for direction in (-1.0, 1.0):
        pts = [tuple(seed)]
        try:
            for step in march(field_.rhs, seed, direction, tol, spec.orbit_time, spec.orbit_time + 1,
                              field_.radius, box * math.sqrt(2)):
                pts.append(step.z1)
                if max(abs(step.z1[0]), abs(step.z1[1])) > box:
                    break
        except FlowError:
            pass
        halves.append(pts)
    back, fwd = halves
    return np.array(back[::-1] + fwd[1:])


def render_portrait(g: HomoPoly, spec: PortraitSpec, field_: PlaneField | None = None,
                    title: str | None = None) -> Portrait:
    """Draw the portrait; identical inputs give byte-identical SVG."""
    contours = {float(lv): level_curves(g, float(lv), spec.radius, spec.grid_n) for lv in spec.levels}
    orbits = []
    if spec.seeds:
        if field_ is None:
            raise ValueError("orbit seeds need a field")
        orbits = [orbit_polyline(field_, s, spec) for s in spec.seeds]

    with plt.rc_context({"svg.hashsalt": "homoshift", "svg.fonttype": "none",
                         "font.family": "DejaVu Sans", "path.simplify": False}):
        inches = spec.size / 100.0
        fig, ax = plt.subplots(figsize=(inches, inches), dpi=100)
        try:
            for lv, lines in contours.items():
                for ln in lines:
                    style = "--" if lv == 0 else "-"
                    ax.plot(ln[:, 0], ln[:, 1], style, color=spec.color, lw=spec.stroke)
            for orb in orbits:
                ax.plot(orb[:, 0], orb[:, 1], "-", color=spec.orbit_color, lw=0.8 * spec.stroke)
            ax.plot([0.0], [0.0], "o", color="black", ms=3)
            ax.set_xlim(-spec.radius, spec.radius)
            ax.set_ylim(-spec.radius, spec.radius)
            ax.set_aspect("equal")
            ax.set_xticks([])
            ax.set_yticks([])
            if title:
                ax.set_title(title, fontsize=10)
            buf = io.StringIO()
            fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        finally:
            plt.close(fig)
    return Portrait(buf.getvalue(), contours, orbits)


__all__ = ["Portrait", "PortraitSpec", "level_curves", "orbit_polyline", "render_portrait"]
