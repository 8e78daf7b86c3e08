"""Command-line front end: ``homoshift {check,lift,flow,recover,portrait}``.

Exit codes: 0 success; 1 usage, parse or numerical error; 2 property (*)
fails (``check``) or ``lift`` refused without ``--force``; 3 ``recover``
could not verify the map on every grid point.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .expr import VARS_T, DomainError, ParseError, parse_fn, parse_poly
from .field import DEFAULT_TOL, MultiplierError, PlaneField, hamiltonian, orbit_trace, with_multiplier
from .ode import FlowError
from .polar import extract_gammas, f1_formula, lift_field
from .poly import PolynomialError, to_string
from .portrait import PortraitSpec, render_portrait
from .report import dumps
from .shift import AnnulusGrid, ShiftSample, make_shift_map, recover_shift
from .star import StarError, a_exponent, factor_decomposition, is_star

EXIT_OK, EXIT_ERROR, EXIT_REFUSED, EXIT_UNVERIFIED = 0, 1, 2, 3

# built-in values for options that a config file may also set
DEFAULTS = {
    "poly": None,
    "eta": "1",
    "radius": 2.0,
    "tol": 1e-7,
    "level_tol": 1e-9,
    "grid_inner": 0.3,
    "grid_outer": 1.0,
    "grid_n": 200,
    "out": None,
    "z": "1,0",
    "t": "1",
    "n": 100,
    "map": None,
    "levels": "",
    "seeds": "",
    "size": 480,
    "strips": "",
}
_FLOATS = {"radius", "tol", "level_tol", "grid_inner", "grid_outer"}
_INTS = {"grid_n", "n", "size"}


class CliError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    poly: str
    eta: str = "1"
    radius: float = 2.0
    tol: float = 1e-7
    level_tol: float = 1e-9
    grid_inner: float = 0.3
    grid_outer: float = 1.0
    grid_n: int = 200
    out: str | None = None

    def __post_init__(self):
        if self.radius <= 0:
            raise CliError("--radius must be positive")
        if not 0 < self.grid_inner < self.grid_outer:
            raise CliError("grid radii must satisfy 0 < inner < outer")
        if self.tol <= 0 or self.level_tol <= 0:
            raise CliError("tolerances must be positive")
        if self.grid_n < 1:
            raise CliError("--grid-n must be positive")


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment, keys use flag names."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip('"').strip("'")
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over config file over built-in defaults."""
    file_values = read_config(args.config) if args.config else {}
    merged = {}
    for key, default in DEFAULTS.items():
        value = getattr(args, key, None)
        if value is None:
            value = file_values.get(key, default)
        if value is not None and key in _FLOATS:
            value = float(value)
        elif value is not None and key in _INTS:
            value = int(value)
        merged[key] = value
    return merged


def run_config(opts: dict) -> RunConfig:
    if not opts["poly"]:
        raise CliError("--poly is required")
    keys = RunConfig.__dataclass_fields__
    return RunConfig(**{k: opts[k] for k in keys})


def _poly(text: str):
    try:
        return parse_poly(text)
    except PolynomialError as exc:
        raise ParseError(str(exc)) from exc


def _number(text: str) -> float:
    return parse_fn(text, VARS_T)(1.0)


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(f"expected a point 'x,y', got {text!r}")
    return (_number(parts[0]), _number(parts[1]))


def _build_field(cfg: RunConfig, g) -> PlaneField:
    field_ = hamiltonian(g)
    eta = parse_fn(cfg.eta)
    if eta.is_constant and eta(0.0, 0.0) == 1.0:
        return field_
    return with_multiplier(field_, eta, cfg.radius)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------- commands


def cmd_check(opts: dict) -> int:
    cfg = run_config(opts)
    g = _poly(cfg.poly)
    star = is_star(g)
    decomp = factor_decomposition(g)
    _emit(dumps({
        "polynomial": to_string(g),
        "degree": g.degree,
        "star": star.to_dict(),
        "factors": decomp.to_dict(),
        "window": list(decomp.window),
    }), cfg.out)
    return EXIT_OK if star.holds else EXIT_REFUSED


def cmd_lift(opts: dict, force: bool) -> int:
    cfg = run_config(opts)
    g = _poly(cfg.poly)
    star = is_star(g)
    if not star.holds and not force:
        print(f"error: property (*) fails for {to_string(g)} ({star.detail}); use --force",
              file=sys.stderr)
        return EXIT_REFUSED
    field_ = _build_field(cfg, g)
    lift = lift_field(field_)
    eta = None if field_.eta_is_one else field_.eta

    samples = []
    for i in range(8):
        phi = 2 * math.pi * i / 8
        for rho in (0.5, 1.0, 1.5):
            f1, f2 = lift(phi, rho)
            samples.append({"phi": phi, "rho": rho, "F1": f1, "F2": f2})
    deviation = 0.0
    for i in range(40):
        phi = 2 * math.pi * i / 40
        for j in range(20):
            rho = 0.2 + 1.8 * j / 19
            deviation = max(deviation, abs(lift(phi, rho)[0] - f1_formula(g, eta, (phi, rho))))

    roots = []
    decomp = factor_decomposition(g, center=math.pi / 2)
    for phi, _ in decomp.linear_roots:
        a = a_exponent(g, phi)
        gam = extract_gammas(g, phi, a)
        roots.append({"angle": phi, "a": a, "gamma1": gam.gamma1(phi),
                      "gamma2": gam.gamma2(phi) if a >= 1 else None})
    if not decomp.linear_roots:
        gam = extract_gammas(g, 0.0, 0)
        roots.append({"angle": 0.0, "a": 0, "gamma1": gam.gamma1(0.0), "gamma2": None})
    _emit(dumps({
        "polynomial": to_string(g),
        "eta": cfg.eta,
        "star_holds": star.holds,
        "samples": samples,
        "f1_max_deviation": deviation,
        "roots": roots,
    }), cfg.out)
    return EXIT_OK


def cmd_flow(opts: dict, as_json: bool) -> int:
    cfg = run_config(opts)
    g = _poly(cfg.poly)
    field_ = _build_field(cfg, g)
    z = _pair(opts["z"])
    t = _number(opts["t"])
    if t == 0 or field_(*z) == (0.0, 0.0):
        traj = orbit_trace(field_, z, (0.0, 0.0))
    else:
        traj = orbit_trace(field_, z, (0.0, t), n=opts["n"], tol=min(cfg.tol, DEFAULT_TOL))
    _emit(traj.to_jsonl() if as_json else traj.to_csv(), cfg.out)
    return EXIT_OK


@dataclass(frozen=True)
class RotationMap:
    angle: float

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return (c * x - s * y, s * x + c * y)


@dataclass(frozen=True)
class TableMap:
    table: dict

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        try:
            return self.table[(x, y)]
        except KeyError:
            raise ValueError(f"point {(x, y)} is not in the map table") from None


def read_point_table(path: str) -> dict:
    table = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            try:
                table[(float(row["x"]), float(row["y"]))] = (float(row["hx"]), float(row["hy"]))
            except (KeyError, ValueError) as exc:
                raise CliError(f"{path}: rows need numeric x, y, hx, hy ({exc})") from exc
    if not table:
        raise CliError(f"{path}: empty point table")
    return table


class _PointGrid:
    def __init__(self, points):
        self._points = list(points)

    def points(self):
        return self._points


def cmd_recover(opts: dict) -> int:
    cfg = run_config(opts)
    spec = opts["map"]
    if not spec:
        raise CliError("--map is required")
    g = _poly(cfg.poly)
    field_ = _build_field(cfg, g)
    grid = AnnulusGrid(cfg.grid_inner, cfg.grid_outer, cfg.grid_n)
    alpha_ref = None
    if spec.startswith("shift:"):
        alpha_ref = parse_fn(spec[len("shift:"):], value_at_origin=0.0)
        h = make_shift_map(field_, alpha_ref)
    elif spec.startswith("rotate:"):
        h = RotationMap(_number(spec[len("rotate:"):]))
    elif Path(spec).is_file():
        table = read_point_table(spec)
        h = TableMap(table)
        grid = _PointGrid(sorted(table))
    else:
        raise CliError(f"cannot resolve map {spec!r}: use shift:<expr>, rotate:<angle> "
                       "or a CSV file with columns x,y,hx,hy")
    strips = [_number(s) for s in opts["strips"].split(",") if s.strip()] or None
    sample: ShiftSample = recover_shift(field_, h, grid, tol=cfg.tol, strips=strips)
    doc = sample.to_dict()
    doc["alpha_error"] = None if alpha_ref is None else sample.alpha_error(alpha_ref)
    _emit(dumps(doc), cfg.out)
    return EXIT_OK if sample.ok else EXIT_UNVERIFIED


def cmd_portrait(opts: dict) -> int:
    cfg = run_config(opts)
    g = _poly(cfg.poly)
    levels = tuple(_number(s) for s in opts["levels"].split(",") if s.strip())
    seeds = tuple(_pair(s) for s in opts["seeds"].split(";") if s.strip())
    spec = PortraitSpec(levels=levels, seeds=seeds, size=opts["size"], radius=cfg.radius)
    field_ = _build_field(cfg, g) if seeds else None
    portrait = render_portrait(g, spec, field_, title=to_string(g))
    _emit(portrait.svg, cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--poly", help="homogeneous polynomial in x, y, e.g. '3*x^2*y - y^3'")
    p.add_argument("--eta", help="positive multiplier eta(x, y) (default 1)")
    p.add_argument("--radius", help="working radius (default 2)")
    p.add_argument("--tol", help="recovery / flow tolerance (default 1e-7)")
    p.add_argument("--level-tol", dest="level_tol", help="same-level tolerance (default 1e-9)")
    p.add_argument("--grid-inner", dest="grid_inner", help="annulus inner radius (default 0.3)")
    p.add_argument("--grid-outer", dest="grid_outer", help="annulus outer radius (default 1.0)")
    p.add_argument("--grid-n", dest="grid_n", help="annulus grid points (default 200)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--json", action="store_true", help="JSON output where there is a choice")
    p.add_argument("--force", action="store_true", help="lift even when property (*) fails")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homoshift", description=(
        "Hamiltonian flows of homogeneous planar polynomials and shift functions along their orbits."))
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", help="property (*) and angular roots")
    _common(p)
    p = sub.add_parser("lift", help="lifted field samples and gamma factors")
    _common(p)
    p = sub.add_parser("flow", help="trajectory as CSV (t,x,y)")
    _common(p)
    p.add_argument("--z", help="start point 'x,y'")
    p.add_argument("--t", help="flow time (expressions such as pi/4 allowed)")
    p.add_argument("--n", help="number of samples (default 100)")
    p = sub.add_parser("recover", help="recover alpha with h(z) = flow(z, alpha(z))")
    _common(p)
    p.add_argument("--map", help="shift:<alpha(x,y)> | rotate:<angle> | table.csv")
    p.add_argument("--strips", help="radii for a flatness report of alpha, e.g. 0.8,0.6,0.4,0.3")
    p = sub.add_parser("portrait", help="SVG of level curves and orbits")
    _common(p)
    p.add_argument("--levels", help="comma-separated level values")
    p.add_argument("--seeds", help="orbit seeds 'x,y;x,y'")
    p.add_argument("--size", help="image size in pixels (default 480)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        if args.command == "check":
            return cmd_check(opts)
        if args.command == "lift":
            return cmd_lift(opts, args.force)
        if args.command == "flow":
            return cmd_flow(opts, args.json)
        if args.command == "recover":
            return cmd_recover(opts)
        return cmd_portrait(opts)
    except ParseError as exc:
        print(f"error: parse error: {exc}", file=sys.stderr)
    except (CliError, PolynomialError, StarError, DomainError, MultiplierError,
            FlowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
