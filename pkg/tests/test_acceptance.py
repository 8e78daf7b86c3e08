"""Acceptance criteria 1-11.

Each test records one ``PASS``/``FAIL criterion N: ...`` line; the lines are
printed in the terminal summary of any pytest run that includes this file.
"""
import json
import math
import random
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from homoshift.cli import main
from homoshift.expr import VARS_POLAR, parse_fn, parse_poly
from homoshift.field import flow
from homoshift.ode import FlowError, integrate
from homoshift.poly import HomoPoly, eval_poly, partial_x, partial_y
from homoshift.polar import descend_map, f1_formula, lift_field, lift_map, p_map, pullback, pushforward
from homoshift.jets import flatness_report
from homoshift.shift import (
    AnnulusGrid,
    flow_time,
    make_shift_map,
    recover_shift,
    sector_time,
    separatrix_time,
)
from homoshift.star import a_exponent, factor_decomposition, is_star

from conftest import ACCEPTANCE_LINES, ETA_TEXT, SAMPLE_POLYS, make_field

GOLDEN = Path(__file__).parent / "golden"
STRIPS = [0.8, 0.6, 0.4, 0.3]


@pytest.fixture
def record(request):
    def _record(n: int, ok: bool, detail: str, started: float):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail} ({time.perf_counter() - started:.1f} s)"
        print(line)
        request.config.stash[ACCEPTANCE_LINES].append(line)
        assert ok, line
    return _record


def _random_poly(rng: random.Random, lo=2, hi=6, bound=5) -> HomoPoly:
    while True:
        d = rng.randint(lo, hi)
        c = [rng.randint(-bound, bound) for _ in range(d + 1)]
        if any(c):
            return HomoPoly(c, d)


def test_criterion_1_star_criteria_agree(record):
    t0 = time.perf_counter()
    rng = random.Random(101)
    polys = [_random_poly(rng) for _ in range(200)]
    disagree = sum(1 for g in polys
                   if is_star(g).via_squarefree != is_star(g).via_coprime_partials)
    holds = sum(1 for g in polys if is_star(g).holds)
    record(1, disagree == 0, f"{disagree} disagreements over 200 polynomials ({holds} satisfy (*))", t0)


def test_criterion_2_euler_identity(record):
    t0 = time.perf_counter()
    rng = random.Random(202)
    worst = Fraction(0)
    for _ in range(100):
        g = _random_poly(rng)
        gx, gy = partial_x(g), partial_y(g)
        for _ in range(100):
            x = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
            y = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
            res = x * eval_poly(gx, x, y) + y * eval_poly(gy, x, y) - g.degree * eval_poly(g, x, y)
            worst = max(worst, abs(res))
    record(2, worst == 0, f"max exact residual {worst} over 100 x 100 rational points", t0)


def test_criterion_3_closed_form_flows(record):
    t0 = time.perf_counter()
    rot, hyp = make_field("x^2+y^2"), make_field("x*y")
    rng = random.Random(303)
    worst = 0.0
    for _ in range(100):
        x, y, t = rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1, 1)
        c, s = math.cos(2 * t), math.sin(2 * t)
        worst = max(worst, math.dist(flow(rot, (x, y), t), (c * x - s * y, s * x + c * y)))
        worst = max(worst, math.dist(flow(hyp, (x, y), t), (x * math.exp(-t), y * math.exp(t))))
    record(3, worst <= 1e-8, f"max deviation {worst:.2e} (tol 1e-08)", t0)


def test_criterion_4_conjugacy(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    worst, checked, escaped = 0.0, 0, 0
    for poly in SAMPLE_POLYS:
        for eta in (None, ETA_TEXT):
            f = make_field(poly, eta)
            lift = lift_field(f)
            n = 0
            while n < 50:
                a = (float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0.4, 1.4)))
                t = float(rng.uniform(-0.5, 0.5))
                try:
                    planar = flow(f, p_map(1, a), t)
                except FlowError:
                    escaped += 1
                    continue
                up = integrate(lift.rhs, a, t, 1e-12, lift.t_max, lift.radius, lift.escape)
                worst = max(worst, math.dist(p_map(1, up), planar))
                n += 1
                checked += 1
    record(4, worst <= 1e-6 and checked == 400,
           f"max |P(F_t(a)) - G_t(P(a))| = {worst:.2e} over {checked} samples "
           f"({escaped} redrawn after leaving the working disk) (tol 1e-06)", t0)


def test_criterion_5_f1_formula(record):
    t0 = time.perf_counter()
    worst = 0.0
    for poly in SAMPLE_POLYS:
        g = parse_poly(poly)
        for eta in (None, ETA_TEXT):
            lift = lift_field(make_field(poly, eta))
            e = None if eta is None else parse_fn(eta)
            for phi in np.linspace(0, 2 * math.pi, 40, endpoint=False):
                for rho in np.linspace(0.2, 2.0, 20):
                    worst = max(worst, abs(lift(phi, rho)[0] - f1_formula(g, e, (phi, rho))))
    record(5, worst <= 1e-8, f"max F1 deviation {worst:.2e} on 8 x 40 x 20 grid (tol 1e-08)", t0)


def test_criterion_6_root_exponents(record):
    t0 = time.perf_counter()
    rng = random.Random(606)
    bad, squared_bad, n, roots_seen = 0, 0, 0, 0
    while n < 100:
        g = _random_poly(rng, 2, 5)
        if not is_star(g).holds:
            continue
        n += 1
        decomp = factor_decomposition(g)
        for root, _ in decomp.linear_roots:
            roots_seen += 1
            bad += a_exponent(g, root) not in (0, 1)
        for _ in range(3):
            bad += a_exponent(g, rng.uniform(-math.pi / 2, math.pi / 2)) not in (0, 1)
        # append a fresh rational line x - t y, then square it
        angles = decomp.angles
        while True:
            t = Fraction(rng.randint(-12, 12), rng.randint(1, 5))
            phi = math.atan2(1.0, float(t))
            if all(abs(math.sin(phi - a)) > 1e-6 for a in angles):
                break
        line = HomoPoly([-t, 1], 1)
        bad += a_exponent(g * line, phi) != 1
        squared_bad += a_exponent(g * line * line, phi) < 2
    record(6, bad == 0 and squared_bad == 0,
           f"{bad} exponents outside {{0, 1}} ({roots_seen} roots), "
           f"{squared_bad} squared factors with a < 2, over 100 polynomials", t0)


ROUND_TRIP_POLYS = ["x^2+y^2", "x*y", "3*x^2*y-y^3"]
ROUND_TRIP_ALPHAS = ["0", "0.2", "0.1*exp(-1/(x^2+y^2))"]


def test_criterion_7_shift_round_trip(record):
    t0 = time.perf_counter()
    grid = AnnulusGrid(0.3, 1.0, 200)
    failed, notes = [], []
    worst_err = worst_res = 0.0
    worst_defined_err = worst_defined_res = 0.0
    for poly in ROUND_TRIP_POLYS:
        for eta in (None, ETA_TEXT):
            f = make_field(poly, eta)
            for text in ROUND_TRIP_ALPHAS:
                alpha = parse_fn(text, value_at_origin=0.0)
                s = recover_shift(f, make_shift_map(f, alpha), grid)
                err, res = s.alpha_error(alpha), s.max_residual
                worst_defined_err = max(worst_defined_err, err)
                worst_defined_res = max(worst_defined_res, res)
                undefined = [z for z, why in s.failures if why.startswith("map undefined")]
                if s.failures or err > 1e-6 or res > 1e-7:
                    name = f"g={poly}, eta={eta or 1}, alpha={text}"
                    failed.append(name)
                    notes.append(f"{name}: {len(undefined)} of {len(grid.points())} grid points "
                                 f"have no h(z) (the flow leaves every bounded set before "
                                 f"time alpha), {len(s.failures) - len(undefined)} other failures")
                    continue
                worst_err, worst_res = max(worst_err, err), max(worst_res, res)
    for note in notes:
        print("  " + note)
    detail = (f"{18 - len(failed)}/18 configurations recovered; sup error {worst_err:.2e}, "
              f"max residual {worst_res:.2e} on those")
    if failed:
        detail += (f"; failing: {'; '.join(notes)}; on the points where h is defined "
                   f"sup error {worst_defined_err:.2e}, residual {worst_defined_res:.2e}")
    record(7, not failed, detail, t0)


def test_criterion_8_closed_form_times(record):
    t0 = time.perf_counter()
    sector_worst, arcs = 0.0, 0
    rng = np.random.default_rng(808)
    for poly in ("x*y", "3*x^2*y-y^3"):
        g, f = parse_poly(poly), make_field(poly)
        lift = lift_field(f)
        while arcs < (10 if poly == "x*y" else 20):
            a = (float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0.5, 1.0)))
            t = float(rng.uniform(-0.3, 0.3))
            b = integrate(lift.rhs, a, t, 1e-12, lift.t_max, lift.radius, lift.escape)
            try:
                s = sector_time(g, a, b[0])
            except (ValueError, ArithmeticError):
                continue  # arc crosses a separatrix or hugs one
            sector_worst = max(sector_worst, abs(s - flow_time(f, p_map(1, a), p_map(1, b))))
            arcs += 1
    ray_worst, rays = 0.0, 0
    for poly in ("x*y", "3*x^2*y-y^3"):
        g, f = parse_poly(poly), make_field(poly)
        for phi, _ in factor_decomposition(g).linear_roots:
            for direction in (phi, phi + math.pi):
                u = (math.cos(direction), math.sin(direction))
                for r0, r1 in ((1.0, 0.5), (0.5, 1.0), (0.8, 0.6), (0.4, 0.9)):
                    a, b = (r0 * u[0], r0 * u[1]), (r1 * u[0], r1 * u[1])
                    try:
                        tau = flow_time(f, a, b)
                    except FlowError:
                        continue  # the ray points the other way
                    ray_worst = max(ray_worst, abs(separatrix_time(g, direction, r0, r1) - tau))
                    rays += 1
    ok = sector_worst <= 1e-6 and ray_worst <= 1e-9 and rays > 0
    record(8, ok, f"sector vs flow_time {sector_worst:.2e} over {arcs} arcs (tol 1e-06); "
                  f"separatrix vs flow_time {ray_worst:.2e} over {rays} ray segments (tol 1e-09)", t0)


def test_criterion_9_time_preservation(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    worst, n = 0.0, 0
    fields = [make_field(p, e) for p in SAMPLE_POLYS for e in (None, ETA_TEXT)]
    while n < 50:
        f = fields[n % len(fields)]
        lift = lift_field(f)
        a = (float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0.4, 1.2)))
        tau = float(rng.uniform(-0.5, 0.5))
        try:
            a2 = integrate(lift.rhs, a, tau, 1e-12, lift.t_max, lift.radius, lift.escape)
        except FlowError:
            continue
        worst = max(worst, abs(flow_time(lift, a, a2) - flow_time(f, p_map(1, a), p_map(1, a2))))
        n += 1
    record(9, worst <= 1e-7, f"max half-plane vs planar flow-time gap {worst:.2e} over 50 pairs "
                             f"(tol 1e-07)", t0)


def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return lambda x, y: (c * x - s * y, s * x + c * y)


def test_criterion_10_flat_correspondence(record):
    t0 = time.perf_counter()
    pts = [(x, y) for x in np.linspace(-1.2, 1.2, 13) for y in np.linspace(-1.2, 1.2, 13)]
    fn_gap = 0.0
    for text, origin in [("x", None), ("x^2+y^2", None), ("exp(-1/(x^2+y^2))", 0.0)]:
        f = parse_fn(text, value_at_origin=origin)
        for k in (1, 2):
            back = pushforward(k, pullback(k, f))
            fn_gap = max(fn_gap, max(abs(back(*z) - f(*z)) for z in pts))
    flat_inputs = {
        "plane exp(-1/r^2)": (parse_fn("exp(-1/(x^2+y^2))", value_at_origin=0.0), "plane"),
        "half-plane exp(-1/rho^2)": (parse_fn("exp(-1/rho^2)", VARS_POLAR, 0.0), "halfplane"),
        "half-plane exp(-1/rho^2)(2+cos phi)": (
            parse_fn("exp(-1/rho^2)*(2+cos(phi))", VARS_POLAR, 0.0), "halfplane"),
        "pullback of exp(-1/r^2)": (
            pullback(1, parse_fn("exp(-1/(x^2+y^2))", value_at_origin=0.0)), "halfplane"),
    }
    not_flat = [name for name, (fn, dom) in flat_inputs.items()
                if not flatness_report(fn, 3, STRIPS, dom).flat]
    rot = make_field("x^2+y^2")
    maps = [lambda x, y: (x, y), _rot(0.9), lambda x, y: (2 * x, 2 * y),
            make_shift_map(rot, parse_fn("0.1*exp(-1/(x^2+y^2))", value_at_origin=0.0))]
    rng = np.random.default_rng(1010)
    map_gap = 0.0
    for h in maps:
        lifted = lift_map(1, h)
        back = descend_map(1, lifted)
        relift = lift_map(1, back)
        for _ in range(20):
            z = tuple(rng.uniform(-1, 1, 2))
            if math.hypot(*z) > 0.1:
                map_gap = max(map_gap, math.dist(back(*z), h(*z)))
            a = (float(rng.uniform(-7, 7)), float(rng.uniform(0.2, 1.0)))
            map_gap = max(map_gap, math.dist(relift(*a), lifted(*a)))
    ok = fn_gap <= 1e-12 and not not_flat and map_gap <= 1e-10
    record(10, ok, f"function round trip {fn_gap:.2e} (tol 1e-12); flat verdicts "
                   f"{len(flat_inputs) - len(not_flat)}/{len(flat_inputs)}; map round trip "
                   f"{map_gap:.2e} (tol 1e-10)", t0)


GOLDEN_RUNS = {
    "check_x2my2.json": ["check", "--poly", "x^2 - y^2"],
    "lift_xy.json": ["lift", "--poly", "x*y"],
    "recover_rotate.json": ["recover", "--poly", "x^2+y^2", "--map", "rotate:0.3", "--grid-n", "8"],
    "portrait_xy.svg": ["portrait", "--poly", "x*y", "--levels=-0.5,0,0.5", "--size", "240"],
}

EXIT_CASES = [
    (["check", "--poly", "x^2 - y^2"], 0),
    (["check", "--poly", "x^2*y"], 2),
    (["check", "--poly", "x^2 + x"], 1),
    (["lift", "--poly", "x^2*y"], 2),
    (["lift", "--poly", "x^2*y", "--force"], 0),
    (["recover", "--poly", "x^2+y^2", "--map", "rotate:0.3", "--grid-n", "4"], 0),
    (["recover", "--poly", "x^2+y^2", "--map", "nonsense"], 1),
    (["portrait", "--poly", "x*y"], 1),
]


def test_criterion_11_cli_golden(record, tmp_path, capsys):
    t0 = time.perf_counter()
    mismatched = []
    for name, args in GOLDEN_RUNS.items():
        out = tmp_path / name
        if main(args + ["--out", str(out)]) != 0 or out.read_bytes() != (GOLDEN / name).read_bytes():
            mismatched.append(name)
    wrong_exit = []
    for args, want in EXIT_CASES:
        got = main(args + ["--out", str(tmp_path / "x.out")])
        if got != want:
            wrong_exit.append(f"{args[0]} {args[2]}: {got} != {want}")
    table = tmp_path / "h.csv"
    table.write_text("x,y,hx,hy\n0.5,0,0,0.5\n0.5,0.5,1,1\n")
    if main(["recover", "--poly", "x^2+y^2", "--map", str(table), "--out", str(tmp_path / "t.json")]) != 3:
        wrong_exit.append("recover table: expected 3")
    json.loads((tmp_path / "t.json").read_text())
    capsys.readouterr()
    ok = not mismatched and not wrong_exit
    record(11, ok, f"{len(GOLDEN_RUNS) - len(mismatched)}/{len(GOLDEN_RUNS)} golden outputs "
                   f"byte-identical; {len(EXIT_CASES) + 1 - len(wrong_exit)}/{len(EXIT_CASES) + 1} "
                   f"exit codes as documented" + (f"; {mismatched + wrong_exit}" if not ok else ""), t0)
