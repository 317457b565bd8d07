"""Acceptance criteria, one test per criterion, each printing a pass/fail
line with its measured runtime (run with -s to see them)."""

import json
import math
import time

import numpy as np
import pytest

from wolfflab import (QuadratureConfig, RadialDensity, RadialFunction,
                      check_lorentz_embedding, check_mutual_energy_estimate,
                      check_quasi_triangle, dirac, dirichlet_energy,
                      generalized_energy, intrinsic_fixed_point, lorentz_norm,
                      params, riesz_measure_of, scale, solve_bounded_endpoint,
                      solve_minimal, solve_radial_p_laplace, truncated_wolff,
                      wolff)
from wolfflab.cli import main
from wolfflab.families import random_density, random_pair

NP_GRID = [(3, 2.0), (4, 3.0), (5, 2.5)]


def _report(name, ok, detail="", elapsed=None):
    status = "PASS" if ok else "FAIL"
    timing = f" [{elapsed:.2f}s]" if elapsed is not None else ""
    print(f"[{status}] {name}: {detail}{timing}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def quad():
    return QuadratureConfig()


@pytest.fixture(scope="module")
def suite_quad():
    return QuadratureConfig(points_per_decade=32)


def manufactured_sigma(quad):
    return RadialDensity.from_function(
        3, lambda s: 3.0 * (1.0 + np.asarray(s, float) ** 2) ** (-2.25),
        quad, tail=(3.0, 4.5))


def u_star(r):
    return (1.0 + np.asarray(r, float) ** 2) ** (-0.5)


def test_criterion_01_dirac_wolff(quad):
    t0 = time.monotonic()
    worst = 0.0
    for n, p in NP_GRID:
        pp = params(n, p, (p - 1) / 2, 1.0)
        for r in (0.1, 1.0, 10.0):
            x = np.zeros(n)
            x[0] = r
            got = wolff(dirac(n), x, pp, quad).value
            want = (p - 1.0) / (n - p) * r ** (-(n - p) / (p - 1.0))
            worst = max(worst, abs(got - want) / want)
    dt = time.monotonic() - t0
    _report("criterion 1 (Dirac Wolff closed form)",
            worst < 1e-6 and dt < 1.0,
            f"max rel err {worst:.2e}", dt)


def test_criterion_02_uniform_ball(quad):
    t0 = time.monotonic()
    pp = params(3, 2.0, 0.5, 1.0)
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    e1 = abs(wolff(ball, np.zeros(3), pp, quad).value - 2 * math.pi) / (2 * math.pi)
    e2 = abs(wolff(ball, [2.0, 0, 0], pp, quad).value - 2 * math.pi / 3) / (2 * math.pi / 3)
    dt = time.monotonic() - t0
    _report("criterion 2 (uniform ball potential)",
            max(e1, e2) < 1e-6 and dt < 1.0,
            f"center {e1:.2e}, exterior {e2:.2e}", dt)


def test_criterion_03_radial_solver(quad):
    t0 = time.monotonic()
    worst_fund = 0.0
    for n, p in NP_GRID:
        pp = params(n, p, (p - 1) / 2, 1.0)
        u = solve_radial_p_laplace(dirac(n), pp, quad)
        for r in (0.1, 1.0, 10.0):
            want = (1.0 / pp.sphere_area) ** (1 / (p - 1)) * (p - 1) / (n - p) \
                * r ** (-(n - p) / (p - 1))
            worst_fund = max(worst_fund, abs(u.eval(r) - want) / want)
    worst_rt = 0.0
    for seed in range(20):
        gen = np.random.default_rng(seed)
        n, p = NP_GRID[seed % 3]
        pp = params(n, p, (p - 1) / 2, 1.0)
        nu, _ = random_density(gen, pp, quad)
        u = solve_radial_p_laplace(nu, pp, quad)
        back = riesz_measure_of(u, pp)
        r = u.grid[:: len(u.grid) // 50]
        m0 = nu.centered_mass(r)
        m1 = back.centered_mass(r)
        live = m0 > 1e-12 * nu.total_mass()
        worst_rt = max(worst_rt, float(np.max(np.abs(m1[live] - m0[live]) / m0[live])))
    dt = time.monotonic() - t0
    _report("criterion 3 (radial solver + Riesz round trip)",
            worst_fund < 1e-6 and worst_rt < 1e-6 and dt < 10.0,
            f"fundamental {worst_fund:.2e}, round trip {worst_rt:.2e}", dt)


def test_criterion_04_manufactured_solution(quad):
    t0 = time.monotonic()
    pp = params(3, 2.0, 0.5, 1.0)
    sigma = manufactured_sigma(quad)
    sol = solve_minimal([sigma], [0.5], None, pp, quad)
    rs = np.geomspace(1e-2, 1e2, 500)
    err = float(np.max(np.abs(sol.u.eval(rs) - u_star(rs)) / u_star(rs)))
    dt = time.monotonic() - t0
    _report("criterion 4 (manufactured minimal solution)",
            sol.converged and sol.iterations_used <= 50 and err < 1e-4
            and dt < 30.0,
            f"iters {sol.iterations_used}, sup rel err {err:.2e}", dt)


def test_criterion_05_monotonicity_suite(suite_quad):
    t0 = time.monotonic()
    pp = params(3, 2.0, 0.5, 1.0)
    violations = 0
    for seed in range(100):
        gen = np.random.default_rng(10_000 + seed)
        sigma, d1 = random_density(gen, pp, suite_quad)
        mu = None
        if seed % 2 == 0:
            mu, _ = random_density(gen, pp, suite_quad)
        try:
            # the solver asserts u_{j+1} >= u_j - 1e-12 at every step
            solve_minimal([sigma], [0.5], mu, pp, suite_quad,
                          check_conditions=False)
        except Exception:
            violations += 1
    dt = time.monotonic() - t0
    _report("criterion 5 (monotone iteration suite)",
            violations == 0 and dt < 300.0,
            f"violations {violations}/100", dt)


def test_criterion_06_mutual_energy_harness(suite_quad):
    t0 = time.monotonic()
    pp_base = params(3, 2.0, 0.5, 1.0)
    scales = (1e-3, 1.0, 1e3)
    ratios = []
    worst_scale_dev = 0.0
    instances = []
    for seed in range(100):
        gen = np.random.default_rng(20_000 + seed)
        sigma, mu, _ = random_pair(gen, pp_base, suite_quad)
        g = gen.uniform(0.6, 1.8)
        q = gen.uniform(-0.4 * g, 0.85)
        instances.append((sigma, mu, g, q))
        rep = check_mutual_energy_estimate(sigma, mu, g, q, pp_base, suite_quad)
        assert not rep.vacuous and rep.ratio is not None
        assert math.isfinite(rep.ratio)
        ratios.append(rep.ratio)
        for a in scales:
            for b in scales:
                if a == 1.0 and b == 1.0:
                    continue
                rep_s = check_mutual_energy_estimate(
                    scale(sigma, a), scale(mu, b), g, q, pp_base, suite_quad)
                worst_scale_dev = max(worst_scale_dev,
                                      abs(rep_s.ratio - rep.ratio) / rep.ratio)
    const = max(ratios)
    fine = suite_quad.refine()
    ratios_fine = []
    for sigma, mu, g, q in instances:
        rep = check_mutual_energy_estimate(sigma, mu, g, q, pp_base, fine)
        ratios_fine.append(rep.ratio)
    const_fine = max(ratios_fine)
    drift = abs(const_fine - const) / const
    dt = time.monotonic() - t0
    _report("criterion 6 (mutual energy harness)",
            worst_scale_dev < 1e-8 and drift < 0.05 and dt < 300.0,
            f"constant {const:.4g}, scale dev {worst_scale_dev:.2e}, "
            f"doubling drift {drift:.2%}", dt)


def test_criterion_07_quasi_triangle(suite_quad):
    t0 = time.monotonic()
    pp = params(3, 2.0, 0.5, 1.0)
    up = down = 0.0
    for seed in range(50):
        gen = np.random.default_rng(30_000 + seed)
        mu, nu, _ = random_pair(gen, pp, suite_quad)
        rep = check_quasi_triangle(mu, nu, 1.0, pp, suite_quad)
        assert rep.passed
        up = max(up, rep.ratio)
        down = max(down, rep.instance["lower_ratio"])
    from wolfflab import zero_measure
    mu, _ = random_density(np.random.default_rng(3), pp, suite_quad)
    degen = check_quasi_triangle(mu, zero_measure(3), 1.0, pp, suite_quad)
    exact = abs(degen.ratio - 1.0)
    dt = time.monotonic() - t0
    _report("criterion 7 (quasi-triangle comparability)",
            math.isfinite(up) and math.isfinite(down) and exact < 1e-13
            and dt < 120.0,
            f"upper {up:.3g}, lower {down:.3g}, degenerate dev {exact:.1e}", dt)


def test_criterion_08_km_sandwich(suite_quad):
    t0 = time.monotonic()
    counts = {(3, 2.0): 50, (4, 3.0): 8, (5, 2.5): 8}
    constants = {}
    ok = True
    for (n, p), cnt in counts.items():
        pp = params(n, p, (p - 1) / 2, 1.0)
        c_cell = 0.0
        for seed in range(cnt):
            gen = np.random.default_rng(40_000 + seed)
            nu, _ = random_density(gen, pp, suite_quad)
            u = solve_radial_p_laplace(nu, pp, suite_quad)
            for _ in range(10):
                d = 10.0 ** gen.uniform(-2, 2)
                R = d * 10.0 ** gen.uniform(-1, 1)
                x = np.zeros(n)
                x[0] = d
                w_r = truncated_wolff(nu, x, R, pp, suite_quad).value
                w_2r = truncated_wolff(nu, x, 2 * R, pp, suite_quad).value
                u_x = float(np.atleast_1d(u.eval(d))[0])
                inf_b = float(np.atleast_1d(u.eval(d + R))[0])
                if w_r > 0:
                    c_cell = max(c_cell, w_r / u_x)
                c_cell = max(c_cell, u_x / (inf_b + w_2r))
        constants[(n, p)] = c_cell
        ok = ok and 1e-3 < c_cell < 1e3
    dt = time.monotonic() - t0
    detail = ", ".join(f"c({n},{p})={c:.3g}" for (n, p), c in constants.items())
    _report("criterion 8 (pointwise sandwich)", ok and dt < 120.0, detail, dt)


def test_criterion_09_lower_bound(suite_quad):
    t0 = time.monotonic()
    pp = params(3, 2.0, 0.5, 1.0)
    ratios = []
    sigmas = []
    for seed in range(12):
        gen = np.random.default_rng(50_000 + seed)
        sigma, _ = random_density(gen, pp, suite_quad)
        sigmas.append(sigma)
        sol = solve_minimal([sigma], [0.5], None, pp, suite_quad,
                            check_conditions=False)
        assert sol.lower_bound_ratio is not None and sol.lower_bound_ratio > 0
        ratios.append(sol.lower_bound_ratio)
    drift = 0.0
    fine = suite_quad.refine()
    for sigma, ratio in list(zip(sigmas, ratios))[:4]:
        sol = solve_minimal([sigma], [0.5], None, pp, fine,
                            check_conditions=False)
        drift = max(drift, abs(sol.lower_bound_ratio - ratio) / ratio)
    dt = time.monotonic() - t0
    _report("criterion 9 (lower-bound ratio)",
            min(ratios) > 0 and drift < 0.05 and dt < 60.0,
            f"min ratio {min(ratios):.3g}, refinement drift {drift:.2%}", dt)


def test_criterion_10_energy_identity(suite_quad):
    t0 = time.monotonic()
    pp = params(3, 2.0, [0.5, 0.35], 1.0)
    worst = 0.0
    for seed in range(20):
        gen = np.random.default_rng(60_000 + seed)
        s1, _ = random_density(gen, pp, suite_quad)
        s2, _ = random_density(gen, pp, suite_quad)
        mu, _ = random_density(gen, pp, suite_quad)
        sol = solve_minimal([s1, s2], [0.5, 0.35], mu, pp, suite_quad,
                            check_conditions=False)
        lhs = dirichlet_energy(sol.u, pp, 1.0, suite_quad)
        rhs = generalized_energy(sol.u, [s1, s2], [0.5, 0.35], mu, 1.0, pp,
                                 suite_quad)
        worst = max(worst, abs(lhs - rhs) / rhs)
    dt = time.monotonic() - t0
    _report("criterion 10 (gamma=1 energy identity)",
            worst < 1e-3 and dt < 120.0, f"max rel gap {worst:.2e}", dt)


def test_criterion_11_lorentz(quad, suite_quad):
    t0 = time.monotonic()
    pp = params(3, 2.0, 0.5, 1.0)
    g = np.geomspace(1e-6, 1.0, 385)
    indicator = RadialFunction(g, np.ones_like(g), 0.0, 0.0, 1.0)
    got = lorentz_norm(indicator, 6.0, 2.0, pp, quad)
    want = math.sqrt(3.0) * (4 * math.pi / 3.0) ** (1.0 / 6.0)
    e_norm = abs(got - want) / want

    fam, _ = random_density(np.random.default_rng(77), pp, suite_quad)
    base = check_lorentz_embedding(fam, 1.0, pp, suite_quad)
    scale_dev = 0.0
    for lam in (1e-3, 1e3):
        rep = check_lorentz_embedding(scale(fam, lam), 1.0, pp, suite_quad)
        scale_dev = max(scale_dev, abs(rep.ratio - base.ratio) / base.ratio)

    all_hold = True
    for seed in range(50):
        gen = np.random.default_rng(70_000 + seed)
        mu, _ = random_density(gen, pp, suite_quad)
        rep = check_lorentz_embedding(mu, 1.0, pp, suite_quad)
        all_hold = all_hold and rep.passed and math.isfinite(rep.ratio)
    dt = time.monotonic() - t0
    _report("criterion 11 (Lorentz norms and embedding)",
            e_norm < 1e-6 and scale_dev < 1e-8 and all_hold and dt < 60.0,
            f"indicator {e_norm:.2e}, scale dev {scale_dev:.2e}", dt)


def test_criterion_12_endpoints(quad):
    t0 = time.monotonic()
    sigma = manufactured_sigma(quad)
    pp_inf = params(3, 2.0, 0.5, math.inf)
    sol_inf = solve_bounded_endpoint([sigma], [0.5], None, pp_inf, quad)
    sup_err = abs(sol_inf.sup_norm - 1.0)

    pp0 = params(3, 2.0, 0.5, 0.0)
    sol0 = intrinsic_fixed_point(sigma, 0.5, None, pp0, quad)
    rs = np.geomspace(1e-2, 1e2, 300)
    err0 = float(np.max(np.abs(sol0.u.eval(rs) - u_star(rs)) / u_star(rs)))
    dt = time.monotonic() - t0
    _report("criterion 12 (endpoint solvers)",
            sup_err < 1e-4 and sol0.converged and err0 < 1e-3 and dt < 60.0,
            f"sup-norm err {sup_err:.2e}, intrinsic err {err0:.2e}", dt)


def test_criterion_13_determinism(tmp_path):
    t0 = time.monotonic()
    doc = {
        "params": {"n": 3, "p": 2.0, "q": 0.5, "gamma": 1.0},
        "quad": {"points_per_decade": 32},
        "seed": 42,
        "measures": {},
        "command": {"checks": ["thm31", "quasi_triangle", "picone",
                               "weighted_norm", "lorentz_embed", "km_sandwich",
                               "lower_bound", "energy_identity",
                               "density_conditions"],
                    "instances": 2},
    }
    cfg = tmp_path / "verify.json"
    cfg.write_text(json.dumps(doc))
    out1 = tmp_path / "one"
    out8 = tmp_path / "eight"
    rc1 = main(["verify", "--config", str(cfg), "--out", str(out1),
                "--threads", "1"])
    rc8 = main(["verify", "--config", str(cfg), "--out", str(out8),
                "--threads", "8"])
    same = (out1 / "reports.jsonl").read_bytes() == \
        (out8 / "reports.jsonl").read_bytes()
    dt = time.monotonic() - t0
    _report("criterion 13 (thread determinism)",
            rc1 == 0 and rc8 == 0 and same,
            "byte-identical JSON-lines across 1 and 8 threads", dt)
