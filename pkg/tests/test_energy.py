import math

import numpy as np
import pytest

from wolfflab import (Atom, ExponentError, RadialDensity, add,
                      check_mutual_energy_estimate, check_picone_caccioppoli,
                      check_quasi_triangle, check_weighted_norm, dirac,
                      mutual_energy, scale, sigma_energy,
                      solve_radial_p_laplace, wolff_energy, zero_measure)
from wolfflab.families import family_density, random_pair

from oracles import (BALL_MUTUAL_ENERGY_15, BALL_SELF_ENERGY_CLOSED,
                     MC_BALL_SELF_ENERGY, mc_ball_self_energy)


def test_wolff_energy_dirac(pp3, quad):
    assert math.isinf(wolff_energy(dirac(3), 1.0, pp3, quad))
    assert wolff_energy(dirac(3), 0.0, pp3, quad) == 1.0


def test_wolff_energy_ball_newtonian(pp3, quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    got = wolff_energy(ball, 1.0, pp3, quad)
    # frozen 1e7-pair Monte Carlo oracle and its closed form 32 pi^2/15
    assert got == pytest.approx(MC_BALL_SELF_ENERGY,
                                rel=1e-3)
    assert got == pytest.approx(BALL_SELF_ENERGY_CLOSED, rel=1e-3)


def test_mc_oracle_self_consistency():
    est, err = mc_ball_self_energy(n_pairs=500_000, seed=99)
    assert abs(est - BALL_SELF_ENERGY_CLOSED) < 4.0 * err


def test_wolff_energy_homogeneity(pp3, quad):
    fam = family_density(3, 1.0, 0.8, 2.2, quad)
    g = 1.3
    e = wolff_energy(fam, g, pp3, quad)
    for lam in (1e-2, 5.0):
        el = wolff_energy(scale(fam, lam), g, pp3, quad)
        assert el == pytest.approx(lam ** (1.0 + g / (pp3.p - 1.0)) * e, rel=1e-10)


def test_mutual_energy_dirac_pair(pp3, quad):
    sigma = Atom([0.5, 0.0, 0.0], 1.0)
    mu = dirac(3)
    got = mutual_energy(sigma, mu, 1.0, 0.5, pp3, quad)
    assert got == pytest.approx(2.0 ** 1.5, rel=1e-12)


def test_mutual_energy_zero_sigma(pp3, quad):
    assert mutual_energy(zero_measure(3), dirac(3), 1.0, 0.5, pp3, quad) == 0.0


def test_mutual_energy_ball_oracle(pp3, quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    got = mutual_energy(ball, ball, 1.0, 0.5, pp3, quad)
    # independent layer-cake + scipy.quad oracle
    assert got == pytest.approx(BALL_MUTUAL_ENERGY_15, rel=1e-3)


def test_mutual_energy_exponent_range(pp3, quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    with pytest.raises(ExponentError):
        mutual_energy(ball, ball, 1.0, 1.5, pp3, quad)
    with pytest.raises(ExponentError):
        mutual_energy(ball, ball, 1.0, -1.0, pp3, quad)
    # negative q above -gamma is allowed for the product bound
    val = mutual_energy(ball, ball, 1.0, -0.3, pp3, quad)
    assert math.isfinite(val) and val > 0


def test_mutual_estimate_vacuous_on_atomic_mu(pp3, quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    rep = check_mutual_energy_estimate(ball, dirac(3), 1.0, 0.5, pp3, quad)
    assert rep.vacuous and rep.passed


def test_mutual_estimate_scale_invariance(pp3, quad):
    gen = np.random.default_rng(7)
    sigma, mu, _ = random_pair(gen, pp3, quad)
    base = check_mutual_energy_estimate(sigma, mu, 1.0, 0.5, pp3, quad)
    for a in (1e-3, 1e3):
        for b in (1e-3, 1e3):
            rep = check_mutual_energy_estimate(
                scale(sigma, a), scale(mu, b), 1.0, 0.5, pp3, quad)
            assert rep.ratio == pytest.approx(base.ratio, rel=1e-10)


def test_mutual_estimate_small_suite(pp3, quad):
    ratios = []
    for seed in range(8):
        gen = np.random.default_rng(seed)
        sigma, mu, _ = random_pair(gen, pp3, quad)
        q = gen.uniform(-0.4, 0.9)
        rep = check_mutual_energy_estimate(sigma, mu, 1.0, q, pp3, quad)
        assert rep.passed
        if rep.ratio is not None:
            ratios.append(rep.ratio)
    assert ratios and all(math.isfinite(r) for r in ratios)


def test_quasi_triangle_zero_is_exact(pp3, quad):
    mu = family_density(3, 1.0, 1.0, 2.1, quad)
    rep = check_quasi_triangle(mu, zero_measure(3), 1.0, pp3, quad)
    assert rep.ratio == pytest.approx(1.0, abs=1e-14)


def test_quasi_triangle_equal_measures(pp3, quad):
    mu = family_density(3, 1.0, 1.0, 2.1, quad)
    g = 1.0
    rep = check_quasi_triangle(mu, mu, g, pp3, quad)
    # E(2 mu) = 2^{1 + gamma/(p-1)} E(mu): the ratio against E+E is half that
    want = 2.0 ** (1.0 + g / (pp3.p - 1.0)) / 2.0
    assert rep.ratio == pytest.approx(want, rel=1e-9)


def test_quasi_triangle_suite(pp3, quad):
    for seed in range(6):
        gen = np.random.default_rng(200 + seed)
        mu, nu, _ = random_pair(gen, pp3, quad)
        rep = check_quasi_triangle(mu, nu, 1.0, pp3, quad)
        assert rep.passed
        assert rep.instance["lower_ratio"] <= 2.0 + 1e-9


def test_picone_zero_test_function(pp3, quad):
    nu = family_density(3, 1.0, 1.0, 2.2, quad)
    v = solve_radial_p_laplace(nu, pp3, quad)
    g = v.grid
    from wolfflab import RadialFunction
    zero = RadialFunction(g, np.zeros_like(g), 0.0, 1.0, 0.0, np.zeros_like(g))
    rep = check_picone_caccioppoli(zero, v, nu, pp3, quad)
    assert rep.lhs == 0.0 and rep.passed


def test_picone_equality_at_u_equals_v(pp3, quad):
    nu = family_density(3, 1.0, 1.0, 2.2, quad, cut=4.0)
    v = solve_radial_p_laplace(nu, pp3, quad)
    rep = check_picone_caccioppoli(v, v, nu, pp3, quad)
    # with u = v the bound collapses to the integration-by-parts identity
    assert rep.ratio == pytest.approx(1.0, abs=1e-4)
    assert rep.passed


def test_picone_suite(pp3, quad):
    from wolfflab.families import random_test_profile
    for seed in range(20):
        gen = np.random.default_rng(300 + seed)
        nu = family_density(3, 10.0 ** gen.uniform(-0.5, 0.5),
                            10.0 ** gen.uniform(-0.5, 0.5), 2.3, quad)
        v = solve_radial_p_laplace(nu, pp3, quad)
        u = random_test_profile(gen, pp3, quad)
        rep = check_picone_caccioppoli(u, v, nu, pp3, quad)
        assert rep.lhs <= rep.rhs * (1.0 + 1e-6)


def test_weighted_norm_zero(pp3, quad):
    sigma = family_density(3, 1.0, 1.0, 2.2, quad)
    g = sigma.grid
    from wolfflab import RadialFunction
    zero = RadialFunction(g, np.zeros_like(g), 0.0, 1.0, 0.0)
    rep = check_weighted_norm(sigma, zero, 1.0, 0.5, pp3, quad)
    assert rep.lhs == 0.0 and rep.passed


def test_weighted_norm_constant_reduces_to_mutual(pp3, quad):
    sigma = family_density(3, 1.0, 1.0, 2.2, quad)
    g = sigma.grid
    from wolfflab import RadialFunction
    one = RadialFunction(g, np.ones_like(g), 1.0, 0.0, 1.0)
    rep = check_weighted_norm(sigma, one, 1.0, 0.5, pp3, quad)
    gamma_q = 1.5
    want = mutual_energy(sigma, sigma, 1.0, 0.5, pp3, quad) ** (1.0 / gamma_q)
    assert rep.lhs == pytest.approx(want, rel=1e-6)
    assert math.isfinite(rep.ratio)


def test_weighted_norm_suite(pp3, quad):
    from wolfflab.families import random_test_profile
    for seed in range(6):
        gen = np.random.default_rng(400 + seed)
        sigma = family_density(3, 10.0 ** gen.uniform(-0.5, 0.5),
                               10.0 ** gen.uniform(-0.5, 0.5), 2.4, quad)
        f = random_test_profile(gen, pp3, quad)
        rep = check_weighted_norm(sigma, f, 1.0, 0.5, pp3, quad)
        assert rep.passed and math.isfinite(rep.ratio)


def test_sigma_energy_scaling(pp3, quad):
    sigma = family_density(3, 1.2, 0.9, 2.5, quad)
    e = sigma_energy(sigma, 1.0, 0.5, pp3, quad)
    lam = 31.0
    el = sigma_energy(scale(sigma, lam), 1.0, 0.5, pp3, quad)
    # exponent: 1 + E/(p-1) with E = (gamma+q)(p-1)/(p-1-q) = 3
    assert el == pytest.approx(lam ** 4.0 * e, rel=1e-10)


def test_quasi_triangle_reconstructed_from_raw_energies(pp3, quad):
    # the comparability constant can be rebuilt from raw energies: pointwise
    # quasi-linearity bounds E(mu+nu) by the four raw terms, and the q = 0
    # product bound turns the cross terms into powers of the self energies
    gen = np.random.default_rng(11)
    mu, nu, _ = random_pair(gen, pp3, quad)
    g = 1.0
    p = pp3.p
    e_sum = wolff_energy(add(mu, nu), g, pp3, quad)
    e_mu = wolff_energy(mu, g, pp3, quad)
    e_nu = wolff_energy(nu, g, pp3, quad)
    cross_mu = mutual_energy(nu, mu, g, 0.0, pp3, quad)   # (W mu)^g d nu
    cross_nu = mutual_energy(mu, nu, g, 0.0, pp3, quad)   # (W nu)^g d mu
    # pointwise (x+y)^g <= 2^{(g-1)+} (x^g + y^g) with the quasi-linearity
    # constant c(p)
    c_alg = max(1.0, 2.0 ** ((2.0 - p) / (p - 1.0))) ** g * 2.0 ** max(g - 1.0, 0.0)
    # p = 2, gamma = 1 makes this an exact identity (additive potentials);
    # the slack absorbs the two independent quadrature routes
    assert e_sum <= c_alg * (e_mu + e_nu + cross_mu + cross_nu) * (1 + 1e-5)
    # cross terms against the product bound with q = 0
    t_mu = g / (p - 1.0 + g)
    for cross, ea, eb in ((cross_mu, e_mu, e_nu), (cross_nu, e_nu, e_mu)):
        bound = ea ** t_mu * eb ** (1.0 - t_mu)
        ratio = cross / bound
        assert math.isfinite(ratio) and ratio < 1e3


def test_residual_trace_trend(pp3, suite_quad):
    from wolfflab.families import family_density as fd
    sigma = fd(3, 1.0, 1.0, 2.3, suite_quad)
    from wolfflab import solve_minimal
    sol = solve_minimal([sigma], [0.5], None, pp3, suite_quad,
                        check_conditions=False)
    res = [st.residual for st in sol.trace]
    # nonincreasing trend over a window: each value no larger than the
    # maximum of the preceding five
    for j in range(5, len(res)):
        assert res[j] <= max(res[j - 5:j]) * (1 + 1e-12)
