import math

import numpy as np
import pytest

from wolfflab import (Atom, NegativeRadius, NegativeScale, RadialDensity,
                      SignError, SphericalShell, Sum, add, ball_mass, dirac,
                      integrate_against, scale, support_radius, total_mass,
                      zero_measure)
from wolfflab.families import family_density
from wolfflab.measure import cap_fraction

from oracles import MC_LENS_VOLUME, mc_lens_volume, sphere_intersection_volume

W3 = 4.0 * math.pi / 3.0


# -- atoms -------------------------------------------------------------------

def test_atom_open_ball_indicator():
    mu = dirac(3)
    x = np.array([0.5, 0.0, 0.0])
    assert ball_mass(mu, x, 0.7) == 1.0
    assert ball_mass(mu, x, 0.3) == 0.0
    # open ball: the boundary does not count
    assert ball_mass(mu, x, 0.5) == 0.0


def test_atom_mass_and_support():
    a = Atom(np.zeros(3), 3.5)
    assert total_mass(a) == 3.5
    assert support_radius(a) == 0.0


def test_sum_of_atoms_support():
    mu = Sum([Atom([1.0, 0, 0], 1.0), Atom([0, 4.0, 0], 2.0)])
    assert support_radius(mu) == pytest.approx(4.0)
    assert total_mass(mu) == pytest.approx(3.0)


# -- uniform ball ------------------------------------------------------------

def test_uniform_ball_centered_mass(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    for r in (0.1, 0.5, 1.0, 2.0, 50.0):
        want = W3 * min(r, 1.0) ** 3
        assert ball.centered_mass(r) == pytest.approx(want, rel=1e-13)
    assert total_mass(ball) == pytest.approx(W3, rel=1e-13)
    assert support_radius(ball) == pytest.approx(1.0)


def test_uniform_ball_off_center_vs_monte_carlo(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    got = ball_mass(ball, np.array([0.8, 0.0, 0.0]), 0.5)
    # frozen 1e7-sample Monte Carlo oracle: agree to 3 significant digits
    assert got == pytest.approx(MC_LENS_VOLUME, rel=5e-4)


def test_uniform_ball_off_center_vs_closed_form(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    for d, r in [(0.8, 0.5), (0.3, 0.9), (1.5, 1.0), (2.0, 1.5), (0.2, 1.5)]:
        got = ball_mass(ball, np.array([d, 0.0, 0.0]), r)
        want = sphere_intersection_volume(d, 1.0, r)
        assert got == pytest.approx(want, rel=2e-9, abs=1e-12)


def test_monte_carlo_oracle_consistency():
    # re-derive the frozen oracle with fewer samples; 3 sigma agreement
    est, err = mc_lens_volume(n_samples=1_000_000, seed=777)
    assert abs(est - MC_LENS_VOLUME) < 3.0 * (err + 7.6e-5)


# -- shells -------------------------------------------------------------------

def test_shell_centered_and_offcenter():
    sh = SphericalShell(3, 1.0, 2.0)
    assert sh.centered_mass(0.5) == 0.0
    assert sh.centered_mass(1.5) == 2.0
    # half of the sphere is within distance sqrt(2) of a point on it... use
    # the cap formula directly: fraction at (s=1, d=1, r) equals r^2/4
    got = ball_mass(sh, np.array([1.0, 0.0, 0.0]), 1.0)
    assert got == pytest.approx(2.0 * 0.25, rel=1e-12)


def test_cap_fraction_against_direct_sampling(rng):
    for n in (3, 4, 5):
        s, d, r = 1.3, 0.9, 1.1
        v = rng.normal(size=(200_000, n))
        v /= np.linalg.norm(v, axis=1)[:, None]
        pts = s * v
        pts[:, 0] -= d
        frac_mc = np.mean(np.linalg.norm(pts, axis=1) < r)
        frac = cap_fraction(n, s, d, r)
        assert frac == pytest.approx(frac_mc, abs=4e-3)


def test_cap_fraction_small_radius_stability():
    # r much smaller than d: the stable form must not cancel away
    frac = cap_fraction(3, 100.0, 100.0, 1e-7)
    want = (1e-7) ** 2 / (4.0 * 100.0 * 100.0)
    assert frac == pytest.approx(want, rel=1e-9)


# -- algebra -------------------------------------------------------------------

def test_scale_and_add_exact(quad, rng):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    mu = Sum([ball, Atom([0.3, 0.1, 0.0], 0.7)])
    for _ in range(100):
        lam = 10.0 ** rng.uniform(-3, 3)
        x = rng.normal(size=3)
        r = 10.0 ** rng.uniform(-2, 1)
        m1 = ball_mass(scale(mu, lam), x, r)
        m0 = ball_mass(mu, x, r)
        assert m1 == pytest.approx(lam * m0, rel=1e-13, abs=1e-300)


def test_additivity_exact(quad, rng):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    atom = Atom([0.2, 0.0, 0.4], 1.3)
    both = add(ball, atom)
    for _ in range(50):
        x = rng.normal(size=3)
        r = 10.0 ** rng.uniform(-2, 1)
        assert ball_mass(both, x, r) == pytest.approx(
            ball_mass(ball, x, r) + ball_mass(atom, x, r), rel=1e-14)


def test_ball_mass_monotone_in_radius(quad, rng):
    fam = family_density(3, 1.7, 0.8, 2.1, quad)
    for _ in range(20):
        x = rng.normal(size=3) * rng.uniform(0.1, 3.0)
        r = np.sort(10.0 ** rng.uniform(-3, 2, size=40))
        m = ball_mass(fam, x, r)
        assert np.all(np.diff(m) >= -1e-12 * np.maximum(m[1:], 1e-300))


def test_scale_to_zero(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    z = scale(ball, 0.0)
    assert total_mass(z) == 0.0
    assert ball_mass(z, np.zeros(3), 10.0) == 0.0


def test_add_two_diracs():
    two = add(dirac(3), dirac(3))
    assert ball_mass(two, np.zeros(3), 0.1) == pytest.approx(2.0)


def test_negative_guards(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    with pytest.raises(NegativeRadius):
        ball_mass(ball, np.zeros(3), -0.5)
    with pytest.raises(NegativeScale):
        scale(ball, -1.0)


def test_infinite_mass_needs_flag(quad):
    fn = lambda s: (1.0 + np.asarray(s, float)) ** (-1.0)
    with pytest.raises(ValueError):
        RadialDensity.from_function(3, fn, quad, tail=(1.0, 1.0))
    ok = RadialDensity.from_function(3, fn, quad, tail=(1.0, 1.0),
                                     allow_infinite_mass=True)
    assert math.isinf(total_mass(ok))


# -- integration -----------------------------------------------------------------

def test_integrate_atom_constant():
    mu = Atom([0.3, 0.4, 0.0], 2.0)
    val = integrate_against(mu, lambda s: np.full_like(np.asarray(s, float), 7.0))
    assert val == pytest.approx(14.0)


def test_integrate_ball_linear(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    val = integrate_against(ball, lambda s: np.asarray(s, float), quad)
    assert val == pytest.approx(math.pi, rel=1e-12)


def test_integrate_infinite_on_positive_mass(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)

    def g(s):
        s = np.asarray(s, float)
        return np.where(s < 0.5, np.inf, 1.0)

    assert math.isinf(integrate_against(ball, g, quad))


def test_integrate_sign_error(quad):
    ball = RadialDensity.uniform_ball(3, 1.0, 1.0, quad)
    with pytest.raises(SignError):
        integrate_against(ball, lambda s: -np.ones_like(np.asarray(s, float)), quad)


def test_integrate_family_against_one_matches_mass(quad):
    fam = family_density(3, 2.0, 1.5, 2.3, quad)
    val = integrate_against(fam, lambda s: np.ones_like(np.asarray(s, float)), quad)
    assert val == pytest.approx(total_mass(fam), rel=1e-9)


def test_tabulated_density_without_callable(quad):
    # table-only densities must keep exact node-level cumulative masses
    grid = np.geomspace(1e-3, 10.0, 200)
    vals = (1.0 + grid ** 2) ** (-2.0)
    tab = RadialDensity(3, grid, vals)
    fam = family_density(3, 1.0, 1.0, 2.0, quad, cut=10.0)
    # a 50-node-per-decade table is a slightly different measure than the
    # callable; interpolation error is O(h^2) ~ 3e-4
    r = np.array([0.01, 0.1, 1.0, 5.0, 10.0])
    assert np.allclose(tab.centered_mass(r), fam.centered_mass(r), rtol=1e-3)
    m = tab.centered_mass(np.sort(np.concatenate([grid, grid * 1.0371])))
    assert np.all(np.diff(m) >= -1e-15)


def test_zero_measure_helpers():
    z = zero_measure(3)
    assert total_mass(z) == 0.0
    assert z.is_zero


def test_random_offcenter_mass_vs_monte_carlo(quad):
    # randomized instances against a fresh Monte Carlo estimate, 3 sigma
    for seed in range(3):
        gen = np.random.default_rng(5000 + seed)
        a = 10.0 ** gen.uniform(-0.5, 0.5)
        b = 10.0 ** gen.uniform(-0.5, 0.5)
        c = 1.5 + gen.uniform(0.5, 1.5)
        fam = family_density(3, a, b, c, quad)
        d = 10.0 ** gen.uniform(-0.5, 0.5)
        r = 10.0 ** gen.uniform(-0.5, 0.5)
        n_mc = 2_000_000
        v = gen.normal(size=(n_mc, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        pts = v * (r * gen.uniform(size=n_mc) ** (1.0 / 3.0))[:, None]
        pts[:, 0] += d
        f_vals = a * (1.0 + (np.linalg.norm(pts, axis=1) / b) ** 2) ** (-c)
        vol = 4.0 / 3.0 * math.pi * r ** 3
        est = vol * float(np.mean(f_vals))
        sd = vol * float(np.std(f_vals)) / math.sqrt(n_mc)
        got = ball_mass(fam, np.array([d, 0.0, 0.0]), r)
        assert abs(got - est) < 3.0 * sd + 1e-12
