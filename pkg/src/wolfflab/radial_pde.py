"""Radial profiles and the exact (quadrature-level) solver for
-Delta_p u = nu on R^n with radial measure data and decay at infinity.

The solution operator is the closed-form radial integration

    u(r) = int_r^inf ( nu(B(0, s)) / (n omega_n s^{n-1}) )^{1/(p-1)} ds,

the unique radial p-superharmonic potential with Riesz measure nu and
liminf 0 at infinity.  Because ball masses are exact, the only error is
1-D quadrature error between grid nodes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DivergentTail, NonMonotoneProfile, NonRadialMeasure
from .measure import RadialDensity, RadonMeasure
from .params import DEFAULT_QUAD, ProblemParams, QuadratureConfig, validate
from .quadrature import panel_nodes

_TINY = 1e-300


class RadialFunction:
    """Radial profile on a log grid with an analytic power-law tail.

    values hold u(r_i); beyond the last node u(r) = tail_coeff * r**(-tail_exp);
    center_value is u(0+) (math.inf allowed).  deriv, when present, holds
    du/dr at the nodes (exact for solver output).
    """

    def __init__(self, grid, values, tail_coeff=0.0, tail_exp=0.0,
                 center_value=None, deriv=None, mass_fn=None, mass_pow=None,
                 smooth=False):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise ValueError("grid and values must be matching 1-D arrays")
        if np.any(self.values < 0):
            raise ValueError("profile values must be >= 0")
        self.tail_coeff = float(tail_coeff)
        self.tail_exp = float(tail_exp)
        self.center_value = float(values[0]) if center_value is None else float(center_value)
        self.deriv = None if deriv is None else np.asarray(deriv, dtype=float)
        # solver output: exact |u'|(s) = (mass_fn(s)/(n w_n s^{n-1}))^{1/(p-1)}
        self._mass_fn = mass_fn
        self._mass_pow = mass_pow  # (n, p, n*omega_n)
        with np.errstate(divide="ignore"):
            self._lng = np.log(self.grid)
            self._lnv = np.where(self.values > 0, np.log(np.maximum(self.values, _TINY)), -np.inf)
        # monotone cubic interpolant in log-log space for profiles without
        # stored derivatives (tabulated potentials)
        self._pchip = None
        if smooth and self.deriv is None and len(self.grid) > 2 \
                and np.all(self.values > 0):
            from scipy.interpolate import PchipInterpolator
            self._pchip = PchipInterpolator(self._lng, self._lnv,
                                            extrapolate=False)

    def __repr__(self):
        return (f"RadialFunction(nodes={len(self.grid)}, u(0)={self.center_value:.6g}, "
                f"tail={self.tail_coeff:.6g}*r^-{self.tail_exp:.6g})")

    # -- evaluation ------------------------------------------------------
    def eval(self, r):
        """Monotone log-log interpolation on the grid, analytic tail beyond,
        center value at 0."""
        r_in = np.asarray(r, dtype=float)
        r1 = np.atleast_1d(r_in).ravel().astype(float)
        out = np.empty_like(r1)
        g, v = self.grid, self.values
        at0 = r1 == 0.0
        out[at0] = self.center_value
        low = (r1 > 0) & (r1 < g[0])
        if np.any(low):
            out[low] = self._eval_below(r1[low])
        high = r1 > g[-1]
        if np.any(high):
            out[high] = self.tail_coeff * r1[high] ** (-self.tail_exp) \
                if self.tail_coeff else 0.0
        mid = ~(at0 | low | high)
        if np.any(mid):
            out[mid] = self._eval_grid(r1[mid])
        if r_in.ndim == 0:
            return float(out[0])
        return out.reshape(r_in.shape)

    def _eval_grid(self, r):
        g, v = self.grid, self.values
        idx = np.clip(np.searchsorted(g, r) - 1, 0, len(g) - 2)
        v0, v1 = v[idx], v[idx + 1]
        out = np.empty_like(r)
        if self._pchip is not None:
            vals = np.exp(self._pchip(np.log(r)))
            hit = np.clip(np.searchsorted(g, r), 0, len(g) - 1)
            on_node = g[hit] == r
            vals[on_node] = v[hit[on_node]]
            return vals
        pos = (v0 > 0) & (v1 > 0)
        if np.any(pos):
            i = idx[pos]
            h = self._lng[i + 1] - self._lng[i]
            t = (np.log(r[pos]) - self._lng[i]) / h
            y0, y1 = self._lnv[i], self._lnv[i + 1]
            if self.deriv is not None:
                # cubic Hermite in log-log with exact node slopes
                s0 = g[i] * self.deriv[i] / np.maximum(v[i], _TINY) * h
                s1 = g[i + 1] * self.deriv[i + 1] / np.maximum(v[i + 1], _TINY) * h
                t2 = t * t
                t3 = t2 * t
                val = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * s0 \
                    + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * s1
                # keep the interpolant between the node values
                val = np.clip(val, np.minimum(y0, y1), np.maximum(y0, y1))
                out[pos] = np.exp(val)
            else:
                out[pos] = np.exp(y0 * (1 - t) + y1 * t)
        lin = ~pos
        if np.any(lin):
            i = idx[lin]
            t = (r[lin] - g[i]) / (g[i + 1] - g[i])
            out[lin] = v0[lin] * (1 - t) + v1[lin] * t
        # stored node values verbatim
        hit = np.searchsorted(g, r)
        hit = np.clip(hit, 0, len(g) - 1)
        on_node = g[hit] == r
        out[on_node] = v[hit[on_node]]
        return out

    def _eval_below(self, r):
        g, v = self.grid, self.values
        if math.isinf(self.center_value):
            if len(g) > 1 and v[0] > 0 and v[1] > 0:
                alpha = (self._lnv[1] - self._lnv[0]) / (self._lng[1] - self._lng[0])
                return v[0] * (r / g[0]) ** alpha
            return np.full_like(r, math.inf)
        # linear ramp between the center value and the first node
        t = r / g[0]
        return self.center_value * (1 - t) + v[0] * t

    def deriv_at(self, r):
        """du/dr; exact for solver output (ball-mass formula), otherwise
        log-log interpolation of the stored or differenced node slopes."""
        r_in = np.asarray(r, dtype=float)
        r1 = np.atleast_1d(r_in).ravel().astype(float)
        if self._mass_fn is not None:
            n, p, nwn = self._mass_pow
            m = np.maximum(self._mass_fn(r1), 0.0)
            out = -((m / (nwn * r1 ** (n - 1))) ** (1.0 / (p - 1.0)))
        else:
            d = self.deriv if self.deriv is not None else np.gradient(self.values, self.grid)
            out = -_loglog_interp(self.grid, np.abs(d), r1)
            high = r1 > self.grid[-1]
            if np.any(high):
                out[high] = -self.tail_coeff * self.tail_exp * r1[high] ** (-self.tail_exp - 1.0) \
                    if self.tail_coeff else 0.0
        if r_in.ndim == 0:
            return float(out[0])
        return out.reshape(r_in.shape)

    # -- algebra ---------------------------------------------------------
    def __pow__(self, e: float):
        vals = self.values ** e
        deriv = None
        if self.deriv is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                deriv = np.where(self.values > 0,
                                 e * self.values ** (e - 1.0) * self.deriv, 0.0)
        center = self.center_value ** e if self.center_value > 0 else (
            0.0 if e > 0 else math.inf)
        tail_c = self.tail_coeff ** e if self.tail_coeff > 0 else 0.0
        return RadialFunction(self.grid, vals, tail_c, self.tail_exp * e,
                              center, deriv)

    def scaled(self, c: float):
        deriv = None if self.deriv is None else c * self.deriv
        return RadialFunction(self.grid, c * self.values, c * self.tail_coeff,
                              self.tail_exp, c * self.center_value, deriv)

    @property
    def sup_norm(self):
        m = float(np.max(self.values)) if len(self.values) else 0.0
        return max(self.center_value, m)

    def is_nonincreasing(self, slack=1e-10):
        dv = np.diff(self.values)
        scale = np.maximum(self.values[:-1], _TINY)
        return bool(np.all(dv <= slack * scale + 1e-300))


def nodewise_max(funcs) -> RadialFunction:
    """Pointwise max of profiles sharing one grid; the tail follows the
    profile that dominates at infinity."""
    funcs = list(funcs)
    g = funcs[0].grid
    for f in funcs[1:]:
        if len(f.grid) != len(g) or not np.allclose(f.grid, g):
            raise ValueError("nodewise_max needs profiles on a shared grid")
    vals = np.max([f.values for f in funcs], axis=0)
    probe = g[-1] * 10.0
    tail_vals = [f.tail_coeff * probe ** (-f.tail_exp) for f in funcs]
    best = int(np.argmax(tail_vals))
    center = max(f.center_value for f in funcs)
    winner = np.argmax([f.values for f in funcs], axis=0)
    deriv = None
    if all(f.deriv is not None for f in funcs):
        stack = np.stack([f.deriv for f in funcs])
        deriv = stack[winner, np.arange(len(g))]
    return RadialFunction(g, vals, funcs[best].tail_coeff, funcs[best].tail_exp,
                          center, deriv)


def zero_profile(quad: QuadratureConfig = DEFAULT_QUAD) -> RadialFunction:
    g = quad.radial_grid()
    return RadialFunction(g, np.zeros_like(g), 0.0, 1.0, 0.0, np.zeros_like(g))


def _loglog_interp(xs, ys, x):
    """Positive-data log-log interpolation, extrapolating the end slopes
    beyond the grid; linear fallback when the data carries zeros."""
    if np.all(ys > 0):
        lx, ly = np.log(xs), np.log(ys)
        lq = np.log(np.maximum(x, _TINY))
        out = np.exp(np.interp(lq, lx, ly))
        lo = lq < lx[0]
        if np.any(lo):
            slope = (ly[1] - ly[0]) / (lx[1] - lx[0])
            out[lo] = np.exp(ly[0] + slope * (lq[lo] - lx[0]))
        hi = lq > lx[-1]
        if np.any(hi):
            slope = (ly[-1] - ly[-2]) / (lx[-1] - lx[-2])
            out[hi] = np.exp(ly[-1] + slope * (lq[hi] - lx[-1]))
        return out
    return np.interp(x, xs, ys)


def eval_profile(u: RadialFunction, r):
    return u.eval(r)


def solve_radial_p_laplace(nu: RadonMeasure, params: ProblemParams,
                           quad: QuadratureConfig = DEFAULT_QUAD,
                           grid=None) -> RadialFunction:
    """Radial p-superharmonic potential of a radial measure."""
    validate(params)
    if not nu.is_radial:
        raise NonRadialMeasure("the radial solver needs a radial measure")
    n, p = params.n, params.p
    nwn = params.sphere_area
    ipm1 = 1.0 / (p - 1.0)

    if grid is None:
        grid = quad.radial_grid()
    grid = np.asarray(grid, dtype=float)
    breaks = [b for b in nu.breakpoints(0.0) if grid[0] < b < grid[-1]]
    if breaks:
        grid = np.unique(np.concatenate([grid, breaks]))

    if nu.total_mass() == 0.0:
        z = np.zeros_like(grid)
        return RadialFunction(grid, z, 0.0, params.tail_exp, 0.0, z)

    def h(s):
        m = nu.centered_mass(s)
        return (np.maximum(m, 0.0) / (nwn * s ** (n - 1))) ** ipm1

    # per-segment Gauss integrals of h
    nodes, weights = panel_nodes(grid, quad.gauss_order)
    hv = h(nodes.ravel()).reshape(nodes.shape)
    seg = np.sum(hv * weights, axis=1)

    # tail beyond the last node
    m_end = float(nu.centered_mass(np.array([grid[-1]]))[0])
    total = nu.total_mass()
    if math.isinf(total):
        tail_val, tail_coeff, tail_exp = _divergent_mass_tail(nu, params, quad, grid[-1])
    else:
        # constant ball mass beyond the grid; mass still outside r_max is
        # negligible by construction of finite-mass tails
        tail_exp = params.tail_exp
        tail_coeff = (m_end / nwn) ** ipm1 * (p - 1.0) / (n - p)
        tail_val = tail_coeff * grid[-1] ** (-tail_exp)

    u = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]]) + tail_val
    deriv = -h(grid)

    center = _center_value(h, grid[0], u[0])
    return RadialFunction(grid, u, tail_coeff, tail_exp, center, deriv,
                          mass_fn=nu.centered_mass, mass_pow=(n, p, nwn))


def _divergent_mass_tail(nu, params, quad, r_end):
    """Tail handling for flagged infinite-mass measures: numeric panels to
    a far horizon plus an analytic power remainder; DivergentTail when the
    integral cannot converge."""
    n, p = params.n, params.p
    nwn = params.sphere_area
    ipm1 = 1.0 / (p - 1.0)

    def h(s):
        m = nu.centered_mass(s)
        return (np.maximum(m, 0.0) / (nwn * s ** (n - 1))) ** ipm1

    h1 = float(h(np.array([r_end * 1e6]))[0])
    h2 = float(h(np.array([r_end * 1e7]))[0])
    if h1 <= 0:
        return 0.0, 0.0, params.tail_exp
    expo = math.log(h2 / h1) / math.log(10.0)
    if expo >= -1.0 - 1e-9:
        raise DivergentTail("measure grows too fast at infinity for decay at infinity")
    horizon = r_end * 1e8
    edges = np.geomspace(r_end, horizon, 65)
    nodes, weights = panel_nodes(edges, quad.gauss_order)
    val = float(np.sum(h(nodes.ravel()).reshape(nodes.shape) * weights))
    h_end = float(h(np.array([horizon]))[0])
    remainder = h_end * horizon / (-expo - 1.0)
    tail_exp = -(expo + 1.0)
    tail_coeff = remainder * horizon ** tail_exp
    return val + remainder, tail_coeff, tail_exp


def _center_value(h, r0, u0):
    pts = np.array([r0 * 0.25, r0 * 0.5])
    hv = h(pts)
    if hv[1] <= 0:
        return u0
    if hv[0] <= 0:
        # support edge inside (0, r0); resolve with fine panels
        edges = np.geomspace(r0 * 1e-9, r0, 40)
        nodes, weights = panel_nodes(edges, 16)
        return u0 + float(np.sum(h(nodes.ravel()).reshape(nodes.shape) * weights))
    kappa = math.log(hv[1] / hv[0]) / math.log(2.0)
    if kappa <= -1.0:
        return math.inf
    h0 = float(h(np.array([r0]))[0])
    return u0 + h0 * r0 / (kappa + 1.0)


def riesz_measure_of(u: RadialFunction, params: ProblemParams) -> RadonMeasure:
    """Radial measure with ball mass n omega_n r^{n-1} |u'(r)|^{p-1},
    reconstructed so node ball masses are exact."""
    validate(params)
    if not u.is_nonincreasing(slack=1e-9):
        raise NonMonotoneProfile("profile must be nonincreasing")
    n, p = params.n, params.p
    nwn = params.sphere_area
    wn = params.unit_ball_volume
    g = u.grid
    d = u.deriv if u.deriv is not None else np.gradient(u.values, g)
    slope = np.maximum(-d, 0.0)
    mass = nwn * g ** (n - 1) * slope ** (p - 1.0)
    mass = np.maximum.accumulate(mass)

    # piecewise-constant densities per segment reproduce node masses exactly
    grid = np.concatenate([[g[0] * 1e-6], g])
    seg_vals = np.empty(len(grid) - 1)
    seg_vals[0] = mass[0] / (wn * g[0] ** n)  # constant core below the first node
    dm = np.diff(mass)
    dvol = wn * (g[1:] ** n - g[:-1] ** n)
    seg_vals[1:] = dm / dvol

    # Potential-type tails u ~ A r^{-(n-p)/(p-1)} have constant ball mass
    # beyond the grid (no density there).  Slower decay means the ball mass
    # keeps growing like r^eta: reconstruct the power-law density tail.
    tail = None
    allow_inf = False
    if u.tail_coeff > 0:
        eta = n - 1 - (u.tail_exp + 1.0) * (p - 1.0)
        if eta > 1e-12:
            m_inf = nwn * (u.tail_coeff * u.tail_exp) ** (p - 1.0)
            tail = (m_inf * eta / nwn, n - eta)
            allow_inf = True
    return RadialDensity(params.n, grid, np.maximum(seg_vals, 0.0),
                         interp="segment", tail=tail,
                         allow_infinite_mass=allow_inf)


def riesz_ball_mass(u: RadialFunction, params: ProblemParams, r=None):
    """Ball-mass function n omega_n r^{n-1}|u'|^{p-1} at the grid nodes
    (or given radii) without building a measure."""
    validate(params)
    g = u.grid if r is None else np.asarray(r, dtype=float)
    if u.deriv is not None and r is None:
        slope = np.maximum(-u.deriv, 0.0)
    else:
        slope = np.maximum(-u.deriv_at(g), 0.0)
    return params.sphere_area * g ** (params.n - 1) * slope ** (params.p - 1.0)


def dirichlet_energy(u: RadialFunction, params: ProblemParams,
                     weight_gamma: float = 1.0,
                     quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """int |u'|^p u^{gamma-1} n omega_n r^{n-1} dr; inf when divergent."""
    validate(params)
    if weight_gamma < 0:
        raise ValueError("weight_gamma must be >= 0")
    if not u.is_nonincreasing(slack=1e-9):
        raise NonMonotoneProfile("profile must be nonincreasing")
    n, p, gam = params.n, params.p, float(weight_gamma)
    nwn = params.sphere_area
    g = u.grid
    if not np.any(u.values > 0):
        return 0.0

    def integrand(s):
        du = np.abs(u.deriv_at(s))
        uv = u.eval(s)
        out = np.zeros_like(s)
        live = du > 0
        if gam == 1.0:
            out[live] = du[live] ** p
        else:
            ok = live & (uv > 0)
            out[ok] = du[ok] ** p * uv[ok] ** (gam - 1.0)
            if np.any(live & (uv <= 0)):
                out[live & (uv <= 0)] = math.inf
        return out * nwn * s ** (n - 1)

    nodes, weights = panel_nodes(g, quad.gauss_order)
    vals = integrand(nodes.ravel()).reshape(nodes.shape)
    if np.any(np.isinf(vals)):
        return math.inf
    total = float(np.sum(vals * weights))

    # head: power-law fit below the first node
    pts = np.array([g[0] * 0.25, g[0] * 0.5])
    y = integrand(pts)
    if np.any(np.isinf(y)):
        return math.inf
    if np.all(y > 0):
        expo = math.log(y[1] / y[0]) / math.log(2.0)
        if expo <= -1.0:
            return math.inf
        total += float(y[1]) * (g[0] * 0.5) / (expo + 1.0)

    # tail: closed form from the analytic profile tail
    if u.tail_coeff > 0:
        A, tau = u.tail_coeff, u.tail_exp
        coeff = (A * tau) ** p * (A ** (gam - 1.0)) * nwn
        e = -p * (tau + 1.0) - tau * (gam - 1.0) + (n - 1)
        if e >= -1.0:
            return math.inf
        total += coeff * g[-1] ** (e + 1.0) / (-e - 1.0)
    return total
