"""Nonnegative Radon measures on R^n with exact or tightly-toleranced
ball-mass queries mu(B(x, r)).

Supported classes: radial densities (tabulated on a log grid, optionally
backed by an exact callable, with power-law tails and hard cutoffs),
finite atom sets, uniform spherical shells centered at the origin, and
finite sums of these.  These admit exact or 1-D-quadrature ball masses,
which is what keeps every downstream inequality check trustworthy.

Balls are open: an atom at distance exactly r from the center does not
belong to B(x, r).
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import betainc

from .errors import (
    InfiniteEnergy,
    NegativeRadius,
    NegativeScale,
    NonRadialMeasure,
    SignError,
)
from .params import DEFAULT_QUAD, QuadratureConfig, unit_ball_volume
from .quadrature import gauss_rule, panel_nodes

_TINY = 1e-300


def cap_fraction(n: int, s, d, r):
    """Fraction of the sphere {|y| = s} lying in the open ball B(x, r),
    |x| = d.

    Closed-form cap-area formula: the cap {cos(theta) > c} with
    c = (s^2 + d^2 - r^2) / (2 s d) has normalized area I_x(a, a) where
    a = (n-1)/2 and x = (1-c)/2 = (r^2 - (s-d)^2) / (4 s d), the
    cancellation-free form of the argument.
    """
    s = np.asarray(s, float)
    d = np.asarray(d, float)
    r = np.asarray(r, float)
    denom = 4.0 * s * d
    gap = s - d
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.clip((r * r - gap * gap) / np.maximum(denom, _TINY), 0.0, 1.0)
    if n == 3:
        frac = x
    elif n == 5:
        frac = x * x * (3.0 - 2.0 * x)
    else:
        a = 0.5 * (n - 1)
        frac = betainc(a, a, x)
    # point sphere or centered query: inside iff max(s, d) < r
    return np.where(denom > 0.0, frac, 1.0 * (np.maximum(s, d) < r))


class RadonMeasure:
    """Base class; immutable after construction, queries are pure."""

    dim: int

    def ball_mass(self, center, radius):
        """mu(B(center, radius)); radius may be a scalar or an array."""
        center = _as_point(center, self.dim)
        r = _radius_array(radius)
        return _shape_like(self._ball_mass(center, r), radius)

    def radial_mass(self, d, r):
        """mu(B(x, r)) for |x| = d, broadcast over arrays.

        Only valid for radial measures (the ball mass depends on |x| alone).
        """
        if not self.is_radial:
            raise NonRadialMeasure(f"{self!r} is not radial")
        d = np.asarray(d, dtype=float)
        r = np.asarray(r, dtype=float)
        db, rb = np.broadcast_arrays(np.atleast_1d(d), np.atleast_1d(r))
        out = self._radial_mass(db.ravel(), rb.ravel()).reshape(db.shape)
        if d.ndim == 0 and r.ndim == 0:
            return float(out.reshape(-1)[0])
        return out.reshape(np.broadcast(d, r).shape)

    def centered_mass(self, r):
        """mu(B(0, r)); exact for every supported class."""
        r = np.asarray(r, dtype=float)
        out = self._centered_mass(np.atleast_1d(r).ravel().astype(float))
        return float(out[0]) if r.ndim == 0 else out.reshape(r.shape)

    def total_mass(self) -> float:
        raise NotImplementedError

    def support_radius(self) -> float:
        """Smallest R with all mass inside the closed ball of radius R; inf if none."""
        raise NotImplementedError

    @property
    def is_radial(self) -> bool:
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return self.total_mass() == 0.0

    def components(self):
        return [self]

    def scale(self, lam: float) -> "RadonMeasure":
        if lam < 0:
            raise NegativeScale(f"scale factor must be >= 0, got {lam}")
        return self._scale(float(lam))

    def breakpoints(self, d: float) -> list:
        """Radii where r -> mu(B(x, r)), |x| = d, has kinks or jumps."""
        raise NotImplementedError

    def outer_extent(self) -> float:
        """Radius beyond which no mass lives (inf for measures with tails)."""
        raise NotImplementedError

    def effective_extent(self, rel_tol: float = 1e-12) -> float:
        """Radius past which the remaining mass is below rel_tol * total;
        inf only for genuinely infinite-mass measures."""
        return self.outer_extent()

    # hooks: 1-d float arrays in, 1-d float arrays out
    def _ball_mass(self, center, r):
        raise NotImplementedError

    def _radial_mass(self, d, r):
        raise NotImplementedError

    def _centered_mass(self, r):
        raise NotImplementedError

    def _scale(self, lam):
        raise NotImplementedError


def _as_point(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"expected a point in R^{dim}, got shape {x.shape}")
    return x


def _radius_array(radius):
    r = np.atleast_1d(np.asarray(radius, dtype=float)).ravel()
    if np.any(r < 0):
        raise NegativeRadius("ball radius must be >= 0")
    return r


def _shape_like(values, like):
    if np.ndim(like) == 0:
        return float(np.asarray(values).reshape(-1)[0])
    return np.asarray(values).reshape(np.shape(like))


class Atom(RadonMeasure):
    """Point mass at an arbitrary location."""

    def __init__(self, location, weight: float):
        self.location = np.asarray(location, dtype=float).reshape(-1)
        self.dim = self.location.shape[0]
        if weight < 0:
            raise ValueError("atom weight must be >= 0")
        self.weight = float(weight)

    def __repr__(self):
        return f"Atom({self.location.tolist()}, {self.weight})"

    @property
    def is_radial(self):
        return self.weight == 0.0 or not np.any(self.location)

    def distance_from(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, float) - self.location))

    def _ball_mass(self, center, r):
        dist = self.distance_from(center)
        return self.weight * (dist < r)

    def _radial_mass(self, d, r):
        # radial atoms sit at the origin, so the distance from x is |x| = d
        return self.weight * (d < r)

    def _centered_mass(self, r):
        dist = float(np.linalg.norm(self.location))
        return self.weight * (dist < r)

    def total_mass(self):
        return self.weight

    def support_radius(self):
        return 0.0 if self.weight == 0 else float(np.linalg.norm(self.location))

    def _scale(self, lam):
        return Atom(self.location, lam * self.weight)

    def breakpoints(self, d):
        return []

    def outer_extent(self):
        return self.support_radius()


class SphericalShell(RadonMeasure):
    """Uniform surface measure on the sphere |x| = radius with given mass."""

    def __init__(self, dim: int, radius: float, total: float):
        if radius < 0:
            raise ValueError("shell radius must be >= 0")
        if total < 0:
            raise ValueError("shell mass must be >= 0")
        self.dim = int(dim)
        self.radius = float(radius)
        self.total = float(total)

    def __repr__(self):
        return f"SphericalShell(n={self.dim}, radius={self.radius}, mass={self.total})"

    @property
    def is_radial(self):
        return True

    def _ball_mass(self, center, r):
        d = float(np.linalg.norm(center))
        return self._radial_mass(np.full_like(r, d), r)

    def _radial_mass(self, d, r):
        if self.total == 0.0:
            return np.zeros_like(r)
        return self.total * cap_fraction(self.dim, self.radius, d, r)

    def _centered_mass(self, r):
        return self.total * (self.radius < r)

    def total_mass(self):
        return self.total

    def support_radius(self):
        return 0.0 if self.total == 0 else self.radius

    def _scale(self, lam):
        return SphericalShell(self.dim, self.radius, lam * self.total)

    def breakpoints(self, d):
        return [b for b in (abs(d - self.radius), d + self.radius) if b > 0]

    def outer_extent(self):
        return self.radius if self.total else 0.0


class RadialDensity(RadonMeasure):
    """Radial density f(s) (mass per unit volume) tabulated on a log grid.

    The measure is f(s) dx restricted to {lo_cut <= |x| <= cut}.  Between
    grid nodes the density is interpolated (power law when both endpoint
    values are positive, linear otherwise); below the first node it is
    constant; past the last node it follows the declared power-law tail
    coeff * s**(-exponent), or vanishes if no tail is declared.  When an
    exact callable is supplied it overrides interpolation on the whole
    support and the grid only serves as the quadrature backbone.

    interp="segment" switches to piecewise-constant densities per grid
    segment (values[i] on [s_i, s_{i+1})), the representation used for
    reconstructed Riesz measures; node ball masses are then closed-form.
    """

    def __init__(self, dim: int, grid, values, *,
                 density_fn: Optional[Callable] = None,
                 tail: Optional[tuple] = None, cut: Optional[float] = None,
                 lo_cut: float = 0.0, allow_infinite_mass: bool = False,
                 interp: str = "loglog", window_order: Optional[int] = None):
        self.dim = int(dim)
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.grid.ndim != 1 or len(self.grid) < 2 or self.grid[0] <= 0 \
                or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing and positive")
        if interp == "segment":
            if len(self.values) != len(self.grid) - 1:
                raise ValueError("segment mode needs one value per grid segment")
        elif len(self.values) != len(self.grid):
            raise ValueError("values must match grid length")
        else:
            pass
        if interp not in ("loglog", "segment"):
            raise ValueError(f"unknown interp mode {interp!r}")
        if np.any(self.values < 0):
            raise ValueError("density values must be >= 0")
        self.density_fn = density_fn
        self.tail = None if tail is None else (float(tail[0]), float(tail[1]))
        if self.tail is not None and self.tail[0] < 0:
            raise ValueError("tail coefficient must be >= 0")
        self.cut = None if cut is None else float(cut)
        self.lo_cut = float(lo_cut)
        if self.lo_cut < 0:
            raise ValueError("lo_cut must be >= 0")
        self.allow_infinite_mass = bool(allow_infinite_mass)
        self.interp = interp
        self._window_k = int(window_order or DEFAULT_QUAD.window_gauss_order)
        self._build_tables()
        if not allow_infinite_mass and math.isinf(self._total):
            raise ValueError(
                "density has infinite total mass; pass allow_infinite_mass=True")

    @classmethod
    def from_function(cls, dim, fn, quad: QuadratureConfig = DEFAULT_QUAD, *,
                      tail=None, cut=None, lo_cut=0.0, allow_infinite_mass=False):
        """Tabulate a callable density on the configured log grid."""
        grid = quad.radial_grid()
        if cut is not None:
            grid = grid[grid < cut]
            grid = np.append(grid, cut)
        if len(grid) < 2:
            hi = cut if cut is not None else quad.r_max
            grid = np.geomspace(hi * 1e-4, hi, 33)
        vals = np.maximum(np.asarray(fn(grid), dtype=float), 0.0)
        return cls(dim, grid, vals, density_fn=fn, tail=tail, cut=cut,
                   lo_cut=lo_cut, allow_infinite_mass=allow_infinite_mass,
                   window_order=quad.window_gauss_order)

    @classmethod
    def uniform_ball(cls, dim, radius=1.0, density=1.0,
                     quad: QuadratureConfig = DEFAULT_QUAD):
        return cls.from_function(
            dim, lambda s: np.full(np.shape(s), float(density)), quad, cut=radius)

    def __repr__(self):
        return (f"RadialDensity(n={self.dim}, nodes={len(self.grid)}, "
                f"cut={self.cut}, tail={self.tail}, interp={self.interp!r})")

    # -- density evaluation --------------------------------------------
    def density_at(self, s):
        """Density at radii s, honoring cuts, interpolation and tail."""
        s_in = np.asarray(s, dtype=float)
        s1 = np.atleast_1d(s_in).ravel().astype(float)
        out = np.where((s1 >= self.lo_cut) & (s1 <= self._hi),
                       self._base_density(s1), 0.0)
        if s_in.ndim == 0:
            return float(out[0])
        return out.reshape(s_in.shape)

    def _base_density(self, s):
        if self.density_fn is not None:
            return np.maximum(np.asarray(self.density_fn(s), dtype=float), 0.0)
        g, v = self.grid, self.values
        if self.interp == "segment":
            idx = np.clip(np.searchsorted(g, s, side="right") - 1, 0, len(v) - 1)
            out = v[idx].astype(float)
            above = s > g[-1]
            if np.any(above):
                if self.tail is None:
                    out[above] = 0.0
                else:
                    A, tau = self.tail
                    out[above] = A * s[above] ** (-tau)
            return out
        out = np.empty_like(s)
        below = s < g[0]
        above = s > g[-1]
        mid = ~(below | above)
        out[below] = v[0]
        if np.any(mid):
            out[mid] = self._interp_nodes(s[mid])
        if np.any(above):
            if self.tail is None:
                out[above] = 0.0
            else:
                A, tau = self.tail
                out[above] = A * s[above] ** (-tau)
        return out

    def _interp_nodes(self, s):
        g, v = self.grid, self.values
        idx = np.clip(np.searchsorted(g, s) - 1, 0, len(g) - 2)
        s0, s1 = g[idx], g[idx + 1]
        v0, v1 = v[idx], v[idx + 1]
        out = np.empty_like(s)
        pos = (v0 > 0) & (v1 > 0)
        if np.any(pos):
            alpha = np.log(v1[pos] / v0[pos]) / np.log(s1[pos] / s0[pos])
            out[pos] = v0[pos] * (s[pos] / s0[pos]) ** alpha
        lin = ~pos
        if np.any(lin):
            t = (s[lin] - s0[lin]) / (s1[lin] - s0[lin])
            out[lin] = v0[lin] + t * (v1[lin] - v0[lin])
        return out

    # -- cumulative mass tables ----------------------------------------
    def _build_tables(self):
        nwn = self.dim * unit_ball_volume(self.dim)
        self._nwn = nwn
        hi = self.cut if self.cut is not None else (
            math.inf if self.tail is not None else float(self.grid[-1]))
        self._hi = hi
        edges = [self.lo_cut]
        for s in self.grid:
            if edges[-1] < s and s < hi:
                edges.append(float(s))
        if math.isfinite(hi) and hi > edges[-1]:
            edges.append(float(hi))
        self._edges = np.asarray(edges, dtype=float)
        E = self._edges
        masses = np.zeros(len(E) - 1)
        start = 0
        if E[0] == 0.0 and len(E) > 1:
            sub = np.concatenate([[0.0], np.geomspace(E[1] * 1e-12, E[1], 13)])
            nodes, weights = panel_nodes(sub, 24)
            f = self._base_density(np.maximum(nodes.ravel(), _TINY)).reshape(nodes.shape)
            masses[0] = float(np.sum(
                f * nwn * np.maximum(nodes, 0.0) ** (self.dim - 1) * weights))
            start = 1
        if len(E) - 1 > start:
            nodes, weights = panel_nodes(E[start:], 24)
            f = self._base_density(nodes.ravel()).reshape(nodes.shape)
            masses[start:] = np.sum(f * nwn * nodes ** (self.dim - 1) * weights,
                                    axis=1)
        self._piece_mass = masses
        self._edge_vals = self._base_density(np.maximum(E, _TINY))
        self._cum = np.concatenate([[0.0], np.cumsum(masses)])
        if math.isinf(hi) and self.tail is not None and self.tail[0] > 0:
            A, tau = self.tail
            e = self.dim - 1 - tau
            a = self._edges[-1]
            if e >= -1.0:
                self._tail_total = math.inf
            else:
                self._tail_total = nwn * A * a ** (e + 1.0) / (-e - 1.0)
        else:
            self._tail_total = 0.0
        self._total = float(self._cum[-1] + self._tail_total)

    def _tail_mass_to(self, r):
        """Mass between the last edge and radii r >= last edge."""
        if self._tail_total == 0.0:
            return np.zeros_like(np.asarray(r, dtype=float))
        A, tau = self.tail
        e = self.dim - 1 - tau
        a = self._edges[-1]
        r = np.asarray(r, dtype=float)
        if e == -1.0:
            return self._nwn * A * np.log(r / a)
        return self._nwn * A * (r ** (e + 1.0) - a ** (e + 1.0)) / (e + 1.0)

    def _centered_mass(self, r):
        out = np.empty_like(r)
        edges, cum = self._edges, self._cum
        idx = np.searchsorted(edges, r, side="right") - 1
        below = idx < 0
        beyond = idx >= len(edges) - 1
        out[below] = 0.0
        if np.any(beyond):
            out[beyond] = cum[-1] + self._tail_mass_to(np.maximum(r[beyond], edges[-1]))
        mid = ~(beyond | below)
        if np.any(mid):
            i = idx[mid]
            out[mid] = cum[i] + self._partial_piece(i, r[mid])
        return out

    def _partial_piece(self, i, r):
        """Mass between edges[i] and r inside piece i (arrays).

        Closed-form interpolant shape normalized so the full piece equals
        the tabulated piece mass exactly; node masses stay exact and the
        interior deviates only by the interpolation shape error within
        one narrow segment.
        """
        a = self._edges[i]
        b = self._edges[i + 1]
        full = self._piece_mass[i]
        out = np.zeros_like(r)
        live = (full > 0) & (r > a)
        if not np.any(live):
            return out
        n = self.dim
        aa, bb, rr = a[live], b[live], r[live]
        if self.interp == "segment":
            frac = (rr ** n - aa ** n) / (bb ** n - aa ** n)
            out[live] = np.clip(frac, 0.0, 1.0) * full[live]
            return out
        fa, fb = self._edge_vals[i][live], self._edge_vals[i + 1][live]
        frac = np.empty_like(rr)
        powerlaw = (fa > 0) & (fb > 0) & (aa > 0)
        if np.any(powerlaw):
            al = np.log(fb[powerlaw] / fa[powerlaw]) / np.log(bb[powerlaw] / aa[powerlaw])
            e = al + n
            az, bz, rz = aa[powerlaw], bb[powerlaw], rr[powerlaw]
            near_log = np.abs(e) < 1e-9
            # overflow-free ratio form of (r^e - a^e) / (b^e - a^e)
            num = (rz / az) ** e - 1.0
            den = (bz / az) ** e - 1.0
            fr = np.where(near_log,
                          np.log(rz / az) / np.log(bz / az),
                          num / np.where(den != 0, den, 1.0))
            frac[powerlaw] = fr
        rest = ~powerlaw
        if np.any(rest):
            az, bz, rz = aa[rest], bb[rest], rr[rest]
            f0, f1 = fa[rest], fb[rest]
            slope = np.where(bz > az, (f1 - f0) / np.maximum(bz - az, _TINY), 0.0)

            def prim(x):
                return f0 * (x ** n - az ** n) / n + slope * (
                    (x ** (n + 1) - az ** (n + 1)) / (n + 1)
                    - az * (x ** n - az ** n) / n)

            den = prim(bz)
            frac[rest] = np.where(den > 0, prim(rz) / np.maximum(den, _TINY),
                                  (rz ** n - az ** n) / (bz ** n - az ** n))
        out[live] = np.clip(frac, 0.0, 1.0) * full[live]
        return out

    # -- off-center masses ---------------------------------------------
    def _radial_mass(self, d, r):
        out = np.zeros_like(r)
        centered = d == 0.0
        if np.any(centered):
            out[centered] = self._centered_mass(r[centered])
        off = ~centered
        if np.any(off):
            out[off] = self._offcenter_mass(d[off], r[off])
        return out

    def _ball_mass(self, center, r):
        d = float(np.linalg.norm(center))
        return self._radial_mass(np.full_like(r, d), r)

    def _offcenter_mass(self, d, r):
        # spheres with s <= r - d lie fully inside B(x, r)
        out = self._centered_mass(np.clip(r - d, 0.0, None))
        hi = self._hi
        a = np.maximum(np.abs(d - r), self.lo_cut)
        b = np.minimum(d + r, hi) if math.isfinite(hi) else d + r
        live = b > a
        if not np.any(live):
            return out
        # window quadrature resolution scales with the relative width:
        # narrow windows see a smooth low-degree integrand
        relw = (b - a) / np.maximum(b, _TINY)
        narrow = live & (relw <= 0.05)
        mid_w = live & (relw > 0.05) & (relw <= 0.5)
        wide = live & (relw > 0.5)
        for mask, rel, k in (
                (narrow, np.array([0.0, 1.0]), 10),
                (mid_w, np.array([0.0, 0.5, 1.0]), 12),
                (wide, np.array([0.0, 0.08, 0.5, 0.92, 1.0]), self._window_k)):
            if not np.any(mask):
                continue
            out[mask] += self._window_integral(a[mask], b[mask], d[mask], r[mask],
                                               rel, k)
        return out

    def _window_integral(self, aa, bb, dd, rr, rel, k):
        t, w = gauss_rule(k)
        edges = aa[:, None] + (bb - aa)[:, None] * rel[None, :]
        lo = edges[:, :-1]
        hi_e = edges[:, 1:]
        mid = 0.5 * (lo + hi_e)
        half = 0.5 * (hi_e - lo)
        nodes = (mid[:, :, None] + half[:, :, None] * t[None, None, :]).reshape(len(aa), -1)
        weights = (half[:, :, None] * w[None, None, :]).reshape(len(aa), -1)
        frac = cap_fraction(self.dim, nodes, dd[:, None], rr[:, None])
        f = self.density_at(nodes.ravel()).reshape(nodes.shape)
        return np.sum(f * self._nwn * nodes ** (self.dim - 1) * frac * weights, axis=1)

    # -- bookkeeping ----------------------------------------------------
    @property
    def is_radial(self):
        return True

    def total_mass(self):
        return self._total

    def support_radius(self):
        if self._total == 0.0:
            return 0.0
        if self._tail_total > 0:
            return math.inf
        nz = np.nonzero(self._piece_mass > 0)[0]
        return float(self._edges[nz[-1] + 1]) if len(nz) else 0.0

    def _scale(self, lam):
        if lam == 0.0:
            nvals = len(self.values)
            return RadialDensity(self.dim, self.grid, np.zeros(nvals),
                                 cut=self.cut, lo_cut=self.lo_cut,
                                 interp=self.interp, window_order=self._window_k)
        fn = None
        if self.density_fn is not None:
            base = self.density_fn
            fn = lambda s, _b=base, _l=lam: _l * np.asarray(_b(s), dtype=float)
        tail = None if self.tail is None else (lam * self.tail[0], self.tail[1])
        return RadialDensity(self.dim, self.grid, lam * self.values,
                             density_fn=fn, tail=tail, cut=self.cut,
                             lo_cut=self.lo_cut,
                             allow_infinite_mass=self.allow_infinite_mass,
                             interp=self.interp, window_order=self._window_k)

    def breakpoints(self, d):
        marks = {self.lo_cut, float(self._edges[-1])}
        if math.isfinite(self._hi):
            marks.add(self._hi)
        out = []
        for e in marks:
            out.extend([abs(d - e), d + e])
        return [b for b in out if b > 0]

    def outer_extent(self):
        if self._tail_total > 0:
            return math.inf
        return self.support_radius()

    def effective_extent(self, rel_tol: float = 1e-12):
        if self._tail_total == 0.0:
            return self.support_radius()
        if math.isinf(self._total):
            return math.inf
        A, tau = self.tail
        e = self.dim - 1 - tau
        target = rel_tol * self._total
        radius = (target * (-e - 1.0) / (self._nwn * A)) ** (1.0 / (e + 1.0))
        return max(float(self._edges[-1]), radius)


class Sum(RadonMeasure):
    """Finite sum of measures; kept flat (no nested Sum)."""

    def __init__(self, terms: Sequence[RadonMeasure]):
        flat = []
        for t in terms:
            flat.extend(t.components())
        if not flat:
            raise ValueError("Sum needs at least one term")
        dims = {t.dim for t in flat}
        if len(dims) != 1:
            raise ValueError(f"mixed dimensions in Sum: {dims}")
        self.terms = list(flat)
        self.dim = flat[0].dim

    def __repr__(self):
        return f"Sum({self.terms!r})"

    def components(self):
        return list(self.terms)

    @property
    def is_radial(self):
        return all(t.is_radial for t in self.terms)

    def _ball_mass(self, center, r):
        return sum(t._ball_mass(center, r) for t in self.terms)

    def _radial_mass(self, d, r):
        return sum(t._radial_mass(d, r) for t in self.terms)

    def _centered_mass(self, r):
        return sum(t._centered_mass(r) for t in self.terms)

    def total_mass(self):
        return float(sum(t.total_mass() for t in self.terms))

    def support_radius(self):
        live = [t for t in self.terms if t.total_mass() > 0]
        if not live:
            return 0.0
        return max(t.support_radius() for t in live)

    def _scale(self, lam):
        return Sum([t._scale(lam) for t in self.terms])

    def breakpoints(self, d):
        out = []
        for t in self.terms:
            out.extend(t.breakpoints(d))
        return out

    def outer_extent(self):
        live = [t for t in self.terms if t.total_mass() > 0]
        return max((t.outer_extent() for t in live), default=0.0)

    def effective_extent(self, rel_tol: float = 1e-12):
        live = [t for t in self.terms if t.total_mass() > 0]
        return max((t.effective_extent(rel_tol) for t in live), default=0.0)


# -- module-level operations ---------------------------------------------

def ball_mass(mu: RadonMeasure, center, radius):
    return mu.ball_mass(center, radius)


def total_mass(mu: RadonMeasure) -> float:
    return mu.total_mass()


def support_radius(mu: RadonMeasure) -> float:
    return mu.support_radius()


def scale(mu: RadonMeasure, lam: float) -> RadonMeasure:
    return mu.scale(lam)


def add(mu: RadonMeasure, nu: RadonMeasure) -> RadonMeasure:
    return Sum([mu, nu])


def zero_measure(dim: int) -> RadonMeasure:
    return Atom(np.zeros(dim), 0.0)


def dirac(dim: int, weight: float = 1.0, location=None) -> Atom:
    loc = np.zeros(dim) if location is None else np.asarray(location, float)
    return Atom(loc, weight)


def integrate_against(mu: RadonMeasure, g, quad: QuadratureConfig = DEFAULT_QUAD,
                      *, radial: bool = True) -> float:
    """Integral of g over R^n against mu.

    g takes radii when radial=True (valid for radial measures, and for
    atoms via |location| provided g is genuinely radial), or points when
    radial=False (atoms only).  Returns inf when g is infinite on a set
    of positive mass; raises SignError if g is negative on the support.
    """
    total = 0.0
    for comp in mu.components():
        if isinstance(comp, Atom):
            if comp.weight == 0.0:
                continue
            if radial:
                arg = np.atleast_1d(float(np.linalg.norm(comp.location)))
                val = float(np.asarray(g(arg), dtype=float).reshape(-1)[0])
            else:
                val = float(np.asarray(g(comp.location), dtype=float))
            _check_sign(val)
            total += comp.weight * val
        elif isinstance(comp, SphericalShell):
            if comp.total == 0.0:
                continue
            val = float(np.asarray(_radial_eval(g, np.atleast_1d(comp.radius), radial)).reshape(-1)[0])
            _check_sign(val)
            total += comp.total * val
        elif isinstance(comp, RadialDensity):
            total += _integrate_density(comp, g, quad, radial)
        else:
            raise NonRadialMeasure(f"cannot integrate against {comp!r}")
        if math.isinf(total):
            return math.inf
    return float(total)


def _radial_eval(g, s, radial):
    if not radial:
        raise NonRadialMeasure(
            "integrating a pointwise (non-radial) g against a radial "
            "component requires radial=True")
    return np.asarray(g(s), dtype=float)


def _check_sign(val):
    if np.any(np.asarray(val) < -1e-12):
        raise SignError("integrand is negative on the support")


def _integrate_density(comp: RadialDensity, g, quad, radial) -> float:
    if comp.total_mass() == 0.0:
        return 0.0
    edges = comp._edges
    work = edges[edges > 0]
    if edges[0] == 0.0 and len(work):
        head = work[0]
        inner = np.geomspace(head * 1e-12, head, 25)
        work = np.concatenate([inner[:-1], work])
    if len(work) < 2:
        return 0.0
    nodes, weights = panel_nodes(work, quad.gauss_order)
    s = nodes.ravel()
    gv = _radial_eval(g, s, radial)
    _check_sign(np.min(gv))
    f = comp.density_at(s)
    contrib = gv * f * comp._nwn * s ** (comp.dim - 1)
    bad = ~np.isfinite(contrib)
    if np.any(bad & (f > 0) & ~np.isfinite(gv)):
        return math.inf
    contrib = np.where(bad, 0.0, contrib)
    total = float(np.sum(contrib * weights.ravel()))
    # remainder below the smallest panel edge via a local power-law fit
    a0 = work[0]
    if comp.lo_cut < a0 and comp.density_at(a0 * 0.5) > 0:
        pts = np.array([a0 * 0.25, a0 * 0.5])
        y = _radial_eval(g, pts, radial) * comp.density_at(pts) * comp._nwn \
            * pts ** (comp.dim - 1)
        if np.any(~np.isfinite(y)):
            return math.inf
        if np.all(y > 0):
            expo = math.log(y[1] / y[0]) / math.log(2.0)
            if expo <= -1.0:
                return math.inf
            total += float(y[1]) * (a0 * 0.5) / (expo + 1.0)
    if comp._tail_total > 0:
        tail = _tail_quadrature(comp, g, quad, radial, float(work[-1]))
        if math.isinf(tail):
            return math.inf
        total += tail
    return float(total)


def _tail_quadrature(comp, g, quad, radial, start) -> float:
    """Integrate decade by decade until increments decay geometrically;
    extrapolate the remainder, or report divergence."""
    total = 0.0
    prev = None
    ratio = 0.0
    a = start
    for _ in range(60):
        b = a * 10.0
        nodes, weights = panel_nodes(np.geomspace(a, b, 5), quad.gauss_order)
        s = nodes.ravel()
        gv = _radial_eval(g, s, radial)
        f = comp.density_at(s)
        contrib = gv * f * comp._nwn * s ** (comp.dim - 1)
        if np.any(~np.isfinite(contrib) & (f > 0)):
            return math.inf
        inc = float(np.sum(np.where(np.isfinite(contrib), contrib, 0.0)
                           * weights.ravel()))
        total += inc
        if prev is not None and prev > 0:
            ratio = inc / prev
            if ratio >= 1.0:
                return math.inf
            if inc <= quad.rel_tol * max(total, _TINY):
                return total + (inc * ratio / (1.0 - ratio) if ratio < 1 else 0.0)
        elif prev == 0.0 and inc == 0.0:
            return total
        prev = inc
        a = b
    if prev and prev > quad.rel_tol * max(total, _TINY):
        if ratio < 0.999:
            return total + prev * ratio / (1.0 - ratio)
        return math.inf
    return total


def multiply_radial(mu: RadonMeasure, g) -> RadonMeasure:
    """Measure with density multiplied by a radial weight function g.

    g must expose eval(r) (vectorized) plus tail_coeff/tail_exp and
    center_value (RadialFunction does); the tail attributes drive the
    composed power-law tail.
    """
    out = []
    for comp in mu.components():
        if isinstance(comp, Atom):
            if comp.weight == 0.0:
                out.append(comp)
                continue
            d = float(np.linalg.norm(comp.location))
            val = g.center_value if d == 0.0 else float(np.atleast_1d(g.eval(d))[0])
            if math.isinf(val):
                raise InfiniteEnergy("weight function is infinite at an atom")
            out.append(Atom(comp.location, comp.weight * val))
        elif isinstance(comp, SphericalShell):
            val = float(np.atleast_1d(g.eval(comp.radius))[0])
            out.append(SphericalShell(comp.dim, comp.radius, comp.total * val))
        elif isinstance(comp, RadialDensity):
            out.append(_multiply_density(comp, g))
        else:
            raise NonRadialMeasure(f"cannot weight {comp!r}")
    return Sum(out) if len(out) > 1 else out[0]


def _multiply_density(comp: RadialDensity, g) -> RadialDensity:
    def fn(s, _c=comp, _g=g):
        s = np.asarray(s, dtype=float)
        return _c.density_at(s) * np.maximum(np.asarray(_g.eval(s), dtype=float), 0.0)

    ggrid = np.asarray(getattr(g, "grid", np.empty(0)), dtype=float)
    grid = np.unique(np.concatenate([comp.grid, ggrid]))
    grid = grid[grid > 0]
    if math.isfinite(comp._hi):
        grid = grid[grid <= comp._hi]
        if len(grid) == 0 or grid[-1] < comp._hi:
            grid = np.append(grid, comp._hi)
    if len(grid) < 2:
        grid = comp.grid
    tail = None
    if comp.tail is not None and not math.isfinite(comp._hi):
        gc = float(getattr(g, "tail_coeff", 0.0) or 0.0)
        ge = float(getattr(g, "tail_exp", 0.0) or 0.0)
        tail = (comp.tail[0] * gc, comp.tail[1] + ge)
    return RadialDensity(comp.dim, grid, np.maximum(fn(grid), 0.0),
                         density_fn=fn, tail=tail, cut=comp.cut,
                         lo_cut=comp.lo_cut,
                         allow_infinite_mass=comp.allow_infinite_mass,
                         window_order=comp._window_k)
