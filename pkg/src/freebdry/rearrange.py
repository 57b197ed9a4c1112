"""Equimeasurable rearrangement machinery on rasterized scalar fields.

The pipeline: a nonnegative :class:`ScalarField` sampled at the cell centers
of a rasterized domain is sorted into its one-dimensional decreasing profile
(:class:`DecreasingProfile`, the generalized inverse of the super-level-set
measure), then pushed onto the equal-area disk as a radially nonincreasing
:class:`RadialField`.  Level-set statistics -- contour length, the coarea
integral of 1/|grad|, and the |grad|^{p-1} flux -- are extracted by marching
squares and feed the verification routines:

* ``check_slope_coarea_identity``  -- profile slope vs. 1/(coarea integral),
* ``check_flux_lower_bound``       -- variational lower bound for the flux,
* ``check_profile_energy_bound``   -- profile Dirichlet energy vs. field energy,
* ``check_rearrangement_energy_factor`` -- the factor-2^{p/2} gradient bound
  for admissible fields on concave-free-boundary domains.

Gradients are plain central differences, falling back to one-sided at cells
with a missing neighbor; no boundary condition is imposed on the gradient
(the underlying integral inequalities hold for any smooth nonnegative
function).  Contour extraction mirrors values across boundary faces so level
curves never run along the boundary itself.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from . import domains
from .errors import PreconditionError
from .geometry import FIXED, FACE_FIXED, LabeledDomain, RasterGrid, rasterize

__all__ = [
    "ScalarField",
    "DecreasingProfile",
    "LevelStats",
    "RadialField",
    "distribution_function",
    "decreasing_rearrangement",
    "radial_rearrangement",
    "level_stats",
    "quantile_levels",
    "check_slope_coarea_identity",
    "check_flux_lower_bound",
    "check_profile_energy_bound",
    "check_rearrangement_energy_factor",
    "gradient_lp_norm",
    "random_admissible_field",
    "save_field_csv",
    "load_field_csv",
    "save_field_grid",
    "load_field_grid",
]


class ScalarField:
    """Nonnegative function values at the inside cell centers of a grid."""

    def __init__(self, grid: RasterGrid, values):
        vals = np.asarray(values, dtype=float)
        if vals.shape != grid.mask.shape:
            raise ValueError("values must match the grid shape")
        inside = vals[grid.mask]
        if not np.isfinite(inside).all():
            raise ValueError("field values must be finite on the mask")
        vmax = float(np.abs(inside).max()) if inside.size else 0.0
        if inside.size and inside.min() < -1e-12 * max(vmax, 1.0):
            raise ValueError("field values must be nonnegative")
        self.grid = grid
        self.values = np.where(grid.mask, np.clip(vals, 0.0, None), 0.0)
        self._grad = None
        self._ext_values = None
        self._ext_grad = None

    @classmethod
    def from_function(cls, domain: LabeledDomain, h: float, fn) -> "ScalarField":
        grid = rasterize(domain, h)
        X, Y = grid.cell_centers()
        return cls(grid, np.asarray(fn(X, Y), dtype=float))

    @classmethod
    def on_grid(cls, grid: RasterGrid, fn) -> "ScalarField":
        X, Y = grid.cell_centers()
        return cls(grid, np.asarray(fn(X, Y), dtype=float))

    # -- basic queries ------------------------------------------------------

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def area(self) -> float:
        return self.grid.area()

    def values_inside(self) -> np.ndarray:
        return self.values[self.grid.mask]

    @property
    def max_value(self) -> float:
        return float(self.values_inside().max())

    @property
    def min_value(self) -> float:
        return float(self.values_inside().min())

    def scaled(self, c: float) -> "ScalarField":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return ScalarField(self.grid, self.values * c)

    def integral(self) -> float:
        return float(self.values_inside().sum()) * self.grid.cell_area

    # -- gradient -------------------------------------------------------------

    def gradient(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell (du/dx, du/dy): central differences where both neighbors
        exist, one-sided at cells with a missing neighbor, zero if isolated."""
        if self._grad is None:
            self._grad = tuple(self._axis_derivative(ax) for ax in (1, 0))
        return self._grad

    def _axis_derivative(self, axis: int) -> np.ndarray:
        mask = self.grid.mask
        v = self.values
        h = self.grid.h
        fwd_v = np.roll(v, -1, axis=axis)
        bwd_v = np.roll(v, 1, axis=axis)
        fwd_ok = np.roll(mask, -1, axis=axis) & mask
        bwd_ok = np.roll(mask, 1, axis=axis) & mask
        # roll wraps around; kill wrapped entries
        if axis == 1:
            fwd_ok[:, -1] = False
            bwd_ok[:, 0] = False
        else:
            fwd_ok[-1, :] = False
            bwd_ok[0, :] = False
        out = np.zeros_like(v)
        both = fwd_ok & bwd_ok
        out[both] = (fwd_v[both] - bwd_v[both]) / (2.0 * h)
        fonly = fwd_ok & ~bwd_ok
        out[fonly] = (fwd_v[fonly] - v[fonly]) / h
        bonly = bwd_ok & ~fwd_ok
        out[bonly] = (v[bonly] - bwd_v[bonly]) / h
        out[~mask] = 0.0
        return out

    def grad_magnitude(self) -> np.ndarray:
        gx, gy = self.gradient()
        return np.hypot(gx, gy)

    # -- fixed-boundary trace -----------------------------------------------------

    def fixed_adjacent_values(self) -> np.ndarray:
        has_fixed = (self.grid.face_labels == FACE_FIXED).any(axis=2) & self.grid.mask
        return self.values[has_fixed]

    def fixed_trace_ok(self) -> bool:
        """Whether the field vanishes on the fixed boundary, up to the value a
        smooth function vanishing at the true boundary can take one cell in."""
        vals = self.fixed_adjacent_values()
        if vals.size == 0:
            return True
        vmax = self.max_value
        gmax = float(self.grad_magnitude()[self.grid.mask].max())
        allowance = max(1e-10 * vmax, 2.0 * self.grid.h * gmax)
        return float(np.abs(vals).max()) <= allowance


class RadialField(ScalarField):
    """Radially nonincreasing field on the equal-area disk."""

    def __init__(self, grid, values, profile: "DecreasingProfile", source_area: float):
        super().__init__(grid, values)
        self.profile = profile
        self.source_area = source_area

    @property
    def radius(self) -> float:
        return math.sqrt(self.source_area / math.pi)


# ---------------------------------------------------------------------------
# distribution function and decreasing profile
# ---------------------------------------------------------------------------

def distribution_function(field: ScalarField, t: float) -> float:
    """Measure of the strict super-level set { u > t } (cell counting)."""
    return float((field.values_inside() > t).sum()) * field.grid.cell_area


@dataclass
class DecreasingProfile:
    """One-dimensional decreasing rearrangement on [0, total_measure].

    ``levels`` holds the cell values sorted in descending order; the k-th
    value sits at measure coordinate (k + 1/2) * cell_area and the profile is
    the monotone piecewise-linear interpolant, extended by its end values.
    """

    levels: np.ndarray
    cell_area: float

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        self._breaks = (np.arange(len(self.levels)) + 0.5) * self.cell_area

    @property
    def breakpoints(self) -> np.ndarray:
        return self._breaks

    @property
    def total_measure(self) -> float:
        return len(self.levels) * self.cell_area

    def value(self, s) -> np.ndarray | float:
        out = np.interp(np.asarray(s, dtype=float), self._breaks, self.levels)
        return float(out) if np.isscalar(s) else out

    def mu(self, t: float) -> float:
        """Measure of { profile > t }; matches the field's distribution
        function exactly at the sorted-cell level."""
        count = np.searchsorted(-self.levels, -t, side="left")
        return float(count) * self.cell_area

    def slope(self, s: float, window: float | None = None) -> float:
        """Local slope at measure coordinate ``s``.

        A least-squares line is fitted to the profile over a window around
        ``s``; the default window scales like the geometric mean of the cell
        area and the total measure, which balances the cell-counting
        fluctuations of the sorted values against curvature bias.
        """
        total = self.total_measure
        if window is None:
            # the sorted values carry cell-counting (lattice shell) noise that
            # grows with the super-level measure, so widen the fit window with s
            base = math.sqrt(self.cell_area * total)
            window = base * (0.75 + 2.25 * math.sqrt(max(s, 0.0) / total))
            window = max(window, 4.0 * self.cell_area)
        lo = max(0.0, s - window)
        hi = min(total, s + window)
        if hi <= lo:
            return 0.0
        i0 = int(np.searchsorted(self._breaks, lo, side="left"))
        i1 = int(np.searchsorted(self._breaks, hi, side="right"))
        if i1 - i0 < 8:
            return (self.value(hi) - self.value(lo)) / (hi - lo)
        x = self._breaks[i0:i1]
        y = self.levels[i0:i1]
        xc = x - x.mean()
        denom = float(xc @ xc)
        if denom == 0.0:
            return 0.0
        return float(xc @ (y - y.mean())) / denom


def decreasing_rearrangement(field: ScalarField) -> DecreasingProfile:
    """Sort the cell values into the decreasing profile of the field."""
    vals = np.sort(field.values_inside())[::-1]
    return DecreasingProfile(levels=vals, cell_area=field.grid.cell_area)


def radial_rearrangement(field: ScalarField, segments: int = 128) -> RadialField:
    """Push the field onto the equal-area disk, radially nonincreasing.

    The disk value at radius r is the profile evaluated at the measure of the
    concentric disk, pi r^2, which makes the output equimeasurable with the
    source up to grid quantization.
    """
    profile = decreasing_rearrangement(field)
    A = field.area
    R = math.sqrt(A / math.pi)
    disk_domain = domains.disk(radius=R, segments=segments)
    grid = rasterize(disk_domain, field.grid.h)
    X, Y = grid.cell_centers()
    rr2 = X * X + Y * Y
    values = profile.value(math.pi * rr2)
    return RadialField(grid, np.asarray(values), profile, A)


# ---------------------------------------------------------------------------
# marching squares and level statistics
# ---------------------------------------------------------------------------

def _mirror_extended(field: ScalarField, quantity: np.ndarray) -> np.ndarray:
    """Extend a per-cell quantity one cell past the mask by mirroring: each
    outside cell adjacent to the mask gets the mean of its inside neighbors.
    Cells further out become NaN."""
    mask = field.grid.mask
    ext = np.where(mask, quantity, 0.0)
    acc = np.zeros_like(ext)
    cnt = np.zeros(mask.shape, dtype=int)
    for axis, shift in ((0, 1), (0, -1), (1, 1), (1, -1)):
        nb_val = np.roll(ext, shift, axis=axis)
        nb_in = np.roll(mask, shift, axis=axis)
        if axis == 0:
            edge = slice(0, 1) if shift == 1 else slice(-1, None)
            nb_in[edge, :] = False
        else:
            edge = slice(0, 1) if shift == 1 else slice(-1, None)
            nb_in[:, edge] = False
        take = ~mask & nb_in
        acc[take] += nb_val[take]
        cnt[take] += 1
    out = np.full(mask.shape, np.nan)
    out[mask] = quantity[mask]
    ghost = cnt > 0
    out[ghost] = acc[ghost] / cnt[ghost]
    return out


# marching-squares case table: bit k set when corner k is above the level;
# corners ordered SW(0), SE(1), NE(2), NW(3); edges S(0), E(1), N(2), W(3)
_MS_SEGMENTS = {
    1: ((3, 0),),   # SW above
    2: ((0, 1),),   # SE above
    3: ((3, 1),),   # bottom row above
    4: ((1, 2),),   # NE above
    6: ((0, 2),),   # right column above
    7: ((3, 2),),   # all but NW above
    8: ((2, 3),),   # NW above
    9: ((0, 2),),   # left column above
    11: ((1, 2),),  # all but NE above
    12: ((1, 3),),  # top row above
    13: ((0, 1),),  # all but SE above
    14: ((3, 0),),  # all but SW above
}
# saddles, disambiguated by the block-center mean: (center above, center below)
_MS_SADDLE = {
    5: ((((0, 1), (2, 3))), (((3, 0), (1, 2)))),   # SW+NE above
    10: ((((3, 0), (1, 2))), (((0, 1), (2, 3)))),  # SE+NW above
}


def _contour_segments(ext: np.ndarray, xs: np.ndarray, ys: np.ndarray,
                      level: float) -> np.ndarray:
    """Marching squares over the extended value array.

    Returns an array of segments (K, 2, 2) in physical coordinates.  Blocks
    with any NaN corner are skipped; saddle blocks are disambiguated by the
    center mean.
    """
    a = ext[:-1, :-1]   # SW
    b = ext[:-1, 1:]    # SE
    c = ext[1:, 1:]     # NE
    d = ext[1:, :-1]    # NW
    valid = np.isfinite(a) & np.isfinite(b) & np.isfinite(c) & np.isfinite(d)
    code = (
        (a > level).astype(np.int8)
        | ((b > level).astype(np.int8) << 1)
        | ((c > level).astype(np.int8) << 2)
        | ((d > level).astype(np.int8) << 3)
    )
    code[~valid] = 0

    segs = []

    def interp(v0, v1, p0, p1):
        t = (level - v0) / (v1 - v0)
        return p0 + t[:, None] * (p1 - p0)

    def edge_points(ii, jj, edge):
        """Crossing point on the given block edge for blocks (ii, jj)."""
        x0, y0 = xs[jj], ys[ii]
        x1, y1 = xs[jj + 1], ys[ii + 1]
        if edge == 0:   # S: SW-SE
            return interp(a[ii, jj], b[ii, jj],
                          np.column_stack([x0, y0]), np.column_stack([x1, y0]))
        if edge == 1:   # E: SE-NE
            return interp(b[ii, jj], c[ii, jj],
                          np.column_stack([x1, y0]), np.column_stack([x1, y1]))
        if edge == 2:   # N: NW-NE
            return interp(d[ii, jj], c[ii, jj],
                          np.column_stack([x0, y1]), np.column_stack([x1, y1]))
        # W: SW-NW
        return interp(a[ii, jj], d[ii, jj],
                      np.column_stack([x0, y0]), np.column_stack([x0, y1]))

    for case, pairs in _MS_SEGMENTS.items():
        ii, jj = np.nonzero(code == case)
        if len(ii) == 0:
            continue
        for e0, e1 in pairs:
            p0 = edge_points(ii, jj, e0)
            p1 = edge_points(ii, jj, e1)
            segs.append(np.stack([p0, p1], axis=1))

    for case, (pairs_hi, pairs_lo) in _MS_SADDLE.items():
        ii, jj = np.nonzero(code == case)
        if len(ii) == 0:
            continue
        center = 0.25 * (a[ii, jj] + b[ii, jj] + c[ii, jj] + d[ii, jj])
        for sel, pairs in ((center > level, pairs_hi), (center <= level, pairs_lo)):
            if not sel.any():
                continue
            for e0, e1 in pairs:
                p0 = edge_points(ii[sel], jj[sel], e0)
                p1 = edge_points(ii[sel], jj[sel], e1)
                segs.append(np.stack([p0, p1], axis=1))

    if not segs:
        return np.empty((0, 2, 2))
    return np.concatenate(segs, axis=0)


def _count_components(segments: np.ndarray, h: float) -> int:
    if len(segments) == 0:
        return 0
    scale = 1.0 / (1e-6 * h)
    keys = np.round(segments.reshape(-1, 2) * scale).astype(np.int64)
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    n = inv.max() + 1
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ends = inv.reshape(-1, 2)
    for u, v in ends:
        ru, rv = find(int(u)), find(int(v))
        if ru != rv:
            parent[ru] = rv
    roots = {find(int(u)) for u in ends.ravel()}
    return len(roots)


@dataclass(frozen=True)
class LevelStats:
    """Per-level contour statistics.

    ``surface``         -- total contour length S at the level,
    ``coarea_integral`` -- sum over the contour of ds / |grad u|,
    ``flux_p``          -- sum over the contour of |grad u|^{p-1} ds,
    ``components``      -- number of connected contour polylines,
    ``reliable``        -- False when |grad u| nearly vanishes somewhere on
                           the contour (near-critical level).
    """

    level: float
    p: float
    surface: float
    coarea_integral: float
    flux_p: float
    components: int
    reliable: bool


def level_stats(field: ScalarField, t: float, p: float = 2.0) -> LevelStats:
    """Extract the level-t contour and its quadrature statistics.

    ``t`` must lie strictly between the field's minimum and maximum.  The
    gradient modulus is interpolated bilinearly at segment midpoints.
    """
    vmin, vmax = field.min_value, field.max_value
    if not vmin < t < vmax:
        raise PreconditionError(
            f"level {t} is not strictly between field range [{vmin}, {vmax}]"
        )
    if field._ext_values is None:
        field._ext_values = _mirror_extended(field, field.values)
    ext = field._ext_values
    ny, nx = field.grid.mask.shape
    xs = field.grid.origin[0] + (np.arange(nx) + 0.5) * field.grid.h
    ys = field.grid.origin[1] + (np.arange(ny) + 0.5) * field.grid.h
    segments = _contour_segments(ext, xs, ys, t)
    if len(segments) == 0:
        return LevelStats(t, p, 0.0, 0.0, 0.0, 0, False)

    lengths = np.hypot(*(segments[:, 1, :] - segments[:, 0, :]).T)
    keep = lengths > 1e-14 * field.grid.h
    segments, lengths = segments[keep], lengths[keep]
    if len(segments) == 0:
        return LevelStats(t, p, 0.0, 0.0, 0.0, 0, False)

    mids = 0.5 * (segments[:, 0, :] + segments[:, 1, :])
    gmag = _bilinear_sample(field, mids)
    reliable = bool((gmag > 1e-8).all())
    gsafe = np.clip(gmag, 1e-8, None)
    surface = float(lengths.sum())
    coarea = float((lengths / gsafe).sum())
    flux = float((lengths * gsafe ** (p - 1.0)).sum())
    comps = _count_components(segments, field.grid.h)
    return LevelStats(t, p, surface, coarea, flux, comps, reliable)


def _bilinear_sample(field: ScalarField, points: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of |grad u| at arbitrary points, using the
    mirror-extended array so near-boundary samples stay defined."""
    if field._ext_grad is None:
        field._ext_grad = _mirror_extended(field, field.grad_magnitude())
    ext = field._ext_grad
    ny, nx = ext.shape
    h = field.grid.h
    fx = (points[:, 0] - field.grid.origin[0]) / h - 0.5
    fy = (points[:, 1] - field.grid.origin[1]) / h - 0.5
    j0 = np.clip(np.floor(fx).astype(int), 0, nx - 2)
    i0 = np.clip(np.floor(fy).astype(int), 0, ny - 2)
    tx = np.clip(fx - j0, 0.0, 1.0)
    ty = np.clip(fy - i0, 0.0, 1.0)
    q00 = ext[i0, j0]
    q01 = ext[i0, j0 + 1]
    q10 = ext[i0 + 1, j0]
    q11 = ext[i0 + 1, j0 + 1]
    # NaN corners (far outside) fall back to the nearest finite corner mix
    stack = np.stack([q00, q01, q10, q11])
    w = np.stack([(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty])
    bad = ~np.isfinite(stack)
    w = np.where(bad, 0.0, w)
    stack = np.where(bad, 0.0, stack)
    tot = w.sum(axis=0)
    tot[tot == 0.0] = 1.0
    return (stack * w).sum(axis=0) / tot


def quantile_levels(field: ScalarField, m: int = 64) -> np.ndarray:
    """Levels at the (k + 1/2)/m quantiles of the active (above-minimum)
    cell values, clipped away from the extremes."""
    vals = field.values_inside()
    vmin, vmax = float(vals.min()), float(vals.max())
    if vmax <= vmin:
        return np.empty(0)
    span = vmax - vmin
    active = vals[vals > vmin + 1e-12 * span]
    if active.size == 0:
        return np.empty(0)
    q = (np.arange(m) + 0.5) / m
    levels = np.quantile(active, q)
    levels = levels[(levels > vmin + 1e-9 * span) & (levels < vmax - 1e-9 * span)]
    return np.unique(levels)


# ---------------------------------------------------------------------------
# verification routines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeCoareaReport:
    entries: tuple  # (level, profile_side, coarea_side, rel_dev)
    max_rel_dev: float
    levels_used: int


def check_slope_coarea_identity(field: ScalarField, levels=None) -> SlopeCoareaReport:
    """Compare 1/|profile slope| with the contour integral of ds/|grad u|
    level by level; they agree for smooth fields by the coarea formula.

    Near-critical levels are skipped.  Returns per-level entries and the
    maximum relative deviation (0.0 when no level was usable).
    """
    if levels is None:
        levels = quantile_levels(field, 16)
    profile = decreasing_rearrangement(field)
    entries = []
    for t in np.atleast_1d(levels):
        t = float(t)
        try:
            ls = level_stats(field, t)
        except PreconditionError:
            continue
        if not ls.reliable or ls.coarea_integral <= 0.0:
            continue
        s = distribution_function(field, t)
        slope = profile.slope(s)
        if slope == 0.0:
            continue
        lhs = 1.0 / abs(slope)
        rhs = ls.coarea_integral
        entries.append((t, lhs, rhs, abs(lhs - rhs) / rhs))
    max_dev = max((e[3] for e in entries), default=0.0)
    return SlopeCoareaReport(tuple(entries), max_dev, len(entries))


def check_flux_lower_bound(field: ScalarField, t: float, p: float) -> tuple[float, float]:
    """Both sides of the per-level variational bound

        (coarea integral)^{1-p}  <=  flux_p / S^p ,

    with equality when |grad u| is constant on the contour.
    """
    if p <= 1.0:
        raise PreconditionError("the flux bound needs p > 1")
    ls = level_stats(field, t, p)
    if ls.surface <= 0.0:
        raise PreconditionError(f"level {t} has an empty contour")
    lhs = ls.coarea_integral ** (1.0 - p)
    rhs = ls.flux_p / ls.surface ** p
    return lhs, rhs


def check_profile_energy_bound(field: ScalarField, p: float,
                               n_levels: int = 96) -> tuple[float, float]:
    """Both sides of the profile-energy inequality

        int_0^{|area|} |profile'(z)|^p S(z)^p dz  <=  int |grad u|^p ,

    the left side assembled by trapezoid quadrature over quantile levels with
    S taken from the extracted contours.
    """
    if p <= 1.0:
        raise PreconditionError("the profile energy bound needs p > 1")
    levels = quantile_levels(field, n_levels)
    if levels.size == 0:
        return 0.0, gradient_lp_norm(field, p) ** p
    profile = decreasing_rearrangement(field)
    zs, integrand = [], []
    for t in levels:
        try:
            ls = level_stats(field, float(t))
        except PreconditionError:
            continue
        if not ls.reliable or ls.surface <= 0.0:
            continue
        z = distribution_function(field, float(t))
        slope = profile.slope(z)
        zs.append(z)
        integrand.append(abs(slope) ** p * ls.surface ** p)
    if len(zs) < 2:
        return 0.0, gradient_lp_norm(field, p) ** p
    order = np.argsort(zs)
    zs = np.asarray(zs)[order]
    integrand = np.asarray(integrand)[order]
    lhs = float(np.trapezoid(integrand, zs))
    rhs = gradient_lp_norm(field, p) ** p
    return lhs, rhs


def check_rearrangement_energy_factor(field: ScalarField, p: float) -> tuple[float, float]:
    """Both sides of the rearranged-gradient bound

        int |grad u*|^p  <=  2^{p/2} int |grad u|^p

    for fields vanishing on the fixed boundary of a domain whose free chain
    is concave.  Returns (left integral, right-hand bound).
    """
    from .geometry import is_concave_free_boundary

    if p <= 1.0:
        raise PreconditionError("the energy factor bound needs p > 1")
    if not field.fixed_trace_ok():
        raise PreconditionError("field does not vanish on the fixed boundary")
    report = is_concave_free_boundary(field.grid.domain)
    if not report.concave:
        raise PreconditionError("free chain is not concave with respect to the domain")
    star = radial_rearrangement(field)
    lhs = gradient_lp_norm(star, p) ** p
    rhs = 2.0 ** (0.5 * p) * gradient_lp_norm(field, p) ** p
    return lhs, rhs


def gradient_lp_norm(field: ScalarField, p: float) -> float:
    """( sum |grad u|^p h^2 )^{1/p} over the inside cells."""
    if p < 1.0:
        raise PreconditionError("gradient norm needs p >= 1")
    g = field.grad_magnitude()[field.grid.mask]
    return float((g ** p).sum() * field.grid.cell_area) ** (1.0 / p)


# ---------------------------------------------------------------------------
# random admissible fields
# ---------------------------------------------------------------------------

def random_admissible_field(domain: LabeledDomain, h: float,
                            rng: np.random.Generator,
                            n_bumps: int = 3,
                            grid: RasterGrid | None = None) -> ScalarField:
    """Sum of Gaussian bumps tapered to zero near the fixed boundary.

    The taper is a quintic smoothstep of the distance to the fixed edges, so
    the field is admissible (vanishing fixed-boundary trace) and smooth
    enough for the level-set machinery.
    """
    if grid is None:
        grid = rasterize(domain, h)
    X, Y = grid.cell_centers()
    pts = np.column_stack([X.ravel(), Y.ravel()])
    diam = domain.diameter
    vals = np.zeros(len(pts))
    for _ in range(n_bumps):
        for _try in range(50):
            c = np.array([
                rng.uniform(X.min(), X.max()),
                rng.uniform(Y.min(), Y.max()),
            ])
            if domain.contains(c[None, :])[0]:
                break
        sigma = rng.uniform(0.08, 0.25) * diam
        amp = rng.uniform(0.5, 1.5)
        r2 = ((pts - c) ** 2).sum(axis=1)
        vals += amp * np.exp(-0.5 * r2 / sigma**2)
    if domain.boundary_length(FIXED) > 0.0:
        dist = domain.distance_to_label(pts, FIXED)
        w = 0.15 * math.sqrt(domain.area)
        s = np.clip(dist / w, 0.0, 1.0)
        vals *= s**3 * (10.0 - 15.0 * s + 6.0 * s**2)
    return ScalarField(grid, vals.reshape(X.shape))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def save_field_csv(field: ScalarField, path) -> None:
    """Write (x, y, value) rows for the inside cells, row-major order."""
    X, Y = field.grid.cell_centers()
    m = field.grid.mask
    with open(path, "w") as fh:
        fh.write("x,y,value\n")
        for x, y, v in zip(X[m], Y[m], field.values[m]):
            fh.write(f"{float(x)!r},{float(y)!r},{float(v)!r}\n")


def load_field_csv(path, grid: RasterGrid) -> ScalarField:
    """Read (x, y, value) rows back onto an existing grid; positions must
    match grid cell centers."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    h = grid.h
    vals = np.zeros(grid.mask.shape)
    jj = np.round((data[:, 0] - grid.origin[0]) / h - 0.5).astype(int)
    ii = np.round((data[:, 1] - grid.origin[1]) / h - 0.5).astype(int)
    ok = (ii >= 0) & (ii < grid.mask.shape[0]) & (jj >= 0) & (jj < grid.mask.shape[1])
    if not ok.all():
        raise ValueError("field file does not match the grid")
    vals[ii, jj] = data[:, 2]
    if not grid.mask[ii, jj].all():
        raise ValueError("field file contains cells outside the grid mask")
    return ScalarField(grid, vals)


_GRID_MAGIC = b"FBGR"


def save_field_grid(field: ScalarField, path) -> None:
    """Binary dump: magic, nx, ny (int64), h, origin (float64), then the full
    row-major value array with NaN outside the mask."""
    ny, nx = field.grid.mask.shape
    arr = np.where(field.grid.mask, field.values, np.nan)
    with open(path, "wb") as fh:
        fh.write(_GRID_MAGIC)
        fh.write(struct.pack("<qq", nx, ny))
        fh.write(struct.pack("<ddd", field.grid.h, *field.grid.origin))
        fh.write(arr.astype("<f8").tobytes())


def load_field_grid(path, grid: RasterGrid) -> ScalarField:
    with open(path, "rb") as fh:
        if fh.read(4) != _GRID_MAGIC:
            raise ValueError("not a field grid dump")
        nx, ny = struct.unpack("<qq", fh.read(16))
        h, ox, oy = struct.unpack("<ddd", fh.read(24))
        if (ny, nx) != grid.mask.shape or abs(h - grid.h) > 1e-12 * grid.h:
            raise ValueError("grid dump does not match the target grid")
        if abs(ox - grid.origin[0]) > 1e-9 or abs(oy - grid.origin[1]) > 1e-9:
            raise ValueError("grid dump origin does not match the target grid")
        arr = np.frombuffer(fh.read(8 * nx * ny), dtype="<f8").reshape(ny, nx)
    vals = np.where(grid.mask, arr, 0.0)
    if not np.isfinite(vals[grid.mask]).all():
        raise ValueError("grid dump is missing values inside the mask")
    return ScalarField(grid, vals)
