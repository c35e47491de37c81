"""Distribution functions and symmetric decreasing rearrangement of gridded functions"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

import settings
from geometry import unit_ball_volume
from lemma_engine import RadialProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GriddedFunction:
    """Nonnegative values, one per interior point of a GridDomain."""
    grid: object
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("gridded function values must be finite and nonnegative")

    @property
    def h(self):
        return self.grid.h

    @property
    def mass(self):
        return math.fsum(self.values) * self.grid.cell_volume

    def radial_moment(self, l):
        """Integral of |x|^(2l) f about the coordinate origin."""
        radii_sq = np.sum(self.grid.points ** 2, axis=1)
        return math.fsum(radii_sq ** l * self.values) * self.grid.cell_volume


@dataclass(frozen=True, eq=False)
class RearrangementResult:
    profile: RadialProfile
    mass: float
    radial_moment_2l: float
    l: int
    dim: int

    @property
    def profile_mass(self):
        """n B_n times the integral of s^(n-1) phi; matches `mass` up to rebinning."""
        return self.dim * unit_ball_volume(self.dim) * self.profile.moment(self.dim - 1)


def distribution_function(f, t):
    """Volume of the superlevel set {f > t}."""
    if t < 0:
        raise ValueError(f"threshold t must be nonnegative, got {t}")
    return int(np.count_nonzero(f.values > t)) * f.grid.cell_volume


def shell_radii(count, h, n):
    """Radii r_i with B_n r_i^n = (i + 1) h^n, the outer radius of shell i."""
    volumes = (np.arange(count) + 1.0) * h ** n
    return (volumes / unit_ball_volume(n)) ** (1.0 / n)


def rearrange(f, l):
    """Sort values in decreasing order onto concentric shells of one cell volume each."""
    if f.grid.size == 0:
        raise ValueError("cannot rearrange a function on an empty domain")
    n = f.grid.dim
    radius = np.sqrt(np.sum(f.grid.points ** 2, axis=1))
    # Ties go to the cell nearer the origin
    order = np.lexsort((radius, -f.values))
    sorted_values = f.values[order]

    rho = shell_radii(sorted_values.size, f.h, n)
    profile = RadialProfile(np.concatenate(([0.0], rho)), np.concatenate((sorted_values[:1], sorted_values)))
    moment = n * unit_ball_volume(n) * profile.moment(n + 2 * l - 1)
    return RearrangementResult(profile, math.fsum(sorted_values) * f.grid.cell_volume, moment, l, n)


def rebinning_tolerance(f, result):
    """2l h R^(2l-1) mass, with R the larger of the domain and profile radii."""
    R = max(float(np.sqrt(np.sum(f.grid.points ** 2, axis=1)).max()), result.profile.support)
    return 2 * result.l * f.h * R ** (2 * result.l - 1) * result.mass


@dataclass(frozen=True)
class SlopeReport:
    tau: float
    worst_slope: float
    worst_ratio: float
    window: int
    connected: bool
    skipped: bool
    passed: bool


def gradient_norm(f):
    """Central-difference |grad f| at interior points, one-sided next to the boundary."""
    full = f.grid.embed(f.values)
    inside = f.grid.mask
    h = f.h
    squares = np.zeros(f.grid.shape)
    for axis in range(f.grid.dim):
        fwd = np.zeros(f.grid.shape)
        bwd = np.zeros(f.grid.shape)
        has_fwd = np.zeros(f.grid.shape, dtype=bool)
        has_bwd = np.zeros(f.grid.shape, dtype=bool)

        lo = [slice(None)] * f.grid.dim
        hi = [slice(None)] * f.grid.dim
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        lo, hi = tuple(lo), tuple(hi)

        step = (full[hi] - full[lo]) / h
        both = inside[hi] & inside[lo]
        fwd[lo] = step
        has_fwd[lo] = both
        bwd[hi] = step
        has_bwd[hi] = both

        central = np.where(has_fwd & has_bwd, 0.5 * (fwd + bwd), 0.0)
        one_sided = np.where(has_fwd & ~has_bwd, fwd, np.where(has_bwd & ~has_fwd, bwd, 0.0))
        squares += (central + one_sided) ** 2
    return np.sqrt(squares)[f.grid.index]


def slope_bound_check(f, tol_slope=settings.TOL_SLOPE, window=None):
    """Compare the steepest secant of the rearranged profile with tau = sup |grad f|.

    Secants span `window` shells (an even count near sqrt(N)), since lattice cells
    sharing a radius make neighbouring-shell chords flat or doubled.
    """
    connected = f.grid.is_connected()
    if not connected:
        logger.warning(f"{f.grid.label}: domain is disconnected; the slope bound assumes a connected domain")

    tau = float(gradient_norm(f).max()) if f.grid.size > 1 else 0.0
    result = rearrange(f, 1)
    s = result.profile.breakpoints[1:]
    v = result.profile.values[1:]
    if window is None:
        window = max(2, 2 * int(math.ceil(math.sqrt(v.size) / 2)))
    window = min(window, max(v.size - 1, 1))

    if tau < settings.EPS_GRAD * max(float(f.values.max()), 1.0) or v.size < 2:
        logger.info(f"{f.grid.label}: slope check skipped, tau={tau:g}")
        return SlopeReport(tau, 0.0, 0.0, window, connected, True, True)

    secants = (v[:-window] - v[window:]) / (s[window:] - s[:-window])
    worst = float(secants.max())
    ratio = worst / tau
    return SlopeReport(tau, worst, ratio, window, connected, False, ratio <= 1 + tol_slope)
