"""Moment inequality for slope-bounded decreasing profiles, its fuzzing oracle, and the
function F(t) whose monotonicity turns the profile bound into the eigenvalue bound.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from geometry import log_unit_ball_volume, unit_ball_volume

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Piecewise-linear non-increasing psi(s) >= 0 on breakpoints 0 = s_0 < ... < s_m, zero beyond s_m."""
    breakpoints: np.ndarray
    values: np.ndarray
    eta: float = math.inf

    def __post_init__(self):
        s = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "breakpoints", s)
        object.__setattr__(self, "values", v)
        if s.ndim != 1 or s.shape != v.shape or s.size < 1:
            raise ValueError("breakpoints and values must be 1-d arrays of equal, nonzero length")
        if s[0] != 0.0 or np.any(np.diff(s) <= 0):
            raise ValueError("breakpoints must start at 0 and strictly increase")
        if np.any(v < 0) or np.any(~np.isfinite(v)):
            raise ValueError("profile values must be finite and nonnegative")
        if np.any(np.diff(v) > 0):
            raise ValueError("profile values must be non-increasing")
        if np.any(self.slopes < -self.eta * (1 + 1e-12)):
            raise ValueError(f"a chord slope is steeper than -eta={-self.eta:g}")

    @property
    def psi0(self):
        return float(self.values[0])

    @property
    def support(self):
        return float(self.breakpoints[-1])

    @property
    def slopes(self):
        if self.breakpoints.size < 2:
            return np.zeros(0)
        return np.diff(self.values) / np.diff(self.breakpoints)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.interp(s, self.breakpoints, self.values)
        return np.where(s > self.support, 0.0, out)

    def moment(self, q):
        """Integral of s^q psi(s) ds, exact on every linear segment (q > -1)."""
        s, v = self.breakpoints, self.values
        if s.size < 2:
            return 0.0
        a, b = s[:-1], s[1:]
        ya, yb = v[:-1], v[1:]
        slope = (yb - ya) / (b - a)
        intercept = ya - slope * a
        first = (b ** (q + 1) - a ** (q + 1)) / (q + 1)
        second = (b ** (q + 2) - a ** (q + 2)) / (q + 2)
        return float(math.fsum(intercept * first + slope * second))


@dataclass(frozen=True)
class LemmaInputs:
    b: float
    l: int
    A: float
    psi0: float
    eta: float

    def __post_init__(self):
        if not self.b >= 1:
            raise ValueError(f"b must be at least 1, got {self.b}")
        if int(self.l) != self.l or self.l < 1:
            raise ValueError(f"l must be a positive integer, got {self.l}")
        for name in ("A", "psi0", "eta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


def _rising(b, p):
    """b (b + 2) ... (b + 2p - 2)"""
    return math.prod(b + 2.0 * i for i in range(p))


def lemma1_rhs(inputs):
    """Lower bound on the (b + 2l - 1)-th moment of psi from A, psi(0) and the slope bound."""
    b, l, A, psi0, eta = inputs.b, inputs.l, inputs.A, inputs.psi0, inputs.eta
    bA = b * A
    terms = [bA ** ((b + 2 * l) / b) * psi0 ** (-2.0 * l / b)]
    for p in range(1, l + 1):
        numerator = (l + 1 - p) * bA ** ((b + 2 * (l - p)) / b) * psi0 ** ((2 * p * b - 2 * (l - p)) / b)
        terms.append(numerator / (6.0 ** p * _rising(b, p) * eta ** (2 * p)))
    return math.fsum(terms) / (b + 2 * l)


def base_case_rhs(b, A, psi0, eta):
    """The l = 1 moment bound written out on its own."""
    return ((b * A) ** ((b + 2) / b) * psi0 ** (-2.0 / b) + A * psi0 ** 2 / (6 * eta ** 2)) / (b + 2)


def moment_integrals(profile, b, l):
    """(A, A_l) = (integral of s^(b-1) psi, integral of s^(b+2l-1) psi)"""
    if not b >= 1:
        raise ValueError(f"b must be at least 1, got {b}")
    return profile.moment(b - 1), profile.moment(b + 2 * l - 1)


def sample_admissible_profile(seed, eta, psi0, support, pieces):
    """Deterministic random profile with psi(0) = psi0, chord slopes in [-eta, 0], reaching 0 by `support`.

    Piece widths split the support by a Dirichlet draw and chord steepness is
    uniform on [0, eta]. A profile that would still be positive at `support` has
    every chord pulled toward -eta by one common factor until it lands on 0
    there; otherwise it is cut off where it first reaches 0.
    """
    if int(pieces) != pieces or pieces < 1:
        raise ValueError(f"pieces must be a positive integer, got {pieces}")
    if not (eta > 0 and psi0 > 0 and support > 0):
        raise ValueError("eta, psi0 and support must be positive")
    if psi0 > eta * support:
        raise ValueError(f"infeasible profile: psi0={psi0:g} cannot reach 0 within support={support:g} at slope {eta:g}")

    rng = np.random.default_rng(seed)
    steepness = rng.uniform(0.0, eta, size=pieces)
    widths = support * rng.dirichlet(np.ones(pieces))
    total_drop = float(steepness @ widths)
    if total_drop < psi0:
        theta = (psi0 - total_drop) / (eta * support - total_drop)
        steepness = steepness + theta * (eta - steepness)

    s, v = [0.0], [psi0]
    level = psi0
    for slope, width in zip(steepness, widths):
        drop = slope * width
        if drop >= level:
            s.append(s[-1] + level / slope)
            v.append(0.0)
            break
        level -= drop
        s.append(s[-1] + width)
        v.append(level)
    v[-1] = 0.0

    return RadialProfile(np.array(s), np.array(v), eta=eta)


def fuzz_lemma1(seeds, b_grid, l_max, eta=1.0, psi0=1.0, support=2.0, pieces=6, first_seed=0):
    """Check A_l >= lemma1_rhs on sampled profiles for every (b, l); one summary row per pair."""
    rows = {}
    for seed in range(first_seed, first_seed + seeds):
        profile = sample_admissible_profile(seed, eta, psi0, support, pieces)
        for b in b_grid:
            A = profile.moment(b - 1)
            for l in range(1, l_max + 1):
                A_l = profile.moment(b + 2 * l - 1)
                rhs = lemma1_rhs(LemmaInputs(b, l, A, profile.psi0, eta))
                row = rows.setdefault((b, l), {"b": b, "l": l, "samples": 0, "violations": 0, "min_ratio": math.inf})
                row["samples"] += 1
                row["min_ratio"] = min(row["min_ratio"], A_l / rhs)
                if A_l < rhs:
                    row["violations"] += 1
                    logger.warning(f"moment bound violated: seed={seed} b={b} l={l} A_l={A_l!r} rhs={rhs!r}")

    summary = pd.DataFrame(sorted(rows.values(), key=lambda r: (r["b"], r["l"])))
    logger.info(f"lemma fuzz: {seeds} profiles, {int(summary['violations'].sum())} violations")
    return summary


@dataclass(frozen=True)
class FProfileInputs:
    n: int
    l: int
    k: int
    V: float
    eta: float
    t: float = None

    def __post_init__(self):
        for name in ("n", "l", "k"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}")
        if not (self.V > 0 and self.eta > 0):
            raise ValueError("V and eta must be positive")
        if self.t is not None and not (0 < self.t <= self.t_max * (1 + 1e-12)):
            raise ValueError(f"t must lie in (0, {self.t_max:g}], got {self.t}")

    @property
    def t_max(self):
        """Bessel-inequality ceiling (2 pi)^(-n) V on the rearranged profile at 0"""
        return (2 * math.pi) ** (-self.n) * self.V

    def at(self, t):
        return FProfileInputs(self.n, self.l, self.k, self.V, self.eta, t)


def physical_eta(n, V, I=None):
    """Gradient bound 2 (2 pi)^(-n) sqrt(V I), or its rearrangement floor when I is unknown."""
    if I is not None:
        return 2.0 * (2 * math.pi) ** (-n) * math.sqrt(V * I)
    return (2 * math.pi) ** (-n) * unit_ball_volume(n) ** (-1.0 / n) * V ** ((n + 1.0) / n)


def _f_terms(inputs):
    """Yield (coefficient, exponent of t) for every term of F."""
    n, l, k, eta = inputs.n, inputs.l, inputs.k, inputs.eta
    log_kb = math.log(k) - log_unit_ball_volume(n)
    prefactor = n * unit_ball_volume(n) / (n + 2.0 * l)
    yield prefactor * math.exp((n + 2.0 * l) / n * log_kb), -2.0 * l / n
    for p in range(1, l + 1):
        coefficient = (l + 1 - p) / (6.0 ** p * _rising(n, p) * eta ** (2 * p))
        yield prefactor * coefficient * math.exp((n + 2.0 * l - 2 * p) / n * log_kb), (2.0 * p * n + 2 * p - 2 * l) / n


def f_profile(inputs):
    """F(t), the profile bound with psi(0) replaced by t."""
    if inputs.t is None:
        raise ValueError("t is required")
    return math.fsum(c * inputs.t ** e for c, e in _f_terms(inputs))


def f_profile_derivative(inputs):
    if inputs.t is None:
        raise ValueError("t is required")
    return math.fsum(c * e * inputs.t ** (e - 1) for c, e in _f_terms(inputs))


@dataclass(frozen=True)
class ScanVerdict:
    decreasing: bool
    derivative_negative: bool
    eta_admissible: bool
    samples: int
    worst_step: float
    t_min: float
    t_max: float


def f_profile_scan(inputs, samples=1000, decades=6):
    """Evaluate F on log-spaced t in (0, t_max] and report whether it strictly decreases.

    Monotonicity is only guaranteed when eta is at least the rearrangement floor
    from physical_eta(n, V); below it the verdict is reported but not implied.
    """
    if samples < 2:
        raise ValueError(f"samples must be at least 2, got {samples}")
    t_max = inputs.t_max
    ts = np.logspace(math.log10(t_max) - decades, math.log10(t_max), samples)
    ts[-1] = t_max
    F = np.array([f_profile(inputs.at(t)) for t in ts])
    dF = np.array([f_profile_derivative(inputs.at(t)) for t in ts])
    steps = np.diff(F)

    eta_floor = physical_eta(inputs.n, inputs.V)
    verdict = ScanVerdict(
        decreasing=bool(np.all(steps < 0)),
        derivative_negative=bool(np.all(dF < 0)),
        eta_admissible=inputs.eta >= eta_floor * (1 - 1e-12),
        samples=samples,
        worst_step=float(steps.max()),
        t_min=float(ts[0]),
        t_max=float(t_max),
    )
    if verdict.eta_admissible and not verdict.decreasing:
        logger.warning(f"F is not decreasing for n={inputs.n} l={inputs.l} k={inputs.k}: worst step {verdict.worst_step:g}")
    return verdict
