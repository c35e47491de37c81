"""Fourier-side estimates for computed eigenfunctions.

Eigenvectors are treated as compactly supported functions on the lattice; their
transforms are quadratures over the interior points. Against the discrete
volume V and moment of inertia I of the lattice domain, the pointwise bounds
0 <= f <= (2 pi)^(-n) V and |grad f| <= 2 (2 pi)^(-n) sqrt(V I) hold exactly.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from bounds import BoundInputs, theorem1_average
from eigensolver import energy_identity
from geometry import GridDomain, unit_ball_volume
from lemma_engine import LemmaInputs, lemma1_rhs, physical_eta
from rearrange import GriddedFunction, rearrange, rebinning_tolerance

logger = logging.getLogger(__name__)

INEQUALITY = "inequality"
IDENTITY = "identity"
Z_CHUNK = 1024


@dataclass(frozen=True)
class FourierSample:
    z: np.ndarray
    phi_hat: np.ndarray
    f: float
    grad_f_norm: float


@dataclass(frozen=True)
class CheckReport:
    name: str
    lhs: float
    rhs: float
    passed: bool
    tolerance: float
    kind: str = INEQUALITY
    truncation: float = None
    details: dict = field(default_factory=dict)

    @classmethod
    def inequality(cls, name, lhs, rhs, tolerance, truncation=None, **details):
        """lhs <= rhs + tolerance"""
        passed = bool(lhs <= rhs + tolerance)
        if not passed:
            logger.warning(f"{name}: {lhs:.10g} > {rhs:.10g} + {tolerance:.3g}")
        return cls(name, float(lhs), float(rhs), passed, float(tolerance), INEQUALITY, truncation, details)

    @classmethod
    def identity(cls, name, lhs, rhs, tolerance, **details):
        """|lhs - rhs| <= tolerance"""
        passed = bool(abs(lhs - rhs) <= tolerance)
        if not passed:
            logger.warning(f"{name}: |{lhs:.10g} - {rhs:.10g}| > {tolerance:.3g}")
        return cls(name, float(lhs), float(rhs), passed, float(tolerance), IDENTITY, None, details)

    @property
    def margin(self):
        """rhs / lhs for inequalities, None when lhs is not positive"""
        if self.kind != INEQUALITY or self.lhs <= 0:
            return None
        return self.rhs / self.lhs

    def to_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "truncation": self.truncation,
            **self.details,
        }


def transform_at(u, grid, z):
    """(2 pi)^(-n/2) h^n sum_x u(x) e^{i <x, z>} over the interior points of grid."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (grid.dim,):
        raise ValueError(f"z must be a point in R^{grid.dim}")
    phases = np.exp(1j * (grid.points @ z))
    return complex((2 * math.pi) ** (-grid.dim / 2) * grid.cell_volume * np.dot(np.asarray(u, dtype=float), phases))


def discrete_geometry(grid):
    """(V, I) of the union of lattice cells centred on the interior points.

    The point sum of |x - c|^2 h^n is below I by the cell self-inertia n h^(n+2) / 12 each.
    """
    points = grid.points
    inertia = float(np.sum((points - points.mean(axis=0)) ** 2)) * grid.cell_volume
    inertia += grid.size * grid.dim * grid.h ** (grid.dim + 2) / 12.0
    return grid.volume, inertia


def _require_vectors(spectrum, k):
    if not spectrum.has_vectors:
        raise ValueError(f"spectrum of {spectrum.domain} carries no eigenvectors")
    if int(k) != k or not 1 <= k <= spectrum.count:
        raise ValueError(f"k must lie in 1..{spectrum.count}, got {k}")


def _transforms(spectrum, k, zs):
    """phi_hat (k, m) and grad phi_hat (n, k, m) at the rows of zs, in centred coordinates."""
    grid = spectrum.grid
    x = grid.points - grid.points.mean(axis=0)
    u = spectrum.vectors[:, :k]
    scale = (2 * math.pi) ** (-grid.dim / 2) * grid.cell_volume

    phi_hat = np.empty((k, len(zs)), dtype=complex)
    grad = np.empty((grid.dim, k, len(zs)), dtype=complex)
    for start in range(0, len(zs), Z_CHUNK):
        chunk = slice(start, start + Z_CHUNK)
        E = np.exp(1j * (x @ zs[chunk].T))
        phi_hat[:, chunk] = scale * (u.T @ E)
        for d in range(grid.dim):
            grad[d, :, chunk] = scale * ((u * x[:, [d]]).T @ (1j * E))
    return phi_hat, grad


def sample_f(spectrum, k, zs):
    """f(z) = sum_j |phi_hat_j(z)|^2 and grad f = 2 sum_j Re(conj(phi_hat_j) grad phi_hat_j)."""
    _require_vectors(spectrum, k)
    zs = np.asarray(zs, dtype=float).reshape(-1, spectrum.grid.dim)
    phi_hat, grad = _transforms(spectrum, k, zs)
    f = np.sum(np.abs(phi_hat) ** 2, axis=0)
    grad_f = 2 * np.sum(np.real(np.conj(phi_hat)[None, :, :] * grad), axis=1)
    grad_norm = np.sqrt(np.sum(grad_f ** 2, axis=0))
    return [FourierSample(z, phi_hat[:, i], float(f[i]), float(grad_norm[i])) for i, z in enumerate(zs)]


def _relative_error(spectrum, k):
    if spectrum.error_estimates is None:
        return 0.0
    return float(np.sum(spectrum.error_estimates[:k]) / np.sum(spectrum.values[:k]))


def quadrature_tolerance(spectrum, k, dz):
    """Relative tolerance 5 (err + dz^2): eigenvector error estimate plus trapezoid step"""
    return 5.0 * (_relative_error(spectrum, k) + dz ** 2)


def check_pointwise_bounds(spectrum, k, z_samples):
    """Bessel and Cauchy-Schwarz bounds on f and |grad f| at every sampled z."""
    _require_vectors(spectrum, k)
    n = spectrum.grid.dim
    V, I = discrete_geometry(spectrum.grid)
    samples = sample_f(spectrum, k, z_samples)
    f = np.array([s.f for s in samples])
    grad = np.array([s.grad_f_norm for s in samples])

    f_bound = (2 * math.pi) ** (-n) * V
    grad_bound = physical_eta(n, V, I)
    rel = 5.0 * _relative_error(spectrum, k) + 1e-10

    reports = [
        CheckReport.inequality("f_nonnegative", -float(f.min()), 0.0, 0.0, samples=len(samples)),
        CheckReport.inequality(
            "bessel_pointwise", float(f.max()), f_bound, rel * f_bound,
            samples=len(samples), violations=int(np.count_nonzero(f > f_bound * (1 + rel))),
        ),
        CheckReport.inequality(
            "gradient_pointwise", float(grad.max()), grad_bound, rel * grad_bound,
            samples=len(samples), violations=int(np.count_nonzero(grad > grad_bound * (1 + rel))),
        ),
    ]
    logger.info(f"{spectrum.domain}: pointwise checks at {len(samples)} z, "
                f"max f {f.max():.6g} <= {f_bound:.6g}, max |grad f| {grad.max():.6g} <= {grad_bound:.6g}")
    return reports


def z_grid(n, Z, dz):
    """Symmetric lattice of step dz covering [-Z, Z]^n, as axes and as a GridDomain."""
    m = int(math.floor(Z / dz + 1e-9))
    axis = dz * np.arange(-m, m + 1)
    grid = GridDomain.lattice((2 * m + 1,) * n, dz, (-m * dz,) * n, label=f"z-grid(Z={Z:g},dz={dz:g})")
    return axis, grid


def check_global_identities(spectrum, k, Z, dz, l=None):
    """Parseval mass, energy identity, truncated Fourier moment, rearranged profile and lemma chain."""
    _require_vectors(spectrum, k)
    if not (Z > 0 and dz > 0):
        raise ValueError(f"Z and dz must be positive, got Z={Z}, dz={dz}")
    l = spectrum.l if l is None else l
    grid = spectrum.grid
    n = grid.dim
    if Z > math.pi / grid.h:
        logger.warning(f"Z={Z:g} exceeds the lattice Nyquist frequency {math.pi / grid.h:g}; f is periodic beyond it")

    axis, zgrid = z_grid(n, Z, dz)
    zs = zgrid.points
    f = np.array([s.f for s in sample_f(spectrum, k, zs)]).reshape(zgrid.shape)
    radius_sq = np.sum(zs ** 2, axis=1).reshape(zgrid.shape)
    inside = radius_sq <= Z ** 2 * (1 + 1e-12)

    def integrate(values):
        values = np.where(inside, values, 0.0)
        for _ in range(n):
            values = trapezoid(values, axis, axis=0)
        return float(values)

    sum_lambda = math.fsum(spectrum.values[:k])
    tol_q = quadrature_tolerance(spectrum, k, dz)
    mass = integrate(f)
    moment = integrate(radius_sq ** l * f)
    reports = [
        CheckReport.inequality("parseval_mass", mass, float(k), tol_q * k, truncation=k - mass, Z=Z, dz=dz),
        CheckReport.inequality("fourier_moment", moment, sum_lambda, tol_q * sum_lambda,
                               truncation=sum_lambda - moment, Z=Z, dz=dz),
    ]

    lam_sum, energy = energy_identity(spectrum, k)
    reports.append(CheckReport.identity("energy_identity", energy, lam_sum, 1e-9 * lam_sum))

    # Rearranged f on the z lattice
    sampled = GriddedFunction(zgrid, np.where(inside, f, 0.0).ravel())
    result = rearrange(sampled, l)
    rebin = rebinning_tolerance(sampled, result)
    reports.append(CheckReport.identity(
        "rearranged_mass", result.profile_mass, result.mass, zgrid.cell_volume * float(f.max()) + tol_q * k,
    ))
    reports.append(CheckReport.inequality(
        "rearranged_moment", result.radial_moment_2l, sum_lambda, tol_q * sum_lambda + rebin,
        unrearranged=sampled.radial_moment(l),
    ))

    V, I = discrete_geometry(grid)
    eta = physical_eta(n, V, I)
    psi0 = result.profile.psi0
    nbn = n * unit_ball_volume(n)
    lemma_value = nbn * lemma1_rhs(LemmaInputs(float(n), l, k / nbn, psi0, eta))
    reports.append(CheckReport.inequality("lemma_chain", lemma_value, sum_lambda, tol_q * sum_lambda,
                                          psi0=psi0, eta=eta))
    bound = k * theorem1_average(BoundInputs(n, l, V, I, k)).value
    reports.append(CheckReport.inequality("theorem1_chain", bound, lemma_value, tol_q * lemma_value,
                                          t_max=(2 * math.pi) ** (-n) * V))

    logger.info(f"{spectrum.domain}: integral of f {mass:.6g} (k={k}), lemma chain "
                f"{bound:.6g} <= {lemma_value:.6g} <= {sum_lambda:.6g}")
    return reports
