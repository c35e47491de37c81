"""Dirichlet eigenvalues of (-Laplacian)^l on lattice domains, and reference spectra.

The clamped conditions u = du/dnu = ... = 0 are encoded by zero extension: a grid
function is extended by zero to a box padded by l cells, the standard
(2n+1)-point negative Laplacian is applied l times and the result is restricted
to the interior. The induced matrix is P L^l P^T, symmetric positive definite.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import splu
from scipy.special import jn_zeros

import settings

logger = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Raised when the iterative eigensolver hits its iteration cap."""

    def __init__(self, message, residuals=()):
        super().__init__(message)
        self.residuals = tuple(float(r) for r in residuals)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues of one (domain, l, h) solve.

    Eigenvectors, when present, are columns orthonormal in the h^n-weighted
    inner product, one row per interior point of `grid`.
    """
    l: int
    values: np.ndarray
    h: float
    domain: str
    vectors: np.ndarray = field(default=None, repr=False)
    grid: object = field(default=None, repr=False)
    extrapolated: bool = False
    error_estimates: np.ndarray = None
    method: str = "dense"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("a spectrum needs at least one eigenvalue")
        if np.any(values <= 0):
            raise ValueError(f"eigenvalues must be positive, got min {values.min():g}")
        if np.any(np.diff(values) < -1e-12 * np.abs(values[1:])):
            raise ValueError("eigenvalues must be ascending")
        if self.error_estimates is not None:
            object.__setattr__(self, "error_estimates", np.asarray(self.error_estimates, dtype=float))
        if self.vectors is not None and self.vectors.shape[1] != values.size:
            raise ValueError(f"{self.vectors.shape[1]} eigenvectors for {values.size} eigenvalues")

    @property
    def count(self):
        return int(self.values.size)

    @property
    def has_vectors(self):
        return self.vectors is not None and self.grid is not None

    def gram(self):
        """Gram matrix of the eigenvectors in the h^n-weighted inner product."""
        if not self.has_vectors:
            raise ValueError(f"spectrum of {self.domain} carries no eigenvectors")
        return self.vectors.T @ self.vectors * self.grid.cell_volume

    def multiplicities(self, rtol=1e-8):
        """Clusters of equal eigenvalues as (value, multiplicity) pairs, not merged in `values`."""
        groups = []
        for value in self.values:
            if groups and abs(value - groups[-1][0]) <= rtol * value:
                groups[-1][1] += 1
            else:
                groups.append([float(value), 1])
        return [tuple(g) for g in groups]

    def to_dict(self):
        return {
            "domain": self.domain,
            "l": self.l,
            "h": self.h,
            "values": self.values.tolist(),
            "extrapolated": self.extrapolated,
            "error_estimates": None if self.error_estimates is None else self.error_estimates.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["l"]), data["values"], float(data["h"]), data["domain"],
                   extrapolated=bool(data.get("extrapolated", False)),
                   error_estimates=data.get("error_estimates"), method="loaded")


def _axis_slices(dim, axis):
    lo = [slice(None)] * dim
    hi = [slice(None)] * dim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    return tuple(lo), tuple(hi)


def _negative_laplacian(u, dim, h):
    """(2n+1)-point -Laplacian on the leading `dim` axes, zero outside the array."""
    out = 2.0 * dim * u
    for axis in range(dim):
        lo, hi = _axis_slices(dim, axis)
        out[hi] -= u[lo]
        out[lo] -= u[hi]
    return out / h ** 2


def apply_polyharmonic(v, grid, l):
    """Matrix-free P L^l P^T v for v of shape (N,) or (N, m)."""
    if int(l) != l or l < 1:
        raise ValueError(f"l must be a positive integer, got {l}")
    v = np.asarray(v, dtype=float)
    if v.shape[0] != grid.size:
        raise ValueError(f"expected {grid.size} interior values, got {v.shape[0]}")

    padded_shape = tuple(s + 2 * l for s in grid.shape) + v.shape[1:]
    inner = tuple(slice(l, l + s) for s in grid.shape)
    full = np.zeros(padded_shape)
    full[inner][grid.index] = v
    for _ in range(l):
        full = _negative_laplacian(full, grid.dim, grid.h)
    return full[inner][grid.index]


def _padded_laplacian(shape, h):
    """Sparse -Laplacian of the full lattice with the given shape, C-order unknowns."""
    ones = [sp.identity(m, format="csr") for m in shape]
    total = None
    for axis, m in enumerate(shape):
        second = sp.diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1], format="csr")
        factors = ones[:axis] + [second] + ones[axis + 1:]
        term = factors[0]
        for factor in factors[1:]:
            term = sp.kron(term, factor, format="csr")
        total = term if total is None else total + term
    return total / h ** 2


def polyharmonic_matrix(grid, l):
    """Sparse assembly of P L^l P^T, equal to apply_polyharmonic column by column."""
    padded_shape = tuple(s + 2 * l for s in grid.shape)
    laplacian = _padded_laplacian(padded_shape, grid.h)
    power = laplacian
    for _ in range(l - 1):
        power = power @ laplacian

    padded_mask = np.zeros(padded_shape, dtype=bool)
    padded_mask[tuple(slice(l, l + s) for s in grid.shape)] = grid.mask
    keep = np.flatnonzero(padded_mask)
    return power.tocsr()[keep][:, keep].tocsc()


def _block_lanczos(matrix, count, block, seed, tol, max_steps):
    """Block Lanczos with full reorthogonalization on the inverse of an SPD matrix.

    Returns (eigenvalues, orthonormal Ritz vectors) for the `count` smallest
    eigenvalues of `matrix`.
    """
    size = matrix.shape[0]
    lu = splu(matrix.tocsc())
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((size, block)))

    basis = [Q]
    prev_B = None
    T = np.zeros((0, 0))
    residuals = np.full(count, np.inf)
    for step in range(max_steps):
        W = lu.solve(Q)
        alpha = Q.T @ W
        V = np.hstack(basis)
        for _ in range(2):
            W -= V @ (V.T @ W)
        Q_next, B = np.linalg.qr(W)

        m = T.shape[0]
        grown = np.zeros((m + block, m + block))
        grown[:m, :m] = T
        grown[m:, m:] = 0.5 * (alpha + alpha.T)
        if m:
            grown[m - block:m, m:] = prev_B.T
            grown[m:, m - block:m] = prev_B
        T = grown

        theta, S = scipy.linalg.eigh(T)
        top = np.argsort(theta)[::-1][:count]
        exhausted = V.shape[1] + block >= size or np.min(np.abs(np.diag(B))) < 1e-14 * np.abs(theta).max()
        if T.shape[0] >= count:
            residuals = np.linalg.norm(B @ S[-block:, top], axis=0)
            if np.all(residuals <= tol * np.abs(theta[top])) or exhausted:
                X = V @ S[:, top]
                logger.info(f"block Lanczos converged after {step + 1} steps ({V.shape[1]} basis vectors)")
                return 1.0 / theta[top], X
        if exhausted:
            break

        basis.append(Q_next)
        Q, prev_B = Q_next, B

    raise SolverError(
        f"block Lanczos did not converge in {max_steps} steps for {count} eigenvalues",
        residuals=residuals,
    )


def smallest_eigenvalues(grid, l, count, want_vectors=False):
    """The `count` smallest eigenvalues of the zero-extension operator on `grid`."""
    if grid.dim > 2:
        raise ValueError(f"eigensolves are supported in 1 and 2 dimensions, got n={grid.dim}")
    if int(count) != count or count < 1:
        raise ValueError(f"count must be a positive integer, got {count}")
    if count > grid.size:
        raise ValueError(f"count={count} exceeds the {grid.size} interior points of {grid.label}")

    matrix = polyharmonic_matrix(grid, l)
    if grid.size <= settings.DENSE_LIMIT:
        values, vectors = scipy.linalg.eigh(matrix.toarray(), subset_by_index=[0, count - 1])
        method = "dense"
    else:
        block = max(settings.LANCZOS_BLOCK, 1)
        inverse_values, vectors = _block_lanczos(
            matrix, count, block, settings.LANCZOS_SEED, settings.LANCZOS_TOL, settings.LANCZOS_MAX_STEPS
        )
        # Rayleigh quotients through the matrix-free operator
        applied = apply_polyharmonic(vectors, grid, l)
        values = np.einsum("ij,ij->j", vectors, applied)
        residuals = np.linalg.norm(applied - vectors * values, axis=0)
        order = np.argsort(values, kind="stable")
        values, vectors, residuals = values[order], vectors[:, order], residuals[order]
        logger.debug(f"Rayleigh residuals {residuals}, from Ritz values {np.sort(inverse_values)}")
        method = "lanczos"

    logger.info(f"{grid.label} l={l} h={grid.h:g}: {count} eigenvalues by {method}, lambda_1={values[0]:.8g}")
    if not want_vectors:
        return Spectrum(l, values, grid.h, grid.label, method=method)
    return Spectrum(l, values, grid.h, grid.label, vectors / math.sqrt(grid.cell_volume), grid, method=method)


def energy_identity(spectrum, k=None):
    """(sum of lambda_j, sum of <u_j, P L^l P^T u_j> h^n) over the first k eigenpairs."""
    if not spectrum.has_vectors:
        raise ValueError(f"spectrum of {spectrum.domain} carries no eigenvectors")
    k = spectrum.count if k is None else k
    u = spectrum.vectors[:, :k]
    energy = np.einsum("ij,ij->", u, apply_polyharmonic(u, spectrum.grid, spectrum.l)) * spectrum.grid.cell_volume
    return math.fsum(spectrum.values[:k]), float(energy)


def default_extrapolation_order(kind, l):
    """2 for interval and box membranes, 1 for l >= 2 or curved and mask boundaries."""
    return 2 if kind in ("interval", "box") and l == 1 else 1


def richardson_extrapolate(coarse, fine, order):
    if coarse.l != fine.l or coarse.domain != fine.domain:
        raise ValueError(f"mismatched spectra: {coarse.domain} l={coarse.l} vs {fine.domain} l={fine.l}")
    if not math.isclose(fine.h, coarse.h / 2, rel_tol=1e-9):
        raise ValueError(f"fine h={fine.h:g} is not half of coarse h={coarse.h:g}")
    if not order > 0:
        raise ValueError(f"order must be positive, got {order}")

    count = min(coarse.count, fine.count)
    factor = 2.0 ** order
    lam_c, lam_f = coarse.values[:count], fine.values[:count]
    extrapolated = (factor * lam_f - lam_c) / (factor - 1)
    errors = np.abs(extrapolated - lam_f)
    ordering = np.argsort(extrapolated, kind="stable")

    vectors = None if fine.vectors is None else fine.vectors[:, :count][:, ordering]
    logger.info(f"{fine.domain}: extrapolated order {order:g}, lambda_1 {lam_f[0]:.8g} -> {extrapolated[0]:.8g}")
    return Spectrum(fine.l, extrapolated[ordering], fine.h, fine.domain, vectors, fine.grid,
                    extrapolated=True, error_estimates=errors[ordering], method=fine.method)


def _beam_roots(count):
    """Roots of cos(beta) cosh(beta) = 1, the k-th bracketed around (k + 1/2) pi."""
    def frequency(beta):
        return math.cos(beta) - 1.0 / math.cosh(beta)

    centres = (np.arange(1, count + 1) + 0.5) * math.pi
    return np.array([brentq(frequency, c - math.pi / 4, c + math.pi / 4, xtol=1e-14) for c in centres])


def _disk_values(count, radius):
    values = []
    for m in range(count + 1):
        copies = 1 if m == 0 else 2
        for j in jn_zeros(m, count):
            values.extend([(j / radius) ** 2] * copies)
    return np.sort(values)[:count]


def _box_values(count, lengths):
    lengths = np.asarray(lengths, dtype=float)
    values = [
        math.pi ** 2 * float(np.sum((np.array(ks) / lengths) ** 2))
        for ks in itertools.product(range(1, count + 1), repeat=lengths.size)
    ]
    return np.sort(values)[:count]


def reference_spectrum(shape, l, count, length=1.0, radius=1.0, lengths=None):
    """Closed-form or semi-analytic eigenvalues for the supported (shape, l) pairs.

    interval/1: (k pi / L)^2; beam (interval/2): beta^4 / L^4 with cos(beta) cosh(beta) = 1;
    disk/1: (j_{m,i} / R)^2 with multiplicity 2 for m >= 1; box/1: pi^2 sum (k_i / L_i)^2.
    """
    if int(count) != count or count < 1:
        raise ValueError(f"count must be a positive integer, got {count}")
    if shape == "interval" and l == 1:
        values = (np.arange(1, count + 1) * math.pi / length) ** 2
        label = f"interval(L={length:g})"
    elif shape == "beam" or (shape == "interval" and l == 2):
        l = 2
        values = (_beam_roots(count) / length) ** 4
        label = f"interval(L={length:g})"
    elif shape == "disk" and l == 1:
        values = _disk_values(count, radius)
        label = f"ball(R={radius:g},n=2)"
    elif shape == "box" and l == 1:
        if not lengths:
            raise ValueError("box reference spectrum needs lengths")
        values = _box_values(count, lengths)
        label = "box(" + "x".join(f"{float(L):g}" for L in lengths) + ")"
    else:
        raise ValueError(f"no reference spectrum for shape={shape!r}, l={l}")
    return Spectrum(l, values, 0.0, label, method="reference")


def ghost_point_beam_spectrum(length, h, count):
    """Clamped beam u'''' = lambda u by the 5-point stencil with ghost values u_{-1} = u_1.

    A second-order cross-check of the zero-extension scheme for l = 2 in 1-d.
    """
    nodes = int(round(length / h))
    if not math.isclose(nodes * h, length, rel_tol=1e-9):
        raise ValueError(f"h={h:g} does not divide the length {length:g}")
    size = nodes - 1
    if count > size:
        raise ValueError(f"count={count} exceeds the {size} interior nodes")

    band = np.zeros((3, size))
    band[0, 2:] = 1.0
    band[1, 1:] = -4.0
    band[2, :] = 6.0
    band[2, [0, -1]] = 7.0
    values = scipy.linalg.eig_banded(band / h ** 4, eigvals_only=True, select="i", select_range=(0, count - 1))
    return Spectrum(2, np.sort(values), h, f"interval(L={length:g})", method="ghost-point")
