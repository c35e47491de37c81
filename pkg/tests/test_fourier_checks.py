import math

import numpy as np
import pytest

from eigensolver import Spectrum, smallest_eigenvalues
from fourier_checks import (
    CheckReport,
    check_global_identities,
    check_pointwise_bounds,
    discrete_geometry,
    sample_f,
    transform_at,
    z_grid,
)
from geometry import DomainSpec, discretize


@pytest.fixture(scope="module")
def membrane():
    grid = discretize(DomainSpec.interval(math.pi), math.pi / 200)
    return smallest_eigenvalues(grid, 1, 5, want_vectors=True)


@pytest.fixture(scope="module")
def disk_membrane():
    grid = discretize(DomainSpec.ball(1.0, 2), 1.0 / 8)
    return smallest_eigenvalues(grid, 1, 3, want_vectors=True)


def by_name(reports):
    return {report.name: report for report in reports}


def test_transform_of_a_sine_in_closed_form():
    grid = discretize(DomainSpec.interval(1.0), 1.0 / 100)
    u = math.sqrt(2) * np.sin(math.pi * grid.points[:, 0])
    expected = (2 * math.pi) ** -0.5 * math.sqrt(2) * 0.5j
    assert transform_at(u, grid, math.pi) == pytest.approx(expected, abs=1e-12)


def test_transform_of_a_real_function_is_conjugate_symmetric(disk_membrane):
    grid = disk_membrane.grid
    u = disk_membrane.vectors[:, 1]
    z = np.array([1.3, -0.4])
    assert transform_at(u, grid, -z) == pytest.approx(np.conj(transform_at(u, grid, z)), abs=1e-12)
    with pytest.raises(ValueError):
        transform_at(u, grid, [1.0, 2.0, 3.0])


def test_discrete_geometry_of_an_interval_lattice():
    grid = discretize(DomainSpec.interval(math.pi), math.pi / 200)
    V, I = discrete_geometry(grid)
    assert V == pytest.approx(199 * math.pi / 200, rel=1e-12)
    assert I == pytest.approx(V ** 3 / 12, rel=1e-10)


def test_f_is_nonnegative_for_a_single_eigenfunction(membrane):
    zs = np.linspace(-30, 30, 301)
    samples = sample_f(membrane, 1, zs)
    assert all(s.f >= 0 for s in samples)
    assert samples[0].phi_hat.shape == (1,)


def test_pointwise_bounds_hold_at_random_frequencies(membrane):
    rng = np.random.default_rng(0)
    reports = by_name(check_pointwise_bounds(membrane, 5, rng.uniform(-40, 40, 200)))
    assert set(reports) == {"f_nonnegative", "bessel_pointwise", "gradient_pointwise"}
    assert all(r.passed for r in reports.values())
    assert reports["bessel_pointwise"].details["violations"] == 0
    assert reports["gradient_pointwise"].details["violations"] == 0
    assert reports["bessel_pointwise"].details["samples"] == 200


def test_pointwise_bounds_hold_in_two_dimensions(disk_membrane):
    rng = np.random.default_rng(1)
    reports = check_pointwise_bounds(disk_membrane, 3, rng.uniform(-20, 20, (200, 2)))
    assert all(r.passed for r in reports)


def test_global_identities_on_the_membrane(membrane):
    reports = by_name(check_global_identities(membrane, 3, Z=60.0, dz=0.05))
    assert all(r.passed for r in reports.values()), [r.name for r in reports.values() if not r.passed]

    mass = reports["parseval_mass"]
    assert 0.97 * 3 <= mass.lhs <= 3 * (1 + mass.tolerance / 3)
    assert mass.truncation == pytest.approx(3 - mass.lhs)

    moment = reports["fourier_moment"]
    assert moment.rhs == pytest.approx(14.0, rel=1e-3)
    assert moment.lhs < moment.rhs

    chain = reports["lemma_chain"]
    assert chain.lhs <= chain.rhs
    assert reports["theorem1_chain"].lhs <= chain.lhs * (1 + 1e-9)


def test_parseval_mass_grows_with_the_cutoff(membrane):
    masses = [
        by_name(check_global_identities(membrane, 2, Z=Z, dz=0.05))["parseval_mass"].lhs
        for Z in (10.0, 20.0, 40.0)
    ]
    assert masses[0] <= masses[1] <= masses[2] <= 2.0 * (1 + 1e-2)


def test_cutoff_beyond_nyquist_is_reported(caplog):
    grid = discretize(DomainSpec.interval(math.pi), math.pi / 20)
    spectrum = smallest_eigenvalues(grid, 1, 2, want_vectors=True)
    check_global_identities(spectrum, 1, Z=30.0, dz=0.1)
    assert "Nyquist" in caplog.text


def test_invalid_requests(membrane):
    with pytest.raises(ValueError):
        check_global_identities(membrane, 3, Z=0.0, dz=0.05)
    with pytest.raises(ValueError):
        check_global_identities(membrane, 3, Z=10.0, dz=-1.0)
    with pytest.raises(ValueError):
        check_pointwise_bounds(membrane, 9, [1.0])
    bare = Spectrum(1, membrane.values, membrane.h, membrane.domain)
    with pytest.raises(ValueError, match="eigenvectors"):
        sample_f(bare, 1, [1.0])


def test_z_grid_is_symmetric():
    axis, grid = z_grid(2, 1.0, 0.25)
    assert axis.tolist() == [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0]
    assert grid.size == 81
    assert np.allclose(grid.points.mean(axis=0), 0.0)


def test_check_report_semantics():
    inequality = CheckReport.inequality("x", 1.0, 2.0, 0.0)
    assert inequality.passed and inequality.margin == pytest.approx(2.0)
    assert not CheckReport.inequality("x", 2.1, 2.0, 0.05).passed
    identity = CheckReport.identity("y", 1.0, 1.0 + 1e-12, 1e-9)
    assert identity.passed and identity.margin is None
    assert identity.to_dict()["kind"] == "identity"
