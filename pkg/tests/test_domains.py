"""
Tests for domains, densities, sampling and the coverage event.
"""

import math

import numpy as np
import pytest

from ripslab.domains import (AnnulusDomain, BallDomain, BoxMinusBallDomain, DensitySpec, PointCloud,
                             PolytopeDomain, check_coverage, coverage_union_bound, density_integral,
                             domain_from_dict, greedy_packing, make_density, make_domain, read_cloud_csv,
                             sample, write_cloud_csv)
from ripslab.errors import ConfigError, GeometryError, LabIOError, SamplingError


@pytest.fixture
def square():
    return make_domain("box", 2)


@pytest.fixture
def triangle():
    # x >= 0, y >= 0, x + y <= 1
    return PolytopeDomain([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])


def test_make_domain_defaults():
    box = make_domain("box", 3)
    assert box.volume == pytest.approx(1.0)
    assert box.diameter == pytest.approx(math.sqrt(3))
    ball = make_domain("ball", 2)
    assert ball.volume == pytest.approx(math.pi)
    annulus = make_domain("annulus", 2)
    assert not annulus.convex
    assert annulus.inradius == pytest.approx(0.25)
    assert annulus.contains(annulus.incenter)[0]
    with pytest.raises(ConfigError):
        make_domain("torus", 2)
    with pytest.raises(ConfigError):
        make_domain("polytope", 2)


def test_domain_invariants(triangle):
    for domain in (make_domain("box", 2), make_domain("ball", 3), make_domain("annulus", 2),
                   make_domain("box-minus-ball", 2), triangle):
        assert domain.contains(domain.incenter)[0]
        assert domain.inradius > 0
        assert domain.inradius <= domain.diameter / 2.0 * (1 + 1e-9)


def test_polytope_geometry(triangle):
    assert triangle.volume == pytest.approx(0.5)
    assert triangle.diameter == pytest.approx(math.sqrt(2))
    # inradius of the right isosceles triangle with legs 1
    assert triangle.inradius == pytest.approx(1.0 / (2.0 + math.sqrt(2)), rel=1e-6)
    lo, hi = triangle.bounding_box
    np.testing.assert_allclose(lo, [0, 0], atol=1e-9)
    np.testing.assert_allclose(hi, [1, 1], atol=1e-9)
    projected = triangle.project(np.array([[1.0, 1.0]]))
    np.testing.assert_allclose(projected, [[0.5, 0.5]], atol=1e-6)


def test_nonconvex_domains_refuse_projection():
    with pytest.raises(GeometryError):
        make_domain("annulus", 2).project(np.zeros((1, 2)))


def test_box_minus_ball_validation():
    with pytest.raises(GeometryError):
        BoxMinusBallDomain([0, 0], [1, 1], [0.1, 0.5], 0.3)
    domain = BoxMinusBallDomain([0, 0], [1, 1], [0.5, 0.5], 0.25)
    assert not domain.contains(np.array([[0.5, 0.5]]))[0]
    assert domain.contains(np.array([[0.05, 0.05]]))[0]
    assert domain.volume == pytest.approx(1 - math.pi / 16)


def test_domain_round_trip_through_dict(triangle):
    for domain in (make_domain("annulus", 3), make_domain("box-minus-ball", 2), triangle):
        again = domain_from_dict(domain.to_dict())
        assert again.to_dict() == domain.to_dict()


def test_sample_rejects_nonpositive_n(square):
    with pytest.raises(ValueError):
        sample(square, DensitySpec.uniform(square), 0, seed=1)


def test_sample_is_deterministic(square):
    density = DensitySpec.uniform(square)
    a = sample(square, density, 500, seed=42)
    b = sample(square, density, 500, seed=42)
    c = sample(square, density, 500, seed=43)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert len(a) == 500


def test_sample_quadrant_frequency(square):
    cloud = sample(square, DensitySpec.uniform(square), 10_000, seed=7)
    quadrant = np.mean((cloud.points[:, 0] < 0.5) & (cloud.points[:, 1] < 0.5))
    assert quadrant == pytest.approx(0.25, abs=0.02)


def test_sample_annulus_norms():
    annulus = AnnulusDomain([0, 0], 0.5, 1.0)
    cloud = sample(annulus, DensitySpec.uniform(annulus), 1000, seed=3)
    norms = np.linalg.norm(cloud.points, axis=1)
    assert np.all((norms >= 0.5 - 1e-12) & (norms <= 1.0 + 1e-12))


def test_sample_pathological_domain():
    sliver = AnnulusDomain([0, 0], 0.99999, 1.0)
    with pytest.raises(SamplingError) as info:
        sample(sliver, DensitySpec.uniform(sliver), 1_000_000, seed=0)
    assert info.value.acceptance < 1e-4


def test_bounded_ratio_density(square):
    density = make_density("bounded-ratio", square, ratio=3.0, axis=1)
    assert density.nu_max == pytest.approx(3.0 * density.nu_min)
    assert density.nu_min == pytest.approx(0.5)
    assert density_integral(square, density, 0.01) == pytest.approx(1.0, abs=1e-6)
    cloud = sample(square, density, 20_000, seed=5)
    upper = np.mean(cloud.points[:, 1] >= 0.5)
    assert upper == pytest.approx(0.75, abs=0.02)


def test_density_normalisation_for_disk_and_annulus():
    for domain in (BallDomain([0, 0], 1.0), AnnulusDomain([0, 0], 0.5, 1.0)):
        for density in (DensitySpec.uniform(domain), make_density("bounded-ratio", domain, 2.0)):
            assert density_integral(domain, density, 0.002) == pytest.approx(1.0, abs=5e-3)


def test_density_validation(square):
    with pytest.raises(ConfigError):
        DensitySpec(kind="uniform", nu_min=0.0)
    with pytest.raises(ConfigError):
        make_density("bounded-ratio", square, ratio=0.5)
    with pytest.raises(ConfigError):
        make_density("gaussian", square)


def test_coverage_single_point(square):
    cloud = PointCloud(np.array([[0.5, 0.5]]))
    result = check_coverage(cloud, square, 0.8, 0.08)
    assert result.covered
    assert result.witness is None
    assert result.certified_radius == pytest.approx(0.8 + 0.08 * math.sqrt(2))

    result = check_coverage(cloud, square, 0.5, 0.05)
    assert not result.covered
    assert np.linalg.norm(result.witness - np.array([0.5, 0.5])) > 0.5
    # the first uncovered lattice point in row-major order is a corner
    np.testing.assert_allclose(result.witness, [0.0, 0.0])


def test_coverage_large_radius(square):
    cloud = PointCloud(np.array([[0.1, 0.9]]))
    step = 0.1
    assert check_coverage(cloud, square, square.diameter + step * math.sqrt(2), step).covered


def test_coverage_monotone_in_r(square):
    cloud = sample(square, DensitySpec.uniform(square), 60, seed=9)
    step = 0.02
    verdicts = [check_coverage(cloud, square, r, step).covered for r in np.linspace(0.08, 0.5, 15)]
    first = verdicts.index(True) if True in verdicts else len(verdicts)
    assert all(verdicts[first:])


def test_coverage_grid_step_precondition(square):
    with pytest.raises(GeometryError):
        check_coverage(PointCloud(np.array([[0.5, 0.5]])), square, 0.4, 0.2)


def test_greedy_packing_is_separated_and_maximal(square):
    radius = 0.1
    centres = greedy_packing(square, radius, grid_step=0.01, extra=0, seed=1)
    gaps = np.linalg.norm(centres[:, None, :] - centres[None, :, :], axis=2)
    np.fill_diagonal(gaps, np.inf)
    assert gaps.min() > 2 * radius
    grid = square.grid(0.01)
    nearest = np.linalg.norm(grid[:, None, :] - centres[None, :, :], axis=2).min(axis=1)
    assert nearest.max() <= 2 * radius + 1e-12


def test_coverage_union_bound(square):
    density = DensitySpec.uniform(square)
    loose = coverage_union_bound(square, density, 0.3, 50)
    tight = coverage_union_bound(square, density, 0.3, 20_000)
    assert 0 < loose["p_min"] <= 1
    assert tight["bound"] < loose["bound"]
    assert tight["bound"] < 1e-3
    with pytest.raises(GeometryError):
        coverage_union_bound(make_domain("annulus", 2), density, 0.3, 50)


def test_cloud_csv_round_trip(tmp_path, square):
    cloud = sample(square, DensitySpec.uniform(square), 25, seed=11)
    path = tmp_path / "cloud.csv"
    write_cloud_csv(cloud, str(path))
    assert path.read_text().splitlines()[0] == "dim,2"
    again = read_cloud_csv(str(path))
    assert np.array_equal(again.points, cloud.points)


def test_cloud_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("dim,2\n0.1,0.2,0.3\n")
    with pytest.raises(LabIOError):
        read_cloud_csv(str(bad))
    with pytest.raises(LabIOError):
        read_cloud_csv(str(tmp_path / "missing.csv"))
