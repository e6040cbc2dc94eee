import numpy as np
import pytest
from shapely.geometry import LinearRing

from critamp import new_map
from critamp.errors import DomainError
from critamp.julia import (cloud_distance, forward_residual, julia_boettcher,
                           julia_inverse_iteration, phi_on_circle)


@pytest.fixture(scope="module")
def deep_cloud(map_half):
    return julia_inverse_iteration(map_half, depth=12)


def test_fixed_and_antipodal_points(map_half):
    pts = julia_boettcher(map_half, [1.0, 0.0]).points
    assert abs(pts[0] + 1) < 1e-12
    assert abs(pts[1] - 1) < 1e-12
    # f(−1) = f(1) = 1 for every map with p₁ = 0
    assert abs(map_half(-1) - 1) < 1e-15


def test_conjugate_symmetry(map_half):
    t = np.linspace(0.01, 0.99, 50)
    up = julia_boettcher(map_half, t).points
    down = julia_boettcher(map_half, -t).points
    assert np.max(np.abs(up - np.conj(down))) < 1e-12


def test_invariance_under_doubling(map_half):
    """``f(𝒜(e^{iπt})) = 𝒜(e^{2iπt})``."""
    t = np.linspace(-0.49, 0.49, 40)
    a = julia_boettcher(map_half, t).points
    a2 = julia_boettcher(map_half, 2 * t).points
    p0, p1, p2 = (float(p) for p in map_half.weights)
    assert np.max(np.abs(p0 + p1 * a + p2 * a * a - a2)) < 1e-12


def test_boundary_points_lie_on_preimage_cloud(map_half, deep_cloud):
    t = np.linspace(-0.25, 0.25, 101)
    pts = julia_boettcher(map_half, t)
    # the cloud samples the Julia set with spacing of order 10⁻³
    assert cloud_distance(pts, deep_cloud) < 5e-3


def test_dyadic_angles_hit_preimages(map_half):
    """Angles t = k/2^j land exactly on preimages of the fixed point."""
    cloud = julia_inverse_iteration(map_half, depth=6, all_levels=True)
    t = np.array([k / 32 for k in range(-31, 33)])
    pts = julia_boettcher(map_half, t)
    assert cloud_distance(pts, cloud) < 1e-10


def test_inverse_iteration_cloud(map_half):
    cloud = julia_inverse_iteration(map_half, depth=7)
    assert len(cloud) == 128
    assert forward_residual(map_half, cloud, 7) < 1e-10
    everything = julia_inverse_iteration(map_half, depth=3, all_levels=True)
    assert len(everything) == 1 + 2 + 4 + 8
    with pytest.raises(DomainError):
        julia_inverse_iteration(map_half, depth=0)


def test_boundary_curve_is_simple(map_half):
    t = np.linspace(-1, 1, 801)[1:]
    ring = LinearRing([(z.real, z.imag) for z in julia_boettcher(map_half, t).points])
    assert ring.is_simple


def test_phi_on_circle_matches_series_inside():
    # at t = 0 the boundary value is the fixed point (1 − λ)/λ
    assert abs(phi_on_circle(0.5, np.array([0.0]))[0] - 1.0) < 1e-12


def test_fourier_continuation_is_rough_but_close(engine_half, deep_cloud):
    t = np.array([0.25, 0.1, 0.01, -0.1])
    rough = julia_boettcher(engine_half, t, "fourier", fourier_order=4)
    exact = julia_boettcher(engine_half, t)
    err = np.abs(rough.points - exact.points)
    assert np.all(err < 0.05)
    assert err[2] < err[1] < err[0]
    assert abs(rough.points[1] - np.conj(rough.points[3])) < 1e-12


def test_validation(map_half, engine_half):
    with pytest.raises(DomainError):
        julia_boettcher(map_half, [1.5])
    with pytest.raises(DomainError):
        julia_boettcher(map_half, [0.5], method="other")
    with pytest.raises(DomainError):
        julia_boettcher(map_half, [0.5], method="fourier")
    with pytest.raises(DomainError):
        julia_boettcher(engine_half, [0.5], method="fourier", fourier_order=2)
    with pytest.raises(DomainError):
        julia_boettcher(new_map(["0.2", "0", "0", "0.8"]), [0.5])


def test_rows(map_half):
    cloud = julia_boettcher(map_half, [0.0, 0.5])
    assert cloud.rows()[0] == (0.0, 1.0, 0.0)
    assert len(julia_inverse_iteration(map_half, 2).rows()[0]) == 2
