import numpy as np
import pytest

from ddgconf import Realization
from ddgconf import deform, laplace
from ddgconf.errors import IncompatibleRates, NotHarmonic

from conftest import delaunay_disk, random_harmonic


def test_edge_rates_identity(wheel6_irregular):
    r = wheel6_irregular
    zdot = 0.5 * r.z  # uniform scaling flow
    rates = deform.edge_rates(r, zdot)
    assert np.abs(rates.sigma - 0.5).max() < 1e-14
    assert np.abs(rates.omega).max() < 1e-14


def test_rotation_flow_rates(wheel6_irregular):
    r = wheel6_irregular
    rates = deform.edge_rates(r, 1j * r.z)
    assert np.abs(rates.sigma).max() < 1e-14
    assert np.abs(rates.omega - 1.0).max() < 1e-14


def test_genuine_deformation_compatible(wheel6_irregular):
    r = wheel6_irregular
    rep = deform.check_triangle_compat(r, deform.edge_rates(r, r.z**3))
    assert rep.ok.all()
    assert np.nanmax(rep.omega_spread) < 1e-12
    assert np.nanmax(rep.sigma_spread) < 1e-12


def test_face_scaling_matches_circumradius_rate():
    r = delaunay_disk(60, seed=12)
    rng = np.random.default_rng(13)
    zdot = rng.standard_normal(r.mesh.vertex_count) + 1j * rng.standard_normal(
        r.mesh.vertex_count
    )
    rep = deform.check_triangle_compat(r, deform.edge_rates(r, zdot))
    assert rep.ok.all()
    assert np.nanmax(rep.radius_rate_error) < 1e-5


def test_incompatible_rates_rejected(wheel6_irregular):
    r = wheel6_irregular
    rates = deform.edge_rates(r, r.z**2)
    rates.omega[0] += 0.1
    rep = deform.check_triangle_compat(r, rates)
    assert not rep.ok.all()
    with pytest.raises(IncompatibleRates):
        deform.require_triangle_compat(r, rates)


def test_conformal_deformation_scale_rates():
    for seed in range(3):
        r = delaunay_disk(100 + 30 * seed, seed=20 + seed)
        u = random_harmonic(r, seed=30 + seed)
        zdot = deform.conformal_deformation(r, u)
        rates = deform.edge_rates(r, zdot)
        for e, (i, j) in enumerate(r.mesh.edges):
            assert rates.sigma[e] == pytest.approx((u[i] + u[j]) / 2.0, abs=1e-10)


def test_conformal_deformation_face_closure(wheel6_irregular):
    r = wheel6_irregular
    u = random_harmonic(r, seed=2)
    zdot = deform.conformal_deformation(r, u)
    rep = deform.check_triangle_compat(r, deform.edge_rates(r, zdot))
    assert rep.ok.all()


def test_pattern_deformation_is_rotated_conformal(wheel6_irregular):
    r = wheel6_irregular
    alpha = random_harmonic(r, seed=5)
    zdot = deform.pattern_deformation(r, alpha)
    rates = deform.edge_rates(r, zdot)
    for e, (i, j) in enumerate(r.mesh.edges):
        assert rates.omega[e] == pytest.approx((alpha[i] + alpha[j]) / 2.0, abs=1e-10)


def test_square_example(square2):
    """Scale factors u = Re(2z) generate the flow z -> z^2 up to gauge."""
    r = square2
    u = 2.0 * r.z.real
    # no interior vertices, so u is trivially harmonic
    assert laplace.laplacian(r, u).size == 0
    zdot = deform.conformal_deformation(r, u)
    diff_rates = deform.edge_rates(r, zdot - r.z**2)
    # gauge freedom: a rigid motion rate, sigma = 0 and omega constant
    assert np.abs(diff_rates.sigma).max() < 1e-12
    assert diff_rates.omega.max() - diff_rates.omega.min() < 1e-12


def test_gauge_freedom():
    r = delaunay_disk(70, seed=33)
    u = random_harmonic(r, seed=34)
    za = deform.conformal_deformation(r, u, anchor_vertex=0, anchor_face=0)
    zb = deform.conformal_deformation(r, u, anchor_vertex=1, anchor_face=2)
    rates = deform.edge_rates(r, za - zb)
    assert np.abs(rates.sigma).max() < 1e-9
    assert rates.omega.max() - rates.omega.min() < 1e-9


def test_nonharmonic_rejected(wheel6):
    u = np.zeros(7)
    u[0] = 1.0
    with pytest.raises(NotHarmonic):
        deform.conformal_deformation(wheel6, u)
