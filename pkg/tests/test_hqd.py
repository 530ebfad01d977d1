import numpy as np
import pytest

from ddgconf import Realization
from ddgconf import deform, hqd, laplace
from ddgconf.errors import ClosureDefect, NotHarmonic

from conftest import delaunay_disk, random_harmonic, random_moebius


def wheel6_root_q(scale=1.0):
    """Frozen holomorphic q on the unit wheel: imag part cos(2 pi m / 3) on
    spoke (0, m+1).  Both vertex sums vanish by root-of-unity cancellation."""
    return hqd.QuadDiff(scale * np.cos(2.0 * np.pi * np.arange(6) * 2.0 / 6.0))


def test_gradient_pairing():
    r = delaunay_disk(90, seed=21)
    rng = np.random.default_rng(22)
    u = rng.standard_normal(r.mesh.vertex_count)
    grad = hqd.gradient(r, u).grad
    for f, (i, j, k) in enumerate(r.mesh.faces):
        for a, b in ((i, j), (j, k), (k, i)):
            pairing = (np.conj(grad[f]) * (r.z[b] - r.z[a])).real
            assert pairing == pytest.approx(u[b] - u[a], abs=1e-10)


def test_gradient_of_linear_is_constant(wheel6_irregular):
    r = wheel6_irregular
    u = 3.0 * r.z.real - 2.0 * r.z.imag
    grad = hqd.gradient(r, u).grad
    assert np.abs(grad - (3.0 - 2.0j)).max() < 1e-12


def test_q_purely_imaginary_for_any_u():
    r = delaunay_disk(120, seed=23)
    rng = np.random.default_rng(24)
    u = rng.standard_normal(r.mesh.vertex_count)
    i, j, _, _ = r.flap_points()
    dz = r.z[j] - r.z[i]
    raw = hqd._duz(r, u) * dz
    assert np.abs(raw.real).max() < 1e-11 * max(np.abs(raw).max(), 1e-300)


def test_q_matches_cotan_formula():
    r = delaunay_disk(100, seed=25)
    rng = np.random.default_rng(26)
    u = rng.standard_normal(r.mesh.vertex_count)
    q = hqd.qdiff_from_function(r, u).values
    qc = hqd.qdiff_cotan(r, u)
    assert np.abs(q - qc).max() < 1e-11 * max(np.abs(q).max(), 1e-300)


def test_harmonic_q_is_holomorphic():
    r = delaunay_disk(200, seed=27)
    u = random_harmonic(r, seed=28)
    q = hqd.qdiff_from_harmonic(r, u)
    rep = hqd.verify_qdiff(r, q, tol=1e-10)
    assert rep.holomorphic


def test_nonharmonic_first_sum_defect(wheel6_irregular):
    """For arbitrary u the weighted sum q/dz still vanishes on a disk; the
    plain vertex sum defect is exactly (i/2) sum_j w_ij (u_i - u_j), which is
    minus (i/2) times our laplacian helper (it sums w_ij (u_j - u_i))."""
    r = wheel6_irregular
    rng = np.random.default_rng(29)
    u = rng.standard_normal(7)
    q = hqd.qdiff_from_function(r, u)
    rep = hqd.verify_qdiff(r, q, tol=1e-10)
    lap = laplace.laplacian(r, u)
    for pos, v in enumerate(r.mesh.interior_vertices):
        assert rep.vertex_sum[v] == pytest.approx(-0.5j * lap[pos], abs=1e-12)
        assert abs(rep.weighted_sum[v]) < 1e-12
    assert not rep.holomorphic
    with pytest.raises(NotHarmonic):
        hqd.qdiff_from_harmonic(r, u)


def test_wheel6_root_of_unity_q(wheel6):
    rep = hqd.verify_qdiff(wheel6, wheel6_root_q(0.8), tol=1e-12)
    assert rep.holomorphic


def test_roundtrip(wheel6_irregular):
    r = wheel6_irregular
    u = random_harmonic(r, seed=31)
    q = hqd.qdiff_from_harmonic(r, u)
    u2 = hqd.harmonic_from_qdiff(r, q)
    q2 = hqd.qdiff_from_harmonic(r, u2)
    scale = np.abs(q.values).max()
    assert np.abs(q.values - q2.values).max() < 1e-9 * scale
    # u is recovered up to the kernel span{1, Re z, Im z}
    d = hqd.project_out_linear(r, u - u2)
    assert np.abs(d).max() < 1e-9 * max(np.abs(u).max(), 1e-300)


def test_roundtrip_random_disk():
    r = delaunay_disk(250, seed=32)
    u = random_harmonic(r, seed=33)
    q = hqd.qdiff_from_harmonic(r, u)
    u2 = hqd.harmonic_from_qdiff(r, q)
    q2 = hqd.qdiff_from_harmonic(r, u2)
    assert np.abs(q.values - q2.values).max() < 1e-9 * np.abs(q.values).max()


def test_kernel_dimension(wheel6_irregular):
    """The linear map u -> q kills exactly span{1, Re z, Im z}."""
    r = wheel6_irregular
    n = r.mesh.vertex_count
    m = len(r.mesh.interior_edges)
    A = np.zeros((m, n))
    for col in range(n):
        u = np.zeros(n)
        u[col] = 1.0
        A[:, col] = hqd.qdiff_from_function(r, u).imag
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv >= 1e-10 * sv[0]))
    assert n - rank == 3
    for u in (np.ones(n), r.z.real, r.z.imag):
        assert np.abs(hqd.qdiff_from_function(r, u).imag).max() < 1e-12


def test_unclosed_q_rejected(wheel6):
    bad = wheel6_root_q()
    bad.imag[0] += 0.3
    with pytest.raises(ClosureDefect):
        hqd.harmonic_from_qdiff(wheel6, bad)


def test_moebius_pushforward():
    r = delaunay_disk(150, seed=35)
    u = random_harmonic(r, seed=36)
    q = hqd.qdiff_from_harmonic(r, u)
    rng = np.random.default_rng(37)
    for _ in range(10):
        phi = random_moebius(r, rng)
        rep = hqd.qdiff_moebius_pushforward_check(r, q, phi, tol=1e-9)
        assert rep.holomorphic


def test_cross_ratio_rate(wheel6_irregular):
    r = wheel6_irregular
    u = random_harmonic(r, seed=38)
    zdot = deform.conformal_deformation(r, u)
    rep = hqd.cross_ratio_rate_check(r, u, zdot)
    assert rep.ok
    assert rep.max_fd_error < 1e-5
    assert rep.max_analytic_error < 1e-10
    assert rep.max_angle_error < 1e-5


def test_cross_ratio_rate_random_disk():
    r = delaunay_disk(80, seed=39)
    u = random_harmonic(r, seed=40)
    zdot = deform.conformal_deformation(r, u)
    rep = hqd.cross_ratio_rate_check(r, u, zdot)
    assert rep.ok
