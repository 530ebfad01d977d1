"""Discrete holomorphic quadratic differentials.

A quadratic differential assigns a purely imaginary number to each interior
edge; holomorphicity means both weighted sums around every interior vertex
vanish.  This module builds them from harmonic vertex functions (via the
face-wise interpolation gradient), verifies them, integrates them back to a
harmonic function, and checks the Moebius-invariance and cross-ratio-rate
identities.
"""

from dataclasses import dataclass

import numpy as np

from . import laplace
from .deform import edge_rates
from .errors import ClosureDefect, DegenerateFace, NotRealizable
from .realization import Realization, cross_ratios, intersection_angles


@dataclass
class QuadDiff:
    """Purely imaginary edge function, stored by its imaginary part
    (one real number per interior edge, aligned with ``mesh.interior_edges``)."""

    imag: np.ndarray

    @property
    def values(self):
        return 1j * self.imag

    @classmethod
    def from_complex(cls, q):
        return cls(np.asarray(q, dtype=complex).imag)


def _as_complex(q):
    if isinstance(q, QuadDiff):
        return q.values
    return np.asarray(q, dtype=complex)


@dataclass
class GradField:
    grad: np.ndarray  # interpolation gradient per face
    uz: np.ndarray  # conj(grad) / 2 per face


def gradient(r: Realization, u) -> GradField:
    """Gradient of the piecewise-linear interpolant of ``u``, constant per
    face: ``i (u_i dz(e_jk) + u_j dz(e_ki) + u_k dz(e_ij)) / (2 A)``."""
    u = np.asarray(u)
    tri = np.array(r.mesh.faces)
    z = r.z
    zi, zj, zk = z[tri[:, 0]], z[tri[:, 1]], z[tri[:, 2]]
    ui, uj, uk = u[tri[:, 0]], u[tri[:, 1]], u[tri[:, 2]]
    area2 = r.area2
    if np.any(area2 == 0):
        raise DegenerateFace("zero-area face")
    grad = 1j * (ui * (zk - zj) + uj * (zi - zk) + uk * (zj - zi)) / area2
    return GradField(grad, 0.5 * np.conj(grad))


def _duz(r: Realization, u):
    """Dual 1-form ``uz(left face) - uz(right face)`` per interior edge."""
    uz = gradient(r, u).uz
    mesh = r.mesh
    left = np.array([mesh.edge_left[e] for e in mesh.interior_edges], dtype=int)
    right = np.array([mesh.edge_right[e] for e in mesh.interior_edges], dtype=int)
    return uz[left] - uz[right]


def qdiff_from_function(r: Realization, u):
    """``du_z(e*) dz(e)`` per interior edge, for an arbitrary vertex function.

    Purely imaginary for every ``u``; holomorphic precisely when ``u`` is
    harmonic."""
    i, j, _, _ = r.flap_points()
    dz = r.z[j] - r.z[i]
    q = _duz(r, u) * dz
    return QuadDiff(q.imag)


def qdiff_from_harmonic(r: Realization, u, rtol=laplace.HARMONIC_RTOL):
    """Holomorphic quadratic differential of a harmonic function."""
    laplace.require_harmonic(r, u, rtol)
    return qdiff_from_function(r, u)


def qdiff_cotan(r: Realization, u):
    """Independent cotangent-formula evaluation of the quadratic differential
    (used to cross-check :func:`qdiff_from_function`)."""
    mesh = r.mesh
    u = np.asarray(u, dtype=float)
    out = np.empty(len(mesh.interior_edges), dtype=complex)
    for idx, e in enumerate(mesh.interior_edges):
        i, j, k, l = mesh.edge_flap(e)
        fl, fr = mesh.edge_left[e], mesh.edge_right[e]
        out[idx] = (-0.5j) * (
            r.cot_at(fl, i) * (u[k] - u[j])
            + r.cot_at(fl, j) * (u[k] - u[i])
            + r.cot_at(fr, j) * (u[l] - u[i])
            + r.cot_at(fr, i) * (u[l] - u[j])
        )
    return out


@dataclass
class QDiffReport:
    holomorphic: bool
    max_real_part: float  # |Re q|_inf / |q|_inf
    vertex_sum: dict  # interior vertex -> complex defect of sum q
    weighted_sum: dict  # interior vertex -> complex defect of sum q / dz
    max_defect: float  # worst normalized defect across all three checks


def verify_qdiff(r: Realization, q, tol=1e-9) -> QDiffReport:
    """Check that ``q`` is purely imaginary and that both vertex sums vanish.

    Defects are normalized by the sup norm of the respective summands.
    """
    q = _as_complex(q)
    mesh = r.mesh
    pos = {e: idx for idx, e in enumerate(mesh.interior_edges)}
    q_scale = max(float(np.abs(q).max()) if len(q) else 0.0, 1e-300)

    tau = np.empty_like(q)
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        tau[idx] = q[idx] / (r.z[j] - r.z[i])
    tau_scale = max(float(np.abs(tau).max()) if len(tau) else 0.0, 1e-300)

    vertex_sum = {}
    weighted_sum = {}
    max_defect = float(np.abs(q.real).max() / q_scale) if len(q) else 0.0
    for v, cycle in mesh.dual_cycles().items():
        s0 = 0.0 + 0.0j
        s1 = 0.0 + 0.0j
        for de in cycle:
            idx = pos[de.edge]
            s0 += q[idx]
            # tau is stored for the canonical orientation (i < j); around v the
            # term is q_vj / (z_j - z_v)
            s1 += tau[idx] if de.tail == min(de.tail, de.head) else -tau[idx]
        vertex_sum[v] = s0
        weighted_sum[v] = s1
        max_defect = max(max_defect, abs(s0) / q_scale, abs(s1) / tau_scale)
    return QDiffReport(max_defect <= tol, float(np.abs(q.real).max() / q_scale) if len(q) else 0.0, vertex_sum, weighted_sum, max_defect)


def harmonic_from_qdiff(r: Realization, q, anchor_vertex=0, anchor_face=0, tol=1e-9):
    """Integrate a quadratic differential back to a vertex function.

    Requires only the weighted vertex sums ``sum q / dz = 0`` (the dual form
    ``q / dz`` must be closed).  If ``q`` is fully holomorphic the result is
    harmonic and reproduces ``q``.  Anchored to 0 at ``anchor_vertex``.
    """
    q = _as_complex(q)
    mesh = r.mesh
    mesh.require_disk()
    pos = {e: idx for idx, e in enumerate(mesh.interior_edges)}

    tau = np.zeros(len(mesh.edges), dtype=complex)  # on canonical dual edges
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        tau[e] = q[idx] / (r.z[j] - r.z[i])
    tau_scale = max(float(np.abs(tau).max()), 1e-300)

    steps, cotree = mesh.dual_spanning_tree(anchor_face)
    h = np.zeros(len(mesh.faces), dtype=complex)
    for face, parent, e, sign in steps:
        h[face] = h[parent] + sign * tau[e]
    for e in cotree:
        fl, fr = mesh.edge_left[e], mesh.edge_right[e]
        gap = h[fl] - h[fr] - tau[e]
        if abs(gap) > tol * tau_scale:
            raise ClosureDefect(
                f"dual form q/dz fails to close across edge {mesh.edges[e]} "
                f"(defect {abs(gap):.3e}); the weighted vertex sums do not vanish",
                edge=mesh.edges[e],
                defect=abs(gap),
            )

    # omega(e_ij) = <2 conj(h_face), dz(e_ij)> = Re(2 h_face dz(e_ij)), the same
    # from either side iff Re q = 0
    omega = np.empty(len(mesh.edges))
    dz_scale = 0.0
    for e, (i, j) in enumerate(mesh.edges):
        dz = r.z[j] - r.z[i]
        dz_scale = max(dz_scale, abs(dz))
        fl, fr = mesh.edge_left[e], mesh.edge_right[e]
        vals = []
        if fl is not None:
            vals.append((2.0 * h[fl] * dz).real)
        if fr is not None:
            vals.append((2.0 * h[fr] * dz).real)
        if len(vals) == 2 and abs(vals[0] - vals[1]) > tol * max(
            1.0, abs(vals[0]), abs(vals[1])
        ):
            raise NotRealizable(
                f"edge {mesh.edges[e]}: the two face-side evaluations disagree "
                f"({vals[0]:.6e} vs {vals[1]:.6e}); q has a real part",
                edge=mesh.edges[e],
            )
        omega[e] = vals[0]

    steps_v, cotree_v = mesh.vertex_spanning_tree(anchor_vertex)
    u = np.zeros(mesh.vertex_count)
    for v, parent, e, sign in steps_v:
        u[v] = u[parent] + sign * omega[e]
    omega_scale = max(float(np.abs(omega).max()), 1e-300)
    for e in cotree_v:
        i, j = mesh.edges[e]
        gap = u[j] - u[i] - omega[e]
        if abs(gap) > tol * omega_scale:
            raise ClosureDefect(
                f"primal form fails to close on edge {mesh.edges[e]}",
                edge=mesh.edges[e],
                defect=abs(gap),
            )
    return u


def project_out_linear(r: Realization, u):
    """Remove the best Euclidean least-squares fit by ``span{1, Re z, Im z}``."""
    u = np.asarray(u, dtype=float)
    basis = np.stack([np.ones_like(u), r.z.real, r.z.imag], axis=1)
    coef, *_ = np.linalg.lstsq(basis, u, rcond=None)
    return u - basis @ coef


def qdiff_moebius_pushforward_check(r: Realization, q, phi, tol=1e-9):
    """Verify that ``q`` is still holomorphic on the Moebius image of the
    realization (same edge values, new positions)."""
    from .moebius import MoebiusMap  # local import to avoid a cycle

    if not isinstance(phi, MoebiusMap):
        phi = MoebiusMap(*phi)
    w = phi.apply(r.z)
    return verify_qdiff(Realization(r.mesh, w), q, tol)


@dataclass
class RateCheckReport:
    ok: bool
    max_fd_error: float  # q vs finite-difference log cross-ratio derivative
    max_analytic_error: float  # q vs the rotation-rate combination
    max_angle_error: float  # Im part vs intersection-angle derivative


def cross_ratio_rate_check(
    r: Realization, u, zdot, fd_tol=1e-5, analytic_tol=1e-10
) -> RateCheckReport:
    """Check ``q = du_z dz = d/dt log cr`` against a central finite
    difference of the cross ratios under ``z + t zdot``, and against the
    analytic rotation-rate combination from the edge rates of ``zdot``.

    The log-derivative of the cross ratio of a conformal deformation is
    purely imaginary and equals ``q`` edgewise; equivalently the circle
    intersection angles change at rate ``Im q``.
    """
    mesh = r.mesh
    q = qdiff_from_function(r, u).values
    q_scale = max(float(np.abs(q).max()) if len(q) else 0.0, 1e-300)

    zdot = np.asarray(zdot, dtype=complex)
    scale = r.edge_scale()
    t = 1e-6 * scale / max(float(np.abs(zdot).max()), 1e-300)
    cr0 = cross_ratios(r)
    crp = cross_ratios(Realization(mesh, r.z + t * zdot))
    crm = cross_ratios(Realization(mesh, r.z - t * zdot))
    dlog_cr = (crp - crm) / (2.0 * t * cr0)
    fd_err = float(np.abs(q - dlog_cr).max() / q_scale) if len(q) else 0.0

    # analytic: d/dt log cr = c(e_jk) - c(e_ki) + c(e_il) - c(e_lj)
    c = edge_rates(r, zdot).complex_rate
    eidx = mesh.edge_index

    def ce(a, b):
        return c[eidx[(min(a, b), max(a, b))]]

    ana_err = 0.0
    for idx, e in enumerate(mesh.interior_edges):
        i, j, k, l = mesh.edge_flap(e)
        comb = ce(j, k) - ce(k, i) + ce(i, l) - ce(l, j)
        ana_err = max(ana_err, abs(q[idx] - comb) / q_scale)

    # q = i phi_dot, so the expected angle rate is Im(q)
    phip = intersection_angles(Realization(mesh, r.z + t * zdot))
    phim = intersection_angles(Realization(mesh, r.z - t * zdot))
    dphi = np.angle(np.exp(1j * (phip - phim))) / (2.0 * t)
    if len(q):
        dphi_scale = max(float(np.abs(dphi).max()), 1e-300)
        angle_err = float(np.abs(dphi - q.imag).max() / dphi_scale)
    else:
        angle_err = 0.0
    ok = fd_err <= fd_tol and ana_err <= analytic_tol and angle_err <= fd_tol
    return RateCheckReport(ok, fd_err, ana_err, angle_err)
