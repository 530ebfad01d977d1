"""Discrete Weierstrass representation: from a planar realization and a
holomorphic quadratic differential to a discrete minimal surface on faces,
with Gauss map by inverse stereographic projection and the associate family
obtained by rotating the complex null-curve potential."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationDefect, MeshMismatch, NotHolomorphic, NotMinimal
from .hqd import QuadDiff, _as_complex, verify_qdiff
from .realization import Realization


def gauss_map(r: Realization):
    """Unit sphere positions ``(2 Re z, 2 Im z, |z|^2 - 1) / (|z|^2 + 1)``."""
    z = r.z
    s = np.abs(z) ** 2
    n = np.stack([2.0 * z.real, 2.0 * z.imag, s - 1.0], axis=1)
    return n / (s + 1.0)[:, None]


def stereographic_to_plane(n):
    """Inverse of :func:`gauss_map` on sphere points away from the north pole."""
    n = np.asarray(n, dtype=float)
    den = 1.0 - n[:, 2]
    if np.any(np.abs(den) < 1e-12):
        from .errors import VertexAtInfinity

        raise VertexAtInfinity("Gauss map touches the north pole")
    return (n[:, 0] + 1j * n[:, 1]) / den


def reduce_phase(alpha):
    """Reduce a phase modulo 2*pi (IEEE remainder, exact), making the
    associate family periodic."""
    return math.remainder(float(alpha), math.tau)


def integrand(r: Realization, q):
    """C^3-valued dual 1-form ``(q / (i dz)) (1 - z_i z_j, i(1 + z_i z_j),
    z_i + z_j)`` on canonical interior dual edges."""
    q = _as_complex(q)
    mesh = r.mesh
    out = np.empty((len(mesh.interior_edges), 3), dtype=complex)
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        zi, zj = r.z[i], r.z[j]
        f = q[idx] / (1j * (zj - zi))
        out[idx] = f * np.array([1.0 - zi * zj, 1j * (1.0 + zi * zj), zi + zj])
    return out


@dataclass
class MinimalSurface:
    mesh: object
    potential: np.ndarray  # complex null-curve potential per face, (F, 3)
    f: np.ndarray  # real face positions Re(e^{i alpha} potential), (F, 3)
    k: np.ndarray  # real edge curvature factor -i q / |dz|^2
    alpha: float
    closure_defect: float  # worst dual co-tree defect, relative

    def at_phase(self, alpha):
        """Member of the associate family for another phase (same potential)."""
        phase = np.exp(1j * reduce_phase(alpha))
        return MinimalSurface(
            self.mesh,
            self.potential,
            (phase * self.potential).real,
            self.k,
            float(alpha),
            self.closure_defect,
        )


def weierstrass_integrate(r: Realization, q, alpha=0.0, anchor_face=0, tol=1e-8):
    """Integrate the Weierstrass 1-form of a holomorphic quadratic
    differential over a dual spanning tree (anchored to 0 on ``anchor_face``).
    """
    mesh = r.mesh
    mesh.require_disk()
    report = verify_qdiff(r, q, tol)
    if not report.holomorphic:
        raise NotHolomorphic(
            f"quadratic differential fails verification (defect {report.max_defect:.3e})"
        )
    q = _as_complex(q)

    eta = integrand(r, q)
    form = np.zeros((len(mesh.edges), 3), dtype=complex)
    for idx, e in enumerate(mesh.interior_edges):
        form[e] = eta[idx]
    scale = max(float(np.abs(eta).max()) if len(eta) else 0.0, 1e-300)

    steps, cotree = mesh.dual_spanning_tree(anchor_face)
    pot = np.zeros((len(mesh.faces), 3), dtype=complex)
    for face, parent, e, sign in steps:
        pot[face] = pot[parent] + sign * form[e]
    defect = 0.0
    for e in cotree:
        fl, fr = mesh.edge_left[e], mesh.edge_right[e]
        gap = float(np.abs(pot[fl] - pot[fr] - form[e]).max())
        defect = max(defect, gap / scale)
        if gap > 1e-9 * scale:
            raise IntegrationDefect(
                f"Weierstrass form fails to close across edge {mesh.edges[e]}",
                edge=mesh.edges[e],
                defect=gap,
            )

    k = np.empty(len(mesh.interior_edges))
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        k[idx] = (-1j * q[idx] / abs(r.z[j] - r.z[i]) ** 2).real

    phase = np.exp(1j * reduce_phase(alpha))
    f = (phase * pot).real
    return MinimalSurface(mesh, pot, f, k, float(alpha), defect)


@dataclass
class MinimalityReport:
    minimal: bool
    max_residual: float  # worst normalized cross-product residual
    residual: np.ndarray  # per interior edge
    k: np.ndarray  # least-squares edge factor from the parallelism relation
    orthogonal_part: np.ndarray  # norm of df orthogonal to (n_j - n_i)


def verify_minimal(mesh, n, f, tol=1e-9) -> MinimalityReport:
    """Edge-parallelism test ``(n_j - n_i) x (f_left - f_right) = 0`` with the
    per-edge factor recovered by least squares.

    Residuals are normalized against the largest dual edge so that edges whose
    position difference sits at rounding level (vanishing curvature factor) do
    not register as spurious failures."""
    n = np.asarray(n, dtype=float)
    f = np.asarray(f, dtype=float)
    if n.shape != (mesh.vertex_count, 3):
        raise MeshMismatch(f"Gauss map must have shape ({mesh.vertex_count}, 3)")
    if f.shape != (len(mesh.faces), 3):
        raise MeshMismatch(f"face positions must have shape ({len(mesh.faces)}, 3)")

    m = len(mesh.interior_edges)
    residual = np.zeros(m)
    k = np.zeros(m)
    ortho = np.zeros(m)
    dfs = np.array(
        [
            f[mesh.edge_left[e]] - f[mesh.edge_right[e]]
            for e in mesh.interior_edges
        ]
    ).reshape(m, 3)
    df_scale = float(np.linalg.norm(dfs, axis=1).max()) if m else 0.0
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        dn = n[j] - n[i]
        df = dfs[idx]
        dn_norm = np.linalg.norm(dn)
        if df_scale == 0.0:
            continue
        cross = np.cross(dn, df)
        residual[idx] = np.linalg.norm(cross) / (dn_norm * df_scale)
        # df = k * (1 + |z_i|^2)(1 + |z_j|^2)/2 * dn; the raw projection onto dn
        proj = float(dn @ df) / dn_norm**2
        k[idx] = proj
        ortho[idx] = np.linalg.norm(df - proj * dn)
    max_res = float(residual.max()) if m else 0.0
    return MinimalityReport(max_res <= tol, max_res, residual, k, ortho)


def qdiff_from_minimal(r: Realization, f, tol=1e-9) -> QuadDiff:
    """Recover the quadratic differential of a discrete minimal surface with
    Gauss map given by the realization: ``q = i k |dz|^2`` with ``k`` from the
    edge-parallelism relation."""
    mesh = r.mesh
    n = gauss_map(r)
    report = verify_minimal(mesh, n, f, tol)
    if not report.minimal:
        raise NotMinimal(
            f"surface fails the edge-parallelism test (residual {report.max_residual:.3e})"
        )
    q_imag = np.empty(len(mesh.interior_edges))
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        scale = (1.0 + abs(r.z[i]) ** 2) * (1.0 + abs(r.z[j]) ** 2) / 2.0
        k = report.k[idx] / scale
        q_imag[idx] = k * abs(r.z[j] - r.z[i]) ** 2
    return QuadDiff(q_imag)


def dual_mesh(r: Realization, face_points):
    """Polygonal dual mesh: one vertex per face of the primal mesh, one face
    per interior primal vertex (ordered along the counterclockwise star)."""
    mesh = r.mesh
    cycles = mesh.dual_cycles()
    polys = [[de.to_face for de in cycles[v]] for v in mesh.interior_vertices]
    return np.asarray(face_points, dtype=float), polys
