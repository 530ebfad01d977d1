"""Planar realizations: vertex positions, cross ratios, circle intersection
angles and the two finite conformality tests with their per-vertex
scale-factor / rotation-offset reconstructions.

All per-interior-edge arrays are aligned with ``mesh.interior_edges``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFace, MeshMismatch
from .mesh import TriMesh

TAU = 2.0 * np.pi

COLLINEAR_TOL = 1e-14


class Realization:
    """A triangular mesh with one complex position per vertex.

    Caches signed face areas, per-corner cotangents and circumradii.  Faces
    may be negatively oriented; areas and corner angles then carry a negative
    sign.
    """

    def __init__(self, mesh: TriMesh, z):
        z = np.asarray(z, dtype=complex)
        if z.shape != (mesh.vertex_count,):
            raise MeshMismatch(
                f"expected {mesh.vertex_count} vertex positions, got {z.shape}"
            )
        self.mesh = mesh
        self.z = z

        tri = np.array(mesh.faces)
        zi, zj, zk = z[tri[:, 0]], z[tri[:, 1]], z[tri[:, 2]]
        # signed doubled area = Im(conj(z_j - z_i) (z_k - z_i))
        self.area2 = (np.conj(zj - zi) * (zk - zi)).imag
        self.area = 0.5 * self.area2

        lengths = np.abs(np.stack([zk - zj, zi - zk, zj - zi]))
        scale = lengths.max(axis=0)
        bad = np.abs(self.area2) <= COLLINEAR_TOL * scale**2
        if bad.any():
            f = int(np.flatnonzero(bad)[0])
            raise DegenerateFace(f"face {f} {mesh.faces[f]} is (nearly) collinear", face=f)

        # cot of the (signed) corner angle at each face vertex
        def corner_cot(a, b, c):
            u = b - a
            v = c - a
            w = np.conj(u) * v
            return w.real / w.imag

        self.cot = np.stack(
            [corner_cot(zi, zj, zk), corner_cot(zj, zk, zi), corner_cot(zk, zi, zj)],
            axis=1,
        )
        self.circumradius = (
            lengths[0] * lengths[1] * lengths[2] / (2.0 * np.abs(self.area2))
        )
        self._corner_cot_lookup = {
            (f, v): self.cot[f, m]
            for f, face in enumerate(mesh.faces)
            for m, v in enumerate(face)
        }

    def cot_at(self, face, vertex):
        """Signed cotangent of the corner angle of ``face`` at ``vertex``."""
        return self._corner_cot_lookup[(face, vertex)]

    def edge_vector(self, e):
        i, j = self.mesh.edges[e]
        return self.z[j] - self.z[i]

    def edge_scale(self):
        return float(np.abs([self.edge_vector(e) for e in range(len(self.mesh.edges))]).max())

    def flap_points(self):
        """Vertex indices ``(i, j, k, l)`` per interior edge, as arrays."""
        flaps = np.array([self.mesh.edge_flap(e) for e in self.mesh.interior_edges])
        if flaps.size == 0:
            flaps = flaps.reshape(0, 4)
        return flaps[:, 0], flaps[:, 1], flaps[:, 2], flaps[:, 3]


def cross_ratios(r: Realization):
    """Complex cross ratio per interior edge.

    For the interior edge ``{i, j}`` with left-face apex ``k`` and right-face
    apex ``l``:  ``(z_j - z_k)(z_i - z_l) / ((z_k - z_i)(z_l - z_j))``.
    """
    i, j, k, l = r.flap_points()
    z = r.z
    num = (z[j] - z[k]) * (z[i] - z[l])
    den = (z[k] - z[i]) * (z[l] - z[j])
    if np.any(den == 0) or np.any(num == 0):
        e = int(np.flatnonzero((den == 0) | (num == 0))[0])
        raise DegenerateFace(
            f"coincident vertices at interior edge {r.mesh.edges[r.mesh.interior_edges[e]]}"
        )
    return num / den


def intersection_angles(r: Realization):
    """Circumcircle intersection angle per interior edge, in ``[0, 2*pi)``."""
    return np.angle(cross_ratios(r)) % TAU


@dataclass
class EquivalenceReport:
    equivalent: bool
    max_deviation: float  # worst edgewise mismatch (relative |cr| or angle)
    factors: np.ndarray | None  # per-vertex u (log scale) or alpha (angle)
    factor_spread: float  # worst disagreement between incident triangles


def _per_vertex_from_edges(mesh: TriMesh, edge_value, reduce_mod_tau=False):
    """Combine per-edge values ``s`` into per-vertex values via
    ``s_ki + s_ij - s_jk`` over every incident triangle.

    Returns the value from the first incident triangle and the max pairwise
    spread across triangles (modulo 2*pi when requested).
    """
    values = np.zeros(mesh.vertex_count)
    spread = 0.0
    eidx = mesh.edge_index

    def s(a, b):
        return edge_value[eidx[(min(a, b), max(a, b))]]

    per_vertex = [[] for _ in range(mesh.vertex_count)]
    for (i, j, k) in mesh.faces:
        for v, a, b in ((i, j, k), (j, k, i), (k, i, j)):
            # triangle {v, a, b}: u_v = s_bv + s_va - s_ab
            per_vertex[v].append(s(b, v) + s(v, a) - s(a, b))
    for v, vals in enumerate(per_vertex):
        vals = np.array(vals)
        if reduce_mod_tau:
            base = vals[0]
            diff = np.angle(np.exp(1j * (vals - base)))
            spread = max(spread, float(np.abs(diff).max()))
            values[v] = base % TAU
        else:
            spread = max(spread, float(vals.max() - vals.min()))
            values[v] = vals[0]
    return values, spread


def _check_same_mesh(a: Realization, b: Realization):
    if a.mesh is not b.mesh and a.mesh.faces != b.mesh.faces:
        raise MeshMismatch("realizations live on different meshes")


def check_conformal_equiv(a: Realization, b: Realization, tol=1e-9):
    """Edgewise equality of cross-ratio norms, with reconstructed log scale
    factors ``u`` (``|w_j - w_i| = e^{(u_i + u_j)/2} |z_j - z_i|``) when the
    realizations are equivalent."""
    _check_same_mesh(a, b)
    a.mesh.require_disk()
    cra = np.abs(cross_ratios(a))
    crb = np.abs(cross_ratios(b))
    if len(cra):
        max_dev = float(np.max(np.abs(cra - crb) / cra))
    else:
        max_dev = 0.0
    if max_dev > tol:
        return EquivalenceReport(False, max_dev, None, np.inf)

    sigma = np.empty(len(a.mesh.edges))
    for e in range(len(a.mesh.edges)):
        sigma[e] = np.log(np.abs(b.edge_vector(e)) / np.abs(a.edge_vector(e)))
    u, spread = _per_vertex_from_edges(a.mesh, sigma)
    return EquivalenceReport(True, max_dev, u, spread)


def check_pattern(a: Realization, b: Realization, tol=1e-9):
    """Edgewise equality of cross-ratio arguments (circumcircle intersection
    angles), with reconstructed angular offsets ``alpha`` in ``[0, 2*pi)``."""
    _check_same_mesh(a, b)
    a.mesh.require_disk()
    cra = cross_ratios(a)
    crb = cross_ratios(b)
    # principal value of arg(cr_a / cr_b): avoids the branch cut at 0 ~ 2*pi
    if len(cra):
        max_dev = float(np.max(np.abs(np.angle(cra / crb))))
    else:
        max_dev = 0.0
    if max_dev > tol:
        return EquivalenceReport(False, max_dev, None, np.inf)

    omega = np.empty(len(a.mesh.edges))
    for e in range(len(a.mesh.edges)):
        omega[e] = np.angle(b.edge_vector(e) / a.edge_vector(e))
    alpha, spread = _per_vertex_from_edges(a.mesh, omega, reduce_mod_tau=True)
    return EquivalenceReport(True, max_dev, alpha, spread)
