"""Cotangent Laplacian: edge weights, harmonicity, Dirichlet solves and the
conjugate harmonic function on faces."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import MissingBoundaryData, NotHarmonic, SingularSystem
from .realization import Realization

# downstream operations accept h as harmonic when |Lh|_inf <= HARMONIC_RTOL * |dh|_inf
HARMONIC_RTOL = 1e-8


def cotan_weights(r: Realization):
    """``w_ij = cot(angle at left apex) + cot(angle at right apex)`` per
    interior edge, with signed angles (negatively oriented faces contribute
    negated cotangents)."""
    mesh = r.mesh
    w = np.empty(len(mesh.interior_edges))
    for idx, e in enumerate(mesh.interior_edges):
        i, j, k, l = mesh.edge_flap(e)
        w[idx] = r.cot_at(mesh.edge_left[e], k) + r.cot_at(mesh.edge_right[e], l)
    return w


def laplacian(r: Realization, h):
    """Weighted vertex sums ``sum_j w_ij (h_j - h_i)`` at interior vertices.

    Returns an array aligned with ``mesh.interior_vertices``.
    """
    mesh = r.mesh
    h = np.asarray(h)
    w = cotan_weights(r)
    acc = np.zeros(mesh.vertex_count, dtype=h.dtype if h.dtype.kind == "c" else float)
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        acc[i] += w[idx] * (h[j] - h[i])
        acc[j] += w[idx] * (h[i] - h[j])
    return acc[mesh.interior_vertices]


def gradient_scale(r: Realization, h):
    """``max |h_j - h_i|`` over edges; the natural scale of dh."""
    h = np.asarray(h)
    d = [abs(h[j] - h[i]) for i, j in r.mesh.edges]
    return float(max(d)) if d else 0.0


def require_harmonic(r: Realization, h, rtol=HARMONIC_RTOL):
    res = laplacian(r, h)
    res_norm = float(np.abs(res).max()) if len(res) else 0.0
    scale = gradient_scale(r, h)
    if scale == 0.0:
        return  # constant functions are harmonic
    if res_norm > rtol * scale:
        raise NotHarmonic(
            f"Laplacian residual {res_norm:.3e} exceeds {rtol:.1e} * |dh| = {rtol * scale:.3e}"
        )


def solve_dirichlet(r: Realization, boundary):
    """Harmonic extension of boundary data.

    ``boundary`` maps boundary vertex -> value (a dict, or a full-length array
    whose boundary entries are used).  The interior system is solved by sparse
    LU with one step of iterative refinement; the result satisfies
    ``|Lh|_inf <= 1e-10 * |h|_inf``.
    """
    mesh = r.mesh
    mesh.require_disk()
    ni = len(mesh.interior_vertices)

    g = np.zeros(mesh.vertex_count)
    if isinstance(boundary, dict):
        for v in mesh.boundary_vertices:
            if v not in boundary:
                raise MissingBoundaryData(f"no boundary value for vertex {v}")
            g[v] = boundary[v]
    else:
        boundary = np.asarray(boundary, dtype=float)
        if boundary.shape != (mesh.vertex_count,):
            raise MissingBoundaryData(
                f"boundary array must have length {mesh.vertex_count}"
            )
        g = boundary.copy()

    if ni == 0:
        return g

    w = cotan_weights(r)
    int_pos = {v: p for p, v in enumerate(mesh.interior_vertices)}

    rows, cols, vals = [], [], []
    diag = np.zeros(ni)
    b = np.zeros(ni)
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        for a, c in ((i, j), (j, i)):
            if a in int_pos:
                pa = int_pos[a]
                diag[pa] -= w[idx]
                if c in int_pos:
                    rows.append(pa)
                    cols.append(int_pos[c])
                    vals.append(w[idx])
                else:
                    b[pa] -= w[idx] * g[c]
    rows.extend(range(ni))
    cols.extend(range(ni))
    vals.extend(diag)
    A = sp.csc_matrix((vals, (rows, cols)), shape=(ni, ni))

    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise SingularSystem(f"interior cotan system is singular: {exc}") from exc
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SingularSystem("interior cotan system produced non-finite values")

    # iterative refinement down to the residual contract
    h_scale = max(float(np.abs(g).max()), float(np.abs(x).max()), 1e-300)
    for _ in range(3):
        res = A @ x - b
        if float(np.abs(res).max()) <= 1e-12 * h_scale:
            break
        x = x - lu.solve(res)

    h = g.copy()
    h[mesh.interior_vertices] = x
    return h


@dataclass
class ConjugateHarmonic:
    face_potential: np.ndarray  # omega~ per face, anchored 0 on the anchor face
    edge_rotation: np.ndarray  # omega per edge (all edges)
    closure_defect: float  # worst dual co-tree defect, relative


def conjugate_harmonic(r: Realization, h, anchor_face=0, rtol=HARMONIC_RTOL):
    """Face potential of the rotation part of the deformation induced by a
    harmonic ``h``.

    ``omega~`` integrates the dual 1-form ``(w_ij / 2) (h_j - h_i)`` over a
    dual spanning tree;
    ``omega_ij = omega~_left - (1/2) cot(beta at left apex) (h_j - h_i)``,
    with the right-face evaluation agreeing by harmonicity.  The factor 1/2
    makes the per-face rotation rates compatible with the edge scale rates
    ``(h_i + h_j) / 2``; see :func:`ddgconf.deform.check_triangle_compat`.
    """
    mesh = r.mesh
    mesh.require_disk()
    h = np.asarray(h, dtype=float)
    require_harmonic(r, h, rtol)

    w = cotan_weights(r)
    dual_form = np.zeros(len(mesh.edges))
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        dual_form[e] = 0.5 * w[idx] * (h[j] - h[i])

    steps, cotree = mesh.dual_spanning_tree(anchor_face)
    wt = np.zeros(len(mesh.faces))
    for face, parent, e, sign in steps:
        wt[face] = wt[parent] + sign * dual_form[e]

    scale = max(float(np.abs(dual_form).max()), 1e-300)
    defect = 0.0
    for e in cotree:
        fl, fr = mesh.edge_left[e], mesh.edge_right[e]
        defect = max(defect, abs(wt[fl] - wt[fr] - dual_form[e]) / scale)

    omega = np.empty(len(mesh.edges))
    for e in range(len(mesh.edges)):
        i, j = mesh.edges[e]
        fl = mesh.edge_left[e]
        if fl is not None:
            k = mesh.opposite_vertex(fl, i, j)
            omega[e] = wt[fl] - 0.5 * r.cot_at(fl, k) * (h[j] - h[i])
        else:
            fr = mesh.edge_right[e]
            l = mesh.opposite_vertex(fr, i, j)
            omega[e] = wt[fr] + 0.5 * r.cot_at(fr, l) * (h[j] - h[i])
    return ConjugateHarmonic(wt, omega, defect)
