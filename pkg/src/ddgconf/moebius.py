"""CP^1 / sl(2,C) layer: fractional linear maps, lifts, the closed
sl(2,C)-valued dual 1-form determined by per-edge cross-ratio rates, its
Pauli-basis coordinates, and transition matrices between two realizations."""

from dataclasses import dataclass, field

import numpy as np

from .deform import edge_rates
from .errors import CoincidentVertices, DegenerateFace, MeshMismatch, VertexAtInfinity
from .realization import Realization, cross_ratios

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, 1j], [-1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass
class MoebiusMap:
    """``z -> (a z + b) / (c z + d)``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def normalized(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise DegenerateFace("Moebius map has zero determinant")
        s = np.sqrt(det)
        return MoebiusMap(self.a / s, self.b / s, self.c / s, self.d / s)

    def apply(self, z):
        z = np.asarray(z, dtype=complex)
        den = self.c * z + self.d
        scale = max(abs(self.c), abs(self.d))
        if np.any(np.abs(den) < 1e-12 * scale):
            raise VertexAtInfinity("Moebius map sends a vertex (numerically) to infinity")
        return (self.a * z + self.b) / den

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)


def lift(z):
    """CP^1 lift ``(z, 1)`` per vertex, shape (n, 2)."""
    z = np.asarray(z, dtype=complex)
    return np.stack([z, np.ones_like(z)], axis=1)


def sl2_from_pauli(vec):
    return vec[0] * PAULI[0] + vec[1] * PAULI[1] + vec[2] * PAULI[2]


def pauli_from_sl2(m):
    return np.array(
        [(m[0, 1] + m[1, 0]) / 2.0, (m[0, 1] - m[1, 0]) / 2j, m[0, 0]], dtype=complex
    )


@dataclass
class SlForm:
    """Traceless-matrix-valued dual 1-form on canonical interior dual edges,
    together with its Pauli coordinates and the defining edge rates.

    ``matrices[idx]`` is the value on the dual edge of the canonical
    orientation ``i -> j`` (i < j); the reversed dual edge carries the
    negated matrix.
    """

    rates: np.ndarray  # mu per interior edge
    matrices: np.ndarray  # (n, 2, 2)
    vectors: np.ndarray  # (n, 3) Pauli coordinates


def sl2_form_from_rates(r: Realization, mu) -> SlForm:
    """Dual sl(2,C) 1-form with eigenvalues ``-mu`` / ``+mu`` on the lifts of
    the two edge endpoints:
    ``(mu / (z_j - z_i)) [[z_i + z_j, -2 z_i z_j], [2, -z_i - z_j]]``."""
    mu = np.asarray(mu, dtype=complex)
    mesh = r.mesh
    n = len(mesh.interior_edges)
    if mu.shape != (n,):
        raise MeshMismatch(f"expected {n} edge rates, got {mu.shape}")
    mats = np.empty((n, 2, 2), dtype=complex)
    vecs = np.empty((n, 3), dtype=complex)
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        zi, zj = r.z[i], r.z[j]
        if zi == zj:
            raise CoincidentVertices(f"edge {mesh.edges[e]} has coincident endpoints")
        f = mu[idx] / (zj - zi)
        mats[idx] = f * np.array([[zi + zj, -2.0 * zi * zj], [2.0, -zi - zj]])
        vecs[idx] = f * np.array([1.0 - zi * zj, 1j * (1.0 + zi * zj), zi + zj])
    return SlForm(mu, mats, vecs)


def rates_from_deformation(r: Realization, zdot):
    """Per-edge rate ``mu = -1/2 d/dt log cr`` of a vertex deformation,
    evaluated analytically from the edge rates."""
    c = edge_rates(r, zdot).complex_rate
    mesh = r.mesh
    eidx = mesh.edge_index

    def ce(a, b):
        return c[eidx[(min(a, b), max(a, b))]]

    mu = np.empty(len(mesh.interior_edges), dtype=complex)
    for idx, e in enumerate(mesh.interior_edges):
        i, j, k, l = mesh.edge_flap(e)
        mu[idx] = -0.5 * (ce(j, k) - ce(k, i) + ce(i, l) - ce(l, j))
    return mu


@dataclass
class ClosednessReport:
    closed: bool
    matrix_defect: dict  # interior vertex -> norm of the matrix sum
    rate_sum_defect: dict  # interior vertex -> |sum mu|
    weighted_rate_defect: dict  # interior vertex -> |sum mu / (z_j - z_i)|
    max_defect: float  # worst normalized defect
    equivalence_ok: bool  # matrix sum vanishes iff both scalar sums do


def check_sl2_form_closed(r: Realization, form: SlForm, tol=1e-10) -> ClosednessReport:
    """Closedness of the matrix form at interior vertices, cross-checked
    against the two scalar rate sums it is equivalent to."""
    mesh = r.mesh
    pos = {e: idx for idx, e in enumerate(mesh.interior_edges)}
    mat_scale = max(float(np.abs(form.matrices).max()) if len(form.matrices) else 0.0, 1e-300)
    mu = form.rates
    mu_scale = max(float(np.abs(mu).max()) if len(mu) else 0.0, 1e-300)

    # global scale of the weighted terms, so vertices where mu happens to be
    # locally tiny do not register rounding noise as a defect
    w_scale = 1e-300
    sums = {}
    for v, cycle in mesh.dual_cycles().items():
        msum = np.zeros((2, 2), dtype=complex)
        s0 = 0.0 + 0.0j
        s1 = 0.0 + 0.0j
        for de in cycle:
            idx = pos[de.edge]
            sign = 1.0 if de.tail == min(de.tail, de.head) else -1.0
            msum += sign * form.matrices[idx]
            s0 += mu[idx]
            other = de.head if de.tail == v else de.tail
            term = mu[idx] / (r.z[other] - r.z[v])
            s1 += term
            w_scale = max(w_scale, abs(term))
        sums[v] = (msum, s0, s1)

    matrix_defect = {}
    rate_defect = {}
    weighted_defect = {}
    max_defect = 0.0
    equivalence_ok = True
    for v, (msum, s0, s1) in sums.items():
        mnorm = float(np.abs(msum).max()) / mat_scale
        matrix_defect[v] = mnorm
        rate_defect[v] = abs(s0) / mu_scale
        weighted_defect[v] = abs(s1) / w_scale
        max_defect = max(max_defect, mnorm, rate_defect[v], weighted_defect[v])
        scalar_ok = rate_defect[v] <= tol and weighted_defect[v] <= tol
        if (mnorm <= tol) != scalar_ok:
            equivalence_ok = False
    return ClosednessReport(
        max_defect <= tol, matrix_defect, rate_defect, weighted_defect, max_defect, equivalence_ok
    )


def _normal_form(p1, p2, p3):
    """Matrix of the fractional linear map sending (p1, p2, p3) -> (0, 1, inf)."""
    return np.array(
        [[p2 - p3, -p1 * (p2 - p3)], [p2 - p1, -p3 * (p2 - p1)]], dtype=complex
    )


def face_moebius(a_triple, b_triple):
    """SL(2,C) matrix (up to sign) of the unique Moebius map taking the three
    points of ``a_triple`` to those of ``b_triple``."""
    na = _normal_form(*a_triple)
    nb = _normal_form(*b_triple)
    det_nb = np.linalg.det(nb)
    if det_nb == 0:
        raise DegenerateFace("coincident points in face triple")
    nb_inv = np.array([[nb[1, 1], -nb[0, 1]], [-nb[1, 0], nb[0, 0]]]) / det_nb
    m = nb_inv @ na
    det = np.linalg.det(m)
    if det == 0:
        raise DegenerateFace("coincident points in face triple")
    return m / np.sqrt(det)


def _fix_sign(m):
    """Deterministic sign for an SL(2,C) matrix: nonnegative real trace,
    tie-broken by the imaginary trace and the first entry."""
    t = np.trace(m)
    if abs(t.real) > 1e-12:
        return m if t.real > 0 else -m
    if abs(t.imag) > 1e-12:
        return m if t.imag > 0 else -m
    flat = m.reshape(-1)
    for x in flat:
        if abs(x.real) > 1e-12:
            return m if x.real > 0 else -m
        if abs(x.imag) > 1e-12:
            return m if x.imag > 0 else -m
    return m


@dataclass
class TransitionReport:
    face_maps: np.ndarray  # (F, 2, 2) per-face SL(2,C) maps a -> b
    transitions: np.ndarray  # (n_int, 2, 2) G on canonical interior dual edges
    eigenvalues: np.ndarray  # lambda per interior edge
    max_eigen_residual: float  # eigen-relation residual, relative
    max_cr_residual: float  # |cr_b - cr_a / lambda^2| relative
    max_cycle_residual: float  # | prod G - I | around interior vertices
    cross_ratios_a: np.ndarray = field(repr=False, default=None)
    cross_ratios_b: np.ndarray = field(repr=False, default=None)


def transition_matrices(a: Realization, b: Realization) -> TransitionReport:
    """Per-face Moebius maps from ``a`` to ``b`` and the multiplicative dual
    1-form ``G(e*_ij) = A_right^{-1} A_left`` with its eigenvalues."""
    if a.mesh is not b.mesh and a.mesh.faces != b.mesh.faces:
        raise MeshMismatch("realizations live on different meshes")
    mesh = a.mesh

    face_maps = np.empty((len(mesh.faces), 2, 2), dtype=complex)
    for f, (i, j, k) in enumerate(mesh.faces):
        m = face_moebius(
            (a.z[i], a.z[j], a.z[k]), (b.z[i], b.z[j], b.z[k])
        )
        face_maps[f] = _fix_sign(m)

    n = len(mesh.interior_edges)
    G = np.empty((n, 2, 2), dtype=complex)
    lam = np.empty(n, dtype=complex)
    eig_res = 0.0
    psi = lift(a.z)
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        al = face_maps[mesh.edge_left[e]]
        ar = face_maps[mesh.edge_right[e]]
        ar_inv = np.array([[ar[1, 1], -ar[0, 1]], [-ar[1, 0], ar[0, 0]]])
        g = ar_inv @ al
        G[idx] = g
        wj = g @ psi[j]
        lam[idx] = wj[1]  # second lift component is 1
        wi = g @ psi[i]
        scale = max(float(np.abs(g).max()), 1e-300) * max(abs(a.z[i]), abs(a.z[j]), 1.0)
        eig_res = max(
            eig_res,
            float(np.abs(wj - lam[idx] * psi[j]).max()) / scale,
            float(np.abs(wi - psi[i] / lam[idx]).max()) / scale,
        )

    cra = cross_ratios(a)
    crb = cross_ratios(b)
    if n:
        cr_res = float(np.abs(crb - cra / lam**2).max() / np.abs(cra).max())
    else:
        cr_res = 0.0

    pos = {e: idx for idx, e in enumerate(mesh.interior_edges)}
    cyc_res = 0.0
    for v, cycle in mesh.dual_cycles().items():
        p = np.eye(2, dtype=complex)
        for de in cycle:
            idx = pos[de.edge]
            g = G[idx]
            if de.tail != min(de.tail, de.head):
                g = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
            p = p @ g
        cyc_res = max(cyc_res, float(np.abs(p - np.eye(2)).max()))

    return TransitionReport(face_maps, G, lam, eig_res, cr_res, cyc_res, cra, crb)
