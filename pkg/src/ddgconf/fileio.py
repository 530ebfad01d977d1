"""OBJ and JSON interchange.

Planar realizations travel as OBJ with ``v x y 0`` lines (x, y = Re z, Im z);
edge-indexed data as JSON maps keyed ``"i-j"`` with ``i < j``.  All floats are
written with 17 significant digits so reports are byte-reproducible.
"""

import json

import numpy as np

from .errors import DDGError
from .mesh import TriMesh, build

PLANAR_Z_TOL = 1e-12


def _fmt(x):
    return f"{float(x):.17g}"


def read_obj(path):
    """Read a triangle OBJ; returns ``(TriMesh, vertices (n, 3))``."""
    verts = []
    faces = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise DDGError(f"malformed vertex line: {line.strip()}")
                verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                faces.append(tuple(idx))
    verts = np.array(verts, dtype=float)
    tri = [f for f in faces]
    if any(len(f) != 3 for f in tri):
        raise DDGError("OBJ contains non-triangular faces")
    return build(tri, vertex_count=len(verts)), verts


def read_obj_planar(path):
    """Read an OBJ carrying a planar realization; the third coordinate must
    vanish.  Returns ``(TriMesh, z)``."""
    mesh, verts = read_obj(path)
    scale = max(1.0, float(np.abs(verts).max()))
    if np.any(np.abs(verts[:, 2]) > PLANAR_Z_TOL * scale):
        raise DDGError("OBJ is not planar: third coordinate is nonzero")
    return mesh, verts[:, 0] + 1j * verts[:, 1]


def read_obj_polygons(path):
    """Read an OBJ with arbitrary polygonal faces; returns ``(vertices, faces)``."""
    verts = []
    faces = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif parts[0] == "f":
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
    return np.array(verts, dtype=float), faces


def write_obj(path, vertices, faces):
    """Write an OBJ; ``vertices`` is (n, 3), ``faces`` a list of polygons."""
    vertices = np.asarray(vertices, dtype=float)
    with open(path, "w") as fh:
        for v in vertices:
            fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
        for f in faces:
            fh.write("f " + " ".join(str(i + 1) for i in f) + "\n")


def write_obj_planar(path, mesh: TriMesh, z):
    z = np.asarray(z, dtype=complex)
    verts = np.stack([z.real, z.imag, np.zeros_like(z.real)], axis=1)
    write_obj(path, verts, mesh.faces)


# -- JSON ----------------------------------------------------------------------


def edge_key(i, j):
    return f"{min(i, j)}-{max(i, j)}"


def dump_json(obj):
    """Deterministic JSON with floats at 17 significant digits."""

    def convert(x):
        if isinstance(x, dict):
            return {k: convert(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [convert(v) for v in x]
        if isinstance(x, (np.bool_, bool)):
            return bool(x)
        if isinstance(x, (np.floating, float)):
            return float(f"{float(x):.17g}")
        if isinstance(x, (np.integer, int)):
            return int(x)
        if isinstance(x, (np.complexfloating, complex)):
            return [convert(float(x.real)), convert(float(x.imag))]
        if isinstance(x, np.ndarray):
            return [convert(v) for v in x.tolist()]
        return x

    return json.dumps(convert(obj), indent=2, sort_keys=False) + "\n"


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def vertex_field_from_json(data, vertex_count, real=True):
    """Vertex data from a JSON array or ``{"index": value}`` map; complex
    values travel as ``[re, im]`` pairs."""
    if isinstance(data, dict) and "z" in data:
        data = data["z"]
    if isinstance(data, dict) and "values" in data:
        data = data["values"]

    def scalar(v):
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1])
        return float(v)

    if isinstance(data, dict):
        out = np.zeros(vertex_count, dtype=float if real else complex)
        for key, v in data.items():
            out[int(key)] = scalar(v)
        return out
    arr = [scalar(v) for v in data]
    if len(arr) != vertex_count:
        raise DDGError(f"vertex data has length {len(arr)}, expected {vertex_count}")
    return np.array(arr, dtype=float if real else complex)


def boundary_data_from_json(data, mesh: TriMesh):
    """Boundary values as a dict keyed by boundary vertex."""
    if isinstance(data, dict) and "boundary" in data:
        data = data["boundary"]
    if isinstance(data, dict):
        return {int(k): float(v) for k, v in data.items()}
    arr = np.asarray(data, dtype=float)
    return {v: float(arr[v]) for v in mesh.boundary_vertices}


def edge_map_to_json(mesh: TriMesh, values, scalar="auto"):
    """Interior-edge data as an ``"i-j"`` keyed map."""
    out = {}
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        v = values[idx]
        if scalar == "real" or (scalar == "auto" and not isinstance(v, (complex, np.complexfloating))):
            out[edge_key(i, j)] = float(v)
        else:
            out[edge_key(i, j)] = v
    return out


def qdiff_from_json(data, mesh: TriMesh):
    """Quadratic differential from a ``"i-j" -> imaginary part`` map (or a
    ``{"q": {...}}`` wrapper); returns a complex per-interior-edge array."""
    if isinstance(data, dict) and "q" in data:
        data = data["q"]
    out = np.zeros(len(mesh.interior_edges), dtype=complex)
    pos = {}
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        pos[edge_key(i, j)] = idx
    for key, v in data.items():
        if key not in pos:
            raise DDGError(f"'{key}' is not an interior edge")
        if isinstance(v, (list, tuple)):
            out[pos[key]] = complex(v[0], v[1])
        else:
            out[pos[key]] = 1j * float(v)
    return out


def mu_from_json(data, mesh: TriMesh):
    """Complex per-interior-edge rates from an ``"i-j" -> [re, im]`` map."""
    if isinstance(data, dict) and "mu" in data:
        data = data["mu"]
    out = np.zeros(len(mesh.interior_edges), dtype=complex)
    pos = {}
    for idx, e in enumerate(mesh.interior_edges):
        i, j = mesh.edges[e]
        pos[edge_key(i, j)] = idx
    for key, v in data.items():
        if key not in pos:
            raise DDGError(f"'{key}' is not an interior edge")
        if isinstance(v, (list, tuple)):
            out[pos[key]] = complex(v[0], v[1])
        else:
            out[pos[key]] = float(v)
    return out
