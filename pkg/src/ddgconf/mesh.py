"""Combinatorial kernel: oriented triangular meshes and their dual graph.

A :class:`TriMesh` is purely combinatorial.  Edges are keyed by the sorted
vertex pair ``(i, j)`` with ``i < j``; the face containing the oriented edge
``i -> j`` is the *left* face, the face containing ``j -> i`` the *right*
face.  The dual edge of ``i -> j`` runs from the right face to the left face.
"""

from collections import deque
from typing import NamedTuple

import numpy as np

from .errors import Disconnected, InconsistentOrientation, NonManifold, NotSimplyConnected


class DualEdge(NamedTuple):
    """Dual edge of the oriented primal edge ``tail -> head``."""

    tail: int
    head: int
    from_face: int  # right face of tail -> head
    to_face: int  # left face of tail -> head
    edge: int  # index into TriMesh.edges


class TriMesh:
    def __init__(self, faces, vertex_count=None):
        faces = [tuple(int(v) for v in f) for f in faces]
        if not faces:
            raise Disconnected("mesh has no faces")
        for f in faces:
            if len(f) != 3:
                raise NonManifold(f"face {f} is not a triangle")
            if len(set(f)) != 3:
                raise NonManifold(f"face {f} repeats a vertex")
            if min(f) < 0:
                raise NonManifold(f"face {f} has a negative vertex id")

        n = max(max(f) for f in faces) + 1
        if vertex_count is None:
            vertex_count = n
        elif vertex_count < n:
            raise NonManifold(f"face references vertex >= vertex_count={vertex_count}")

        self.faces = faces
        self.vertex_count = vertex_count

        # Oriented edge -> face.  A duplicate oriented edge means either a
        # non-manifold edge or two faces traversing it the same way.
        oriented = {}
        for fi, (a, b, c) in enumerate(faces):
            for i, j in ((a, b), (b, c), (c, a)):
                if (i, j) in oriented:
                    raise InconsistentOrientation(
                        f"oriented edge ({i},{j}) appears in faces "
                        f"{oriented[(i, j)]} and {fi}"
                    )
                oriented[(i, j)] = fi
        self._face_of_oriented = oriented

        pairs = sorted({(min(i, j), max(i, j)) for (i, j) in oriented})
        self.edges = pairs
        self.edge_index = {e: idx for idx, e in enumerate(pairs)}
        self.edge_left = []
        self.edge_right = []
        for i, j in pairs:
            self.edge_left.append(oriented.get((i, j)))
            self.edge_right.append(oriented.get((j, i)))

        self.interior_edges = [
            e
            for e in range(len(pairs))
            if self.edge_left[e] is not None and self.edge_right[e] is not None
        ]
        interior_set = set(self.interior_edges)
        self.boundary_edges = [e for e in range(len(pairs)) if e not in interior_set]

        self._check_connected()
        self._build_vertex_stars()

        self.is_boundary_vertex = np.zeros(vertex_count, dtype=bool)
        for e in self.boundary_edges:
            i, j = self.edges[e]
            self.is_boundary_vertex[i] = True
            self.is_boundary_vertex[j] = True
        self.boundary_vertices = [v for v in range(vertex_count) if self.is_boundary_vertex[v]]
        self.interior_vertices = [v for v in range(vertex_count) if not self.is_boundary_vertex[v]]

    # -- construction checks -------------------------------------------------

    def _check_connected(self):
        adj = [[] for _ in range(self.vertex_count)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = [False] * self.vertex_count
        stack = [self.edges[0][0]]
        seen[stack[0]] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        if not all(seen):
            missing = [v for v, s in enumerate(seen) if not s]
            raise Disconnected(f"vertices {missing[:8]}... not connected to vertex {self.edges[0][0]}")

    def _build_vertex_stars(self):
        """Order each vertex star counterclockwise and reject non-fan stars."""
        succ = [dict() for _ in range(self.vertex_count)]
        neighbors = [set() for _ in range(self.vertex_count)]
        for a, b, c in self.faces:
            for v, j, k in ((a, b, c), (b, c, a), (c, a, b)):
                if j in succ[v]:
                    raise NonManifold(f"vertex {v} has two faces with the same corner edge")
                succ[v][j] = k
                neighbors[v].update((j, k))

        self._star = []
        for v in range(self.vertex_count):
            nxt = succ[v]
            nbrs = neighbors[v]
            if not nbrs:
                raise Disconnected(f"vertex {v} belongs to no face")
            heads = set(nxt.values())
            starts = [j for j in nxt if j not in heads]
            if len(starts) == 0:
                # closed fan: interior vertex
                start = min(nxt)
                closed = True
            elif len(starts) == 1:
                start = starts[0]
                closed = False
            else:
                raise NonManifold(f"vertex star of {v} is not a single fan")
            ring = [start]
            cur = start
            while cur in nxt:
                cur = nxt[cur]
                if cur == start:
                    break
                ring.append(cur)
            if set(ring) != nbrs:
                raise NonManifold(f"vertex star of {v} is not a single fan")
            self._star.append((ring, closed))

    # -- queries --------------------------------------------------------------

    @property
    def face_count(self):
        return len(self.faces)

    @property
    def edge_count(self):
        return len(self.edges)

    def euler_characteristic(self):
        return self.vertex_count - len(self.edges) + len(self.faces)

    def is_disk(self):
        return self.euler_characteristic() == 1

    def require_disk(self):
        if not self.is_disk():
            raise NotSimplyConnected(
                f"mesh is not a disk (Euler characteristic {self.euler_characteristic()})"
            )

    def vertex_star(self, v):
        """Counterclockwise neighbor ring of ``v`` (closed iff interior)."""
        return self._star[v]

    def opposite_vertex(self, face, i, j):
        (k,) = [v for v in self.faces[face] if v != i and v != j]
        return k

    def edge_flap(self, e):
        """``(i, j, k, l)`` with ``i < j``, ``k`` apex of the left face of
        ``i -> j`` and ``l`` apex of the right face.  Interior edges only."""
        i, j = self.edges[e]
        fl, fr = self.edge_left[e], self.edge_right[e]
        return i, j, self.opposite_vertex(fl, i, j), self.opposite_vertex(fr, i, j)

    def dual_cycles(self):
        """Counterclockwise cycle of dual edges around each interior vertex."""
        cycles = {}
        for v in self.interior_vertices:
            ring, closed = self._star[v]
            assert closed
            d = len(ring)
            cyc = []
            for m, j in enumerate(ring):
                fr = self._face_of_oriented[(j, v)]  # face (v, ring[m-1], j)
                to = self._face_of_oriented[(v, j)]  # face (v, j, ring[m+1])
                cyc.append(DualEdge(v, j, fr, to, self.edge_index[(min(v, j), max(v, j))]))
            assert len(cyc) == d
            cycles[v] = cyc
        return cycles

    # -- spanning trees --------------------------------------------------------

    def dual_spanning_tree(self, root=0):
        """BFS tree of the dual graph over interior edges.

        Returns ``(steps, cotree)`` where each step is
        ``(face, parent_face, edge, sign)``: crossing ``edge`` from
        ``parent_face`` to ``face`` follows the dual edge of the canonical
        orientation when ``sign == +1`` (parent is the right face).
        ``cotree`` lists the interior edges not used by the tree.
        """
        adj = [[] for _ in range(len(self.faces))]
        for e in self.interior_edges:
            fl, fr = self.edge_left[e], self.edge_right[e]
            adj[fr].append((fl, e, 1))
            adj[fl].append((fr, e, -1))
        seen = [False] * len(self.faces)
        seen[root] = True
        steps = []
        tree_edges = set()
        q = deque([root])
        while q:
            f = q.popleft()
            for g, e, sign in sorted(adj[f]):
                if not seen[g]:
                    seen[g] = True
                    tree_edges.add(e)
                    steps.append((g, f, e, sign))
                    q.append(g)
        if not all(seen):
            raise NotSimplyConnected("dual graph over interior edges is not connected")
        cotree = [e for e in self.interior_edges if e not in tree_edges]
        return steps, cotree

    def vertex_spanning_tree(self, root=0):
        """BFS tree over all primal edges.

        Each step is ``(vertex, parent, edge, sign)`` with ``sign == +1`` when
        the step traverses the edge from its smaller to its larger vertex.
        """
        adj = [[] for _ in range(self.vertex_count)]
        for e, (i, j) in enumerate(self.edges):
            adj[i].append((j, e, 1))
            adj[j].append((i, e, -1))
        seen = [False] * self.vertex_count
        seen[root] = True
        steps = []
        tree_edges = set()
        q = deque([root])
        while q:
            v = q.popleft()
            for w, e, sign in sorted(adj[v]):
                if not seen[w]:
                    seen[w] = True
                    tree_edges.add(e)
                    steps.append((w, v, e, sign))
                    q.append(w)
        cotree = [e for e in range(len(self.edges)) if e not in tree_edges]
        return steps, cotree


def build(faces, vertex_count=None):
    """Build a :class:`TriMesh` from oriented vertex triples."""
    return TriMesh(faces, vertex_count)
