"""Polygonal meshes: the candidate polyhedron made of a base face plus a dome."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateFace
from .geom import DEFAULT_TOL, Tolerances, _newell, polygon_angles

__all__ = [
    "Mesh",
    "make_mesh",
    "orient_outward",
    "merge_coplanar",
    "drop_straight_vertices",
    "unit_triangles",
    "triangulate_units",
    "place_base",
]


@dataclass(frozen=True, eq=False)
class Mesh:
    """Vertices, outward-oriented faces and a designated base face."""

    vertices: np.ndarray = field(repr=False)
    faces: tuple[tuple[int, ...], ...]
    base_face: int

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 3)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", tuple(tuple(int(i) for i in f) for f in self.faces))
        if not 0 <= self.base_face < len(self.faces):
            raise ValueError(f"base_face {self.base_face} out of range")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def base(self) -> tuple[int, ...]:
        return self.faces[self.base_face]

    def face_points(self, i: int) -> np.ndarray:
        return self.vertices[list(self.faces[i])]

    def dome_faces(self) -> list[int]:
        return [i for i in range(len(self.faces)) if i != self.base_face]

    def directed_edges(self) -> dict[tuple[int, int], int]:
        """Map each directed edge (a, b) to the face that traverses it."""
        out: dict[tuple[int, int], int] = {}
        for fi, f in enumerate(self.faces):
            for k in range(len(f)):
                out[(f[k], f[(k + 1) % len(f)])] = fi
        return out

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges, each once as (a, b) with a < b."""
        seen = set()
        for f in self.faces:
            for k in range(len(f)):
                a, b = f[k], f[(k + 1) % len(f)]
                seen.add((min(a, b), max(a, b)))
        return sorted(seen)

    def dome_vertex_ids(self) -> list[int]:
        base = set(self.base)
        used = {i for f in self.faces for i in f}
        return sorted(used - base)

    def transformed(self, rot: np.ndarray, shift: np.ndarray) -> "Mesh":
        return Mesh(self.vertices @ np.asarray(rot).T + shift, self.faces, self.base_face)

    def to_json(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "faces": [list(f) for f in self.faces],
            "base_face": self.base_face,
        }


def orient_outward(vertices: np.ndarray, faces: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Reverse faces whose normal points toward the centroid of a convex solid."""
    vertices = np.asarray(vertices, dtype=float)
    used = sorted({i for f in faces for i in f})
    inside = vertices[used].mean(axis=0)
    out = []
    for f in faces:
        pts = vertices[list(f)]
        n = _newell(pts)
        if np.dot(n, pts.mean(axis=0) - inside) < 0:
            f = tuple(reversed(f))
        out.append(tuple(f))
    return out


def _group_loops(directed: list[tuple[int, int]]) -> list[list[int]]:
    succ = {}
    for a, b in directed:
        if a in succ:
            raise DegenerateFace(f"vertex {a} repeats on a merged face boundary")
        succ[a] = b
    loops = []
    while succ:
        start = min(succ)
        loop = [start]
        cur = succ.pop(start)
        while cur != start:
            loop.append(cur)
            cur = succ.pop(cur)
        loops.append(loop)
    return loops


def merge_coplanar(
    vertices: np.ndarray,
    faces: Sequence[Sequence[int]],
    base_face: int,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[list[tuple[int, ...]], int]:
    """Merge edge-adjacent faces whose normals agree within ``eps_angle_deg``.

    Returns the merged faces and the new index of the base face (which is
    never merged with a dome face).
    """
    vertices = np.asarray(vertices, dtype=float)
    normals = []
    for f in faces:
        n = _newell(vertices[list(f)])
        normals.append(n / np.linalg.norm(n))

    parent = list(range(len(faces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {}
    for fi, f in enumerate(faces):
        for k in range(len(f)):
            owner[(f[k], f[(k + 1) % len(f)])] = fi
    for (a, b), fi in owner.items():
        fj = owner.get((b, a))
        if fj is None or fi == base_face or fj == base_face:
            continue
        ni, nj = normals[fi], normals[fj]
        gap = np.degrees(np.arctan2(np.linalg.norm(np.cross(ni, nj)), np.dot(ni, nj)))
        if gap <= tol.eps_angle_deg:
            ri, rj = find(fi), find(fj)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = defaultdict(list)
    for fi in range(len(faces)):
        groups[find(fi)].append(fi)

    merged: list[tuple[int, ...]] = []
    new_base = -1
    for root in sorted(groups):
        members = groups[root]
        if base_face in members:
            new_base = len(merged)
        if len(members) == 1:
            merged.append(tuple(faces[members[0]]))
            continue
        directed = []
        member_set = set(members)
        for fi in members:
            f = faces[fi]
            for k in range(len(f)):
                a, b = f[k], f[(k + 1) % len(f)]
                if owner.get((b, a)) not in member_set:
                    directed.append((a, b))
        loops = _group_loops(directed)
        if len(loops) != 1:
            raise DegenerateFace("merged coplanar region is not a disk")
        merged.append(tuple(loops[0]))
    return merged, new_base


def drop_straight_vertices(
    vertices: np.ndarray,
    faces: Sequence[Sequence[int]],
    base_face: int,
    tol: Tolerances = DEFAULT_TOL,
) -> Mesh:
    """Remove vertices that are straight (180 degrees) in every incident face,
    then drop unused vertices and reindex."""
    vertices = np.asarray(vertices, dtype=float)
    faces = [list(f) for f in faces]
    incident: dict[int, list[int]] = defaultdict(list)
    straight: dict[int, bool] = defaultdict(lambda: True)
    for fi, f in enumerate(faces):
        angles = polygon_angles(vertices[f])
        for v, a in zip(f, angles):
            incident[v].append(fi)
            if abs(a - 180.0) > tol.eps_angle_deg * 10:
                straight[v] = False
    doomed = {v for v in incident if straight[v] and len(incident[v]) == 2}
    faces = [[v for v in f if v not in doomed] for f in faces]
    used = sorted({v for f in faces for v in f})
    remap = {old: new for new, old in enumerate(used)}
    return Mesh(
        vertices[used], [tuple(remap[v] for v in f) for f in faces], base_face
    )


def make_mesh(
    vertices,
    faces: Iterable[Sequence[int]],
    base_face: int = 0,
    *,
    orient: bool = True,
    merge: bool = True,
    tol: Tolerances = DEFAULT_TOL,
) -> Mesh:
    """Assemble a Mesh: orient faces outward, merge coplanar neighbours and
    remove vertices that are straight everywhere."""
    vertices = np.asarray(vertices, dtype=float)
    faces = [tuple(f) for f in faces]
    if orient:
        faces = orient_outward(vertices, faces)
    if merge:
        faces, base_face = merge_coplanar(vertices, faces, base_face, tol)
    return drop_straight_vertices(vertices, faces, base_face, tol)


def place_base(vertices: np.ndarray, faces, base_face: int) -> np.ndarray:
    """Rigidly move a convex solid so ``base_face`` lies in z = 0 below it.

    The first base vertex goes to the origin and the first base edge along +x.
    """
    vertices = np.asarray(vertices, dtype=float)
    f = list(faces[base_face])
    pts = vertices[f]
    n = _newell(pts)
    n = n / np.linalg.norm(n)
    z = -n  # base normal must become -z
    x = pts[1] - pts[0]
    x = x - np.dot(x, z) * z
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    rot = np.vstack([x, y, z])
    out = (vertices - pts[0]) @ rot.T
    out[np.abs(out) < 1e-15] = 0.0
    return out


# -- unit triangle decomposition ---------------------------------------------


def unit_triangles(
    points: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Decompose a planar convex polyiamond face into unit triangles.

    Builds the unit triangular lattice anchored at a face corner whose two
    edges meet at 60 or 120 degrees and keeps the lattice triangles whose
    centroids fall inside the face. Returns (lattice points, triangles) with
    triangles oriented like the face.
    """
    pts = np.asarray(points, dtype=float)
    n = _newell(pts)
    n = n / np.linalg.norm(n)
    angles = polygon_angles(pts)
    corner = 0
    # anchor at a genuine corner, not a straight vertex
    for k in range(len(pts)):
        if abs(angles[k] - 180.0) > 1.0:
            corner = k
            break
    origin = pts[corner]
    u = pts[(corner + 1) % len(pts)] - origin
    u = u / np.linalg.norm(u)
    w = np.cross(n, u)
    a1 = u
    a2 = 0.5 * u + (np.sqrt(3.0) / 2.0) * w
    # lattice coordinates of the face vertices
    basis = np.array([[1.0, 0.5], [0.0, np.sqrt(3.0) / 2.0]])
    local = np.stack([(pts - origin) @ u, (pts - origin) @ w], axis=1)
    lat = np.linalg.solve(basis, local.T).T
    lo = np.floor(lat.min(axis=0) - 1e-6).astype(int)
    hi = np.ceil(lat.max(axis=0) + 1e-6).astype(int)

    ii, jj = np.meshgrid(np.arange(lo[0], hi[0] + 1), np.arange(lo[1], hi[1] + 1), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    up = np.stack([np.stack([ii, jj], 1), np.stack([ii + 1, jj], 1), np.stack([ii, jj + 1], 1)], 1)
    down = np.stack(
        [np.stack([ii + 1, jj], 1), np.stack([ii + 1, jj + 1], 1), np.stack([ii, jj + 1], 1)], 1
    )
    cells = np.concatenate([up, down])  # (m, 3, 2) lattice coordinates
    cent = cells.mean(axis=1) @ basis.T
    # centroid strictly left of every edge (the face is CCW in (u, w))
    d = np.roll(local, -1, axis=0) - local
    rel = cent[:, None, :] - local[None, :, :]
    side = d[None, :, 0] * rel[:, :, 1] - d[None, :, 1] * rel[:, :, 0]
    cells = cells[np.all(side > 1e-7, axis=1)]

    keys, inverse = np.unique(cells.reshape(-1, 2), axis=0, return_inverse=True)
    coords = origin + keys[:, :1] * a1 + keys[:, 1:] * a2
    tris = [tuple(int(k) for k in row) for row in inverse.reshape(-1, 3)]
    return coords, tris


def triangulate_units(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Replace every dome face by its unit triangles (base face kept whole).

    Lattice points shared between faces are welded by position.
    """
    verts: list[np.ndarray] = []
    keys: dict[tuple, int] = {}

    def weld(p):
        key = tuple(np.round(p, 7) + 0.0)
        if key not in keys:
            keys[key] = len(verts)
            verts.append(p)
        return keys[key]

    for p in mesh.vertices:
        weld(p)
    faces: list[tuple[int, ...]] = []
    base_idx = 0
    for fi, f in enumerate(mesh.faces):
        if fi == mesh.base_face:
            base_idx = len(faces)
            faces.append(tuple(weld(p) for p in mesh.vertices[list(f)]))
            continue
        coords, tris = unit_triangles(mesh.vertices[list(f)], tol)
        ids = [weld(p) for p in coords]
        faces.extend(tuple(ids[k] for k in t) for t in tris)
    # base edges may now carry lattice points; splice them into the base loop
    base = list(faces[base_idx])
    vs = np.array(verts)
    spliced = []
    for k in range(len(base)):
        a, b = base[k], base[(k + 1) % len(base)]
        spliced.append(a)
        pa, pb = vs[a], vs[b]
        seg = pb - pa
        L = np.linalg.norm(seg)
        between = []
        for vi, p in enumerate(vs):
            if vi in (a, b):
                continue
            t = np.dot(p - pa, seg) / (L * L)
            if 1e-9 < t < 1 - 1e-9 and np.linalg.norm(pa + t * seg - p) < 1e-7:
                between.append((t, vi))
        spliced.extend(vi for _, vi in sorted(between))
    faces[base_idx] = tuple(spliced)
    return Mesh(np.array(verts), faces, base_idx)
