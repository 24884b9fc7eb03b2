"""Enumeration of unit-triangle dome templates over a subdivided base.

A template is a triangulated disk whose boundary is the base polygon cut
into unit segments. It is built by repeatedly taking a root edge of an open
boundary cycle and choosing the third vertex of the triangle on it: either a
fresh interior vertex, or another vertex of the same cycle (which splits the
cycle in two). The root edge is a function of the current state only, so
every triangulation is produced exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..errors import BudgetExceeded
from ..polygon import PolygonSpec, embed

__all__ = [
    "DomeTemplate",
    "BoundaryLayout",
    "boundary_layout",
    "enumerate_templates",
]

_GEOM_EPS = 1e-9


@dataclass(frozen=True)
class BoundaryLayout:
    """Base polygon subdivided into unit steps, counter-clockwise from +z."""

    points: np.ndarray = field(repr=False)  # (B, 3)
    is_corner: tuple[bool, ...]
    base_angles: tuple[float, ...]  # angle at each corner (180 at subdivision points)

    @property
    def size(self) -> int:
        return len(self.is_corner)


def boundary_layout(spec: PolygonSpec) -> BoundaryLayout:
    poly = embed(spec)
    pts, corner, angles = [], [], []
    n = spec.n
    for i in range(n):
        a, b = poly.vertices[i], poly.vertices[(i + 1) % n]
        m = spec.edges[i]
        for k in range(m):
            pts.append(a + (b - a) * (k / m))
            corner.append(k == 0)
            angles.append(poly.angles[i] if k == 0 else 180.0)
    return BoundaryLayout(np.array(pts), tuple(corner), tuple(angles))


@dataclass(frozen=True)
class DomeTemplate:
    """Triangulated disk over the subdivided base.

    Vertices ``0 .. n_boundary-1`` are the base points in counter-clockwise
    order; the rest are interior (dome) vertices. Triangles are oriented
    counter-clockwise seen from outside the dome.
    """

    n_boundary: int
    n_interior: int
    triangles: tuple[tuple[int, int, int], ...]
    index: int = 0

    def degrees(self) -> list[int]:
        deg = [0] * (self.n_boundary + self.n_interior)
        for t in self.triangles:
            for v in t:
                deg[v] += 1
        return deg

    def interior_degrees(self) -> list[int]:
        return self.degrees()[self.n_boundary:]

    @property
    def dome_vertex_count(self) -> int:
        return sum(1 for k in self.interior_degrees() if k != 6)

    @property
    def flat_count(self) -> int:
        return sum(1 for k in self.interior_degrees() if k == 6)

    def v_counts(self) -> dict[int, int]:
        out = {3: 0, 4: 0, 5: 0}
        for k in self.interior_degrees():
            if k in out:
                out[k] += 1
        return out

    def edges(self) -> list[tuple[int, int]]:
        es = set()
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                es.add((min(u, v), max(u, v)))
        return sorted(es)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "n_boundary": self.n_boundary,
            "n_interior": self.n_interior,
            "triangles": [list(t) for t in self.triangles],
        }


def _circumcenter(p, q, r):
    a, b = q - p, r - p
    cross = a[0] * b[1] - a[1] * b[0]
    if abs(cross) < _GEOM_EPS:
        return None
    aa, bb = a @ a, b @ b
    cx = (b[1] * aa - a[1] * bb) / (2 * cross)
    cy = (a[0] * bb - b[0] * aa) / (2 * cross)
    return p + np.array([cx, cy])


class _Enumerator:
    def __init__(self, layout: BoundaryLayout, target: int, max_dome: int, max_flat: int,
                 relaxed: bool):
        self.layout = layout
        self.B = layout.size
        self.xy = layout.points[:, :2]
        self.target = target
        self.max_dome = max_dome
        self.max_flat = max_flat
        size = self.B + target
        self.allowed: list[frozenset[int]] = []
        for i in range(self.B):
            if layout.is_corner[i] and relaxed:
                self.allowed.append(frozenset({2, 3, 4}))
            else:
                self.allowed.append(frozenset({3}))
        self.allowed += [frozenset({3, 4, 5, 6}) if max_flat > 0 else frozenset({3, 4, 5})] * target
        self.maxdeg = [max(a) for a in self.allowed]
        self.count = [0] * size
        self.pend = [0] * size
        self.adj: set[tuple[int, int]] = set()
        self.base_nbrs: list[list[int]] = [[] for _ in range(size)]
        self.fixed: list[np.ndarray | None] = [None] * size
        self.tris: list[tuple[int, int, int]] = []
        self.n_int = 0
        self.nonflat = 0
        self.flat = 0
        for i in range(self.B):
            self.adj.add((min(i, (i + 1) % self.B), max(i, (i + 1) % self.B)))

    # -- geometry prunes -------------------------------------------------

    def _base_edge_ok(self, u: int, v: int) -> bool:
        return abs(float(np.linalg.norm(self.xy[u] - self.xy[v])) - 1.0) < _GEOM_EPS

    def _interior_fix(self, w: int) -> bool:
        """Interior vertex w with its base neighbours: positions consistent?"""
        nb = self.base_nbrs[w]
        p = self.xy[nb[-1]]
        for q in nb[:-1]:
            if float(np.linalg.norm(self.xy[q] - p)) > 2.0 - _GEOM_EPS:
                return False
        if len(nb) < 3:
            return True
        if self.fixed[w] is None:
            c = _circumcenter(self.xy[nb[0]], self.xy[nb[1]], self.xy[nb[2]])
            if c is None:
                return False
            r2 = float((self.xy[nb[0]] - c) @ (self.xy[nb[0]] - c))
            if r2 > 1.0 - _GEOM_EPS:
                return False
            self.fixed[w] = np.array([c[0], c[1], math.sqrt(1.0 - r2)])
            for q in nb[3:]:
                if abs(float(np.linalg.norm(self.xy[q] - c)) ** 2 - r2) > 1e-7:
                    return False
            return True
        c = self.fixed[w][:2]
        r2 = 1.0 - self.fixed[w][2] ** 2
        return abs(float((p - c) @ (p - c)) - r2) < 1e-7

    def _add_edge(self, u: int, v: int, undo: list, existing: bool) -> bool:
        key = (min(u, v), max(u, v))
        if key in self.adj:
            # only edges of the current cycle may be reused
            return existing
        B = self.B
        if u < B and v < B:
            if not self._base_edge_ok(u, v):
                return False
        self.adj.add(key)
        undo.append(("edge", key))
        if (u < B) != (v < B):
            w, b = (u, v) if u >= B else (v, u)
            self.base_nbrs[w].append(b)
            undo.append(("nbr", w))
            had = self.fixed[w] is not None
            consistent = self._interior_fix(w)
            if not had and self.fixed[w] is not None:
                undo.append(("fix", w))
            if not consistent:
                return False
            if not had and self.fixed[w] is not None:
                # an edge between two located vertices must have unit length
                for x in range(B, B + self.n_int):
                    if x != w and self.fixed[x] is not None and \
                            (min(x, w), max(x, w)) in self.adj:
                        if abs(float(np.linalg.norm(self.fixed[x] - self.fixed[w])) - 1.0) > 1e-7:
                            return False
        elif u >= B and v >= B and self.fixed[u] is not None and self.fixed[v] is not None:
            if abs(float(np.linalg.norm(self.fixed[u] - self.fixed[v])) - 1.0) > 1e-7:
                return False
        return True

    def _undo(self, undo: list):
        for kind, x in reversed(undo):
            if kind == "edge":
                self.adj.discard(x)
            elif kind == "nbr":
                self.base_nbrs[x].pop()
            elif kind == "fix":
                self.fixed[x] = None

    # -- search ------------------------------------------------------------

    def _close(self, v: int) -> bool:
        """Vertex v left every open cycle: is its final degree allowed?"""
        k = self.count[v]
        if k not in self.allowed[v]:
            return False
        return True

    def _slack(self, v: int) -> int:
        return self.maxdeg[v] - self.count[v] - self.pend[v]

    def run(self, cycles: list[list[int]]) -> Iterator[tuple[tuple[int, int, int], ...]]:
        if not cycles:
            if self.n_int == self.target:
                yield tuple(self.tris)
            return
        cyc = cycles[-1]
        rest = cycles[:-1]
        m = len(cyc)
        # root at the most constrained vertex, first position on ties
        pos = min(range(m), key=lambda i: (self._slack(cyc[i]), i))
        cyc = cyc[pos:] + cyc[:pos]
        c0, c1 = cyc[0], cyc[1]
        for v in cyc:
            self.pend[v] -= 1

        # chord to an existing cycle vertex
        for j in range(2, m):
            w = cyc[j]
            if c0 < self.B and c1 < self.B and w < self.B:
                continue
            left = cyc[1 : j + 1]
            right = cyc[j:] + [c0]
            yield from self._place((c0, c1, w), rest, [left, right], (True, j == 2, j == m - 1))

        # fresh interior vertex
        if self.n_int < self.target:
            w = self.B + self.n_int
            self.n_int += 1
            yield from self._place((c0, c1, w), rest, [[c0, w] + cyc[1:]], (True, False, False))
            self.n_int -= 1

        for v in cyc:
            self.pend[v] += 1

    def _place(self, tri, rest, new_cycles, existing):
        undo: list = []
        ok = True
        sides = ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0]))
        for (a, b), old in zip(sides, existing):
            if not self._add_edge(a, b, undo, old):
                ok = False
                break
        pushed = [c for c in new_cycles if len(c) >= 3]
        if ok:
            for v in tri:
                self.count[v] += 1
            for c in pushed:
                for v in c:
                    self.pend[v] += 1
            verts = set(tri)
            for c in pushed:
                verts.update(c)
            closed = []
            for v in verts:
                if self.count[v] + self.pend[v] > self.maxdeg[v]:
                    ok = False
                if self.pend[v] == 0:
                    closed.append(v)
            flat0, nonflat0 = self.flat, self.nonflat
            if ok:
                for v in closed:
                    if not self._close(v):
                        ok = False
                        break
                    if v >= self.B:
                        if self.count[v] == 6:
                            self.flat += 1
                        else:
                            self.nonflat += 1
                ok = ok and self.flat <= self.max_flat and self.nonflat <= self.max_dome
            if ok:
                self.tris.append(tri)
                yield from self.run(rest + pushed)
                self.tris.pop()
            self.flat, self.nonflat = flat0, nonflat0
            for c in pushed:
                for v in c:
                    self.pend[v] -= 1
            for v in tri:
                self.count[v] -= 1
        self._undo(undo)


def enumerate_templates(
    spec: PolygonSpec,
    max_dome_vertices: int = 6,
    *,
    max_flat: int = 6,
    relaxed: bool | None = None,
    max_templates: int = 10**7,
) -> Iterator[DomeTemplate]:
    """Stream every template within the vertex budget, fewest interior vertices first.

    ``relaxed`` lets base corners carry 2 to 4 triangles instead of exactly 3;
    by default it is switched on only when some base angle is below 120
    degrees. Raises BudgetExceeded after ``max_templates`` templates.
    """
    layout = boundary_layout(spec)
    if relaxed is None:
        relaxed = spec.base_angle < 120.0 - 1e-9
    emitted = 0
    for target in range(0, max_dome_vertices + max_flat + 1):
        en = _Enumerator(layout, target, max_dome_vertices, max_flat, relaxed)
        B = layout.size
        en.pend[:B] = [1] * B
        for tris in en.run([list(range(B))]):
            t = DomeTemplate(B, target, tris, emitted)
            if not relaxed:
                v = t.v_counts()
                # combinatorial Gauss-Bonnet: 3 V3 + 2 V4 + V5 == 6
                if 3 * v[3] + 2 * v[4] + v[5] != 6:
                    continue
            if emitted >= max_templates:
                raise BudgetExceeded(emitted)
            emitted += 1
            yield t
