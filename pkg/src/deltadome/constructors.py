"""Explicit witness domes for every domeable equiangular polygon.

Every constructor returns a :class:`~deltadome.mesh.Mesh` whose base face lies
in the z = 0 plane with outward normal -z and whose other faces are convex
polyiamonds. Faces are emitted maximal: coplanar pieces are merged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    ApexDegenerate,
    BandDoesNotClose,
    ConditionsViolated,
    NotDomeable,
    NotPolyiamondPolygon,
)
from .geom import DEFAULT_TOL, Tolerances, polygon_angles
from .mesh import Mesh, make_mesh
from .polygon import (
    DOMEABLE_N,
    EmbeddedPolygon,
    PolygonSpec,
    check_conditions,
    closes,
    embed,
    embed_with_angles,
    is_polyiamond_polygon,
)

__all__ = [
    "PlanKind",
    "DomePlan",
    "decide",
    "build",
    "pyramid_dome",
    "roof_dome",
    "truncated_tetra_dome",
    "antiprism_dome",
    "layered_dome",
    "layered_lid_candidates",
    "one_story_dome",
    "one_story_kinds",
    "nine_gon_dome",
    "eleven_gon_dome",
]

SQRT3 = math.sqrt(3.0)


class PlanKind(str, enum.Enum):
    PYRAMID = "Pyramid"
    ROOF = "Roof"
    TRUNCATED_TETRA = "TruncatedTetra"
    ANTIPRISM = "Antiprism"
    LAYERED = "Layered"
    ONE_STORY = "OneStory"


@dataclass(frozen=True)
class DomePlan:
    kind: PlanKind
    spec: PolygonSpec
    params: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        params = {}
        for k, v in self.params.items():
            params[k] = v.to_json() if isinstance(v, PolygonSpec) else v
        return {"kind": self.kind.value, "edges": list(self.spec.edges), "params": params}


# -- decider -----------------------------------------------------------------


def decide(spec: PolygonSpec) -> DomePlan:
    """Return a construction plan, or raise NotDomeable naming the failed condition.

    Raises NotClosed when the edges do not close an equiangular polygon.
    """
    report = check_conditions(spec)
    n = spec.n
    if not report.n_admissible:
        raise NotDomeable(f"n={n} not in {{3,4,5,6,8,10,12}}")
    if not report.odd_edges_equal:
        raise NotDomeable(f"odd-edge inequality: {report.detail}")
    if not report.even_edges_condition:
        raise NotDomeable(f"even-edge condition: {report.detail}")

    if n in (3, 5):
        return DomePlan(PlanKind.PYRAMID, spec, {"side": spec.edges[0]})
    if n == 4:
        a, b = spec.edges[0], spec.edges[1]
        return DomePlan(PlanKind.ROOF, spec, {"long": max(a, b), "short": min(a, b)})
    if n == 6:
        if spec.is_regular:
            return DomePlan(PlanKind.ANTIPRISM, spec, {"side": spec.edges[0]})
        return DomePlan(PlanKind.TRUNCATED_TETRA, spec, {})
    p = report.parity
    ell = spec.edges[p]
    lid = PolygonSpec(tuple(e + ell for e in spec.edges[1 - p :: 2]))
    cap = {8: "roof", 10: "pyramid", 12: "flat"}[n]
    return DomePlan(PlanKind.LAYERED, spec, {"ell": ell, "parity": p, "lid": lid, "cap": cap})


def build(spec: PolygonSpec, plan: DomePlan | None = None, tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Build the witness dome for ``spec`` following ``plan`` (decided if absent)."""
    plan = plan or decide(spec)
    if plan.kind is PlanKind.PYRAMID:
        return pyramid_dome(spec, tol)
    if plan.kind is PlanKind.ROOF:
        return roof_dome(spec, tol)
    if plan.kind is PlanKind.TRUNCATED_TETRA:
        return truncated_tetra_dome(spec, tol=tol)
    if plan.kind is PlanKind.ANTIPRISM:
        return antiprism_dome(spec, tol)
    if plan.kind is PlanKind.LAYERED:
        return layered_dome(spec, plan, tol)
    raise ValueError(f"plan kind {plan.kind} needs explicit angles; use one_story_dome")


# -- shared caps ------------------------------------------------------------


def _pyramid_apex(ring: np.ndarray) -> np.ndarray:
    """Apex over a regular polygon ``ring`` (horizontal) with unit-edge slopes."""
    center = ring.mean(axis=0)
    side = float(np.linalg.norm(ring[1] - ring[0]))
    radius = float(np.linalg.norm(ring[0] - center))
    if radius >= side - 1e-12:
        raise ApexDegenerate(
            f"circumradius {radius:.6f} >= side {side}: apex would be flat"
        )
    return center + np.array([0.0, 0.0, math.sqrt(side * side - radius * radius)])


def _ridge_points(ring: np.ndarray) -> list[np.ndarray]:
    """Roof ridge end points over a horizontal rectangle ``ring``.

    Returns one ridge point per rectangle corner (equal points when square).
    """
    center = ring.mean(axis=0)
    e0 = ring[1] - ring[0]
    e1 = ring[2] - ring[1]
    a, b = np.linalg.norm(e0), np.linalg.norm(e1)
    long_dir = e0 / a if a >= b else e1 / b
    short = min(a, b)
    half = 0.5 * (max(a, b) - short)
    lift = np.array([0.0, 0.0, short / math.sqrt(2.0)])
    ends = (center - half * long_dir + lift, center + half * long_dir + lift)
    out = []
    for p in ring:
        side = np.dot(p - center, long_dir)
        out.append(ends[0] if side < 0 else ends[1])
    return out


def _cap_faces(ring_ids: list[int], verts: list[np.ndarray], cap: str) -> list[tuple[int, ...]]:
    """Append cap vertices to ``verts`` and return faces closing ``ring_ids``."""
    ring = np.array([verts[i] for i in ring_ids])
    m = len(ring_ids)
    if cap == "flat":
        return [tuple(ring_ids)]
    if cap == "pyramid":
        apex = len(verts)
        verts.append(_pyramid_apex(ring))
        return [(ring_ids[k], ring_ids[(k + 1) % m], apex) for k in range(m)]
    if cap == "roof":
        ridge = _ridge_points(ring)
        ids = {}
        rid = []
        for p in ridge:
            key = tuple(np.round(p, 12))
            if key not in ids:
                ids[key] = len(verts)
                verts.append(p)
            rid.append(ids[key])
        faces = []
        for k in range(m):
            j = (k + 1) % m
            f = [ring_ids[k], ring_ids[j], rid[j]]
            if rid[k] != rid[j]:
                f.append(rid[k])
            faces.append(tuple(f))
        return faces
    raise ValueError(f"unknown cap {cap!r}")


def _finish(verts, faces, tol: Tolerances) -> Mesh:
    return make_mesh(np.array(verts), faces, base_face=0, tol=tol)


def _base_ring(poly: EmbeddedPolygon) -> tuple[list[np.ndarray], list[int]]:
    verts = [p for p in poly.vertices]
    return verts, list(range(len(verts)))


# -- constructors -------------------------------------------------------------


def pyramid_dome(spec: PolygonSpec, tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Pyramid of equilateral side-s triangles over a regular n-gon, n <= 5."""
    if not spec.is_regular:
        raise ValueError("pyramid_dome needs a regular polygon")
    poly = embed(spec, tol)
    verts, ring = _base_ring(poly)
    faces = [tuple(reversed(ring))] + _cap_faces(ring, verts, "pyramid")
    return _finish(verts, faces, tol)


def roof_dome(spec: PolygonSpec, tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Roof over an a x b rectangle: ridge a - b at height b / sqrt(2)."""
    e = spec.edges
    if spec.n != 4 or e[0] != e[2] or e[1] != e[3]:
        raise ValueError("roof_dome needs an a x b rectangle")
    poly = embed(spec, tol)
    verts, ring = _base_ring(poly)
    faces = [tuple(reversed(ring))] + _cap_faces(ring, verts, "roof")
    return _finish(verts, faces, tol)


def _edge_direction_class(poly: EmbeddedPolygon) -> list[int]:
    out = []
    n = poly.n
    for i in range(n):
        d = poly.vertices[(i + 1) % n] - poly.vertices[i]
        ang = math.degrees(math.atan2(d[1], d[0])) % 360.0
        out.append(int(round(ang / 60.0)) % 6)
    return out


def truncated_tetra_dome(
    spec: PolygonSpec,
    angles: Sequence[float] | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> Mesh:
    """Regular tetrahedron on the enclosing triangle, minus corner tetrahedra.

    ``angles`` are interior angles (60 or 120 each); equiangular if omitted.
    """
    if angles is None:
        angles = [spec.base_angle] * spec.n
    if spec.n > 6 or not is_polyiamond_polygon(spec, angles, tol):
        raise NotPolyiamondPolygon(f"{spec} with angles {list(angles)} is not a convex polyiamond")
    snapped = [60.0 if abs(a - 60.0) < 1.0 else 120.0 for a in angles]
    poly = embed_with_angles(spec.edges, snapped, tol)
    cls = _edge_direction_class(poly)
    # the enclosing triangle's sides run in the parity class present 3 times
    parity = 0 if len({c for c in cls if c % 2 == 0}) == 3 else 1
    sides = [i for i in range(poly.n) if cls[i] % 2 == parity]
    if len({cls[i] for i in sides}) != 3:
        raise NotPolyiamondPolygon("cannot find the enclosing triangle")

    pts = poly.vertices[:, :2]

    def line(i):
        p = pts[i]
        d = pts[(i + 1) % poly.n] - p
        return p, d / np.linalg.norm(d)

    lines = [line(i) for i in sides]

    def meet(l1, l2):
        (p1, d1), (p2, d2) = l1, l2
        t = np.linalg.solve(np.column_stack([d1, -d2]), p2 - p1)
        return p1 + t[0] * d1

    # corner k of the big triangle lies between sides k and k+1
    corners = [meet(lines[k], lines[(k + 1) % 3]) for k in range(3)]
    big = float(np.linalg.norm(corners[1] - corners[0]))
    centroid = np.mean(corners, axis=0)
    apex = np.array([centroid[0], centroid[1], big * math.sqrt(2.0 / 3.0)])

    verts = [p for p in poly.vertices]
    faces: list[tuple[int, ...]] = [tuple(reversed(range(poly.n)))]

    def add(p):
        for i, q in enumerate(verts):
            if np.linalg.norm(q - p) < 1e-9:
                return i
        verts.append(np.asarray(p, dtype=float))
        return len(verts) - 1

    apex_id = add(apex)
    cut_points = []
    for k in range(3):
        c = np.array([corners[k][0], corners[k][1], 0.0])
        cut = min(float(np.linalg.norm(pts[i] - corners[k])) for i in range(poly.n))
        cut = round(cut)
        q = c + cut * (apex - c) / big
        cut_points.append((c, cut, add(q)))

    # side face over big-triangle side k (between corners k-1 and k)
    for k in range(3):
        c_prev, _, q_prev = cut_points[(k - 1) % 3]
        c_next, _, q_next = cut_points[k]
        on_side = []
        for i in range(poly.n):
            p = poly.vertices[i]
            d = c_next[:2] - c_prev[:2]
            cross = d[0] * (p[1] - c_prev[1]) - d[1] * (p[0] - c_prev[0])
            if abs(cross) < 1e-9 * big:
                on_side.append((float(np.dot(p[:2] - c_prev[:2], d)), i))
        ring = [i for _, i in sorted(on_side)]
        face = ring + [q_next, apex_id, q_prev]
        dedup = []
        for v in face:
            if not dedup or dedup[-1] != v:
                dedup.append(v)
        if dedup[0] == dedup[-1]:
            dedup.pop()
        faces.append(tuple(dedup))
    for c, cut, q in cut_points:
        if cut == 0:
            continue
        near = [i for i in range(poly.n) if abs(np.linalg.norm(pts[i] - c[:2]) - cut) < 1e-9]
        faces.append(tuple(near) + (q,))
    return _finish(verts, faces, tol)


def antiprism_dome(spec: PolygonSpec, tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Hexagonal antiprism band of 12 triangles plus a flat hexagon lid."""
    if spec.n != 6 or not spec.is_regular:
        raise ValueError("antiprism_dome needs a regular hexagon")
    s = spec.edges[0]
    poly = embed(spec, tol)
    verts, ring = _base_ring(poly)
    center = poly.vertices.mean(axis=0)
    h = s * math.sqrt(SQRT3 - 1.0)
    top = []
    for k in range(6):
        a, b = poly.vertices[k], poly.vertices[(k + 1) % 6]
        mid = 0.5 * (a + b)
        out = (mid - center) / np.linalg.norm(mid - center)
        # top vertex over the edge midpoint at the circumradius (= s)
        top.append(len(verts))
        verts.append(center + s * out + np.array([0.0, 0.0, h]))
    faces = [tuple(reversed(ring))]
    for k in range(6):
        faces.append((ring[k], ring[(k + 1) % 6], top[k]))
        faces.append((top[k - 1], ring[k], top[k]))
    faces.append(tuple(top))
    return _finish(verts, faces, tol)


def _band_apex(a: np.ndarray, b: np.ndarray, outward: np.ndarray, ell: float, offset: float):
    """Apex of an ell-triangle on base edge ab, ``offset`` outward from its midpoint."""
    h2 = 0.75 * ell * ell - offset * offset
    if h2 <= 0:
        raise BandDoesNotClose("band triangle would be flat")
    return 0.5 * (a + b) + offset * outward + np.array([0.0, 0.0, math.sqrt(h2)])


def _outward(poly: EmbeddedPolygon, i: int) -> np.ndarray:
    a, b = poly.vertices[i], poly.vertices[(i + 1) % poly.n]
    d = (b - a) / np.linalg.norm(b - a)
    return np.array([d[1], -d[0], 0.0])


def layered_lid_candidates(spec: PolygonSpec, plan: DomePlan, tol: Tolerances = DEFAULT_TOL):
    """Both readings of the layered lid: edges |e|+ell (rule) and edges |e| (caption).

    Returns a list of (label, mesh or None, error message or None).
    """
    out = []
    for label in ("rule", "caption"):
        try:
            out.append((label, _layered(spec, plan, tol, lid_rule=label), None))
        except Exception as exc:  # a failed candidate is data here
            out.append((label, None, str(exc)))
    return out


def layered_dome(spec: PolygonSpec, plan: DomePlan | None = None, tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Band of ell-triangles on odd edges and trapezoids on even edges, then a lid.

    The lid (edges |e_i| + ell) is roofed for n = 8, capped by a pyramid for
    n = 10 and left as one flat face for n = 12. For octagons the lid reading
    is chosen by the verifier among the candidates.
    """
    if spec.n not in (8, 10, 12):
        raise ConditionsViolated(f"layered domes need n in {{8,10,12}}, got {spec.n}")
    if plan is None:
        try:
            plan = decide(spec)
        except NotDomeable as exc:
            raise ConditionsViolated(exc.reason) from exc
    if plan.kind is not PlanKind.LAYERED:
        raise ConditionsViolated(f"plan is {plan.kind.value}, not Layered")
    if spec.n != 8:
        return _layered(spec, plan, tol, lid_rule="rule")
    from .verifier import verify_full

    for _, mesh, _ in layered_lid_candidates(spec, plan, tol):
        if mesh is not None and verify_full(mesh, spec, tol).passed:
            return mesh
    raise ConditionsViolated("no octagon lid candidate passes verification")


def _layered(spec: PolygonSpec, plan: DomePlan, tol: Tolerances, lid_rule: str) -> Mesh:
    n = spec.n
    p = plan.params["parity"]
    ell = float(plan.params["ell"])
    odd = list(range(p, n, 2))
    if len({spec.edges[i] for i in odd}) != 1 or not closes(spec.edges[1 - p :: 2]):
        raise ConditionsViolated(f"{spec} violates the layered conditions")
    poly = embed(spec, tol)
    verts, ring = _base_ring(poly)
    theta = math.radians(360.0 / n)
    if lid_rule == "rule":
        offset = 0.5 * ell * math.tan(theta / 2.0)
    else:
        # lid edges equal to the even base edges
        offset = -0.5 * ell * math.cos(theta) / math.sin(theta)
    apex = {}
    for i in odd:
        a, b = poly.vertices[i], poly.vertices[(i + 1) % n]
        apex[i] = len(verts)
        verts.append(_band_apex(a, b, _outward(poly, i), ell, offset))
    faces = [tuple(reversed(ring))]
    for i in range(n):
        j = (i + 1) % n
        if i in apex:
            faces.append((ring[i], ring[j], apex[i]))
        else:
            faces.append((ring[i], ring[j], apex[j], apex[(i - 1) % n]))
    lid = [apex[i] for i in odd]
    faces.extend(_cap_faces(lid, verts, plan.params["cap"]))
    return _finish(verts, faces, tol)


# -- one-story domes ---------------------------------------------------------


def one_story_kinds(angles: Sequence[float], start: str = "T") -> list[str]:
    """Classify base edges as band triangles ("T") or trapezoids ("Z").

    ``angles[i]`` is the interior angle at vertex i (start of edge i). A
    120-degree vertex sits between two triangles; a 150-degree vertex between
    a triangle and a trapezoid.
    """
    n = len(angles)
    kinds: list[str | None] = [None] * n
    for i, a in enumerate(angles):
        if abs(a - 120.0) < 1e-6:
            kinds[i] = kinds[(i - 1) % n] = "T"
    if all(k is None for k in kinds):
        kinds[0] = start
    for _ in range(2 * n):
        for i in range(n):
            if kinds[i] is None:
                continue
            j = (i + 1) % n
            if abs(angles[j] - 150.0) < 1e-6 and kinds[j] is None:
                kinds[j] = "Z" if kinds[i] == "T" else "T"
            k = (i - 1) % n
            if abs(angles[i] - 150.0) < 1e-6 and kinds[k] is None:
                kinds[k] = "Z" if kinds[i] == "T" else "T"
    if any(k is None for k in kinds):
        raise BandDoesNotClose("base angles must all be 120 or 150 degrees")
    for i in range(n):
        prev, cur = kinds[(i - 1) % n], kinds[i]
        want = 120.0 if prev == cur == "T" else 150.0
        if prev == cur == "Z" or abs(angles[i] - want) > 1e-6:
            raise BandDoesNotClose(f"vertex {i}: {prev}/{cur} cannot meet at {angles[i]} degrees")
    return kinds  # type: ignore[return-value]


def one_story_dome(
    edges: Sequence[int],
    angles: Sequence[float],
    lid: PolygonSpec | None = None,
    kinds: Sequence[str] | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> Mesh:
    """One level of band faces over a 120/150-degree polygon, closed by a flat lid.

    Triangles stand on "T" edges, trapezoids on "Z" edges and inverted
    triangles fill each 120-degree vertex. All apexes share one height,
    so every band triangle has the same side length.
    """
    kinds = list(kinds) if kinds is not None else one_story_kinds(angles)
    poly = embed_with_angles(edges, angles, tol)
    n = poly.n
    tri = [i for i in range(n) if kinds[i] == "T"]
    sides = {edges[i] for i in tri}
    if len(sides) != 1:
        raise BandDoesNotClose(f"band triangles need one common side, got {sorted(sides)}")
    ell = float(sides.pop())
    offset = ell * (1.0 - SQRT3 / 2.0)
    verts, ring = _base_ring(poly)
    apex = {}
    for i in tri:
        apex[i] = len(verts)
        verts.append(
            _band_apex(poly.vertices[i], poly.vertices[(i + 1) % n], _outward(poly, i), ell, offset)
        )

    def prev_t(i):
        k = (i - 1) % n
        while kinds[k] != "T":
            k = (k - 1) % n
        return k

    def next_t(i):
        k = (i + 1) % n
        while kinds[k] != "T":
            k = (k + 1) % n
        return k

    faces = [tuple(reversed(ring))]
    for i in range(n):
        j = (i + 1) % n
        if kinds[i] == "T":
            faces.append((ring[i], ring[j], apex[i]))
            if kinds[j] == "T":
                faces.append((apex[i], ring[j], apex[j]))
        else:
            faces.append((ring[i], ring[j], apex[next_t(i)], apex[prev_t(i)]))
    lid_ids = [apex[i] for i in tri]
    faces.append(tuple(lid_ids))

    # every band face must be a unit-lattice polyiamond
    v = np.array(verts)
    for f in faces[1:]:
        pts = v[list(f)]
        lengths = np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1)
        if np.max(np.abs(lengths - np.round(lengths))) > tol.eps_verify:
            raise BandDoesNotClose(f"face {f} has non-integer edges {lengths}")
        ang = polygon_angles(pts)
        if np.min(np.minimum(np.abs(ang - 60.0), np.abs(ang - 120.0))) > 1e-6:
            raise BandDoesNotClose(f"face {f} has angles {ang}")
    lid_pts = v[lid_ids]
    if np.ptp(lid_pts[:, 2]) > tol.eps_verify:
        raise BandDoesNotClose("lid vertices are not at one height")
    if lid is not None:
        got = np.linalg.norm(lid_pts - np.roll(lid_pts, -1, axis=0), axis=1)
        want = np.array(lid.edges, dtype=float)
        if len(got) != len(want) or not any(
            np.allclose(np.roll(got, k), want, atol=tol.eps_verify) for k in range(len(want))
        ):
            raise BandDoesNotClose(f"lid edges {np.round(got, 9)} differ from {lid.edges}")
    return _finish(verts, faces, tol)


def nine_gon_dome(tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Unit-edge 9-gon with angles 150, 120, 150 (x3); the lid is 13 unit triangles."""
    return one_story_dome([1] * 9, [150.0, 120.0, 150.0] * 3, tol=tol)


ELEVEN_GON_EDGES = (1, 1, 2, 1, 1, 1, 1, 1, 1, 1, 2)
ELEVEN_GON_ANGLES = (150.0, 120.0) + (150.0,) * 9


def eleven_gon_dome(tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """An 11-gon analogue: one 120-degree vertex and ten 150-degree vertices."""
    return one_story_dome(ELEVEN_GON_EDGES, ELEVEN_GON_ANGLES, tol=tol)
