"""Certify domes and audit their curvature, normals and dihedrals.

Every check has a stable id (``faces.polyiamond``, ``curvature.base_sum`` ...)
used in :class:`AuditReport` failures and in its JSON form. Checks whose
hypotheses need base angles of at least 120 degrees are only
asserted when the hypotheses hold; otherwise the quantities are reported.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomeError
from .geom import DEFAULT_TOL, Tolerances, _newell, dihedral_angle, planarity_error, polygon_angles
from .mesh import Mesh, unit_triangles
from .polygon import PolygonSpec, is_polyiamond_polygon

__all__ = [
    "FaceDiagnostic",
    "VertexCurvature",
    "CurvatureAudit",
    "NormalClassification",
    "DihedralProfile",
    "AuditReport",
    "verify_faces",
    "verify_convexity",
    "audit_curvature",
    "classify_normals",
    "dihedral_profile",
    "edge_dihedrals",
    "verify_full",
    "find_base_faces",
]

UNIT_AREA = math.sqrt(3.0) / 4.0
_STRAIGHT_DEG = 1e-4


@dataclass
class FaceDiagnostic:
    face: int
    ok: bool
    sides: list[float]
    angles: list[float]
    planarity: float
    problems: list[str] = field(default_factory=list)


@dataclass
class VertexCurvature:
    vertex: int
    is_base: bool
    beta_or_cone_angle: float  # base angle for base vertices, cone angle otherwise
    dome_angle: float
    omega: float  # radians
    incident_unit_triangles: int


@dataclass
class CurvatureAudit:
    V3: int
    V4: int
    V5: int
    dome_vertices: int  # non-flat dome vertices of any degree
    base_curvature_sum: float
    total_curvature: float
    v_equation: float  # V3 + 2/3 V4 + 1/3 V5
    all_base_three: bool  # every base vertex has a 180-degree dome angle
    vertices: list[VertexCurvature] = field(default_factory=list)
    unit_triangles: int = 0
    dome_area: float = 0.0


@dataclass
class NormalClassification:
    """Up/down per base edge (CCW base order) and the down count d."""

    labels: list[str]
    faces: list[int]
    d: int
    horizontal: list[int] = field(default_factory=list)


@dataclass
class DihedralProfile:
    delta: list[float]


@dataclass
class AuditReport:
    passed: bool
    curvature: CurvatureAudit | None
    normals: NormalClassification | None
    dihedrals: DihedralProfile | None
    failures: list[tuple[str, str]]
    checks: list[str]
    faces: list[FaceDiagnostic] = field(default_factory=list)

    def failed_ids(self) -> set[str]:
        return {cid for cid, _ in self.failures}

    def to_json(self, with_vertices: bool = False) -> dict:
        curv = asdict(self.curvature) if self.curvature else None
        if curv and not with_vertices:
            curv.pop("vertices")
        return {
            "passed": self.passed,
            "failures": [{"check": c, "message": m} for c, m in self.failures],
            "checks": self.checks,
            "curvature": curv,
            "normals": asdict(self.normals) if self.normals else None,
            "dihedrals": asdict(self.dihedrals) if self.dihedrals else None,
        }


class _Collector:
    def __init__(self):
        self.failures: list[tuple[str, str]] = []
        self.checks: list[str] = []

    def check(self, cid: str, ok: bool, message: str = ""):
        if cid not in self.checks:
            self.checks.append(cid)
        if not ok:
            self.failures.append((cid, message))


# -- helpers ---------------------------------------------------------------


def _face_angles(mesh: Mesh) -> list[np.ndarray]:
    return [polygon_angles(mesh.face_points(i)) for i in range(len(mesh.faces))]


def _corners(mesh: Mesh, fi: int, angles: np.ndarray) -> list[int]:
    return [k for k, a in enumerate(angles) if abs(a - 180.0) > _STRAIGHT_DEG]


def _base_ccw(mesh: Mesh) -> list[int]:
    """Base vertex ids in counter-clockwise order seen from +z."""
    return list(reversed(mesh.base))


def _base_corner_ids(mesh: Mesh, base_angles: dict[int, float]) -> list[int]:
    return [v for v in _base_ccw(mesh) if abs(base_angles[v] - 180.0) > _STRAIGHT_DEG]


def _faces_around(mesh: Mesh, v: int, directed: dict) -> list[int]:
    """Faces around v in rotational order, starting after the base face."""
    start = mesh.base_face
    order = [start]
    f = start
    for _ in range(len(mesh.faces) + 1):
        loop = mesh.faces[f]
        k = loop.index(v)
        prev = loop[k - 1]
        nxt_face = directed.get((v, prev))
        if nxt_face is None or nxt_face == start:
            break
        order.append(nxt_face)
        f = nxt_face
    return order[1:]


# -- face checks -------------------------------------------------------------


def verify_faces(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> list[FaceDiagnostic]:
    """Check every non-base face: planar, convex, integer sides, 60/120 angles."""
    out = []
    for fi in mesh.dome_faces():
        pts = mesh.face_points(fi)
        problems = []
        n = _newell(pts)
        norm = np.linalg.norm(n)
        if norm < tol.eps_construct:
            out.append(FaceDiagnostic(fi, False, [], [], float("nan"), ["DegenerateFace"]))
            continue
        n = n / norm
        planar = planarity_error(pts, n)
        if planar > tol.eps_verify:
            problems.append("NotPlanar")
        nxt = np.roll(pts, -1, axis=0)
        prv = np.roll(pts, 1, axis=0)
        turn = np.cross(pts - prv, nxt - pts) @ n
        lengths = np.linalg.norm(nxt - pts, axis=1)
        if np.any(turn < -tol.eps_verify * np.maximum(lengths, 1.0) ** 2):
            problems.append("NotConvexFace")
        angles = polygon_angles(pts)
        keep = [k for k in range(len(pts)) if abs(angles[k] - 180.0) > _STRAIGHT_DEG]
        sides = []
        for a, k in enumerate(keep):
            j = keep[(a + 1) % len(keep)]
            sides.append(float(np.linalg.norm(pts[j] - pts[k])))
        corner_angles = [float(angles[k]) for k in keep]
        rounded = [int(round(s)) for s in sides]
        if len(keep) < 3 or any(
            abs(s - r) > tol.eps_verify or r < 1 for s, r in zip(sides, rounded)
        ):
            problems.append("NonIntegerEdge")
        elif not is_polyiamond_polygon(PolygonSpec(tuple(rounded)), corner_angles, tol):
            problems.append("NotPolyiamondFace")
        out.append(FaceDiagnostic(fi, not problems, sides, corner_angles, planar, problems))
    return out


# -- convexity ---------------------------------------------------------------


def _far_vertex(pts: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    e = (q - p) / np.linalg.norm(q - p)
    rel = pts - p
    off = rel - np.outer(rel @ e, e)
    return pts[int(np.argmax(np.linalg.norm(off, axis=1)))]


def edge_dihedrals(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> dict[tuple[int, int], float]:
    """Interior dihedral (degrees) for every edge, keyed by (a, b) with a < b."""
    directed = mesh.directed_edges()
    out = {}
    for (a, b), fa in directed.items():
        if a > b:
            continue
        fb = directed.get((b, a))
        if fb is None:
            continue
        p, q = mesh.vertices[a], mesh.vertices[b]
        apex_a = _far_vertex(mesh.face_points(fa), p, q)
        apex_b = _far_vertex(mesh.face_points(fb), p, q)
        out[(a, b)] = dihedral_angle((p, q), apex_a, apex_b, tol)
    return out


def verify_convexity(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> list[tuple[str, str]]:
    """Diagnostics for reflex edges and vertices outside a face's halfspace."""
    problems = []
    for (a, b), delta in edge_dihedrals(mesh, tol).items():
        if delta > 180.0 + tol.eps_angle_deg:
            problems.append(("convexity.dihedral", f"NonConvexEdge ({a},{b}) dihedral {delta:.9f}"))
    v = mesh.vertices
    for fi in range(len(mesh.faces)):
        pts = mesh.face_points(fi)
        n = _newell(pts)
        n = n / np.linalg.norm(n)
        dist = (v - pts.mean(axis=0)) @ n
        worst = float(dist.max())
        if worst > tol.eps_verify:
            problems.append(
                ("convexity.halfspace", f"vertex {int(dist.argmax())} lies {worst:.3e} outside face {fi}")
            )
    return problems


# -- curvature -------------------------------------------------------------


def audit_curvature(mesh: Mesh, tol: Tolerances = DEFAULT_TOL, face_angles=None) -> CurvatureAudit:
    """Per-vertex curvature, V_k counts, base curvature sum and total curvature."""
    face_angles = face_angles or _face_angles(mesh)
    total_angle: dict[int, float] = defaultdict(float)
    dome_angle: dict[int, float] = defaultdict(float)
    base_angle: dict[int, float] = {}
    for fi, f in enumerate(mesh.faces):
        for v, a in zip(f, face_angles[fi]):
            total_angle[v] += a
            if fi == mesh.base_face:
                base_angle[v] = a
            else:
                dome_angle[v] += a
    records = []
    counts = defaultdict(int)
    base_sum = 0.0
    total = 0.0
    nonflat = 0
    all_three = True
    for v in sorted(total_angle):
        omega = math.radians(360.0 - total_angle[v])
        k = int(round(dome_angle[v] / 60.0))
        is_base = v in base_angle
        records.append(
            VertexCurvature(
                v,
                is_base,
                base_angle[v] if is_base else total_angle[v],
                dome_angle[v],
                omega,
                k,
            )
        )
        total += omega
        if is_base:
            base_sum += omega
            if abs(dome_angle[v] - 180.0) > 1e-6:
                all_three = False
        else:
            counts[k] += 1
            if k != 6:
                nonflat += 1
    areas = 0.0
    units = 0
    for fi in mesh.dome_faces():
        pts = mesh.face_points(fi)
        areas += 0.5 * float(np.linalg.norm(_newell(pts)))
        _, tris = unit_triangles(pts, tol)
        units += len(tris)
    return CurvatureAudit(
        V3=counts[3],
        V4=counts[4],
        V5=counts[5],
        dome_vertices=nonflat,
        base_curvature_sum=base_sum,
        total_curvature=total,
        v_equation=counts[3] + 2.0 * counts[4] / 3.0 + counts[5] / 3.0,
        all_base_three=all_three,
        vertices=records,
        unit_triangles=units,
        dome_area=areas,
    )


# -- normals ---------------------------------------------------------------


def _base_edge_faces(mesh: Mesh, corner_ids: list[int]) -> list[int]:
    """Dome face across each base edge (corner i to corner i+1, CCW)."""
    directed = mesh.directed_edges()
    ccw = _base_ccw(mesh)
    pos = {v: k for k, v in enumerate(ccw)}
    out = []
    for i, a in enumerate(corner_ids):
        # first segment of this base edge, traversed CCW (dome face owns it)
        nxt = ccw[(pos[a] + 1) % len(ccw)]
        out.append(directed[(a, nxt)])
    return out


def classify_normals(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> NormalClassification:
    """Up/down label for the dome face on each base edge, and the count d."""
    base_angles = dict(zip(mesh.base, polygon_angles(mesh.face_points(mesh.base_face))))
    corners = _base_corner_ids(mesh, base_angles)
    faces = _base_edge_faces(mesh, corners)
    labels = []
    horizontal = []
    for k, fi in enumerate(faces):
        n = _newell(mesh.face_points(fi))
        nz = n[2] / np.linalg.norm(n)
        if abs(nz) < tol.eps_verify:
            labels.append("horizontal")
            horizontal.append(k)
        else:
            labels.append("up" if nz > 0 else "down")
    return NormalClassification(labels, faces, labels.count("down"), horizontal)


def dihedral_profile(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> DihedralProfile:
    base_angles = dict(zip(mesh.base, polygon_angles(mesh.face_points(mesh.base_face))))
    corners = _base_corner_ids(mesh, base_angles)
    ccw = _base_ccw(mesh)
    pos = {v: k for k, v in enumerate(ccw)}
    dih = edge_dihedrals(mesh, tol)
    out = []
    for a in corners:
        b = ccw[(pos[a] + 1) % len(ccw)]
        out.append(dih[(min(a, b), max(a, b))])
    return DihedralProfile(out)


def find_base_faces(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> list[int]:
    """Faces that could serve as the base (the dome then passes verification)."""
    from .mesh import place_base, make_mesh

    good = []
    for fi in range(len(mesh.faces)):
        verts = place_base(mesh.vertices, mesh.faces, fi)
        cand = Mesh(verts, mesh.faces, fi)
        if verify_full(cand, None, tol).passed:
            good.append(fi)
    return good


# -- aggregate -------------------------------------------------------------


def _match_spec(lengths: list[float], spec: PolygonSpec, tol: Tolerances) -> int | None:
    """Offset k such that base edge i has length spec.edges[(i + k) % n]."""
    n = spec.n
    if len(lengths) != n:
        return None
    want = np.array(spec.edges, dtype=float)
    got = np.array(lengths)
    for k in range(n):
        if np.all(np.abs(got - np.roll(want, -k)) <= tol.eps_verify):
            return k
    return None


def verify_full(mesh: Mesh, spec: PolygonSpec | None = None, tol: Tolerances = DEFAULT_TOL) -> AuditReport:
    """Run every check; ``passed`` iff no check failed."""
    c = _Collector()
    directed = mesh.directed_edges()

    # structure (exact)
    dup = sum(len(f) for f in mesh.faces) - len(directed)
    unmatched = [e for e in directed if (e[1], e[0]) not in directed]
    c.check("structure.closed", dup == 0 and not unmatched,
            f"{dup} repeated directed edges, {len(unmatched)} unmatched")
    if dup or unmatched:
        return AuditReport(False, None, None, None, c.failures, c.checks)

    # base face
    base_pts = mesh.face_points(mesh.base_face)
    bn = _newell(base_pts)
    bn = bn / np.linalg.norm(bn)
    c.check("base.plane", float(np.max(np.abs(base_pts[:, 2]))) <= tol.eps_verify
            and bn[2] < -1.0 + tol.eps_verify, f"base normal {bn}, max |z| {np.max(np.abs(base_pts[:, 2])):.3e}")
    base_angles = dict(zip(mesh.base, polygon_angles(base_pts)))
    corners = _base_corner_ids(mesh, base_angles)
    corner_angles = [base_angles[v] for v in corners]
    m = len(corners)
    lengths = [
        float(np.linalg.norm(mesh.vertices[corners[(i + 1) % m]] - mesh.vertices[corners[i]]))
        for i in range(m)
    ]
    hyp120 = bool(corner_angles) and min(corner_angles) >= 120.0 - tol.eps_angle_deg
    equiangular = bool(corner_angles) and max(corner_angles) - min(corner_angles) <= tol.eps_angle_deg
    offset = 0
    if spec is not None:
        offset = _match_spec(lengths, spec, tol)
        angle_ok = all(abs(a - spec.base_angle) <= tol.eps_angle_deg for a in corner_angles)
        c.check("base.matches_spec", offset is not None and angle_ok,
                f"base edges {np.round(lengths, 9).tolist()} vs spec {list(spec.edges)}")
        offset = offset or 0

    # faces
    diags = verify_faces(mesh, tol)
    for d in diags:
        for prob in d.problems:
            cid = {"NotPlanar": "faces.planar", "NotConvexFace": "faces.convex",
                   "NonIntegerEdge": "faces.integer_edges",
                   "NotPolyiamondFace": "faces.polyiamond",
                   "DegenerateFace": "faces.planar"}[prob]
            c.check(cid, False, f"face {d.face}: {prob} sides={np.round(d.sides, 9).tolist()} angles={np.round(d.angles, 6).tolist()}")
    for cid in ("faces.planar", "faces.convex", "faces.integer_edges", "faces.polyiamond"):
        c.check(cid, True)
    faces_ok = all(d.ok for d in diags)

    # convexity
    degenerate = False
    try:
        convexity = verify_convexity(mesh, tol)
    except DomeError as exc:
        degenerate = True
        convexity = [("convexity.dihedral", f"{type(exc).__name__}: {exc}")]
    for cid, msg in convexity:
        c.check(cid, False, msg)
    c.check("convexity.dihedral", True)
    c.check("convexity.halfspace", True)

    if not faces_ok or degenerate:
        return AuditReport(False, None, None, None, c.failures, c.checks, diags)

    # curvature
    face_angles = _face_angles(mesh)
    curv = audit_curvature(mesh, tol, face_angles)
    c.check("curvature.total", abs(curv.total_curvature - 4 * math.pi) <= 1e-6,
            f"total curvature {curv.total_curvature:.12f}")
    bad_k = [r.vertex for r in curv.vertices
             if abs(r.dome_angle - 60.0 * round(r.dome_angle / 60.0)) > 1e-6]
    c.check("curvature.integral", not bad_k, f"dome angle not a multiple of 60 at {bad_k}")
    for r in curv.vertices:
        if r.is_base and r.beta_or_cone_angle >= 120.0 - tol.eps_angle_deg \
                and abs(r.beta_or_cone_angle - 180.0) > _STRAIGHT_DEG:
            c.check("curvature.base_degree", abs(r.dome_angle - 180.0) <= 1e-6,
                    f"BaseVertexBadDegree: base vertex {r.vertex} has {r.incident_unit_triangles} unit triangles")
    c.check("curvature.base_degree", True)
    if curv.all_base_three:
        c.check("curvature.base_sum", abs(curv.base_curvature_sum - 2 * math.pi) <= 1e-6,
                f"base curvature {curv.base_curvature_sum:.12f} != 2pi")
        c.check("curvature.v_equation", abs(curv.v_equation - 2.0) <= 1e-6,
                f"V3 + 2/3 V4 + 1/3 V5 = {curv.v_equation}")
    if hyp120:
        c.check("curvature.dome_vertices_le_6", curv.dome_vertices <= 6,
                f"{curv.dome_vertices} dome vertices")
    c.check("curvature.area",
            abs(curv.dome_area - curv.unit_triangles * UNIT_AREA) <= 1e-6 * max(curv.dome_area, 1.0),
            f"area {curv.dome_area} vs {curv.unit_triangles} unit triangles")

    # normals
    normals = classify_normals(mesh, tol)
    nb = len(corners)
    if hyp120:
        c.check("normals.d_ge_half", normals.d >= nb / 2.0, f"d={normals.d} < n/2={nb / 2}")
        c.check("normals.d_le_6", normals.d <= 6, f"d={normals.d} > 6")
        _check_vertex_normals(mesh, corners, c, tol)
        _check_down_faces(mesh, corners, normals, face_angles, c)
    dihedrals = dihedral_profile(mesh, tol)
    if equiangular and nb >= 6:
        deltas = dihedrals.delta
        if nb % 2 == 0:
            spread = max(np.ptp(deltas[0::2]), np.ptp(deltas[1::2]))
        else:
            spread = np.ptp(deltas)
            c.check("normals.all_down", normals.d >= nb, f"odd n={nb} with d={normals.d}")
        c.check("dihedrals.classes", spread <= 1e-6, f"dihedral classes spread {spread:.3e} degrees")
        if nb in (8, 10, 12):
            _check_layered_structure(mesh, corners, lengths, normals, curv, c, tol)

    return AuditReport(not c.failures, curv, normals, dihedrals, c.failures, c.checks, diags)


def _check_vertex_normals(mesh: Mesh, corners: list[int], c: _Collector, tol: Tolerances):
    """At each 180-degree base vertex: middle triangle up, a side triangle down."""
    directed = mesh.directed_edges()
    for v in corners:
        around = _faces_around(mesh, v, directed)
        sectors = []
        acc = 0.0
        for fi in around:
            f = mesh.faces[fi]
            k = f.index(v)
            pts = mesh.vertices[[f[k - 1], v, f[(k + 1) % len(f)]]]
            ang = float(polygon_angles(pts)[1])
            sectors.append((acc, acc + ang, fi))
            acc += ang
        if abs(acc - 180.0) > 1e-6:
            continue

        def face_at(t):
            return next(fi for lo, hi, fi in sectors if lo - 1e-9 <= t <= hi + 1e-9)

        def nz(fi):
            n = _newell(mesh.face_points(fi))
            return n[2] / np.linalg.norm(n)

        t1, t2, t3 = face_at(30.0), face_at(90.0), face_at(150.0)
        c.check("normals.pm_middle_up", nz(t2) > tol.eps_verify,
                f"middle triangle at base vertex {v} is not upward")
        c.check("normals.pm_side_down", min(nz(t1), nz(t3)) < -tol.eps_verify,
                f"no downward side triangle at base vertex {v}")


def _check_down_faces(mesh, corners, normals, face_angles, c: _Collector):
    """Downward base faces: 60 degrees at both base ends, no shared dome vertex."""
    base = set(mesh.base)
    owners: dict[int, int] = {}
    m = len(corners)
    for k, (label, fi) in enumerate(zip(normals.labels, normals.faces)):
        if label != "down":
            continue
        f = mesh.faces[fi]
        ends = (corners[k], corners[(k + 1) % m])
        for v in ends:
            a = face_angles[fi][f.index(v)]
            c.check("normals.down_face_60", abs(a - 60.0) <= 1e-6,
                    f"downward face {fi} has angle {a:.6f} at base vertex {v}")
        for v in f:
            if v in base:
                continue
            if v in owners and owners[v] != fi:
                c.check("normals.private", False,
                        f"downward faces {owners[v]} and {fi} share dome vertex {v}")
            owners[v] = fi
    c.check("normals.down_face_60", True)
    c.check("normals.private", True)


def _check_layered_structure(mesh, corners, lengths, normals, curv, c: _Collector, tol):
    """Structure forced on any dome over an equiangular 8-, 10- or 12-gon."""
    m = len(corners)
    down = [k for k in range(m) if normals.labels[k] == "down"]
    cls = {k % 2 for k in down}
    c.check("structure.blue_class", len(cls) == 1 and len(down) == m // 2,
            f"downward base faces at edges {down}")
    if len(cls) != 1:
        return
    p = cls.pop()
    kinds = {r.vertex: r.incident_unit_triangles for r in curv.vertices if not r.is_base}
    ell = lengths[p]
    for k in range(m):
        fi = normals.faces[k]
        f = mesh.faces[fi]
        pts = mesh.vertices[list(f)]
        ang = polygon_angles(pts)
        corner_ids = [v for v, a in zip(f, ang) if abs(a - 180.0) > _STRAIGHT_DEG]
        if k % 2 == p:
            apex = [v for v in corner_ids if v not in (corners[k], corners[(k + 1) % m])]
            ok = len(corner_ids) == 3 and len(apex) == 1 and kinds.get(apex[0]) == 5
            c.check("structure.blue_triangles", ok,
                    f"face on base edge {k} is not a triangle with a V5 apex")
        else:
            top = [v for v in corner_ids if v not in (corners[k], corners[(k + 1) % m])]
            ok = len(corner_ids) == 4 and len(top) == 2
            if ok:
                at = {v: a for v, a in zip(f, ang)}
                ok = all(abs(at[v] - 120.0) <= 1e-6 for v in (corners[k], corners[(k + 1) % m])) \
                    and all(abs(at[v] - 60.0) <= 1e-6 for v in top)
            c.check("structure.red_trapezoids", ok,
                    f"face on base edge {k} is not a 120/60 trapezoid")
            if ok:
                top_len = float(np.linalg.norm(mesh.vertices[top[0]] - mesh.vertices[top[1]]))
                c.check("structure.lid_lengths", abs(top_len - (lengths[k] + ell)) <= tol.eps_verify,
                        f"lid edge over base edge {k} is {top_len:.9f}, want {lengths[k] + ell}")
    for cid in ("structure.blue_triangles", "structure.red_trapezoids", "structure.lid_lengths"):
        c.check(cid, True)
