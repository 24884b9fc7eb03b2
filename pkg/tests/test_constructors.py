import math

import numpy as np
import pytest

from deltadome import constructors as c
from deltadome.constructors import PlanKind
from deltadome.errors import ApexDegenerate, BandDoesNotClose, NotClosed, NotDomeable, NotPolyiamondPolygon
from deltadome.geom import polygon_area
from deltadome.polygon import PolygonSpec
from deltadome.verifier import edge_dihedrals, verify_full

UNIT = math.sqrt(3) / 4


def spec(*e):
    return PolygonSpec(tuple(e))


def sorted_points(mesh):
    return np.array(sorted(map(tuple, np.round(mesh.vertices, 9))))


def test_decide_examples():
    with pytest.raises(NotDomeable, match="n=7"):
        c.decide(spec(1, 1, 1, 1, 1, 1, 1))
    assert c.decide(spec(3, 1, 3, 1)).kind is PlanKind.ROOF
    plan = c.decide(spec(1, 1, 1, 2, 1, 1, 1, 1, 1, 2, 1, 1))
    assert plan.kind is PlanKind.LAYERED and plan.params["cap"] == "flat"
    assert plan.params["lid"].n == 6
    with pytest.raises(NotClosed):
        c.decide(spec(1, 1, 2, 1, 1))


def test_decide_names_failed_condition():
    with pytest.raises(NotDomeable, match="odd-edge"):
        c.decide(spec(1, 2, 2, 1, 1, 2, 2, 1))
    with pytest.raises(NotDomeable, match="n=9"):
        c.decide(spec(*(1,) * 9))


def test_pyramid_pentagon():
    m = c.pyramid_dome(spec(1, 1, 1, 1, 1))
    assert m.n_vertices == 6 and len(m.dome_faces()) == 5
    assert m.vertices[:, 2].max() == pytest.approx(math.sqrt(1 - (1 / (2 * math.sin(math.radians(36)))) ** 2), abs=1e-9)
    assert m.vertices[:, 2].max() == pytest.approx(0.525731, abs=1e-6)


def test_pyramid_square_and_hexagon():
    assert c.pyramid_dome(spec(1, 1, 1, 1)).vertices[:, 2].max() == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(ApexDegenerate):
        c.pyramid_dome(spec(1, 1, 1, 1, 1, 1))


def test_roof_3x1():
    m = c.roof_dome(spec(3, 1, 3, 1))
    top = m.vertices[m.vertices[:, 2] > 1e-9]
    assert len(top) == 2
    assert np.linalg.norm(top[0] - top[1]) == pytest.approx(2.0)
    assert top[0, 2] == pytest.approx(1 / math.sqrt(2))
    assert verify_full(m, spec(3, 1, 3, 1)).passed


def test_roof_degenerates_to_pyramid():
    assert np.allclose(sorted_points(c.roof_dome(spec(1, 1, 1, 1))), sorted_points(c.pyramid_dome(spec(1, 1, 1, 1))))


def test_roof_4x2():
    m = c.roof_dome(spec(4, 2, 4, 2))
    assert m.vertices[:, 2].max() == pytest.approx(2 / math.sqrt(2))
    quads = [f for f in m.dome_faces() if len(m.faces[f]) == 4]
    assert len(quads) == 2
    for f in quads:
        pts = m.face_points(f)
        sides = sorted(np.round(np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1), 9))
        assert sides == [2, 2, 2, 4]


def test_truncated_tetra_examples():
    m = c.truncated_tetra_dome(spec(2, 2, 2))
    assert m.n_vertices == 4 and len(m.faces) == 4
    hexa = c.truncated_tetra_dome(spec(1, 1, 1, 1, 1, 1))
    assert verify_full(hexa).passed
    assert len(hexa.faces) == 7  # base hexagon, three hexagons, three triangles
    trap = c.truncated_tetra_dome(spec(2, 1, 1, 1), [60, 60, 120, 120])
    assert verify_full(trap).passed and trap.n_vertices == 6
    with pytest.raises(NotPolyiamondPolygon):
        c.truncated_tetra_dome(spec(1, 1, 1, 1))


def test_antiprism_dome():
    m = c.antiprism_dome(spec(1, 1, 1, 1, 1, 1))
    tris = [f for f in m.dome_faces() if len(m.faces[f]) == 3]
    assert len(tris) == 12 and len(m.faces) == 14
    base_edges = {frozenset(e) for e in zip(m.base, m.base[1:] + m.base[:1])}
    dihedral = edge_dihedrals(m)
    assert all(dihedral[tuple(sorted(e))] > 90.0 for e in base_edges)
    big = c.antiprism_dome(spec(2, 2, 2, 2, 2, 2))
    assert np.allclose(sorted_points(big), np.round(2 * sorted_points(m), 9), atol=1e-8)
    assert verify_full(m).passed and verify_full(big).passed


def test_layered_octagon_lid():
    s = spec(1, 4, 1, 2, 1, 4, 1, 2)
    m = c.build(s)
    top = m.vertices[:, 2].max()
    plan = c.decide(s)
    assert plan.params["lid"].edges in ((5, 3, 5, 3), (3, 5, 3, 5))
    assert verify_full(m, s).passed and top > 0


def test_layered_decagon():
    m = c.build(spec(*(1,) * 10))
    assert c.decide(spec(*(1,) * 10)).params["lid"].edges == (2,) * 5
    assert max(edge_dihedrals(m).values()) == pytest.approx(138.19, abs=0.01)


def test_layered_twelve_gon_has_one_lid_face():
    s = spec(1, 1, 1, 2, 1, 1, 1, 1, 1, 2, 1, 1)
    m = c.build(s)
    hexagons = [f for f in m.dome_faces() if len(m.faces[f]) == 6]
    assert len(hexagons) == 1
    assert len(m.dome_faces()) == 13


def test_one_story_matches_antiprism():
    a = c.antiprism_dome(spec(1, 1, 1, 1, 1, 1))
    b = c.one_story_dome((1,) * 6, [120.0] * 6)
    assert np.allclose(sorted_points(a), sorted_points(b), atol=1e-9)


def test_nine_gon_lid_is_13_triangles():
    m = c.nine_gon_dome()
    assert verify_full(m).passed
    lid = max(m.dome_faces(), key=lambda f: m.vertices[list(m.faces[f]), 2].min())
    assert polygon_area(m.face_points(lid)) / UNIT == pytest.approx(13.0)


def test_eleven_gon():
    m = c.eleven_gon_dome()
    assert len(m.base) == 11 and verify_full(m).passed


def test_one_story_rejects_bad_angles():
    with pytest.raises(BandDoesNotClose):
        c.one_story_kinds([150.0, 120.0, 90.0, 150.0])
