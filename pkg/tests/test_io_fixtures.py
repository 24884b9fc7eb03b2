import math

import numpy as np
import pytest

from deltadome import constructors as c
from deltadome.errors import MeshFormatError
from deltadome.fixtures import DELTAHEDRA, fixture_names, generate, load_fixture
from deltadome.io import from_json_text, from_obj, read_mesh, to_json_text, to_obj, write_mesh
from deltadome.polygon import PolygonSpec
from deltadome.verifier import audit_curvature, classify_normals, verify_full

FACE_COUNTS = {
    "tetrahedron": 4,
    "triangular_bipyramid": 6,
    "octahedron": 8,
    "pentagonal_bipyramid": 10,
    "snub_disphenoid": 12,
    "triaugmented_triangular_prism": 14,
    "gyroelongated_square_bipyramid": 16,
    "icosahedron": 20,
}


def test_corpus_names():
    names = fixture_names()
    assert set(DELTAHEDRA) <= set(names)
    assert len(names) == 19


@pytest.mark.parametrize("name", sorted(FACE_COUNTS))
def test_deltahedra_face_counts(name):
    m = load_fixture(name)
    assert len(m.faces) == FACE_COUNTS[name]
    assert all(len(f) == 3 for f in m.faces)


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_passes(name):
    report = verify_full(load_fixture(name))
    assert report.passed, report.failures


def test_shipped_fixtures_match_generator():
    fresh = generate()
    for name in fixture_names():
        np.testing.assert_allclose(load_fixture(name).vertices, fresh[name].vertices, atol=1e-12)
        assert [tuple(f) for f in load_fixture(name).faces] == [tuple(f) for f in fresh[name].faces]


def test_slice_shapes():
    assert len(load_fixture("slice_decagon_icosahedron").base) == 10
    assert len(load_fixture("slice_octagon_gyroelongated_bipyramid").base) == 8
    assert len(load_fixture("slice_12gon_hexagonal_antiprism").base) == 12
    pent = load_fixture("slice_pentagon_icosahedron")
    assert classify_normals(pent).d == 5
    assert audit_curvature(pent).base_curvature_sum == pytest.approx(2 * math.pi, abs=1e-6)


def test_obj_round_trip_exact():
    m = c.build(PolygonSpec((1, 3) * 5))
    back = from_obj(to_obj(m))
    assert np.array_equal(back.vertices, m.vertices)
    assert back.base_face == m.base_face and [tuple(f) for f in back.faces] == [tuple(f) for f in m.faces]


def test_json_round_trip_exact():
    m = c.build(PolygonSpec((3, 1, 3, 1)))
    back = from_json_text(to_json_text(m))
    assert np.array_equal(back.vertices, m.vertices)


def test_triangulated_export_still_verifies(tmp_path):
    m = c.build(PolygonSpec((1, 4, 1, 2, 1, 4, 1, 2)))
    path = tmp_path / "octa.obj"
    write_mesh(m, path, triangulate=True)
    tri = read_mesh(path)
    assert all(len(f) == 3 for i, f in enumerate(tri.faces) if i != tri.base_face)
    assert len(tri.faces) - 1 == audit_curvature(m).unit_triangles


def test_obj_base_face_override():
    m = c.build(PolygonSpec((1, 1, 1)))
    assert from_obj(to_obj(m), base_face=2).base_face == 2


def test_obj_accepts_slashes_and_negative_indices():
    text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3\nf -1 -2 -3\n"
    m = from_obj(text)
    assert m.faces[1] == (2, 1, 0)


@pytest.mark.parametrize("text", [
    "v 0 0\nf 1 2 3\n",
    "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n",
    "v 0 0 0\nv 1 0 x\nv 0 1 0\nf 1 2 3\n",
    "v 0 0 0\n",
    "# base_face: 4\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n",
])
def test_bad_obj(text):
    with pytest.raises(MeshFormatError):
        from_obj(text)


@pytest.mark.parametrize("text", ["{", "[]", '{"vertices": [[0,0,0]]}', '{"vertices": [[0, 0, NaN]], "faces": [[0,0,0]]}'])
def test_bad_json(text):
    with pytest.raises(MeshFormatError):
        from_json_text(text)
