import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from deltadome.errors import DegenerateEdge, DegenerateFace, DegenerateWedge, NonPlanarFace
from deltadome.geom import (
    DEFAULT_TOL,
    Tolerances,
    angle_at,
    default_tolerances,
    dihedral_angle,
    face_normal,
    polygon_angles,
)

TETRA = np.array([[0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0],
                  [0.5, math.sqrt(3) / 6, math.sqrt(2 / 3)]])


def tetra_dihedral(pts):
    # edge p0 -> p1; face A = (p0, p1, p3) ccw outward, face B = (p1, p0, p2)
    return dihedral_angle((pts[0], pts[1]), pts[3], pts[2])


def test_tetrahedron_dihedral():
    assert tetra_dihedral(TETRA) == pytest.approx(math.degrees(math.acos(1 / 3)), abs=1e-6)
    assert tetra_dihedral(TETRA) == pytest.approx(70.528779, abs=1e-6)


def test_flat_edge_is_180():
    assert dihedral_angle(([0, 0, 0], [1, 0, 0]), [0.5, 1, 0], [0.5, -1, 0]) == pytest.approx(180.0)


def test_cube_edge_is_90():
    assert dihedral_angle(([0, 0, 0], [1, 0, 0]), [0, 0, 1], [0, 1, 0]) == pytest.approx(90.0)


def test_reflex_edge_above_180():
    assert dihedral_angle(([0, 0, 0], [1, 0, 0]), [0, 1, 0.2], [0, -1, 0.2]) > 180.0
    assert dihedral_angle(([0, 0, 0], [1, 0, 0]), [0, 1, -0.2], [0, -1, -0.2]) < 180.0


def test_degenerate_edge():
    with pytest.raises(DegenerateEdge):
        dihedral_angle(([0, 0, 0], [0, 0, 0]), [0, 1, 0], [0, -1, 0])
    with pytest.raises(DegenerateEdge):
        dihedral_angle(([0, 0, 0], [1, 0, 0]), [2, 0, 0], [0, -1, 0])


rotations = st.integers(0, 2**31 - 1).map(lambda s: Rotation.random(random_state=s).as_matrix())
shifts = st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(np.array)


@given(rotations, shifts)
def test_dihedral_rigid_motion_invariant(rot, shift):
    moved = TETRA @ rot.T + shift
    assert tetra_dihedral(moved) == pytest.approx(tetra_dihedral(TETRA), abs=1e-9)


@given(st.floats(0.1, 3.0), st.floats(-2.0, 2.0))
def test_dihedral_swap_symmetry(h, z):
    p, q = np.zeros(3), np.array([1.0, 0, 0])
    a, b = np.array([0.3, 1.0, z]), np.array([0.6, -h, 0.4])
    assert dihedral_angle((p, q), a, b) == pytest.approx(dihedral_angle((q, p), b, a), abs=1e-9)


def test_face_normal_examples():
    tri = [[0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0]]
    np.testing.assert_allclose(face_normal(tri), [0, 0, 1], atol=1e-12)
    np.testing.assert_allclose(face_normal(tri[::-1]), [0, 0, -1], atol=1e-12)
    np.testing.assert_allclose(face_normal([[0, 0, 0], [1, 0, 0], [0.5, 0, 1]]), [0, -1, 0], atol=1e-12)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=3))
def test_face_normal_reversal(pts):
    pts = np.array(pts)
    if np.linalg.norm(np.cross(pts[1] - pts[0], pts[2] - pts[0])) < 1e-3:
        return
    np.testing.assert_allclose(face_normal(pts[::-1]), -face_normal(pts), atol=1e-9)


def test_face_normal_errors():
    with pytest.raises(DegenerateFace):
        face_normal([[0, 0, 0], [1, 0, 0], [2, 0, 0]])
    with pytest.raises(DegenerateFace):
        face_normal([[0, 0, 0], [1, 0, 0]])
    with pytest.raises(NonPlanarFace):
        face_normal([[0, 0, 0], [1, 0, 0], [1, 1, 0.01], [0, 1, 0]])


def test_angle_at_examples():
    assert angle_at([0, 0, 0], [1, 0, 0], [0, 1, 0]) == pytest.approx(90.0)
    assert angle_at([0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0]) == pytest.approx(60.0)
    hexa = np.array([[math.cos(t), math.sin(t), 0] for t in np.arange(6) * math.pi / 3])
    assert angle_at(hexa[1], hexa[0], hexa[2]) == pytest.approx(120.0)
    with pytest.raises(DegenerateWedge):
        angle_at([0, 0, 0], [0, 0, 0], [1, 0, 0])


@given(st.integers(3, 30))
def test_regular_polygon_angle_sum(n):
    t = 2 * np.pi * np.arange(n) / n
    pts = np.stack([np.cos(t), np.sin(t), np.zeros(n)], axis=1)
    assert polygon_angles(pts).sum() == pytest.approx((n - 2) * 180.0)


def test_tolerances_validation(monkeypatch):
    with pytest.raises(ValueError):
        Tolerances(eps_verify=-1)
    with pytest.raises(ValueError):
        Tolerances(eps_construct=1e-3, eps_verify=1e-6)
    monkeypatch.delenv("DELTADOME_EPS", raising=False)
    assert default_tolerances() == DEFAULT_TOL
    monkeypatch.setenv("DELTADOME_EPS", "1e-4")
    assert default_tolerances().eps_verify == 1e-4
