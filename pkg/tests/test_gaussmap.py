import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltadome.errors import OutOfRange, Unrealizable
from deltadome.gaussmap import (
    analyze_vertex_star,
    arc_length,
    make_star,
    realizable_interval,
    sample_stars,
    solve_arc,
    symmetric_star,
)


def test_solve_arc_examples():
    assert solve_arc(60, 60) == pytest.approx(math.degrees(math.acos(-1 / 3)), abs=1e-9)
    assert solve_arc(60, 60) == pytest.approx(109.471, abs=1e-3)
    assert solve_arc(90, 90) == pytest.approx(120.0)


@given(st.floats(60, 179), st.floats(1, 60))
def test_solve_arc_obtuse(A, C):
    try:
        x = solve_arc(A, C)
    except OutOfRange:
        return
    assert x > 90.0


def test_solve_arc_domain():
    with pytest.raises(OutOfRange):
        solve_arc(0, 60)


def test_symmetric_star_at_120():
    star = symmetric_star(120.0)
    assert star.delta1 == pytest.approx(star.delta3, abs=1e-9)
    r = analyze_vertex_star(star)
    assert r.n2_up and r.n1_down and r.n3_down


def test_tilted_star_at_150():
    lo, hi = realizable_interval(150.0)
    star = make_star(150.0, hi - 1e-3)
    assert star.dihedrals[2] > 179.0  # t3 nearly coplanar with t2
    r = analyze_vertex_star(star)
    assert r.n2_up and r.n1_down != r.n3_down


@given(st.floats(100, 179.9), st.floats(0, 1))
def test_realizable_interval_matches_construction(beta, t):
    lo, hi = realizable_interval(beta)
    make_star(beta, lo + (hi - lo) * (0.01 + 0.98 * t))
    with pytest.raises(Unrealizable):
        make_star(beta, hi + 0.5)


def test_no_star_below_60():
    with pytest.raises(Unrealizable):
        realizable_interval(50.0)


@given(st.floats(120, 179.5), st.floats(0.02, 0.98))
def test_edge_arcs_are_supplementary(beta, t):
    # an edge maps to an arc of length 180 - dihedral
    lo, hi = realizable_interval(beta)
    star = make_star(beta, lo + (hi - lo) * t)
    n1, n2, n3 = star.normals
    d_r1, d_s1, d_s2, d_r3 = star.dihedrals
    assert arc_length(n1, n2) == pytest.approx(180.0 - d_s1, abs=1e-7)
    assert arc_length(n2, n3) == pytest.approx(180.0 - d_s2, abs=1e-7)
    assert arc_length(star.n0, n1) == pytest.approx(180.0 - d_r1, abs=1e-7)
    assert arc_length(star.n0, n3) == pytest.approx(180.0 - d_r3, abs=1e-7)


def test_formula_matches_direct_arcs():
    for star in sample_stars(200, seed=7):
        r = analyze_vertex_star(star)
        assert r.arc_x_deg == pytest.approx(r.arc_x_direct, abs=1e-6)
        assert r.arc_y_deg == pytest.approx(r.arc_y_direct, abs=1e-6)


def test_sampling_is_seeded():
    a = [s.dihedrals for s in sample_stars(20, seed=3)]
    b = [s.dihedrals for s in sample_stars(20, seed=3)]
    assert a == b
    assert all(120.0 <= s.beta < 180.0 for s in sample_stars(50, seed=1))


def test_normals_are_unit():
    for star in sample_stars(20, seed=2):
        np.testing.assert_allclose(np.linalg.norm(star.normals, axis=1), 1.0, atol=1e-12)
