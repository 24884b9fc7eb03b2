"""One test per acceptance criterion, each at its stated tolerance."""

import math
import time
from functools import lru_cache

import numpy as np
import pytest

from deltadome import constructors as c
from deltadome.constructors import PlanKind
from deltadome.errors import NotDomeable
from deltadome.fixtures import _square_antiprism, fixture_names, hull_mesh, load_fixture
from deltadome.gaussmap import analyze_vertex_star, sample_stars
from deltadome.geom import Tolerances, polygon_angles
from deltadome.io import from_json_text, from_obj, to_json_text, to_obj
from deltadome.polygon import PolygonSpec, closes, enumerate_equiangular
from deltadome.search import SearchBudget, search_dome
from deltadome.verifier import (
    audit_curvature,
    classify_normals,
    dihedral_profile,
    edge_dihedrals,
    verify_full,
)

TOL = Tolerances(eps_verify=1e-6)
TWO_PI = 2 * math.pi


def expected_domeable(edges: tuple[int, ...]) -> bool:
    """Independent statement of the edge-length conditions."""
    n = len(edges)
    if n in (3, 4, 5, 6):
        return True
    if n not in (8, 10, 12):
        return False
    for p in (0, 1):
        odd, even = edges[p::2], edges[1 - p :: 2]
        if len(set(odd)) == 1 and closes(even):
            return True
    return False


@lru_cache(maxsize=None)
def decision_table():
    table = []
    for n in range(3, 17):
        for row in enumerate_equiangular(n, 4):
            spec = PolygonSpec(tuple(int(x) for x in row))
            try:
                table.append((spec, c.decide(spec)))
            except NotDomeable:
                table.append((spec, None))
    return table


@lru_cache(maxsize=None)
def built_domes():
    return [(s, p, c.build(s, p, TOL)) for s, p in decision_table() if p is not None]


def base_angles(mesh):
    return polygon_angles(mesh.vertices[list(mesh.base)])


def test_1_decision_table_matches_conditions_under_10s():
    start = time.perf_counter()
    table = decision_table.__wrapped__()
    elapsed = time.perf_counter() - start
    assert len(table) > 0
    wrong = [s.edges for s, p in table if (p is not None) != expected_domeable(s.edges)]
    assert wrong == []
    assert {s.n for s, p in table if p is not None} == {3, 4, 5, 6, 8, 10, 12}
    assert elapsed < 10.0


def test_2_every_plan_builds_a_verified_dome_under_60s():
    start = time.perf_counter()
    failures = []
    for spec, plan in decision_table():
        if plan is None:
            continue
        report = verify_full(c.build(spec, plan, TOL), spec, TOL)
        if not report.passed:
            failures.append((spec.edges, report.failures))
    elapsed = time.perf_counter() - start
    assert failures == []
    assert elapsed < 60.0


def test_3_dihedral_reproduction():
    octagons = [m for s, p, m in built_domes() if s.n == 8]
    assert octagons
    for m in octagons:
        assert max(edge_dihedrals(m).values()) == pytest.approx(159.0, abs=1.0)
    decagon = c.build(PolygonSpec((1,) * 10))
    assert max(edge_dihedrals(decagon).values()) == pytest.approx(138.0, abs=1.0)
    band, _ = _square_antiprism()
    antiprism = hull_mesh(band)
    square = next(i for i, f in enumerate(antiprism.faces) if len(f) == 4)
    tri_square = [d for (a, b), d in edge_dihedrals(antiprism).items()
                  if a in antiprism.faces[square] and b in antiprism.faces[square]]
    assert len(tri_square) == 4
    assert tri_square == pytest.approx([104.0] * 4, abs=1.0)
    pyramid = dihedral_profile(c.build(PolygonSpec((1, 1, 1, 1))))
    assert pyramid.delta == pytest.approx([55.0] * 4, abs=1.0)


def test_4_curvature_audits():
    meshes = [m for _, _, m in built_domes()] + [load_fixture(n) for n in fixture_names()]
    meshes += [c.nine_gon_dome(), c.eleven_gon_dome()]
    checked_base = 0
    for m in meshes:
        audit = audit_curvature(m, TOL)
        assert audit.total_curvature == pytest.approx(2 * TWO_PI, abs=1e-6)
        if base_angles(m).min() >= 120.0 - 1e-9:
            assert audit.all_base_three
        if audit.all_base_three:
            checked_base += 1
            assert audit.base_curvature_sum == pytest.approx(TWO_PI, abs=1e-6)
            assert audit.v_equation == pytest.approx(2.0, abs=1e-6)
    assert checked_base > 1000


def test_5_normal_classification():
    seen_twelve = 0
    for spec, plan, m in built_domes():
        if spec.base_angle < 120.0:
            continue
        normals = classify_normals(m, TOL)
        assert spec.n / 2 <= normals.d <= 6
        if spec.n != 12:
            continue
        seen_twelve += 1
        odd = range(plan.params["parity"], 12, 2)
        curv = {v.vertex: v for v in audit_curvature(m, TOL).vertices}
        base = set(m.base)
        for i in odd:
            f = normals.faces[i]
            assert normals.labels[i] == "down" and len(m.faces[f]) == 3
            apex = next(v for v in m.faces[f] if v not in base)
            assert curv[apex].incident_unit_triangles == 5
    assert seen_twelve > 0


def test_6_gauss_map_properties_1000_samples():
    reports = [analyze_vertex_star(s) for s in sample_stars(1000, seed=0, beta_range=(120.0, 180.0))]
    assert len(reports) == 1000
    assert all(r.n2_up for r in reports)
    assert all(r.n1_or_n3_down for r in reports)
    assert all(r.formula_agrees for r in reports)


def test_7_search_corroboration():
    for n in (3, 4, 5, 6):
        spec = PolygonSpec((1,) * n)
        out = search_dome(spec, SearchBudget())
        assert out.found is not None and verify_full(out.found, spec, TOL).passed
    heptagon = search_dome(PolygonSpec((1,) * 7), SearchBudget())
    assert heptagon.found is None
    assert not heptagon.certified and not heptagon.timed_out and not heptagon.budget_exceeded
    assert heptagon.templates_tried > 0


def test_8_round_trip_on_fixture_corpus():
    for name in fixture_names():
        m = load_fixture(name)
        before = verify_full(m, tol=TOL).passed
        for back in (from_obj(to_obj(m)), from_json_text(to_json_text(m))):
            assert np.max(np.abs(back.vertices - m.vertices)) <= 1e-9
            assert [tuple(f) for f in back.faces] == [tuple(f) for f in m.faces]
            assert verify_full(back, tol=TOL).passed == before
