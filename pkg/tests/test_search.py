import itertools

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from deltadome import constructors as c
from deltadome.errors import BudgetExceeded, NotClosed
from deltadome.polygon import PolygonSpec
from deltadome.search import (
    SearchBudget,
    boundary_layout,
    embed_template,
    enumerate_templates,
    search_dome,
    template_from_mesh,
)
from deltadome.verifier import verify_full


def spec(*e):
    return PolygonSpec(tuple(e))


def same_template(a, b) -> bool:
    if (a.n_boundary, a.n_interior, len(a.triangles)) != (b.n_boundary, b.n_interior, len(b.triangles)):
        return False
    target = {frozenset(t) for t in b.triangles}
    nb = a.n_boundary
    for perm in itertools.permutations(range(nb, nb + a.n_interior)):
        relabel = list(range(nb)) + list(perm)
        if {frozenset(relabel[v] for v in t) for t in a.triangles} == target:
            return True
    return False


def distances(mesh):
    return np.sort(cdist(mesh.vertices, mesh.vertices).ravel())


def test_boundary_layout_hexagon_side_2():
    layout = boundary_layout(spec(2, 2, 2, 2, 2, 2))
    assert layout.size == 12 and sum(layout.is_corner) == 6


def test_enumeration_is_deterministic():
    a = [t.triangles for t in enumerate_templates(spec(*(1,) * 6))]
    b = [t.triangles for t in enumerate_templates(spec(*(1,) * 6))]
    assert a == b and len(a) > 0


def test_templates_obey_degree_budget():
    for t in enumerate_templates(spec(*(1,) * 6)):
        assert t.dome_vertex_count <= 6 and t.flat_count <= 6
        assert all(3 <= d <= 6 for d in t.interior_degrees())
        v = t.v_counts()
        assert 3 * v.get(3, 0) + 2 * v.get(4, 0) + v.get(5, 0) == 6


def test_hexagon_templates_include_antiprism():
    antiprism, _ = template_from_mesh(c.build(spec(*(1,) * 6)))
    assert any(same_template(t, antiprism) for t in enumerate_templates(spec(*(1,) * 6)))


def test_template_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_templates(spec(*(1,) * 6), max_templates=5))


def test_antiprism_template_reembeds():
    s = spec(*(1,) * 6)
    target = c.build(s)
    template, _ = template_from_mesh(target)
    res = embed_template(template, s)
    assert res.mesh is not None and res.residual < 1e-10
    assert np.allclose(distances(res.mesh), distances(target), atol=1e-6)


def test_decagon_template_reembeds():
    s = spec(*(1, 3) * 5)
    target = c.build(s)
    template, interior = template_from_mesh(target)
    guess = interior + 0.01 * np.random.default_rng(1).normal(size=interior.shape)
    res = embed_template(template, s, initial=guess)
    assert res.mesh is not None
    assert np.allclose(distances(res.mesh), distances(target), atol=1e-6)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_search_finds_regular(n):
    out = search_dome(spec(*(1,) * n))
    assert out.found is not None and not out.certified
    assert verify_full(out.found, spec(*(1,) * n)).passed


def test_search_relaxed_pyramids():
    out = search_dome(spec(1, 1, 1, 1))
    assert out.found.n_vertices == 5
    out = search_dome(spec(1, 1, 1, 1, 1))
    assert out.found.n_vertices == 6


def test_search_unclosed_octagon():
    with pytest.raises(NotClosed):
        search_dome(spec(1, 1, 1, 1, 1, 2, 1, 2))


@pytest.mark.parametrize("edges", [(1, 1, 1), (2, 2, 2), (1, 1, 1, 1), (1, 2, 1, 2), (1,) * 5, (1,) * 6])
def test_search_matches_constructor_profile(edges):
    s = spec(*edges)
    want = verify_full(c.build(s), s)

    def profile(r):
        return (r.curvature.V3, r.curvature.V4, r.curvature.V5, r.normals.d)

    out = search_dome(s, accept=lambda r: profile(r) == profile(want))
    assert out.found is not None
    assert profile(verify_full(out.found, s)) == profile(want)


def test_search_json():
    data = search_dome(spec(1, 1, 1)).to_json()
    assert data["found"] and data["certified"] is False and "empirical" in data["note"]


def test_time_limit():
    out = search_dome(spec(*(1,) * 7), SearchBudget(time_limit=0.0))
    assert out.found is None and out.timed_out
