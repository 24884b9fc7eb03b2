import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltadome.errors import NotClosed
from deltadome.polygon import (
    PolygonSpec,
    check_conditions,
    closes,
    embed,
    enumerate_equiangular,
    is_polyiamond_polygon,
)


def test_embed_square():
    poly = embed(PolygonSpec((1, 1, 1, 1)))
    np.testing.assert_allclose(poly.vertices, [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], atol=1e-12)
    assert poly.interior_angle == pytest.approx(90.0)


def test_embed_hexagon_closes():
    poly = embed(PolygonSpec((1, 2, 1, 2, 1, 2)))
    assert poly.is_equiangular and poly.interior_angle == pytest.approx(120.0)
    sides = np.linalg.norm(np.roll(poly.vertices, -1, axis=0) - poly.vertices, axis=1)
    np.testing.assert_allclose(sides, [1, 2, 1, 2, 1, 2], atol=1e-9)


def test_embed_pentagon_not_closed():
    with pytest.raises(NotClosed):
        embed(PolygonSpec((1, 1, 2, 1, 1)))


def test_spec_validation():
    for bad in [(1, 1), (1, 0, 1), (1, 1.5, 1), (True, 1, 1)]:
        with pytest.raises(ValueError):
            PolygonSpec(bad)


def test_conditions_octagon_4x2():
    r = check_conditions(PolygonSpec((1, 4, 1, 2, 1, 4, 1, 2)))
    assert r.n_admissible and r.odd_edges_equal and r.even_edges_condition


def test_conditions_decagon_1_3():
    assert check_conditions(PolygonSpec((1, 3) * 5)).domeable


def test_conditions_octagon_bad():
    spec = PolygonSpec((1, 2, 1, 2, 1, 2, 2, 2))
    try:
        report = check_conditions(spec)
    except NotClosed:
        return
    assert not report.odd_edges_equal


def test_conditions_odd_n():
    r = check_conditions(PolygonSpec((1,) * 7))
    assert not r.n_admissible and "n=7" in r.detail


def test_polyiamond_examples():
    assert is_polyiamond_polygon(PolygonSpec((1, 1, 1)), [60, 60, 60])
    assert not is_polyiamond_polygon(PolygonSpec((2, 1, 2, 1)), [90] * 4)
    assert is_polyiamond_polygon(PolygonSpec((1, 2, 1, 1, 2, 1)), [120] * 6)
    assert is_polyiamond_polygon(PolygonSpec((2, 1, 1, 1)), [60, 60, 120, 120])
    assert not is_polyiamond_polygon(PolygonSpec((1, 1, 2, 1, 1, 1)), [120] * 6)


@pytest.mark.parametrize("n", range(3, 17))
def test_exact_closure_matches_numeric(n):
    t = 2 * np.pi * np.arange(n) / n
    dirs = np.stack([np.cos(t), np.sin(t)], axis=1)
    for edges in itertools.product(range(1, 4), repeat=n) if n <= 7 else []:
        assert closes(edges) == (np.linalg.norm(np.array(edges) @ dirs) < 1e-9)
    for row in enumerate_equiangular(n, 3):
        assert np.linalg.norm(row @ dirs) < 1e-9


def test_enumeration_counts_match_brute_force():
    for n in (3, 4, 5, 6):
        brute = {e for e in itertools.product(range(1, 5), repeat=n) if closes(e)}
        listed = {tuple(r) for r in enumerate_equiangular(n, 4)}
        assert brute == listed


def test_pentagons_are_regular():
    # exhaustive over edges <= 6: every closing integer equiangular pentagon is regular
    for e in itertools.product(range(1, 7), repeat=5):
        assert closes(e) == (len(set(e)) == 1)


closing_specs = st.sampled_from([8, 10, 12]).flatmap(
    lambda n: st.sampled_from([tuple(int(x) for x in r) for r in enumerate_equiangular(n, 3)])
)


@given(closing_specs, st.integers(0, 11))
def test_conditions_invariant_under_symmetry(edges, k):
    spec = PolygonSpec(edges)
    base = check_conditions(spec).domeable
    assert check_conditions(spec.rotated(2 * k)).domeable == base
    assert check_conditions(spec.rotated(k)).domeable == base
    assert check_conditions(spec.reflected()).domeable == base


def test_json_round_trip():
    spec = PolygonSpec((3, 1, 3, 1))
    assert PolygonSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ValueError):
        PolygonSpec.from_json({"sides": [1, 1, 1]})
