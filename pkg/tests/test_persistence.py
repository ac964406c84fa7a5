import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import central_diff, diagram_multiset, grad_close, oracle_diagram, sublevel_values_distinct
from persopt import (Complex, Diagram, build_cubical_grid, build_full_simplex, build_path, compute_pairs,
                     lower_star_filtration, persistence_diagram, pull_back_gradient, rips_filtration,
                     total_order)
from persopt.losses import LossValue, bottleneck, total_persistence


def random_filtration(c: Complex, rng, n_levels=None):
    """Monotone filtration: random vertex-free values made monotone by a max over faces."""
    raw = rng.integers(0, n_levels, len(c)).astype(float) if n_levels else rng.random(len(c))
    vals = raw.copy()
    for d in range(1, c.max_dim + 1):
        r = c.dim_range(d)
        faces = vals[c.boundary_array(d)]
        vals[r.start:r.stop] = np.maximum(vals[r.start:r.stop], faces.max(axis=1))
    return vals


SMALL = {
    "edge": lambda: build_full_simplex(2, 1),
    "triangle": lambda: build_full_simplex(3, 2),
    "simplex4": lambda: build_full_simplex(5, 4),
    "grid3": lambda: build_cubical_grid(3, 3),
    "path": lambda: build_path(5),
}


# --- examples ----------------------------------------------------------------

def test_total_order_examples():
    c = build_full_simplex(2, 1)
    assert total_order(c, [0.0, 0.0, 1.0]).perm.tolist() == [0, 1, 2]
    tri = build_full_simplex(3, 2)
    assert total_order(tri, np.zeros(7)).perm.tolist() == list(range(7))
    with pytest.raises(ValueError):
        total_order(c, [0.0, 2.0, 1.0])


def test_total_order_keys_sorted():
    rng = np.random.default_rng(0)
    c = build_full_simplex(4, 3)
    order = total_order(c, random_filtration(c, rng, n_levels=3))
    keys = order.keys()
    assert keys == sorted(keys)


def test_single_vertex():
    c = build_full_simplex(1, 0)
    p = compute_pairs(c, total_order(c, [0.0]))
    assert p.essential[0] == [0] and p.n_pairs() == 0


def test_edge_pairs_and_diagram():
    c = build_full_simplex(2, 1)
    f = [0.0, 0.0, 1.0]
    p = compute_pairs(c, total_order(c, f))
    assert p.pairs[0] == [(1, 2)]
    assert p.essential[0] == [0]
    d = persistence_diagram(c, f)
    part = d[0]
    assert part.points.tolist() == [[0.0, 1.0]]
    assert (part.birth_cells.tolist(), part.death_cells.tolist()) == ([1], [2])
    assert part.essential.tolist() == [0.0] and part.essential_cells.tolist() == [0]


def test_filled_triangle():
    c = build_full_simplex(3, 2)
    f = [0, 0, 0, 1, 1, 1, 2]
    p = compute_pairs(c, total_order(c, f))
    assert p.essential[0] == [0]
    assert p.pairs[0] == [(1, 3), (2, 4)]
    assert p.pairs[1] == [(5, 6)]
    assert oracle_diagram(c, np.array(f, float)) == diagram_multiset(persistence_diagram(c, f), 2)


def test_constant_filtration_on_diagonal():
    d = persistence_diagram(build_full_simplex(4, 2), np.zeros(14))
    for dim in d.dims:
        assert np.all(d[dim].births == d[dim].deaths)


def test_square_corners_hole():
    c = build_full_simplex(4, 2)
    x = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    f, _ = rips_filtration(x, c)
    d = persistence_diagram(c, f)
    pts = d[1].points[d[1].deaths > d[1].births]
    assert pts.tolist() == [[1.0, np.sqrt(2.0)]]
    assert oracle_diagram(c, f.values) == diagram_multiset(d, 2)


def test_diagram_points_sorted():
    rng = np.random.default_rng(1)
    c = build_full_simplex(6, 2)
    d = persistence_diagram(c, rips_filtration(rng.random((6, 2)), c)[0])
    for dim in d.dims:
        part = d[dim]
        keys = list(zip(part.births, part.deaths, part.birth_cells))
        assert keys == sorted(keys)
        assert np.all(part.deaths >= part.births)


def test_essential_kept_without_regular_points():
    d = persistence_diagram(build_cubical_grid(1, 1), [0.25])
    assert len(d[0]) == 0
    assert d[0].essential.tolist() == [0.25]


# --- properties --------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(SMALL)), st.integers(0, 2 ** 32 - 1), st.sampled_from([None, 3]))
def test_oracle_equivalence(name, seed, levels):
    c = SMALL[name]()
    f = random_filtration(c, np.random.default_rng(seed), levels)
    assert oracle_diagram(c, f) == diagram_multiset(persistence_diagram(c, f), c.max_dim)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(SMALL)), st.integers(0, 2 ** 32 - 1), st.sampled_from([None, 2, 4]))
def test_permutation_and_cardinality(name, seed, levels):
    c = SMALL[name]()
    f = random_filtration(c, np.random.default_rng(seed), levels)
    d = persistence_diagram(c, f)
    p = sum(len(d[k]) for k in d.dims)
    q = sum(len(d[k].essential) for k in d.dims)
    assert 2 * p + q == len(c)
    used = []
    for k in d.dims:
        part = d[k]
        assert np.array_equal(part.births, f[part.birth_cells])
        assert np.array_equal(part.deaths, f[part.death_cells])
        assert np.array_equal(part.essential, f[part.essential_cells])
        assert np.all(c.dims[part.birth_cells] == k)
        assert np.all(c.dims[part.death_cells] == k + 1)
        used += part.birth_cells.tolist() + part.death_cells.tolist() + part.essential_cells.tolist()
    assert sorted(used) == list(range(len(c)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_stability(seed):
    rng = np.random.default_rng(seed)
    c = build_full_simplex(5, 2)
    f = random_filtration(c, rng)
    g = random_filtration(c, rng)
    g = np.clip(f + rng.normal(scale=0.1, size=len(c)), 0, None)
    g = random_filtration_from(c, g)
    df, dg = persistence_diagram(c, f), persistence_diagram(c, g)
    bound = np.abs(f - g).max() + 1e-12
    for k in range(c.max_dim):
        assert bottleneck(df, dg, k)[0].value <= bound
        ef, eg = np.sort(df[k].essential), np.sort(dg[k].essential)
        assert len(ef) == len(eg)
        assert np.all(np.abs(ef - eg) <= bound)


def random_filtration_from(c, raw):
    vals = np.array(raw, dtype=float)
    for d in range(1, c.max_dim + 1):
        r = c.dim_range(d)
        vals[r.start:r.stop] = np.maximum(vals[r.start:r.stop], vals[c.boundary_array(d)].max(axis=1))
    return vals


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(1e-3, 10.0))
def test_uniform_shift_keeps_pairs(seed, eps):
    c = build_cubical_grid(3, 4)
    f = random_filtration(c, np.random.default_rng(seed), 4)
    a = compute_pairs(c, total_order(c, f))
    b = compute_pairs(c, total_order(c, f + eps))
    assert a.pairs == b.pairs and a.essential == b.essential


def test_reduction_matches_oracle_on_rips():
    rng = np.random.default_rng(7)
    for _ in range(10):
        c = build_full_simplex(6, 3)
        f, _ = rips_filtration(rng.random((6, 2)), c)
        assert oracle_diagram(c, f.values) == diagram_multiset(persistence_diagram(c, f), 3)


# --- gradient routing ----------------------------------------------------------

def test_pullback_death_gradient_on_edge():
    c = build_full_simplex(2, 1)
    x = np.array([[0.0, 0.0], [3.0, 4.0]])
    f, tape = rips_filtration(x, c)
    d = persistence_diagram(c, f)
    lv = LossValue(0.0, grad_regular={0: np.array([[0.0, 1.0]])})
    np.testing.assert_allclose(pull_back_gradient(d, lv, tape), [-0.6, -0.8, 0.6, 0.8])


def test_pullback_zero_and_errors():
    c = build_full_simplex(3, 2)
    f, tape = rips_filtration(np.random.default_rng(0).random((3, 2)), c)
    d = persistence_diagram(c, f)
    zero = LossValue(0.0, grad_regular={k: np.zeros((len(d[k]), 2)) for k in d.dims})
    assert np.all(pull_back_gradient(d, zero, tape) == 0)
    with pytest.raises(ValueError):
        pull_back_gradient(d, LossValue(0.0, grad_regular={0: np.zeros((5, 2))}), tape)
    raw = Diagram.from_points({0: [[0.0, 1.0]]})
    with pytest.raises(ValueError):
        pull_back_gradient(raw, LossValue(0.0, grad_regular={0: np.ones((1, 2))}), tape)


def test_total_persistence_on_path_matches_finite_differences():
    rng = np.random.default_rng(3)
    k = build_path(12)
    checked = 0
    while checked < 10:
        x = rng.random(12)
        if not sublevel_values_distinct(x):
            continue

        def loss(z):
            return total_persistence(persistence_diagram(k, lower_star_filtration(z, k)[0])).value

        f, tape = lower_star_filtration(x, k)
        d = persistence_diagram(k, f)
        g = pull_back_gradient(d, total_persistence(d), tape)
        assert grad_close(g, central_diff(loss, x))
        checked += 1


# --- serialisation -------------------------------------------------------------

def test_json_round_trip():
    rng = np.random.default_rng(2)
    c = build_full_simplex(5, 2)
    d = persistence_diagram(c, rips_filtration(rng.random((5, 2)), c)[0])
    obj = json.loads(d.to_json(cells=True))
    assert [e["dim"] for e in obj] == [0, 1, 2]
    assert set(obj[0]) == {"dim", "regular", "essential", "cells"}
    back = Diagram.from_json(d.to_json())
    for k in d.dims:
        assert np.array_equal(back[k].points, d[k].points)
        assert np.array_equal(back[k].essential, d[k].essential)


def test_from_points_rejects_inverted():
    with pytest.raises(ValueError):
        Diagram.from_points({0: [[2.0, 1.0]]})
