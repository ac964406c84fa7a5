import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persopt import (Complex, Filtration, GradTape, build_cubical_grid, build_full_simplex, build_path,
                     dtm_filtration, height_filtration, lower_star_filtration, rips_filtration,
                     rips_from_matrix, validate_filtration, weighted_rips_filtration)


def check_closed(c: Complex):
    for cell in c.cells:
        assert list(cell.vertices) == sorted(set(cell.vertices))
        for face in cell.boundary:
            assert 0 <= face < len(c)
            assert c.cell(face).dim == cell.dim - 1
            assert set(c.cell(face).vertices) <= set(cell.vertices)
        if cell.dim:
            expected = cell.dim + 1 if c.kind == "simplicial" else 2 * cell.dim
            assert len(cell.boundary) == expected
            assert len(set(cell.boundary)) == expected


@pytest.mark.parametrize("n,max_dim,count", [(2, 1, 3), (3, 2, 7), (4, 1, 10)])
def test_full_simplex_counts(n, max_dim, count):
    c = build_full_simplex(n, max_dim)
    assert len(c) == count
    check_closed(c)


def test_full_simplex_edge_cells():
    c = build_full_simplex(2, 1)
    assert [tuple(cell.vertices) for cell in c.cells] == [(0,), (1,), (0, 1)]


def test_full_simplex_rejects_large_dim():
    with pytest.raises(ValueError):
        build_full_simplex(3, 3)
    with pytest.raises(ValueError):
        build_full_simplex(0, 0)


@pytest.mark.parametrize("n", range(1, 8))
def test_full_simplex_has_all_subsets(n):
    c = build_full_simplex(n, n - 1)
    assert len(c) == 2 ** n - 1
    check_closed(c)


def test_ids_sorted_by_dim_then_lex():
    c = build_full_simplex(5, 3)
    keys = [(cell.dim, tuple(cell.vertices)) for cell in c.cells]
    assert keys == sorted(keys)
    assert [cell.id for cell in c.cells] == list(range(len(c)))


def test_faces_present_exactly_once():
    c = build_full_simplex(5, 2)
    seen = {tuple(cell.vertices) for cell in c.cells}
    assert len(seen) == len(c)
    for cell in c.cells:
        for k in range(1, len(cell.vertices)):
            for face in itertools.combinations(cell.vertices, k):
                assert face in seen


@pytest.mark.parametrize("h,w,counts", [(1, 1, (1, 0, 0)), (1, 2, (2, 1, 0)), (2, 2, (4, 4, 1))])
def test_cubical_counts(h, w, counts):
    c = build_cubical_grid(h, w)
    assert tuple(c.n_cells(d) for d in range(3)) == counts
    check_closed(c)


@given(st.integers(1, 6), st.integers(1, 6))
def test_cubical_euler_characteristic(h, w):
    c = build_cubical_grid(h, w)
    assert c.n_cells(0) - c.n_cells(1) + c.n_cells(2) == 1
    check_closed(c)


def test_cubical_rejects_empty():
    with pytest.raises(ValueError):
        build_cubical_grid(0, 3)


def test_cubical_square_vertices():
    c = build_cubical_grid(2, 3)
    squares = [tuple(cell.vertices) for cell in c.cells if cell.dim == 2]
    assert squares == [(0, 1, 3, 4), (1, 2, 4, 5)]


def test_path():
    c = build_path(4)
    assert (c.n_cells(0), c.n_cells(1)) == (4, 3)
    assert c.find([2, 3]) == 4 + 2
    check_closed(c)
    assert len(build_path(1)) == 1


def test_from_simplices_closes_faces():
    c = Complex.from_simplices([(0, 1, 2)])
    assert len(c) == 7
    check_closed(c)


def test_validate_examples():
    c = build_full_simplex(2, 1)
    assert validate_filtration(c, Filtration([0, 0, 1]))
    assert not validate_filtration(c, Filtration([0, 2, 1]))
    assert validate_filtration(build_full_simplex(4, 3), np.full(15, 0.25))


def test_validate_length_mismatch_is_error():
    with pytest.raises(ValueError):
        validate_filtration(build_full_simplex(2, 1), [0, 0])


def test_filtration_rejects_nan():
    with pytest.raises(ValueError):
        Filtration([0.0, np.nan])


def test_gradtape_compose_and_pullback():
    outer = GradTape.from_entries(2, 3, [0, 1, 1], [0, 1, 2], [1.0, 2.0, -1.0])
    inner = GradTape.from_entries(3, 1, [0, 1, 2], [0, 0, 0], [3.0, 5.0, 7.0])
    both = outer.compose(inner)
    np.testing.assert_array_equal(both.dense(), [[3.0], [3.0]])
    np.testing.assert_array_equal(outer.pullback(np.array([1.0, 1.0])), [1.0, 2.0, -1.0])
    assert outer.entries(1) == [(1, 2.0), (2, -1.0)]
    with pytest.raises(ValueError):
        inner.compose(outer)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000))
def test_every_family_is_monotone(n, seed):
    rng = np.random.default_rng(seed)
    k = build_full_simplex(n, min(2, n - 1))
    x = rng.normal(size=(n, 2))
    assert validate_filtration(k, rips_filtration(x, k)[0])
    m = np.abs(rng.normal(size=(n, n)))
    m = m + m.T
    np.fill_diagonal(m, 0)
    assert validate_filtration(k, rips_from_matrix(m, k)[0])
    assert validate_filtration(k, weighted_rips_filtration(x, rng.random(n), k)[0])
    assert validate_filtration(k, dtm_filtration(x, 1, k)[0])
    assert validate_filtration(k, lower_star_filtration(rng.normal(size=n), k)[0])
    g = build_cubical_grid(3, 4)
    img = (rng.random((3, 4)) > 0.5).astype(float)
    f, _ = height_filtration(img, rng.uniform(-np.pi, np.pi))
    assert validate_filtration(g, lower_star_filtration(f, g)[0])
