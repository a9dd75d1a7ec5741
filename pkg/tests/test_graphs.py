from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sphere_drc.errors import ResourceError
from sphere_drc.graphs import (SimpleGraph, build_hypercube, build_random_graph, complement,
                               hypercube_degree, hypercube_density, pack_rows, popcount,
                               unpack_rows, vertex_mask)


@st.composite
def dense_graphs(draw, max_n=70):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    upper = np.triu(np.random.default_rng(seed).random((n, n)) < draw(st.floats(0, 1)), k=1)
    return upper | upper.T


@given(dense_graphs())
def test_pack_round_trip(adj):
    g = SimpleGraph.from_dense(adj)
    assert np.array_equal(g.to_dense(), adj)
    assert np.array_equal(g.degrees(), adj.sum(axis=1))
    assert g.edge_count() == adj.sum() // 2


@given(dense_graphs())
def test_complement_involution(adj):
    g = SimpleGraph.from_dense(adj)
    c = complement(g)
    assert complement(c) == g
    n = len(adj)
    assert g.edge_count() + c.edge_count() == n * (n - 1) // 2
    assert not np.any(np.diag(c.to_dense()))


def test_padding_bits_stay_clear():
    g = SimpleGraph.complete(70)
    assert np.array_equal(popcount(g.bits), np.full(70, 69))
    assert int(g.bits[0, 1]) >> 6 == 0


def test_from_dense_validates():
    with pytest.raises(ValueError):
        SimpleGraph.from_dense(np.ones((3, 3), dtype=bool))
    with pytest.raises(ValueError):
        SimpleGraph.from_dense(np.triu(np.ones((3, 3), dtype=bool), 1))
    with pytest.raises(ValueError):
        SimpleGraph.from_dense(np.zeros((2, 3), dtype=bool))


def test_empty_complete_examples():
    assert complement(SimpleGraph.empty(9)) == SimpleGraph.complete(9)
    assert build_random_graph(30, 0.0, 1) == SimpleGraph.empty(30)
    assert build_random_graph(30, 1.0, 1) == SimpleGraph.complete(30)


def test_random_graph_density():
    g = build_random_graph(2000, 0.5, 3)
    assert abs(g.density() - 0.5) < 0.002
    assert build_random_graph(50, 0.3, 8) == build_random_graph(50, 0.3, 8)
    with pytest.raises(ValueError):
        build_random_graph(5, 1.5, 0)


def test_edges_and_neighbors():
    g = SimpleGraph.from_edges(4, [(0, 1), (1, 2)])
    assert g.has_edge(1, 0) and not g.has_edge(0, 2)
    assert list(g.neighbors(1)) == [0, 2]
    assert list(unpack_rows(g.common_row([0, 2]), 4).nonzero()[0]) == [1]
    with pytest.raises(ValueError):
        g.common_row([])


def test_vertex_mask_and_pack():
    m = vertex_mask([0, 63, 64, 99], 100)
    assert unpack_rows(m[None, :], 100)[0].nonzero()[0].tolist() == [0, 63, 64, 99]
    dense = np.eye(5, dtype=bool)
    assert np.array_equal(unpack_rows(pack_rows(dense), 5), dense)


def brute_hypercube_edges(m):
    return sum(1 for a, b in combinations(range(2**m), 2) if 1 <= bin(a ^ b).count("1") <= m // 2)


@pytest.mark.parametrize("m,edges,density", [(2, 4, Fraction(2, 3)), (4, 80, Fraction(10, 15)),
                                             (6, 41 * 64 // 2, Fraction(41, 63))])
def test_hypercube_examples(m, edges, density):
    g = build_hypercube(m)
    assert g.n == 2**m
    assert g.edge_count() == edges == brute_hypercube_edges(m)
    assert hypercube_density(m) == density
    assert Fraction(g.edge_count(), g.n * (g.n - 1) // 2) == density
    assert set(g.degrees()) == {hypercube_degree(m)}


def test_hypercube_density_decreasing_toward_half():
    ds = [hypercube_density(m) for m in range(4, 21, 2)]
    assert all(a > b for a, b in zip(ds, ds[1:]))
    assert all(d > Fraction(1, 2) for d in ds)


def test_hypercube_caps():
    with pytest.raises(ResourceError):
        build_hypercube(15)
    with pytest.raises(ResourceError):
        hypercube_degree(25)
