import numpy as np
import pytest
from hypothesis import given, strategies as st

from qwsearch.exceptions import InvalidMarkedSet, UnsupportedDimension
from qwsearch.graphs import (Hypercube, Lattice, MarkedSet, make_graph, marked_states,
                             random_marked, uniform_state)


def test_marked_set_rejects_empty_and_duplicates():
    with pytest.raises(InvalidMarkedSet):
        MarkedSet(())
    with pytest.raises(InvalidMarkedSet):
        MarkedSet((3, 3))
    with pytest.raises(InvalidMarkedSet):
        MarkedSet(((0, 1), [0, 1]))


def test_lattice_labels():
    g = Lattice(5)
    assert g.index((2, 3)) == 13
    with pytest.raises(InvalidMarkedSet):
        g.index((5, 0))
    with pytest.raises(InvalidMarkedSet):
        g.index(7)
    with pytest.raises(UnsupportedDimension):
        Lattice(1)


def test_hypercube_labels():
    g = Hypercube(4)
    assert g.index((1, 0, 1, 0)) == 0b0101
    assert g.index(9) == 9
    with pytest.raises(InvalidMarkedSet):
        g.index(16)
    with pytest.raises(InvalidMarkedSet):
        g.index((1, 2, 0, 0))
    with pytest.raises(UnsupportedDimension):
        Hypercube(1)


@pytest.mark.parametrize("graph", [Lattice(4), Lattice(5), Hypercube(3), Hypercube(5)])
def test_shift_is_a_permutation_involution(graph):
    """Flip-flop shift: each (coin, vertex) has one image, and applying it
    twice returns home."""
    d, N = graph.coin_dim, graph.num_vertices
    perm = np.empty(d * N, dtype=np.int64)
    for a, dest, where in graph.shift_maps():
        perm[a * N + np.arange(N)] = dest * N + where
    assert sorted(perm.tolist()) == list(range(d * N))
    assert np.array_equal(perm[perm], np.arange(d * N))


def test_neighbors_match_shift():
    g = Lattice(4)
    assert sorted(g.neighbors(0)) == sorted([4, 12, 1, 3])
    assert Hypercube(3).neighbors(5) == [4, 7, 1]


def test_states():
    g = Hypercube(3)
    assert np.isclose(np.linalg.norm(uniform_state(g)), 1.0)
    B = marked_states(g, [1, 6])
    assert np.allclose(B.T @ B, np.eye(2))


@given(st.integers(2, 40), st.integers(1, 6), st.integers(0, 2**31))
def test_random_marked_reproducible_and_distinct(n, k, seed):
    g = Hypercube(n) if n <= 20 else Lattice(n)
    k = min(k, g.num_vertices)
    a, b = random_marked(g, k, seed), random_marked(g, k, seed)
    assert a == b
    assert len({g.index(v) for v in a}) == k


def test_random_marked_errors():
    with pytest.raises(InvalidMarkedSet):
        random_marked(Hypercube(2), 5, 0)
    with pytest.raises(InvalidMarkedSet):
        random_marked(Hypercube(2), 0, 0)


def test_make_graph():
    assert make_graph("lattice", 3).num_vertices == 9
    with pytest.raises(ValueError):
        make_graph("torus", 3)
