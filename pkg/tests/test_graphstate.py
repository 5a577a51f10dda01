import pytest

from fastscramble.graphstate import (
    Graph,
    graph_entropy_bits,
    hypercube,
    page_scrambling_fraction,
    tableau_from_graph,
)
from fastscramble.seeding import substream


def test_graph_basics():
    g = Graph.from_edges(4, [(0, 1), (1, 2)])
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    assert not g.has_edge(0, 2)
    assert g.edges() == [(0, 1), (1, 2)]
    assert g.degree(1) == 2
    with pytest.raises(ValueError):
        g.add_edge(2, 2)


def test_edge_list_round_trip():
    g = Graph.from_edges(5, [(0, 4), (1, 2), (2, 3)])
    text = g.to_edge_list()
    assert text.splitlines()[0] == "5"
    again = Graph.from_edge_list(text)
    assert again.n_vertices == 5
    assert again.edges() == g.edges()


def test_hypercube_counts():
    g = hypercube(3)
    assert g.n_vertices == 8
    assert len(g.edges()) == 12
    assert all(g.degree(v) == 3 for v in range(8))
    big = hypercube(7)
    assert big.n_vertices == 128
    assert len(big.edges()) == 448
    assert all(big.degree(v) == 7 for v in range(128))


def test_edgeless_graph_has_zero_entropy():
    g = Graph.empty(5)
    assert graph_entropy_bits(g, [0, 2]) == 0


def test_complete_graph_entropies():
    # K4: the off-diagonal block of any bipartition is all ones, rank 1.
    g = Graph.from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert graph_entropy_bits(g, [0]) == 1
    assert graph_entropy_bits(g, [0, 1]) == 1
    assert graph_entropy_bits(g, [0, 1, 2]) == 1


def test_entropy_edge_cases_and_errors():
    g = hypercube(2)
    assert graph_entropy_bits(g, []) == 0
    assert graph_entropy_bits(g, range(4)) == 0
    with pytest.raises(IndexError):
        graph_entropy_bits(g, [4])
    with pytest.raises(ValueError):
        graph_entropy_bits(g, [1, 1])


def test_graph_rank_matches_tableau_exhaustively():
    for m in (1, 2):
        g = hypercube(m)
        t = tableau_from_graph(g)
        n = g.n_vertices
        for mask in range(1 << n):
            sub = [v for v in range(n) if mask >> v & 1]
            assert graph_entropy_bits(g, sub) == t.renyi2_entropy_bits(sub)


def test_graph_rank_matches_tableau_random_graphs():
    rng = substream(21, "random-graphs", 0)
    for _ in range(8):
        n = 6
        edges = [
            (a, b)
            for a in range(n)
            for b in range(a + 1, n)
            if rng.random() < 0.4
        ]
        g = Graph.from_edges(n, edges)
        t = tableau_from_graph(g)
        for mask in range(1 << n):
            sub = [v for v in range(n) if mask >> v & 1]
            assert graph_entropy_bits(g, sub) == t.renyi2_entropy_bits(sub)


def test_single_vertex_entropy_is_one_without_isolated_vertices():
    g = hypercube(3)
    for v in range(8):
        assert graph_entropy_bits(g, [v]) == 1


def test_page_scrambling_fraction():
    g = hypercube(3)
    f = page_scrambling_fraction(g, [1, 2], 200, seed=17)
    assert f[1] == 1.0
    assert 0.0 <= f[2] <= 1.0
    with pytest.raises(ValueError):
        page_scrambling_fraction(g, [9], 10, seed=1)
