"""Grid targets, colorings, and local correction tables."""

import pytest

from qubusc import (
    GridSpec,
    Quadrature,
    TargetGraph,
    checkerboard_coloring,
    grid_coloring,
    grid_graph,
    local_corrections,
    pair_key,
)


def test_grid_spec_indexing():
    spec = GridSpec(3, 4)
    assert spec.qubit_count == 12
    assert spec.index(0, 0) == 0
    assert spec.index(1, 2) == 6
    assert spec.coords(6) == (1, 2)
    assert spec.coords(11) == (2, 3)
    with pytest.raises(ValueError):
        spec.index(3, 0)
    with pytest.raises(ValueError):
        spec.coords(12)
    with pytest.raises(ValueError):
        GridSpec(1, 5)


def test_grid_graph_edge_count():
    for n in range(2, 7):
        for m in range(2, 8):
            g = grid_graph(GridSpec(n, m))
            assert len(g.edges) == 2 * n * m - n - m
            degrees = [g.degree(q) for q in range(g.qubit_count)]
            assert min(degrees) == 2 and max(degrees) == (4 if n > 2 and m > 2 else 3 if n > 2 or m > 2 else 2)


def test_grid_graph_neighbors():
    spec = GridSpec(3, 3)
    g = grid_graph(spec)
    center = spec.index(1, 1)
    assert g.neighbors(center) == [
        spec.index(0, 1),
        spec.index(1, 0),
        spec.index(1, 2),
        spec.index(2, 1),
    ]
    assert g.has_edge(0, 1)
    assert not g.has_edge(0, spec.index(1, 1))


def test_target_graph_validation():
    with pytest.raises(ValueError):
        TargetGraph(2, {(0, 2)})
    g = TargetGraph(3, {(2, 0)})
    assert g.edges == {(0, 2)}


def test_grid_coloring_parity():
    spec = GridSpec(4, 5)
    coloring = grid_coloring(spec)
    for q in range(spec.qubit_count):
        r, c = spec.coords(q)
        expected = Quadrature.MOMENTUM if (r + c) % 2 == 0 else Quadrature.POSITION
        assert coloring[q] is expected


def test_checkerboard_matches_grid_convention():
    for n, m in [(2, 2), (3, 4), (5, 3)]:
        spec = GridSpec(n, m)
        assert checkerboard_coloring(grid_graph(spec)) == grid_coloring(spec)


def test_checkerboard_rejects_odd_cycle():
    g = TargetGraph(3, {(0, 1), (1, 2), (0, 2)})
    with pytest.raises(ValueError, match="odd cycle"):
        checkerboard_coloring(g)


def test_checkerboard_handles_components():
    g = TargetGraph(4, {(2, 3)})
    coloring = checkerboard_coloring(g)
    assert coloring[2] is Quadrature.MOMENTUM
    assert coloring[3] is Quadrature.POSITION
    assert coloring[0] is Quadrature.MOMENTUM


def test_local_corrections_single_edge():
    g = TargetGraph(2, {(0, 1)})
    table = local_corrections(g, {(0, 1): +1})
    assert table == [(-1, 3), (-1, 3)]
    flipped = local_corrections(g, {(0, 1): -1})
    assert flipped == [(1, -3), (1, -3)]


def test_local_corrections_yield_exact_cphase():
    # Edge phases (+2, -2, -2, +2) units plus endpoint corrections must equal
    # C-Phase = diag(1, 1, 1, -1), i.e. (0, 0, 0, 8) units mod 16.
    g = TargetGraph(2, {(0, 1)})
    for sign in (+1, -1):
        table = local_corrections(g, {(0, 1): sign})
        for b0 in (0, 1):
            for b1 in (0, 1):
                edge = 2 * sign * (1 - 2 * b0) * (1 - 2 * b1)
                corr = table[0][b0] + table[1][b1]
                expected = 8 if (b0, b1) == (1, 1) else 0
                assert (edge + corr - expected) % 16 == 0


def test_local_corrections_compose_additively():
    g = TargetGraph(3, {(0, 1), (1, 2)})
    table = local_corrections(g, {(0, 1): +1, (1, 2): -1})
    assert table[0] == (-1, 3)
    assert table[1] == (0, 0)
    assert table[2] == (1, -3)


def test_local_corrections_missing_sign():
    g = TargetGraph(2, {(0, 1)})
    with pytest.raises(ValueError, match="missing realized sign"):
        local_corrections(g, {})


def test_pair_key_reused_by_graph():
    g = TargetGraph(5, {(4, 1), (1, 4)})
    assert g.edges == {pair_key(1, 4)}
