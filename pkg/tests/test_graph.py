import numpy as np
import pytest

from conftest import random_colored_graph
from fairpr.errors import GraphError
from fairpr.graph import (
    from_edges,
    group_stats,
    load_graph,
    save_graph,
    write_summary_csv,
)


def test_from_edges_basic_properties():
    # 0 -> 1, 0 -> 2, 1 -> 2; node 2 is a sink
    g = from_edges(3, [(0, 1), (0, 2), (1, 2)], [True, False, True])
    assert g.n == 3
    assert g.n_edges == 3
    assert g.n_red == 2
    assert g.n_blue == 1
    assert g.out_degree.tolist() == [2, 1, 0]
    assert g.sinks.tolist() == [False, False, True]
    assert g.out_neighbors(0).tolist() == [1, 2]
    assert g.out_neighbors(2).tolist() == []
    assert g.red_nodes().tolist() == [0, 2]
    assert g.blue_nodes().tolist() == [1]
    assert g.edges().tolist() == [[0, 1], [0, 2], [1, 2]]


def test_out_red_counts_with_interleaved_sinks():
    # sink rows must not absorb the next row's reduceat segment
    g = from_edges(4, [(1, 0), (1, 3), (3, 0)], [True, False, False, False])
    assert g.out_red.tolist() == [0, 1, 0, 1]
    assert g.out_blue.tolist() == [0, 1, 0, 0]


def test_from_edges_rejects_bad_input():
    with pytest.raises(GraphError):
        from_edges(2, [(0, 2)], [True, False])
    with pytest.raises(GraphError):
        from_edges(2, [(0, 1), (0, 1)], [True, False])
    with pytest.raises(GraphError):
        from_edges(2, [(0, 1)], [True, True])
    with pytest.raises(GraphError):
        from_edges(2, [(0, 1)], [True])


def test_from_edges_allows_self_loops_and_is_immutable():
    g = from_edges(2, [(0, 0), (0, 1)], [True, False])
    assert g.out_neighbors(0).tolist() == [0, 1]
    with pytest.raises(ValueError):
        g.red[0] = False


def test_tsv_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    g = random_colored_graph(rng, 40, sink_frac=0.2)
    save_graph(g, tmp_path / "e.tsv", tmp_path / "c.tsv")
    h = load_graph(tmp_path / "e.tsv", tmp_path / "c.tsv")
    assert np.array_equal(g.indptr, h.indptr)
    assert np.array_equal(g.indices, h.indices)
    assert np.array_equal(g.red, h.red)


def test_load_graph_skips_comments_and_blank_lines(tmp_path):
    (tmp_path / "e.tsv").write_text("# header\n0\t1\n\n1\t0\n")
    (tmp_path / "c.tsv").write_text("0\t1\n# note\n1\t0\n")
    g = load_graph(tmp_path / "e.tsv", tmp_path / "c.tsv")
    assert g.n == 2 and g.n_edges == 2
    assert g.red.tolist() == [True, False]


@pytest.mark.parametrize(
    "edges,colors",
    [
        ("0\t1\n", "0\t1\n1\t0\n1\t1\n"),  # node colored twice
        ("0\t1\n", "0\t1\n2\t0\n"),  # ids not dense
        ("0\t2\n", "0\t1\n1\t0\n"),  # edge endpoint uncolored
        ("0\t1\n", "0\t2\n1\t0\n"),  # color out of range
        ("0 1\n", "0\t1\n1\t0\n"),  # wrong delimiter
        ("0\t1\n", "a\t1\n1\t0\n"),  # non-integer id
    ],
)
def test_load_graph_rejects_malformed_files(tmp_path, edges, colors):
    (tmp_path / "e.tsv").write_text(edges)
    (tmp_path / "c.tsv").write_text(colors)
    with pytest.raises(GraphError):
        load_graph(tmp_path / "e.tsv", tmp_path / "c.tsv")


def test_group_stats_color_blind_graph_has_unit_cross_ratios():
    # every node links to all others: target colors follow group shares
    n = 10
    red = np.arange(n) < 4
    edges = [(u, v) for u in range(n) for v in range(n) if u != v]
    stats = group_stats(from_edges(n, edges, red))
    assert stats.r == pytest.approx(0.4)
    assert stats.b == pytest.approx(0.6)
    # self exclusion skews counts by one node out of n-1
    assert stats.cross_red == pytest.approx((6 / 9) / 0.6)
    assert stats.cross_blue == pytest.approx((4 / 9) / 0.4)


def test_group_stats_none_when_group_has_no_out_edges():
    g = from_edges(3, [(1, 0), (2, 0)], [True, False, False])
    stats = group_stats(g)
    assert stats.cross_red is None
    assert stats.cross_blue == pytest.approx((2 / 2) / (1 / 3))


def test_write_summary_csv(tmp_path):
    g = from_edges(3, [(0, 1), (1, 0)], [True, False, False])
    write_summary_csv(g, tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().strip().splitlines()
    assert lines[0] == "n,edges,r,b,cross_R,cross_B"
    cells = lines[1].split(",")
    assert cells[0] == "3" and cells[1] == "2"
    assert float(cells[2]) == pytest.approx(1 / 3)
