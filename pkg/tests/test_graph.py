import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digraphlets.errors import GraphFormatError
from digraphlets.graph import (
    DirectedGraph,
    PerturbationSpec,
    Reaction,
    TradeRecord,
    build_enzyme_network,
    build_trade_network,
    degree_preserving_rewire,
    load_edge_list,
    perturb,
    save_edge_list,
)

edge_lists = st.lists(
    st.tuples(st.integers(0, 14), st.integers(0, 14)), min_size=0, max_size=60
)


class TestDirectedGraph:
    def test_reciprocal_pair_file(self, tmp_path):
        p = tmp_path / "g.el"
        p.write_text("a b\nb a\n")
        g = load_edge_list(p)
        assert (g.n, g.m) == (2, 2)
        assert g.reciprocal_pair_count() == 1

    def test_self_loop_dropped(self, tmp_path):
        p = tmp_path / "g.el"
        p.write_text("a a\na b\n")
        g = load_edge_list(p)
        assert (g.n, g.m) == (2, 1)
        assert g.dropped_self_loops == 1

    def test_duplicate_dropped(self, tmp_path):
        p = tmp_path / "g.el"
        p.write_text("a b\na b\nb c\n")
        g = load_edge_list(p)
        assert g.m == 2

    def test_comments_and_blank_lines(self, tmp_path):
        p = tmp_path / "g.el"
        p.write_text("# header\n\na b\n")
        assert load_edge_list(p).m == 1

    def test_malformed_line_reports_number(self, tmp_path):
        p = tmp_path / "g.el"
        p.write_text("a b\na b c\n")
        with pytest.raises(GraphFormatError, match=":2:"):
            load_edge_list(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(GraphFormatError):
            load_edge_list(tmp_path / "nope.el")

    def test_round_trip(self, tmp_path):
        g = DirectedGraph([[0, 1], [1, 2], [2, 0], [1, 0]], labels=["x", "y", "z"])
        save_edge_list(g, tmp_path / "g.el")
        g2 = load_edge_list(tmp_path / "g.el")
        assert sorted(g2.labels) == ["x", "y", "z"]
        assert g2.m == g.m and g2.reciprocal_pair_count() == 1

    def test_metadata(self):
        g = DirectedGraph([[0, 1], [1, 0], [1, 2]])
        assert g.metadata() == {"n": 3, "m": 3, "reciprocal_pairs": 1}

    @settings(max_examples=60, deadline=None)
    @given(edge_lists)
    def test_adjacency_symmetry(self, edges):
        g = DirectedGraph(edges, n=15)
        for u in range(g.n):
            for v in g.out_neighbors(u):
                assert u in g.in_neighbors(v)
        for v in range(g.n):
            for u in g.in_neighbors(v):
                assert v in g.out_neighbors(u)
            assert list(g.in_neighbors(v)) == sorted(set(g.in_neighbors(v)))

    def test_has_edge_and_ids(self):
        g = DirectedGraph([[0, 1]], labels=["a", "b"])
        assert g.has_edge(0, 1) and not g.has_edge(1, 0)
        assert g.id_of("b") == 1
        with pytest.raises(KeyError):
            g.id_of("zz")


class TestTradeNetwork:
    def recs(self, values):
        return [TradeRecord(f"e{i}", f"i{i}", v) for i, v in enumerate(values)]

    def test_ninety_percent_prefix(self):
        g = build_trade_network(self.recs([50, 30, 15, 5]), coverage=0.9)
        assert g.m == 3  # cumulative 95 >= 90

    def test_single_record(self):
        assert build_trade_network(self.recs([100]), coverage=0.9).m == 1

    def test_ties_broken_by_input_order(self):
        g = build_trade_network(self.recs([40, 40, 20]), coverage=0.9)
        assert g.m == 3  # 80 < 90 after two

    def test_duplicate_pairs_summed(self):
        records = [
            TradeRecord("a", "b", 10),
            TradeRecord("a", "b", 45),  # a->b totals 55
            TradeRecord("c", "d", 45),
        ]
        g = build_trade_network(records, coverage=0.55)
        assert g.m == 1
        assert g.has_edge(g.id_of("a"), g.id_of("b"))

    def test_filtered_countries_dropped_from_nodes(self):
        g = build_trade_network(self.recs([99, 1]), coverage=0.5)
        assert g.m == 1 and g.n == 2
        assert sorted(g.labels) == ["e0", "i0"]

    def test_monotone_in_coverage(self):
        rng = np.random.default_rng(0)
        records = [
            TradeRecord(f"c{rng.integers(8)}", f"c{rng.integers(8)}", float(v))
            for v in rng.integers(1, 100, size=40)
        ]
        prev = set()
        for cov in (0.3, 0.5, 0.7, 0.9, 1.0):
            g = build_trade_network(records, coverage=cov)
            cur = {tuple(e) for e in g.edges()}
            assert prev <= cur
            prev = cur

    def test_errors(self):
        with pytest.raises(ValueError):
            build_trade_network([])
        with pytest.raises(ValueError):
            build_trade_network([TradeRecord("a", "b", -1.0)])
        with pytest.raises(ValueError):
            build_trade_network(self.recs([1]), coverage=0.0)


class TestEnzymeNetwork:
    def test_chain(self):
        g = build_enzyme_network(
            [
                Reaction("e1", frozenset("A"), frozenset("B")),
                Reaction("e2", frozenset("B"), frozenset("C")),
            ]
        )
        assert g.m == 1 and g.has_edge(g.id_of("e1"), g.id_of("e2"))

    def test_disjoint(self):
        g = build_enzyme_network(
            [
                Reaction("e1", frozenset("A"), frozenset("B")),
                Reaction("e2", frozenset("C"), frozenset("D")),
            ]
        )
        assert g.n == 2 and g.m == 0

    def test_reciprocal(self):
        g = build_enzyme_network(
            [
                Reaction("e1", frozenset("A"), frozenset("B")),
                Reaction("e2", frozenset("B"), frozenset("A")),
            ]
        )
        assert g.m == 2 and g.reciprocal_pair_count() == 1

    def test_no_self_edge(self):
        g = build_enzyme_network([Reaction("e1", frozenset("A"), frozenset("A"))])
        assert g.m == 0

    def test_multiple_reactions_per_enzyme(self):
        g = build_enzyme_network(
            [
                Reaction("e1", frozenset("X"), frozenset("A")),
                Reaction("e1", frozenset("Y"), frozenset("B")),
                Reaction("e2", frozenset("B"), frozenset("Z")),
            ]
        )
        assert g.n == 2 and g.has_edge(g.id_of("e1"), g.id_of("e2"))

    def test_empty(self):
        with pytest.raises(ValueError):
            build_enzyme_network([])


class TestPerturbation:
    def graph(self, n=40, m=100, seed=0):
        rng = np.random.default_rng(seed)
        edges = set()
        while len(edges) < m:
            u, v = rng.integers(n, size=2)
            if u != v:
                edges.add((int(u), int(v)))
        return DirectedGraph(sorted(edges), n=n)

    def test_zero_fraction_identity(self):
        g = self.graph()
        assert perturb(g, PerturbationSpec("rewire", 0.0, seed=1)) == g

    def test_remove_count(self):
        g = self.graph(m=100)
        out = perturb(g, PerturbationSpec("remove", 0.3, seed=2))
        assert out.m == 70 and out.n == g.n

    def test_rewire_preserves_m_and_changes_edges(self):
        g = self.graph(m=100)
        out = perturb(g, PerturbationSpec("rewire", 0.5, seed=3))
        assert out.m == g.m
        assert {tuple(e) for e in out.edges()} != {tuple(e) for e in g.edges()}

    def test_rewire_edge_count_contract(self):
        for seed in range(5):
            g = self.graph(seed=seed)
            for frac in (0.1, 0.4, 0.9):
                assert perturb(g, PerturbationSpec("rewire", frac, seed=seed)).m == g.m

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            PerturbationSpec("swap", 0.1)
        with pytest.raises(ValueError):
            PerturbationSpec("rewire", 0.95)

    def test_determinism(self):
        g = self.graph()
        spec = PerturbationSpec("rewire", 0.5, seed=11)
        assert perturb(g, spec) == perturb(g, spec)

    def test_degree_preserving_rewire(self):
        g = self.graph(m=120)
        out = degree_preserving_rewire(g, 0.3, seed=4)
        assert out.m == g.m
        assert np.array_equal(out.in_degrees, g.in_degrees)
        assert np.array_equal(out.out_degrees, g.out_degrees)
        assert {tuple(e) for e in out.edges()} != {tuple(e) for e in g.edges()}
