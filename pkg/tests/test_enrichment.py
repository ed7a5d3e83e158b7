import numpy as np
import pytest

from oracles import exact_hypergeom_mass, exact_hypergeom_tail

from digraphlets.enrichment import (
    AnnotationTable,
    benjamini_hochberg,
    cluster_signatures,
    enrich,
    hypergeom_pvalue,
)


class TestHypergeom:
    def test_zero_draws_is_one_exactly(self):
        assert hypergeom_pvalue(0, 5, 5, 20) == 1.0
        assert hypergeom_pvalue(0, 0, 3, 10) == 1.0

    def test_certain_event(self):
        # every entity carries the term: observing X = N is certain
        assert hypergeom_pvalue(5, 5, 20, 20) == 1.0

    def test_fixed_case_against_exact_oracle(self):
        got = hypergeom_pvalue(3, 5, 5, 20)
        want = float(exact_hypergeom_tail(3, 5, 5, 20))
        assert got == pytest.approx(want, rel=1e-12)

    def test_monotone_in_x(self):
        prev = 1.1
        for x in range(0, 9):
            p = hypergeom_pvalue(x, 8, 10, 30)
            assert p <= prev + 1e-15
            prev = p

    def test_oracle_mass_self_check(self):
        for n, k, m in [(5, 5, 20), (8, 10, 30), (10, 3, 12), (7, 7, 7)]:
            assert exact_hypergeom_mass(n, k, m) == 1

    def test_matches_oracle_small_spread(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            m = int(rng.integers(2, 61))
            k = int(rng.integers(1, m + 1))
            n = int(rng.integers(1, m + 1))
            x = int(rng.integers(0, min(n, k) + 1))
            got = hypergeom_pvalue(x, n, k, m)
            want = float(exact_hypergeom_tail(x, n, k, m))
            if want > 0:
                assert got == pytest.approx(want, rel=1e-10), (x, n, k, m)
            else:
                assert got == 0.0

    def test_large_universe(self):
        p = hypergeom_pvalue(40, 100, 5000, 10**6)
        assert 0.0 <= p < 1e-30  # extreme enrichment stays finite and positive

    def test_precondition_errors(self):
        with pytest.raises(ValueError):
            hypergeom_pvalue(6, 5, 10, 20)  # x > n
        with pytest.raises(ValueError):
            hypergeom_pvalue(1, 25, 10, 20)  # n > m
        with pytest.raises(ValueError):
            hypergeom_pvalue(-1, 5, 10, 20)


class TestBenjaminiHochberg:
    def test_hand_case(self):
        # thresholds i*q/m = 0.0125, 0.025, 0.0375, 0.05: largest passing rank is 2
        mask = benjamini_hochberg([0.01, 0.02, 0.04, 0.9], q=0.05)
        assert mask.tolist() == [True, True, False, False]

    def test_rejects_below_cutoff_rank(self):
        mask = benjamini_hochberg([0.001, 0.04, 0.03, 0.02], q=0.05)
        assert mask.tolist() == [True, True, True, True]

    def test_nothing_significant(self):
        assert not benjamini_hochberg([0.9, 0.5, 0.7], q=0.05).any()

    def test_empty(self):
        assert benjamini_hochberg([], q=0.05).size == 0


def fixture_table():
    rng = np.random.default_rng(5)
    entities = [f"g{i}" for i in range(30)]
    terms = ["t0", "t1", "t2", "t3"]
    mat = (rng.random((30, 4)) < 0.35).astype(int)
    mat[:, 3] = 1  # term carried by every entity
    mat[0] = [1, 0, 0, 1]
    return AnnotationTable(entities=entities, terms=terms, matrix=mat)


class TestEnrich:
    def test_exact_table_against_oracle(self):
        table = fixture_table()
        clustering = {f"g{i}": f"c{i % 3}" for i in range(30)}
        records = enrich(clustering, table, alpha=0.01)
        assert records, "no records produced"
        m = records[0].m
        for r in records:
            assert r.m == m
            want = float(exact_hypergeom_tail(r.x, r.n, r.k, r.m))
            assert r.p_value == pytest.approx(want, rel=1e-10)

    def test_universal_term_never_enriched(self):
        table = fixture_table()
        clustering = {f"g{i}": f"c{i % 3}" for i in range(30)}
        for r in enrich(clustering, table):
            if r.term == "t3":
                assert r.p_value == pytest.approx(1.0)
                assert not r.significant

    def test_pure_cluster_has_minimal_p(self):
        entities = [f"g{i}" for i in range(12)]
        mat = np.zeros((12, 1), dtype=int)
        mat[:4, 0] = 1  # exactly the first four carry the term
        table = AnnotationTable(entities=entities, terms=["t"], matrix=mat)
        # only annotated entities count toward N and M, so give the rest a term
        mat2 = np.column_stack([mat, np.ones(12, dtype=int)])
        table = AnnotationTable(entities=entities, terms=["t", "bg"], matrix=mat2)
        clustering = {e: ("hit" if i < 4 else f"other{i % 2}") for i, e in enumerate(entities)}
        records = [r for r in enrich(clustering, table) if r.term == "t"]
        by_cluster = {r.cluster: r.p_value for r in records}
        assert min(by_cluster, key=by_cluster.get) == "hit"
        assert by_cluster["hit"] == pytest.approx(float(exact_hypergeom_tail(4, 4, 4, 12)), rel=1e-10)

    def test_unannotated_entities_excluded_from_universe(self):
        entities = ["a", "b", "c", "d"]
        mat = np.array([[1], [1], [0], [0]])
        table = AnnotationTable(entities=entities, terms=["t"], matrix=mat)
        clustering = {e: "c0" for e in entities}
        records = enrich(clustering, table)
        assert records[0].m == 2 and records[0].n == 2

    def test_bh_flag(self):
        table = fixture_table()
        clustering = {f"g{i}": f"c{i % 3}" for i in range(30)}
        raw = enrich(clustering, table, alpha=0.05, correct=False)
        bh = enrich(clustering, table, alpha=0.05, correct=True)
        assert sum(r.significant for r in bh) <= sum(r.significant for r in raw)

    def test_empty_clustering(self):
        with pytest.raises(ValueError):
            enrich({}, fixture_table())

    def test_annotation_validation(self):
        with pytest.raises(ValueError):
            AnnotationTable(entities=["a"], terms=["t"], matrix=np.array([[2]]))


class TestConvenienceClustering:
    def test_cluster_count_and_determinism(self):
        rng = np.random.default_rng(9)
        sig = np.vstack(
            [
                rng.poisson(1.0, size=(6, 129)),
                rng.poisson(8.0, size=(6, 129)),
            ]
        )
        labels = cluster_signatures(sig, 2)
        assert len(np.unique(labels)) == 2
        assert np.array_equal(labels, cluster_signatures(sig, 2))
        # the two planted blocks separate
        assert len(set(labels[:6])) == 1 and len(set(labels[6:])) == 1
