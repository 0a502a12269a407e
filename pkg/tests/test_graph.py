"""Graph construction, propagation operator, and validation."""

import numpy as np
import pytest
import scipy.sparse as sp

from peergrade import (
    Dataset,
    DuplicateEntryError,
    GroundTruth,
    SoanGraph,
    Split,
    ValidationError,
    build_graph,
    graphs_equal,
    propagation_matrix,
    validate,
)

from conftest import dense_propagation, random_graph


class TestBuildGraph:
    def test_single_assessment(self):
        g = build_graph([("u1", "i1", 0.8)])
        assert (g.n, g.m) == (1, 1)
        assert g.A[0, 0] == 0.8
        assert g.S.nnz == 0 and g.O.nnz == 0

    def test_empty_graph_with_declared_ids(self):
        g = build_graph([], users=["u1"], items=["i1"])
        assert (g.n, g.m) == (1, 1)
        assert g.A.nnz == 0 and g.O.nnz == 0 and g.S.nnz == 0

    def test_duplicate_assessment_rejected(self):
        with pytest.raises(DuplicateEntryError):
            build_graph([("u1", "i1", 0.8), ("u1", "i1", 0.8)])

    def test_duplicate_ownership_rejected(self):
        with pytest.raises(DuplicateEntryError):
            build_graph([], ownerships=[("u1", "i1", 1.0), ("u1", "i1", 0.5)])

    def test_duplicate_social_rejected_even_reversed(self):
        with pytest.raises(DuplicateEntryError):
            build_graph([], social=[("a", "b", 1.0), ("b", "a", 1.0)])

    def test_out_of_range_weight_names_triple(self):
        with pytest.raises(ValidationError, match="u1"):
            build_graph([("u1", "i1", 1.5)])
        with pytest.raises(ValidationError, match="i9"):
            build_graph([("u1", "i9", -0.1)])

    def test_social_self_edge_rejected(self):
        with pytest.raises(ValidationError, match="self-edge"):
            build_graph([], social=[("a", "a", 0.5)])

    def test_social_symmetrized(self):
        g = build_graph([], social=[("a", "b", 0.7)])
        assert g.S[0, 1] == 0.7 and g.S[1, 0] == 0.7

    def test_lexicographic_index_order(self):
        g = build_graph([("zed", "i2", 0.5), ("amy", "i1", 0.5)])
        assert g.user_ids == ("amy", "zed")
        assert g.item_ids == ("i1", "i2")

    def test_explicit_zero_grade_is_stored(self):
        g = build_graph([("u1", "i1", 0.0)])
        assert g.A.nnz == 1
        assert g.A.tocoo().data[0] == 0.0


class TestPropagationMatrix:
    def test_single_assessment_hand_values(self):
        g = build_graph([("u1", "i1", 0.8)])
        prop = propagation_matrix(g)
        np.testing.assert_allclose(prop.N.toarray(), [[0.5, 0.4], [0.4, 0.5]])
        np.testing.assert_array_equal(prop.degrees, [2, 2])

    def test_empty_graph_gives_identity(self):
        g = build_graph([], users=["u1"], items=["i1"])
        prop = propagation_matrix(g)
        np.testing.assert_array_equal(prop.N.toarray(), np.eye(2))
        np.testing.assert_array_equal(prop.degrees, [1, 1])

    def test_ownership_and_assessment_sum(self):
        g = build_graph([("u1", "i1", 0.5)], ownerships=[("u1", "i1", 1.0)])
        prop = propagation_matrix(g)
        np.testing.assert_allclose(prop.N.toarray(), [[0.5, 0.75], [0.75, 0.5]])

    def test_shared_entry_counts_once_in_degree(self):
        # user owns and assesses the same item: one stored entry in the block
        g = build_graph([("u1", "i1", 0.5)], ownerships=[("u1", "i1", 1.0)])
        prop = propagation_matrix(g)
        np.testing.assert_array_equal(prop.degrees, [2, 2])

    def test_explicit_zero_grade_counts_toward_degree(self):
        g = build_graph([("u1", "i1", 0.0)])
        prop = propagation_matrix(g)
        np.testing.assert_array_equal(prop.degrees, [2, 2])
        np.testing.assert_allclose(prop.N.toarray(), [[0.5, 0.0], [0.0, 0.5]])

    def test_matches_dense_oracle_on_random_graphs(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            g = random_graph(rng)
            prop = propagation_matrix(g)
            N_ref, deg_ref = dense_propagation(g)
            np.testing.assert_allclose(prop.N.toarray(), N_ref, atol=1e-15)
            np.testing.assert_array_equal(prop.degrees, deg_ref)

    def test_assessment_only_matches_bipartite_normalization(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            g = random_graph(rng, social_density=0.0, own_density=0.0)
            prop = propagation_matrix(g)
            N_ref, _ = dense_propagation(g)
            np.testing.assert_allclose(prop.N.toarray(), N_ref, atol=1e-15)

    def test_unit_weight_rows_sum_to_one(self):
        g = build_graph(
            [("u1", "i1", 1.0), ("u2", "i1", 1.0)],
            ownerships=[("u1", "i2", 1.0)],
            social=[("u1", "u2", 1.0)],
        )
        prop = propagation_matrix(g)
        sums = np.asarray(prop.N.sum(axis=1)).ravel()
        np.testing.assert_allclose(sums, 1.0, atol=1e-12)

    def test_relabeling_preserving_order_is_bit_identical(self):
        edges = [("u1", "i1", 0.8), ("u2", "i2", 0.3), ("u1", "i2", 0.9)]
        g1 = build_graph(edges)
        g2 = build_graph([("aa" + u, "xx" + i, w) for u, i, w in edges])
        p1, p2 = propagation_matrix(g1), propagation_matrix(g2)
        assert np.array_equal(p1.N.data, p2.N.data)
        assert np.array_equal(p1.N.indices, p2.N.indices)
        assert np.array_equal(p1.N.indptr, p2.N.indptr)

    def test_edge_insertion_order_irrelevant(self):
        edges = [("u1", "i1", 0.8), ("u2", "i2", 0.3), ("u1", "i2", 0.9)]
        p1 = propagation_matrix(build_graph(edges))
        p2 = propagation_matrix(build_graph(edges[::-1]))
        assert np.array_equal(p1.N.data, p2.N.data)
        assert np.array_equal(p1.N.indices, p2.N.indices)

    def test_users_then_items_row_layout(self):
        g = build_graph([("u1", "i1", 0.8), ("u2", "i1", 0.6)])
        prop = propagation_matrix(g)
        assert prop.n == 2 and prop.m == 1
        # item row is the last one; it aggregates both grades plus self-loop
        np.testing.assert_allclose(prop.N.toarray()[2], [0.8 / 3, 0.6 / 3, 1 / 3])


class TestValidate:
    def test_clean_graph_empty_report(self):
        report = validate(build_graph([("u1", "i1", 0.8)]))
        assert report.ok and not report.warnings

    def test_isolated_item_warned(self):
        report = validate(build_graph([("u1", "i1", 0.8)], items=["lonely"]))
        assert report.ok
        assert any("lonely" in w for w in report.warnings)

    def test_isolated_user_warned(self):
        report = validate(build_graph([("u1", "i1", 0.8)], users=["ghost"]))
        assert any("ghost" in w for w in report.warnings)

    def test_asymmetric_social_is_fatal(self):
        g = build_graph([("u1", "i1", 0.8), ("u2", "i1", 0.6)])
        bad_S = sp.csr_matrix(np.array([[0.0, 0.5], [0.0, 0.0]]))
        broken = SoanGraph(n=g.n, m=g.m, S=bad_S, O=g.O, A=g.A,
                           user_ids=g.user_ids, item_ids=g.item_ids)
        report = validate(broken)
        assert not report.ok
        assert any("symmetric" in e for e in report.errors)

    def test_out_of_range_weight_is_fatal(self):
        g = build_graph([("u1", "i1", 0.8)])
        bad_A = sp.csr_matrix(np.array([[1.8]]))
        broken = SoanGraph(n=1, m=1, S=g.S, O=g.O, A=bad_A,
                           user_ids=g.user_ids, item_ids=g.item_ids)
        assert not validate(broken).ok

    def test_nonzero_social_diagonal_is_fatal(self):
        g = build_graph([("u1", "i1", 0.8), ("u2", "i1", 0.6)])
        bad_S = sp.csr_matrix(np.diag([0.5, 0.0]))
        broken = SoanGraph(n=2, m=1, S=bad_S, O=g.O, A=g.A,
                           user_ids=g.user_ids, item_ids=g.item_ids)
        assert not validate(broken).ok


class TestDomainTypes:
    def test_ground_truth_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            GroundTruth.full([0.5, 1.2])

    def test_ground_truth_ignores_unknown_entries(self):
        gt = GroundTruth(np.array([np.nan, 0.5]), np.array([False, True]))
        assert gt.mask.sum() == 1

    def test_split_rejects_overlap(self):
        with pytest.raises(ValidationError):
            Split(train=(0, 1), test=(1, 2))

    def test_dataset_rejects_unlabeled_split_item(self):
        g = build_graph([("u1", "i1", 0.8), ("u1", "i2", 0.4)])
        gt = GroundTruth(np.array([0.7, np.nan]), np.array([True, False]))
        with pytest.raises(ValidationError):
            Dataset(graph=g, truth=gt, split=Split(train=(1,), test=()))

    def test_dataset_rejects_truth_length_mismatch(self):
        g = build_graph([("u1", "i1", 0.8)])
        with pytest.raises(ValidationError):
            Dataset(graph=g, truth=GroundTruth.full([0.5, 0.5]))

    def test_graphs_equal_detects_weight_change(self):
        g1 = build_graph([("u1", "i1", 0.8)])
        g2 = build_graph([("u1", "i1", 0.7)])
        assert graphs_equal(g1, g1)
        assert not graphs_equal(g1, g2)
