import json
import pytest
import sys
import os
sys.path.insert(1, os.path.abspath('.'))
from fractions import Fraction
import networkx as nx
from cochainlab.models.random_complexes import RandomStreams, counterexample_y, counterexample_z
from cochainlab.theory.expansion import (ExpansionException, UndefinedRatioException, cheeger_check,
                                         class_norm_unchanged, cohomology_consistent, graph_edge_expansion,
                                         graph_edge_expansion_exact, spectral_expansion, z2_expansion_exact,
                                         z2_expansion_witness)
from cochainlab.topology.cochains import BudgetExceededException, Z2Cochain, gf2_cohomology_dim, z2_coboundary
from cochainlab.topology.complex import build_complex, complete_complex, complex_from_networkx


class TestExactExpansion:
    def test_tetrahedron_boundary(self, tetrahedron_boundary):
        report = z2_expansion_exact(tetrahedron_boundary, 2)
        assert report.epsilon == Fraction(3)
        assert report.method == "exhaustive"
        assert report.classes == 8
        assert not report.is_upper_bound

    def test_k5_2_is_an_expander(self, k5_2):
        report = z2_expansion_exact(k5_2, 2)
        assert report.epsilon >= 1
        assert report.representative is not None
        assert report.representative.dim == 1

    def test_graph_dimension(self):
        '''in dimension 1 the expansion of K_4 is its edge expansion'''
        assert z2_expansion_exact(complete_complex(4, 1), 1).epsilon == Fraction(4, 3)

    def test_report_dict(self, tetrahedron_boundary):
        data = json.loads(json.dumps(z2_expansion_exact(tetrahedron_boundary, 2).to_dict()))
        assert data["epsilon"] == 3.0
        assert data["epsilon_exact"] == "3/1"

    def test_cohomology_consistent(self, tetrahedron_boundary):
        report = z2_expansion_exact(tetrahedron_boundary, 2)
        assert cohomology_consistent(tetrahedron_boundary, report)

    def test_dimension_range(self, k5_2):
        with pytest.raises(ExpansionException):
            z2_expansion_exact(k5_2, 0)
        with pytest.raises(ExpansionException):
            z2_expansion_exact(k5_2, 3)

    def test_budget(self):
        with pytest.raises(BudgetExceededException):
            z2_expansion_exact(complete_complex(6, 2), 2, budget=8)

    def test_disconnected_graph(self):
        X = build_complex(6, 1, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])
        report = z2_expansion_exact(X, 1)
        assert report.epsilon == 0
        assert cohomology_consistent(X, report)


class TestWitness:
    def test_planted_cocycle(self):
        sample = counterexample_y(10, 2, 1.0, RandomStreams(3, 0))
        X, a = sample.complex, sample.a
        report = z2_expansion_witness(X, a)
        assert report.epsilon == 0
        assert report.is_upper_bound
        assert report.class_weight > 0
        assert gf2_cohomology_dim(X, 1) >= 1

    def test_coboundary_has_no_ratio(self, tetrahedron_boundary):
        X = tetrahedron_boundary
        f = z2_coboundary(X, Z2Cochain.indicator(X, [(0,)]))
        with pytest.raises(UndefinedRatioException):
            z2_expansion_witness(X, f)

    def test_witness_bounds_the_exact_value(self, tetrahedron_boundary):
        X = tetrahedron_boundary
        exact = z2_expansion_exact(X, 2)
        witness = z2_expansion_witness(X, Z2Cochain.indicator(X, [(0, 1), (0, 2)]))
        assert witness.epsilon >= exact.epsilon

    def test_top_dimension(self, tetrahedron_boundary):
        with pytest.raises(ExpansionException):
            z2_expansion_witness(tetrahedron_boundary, Z2Cochain.zeros(tetrahedron_boundary, 2))

    def test_class_norm_unchanged_by_extra_faces(self):
        streams = RandomStreams(4, 1)
        planted = counterexample_y(12, 2, 1.0, streams)
        union = counterexample_z(12, 2, 1.0, 0.3, streams)
        assert union.a == planted.a
        assert class_norm_unchanged(planted.complex, union.complex, planted.a)


class TestSpectralExpansion:
    def test_complete_complexes(self, tetrahedron_boundary, k5_2):
        assert spectral_expansion(tetrahedron_boundary) == pytest.approx(2.0)
        assert spectral_expansion(k5_2) == pytest.approx(5 / 3)

    def test_needs_complete_skeleton(self):
        X = build_complex(4, 2, [(0, 1), (0, 2), (1, 2), (0, 1, 2)], complete_skeleton_dim=0)
        with pytest.raises(ExpansionException):
            spectral_expansion(X)


class TestEdgeExpansion:
    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
    def test_complete_graph(self, n):
        value = graph_edge_expansion_exact(nx.complete_graph(n))
        assert value == Fraction(2 * (n - n // 2), n - 1)
        assert value >= 1

    def test_cycle(self):
        result = graph_edge_expansion(nx.cycle_graph(6))
        assert result.epsilon == Fraction(2, 3)
        assert result.cut_ratio == Fraction(2, 3)
        assert len(result.subset) == 3

    def test_two_triangles(self):
        G = nx.disjoint_union(nx.complete_graph(3), nx.complete_graph(3))
        assert graph_edge_expansion_exact(G) == 0

    def test_accepts_complexes(self):
        assert graph_edge_expansion_exact(complete_complex(4, 1)) == Fraction(4, 3)

    def test_rejects_higher_complexes(self, k5_2):
        with pytest.raises(ExpansionException):
            graph_edge_expansion_exact(k5_2)

    def test_no_edges(self):
        with pytest.raises(ExpansionException):
            graph_edge_expansion_exact(nx.empty_graph(4))

    def test_budget(self):
        with pytest.raises(BudgetExceededException):
            graph_edge_expansion_exact(nx.complete_graph(6), budget=8)


class TestCheeger:
    def test_complete_graph(self):
        report = cheeger_check(nx.complete_graph(6))
        assert report.d == 5
        assert report.lambda_2 == pytest.approx(1.2)
        assert report.h == Fraction(3, 5)
        assert report.passed

    @pytest.mark.parametrize("graph", [nx.cycle_graph(8), nx.petersen_graph(), nx.hypercube_graph(3)])
    def test_named_graphs(self, graph):
        assert cheeger_check(graph).passed

    def test_random_regular_graphs(self):
        checked = 0
        for seed in range(40):
            n = 8 + 2 * (seed % 5)
            G = nx.random_regular_graph(3, n, seed=seed)
            if not nx.is_connected(G):
                continue
            assert cheeger_check(G).passed
            checked += 1
            if checked == 20:
                break
        assert checked == 20

    def test_irregular_graph(self):
        with pytest.raises(ExpansionException):
            cheeger_check(nx.path_graph(4))

    def test_disconnected_graph(self):
        G = nx.disjoint_union(nx.complete_graph(3), nx.complete_graph(3))
        with pytest.raises(ExpansionException):
            cheeger_check(G)

    def test_from_complex(self):
        assert cheeger_check(complex_from_networkx(nx.complete_graph(5))).passed
