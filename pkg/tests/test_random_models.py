import math
import pytest
import sys
import os
sys.path.insert(1, os.path.abspath('.'))
import numpy as np
from cochainlab.models.random_complexes import (STAGE_TAGS, ModelException, ModelKind, ModelSpec, RandomStreams,
                                                counterexample_y, counterexample_z, gnp, link_distribution_test,
                                                link_edge_probability, linial_meshulam, sample)
from cochainlab.topology.cochains import z2_coboundary
from cochainlab.topology.complex import complete_complex


class TestModelSpec:
    def test_valid(self):
        spec = ModelSpec("counterexample_z", 20, 2, 1.0, 0.3, seed=7)
        assert spec.kind == ModelKind.COUNTEREXAMPLE_Z
        assert spec.metadata(3) == {"model": "counterexample_z", "n": 20, "k": 2, "p": 1.0, "q": 0.3,
                                    "seed": 7, "trial": 3}

    def test_from_dict(self):
        spec = ModelSpec.from_dict({"model": "linial_meshulam", "n": "10", "k": 2, "p": "0.5"})
        assert spec == ModelSpec("linial_meshulam", 10, 2, 0.5)

    def test_from_dict_missing_key(self):
        with pytest.raises(ModelException):
            ModelSpec.from_dict({"model": "gnp", "n": 10})

    def test_unknown_model(self):
        with pytest.raises(ModelException):
            ModelSpec("erdos", 10, 1, 0.5)

    def test_bad_probability(self):
        with pytest.raises(ModelException):
            ModelSpec("linial_meshulam", 10, 2, 1.5)
        with pytest.raises(ModelException):
            ModelSpec("counterexample_z", 10, 2, 0.5, q=-0.1)

    def test_bad_dimension(self):
        with pytest.raises(ModelException):
            ModelSpec("linial_meshulam", 5, 5, 0.5)
        with pytest.raises(ModelException):
            ModelSpec("gnp", 10, 2, 0.5)
        with pytest.raises(ModelException):
            ModelSpec("counterexample_y", 10, 0, 0.5)

    def test_bad_seed(self):
        with pytest.raises(ModelException):
            ModelSpec("gnp", 10, 1, 0.5, seed=-1)
        with pytest.raises(ModelException):
            ModelSpec("gnp", 10, 1, 0.5, seed=2 ** 64)


class TestStreams:
    def test_same_stream_repeats(self):
        first = RandomStreams(5, 2).stream("lm").random(8)
        second = RandomStreams(5, 2).stream("lm").random(8)
        assert np.array_equal(first, second)

    def test_stages_differ(self):
        streams = RandomStreams(5, 2)
        assert not np.array_equal(streams.stream("planted").random(8), streams.stream("thinning").random(8))

    def test_trials_differ(self):
        assert not np.array_equal(RandomStreams(5, 0).stream("lm").random(8),
                                  RandomStreams(5, 1).stream("lm").random(8))

    def test_unknown_stage(self):
        with pytest.raises(ModelException):
            RandomStreams(0).stream("nope")

    def test_stage_tags_are_distinct(self):
        assert len(set(STAGE_TAGS.values())) == len(STAGE_TAGS)


class TestGnp:
    def test_extremes(self):
        rng = np.random.default_rng(0)
        assert gnp(10, 0.0, rng).face_count(1) == 0
        assert gnp(10, 1.0, rng).face_count(1) == 45

    def test_edge_count_concentrates(self):
        n, p = 1000, 0.3
        pairs = math.comb(n, 2)
        edges = gnp(n, p, np.random.default_rng(21)).face_count(1)
        assert abs(edges - p * pairs) <= 4 * math.sqrt(pairs * p * (1 - p))

    def test_bad_probability(self):
        with pytest.raises(ValueError):
            gnp(10, 2.0, np.random.default_rng(0))


class TestLinialMeshulam:
    def test_full_probability_is_complete(self):
        assert linial_meshulam(7, 3, 1.0, np.random.default_rng(0)) == complete_complex(7, 3)

    def test_skeleton_is_complete(self):
        X = linial_meshulam(9, 2, 0.0, np.random.default_rng(0))
        assert X.f_vector() == (9, 36, 0)

    def test_triangle_count_concentrates(self):
        n, p = 50, 0.2
        candidates = math.comb(n, 3)
        triangles = linial_meshulam(n, 2, p, np.random.default_rng(22)).face_count(2)
        assert abs(triangles - p * candidates) <= 4 * math.sqrt(candidates * p * (1 - p))

    def test_bad_dimension(self):
        with pytest.raises(ModelException):
            linial_meshulam(5, 0, 0.5, np.random.default_rng(0))

    def test_reproducible(self):
        spec = ModelSpec("linial_meshulam", 12, 2, 0.4, seed=99)
        assert sample(spec, 4)[0] == sample(spec, 4)[0]
        assert sample(spec, 4)[0] != sample(spec, 5)[0]


class TestCounterexamples:
    def test_planted_cochain_is_a_cocycle(self, planted_sample):
        assert planted_sample.bad_faces() == []
        assert z2_coboundary(planted_sample.complex, planted_sample.a).weight == 0

    def test_planted_face_count(self):
        '''each triple is good with probability 1/2, so Y^2(20, 1) has about C(20,3)/2 = 570 triangles'''
        counts = [counterexample_y(20, 2, 1.0, RandomStreams(13, t)).complex.face_count(2) for t in range(200)]
        mean = float(np.mean(counts))
        sigma = math.sqrt(1140 * 0.25 / 200)
        assert abs(mean - 570) <= 4 * sigma

    def test_zero_probability(self):
        sample_ = counterexample_y(8, 2, 0.0, RandomStreams(1, 0))
        assert sample_.complex.face_count(2) == 0

    def test_union_without_extra_faces(self):
        planted = counterexample_y(15, 2, 0.8, RandomStreams(2, 3))
        union = counterexample_z(15, 2, 0.8, 0.0, RandomStreams(2, 3))
        assert union.complex == planted.complex
        assert union.a == planted.a

    def test_union_with_every_face(self):
        union = counterexample_z(9, 2, 0.5, 1.0, RandomStreams(2, 0))
        assert union.complex == complete_complex(9, 2)

    def test_bad_faces_bounded_by_extra_faces(self):
        n, q = 20, 0.3
        union = counterexample_z(n, 2, 1.0, q, RandomStreams(6, 0))
        extra = linial_meshulam(n, 2, q, RandomStreams(6, 0).stream("extra"))
        bad = z2_coboundary(union.complex, union.a).weight
        assert bad == len(union.bad_faces())
        assert bad <= extra.face_count(2)

    def test_sample_dispatch(self):
        X, a = sample(ModelSpec("counterexample_y", 10, 2, 1.0, seed=3), 0)
        assert a is not None and a.dim == 1
        X, a = sample(ModelSpec("gnp", 10, 1, 0.5, seed=3), 0)
        assert a is None and X.k == 1


class TestLinkDistribution:
    def test_edge_probabilities(self):
        assert link_edge_probability(ModelSpec("counterexample_y", 10, 2, 0.8)) == pytest.approx(0.4)
        assert link_edge_probability(ModelSpec("counterexample_z", 10, 2, 1.0, 0.3)) == pytest.approx(0.65)
        assert link_edge_probability(ModelSpec("linial_meshulam", 10, 2, 0.4)) == pytest.approx(0.4)

    def test_gnp_has_no_link_test(self):
        with pytest.raises(ModelException):
            link_edge_probability(ModelSpec("gnp", 10, 1, 0.4))

    def test_planted_links_are_random_graphs(self):
        report = link_distribution_test(ModelSpec("counterexample_y", 20, 2, 1.0, seed=17), (0,), 2000)
        assert report.target == 0.5
        assert len(report.edges) == math.comb(19, 2)
        assert len(report.pairs) == 50
        assert report.within(4.5)

    def test_linial_meshulam_links(self):
        report = link_distribution_test(ModelSpec("linial_meshulam", 8, 2, 0.4, seed=2), (3,), 400, pairs=10)
        assert report.target == pytest.approx(0.4)
        assert report.max_abs_z < 5
        assert report.to_dict()["trials"] == 400

    def test_face_must_be_a_ridge(self):
        with pytest.raises(ModelException):
            link_distribution_test(ModelSpec("linial_meshulam", 8, 2, 0.4), (0, 1), 10)
