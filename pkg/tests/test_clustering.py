import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emocast.clustering import (
    composition_audit,
    elbow_detect,
    kmeans,
    sse_curve,
    ward_cluster,
)
from emocast.errors import CurveError, DimensionError

from oracles import cluster_sse, kmeans_optimal_sse, ward_naive

TWO_BLOBS_4PT = [[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]


def three_blobs(rng, per_blob=30, sigma=0.1, separation=10.0):
    centers = np.array([[0.0, 0.0], [separation, 0.0], [0.0, separation]])
    points = np.vstack(
        [center + rng.normal(0.0, sigma, size=(per_blob, 2)) for center in centers]
    )
    return points


class TestKMeans:
    def test_two_blob_optimum(self):
        res = kmeans(TWO_BLOBS_4PT, k=2, seed=42)
        assert res.sse == pytest.approx(1.0, abs=1e-12)
        assert res.sse == pytest.approx(kmeans_optimal_sse(np.asarray(TWO_BLOBS_4PT), 2), abs=1e-12)
        groups = {frozenset(i for i, a in enumerate(res.assignments) if a == j) for j in range(2)}
        assert groups == {frozenset({0, 1}), frozenset({2, 3})}

    def test_k1_centroid_is_mean(self):
        pts = np.random.default_rng(0).normal(size=(12, 3))
        res = kmeans(pts, k=1, seed=7)
        assert np.allclose(res.centroids[0], pts.mean(axis=0))
        assert res.assignments == [0] * 12

    def test_identical_points(self):
        res = kmeans([[2.0, 2.0]] * 6, k=2, seed=1)
        assert res.sse == 0.0
        assert sorted(set(res.assignments)) == [0, 1]

    def test_deterministic(self):
        pts = np.random.default_rng(3).normal(size=(40, 5))
        a = kmeans(pts, k=4, seed=99)
        b = kmeans(pts, k=4, seed=99)
        assert a.assignments == b.assignments
        assert a.sse == b.sse
        assert np.array_equal(a.centroids, b.centroids)

    def test_ragged_rejected(self):
        with pytest.raises(DimensionError):
            kmeans([[1.0, 2.0], [3.0]], k=1, seed=0)

    def test_k_bounds(self):
        with pytest.raises(ValueError):
            kmeans([[0.0], [1.0]], k=3, seed=0)

    @given(st.integers(0, 10_000), st.integers(2, 6))
    @settings(max_examples=30, deadline=None)
    def test_sse_never_worse_than_single_cluster(self, seed, k):
        pts = np.random.default_rng(seed).normal(size=(20, 3))
        total = cluster_sse(pts, range(20))
        res = kmeans(pts, k=k, seed=seed)
        assert res.sse <= total + 1e-9
        assert all(0 <= a < k for a in res.assignments)


class TestSseCurve:
    def test_k_equals_n_reaches_zero(self):
        pts = np.random.default_rng(5).normal(size=(8, 2))
        curve = sse_curve(pts, 1, 8, seed=11)
        assert curve[-1] == (8, pytest.approx(0.0, abs=1e-18))

    def test_single_k_is_total_scatter(self):
        pts = np.random.default_rng(6).normal(size=(10, 2))
        [(k, sse)] = sse_curve(pts, 1, 1, seed=1)
        assert k == 1
        assert sse == pytest.approx(cluster_sse(pts, range(10)))

    def test_three_blob_drop_then_flat(self):
        pts = three_blobs(np.random.default_rng(4))
        curve = dict(sse_curve(pts, 1, 6, seed=4))
        assert curve[2] < 0.5 * curve[1]
        assert curve[3] < 0.01 * curve[2]
        assert curve[4] > 0.5 * curve[3]  # little left to gain past 3

    def test_restart_minimum_is_deterministic(self):
        pts = three_blobs(np.random.default_rng(8), per_blob=10)
        assert sse_curve(pts, 1, 5, seed=2) == sse_curve(pts, 1, 5, seed=2)


class TestElbow:
    def test_reference_curve(self):
        curve = list(zip(range(1, 7), [100.0, 60.0, 30.0, 28.0, 27.0, 26.0]))
        assert elbow_detect(curve) == 3

    def test_linear_decline_ties_to_smallest(self):
        curve = [(k, 100.0 - 10.0 * k) for k in range(1, 7)]
        assert elbow_detect(curve) == 2

    def test_too_few_points(self):
        with pytest.raises(CurveError):
            elbow_detect([(1, 10.0), (2, 5.0)])

    def test_non_consecutive_rejected(self):
        with pytest.raises(CurveError):
            elbow_detect([(1, 10.0), (3, 5.0), (4, 4.0)])

    def test_three_blob_elbow_across_seeds(self):
        hits = 0
        for seed in range(10):
            pts = three_blobs(np.random.default_rng(1000 + seed))
            curve = sse_curve(pts, 1, 8, seed=seed)
            hits += elbow_detect(curve) == 3
        assert hits >= 9


class TestWard:
    def test_one_dim_reference(self):
        dendrogram, assignments = ward_cluster([[0.0], [1.0], [10.0]], k=2)
        first = dendrogram.merges[0]
        assert (first.id_a, first.id_b) == (0, 1)
        assert first.cost == pytest.approx(0.5, abs=1e-12)
        assert assignments == [0, 0, 1]

    def test_two_points_cost_is_half_sq_distance(self):
        dendrogram, _ = ward_cluster([[0.0, 0.0], [3.0, 4.0]], k=1)
        assert dendrogram.merges[0].cost == pytest.approx(12.5, abs=1e-12)

    def test_duplicate_points_merge_free(self):
        dendrogram, _ = ward_cluster([[1.0], [1.0], [5.0]], k=1)
        assert dendrogram.merges[0].cost == 0.0

    def test_merge_count_and_sizes(self):
        pts = np.random.default_rng(2).normal(size=(9, 4))
        dendrogram, assignments = ward_cluster(pts, k=3)
        assert len(dendrogram.merges) == 8
        assert dendrogram.merges[-1].new_size == 9
        assert sorted(set(assignments)) == [0, 1, 2]

    @given(st.integers(0, 10_000), st.integers(2, 12), st.integers(1, 3))
    @settings(max_examples=40, deadline=None)
    def test_matches_naive_recomputation(self, seed, n, dim):
        pts = np.random.default_rng(seed).normal(size=(n, dim))
        dendrogram, _ = ward_cluster(pts, k=1)
        expected = ward_naive(pts)
        got = [(m.id_a, m.id_b, m.cost, m.new_size) for m in dendrogram.merges]
        assert [(a, b, s) for a, b, _, s in got] == [(a, b, s) for a, b, _, s in expected]
        for (_, _, cost, _), (_, _, ref_cost, _) in zip(got, expected):
            assert cost == pytest.approx(ref_cost, abs=1e-9)

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_costs_non_decreasing(self, seed):
        pts = np.random.default_rng(seed).normal(size=(12, 3))
        dendrogram, _ = ward_cluster(pts, k=1)
        costs = [m.cost for m in dendrogram.merges]
        assert all(b >= a - 1e-12 for a, b in zip(costs, costs[1:]))

    def test_assignment_labels_by_smallest_member(self):
        # two tight pairs far apart: point 0's cluster must be labeled 0
        _, assignments = ward_cluster([[0.0], [100.0], [0.1], [100.1]], k=2)
        assert assignments[0] == 0
        assert assignments == [0, 1, 0, 1]


class TestCompositionAudit:
    def test_skewed_cluster(self):
        assignments = [0] * 7 + [1] * 4
        genders = ["male"] * 6 + ["female"] + ["female"] * 3 + ["male"]
        rows = composition_audit(assignments, genders, global_counts=(4, 7))
        first = rows[0]
        assert (first.female, first.male) == (1, 6)
        assert first.ratio == pytest.approx(6.0)
        assert first.expected_female == pytest.approx(7 * 4 / 11)

    def test_reference_expected_female(self):
        # global 3:1 male to female, cluster of six males and one female
        rows = composition_audit([0] * 7, ["male"] * 6 + ["female"], global_counts=(25, 75))
        assert rows[0].ratio == pytest.approx(6.0)
        assert rows[0].expected_female == pytest.approx(1.75)

    def test_matching_proportion_zero_deviation(self):
        rows = composition_audit([0] * 4, ["female", "male", "male", "male"], (10, 30))
        assert rows[0].deviation == pytest.approx(0.0)

    def test_all_male_cluster_infinite_ratio(self):
        rows = composition_audit([0, 0], ["male", "male"], (5, 5))
        assert math.isinf(rows[0].ratio)

    def test_counts_partition_totals(self):
        rng = np.random.default_rng(0)
        assignments = rng.integers(0, 4, size=60).tolist()
        genders = rng.choice(["female", "male", "unknown"], size=60).tolist()
        rows = composition_audit(assignments, genders, (10, 20))
        assert sum(r.female for r in rows) == genders.count("female")
        assert sum(r.male for r in rows) == genders.count("male")
