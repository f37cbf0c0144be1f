import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semfuse.corpus import Record
from semfuse.errors import ConfigError, ConflictError, DomainError, FormatError, RowError
from semfuse.geotime import EARTH_RADIUS_MILES, GeoPoint
from semfuse.rankopt import (
    DEFAULT_DIST_KINDS,
    GridConfig,
    RankMatrix,
    SimilarityParams,
    batch_features,
    dist_exp,
    dist_floor_geo,
    dist_inv,
    load_rank_labels,
    optimize_alphas,
    pairwise_scores,
    rank_loss,
    rank_matrix,
    save_trace_csv,
    sim_pi,
    sim_sigma,
)


def equator_point_at(miles: float) -> GeoPoint:
    """Point on the equator exactly `miles` east of (0, 0)."""
    return GeoPoint(0.0, math.degrees(miles / EARTH_RADIUS_MILES))

ORIGIN = GeoPoint(0.0, 0.0)
finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


class TestDistanceKernels:
    def test_exp_zero_gap(self):
        assert dist_exp(4.0, 4.0) == 1.0

    def test_exp_log_two(self):
        assert dist_exp(0.0, math.log(2.0)) == pytest.approx(0.5, abs=1e-12)

    def test_exp_gap_three(self):
        assert dist_exp(0.0, 3.0) == pytest.approx(0.049787068367863944, abs=1e-12)

    def test_inv_values(self):
        assert dist_inv(2.0, 2.0) == 1.0
        assert dist_inv(0.0, 1.0) == 0.5
        assert dist_inv(0.0, 3.0) == 0.25

    def test_floor_geo_same_point(self):
        assert dist_floor_geo(ORIGIN, ORIGIN) == 1.0

    def test_floor_geo_4999_miles(self):
        assert dist_floor_geo(ORIGIN, equator_point_at(4999.0)) == pytest.approx(0.1)

    def test_floor_geo_6000_miles_clamped(self):
        assert dist_floor_geo(ORIGIN, equator_point_at(6000.0)) == 0.0

    @given(finite, finite)
    def test_scalar_kernels_bounded_and_symmetric(self, a, b):
        for fn in (dist_exp, dist_inv):
            assert 0.0 <= fn(a, b) <= 1.0
            assert fn(a, b) == fn(b, a)

    @given(finite, st.floats(min_value=0, max_value=1e6), st.floats(min_value=0, max_value=1e6))
    def test_scalar_kernels_nonincreasing(self, a, gap1, gap2):
        lo, hi = sorted([gap1, gap2])
        for fn in (dist_exp, dist_inv):
            assert fn(a, a + hi) <= fn(a, a + lo) + 1e-12

    @given(st.floats(min_value=0, max_value=12000), st.floats(min_value=0, max_value=12000))
    @settings(max_examples=100)
    def test_floor_geo_bounded_and_nonincreasing(self, m1, m2):
        lo, hi = sorted([m1, m2])
        near = dist_floor_geo(ORIGIN, equator_point_at(lo))
        far = dist_floor_geo(ORIGIN, equator_point_at(hi))
        assert 0.0 <= far <= near <= 1.0


class TestSimilarityFunctions:
    def test_sigma_zero_alpha_reduces_to_dot(self):
        p = SimilarityParams("sigma", (0.0, 0.0), DEFAULT_DIST_KINDS)
        e1, e2 = np.array([0.6, 0.8]), np.array([0.8, 0.6])
        feats1 = (0.0, ORIGIN)
        feats2 = (5.0, equator_point_at(1000.0))
        assert sim_sigma(e1, e2, feats1, feats2, p) == pytest.approx(0.96, abs=1e-12)

    def test_sigma_forced_arithmetic(self):
        p = SimilarityParams("sigma", (1.0, 1.0), DEFAULT_DIST_KINDS)
        e1 = np.array([1.0, 0.0])
        e2 = np.array([0.5, math.sqrt(0.75)])
        same = (3.0, ORIGIN)
        assert sim_sigma(e1, e2, same, same, p) == pytest.approx(2.5, abs=1e-12)

    def test_sigma_hand_value(self):
        # dot 0.3, d1 = 1/(3+1) = 0.25, d2 = 0.1 at 4999 miles
        p = SimilarityParams("sigma", (0.5, 2.0), DEFAULT_DIST_KINDS)
        e1 = np.array([1.0, 0.0])
        e2 = np.array([0.3, math.sqrt(0.91)])
        feats1 = (0.0, ORIGIN)
        feats2 = (3.0, equator_point_at(4999.0))
        got = sim_sigma(e1, e2, feats1, feats2, p)
        assert got == pytest.approx(0.3 + 0.125 + 0.2, abs=1e-9)

    def test_pi_unit_factors_reduce_to_dot(self):
        p = SimilarityParams("pi", (0.0, 0.0), DEFAULT_DIST_KINDS)
        e1, e2 = np.array([0.6, 0.8]), np.array([0.8, 0.6])
        same = (2.0, ORIGIN)  # both kernels give 1 at zero gap
        assert sim_pi(e1, e2, same, same, p) == pytest.approx(0.96, abs=1e-12)

    def test_pi_reference_weights_same_day_same_place(self):
        p = SimilarityParams("pi", (0.02, 9.55), DEFAULT_DIST_KINDS)
        e = np.array([1.0, 0.0])
        same = (7.0, ORIGIN)
        assert sim_pi(e, e, same, same, p) == pytest.approx(10.761, abs=1e-9)

    def test_pi_hand_value(self):
        # dot 0.4, d1 = 0.5 one day apart, d2 = 0.1 at 4999 miles
        p = SimilarityParams("pi", (0.02, 9.55), DEFAULT_DIST_KINDS)
        e1 = np.array([1.0, 0.0])
        e2 = np.array([0.4, math.sqrt(0.84)])
        feats1 = (0.0, ORIGIN)
        feats2 = (1.0, equator_point_at(4999.0))
        got = sim_pi(e1, e2, feats1, feats2, p)
        assert got == pytest.approx(0.4 * 0.52 * 9.65, abs=1e-9)
        assert got == pytest.approx(2.0072, abs=1e-9)

    def test_feature_count_mismatch(self):
        p = SimilarityParams("sigma", (1.0, 1.0), DEFAULT_DIST_KINDS)
        e = np.array([1.0, 0.0])
        with pytest.raises(DomainError):
            sim_sigma(e, e, (1.0,), (1.0,), p)


class TestBatchFeatures:
    def test_days_and_coords(self):
        records = [
            Record("a", "x", 86400 * 3, coords=GeoPoint(10.0, 20.0)),
            Record("b", "y", 43200, coords=GeoPoint(-5.0, 30.0)),
        ]
        feats = batch_features(records)
        assert feats[0] == (3.0, GeoPoint(10.0, 20.0))
        assert feats[1] == (0.5, GeoPoint(-5.0, 30.0))

    def test_missing_coords_names_id(self):
        with pytest.raises(DomainError, match="nowhere"):
            batch_features([Record("nowhere", "x", 5)])


def brute_force_row_ranks(scores_row, i, m):
    """Independent per-row oracle: stable sort by descending score, index ties."""
    candidates = [j for j in range(m) if j != i]
    order = sorted(candidates, key=lambda j: (-scores_row[j], j))
    return {j: pos for pos, j in enumerate(order)}


class TestRankMatrix:
    def test_two_candidate_order(self):
        scores = np.array([[0.0, 0.9, 0.1], [0.9, 0.0, 0.5], [0.1, 0.5, 0.0]])
        rm = rank_matrix(scores)
        assert rm.entries[0, 1] == 0
        assert rm.entries[0, 2] == 1

    def test_all_ties_break_by_index(self):
        scores = np.ones((4, 4))
        rm = rank_matrix(scores)
        assert rm.entries[1].tolist() == [0, 0, 1, 2]
        for i in range(4):
            assert rm.entries[i, i] == 0

    @given(st.integers(min_value=0, max_value=2000))
    @settings(max_examples=150)
    def test_rows_match_sort_oracle(self, seed):
        rng = np.random.default_rng(seed)
        scores = rng.random((6, 6))
        scores = (scores + scores.T) / 2
        rm = rank_matrix(scores)
        for i in range(6):
            oracle = brute_force_row_ranks(scores[i], i, 6)
            for j, rank in oracle.items():
                assert rm.entries[i, j] == rank
            off = [rm.entries[i, j] for j in range(6) if j != i]
            assert sorted(off) == list(range(5))

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(77)
        scores = rng.random((5, 5))
        base = rank_matrix(scores)
        assert np.array_equal(rank_matrix(2.0 * scores + 1.0).entries, base.entries)
        assert np.array_equal(rank_matrix(np.exp(scores)).entries, base.entries)

    def test_non_square_rejected(self):
        with pytest.raises(DomainError):
            rank_matrix(np.zeros((3, 4)))


class TestRankLoss:
    def test_identical_zero(self):
        rm = rank_matrix(np.random.default_rng(0).random((5, 5)))
        assert rank_loss(rm, rm) == 0.0

    def test_single_cell_difference(self):
        a = rank_matrix(np.ones((3, 3)))
        entries = a.entries.copy()
        entries[0, 1] += 2
        b = RankMatrix(3, entries)
        assert rank_loss(a, b) == 2.0

    def test_hand_summed_4x4(self):
        a = RankMatrix(4, np.array([
            [0, 0, 1, 2],
            [0, 0, 1, 2],
            [0, 1, 0, 2],
            [0, 1, 2, 0],
        ]))
        b = RankMatrix(4, np.array([
            [0, 2, 1, 0],
            [0, 0, 2, 1],
            [1, 0, 0, 2],
            [0, 1, 2, 0],
        ]))
        # off-diagonal squared differences: (0-2)^2+(1-1)^2+(2-0)^2
        #   + (0-0)^2+(1-2)^2+(2-1)^2 + (0-1)^2+(1-0)^2+(0-0)... by hand: 4+0+4+0+1+1+1+1+0+0+0+0 = 12
        assert rank_loss(a, b) == pytest.approx(math.sqrt(12.0), abs=1e-12)

    @given(st.integers(min_value=0, max_value=500))
    def test_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        a = rank_matrix(rng.random((5, 5)))
        b = rank_matrix(rng.random((5, 5)))
        assert rank_loss(a, b) == rank_loss(b, a)

    def test_size_mismatch(self):
        a = rank_matrix(np.ones((3, 3)))
        b = rank_matrix(np.ones((4, 4)))
        with pytest.raises(DomainError):
            rank_loss(a, b)


def synthetic_batch(m: int, seed: int):
    rng = np.random.default_rng(seed)
    emb = rng.normal(size=(m, 8))
    emb /= np.linalg.norm(emb, axis=1, keepdims=True)
    feats = [
        (float(rng.integers(0, 10)), GeoPoint(float(rng.uniform(-60, 60)), float(rng.uniform(-150, 150))))
        for _ in range(m)
    ]
    return emb, feats


class TestOptimizeAlphas:
    def test_recovers_generating_parameters(self):
        emb, feats = synthetic_batch(12, 21)
        true = SimilarityParams("pi", (0.5, 6.5), DEFAULT_DIST_KINDS)
        labels = rank_matrix(pairwise_scores(emb, feats, true))
        cfg = GridConfig(bounds=((0.0, 1.0), (0.0, 10.0)))
        params, loss, trace = optimize_alphas(emb, feats, labels, "pi", DEFAULT_DIST_KINDS, cfg)
        assert loss == 0.0
        derived = rank_matrix(pairwise_scores(emb, feats, params))
        assert np.array_equal(derived.entries, labels.entries)

    def test_single_point_grid(self):
        emb, feats = synthetic_batch(10, 3)
        labels = rank_matrix(pairwise_scores(
            emb, feats, SimilarityParams("pi", (0.1, 2.0), DEFAULT_DIST_KINDS)
        ))
        cfg = GridConfig(bounds=((0.0, 1.0), (0.0, 10.0)), step=50.0, rounds=1)
        params, loss, trace = optimize_alphas(emb, feats, labels, "pi", DEFAULT_DIST_KINDS, cfg)
        assert params.alphas == (0.5, 5.0)
        probed = rank_matrix(pairwise_scores(emb, feats, params))
        assert loss == pytest.approx(rank_loss(probed, labels), abs=1e-12)

    def test_never_worse_than_probes(self):
        emb, feats = synthetic_batch(10, 8)
        labels = rank_matrix(pairwise_scores(
            emb, feats, SimilarityParams("pi", (0.9, 1.1), DEFAULT_DIST_KINDS)
        ))
        cfg = GridConfig(bounds=((0.0, 1.0), (0.0, 4.0)), rounds=2)
        _, loss, trace = optimize_alphas(emb, feats, labels, "pi", DEFAULT_DIST_KINDS, cfg)
        assert trace
        assert all(loss <= t[3] + 1e-12 for t in trace)

    def test_warns_outside_recommended_batch(self):
        emb, feats = synthetic_batch(5, 4)
        labels = rank_matrix(pairwise_scores(
            emb, feats, SimilarityParams("sigma", (0.5, 0.5), DEFAULT_DIST_KINDS)
        ))
        cfg = GridConfig(bounds=((0.0, 1.0), (0.0, 1.0)), rounds=1)
        with pytest.warns(UserWarning, match="batch size 5"):
            optimize_alphas(emb, feats, labels, "sigma", DEFAULT_DIST_KINDS, cfg)

    def test_wrong_arity_rejected(self):
        emb, feats = synthetic_batch(10, 5)
        labels = rank_matrix(np.random.default_rng(0).random((10, 10)))
        cfg = GridConfig(bounds=((0.0, 1.0),))
        with pytest.raises(ConfigError):
            optimize_alphas(emb, feats, labels, "pi", ("inv_abs",), cfg)

    def test_trace_csv(self, tmp_path):
        trace = [(1, 0.5, 5.0, 3.0), (2, 0.25, 2.5, 1.0)]
        p = tmp_path / "trace.csv"
        save_trace_csv(trace, p)
        lines = p.read_text(encoding="utf-8").strip().splitlines()
        assert lines[0] == "round,alpha1,alpha2,loss"
        assert len(lines) == 3


class TestPairwiseScores:
    def test_symmetric_and_diagonal_free_usage(self):
        emb, feats = synthetic_batch(6, 11)
        p = SimilarityParams("pi", (0.3, 4.0), DEFAULT_DIST_KINDS)
        scores = pairwise_scores(emb, feats, p)
        assert np.array_equal(scores, scores.T)
        for i in range(6):
            for j in range(6):
                if i != j:
                    expect = sim_pi(emb[i], emb[j], feats[i], feats[j], p)
                    assert scores[i, j] == pytest.approx(expect, abs=1e-12)


class TestLoadRankLabels:
    def test_triplet_format(self, tmp_path):
        p = tmp_path / "labels.csv"
        p.write_text(
            "i,j,score\n0,1,0.9\n0,2,0.1\n1,2,0.5\n",
            encoding="utf-8",
        )
        rm = load_rank_labels(p)
        expect = rank_matrix(np.array([[0, 0.9, 0.1], [0.9, 0, 0.5], [0.1, 0.5, 0]]))
        assert np.array_equal(rm.entries, expect.entries)

    def test_matrix_format(self, tmp_path):
        p = tmp_path / "labels.csv"
        p.write_text("0.0,0.9,0.1\n0.9,0.0,0.5\n0.1,0.5,0.0\n", encoding="utf-8")
        rm = load_rank_labels(p)
        expect = rank_matrix(np.array([[0, 0.9, 0.1], [0.9, 0, 0.5], [0.1, 0.5, 0]]))
        assert np.array_equal(rm.entries, expect.entries)

    def test_score_out_of_range(self, tmp_path):
        p = tmp_path / "labels.csv"
        p.write_text("i,j,score\n0,1,1.5\n", encoding="utf-8")
        with pytest.raises(RowError):
            load_rank_labels(p)

    def test_self_pair_rejected(self, tmp_path):
        p = tmp_path / "labels.csv"
        p.write_text("i,j,score\n1,1,0.5\n", encoding="utf-8")
        with pytest.raises(RowError):
            load_rank_labels(p)

    def test_duplicate_pair_rejected(self, tmp_path):
        p = tmp_path / "labels.csv"
        p.write_text("i,j,score\n0,1,0.5\n1,0,0.6\n0,2,0.1\n1,2,0.2\n", encoding="utf-8")
        with pytest.raises(ConflictError):
            load_rank_labels(p)

    def test_missing_pair_rejected(self, tmp_path):
        p = tmp_path / "labels.csv"
        p.write_text("i,j,score\n0,1,0.5\n0,2,0.1\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_rank_labels(p)


class TestGridConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            GridConfig(bounds=((1.0, 0.0),))
        with pytest.raises(ConfigError):
            GridConfig(bounds=((0.0, 1.0),), shrink=1.0)
        with pytest.raises(ConfigError):
            GridConfig(bounds=((0.0, 1.0),), rounds=0)
