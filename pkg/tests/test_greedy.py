"""Forward-selection paths, thresholding, fixed-support solutions."""

import numpy as np
import pytest

from oracles import exhaustive_sparse_max, random_psd, sorted_diag_order
from sparsepca.errors import BadCardinality, EmptyPattern, UnknownMethod
from sparsepca.greedy import (
    greedy_approx,
    greedy_full,
    pattern_solution,
    penalized_path,
    sort_by_variance,
    threshold_leading,
    zero_component,
)


class TestPatternSolution:
    def test_single_index(self):
        comp = pattern_solution(np.diag([3.0, 2.0, 1.0]), (1,))
        assert comp.support == (1,)
        assert np.allclose(comp.z, [0.0, 1.0, 0.0])
        assert comp.variance == pytest.approx(2.0, abs=1e-12)

    def test_pair_uses_submatrix_eigenvalue(self):
        S = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]])
        comp = pattern_solution(S, (0, 1))
        assert comp.variance == pytest.approx(3.0, abs=1e-12)
        assert comp.z[2] == 0.0
        assert np.linalg.norm(comp.z) == pytest.approx(1.0, abs=1e-12)

    def test_penalty_enters_objective(self):
        comp = pattern_solution(np.diag([3.0, 2.0]), (0, 1), rho=0.5)
        assert comp.penalized_objective == pytest.approx(
            comp.variance - 1.0, abs=1e-12
        )

    def test_empty_support_is_zero_component(self):
        comp = pattern_solution(np.diag([3.0, 2.0]), ())
        assert comp.support == ()
        assert comp.variance == 0.0
        assert comp.penalized_objective == 0.0

    def test_rejects_out_of_range_and_duplicates(self):
        S = np.diag([3.0, 2.0])
        with pytest.raises(EmptyPattern):
            pattern_solution(S, (0, 2))
        with pytest.raises(EmptyPattern):
            pattern_solution(S, (1, 1))

    def test_unsorted_input_is_normalized(self):
        comp = pattern_solution(np.diag([3.0, 2.0, 1.0]), (2, 0))
        assert comp.support == (0, 2)


class TestSortByVariance:
    def test_diagonal(self):
        assert sort_by_variance(np.diag([1.0, 3.0, 2.0])).tolist() == [1, 2, 0]

    def test_ties_stay_in_index_order(self):
        assert sort_by_variance(np.diag([2.0, 2.0, 5.0])).tolist() == [2, 0, 1]

    def test_matches_reference_ordering(self):
        rng = np.random.default_rng(70)
        for _ in range(25):
            S = random_psd(rng, 9)
            assert sort_by_variance(S).tolist() == sorted_diag_order(S)


class TestThresholdLeading:
    def test_diagonal_keeps_top_axis_then_lowest_tied_index(self):
        # leading eigenvector of diag(3,2,1) is the first axis; entries
        # 2 and 3 tie at zero magnitude so index 1 wins the second slot
        comp = threshold_leading(np.diag([3.0, 2.0, 1.0]), 2)
        assert comp.support == (0, 1)
        assert np.allclose(comp.z, [1.0, 0.0, 0.0])
        assert comp.variance == pytest.approx(3.0, abs=1e-12)

    def test_full_cardinality_recovers_leading_eigenvalue(self):
        rng = np.random.default_rng(71)
        S = random_psd(rng, 6)
        comp = threshold_leading(S, 6)
        assert comp.variance == pytest.approx(
            float(np.linalg.eigvalsh(S)[-1]), abs=1e-10
        )

    def test_rejects_bad_k(self):
        with pytest.raises(BadCardinality):
            threshold_leading(np.eye(3), 0)
        with pytest.raises(BadCardinality):
            threshold_leading(np.eye(3), 4)

    def test_loadings_resolved_not_renormalized(self):
        rng = np.random.default_rng(72)
        for _ in range(10):
            S = random_psd(rng, 7)
            comp = threshold_leading(S, 3)
            sub = S[np.ix_(comp.support, comp.support)]
            assert comp.variance == pytest.approx(
                float(np.linalg.eigvalsh(sub)[-1]), abs=1e-10
            )


class TestGreedyFull:
    def test_diagonal_path(self):
        path = greedy_full(np.diag([3.0, 2.0, 1.0]), 3)
        assert path.patterns == [(0,), (0, 1), (0, 1, 2)]
        assert path.variances == pytest.approx([3.0, 3.0, 3.0], abs=1e-12)
        assert path.gains == pytest.approx([3.0, 3.0], abs=1e-12)

    def test_starts_at_largest_variance(self):
        path = greedy_full(np.diag([1.0, 5.0, 2.0]), 1)
        assert path.patterns == [(1,)]
        assert path.variances[0] == pytest.approx(5.0, abs=1e-12)

    def test_path_structure(self):
        rng = np.random.default_rng(73)
        for _ in range(15):
            S = random_psd(rng, 8)
            path = greedy_full(S, 6)
            assert len(path.patterns) == 6
            for j, pat in enumerate(path.patterns):
                assert len(pat) == j + 1
                assert pat == tuple(sorted(pat))
                sub = S[np.ix_(pat, pat)]
                assert path.variances[j] == pytest.approx(
                    float(np.linalg.eigvalsh(sub)[-1]), abs=1e-10
                )
            for a, b in zip(path.patterns, path.patterns[1:]):
                assert set(a) < set(b)
            diffs = np.diff(path.variances)
            assert np.all(diffs >= -1e-10)

    def test_exact_at_extreme_cardinalities(self):
        # first and last path points are globally optimal: k=1 is the
        # max diagonal entry, k=n the unrestricted eigenvalue
        rng = np.random.default_rng(74)
        for _ in range(10):
            S = random_psd(rng, 7)
            path = greedy_full(S, 7)
            best1, _ = exhaustive_sparse_max(S, 1)
            assert path.variances[0] == pytest.approx(best1, abs=1e-10)
            assert path.variances[-1] == pytest.approx(
                float(np.linalg.eigvalsh(S)[-1]), abs=1e-10
            )

    def test_never_exceeds_exhaustive(self):
        rng = np.random.default_rng(75)
        for _ in range(10):
            S = random_psd(rng, 7)
            path = greedy_full(S, 5)
            for j, pat in enumerate(path.patterns):
                best, _ = exhaustive_sparse_max(S, j + 1)
                assert path.variances[j] <= best + 1e-10

    def test_factor_input_matches_covariance_input(self):
        rng = np.random.default_rng(76)
        A = rng.standard_normal((9, 6))
        S = A.T @ A
        p1 = greedy_full(S, 4)
        p2 = greedy_full(None, 4, factor=A)
        assert p1.patterns == p2.patterns
        assert p1.variances == pytest.approx(p2.variances, rel=1e-9)

    def test_rejects_bad_target(self):
        with pytest.raises(BadCardinality):
            greedy_full(np.eye(3), 0)
        with pytest.raises(BadCardinality):
            greedy_full(np.eye(3), 5)


class TestGreedyApprox:
    def test_diagonal_path(self):
        path = greedy_approx(np.diag([3.0, 2.0, 1.0]), 3)
        assert path.patterns[0] == (0,)
        assert len(path.patterns) == 3
        assert path.variances[0] == pytest.approx(3.0, abs=1e-12)

    def test_full_width_matches_exact_scan(self):
        # re-ranking every candidate by its exact eigenvalue reproduces
        # the exact forward selection, tie-breaks included
        rng = np.random.default_rng(77)
        for _ in range(10):
            S = random_psd(rng, 8)
            full = greedy_full(S, 6)
            wide = greedy_approx(S, 6, candidate_width=8)
            assert wide.patterns == full.patterns
            assert wide.variances == pytest.approx(full.variances, rel=1e-9)

    def test_never_beats_full_scan_endpoint(self):
        rng = np.random.default_rng(78)
        for _ in range(10):
            S = random_psd(rng, 8)
            full = greedy_full(S, 5)
            approx = greedy_approx(S, 5)
            assert approx.variances[-1] <= full.variances[-1] + 1e-10

    def test_gains_are_squared_projections(self):
        rng = np.random.default_rng(79)
        S = random_psd(rng, 6)
        path = greedy_approx(S, 4)
        assert len(path.gains) == 3
        assert all(g >= -1e-15 for g in path.gains)

    def test_rejects_bad_width(self):
        with pytest.raises(BadCardinality):
            greedy_approx(np.eye(3), 2, candidate_width=0)


class TestPenalizedPath:
    def test_diagonal_moderate_penalty(self):
        comp, path = penalized_path(np.diag([3.0, 2.0, 1.0]), 2.5)
        assert comp.support == (0,)
        assert comp.penalized_objective == pytest.approx(0.5, abs=1e-12)
        # only the single survivor (diag > rho) stays in the path
        assert path.patterns == [(0,)]

    def test_dominating_penalty_gives_zero(self):
        comp, path = penalized_path(np.diag([3.0, 2.0, 1.0]), 3.0)
        assert comp.support == ()
        assert comp.penalized_objective == 0.0
        assert len(path) == 0

    def test_zero_penalty_runs_to_full_support(self):
        rng = np.random.default_rng(60)
        S = random_psd(rng, 6)
        comp, path = penalized_path(S, 0.0)
        assert len(path) == 6
        assert comp.variance == pytest.approx(
            float(np.linalg.eigvalsh(S)[-1]), abs=1e-10
        )

    def test_objective_is_best_along_path(self):
        rng = np.random.default_rng(61)
        for _ in range(15):
            S = random_psd(rng, 8)
            rho = float(rng.uniform(0.05, 1.2))
            comp, path = penalized_path(S, rho)
            values = [0.0] + [
                c.variance - rho * c.cardinality for c in path.components
            ]
            assert comp.penalized_objective == pytest.approx(
                max(values), abs=1e-10
            )
            assert comp.penalized_objective >= -1e-12

    def test_pruned_variables_never_appear(self):
        rng = np.random.default_rng(62)
        for _ in range(10):
            S = random_psd(rng, 8)
            rho = float(np.median(np.diag(S)))
            _, path = penalized_path(S, rho)
            dead = set(np.flatnonzero(np.diag(S) <= rho).tolist())
            for pat in path.patterns:
                assert not (set(pat) & dead)

    def test_approx_method_and_unknown_method(self):
        S = np.diag([3.0, 2.0, 1.0])
        comp, _ = penalized_path(S, 1.5, method="greedy_approx")
        assert comp.penalized_objective == pytest.approx(1.5, abs=1e-12)
        with pytest.raises(UnknownMethod):
            penalized_path(S, 1.5, method="magic")

    def test_rejects_negative_penalty(self):
        with pytest.raises(ValueError):
            penalized_path(np.eye(2), -0.1)


class TestZeroComponent:
    def test_shape_and_values(self):
        comp = zero_component(4)
        assert comp.support == ()
        assert comp.cardinality == 0
        assert np.array_equal(comp.z, np.zeros(4))
        assert comp.variance == 0.0
        assert comp.penalized_objective == 0.0
