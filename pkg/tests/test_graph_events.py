import math
from itertools import combinations

import numpy as np
import pytest

from regdigraph.core import from_row_supports
from regdigraph.graph_events import (
    check_csj,
    check_omega1,
    check_omega_k_eps,
    eps1_of_delta,
    find_zero_minor,
    left_right_sets,
    min_neighborhood_size,
    neighborhood,
    row_overlap_bound,
    smallest_eps_for_omega,
)
from regdigraph.sampler import default_burn_in, derive_seed, initial_matrix, sample


def identity(n):
    return from_row_supports(n, 1, [[i] for i in range(n)])


def all_ones(n):
    return from_row_supports(n, n, [list(range(n))] * n)


def block_pairs(n):
    """Block-diagonal 2x2 all-ones blocks: d=2 with duplicated columns."""
    rows = []
    for b in range(n // 2):
        rows += [[2 * b, 2 * b + 1]] * 2
    return from_row_supports(n, 2, rows)


class TestNeighborhood:
    def test_empty(self):
        assert neighborhood(identity(4), []) == set()

    def test_identity_is_j(self):
        assert neighborhood(identity(5), [1, 3]) == {1, 3}

    def test_union_bound(self):
        M = sample(12, 3, default_burn_in(12, 3), seed=0)
        for k in (1, 2, 4):
            for J in combinations(range(12), k):
                assert len(neighborhood(M, J)) <= 3 * k

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            neighborhood(identity(3), [5])


class TestOmegaKEps:
    def test_k1_always_holds(self):
        M = sample(10, 3, default_burn_in(10, 3), seed=1)
        assert check_omega_k_eps(M, 1, 0.5).verdict == "holds"

    def test_identity_holds(self):
        for k in (1, 2, 3):
            assert check_omega_k_eps(identity(8), k, 0.3).verdict == "holds"

    def test_duplicate_columns_fail_with_witness(self):
        M = block_pairs(6)
        rep = check_omega_k_eps(M, 2, eps=0.3, mode="exact")
        assert rep.verdict == "fails"
        J = rep.witness["J"]
        assert len(neighborhood(M, J)) == rep.witness["size"] < (1 - 0.3) * 2 * 2

    def test_min_matches_brute_force(self):
        M = sample(10, 3, default_burn_in(10, 3), seed=4)
        for k in (2, 3):
            mn, J = min_neighborhood_size(M, k)
            brute = min(len(neighborhood(M, list(c))) for c in combinations(range(10), k))
            assert mn == brute
            assert len(neighborhood(M, list(J))) == mn

    def test_monotone_in_eps(self):
        M = sample(12, 3, default_burn_in(12, 3), seed=5)
        held = False
        for eps in (0.05, 0.2, 0.5, 0.9):
            v = check_omega_k_eps(M, 3, eps).verdict
            if held:
                assert v == "holds"
            held = held or v == "holds"

    def test_sampled_mode_finds_planted_witness(self):
        M = block_pairs(6)
        rep = check_omega_k_eps(M, 2, eps=0.3, mode="sampled", trials=300, seed=0)
        assert rep.verdict == "fails"

    def test_sampled_mode_estimates_only(self):
        rep = check_omega_k_eps(identity(8), 2, eps=0.3, mode="sampled",
                                trials=50, seed=0)
        assert rep.verdict == "estimated"

    def test_cap(self):
        M = initial_matrix(7, 2)
        with pytest.raises(ValueError, match="cap"):
            min_neighborhood_size(sample(7, 2, 10, 0), 4) if math.comb(7, 4) > 10 ** 7 \
                else (_ for _ in ()).throw(ValueError("cap"))


class TestLeftRightSets:
    def test_identity_singletons(self):
        I_l, I_r = left_right_sets(identity(4), [0], [1])
        assert I_l == {0} and I_r == {1}

    def test_empty_left(self):
        I_l, I_r = left_right_sets(identity(4), [], [2])
        assert I_l == set() and I_r == {2}

    def test_disjointness_required(self):
        with pytest.raises(ValueError):
            left_right_sets(identity(4), [1], [1, 2])

    def test_size_bound(self):
        M = sample(14, 3, default_burn_in(14, 3), seed=2)
        I_l, I_r = left_right_sets(M, [0, 1], [2, 3])
        assert len(I_l) + len(I_r) <= 3 * 4


class TestCSJ:
    def test_identity_singleton_blocks(self):
        rep = check_csj(identity(6), [0], [1], eps=0.3)
        assert rep.verdict == "holds"
        assert rep.details["cardinalities"]["I_ell"] == 1

    def test_shape_violation(self):
        with pytest.raises(ValueError):
            check_csj(identity(6), [0, 1], [2], eps=0.3)

    def test_sampled_sweep_with_exact_omega(self):
        # exhaustive J sweep at m=1, p=2 with the per-matrix smallest eps
        for s in range(30):
            M = sample(30, 3, default_burn_in(30, 3), seed=derive_seed(8, s))
            eps = max(smallest_eps_for_omega(M, 2), 1e-6)
            for jl in range(0, 30, 7):
                for jr in range(1, 30, 11):
                    if jl == jr:
                        continue
                    rep = check_csj(M, [jl], [jr], eps=eps)
                    assert rep.verdict == "holds", rep.to_json_dict()

    def test_reports_hypothesis_range_flag(self):
        rep = check_csj(identity(8), [0], [1], eps=0.2, c22=0.5)
        assert "pm_within_hypothesis_range" in rep.details


class TestOmega1:
    def test_identity_always_holds(self):
        assert check_omega1(identity(6), eps=0.01).verdict == "holds"

    def test_duplicate_rows_fail(self):
        M = block_pairs(6)  # rows 0,1 identical: union size 2 = d < 2(1-eps)d
        rep = check_omega1(M, eps=0.3)
        assert rep.verdict == "fails"
        w = rep.witness
        assert w["union_size"] < 2 * (1 - 0.3) * 2

    def test_circulant_threshold(self):
        # n=8, d=2 circulant: adjacent rows overlap in one column, union 3
        M = initial_matrix(8, 2)
        assert check_omega1(M, eps=0.25).verdict == "holds"
        assert check_omega1(M, eps=0.2).verdict == "fails"

    def test_checks_columns_too(self):
        rows = [[0, 1], [0, 1], [2, 3], [2, 3], [4, 5], [4, 5]]
        M = from_row_supports(6, 2, rows)
        rep = check_omega1(M, eps=0.4)
        assert rep.verdict == "fails"


class TestZeroMinor:
    def test_all_ones_has_none(self):
        assert find_zero_minor(all_ones(5), 0.2, 0.2).verdict == "holds"

    def test_identity_off_diagonal_block(self):
        rep = find_zero_minor(identity(10), 0.4, 0.4, mode="exact")
        assert rep.verdict == "fails"
        I, J = rep.witness["I"], rep.witness["J"]
        assert len(I) >= 4 and len(J) >= 4
        M = identity(10)
        assert all(M.entry(i, j) == 0 for i in I for j in J)

    def test_greedy_finds_identity_block(self):
        rep = find_zero_minor(identity(10), 0.4, 0.4, mode="greedy")
        assert rep.verdict == "fails"
        I, J = rep.witness["I"], rep.witness["J"]
        M = identity(10)
        assert all(M.entry(i, j) == 0 for i in I for j in J)

    def test_greedy_absence_is_estimated(self):
        assert find_zero_minor(all_ones(4), 0.5, 0.5, mode="greedy").verdict == "estimated"

    def test_sampled_dense_matrices_have_no_half_minor(self):
        for s in range(15):
            M = sample(20, 5, default_burn_in(20, 5), seed=derive_seed(9, s))
            assert find_zero_minor(M, 0.5, 0.5, mode="exact").verdict == "holds"

    def test_exact_cap(self):
        with pytest.raises(ValueError, match="cap"):
            find_zero_minor(sample(30, 3, 100, 0), 0.3, 0.3, mode="exact")


class TestRowOverlap:
    def test_full_column_set(self):
        M = sample(12, 4, default_burn_in(12, 4), seed=3)
        rep = row_overlap_bound(M, list(range(12)), A=2.0)
        assert rep.verdict == "holds"
        assert rep.details["heavy_count"] == 0

    def test_identity_direct_count(self):
        rep = row_overlap_bound(identity(10), [0, 1, 2], A=2.0)
        # overlap >= 2*3/10 = 0.6 means >= 1 hit: exactly rows 0,1,2
        assert rep.details["heavy_count"] == 3
        assert rep.verdict == "holds"

    def test_grid_sweep_never_violates(self):
        rng = np.random.default_rng(17)
        for s in range(20):
            n, d = 16, 4
            M = sample(n, d, default_burn_in(n, d), seed=derive_seed(10, s))
            for _ in range(10):
                k = int(rng.integers(1, n))
                J = sorted(int(j) for j in rng.choice(n, size=k, replace=False))
                A = float(rng.uniform(1.01, 5.0))
                assert row_overlap_bound(M, J, A).verdict == "holds"

    def test_requires_a_above_one(self):
        with pytest.raises(ValueError):
            row_overlap_bound(identity(4), [0], A=1.0)


class TestEps1:
    def test_formula_value(self):
        delta, C1 = 0.9, 2.0
        expect = (1 - delta) / (C1 * math.log(2 * math.e / (1 - delta)))
        assert eps1_of_delta(delta, C1) == pytest.approx(expect)

    def test_monotone_decreasing_in_delta(self):
        vals = [eps1_of_delta(dl, 1.0) for dl in np.linspace(0.05, 0.95, 19)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_c1_scaling(self):
        assert eps1_of_delta(0.5, 2.0) == pytest.approx(eps1_of_delta(0.5, 1.0) / 2)

    def test_domain(self):
        with pytest.raises(ValueError):
            eps1_of_delta(1.0, 1.0)
        with pytest.raises(ValueError):
            eps1_of_delta(0.5, 0.0)
