import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regdigraph.core import (
    RegularityError,
    apply_adjoint_shifted,
    apply_shifted,
    enumerate_all,
    from_json,
    from_row_supports,
    to_json,
)


def identity(n):
    return from_row_supports(n, 1, [[i] for i in range(n)])


def all_ones(n):
    return from_row_supports(n, n, [list(range(n))] * n)


class TestFromRowSupports:
    def test_identity_accepted(self):
        M = from_row_supports(2, 1, [[0], [1]])
        assert M.rows == ((0,), (1,))
        assert M.cols == ((0,), (1,))

    def test_all_ones_accepted(self):
        M = from_row_supports(2, 2, [[0, 1], [0, 1]])
        assert M.rows == ((0, 1), (0, 1))

    def test_column_sum_violation_names_column(self):
        with pytest.raises(RegularityError, match="column 0 has sum 2"):
            from_row_supports(3, 1, [[0], [0], [1]])

    def test_row_sum_violation_names_row(self):
        with pytest.raises(RegularityError, match="row 1 has sum 1"):
            from_row_supports(3, 2, [[0, 1], [2], [0, 1]])

    def test_out_of_range_index(self):
        with pytest.raises(RegularityError, match="row 0"):
            from_row_supports(2, 1, [[5], [1]])

    def test_roundtrip_row_supports(self):
        M = from_row_supports(4, 2, [[0, 1], [1, 2], [2, 3], [0, 3]])
        again = from_row_supports(M.n, M.d, [list(r) for r in M.rows])
        assert again == M

    def test_json_roundtrip_revalidates(self):
        M = from_row_supports(4, 2, [[0, 1], [1, 2], [2, 3], [0, 3]])
        assert from_json(to_json(M)) == M
        bad = json.loads(to_json(M))
        bad["rows"][0] = [0, 2]
        with pytest.raises(RegularityError):
            from_json(json.dumps(bad))

    def test_transpose(self):
        M = from_row_supports(4, 2, [[0, 1], [1, 2], [2, 3], [0, 3]])
        T = M.transpose()
        assert T.to_dense().tolist() == M.to_dense().T.tolist()


class TestApplyShifted:
    def test_identity_no_shift(self):
        y = apply_shifted(identity(2), 0.0, [1.0, 2.0])
        assert np.allclose(y, [1.0, 2.0])

    def test_all_ones_kills_zero_sum(self):
        y = apply_shifted(all_ones(2), 0.0, [1.0, -1.0])
        assert np.allclose(y, [0.0, 0.0])

    def test_identity_shift_one_annihilates(self):
        y = apply_shifted(identity(3), 1.0, [2.0, 3.0 + 1j, -1.0])
        assert np.allclose(y, 0.0)

    def test_row_sums_on_all_ones_vector(self):
        for M in enumerate_all(4, 2):
            y = apply_shifted(M, 0.0, np.ones(4))
            assert np.allclose(y, 2.0 * np.ones(4))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_shifted(identity(3), 0.0, [1.0, 2.0])


class TestAdjoint:
    def test_identity_conjugates(self):
        y = apply_adjoint_shifted(identity(2), 0.0, np.array([1j, 1.0]))
        assert np.allclose(y, [-1j, 1.0])

    def test_all_ones_kills_zero_sum(self):
        y = apply_adjoint_shifted(all_ones(2), 0.0, np.array([1.0, -1.0]))
        assert np.allclose(y, 0.0)

    def test_matches_dense_adjoint(self):
        rng = np.random.default_rng(0)
        z = 0.4 - 0.7j
        for M in enumerate_all(4, 2)[:10]:
            A = M.to_dense(np.complex128) - z * np.eye(4)
            x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            assert np.allclose(apply_adjoint_shifted(M, z, x), np.conj(x) @ A)

    def test_adjoint_on_basis_vectors(self):
        # <(M - zId) e_j, e_i> must agree with the adjoint action on e_i
        z = 0.3 + 0.1j
        M = enumerate_all(4, 2)[7]
        for i in range(4):
            ei = np.zeros(4)
            ei[i] = 1.0
            adj = apply_adjoint_shifted(M, z, ei)
            for j in range(4):
                ej = np.zeros(4)
                ej[j] = 1.0
                assert apply_shifted(M, z, ej)[i] == pytest.approx(adj[j])


class TestEnumeration:
    def test_permutations_count(self):
        mats = enumerate_all(3, 1)
        assert len(mats) == 6
        assert all(len(r) == 1 for M in mats for r in M.rows)

    def test_single_element(self):
        assert len(enumerate_all(2, 2)) == 1

    def test_n_factorial_for_d1(self):
        for n in range(1, 6):
            assert len(enumerate_all(n, 1)) == math.factorial(n)

    def test_cap(self):
        with pytest.raises(ValueError):
            enumerate_all(8, 2)

    def test_sorted_canonical_order(self):
        mats = enumerate_all(4, 2)
        keys = [M.canonical_key() for M in mats]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_dual_oracle_agreement(self, n):
        for d in range(1, n + 1):
            back = enumerate_all(n, d, "backtracking")
            match = enumerate_all(n, d, "matchings")
            assert [M.rows for M in back] == [M.rows for M in match]

    def test_m42_count_is_90(self):
        # cross-checked by the two independent enumerators above
        assert len(enumerate_all(4, 2)) == 90


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 89), st.complex_numbers(max_magnitude=3, allow_nan=False,
                                              allow_infinity=False))
def test_shift_matches_dense(idx, z):
    M = enumerate_all(4, 2)[idx]
    x = np.array([1.0, -2.0, 0.5j, 1 + 1j])
    A = M.to_dense(np.complex128) - z * np.eye(4)
    assert np.allclose(apply_shifted(M, z, x), A @ x)
