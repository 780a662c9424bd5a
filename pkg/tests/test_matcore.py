import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.config import ToleranceConfig
from src.core.errors import InvalidMatrix, NotHermitian, NotPSD
from src.core.matcore import (
    as_matrix,
    excise,
    general_eig,
    hermitian_eig,
    match_multisets,
    numeric_rank,
    op_norm,
    pinv,
    psd_sqrt,
    range_basis,
    set_distance,
)


def _random_psd(seed: int, n: int, rank: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return G @ G.conj().T


class TestAsMatrix:

    def test_rejects_vector(self):
        with pytest.raises(InvalidMatrix):
            as_matrix(np.ones(3))

    def test_rejects_non_square(self):
        with pytest.raises(InvalidMatrix, match="square"):
            as_matrix(np.ones((2, 3)))

    def test_allows_rectangular_when_asked(self):
        assert as_matrix(np.ones((2, 3)), square=False).shape == (2, 3)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidMatrix, match="non-finite"):
            as_matrix(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_error_is_value_error(self):
        with pytest.raises(ValueError):
            as_matrix([[np.inf]])


class TestHermitianRoutines:

    def test_hermitian_eig_reconstructs(self):
        M = _random_psd(1, 4, 4)
        eig = hermitian_eig(M)
        assert eig.max_residual < 1e-10 * op_norm(M)
        assert np.all(np.diff(eig.values) >= 0)

    def test_hermitian_eig_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eig(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_psd_sqrt_squares_back(self):
        M = _random_psd(2, 5, 3)
        R = psd_sqrt(M)
        assert op_norm(R @ R - M) < 1e-9 * op_norm(M)
        assert op_norm(R - R.conj().T) == pytest.approx(0.0, abs=1e-12)

    def test_psd_sqrt_clamps_rounding_negatives(self):
        M = np.diag([1.0, -1e-14])
        assert np.allclose(psd_sqrt(M), np.diag([1.0, 0.0]))

    def test_psd_sqrt_rejects_negative(self):
        with pytest.raises(NotPSD):
            psd_sqrt(np.diag([1.0, -0.5]))


class TestRank:

    def test_range_basis(self):
        M = _random_psd(3, 6, 2)
        P, U, rank = range_basis(M)
        assert rank == 2
        assert U.shape == (6, 2)
        assert op_norm(P @ M - M) < 1e-9 * op_norm(M)

    def test_numeric_rank_of_zero(self):
        assert numeric_rank(np.zeros((3, 3))) == 0

    def test_pinv_rank_and_identities(self):
        M = _random_psd(4, 5, 3)
        Mp, rank = pinv(M)
        assert rank == 3
        assert op_norm(M @ Mp @ M - M) < 1e-8 * op_norm(M)

    def test_relative_cutoff(self):
        M = np.diag([1.0, 1e-12])
        assert numeric_rank(M) == 1
        assert numeric_rank(M, ToleranceConfig(rank_rel_tol=1e-14)) == 2

    def test_range_basis_is_orthogonal_projector(self):
        M = _random_psd(6, 5, 3)
        P, U, rank = range_basis(M)
        assert op_norm(P @ P - P) < 1e-12
        assert op_norm(P - P.conj().T) < 1e-12
        assert op_norm(U.conj().T @ U - np.eye(rank)) < 1e-12
        assert numeric_rank(P) == rank == 3

    def test_pinv_penrose_identities(self):
        rng = np.random.default_rng(8)
        M = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        Mp, rank = pinv(M)
        assert rank == 3
        assert Mp.shape == (3, 4)
        assert op_norm(M @ Mp @ M - M) < 1e-10 * op_norm(M)
        assert op_norm(Mp @ M @ Mp - Mp) < 1e-10 * op_norm(Mp)
        assert op_norm(M @ Mp - (M @ Mp).conj().T) < 1e-10
        assert op_norm(Mp @ M - (Mp @ M).conj().T) < 1e-10
        assert op_norm(pinv(Mp)[0] - M) < 1e-10 * op_norm(M)

    def test_pinv_of_deficient_psd(self):
        M = _random_psd(9, 5, 2)
        Mp, rank = pinv(M)
        assert rank == 2
        assert op_norm(Mp @ M @ Mp - Mp) < 1e-8 * op_norm(Mp)
        assert op_norm(Mp - Mp.conj().T) < 1e-8 * op_norm(Mp)


class TestGeneralEig:

    def test_values_of_triangular(self):
        M = np.array([[1.0, 5.0, 0.0], [0.0, 2.0, 3.0], [0.0, 0.0, -1.0]])
        values = general_eig(M).values
        assert match_multisets(values, [1, 2, -1], 1e-12).matched

    def test_vectors_are_certified(self):
        rng = np.random.default_rng(5)
        M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        eig = general_eig(M, want_vectors=True)
        assert not eig.clustered
        assert eig.max_residual < 1e-9 * op_norm(M)
        for i, value in enumerate(eig.values):
            y = eig.left_vectors[:, i]
            assert np.linalg.norm(y.conj() @ M - value * y.conj()) < 1e-9 * (1 + op_norm(M))

    def test_repeated_values_are_flagged_clustered(self):
        eig = general_eig(np.eye(3), want_vectors=True)
        assert eig.clustered
        assert eig.dimension == 3

    def test_nilpotent_block(self):
        values = general_eig(np.diag([1.0, 1.0], k=1)).values
        assert np.max(np.abs(values)) == pytest.approx(0.0, abs=1e-12)

    def test_companion_matrix_roots(self):
        # z^3 - 6z^2 + 11z - 6 = (z - 1)(z - 2)(z - 3)
        M = np.array([[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        assert match_multisets(general_eig(M).values, [1, 2, 3], 1e-9).matched
        assert match_multisets(general_eig(M, want_vectors=True).values, [1, 2, 3], 1e-9).matched

    def test_rotation_has_imaginary_pair(self):
        values = general_eig(np.array([[0.0, -1.0], [1.0, 0.0]])).values
        assert match_multisets(values, [1j, -1j], 1e-12).matched

    def test_agrees_with_hermitian_eig(self):
        rng = np.random.default_rng(10)
        G = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        H = G + G.conj().T
        expected = hermitian_eig(H).values
        assert match_multisets(general_eig(H).values, expected, 1e-9 * op_norm(H)).matched


class TestMultisets:

    def test_match_with_permutation(self):
        result = match_multisets([1, 2j, -1], [-1, 1, 2j], 1e-12)
        assert result.matched
        assert result.worst == 0.0

    def test_multiplicity_matters(self):
        result = match_multisets([1, 1, 2], [1, 2, 2], 1e-6)
        assert not result.matched
        assert result.worst == pytest.approx(1.0)

    def test_size_mismatch(self):
        result = match_multisets([1, 2], [1], 1.0)
        assert not result.matched
        assert result.unmatched_a == 1

    def test_empty_sets_match(self):
        assert match_multisets([], [], 1e-9).matched

    def test_excise(self):
        kept = excise([0, 1e-12, 1, 2], [0], 1e-9)
        assert np.allclose(kept, [1, 2])

    def test_excise_without_exclusions(self):
        assert excise([3, 4], [], 1.0).size == 2

    def test_set_distance(self):
        assert set_distance([1, 3], [0, 2]) == pytest.approx(1.0)
        assert set_distance([], [1]) == 0.0
        assert set_distance([1], []) == float("inf")


@pytest.mark.property
class TestLinearAlgebraProperties:

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.data())
    def test_psd_sqrt_is_a_square_root(self, seed, n, data):
        rank = data.draw(st.integers(1, n))
        M = _random_psd(seed, n, rank)
        R = psd_sqrt(M)
        assert op_norm(R @ R - M) <= 1e-8 * (1 + op_norm(M))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.data())
    def test_pinv_rank_matches_construction(self, seed, n, data):
        rank = data.draw(st.integers(1, n))
        M = _random_psd(seed, n, rank)
        assert pinv(M)[1] == rank

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.data())
    def test_pinv_satisfies_penrose_identities(self, seed, n, data):
        rank = data.draw(st.integers(1, n))
        M = _random_psd(seed, n, rank)
        Mp, _ = pinv(M)
        norm, inverse_norm = op_norm(M), op_norm(Mp)
        bound = 1e-9 * norm * inverse_norm
        assert op_norm(M @ Mp @ M - M) <= bound * norm
        assert op_norm(Mp @ M @ Mp - Mp) <= bound * inverse_norm
        assert op_norm(M @ Mp - (M @ Mp).conj().T) <= bound
        assert op_norm(Mp @ M - (Mp @ M).conj().T) <= bound

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.data())
    def test_range_basis_projector_has_construction_rank(self, seed, n, data):
        rank = data.draw(st.integers(1, n))
        P, _, computed = range_basis(_random_psd(seed, n, rank))
        assert computed == rank
        assert op_norm(P @ P - P) <= 1e-10
        assert op_norm(P - P.conj().T) <= 1e-10
        assert np.trace(P).real == pytest.approx(rank, abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 7))
    def test_general_eig_matches_hermitian_eig(self, seed, n):
        rng = np.random.default_rng(seed)
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = G + G.conj().T
        expected = hermitian_eig(H).values
        assert match_multisets(general_eig(H).values, expected, 1e-9 * (1 + op_norm(H))).matched

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), max_size=8), st.randoms())
    def test_matching_is_permutation_invariant(self, points, rnd):
        shuffled = list(points)
        rnd.shuffle(shuffled)
        assert match_multisets(points, shuffled, 0.0).matched

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(2, 7))
    def test_unitary_similarity_preserves_eigenvalues(self, seed, n):
        rng = np.random.default_rng(seed)
        values = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        computed = general_eig((Q * values) @ Q.conj().T).values
        assert match_multisets(computed, values, 1e-9 * (1 + np.max(np.abs(values)))).matched
