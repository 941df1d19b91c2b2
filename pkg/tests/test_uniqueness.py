"""The tracial-functional constraint system and its unique solution."""

import numpy as np
import pytest

from tracekit.linalg import matrix_unit, normalized_trace
from tracekit.sphere import StreamSpec, gaussian_matrix, spawn_stream
from tracekit.uniqueness import (
    FunctionalSolution,
    build_constraint_system,
    evaluate_functional,
    homogeneous_nullspace_dim,
    solve_unique_functional,
    verify_tracial_on_random_pairs,
)


def row_index(i, j, k, l, n):
    return ((i * n + j) * n + k) * n + l


class TestConstraintSystem:
    def test_shapes(self):
        system = build_constraint_system(2)
        assert system.lhs.shape == (17, 4)
        assert system.rhs.shape == (17,)
        assert system.dim == 2

    def test_n1_single_unknown(self):
        system = build_constraint_system(1)
        # one homogeneous row (trivially zero) plus v[0][0] = 1
        assert np.array_equal(system.lhs, [[0.0], [1.0]])
        assert system.rhs[-1] == 1.0 + 0j

    def test_diagonal_equality_row(self):
        # tuple (0,1,1,0): e_01 e_10 = e_00 and e_10 e_01 = e_11,
        # so the row says v[0][0] - v[1][1] = 0
        system = build_constraint_system(2)
        row = system.lhs[row_index(0, 1, 1, 0, 2)]
        assert np.array_equal(row, [1.0, 0.0, 0.0, -1.0])

    def test_offdiagonal_zero_row(self):
        # tuple (0,0,0,1): e_00 e_01 = e_01 but e_01 e_00 = 0,
        # so the row forces v[0][1] = 0
        system = build_constraint_system(2)
        row = system.lhs[row_index(0, 0, 0, 1, 2)]
        assert np.array_equal(row, [0.0, 1.0, 0.0, 0.0])

    def test_rows_vanish_on_normalized_trace(self):
        # I/n satisfies every homogeneous constraint exactly
        for n in (2, 3, 4):
            system = build_constraint_system(n)
            vec = (np.eye(n) / n).reshape(-1)
            assert np.max(np.abs(system.lhs[:-1] @ vec)) == 0.0

    def test_normalization_row(self):
        system = build_constraint_system(3, normalization=2.0 - 1j)
        assert np.array_equal(
            system.lhs[-1], [1.0, 0, 0, 0, 1.0, 0, 0, 0, 1.0]
        )
        assert system.rhs[-1] == 2.0 - 1j

    def test_dimension_range(self):
        with pytest.raises(ValueError, match=r"\[1, 8\]"):
            build_constraint_system(0)
        with pytest.raises(ValueError, match=r"\[1, 8\]"):
            build_constraint_system(9)


class TestNullspace:
    def test_matches_svd_rank_oracle(self):
        for n in range(1, 7):
            system = build_constraint_system(n)
            expected = n * n - np.linalg.matrix_rank(system.lhs[:-1])
            assert homogeneous_nullspace_dim(system) == expected

    def test_always_one(self):
        for n in range(1, 7):
            assert homogeneous_nullspace_dim(build_constraint_system(n)) == 1


class TestSolve:
    def test_n1(self):
        solution = solve_unique_functional(1)
        np.testing.assert_allclose(solution.values, [[1.0]], atol=1e-12)

    def test_returns_normalized_identity(self):
        for n in range(2, 7):
            solution = solve_unique_functional(n)
            assert solution.nullspace_dim == 1
            assert solution.residual <= 1e-12
            gap = np.max(np.abs(solution.values - np.eye(n) / n))
            assert gap <= 1e-12
            # normalization satisfied
            assert abs(np.trace(solution.values) - 1.0) <= 1e-12

    def test_scale_covariance(self):
        # replacing f(I)=1 by f(I)=c scales the solution linearly
        c = 2.0 - 3.0j
        solution = solve_unique_functional(3, normalization=c)
        gap = np.max(np.abs(solution.values - c * np.eye(3) / 3))
        assert gap <= 1e-12 * abs(c)


class TestEvaluate:
    def test_matches_normalized_trace(self):
        rng = np.random.default_rng(400)
        solution = solve_unique_functional(4)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert evaluate_functional(solution, a) == pytest.approx(
            normalized_trace(a), abs=1e-12 * np.linalg.norm(a)
        )

    def test_matrix_unit_pair_both_orders(self):
        # f(e_01 e_10) = f(e_00) = 1/2 = f(e_11) = f(e_10 e_01)
        solution = solve_unique_functional(2)
        a = matrix_unit(0, 1, 2)
        b = matrix_unit(1, 0, 2)
        assert evaluate_functional(solution, a @ b) == pytest.approx(0.5, abs=1e-12)
        assert evaluate_functional(solution, b @ a) == pytest.approx(0.5, abs=1e-12)

    def test_shape_mismatch(self):
        solution = solve_unique_functional(2)
        with pytest.raises(ValueError, match="shape"):
            evaluate_functional(solution, np.eye(3))


class TestVerifyTracial:
    def test_equal_pair_gap_zero(self):
        solution = solve_unique_functional(3)
        a = np.arange(9, dtype=complex).reshape(3, 3)
        gap = abs(
            evaluate_functional(solution, a @ a) - evaluate_functional(solution, a @ a)
        )
        assert gap == 0.0

    def test_random_pairs_small_gap(self):
        solution = solve_unique_functional(4)
        spec = StreamSpec(60, 0)
        worst = verify_tracial_on_random_pairs(solution, 50, spec)
        # replay the same stream to recover the norm scale of the pairs
        stream = spawn_stream(spec)
        scale = 0.0
        for _ in range(50):
            a = gaussian_matrix(stream, 4)
            b = gaussian_matrix(stream, 4)
            scale = max(scale, np.linalg.norm(a) * np.linalg.norm(b))
        assert worst <= 1e-10 * scale

    def test_corrupted_solution_is_caught(self):
        solution = solve_unique_functional(2)
        corrupted = solution.values.copy()
        corrupted[0, 1] = 0.1
        bad = FunctionalSolution(
            dim=2, values=corrupted, residual=0.0, nullspace_dim=1
        )
        # adversarial pair: A = e_01, B = e_11 gives AB = e_01, BA = 0,
        # so the gap is exactly the corrupted entry
        a = matrix_unit(0, 1, 2)
        b = matrix_unit(1, 1, 2)
        gap = abs(
            evaluate_functional(bad, a @ b) - evaluate_functional(bad, b @ a)
        )
        assert gap > 0.01

    def test_trials_validation(self):
        solution = solve_unique_functional(2)
        with pytest.raises(ValueError, match="trials"):
            verify_tracial_on_random_pairs(solution, 0, StreamSpec(0, 0))
