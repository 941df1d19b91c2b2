"""Uniqueness of the normalized tracial functional, as a solvable system.

A linear functional f on n x n matrices is determined by its values
v[i][j] = f(e_ij) on the matrix units.  Tracial means f(AB) = f(BA) for
all A, B; on the units, with e_ij e_kl = (j == k) e_il, this reads

    (j == k) * v[i][l] == (l == i) * v[k][j]   for all i, j, k, l,

one homogeneous equation per index tuple (n^4 of them), and forcing the
off-diagonal values to zero and the diagonal values equal.  The
homogeneous solution space is one-dimensional, so adding the single
normalization sum_i v[i][i] = c pins down v == (c / n) I exactly: the
normalized trace is the only normalized tracial functional.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .sphere import StreamSpec, gaussian_matrix, spawn_stream

__all__ = [
    "ConstraintSystem",
    "FunctionalSolution",
    "build_constraint_system",
    "evaluate_functional",
    "homogeneous_nullspace_dim",
    "solve_unique_functional",
    "verify_tracial_on_random_pairs",
]

_MAX_DIM = 8  # n^4 + 1 rows; above this the system stops being "small"


@dataclass(frozen=True)
class ConstraintSystem:
    """Linear system lhs @ vec(v) = rhs over the n^2 unknowns v[i][j].

    Row r < n^4 encodes the tuple (i, j, k, l) with r = ((i*n + j)*n + k)*n + l;
    the last row is the normalization.  Unknown v[i][j] sits at column i*n + j.
    """

    dim: int
    lhs: np.ndarray  # (n^4 + 1, n^2) float64
    rhs: np.ndarray  # (n^4 + 1,) complex128


def build_constraint_system(n: int, normalization: complex = 1.0 + 0j) -> ConstraintSystem:
    """Assemble the tracial constraints plus sum_i v[i][i] = normalization."""
    if not 1 <= n <= _MAX_DIM:
        raise ValueError(f"dimension must be in [1, {_MAX_DIM}], got {n}")
    rows = n**4 + 1
    lhs = np.zeros((rows, n * n), dtype=np.float64)
    rhs = np.zeros(rows, dtype=np.complex128)
    r = 0
    for i, j, k, l in itertools.product(range(n), repeat=4):
        if j == k:
            lhs[r, i * n + l] += 1.0
        if l == i:
            lhs[r, k * n + j] -= 1.0
        r += 1
    for d in range(n):
        lhs[r, d * n + d] = 1.0
    rhs[r] = complex(normalization)
    return ConstraintSystem(dim=n, lhs=lhs, rhs=rhs)


def _echelon_rank(m: np.ndarray, rel_tol: float = 1e-10) -> int:
    """Rank by row elimination with partial pivoting.

    A pivot counts only if it exceeds rel_tol times the largest pivot
    accepted so far, which for these integer-coefficient systems leaves
    no ambiguity.
    """
    a = np.array(m, dtype=np.float64, copy=True)
    rows, cols = a.shape
    r = 0
    largest = 0.0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        piv = abs(a[p, c])
        if piv == 0.0 or piv <= rel_tol * largest:
            continue
        largest = max(largest, piv)
        if p != r:
            a[[r, p], :] = a[[p, r], :]
        a[r + 1 :, :] -= np.outer(a[r + 1 :, c] / a[r, c], a[r, :])
        r += 1
    return r


def homogeneous_nullspace_dim(system: ConstraintSystem) -> int:
    """Dimension of the solution space of the constraints without normalization."""
    rank = _echelon_rank(system.lhs[:-1])
    return system.dim * system.dim - rank


@dataclass(frozen=True)
class FunctionalSolution:
    """Solved functional values v[i][j] = f(e_ij) with certificates."""

    dim: int
    values: np.ndarray  # (n, n) complex128
    residual: float  # max |lhs @ vec(v) - rhs|
    nullspace_dim: int  # of the homogeneous system; 1 certifies uniqueness


def solve_unique_functional(n: int, normalization: complex = 1.0 + 0j) -> FunctionalSolution:
    """Solve the constraint system and certify the solution is unique.

    Returns the matrix of values, which equals (normalization / n) * I,
    the max-abs residual of the full system, and the homogeneous
    nullspace dimension.  Raises ArithmeticError if that dimension is
    not 1, since then the normalization would not determine f.
    """
    system = build_constraint_system(n, normalization)
    null_dim = homogeneous_nullspace_dim(system)
    if null_dim != 1:
        raise ArithmeticError(
            f"homogeneous tracial system has nullspace dimension {null_dim}, "
            f"expected 1"
        )
    lhs = system.lhs.astype(np.complex128)
    vec, *_ = np.linalg.lstsq(lhs, system.rhs, rcond=None)
    residual = float(np.max(np.abs(system.lhs @ vec - system.rhs)))
    return FunctionalSolution(
        dim=n,
        values=vec.reshape(n, n),
        residual=residual,
        nullspace_dim=null_dim,
    )


def evaluate_functional(solution: FunctionalSolution, a) -> complex:
    """f(A) = sum_ij v[i][j] A[i][j], by linearity over the matrix units."""
    m = np.asarray(a, dtype=np.complex128)
    if m.shape != (solution.dim, solution.dim):
        raise ValueError(f"matrix shape {m.shape} does not match dim {solution.dim}")
    return complex(np.sum(solution.values * m))


def verify_tracial_on_random_pairs(
    solution: FunctionalSolution, trials: int, spec: StreamSpec
) -> float:
    """Max |f(AB) - f(BA)| over random Gaussian pairs; small means tracial."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    stream = spawn_stream(spec)
    n = solution.dim
    worst = 0.0
    for _ in range(trials):
        a = gaussian_matrix(stream, n)
        b = gaussian_matrix(stream, n)
        gap = abs(
            evaluate_functional(solution, a @ b)
            - evaluate_functional(solution, b @ a)
        )
        worst = max(worst, gap)
    return worst
