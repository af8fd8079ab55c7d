import itertools
import pytest
import numpy as np
from fractions import Fraction
from math import gcd
from sympy import Matrix
from flatkahler.linalg import (
    IntMatrix,
    RatVector,
    AbelianStructure,
    DimensionMismatch,
    smith_decomposition,
    row_echelon,
    rank,
    kernel_basis,
    cokernel_structure,
    solve_linear,
)


def _is_diagonal_chain(D: IntMatrix, diagonal) -> bool:
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j and D[i, j]:
                return False
    return all(b % a == 0 for a, b in zip(diagonal, diagonal[1:]))


def _determinantal_invariants(M: IntMatrix):
    """Invariant factors as quotients of gcds of k x k minors."""
    S = Matrix(M.tolist())
    previous, factors = 1, []
    for k in range(1, min(M.shape) + 1):
        g = 0
        for rows in itertools.combinations(range(M.rows), k):
            for cols in itertools.combinations(range(M.cols), k):
                g = gcd(g, int(S.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        factors.append(g // previous)
        previous = g
    return factors


def test_smith_known():
    M = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    snf = smith_decomposition(M, inverses=True)
    assert snf.diagonal == (2, 6, 12)
    assert snf.U @ M @ snf.V == snf.D
    assert abs(snf.U.det()) == 1
    assert abs(snf.V.det()) == 1
    assert snf.U @ snf.U_inv == IntMatrix.identity(3)
    assert snf.V_inv @ snf.V == IntMatrix.identity(3)


def test_smith_random_against_minors():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        r, c = rng.integers(1, 6, size=2)
        M = IntMatrix(rng.integers(-9, 10, size=(r, c)).tolist())
        snf = smith_decomposition(M)
        assert snf.U @ M @ snf.V == snf.D
        assert _is_diagonal_chain(snf.D, snf.diagonal)
        assert all(d > 0 for d in snf.diagonal)

        assert list(snf.diagonal) == _determinantal_invariants(M)


def test_smith_is_deterministic():
    M = IntMatrix([[3, 1, 4], [1, 5, 9], [2, 6, 5]])
    a = smith_decomposition(M)
    b = smith_decomposition(IntMatrix(M.tolist()))
    assert a.U == b.U
    assert a.V == b.V


def test_smith_empty_and_zero():
    snf = smith_decomposition(IntMatrix.zeros(2, 3))
    assert snf.rank == 0
    assert snf.D.is_zero()

    snf = smith_decomposition(IntMatrix([], cols=3))
    assert snf.rank == 0
    assert snf.V == IntMatrix.identity(3)


def test_row_echelon_keeps_kernel():
    M = IntMatrix([[2, 4, 6], [1, 2, 3], [0, 3, 6], [4, 11, 18]])
    E = row_echelon(M)
    assert E.rows <= 3
    assert rank(M) == 2
    K = kernel_basis(M)
    assert K.cols == 1
    assert (M @ K).is_zero()
    assert (E @ K).is_zero()


def test_cokernel():
    assert str(cokernel_structure(IntMatrix([[2, 0], [0, 3]]))) == "Z6"
    assert str(cokernel_structure(IntMatrix([[2], [0]]))) == "Z2 x Z"
    assert cokernel_structure(IntMatrix.identity(3)).is_trivial


def test_abelian_structure():
    A = AbelianStructure.from_cyclic([2, 4, 3, 1])
    assert A.invariant_factors == (2, 12)
    assert A.order == 24
    assert A.exponent == 12
    assert str(A) == "Z2 x Z12"

    B = AbelianStructure.from_cyclic([3, 3, 0])
    assert str(B) == "Z3^2 x Z"
    assert B.order is None
    assert str(A.direct_sum(B)) == "Z3 x Z6 x Z12 x Z"

    with pytest.raises(ValueError):
        AbelianStructure((4, 6))


def test_direct_sum_invariants():
    S = AbelianStructure.from_cyclic([2, 4]).direct_sum(
        AbelianStructure.from_cyclic([3])
    )
    assert S.invariant_factors == (2, 12)


def test_matrix_arithmetic():
    xi = IntMatrix([[0, -1], [1, -1]])
    assert xi.order() == 3
    assert (-xi).order() == 6
    assert xi.power(3).is_identity()
    assert xi.power(-1) == xi.power(2)
    assert xi.inverse() @ xi == IntMatrix.identity(2)
    assert xi.apply([Fraction(1, 3), Fraction(2, 3)]) == (
        Fraction(-2, 3),
        Fraction(-1, 3),
    )

    with pytest.raises(DimensionMismatch):
        xi @ IntMatrix.identity(3)
    with pytest.raises(ValueError):
        IntMatrix([[2, 0], [0, 1]]).inverse()
    with pytest.raises(TypeError):
        IntMatrix([[0.5]])


def test_block_diagonal():
    a = IntMatrix([[1, 2], [3, 4]])
    b = IntMatrix([[5]])
    M = IntMatrix.block_diagonal([a, b])
    assert M.tolist() == [[1, 2, 0], [3, 4, 0], [0, 0, 5]]
    assert M.submatrix([0, 1], [0, 1]) == a


def test_ratvector():
    v = RatVector([Fraction(1, 2), Fraction(5, 3), 1])
    assert v.denominator == 6
    assert v.mod_lattice() == RatVector([Fraction(1, 2), Fraction(2, 3), 0])
    assert not v.is_integral()


def test_solve_integer():
    A = IntMatrix([[2, 0], [0, 3]])
    solution = solve_linear(A, [4, 9])
    assert solution.particular == (2, 3)
    assert solve_linear(A, [1, 0]) is None
    assert solve_linear(A, [Fraction(2), Fraction(1, 2)]) is None


def test_solve_modular():
    # x with (xi - 1) x = 0 mod 3 is the 3-torsion fixed by xi
    A = IntMatrix([[0, -1], [1, -1]]) - IntMatrix.identity(2)
    solution = solve_linear(A, [0, 0], modulus=3)
    assert len(solution) == 3
    assert solution.points() == [(0, 0), (1, 2), (2, 1)]

    assert solve_linear(IntMatrix([[2]]), [1], modulus=4) is None
    assert len(solve_linear(IntMatrix([[2]]), [2], modulus=4)) == 2

    with pytest.raises(DimensionMismatch):
        solve_linear(A, [0, 0, 0], modulus=3)


def _minor_invariants(M: np.ndarray):
    """Invariant factors from gcds of k x k minors, with the minors of each
    size stacked into one batched determinant."""
    r, c = M.shape
    previous, factors = 1, []
    for k in range(1, min(r, c) + 1):
        rows = np.array(list(itertools.combinations(range(r), k)))
        cols = np.array(list(itertools.combinations(range(c), k)))
        minors = M[rows[:, None, :, None], cols[None, :, None, :]]
        dets = np.rint(np.linalg.det(minors.astype(float))).astype(np.int64)
        g = int(np.gcd.reduce(np.abs(dets).ravel()))
        if g == 0:
            break
        factors.append(g // previous)
        previous = g
    return factors


def _random_unimodular(rng, n: int, steps: int = 12) -> IntMatrix:
    entries = IntMatrix.identity(n).tolist()
    if n < 2:
        return IntMatrix([[int(rng.choice([-1, 1]))]])
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        q = int(rng.integers(-2, 3))
        entries[i] = [a + q * b for a, b in zip(entries[i], entries[j])]
        if rng.random() < 0.3:
            entries[i], entries[j] = entries[j], entries[i]
    return IntMatrix(entries)


def test_smith_identities_4x6():
    rng = np.random.default_rng(4601)
    for _ in range(1000):
        A = rng.integers(-9, 10, size=(4, 6))
        M = IntMatrix(A.tolist())
        snf = smith_decomposition(M)
        assert snf.U @ M @ snf.V == snf.D
        assert snf.U.is_unimodular()
        assert snf.V.is_unimodular()
        assert _is_diagonal_chain(snf.D, snf.diagonal)
        assert all(d > 0 for d in snf.diagonal)
        assert list(snf.diagonal) == _minor_invariants(A)


def test_solve_linear_substitution():
    rng = np.random.default_rng(4602)
    for _ in range(1000):
        r, c = rng.integers(1, 6, size=2)
        A = IntMatrix(rng.integers(-9, 10, size=(r, c)).tolist())
        x = rng.integers(-5, 6, size=c).tolist()

        b = A.apply(x)
        solution = solve_linear(A, b)
        assert solution is not None
        assert A.apply(solution.particular) == b
        for v in solution.kernel:
            assert not any(A.apply(v))
            shifted = [p + 2 * a for p, a in zip(solution.particular, v)]
            assert A.apply(shifted) == b

        m = int(rng.integers(2, 13))
        b_mod = [a % m for a in b]
        solution = solve_linear(A, b_mod, modulus=m)
        assert solution is not None
        assert [a % m for a in A.apply(solution.particular)] == b_mod
        for v in solution.kernel:
            assert not any(a % m for a in A.apply(v))


def test_cokernel_invariant_under_unimodular():
    rng = np.random.default_rng(4603)
    for _ in range(200):
        r, c = rng.integers(1, 6, size=2)
        M = IntMatrix(rng.integers(-9, 10, size=(r, c)).tolist())
        U = _random_unimodular(rng, int(r))
        V = _random_unimodular(rng, int(c))
        assert U.is_unimodular() and V.is_unimodular()
        assert cokernel_structure(U @ M @ V) == cokernel_structure(M)
