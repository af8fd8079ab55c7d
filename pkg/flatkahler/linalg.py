"""Exact integer and rational linear algebra.

Everything here works on Python integers, so no entry is ever rounded.
Matrices are small (desk scale), dense and immutable.
"""

import operator
import itertools
from math import gcd
from fractions import Fraction
from dataclasses import dataclass, field
from sympy import Matrix, factorint

try:
    from sympy import igcdex
except ImportError:
    from sympy.core.intfunc import igcdex
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union


class DimensionMismatch(ValueError):
    """Raised when operand shapes do not agree."""


def _as_int(value) -> int:
    if isinstance(value, Fraction):
        if value.denominator != 1:
            raise ValueError(f"Entry {value} is not an integer.")
        return value.numerator
    # Rejects floats, accepts numpy and sympy integers
    return operator.index(value)


class IntMatrix:
    """Dense matrix of exact integers.

    Parameters
    ----------
    entries : Iterable[Iterable[int]]
        The matrix entries, row by row.

    cols : int, optional
        The number of columns. Only needed when there are no rows, so that
        empty matrices such as 0x3 can be represented. The default is None.
    """

    __slots__ = ("rows", "cols", "_entries", "_hash")

    def __init__(self, entries: Iterable[Iterable[int]], cols: int = None) -> None:
        rows = tuple(tuple(_as_int(a) for a in row) for row in entries)
        ncols = len(rows[0]) if rows else (cols or 0)
        if cols is not None and rows and cols != ncols:
            raise DimensionMismatch(f"Expected {cols} columns, got {ncols}.")
        for row in rows:
            if len(row) != ncols:
                raise DimensionMismatch("Ragged rows in matrix entries.")

        self.rows = len(rows)
        self.cols = ncols
        self._entries = rows
        self._hash = None

    # Constructors
    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def diagonal(
        cls, values: Sequence[int], rows: int = None, cols: int = None
    ) -> "IntMatrix":
        """Returns a (possibly rectangular) diagonal matrix."""
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        entries = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            entries[i][i] = v
        return cls(entries, cols=cols)

    @classmethod
    def block_diagonal(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        entries = [[0] * cols for _ in range(rows)]
        r0, c0 = 0, 0
        for b in blocks:
            for i, row in enumerate(b._entries):
                entries[r0 + i][c0 : c0 + b.cols] = row
            r0 += b.rows
            c0 += b.cols
        return cls(entries, cols=cols)

    @classmethod
    def vstack(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        cols = {b.cols for b in blocks}
        if len(cols) > 1:
            raise DimensionMismatch(f"Cannot stack matrices with columns {cols}.")
        entries = [row for b in blocks for row in b._entries]
        return cls(entries, cols=cols.pop() if cols else 0)

    @classmethod
    def hstack(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        return cls.vstack([b.T for b in blocks]).T

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls(columns, cols=rows).T

    # Container behaviour
    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index):
        if isinstance(index, tuple):
            i, j = index
            return self._entries[i][j]
        return self._entries[index]

    def row(self, i: int) -> Tuple[int, ...]:
        return self._entries[i]

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self._entries)

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> List[List[int]]:
        return [list(row) for row in self._entries]

    def flat(self) -> Tuple[int, ...]:
        return tuple(itertools.chain.from_iterable(self._entries))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(
            [[self._entries[i][j] for j in cols] for i in rows], cols=len(cols)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self._entries))
        return self._hash

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()})"

    def __str__(self) -> str:
        if not self.rows:
            return f"[] ({self.rows}x{self.cols})"
        width = max(len(str(a)) for a in self.flat()) if self.cols else 0
        return "\n".join(
            "[" + " ".join(str(a).rjust(width) for a in row) + "]"
            for row in self._entries
        )

    # Arithmetic
    @property
    def T(self) -> "IntMatrix":
        if self.rows == 0:
            return IntMatrix([()] * self.cols, cols=0)
        return IntMatrix(zip(*self._entries), cols=self.rows)

    def transpose(self) -> "IntMatrix":
        return self.T

    def _check_same_shape(self, other: "IntMatrix"):
        if self.shape != other.shape:
            raise DimensionMismatch(f"Shapes {self.shape} and {other.shape} differ.")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)],
            cols=self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)],
            cols=self.cols,
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self._entries], cols=self.cols)

    def __mul__(self, scalar: int) -> "IntMatrix":
        scalar = _as_int(scalar)
        return IntMatrix([[scalar * a for a in r] for r in self._entries], cols=self.cols)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise DimensionMismatch(
                    f"Cannot multiply {self.shape} by {other.shape} matrix."
                )
            other_cols = other.columns()
            return IntMatrix(
                [
                    [sum(a * b for a, b in zip(row, col)) for col in other_cols]
                    for row in self._entries
                ],
                cols=other.cols,
            )
        return self.apply(other)

    def apply(self, vector: Sequence) -> tuple:
        """Multiplies a vector of integers or fractions."""
        if len(vector) != self.cols:
            raise DimensionMismatch(
                f"Cannot apply {self.shape} matrix to vector of length {len(vector)}."
            )
        return tuple(sum(a * v for a, v in zip(row, vector)) for row in self._entries)

    def mod(self, modulus: int) -> "IntMatrix":
        """Reduces every entry into [0, modulus)."""
        if modulus == 0:
            return self
        return IntMatrix(
            [[a % modulus for a in r] for r in self._entries], cols=self.cols
        )

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.flat())

    def is_identity(self) -> bool:
        return self.is_square() and self == IntMatrix.identity(self.rows)

    def to_sympy(self) -> Matrix:
        return Matrix(self.rows, self.cols, list(self.flat()))

    def det(self) -> int:
        if not self.is_square():
            raise DimensionMismatch(f"Determinant of non-square {self.shape} matrix.")
        if self.rows == 0:
            return 1
        return int(self.to_sympy().det(method="bareiss"))

    def is_unimodular(self) -> bool:
        return self.is_square() and abs(self.det()) == 1

    def inverse(self) -> "IntMatrix":
        """Returns the integral inverse of a unimodular matrix."""
        if not self.is_unimodular():
            raise ValueError("Matrix is not invertible over the integers.")
        if self.rows == 0:
            return self
        inv = self.to_sympy().inv()
        return IntMatrix(inv.tolist(), cols=self.cols)

    def power(self, k: int) -> "IntMatrix":
        if k < 0:
            return self.inverse().power(-k)
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def order(self, bound: int = 10000, modulus: int = 0) -> Optional[int]:
        """Returns the multiplicative order of the matrix, or None when it
        exceeds the bound (or is infinite)."""
        if not self.is_square():
            raise DimensionMismatch("Only square matrices have an order.")
        identity = IntMatrix.identity(self.rows).mod(modulus)
        current = self.mod(modulus)
        for k in range(1, bound + 1):
            if current == identity:
                return k
            current = (current @ self).mod(modulus)
        return None


class RatVector:
    """Vector of exact rationals, stored in lowest terms."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Union[int, Fraction]]) -> None:
        self.entries: Tuple[Fraction, ...] = tuple(Fraction(e) for e in entries)

    @classmethod
    def from_numerators(cls, numerators: Sequence[int], modulus: int) -> "RatVector":
        return cls(Fraction(n, modulus) for n in numerators)

    @classmethod
    def zeros(cls, length: int) -> "RatVector":
        return cls([0] * length)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, RatVector):
            return self.entries == other.entries
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"RatVector({[str(e) for e in self.entries]})"

    def __add__(self, other: "RatVector") -> "RatVector":
        if len(other) != len(self):
            raise DimensionMismatch("Vector lengths differ.")
        return RatVector(a + b for a, b in zip(self, other))

    def __sub__(self, other: "RatVector") -> "RatVector":
        if len(other) != len(self):
            raise DimensionMismatch("Vector lengths differ.")
        return RatVector(a - b for a, b in zip(self, other))

    def __neg__(self) -> "RatVector":
        return RatVector(-a for a in self)

    @property
    def denominator(self) -> int:
        """Least common denominator of the entries."""
        d = 1
        for e in self.entries:
            d = d * e.denominator // gcd(d, e.denominator)
        return d

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def mod_lattice(self) -> "RatVector":
        """Reduces every entry into [0, 1)."""
        return RatVector(e - (e.numerator // e.denominator) for e in self.entries)

    def numerators(self, modulus: int) -> Tuple[int, ...]:
        """Numerators over a common modulus, which must clear all denominators."""
        result = []
        for e in self.entries:
            scaled = e * modulus
            if scaled.denominator != 1:
                raise ValueError(f"Modulus {modulus} does not clear entry {e}.")
            result.append(scaled.numerator)
        return tuple(result)


@dataclass(frozen=True)
class AbelianStructure:
    """A finitely generated abelian group Z/d1 x ... x Z/dk x Z^r with
    d1 | d2 | ... | dk and every di >= 2."""

    invariant_factors: Tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        for d in factors:
            if d < 2:
                raise ValueError(f"Invariant factor {d} must be at least 2.")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValueError(f"Invariant factors {factors} break divisibility.")
        if self.free_rank < 0:
            raise ValueError("Free rank must be non-negative.")
        object.__setattr__(self, "invariant_factors", factors)

    @classmethod
    def from_cyclic(
        cls, moduli: Iterable[int], free_rank: int = 0
    ) -> "AbelianStructure":
        """Normalises a product of cyclic groups Z/m into invariant factors.
        A modulus of 0 contributes a free summand and a modulus of 1 nothing."""
        prime_powers = {}
        for m in moduli:
            m = abs(int(m))
            if m == 0:
                free_rank += 1
                continue
            for p, e in factorint(m).items():
                prime_powers.setdefault(p, []).append(e)

        length = max((len(v) for v in prime_powers.values()), default=0)
        factors = [1] * length
        for p, exponents in prime_powers.items():
            for k, e in enumerate(sorted(exponents, reverse=True)):
                factors[length - 1 - k] *= p**e
        return cls(tuple(factors), free_rank)

    def direct_sum(self, other: "AbelianStructure") -> "AbelianStructure":
        return AbelianStructure.from_cyclic(
            self.invariant_factors + other.invariant_factors,
            self.free_rank + other.free_rank,
        )

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def order(self) -> Optional[int]:
        """The group order, or None for infinite groups."""
        if not self.is_finite:
            return None
        order = 1
        for d in self.invariant_factors:
            order *= d
        return order

    @property
    def exponent(self) -> Optional[int]:
        if not self.is_finite:
            return None
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        parts = []
        for d, group in itertools.groupby(self.invariant_factors):
            count = len(list(group))
            parts.append(f"Z{d}" + (f"^{count}" if count > 1 else ""))
        if self.free_rank:
            parts.append("Z" + (f"^{self.free_rank}" if self.free_rank > 1 else ""))
        return " x ".join(parts)


@dataclass(frozen=True)
class SmithDecomposition:
    """Result of a Smith normal form reduction, U @ M @ V = D.

    The inverse transforms are only populated when requested.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: Optional[IntMatrix] = None
    V_inv: Optional[IntMatrix] = None
    diagonal: Tuple[int, ...] = field(default=())

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def _swap_rows(A, i, j):
    A[i], A[j] = A[j], A[i]


def _swap_cols(A, i, j):
    for row in A:
        row[i], row[j] = row[j], row[i]


def _add_row(A, target, source, q):
    """row_target += q * row_source"""
    src = A[source]
    A[target] = [a + q * b for a, b in zip(A[target], src)]


def _add_col(A, target, source, q):
    """col_target += q * col_source"""
    for row in A:
        row[target] += q * row[source]


def _identity_list(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_decomposition(M: IntMatrix, inverses: bool = False) -> SmithDecomposition:
    """Computes the Smith normal form of an integer matrix.

    Parameters
    ----------
    M : IntMatrix
        The matrix to reduce.

    inverses : bool, optional
        Also track U^-1 and V^-1. The default is False.

    Returns
    -------
    SmithDecomposition
        With U @ M @ V = D, U and V unimodular and D diagonal with each
        diagonal entry dividing the next.

    Notes
    -----
    The pivot is always the entry of smallest absolute value in the
    remaining submatrix, ties broken by lowest row then lowest column, so
    that equal inputs give equal transforms.
    """
    r, c = M.shape
    A = M.tolist()
    U = _identity_list(r)
    V = _identity_list(c)
    Ui = _identity_list(r) if inverses else None
    Vi = _identity_list(c) if inverses else None

    def row_add(target, source, q):
        _add_row(A, target, source, q)
        _add_row(U, target, source, q)
        if inverses:
            _add_col(Ui, source, target, -q)

    def col_add(target, source, q):
        _add_col(A, target, source, q)
        _add_col(V, target, source, q)
        if inverses:
            _add_row(Vi, source, target, -q)

    def row_swap(i, j):
        if i != j:
            _swap_rows(A, i, j)
            _swap_rows(U, i, j)
            if inverses:
                _swap_cols(Ui, i, j)

    def col_swap(i, j):
        if i != j:
            _swap_cols(A, i, j)
            _swap_cols(V, i, j)
            if inverses:
                _swap_rows(Vi, i, j)

    diagonal = []
    for t in range(min(r, c)):
        # Select pivot
        pivot = None
        for i in range(t, r):
            row = A[i]
            for j in range(t, c):
                a = row[j]
                if a and (pivot is None or abs(a) < pivot[0]):
                    pivot = (abs(a), i, j)
        if pivot is None:
            break
        row_swap(t, pivot[1])
        col_swap(t, pivot[2])

        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, r):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, c):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0

            if not clean:
                # A remainder is now smaller than the pivot, move it in
                best = (abs(p), t, t)
                for i in range(t + 1, r):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, c):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                row_swap(t, best[1])
                col_swap(t, best[2])
                continue

            # Divisibility of the remaining block
            offender = next(
                (
                    i
                    for i in range(t + 1, r)
                    if any(A[i][j] % p for j in range(t + 1, c))
                ),
                None,
            )
            if offender is None:
                break
            row_add(t, offender, 1)

        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
            if inverses:
                for row in Ui:
                    row[t] = -row[t]
        diagonal.append(A[t][t])

    return SmithDecomposition(
        U=IntMatrix(U, cols=r),
        D=IntMatrix(A, cols=c),
        V=IntMatrix(V, cols=c),
        U_inv=IntMatrix(Ui, cols=r) if inverses else None,
        V_inv=IntMatrix(Vi, cols=c) if inverses else None,
        diagonal=tuple(diagonal),
    )


def smith_normal_form(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Returns (U, D, V) with U @ M @ V = D in Smith normal form."""
    snf = smith_decomposition(M)
    return snf.U, snf.D, snf.V


def _normalise_sign(row: List[int]) -> Tuple[int, ...]:
    for a in row:
        if a:
            return tuple(row) if a > 0 else tuple(-b for b in row)
    return tuple(row)


def row_echelon(M: IntMatrix) -> IntMatrix:
    """Row-reduces M by unimodular row operations and drops zero rows.

    The result has the same row lattice as M (so the same kernel), with at
    most min(rows, cols) rows.
    """
    rows = list(dict.fromkeys(_normalise_sign(list(r)) for r in M if any(r)))
    result = []
    for j in range(M.cols):
        if not rows:
            break
        pivot = None
        remaining = []
        for row in rows:
            if not row[j]:
                remaining.append(row)
            elif pivot is None:
                pivot = row
            else:
                a, b = pivot[j], row[j]
                x, y, g = igcdex(a, b)
                x, y, g = int(x), int(y), int(g)
                ag, bg = a // g, b // g
                new_row = tuple(bg * p - ag * q for p, q in zip(pivot, row))
                pivot = tuple(x * p + y * q for p, q in zip(pivot, row))
                if any(new_row):
                    remaining.append(_normalise_sign(list(new_row)))
        if pivot is not None:
            result.append(pivot)
        rows = list(dict.fromkeys(remaining))
    return IntMatrix(result, cols=M.cols)


def rank(M: IntMatrix) -> int:
    return row_echelon(M).rows


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Returns a matrix whose columns form a Z-basis of the kernel of M."""
    snf = smith_decomposition(row_echelon(M))
    return snf.V.submatrix(range(M.cols), range(snf.rank, M.cols))


def cokernel_structure(M: IntMatrix) -> AbelianStructure:
    """Structure of Z^rows / im(M)."""
    # Column operations keep the image
    reduced = row_echelon(M.T).T if M.cols > M.rows else M
    if reduced.cols == 0:
        return AbelianStructure(free_rank=M.rows)
    snf = smith_decomposition(reduced)
    return AbelianStructure(
        tuple(d for d in snf.diagonal if d > 1), M.rows - snf.rank
    )


@dataclass(frozen=True)
class LinearSolution:
    """Solution set x0 + span(kernel) of A x = b, over Z (modulus 0) or Z/m.

    For modulus m the set is finite: `len` gives its size and iterating
    enumerates it.
    """

    particular: Tuple[int, ...]
    kernel: Tuple[Tuple[int, ...], ...]
    modulus: int = 0
    _transform: Optional[IntMatrix] = None
    _steps: Tuple[Tuple[int, int, int], ...] = ()

    def __len__(self) -> int:
        if self.modulus == 0:
            raise TypeError("Integer solution sets are infinite unless trivial.")
        size = 1
        for _, _, count in self._steps:
            size *= count
        return size

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        if self.modulus == 0:
            raise TypeError("Only solution sets modulo m are enumerable.")
        m = self.modulus
        ranges = [
            [start + k * step for k in range(count)] for start, step, count in self._steps
        ]
        for y in itertools.product(*ranges):
            yield tuple(a % m for a in self._transform.apply(y))

    def __bool__(self) -> bool:
        return True

    def __contains__(self, x) -> bool:
        m = self.modulus
        return tuple(a % m for a in x) in set(self)

    def points(self) -> List[Tuple[int, ...]]:
        """All solutions modulo m, sorted."""
        return sorted(self)


def solve_linear(
    A: IntMatrix, b: Union[RatVector, Sequence], modulus: int = 0
) -> Optional[LinearSolution]:
    """Solves A x = b for integer x, exactly (modulus 0) or modulo m.

    Parameters
    ----------
    A : IntMatrix
        The coefficient matrix.

    b : RatVector | Sequence
        The right hand side. Rational entries are only allowed for
        modulus 0.

    modulus : int, optional
        0 to solve over the integers, m > 0 to solve in Z/m. The default
        is 0.

    Returns
    -------
    LinearSolution | None
        None when there is no solution.
    """
    if len(b) != A.rows:
        raise DimensionMismatch(
            f"Right hand side of length {len(b)} for a {A.shape} system."
        )
    if modulus < 0:
        raise ValueError("Modulus must be non-negative.")

    snf = smith_decomposition(A)
    d = snf.diagonal
    r = snf.rank
    n = A.cols
    rhs = snf.U.apply([Fraction(x) for x in b])

    if modulus == 0:
        y = []
        for i, c in enumerate(rhs):
            if i < r:
                q = c / d[i]
                if q.denominator != 1:
                    return None
                y.append(int(q))
            elif c != 0:
                return None
        y += [0] * (n - r)
        kernel = tuple(snf.V.column(j) for j in range(r, n))
        return LinearSolution(snf.V.apply(y), kernel, 0, snf.V)

    m = modulus
    if any(c.denominator != 1 for c in rhs):
        raise ValueError("Right hand side must be integral for a modular solve.")
    rhs = [int(c) % m for c in rhs]

    steps = []
    kernel = []
    for i, c in enumerate(rhs):
        if i < r:
            g = gcd(d[i], m)
            if c % g:
                return None
            mg = m // g
            start = (c // g) * pow(d[i] // g, -1, mg) % mg if mg > 1 else 0
            steps.append((start, mg, g))
            if g > 1:
                kernel.append(tuple(mg * v % m for v in snf.V.column(i)))
        elif c:
            return None
    for j in range(r, n):
        steps.append((0, 1, m))
        kernel.append(tuple(v % m for v in snf.V.column(j)))

    y0 = [s[0] for s in steps]
    particular = tuple(a % m for a in snf.V.apply(y0))
    return LinearSolution(particular, tuple(kernel), m, snf.V, tuple(steps))
