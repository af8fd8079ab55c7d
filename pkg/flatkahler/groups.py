"""Finite matrix groups, small abelian groups and conjugation bookkeeping."""

import itertools
import numpy as np
from math import gcd, prod
from dataclasses import dataclass
from sympy import Matrix
from typing import Dict, List, Optional, Sequence, Tuple, Union
from flatkahler.linalg import IntMatrix, DimensionMismatch


DEFAULT_BOUND = 10000


class ClosureExceedsBound(Exception):
    """Raised when a closure or enumeration grows past its bound."""

    def __init__(self, bound: int, what: str = "group") -> None:
        self.bound = bound
        super().__init__(
            f"The {what} has more than {bound} elements (infinite or too large). "
            + "Increase the bound to continue."
        )


class NotNormalizing(Exception):
    """Raised when n G n^-1 is not G."""


def _to_array(matrix: Union[IntMatrix, np.ndarray], modulus: int) -> np.ndarray:
    rows = matrix.tolist()
    if modulus:
        width = len(rows[0]) if rows else 0
        return np.array(rows, dtype=np.int64).reshape(len(rows), width) % modulus
    arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, a in enumerate(row):
            arr[i, j] = int(a)
    return arr


def _key(arr: np.ndarray, modulus: int):
    if modulus:
        return arr.tobytes()
    return tuple(int(a) for a in arr.flat)


class FiniteMatrixGroup:
    """A finite group of square integer matrices, optionally modulo m.

    Elements are kept in canonical order: the identity first, then the
    remaining elements sorted lexicographically on their flattened entries.
    Instances are built by :func:`generate_closure`.
    """

    def __init__(
        self,
        arrays: List[np.ndarray],
        generator_arrays: List[np.ndarray],
        degree: int,
        modulus: int = 0,
    ) -> None:
        self.degree = degree
        self.modulus = modulus

        identity = _to_array(IntMatrix.identity(degree), modulus)
        id_key = _key(identity, modulus)
        rest = [a for a in arrays if _key(a, modulus) != id_key]
        rest.sort(key=lambda a: tuple(int(x) for x in a.flat))
        self._arrays: List[np.ndarray] = [identity] + rest
        self._index: Dict = {
            _key(a, modulus): i for i, a in enumerate(self._arrays)
        }
        self.generators: Tuple[int, ...] = tuple(
            self._index[_key(g, modulus)] for g in generator_arrays
        )

        self._elements: Optional[List[IntMatrix]] = None
        self._mult_table: Optional[List[List[int]]] = None
        self._inverses: Dict[int, int] = {}

    def __repr__(self) -> str:
        ring = f" mod {self.modulus}" if self.modulus else ""
        return f"FiniteMatrixGroup(order={len(self)}, degree={self.degree}{ring})"

    def __len__(self) -> int:
        return len(self._arrays)

    @property
    def order(self) -> int:
        return len(self._arrays)

    @property
    def elements(self) -> List[IntMatrix]:
        if self._elements is None:
            self._elements = [
                IntMatrix(a.tolist(), cols=self.degree) for a in self._arrays
            ]
        return self._elements

    def element(self, i: int) -> IntMatrix:
        return self.elements[i]

    def array(self, i: int) -> np.ndarray:
        return self._arrays[i]

    def index(self, matrix: Union[IntMatrix, np.ndarray]) -> int:
        """Returns the position of a matrix in the element list."""
        try:
            return self._index[_key(self._coerce(matrix), self.modulus)]
        except KeyError:
            raise ValueError("Matrix is not an element of the group.") from None

    def find(self, matrix: Union[IntMatrix, np.ndarray]) -> Optional[int]:
        return self._index.get(_key(self._coerce(matrix), self.modulus))

    def __contains__(self, matrix) -> bool:
        return self.find(matrix) is not None

    def _coerce(self, matrix) -> np.ndarray:
        if isinstance(matrix, np.ndarray) and (
            self.modulus == 0 or matrix.dtype == np.int64
        ):
            return matrix % self.modulus if self.modulus else matrix
        if isinstance(matrix, IntMatrix) and matrix.shape != (
            self.degree,
            self.degree,
        ):
            raise DimensionMismatch(
                f"Matrix of shape {matrix.shape} in a degree {self.degree} group."
            )
        return _to_array(matrix, self.modulus)

    def _product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        c = a.dot(b)
        return c % self.modulus if self.modulus else c

    def multiply(self, i: int, j: int) -> int:
        if self._mult_table is not None:
            return self._mult_table[i][j]
        return self._index[
            _key(self._product(self._arrays[i], self._arrays[j]), self.modulus)
        ]

    @property
    def mult_table(self) -> List[List[int]]:
        """The full multiplication table, built on first access."""
        if self._mult_table is None:
            self._mult_table = [
                [self.multiply(i, j) for j in range(len(self))]
                for i in range(len(self))
            ]
        return self._mult_table

    def inverse(self, i: int) -> int:
        if i not in self._inverses:
            # The inverse is the last power before returning to the identity
            previous, current = 0, i
            while current != 0:
                previous, current = current, self.multiply(current, i)
            self._inverses[i] = previous
        return self._inverses[i]

    def element_order(self, i: int) -> int:
        k, current = 1, i
        while current != 0:
            current = self.multiply(current, i)
            k += 1
        return k

    def power(self, i: int, k: int) -> int:
        if k < 0:
            i, k = self.inverse(i), -k
        result = 0
        for _ in range(k % self.element_order(i)):
            result = self.multiply(result, i)
        return result

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(
            self.multiply(a, b) == self.multiply(b, a) for a in gens for b in gens
        )

    def words(self) -> Dict[int, Tuple[int, ...]]:
        """For abelian groups, expresses every element as exponents of the
        generators (the first exponent vector found in breadth-first order)."""
        result = {0: tuple(0 for _ in self.generators)}
        frontier = [0]
        while frontier:
            new = []
            for x in frontier:
                for k, g in enumerate(self.generators):
                    y = self.multiply(x, g)
                    if y not in result:
                        word = list(result[x])
                        word[k] += 1
                        result[y] = tuple(word)
                        new.append(y)
            frontier = new
        return result


def generate_closure(
    generators: Sequence[Union[IntMatrix, np.ndarray]],
    bound: int = DEFAULT_BOUND,
    modulus: int = 0,
    degree: int = None,
) -> FiniteMatrixGroup:
    """Generates the finite group spanned by integer matrices.

    Parameters
    ----------
    generators : Sequence[IntMatrix]
        Square matrices of equal degree, invertible over the ring.

    bound : int, optional
        The largest group order accepted. The default is DEFAULT_BOUND.

    modulus : int, optional
        Work with matrices over Z/modulus when positive. The default is 0.

    degree : int, optional
        The matrix degree, needed only when there are no generators.

    Returns
    -------
    FiniteMatrixGroup
        The closure, in canonical element order.

    Raises
    ------
    ClosureExceedsBound
        When more than `bound` elements are found.
    """
    if degree is None:
        if not generators:
            raise ValueError("The degree is required for an empty generator list.")
        degree = generators[0].shape[0]
    gens = [_to_array(g, modulus) for g in generators]
    for g in gens:
        if g.shape != (degree, degree):
            raise DimensionMismatch(
                f"Generator of shape {g.shape} in a degree {degree} group."
            )

    identity = _to_array(IntMatrix.identity(degree), modulus)
    found = {_key(identity, modulus): identity}
    frontier = [identity]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x.dot(g)
                if modulus:
                    y %= modulus
                k = _key(y, modulus)
                if k not in found:
                    found[k] = y
                    new.append(y)
                    if len(found) > bound:
                        raise ClosureExceedsBound(bound)
        frontier = new

    return FiniteMatrixGroup(list(found.values()), gens, degree, modulus)


@dataclass(frozen=True)
class AbstractAbelianGroup:
    """The group Z/m1 x ... x Z/mr, with elements as exponent tuples."""

    cyclic_factors: Tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(m) for m in self.cyclic_factors)
        if any(m < 1 for m in factors):
            raise ValueError(f"Cyclic factors {factors} must all be at least 1.")
        object.__setattr__(self, "cyclic_factors", factors)

    def __len__(self) -> int:
        return self.order

    def __str__(self) -> str:
        return " x ".join(f"Z{m}" for m in self.cyclic_factors) or "1"

    @property
    def order(self) -> int:
        return prod(self.cyclic_factors)

    @property
    def rank(self) -> int:
        return len(self.cyclic_factors)

    @property
    def exponent(self) -> int:
        e = 1
        for m in self.cyclic_factors:
            e = e * m // gcd(e, m)
        return e

    @property
    def identity(self) -> Tuple[int, ...]:
        return tuple(0 for _ in self.cyclic_factors)

    @property
    def generators(self) -> List[Tuple[int, ...]]:
        return [
            tuple(int(i == k) % m for i, m in enumerate(self.cyclic_factors))
            for k in range(self.rank)
        ]

    def elements(self) -> List[Tuple[int, ...]]:
        """All elements in lexicographic order, identity first."""
        return list(itertools.product(*(range(m) for m in self.cyclic_factors)))

    def reduce(self, element: Sequence[int]) -> Tuple[int, ...]:
        return tuple(a % m for a, m in zip(element, self.cyclic_factors))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
        return self.reduce([x + y for x, y in zip(a, b)])

    def neg(self, a: Sequence[int]) -> Tuple[int, ...]:
        return self.reduce([-x for x in a])

    def scale(self, a: Sequence[int], k: int) -> Tuple[int, ...]:
        return self.reduce([k * x for x in a])

    def element_order(self, a: Sequence[int]) -> int:
        order = 1
        for x, m in zip(a, self.cyclic_factors):
            k = m // gcd(x, m)
            order = order * k // gcd(order, k)
        return order


def apply_automorphism(
    G: AbstractAbelianGroup, A: IntMatrix, element: Sequence[int]
) -> Tuple[int, ...]:
    """Applies an automorphism matrix to an exponent tuple."""
    return G.reduce(A.apply(element))


def automorphism_group(
    G: AbstractAbelianGroup, bound: int = DEFAULT_BOUND
) -> List[IntMatrix]:
    """Enumerates all automorphisms of a small abelian group.

    Column k of each returned matrix holds the image of the k-th standard
    generator. The list is ordered lexicographically on these columns.
    """
    if G.order > bound:
        raise ClosureExceedsBound(bound, "abelian group")

    elements = G.elements()
    # Admissible images of each generator: elements killed by its order
    candidates = [
        [x for x in elements if G.scale(x, m) == G.identity]
        for m in G.cyclic_factors
    ]
    automorphisms = []
    for images in itertools.product(*candidates):
        A = IntMatrix.from_columns(images, G.rank) if images else IntMatrix.zeros(0, 0)
        image = {apply_automorphism(G, A, x) for x in elements}
        if len(image) == G.order:
            automorphisms.append(A)
    return automorphisms


def _modular_inverse(n: IntMatrix, modulus: int) -> IntMatrix:
    if modulus:
        return IntMatrix(Matrix(n.tolist()).inv_mod(modulus).tolist(), cols=n.cols)
    return n.inverse()


def conjugation_map(G: FiniteMatrixGroup, n: IntMatrix) -> Tuple[int, ...]:
    """Returns the permutation of element indices induced by g -> n g n^-1.

    Raises
    ------
    NotNormalizing
        If n G n^-1 differs from G.
    """
    if n.shape != (G.degree, G.degree):
        raise DimensionMismatch(
            f"Conjugating matrix of shape {n.shape} for a degree {G.degree} group."
        )
    n_arr = _to_array(n, G.modulus)
    n_inv = _to_array(_modular_inverse(n, G.modulus), G.modulus)
    images = []
    for i in range(len(G)):
        conj = n_arr.dot(G.array(i)).dot(n_inv)
        j = G.find(conj)
        if j is None:
            raise NotNormalizing(
                f"Conjugation maps element {i} of the group outside the group."
            )
        images.append(j)
    return tuple(images)


def normalizes(G: FiniteMatrixGroup, n: IntMatrix) -> bool:
    try:
        conjugation_map(G, n)
    except NotNormalizing:
        return False
    return True
