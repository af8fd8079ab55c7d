"""Group cohomology in degrees 1 and 2 from the normalized bar resolution.

Cochains of degree k are vectors indexed by (tuple, coordinate), where the
tuple runs over (G - {1})^k in lexicographic element order. The entry for
tuple t and module coordinate a sits at position index(t) * rank + a.
"""

import itertools
import numpy as np
from math import gcd, lcm
from typing import Iterator, List, Optional, Sequence, Tuple, Union
from flatkahler.linalg import (
    IntMatrix,
    AbelianStructure,
    DimensionMismatch,
    row_echelon,
    smith_decomposition,
)
from flatkahler.groups import (
    DEFAULT_BOUND,
    AbstractAbelianGroup,
    FiniteMatrixGroup,
    ClosureExceedsBound,
)
from flatkahler.crystal import DiagonalAction
from flatkahler.torus import TorusSpec


class CohomologyMismatch(AssertionError):
    """Raised when H^1(G, T) and H^2(G, L) disagree."""


def multiplication_table(
    group: Union[AbstractAbelianGroup, FiniteMatrixGroup, DiagonalAction]
) -> List[List[int]]:
    """Multiplication table over the canonical element order."""
    if isinstance(group, FiniteMatrixGroup):
        return group.mult_table
    if isinstance(group, DiagonalAction):
        n = len(group)
        return [[group.multiply(i, j) for j in range(n)] for i in range(n)]
    elements = group.elements()
    index = {e: i for i, e in enumerate(elements)}
    return [[index[group.add(a, b)] for b in elements] for a in elements]


class GModule:
    """A lattice Z^n (modulus 0) or torsion module (Z/m)^n with G-action.

    Parameters
    ----------
    group : AbstractAbelianGroup | FiniteMatrixGroup
        The acting group.

    action : Sequence[IntMatrix]
        The matrix of each group element, in the group's element order.

    modulus : int, optional
        0 for a lattice, m > 0 for (Z/m)^n. The default is 0.
    """

    def __init__(
        self,
        group: Union[AbstractAbelianGroup, FiniteMatrixGroup],
        action: Sequence[IntMatrix],
        modulus: int = 0,
        table: List[List[int]] = None,
    ) -> None:
        self.group = group
        self.modulus = modulus
        self.action: List[IntMatrix] = [a.mod(modulus) for a in action]
        self.table = table if table is not None else multiplication_table(group)

        if len(self.action) != len(self.table):
            raise DimensionMismatch(
                f"{len(self.action)} action matrices for a group of order "
                + f"{len(self.table)}."
            )
        self.rank = self.action[0].rows if self.action else 0

        for i, a in enumerate(self.action):
            for j, b in enumerate(self.action):
                if (a @ b).mod(modulus) != self.action[self.table[i][j]]:
                    raise ValueError(
                        f"The action is not a homomorphism at elements ({i}, {j})."
                    )

    def __repr__(self) -> str:
        kind = f"(Z/{self.modulus})^{self.rank}" if self.modulus else f"Z^{self.rank}"
        return f"GModule({kind}, group order {len(self.table)})"

    @classmethod
    def lattice(cls, action: DiagonalAction) -> "GModule":
        """The lattice L with the holonomy action."""
        return cls(action.group, action.rho, 0, multiplication_table(action))

    @classmethod
    def trivial(
        cls,
        group: Union[AbstractAbelianGroup, FiniteMatrixGroup],
        rank: int,
        modulus: int = 0,
    ) -> "GModule":
        table = multiplication_table(group)
        return cls(group, [IntMatrix.identity(rank)] * len(table), modulus, table)

    @classmethod
    def natural(cls, G: FiniteMatrixGroup) -> "GModule":
        """Z^n with a matrix group acting by its own elements."""
        return cls(G, G.elements, G.modulus)

    def restrict(self, coords: Sequence[int]) -> "GModule":
        action = [a.submatrix(coords, coords) for a in self.action]
        return GModule(self.group, action, self.modulus, self.table)

    def summands(self) -> List[Tuple[Tuple[int, ...], "GModule"]]:
        """Splits the module into the direct summands spanned by the
        connected coordinate sets of the action matrices."""
        parent = list(range(self.rank))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for m in self.action:
            for i in range(self.rank):
                for j in range(self.rank):
                    if i != j and m[i, j]:
                        parent[find(i)] = find(j)

        groups = {}
        for i in range(self.rank):
            groups.setdefault(find(i), []).append(i)
        components = sorted(tuple(c) for c in groups.values())
        if len(components) == 1:
            return [(components[0], self)]
        return [(c, self.restrict(c)) for c in components]


def cochain_dimension(order: int, rank: int, k: int) -> int:
    """Dimension of the normalized cochains C^k."""
    return rank * (order - 1) ** k


def _coboundary(table: List[List[int]], action: List[IntMatrix], k: int) -> IntMatrix:
    """Matrix of d: C^k -> C^(k+1)."""
    n = action[0].rows if action else 0
    nonid = range(1, len(table))
    sources = {t: i for i, t in enumerate(itertools.product(nonid, repeat=k))}
    width = n * len(sources)

    rows = []
    for tau in itertools.product(nonid, repeat=k + 1):
        block = [[0] * width for _ in range(n)]

        # g1 f(g2, ..., g_k+1)
        col = sources[tau[1:]] * n
        g = action[tau[0]]
        for a in range(n):
            for b in range(n):
                block[a][col + b] += g[a, b]

        # Inner faces, dropping arguments that collapse to the identity
        for i in range(1, k + 1):
            merged = tau[: i - 1] + (table[tau[i - 1]][tau[i]],) + tau[i + 1 :]
            if 0 in merged:
                continue
            col = sources[merged] * n
            for a in range(n):
                block[a][col + a] += (-1) ** i

        col = sources[tau[:k]] * n
        for a in range(n):
            block[a][col + a] += (-1) ** (k + 1)

        rows.extend(block)
    return IntMatrix(rows, cols=width)


def boundary_matrices(
    G: Union[AbstractAbelianGroup, FiniteMatrixGroup],
    A: GModule,
    k: int,
    bound: int = DEFAULT_BOUND,
) -> Tuple[IntMatrix, IntMatrix]:
    """Differentials into and out of the normalized cochains of degree k.

    Parameters
    ----------
    G : AbstractAbelianGroup | FiniteMatrixGroup
        The group.

    A : GModule
        The coefficient module.

    k : int
        1 or 2.

    Returns
    -------
    d_k : IntMatrix
        The map C^(k-1) -> C^k.

    d_k1 : IntMatrix
        The map C^k -> C^(k+1). For torsion modules, entries are reduced
        modulo m.
    """
    if k not in (1, 2):
        raise ValueError(f"Cohomology degree {k} is not supported.")
    table = multiplication_table(G)
    if len(table) > bound:
        raise ClosureExceedsBound(bound)
    if len(table) != len(A.table):
        raise DimensionMismatch("The module belongs to a group of another order.")
    return tuple(_coboundary(table, A.action, j).mod(A.modulus) for j in (k - 1, k))


def _diagonal(values: Sequence[int]) -> IntMatrix:
    return IntMatrix.diagonal(list(values))


class CohomologyPart:
    """The cohomology of one direct summand of the coefficient module.

    Cocycles x of the summand are written x = K y, where y is read off as
    y = Y x / scale. Class coordinates are c = P y, taken modulo the
    diagonal entries e_i of the relation matrix in Smith form.
    """

    def __init__(
        self,
        positions: Sequence[int],
        basis: IntMatrix,
        coordinates: IntMatrix,
        scale: int,
        relations: IntMatrix,
        modulus: int = 0,
        kernel_test: IntMatrix = None,
    ) -> None:
        self.positions = tuple(positions)
        self.basis = basis
        self.coordinate_matrix = coordinates
        self.scale = scale
        self.modulus = modulus
        self.kernel_test = kernel_test

        z = basis.cols
        if relations.cols > relations.rows:
            # Column operations keep the relation lattice
            relations = row_echelon(relations.T).T
        snf = smith_decomposition(relations, inverses=True)
        self.P = snf.U
        self.P_inv = snf.U_inv
        self.diagonal = list(snf.diagonal) + [0] * (z - snf.rank)
        self.generator_slots = [i for i, e in enumerate(self.diagonal) if e != 1]
        self.moduli = tuple(self.diagonal[i] for i in self.generator_slots)

    def __repr__(self) -> str:
        return f"CohomologyPart({AbelianStructure.from_cyclic(self.moduli)})"

    @property
    def structure(self) -> AbelianStructure:
        return AbelianStructure.from_cyclic(self.moduli)

    def coordinates(self, x: Sequence[int]) -> Tuple[int, ...]:
        """Class coordinates of a cocycle of this summand."""
        if self.kernel_test is not None and any(self.kernel_test.apply(x)):
            raise ValueError("Cochain is not a cocycle.")
        y = []
        for t in self.coordinate_matrix.apply(x):
            if t % self.scale:
                raise ValueError("Cochain is not a cocycle.")
            y.append(t // self.scale)
        c = self.P.apply(y)
        return tuple(
            c[i] % self.diagonal[i] if self.diagonal[i] else c[i]
            for i in self.generator_slots
        )

    def representative(self, coords: Sequence[int]) -> Tuple[int, ...]:
        c = [0] * len(self.diagonal)
        for slot, value in zip(self.generator_slots, coords):
            c[slot] = value
        x = self.basis.apply(self.P_inv.apply(c))
        if self.modulus:
            x = tuple(a % self.modulus for a in x)
        return x

    def classes(self) -> Iterator[Tuple[int, ...]]:
        if any(m == 0 for m in self.moduli):
            raise ValueError("An infinite cohomology group cannot be enumerated.")
        return itertools.product(*(range(m) for m in self.moduli))

    def reduction_rows(self) -> Tuple[IntMatrix, List[int]]:
        """Rows R and divisors q with coordinate_i = (R_i x mod q_i) / scale."""
        R = self.P @ self.coordinate_matrix
        rows, divisors = [], []
        for i in self.generator_slots:
            q = self.scale * self.diagonal[i]
            rows.append([a % q for a in R.row(i)] if q else list(R.row(i)))
            divisors.append(q)
        return IntMatrix(rows, cols=R.cols), divisors


def _kernel_lattice(d_out: IntMatrix):
    return smith_decomposition(row_echelon(d_out), inverses=True)


def _lattice_part(positions, d_in: IntMatrix, d_out: IntMatrix) -> CohomologyPart:
    dim = d_out.cols
    snf = _kernel_lattice(d_out)
    r = snf.rank
    K = snf.V.submatrix(range(dim), range(r, dim))
    Y = snf.V_inv.submatrix(range(r, dim), range(dim))
    test = snf.V_inv.submatrix(range(r), range(dim))
    return CohomologyPart(positions, K, Y, 1, Y @ d_in, 0, test)


def _torsion_part(
    positions, d_out: IntMatrix, coboundaries: IntMatrix, m: int
) -> CohomologyPart:
    """Cocycles are the x with d_out x = 0 mod m, modulo the coboundary
    columns and m Z^dim."""
    dim = d_out.cols
    snf = _kernel_lattice(d_out)
    s = [m // gcd(m, d) for d in snf.diagonal] + [1] * (dim - snf.rank)
    scale = lcm(*s) if s else 1
    K = snf.V @ _diagonal(s) if dim else snf.V
    Y = _diagonal([scale // a for a in s]) @ snf.V_inv if dim else snf.V_inv

    relations = IntMatrix.hstack([coboundaries, IntMatrix.identity(dim) * m])
    scaled = Y @ relations
    if any(a % scale for a in scaled.flat()):
        raise CohomologyMismatch("Coboundaries fall outside the cocycle lattice.")
    exact = IntMatrix([[a // scale for a in row] for row in scaled], cols=scaled.cols)
    return CohomologyPart(positions, K, Y, scale, exact, m)


def _positions(coords: Sequence[int], rank: int, count: int) -> List[int]:
    return [t * rank + c for t in range(count) for c in coords]


class CohomologyGroup:
    """A cohomology group H^k(G, A) with class reduction.

    Class coordinates are listed summand by summand. Each coordinate is an
    integer modulo the corresponding entry of `moduli` (0 marks a free
    coordinate).
    """

    def __init__(
        self,
        degree: int,
        module: GModule,
        parts: List[CohomologyPart],
        dimension: int,
        modulus: int = 0,
    ) -> None:
        self.degree = degree
        self.module = module
        self.parts = parts
        self.dimension = dimension
        self.modulus = modulus
        self.moduli: Tuple[int, ...] = tuple(m for p in parts for m in p.moduli)
        self.structure = AbelianStructure.from_cyclic(self.moduli)

    def __repr__(self) -> str:
        return f"H^{self.degree} = {self.structure}"

    def __len__(self) -> int:
        if not self.structure.is_finite:
            raise TypeError("The cohomology group is infinite.")
        return self.structure.order

    @property
    def order(self) -> Optional[int]:
        return self.structure.order

    def _split(self, cochain: Sequence[int]) -> List[List[int]]:
        if len(cochain) != self.dimension:
            raise DimensionMismatch(
                f"Cochain of length {len(cochain)} in dimension {self.dimension}."
            )
        return [[cochain[i] for i in p.positions] for p in self.parts]

    def reduce(self, cochain: Sequence[int]) -> Tuple[int, ...]:
        """Class coordinates of a cocycle."""
        return tuple(
            a
            for part, x in zip(self.parts, self._split(cochain))
            for a in part.coordinates(x)
        )

    def representative(self, coords: Sequence[int]) -> Tuple[int, ...]:
        """The canonical cocycle of the class with the given coordinates."""
        if len(coords) != len(self.moduli):
            raise DimensionMismatch(
                f"Expected {len(self.moduli)} class coordinates, got {len(coords)}."
            )
        cochain = [0] * self.dimension
        start = 0
        for part in self.parts:
            values = part.representative(coords[start : start + len(part.moduli)])
            for i, a in zip(part.positions, values):
                cochain[i] = a
            start += len(part.moduli)
        return tuple(cochain)

    def canonical(self, cochain: Sequence[int]) -> Tuple[int, ...]:
        return self.representative(self.reduce(cochain))

    def is_cocycle(self, cochain: Sequence[int]) -> bool:
        try:
            self.reduce(cochain)
        except ValueError:
            return False
        return True

    @property
    def generators(self) -> List[Tuple[Tuple[int, ...], int]]:
        """Representative cocycles of the cyclic generators, with orders
        (0 for infinite order)."""
        result = []
        for k, m in enumerate(self.moduli):
            coords = [0] * len(self.moduli)
            coords[k] = 1
            result.append((self.representative(coords), m))
        return result

    @property
    def representatives(self) -> List[Tuple[int, ...]]:
        return [cochain for cochain, _ in self.generators]

    def classes(self) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """Yields (coordinates, canonical cocycle) for every class."""
        if not self.structure.is_finite:
            raise ValueError("An infinite cohomology group cannot be enumerated.")
        for coords in itertools.product(*(range(m) for m in self.moduli)):
            yield coords, self.representative(coords)

    def reduction_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays (R, q, s) so that class coordinates of integer cochains X,
        one per row, are ((X @ R.T) % q) // s."""
        rows, divisors, scales = [], [], []
        for part in self.parts:
            R, q = part.reduction_rows()
            for i in range(R.rows):
                full = [0] * self.dimension
                for pos, a in zip(part.positions, R.row(i)):
                    full[pos] = a
                rows.append(full)
            divisors += q
            scales += [part.scale] * len(q)
        R = np.array(rows, dtype=np.int64).reshape(len(rows), self.dimension)
        return R, np.array(divisors, dtype=np.int64), np.array(scales, dtype=np.int64)


def cohomology(
    G: Union[AbstractAbelianGroup, FiniteMatrixGroup],
    A: GModule,
    k: int,
    split: bool = True,
    bound: int = DEFAULT_BOUND,
) -> CohomologyGroup:
    """Computes H^k(G, A) for k = 1 or 2.

    Parameters
    ----------
    G : AbstractAbelianGroup | FiniteMatrixGroup
        The group.

    A : GModule
        A lattice or torsion module.

    k : int
        The degree, 1 or 2.

    split : bool, optional
        Compute summand by summand when the action decomposes. The default
        is True.

    bound : int, optional
        The largest group order accepted.
    """
    if k not in (1, 2):
        raise ValueError(f"Cohomology degree {k} is not supported.")
    table = multiplication_table(G)
    if len(table) > bound:
        raise ClosureExceedsBound(bound)
    if len(table) != len(A.table):
        raise DimensionMismatch("The module belongs to a group of another order.")

    count = (len(table) - 1) ** k
    summands = A.summands() if split else [(tuple(range(A.rank)), A)]
    parts = []
    for coords, sub in summands:
        d_in = _coboundary(table, sub.action, k - 1)
        d_out = _coboundary(table, sub.action, k)
        positions = _positions(coords, A.rank, count)
        if A.modulus:
            parts.append(_torsion_part(positions, d_out, d_in, A.modulus))
        else:
            parts.append(_lattice_part(positions, d_in, d_out))
    return CohomologyGroup(k, A, parts, cochain_dimension(len(table), A.rank, k), A.modulus)


def lattice_cohomology(action: DiagonalAction, k: int) -> CohomologyGroup:
    """H^k(G, L) for the lattice of the torus."""
    return cohomology(action.group, GModule.lattice(action), k)


def torus_h1(
    T: TorusSpec, action: DiagonalAction, verify: bool = True
) -> CohomologyGroup:
    """H^1(G, T) realised on N-torsion cocycles, N the exponent of G.

    Cocycles take values in T[N]. Coboundaries are the N-torsion cocycles
    g -> (g - 1) t with t in T[N^2]. Cochain entries are numerators over N.

    Raises
    ------
    CohomologyMismatch
        When verify is set and the invariant factors differ from those of
        H^2(G, L).
    """
    if action.torus is not T:
        raise ValueError("The action belongs to another torus.")
    N = action.exponent
    L = GModule.lattice(action)
    table = L.table
    count = len(table) - 1

    parts = []
    for coords, sub in L.summands():
        d0 = _coboundary(table, sub.action, 0)
        d1 = _coboundary(table, sub.action, 1)

        # Translations t = w / N^2 whose coboundary is N-torsion
        snf = smith_decomposition(row_echelon(d0))
        s = [N // gcd(N, d) for d in snf.diagonal] + [1] * (sub.rank - snf.rank)
        W = snf.V @ _diagonal(s)
        products = d0 @ W
        B = IntMatrix(
            [[a // N for a in row] for row in products], cols=products.cols
        )
        parts.append(_torsion_part(_positions(coords, L.rank, count), d1, B, N))

    h1 = CohomologyGroup(1, L, parts, cochain_dimension(len(table), L.rank, 1), N)

    if verify:
        h2 = cohomology(action.group, L, 2)
        if h1.structure != h2.structure:
            raise CohomologyMismatch(
                f"H^1(G, T) = {h1.structure} but H^2(G, L) = {h2.structure}."
            )
    return h1
