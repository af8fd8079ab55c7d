"""Holonomy actions, translation cocycles and fixed point tests.

A crystal group is recorded by its holonomy action rho on the torus and a
translation cocycle z, so that the group acts on T by x -> rho(g) x + z(g).
"""

from functools import lru_cache
from fractions import Fraction
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union
from flatkahler.linalg import (
    IntMatrix,
    RatVector,
    AbelianStructure,
    smith_decomposition,
)
from flatkahler.groups import (
    DEFAULT_BOUND,
    AbstractAbelianGroup,
    FiniteMatrixGroup,
    generate_closure,
)
from flatkahler.torus import TorusSpec, TorsionPoint


class HolonomyError(ValueError):
    """Raised for holonomy assignments that do not define a faithful action."""


class CocycleError(ValueError):
    """Raised when translation data fails the cocycle identity."""


class NonFreeAction(Exception):
    """Raised when some group element has a fixed point on the torus."""

    def __init__(self, message: str, element: str = None) -> None:
        self.element = element
        super().__init__(message)


class DiagonalAction:
    """A finite abelian group acting factorwise on a torus.

    Parameters
    ----------
    torus : TorusSpec
        The torus acted on.

    group : AbstractAbelianGroup | Sequence[int]
        The abstract group, or its cyclic orders.

    assignment : Sequence[Sequence]
        For each group generator, the unit exponents on each factor. An
        entry is an integer for preset curves and a list of exponents (one
        per declared unit generator) for custom factors.
    """

    def __init__(
        self,
        torus: TorusSpec,
        group: Union[AbstractAbelianGroup, Sequence[int]],
        assignment: Sequence[Sequence],
    ) -> None:
        if not isinstance(group, AbstractAbelianGroup):
            group = AbstractAbelianGroup(tuple(group))
        if len(assignment) != group.rank:
            raise HolonomyError(
                f"Expected exponents for {group.rank} generators, "
                + f"got {len(assignment)}."
            )

        self.torus = torus
        self.group = group
        self.assignment = tuple(
            tuple(tuple(e) if isinstance(e, (list, tuple)) else e for e in row)
            for row in assignment
        )

        # Units of each generator on each factor
        generator_units: List[List[IntMatrix]] = []
        for j, row in enumerate(self.assignment):
            if len(row) != len(torus):
                raise HolonomyError(
                    f"Generator {j + 1} assigns {len(row)} units for "
                    + f"{len(torus)} factors."
                )
            units = [factor.unit(e) for factor, e in zip(torus, row)]
            for k, u in enumerate(units):
                if not u.power(group.cyclic_factors[j]).is_identity():
                    raise HolonomyError(
                        f"Generator {j + 1} has order {group.cyclic_factors[j]} "
                        + f"but acts on factor {k + 1} by a unit of order "
                        + f"{u.order()}."
                    )
            generator_units.append(units)
        self._generator_units = generator_units

        # Full table of rho
        self.elements: List[Tuple[int, ...]] = group.elements()
        self._index: Dict[Tuple[int, ...], int] = {
            e: i for i, e in enumerate(self.elements)
        }
        self.factor_units: List[List[IntMatrix]] = []
        for element in self.elements:
            blocks = []
            for k, factor in enumerate(torus):
                u = IntMatrix.identity(factor.lattice_rank)
                for j, e in enumerate(element):
                    u = u @ generator_units[j][k].power(e)
                blocks.append(u)
            self.factor_units.append(blocks)
        self.rho: List[IntMatrix] = [
            IntMatrix.block_diagonal(blocks) for blocks in self.factor_units
        ]

        if len(set(self.rho)) != len(self.elements):
            raise HolonomyError("The holonomy representation is not faithful.")

        self._image: Optional[FiniteMatrixGroup] = None

    def __repr__(self) -> str:
        return f"DiagonalAction({self.group} on {self.torus})"

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def rank(self) -> int:
        """The lattice rank of the torus."""
        return self.torus.rank

    @property
    def exponent(self) -> int:
        return self.group.exponent

    @property
    def generator_indices(self) -> List[int]:
        return [self._index[g] for g in self.group.generators]

    def index(self, element: Union[int, Sequence[int]]) -> int:
        if isinstance(element, int):
            return element
        return self._index[self.group.reduce(element)]

    def multiply(self, i: int, j: int) -> int:
        return self._index[self.group.add(self.elements[i], self.elements[j])]

    def inverse(self, i: int) -> int:
        return self._index[self.group.neg(self.elements[i])]

    def label(self, i: int) -> str:
        """Names an element as a word in the generators, e.g. g1^2 g2."""
        parts = []
        for j, e in enumerate(self.elements[i]):
            if e:
                parts.append(f"g{j + 1}" + (f"^{e}" if e > 1 else ""))
        return " ".join(parts) or "1"

    @property
    def image(self) -> FiniteMatrixGroup:
        """The matrix group rho(G)."""
        if self._image is None:
            gens = [self.rho[i] for i in self.generator_indices]
            self._image = generate_closure(gens, bound=DEFAULT_BOUND, degree=self.rank)
        return self._image

    def image_positions(self) -> List[int]:
        """Index in the image of rho(g), for each element g."""
        return [self.image.index(m) for m in self.rho]

    def character_key(self, k: int) -> tuple:
        """How the generators act on factor k."""
        factor = self.torus[k]
        return tuple(
            factor.character_value(units[k]) for units in self._generator_units
        )

    @property
    def characters(self) -> List[tuple]:
        return [self.character_key(k) for k in range(len(self.torus))]

    def is_scalar_on(self, k: int) -> bool:
        factor = self.torus[k]
        return all(factor.is_scalar(units[k]) for units in self.factor_units)

    def permuted(self, sigma: Sequence[int]) -> "DiagonalAction":
        """The same action after moving factor k to position sigma[k]."""
        assignment = []
        for row in self.assignment:
            new_row = [None] * len(row)
            for k, target in enumerate(sigma):
                new_row[target] = row[k]
            assignment.append(new_row)
        return DiagonalAction(self.torus.permuted(sigma), self.group, assignment)


class TranslationCocycle:
    """A 1-cocycle z: G -> T stored as its full table of torsion points.

    Parameters
    ----------
    action : DiagonalAction
        The holonomy action.

    values : Sequence
        Numerator tuples (or TorsionPoints) for every group element, in the
        action's element order.

    modulus : int
        The common denominator of the values.

    validate : bool, optional
        Check z(1) = 0 and z(gh) = z(g) + rho(g) z(h). The default is True.
    """

    def __init__(
        self,
        action: DiagonalAction,
        values: Sequence,
        modulus: int,
        validate: bool = True,
    ) -> None:
        self.action = action
        self.modulus = modulus
        rows = []
        for v in values:
            if isinstance(v, TorsionPoint):
                v = v.rescale(modulus).numerators
            rows.append(tuple(int(a) % modulus for a in v))
        self.values: Tuple[Tuple[int, ...], ...] = tuple(rows)

        if len(self.values) != len(action):
            raise CocycleError(
                f"Expected {len(action)} translation values, got {len(self.values)}."
            )
        if any(len(v) != action.rank for v in self.values):
            raise CocycleError(f"Translation values must have length {action.rank}.")
        if validate:
            self.validate()

    @classmethod
    def from_generators(
        cls, action: DiagonalAction, values: Sequence, modulus: int
    ) -> "TranslationCocycle":
        """Completes a cocycle from its values on the group generators.

        Raises
        ------
        CocycleError
            When the values do not extend to a cocycle, naming the first
            failing pair.
        """
        gens = action.generator_indices
        if len(values) != len(gens):
            raise CocycleError(
                f"Expected values for {len(gens)} generators, got {len(values)}."
            )
        gen_values = []
        for v in values:
            if isinstance(v, TorsionPoint):
                v = v.rescale(modulus).numerators
            if len(v) != action.rank:
                raise CocycleError(
                    f"Translation values must have length {action.rank}."
                )
            gen_values.append(tuple(v))

        table = {0: (0,) * action.rank}
        frontier = [0]
        while frontier:
            new = []
            for x in frontier:
                for g, zg in zip(gens, gen_values):
                    y = action.multiply(x, g)
                    rho_zg = action.rho[x].apply(zg)
                    candidate = tuple(
                        (a + b) % modulus for a, b in zip(table[x], rho_zg)
                    )
                    if y not in table:
                        table[y] = candidate
                        new.append(y)
                    elif table[y] != candidate:
                        raise CocycleError(
                            "Cocycle identity fails for the pair "
                            + f"({action.label(x)}, {action.label(g)})."
                        )
            frontier = new
        return cls(action, [table[i] for i in range(len(action))], modulus)

    @classmethod
    def from_cochain(
        cls, action: DiagonalAction, cochain: Sequence[int], modulus: int
    ) -> "TranslationCocycle":
        """Builds a cocycle from a normalized 1-cochain vector."""
        n = action.rank
        values = [(0,) * n] + [
            tuple(cochain[(i - 1) * n : i * n]) for i in range(1, len(action))
        ]
        return cls(action, values, modulus, validate=False)

    @classmethod
    def zero(cls, action: DiagonalAction, modulus: int = 1) -> "TranslationCocycle":
        return cls(action, [(0,) * action.rank] * len(action), modulus, validate=False)

    def validate(self) -> None:
        action, m = self.action, self.modulus
        if any(self.values[0]):
            raise CocycleError("The identity must act without translation.")
        for i in range(len(action)):
            for j in range(len(action)):
                lhs = self.values[action.multiply(i, j)]
                rho_zj = action.rho[i].apply(self.values[j])
                rhs = tuple((a + b) % m for a, b in zip(self.values[i], rho_zj))
                if lhs != rhs:
                    raise CocycleError(
                        "Cocycle identity fails for the pair "
                        + f"({action.label(i)}, {action.label(j)})."
                    )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TranslationCocycle):
            return NotImplemented
        return (self.modulus, self.values) == (other.modulus, other.values)

    def __hash__(self) -> int:
        return hash((self.modulus, self.values))

    def __repr__(self) -> str:
        gens = ", ".join(
            f"{self.action.label(i)}: {self.values[i]}"
            for i in self.action.generator_indices
        )
        return f"TranslationCocycle(1/{self.modulus} * {{{gens}}})"

    def __len__(self) -> int:
        return len(self.values)

    def value(self, element: Union[int, Sequence[int]]) -> TorsionPoint:
        return TorsionPoint(self.modulus, self.values[self.action.index(element)])

    def factor_value(self, element, k: int) -> TorsionPoint:
        """The translation of an element on factor k alone."""
        return self.value(element).restrict(self.action.torus.block(k))

    def generator_values(self) -> List[Tuple[int, ...]]:
        return [self.values[i] for i in self.action.generator_indices]

    def cochain(self) -> Tuple[int, ...]:
        return tuple(a for v in self.values[1:] for a in v)

    def sort_key(self) -> tuple:
        return self.values

    def rescaled(self, modulus: int) -> "TranslationCocycle":
        points = [TorsionPoint(self.modulus, v).rescale(modulus) for v in self.values]
        return TranslationCocycle(self.action, points, modulus, validate=False)

    def star(self, A: IntMatrix, phi: Sequence[int]) -> "TranslationCocycle":
        """The cocycle g -> A z(phi^-1(g)) for a normalizer element acting
        by A and inducing the permutation phi of the group elements."""
        values = [None] * len(self.values)
        for i, j in enumerate(phi):
            values[j] = A.apply(self.values[i])
        return TranslationCocycle(self.action, values, self.modulus, validate=False)


@dataclass(frozen=True)
class CrystalGroup:
    """The Bieberbach group generated by the lattice and the affine maps
    x -> rho(g) x + z(g)."""

    torus: TorusSpec
    action: DiagonalAction
    cocycle: TranslationCocycle

    def __post_init__(self):
        if self.action.torus is not self.torus or self.cocycle.action is not self.action:
            raise CocycleError("Torus, action and cocycle do not belong together.")

    @classmethod
    def from_cocycle(cls, cocycle: TranslationCocycle) -> "CrystalGroup":
        return cls(cocycle.action.torus, cocycle.action, cocycle)

    @property
    def holonomy_order(self) -> int:
        return len(self.action)


@lru_cache(maxsize=8192)
def fixed_point_criterion(rho_g: IntMatrix) -> Tuple[Tuple[int, ...], ...]:
    """Rows of U for the zero rows of D, where U (rho_g - I) V = D.

    The affine map x -> rho_g x + v has a fixed point exactly when each
    returned row has integral product with v.
    """
    A = rho_g - IntMatrix.identity(rho_g.rows)
    snf = smith_decomposition(A)
    return tuple(snf.U.row(i) for i in range(snf.rank, A.rows))


def element_has_fixed_point(
    rho_g: IntMatrix, v: Union[TorsionPoint, RatVector, Sequence]
) -> bool:
    """Decides whether x -> rho_g x + v has a fixed point on R^n / Z^n."""
    if len(v) != rho_g.rows:
        raise ValueError(
            f"Translation of length {len(v)} for a degree {rho_g.rows} matrix."
        )
    rows = fixed_point_criterion(rho_g)
    if isinstance(v, TorsionPoint):
        m = v.modulus
        return all(
            sum(r * a for r, a in zip(row, v.numerators)) % m == 0 for row in rows
        )
    v = [Fraction(a) for a in v]
    return all(
        sum(r * a for r, a in zip(row, v)).denominator == 1 for row in rows
    )


def first_fixed_element(C: CrystalGroup) -> Optional[int]:
    """The first non-identity element with a fixed point, or None."""
    action, z = C.action, C.cocycle
    for i in range(1, len(action)):
        if element_has_fixed_point(action.rho[i], z.value(i)):
            return i
    return None


def is_free_action(C: CrystalGroup) -> bool:
    """True when no non-identity element has a fixed point on T."""
    return first_fixed_element(C) is None


def _stacked_generators(action: DiagonalAction) -> IntMatrix:
    identity = IntMatrix.identity(action.rank)
    blocks = [action.rho[i] - identity for i in action.generator_indices]
    if not blocks:
        return IntMatrix.zeros(0, action.rank)
    return IntMatrix.vstack(blocks)


def fixed_point_group(
    C: Union[CrystalGroup, TorusSpec], action: DiagonalAction = None
) -> Tuple[AbelianStructure, int]:
    """The group T^G of torus points fixed by every element.

    Parameters
    ----------
    C : CrystalGroup | TorusSpec
        A crystal group, or a torus given together with an action.

    action : DiagonalAction, optional
        Required when a torus is passed.

    Returns
    -------
    structure : AbelianStructure
        The finite part of T^G.

    betti1 : int
        The rank of the fixed lattice L^G, which is the dimension of the
        identity component of T^G.
    """
    if isinstance(C, CrystalGroup):
        action = C.action
    elif action is None:
        raise ValueError("An action is needed to compute T^G of a torus.")
    snf = smith_decomposition(_stacked_generators(action))
    structure = AbelianStructure(tuple(d for d in snf.diagonal if d > 1))
    return structure, action.rank - snf.rank


def fixed_point_generators(action: DiagonalAction) -> List[TorsionPoint]:
    """Generators of the finite part of T^G, one per invariant factor."""
    snf = smith_decomposition(_stacked_generators(action))
    return [
        TorsionPoint(d, snf.V.column(i))
        for i, d in enumerate(snf.diagonal)
        if d > 1
    ]
