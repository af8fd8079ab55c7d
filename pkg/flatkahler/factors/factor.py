from abc import abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Union
from flatkahler.linalg import IntMatrix
from flatkahler.groups import (
    DEFAULT_BOUND,
    FiniteMatrixGroup,
    ClosureExceedsBound,
    generate_closure,
)
from flatkahler.factors.constants import CUSTOM_FACTOR


class FactorError(ValueError):
    """Raised for invalid torus factor declarations."""


class AbstractFactor:
    factortype = None

    @abstractmethod
    def __init__(self, **kwargs) -> None:
        pass

    @abstractmethod
    def __repr__(self):
        pass

    @abstractmethod
    def __str__(self):
        pass

    @property
    @abstractmethod
    def factortype(self):
        # This is a placeholder for a class variable defining the factor type
        pass

    @abstractmethod
    def unit(self, exponents):
        """Returns the unit with the given exponents of the unit generators."""
        pass

    @abstractmethod
    def character_value(self, unit: IntMatrix):
        """Returns a hashable label for how a unit acts, comparable between
        factors of the same kind."""
        pass

    @abstractmethod
    def to_dict(self):
        """Returns the factor description used in manifold spec files."""
        pass


class TorusFactor(AbstractFactor):
    """A complex torus factor given by its lattice and a finite group of
    automorphisms fixing the origin.

    Parameters
    ----------
    unit_generators : Sequence
        Integer matrices generating the declared unit group, in the lattice
        basis. Minus the identity is appended when the generators do not
        already produce it.

    rank : int, optional
        The lattice rank 2d. Inferred from the generators when omitted.

    iso_tag : str, optional
        Factors with equal tags are declared biholomorphic. The default is
        None, in which case the torus assigns a unique tag.

    aut0_infinite : bool, optional
        Flag factors whose full automorphism group is infinite. The unit
        generators then span a chosen finite subgroup. The default is False.

    bound : int, optional
        Closure bound for the unit group. The default is DEFAULT_BOUND.
    """

    factortype = CUSTOM_FACTOR
    isogeny_field = None

    def __init__(
        self,
        unit_generators: Sequence = (),
        rank: int = None,
        iso_tag: str = None,
        aut0_infinite: bool = False,
        bound: int = DEFAULT_BOUND,
        name: str = None,
    ) -> None:
        declared = [
            g if isinstance(g, IntMatrix) else IntMatrix(g) for g in unit_generators
        ]
        if rank is None:
            if not declared:
                raise FactorError("A custom factor needs a rank or unit generators.")
            rank = declared[0].rows
        if rank <= 0 or rank % 2:
            raise FactorError(f"Lattice rank {rank} is not a positive even number.")

        self.lattice_rank = rank
        self.iso_tag = iso_tag
        self.aut0_infinite = bool(aut0_infinite)
        self.name = name
        self.declared_generators: List[IntMatrix] = declared

        for k, g in enumerate(declared):
            if g.shape != (rank, rank):
                raise FactorError(
                    f"Unit generator {k + 1} has shape {g.shape}, "
                    + f"expected ({rank}, {rank})."
                )
            if not g.is_unimodular():
                raise FactorError(
                    f"Unit generator {k + 1} is not invertible over the integers."
                )
            if g.order(bound=bound) is None:
                raise FactorError(f"Unit generator {k + 1} has infinite order.")

        minus_identity = -IntMatrix.identity(rank)
        generators = list(declared)
        try:
            units = generate_closure(generators, bound=bound, degree=rank)
            if minus_identity not in units:
                generators.append(minus_identity)
                units = generate_closure(generators, bound=bound, degree=rank)
        except ClosureExceedsBound:
            raise FactorError(
                f"The declared unit group has more than {bound} elements."
            ) from None
        if not units.is_abelian():
            raise FactorError("Only abelian unit groups are supported.")

        self.unit_generators: List[IntMatrix] = generators
        self.unit_orders: List[int] = [g.order(bound=bound) for g in generators]
        self.units: FiniteMatrixGroup = units

    def __repr__(self):
        s = f"{self.factortype} factor of rank {self.lattice_rank}"
        if self.iso_tag:
            s += f" (tagged '{self.iso_tag}')"
        return s

    def __str__(self):
        if self.name:
            return self.name
        return self.iso_tag or f"{self.factortype} factor"

    @property
    def dimension(self) -> int:
        """The complex dimension."""
        return self.lattice_rank // 2

    @property
    def unit_order(self) -> int:
        return len(self.units)

    @property
    def endomorphism_basis(self) -> List[IntMatrix]:
        """A Z-basis of the endomorphisms used to build elementary
        matrices between biholomorphic factors."""
        return [IntMatrix.identity(self.lattice_rank)]

    def unit(self, exponents: Union[int, Sequence[int]]) -> IntMatrix:
        if isinstance(exponents, int):
            exponents = [exponents]
        exponents = list(exponents)
        if len(exponents) == len(self.declared_generators) < len(
            self.unit_generators
        ):
            exponents.append(0)
        if len(exponents) != len(self.unit_generators):
            raise FactorError(
                f"Expected {len(self.declared_generators)} unit exponents for "
                + f"{self!r}, got {len(exponents)}."
            )

        result = IntMatrix.identity(self.lattice_rank)
        for g, order, e in zip(self.unit_generators, self.unit_orders, exponents):
            if not 0 <= e < order:
                raise FactorError(
                    f"Exponent {e} out of range for a unit generator of order "
                    + f"{order} on {self!r}."
                )
            result = result @ g.power(e)
        return result

    def contains(self, matrix: IntMatrix) -> bool:
        return matrix in self.units

    def is_scalar(self, unit: IntMatrix) -> bool:
        identity = IntMatrix.identity(self.lattice_rank)
        return unit == identity or unit == -identity

    def character_value(self, unit: IntMatrix):
        return unit

    def may_be_isogenous(self, other: "TorusFactor") -> bool:
        """False when the two factors are known not to be isogenous."""
        if self.lattice_rank != other.lattice_rank:
            return False
        mine, theirs = self.isogeny_field, other.isogeny_field
        if mine and theirs:
            return mine == theirs
        if mine or theirs:
            # A CM curve is never isogenous to a generic curve
            return CUSTOM_FACTOR in (self.factortype, other.factortype)
        return True

    def same_kind(self, other: "TorusFactor") -> bool:
        """True when the factors have the same type and unit group."""
        return (
            self.factortype == other.factortype
            and self.lattice_rank == other.lattice_rank
            and self.unit_generators == other.unit_generators
            and self.aut0_infinite == other.aut0_infinite
        )

    def to_dict(self) -> Dict[str, Any]:
        description = {
            "type": self.factortype,
            "rank": self.lattice_rank,
            "units": [g.tolist() for g in self.declared_generators],
        }
        if self.iso_tag is not None:
            description["iso_tag"] = self.iso_tag
        if self.aut0_infinite:
            description["aut0_infinite"] = True
        return description
