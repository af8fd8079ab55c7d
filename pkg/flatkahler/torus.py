"""Complex tori as products of declared factors, and their torsion points."""

import itertools
from math import gcd
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, List, Sequence, Tuple, Union
from flatkahler.linalg import IntMatrix, RatVector, solve_linear
from flatkahler.groups import DEFAULT_BOUND
from flatkahler.factors import (
    TorusFactor,
    FactorError,
    GenericCurve,
    GaussCurve,
    EisensteinCurve,
)
from flatkahler.factors.constants import (
    GENERIC_FACTOR,
    GAUSS_FACTOR,
    EISENSTEIN_FACTOR,
    CUSTOM_FACTOR,
)


PRESET_CLASSES = {
    GENERIC_FACTOR: GenericCurve,
    GAUSS_FACTOR: GaussCurve,
    EISENSTEIN_FACTOR: EisensteinCurve,
}

ALL_NON_ISOGENOUS = "all"


@dataclass(frozen=True)
class TorusSpec:
    """The torus T = T_1 x ... x T_k, with lattice the direct sum of the
    factor lattices.

    Parameters
    ----------
    factors : Tuple[TorusFactor, ...]
        The ordered factors.

    non_isogenous : frozenset | str, optional
        Pairs of iso tags declared non-isogenous, or "all". Only consulted
        when two inequivalent factors carry the same holonomy character.
    """

    factors: Tuple[TorusFactor, ...]
    non_isogenous: Union[str, frozenset] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.non_isogenous != ALL_NON_ISOGENOUS:
            pairs = frozenset(frozenset(p) for p in self.non_isogenous)
            object.__setattr__(self, "non_isogenous", pairs)

        # Factors sharing a tag must be interchangeable
        first = {}
        for k, (factor, tag) in enumerate(zip(self.factors, self.tags)):
            if tag in first and not self.factors[first[tag]].same_kind(factor):
                raise FactorError(
                    f"Factors {first[tag] + 1} and {k + 1} share the iso tag "
                    + f"'{tag}' but differ in type or unit group."
                )
            first.setdefault(tag, k)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self) -> Iterator[TorusFactor]:
        return iter(self.factors)

    def __getitem__(self, k: int) -> TorusFactor:
        return self.factors[k]

    def __str__(self) -> str:
        return " x ".join(self.tags)

    @property
    def rank(self) -> int:
        """The total lattice rank."""
        return sum(f.lattice_rank for f in self.factors)

    @property
    def dimension(self) -> int:
        return self.rank // 2

    @property
    def tags(self) -> List[str]:
        """Effective iso tags. Untagged factors get a tag of their own."""
        return [
            f.iso_tag if f.iso_tag is not None else f"{f.factortype}_{k + 1}"
            for k, f in enumerate(self.factors)
        ]

    @property
    def offsets(self) -> List[int]:
        return list(itertools.accumulate([0] + [f.lattice_rank for f in self.factors]))

    def block(self, k: int) -> range:
        """Lattice coordinates belonging to factor k."""
        offsets = self.offsets
        return range(offsets[k], offsets[k + 1])

    def declared_non_isogenous(self, tag_a: str, tag_b: str) -> bool:
        if self.non_isogenous == ALL_NON_ISOGENOUS:
            return True
        return frozenset((tag_a, tag_b)) in self.non_isogenous

    def permuted(self, sigma: Sequence[int]) -> "TorusSpec":
        """Renumbers factors so that old factor k sits at position sigma[k]."""
        factors = [None] * len(self)
        for k, target in enumerate(sigma):
            factors[target] = self.factors[k]
        return TorusSpec(tuple(factors), self.non_isogenous)

    def to_list(self) -> List[Any]:
        return [f.to_dict() for f in self.factors]


def make_factor(description, bound: int) -> TorusFactor:
    if isinstance(description, TorusFactor):
        return description

    if isinstance(description, str):
        description = {"type": description}
    if not isinstance(description, dict):
        raise FactorError(f"Cannot interpret factor description {description!r}.")

    description = dict(description)
    kind = description.pop("type", CUSTOM_FACTOR)
    if kind in PRESET_CLASSES:
        rank = description.pop("rank", 2)
        if rank != 2 or description.pop("units", None):
            raise FactorError(f"The {kind} preset has a fixed rank and unit group.")
        if description.pop("aut0_infinite", False):
            raise FactorError(f"The {kind} preset has a finite automorphism group.")
        unknown = set(description) - {"iso_tag"}
        if unknown:
            raise FactorError(f"Unknown factor keys: {sorted(unknown)}.")
        return PRESET_CLASSES[kind](iso_tag=description.get("iso_tag"))

    if kind != CUSTOM_FACTOR:
        raise FactorError(f"Unrecognised factor type: {kind}")
    unknown = set(description) - {"rank", "units", "iso_tag", "aut0_infinite"}
    if unknown:
        raise FactorError(f"Unknown factor keys: {sorted(unknown)}.")
    return TorusFactor(
        unit_generators=description.get("units", []),
        rank=description.get("rank"),
        iso_tag=description.get("iso_tag"),
        aut0_infinite=description.get("aut0_infinite", False),
        bound=bound,
    )


def make_torus(
    descriptions: Iterable,
    non_isogenous: Union[str, Iterable[Sequence[str]]] = (),
    bound: int = DEFAULT_BOUND,
) -> TorusSpec:
    """Builds a torus from factor descriptions.

    Parameters
    ----------
    descriptions : Iterable
        Each entry is a preset name ("generic", "gauss" or "eisenstein"),
        a TorusFactor, or a mapping with the keys type, iso_tag, rank,
        units and aut0_infinite.

    non_isogenous : Iterable[Sequence[str]] | str, optional
        Pairs of iso tags declared non-isogenous, or "all".

    Returns
    -------
    TorusSpec
        The validated torus.

    Raises
    ------
    FactorError
        For odd ranks, unit generators of infinite order, and other
        malformed descriptions.
    """
    factors = tuple(make_factor(d, bound) for d in descriptions)
    if non_isogenous != ALL_NON_ISOGENOUS:
        non_isogenous = frozenset(frozenset(p) for p in non_isogenous)
    return TorusSpec(factors, non_isogenous)


@dataclass(frozen=True, order=True)
class TorsionPoint:
    """The point (1/modulus) * numerators of R^n / Z^n."""

    modulus: int
    numerators: Tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"Torsion modulus {self.modulus} must be positive.")
        object.__setattr__(
            self, "numerators", tuple(int(a) % self.modulus for a in self.numerators)
        )

    @classmethod
    def zero(cls, rank: int, modulus: int = 1) -> "TorsionPoint":
        return cls(modulus, (0,) * rank)

    @classmethod
    def from_ratvector(cls, vector: RatVector) -> "TorsionPoint":
        m = vector.denominator
        return cls(m, vector.numerators(m))

    def __len__(self) -> int:
        return len(self.numerators)

    def __str__(self) -> str:
        return f"(1/{self.modulus}){self.numerators}"

    def to_ratvector(self) -> RatVector:
        return RatVector.from_numerators(self.numerators, self.modulus)

    def is_zero(self) -> bool:
        return not any(self.numerators)

    @property
    def order(self) -> int:
        """The additive order of the point."""
        g = self.modulus
        for a in self.numerators:
            g = gcd(g, a)
        return self.modulus // g

    def rescale(self, modulus: int) -> "TorsionPoint":
        """Expresses the point over another modulus."""
        scaled = [Fraction(a * modulus, self.modulus) for a in self.numerators]
        if any(s.denominator != 1 for s in scaled):
            raise ValueError(f"{self} is not a {modulus}-torsion point.")
        return TorsionPoint(modulus, tuple(s.numerator for s in scaled))

    def _align(self, other: "TorsionPoint") -> Tuple[int, tuple, tuple]:
        m = self.modulus * other.modulus // gcd(self.modulus, other.modulus)
        return (
            m,
            tuple(a * (m // self.modulus) for a in self.numerators),
            tuple(b * (m // other.modulus) for b in other.numerators),
        )

    def __add__(self, other: "TorsionPoint") -> "TorsionPoint":
        m, a, b = self._align(other)
        return TorsionPoint(m, tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "TorsionPoint") -> "TorsionPoint":
        m, a, b = self._align(other)
        return TorsionPoint(m, tuple(x - y for x, y in zip(a, b)))

    def __neg__(self) -> "TorsionPoint":
        return TorsionPoint(self.modulus, tuple(-a for a in self.numerators))

    def transform(self, matrix: IntMatrix) -> "TorsionPoint":
        """Applies a lattice automorphism."""
        return TorsionPoint(self.modulus, matrix.apply(self.numerators))

    def restrict(self, positions: Iterable[int]) -> "TorsionPoint":
        return TorsionPoint(self.modulus, tuple(self.numerators[i] for i in positions))


def _rank_of(T: Union[TorusSpec, TorusFactor]) -> int:
    return T.rank if isinstance(T, TorusSpec) else T.lattice_rank


def torsion_points(T: Union[TorusSpec, TorusFactor], m: int) -> Iterator[TorsionPoint]:
    """Enumerates all m^rank points of T[m] in lexicographic order."""
    if m < 1:
        raise ValueError(f"Torsion order {m} must be positive.")
    for numerators in itertools.product(range(m), repeat=_rank_of(T)):
        yield TorsionPoint(m, numerators)


def fixed_torsion_under_unit(u: IntMatrix, m: int) -> List[TorsionPoint]:
    """All x in T[m] with u x = x, sorted."""
    if m < 1:
        raise ValueError(f"Torsion order {m} must be positive.")
    A = u - IntMatrix.identity(u.rows)
    solutions = solve_linear(A, [0] * u.rows, modulus=m)
    return [TorsionPoint(m, x) for x in solutions.points()]


def unit_orbits_on_torsion(factor: TorusFactor, m: int) -> List[Tuple[TorsionPoint, ...]]:
    """Orbits of the factor's unit group on its nonzero m-torsion points.

    Each orbit is sorted, and orbits are listed by their smallest point.
    """
    seen = set()
    orbits = []
    for point in torsion_points(factor, m):
        if point.is_zero() or point in seen:
            continue
        orbit = tuple(sorted({point.transform(u) for u in factor.units.elements}))
        seen.update(orbit)
        orbits.append(orbit)
    return orbits
