from fractions import Fraction
from typing import Dict, List, Union, Sequence
from flatkahler.linalg import IntMatrix
from flatkahler.factors.factor import TorusFactor, FactorError
from flatkahler.factors.constants import (
    XI,
    GAUSS_UNIT,
    GENERIC_FACTOR,
    GAUSS_FACTOR,
    EISENSTEIN_FACTOR,
    GENERIC_ANGLE,
    GAUSS_ANGLE,
    EISENSTEIN_ANGLE,
    GAUSS_TAG,
    EISENSTEIN_TAG,
    GAUSS_FIELD,
    EISENSTEIN_FIELD,
)


class EllipticCurve(TorusFactor):
    """An elliptic curve C / (Z + tau Z) with a cyclic unit group.

    Coordinates are taken in the basis (1, tau), and units are addressed by
    a single exponent of the unit generator.
    """

    generator = None
    angle = None
    default_tag = None

    def __init__(self, iso_tag: str = None, name: str = None) -> None:
        super().__init__(
            [IntMatrix(self.generator)],
            rank=2,
            iso_tag=iso_tag if iso_tag is not None else self.default_tag,
            name=name,
        )
        # Exponent of the generator for every unit
        self._exponents: Dict[IntMatrix, int] = {}
        u = IntMatrix.identity(2)
        for k in range(self.unit_order):
            self._exponents[u] = k
            u = u @ self.unit_generators[0]

    def unit(self, exponents: Union[int, Sequence[int]]) -> IntMatrix:
        if not isinstance(exponents, int):
            if len(exponents) != 1:
                raise FactorError(f"A {self.factortype} factor takes one exponent.")
            exponents = exponents[0]
        if not 0 <= exponents < self.unit_order:
            raise FactorError(
                f"Exponent {exponents} out of range for a {self.factortype} "
                + f"factor (unit group order {self.unit_order})."
            )
        return self.unit_generators[0].power(exponents)

    def exponent(self, unit: IntMatrix) -> int:
        """Inverse of :meth:`unit`."""
        try:
            return self._exponents[unit]
        except KeyError:
            raise FactorError(f"{unit!r} is not a unit of {self!r}.") from None

    def character_value(self, unit: IntMatrix) -> Fraction:
        """The fraction of a turn by which the unit rotates the curve."""
        return (self.exponent(unit) * self.angle) % 1

    def to_dict(self):
        if self.iso_tag == self.default_tag:
            return self.factortype
        return {"type": self.factortype, "iso_tag": self.iso_tag}


class GenericCurve(EllipticCurve):
    """An elliptic curve without complex multiplication, units {1, -1}."""

    factortype = GENERIC_FACTOR
    generator = ((-1, 0), (0, -1))
    angle = GENERIC_ANGLE


class GaussCurve(EllipticCurve):
    """The curve E_i = C / (Z + iZ), units generated by i."""

    factortype = GAUSS_FACTOR
    generator = GAUSS_UNIT
    angle = GAUSS_ANGLE
    default_tag = GAUSS_TAG
    isogeny_field = GAUSS_FIELD

    @property
    def endomorphism_basis(self) -> List[IntMatrix]:
        return [IntMatrix.identity(2), IntMatrix(GAUSS_UNIT)]


class EisensteinCurve(EllipticCurve):
    """The curve E_xi = C / (Z + xi Z), units generated by -xi."""

    factortype = EISENSTEIN_FACTOR
    generator = tuple(tuple(-a for a in row) for row in XI)
    angle = EISENSTEIN_ANGLE
    default_tag = EISENSTEIN_TAG
    isogeny_field = EISENSTEIN_FIELD

    @property
    def endomorphism_basis(self) -> List[IntMatrix]:
        return [IntMatrix.identity(2), IntMatrix(XI)]
