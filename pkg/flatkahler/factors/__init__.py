from .factor import AbstractFactor, TorusFactor, FactorError
from .curves import EllipticCurve, GenericCurve, GaussCurve, EisensteinCurve
