from typing import Sequence, Tuple
from flatkahler.family import FlatKahlerFamily
from flatkahler.generator import Generator
from flatkahler.torus import make_factor


def minus_one(factor) -> int:
    """Exponent of -1 for a preset curve."""
    return factor.unit_order // 2


class ParametricCHW(Generator):
    """Complex Hantzsche-Wendt threefolds E_1 x E_2 x E_3 / G~.

    The holonomy Z2^2 is generated by g1 = (1, -1, -1) and
    g2 = (-1, 1, -1). The translations are z(g1) = (a, 0, c) and
    z(g2) = (0, b, 0), so that a, b and c are the translations of g1, g2
    and g1 g2 on the factor each fixes. The action is free exactly when
    all three are nonzero 2-torsion points.
    """

    name = "chw"

    def __init__(self, **kwargs) -> None:
        # Preset names or factor descriptions
        self.curves: Sequence = ("eisenstein", "eisenstein", "eisenstein")

        # 2-torsion points, as numerators over 2 in the basis (1, tau)
        self.a: Tuple[int, int] = (1, 0)
        self.b: Tuple[int, int] = (1, 0)
        self.c: Tuple[int, int] = (1, 0)
        self.with_cocycle = True

        # Complete instantiation
        super().__init__(**kwargs)

    def create_instance(self) -> FlatKahlerFamily:
        family = self.new_family()
        factors = [make_factor(curve, self.bound) for curve in self.curves]
        for factor in factors:
            family.add_factor(factor)

        n1, n2, n3 = (minus_one(f) for f in factors)
        family.set_holonomy([2, 2], [[0, n2, n3], [n1, 0, n3]])

        if self.with_cocycle:
            zero = (0, 0)
            family.set_cocycle(
                [[*self.a, *zero, *self.c], [*zero, *self.b, *zero]], modulus=2
            )
        return family


if __name__ == "__main__":
    # M_1 and M_2 on E_xi x E_xi x E_i
    for c in [(1, 0), (1, 1)]:
        generator = ParametricCHW(curves=("eisenstein", "eisenstein", "gauss"), c=c)
        chw = generator.create_instance()
        print(f"c = {c}: |Aut(M)| = {chw.automorphisms().aut_order}")
