from flatkahler.family import FlatKahlerFamily
from flatkahler.generator import Generator


class ParametricZ3Fourfold(Generator):
    """The fourfold E_xi^4 / G~ with G = Z3^2 generated by (1, xi, xi, xi)
    and (xi, 1, xi, xi^2).

    Every non-identity element acts trivially on exactly one factor, so a
    class is special when its translation there is a nonzero 3-torsion
    point fixed by xi. The translations a, b, c, d sit on factors 1 to 4,
    with a on the first generator and b, c, d on the second.
    """

    name = "fourfold_z3"

    def __init__(self, **kwargs) -> None:
        # Translations, as numerators over 3 in the basis (1, xi)
        self.a = (1, 2)
        self.b = (1, 2)
        self.c = (1, 2)
        self.d = (1, 2)
        self.with_cocycle = True

        # Complete instantiation
        super().__init__(**kwargs)

    def create_instance(self) -> FlatKahlerFamily:
        family = self.new_family()
        for _ in range(4):
            family.add_factor("eisenstein")

        # xi is the exponent 4 of the unit generator -xi
        family.set_holonomy([3, 3], [[0, 4, 4, 4], [4, 0, 4, 2]])

        if self.with_cocycle:
            zero = (0, 0)
            family.set_cocycle(
                [
                    [*self.a, *zero, *zero, *zero],
                    [*zero, *self.b, *self.c, *self.d],
                ],
                modulus=3,
            )
        return family


if __name__ == "__main__":
    generator = ParametricZ3Fourfold(verbosity=1)
    fourfold = generator.create_instance()
    report = fourfold.classify()
    print(f"Special classes: {report.special_class_count}, m = {report.m}")
    print(f"|Aut(M)| = {fourfold.automorphisms().aut_order}")
