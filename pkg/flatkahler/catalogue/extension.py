from flatkahler.family import FlatKahlerFamily
from flatkahler.generator import Generator


class ParametricProductExtension(Generator):
    """The CHW threefold extended by a complex 2-torus T_3.

    T = E_1 x E_2 x T_3 with generic curves E_1, E_2 and the holonomy
    a = (1, -1, -I), b = (-1, 1, -I). The normalizer is all of Aut_0(T),
    so Aut(M) is finite exactly when Aut_0(T_3) is.
    """

    name = "extension"

    def __init__(self, **kwargs) -> None:
        self.aut0_infinite = False

        # Unit generators of T_3 besides -I
        self.t3_units = []

        # Nonzero 2-torsion points of E_1, E_2 and T_3
        self.a = (1, 0)
        self.b = (1, 0)
        self.c = (1, 0, 0, 0)
        self.with_cocycle = True

        # Complete instantiation
        super().__init__(**kwargs)

    def create_instance(self) -> FlatKahlerFamily:
        name = "extension_infinite" if self.aut0_infinite else "extension_finite"
        family = self.new_family(name)
        family.add_factor("generic")
        family.add_factor("generic")
        family.add_factor(
            {
                "type": "custom",
                "rank": 4,
                "units": list(self.t3_units),
                "iso_tag": "T3",
                "aut0_infinite": self.aut0_infinite,
            }
        )

        # -I on T_3 is the appended unit generator
        minus_identity = [0] * len(self.t3_units) + [1]
        family.set_holonomy([2, 2], [[0, 1, minus_identity], [1, 0, minus_identity]])

        if self.with_cocycle:
            zero = (0, 0)
            family.set_cocycle(
                [[*self.a, *zero, *self.c], [*zero, *self.b, 0, 0, 0, 0]],
                modulus=2,
            )
        return family


if __name__ == "__main__":
    for infinite in [False, True]:
        extension = ParametricProductExtension(aut0_infinite=infinite)
        family = extension.create_instance()
        report = family.automorphisms()
        print(family.name, report.aut_order if report.is_finite else report.reasons)
