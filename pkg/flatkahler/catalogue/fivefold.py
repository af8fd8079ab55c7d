from flatkahler.family import FlatKahlerFamily
from flatkahler.generator import Generator


# Unit exponents of the two generators on E_xi^5 (xi -> 4, xi^2 -> 2)
ACTIONS = {
    "G": [[0, 4, 4, 4, 4], [4, 0, 4, 2, 2]],
    "G'": [[0, 4, 4, 4, 2], [4, 0, 4, 2, 4]],
}


class ParametricFivefold(Generator):
    """Two Z3^2 actions on E_xi^5 with the same integral holonomy.

    For G the last two factors carry the same character, so the
    normalizer contains all automorphisms of E_4 x E_5 and is infinite.
    For G' the characters differ and the normalizer is finite, of order
    6^5 * 2.
    """

    name = "fivefold"

    def __init__(self, **kwargs) -> None:
        self.variant = "G"

        # Translations of the elements fixing each factor
        self.translation = (1, 2)
        self.with_cocycle = True

        # The finite normalizer of G' has an image of order 15552
        self.bound = 20000

        # Complete instantiation
        super().__init__(**kwargs)

    def create_instance(self) -> FlatKahlerFamily:
        if self.variant not in ACTIONS:
            raise Exception(f"Unrecognised fivefold variant: {self.variant}")

        family = self.new_family(f"fivefold_{self.variant}")
        for _ in range(5):
            family.add_factor("eisenstein")
        family.set_holonomy([3, 3], ACTIONS[self.variant])

        if self.with_cocycle:
            p, zero = tuple(self.translation), (0, 0)
            family.set_cocycle(
                [[*p] + [*zero] * 4, [*zero] + [*p] * 4], modulus=3
            )
        return family


if __name__ == "__main__":
    for variant in ACTIONS:
        fivefold = ParametricFivefold(variant=variant).create_instance()
        N = fivefold.normalizer
        print(f"{variant}: normalizer {N.description()}, order {N.order}")
