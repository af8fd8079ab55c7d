from flatkahler import utilities
from flatkahler.groups import DEFAULT_BOUND, AbstractAbelianGroup
from flatkahler.factors import TorusFactor, FactorError
from flatkahler.torus import TorusSpec, make_torus, make_factor
from flatkahler.cohomology import CohomologyGroup, lattice_cohomology, torus_h1
from flatkahler.crystal import (
    CrystalGroup,
    DiagonalAction,
    TranslationCocycle,
    first_fixed_element,
)
from flatkahler.classifier import (
    AutomorphismReport,
    ClassificationReport,
    NormalizerModel,
    classify_manifolds,
    normalizer_model,
    automorphism_report,
)
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union


class FlatKahlerFamily:
    """Flat Kahler manifolds T / G~ sharing a torus and a holonomy action.

    Factors are added one at a time, then the holonomy is set and the
    family is built. A cocycle is only needed for automorphism and
    freeness questions about a single manifold.
    """

    def __init__(self, **kwargs) -> None:
        # Family attributes
        self.factors: List[TorusFactor] = []
        self.name = "family"
        self.verbosity = 1
        self.bound = DEFAULT_BOUND
        self.processes = 1
        self.non_isogenous: Union[str, List[Sequence[str]]] = []

        # Holonomy and translations
        self.cyclic_orders: Optional[Tuple[int, ...]] = None
        self.assignment = None
        self.cocycle_values = None
        self.cocycle_modulus = None

        # Built objects
        self.torus: Optional[TorusSpec] = None
        self.action: Optional[DiagonalAction] = None
        self.cocycle: Optional[TranslationCocycle] = None
        self._h1: Optional[CohomologyGroup] = None
        self._normalizer: Optional[NormalizerModel] = None
        self.classification: Optional[ClassificationReport] = None

        # Internal attributes
        self._built = False
        self._factor_counts = {}

        for item in kwargs:
            setattr(self, item, kwargs[item])

    def __repr__(self):
        basestr = self.__str__()
        if len(self.factors) > 0:
            factorstr = ", ".join(f"{c} {t}" for t, c in self._factor_counts.items())
        else:
            factorstr = "no factors"
        return f"{basestr} ({factorstr})"

    def __str__(self) -> str:
        s = f"Flat Kahler {self.name}"
        if self.cyclic_orders is not None:
            group = AbstractAbelianGroup(self.cyclic_orders)
            s += f" with holonomy {group}"
        return s

    def configure(
        self,
        name: str = None,
        verbosity: int = 1,
        bound: int = None,
        processes: int = None,
    ):
        """Configure the FlatKahlerFamily instance."""
        if name is not None:
            self.name = name
        if bound is not None:
            self.bound = bound
        if processes is not None:
            self.processes = processes

        self.verbosity = verbosity

    def add_factor(self, factor: Union[str, dict, TorusFactor], name: str = None) -> None:
        """Adds a torus factor.

        Parameters
        ----------
        factor : str | dict | TorusFactor
            A preset name ("generic", "gauss" or "eisenstein"), a factor
            description mapping, or a factor instance.

        name : str, optional
            A name for the factor. The default is None.
        """
        factor = make_factor(factor, self.bound)
        if name is not None:
            factor.name = name
        self.factors.append(factor)
        count = self._factor_counts.get(factor.factortype, 0) + 1
        self._factor_counts[factor.factortype] = count
        self._built = False

        if self.verbosity > 1:
            print(f"Added new {factor.factortype} factor ({factor.name or count}).")

    def declare_non_isogenous(self, *tags: str) -> None:
        """Declares iso tags pairwise non-isogenous. Passing "all" declares
        every pair."""
        if tags == ("all",):
            self.non_isogenous = "all"
        elif self.non_isogenous != "all":
            self.non_isogenous = list(self.non_isogenous) + [
                (a, b) for i, a in enumerate(tags) for b in tags[i + 1 :]
            ]
        self._built = False

    def set_holonomy(self, cyclic_orders: Sequence[int], assignment: Sequence) -> None:
        """Sets the holonomy group Z/m1 x ... x Z/mr and the unit exponents
        of each generator on each factor."""
        self.cyclic_orders = tuple(cyclic_orders)
        self.assignment = [list(row) for row in assignment]
        self._built = False

    def set_cocycle(self, values: Sequence[Sequence[int]], modulus: int) -> None:
        """Sets translations on the group generators, as numerators over
        a common modulus."""
        self.cocycle_values = [tuple(v) for v in values]
        self.cocycle_modulus = modulus
        self._built = False

    def build(self) -> None:
        """Validates and builds the torus, the action and the cocycle."""
        if not self.factors:
            raise FactorError("The family has no torus factors.")
        if self.cyclic_orders is None:
            raise Exception("No holonomy has been set.")

        if self.verbosity > 0:
            utilities.print_banner()
            print(f"Building {self.name}.")

        self.torus = make_torus(self.factors, self.non_isogenous, bound=self.bound)
        self.action = DiagonalAction(self.torus, self.cyclic_orders, self.assignment)
        self.cocycle = None
        if self.cocycle_values is not None:
            self.cocycle = TranslationCocycle.from_generators(
                self.action, self.cocycle_values, self.cocycle_modulus
            )
        self._h1 = None
        self._normalizer = None
        self.classification = None
        self._built = True

        if self.verbosity > 0:
            print(f"  Torus {self.torus} of complex dimension {self.torus.dimension}.")
            print(f"  Holonomy {self.action.group} of order {len(self.action)}.")

    def _check_built(self):
        if not self._built:
            self.build()

    @property
    def crystal(self) -> CrystalGroup:
        self._check_built()
        if self.cocycle is None:
            raise Exception("No cocycle has been set.")
        return CrystalGroup.from_cocycle(self.cocycle)

    @property
    def normalizer(self) -> NormalizerModel:
        self._check_built()
        if self._normalizer is None:
            self._normalizer = normalizer_model(
                self.torus, self.action, verbosity=self.verbosity
            )
        return self._normalizer

    def cohomology(self) -> Dict[str, Any]:
        """H^1(G, T) together with H^1(G, L) and H^2(G, L)."""
        self._check_built()
        if self._h1 is None:
            self._h1 = torus_h1(self.torus, self.action)
        lattice_h1 = lattice_cohomology(self.action, 1)
        lattice_h2 = lattice_cohomology(self.action, 2)
        if self.verbosity > 0:
            print(f"H^1(G, T) = {self._h1.structure}")
        return {"H1_T": self._h1, "H1_L": lattice_h1, "H2_L": lattice_h2}

    def classify(self) -> ClassificationReport:
        """Classifies the manifolds of the family up to biholomorphism."""
        self._check_built()
        self.classification = classify_manifolds(
            self.torus,
            self.action,
            bound=self.bound,
            processes=self.processes,
            verbosity=self.verbosity,
        )
        self._normalizer = self.classification.normalizer
        if self.verbosity > 0:
            print(f"{self.classification.m} biholomorphism classes.")
        return self.classification

    def automorphisms(self) -> AutomorphismReport:
        """Order data for Aut(M) of the manifold given by the cocycle."""
        return automorphism_report(self.crystal, self.normalizer, bound=self.bound)

    def free_check(self) -> Optional[str]:
        """The label of the first element with a fixed point, or None when
        the cocycle defines a free action."""
        i = first_fixed_element(self.crystal)
        return None if i is None else self.action.label(i)

    def to_csv(self, path: str = None) -> None:
        """Writes the orbit table of the last classification."""
        if self.classification is None:
            self.classify()
        path = path if path else f"{self.name}_orbits.csv"
        utilities.write_orbit_csv(self.classification, path, self.verbosity)
