"""Normalizers, special classes and their orbits.

Biholomorphism classes of the manifolds T / G~ with a given holonomy action
are the orbits of the normalizer of G in Aut_0(T) on the special classes of
H^1(G, T). A normalizer element n acts on cocycles by

    (n * z)(g) = n z(n^-1 g n).

The normalizer may be infinite, but it acts on N-torsion cocycles through
its finite image in Aut(T[N]) x Aut(G), which is what gets enumerated here.
"""

import itertools
import numpy as np
import multiprocess as mp
from tqdm import tqdm
from math import prod
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
from flatkahler.linalg import IntMatrix, AbelianStructure
from flatkahler.groups import (
    DEFAULT_BOUND,
    FiniteMatrixGroup,
    NotNormalizing,
    conjugation_map,
    generate_closure,
)
from flatkahler.torus import TorusSpec
from flatkahler.crystal import (
    CocycleError,
    CrystalGroup,
    DiagonalAction,
    NonFreeAction,
    TranslationCocycle,
    first_fixed_element,
    fixed_point_criterion,
    fixed_point_group,
)
from flatkahler.cohomology import CohomologyGroup, torus_h1


class IsogenyAmbiguity(ValueError):
    """Raised when factors with the same character might be isogenous
    without being declared biholomorphic."""


class UnsupportedNormalizer(ValueError):
    """Raised when the normalizer cannot be modelled."""


@dataclass(frozen=True)
class IsotypicBlocks:
    """Factors grouped by holonomy character and iso tag."""

    blocks: Tuple[Tuple[int, ...], ...]
    keys: Tuple[tuple, ...]

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> List[int]:
        return [len(b) for b in self.blocks]

    def block_of(self, k: int) -> Tuple[int, ...]:
        for block in self.blocks:
            if k in block:
                return block
        raise IndexError(f"Factor {k} is not in any block.")


def isotypic_blocks(T: TorusSpec, action: DiagonalAction) -> IsotypicBlocks:
    """Groups factors by (character, iso tag).

    Raises
    ------
    UnsupportedNormalizer
        For non-abelian holonomy.

    IsogenyAmbiguity
        When two factors share a character and a lattice rank but carry
        different tags, unless they are declared non-isogenous.
    """
    if not action.image.is_abelian():
        raise UnsupportedNormalizer("Only abelian holonomy groups are supported.")

    tags = T.tags
    characters = action.characters
    grouped: Dict[tuple, List[int]] = {}
    for k in range(len(T)):
        grouped.setdefault((characters[k], tags[k]), []).append(k)

    for k, l in itertools.combinations(range(len(T)), 2):
        if (
            characters[k] == characters[l]
            and tags[k] != tags[l]
            and T[k].may_be_isogenous(T[l])
            and not T.declared_non_isogenous(tags[k], tags[l])
        ):
            raise IsogenyAmbiguity(
                f"Factors {k + 1} and {l + 1} carry the same character but "
                + f"different iso tags ('{tags[k]}', '{tags[l]}'). Declare them "
                + "non-isogenous or give them the same tag."
            )

    return IsotypicBlocks(
        tuple(tuple(v) for v in grouped.values()), tuple(grouped.keys())
    )


@dataclass(frozen=True)
class FactorPermutation:
    """A factor permutation normalizing G.

    sigma[k] is the new position of factor k, and automorphism[i] is the
    element index of n g_i n^-1.
    """

    sigma: Tuple[int, ...]
    matrix: IntMatrix
    automorphism: Tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return all(k == s for k, s in enumerate(self.sigma))

    def cycles(self) -> str:
        """Cycle notation on 1-based factor numbers."""
        seen, cycles = set(), []
        for k in range(len(self.sigma)):
            if k in seen:
                continue
            cycle = [k]
            seen.add(k)
            while self.sigma[cycle[-1]] != k:
                cycle.append(self.sigma[cycle[-1]])
                seen.add(cycle[-1])
            if len(cycle) > 1:
                cycles.append("(" + " ".join(str(c + 1) for c in cycle) + ")")
        return "".join(cycles) or "()"


def permutation_matrix(T: TorusSpec, sigma: Sequence[int]) -> IntMatrix:
    """Lattice matrix moving factor k to position sigma[k]."""
    entries = [[0] * T.rank for _ in range(T.rank)]
    for k, target in enumerate(sigma):
        for a, b in zip(T.block(target), T.block(k)):
            entries[a][b] = 1
    return IntMatrix(entries, cols=T.rank)


class NormalizerModel:
    """The normalizer of G in Aut_0(T) for a diagonal action.

    It is generated by the unit groups of the factors, the factor
    permutations normalizing G and, for isotypic blocks of size two or
    more, the general linear group over the block's endomorphism ring. The
    last case makes the normalizer infinite.
    """

    def __init__(
        self,
        torus: TorusSpec,
        action: DiagonalAction,
        blocks: IsotypicBlocks,
        permutations: List[FactorPermutation],
        infinite_reasons: List[str],
    ) -> None:
        self.torus = torus
        self.action = action
        self.blocks = blocks
        self.permutations = permutations
        self.infinite_reasons = infinite_reasons
        self._image: Optional[FiniteMatrixGroup] = None
        self._image_bound = None
        self._stack = None

    def __repr__(self) -> str:
        return f"NormalizerModel({self.description()})"

    @property
    def infinite_flag(self) -> bool:
        return bool(self.infinite_reasons)

    @property
    def is_finite(self) -> bool:
        return not self.infinite_reasons

    @property
    def diagonal_part(self) -> List[FiniteMatrixGroup]:
        return [f.units for f in self.torus]

    @property
    def diagonal_order(self) -> int:
        return prod(len(f.units) for f in self.torus)

    @property
    def permutation_order(self) -> int:
        return len(self.permutations)

    @property
    def order(self) -> Optional[int]:
        """The normalizer order, or None when infinite."""
        if self.infinite_flag:
            return None
        return self.diagonal_order * self.permutation_order

    @property
    def centralizing_permutations(self) -> List[FactorPermutation]:
        """Permutations inducing the identity automorphism of G."""
        identity = tuple(range(len(self.action)))
        return [p for p in self.permutations if p.automorphism == identity]

    def description(self) -> str:
        """A short structural description, such as 'Z6^2 x Z4 x| P(2)'."""
        counts: Dict[str, int] = {}
        for f in self.torus:
            name = f"Z{len(f.units)}" if f.units.is_abelian() else f"U{len(f.units)}"
            counts[name] = counts.get(name, 0) + 1
        diagonal = " x ".join(
            name + (f"^{c}" if c > 1 else "") for name, c in counts.items()
        )
        s = diagonal
        if self.permutation_order > 1:
            s = f"({diagonal}) x| P({self.permutation_order})"
        if self.infinite_flag:
            s += ", infinite"
        return s

    def _augmented(self, A: IntMatrix, phi: Sequence[int]) -> IntMatrix:
        n = len(self.action)
        P = [[0] * n for _ in range(n)]
        for i, j in enumerate(phi):
            P[j][i] = 1
        return IntMatrix.block_diagonal([A, IntMatrix(P, cols=n)])

    def image_generators(self) -> List[IntMatrix]:
        """Generators of the image in Aut(T[N]) x Aut(G), each as the
        block matrix diag(A, P_phi)."""
        T = self.torus
        identity_phi = tuple(range(len(self.action)))
        gens = []
        for k, factor in enumerate(T):
            for u in factor.unit_generators:
                blocks = [
                    u if j == k else IntMatrix.identity(f.lattice_rank)
                    for j, f in enumerate(T)
                ]
                gens.append(self._augmented(IntMatrix.block_diagonal(blocks), identity_phi))
        for p in self.permutations:
            if not p.is_identity:
                gens.append(self._augmented(p.matrix, p.automorphism))
        for block in self.blocks:
            for p, q in itertools.permutations(block, 2):
                for E in T[p].endomorphism_basis:
                    entries = IntMatrix.identity(T.rank).tolist()
                    for a, row in zip(T.block(p), E):
                        for b, e in zip(T.block(q), row):
                            entries[a][b] += e
                    gens.append(
                        self._augmented(IntMatrix(entries, cols=T.rank), identity_phi)
                    )
        return gens

    def torsion_image(self, bound: int = DEFAULT_BOUND) -> FiniteMatrixGroup:
        """The finite image acting on N-torsion cocycles, built on demand.

        Raises
        ------
        ClosureExceedsBound
            When the image has more than `bound` elements.
        """
        if self._image is None or self._image_bound != bound:
            N = self.action.exponent
            self._image = generate_closure(
                self.image_generators(),
                bound=bound,
                modulus=N,
                degree=self.torus.rank + len(self.action),
            )
            self._image_bound = bound
            self._stack = None
        return self._image

    def image_order(self, bound: int = DEFAULT_BOUND) -> int:
        return len(self.torsion_image(bound))

    def kernel_order(self, bound: int = DEFAULT_BOUND) -> Optional[int]:
        """Order of the kernel of the normalizer acting on N-torsion
        cocycles, or None when the normalizer is infinite."""
        if self.infinite_flag:
            return None
        image = self.image_order(bound)
        if self.order % image:
            raise AssertionError(
                f"Image order {image} does not divide normalizer order {self.order}."
            )
        return self.order // image

    def image_stack(self, bound: int = DEFAULT_BOUND) -> Tuple[np.ndarray, np.ndarray]:
        """All image elements decoded as (A, phi) arrays."""
        image = self.torsion_image(bound)
        if self._stack is None:
            n = self.torus.rank
            arrays = np.stack([image.array(i) for i in range(len(image))])
            A = arrays[:, :n, :n].astype(np.int64)
            phi = np.argmax(arrays[:, n:, n:], axis=1).astype(np.int64)
            self._stack = (A, phi)
        return self._stack


def normalizer_model(
    T: TorusSpec, action: DiagonalAction, verbosity: int = 0
) -> NormalizerModel:
    """Builds the normalizer of G in Aut_0(T).

    Every factor permutation preserving iso tags is tested by exact set
    equality n G n^-1 = G.
    """
    if action.torus is not T:
        raise ValueError("The action belongs to another torus.")
    blocks = isotypic_blocks(T, action)

    reasons = []
    for block in blocks:
        if len(block) >= 2:
            factors = ", ".join(str(k + 1) for k in block)
            reasons.append(
                f"factors {factors} form an isotypic block of size {len(block)}"
            )
    for k, factor in enumerate(T):
        if factor.aut0_infinite:
            if not action.is_scalar_on(k):
                raise UnsupportedNormalizer(
                    f"Factor {k + 1} has infinite Aut0 and G does not act on it "
                    + "by scalars."
                )
            reasons.append(
                f"factor {k + 1} has infinite Aut0 and G acts on it by scalars"
            )

    # Candidate permutations respect iso tags
    positions: Dict[str, List[int]] = {}
    for k, tag in enumerate(T.tags):
        positions.setdefault(tag, []).append(k)
    classes = list(positions.values())

    image = action.image
    image_positions = action.image_positions()
    element_of = {p: i for i, p in enumerate(image_positions)}

    permutations = []
    candidates = itertools.product(*(itertools.permutations(c) for c in classes))
    for choice in candidates:
        sigma = [0] * len(T)
        for source, target in zip(classes, choice):
            for k, s in zip(source, target):
                sigma[k] = s
        P = permutation_matrix(T, sigma)
        try:
            conj = conjugation_map(image, P)
        except NotNormalizing:
            continue
        automorphism = tuple(
            element_of[conj[image_positions[i]]] for i in range(len(action))
        )
        permutations.append(FactorPermutation(tuple(sigma), P, automorphism))

    if verbosity > 1:
        print(f"  {len(permutations)} factor permutations normalize G.")

    return NormalizerModel(T, action, blocks, permutations, reasons)


class ClassIndex:
    """Vectorized class reduction for N-torsion cocycle tables."""

    def __init__(self, h1: CohomologyGroup) -> None:
        self.R, self.q, self.s = h1.reduction_arrays()
        self.modulus = h1.modulus

    def coordinates(self, tables: np.ndarray) -> np.ndarray:
        """Class coordinates for a stack of tables of shape (E, |G|, n)."""
        X = tables[:, 1:, :].reshape(tables.shape[0], -1)
        return ((X @ self.R.T) % self.q) // self.s

    def star(self, table: np.ndarray, A: np.ndarray, phi: np.ndarray) -> np.ndarray:
        """Applies every image element (A[e], phi[e]) to one table."""
        moved = np.einsum("eij,gj->egi", A, table) % self.modulus
        result = np.empty_like(moved)
        result[np.arange(A.shape[0])[:, None], phi, :] = moved
        return result

    def move(self, tables: np.ndarray, A: np.ndarray, phi: np.ndarray) -> np.ndarray:
        """Applies one image element (A, phi) to a stack of tables."""
        moved = (tables @ A.T) % self.modulus
        result = np.empty_like(moved)
        result[:, phi, :] = moved
        return result


def _table_array(cocycle: TranslationCocycle, modulus: int) -> np.ndarray:
    if cocycle.modulus != modulus:
        cocycle = cocycle.rescaled(modulus)
    return np.array(cocycle.values, dtype=np.int64).reshape(len(cocycle.values), -1)


def _part_masks(part, coords, count, criteria) -> List[Tuple[tuple, int]]:
    """Fixed point masks of the classes of one cohomology summand. Bit i is
    set when element i has a fixed point on this summand."""
    width = len(coords)
    masks = []
    for c in part.classes():
        x = part.representative(c)
        mask = 0
        for i in range(1, count + 1):
            value = x[(i - 1) * width : i * width]
            if all(
                sum(r * a for r, a in zip(row, value)) % part.modulus == 0
                for row in criteria[i]
            ):
                mask |= 1 << i
        masks.append((c, mask))
    return masks


def special_classes(
    T: TorusSpec,
    action: DiagonalAction,
    h1: CohomologyGroup = None,
    processes: int = 1,
    verbosity: int = 0,
) -> List[TranslationCocycle]:
    """Canonical representatives of the classes acting freely on T.

    Freeness is decided summand by summand: an element has a fixed point
    exactly when it has one on every summand of the torus.
    """
    if h1 is None:
        h1 = torus_h1(T, action)
    count = len(action) - 1
    if count == 0:
        return []

    jobs = []
    for part in h1.parts:
        coords = part.positions[: len(part.positions) // count]
        criteria = [()] + [
            fixed_point_criterion(action.rho[i].submatrix(coords, coords))
            for i in range(1, count + 1)
        ]
        jobs.append((part, coords, count, criteria))

    if processes > 1 and len(jobs) > 1:
        with mp.Pool(processes) as pool:
            part_masks = pool.starmap(_part_masks, jobs)
    else:
        part_masks = [_part_masks(*job) for job in jobs]

    full = (1 << (count + 1)) - 2
    total = prod(len(m) for m in part_masks)
    result = []
    combos = itertools.product(*part_masks)
    if verbosity > 0:
        combos = tqdm(combos, total=total, desc="Screening classes")
    for combo in combos:
        mask = full
        for _, m in combo:
            mask &= m
        if mask == 0:
            coords = tuple(a for c, _ in combo for a in c)
            result.append(
                TranslationCocycle.from_cochain(
                    action, h1.representative(coords), h1.modulus
                )
            )
    return result


@dataclass
class AutomorphismReport:
    """Order data for Aut(M), an extension of N_alpha / G by T^G."""

    cocycle: TranslationCocycle
    betti1: int
    fixed_point_structure: AbelianStructure
    fixed_point_order: Optional[int]
    n_alpha_order: Optional[int]
    n_alpha_mod_g_order: Optional[int]
    aut_order: Optional[int]
    reasons: List[str] = field(default_factory=list)

    @property
    def is_finite(self) -> bool:
        return self.aut_order is not None

    def to_dict(self) -> dict:
        return {
            "betti1": self.betti1,
            "fixed_points": str(self.fixed_point_structure)
            if self.betti1 == 0
            else "positive-dimensional",
            "fixed_point_order": self.fixed_point_order,
            "n_alpha_order": self.n_alpha_order,
            "n_alpha_mod_g_order": self.n_alpha_mod_g_order,
            "aut_order": self.aut_order if self.is_finite else "infinite",
            "reasons": list(self.reasons),
        }


@dataclass
class OrbitSummary:
    representative: TranslationCocycle
    size: int
    image_stabilizer_order: int
    stabilizer_order: Optional[int]
    members: List[int] = field(default_factory=list)
    automorphisms: Optional[AutomorphismReport] = None


@dataclass
class ClassificationReport:
    """Biholomorphism classes for one holonomy action."""

    special_class_count: int
    orbits: List[OrbitSummary]
    normalizer: NormalizerModel
    image_order: int
    cohomology: AbelianStructure
    warnings: List[str] = field(default_factory=list)

    @property
    def m(self) -> int:
        """The number of biholomorphism classes."""
        return len(self.orbits)

    @property
    def normalizer_finite(self) -> bool:
        return self.normalizer.is_finite

    @property
    def representatives(self) -> List[TranslationCocycle]:
        return [o.representative for o in self.orbits]

    @property
    def stabilizer_orders(self) -> List[Optional[int]]:
        return [o.stabilizer_order for o in self.orbits]


def _stabilizer_in_image(
    normalizer: NormalizerModel,
    index: ClassIndex,
    table: np.ndarray,
    key: tuple,
    bound: int,
    special: Dict[tuple, int] = None,
) -> int:
    A, phi = normalizer.image_stack(bound)
    coords = index.coordinates(index.star(table, A, phi))
    keys = [tuple(int(a) for a in row) for row in coords]
    if special is not None:
        for k in keys:
            if k not in special:
                raise AssertionError("The star action moved a special class off the special set.")
    return sum(1 for k in keys if k == key)


def classify_orbits(
    classes: List[TranslationCocycle],
    N: NormalizerModel,
    h1: CohomologyGroup = None,
    bound: int = DEFAULT_BOUND,
    verbosity: int = 0,
) -> ClassificationReport:
    """Orbits of the star action on special classes.

    Parameters
    ----------
    classes : List[TranslationCocycle]
        Class representatives, one per special class.

    N : NormalizerModel
        The normalizer.

    h1 : CohomologyGroup, optional
        H^1(G, T), computed when omitted.

    bound : int, optional
        Bound on the torsion image. The default is DEFAULT_BOUND.

    Returns
    -------
    ClassificationReport
        Orbit representatives are the lexicographically smallest cocycle
        tables of their orbits.
    """
    action = N.action
    if h1 is None:
        h1 = torus_h1(N.torus, action)
    modulus = h1.modulus
    index = ClassIndex(h1)
    image = N.torsion_image(bound)

    if verbosity > 0:
        print(f"Torsion image of order {len(image)} acting on {len(classes)} classes.")

    tables = np.stack([_table_array(z, modulus) for z in classes]) if classes else None
    keys = (
        [tuple(int(a) for a in row) for row in index.coordinates(tables)]
        if classes
        else []
    )
    lookup = {k: i for i, k in enumerate(keys)}
    if len(lookup) != len(keys):
        raise ValueError("Two of the given cocycles lie in the same class.")

    # Action of the image generators on the class list
    A_all, phi_all = N.image_stack(bound)
    generator_moves = []
    for g in image.generators if classes else []:
        targets = index.coordinates(index.move(tables, A_all[g], phi_all[g]))
        images = []
        for row in targets:
            k = tuple(int(a) for a in row)
            if k not in lookup:
                raise AssertionError(
                    "The star action moved a special class off the special set."
                )
            images.append(lookup[k])
        generator_moves.append(images)

    # Orbits by breadth-first search
    orbit_of = [-1] * len(classes)
    orbits: List[List[int]] = []
    for start in range(len(classes)):
        if orbit_of[start] >= 0:
            continue
        orbit = [start]
        orbit_of[start] = len(orbits)
        frontier = [start]
        while frontier:
            new = []
            for c in frontier:
                for moves in generator_moves:
                    d = moves[c]
                    if orbit_of[d] < 0:
                        orbit_of[d] = len(orbits)
                        orbit.append(d)
                        new.append(d)
            frontier = new
        orbits.append(sorted(orbit))

    kernel = N.kernel_order(bound)
    summaries = []
    iterator = tqdm(orbits, desc="Stabilizers") if verbosity > 0 else orbits
    for orbit in iterator:
        rep = min(orbit, key=lambda c: classes[c].sort_key())
        stab = _stabilizer_in_image(N, index, tables[rep], keys[rep], bound, lookup)
        if len(orbit) * stab != len(image):
            raise AssertionError(
                f"Orbit-stabilizer fails: {len(orbit)} x {stab} != {len(image)}."
            )
        n_alpha = stab * kernel if kernel is not None else None
        if n_alpha is not None and n_alpha % len(action):
            raise AssertionError("G is not contained in the stabilizer.")
        summaries.append(
            OrbitSummary(
                representative=classes[rep],
                size=len(orbit),
                image_stabilizer_order=stab,
                stabilizer_order=n_alpha,
                members=orbit,
            )
        )
    summaries.sort(key=lambda o: o.representative.sort_key())

    return ClassificationReport(
        special_class_count=len(classes),
        orbits=summaries,
        normalizer=N,
        image_order=len(image),
        cohomology=h1.structure,
    )


def automorphism_report(
    C: CrystalGroup,
    N: NormalizerModel,
    h1: CohomologyGroup = None,
    bound: int = DEFAULT_BOUND,
) -> AutomorphismReport:
    """Order data for Aut(M), with M = T / G~ given by C.

    Raises
    ------
    NonFreeAction
        When some element of G has a fixed point, naming it.
    """
    action = C.action
    fixed = first_fixed_element(C)
    if fixed is not None:
        label = action.label(fixed)
        raise NonFreeAction(
            f"Element {label} has a fixed point on the torus.", element=label
        )

    structure, betti1 = fixed_point_group(C)
    reasons = []
    if betti1 > 0:
        reasons.append(f"first Betti number {betti1} > 0, so T^G is positive-dimensional")
    reasons += N.infinite_reasons

    n_alpha = n_alpha_mod_g = None
    if N.is_finite:
        modulus = action.exponent
        if modulus % C.cocycle.modulus:
            raise CocycleError(
                f"Cocycle modulus {C.cocycle.modulus} does not divide the "
                + f"exponent {modulus} of G."
            )
        if h1 is None:
            h1 = torus_h1(C.torus, action)
        index = ClassIndex(h1)
        table = _table_array(C.cocycle, modulus)
        key = tuple(int(a) for a in index.coordinates(table[None])[0])
        stab = _stabilizer_in_image(N, index, table, key, bound)
        n_alpha = stab * N.kernel_order(bound)
        if n_alpha % len(action):
            raise AssertionError("G is not contained in the stabilizer.")
        n_alpha_mod_g = n_alpha // len(action)

    fixed_order = structure.order if betti1 == 0 else None
    aut_order = None
    if not reasons:
        aut_order = fixed_order * n_alpha_mod_g

    return AutomorphismReport(
        cocycle=C.cocycle,
        betti1=betti1,
        fixed_point_structure=structure,
        fixed_point_order=fixed_order,
        n_alpha_order=n_alpha,
        n_alpha_mod_g_order=n_alpha_mod_g,
        aut_order=aut_order,
        reasons=reasons,
    )


def classify_manifolds(
    T: TorusSpec,
    action: DiagonalAction,
    bound: int = DEFAULT_BOUND,
    processes: int = 1,
    verbosity: int = 0,
    automorphisms: bool = True,
) -> ClassificationReport:
    """Runs the whole pipeline: H^1(G, T), special classes, normalizer,
    orbits and the automorphism data of each orbit."""
    h1 = torus_h1(T, action)
    if verbosity > 0:
        print(f"H^1(G, T) = {h1.structure}")
    classes = special_classes(T, action, h1, processes=processes, verbosity=verbosity)
    if verbosity > 0:
        print(f"{len(classes)} special classes.")
    N = normalizer_model(T, action, verbosity=verbosity)
    report = classify_orbits(classes, N, h1, bound=bound, verbosity=verbosity)
    if automorphisms:
        for orbit in report.orbits:
            C = CrystalGroup.from_cocycle(orbit.representative)
            orbit.automorphisms = automorphism_report(C, N, h1, bound=bound)
    return report
