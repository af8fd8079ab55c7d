import itertools
import pytest
from flatkahler.linalg import IntMatrix
from flatkahler.groups import DEFAULT_BOUND
from flatkahler.torus import make_torus
from flatkahler.crystal import (
    CocycleError,
    CrystalGroup,
    DiagonalAction,
    NonFreeAction,
    TranslationCocycle,
    is_free_action,
)
from flatkahler.cohomology import torus_h1
from flatkahler.classifier import (
    IsogenyAmbiguity,
    UnsupportedNormalizer,
    automorphism_report,
    classify_manifolds,
    classify_orbits,
    isotypic_blocks,
    normalizer_model,
    permutation_matrix,
    special_classes,
)


def fourfold():
    T = make_torus(["eisenstein"] * 4)
    action = DiagonalAction(T, [3, 3], [[0, 4, 4, 4], [4, 0, 4, 2]])
    z = TranslationCocycle.from_generators(
        action, [[1, 2, 0, 0, 0, 0, 0, 0], [0, 0, 1, 2, 1, 2, 1, 2]], 3
    )
    return T, action, z


def chw(curves, exponents, c=(1, 0)):
    T = make_torus(curves)
    action = DiagonalAction(T, [2, 2], exponents)
    z = TranslationCocycle.from_generators(
        action, [[1, 0, 0, 0, *c], [0, 0, 1, 0, 0, 0]], 2
    )
    return T, action, z


def chw_xi_xi_i(c=(1, 0)):
    return chw(["eisenstein", "eisenstein", "gauss"], [[0, 3, 2], [3, 0, 2]], c)


def fivefold(assignment):
    T = make_torus(["eisenstein"] * 5)
    action = DiagonalAction(T, [3, 3], assignment)
    z = TranslationCocycle.from_generators(
        action, [[1, 2] + [0] * 8, [0, 0] + [1, 2] * 4], 3
    )
    return T, action, z


def extension(aut0_infinite=False):
    T3 = {"type": "custom", "rank": 4, "iso_tag": "T3", "aut0_infinite": aut0_infinite}
    T = make_torus(["generic", "generic", T3])
    action = DiagonalAction(T, [2, 2], [[0, 1, [1]], [1, 0, [1]]])
    z = TranslationCocycle.from_generators(
        action, [[1, 0, 0, 0, 1, 0, 0, 0], [0, 0, 1, 0, 0, 0, 0, 0]], 2
    )
    return T, action, z


def test_isotypic_blocks():
    T, action, _ = fourfold()
    assert isotypic_blocks(T, action).sizes == [1, 1, 1, 1]

    T, action, _ = fivefold([[0, 4, 4, 4, 4], [4, 0, 4, 2, 2]])
    blocks = isotypic_blocks(T, action)
    assert blocks.block_of(4) == (3, 4)
    assert sorted(blocks.sizes) == [1, 1, 1, 2]


def test_isogeny_ambiguity():
    T = make_torus(["generic", "generic"])
    action = DiagonalAction(T, [2], [[1, 1]])
    with pytest.raises(IsogenyAmbiguity):
        isotypic_blocks(T, action)

    T = make_torus(["generic", "generic"], non_isogenous=[("generic_1", "generic_2")])
    action = DiagonalAction(T, [2], [[1, 1]])
    assert len(isotypic_blocks(T, action)) == 2

    T = make_torus(["eisenstein", "gauss"])
    action = DiagonalAction(T, [2], [[3, 2]])
    assert len(isotypic_blocks(T, action)) == 2


def test_permutation_matrix():
    T = make_torus(["generic", "generic", {"type": "custom", "rank": 4}])
    P = permutation_matrix(T, [1, 0, 2])
    assert P.shape == (8, 8)
    assert P.is_unimodular()
    assert P @ P == IntMatrix.identity(8)
    assert P.apply([1, 2, 3, 4, 0, 0, 0, 0])[:4] == (3, 4, 1, 2)


def test_fourfold_normalizer():
    T, action, _ = fourfold()
    N = normalizer_model(T, action)
    assert N.is_finite
    assert N.diagonal_order == 6**4
    assert N.permutation_order == 3
    assert N.order == 3888
    assert N.centralizing_permutations[0].is_identity
    assert N.image_order() == 3888
    assert N.kernel_order() == 1


def test_chw_normalizer():
    T, action, _ = chw_xi_xi_i()
    N = normalizer_model(T, action)
    assert N.order == 288
    assert N.permutation_order == 2
    assert [p.cycles() for p in N.permutations] == ["()", "(1 2)"]
    assert N.description() == "(Z6^2 x Z4) x| P(2)"
    assert N.image_order() == 36
    assert N.kernel_order() == 8

    A, phi = N.image_stack()
    assert A.shape == (36, 6, 6)
    assert phi.shape == (36, 4)
    assert (phi[0] == [0, 1, 2, 3]).all()


def test_fivefold_normalizers():
    T, action, _ = fivefold([[0, 4, 4, 4, 4], [4, 0, 4, 2, 2]])
    N = normalizer_model(T, action)
    assert not N.is_finite
    assert N.order is None
    assert N.kernel_order() is None
    assert "isotypic block" in N.infinite_reasons[0]

    T, action, _ = fivefold([[0, 4, 4, 4, 2], [4, 0, 4, 2, 4]])
    N = normalizer_model(T, action)
    assert N.order == 15552
    assert sorted(p.cycles() for p in N.permutations) == ["()", "(1 2)(4 5)"]


def test_unsupported_normalizer():
    T = make_torus([{"type": "custom", "units": [[[0, -1], [1, 0]]], "aut0_infinite": True}])
    action = DiagonalAction(T, [4], [[[1]]])
    with pytest.raises(UnsupportedNormalizer):
        normalizer_model(T, action)


def test_special_classes():
    T, action, _ = chw(["eisenstein"] * 3, [[0, 3, 3], [3, 0, 3]])
    classes = special_classes(T, action)
    assert len(classes) == 27
    assert all(is_free_action(CrystalGroup.from_cocycle(z)) for z in classes)
    assert len(special_classes(T, action, processes=2)) == 27

    T, action, _ = fourfold()
    assert len(special_classes(T, action)) == 16


def test_fourfold_classification():
    T, action, z = fourfold()
    report = classify_manifolds(T, action)
    assert report.special_class_count == 16
    assert report.m == 1
    assert str(report.cohomology) == "Z3^4"

    orbit = report.orbits[0]
    assert orbit.size == 16
    assert orbit.stabilizer_order == 243
    assert orbit.automorphisms.aut_order == 2187
    assert orbit.automorphisms.fixed_point_order == 81


def test_chw_classifications():
    T, action, _ = chw(["eisenstein"] * 3, [[0, 3, 3], [3, 0, 3]])
    assert classify_manifolds(T, action, automorphisms=False).m == 1

    T, action, _ = chw(["generic"] * 3, [[0, 1, 1], [1, 0, 1]])
    report = classify_manifolds(T, action)
    assert report.m == 27
    assert report.image_order == 1
    assert report.normalizer.order == 8

    T, action, _ = chw_xi_xi_i()
    report = classify_manifolds(T, action)
    assert report.m == 2
    assert sorted(o.size for o in report.orbits) == [9, 18]
    assert sorted(report.stabilizer_orders) == [16, 32]
    assert sorted(o.automorphisms.aut_order for o in report.orbits) == [256, 512]


def test_classify_orbits_rejects_duplicates():
    T, action, z = chw_xi_xi_i()
    N = normalizer_model(T, action)
    h1 = torus_h1(T, action)
    with pytest.raises(ValueError):
        classify_orbits([z, z], N, h1)
    assert classify_orbits([], N, h1).m == 0


def test_chw_automorphisms():
    T, action, z = chw_xi_xi_i()
    N = normalizer_model(T, action)
    aut = automorphism_report(CrystalGroup.from_cocycle(z), N)
    assert aut.betti1 == 0
    assert aut.fixed_point_order == 64
    assert aut.n_alpha_order == 16
    assert aut.n_alpha_mod_g_order == 4
    assert aut.aut_order == 256

    T, action, z = chw_xi_xi_i(c=(1, 1))
    N = normalizer_model(T, action)
    aut = automorphism_report(CrystalGroup.from_cocycle(z), N)
    assert aut.n_alpha_order == 32
    assert aut.aut_order == 512
    assert aut.to_dict()["fixed_points"] == "Z2^6"


def test_fourfold_automorphisms():
    T, action, z = fourfold()
    aut = automorphism_report(CrystalGroup.from_cocycle(z), normalizer_model(T, action))
    assert aut.n_alpha_order == 243
    assert aut.n_alpha_mod_g_order == 27
    assert aut.aut_order == 2187


def test_infinite_automorphisms():
    T, action, z = fivefold([[0, 4, 4, 4, 4], [4, 0, 4, 2, 2]])
    aut = automorphism_report(CrystalGroup.from_cocycle(z), normalizer_model(T, action))
    assert not aut.is_finite
    assert aut.n_alpha_order is None
    assert aut.to_dict()["aut_order"] == "infinite"

    T, action, z = extension(aut0_infinite=True)
    aut = automorphism_report(CrystalGroup.from_cocycle(z), normalizer_model(T, action))
    assert not aut.is_finite
    assert "infinite Aut0" in aut.reasons[0]


def test_fivefold_prime_automorphisms():
    T, action, z = fivefold([[0, 4, 4, 4, 2], [4, 0, 4, 2, 4]])
    N = normalizer_model(T, action)
    aut = automorphism_report(CrystalGroup.from_cocycle(z), N, bound=20000)
    assert aut.is_finite
    assert N.image_order(20000) == 15552
    assert aut.n_alpha_order % 9 == 0


def test_extension_automorphisms():
    T, action, z = extension()
    N = normalizer_model(T, action)
    assert N.order == 8
    assert N.image_order() == 1
    aut = automorphism_report(CrystalGroup.from_cocycle(z), N)
    assert aut.fixed_point_order == 256
    assert aut.n_alpha_order == 8
    assert aut.aut_order == 512


def test_automorphism_errors():
    T, action, z = chw_xi_xi_i()
    N = normalizer_model(T, action)
    zero = TranslationCocycle.zero(action, 2)
    with pytest.raises(NonFreeAction) as e:
        automorphism_report(CrystalGroup.from_cocycle(zero), N)
    assert e.value.element == "g2"

    finer = TranslationCocycle(action, z.rescaled(4).values, 4, validate=False)
    with pytest.raises(CocycleError):
        automorphism_report(CrystalGroup.from_cocycle(finer), N)


def _permuted(T, action, z, sigma):
    """The same manifold with factor k moved to position sigma[k]."""
    moved = action.permuted(sigma)
    values = []
    for row in z.generator_values():
        blocks = [None] * len(T)
        for k, target in enumerate(sigma):
            blocks[target] = [row[i] for i in T.block(k)]
        values.append([a for block in blocks for a in block])
    return (
        moved.torus,
        moved,
        TranslationCocycle.from_generators(moved, values, z.modulus),
    )


def _summary(T, action, z):
    report = classify_manifolds(T, action)
    aut = automorphism_report(
        CrystalGroup.from_cocycle(z), report.normalizer, bound=DEFAULT_BOUND
    )
    return (
        report.special_class_count,
        report.m,
        sorted(o.size for o in report.orbits),
        sorted(o.automorphisms.aut_order for o in report.orbits),
        report.normalizer.order,
        aut.aut_order,
    )


def test_fourfold_invariant_under_reordering():
    T, action, z = fourfold()
    expected = (16, 1, [16], [2187], 3888, 2187)
    assert _summary(T, action, z) == expected
    for sigma in itertools.permutations(range(4)):
        assert _summary(*_permuted(T, action, z, sigma)) == expected, sigma


def test_chw_invariant_under_reordering():
    T, action, z = chw_xi_xi_i()
    expected = (27, 2, [9, 18], [256, 512], 288, 256)
    assert _summary(T, action, z) == expected
    for sigma in itertools.permutations(range(3)):
        moved = _permuted(T, action, z, sigma)
        assert _summary(*moved) == expected, sigma


def test_chw_orbit_representatives():
    T, action, _ = chw_xi_xi_i()
    N = normalizer_model(T, action)
    h1 = torus_h1(T, action)
    classes = special_classes(T, action, h1)
    report = classify_orbits(classes, N, h1)

    orbit_of = {}
    for k, orbit in enumerate(report.orbits):
        for member in orbit.members:
            orbit_of[member] = k

    # Translations (1/2, 1/2, 1/2) and (1/2, 1/2, (1 + i)/2)
    sizes = []
    found = set()
    for c in [(1, 0), (1, 1)]:
        _, _, z = chw_xi_xi_i(c)
        canon = TranslationCocycle.from_cochain(action, h1.canonical(z.cochain()), 2)
        k = orbit_of[classes.index(canon)]
        found.add(k)
        sizes.append(report.orbits[k].size)
    assert found == {0, 1}
    assert sizes == [18, 9]


def test_special_classes_of_minus_one():
    T = make_torus(["generic"])
    action = DiagonalAction(T, [2], [[1]])
    assert special_classes(T, action) == []
    assert classify_manifolds(T, action).m == 0
