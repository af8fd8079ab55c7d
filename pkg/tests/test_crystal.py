import itertools
import pytest
from fractions import Fraction
from flatkahler.linalg import IntMatrix
from flatkahler.torus import TorsionPoint, make_torus, torsion_points
from flatkahler.crystal import (
    CocycleError,
    CrystalGroup,
    DiagonalAction,
    HolonomyError,
    TranslationCocycle,
    element_has_fixed_point,
    first_fixed_element,
    fixed_point_criterion,
    fixed_point_generators,
    fixed_point_group,
    is_free_action,
)


def chw_action(curves=("eisenstein", "eisenstein", "eisenstein")):
    T = make_torus(curves)
    n = [f.unit_order // 2 for f in T]
    return DiagonalAction(T, [2, 2], [[0, n[1], n[2]], [n[0], 0, n[2]]])


def fourfold_action():
    T = make_torus(["eisenstein"] * 4)
    return DiagonalAction(T, [3, 3], [[0, 4, 4, 4], [4, 0, 4, 2]])


def test_action_tables():
    action = chw_action()
    assert len(action) == 4
    assert action.rank == 6
    assert action.exponent == 2
    assert action.elements == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert action.generator_indices == [2, 1]
    assert action.label(0) == "1"
    assert action.label(3) == "g1 g2"
    assert action.multiply(1, 2) == 3
    assert action.inverse(3) == 3

    minus = -IntMatrix.identity(2)
    g1 = action.rho[2]
    assert g1 == IntMatrix.block_diagonal([IntMatrix.identity(2), minus, minus])
    assert len(action.image) == 4
    assert sorted(action.image_positions()) == [0, 1, 2, 3]


def test_action_characters():
    action = chw_action(("eisenstein", "eisenstein", "gauss"))
    half = Fraction(1, 2)
    assert action.characters == [(0, half), (half, 0), (half, half)]
    assert all(action.is_scalar_on(k) for k in range(3))

    action = fourfold_action()
    assert not action.is_scalar_on(1)
    assert len(set(action.characters)) == 4


def test_action_permuted():
    action = fourfold_action()
    moved = action.permuted([1, 0, 2, 3])
    assert moved.assignment[0] == (4, 0, 4, 4)
    assert moved.characters[0] == action.characters[1]


def test_holonomy_errors():
    T = make_torus(["eisenstein", "eisenstein"])
    with pytest.raises(HolonomyError):
        DiagonalAction(T, [2, 2], [[0, 3]])
    with pytest.raises(HolonomyError):
        DiagonalAction(T, [2], [[0, 3, 3]])
    with pytest.raises(HolonomyError):
        # -xi has order 6, not 2
        DiagonalAction(T, [2], [[1, 0]])
    with pytest.raises(HolonomyError):
        DiagonalAction(T, [2], [[0, 0]])


def test_cocycle_completion():
    action = chw_action()
    z = TranslationCocycle.from_generators(
        action, [[1, 0, 0, 0, 1, 0], [0, 0, 1, 0, 0, 0]], 2
    )
    assert z.values[0] == (0,) * 6
    assert z.values[3] == (1, 0, 1, 0, 1, 0)
    assert z.generator_values() == [(1, 0, 0, 0, 1, 0), (0, 0, 1, 0, 0, 0)]
    assert z.factor_value(3, 2) == TorsionPoint(2, (1, 0))
    assert z.value((1, 1)) == z.value(3)
    assert len(z.cochain()) == 18

    doubled = z.rescaled(4)
    assert doubled.values[2] == (2, 0, 0, 0, 2, 0)
    assert doubled.rescaled(2) == z

    same = TranslationCocycle.from_cochain(action, z.cochain(), 2)
    assert same == z


def test_cocycle_errors():
    T = make_torus(["generic", "generic"])
    action = DiagonalAction(T, [2], [[0, 1]])
    # z(g^2) = 2 z(g) on the fixed factor must vanish
    with pytest.raises(CocycleError):
        TranslationCocycle.from_generators(action, [[1, 0, 0, 0]], 4)
    with pytest.raises(CocycleError):
        TranslationCocycle.from_generators(action, [[1, 0, 0]], 2)
    with pytest.raises(CocycleError):
        TranslationCocycle(action, [(1, 0, 0, 0), (1, 0, 0, 0)], 2)

    other = chw_action()
    z = TranslationCocycle.zero(other)
    with pytest.raises(CocycleError):
        CrystalGroup(T, other, z)


def test_star_identity():
    action = chw_action()
    z = TranslationCocycle.from_generators(
        action, [[1, 0, 0, 0, 1, 0], [0, 0, 1, 0, 0, 0]], 2
    )
    assert z.star(IntMatrix.identity(6), range(4)) == z
    minus = z.star(-IntMatrix.identity(6), range(4))
    assert minus == z


def test_fixed_point_criterion():
    assert fixed_point_criterion(-IntMatrix.identity(2)) == ()
    assert len(fixed_point_criterion(IntMatrix.identity(2))) == 2

    identity = IntMatrix.identity(2)
    assert not element_has_fixed_point(identity, TorsionPoint(2, (1, 0)))
    assert not element_has_fixed_point(identity, [Fraction(1, 2), 0])
    assert element_has_fixed_point(identity, [0, 0])
    assert element_has_fixed_point(-identity, TorsionPoint(3, (1, 2)))
    with pytest.raises(ValueError):
        element_has_fixed_point(identity, [0, 0, 0])


def test_chw_freeness_count():
    action = chw_action()
    two_torsion = list(itertools.product(range(2), repeat=2))
    zero = (0, 0)
    free = 0
    for a, b, c in itertools.product(two_torsion, repeat=3):
        z = TranslationCocycle.from_generators(
            action, [[*a, *zero, *c], [*zero, *b, *zero]], 2
        )
        if is_free_action(CrystalGroup.from_cocycle(z)):
            free += 1
    assert free == 27


def test_zero_cocycle_has_fixed_points():
    action = chw_action()
    C = CrystalGroup.from_cocycle(TranslationCocycle.zero(action, 2))
    assert first_fixed_element(C) == 1
    assert action.label(first_fixed_element(C)) == "g2"


def test_fixed_point_groups():
    action = chw_action()
    structure, betti1 = fixed_point_group(action.torus, action)
    assert str(structure) == "Z2^6"
    assert betti1 == 0

    action = fourfold_action()
    structure, betti1 = fixed_point_group(action.torus, action)
    assert structure.order == 81
    assert betti1 == 0
    assert all(p.order == 3 for p in fixed_point_generators(action))

    T = make_torus(["generic", "generic"])
    action = DiagonalAction(T, [2], [[0, 1]])
    structure, betti1 = fixed_point_group(T, action)
    assert betti1 == 2
    assert str(structure) == "Z2^2"

    with pytest.raises(ValueError):
        fixed_point_group(T)


def test_chw_freeness_all_cocycles():
    # g1 fixes E_1 with translation a1, g2 fixes E_2 with b2 and g1 g2
    # fixes E_3 with a3 - b3
    action = chw_action()
    E2 = [TorsionPoint(2, p) for p in itertools.product(range(2), repeat=2)]
    total = free = 0
    for a in itertools.product(E2, repeat=3):
        for b in itertools.product(E2, repeat=3):
            values = [
                [x for p in a for x in p.numerators],
                [x for p in b for x in p.numerators],
            ]
            z = TranslationCocycle.from_generators(action, values, 2)
            criterion = (
                not a[0].is_zero()
                and not b[1].is_zero()
                and not (a[2] - b[2]).is_zero()
            )
            assert is_free_action(CrystalGroup.from_cocycle(z)) == criterion
            total += 1
            free += criterion
    assert total == 4096
    assert free == 1728


def _has_fixed_point_by_search(u: IntMatrix, v: TorsionPoint, N: int) -> bool:
    """Looks for x in (1/N) Z^2 with u x + v = x mod Z^2."""
    scale = N // v.modulus
    w = [a * scale for a in v.numerators]
    A = u - IntMatrix.identity(2)
    for x in itertools.product(range(N), repeat=2):
        if all((a + b) % N == 0 for a, b in zip(A.apply(x), w)):
            return True
    return False


def test_fixed_points_against_search():
    T = make_torus(["generic", "gauss", "eisenstein"], non_isogenous="all")
    for factor in T:
        for u in factor.units.elements:
            for m in [2, 3]:
                for v in itertools.product(range(m), repeat=2):
                    point = TorsionPoint(m, v)
                    assert element_has_fixed_point(u, point) == (
                        _has_fixed_point_by_search(u, point, 12 * m)
                    ), (factor.factortype, u, point)


def test_diagonal_fixed_points_split_by_factor():
    action = chw_action(("eisenstein", "eisenstein", "gauss"))
    T = action.torus
    E2 = list(itertools.product(range(2), repeat=2))
    for i in range(1, len(action)):
        rho = action.rho[i]
        for v in itertools.product(E2, repeat=3):
            point = TorsionPoint(2, [x for p in v for x in p])
            by_factor = all(
                element_has_fixed_point(
                    rho.submatrix(T.block(k), T.block(k)), point.restrict(T.block(k))
                )
                for k in range(len(T))
            )
            assert element_has_fixed_point(rho, point) == by_factor


def _count_fixed_torsion(action, N: int) -> int:
    gens = [action.rho[i] for i in action.generator_indices]
    return sum(
        all(p.transform(g) == p for g in gens)
        for p in torsion_points(action.torus, N)
    )


def test_fixed_point_order_by_enumeration():
    for action in [
        chw_action(),
        chw_action(("eisenstein", "eisenstein", "gauss")),
        fourfold_action(),
    ]:
        structure, betti1 = fixed_point_group(action.torus, action)
        assert betti1 == 0
        assert _count_fixed_torsion(action, structure.exponent) == structure.order
