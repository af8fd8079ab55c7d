import pytest
from flatkahler.groups import DEFAULT_BOUND
from flatkahler.catalogue import shipped_specs, spec_path
from flatkahler.specfile import (
    SpecFileError,
    load_manifold_spec,
    parse_manifold_spec,
)


CHW = """\
name: chw_xi_xi_i
torus: [eisenstein, eisenstein, gauss]
group:
  orders: [2, 2]
  generators:
    - [0, 3, 2]
    - [3, 0, 2]
cocycle:
  modulus: 2
  generators:
    - [1, 0, 0, 0, 1, 0]
    - [0, 0, 1, 0, 0, 0]
expected:
  orbit_count: 2
"""


def _error(text: str) -> SpecFileError:
    with pytest.raises(SpecFileError) as e:
        parse_manifold_spec(text)
    return e.value


def test_parse_chw():
    spec = parse_manifold_spec(CHW)
    assert spec.name == "chw_xi_xi_i"
    assert spec.orders == (2, 2)
    assert spec.generators == [[0, 3, 2], [3, 0, 2]]
    assert spec.has_cocycle
    assert spec.cocycle_modulus == 2
    assert spec.expected == {"orbit_count": 2}
    assert spec.effective_bound() == DEFAULT_BOUND
    assert spec.effective_bound(50) == 50
    assert len(spec.digest) == 64
    assert spec.line_of("group.generators[1][2]") == 7
    assert spec.line_of("group.generators[1][9]") == 7

    T = spec.build_torus()
    action = spec.build_action(T)
    z = spec.build_cocycle(action)
    assert T.rank == 6
    assert len(action) == 4
    assert z.generator_values()[0] == (1, 0, 0, 0, 1, 0)


def test_yaml_round_trip():
    spec = parse_manifold_spec(CHW)
    again = parse_manifold_spec(spec.to_yaml())
    assert again == spec


def test_minimal_spec():
    spec = parse_manifold_spec(
        "torus: [generic, generic]\ngroup: {orders: [2], generators: [[0, 1]]}\n"
    )
    assert spec.name == "manifold"
    assert not spec.has_cocycle
    with pytest.raises(SpecFileError):
        spec.build_cocycle()


def test_unknown_key():
    error = _error(CHW + "colour: red\n")
    assert error.field == "colour"
    assert error.line == 15

    error = _error(CHW.replace("  orders: [2, 2]", "  orders: [2, 2]\n  order: 4"))
    assert error.field == "group.order"
    assert error.line == 5


def test_exponent_out_of_range():
    error = _error(CHW.replace("- [3, 0, 2]", "- [3, 0, 4]"))
    assert error.field == "group.generators[1][2]"
    assert error.line == 7
    assert "line 7" in str(error)


def test_structural_errors():
    assert _error("torus: [generic]\n").field == "group"
    assert _error("- just\n- a list\n").line == 1
    assert _error(CHW.replace("[eisenstein, eisenstein, gauss]", "[]")).field == "torus"
    assert (
        _error(CHW.replace("[eisenstein, eisenstein, gauss]", "[eisenstein, k3, gauss]")).field
        == "torus[1]"
    )
    assert _error(CHW.replace("orders: [2, 2]", "orders: [2, 0]")).field == (
        "group.orders[1]"
    )
    assert _error(CHW.replace("    - [3, 0, 2]\n", "")).field == "group.generators"
    assert _error(CHW.replace("- [0, 3, 2]", "- [0, 3.5, 2]")).field == (
        "group.generators[0][1]"
    )


def test_holonomy_errors():
    # -1 on every factor for both generators is not faithful
    error = _error(CHW.replace("- [0, 3, 2]", "- [3, 3, 2]").replace("- [3, 0, 2]", "- [3, 3, 2]"))
    assert error.field == "group"


def test_cocycle_errors():
    assert _error(CHW.replace("modulus: 2", "modulus: 0")).field == "cocycle.modulus"
    assert _error(CHW.replace("- [0, 0, 1, 0, 0, 0]", "- [0, 0, 1, 0]")).field == (
        "cocycle.generators[1]"
    )
    # Translations of order 4 on the fixed factor break z(g^2) = 0
    text = CHW.replace("modulus: 2", "modulus: 4")
    assert _error(text).field == "cocycle"


def test_yaml_syntax_error():
    error = _error("torus: [generic\ngroup: {orders: [2]}\n")
    assert error.line is not None
    assert "YAML" in error.message


def test_non_isogenous():
    text = "torus: [generic, generic]\nnon_isogenous: [[generic_1, generic_2]]\n"
    text += "group: {orders: [2], generators: [[1, 1]]}\n"
    spec = parse_manifold_spec(text)
    assert spec.non_isogenous == [["generic_1", "generic_2"]]

    error = _error(text.replace("generic_2]]", "generic_9]]"))
    assert error.field == "non_isogenous[0]"
    error = _error(text.replace("[[generic_1, generic_2]]", "7"))
    assert error.field == "non_isogenous"
    spec = parse_manifold_spec(text.replace("[[generic_1, generic_2]]", "all"))
    assert spec.non_isogenous == "all"


def test_expected_and_bound():
    assert _error(CHW + "  colour: red\n").field == "expected.colour"
    assert _error(CHW + "bound: 0\n").field == "bound"
    assert parse_manifold_spec(CHW + "bound: 20000\n").effective_bound() == 20000


def test_shipped_specs():
    names = shipped_specs()
    assert "fourfold_z3" in names
    assert "fivefold_g_prime" in names
    for name in names:
        spec = load_manifold_spec(spec_path(name))
        assert spec.name == name
        assert spec.has_cocycle or name == "chw_generic"

    with pytest.raises(FileNotFoundError):
        spec_path("no_such_manifold")


def test_shipped_specs_cite_source():
    for name in shipped_specs():
        with open(spec_path(name)) as f:
            header = f.readline() + f.readline()
        assert header.startswith("# Source: worked example '"), name
        assert "(flatkahler.catalogue." in header, name


def test_to_family():
    spec = load_manifold_spec(spec_path("extension_finite"))
    family = spec.to_family()
    family.build()
    assert family.torus.rank == 8
    assert family.free_check() is None
