"""Manifold spec files.

A spec file is a YAML mapping::

    name: chw_xi_xi_i
    torus: [eisenstein, eisenstein, gauss]
    non_isogenous: []
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

Only `torus` and `group` are required. Generator rows give one unit
exponent per factor (a list of exponents for custom factors), cocycle rows
give the translation of each group generator as numerators over the
modulus.
"""

import yaml
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union
from flatkahler.utilities import input_digest
from flatkahler.groups import DEFAULT_BOUND, AbstractAbelianGroup
from flatkahler.factors import FactorError
from flatkahler.torus import ALL_NON_ISOGENOUS, TorusSpec, make_factor, make_torus
from flatkahler.crystal import (
    CocycleError,
    DiagonalAction,
    HolonomyError,
    TranslationCocycle,
)


TOP_LEVEL_KEYS = (
    "name",
    "description",
    "torus",
    "non_isogenous",
    "group",
    "cocycle",
    "expected",
    "bound",
)
GROUP_KEYS = ("orders", "generators")
COCYCLE_KEYS = ("modulus", "generators")
EXPECTED_KEYS = (
    "special_class_count",
    "orbit_count",
    "normalizer_order",
    "permutation_order",
    "image_order",
    "n_alpha_order",
    "aut_order",
    "fixed_point_order",
    "h1",
)


class SpecFileError(ValueError):
    """A spec file diagnostic naming the line and field at fault."""

    def __init__(self, message: str, line: int = None, field: str = None) -> None:
        self.message = message
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message)


def _index_lines(node, path: str, lines: Dict[str, int]) -> None:
    lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            child = f"{path}.{key.value}" if path else str(key.value)
            _index_lines(value, child, lines)
    elif isinstance(node, yaml.SequenceNode):
        for k, value in enumerate(node.value):
            _index_lines(value, f"{path}[{k}]", lines)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


@dataclass
class ManifoldSpecFile:
    """A validated manifold description."""

    name: str
    torus: List[Any]
    orders: Tuple[int, ...]
    generators: List[List[Any]]
    non_isogenous: Union[str, List[List[str]]] = field(default_factory=list)
    cocycle_modulus: Optional[int] = None
    cocycle_generators: Optional[List[List[int]]] = None
    expected: Dict[str, Any] = field(default_factory=dict)
    bound: Optional[int] = None
    description: Optional[str] = None
    text: str = field(default="", compare=False, repr=False)
    lines: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    @property
    def digest(self) -> str:
        return input_digest(self.text)

    @property
    def has_cocycle(self) -> bool:
        return self.cocycle_generators is not None

    def line_of(self, path: str) -> Optional[int]:
        """The line of a field, falling back to its closest parent."""
        while path:
            if path in self.lines:
                return self.lines[path]
            cut = max(path.rfind("."), path.rfind("["))
            path = path[:cut] if cut > 0 else ""
        return None

    def error(self, message: str, path: str) -> SpecFileError:
        return SpecFileError(message, line=self.line_of(path), field=path)

    def effective_bound(self, bound: int = None) -> int:
        if bound is not None:
            return bound
        return self.bound if self.bound is not None else DEFAULT_BOUND

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name}
        if self.description is not None:
            data["description"] = self.description
        data["torus"] = list(self.torus)
        if self.non_isogenous:
            data["non_isogenous"] = self.non_isogenous
        data["group"] = {
            "orders": list(self.orders),
            "generators": [list(row) for row in self.generators],
        }
        if self.has_cocycle:
            data["cocycle"] = {
                "modulus": self.cocycle_modulus,
                "generators": [list(row) for row in self.cocycle_generators],
            }
        if self.expected:
            data["expected"] = dict(self.expected)
        if self.bound is not None:
            data["bound"] = self.bound
        return data

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def build_torus(self, bound: int = None) -> TorusSpec:
        return make_torus(self.torus, self.non_isogenous, bound=self.effective_bound(bound))

    def build_action(self, T: TorusSpec = None) -> DiagonalAction:
        T = T if T is not None else self.build_torus()
        return DiagonalAction(T, AbstractAbelianGroup(self.orders), self.generators)

    def build_cocycle(self, action: DiagonalAction = None) -> TranslationCocycle:
        if not self.has_cocycle:
            raise SpecFileError("The spec file has no cocycle section.", field="cocycle")
        action = action if action is not None else self.build_action()
        return TranslationCocycle.from_generators(
            action, self.cocycle_generators, self.cocycle_modulus
        )

    def to_family(self, verbosity: int = 0, bound: int = None, processes: int = 1):
        """A configured FlatKahlerFamily for the described manifolds."""
        from flatkahler.family import FlatKahlerFamily

        family = FlatKahlerFamily()
        family.configure(
            name=self.name,
            verbosity=verbosity,
            bound=self.effective_bound(bound),
            processes=processes,
        )
        for factor in self.torus:
            family.add_factor(factor)
        family.non_isogenous = self.non_isogenous
        family.set_holonomy(self.orders, self.generators)
        if self.has_cocycle:
            family.set_cocycle(self.cocycle_generators, self.cocycle_modulus)
        return family


def _check_keys(spec: ManifoldSpecFile, data: dict, allowed, path: str) -> None:
    for key in data:
        if key not in allowed:
            child = f"{path}.{key}" if path else str(key)
            raise spec.error(f"Unknown key '{key}'.", child)


def _check_int_list(spec, values, path: str, minimum: int = None) -> List[int]:
    if not isinstance(values, list):
        raise spec.error("Expected a list of integers.", path)
    for k, v in enumerate(values):
        if not _is_int(v):
            raise spec.error(f"Expected an integer, got {v!r}.", f"{path}[{k}]")
        if minimum is not None and v < minimum:
            raise spec.error(f"Expected an integer of at least {minimum}.", f"{path}[{k}]")
    return list(values)


def parse_manifold_spec(text: str) -> ManifoldSpecFile:
    """Parses and validates a manifold spec file.

    Parameters
    ----------
    text : str
        The YAML text.

    Returns
    -------
    ManifoldSpecFile
        The validated spec.

    Raises
    ------
    SpecFileError
        For syntax errors, unknown keys, indices out of range, exponents
        outside a factor's unit group and cocycles failing the cocycle
        identity. The error names the line and field.
    """
    try:
        loader = yaml.SafeLoader(text)
        try:
            node = loader.get_single_node()
            data = loader.construct_document(node) if node is not None else None
        finally:
            loader.dispose()
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        raise SpecFileError(
            f"YAML syntax error: {e.problem}",
            line=mark.line + 1 if mark is not None else None,
        ) from None

    lines: Dict[str, int] = {}
    if node is not None:
        _index_lines(node, "", lines)
    if not isinstance(data, dict):
        raise SpecFileError("A spec file must be a mapping.", line=1)

    spec = ManifoldSpecFile(
        name=str(data.get("name", "manifold")),
        torus=[],
        orders=(),
        generators=[],
        text=text,
        lines=lines,
    )
    _check_keys(spec, data, TOP_LEVEL_KEYS, "")
    for key in ("torus", "group"):
        if key not in data:
            raise SpecFileError(f"Missing required section '{key}'.", line=1, field=key)
    if data.get("description") is not None:
        spec.description = str(data["description"])

    # Bound
    if "bound" in data:
        if not _is_int(data["bound"]) or data["bound"] < 1:
            raise spec.error("The bound must be a positive integer.", "bound")
        spec.bound = data["bound"]
    bound = spec.effective_bound()

    # Torus factors
    if not isinstance(data["torus"], list) or not data["torus"]:
        raise spec.error("The torus must be a non-empty list of factors.", "torus")
    factors = []
    for k, description in enumerate(data["torus"]):
        try:
            factors.append(make_factor(description, bound))
        except (FactorError, TypeError, ValueError) as e:
            raise spec.error(str(e), f"torus[{k}]") from None
        spec.torus.append(description)

    # Non-isogeny declarations
    non_isogenous = data.get("non_isogenous", [])
    if non_isogenous is None:
        non_isogenous = []
    if non_isogenous != ALL_NON_ISOGENOUS:
        if not isinstance(non_isogenous, list):
            raise spec.error("Expected 'all' or a list of tag pairs.", "non_isogenous")
        for k, pair in enumerate(non_isogenous):
            if not isinstance(pair, list) or len(pair) != 2:
                raise spec.error("Expected a pair of iso tags.", f"non_isogenous[{k}]")
    spec.non_isogenous = non_isogenous

    try:
        T = make_torus(factors, non_isogenous, bound=bound)
    except FactorError as e:
        raise spec.error(str(e), "torus") from None
    if non_isogenous != ALL_NON_ISOGENOUS:
        for k, pair in enumerate(non_isogenous):
            for tag in pair:
                if tag not in T.tags:
                    raise spec.error(f"Unknown iso tag '{tag}'.", f"non_isogenous[{k}]")

    # Holonomy
    group = data["group"]
    if not isinstance(group, dict):
        raise spec.error("The group section must be a mapping.", "group")
    _check_keys(spec, group, GROUP_KEYS, "group")
    for key in GROUP_KEYS:
        if key not in group:
            raise spec.error(f"Missing '{key}'.", "group")
    spec.orders = tuple(_check_int_list(spec, group["orders"], "group.orders", 1))
    rows = group["generators"]
    if not isinstance(rows, list) or len(rows) != len(spec.orders):
        raise spec.error(
            f"Expected {len(spec.orders)} generator rows.", "group.generators"
        )
    for j, row in enumerate(rows):
        path = f"group.generators[{j}]"
        if not isinstance(row, list) or len(row) != len(factors):
            raise spec.error(f"Expected one entry per factor ({len(factors)}).", path)
        for k, (factor, e) in enumerate(zip(factors, row)):
            entry = f"{path}[{k}]"
            if isinstance(e, list):
                _check_int_list(spec, e, entry)
            elif not _is_int(e):
                raise spec.error(f"Expected an exponent, got {e!r}.", entry)
            try:
                factor.unit(e)
            except FactorError as err:
                raise spec.error(str(err), entry) from None
        spec.generators.append(row)

    try:
        action = DiagonalAction(T, AbstractAbelianGroup(spec.orders), spec.generators)
    except HolonomyError as e:
        raise spec.error(str(e), "group") from None

    # Translations
    if data.get("cocycle") is not None:
        cocycle = data["cocycle"]
        if not isinstance(cocycle, dict):
            raise spec.error("The cocycle section must be a mapping.", "cocycle")
        _check_keys(spec, cocycle, COCYCLE_KEYS, "cocycle")
        modulus = cocycle.get("modulus")
        if not _is_int(modulus) or modulus < 1:
            raise spec.error("The modulus must be a positive integer.", "cocycle.modulus")
        rows = cocycle.get("generators")
        if not isinstance(rows, list) or len(rows) != len(spec.orders):
            raise spec.error(
                f"Expected {len(spec.orders)} translation rows.", "cocycle.generators"
            )
        for j, row in enumerate(rows):
            path = f"cocycle.generators[{j}]"
            _check_int_list(spec, row, path)
            if len(row) != T.rank:
                raise spec.error(f"Expected {T.rank} numerators.", path)
        spec.cocycle_modulus = modulus
        spec.cocycle_generators = [list(row) for row in rows]
        try:
            TranslationCocycle.from_generators(action, rows, modulus)
        except CocycleError as e:
            raise spec.error(str(e), "cocycle") from None

    # Reference values
    expected = data.get("expected") or {}
    if not isinstance(expected, dict):
        raise spec.error("The expected section must be a mapping.", "expected")
    _check_keys(spec, expected, EXPECTED_KEYS, "expected")
    spec.expected = dict(expected)

    return spec


def load_manifold_spec(path: str) -> ManifoldSpecFile:
    with open(path, "r", encoding="utf-8") as f:
        return parse_manifold_spec(f.read())
