import json
from dataclasses import dataclass, field, asdict, fields
from typing import Any, Dict, List, Optional, Tuple
from flatkahler.specfile import ManifoldSpecFile
from flatkahler.crystal import TranslationCocycle
from flatkahler.classifier import (
    AutomorphismReport,
    ClassificationReport,
    NormalizerModel,
)


@dataclass
class ReportDocument:
    """The machine-readable result of one command.

    All orders are exact integers. Infinite orders are the string
    "infinite", accompanied by reasons.
    """

    command: str
    name: str
    input_digest: str
    torus: str
    holonomy: str
    cohomology: Optional[Dict[str, Any]] = None
    special_class_count: Optional[int] = None
    m: Optional[int] = None
    orbits: Optional[List[Dict[str, Any]]] = None
    normalizer: Optional[Dict[str, Any]] = None
    automorphisms: Optional[Dict[str, Any]] = None
    free: Optional[bool] = None
    fixed_element: Optional[str] = None
    error: Optional[str] = None
    checks: List[Dict[str, Any]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ReportDocument":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"Unknown report fields: {sorted(unknown)}.")
        return cls(**data)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json() + "\n")


def _base(command: str, spec: ManifoldSpecFile) -> ReportDocument:
    orders = " x ".join(f"Z{m}" for m in spec.orders) or "1"
    torus = " x ".join(
        f if isinstance(f, str) else f.get("iso_tag", f.get("type", "custom"))
        for f in spec.torus
    )
    return ReportDocument(
        command=command,
        name=spec.name,
        input_digest=spec.digest,
        torus=torus,
        holonomy=orders,
    )


def cocycle_dict(z: TranslationCocycle) -> Dict[str, Any]:
    return {
        "modulus": z.modulus,
        "generators": [list(v) for v in z.generator_values()],
    }


def normalizer_dict(N: NormalizerModel, image_order: int = None) -> Dict[str, Any]:
    data = {
        "description": N.description(),
        "finite": N.is_finite,
        "order": N.order if N.is_finite else "infinite",
        "diagonal_order": N.diagonal_order,
        "permutation_order": N.permutation_order,
        "permutations": [p.cycles() for p in N.permutations],
        "reasons": list(N.infinite_reasons),
    }
    if image_order is not None:
        data["image_order"] = image_order
        if N.is_finite:
            data["kernel_order"] = N.order // image_order
    return data


def automorphism_dict(aut: AutomorphismReport) -> Dict[str, Any]:
    data = aut.to_dict()
    if data["n_alpha_order"] is None:
        data["n_alpha_order"] = "infinite" if aut.reasons else None
    return {k: v for k, v in data.items() if v is not None}


def compare_expected(
    expected: Dict[str, Any], computed: Dict[str, Any]
) -> Tuple[List[Dict[str, Any]], List[str]]:
    """Compares reference values with computed ones.

    Keys that the command did not compute are skipped. Each disagreement
    also yields a warning.
    """
    checks, warnings = [], []
    for key, value in expected.items():
        if key not in computed:
            continue
        agrees = computed[key] == value
        checks.append(
            {"key": key, "expected": value, "computed": computed[key], "agrees": agrees}
        )
        if not agrees:
            warnings.append(
                f"{key}: reference value {value} disagrees with computed value "
                + f"{computed[key]}."
            )
    return checks, warnings


def classification_document(
    spec: ManifoldSpecFile, report: ClassificationReport, orbit_details: bool = False
) -> ReportDocument:
    doc = _base("classify", spec)
    doc.cohomology = {"H1_T": str(report.cohomology)}
    doc.special_class_count = report.special_class_count
    doc.m = report.m
    doc.normalizer = normalizer_dict(report.normalizer, report.image_order)

    doc.orbits = []
    for orbit in report.orbits:
        entry = {
            "representative": cocycle_dict(orbit.representative),
            "size": orbit.size,
            "stabilizer_order": orbit.stabilizer_order
            if orbit.stabilizer_order is not None
            else "infinite",
        }
        if orbit_details:
            entry["image_stabilizer_order"] = orbit.image_stabilizer_order
            entry["members"] = list(orbit.members)
        if orbit.automorphisms is not None:
            entry["automorphisms"] = automorphism_dict(orbit.automorphisms)
        doc.orbits.append(entry)

    computed = {
        "special_class_count": report.special_class_count,
        "orbit_count": report.m,
        "normalizer_order": doc.normalizer["order"],
        "permutation_order": report.normalizer.permutation_order,
        "image_order": report.image_order,
        "h1": str(report.cohomology),
    }
    if len(report.orbits) == 1 and report.orbits[0].automorphisms is not None:
        aut = report.orbits[0].automorphisms
        computed["aut_order"] = aut.aut_order if aut.is_finite else "infinite"
        computed["n_alpha_order"] = aut.n_alpha_order
        computed["fixed_point_order"] = aut.fixed_point_order
    doc.checks, doc.warnings = compare_expected(spec.expected, computed)
    return doc


def automorphism_document(
    spec: ManifoldSpecFile, aut: AutomorphismReport, N: NormalizerModel
) -> ReportDocument:
    doc = _base("aut", spec)
    doc.free = True
    doc.normalizer = normalizer_dict(N)
    doc.automorphisms = automorphism_dict(aut)
    doc.automorphisms["cocycle"] = cocycle_dict(aut.cocycle)
    computed = {
        "normalizer_order": doc.normalizer["order"],
        "permutation_order": N.permutation_order,
        "aut_order": aut.aut_order if aut.is_finite else "infinite",
        "n_alpha_order": aut.n_alpha_order,
        "fixed_point_order": aut.fixed_point_order,
    }
    doc.checks, doc.warnings = compare_expected(spec.expected, computed)
    return doc


def cohomology_document(
    spec: ManifoldSpecFile, groups: Dict[str, Any], fixed_points: str, betti1: int
) -> ReportDocument:
    doc = _base("cohomology", spec)
    doc.cohomology = {name: str(h.structure) for name, h in groups.items()}
    doc.cohomology["T^G"] = fixed_points
    doc.cohomology["betti1"] = betti1
    doc.checks, doc.warnings = compare_expected(
        spec.expected, {"h1": doc.cohomology["H1_T"]}
    )
    return doc


def free_check_document(spec: ManifoldSpecFile, element: Optional[str]) -> ReportDocument:
    doc = _base("free-check", spec)
    doc.free = element is None
    doc.fixed_element = element
    return doc


def error_document(
    command: str, spec: ManifoldSpecFile, error: str, element: Optional[str] = None
) -> ReportDocument:
    """A document recording why a command could not complete."""
    doc = _base(command, spec)
    doc.error = error
    if element is not None:
        doc.free = False
        doc.fixed_element = element
    return doc
