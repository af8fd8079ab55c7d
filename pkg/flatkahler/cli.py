"""Command line interface.

Exit codes: 0 success, 1 invalid input, 2 closure bound exceeded,
3 the input does not act freely.
"""

import sys
import argparse
from typing import List, Optional, Tuple
from flatkahler import __version__, utilities
from flatkahler.linalg import DimensionMismatch
from flatkahler.groups import ClosureExceedsBound
from flatkahler.factors import FactorError
from flatkahler.crystal import (
    CocycleError,
    CrystalGroup,
    HolonomyError,
    NonFreeAction,
    first_fixed_element,
    fixed_point_group,
)
from flatkahler.cohomology import lattice_cohomology, torus_h1
from flatkahler.classifier import (
    IsogenyAmbiguity,
    UnsupportedNormalizer,
    automorphism_report,
    classify_manifolds,
    normalizer_model,
)
from flatkahler.specfile import ManifoldSpecFile, SpecFileError, load_manifold_spec
from flatkahler.report import (
    ReportDocument,
    automorphism_document,
    classification_document,
    cohomology_document,
    error_document,
    free_check_document,
)


EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BOUND = 2
EXIT_NOT_FREE = 3

INVALID_INPUT = (
    SpecFileError,
    CocycleError,
    HolonomyError,
    FactorError,
    IsogenyAmbiguity,
    UnsupportedNormalizer,
    DimensionMismatch,
    OSError,
)


def _load(args) -> ManifoldSpecFile:
    spec = load_manifold_spec(args.spec)
    if args.verbose > 0:
        utilities.print_banner()
        print(f"Loaded {spec.name} from {args.spec}.", file=sys.stderr)
    return spec


def cmd_classify(args) -> Tuple[ReportDocument, int]:
    """Classifies the manifolds of a spec file up to biholomorphism."""
    spec = _load(args)
    bound = spec.effective_bound(args.bound)
    T = spec.build_torus(bound)
    action = spec.build_action(T)
    report = classify_manifolds(
        T,
        action,
        bound=bound,
        processes=args.processes,
        verbosity=args.verbose,
    )
    if args.csv:
        utilities.write_orbit_csv(report, args.csv, args.verbose)
    return classification_document(spec, report, args.orbit_details), EXIT_OK


def cmd_aut(args) -> Tuple[ReportDocument, int]:
    """Automorphism data of the manifold given by the spec file's cocycle."""
    spec = _load(args)
    if not spec.has_cocycle:
        raise SpecFileError("The aut command needs a cocycle section.", field="cocycle")
    bound = spec.effective_bound(args.bound)
    T = spec.build_torus(bound)
    action = spec.build_action(T)
    C = CrystalGroup.from_cocycle(spec.build_cocycle(action))
    N = normalizer_model(T, action, verbosity=args.verbose)
    try:
        aut = automorphism_report(C, N, bound=bound)
    except NonFreeAction as e:
        return error_document("aut", spec, str(e), e.element), EXIT_NOT_FREE
    return automorphism_document(spec, aut, N), EXIT_OK


def cmd_cohomology(args) -> Tuple[ReportDocument, int]:
    """H^1(G, T), H^1(G, L), H^2(G, L) and the fixed points T^G."""
    spec = _load(args)
    T = spec.build_torus(spec.effective_bound(args.bound))
    action = spec.build_action(T)
    groups = {
        "H1_T": torus_h1(T, action),
        "H1_L": lattice_cohomology(action, 1),
        "H2_L": lattice_cohomology(action, 2),
    }
    structure, betti1 = fixed_point_group(T, action)
    fixed_points = str(structure) if betti1 == 0 else f"{structure} x (S^1)^{betti1}"
    return cohomology_document(spec, groups, fixed_points, betti1), EXIT_OK


def cmd_free_check(args) -> Tuple[ReportDocument, int]:
    """Decides whether the spec file's cocycle defines a free action."""
    spec = _load(args)
    if not spec.has_cocycle:
        raise SpecFileError(
            "The free-check command needs a cocycle section.", field="cocycle"
        )
    action = spec.build_action()
    C = CrystalGroup.from_cocycle(spec.build_cocycle(action))
    i = first_fixed_element(C)
    label = None if i is None else action.label(i)
    code = EXIT_OK if label is None else EXIT_NOT_FREE
    return free_check_document(spec, label), code


COMMANDS = {
    "classify": cmd_classify,
    "aut": cmd_aut,
    "cohomology": cmd_cohomology,
    "free-check": cmd_free_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatkahler",
        description="Automorphism groups and biholomorphism classes of flat "
        + "Kahler manifolds T / G~.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, func in COMMANDS.items():
        sub = subparsers.add_parser(name, help=func.__doc__)
        sub.add_argument("spec", help="Manifold spec file (YAML)")
        sub.add_argument(
            "--bound",
            type=int,
            default=None,
            help="Bound on group closures and the normalizer image "
            + "(default: the spec file's bound, else 10000)",
        )
        sub.add_argument("--json", metavar="PATH", help="Write the report to PATH")
        sub.add_argument(
            "-v", "--verbose", action="count", default=0, help="Progress on stderr"
        )
        if name == "classify":
            sub.add_argument(
                "--orbit-details",
                action="store_true",
                help="Include orbit members and image stabilizers",
            )
            sub.add_argument("--csv", metavar="PATH", help="Write the orbit table")
            sub.add_argument(
                "--processes",
                type=int,
                default=1,
                help="Worker processes for class screening",
            )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    command = COMMANDS[args.command]
    try:
        stdout = sys.stdout
        if args.verbose > 0:
            # Keep stdout for the document
            sys.stdout = sys.stderr
        try:
            doc, code = command(args)
        finally:
            sys.stdout = stdout
    except NonFreeAction as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_FREE
    except ClosureExceedsBound as e:
        print(f"error: {e} (see --bound)", file=sys.stderr)
        return EXIT_BOUND
    except INVALID_INPUT as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID

    for warning in doc.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if doc.error is not None:
        print(f"error: {doc.error}", file=sys.stderr)
    if args.json:
        doc.write(args.json)
    elif doc.error is None:
        print(doc.to_json())
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
