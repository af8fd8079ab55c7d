import json
import pandas as pd
import pytest
from flatkahler.catalogue import spec_path
from flatkahler.cli import (
    EXIT_BOUND,
    EXIT_INVALID,
    EXIT_NOT_FREE,
    EXIT_OK,
    build_parser,
    main,
)
from flatkahler.report import ReportDocument, compare_expected


ZERO_COCYCLE = """\
name: chw_zero
torus: [eisenstein, eisenstein, gauss]
group:
  orders: [2, 2]
  generators:
    - [0, 3, 2]
    - [3, 0, 2]
cocycle:
  modulus: 2
  generators:
    - [0, 0, 0, 0, 0, 0]
    - [0, 0, 0, 0, 0, 0]
"""


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    data = json.loads(captured.out) if captured.out.strip() else None
    return code, data, captured.err


def test_parser_commands():
    parser = build_parser()
    args = parser.parse_args(["classify", "x.yaml", "--processes", "2", "-vv"])
    assert args.processes == 2
    assert args.verbose == 2
    assert args.bound is None
    args = parser.parse_args(["free-check", "x.yaml", "--bound", "50"])
    assert args.bound == 50
    assert not hasattr(args, "csv")


def test_classify_chw(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, data, err = run(capsys, "classify", spec_path("chw_xi_xi_i"), "--json", str(out))
    assert code == EXIT_OK
    assert data is None
    assert err == ""

    doc = ReportDocument.from_json(out.read_text())
    assert doc.command == "classify"
    assert doc.special_class_count == 27
    assert doc.m == 2
    assert doc.normalizer["order"] == 288
    assert doc.normalizer["image_order"] == 36
    assert doc.normalizer["kernel_order"] == 8
    assert all(check["agrees"] for check in doc.checks)
    assert sorted(o["automorphisms"]["aut_order"] for o in doc.orbits) == [256, 512]
    assert "members" not in doc.orbits[0]


def test_classify_details_and_csv(capsys, tmp_path):
    csv = tmp_path / "tables" / "orbits.csv"
    code, data, _ = run(
        capsys, "classify", spec_path("chw_generic"), "--orbit-details", "--csv", str(csv)
    )
    assert code == EXIT_OK
    assert data["m"] == 27
    assert data["normalizer"]["image_order"] == 1
    assert all(len(o["members"]) == 1 for o in data["orbits"])
    assert len(pd.read_csv(csv)) == 27


def test_classify_verbose_keeps_stdout_clean(capsys):
    code, data, err = run(capsys, "classify", spec_path("chw_xi_xi_xi"), "-v")
    assert code == EXIT_OK
    assert data["m"] == 1
    assert "special classes" in err


def test_fourfold_reference_disagreements(capsys):
    code, data, err = run(capsys, "aut", spec_path("fourfold_z3"))
    assert code == EXIT_OK
    assert data["automorphisms"]["aut_order"] == 2187
    assert data["normalizer"]["permutation_order"] == 3
    flagged = {c["key"] for c in data["checks"] if not c["agrees"]}
    assert flagged == {"permutation_order", "aut_order"}
    assert "warning: aut_order" in err

    code, data, _ = run(capsys, "classify", spec_path("fourfold_z3"))
    assert data["m"] == 1
    assert data["special_class_count"] == 16


def test_chw_beta(capsys):
    code, data, err = run(capsys, "aut", spec_path("chw_xi_xi_i_beta"))
    assert code == EXIT_OK
    assert data["automorphisms"]["n_alpha_order"] == 32
    assert data["automorphisms"]["aut_order"] == 512
    assert "1024" in err


def test_infinite_automorphisms(capsys):
    code, data, err = run(capsys, "aut", spec_path("fivefold_g"))
    assert code == EXIT_OK
    assert data["automorphisms"]["aut_order"] == "infinite"
    assert data["normalizer"]["finite"] is False
    assert data["automorphisms"]["reasons"]
    assert err == ""

    code, data, _ = run(capsys, "aut", spec_path("extension_infinite"))
    assert data["automorphisms"]["aut_order"] == "infinite"

    code, data, _ = run(capsys, "aut", spec_path("extension_finite"))
    assert data["automorphisms"]["aut_order"] == 512


def test_cohomology_command(capsys):
    code, data, _ = run(capsys, "cohomology", spec_path("fourfold_z3"))
    assert code == EXIT_OK
    assert data["cohomology"]["H1_T"] == "Z3^4"
    assert data["cohomology"]["H2_L"] == "Z3^4"
    assert data["cohomology"]["T^G"] == "Z3^4"
    assert data["cohomology"]["betti1"] == 0


def test_free_check(capsys, tmp_path):
    code, data, _ = run(capsys, "free-check", spec_path("chw_xi_xi_i"))
    assert code == EXIT_OK
    assert data["free"] is True

    spec = tmp_path / "zero.yaml"
    spec.write_text(ZERO_COCYCLE)
    code, data, _ = run(capsys, "free-check", str(spec))
    assert code == EXIT_NOT_FREE
    assert data["free"] is False
    assert data["fixed_element"] == "g2"

    code, data, err = run(capsys, "aut", str(spec))
    assert code == EXIT_NOT_FREE
    assert data is None
    assert "g2" in err


def test_aut_not_free_writes_error_document(capsys, tmp_path):
    spec = tmp_path / "zero.yaml"
    spec.write_text(ZERO_COCYCLE)
    out = tmp_path / "aut.json"
    code, data, err = run(capsys, "aut", str(spec), "--json", str(out))
    assert code == EXIT_NOT_FREE
    assert data is None
    assert "g2" in err

    doc = ReportDocument.from_json(out.read_text())
    assert doc.command == "aut"
    assert doc.name == "chw_zero"
    assert doc.free is False
    assert doc.fixed_element == "g2"
    assert "g2" in doc.error
    assert doc.automorphisms is None


def test_invalid_input(capsys, tmp_path):
    code, _, err = run(capsys, "classify", str(tmp_path / "missing.yaml"))
    assert code == EXIT_INVALID

    spec = tmp_path / "bad.yaml"
    spec.write_text(ZERO_COCYCLE.replace("- [3, 0, 2]", "- [3, 0, 7]"))
    code, _, err = run(capsys, "cohomology", str(spec))
    assert code == EXIT_INVALID
    assert "line 7" in err

    code, _, _ = run(capsys, "aut", spec_path("chw_generic"))
    assert code == EXIT_INVALID

    assert main(["no-such-command"]) == EXIT_INVALID
    capsys.readouterr()


def test_bound_exceeded(capsys):
    code, data, err = run(capsys, "classify", spec_path("chw_xi_xi_i"), "--bound", "10")
    assert code == EXIT_BOUND
    assert data is None
    assert "--bound" in err


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.strip()


def test_report_document():
    doc = ReportDocument(
        command="aut", name="x", input_digest="0" * 64, torus="E_xi", holonomy="Z3"
    )
    data = doc.to_dict()
    assert "m" not in data
    assert "error" not in data
    assert ReportDocument.from_json(doc.to_json()) == doc
    with pytest.raises(ValueError):
        ReportDocument.from_dict({**data, "colour": "red"})


def test_compare_expected():
    checks, warnings = compare_expected(
        {"aut_order": 4374, "orbit_count": 1, "h1": "Z3^4"},
        {"aut_order": 2187, "h1": "Z3^4"},
    )
    assert [c["key"] for c in checks] == ["aut_order", "h1"]
    assert [c["agrees"] for c in checks] == [False, True]
    assert len(warnings) == 1
    assert "4374" in warnings[0]
