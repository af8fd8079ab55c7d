import os
import hashlib
import pandas as pd
from art import tprint, art


def print_banner():
    """Prints the flatkahler banner"""
    tprint("FlatKahler", "tarty4")
    p = art("random")
    print(f" {p}")


def input_digest(text: str) -> str:
    """SHA-256 digest of a spec file's text, as reported with each run."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def orbit_frame(report) -> pd.DataFrame:
    """Tabulates a ClassificationReport, one row per orbit.

    Parameters
    ----------
    report : ClassificationReport
        The classification to tabulate.

    Returns
    -------
    df : pd.DataFrame
        Columns: orbit, size, representative (generator values over the
        cocycle modulus), image stabilizer order, N_alpha order and, when
        present, the automorphism data of each representative.
    """
    rows = []
    for k, orbit in enumerate(report.orbits):
        z = orbit.representative
        row = {
            "orbit": k + 1,
            "size": orbit.size,
            "modulus": z.modulus,
            "representative": "; ".join(
                " ".join(str(a) for a in v) for v in z.generator_values()
            ),
            "image_stabilizer": orbit.image_stabilizer_order,
            "n_alpha": orbit.stabilizer_order,
        }
        if orbit.automorphisms is not None:
            aut = orbit.automorphisms
            row["betti1"] = aut.betti1
            row["fixed_points"] = aut.fixed_point_order
            row["n_alpha_mod_g"] = aut.n_alpha_mod_g_order
            row["aut_order"] = aut.aut_order if aut.is_finite else "infinite"
        rows.append(row)
    return pd.DataFrame(rows)


def write_orbit_csv(report, path: str, verbosity: int = 0) -> None:
    """Writes the orbit table of a classification to CSV."""
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    orbit_frame(report).to_csv(path, index=False)
    if verbosity > 0:
        print(f"Orbit table written to {path}.")
