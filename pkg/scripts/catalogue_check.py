"""Compare catalogue prefactors with values isolated from full simulations."""
import sys
from pathlib import Path

from cgi_sim import AtomSpecies, ExperimentParams, LaserConfig, table1_catalog
from cgi_sim.output import write_csv

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from isolation import recover_prefactors  # noqa: E402


def main():
    cat = table1_catalog(LaserConfig(), AtomSpecies(), ExperimentParams(5.0, 6.0, 0.6), 9.81, -2.7e-6)
    got = recover_prefactors()
    rows = []
    for term in cat:
        rec = got.get(term.id)
        sim = rec[:3] if rec else ("", "", "")
        rows.append([term.id, term.expression, term.prefactor_mzi, term.prefactor_sddi,
                     term.prefactor_diff, *sim, term.value])
    write_csv(sys.stdout, ["id", "expr", "pref_mzi", "pref_sddi", "pref_diff", "sim_mzi", "sim_sddi",
                           "sim_diff", "value_rad"], rows)


if __name__ == "__main__":
    main()
