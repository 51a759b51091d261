"""Bound states of the geodetic planar shear channel against the closed-form levels.

For every (m, n) in a square window the grid solver counts levels below the
continuum threshold and the closed-form Poschl-Teller levels are listed next
to them.  The last column says whether the solver found a level, and whether
mn > 0, so cells where the two disagree stand out.

    python3 scripts/bound_state_sweep.py --max-label 4 --out sweep.csv
"""

import argparse

import numpy as np

from affinebody import InertiaModel
from affinebody.quantum.operators1d import poschl_teller_shear_levels
from affinebody.quantum.planar import bound_state_count
from affinebody.scenario.table import ResultTable, export_table


def sweep(max_label: int, A: float, N: int) -> ResultTable:
    model = InertiaModel.affine_affine(2, A, 0.0)
    table = ResultTable([
        ("m", "int"), ("n", "int"), ("count", "int"), ("exact_count", "int"), ("levels", "str"),
        ("exact_levels", "str"), ("max_change", "float"), ("bound", "int"), ("mn_positive", "int"),
    ])
    for m in range(-max_label, max_label + 1):
        for n in range(-max_label, max_label + 1):
            res = bound_state_count(model, m, n, N=N)
            exact = poschl_teller_shear_levels(m, n, 1.0 / A)
            table.append(m, n, res.count, len(exact), " ".join(f"{e:.6f}" for e in res.energies),
                         " ".join(f"{e:.6f}" for e in exact), res.max_change, int(res.count > 0), int(m * n > 0))
    return table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-label", type=int, default=4)
    parser.add_argument("--A", type=float, default=1.0, help="affine inertia coefficient")
    parser.add_argument("--N", type=int, default=2000, help="starting grid size")
    parser.add_argument("--out", default=None, help="write the table as CSV or JSON")
    args = parser.parse_args()
    table = sweep(args.max_label, args.A, args.N)
    for rec in table.records():
        flag = "" if rec["bound"] == rec["mn_positive"] else "  <- differs from mn > 0"
        print(f"({rec['m']:+d},{rec['n']:+d}) count {rec['count']} exact {rec['exact_count']}"
              f"  [{rec['levels']}] vs [{rec['exact_levels']}]{flag}")
    mism = np.sum(np.array(table.column("bound")) != np.array(table.column("mn_positive")))
    print(f"{mism} of {len(table.rows)} channels differ from the mn > 0 rule")
    if args.out:
        export_table(table, args.out, "json" if args.out.endswith(".json") else "csv")


if __name__ == "__main__":
    main()
