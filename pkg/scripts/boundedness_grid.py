"""Planar spin/vorticity grid: classifier verdict against long trajectories.

Runs the Boundedness2D scenario (``configs/boundedness_2d.yaml`` by default)
and prints one line per cell with the allowed shear interval and the range
the trajectory actually covered.

    python3 scripts/boundedness_grid.py --steps 8000
"""

import argparse
from pathlib import Path

from affinebody.scenario.config import config_from_mapping, load_config
from affinebody.scenario.runner import run_scenario
from affinebody.scenario.table import export_table

DEFAULT = Path(__file__).resolve().parent.parent / "configs" / "boundedness_2d.yaml"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=str(DEFAULT))
    parser.add_argument("--steps", type=int, default=None, help="override the step count")
    parser.add_argument("--lift", type=float, default=None, help="override the initial energy lift")
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    raw = load_config(Path(args.config)).to_dict()
    if args.steps is not None:
        raw["numerics"]["steps"] = args.steps
    if args.lift is not None:
        raw["numerics"]["lift"] = args.lift
    table = run_scenario(config_from_mapping(raw))
    for r in table.records():
        print(f"p_alpha {r['p_alpha']:+.1f} p_beta {r['p_beta']:+.1f} {r['class']:<9} "
              f"allowed [{r['x_inner']:.3f}, {r['x_outer']:.3f}] visited [{r['x_min']:.3f}, {r['x_max']:.3f}] "
              f"t_end {r['t_end']:.1f} agrees {bool(r['agrees'])}")
    agree = sum(table.column("agrees"))
    print(f"{agree}/{len(table.rows)} cells agree with the classifier")
    if args.out:
        export_table(table, args.out, "json" if args.out.endswith(".json") else "csv")


if __name__ == "__main__":
    main()
