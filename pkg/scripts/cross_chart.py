"""d'Alembert planar spectra in the Q+- chart and the polar chart, side by side.

The separable family V = a/Q+^2 + b/Q-^2 + c (Q+^2 + Q-^2) is solved in both
charts for each channel; the closed form (sums of planar radial oscillator
levels) is printed alongside.

    python3 scripts/cross_chart.py --a 1 --b 0.5 --c 1 --channels 1,1 2,1 3,-1
"""

import argparse

import numpy as np

from affinebody.quantum.operators1d import radial_oscillator_levels
from affinebody.quantum.planar import dalembert_polar_solver, dalembert_qpm_solver, qpm_total_levels


def closed_form(m, n, a, b, c, I, k):
    Omega = np.sqrt(2.0 * c / I)
    plus = radial_oscillator_levels(np.sqrt((m - n) ** 2 / 4 + 2 * I * a), Omega, k)
    minus = radial_oscillator_levels(np.sqrt((m + n) ** 2 / 4 + 2 * I * b), Omega, k)
    return np.sort((plus[:, None] + minus[None, :]).ravel())[:k]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--a", type=float, default=1.0)
    parser.add_argument("--b", type=float, default=0.5)
    parser.add_argument("--c", type=float, default=1.0)
    parser.add_argument("--I", type=float, default=1.0)
    parser.add_argument("--levels", type=int, default=5)
    parser.add_argument("--channels", nargs="+", default=["1,1", "2,1"])
    args = parser.parse_args()
    a, b, c, I, k = args.a, args.b, args.c, args.I, args.levels
    for label in args.channels:
        m, n = (int(v) for v in label.split(","))
        sp, sm = dalembert_qpm_solver(m, n, lambda Q: a / Q ** 2 + c * Q ** 2, lambda Q: b / Q ** 2 + c * Q ** 2,
                                      I=I, k=k)
        qpm = qpm_total_levels(sp, sm, k).eigenvalues
        polar = dalembert_polar_solver(m, n, lambda r: c * r ** 2,
                                       lambda p: a / np.cos(p) ** 2 + b / np.sin(p) ** 2, I=I, k=k).eigenvalues
        exact = closed_form(m, n, a, b, c, I, k)
        print(f"channel ({m},{n})")
        for i in range(k):
            print(f"  {i}: Q+- {qpm[i]:.8f}  polar {polar[i]:.8f}  closed form {exact[i]:.8f}  "
                  f"rel diff {abs(polar[i] - qpm[i]) / abs(qpm[i]):.1e}")


if __name__ == "__main__":
    main()
