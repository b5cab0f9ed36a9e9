"""Complete-monotonicity checks for the qubit family rho_s = exp(s X)/(2 cosh s)."""

import sys

from dichotomy.cm import cm_check, curves_to_csv, derivative_curves, qubit_pair

GRID = [0.05 * k for k in range(1, 81)]


def main():
    for s in (0.0, 0.1, 0.3, 0.6, 1.0):
        rep = cm_check(qubit_pair(s), "sandwiched", GRID, max_order=6)
        print(f"s = {s:.1f}: orders passed {rep.orders_passed()}, first violation {rep.first_violation}")
    if "--csv" in sys.argv:
        curves_to_csv(derivative_curves(qubit_pair(0.3), "sandwiched", GRID, max_order=4), 4, sys.stdout)


if __name__ == "__main__":
    main()
