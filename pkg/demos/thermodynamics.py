"""Nonequilibrium free energies of a qubit relative to its Gibbs state."""

import numpy as np

from dichotomy.qdichotomy import QuantumDichotomy, gibbs_state, log_partition
from dichotomy.zoo import divergence


def main():
    H, beta = np.diag([1.0, -1.0]), 1.0
    omega = gibbs_state(H, beta)
    rho = np.array([[0.5, 0.3], [0.3, 0.5]])
    d = QuantumDichotomy(rho, omega)
    log_z = log_partition(H, beta)
    for a in (0.5, 1.0, 2.0, 5.0):
        D = divergence(d, "sandwiched", a).value
        print(f"alpha {a}: D = {D:.6f}   F = {(D - log_z) / beta:.6f}")


if __name__ == "__main__":
    main()
