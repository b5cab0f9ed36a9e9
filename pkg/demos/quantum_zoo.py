"""Every divergence family on one random qubit pair, with its data-processing range."""

import numpy as np

from dichotomy.ensembles import random_density_matrix
from dichotomy.qdichotomy import QuantumDichotomy, d_infinity
from dichotomy.zoo import bs_entropy, divergence, umegaki


def main():
    rng = np.random.default_rng(0)
    d = QuantumDichotomy(random_density_matrix(rng, 2), random_density_matrix(rng, 2))
    print(f"Umegaki {umegaki(d):.6f}   BS {bs_entropy(d):.6f}   D_inf {d_infinity(d):.6f}")
    for fam in ("petz", "sandwiched", "maximal", "log-euclidean", "alpha-z:0.8", "measured"):
        row = []
        for a in (0.5, 0.75, 1.5, 2.0):
            v = divergence(d, fam, a)
            row.append(f"{v.value:.6f}{'' if v.dpi_valid else '*'}")
        print(f"{fam:>14}: " + "  ".join(row))
    print("(* = outside the data-processing range)")


if __name__ == "__main__":
    main()
