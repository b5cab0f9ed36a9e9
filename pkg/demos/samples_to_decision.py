"""Decide convertibility between two dichotomies from sampled Renyi divergences alone."""

import numpy as np

from dichotomy.classical import relative_majorizes
from dichotomy.ensembles import random_conditioned_dichotomy
from dichotomy.laplace import decide_conversion_from_divergences, reconstruct_minimal_form, sample_divergences


def main():
    rng = np.random.default_rng(2)
    d1, d2 = random_conditioned_dichotomy(rng), random_conditioned_dichotomy(rng)
    s1, s2 = sample_divergences(d1), sample_divergences(d2)
    print(f"{len(s1.alphas)} samples on [{float(s1.alphas[0]):.2f}, {float(s1.alphas[-1]):.2f}]")
    mf = reconstruct_minimal_form(s1)
    print("recovered p~ =", [f"{float(x):.6f}" for x in mf.p_tilde])
    dec = decide_conversion_from_divergences(s1, s2)
    print("decision from samples:", dec.convertible_1_to_2, dec.convertible_2_to_1)
    print("exact majorization:   ", relative_majorizes(d1, d2), relative_majorizes(d2, d1))


if __name__ == "__main__":
    main()
