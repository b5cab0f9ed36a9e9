"""Complex conjugation preserves every divergence, yet no diagonal unitary links the states."""

import numpy as np

from dichotomy.qdichotomy import QuantumDichotomy, phase_intertwiner
from dichotomy.zoo import divergence

w = np.exp(2j * np.pi / 3)
RHO = np.array([[1, 0.3 * w, 0.2], [0.3 * np.conj(w), 1, 0.25 * w], [0.2, 0.25 * np.conj(w), 1]]) / 3
SIGMA = np.diag([0.5, 0.3, 0.2]).astype(complex)


def main():
    d, e = QuantumDichotomy(RHO, SIGMA), QuantumDichotomy(np.conj(RHO), SIGMA)
    for fam, a in (("petz", 0.5), ("sandwiched", 2.0), ("maximal", 1.5), ("measured", 2.0)):
        print(f"{fam:>10} a={a}: {divergence(d, fam, a).value:.12f}  {divergence(e, fam, a).value:.12f}")
    print("diagonal unitary intertwiner:", phase_intertwiner(RHO, np.conj(RHO), SIGMA))


if __name__ == "__main__":
    main()
