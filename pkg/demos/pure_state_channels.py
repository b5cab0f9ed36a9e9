"""Explicit channels between pure-state dichotomies with matching overlap data."""

import numpy as np

from dichotomy.qdichotomy import QuantumDichotomy, pure_state_channels


def main():
    plus = np.full((2, 2), 0.5)
    d1 = QuantumDichotomy(plus, np.eye(2) / 2)
    d2 = QuantumDichotomy(np.diag([1.0, 0.0]), np.eye(2) / 2)
    ch = pure_state_channels(d1, d2)
    print("forward Kraus count:", len(ch.forward), " backward Kraus count:", len(ch.backward))
    print("residuals:", [f"{r:.1e}" for r in ch.residuals])
    d3 = QuantumDichotomy(np.diag([1.0, 0.0]), np.diag([0.7, 0.3]))
    print("mismatched pair:", pure_state_channels(d1, d3))


if __name__ == "__main__":
    main()
