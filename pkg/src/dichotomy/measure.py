"""Discrete measures on the extended half-line ``(-inf, +inf]``."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite sum of point masses.

    ``atoms`` is a tuple of ``(location, weight)`` pairs sorted by location, with
    ``math.inf`` allowed as a location.  Locations and weights may be floats or
    ``mpmath.mpf`` values; weights must be strictly positive.
    """

    atoms: tuple

    def __post_init__(self):
        atoms = tuple(sorted(((loc, w) for loc, w in self.atoms), key=lambda a: a[0]))
        locs = [a[0] for a in atoms]
        if any(w <= 0 for _, w in atoms):
            raise ValueError("atom weights must be positive")
        if len(set(locs)) != len(locs):
            raise ValueError("atom locations must be distinct")
        object.__setattr__(self, "atoms", atoms)

    @property
    def locations(self) -> tuple:
        return tuple(a[0] for a in self.atoms)

    @property
    def weights(self) -> tuple:
        return tuple(a[1] for a in self.atoms)

    @property
    def total_mass(self):
        return sum(self.weights)

    def finite_part(self) -> "DiscreteMeasure":
        return DiscreteMeasure(tuple(a for a in self.atoms if a[0] != math.inf))

    def __len__(self) -> int:
        return len(self.atoms)
