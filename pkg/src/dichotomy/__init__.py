"""Dichotomies of classical and quantum states.

Modules
-------
linops
    Jacobi eigensolver, eigenvalue clustering and spectral matrix functions.
classical
    Exact rational dichotomies, minimal forms, stochastic maps, Lorenz curves.
laplace
    Laplace transforms of discrete measures and recovery of minimal forms from
    Renyi divergence samples.
qdichotomy
    Quantum dichotomies: structure tests, classical simulations, pure-state
    channels and Gibbs states.
zoo
    Quantum Renyi divergence families.
cm
    Complete-monotonicity tests of the normalised power function ``g``.
cli
    Command-line entry point ``dichotomy``.
"""

from .classical import (
    ClassicalDichotomy,
    MinimalForm,
    StochasticMatrix,
    build_channels,
    classical_renyi,
    interconvertible_classical,
    lorenz_curve,
    minimal_form,
    relative_majorizes,
    tilde_measure,
)
from .cm import cm_check, g_function, nth_derivative, petz_cm_analytic, qubit_pair
from .laplace import (
    DivergenceSamples,
    decide_conversion_from_divergences,
    laplace_transform,
    reconstruct_minimal_form,
    recover_exponential_sum,
    sample_divergences,
)
from .linops import hermitian_eig, spectral_log, spectral_power
from .measure import DiscreteMeasure
from .qdichotomy import (
    QuantumDichotomy,
    commutant_dimension,
    commutes,
    commuting_reduction,
    conjugate_in_sigma_basis,
    d_infinity,
    gibbs_state,
    maximal_simulation,
    nussbaum_szkola,
    phase_intertwiner,
    pure_state_channels,
)
from .zoo import Family, alpha_z, bs_entropy, divergence, log_euclidean, maximal, measured, petz, sandwiched, umegaki

__version__ = "0.1.0"
