import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dichotomy.classical import ClassicalDichotomy, classical_renyi, minimal_form
from dichotomy.ensembles import haar_unitary, random_density_matrix, random_pure_state
from dichotomy.errors import AmbiguousBasisWarning, CertificationError, DegenerateSigma, InvalidState, NotPure
from dichotomy.qdichotomy import (
    ChannelPair,
    QuantumDichotomy,
    commutant_dimension,
    commutes,
    commuting_reduction,
    conjugate_in_sigma_basis,
    d_infinity,
    density_matrix,
    gibbs_state,
    log_partition,
    maximal_simulation,
    nussbaum_szkola,
    nussbaum_szkola_vectors,
    phase_intertwiner,
    pure_overlap_data,
    pure_state_channels,
)
from dichotomy.zoo import maximal, petz, sandwiched

from conftest import PLUS, RHO3, SIGMA3, SZ


def random_pair(seed, n=None, rank=None):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7)) if n is None else n
    return QuantumDichotomy(random_density_matrix(rng, n, rank), random_density_matrix(rng, n))


def pure(vec):
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


# --- validation -------------------------------------------------------------

@pytest.mark.parametrize("M", [
    np.array([[1, 0.1], [0, 0]]),
    np.diag([1.2, -0.2]),
    np.diag([0.6, 0.6]),
    np.ones((2, 3)) / 3,
])
def test_invalid_states(M):
    with pytest.raises(InvalidState):
        density_matrix(M)


def test_dimension_mismatch():
    with pytest.raises(InvalidState):
        QuantumDichotomy(np.eye(2) / 2, np.eye(3) / 3)


def test_support_flag():
    assert not QuantumDichotomy(np.diag([0.5, 0.5]), np.diag([1.0, 0.0])).support_ok
    assert QuantumDichotomy(np.diag([1.0, 0.0]), np.diag([0.5, 0.5])).support_ok


# --- commutation structure ----------------------------------------------------

def test_commutes_examples():
    assert commutes(QuantumDichotomy(np.diag([0.3, 0.7]), np.diag([0.6, 0.4])))
    assert not commutes(QuantumDichotomy(PLUS, np.diag([0.75, 0.25])))
    r = random_density_matrix(np.random.default_rng(0), 3)
    assert commutes(QuantumDichotomy(r, r))


def test_commutant_dimension_examples():
    assert commutant_dimension(random_pair(1, 2)) == 1
    assert commutant_dimension(QuantumDichotomy(np.eye(2) / 2, np.eye(2) / 2)) == 4
    assert commutant_dimension(QuantumDichotomy(np.diag([0.3, 0.7]), np.diag([0.6, 0.4]))) == 2
    assert commutant_dimension(QuantumDichotomy(RHO3, SIGMA3)) == 1


def test_commuting_reduction_examples():
    c = commuting_reduction(QuantumDichotomy(np.diag([0.5, 0.5]), np.diag([0.75, 0.25])))
    assert np.allclose(sorted(zip(*c.as_arrays())), sorted([(0.5, 0.75), (0.5, 0.25)]))
    rng = np.random.default_rng(3)
    U = haar_unitary(rng, 3)
    p, q = np.array([0.2, 0.3, 0.5]), np.array([0.5, 0.25, 0.25])
    d = QuantumDichotomy(U @ np.diag(p) @ U.conj().T, U @ np.diag(q) @ U.conj().T)
    c = commuting_reduction(d)
    assert np.allclose(sorted(zip(*c.as_arrays())), sorted(zip(p, q)))


def test_commuting_reduction_equal_states():
    r = random_density_matrix(np.random.default_rng(5), 3)
    c = commuting_reduction(QuantumDichotomy(r, r))
    p, q = c.as_arrays()
    np.testing.assert_allclose(p, q, atol=1e-12)
    np.testing.assert_allclose(sorted(p), sorted(np.linalg.eigvalsh(r)), atol=1e-10)


def test_commuting_reduction_rejects_noncommuting():
    with pytest.raises(ValueError):
        commuting_reduction(QuantumDichotomy(PLUS, np.diag([0.75, 0.25])))


# --- classical simulations ---------------------------------------------------

def test_ns_plus_vs_maximally_mixed():
    d = QuantumDichotomy(PLUS, np.eye(2) / 2)
    c = nussbaum_szkola(d)
    for alpha in (0.5, 1, 1.5, 2):
        assert classical_renyi(c, alpha) == pytest.approx(math.log(2), abs=1e-12)
        assert petz(d, alpha).value == pytest.approx(math.log(2), abs=1e-12)


def test_ns_commuting_matches_reduction():
    d = QuantumDichotomy(np.diag([0.2, 0.3, 0.5]), np.diag([0.5, 0.25, 0.25]))
    a = minimal_form(nussbaum_szkola(d))
    b = minimal_form(commuting_reduction(d))
    assert (a.p_tilde, a.q_tilde) == (b.p_tilde, b.q_tilde)


def test_ns_equal_states():
    r = random_density_matrix(np.random.default_rng(9), 4)
    P, Q = nussbaum_szkola_vectors(QuantumDichotomy(r, r))
    np.testing.assert_allclose(P, Q, atol=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_ns_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    rank = int(rng.integers(1, n + 1)) if seed % 3 == 0 else None
    d = QuantumDichotomy(random_density_matrix(rng, n, rank), random_density_matrix(rng, n))
    c = nussbaum_szkola(d)
    for alpha in (0, 0.3, 0.7, 1, 1.4, 2):
        assert classical_renyi(c, alpha) == pytest.approx(petz(d, alpha).value, abs=1e-10)


@given(st.integers(0, 10**9))
def test_ns_never_pure(seed):
    d = random_pair(seed)
    if not commutes(d):
        P, _ = nussbaum_szkola_vectors(d)
        assert P.max() < 1 - 1e-9


def test_maximal_simulation_equal_states():
    r = random_density_matrix(np.random.default_rng(2), 3)
    c = maximal_simulation(QuantumDichotomy(r, r))
    assert minimal_form(c).m == 1


def test_maximal_simulation_commuting():
    d = QuantumDichotomy(np.diag([0.2, 0.3, 0.5]), np.diag([0.5, 0.25, 0.25]))
    a = minimal_form(maximal_simulation(d))
    b = minimal_form(commuting_reduction(d))
    np.testing.assert_allclose([float(x) for x in a.p_tilde], [float(x) for x in b.p_tilde], atol=1e-9)
    np.testing.assert_allclose([float(x) for x in a.q_tilde], [float(x) for x in b.q_tilde], atol=1e-9)


@pytest.mark.parametrize("seed", range(40))
def test_maximal_simulation_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    d = QuantumDichotomy(random_density_matrix(rng, n), random_density_matrix(rng, n))
    c = maximal_simulation(d)
    for alpha in (0, 0.3, 0.7, 1, 1.5, 2):
        assert classical_renyi(c, alpha) == pytest.approx(maximal(d, alpha).value, abs=1e-9)


# --- max-divergence and Gibbs states ---------------------------------------

def test_d_infinity_examples():
    r = random_density_matrix(np.random.default_rng(4), 3)
    assert d_infinity(QuantumDichotomy(r, r)) == pytest.approx(0, abs=1e-12)
    assert d_infinity(QuantumDichotomy(PLUS, np.eye(2) / 2)) == pytest.approx(math.log(2), abs=1e-14)
    p, q = np.array([0.1, 0.6, 0.3]), np.array([0.3, 0.3, 0.4])
    assert d_infinity(QuantumDichotomy(np.diag(p), np.diag(q))) == pytest.approx(math.log(2), abs=1e-14)
    assert d_infinity(QuantumDichotomy(np.diag([0.5, 0.5]), np.diag([1.0, 0]))) == math.inf


@pytest.mark.parametrize("seed", range(10))
def test_d_infinity_is_sandwiched_limit(seed):
    d = random_pair(seed)
    assert sandwiched(d, 1e3).value == pytest.approx(d_infinity(d), abs=1e-2)
    assert sandwiched(d, 1e3).value <= d_infinity(d) + 1e-12


def test_gibbs_examples():
    np.testing.assert_allclose(gibbs_state(np.zeros((3, 3)), 2.0), np.eye(3) / 3, atol=1e-15)
    g = gibbs_state(SZ, 1.0)
    np.testing.assert_allclose(g, np.diag([math.exp(-1), math.e]) / (2 * math.cosh(1)), atol=1e-15)
    g = gibbs_state(np.diag([0.0, 1.0, 2.0]), 50.0)
    assert np.linalg.norm(g - np.diag([1.0, 0, 0])) < 1e-9
    assert log_partition(SZ, 1.0) == pytest.approx(math.log(2 * math.cosh(1)), abs=1e-15)
    assert log_partition(np.diag([1000.0, 1001.0]), 1.0) == pytest.approx(-1000 + math.log(1 + math.exp(-1)))


# --- conjugation ------------------------------------------------------------

def test_conjugation_examples():
    d = QuantumDichotomy(RHO3, SIGMA3)
    rho_bar = conjugate_in_sigma_basis(d).rho
    np.testing.assert_allclose(rho_bar, np.conj(RHO3), atol=1e-15)
    real = QuantumDichotomy(np.array([[0.5, 0.2], [0.2, 0.5]]), np.diag([0.7, 0.3]))
    np.testing.assert_allclose(conjugate_in_sigma_basis(real).rho, real.rho, atol=1e-15)


def test_conjugation_degenerate_flag():
    d = QuantumDichotomy(np.array([[0.5, 0.5j], [-0.5j, 0.5]]), np.eye(2) / 2)
    with pytest.warns(AmbiguousBasisWarning):
        conjugate_in_sigma_basis(d)


def test_phase_intertwiner_examples():
    assert np.allclose(phase_intertwiner(RHO3, RHO3, SIGMA3), 0)
    assert phase_intertwiner(RHO3, np.conj(RHO3), SIGMA3) is None
    with pytest.raises(DegenerateSigma):
        phase_intertwiner(RHO3, RHO3, np.eye(3) / 3)


@pytest.mark.parametrize("seed", range(200))
def test_phase_intertwiner_recovers_phases(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    rho = random_density_matrix(rng, n)
    sigma = np.diag(np.sort(rng.dirichlet(np.ones(n)))[::-1]).astype(complex)
    theta = rng.uniform(0, 2 * np.pi, n)
    U = np.diag(np.exp(1j * theta))
    phi = phase_intertwiner(rho, U @ rho @ U.conj().T, sigma)
    assert phi is not None
    V = np.diag(np.exp(1j * phi))
    np.testing.assert_allclose(V @ rho @ V.conj().T, U @ rho @ U.conj().T, atol=1e-9)
    # phases agree with theta up to a global phase
    delta = np.angle(np.exp(1j * (phi - theta)))
    assert np.ptp(np.unwrap(delta)) < 1e-8 or np.allclose(np.exp(1j * (delta - delta[0])), 1, atol=1e-8)


# --- pure states -------------------------------------------------------------

def test_pure_identity():
    d = QuantumDichotomy(PLUS, np.diag([0.75, 0.25]))
    ch = pure_state_channels(d, d)
    assert max(ch.residuals) <= 1e-12


def test_pure_vs_maximally_mixed():
    d1 = QuantumDichotomy(PLUS, np.eye(2) / 2)
    d2 = QuantumDichotomy(pure([0.6, 0.8j]), np.eye(2) / 2)
    assert [round(u, 12) for u, _, _ in pure_overlap_data(d1)] == [1.0]
    ch = pure_state_channels(d1, d2)
    assert ch is not None and max(ch.residuals) <= 1e-8
    np.testing.assert_allclose(ChannelPair.apply(ch.forward, d1.rho), d2.rho, atol=1e-10)


def test_pure_mismatch():
    sigma = np.diag([0.75, 0.25])
    assert pure_state_channels(QuantumDichotomy(PLUS, sigma), QuantumDichotomy(pure([1, 0]), sigma)) is None


def test_not_pure():
    with pytest.raises(NotPure):
        pure_state_channels(QuantumDichotomy(np.eye(2) / 2, np.eye(2) / 2), QuantumDichotomy(PLUS, np.eye(2) / 2))


def matched_pure_pair(rng, n1, n2):
    """Two pure dichotomies of different dimensions with the same (u, v) data."""
    k = min(n1, n2) - 1
    v = rng.dirichlet(np.ones(k + 1))[:k] * 0.9
    u = rng.dirichlet(np.ones(k))

    def build(n):
        U = haar_unitary(rng, n)
        rest = 1 - v.sum()
        tail = rng.dirichlet(np.ones(n - k)) * rest
        sigma = U @ np.diag(np.concatenate([v, tail])) @ U.conj().T
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, k))
        psi = U @ np.concatenate([np.sqrt(u) * phases, np.zeros(n - k)])
        return QuantumDichotomy(np.outer(psi, psi.conj()), sigma)

    return build(n1), build(n2)


@pytest.mark.parametrize("seed", range(20))
def test_pure_matched_pairs_certify(seed):
    rng = np.random.default_rng(seed)
    d1, d2 = matched_pure_pair(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)))
    ch = pure_state_channels(d1, d2)
    assert ch is not None
    assert max(ch.residuals) <= 1e-8
    assert ChannelPair.tp_defect(ch.forward) < 1e-9 and ChannelPair.tp_defect(ch.backward) < 1e-9
    for alpha in (2, 3, 4, 5):
        assert sandwiched(d1, alpha).value == pytest.approx(sandwiched(d2, alpha).value, abs=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_pure_lemma_both_directions(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(2, 5))
    sigma = random_density_matrix(rng, n)
    d1 = QuantumDichotomy(pure(random_pure_state(rng, n)), sigma)
    d2 = QuantumDichotomy(pure(random_pure_state(rng, n)), sigma)
    agree = all(abs(sandwiched(d1, a).value - sandwiched(d2, a).value) <= 1e-8 for a in (2, 3, 4, 5))
    assert (pure_state_channels(d1, d2) is not None) == agree


def test_certification_error_is_raised_for_bad_tolerance():
    rng = np.random.default_rng(3)
    d1, d2 = matched_pure_pair(rng, 3, 3)
    # perturb d2 slightly: the (u, v) data still match at a loose tolerance,
    # but the constructed channels cannot hit the targets to 1e-8
    sigma = d2.sigma + 1e-6 * np.diag([1, -1, 0])
    d3 = QuantumDichotomy(d2.rho, sigma)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(CertificationError):
            pure_state_channels(d1, d3, tol=1e-4)
