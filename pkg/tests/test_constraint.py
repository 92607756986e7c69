"""Zero-energy composite states and conditional-state identities."""

import numpy as np
import pytest

from clocklab.algebra import build_clock, build_su2_rep, intensive_h4_clock, intensive_su2_clock
from clocklab.constraint import (
    build_psi,
    chi2_identity_residual,
    conditional_state,
    gaussian_profile,
    match_spectra,
    precs_decomposition_check,
    random_profile,
    reduced_density_clock,
    reduced_density_gamma,
    total_hamiltonian,
)
from clocklab.dynamics import detuned_ladder, energy_of_rho, resonant_ladder


def make_state(j=6.0, rho=0.5, width=0.2):
    clock = intensive_su2_clock(j)
    h_system = resonant_ladder(clock, clock.dim)
    match = match_spectra(clock.h_c, h_system, tol=1e-9 * clock.epsilon)
    psi = build_psi(match, gaussian_profile(match, energy_of_rho(clock, rho), width))
    return clock, h_system, match, psi


def test_match_spectra_finds_all_pairs():
    """Every degenerate coincidence is returned, not just a greedy matching."""
    h_clock = np.diag([0.0, 1.0, 2.0])
    h_system = np.diag([1.0, 1.0, 5.0])
    match = match_spectra(h_clock, h_system, tol=1e-9)
    assert set(match.pairs) == {(1, 0), (1, 1)}


def test_match_spectra_tolerance_window():
    h_clock = np.diag([0.0, 1.0])
    h_system = np.diag([1.0 + 5e-10, 3.0])
    assert match_spectra(h_clock, h_system, tol=1e-9).pairs == ((1, 0),)
    assert match_spectra(h_clock, h_system, tol=1e-12).pairs == ()


def test_total_hamiltonian_annihilates_psi():
    """The composite state is a numerically exact zero mode of H."""
    clock, h_system, _, psi = make_state()
    h_total = total_hamiltonian(clock.h_c, h_system)
    assert np.linalg.norm(h_total @ psi.vector) < 1e-12


def test_psi_is_normalized_and_entangled():
    _, _, _, psi = make_state()
    assert abs(np.linalg.norm(psi.vector) - 1.0) < 1e-12
    assert psi.entanglement_entropy > 0.5


def test_single_pair_psi_warns_and_separates():
    """A one-pair kernel is a product state: zero entropy, with a warning."""
    clock = intensive_su2_clock(2.0)
    h_system = resonant_ladder(clock, 1)
    match = match_spectra(clock.h_c, h_system, tol=1e-9 * clock.epsilon)
    with pytest.warns(UserWarning):
        psi = build_psi(match, np.ones(1))
    assert psi.entanglement_entropy < 1e-12


def test_build_psi_refusals():
    clock = intensive_su2_clock(2.0)
    match = match_spectra(clock.h_c, detuned_ladder(clock, 3), tol=1e-9 * clock.epsilon)
    with pytest.raises(ValueError, match="no matched pairs"):
        build_psi(match, np.ones(0))
    good = match_spectra(clock.h_c, resonant_ladder(clock, 3), tol=1e-9 * clock.epsilon)
    with pytest.raises(ValueError, match="coefficients"):
        build_psi(good, np.ones(2))
    with pytest.raises(ValueError, match="vanish"):
        build_psi(good, np.zeros(3))


def test_random_profile_is_seeded():
    _, _, match, _ = make_state()
    a = random_profile(match, seed=7)
    b = random_profile(match, seed=7)
    c = random_profile(match, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert abs(np.linalg.norm(a) - 1.0) < 1e-12


def test_conditional_state_chi2_is_phase_free():
    """chi2 depends on rho only; conditioning angle drops out."""
    clock, _, _, psi = make_state()
    chis = [conditional_state(psi, clock, 0.5, phi).chi2
            for phi in (0.0, 0.9, 2.2, 5.1)]
    assert max(chis) - min(chis) < 1e-14
    assert chis[0] > 0


def test_conditional_state_normalization():
    clock, _, _, psi = make_state()
    cond = conditional_state(psi, clock, 0.45, 1.2)
    n = cond.normalized
    assert abs(np.linalg.norm(n) - 1.0) < 1e-12
    assert np.linalg.norm(cond.unnormalized - np.sqrt(cond.chi2) * n) < 1e-12


def test_conditional_state_floor_refusal():
    """Conditioning where the distribution vanishes is refused, not NaN'd."""
    clock = intensive_su2_clock(3.0)
    h_system = resonant_ladder(clock, 1)
    match = match_spectra(clock.h_c, h_system, tol=1e-9 * clock.epsilon)
    with pytest.warns(UserWarning):
        psi = build_psi(match, np.ones(1))
    # the ground-pair state has amplitude cos^{2j}(rho); at rho = pi/2 it dies
    cond = conditional_state(psi, clock, np.pi / 2, 0.0)
    with pytest.raises(ValueError, match="chi2"):
        _ = cond.normalized


def test_chi2_equals_husimi_of_reduced_clock():
    """chi2(rho, phi) = <lam| rho_C |lam> for the reduced clock state."""
    clock, _, _, psi = make_state()
    worst = max(chi2_identity_residual(psi, clock, r, p)
                for r in (0.2, 0.5, 0.9) for p in (0.0, 1.4))
    assert worst < 1e-12


def test_reduced_densities_are_states():
    clock, _, _, psi = make_state()
    for dens in (reduced_density_clock(psi), reduced_density_gamma(psi)):
        assert abs(np.trace(dens) - 1.0) < 1e-12
        assert np.linalg.norm(dens - dens.conj().T) < 1e-13
        assert np.linalg.eigvalsh(dens)[0] > -1e-13


def test_reduced_density_spectra_match():
    """Both partial traces share the same nonzero spectrum (Schmidt)."""
    clock, _, _, psi = make_state()
    ev_c = np.sort(np.linalg.eigvalsh(reduced_density_clock(psi)))[::-1]
    ev_g = np.sort(np.linalg.eigvalsh(reduced_density_gamma(psi)))[::-1]
    k = min(len(ev_c), len(ev_g))
    assert np.max(np.abs(ev_c[:k] - ev_g[:k])) < 1e-12


def test_precs_decomposition_su2():
    """Integrating |lam><lam| x |Phi><Phi| over the manifold returns |psi><psi|."""
    clock, _, _, psi = make_state(j=4.0)
    nodes = int(2 * 4.0 + 2)
    resid = precs_decomposition_check(psi, clock, n_polar=nodes, n_azim=clock.dim)
    assert resid < 1e-12


def test_precs_decomposition_h4():
    clock = intensive_h4_clock(8.0)
    h_system = resonant_ladder(clock, 6)
    match = match_spectra(clock.h_c, h_system, tol=1e-9 * clock.epsilon)
    psi = build_psi(match, gaussian_profile(match, center=3 * clock.epsilon, width=0.1))
    resid = precs_decomposition_check(psi, clock, n_polar=96, n_azim=clock.dim,
                                      radial_cap=8.0)
    assert resid < 1e-8


def test_entropy_matches_schmidt_formula():
    """Entropy equals -sum s^2 log s^2 over singular values of the matrix."""
    _, _, _, psi = make_state()
    svals = np.linalg.svd(psi.matrix, compute_uv=False)
    probs = svals[svals > 1e-15] ** 2
    expected = float(-np.sum(probs * np.log(probs)))
    assert abs(psi.entanglement_entropy - expected) < 1e-12
