"""Conditional dynamics: the exact finite-size evolution law and its limits.

Two residuals with deliberately different character live here.  The
first-order law i*eps*d/dphi Phi = H_sys Phi holds at every clock size
(only the finite-difference step limits it); the stationary law
H_sys Phi = E(rho) Phi emerges only as the clock grows.  The sweep
helpers are built to exhibit exactly that contrast.
"""
from __future__ import annotations

import dataclasses
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .algebra import ClockModel, build_clock, build_su2_rep, intensive_su2_clock, intensive_h4_clock
from .constraint import CompositeState, build_psi, conditional_state, gaussian_profile, match_spectra
from .gcs import clock_symbol_analytic, coherent_vector


def energy_of_rho(clock: ClockModel, rho: float) -> float:
    """Coherent energy surface E(rho); the stationary eigenvalue candidate."""
    return clock_symbol_analytic(clock, rho)


@dataclasses.dataclass(frozen=True)
class FirstOrderResidual:
    """Central-difference check of the conditional evolution law."""

    value: float
    value_half_step: float
    richardson_slope: float
    h: float
    rho: float
    phi: float


def _first_order_residual_at(psi, clock, h_system, rho, phi, h):
    lead = conditional_state(psi, clock, rho, phi)
    norm = np.sqrt(lead.chi2)
    _ = lead.normalized
    plus = conditional_state(psi, clock, rho, phi + h).unnormalized
    minus = conditional_state(psi, clock, rho, phi - h).unnormalized
    lhs = 1j * clock.epsilon * (plus - minus) / (2.0 * h)
    rhs = h_system @ lead.unnormalized
    return float(np.linalg.norm(lhs - rhs)) / norm


def schrodinger_residual(psi: CompositeState, clock: ClockModel,
                         h_system: np.ndarray, rho: float, phi: float,
                         h: float = 1e-4) -> FirstOrderResidual:
    """Residual of i*eps*d/dphi Phi = H_sys Phi on the normalized state.

    The derivative is a central difference in the clock phase; the
    residual is evaluated at step h and h/2 and the Richardson slope
    log2(r(h)/r(h/2)) reported.  Because chi2 does not depend on phi,
    normalizing commutes with differentiating.
    """
    r1 = _first_order_residual_at(psi, clock, h_system, rho, phi, h)
    r2 = _first_order_residual_at(psi, clock, h_system, rho, phi, h / 2.0)
    if r1 > 0 and r2 > 0:
        slope = float(np.log2(r1 / r2))
    else:
        slope = float("nan")
    return FirstOrderResidual(value=r1, value_half_step=r2, richardson_slope=slope,
                              h=h, rho=float(rho), phi=float(phi))


def stationary_residual(psi: CompositeState, clock: ClockModel,
                        h_system: np.ndarray, rho: float, phi: float) -> float:
    """||H_sys phi_n - E(rho) phi_n|| on the normalized conditional state.

    Unlike the first-order law this is not exact at finite size; it
    quantifies how sharply the conditional state sits on the coherent
    energy surface.
    """
    n = conditional_state(psi, clock, rho, phi).normalized
    return float(np.linalg.norm(h_system @ n - energy_of_rho(clock, rho) * n))


@dataclasses.dataclass(frozen=True)
class PropagatorReport:
    """Conditional states against the independent matrix-exponential oracle."""

    max_deviation: float
    chi2_drift: float
    n_points: int


def propagator_deviation(psi: CompositeState, clock: ClockModel,
                         h_system: np.ndarray,
                         rho: float, phi_grid: Sequence[float]) -> PropagatorReport:
    """Compare Phi(phi) with expm(-i H_sys phi / eps) applied to Phi(0).

    The matrix exponential knows nothing about coherent states or the
    composite construction, which is what makes this an oracle for the
    whole mechanism.  Also tracks the worst chi2 drift over the grid.
    """
    base = conditional_state(psi, clock, rho, 0.0)
    _ = base.normalized
    worst = 0.0
    drift = 0.0
    for phi in phi_grid:
        cond = conditional_state(psi, clock, rho, float(phi))
        u = scipy.linalg.expm(-1j * (float(phi) / clock.epsilon) * h_system)
        worst = max(worst, float(np.linalg.norm(cond.unnormalized - u @ base.unnormalized)))
        drift = max(drift, abs(cond.chi2 - base.chi2))
    return PropagatorReport(max_deviation=worst, chi2_drift=drift, n_points=len(phi_grid))


def quantum_flow_rate(psi: CompositeState, clock: ClockModel,
                      h_system: np.ndarray, rho: float,
                      n_phi: int = 48, phi_max: float = 1.2) -> float:
    """Rate eps-hat extracted from the phase advance of the conditional state.

    In the eigenbasis of the system generator each surviving component
    accumulates phase -E_n*phi/eps; an unwrapped linear fit per component
    recovers eps without using the clock's own energy bookkeeping.
    """
    evals, evecs = np.linalg.eigh(h_system)
    phis = np.linspace(0.0, phi_max, n_phi)
    comps = np.empty((n_phi, h_system.shape[0]), dtype=complex)
    for a, phi in enumerate(phis):
        comps[a] = evecs.conj().T @ conditional_state(psi, clock, rho, float(phi)).unnormalized
    mags = np.abs(comps).min(axis=0)
    scale = float(np.max(np.abs(evals))) or 1.0
    slopes = []
    energies = []
    weights = []
    for n in range(h_system.shape[0]):
        if mags[n] < 1e-8 or abs(evals[n]) < 1e-12 * scale:
            continue
        phase = np.unwrap(np.angle(comps[:, n]))
        s = np.polyfit(phis, phase, 1)[0]
        slopes.append(s)
        energies.append(evals[n])
        weights.append(float(np.mean(np.abs(comps[:, n]) ** 2)))
    if not slopes:
        raise ValueError("no moving components to fit a rate from")
    s = np.array(slopes)
    e = np.array(energies)
    w = np.array(weights)
    return float(-np.sum(w * e * s) / np.sum(w * s * s))


@dataclasses.dataclass(frozen=True)
class ConvergenceRecord:
    size: int
    residual: float
    detail: dict

    def __post_init__(self):
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")


@dataclasses.dataclass(frozen=True)
class ConvergenceSweep:
    records: tuple
    strictly_decreasing: bool
    loglog_slope: float


def convergence_sweep(sizes: Sequence[int],
                      experiment: Callable[[int], ConvergenceRecord]) -> ConvergenceSweep:
    """Run one residual experiment over clock sizes and fit the decay.

    The slope is the least-squares gradient of log(residual) against
    log(size); NaN when fewer than two positive residuals survive.
    """
    if len(sizes) < 3:
        raise ValueError("need at least 3 clock sizes for a convergence sweep")
    records = sorted((experiment(s) for s in sizes), key=lambda r: r.size)
    res = np.array([r.residual for r in records])
    decreasing = bool(np.all(np.diff(res) < 0))
    mask = res > 0
    if mask.sum() >= 2:
        slope = float(np.polyfit(np.log([r.size for r, m in zip(records, mask) if m]),
                                 np.log(res[mask]), 1)[0])
    else:
        slope = float("nan")
    return ConvergenceSweep(records=tuple(records), strictly_decreasing=decreasing,
                            loglog_slope=slope)


# --- canned experiments for the sweeps -------------------------------------

def resonant_ladder(clock: ClockModel, n_levels: int) -> np.ndarray:
    """System Hamiltonian with the first n_levels rungs of the clock ladder."""
    return np.diag(clock.epsilon * np.arange(n_levels, dtype=float))


def detuned_ladder(clock: ClockModel, n_levels: int, offset: float = 0.5) -> np.ndarray:
    """Ladder shifted off resonance by a fraction of the gap; empty kernel."""
    return np.diag(clock.epsilon * (np.arange(n_levels, dtype=float) + offset))


def _matched_state(clock: ClockModel, h_system: np.ndarray,
                   center: float, width: float) -> CompositeState:
    match = match_spectra(clock.h_c, h_system, tol=1e-9 * max(clock.epsilon, 1.0))
    if not match.pairs:
        raise ValueError("no constraint states: the spectra share no level")
    return build_psi(match, gaussian_profile(match, center=center, width=width))


def su2_stationary_experiment(j: float, rho: float = 0.6, phi: float = 0.3,
                              width: float = 0.25, detune: float = 0.0) -> ConvergenceRecord:
    """Stationary residual for an intensive spin clock against its own ladder.

    The system spectrum copies the full clock ladder, so every level is
    matched; the profile is a Gaussian centered on the energy surface at
    the probed rho.  Residuals shrink as the coherent state sharpens.
    A nonzero detune (in gap units) empties the kernel, which is the
    sweep's refusal path.
    """
    clock = intensive_su2_clock(j)
    if detune:
        h_system = detuned_ladder(clock, clock.dim, offset=detune)
    else:
        h_system = resonant_ladder(clock, clock.dim)
    psi = _matched_state(clock, h_system, center=energy_of_rho(clock, rho), width=width)
    value = stationary_residual(psi, clock, h_system, rho, phi)
    return ConvergenceRecord(size=clock.dim, residual=value,
                             detail={"j": j, "rho": rho, "phi": phi, "width": width})


def h4_stationary_experiment(mean_n: int, level_fraction: float = 0.5,
                             phi: float = 0.3, width: float = 0.15) -> ConvergenceRecord:
    """Oscillator analogue of the stationary sweep.

    rho is pinned so the energy surface eps*rho^2 sits exactly on a
    matched ladder level (level_fraction of mean_n, kept well inside the
    trustworthy half of the truncated space).
    """
    clock = intensive_h4_clock(mean_n)
    level = int(round(level_fraction * mean_n))
    rho = float(np.sqrt(level))
    h_system = resonant_ladder(clock, clock.dim)
    psi = _matched_state(clock, h_system, center=energy_of_rho(clock, rho), width=width)
    value = stationary_residual(psi, clock, h_system, rho, phi)
    return ConvergenceRecord(size=clock.rep.params["n_cut"], residual=value,
                             detail={"mean_n": mean_n, "rho": rho, "phi": phi,
                                     "width": width, "level": level})


def su2_first_order_experiment(j: float, rho: float = 0.35, phi: float = 0.4,
                               h: float = 1e-4,
                               targets: Sequence[float] = (0.55, 0.65, 0.52)) -> ConvergenceRecord:
    """First-order residual with the conditional amplitudes pinned across j.

    The profile divides out the coherent amplitudes at the probed rho, so
    the conditional state is literally the same vector for every clock
    size and the residual can only reflect the difference step.  This is
    the exactness contrast to the stationary sweep.
    """
    clock = build_clock(build_su2_rep(j))
    n_levels = len(targets)
    h_system = resonant_ladder(clock, n_levels)
    match = match_spectra(clock.h_c, h_system, tol=1e-9)
    if not match.pairs:
        raise ValueError("no constraint states: the spectra share no level")
    amps = coherent_vector(clock.rep, rho, 0.0).real[:n_levels]
    coeff = np.asarray(targets, dtype=float) / amps
    psi = build_psi(match, coeff)
    rec = schrodinger_residual(psi, clock, h_system, rho, phi, h)
    return ConvergenceRecord(size=clock.dim, residual=rec.value,
                             detail={"j": j, "rho": rho, "phi": phi, "h": h})
