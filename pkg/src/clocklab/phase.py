"""Clock phase operator, its commutation law, and uncertainty inequalities.

The unitary here is the polar factor of the ladder mode that climbs the
clock spectrum.  In finite dimension that factor is a partial isometry
with one defective direction; we close it cyclically (top rung wraps to
the bottom), which is the standard truncated-phase construction.  Exact
operator statements therefore hold on the interior of the ladder, and
every routine below says which subspace it is talking about.
"""
from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .algebra import ClockModel, build_clock, build_h4_rep, build_su2_rep
from .gcs import CoherentState, coherent_state


@dataclasses.dataclass(frozen=True)
class PhaseOperator:
    """Polar-decomposition phase data for one clock.

    ``exp_minus_iphi`` is the completed unitary U; ``sin_phi`` and
    ``cos_phi`` are the exact hermitian combinations (U^dag - U)/2i and
    (U + U^dag)/2.  ``boundary_index`` is the ladder state whose image
    under U is fixed by the cyclic completion rather than by the polar
    decomposition (the top rung, wrapped to the bottom).
    """

    exp_minus_iphi: np.ndarray
    sin_phi: np.ndarray
    cos_phi: np.ndarray
    boundary_index: int


def build_phase_operator(clock: ClockModel) -> PhaseOperator:
    """Phase unitary of the clock's ladder mode.

    Writes the climbing ladder operator A (the adjoint of the clock's
    lowering mode) as A = sqrt(A A^dag) U.  On the span where the modulus
    is invertible U is determined and shifts the ladder up by one; the
    remaining direction is closed cyclically.  Unitarity and the polar
    identity are asserted before returning.
    """
    a = clock.lowering_op.conj().T
    dim = clock.dim
    u = np.zeros((dim, dim), dtype=complex)
    for k in range(dim - 1):
        el = a[k + 1, k]
        if abs(el) == 0:
            raise ValueError("ladder operator has a vanishing step inside the ladder")
        u[k + 1, k] = el / abs(el)
    u[0, dim - 1] = 1.0

    if np.linalg.norm(u.conj().T @ u - np.eye(dim), 2) > 1e-12:
        raise ValueError("completed phase operator is not unitary")
    modulus = np.diag(np.sqrt(np.real(np.diag(a @ a.conj().T))))
    if np.linalg.norm(a - modulus @ u, 2) > 1e-12 * max(1.0, np.linalg.norm(a, 2)):
        raise ValueError("polar identity violated by the completed unitary")

    sin_phi = (u.conj().T - u) / 2j
    cos_phi = (u.conj().T + u) / 2.0
    return PhaseOperator(exp_minus_iphi=u, sin_phi=sin_phi, cos_phi=cos_phi,
                         boundary_index=dim - 1)


@dataclasses.dataclass(frozen=True)
class CommutatorReport:
    """Residuals of [H_C, sin] = i*eps*cos on two subspaces."""

    interior_residual: float
    full_residual: float
    epsilon: float
    dim: int


def commutator_check(clock: ClockModel, phase: PhaseOperator) -> CommutatorReport:
    """Measure [H_C, sin] - i*eps*cos with and without the ladder edges.

    The identity is exact away from the two extremal rungs; the full-space
    number is reported so the boundary artifact of the cyclic completion
    stays visible instead of hidden.
    """
    m = clock.h_c @ phase.sin_phi - phase.sin_phi @ clock.h_c \
        - 1j * clock.epsilon * phase.cos_phi
    interior = np.zeros(clock.dim)
    interior[1:-1] = 1.0
    p = np.diag(interior)
    return CommutatorReport(
        interior_residual=float(np.linalg.norm(p @ m @ p, 2)),
        full_residual=float(np.linalg.norm(m, 2)),
        epsilon=clock.epsilon,
        dim=clock.dim,
    )


def _moments(op: np.ndarray, vec: np.ndarray) -> tuple[float, float]:
    mean = float(np.real(np.vdot(vec, op @ vec)))
    second = float(np.real(np.vdot(op @ vec, op @ vec)))
    return mean, max(second - mean * mean, 0.0)


@dataclasses.dataclass(frozen=True)
class UncertaintyAudit:
    delta_h: float
    delta_sin: float
    bound: float
    slack: float


def uncertainty_audit(state: CoherentState, clock: ClockModel,
                      phase: PhaseOperator) -> UncertaintyAudit:
    """Robertson inequality for (H_C, sin) on one state.

    bound = (eps/2)|<cos>|; slack = dH*dsin - bound.  For states with
    negligible weight on both extremal rungs the completed commutator
    matches the exact one and the slack cannot go below roundoff.
    """
    vec = state.vector
    _, var_h = _moments(clock.h_c, vec)
    mean_cos, _ = _moments(phase.cos_phi, vec)
    _, var_sin = _moments(phase.sin_phi, vec)
    dh, ds = np.sqrt(var_h), np.sqrt(var_sin)
    bound = 0.5 * clock.epsilon * abs(mean_cos)
    return UncertaintyAudit(delta_h=dh, delta_sin=ds, bound=bound,
                            slack=dh * ds - bound)


def uncertainty_grid_audit(clock: ClockModel, phase: PhaseOperator,
                           rhos: Sequence[float], phis: Sequence[float]) -> float:
    """Worst slack over a coherent grid; callers pick tail-guarded rhos."""
    worst = np.inf
    for rho in rhos:
        for phi in phis:
            audit = uncertainty_audit(coherent_state(clock.rep, rho, phi), clock, phase)
            worst = min(worst, audit.slack)
    return float(worst)


@dataclasses.dataclass(frozen=True)
class EnergyTimeCheck:
    product: float
    half_epsilon: float

    @property
    def ratio(self) -> float:
        return self.product / self.half_epsilon


def small_phi_energy_time(clock: ClockModel, phase: PhaseOperator,
                          rho: float, phi: float) -> EnergyTimeCheck:
    """Energy-time product dE * dphi against eps/2 in the linear regime.

    dphi is read off as the spread of sin at small angles, where the two
    agree to first order; the caller keeps |phi| small and checks the
    ratio against its linearization tolerance.
    """
    audit = uncertainty_audit(coherent_state(clock.rep, rho, phi), clock, phase)
    return EnergyTimeCheck(product=audit.delta_h * audit.delta_sin,
                           half_epsilon=0.5 * clock.epsilon)


@dataclasses.dataclass(frozen=True)
class PhaseExpectationRecord:
    size: int
    err_sin: float
    err_cos: float


def classical_phase_expectations(family: str, sizes: Sequence[int],
                                 rho: float, phi: float) -> list:
    """Deviation of <sin>, <cos> from the label angle, over clock sizes.

    The expectation of the phase unitary on a coherent state approaches
    exp(-i*phi) as the clock grows; the table quantifies that approach.
    ``sizes`` are 2j values for spin clocks and cutoffs for the oscillator.
    """
    records = []
    for size in sizes:
        if family == "su2":
            clock = build_clock(build_su2_rep(size / 2.0))
        elif family == "h4":
            clock = build_clock(build_h4_rep(int(size)))
        else:
            raise ValueError(f"no phase-expectation sweep for family {family!r}")
        phase = build_phase_operator(clock)
        vec = coherent_state(clock.rep, rho, phi).vector
        mean_sin = float(np.real(np.vdot(vec, phase.sin_phi @ vec)))
        mean_cos = float(np.real(np.vdot(vec, phase.cos_phi @ vec)))
        records.append(PhaseExpectationRecord(
            size=int(size),
            err_sin=abs(mean_sin - np.sin(phi)),
            err_cos=abs(mean_cos - np.cos(phi)),
        ))
    return records
