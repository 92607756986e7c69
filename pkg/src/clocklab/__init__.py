"""clocklab: a numerical laboratory for coherent-state clocks.

The package builds ladder clocks from three Lie-algebra families (spin,
oscillator, hyperbolic), entangles them with a system under a zero-energy
constraint, and checks that conditioning on the clock's coherent-state
angle reproduces ordinary time evolution, number-phase uncertainty
relations, and, in the large-size limit, Hamilton's equations with the
same flow rate on both sides of the quantum-classical divide.
"""

from .algebra import (
    ClockModel,
    LieAlgebraRep,
    build_clock,
    build_h4_rep,
    build_su2_rep,
    build_su11_rep,
    intensive_h4_clock,
    intensive_su2_clock,
    verify_cartan,
)
from .classical import (
    BetaDistribution,
    DarbouxPoint,
    beta_distribution,
    chart_hamiltonian,
    classical_constraint_check,
    classical_flow_rate,
    hamilton_check,
    map_F,
    poisson_bracket_clock,
    pullback_two_form,
    two_form_coefficient,
)
from .constraint import (
    CompositeState,
    ConditionalState,
    SpectralMatch,
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
from .dynamics import (
    ConvergenceRecord,
    ConvergenceSweep,
    convergence_sweep,
    detuned_ladder,
    energy_of_rho,
    h4_stationary_experiment,
    propagator_deviation,
    quantum_flow_rate,
    resonant_ladder,
    schrodinger_residual,
    stationary_residual,
    su2_first_order_experiment,
    su2_stationary_experiment,
)
from .gcs import (
    CoherentState,
    clock_symbol_analytic,
    clock_symbol_numeric,
    coherent_state,
    coherent_vector,
    displace,
    identity_resolution_check,
    overlap,
    phi_derivative_identity_check,
    projective_coordinate,
    symbol,
)
from .phase import (
    PhaseOperator,
    build_phase_operator,
    classical_phase_expectations,
    commutator_check,
    small_phi_energy_time,
    uncertainty_audit,
    uncertainty_grid_audit,
)

__version__ = "0.1.0"

__all__ = [
    "BetaDistribution",
    "ClockModel",
    "CoherentState",
    "CompositeState",
    "ConditionalState",
    "ConvergenceRecord",
    "ConvergenceSweep",
    "DarbouxPoint",
    "LieAlgebraRep",
    "PhaseOperator",
    "SpectralMatch",
    "beta_distribution",
    "build_clock",
    "build_h4_rep",
    "build_phase_operator",
    "build_psi",
    "build_su11_rep",
    "build_su2_rep",
    "chart_hamiltonian",
    "chi2_identity_residual",
    "classical_constraint_check",
    "classical_flow_rate",
    "classical_phase_expectations",
    "clock_symbol_analytic",
    "clock_symbol_numeric",
    "coherent_state",
    "coherent_vector",
    "commutator_check",
    "conditional_state",
    "convergence_sweep",
    "detuned_ladder",
    "displace",
    "energy_of_rho",
    "gaussian_profile",
    "h4_stationary_experiment",
    "hamilton_check",
    "identity_resolution_check",
    "intensive_h4_clock",
    "intensive_su2_clock",
    "map_F",
    "match_spectra",
    "overlap",
    "phi_derivative_identity_check",
    "poisson_bracket_clock",
    "precs_decomposition_check",
    "projective_coordinate",
    "propagator_deviation",
    "pullback_two_form",
    "quantum_flow_rate",
    "random_profile",
    "reduced_density_clock",
    "reduced_density_gamma",
    "resonant_ladder",
    "schrodinger_residual",
    "small_phi_energy_time",
    "stationary_residual",
    "su2_first_order_experiment",
    "su2_stationary_experiment",
    "symbol",
    "total_hamiltonian",
    "two_form_coefficient",
    "uncertainty_audit",
    "uncertainty_grid_audit",
    "verify_cartan",
]
