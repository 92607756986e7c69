"""Zero-energy entangled states of the clock-system pair.

The composite generator is H = h_c (x) I - I (x) h_g.  Its kernel is
spanned by products of eigenvectors with coinciding eigenvalues, so a
nontrivial joint state exists only when the two spectra share more than
the ground coincidence.  States are stored as vectors in the product
space together with the matched-pair bookkeeping.
"""
from __future__ import annotations

import dataclasses
import warnings

import numpy as np

from .algebra import ClockModel
from .gcs import coherent_vector

CHI2_FLOOR = 1e-14


def total_hamiltonian(h_clock: np.ndarray, h_system: np.ndarray) -> np.ndarray:
    """kron(h_clock, I) - kron(I, h_system) on the product space."""
    dc, dg = h_clock.shape[0], h_system.shape[0]
    return np.kron(h_clock, np.eye(dg)) - np.kron(np.eye(dc), h_system)


@dataclasses.dataclass(frozen=True)
class SpectralMatch:
    """Eigendata of both factors plus the list of coinciding levels.

    pairs[k] = (i, j) with clock eigenvalue e_i equal to system eigenvalue
    f_j within tol.  Eigenvectors are columns of the respective arrays.
    """

    clock_evals: np.ndarray
    clock_evecs: np.ndarray
    system_evals: np.ndarray
    system_evecs: np.ndarray
    pairs: tuple
    tol: float

    @property
    def shared_energies(self) -> np.ndarray:
        return np.array([self.clock_evals[i] for i, _ in self.pairs])


def match_spectra(h_clock: np.ndarray, h_system: np.ndarray, tol: float = 1e-9) -> SpectralMatch:
    """Diagonalize both operators and pair up coinciding eigenvalues.

    Every (i, j) with |e_i - f_j| <= tol is reported; for nondegenerate
    spectra the pair count equals the kernel dimension of the composite
    generator.
    """
    e_c, v_c = np.linalg.eigh(h_clock)
    e_g, v_g = np.linalg.eigh(h_system)
    pairs = []
    for i, e in enumerate(e_c):
        for j, f in enumerate(e_g):
            if abs(e - f) <= tol:
                pairs.append((i, j))
    return SpectralMatch(
        clock_evals=e_c, clock_evecs=v_c, system_evals=e_g, system_evecs=v_g,
        pairs=tuple(pairs), tol=tol,
    )


def gaussian_profile(match: SpectralMatch, center: float, width: float) -> np.ndarray:
    """Normalized Gaussian amplitudes over the matched pairs, by energy."""
    if not match.pairs:
        raise ValueError("no matched pairs to weight")
    if width <= 0:
        raise ValueError("width must be positive")
    e = match.shared_energies
    amps = np.exp(-((e - center) ** 2) / (4.0 * width * width))
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("profile vanishes on every matched pair")
    return amps / norm


def random_profile(match: SpectralMatch, seed: int) -> np.ndarray:
    """Reproducible complex amplitudes over the matched pairs."""
    if not match.pairs:
        raise ValueError("no matched pairs to weight")
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=len(match.pairs)) + 1j * rng.normal(size=len(match.pairs))
    return amps / np.linalg.norm(amps)


@dataclasses.dataclass(frozen=True)
class CompositeState:
    """A kernel element of the composite generator.

    ``matrix`` is the product-space vector reshaped to (dim_clock,
    dim_system); ``coefficients[k]`` multiplies the k-th matched pair.
    """

    dim_clock: int
    dim_system: int
    pairs: tuple
    coefficients: np.ndarray
    matrix: np.ndarray
    entanglement_entropy: float

    @property
    def vector(self) -> np.ndarray:
        return self.matrix.reshape(-1)


def build_psi(match: SpectralMatch, coefficients: np.ndarray) -> CompositeState:
    """Assemble sum_k c_k |e_k> (x) |f_k> over the matched pairs.

    Warns when only one pair is available (the state is separable and
    carries no relational dynamics).  The constraint residual
    ||H psi|| <= 1e-10 is asserted against the eigendata.
    """
    coefficients = np.asarray(coefficients, dtype=complex)
    if len(coefficients) != len(match.pairs):
        raise ValueError(
            f"{len(coefficients)} coefficients for {len(match.pairs)} matched pairs"
        )
    if not match.pairs:
        raise ValueError("cannot build a constraint state: no matched pairs")
    norm = np.linalg.norm(coefficients)
    if norm == 0:
        raise ValueError("all coefficients vanish")
    coefficients = coefficients / norm
    if len(match.pairs) == 1:
        warnings.warn(
            "single matched pair: the constraint state is separable and the "
            "conditional state will not evolve", stacklevel=2,
        )
    dc = match.clock_evecs.shape[0]
    dg = match.system_evecs.shape[0]
    mat = np.zeros((dc, dg), dtype=complex)
    for c_k, (i, j) in zip(coefficients, match.pairs):
        mat += c_k * np.outer(match.clock_evecs[:, i], match.system_evecs[:, j])

    svals = np.linalg.svd(mat, compute_uv=False)
    probs = svals ** 2
    probs = probs[probs > 1e-300]
    entropy = float(-np.sum(probs * np.log(probs)))

    energy_resid = float(np.linalg.norm(
        (match.clock_evals[[i for i, _ in match.pairs]]
         - match.system_evals[[j for _, j in match.pairs]]) * coefficients
    ))
    if energy_resid > 1e-10:
        raise ValueError(f"matched pairs are not degenerate enough: ||H psi|| ~ {energy_resid:.2e}")
    return CompositeState(
        dim_clock=dc, dim_system=dg, pairs=match.pairs,
        coefficients=coefficients, matrix=mat, entanglement_entropy=entropy,
    )


@dataclasses.dataclass(frozen=True)
class ConditionalState:
    """System state conditioned on the clock reading (rho, phi).

    ``unnormalized`` is the partial inner product <lambda| psi; ``chi2``
    its squared norm.  ``normalized`` raises when chi2 is below the
    support floor.
    """

    rho: float
    phi: float
    unnormalized: np.ndarray
    chi2: float

    @property
    def normalized(self) -> np.ndarray:
        if self.chi2 < CHI2_FLOOR:
            raise ValueError(
                f"unsupported rho: chi2 = {self.chi2:.3e} is below {CHI2_FLOOR:.0e}"
            )
        return self.unnormalized / np.sqrt(self.chi2)


def conditional_state(psi: CompositeState, clock: ClockModel,
                      rho: float, phi: float) -> ConditionalState:
    """Project the composite state on the clock coherent state at (rho, phi)."""
    if psi.dim_clock != clock.dim:
        raise ValueError(
            f"state clock dimension {psi.dim_clock} != clock dimension {clock.dim}"
        )
    bra = np.conj(coherent_vector(clock.rep, rho, phi))
    vec_out = bra @ psi.matrix
    chi2 = float(np.real(np.vdot(vec_out, vec_out)))
    return ConditionalState(rho=float(rho), phi=float(phi), unnormalized=vec_out, chi2=chi2)


def reduced_density_gamma(psi: CompositeState) -> np.ndarray:
    """System-side reduced density matrix, trace one."""
    return psi.matrix.conj().T @ psi.matrix


def reduced_density_clock(psi: CompositeState) -> np.ndarray:
    """Clock-side reduced density matrix, trace one."""
    return psi.matrix @ psi.matrix.conj().T


def chi2_identity_residual(psi: CompositeState, clock: ClockModel,
                           rho: float, phi: float) -> float:
    """|chi2 - <lambda| rho_clock |lambda>| (an exact identity)."""
    cond = conditional_state(psi, clock, rho, phi)
    vec = coherent_vector(clock.rep, rho, phi)
    via_density = float(np.real(np.vdot(vec, reduced_density_clock(psi) @ vec)))
    return abs(cond.chi2 - via_density)


def precs_decomposition_check(
    psi: CompositeState,
    clock: ClockModel,
    n_polar: int = 48,
    n_azim: int = 48,
    radial_cap: float = 8.0,
) -> float:
    """Residual of the coherent-aggregate form of the reduced system state.

    Integrates |Phi(Omega)><Phi(Omega)| over the clock manifold with the
    same measures as the identity resolution and compares against the
    partial trace.  Returns the 2-norm of the difference.
    """
    rep = clock.rep
    rho_g = reduced_density_gamma(psi)
    acc = np.zeros_like(rho_g)
    if rep.family == "su2":
        j = rep.params["j"]
        x, w = np.polynomial.legendre.leggauss(n_polar)
        thetas = np.arccos(x)
        phis = 2 * np.pi * np.arange(n_azim) / n_azim
        for th, wt in zip(thetas, w):
            weight = (2 * j + 1) * wt / (2.0 * n_azim)
            for ph in phis:
                cond = conditional_state(psi, clock, th / 2.0, ph)
                acc += weight * np.outer(cond.unnormalized, cond.unnormalized.conj())
    elif rep.family == "h4":
        u, w_u = np.polynomial.legendre.leggauss(n_polar)
        cap2 = radial_cap * radial_cap
        u_nodes = 0.5 * cap2 * (u + 1.0)
        u_weights = 0.5 * cap2 * w_u
        phis = 2 * np.pi * np.arange(n_azim) / n_azim
        for un, wn in zip(u_nodes, u_weights):
            weight = wn / n_azim
            for ph in phis:
                cond = conditional_state(psi, clock, float(np.sqrt(un)), ph)
                acc += weight * np.outer(cond.unnormalized, cond.unnormalized.conj())
    else:
        raise ValueError(f"manifold integration implemented for su2 and h4, not {rep.family!r}")
    return float(np.linalg.norm(acc - rho_g, 2))
