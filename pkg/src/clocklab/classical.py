"""Fully classical sector: joint coherent amplitudes, the Darboux chart,
pullback symplectic data, and Hamilton's equations on the clock manifold.

Orientation convention, fixed once for the whole package: the chart maps
q - i p = C(rho) e^{i phi} with C real, so advancing phi is the forward
Hamiltonian flow and the extracted rate matches the quantum propagation
rate with the same sign.
"""
from __future__ import annotations

import dataclasses
from typing import Callable, Sequence

import numpy as np

from .algebra import ClockModel
from .constraint import CompositeState
from .gcs import clock_symbol_analytic, coherent_vector

SUPPORT_THRESHOLD = 1e-6


def _chart_radius(clock: ClockModel, rho: float) -> tuple[float, float]:
    """Radial chart factor C(rho) and its derivative.

    C^2/2 carries the whole energy dependence: (eps/2) C(rho)^2 equals the
    coherent energy surface in every family.
    """
    if clock.rep.family == "h4":
        return np.sqrt(2.0) * rho, np.sqrt(2.0)
    amp = np.sqrt(2.0 * abs(clock.b2))
    if clock.sigma2 > 0:
        return amp * np.sin(rho), amp * np.cos(rho)
    return -amp * np.sinh(rho), -amp * np.cosh(rho)


@dataclasses.dataclass(frozen=True)
class DarbouxPoint:
    """Canonical coordinates of one clock-manifold point.

    q and p are length-J arrays proportional to the unit vector v; the
    source coordinates are kept so Jacobian routes can re-evaluate the map.
    """

    q: np.ndarray
    p: np.ndarray
    v: np.ndarray
    rho: float
    phi: float


def map_F(rho: float, phi: float, v: Sequence[float], clock: ClockModel) -> DarbouxPoint:
    """Energy-shell chart map from clock labels to canonical coordinates."""
    v = np.asarray(v, dtype=float)
    if abs(float(np.sum(v * v)) - 1.0) > 1e-12:
        raise ValueError("v must be a unit vector")
    c, _ = _chart_radius(clock, float(rho))
    return DarbouxPoint(
        q=c * np.cos(phi) * v,
        p=-c * np.sin(phi) * v,
        v=v, rho=float(rho), phi=float(phi),
    )


def chart_hamiltonian(clock: ClockModel, point: DarbouxPoint) -> float:
    """Isotropic quadratic Hamiltonian (eps/2) * sum(q^2 + p^2).

    Composed with map_F this reproduces the coherent energy surface
    exactly, which is the defining shell property of the chart.
    """
    return 0.5 * clock.epsilon * float(np.sum(point.q ** 2 + point.p ** 2))


def two_form_coefficient(clock: ClockModel, rho: float, hbar: float = 1.0) -> float:
    """Closed-form coefficient of dphi ^ drho for the pulled-back two-form."""
    if clock.rep.family == "h4":
        return 2.0 * hbar * rho
    if clock.sigma2 > 0:
        return hbar * abs(clock.b2) * np.sin(2.0 * rho)
    return hbar * abs(clock.b2) * np.sinh(2.0 * rho)


@dataclasses.dataclass(frozen=True)
class TwoFormReport:
    analytic: float
    jacobian_analytic: float
    jacobian_fd: float
    rho: float
    phi: float


def _jacobian_assembly(hbar: float, d_rho: Callable, d_phi: Callable) -> float:
    dq_drho, dp_drho = d_rho()
    dq_dphi, dp_dphi = d_phi()
    return hbar * float(np.sum(dq_dphi * dp_drho - dq_drho * dp_dphi))


def pullback_two_form(clock: ClockModel, rho: float, phi: float,
                      v: Sequence[float] = (1.0,), hbar: float = 1.0,
                      fd_step: float = 1e-3) -> TwoFormReport:
    """Pullback of hbar * sum dq_j ^ dp_j through the chart map, three ways.

    The closed form, an assembly from analytic partial derivatives, and an
    assembly from Richardson-extrapolated central differences of map_F
    itself.  The last one treats the map as a black box, which is what
    makes the agreement a real check.
    """
    v = np.asarray(v, dtype=float)
    c, cp = _chart_radius(clock, float(rho))

    def analytic_rho():
        return cp * np.cos(phi) * v, -cp * np.sin(phi) * v

    def analytic_phi():
        return -c * np.sin(phi) * v, -c * np.cos(phi) * v

    def fd_partial(coord: str):
        def eval_at(r, f):
            pt = map_F(r, f, v, clock)
            return pt.q, pt.p

        def diff(h):
            if coord == "rho":
                qp, pp = eval_at(rho + h, phi)
                qm, pm = eval_at(rho - h, phi)
            else:
                qp, pp = eval_at(rho, phi + h)
                qm, pm = eval_at(rho, phi - h)
            return (qp - qm) / (2 * h), (pp - pm) / (2 * h)

        d1q, d1p = diff(fd_step)
        d2q, d2p = diff(fd_step / 2.0)
        return (4 * d2q - d1q) / 3.0, (4 * d2p - d1p) / 3.0

    return TwoFormReport(
        analytic=two_form_coefficient(clock, rho, hbar),
        jacobian_analytic=_jacobian_assembly(hbar, analytic_rho, analytic_phi),
        jacobian_fd=_jacobian_assembly(hbar, lambda: fd_partial("rho"),
                                       lambda: fd_partial("phi")),
        rho=float(rho), phi=float(phi),
    )


def poisson_bracket_clock(f: Callable[[float, float], float],
                          g: Callable[[float, float], float],
                          point: tuple, clock: ClockModel,
                          hbar: float = 1.0, fd_step: float = 1e-5) -> float:
    """{f, g} on the clock manifold at point = (rho, phi).

    Partial derivatives of the scalar functions are central differences;
    the symplectic density is the closed-form coefficient.  Points where
    that coefficient vanishes (rho = 0, and the sphere equator for the
    trig branch) are coordinate singularities and are refused.
    """
    rho, phi = float(point[0]), float(point[1])
    c = two_form_coefficient(clock, rho, hbar)
    if abs(c) < 1e-12 * max(1.0, abs(clock.b2) * hbar):
        raise ValueError(f"symplectic coefficient vanishes at rho = {rho}")

    def d_rho(fun):
        return (fun(rho + fd_step, phi) - fun(rho - fd_step, phi)) / (2 * fd_step)

    def d_phi(fun):
        return (fun(rho, phi + fd_step) - fun(rho, phi - fd_step)) / (2 * fd_step)

    return (d_phi(f) * d_rho(g) - d_rho(f) * d_phi(g)) / c


@dataclasses.dataclass(frozen=True)
class HamiltonReport:
    max_residual: float
    max_residual_q: float
    max_residual_p: float
    method: str
    grid_shape: tuple


def hamilton_check(clock: ClockModel, v: Sequence[float],
                   rho_grid: Sequence[float], phi_grid: Sequence[float],
                   hbar: float = 1.0, method: str = "analytic",
                   fd_step: float = 1e-5) -> HamiltonReport:
    """Residual of {x_j, H} = (eps/hbar) * dx_j/dphi for x in {q, p}.

    With analytic partials both sides differ only through two independent
    closed forms of the same quantity, so the residual is a roundoff
    statement; the finite-difference method keeps the check honest against
    hand-derivation mistakes at the cost of truncation error.
    """
    if method not in ("analytic", "fd"):
        raise ValueError(f"unknown method {method!r}")
    v = np.asarray(v, dtype=float)
    worst_q = 0.0
    worst_p = 0.0
    for rho in rho_grid:
        rho = float(rho)
        c_coeff = two_form_coefficient(clock, rho, hbar)
        if abs(c_coeff) < 1e-12 * max(1.0, abs(clock.b2) * hbar):
            raise ValueError(f"grid touches a symplectic singularity at rho = {rho}")
        c, cp = _chart_radius(clock, rho)
        for phi in phi_grid:
            phi = float(phi)
            if method == "analytic":
                dq_dphi = -c * np.sin(phi) * v
                dp_dphi = -c * np.cos(phi) * v
                de_drho = clock.epsilon * c * cp
            else:
                f_p = map_F(rho, phi + fd_step, v, clock)
                f_m = map_F(rho, phi - fd_step, v, clock)
                dq_dphi = (f_p.q - f_m.q) / (2 * fd_step)
                dp_dphi = (f_p.p - f_m.p) / (2 * fd_step)
                de_drho = (clock_symbol_analytic(clock, rho + fd_step)
                           - clock_symbol_analytic(clock, rho - fd_step)) / (2 * fd_step)
            bracket_q = dq_dphi * de_drho / c_coeff
            bracket_p = dp_dphi * de_drho / c_coeff
            target = clock.epsilon / hbar
            worst_q = max(worst_q, float(np.max(np.abs(bracket_q - target * dq_dphi))))
            worst_p = max(worst_p, float(np.max(np.abs(bracket_p - target * dp_dphi))))
    return HamiltonReport(
        max_residual=max(worst_q, worst_p),
        max_residual_q=worst_q, max_residual_p=worst_p,
        method=method, grid_shape=(len(rho_grid), len(phi_grid)),
    )


def classical_flow_rate(clock: ClockModel, v: Sequence[float] = (1.0,),
                        rho: float = 0.5, phi: float = 0.7,
                        hbar: float = 1.0) -> float:
    """Flow coefficient hbar * {q_j, H} / (dq_j/dphi) at one regular point.

    This is the classical-side number that criterion-style comparisons
    hold against the quantum propagation rate.
    """
    v = np.asarray(v, dtype=float)
    c_coeff = two_form_coefficient(clock, float(rho), hbar)
    if abs(c_coeff) < 1e-12 * max(1.0, abs(clock.b2) * hbar):
        raise ValueError(f"symplectic coefficient vanishes at rho = {rho}")
    c, cp = _chart_radius(clock, float(rho))
    dq_dphi = -c * np.sin(float(phi)) * v
    j = int(np.argmax(np.abs(dq_dphi)))
    if abs(dq_dphi[j]) < 1e-12:
        raise ValueError("dq/dphi vanishes at this point; pick phi away from 0 mod pi")
    de_drho = clock.epsilon * c * cp
    bracket = dq_dphi[j] * de_drho / c_coeff
    return hbar * bracket / dq_dphi[j]


# --- joint coherent amplitudes over both manifolds --------------------------

def _manifold_nodes(clock: ClockModel, n_polar: int | None, n_azim: int | None,
                    radial_cap: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flattened (rho, phi, weight) quadrature covering one GCS manifold.

    The azimuthal grid is uniform and sized so phase cross terms integrate
    exactly; the radial rule is Gauss-Legendre in the measure's natural
    variable (cos of the polar angle for spin, rho^2 for the oscillator).
    """
    rep = clock.rep
    if rep.family == "su2":
        j = rep.params["j"]
        if n_polar is None:
            n_polar = int(np.ceil(j)) + 1
        if n_azim is None:
            n_azim = rep.dim
        x, w = np.polynomial.legendre.leggauss(n_polar)
        rhos = np.arccos(x) / 2.0
        radial_w = (2 * j + 1) * w / (2.0 * n_azim)
    elif rep.family == "h4":
        if n_polar is None:
            n_polar = 160
        if n_azim is None:
            n_azim = rep.dim
        u, w = np.polynomial.legendre.leggauss(n_polar)
        cap2 = radial_cap * radial_cap
        rhos = np.sqrt(0.5 * cap2 * (u + 1.0))
        radial_w = 0.5 * cap2 * w / n_azim
    else:
        raise ValueError(f"no normalizable manifold measure for family {rep.family!r}")
    phis = 2 * np.pi * np.arange(n_azim) / n_azim
    rho_flat = np.repeat(rhos, n_azim)
    phi_flat = np.tile(phis, len(rhos))
    w_flat = np.repeat(radial_w, n_azim)
    return rho_flat, phi_flat, w_flat


def _coherent_matrix(clock: ClockModel, rho_flat, phi_flat) -> np.ndarray:
    cols = np.empty((clock.dim, len(rho_flat)), dtype=complex)
    for i, (r, f) in enumerate(zip(rho_flat, phi_flat)):
        cols[:, i] = coherent_vector(clock.rep, float(r), float(f))
    return cols


@dataclasses.dataclass(frozen=True)
class BetaDistribution:
    """Joint coherent amplitude over clock x system manifolds.

    values[i, k] is the amplitude at clock node i and system node k;
    weights carry the full invariant measures, so the weighted square sum
    is the joint probability normalization.
    """

    values: np.ndarray
    rho_clock: np.ndarray
    phi_clock: np.ndarray
    weights_clock: np.ndarray
    rho_system: np.ndarray
    phi_system: np.ndarray
    weights_system: np.ndarray
    support_mask: np.ndarray
    threshold: float

    @property
    def normalization(self) -> float:
        dens = np.abs(self.values) ** 2
        return float(self.weights_clock @ dens @ self.weights_system)


def beta_distribution(psi: CompositeState, clock_c: ClockModel, clock_g: ClockModel,
                      n_polar_c: int | None = None, n_azim_c: int | None = None,
                      n_polar_g: int | None = None, n_azim_g: int | None = None,
                      radial_cap: float = 8.0,
                      threshold: float = SUPPORT_THRESHOLD) -> BetaDistribution:
    """Joint amplitude table beta(Omega, gamma) with support extraction.

    Support is cut at |beta|^2 >= threshold * max|beta|^2, which is the
    region where classical constraint statements are asserted.
    """
    if psi.dim_clock != clock_c.dim or psi.dim_system != clock_g.dim:
        raise ValueError("composite state dimensions do not match the two models")
    rho_c, phi_c, w_c = _manifold_nodes(clock_c, n_polar_c, n_azim_c, radial_cap)
    rho_g, phi_g, w_g = _manifold_nodes(clock_g, n_polar_g, n_azim_g, radial_cap)
    mc = _coherent_matrix(clock_c, rho_c, phi_c)
    mg = _coherent_matrix(clock_g, rho_g, phi_g)
    values = mc.conj().T @ psi.matrix @ mg.conj()
    dens = np.abs(values) ** 2
    mask = dens >= threshold * dens.max()
    return BetaDistribution(
        values=values, rho_clock=rho_c, phi_clock=phi_c, weights_clock=w_c,
        rho_system=rho_g, phi_system=phi_g, weights_system=w_g,
        support_mask=mask, threshold=threshold,
    )


@dataclasses.dataclass(frozen=True)
class MismatchReport:
    """Energy agreement between the two manifolds where beta lives."""

    support_max: float
    complement_max: float
    peak_mismatch: float
    energy_scale: float
    n_support: int


def classical_constraint_check(beta: BetaDistribution, clock_c: ClockModel,
                               clock_g: ClockModel) -> MismatchReport:
    """Relative |E_C(Omega) - E_G(gamma)| over the support of beta.

    The off-support maximum is kept as a negative control: it should be
    large, otherwise the support cut did not bite and the check is empty.
    """
    if not beta.support_mask.any():
        raise ValueError("empty support: nothing to check the constraint on")
    e_c = np.array([clock_symbol_analytic(clock_c, float(r)) for r in beta.rho_clock])
    e_g = np.array([clock_symbol_analytic(clock_g, float(r)) for r in beta.rho_system])
    scale = max(np.max(np.abs(e_c)), np.max(np.abs(e_g)))
    mismatch = np.abs(e_c[:, None] - e_g[None, :]) / scale
    dens = np.abs(beta.values) ** 2
    i_peak, k_peak = np.unravel_index(int(np.argmax(dens)), dens.shape)
    complement = ~beta.support_mask
    return MismatchReport(
        support_max=float(mismatch[beta.support_mask].max()),
        complement_max=float(mismatch[complement].max()) if complement.any() else 0.0,
        peak_mismatch=float(mismatch[i_peak, k_peak]),
        energy_scale=float(scale),
        n_support=int(beta.support_mask.sum()),
    )
