"""Matrix representations of the clock algebras and ladder Hamiltonians.

Three families are provided: spin (``su2``, exact at every dimension), the
oscillator algebra (``h4``, truncated Fock space) and the pseudo-spin
discrete series (``su11``, truncated).  Every representation exposes the
same Cartan-style data: commuting hermitian diagonal operators ``D_delta``,
a single lowering mode ``R`` annihilating the reference state, the real
structure constants ``[D_delta, R] = d_delta R``, and real closure
coefficients ``[R, R^dag] = sum_delta q_delta D_delta``.

A clock is an affine function of the first diagonal operator, shifted so
the reference state sits at energy exactly zero and scaled so the ladder
ascends with a positive uniform gap ``epsilon``.
"""
from __future__ import annotations

import dataclasses
import numpy as np

_SQRT2 = float(np.sqrt(2.0))


@dataclasses.dataclass(frozen=True)
class LieAlgebraRep:
    """Finite matrix data for one clock algebra family.

    Attributes
    ----------
    family : str
        One of ``"su2"``, ``"h4"``, ``"su11"``.
    dim : int
        Hilbert-space dimension of the stored matrices.
    diagonal_ops : tuple of ndarray
        Commuting hermitian operators ``D_delta``.
    raising_ops : tuple of ndarray
        Ladder modes ``R_m`` (single mode here); each annihilates the
        reference state and lowers the ladder index.
    structure_d : ndarray
        Real matrix ``d[delta, m]`` with ``[D_delta, R_m] = d[delta, m] R_m``.
    structure_c : ndarray
        Mixing coefficients among distinct ladder modes; empty for the
        single-mode families implemented here.
    closure_q : ndarray
        Real coefficients with ``[R, R^dag] = sum_delta closure_q[delta] D_delta``.
    weights : ndarray
        Reference-state eigenvalues ``g_delta`` of the diagonal operators.
    reference_state : ndarray
        Unit vector annihilated by every ``R_m``.
    truncated : bool
        True when the matrices are a cutoff of an infinite-dimensional
        representation.
    exact_dim : int
        Dimension of the leading subspace on which all commutation
        relations hold exactly (``dim`` when not truncated).
    valid_dim : int
        Designated valid subspace for state support claims (half the
        cutoff for truncated families).
    params : dict
        Family parameters (``j``, ``n_cut``, ``k``).
    """

    family: str
    dim: int
    diagonal_ops: tuple
    raising_ops: tuple
    structure_d: np.ndarray
    structure_c: np.ndarray
    closure_q: np.ndarray
    weights: np.ndarray
    reference_state: np.ndarray
    truncated: bool
    exact_dim: int
    valid_dim: int
    params: dict

    @property
    def sigma2(self) -> int:
        """Branch sign: +1 for trig-type manifolds, -1 for hyperbolic."""
        return -1 if self.family == "su11" else 1


def build_su2_rep(j: float) -> LieAlgebraRep:
    """Spin-j ladder in the basis |n> = |j, m = n - j>, n = 0 .. 2j.

    The diagonal operator is sqrt(2)*S_z and the ladder mode is S^-, which
    annihilates the lowest-weight reference |j, -j>.  This normalization
    makes sum_delta d_delta^2 = 2 exactly.
    """
    two_j = round(2 * j)
    if two_j <= 0 or abs(2 * j - two_j) > 1e-12:
        raise ValueError(f"j must be a positive integer or half-integer, got {j}")
    j = two_j / 2.0
    dim = two_j + 1
    n = np.arange(dim, dtype=float)
    d1 = np.diag(_SQRT2 * (n - j))
    lowering = np.zeros((dim, dim))
    for k in range(dim - 1):
        lowering[k, k + 1] = np.sqrt((k + 1) * (two_j - k))
    ref = np.zeros(dim)
    ref[0] = 1.0
    return LieAlgebraRep(
        family="su2",
        dim=dim,
        diagonal_ops=(d1,),
        raising_ops=(lowering,),
        structure_d=np.array([[-_SQRT2]]),
        structure_c=np.zeros((0,)),
        closure_q=np.array([-_SQRT2]),
        weights=np.array([-_SQRT2 * j]),
        reference_state=ref,
        truncated=False,
        exact_dim=dim,
        valid_dim=dim,
        params={"j": j},
    )


def build_h4_rep(n_cut: int) -> LieAlgebraRep:
    """Oscillator algebra on the truncated Fock space |0> .. |n_cut>.

    Diagonal operators are the number operator and the identity; the
    ladder mode is the annihilator ``a``.  [a, a^dag] = I holds exactly on
    span{|0> .. |n_cut - 1>}; the diagonal picks up -n_cut in the last
    entry.  No rescaling is applied (the canonical commutator is kept).
    """
    if n_cut < 2:
        raise ValueError(f"n_cut must be at least 2, got {n_cut}")
    dim = n_cut + 1
    number = np.diag(np.arange(dim, dtype=float))
    a = np.zeros((dim, dim))
    for k in range(dim - 1):
        a[k, k + 1] = np.sqrt(k + 1.0)
    ref = np.zeros(dim)
    ref[0] = 1.0
    return LieAlgebraRep(
        family="h4",
        dim=dim,
        diagonal_ops=(number, np.eye(dim)),
        raising_ops=(a,),
        structure_d=np.array([[-1.0], [0.0]]),
        structure_c=np.zeros((0,)),
        closure_q=np.array([0.0, 1.0]),
        weights=np.array([0.0, 1.0]),
        reference_state=ref,
        truncated=True,
        exact_dim=dim - 1,
        valid_dim=max(2, n_cut // 2),
        params={"n_cut": n_cut},
    )


def build_su11_rep(k: float, n_cut: int) -> LieAlgebraRep:
    """Discrete-series pseudo-spin ladder with Bargmann index k, truncated.

    Basis |n> carries K_0 = k + n.  The stored diagonal operator is
    sqrt(2)*K_0 and the ladder mode is K^-, with closure
    [K^-, K^+] = 2 K_0 = sqrt(2) * D_1 (note the sign twist relative to
    the compact family).
    """
    if k <= 0:
        raise ValueError(f"Bargmann index k must be positive, got {k}")
    if n_cut < 2:
        raise ValueError(f"n_cut must be at least 2, got {n_cut}")
    dim = n_cut + 1
    n = np.arange(dim, dtype=float)
    d1 = np.diag(_SQRT2 * (k + n))
    km = np.zeros((dim, dim))
    for m in range(dim - 1):
        km[m, m + 1] = np.sqrt((m + 1) * (2 * k + m))
    ref = np.zeros(dim)
    ref[0] = 1.0
    return LieAlgebraRep(
        family="su11",
        dim=dim,
        diagonal_ops=(d1,),
        raising_ops=(km,),
        structure_d=np.array([[-_SQRT2]]),
        structure_c=np.zeros((0,)),
        closure_q=np.array([_SQRT2]),
        weights=np.array([_SQRT2 * k]),
        reference_state=ref,
        truncated=True,
        exact_dim=dim - 1,
        valid_dim=max(2, n_cut // 2),
        params={"k": k, "n_cut": n_cut},
    )


@dataclasses.dataclass(frozen=True)
class CartanReport:
    """Residual norms from verify_cartan, full-space and exact-subspace."""

    diagonal_commutators: float
    ladder_relations: float
    closure_relation: float
    reference_annihilation: float
    reference_weights: float
    max_residual: float
    max_residual_exact_subspace: float
    passed: bool


def _comm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def verify_cartan(rep: LieAlgebraRep, tol: float = 1e-12) -> CartanReport:
    """Check every stored structure relation against direct matrix arithmetic.

    Returns residual 2-norms; ``passed`` reflects the exact-subspace
    residual for truncated families and the full-space one otherwise.
    """
    dims = rep.dim
    proj = np.zeros((dims, dims))
    proj[: rep.exact_dim, : rep.exact_dim] = np.eye(rep.exact_dim)

    r_diag = 0.0
    for i, da in enumerate(rep.diagonal_ops):
        if np.linalg.norm(da - da.conj().T, 2) > tol:
            raise ValueError(f"diagonal operator {i} is not hermitian")
        for db in rep.diagonal_ops[i + 1:]:
            r_diag = max(r_diag, np.linalg.norm(_comm(da, db), 2))

    r_ladder = 0.0
    r_ladder_sub = 0.0
    for m, r_op in enumerate(rep.raising_ops):
        for delta, d_op in enumerate(rep.diagonal_ops):
            resid = _comm(d_op, r_op) - rep.structure_d[delta, m] * r_op
            r_ladder = max(r_ladder, np.linalg.norm(resid, 2))
            r_ladder_sub = max(r_ladder_sub, np.linalg.norm(proj @ resid @ proj, 2))

    target = sum(q * d_op for q, d_op in zip(rep.closure_q, rep.diagonal_ops))
    r_op = rep.raising_ops[0]
    closure_resid = _comm(r_op, r_op.conj().T) - target
    r_close = np.linalg.norm(closure_resid, 2)
    r_close_sub = np.linalg.norm(proj @ closure_resid @ proj, 2)

    r_annih = max(
        float(np.linalg.norm(r_op @ rep.reference_state)) for r_op in rep.raising_ops
    )
    r_weights = max(
        float(np.linalg.norm(d_op @ rep.reference_state - g * rep.reference_state))
        for d_op, g in zip(rep.diagonal_ops, rep.weights)
    )

    full = max(r_diag, r_ladder, r_close, r_annih, r_weights)
    sub = max(r_diag, r_ladder_sub, r_close_sub, r_annih, r_weights)
    return CartanReport(
        diagonal_commutators=r_diag,
        ladder_relations=r_ladder,
        closure_relation=r_close,
        reference_annihilation=r_annih,
        reference_weights=r_weights,
        max_residual=full,
        max_residual_exact_subspace=sub,
        passed=bool((sub if rep.truncated else full) <= tol),
    )


@dataclasses.dataclass(frozen=True)
class ClockModel:
    """A ladder Hamiltonian built from one representation.

    ``h_c = scale * (D_1 - g_1 * I)`` has spectrum ``epsilon * {0 .. dim-1}``
    with the reference state at exactly zero energy and
    ``[h_c, R] = -epsilon R`` (the ladder mode lowers the clock).

    ``epsilon`` is the positive gap ``-scale * d_1``; ``b2`` is signed,
    ``-sum_delta g_delta d_delta``, and feeds the closed-form symbol
    ``(epsilon * b2 / 2)(cos(2 sigma rho) - 1)`` on the trig/hyperbolic
    branches (the oscillator symbol is ``epsilon * rho^2``).
    """

    rep: LieAlgebraRep
    ell: int
    scale: float
    epsilon: float
    shift: float
    b2: float
    h_c: np.ndarray

    @property
    def dim(self) -> int:
        return self.rep.dim

    @property
    def sigma2(self) -> int:
        return self.rep.sigma2

    @property
    def lowering_op(self) -> np.ndarray:
        return self.rep.raising_ops[self.ell - 1]


def build_clock(rep: LieAlgebraRep, ell: int = 1, scale: float = 1.0) -> ClockModel:
    """Assemble the zero-shifted ascending clock for mode ``ell``.

    Parameters
    ----------
    rep : LieAlgebraRep
    ell : int
        Ladder mode index (1-based; the implemented families carry one mode).
    scale : float
        Positive energy unit multiplying the whole ladder.  The default
        keeps the normalized gap (sqrt(2) for su2/su11, 1 for h4);
        classical-limit sweeps pass an intensive value.
    """
    if not 1 <= ell <= len(rep.raising_ops):
        raise ValueError(f"ell must index a ladder mode, got {ell}")
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    d1 = float(rep.structure_d[0, ell - 1])
    if d1 >= 0:
        raise ValueError(
            "mode ell does not lower the first diagonal operator; "
            f"gap would not be positive (d = {d1})"
        )
    epsilon = -scale * d1
    g1 = float(rep.weights[0])
    h_c = scale * (rep.diagonal_ops[0] - g1 * np.eye(rep.dim))
    if np.linalg.norm(h_c - h_c.conj().T, 2) > 1e-12:
        raise ValueError("assembled clock Hamiltonian is not hermitian")
    b2 = -float(np.dot(rep.weights, rep.structure_d[:, ell - 1]))
    return ClockModel(
        rep=rep, ell=ell, scale=scale, epsilon=epsilon,
        shift=-scale * g1, b2=b2, h_c=h_c,
    )


def intensive_su2_clock(j: float) -> ClockModel:
    """Spin clock with the 1/(2j) intensive scale.

    The gap shrinks as sqrt(2)/(2j) so the coherent symbol is the
    size-independent function sqrt(2)*sin(rho)^2; growing j then plays the
    role of the classical limit at fixed manifold coordinates.
    """
    rep = build_su2_rep(j)
    return build_clock(rep, scale=1.0 / (2 * rep.params["j"]))


def intensive_h4_clock(mean_n: float, buffer_sigmas: float = 8.0) -> ClockModel:
    """Oscillator clock sized for states of mean excitation ``mean_n``.

    Scale 1/mean_n keeps the symbol at the working point of order one;
    the cutoff leaves ``buffer_sigmas`` Poisson widths of headroom.
    """
    if mean_n <= 0:
        raise ValueError("mean_n must be positive")
    n_cut = int(np.ceil(mean_n + buffer_sigmas * np.sqrt(mean_n))) + 2
    rep = build_h4_rep(n_cut)
    return build_clock(rep, scale=1.0 / mean_n)
