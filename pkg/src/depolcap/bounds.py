"""Norm bounds for phase-damped halves of bipartite states.

The central objects: a bipartite state factors through its PSD square root
into column blocks V_i, one per first-factor basis vector, with

    rho12 = (sqrt(rho12))^dag sqrt(rho12),   V_i^dag V_j = block (i, j),

so V_i^dag V_i is the i-th conditional block rho2_i. Scaling the
off-diagonal blocks by lam (the action of a phase damper on factor one)
produces a matrix whose spectrum matches A^{1/2} B A^{1/2} for
A = blockdiag(V_i V_i^dag) and B = b (x) I built from the damped constant
vector; the Lieb-Thirring inequality Tr (A^{1/2} B A^{1/2})^p <= Tr A^p B^p
then caps the output p-norm by d^(1-1/p) nu_p(Delta_lam) times a Schatten
sum over the conditional blocks. Taken together these give the
multiplicativity of the maximal output p-norm for depolarizing tensor
factors, checked here Monte-Carlo style.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BipartiteState,
    Channel,
    DensityMatrix,
    InvalidStateError,
    hermitize,
    identity_channel,
    matrix_power_psd,
    psd_eigenvalues,
    ptrace_matrix,
    schatten_p_norm,
    tensor_channel,
)
from .depolarizing import DepolarizingChannel
from .optimize import AscentResult, maximize_over_pure_states
from .phase_damping import PhaseDampingChannel

INEQ_TOL = 1e-9
LT_TOL = 1e-10
EQ_TOL = 1e-10


@dataclass(frozen=True)
class InequalityCheck:
    """Outcome of a one-sided numerical comparison lhs <= rhs + tolerance."""

    lhs: float
    rhs: float
    tolerance: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.tolerance


@dataclass(frozen=True)
class EqualityCheck:
    value_a: float
    value_b: float
    tolerance: float

    @property
    def difference(self) -> float:
        return abs(self.value_a - self.value_b)

    @property
    def holds(self) -> bool:
        return self.difference <= self.tolerance


# ---------------------------------------------------------------------------
# Block factorization
# ---------------------------------------------------------------------------

class BlockFactorization:
    """Column-block split of the PSD square root of a bipartite state."""

    def __init__(self, rho12: BipartiteState) -> None:
        d, dp = rho12.dim1, rho12.dim2
        mat = np.asarray(rho12, dtype=complex)
        root = matrix_power_psd(mat, 0.5)
        blocks = [root[:, i * dp:(i + 1) * dp] for i in range(d)]
        gram = np.block([[blocks[i].conj().T @ blocks[j] for j in range(d)]
                         for i in range(d)])
        defect = float(np.max(np.abs(gram - mat)))
        if defect > 1e-10:
            raise InvalidStateError(
                f"square-root factorization failed: Gram defect {defect:.3e}")
        self.d = d
        self.d_prime = dp
        self.sqrt_matrix = root
        self.blocks = blocks

    def rho2_block(self, i: int) -> np.ndarray:
        """Conditional block V_i^dag V_i; equals the reduction of
        (E_ii (x) I) rho12 over the first factor."""
        v = self.blocks[i]
        return v.conj().T @ v

    def a_matrix(self) -> np.ndarray:
        """Block diagonal of the outer products V_i V_i^dag."""
        n = self.d * self.d_prime
        a = np.zeros((self.d * n, self.d * n), dtype=complex)
        for i, v in enumerate(self.blocks):
            a[i * n:(i + 1) * n, i * n:(i + 1) * n] = v @ v.conj().T
        return a


def block_factorize(rho12: BipartiteState) -> BlockFactorization:
    return BlockFactorization(rho12)


def rho2_blocks(ch_basis: np.ndarray, rho12: BipartiteState) -> list[np.ndarray]:
    """Conditional second-factor blocks <b_i| (x) I rho12 |b_i> (x) I for the
    basis given by the columns of ch_basis."""
    d, dp = rho12.dim1, rho12.dim2
    mat = np.asarray(rho12, dtype=complex)
    out = []
    for i in range(d):
        lift = np.kron(ch_basis[:, i].reshape(d, 1), np.eye(dp, dtype=complex))
        out.append(lift.conj().T @ mat @ lift)
    return out


def small_b_matrix(d: int, lam: float) -> np.ndarray:
    """d * Phi_lam(theta theta^*) for the computational-basis damper; the
    entries are lam + (1 - lam) delta_ij."""
    return lam * np.ones((d, d), dtype=complex) + (1.0 - lam) * np.eye(d)


def spectrum_identity_check(lam: float, rho12: BipartiteState) -> float:
    """Max deviation between the spectrum of the block-damped state and the
    spectrum of A^{1/2} B A^{1/2}, after zero padding.

    The damper acts in the computational basis on factor one; B is the small
    b matrix blown up by identity blocks so its block pattern matches A.
    """
    d, dp = rho12.dim1, rho12.dim2
    ph = PhaseDampingChannel.unchecked(d, lam)
    joint = tensor_channel(ph.kraus_channel(), identity_channel(dp))
    damped = joint.apply_matrix(np.asarray(rho12, dtype=complex))
    spec_small = psd_eigenvalues(damped)

    fact = block_factorize(rho12)
    a = fact.a_matrix()
    b = np.kron(small_b_matrix(d, lam), np.eye(d * dp, dtype=complex))
    a_half = matrix_power_psd(a, 0.5)
    spec_big = psd_eigenvalues(a_half @ b @ a_half)

    padded = np.concatenate([np.zeros(spec_big.size - spec_small.size), spec_small])
    return float(np.max(np.abs(np.sort(padded) - np.sort(spec_big))))


# ---------------------------------------------------------------------------
# Trace inequalities
# ---------------------------------------------------------------------------

def lieb_thirring_check(a, b, p: float, tolerance: float = LT_TOL) -> InequalityCheck:
    """Tr (A^{1/2} B A^{1/2})^p <= Tr A^p B^p for PSD A, B and p >= 1."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a_half = matrix_power_psd(a, 0.5)
    inner = psd_eigenvalues(a_half @ b @ a_half)
    lhs = float(np.sum(inner ** p))
    rhs = float(np.real(np.trace(matrix_power_psd(a, p) @ matrix_power_psd(b, p))))
    return InequalityCheck(lhs=lhs, rhs=rhs, tolerance=tolerance)


def b_matrix_diagonal_check(d: int, lam: float, p: float) -> EqualityCheck:
    """Diagonal entries of d^p (Phi_lam(theta theta^*))^p against the closed
    form (1-lam)^p + ((d lam + 1 - lam)^p - (1-lam)^p)/d, which also equals
    d^(p-1) nu_p(Delta_lam)^p."""
    theta = np.ones(d, dtype=complex) / math.sqrt(d)
    ph = PhaseDampingChannel.unchecked(d, lam)
    damped = ph.apply_matrix(np.outer(theta, theta.conj()))
    powered = matrix_power_psd(damped, p) * (d ** p)
    entries = np.real(np.diagonal(powered))
    closed = (1.0 - lam) ** p + ((d * lam + 1.0 - lam) ** p - (1.0 - lam) ** p) / d
    nu_form = d ** (p - 1.0) * DepolarizingChannel.unchecked(d, lam)._nu_p_any(p) ** p
    if abs(closed - nu_form) > 1e-10:
        raise AssertionError(
            f"closed form {closed} disagrees with the nu_p form {nu_form}")
    worst = float(entries[np.argmax(np.abs(entries - closed))])
    return EqualityCheck(value_a=worst, value_b=closed, tolerance=1e-10)


def tensor_output_norm_bound(ch: PhaseDampingChannel, rho12: BipartiteState,
                             p: float, tolerance: float = INEQ_TOL
                             ) -> InequalityCheck:
    """|| (Phi_lam (x) I) rho12 ||_p against
    d^(1-1/p) nu_p(Delta_lam) (sum_i Tr rho2_i^p)^(1/p)."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    d, dp = rho12.dim1, rho12.dim2
    if ch.dim != d:
        raise InvalidStateError(f"channel dim {ch.dim} != first factor dim {d}")
    joint = tensor_channel(ch.kraus_channel(), identity_channel(dp))
    lhs = schatten_p_norm(hermitize(joint.apply_matrix(np.asarray(rho12))), p)
    blocks = rho2_blocks(ch.basis, rho12)
    power_sum = sum(float(np.sum(psd_eigenvalues(blk) ** p)) for blk in blocks)
    nu = DepolarizingChannel.unchecked(d, ch.lam)._nu_p_any(p)
    rhs = d ** (1.0 - 1.0 / p) * nu * power_sum ** (1.0 / p)
    return InequalityCheck(lhs=lhs, rhs=rhs, tolerance=tolerance)


def local_unitary_invariance_check(dep: DepolarizingChannel, psi: Channel,
                                   tau12: BipartiteState, u: np.ndarray,
                                   p: float) -> EqualityCheck:
    """|| (Delta (x) Psi) tau12 ||_p is unchanged by a unitary on factor one
    applied before the channel (the depolarizing part commutes with it)."""
    joint = tensor_channel(dep.kraus_channel(), psi)
    mat = np.asarray(tau12, dtype=complex)
    plain = schatten_p_norm(hermitize(joint.apply_matrix(mat)), p)
    lift = np.kron(u, np.eye(tau12.dim2, dtype=complex))
    rotated = schatten_p_norm(
        hermitize(joint.apply_matrix(lift @ mat @ lift.conj().T)), p)
    return EqualityCheck(value_a=plain, value_b=rotated, tolerance=EQ_TOL)


def diagonalize_first_factor(tau12: BipartiteState) -> tuple[BipartiteState, np.ndarray]:
    """Rotate factor one into the eigenbasis of its reduction.

    Returns the rotated state (whose first reduction is diagonal) and the
    unitary that was applied.
    """
    d, dp = tau12.dim1, tau12.dim2
    mat = np.asarray(tau12, dtype=complex)
    tau1 = hermitize(ptrace_matrix(mat, d, dp, keep=1))
    _, vecs = np.linalg.eigh(tau1)
    lift = np.kron(vecs.conj().T, np.eye(dp, dtype=complex))
    rotated = hermitize(lift @ mat @ lift.conj().T)
    return BipartiteState(d, dp, DensityMatrix(rotated)), vecs.conj().T


# ---------------------------------------------------------------------------
# Numeric channel measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NumericMeasure:
    value: float
    maximizer: np.ndarray
    ascent: AscentResult


def _channel_dim_in(channel) -> int:
    return getattr(channel, "dim_in", None) or channel.dim


def pnorm_power_objective(channel, p: float):
    """Objective Tr (Psi(psi psi*))^p with its gradient; same maximizer as
    the output p-norm."""
    def objective(psi: np.ndarray):
        a = hermitize(channel.apply_matrix(np.outer(psi, psi.conj())))
        w, u = np.linalg.eigh(a)
        w = np.clip(w, 0.0, None)
        value = float(np.sum(w ** p))
        a_pm1 = (u * w ** (p - 1.0)) @ u.conj().T
        grad = p * channel.adjoint_apply_matrix(a_pm1) @ psi
        return value, grad
    return objective


def neg_entropy_objective(channel, floor: float = 1e-18):
    """Objective -S(Psi(psi psi*)) with its gradient."""
    def objective(psi: np.ndarray):
        a = hermitize(channel.apply_matrix(np.outer(psi, psi.conj())))
        w, u = np.linalg.eigh(a)
        w = np.clip(w, floor, None)
        value = float(np.sum(w * np.log(w)))
        log_a = (u * np.log(w)) @ u.conj().T
        grad = channel.adjoint_apply_matrix(log_a) @ psi
        return value, grad
    return objective


def max_output_p_norm(channel, p: float, restarts: int = 64,
                      seed: int = 0) -> NumericMeasure:
    """nu_p of an arbitrary channel by restarts of projected gradient ascent
    over pure inputs (pure inputs suffice by convexity of the p-norm)."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    dim = _channel_dim_in(channel)
    best = maximize_over_pure_states(pnorm_power_objective(channel, p), dim,
                                     restarts=restarts, seed=seed)
    return NumericMeasure(value=best.value ** (1.0 / p), maximizer=best.state,
                          ascent=best)


def min_output_entropy(channel, restarts: int = 64, seed: int = 0) -> NumericMeasure:
    """Minimal output entropy by maximizing its negative over pure inputs."""
    dim = _channel_dim_in(channel)
    best = maximize_over_pure_states(neg_entropy_objective(channel), dim,
                                     restarts=restarts, seed=seed)
    return NumericMeasure(value=-best.value, maximizer=best.state, ascent=best)


@dataclass(frozen=True)
class MultiplicativityCheck:
    """Monte-Carlo probe of || (Delta (x) Psi) tau ||_p <= nu_p(Delta) nu_p(Psi)."""

    p: float
    trials: int
    max_norm: float
    bound: float
    product_norm: float
    tolerance: float
    product_tolerance: float
    worst_input: np.ndarray | None = field(default=None, compare=False,
                                           repr=False)

    @property
    def holds(self) -> bool:
        return self.max_norm <= self.bound + self.tolerance

    @property
    def product_attains(self) -> bool:
        return abs(self.product_norm - self.bound) <= self.product_tolerance


def multiplicativity_check(dep: DepolarizingChannel, psi: Channel, p: float,
                           trials: int = 200, seed: int = 0,
                           restarts: int = 64,
                           tolerance: float = 1e-8,
                           product_tolerance: float = 1e-6,
                           psi_measure: NumericMeasure | None = None
                           ) -> MultiplicativityCheck:
    """Check the product bound on random bipartite inputs and its saturation
    at a product of per-factor maximizers.

    A precomputed nu_p(Psi) measure can be passed in to amortize the
    optimizer across sweeps over lambda or trial batches.
    """
    from .core import random_density_matrix, spawn_rngs

    d, dp = dep.dim, psi.dim_in
    joint = tensor_channel(dep.kraus_channel(), psi)
    if psi_measure is None:
        psi_measure = max_output_p_norm(psi, p, restarts=restarts, seed=seed)
    bound = dep.nu_p(p) * psi_measure.value

    max_norm = 0.0
    worst = None
    for rng in spawn_rngs(seed + 1, trials):
        tau = random_density_matrix(d * dp, seed=rng)
        norm = schatten_p_norm(hermitize(joint.apply_matrix(np.asarray(tau))), p)
        if norm > max_norm:
            max_norm, worst = norm, np.asarray(tau)

    # Any pure state maximizes the depolarizing factor, by covariance.
    first = np.zeros(d, dtype=complex)
    first[0] = 1.0
    product_vec = np.kron(first, psi_measure.maximizer)
    product_out = hermitize(joint.apply_matrix(np.outer(product_vec,
                                                        product_vec.conj())))
    product_norm = schatten_p_norm(product_out, p)
    return MultiplicativityCheck(p=p, trials=trials, max_norm=max_norm,
                                 bound=bound, product_norm=product_norm,
                                 tolerance=tolerance,
                                 product_tolerance=product_tolerance,
                                 worst_input=worst)
