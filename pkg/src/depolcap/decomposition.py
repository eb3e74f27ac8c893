"""Convex decomposition of the depolarizing channel into uniform
phase-damping channels.

The construction runs through an intermediate channel Omega that adds back a
fraction of the off-diagonal part,

    Omega_lam(rho) = Delta_lam(rho) + ((1 - lam)/d) (rho - diag(rho)),

and two exact identities:

  * Delta_lam is a weighted combination of Omega_lam and its conjugations by
    powers of the clock unitary G (averaging those conjugations dephases);
  * Omega_lam is the uniform average of 2 d^2 phase-damping channels whose
    bases are {G^k H^a theta}_k for a = 1 .. 2 d^2, where H carries quadratic
    phases and theta is the constant unit vector.

Chaining the two yields 2 d^2 (d + 1) terms (weight, conjugating unitary,
uniform phase-damping channel) whose weights are nonnegative for lam in
[0, 1]. For lam < 0 both identities still hold linearly but some weights go
negative; the decomposition is then flagged as signed rather than convex.
The second identity reduces to a quadruple-index counting problem over
(x, y, u, v) in {1..d}^4, enumerated exhaustively by
:func:`diophantine_solutions`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import frobenius_distance, superoperator_from_action, PureState
from .depolarizing import DepolarizingChannel
from .phase_damping import PhaseDampingChannel, damping_lambda_min

WEIGHT_SUM_TOL = 1e-12
CONVEXITY_TOL = 1e-12


def build_g(d: int) -> np.ndarray:
    """Clock unitary G = diag(exp(2 pi i k / d)) for k = 1..d; G^d = I."""
    k = np.arange(1, d + 1)
    return np.diag(np.exp(2j * math.pi * k / d))


def build_h(d: int) -> np.ndarray:
    """Quadratic-phase unitary H = diag(exp(2 pi i k^2 / (2 d^2))), k = 1..d."""
    k = np.arange(1, d + 1)
    return np.diag(np.exp(2j * math.pi * k * k / (2.0 * d * d)))


def theta_state(d: int) -> PureState:
    """The constant unit vector (1, ..., 1)/sqrt(d)."""
    return PureState(np.ones(d, dtype=complex) / math.sqrt(d))


def psi_state(d: int, k: int, a: int) -> PureState:
    """The uniform vector G^k H^a theta; k in 1..d, a in 1..2d^2 (1-based)."""
    if not 1 <= k <= d:
        raise ValueError(f"k must be in 1..{d}, got {k}")
    if not 1 <= a <= 2 * d * d:
        raise ValueError(f"a must be in 1..{2 * d * d}, got {a}")
    g_diag = np.diagonal(build_g(d))
    h_diag = np.diagonal(build_h(d))
    amps = (g_diag ** k) * (h_diag ** a) * np.asarray(theta_state(d))
    return PureState(amps)


def psi_basis(d: int, a: int) -> np.ndarray:
    """Orthonormal basis matrix whose column k-1 is psi_{k,a}."""
    return np.column_stack([np.asarray(psi_state(d, k, a)) for k in range(1, d + 1)])


def phase_channel(d: int, lam: float, a: int) -> PhaseDampingChannel:
    """The a-th uniform phase-damping channel, basis {psi_{k,a}}_k."""
    return PhaseDampingChannel.unchecked(d, lam, basis=psi_basis(d, a))


# ---------------------------------------------------------------------------
# Omega
# ---------------------------------------------------------------------------

class OmegaChannel:
    """Intermediate channel Delta_lam + ((1 - lam)/d)(rho - diag rho).

    Trace preserving for every lam; completely positive exactly for
    -1/(d - 1) <= lam <= 1 (it is an average of phase-damping channels).
    """

    def __init__(self, dim: int, lam: float) -> None:
        lo = damping_lambda_min(dim)
        if not lo <= lam <= 1.0:
            from .core import InvalidChannelError
            raise InvalidChannelError(
                f"lam {lam} outside the CP range [{lo}, 1] for dim {dim}")
        self.dim = int(dim)
        self.lam = float(lam)

    @classmethod
    def unchecked(cls, dim: int, lam: float) -> "OmegaChannel":
        self = object.__new__(cls)
        self.dim = int(dim)
        self.lam = float(lam)
        return self

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        m = np.asarray(mat, dtype=complex)
        delta = DepolarizingChannel.unchecked(self.dim, self.lam).apply_matrix(m)
        return delta + (1.0 - self.lam) / self.dim * (m - np.diag(np.diagonal(m)))

    def alt_apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Equivalent closed form for unit-trace input:
        (lam + (1-lam)/d) rho + ((1-lam)/d)(I - diag rho)."""
        m = np.asarray(mat, dtype=complex)
        c = (1.0 - self.lam) / self.dim
        return (self.lam + c) * m + c * (np.eye(self.dim) - np.diag(np.diagonal(m)))

    def superoperator(self) -> np.ndarray:
        return superoperator_from_action(self.apply_matrix, self.dim)

    def __repr__(self) -> str:
        return f"OmegaChannel(dim={self.dim}, lam={self.lam})"


def omega_apply(om: OmegaChannel, rho) -> np.ndarray:
    """Apply Omega to a state; returns the raw output matrix."""
    return om.apply_matrix(np.asarray(rho, dtype=complex))


def dephasing_average(d: int, mat: np.ndarray) -> np.ndarray:
    """(1/d) sum_k (G*)^k M G^k; equals diag(M) exactly."""
    g_diag = np.diagonal(build_g(d))
    m = np.asarray(mat, dtype=complex)
    acc = np.zeros_like(m)
    for k in range(1, d + 1):
        phase = g_diag ** k
        acc += np.outer(phase.conj(), phase) * m
    return acc / d


# ---------------------------------------------------------------------------
# The two identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    """Superoperator comparison between a target map and a reconstruction."""

    dim: int
    lam: float
    distance: float
    weights: tuple[float, ...]
    n_terms: int

    @property
    def weight_sum(self) -> float:
        return float(sum(self.weights))


def mixing_weights(d: int, lam: float) -> tuple[float, float]:
    """Weights (lam d / (1 + (d-1) lam), (1 - lam) / (1 + (d-1) lam)) of the
    Omega-plus-conjugations split; they always sum to 1."""
    denom = 1.0 + (d - 1.0) * lam
    if abs(denom) < 1e-12:
        raise ValueError(f"singular weight denominator at lam = {lam}, dim = {d}")
    return lam * d / denom, (1.0 - lam) / denom


def conjugation_superoperator(u: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> U* inner(rho) U for a square matrix U."""
    return np.kron(u.conj(), u.T) @ inner


def omega_split_check(d: int, lam: float) -> IdentityCheck:
    """Check Delta = c0 Omega + c1 (1/d) sum_k (G*)^k Omega(.) G^k."""
    c0, c1 = mixing_weights(d, lam)
    target = DepolarizingChannel.unchecked(d, lam).superoperator()
    s_omega = OmegaChannel.unchecked(d, lam).superoperator()
    g = build_g(d)
    recon = c0 * s_omega
    for k in range(1, d + 1):
        gk = np.diag(np.diagonal(g) ** k)
        recon += (c1 / d) * conjugation_superoperator(gk, s_omega)
    return IdentityCheck(dim=d, lam=lam,
                         distance=frobenius_distance(target, recon),
                         weights=(c0,) + (c1 / d,) * d, n_terms=d + 1)


def phase_average_check(d: int, lam: float) -> IdentityCheck:
    """Check Omega = (1/(2 d^2)) sum_a Phi^(a) over all 2 d^2 channels."""
    n = 2 * d * d
    target = OmegaChannel.unchecked(d, lam).superoperator()
    recon = np.zeros_like(target)
    for a in range(1, n + 1):
        recon += phase_channel(d, lam, a).superoperator()
    recon /= n
    return IdentityCheck(dim=d, lam=lam,
                         distance=frobenius_distance(target, recon),
                         weights=(1.0 / n,) * n, n_terms=n)


def averaged_projector_identity_error(d: int, rho) -> float:
    """Entrywise error of (1/(2d)) sum_{a,k} E_{k,a} rho E_{k,a}
    = Tr(rho) I + rho - diag(rho), the pointwise core of the phase-average
    identity."""
    m = np.asarray(rho, dtype=complex)
    acc = np.zeros_like(m)
    for a in range(1, 2 * d * d + 1):
        for k in range(1, d + 1):
            v = np.asarray(psi_state(d, k, a))
            e = np.outer(v, v.conj())
            acc += e @ m @ e
    lhs = acc / (2.0 * d)
    rhs = m.trace() * np.eye(d) + m - np.diag(np.diagonal(m))
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Quadruple-index census behind the phase-average identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiophantineCensus:
    """Exhaustive enumeration of index quadruples (x, y, u, v) in {1..d}^4
    satisfying both  x + v - y - u in {0, +d, -d}  and
    x^2 + v^2 - y^2 - u^2 = 0 mod 2 d^2."""

    d: int
    solutions: tuple[tuple[int, int, int, int], ...]
    cross_branch_count: int  # solutions with x + v - y - u = +/- d

    @property
    def count(self) -> int:
        return len(self.solutions)

    @property
    def expected_count(self) -> int:
        # |{x=y, u=v}| + |{x=u, y=v}| - |overlap x=y=u=v| = 2 d^2 - d
        return 2 * self.d * self.d - self.d


def diophantine_solutions(d: int) -> DiophantineCensus:
    """Enumerate the census for d <= 16 and certify the solution structure.

    Raises if any solution falls outside the two trivial families
    {x = y, u = v} and {x = u, y = v}; those families are what collapse the
    double phase sum to the dephasing form.
    """
    if d > 16:
        raise ValueError("exhaustive enumeration is limited to d <= 16")
    mod = 2 * d * d
    sols = []
    cross = 0
    for x in range(1, d + 1):
        for y in range(1, d + 1):
            for u in range(1, d + 1):
                for v in range(1, d + 1):
                    lin = x + v - y - u
                    if lin not in (0, d, -d):
                        continue
                    if (x * x + v * v - y * y - u * u) % mod != 0:
                        continue
                    sols.append((x, y, u, v))
                    if lin != 0:
                        cross += 1
                    if not ((x == y and u == v) or (x == u and y == v)):
                        raise AssertionError(
                            f"unexpected quadruple {(x, y, u, v)} at d = {d}")
    return DiophantineCensus(d=d, solutions=tuple(sols), cross_branch_count=cross)


# ---------------------------------------------------------------------------
# Full decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DecompositionTerm:
    """One summand: weight * U^* Phi(rho) U."""

    weight: float
    unitary: np.ndarray
    channel: PhaseDampingChannel

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        u = self.unitary
        return u.conj() @ self.channel.apply_matrix(mat) @ u

    def superoperator(self) -> np.ndarray:
        return conjugation_superoperator(self.unitary, self.channel.superoperator())


class ConvexDecomposition:
    """A weighted sum of conjugated uniform phase-damping channels.

    ``is_convex`` records whether all weights are nonnegative; the weight sum
    must equal 1 regardless (the split is always an exact affine identity).
    """

    def __init__(self, dim: int, lam: float, terms: list[DecompositionTerm]) -> None:
        total = sum(t.weight for t in terms)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total}, expected 1")
        self.dim = int(dim)
        self.lam = float(lam)
        self.terms = tuple(terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def weight_sum(self) -> float:
        return float(sum(t.weight for t in self.terms))

    @property
    def is_convex(self) -> bool:
        return all(t.weight >= -CONVEXITY_TOL for t in self.terms)

    def all_channels_uniform(self) -> bool:
        return all(t.channel.is_uniform() for t in self.terms)

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        m = np.asarray(mat, dtype=complex)
        return sum(t.weight * t.apply_matrix(m) for t in self.terms)

    def superoperator(self) -> np.ndarray:
        return sum(t.weight * t.superoperator() for t in self.terms)

    def reconstruction_error(self) -> float:
        """Frobenius distance to the depolarizing superoperator."""
        target = DepolarizingChannel.unchecked(self.dim, self.lam).superoperator()
        return frobenius_distance(target, self.superoperator())

    def __repr__(self) -> str:
        return (f"ConvexDecomposition(dim={self.dim}, lam={self.lam}, "
                f"terms={len(self.terms)}, convex={self.is_convex})")


def full_decomposition(d: int, lam: float) -> ConvexDecomposition:
    """Decompose Delta_lam into 2 d^2 (d + 1) conjugated uniform
    phase-damping terms.

    First block: weight lam/((1 + (d-1) lam) 2 d) on each unconjugated
    Phi^(a). Second block: weight (1 - lam)/((1 + (d-1) lam) 2 d^3) on each
    G^k-conjugated Phi^(a). Convex (all weights >= 0) exactly for lam in
    [0, 1]; outside that the same terms form a signed identity and the
    result is flagged via ``is_convex``.
    """
    c0, c1 = mixing_weights(d, lam)
    n = 2 * d * d
    channels = [phase_channel(d, lam, a) for a in range(1, n + 1)]
    eye = np.eye(d, dtype=complex)
    g_diag = np.diagonal(build_g(d))
    terms = [DecompositionTerm(c0 / n, eye, ch) for ch in channels]
    for k in range(1, d + 1):
        gk = np.diag(g_diag ** k)
        terms.extend(DecompositionTerm(c1 / (d * n), gk, ch) for ch in channels)
    return ConvexDecomposition(d, lam, terms)


def qubit_four_term_decomposition(lam: float) -> ConvexDecomposition:
    """The collapsed d = 2 decomposition.

    At d = 2 the eight phase channels pair up into four distinct ones and
    Omega itself is the average of just two of them (indices a = 2 and
    a = 4, the sigma_y- and sigma_x-basis dampers), so Delta_lam needs only
    four terms: those two channels plain, and the same two conjugated by G.
    """
    c0, c1 = mixing_weights(2, lam)
    g = build_g(2)
    eye = np.eye(2, dtype=complex)
    phi_y = phase_channel(2, lam, 2)
    phi_x = phase_channel(2, lam, 4)
    terms = [
        DecompositionTerm(c0 / 2 + c1 / 4, eye, phi_y),
        DecompositionTerm(c0 / 2 + c1 / 4, eye, phi_x),
        DecompositionTerm(c1 / 4, g, phi_y),
        DecompositionTerm(c1 / 4, g, phi_x),
    ]
    return ConvexDecomposition(2, lam, terms)
