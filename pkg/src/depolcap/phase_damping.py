"""Phase-damping channels attached to an orthonormal basis.

Given an orthonormal basis {|b_i>} with projectors E_i = |b_i><b_i|, the
channel acts as

    rho -> lam * rho + (1 - lam) * sum_i E_i rho E_i,

which in its own basis fixes every diagonal entry and scales every
off-diagonal entry by lam. Complete positivity holds exactly for
-1/(d - 1) <= lam <= 1. A vector is called uniform when all its entries
share one modulus 1/sqrt(d); channels whose entire basis is uniform send
the maximally mixed state to itself and give the diagonal-expectation
identity <psi|D|psi> = Tr(D)/d used throughout the decomposition and
capacity machinery.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    Channel,
    DensityMatrix,
    InvalidChannelError,
    InvalidStateError,
    PureState,
    choi_matrix,
    hermitize,
    superoperator_from_action,
    _freeze,
)

UNIFORM_TOL = 1e-10
GRAM_TOL = 1e-10


def damping_lambda_min(dim: int) -> float:
    """Lower edge of the complete-positivity range, -1/(d - 1)."""
    return -1.0 / (dim - 1.0)


def is_uniform_vector(v, tol: float = UNIFORM_TOL) -> bool:
    """True when all amplitude moduli agree within tol."""
    mags = np.abs(np.asarray(v, dtype=complex).reshape(-1))
    return float(mags.max() - mags.min()) < tol


class PhaseDampingChannel:
    """Phase damping with parameter lam in the basis given by the columns
    of ``basis`` (computational basis when omitted)."""

    def __init__(self, dim: int, lam: float, basis=None) -> None:
        self._init_fields(dim, lam, basis)
        lo = damping_lambda_min(self.dim)
        if not lo <= self.lam <= 1.0:
            raise InvalidChannelError(
                f"lam {self.lam} outside the CP range [{lo}, 1] for dim {self.dim}")

    @classmethod
    def unchecked(cls, dim: int, lam: float, basis=None) -> "PhaseDampingChannel":
        """Build without the CP range check; the map stays linear and trace
        preserving, which is what identity checks on wide lam grids need."""
        self = object.__new__(cls)
        self._init_fields(dim, lam, basis)
        return self

    def _init_fields(self, dim: int, lam: float, basis) -> None:
        if dim < 2:
            raise InvalidChannelError(f"dim must be >= 2, got {dim}")
        if basis is None:
            b = np.eye(dim, dtype=complex)
        else:
            if not isinstance(basis, np.ndarray) or basis.ndim != 2:
                basis = np.column_stack([np.asarray(v, dtype=complex).reshape(-1)
                                         for v in basis])
            b = np.array(basis, dtype=complex)
        if b.shape != (dim, dim):
            raise InvalidChannelError(f"basis must be {dim}x{dim}, got {b.shape}")
        gram_defect = np.max(np.abs(b.conj().T @ b - np.eye(dim)))
        if gram_defect > GRAM_TOL:
            raise InvalidChannelError(
                f"basis is not orthonormal: Gram defect {gram_defect:.3e}")
        self.dim = int(dim)
        self.lam = float(lam)
        self.basis = _freeze(b)

    # -- derived structure --------------------------------------------------

    def basis_vectors(self) -> list[PureState]:
        return [PureState(self.basis[:, i]) for i in range(self.dim)]

    def projectors(self) -> list[np.ndarray]:
        """Damping projectors E_i = |b_i><b_i|."""
        cols = self.basis.T
        return [np.outer(c, c.conj()) for c in cols]

    @property
    def is_computational_basis(self) -> bool:
        return bool(np.array_equal(self.basis, np.eye(self.dim)))

    def is_uniform(self) -> bool:
        return all(is_uniform_vector(self.basis[:, i]) for i in range(self.dim))

    # -- action ---------------------------------------------------------------

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Linear action on a raw matrix: off-diagonals scaled by lam in the
        channel's own basis, diagonal untouched."""
        m = np.asarray(mat, dtype=complex)
        if self.is_computational_basis:
            inner = m
        else:
            inner = self.basis.conj().T @ m @ self.basis
        damped = self.lam * inner + (1.0 - self.lam) * np.diag(np.diagonal(inner))
        if self.is_computational_basis:
            return damped
        return self.basis @ damped @ self.basis.conj().T

    def adjoint_apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        # Self-adjoint: the damping projectors appear symmetrically.
        return self.apply_matrix(mat)

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        return phase_damp(self, rho)

    def superoperator(self) -> np.ndarray:
        return superoperator_from_action(self.apply_matrix, self.dim)

    def choi(self) -> np.ndarray:
        return choi_matrix(self.apply_matrix, self.dim)

    def kraus_channel(self) -> Channel:
        """Kraus form built from powers of the basis-diagonal clock unitary.

        With W = U diag(exp(2 pi i j / d)) U^dag, averaging conjugations by
        W^k over k = 1..d dephases in the channel basis, so the Kraus set
        sqrt(lam + (1-lam)/d) I together with sqrt((1-lam)/d) (W*)^k for
        k = 1..d-1 reproduces the channel. The identity weight is
        nonnegative exactly on the CP range.
        """
        d = self.dim
        w0 = self.lam + (1.0 - self.lam) / d
        w = (1.0 - self.lam) / d
        if w0 < 0.0 or w < 0.0:
            raise InvalidChannelError(
                f"no Kraus form: lam {self.lam} outside the CP range for dim {d}")
        phases = np.exp(2j * math.pi * np.arange(d) / d)
        ops = [math.sqrt(w0) * np.eye(d, dtype=complex)]
        for k in range(1, d):
            clock_k = self.basis @ np.diag(phases.conj() ** k) @ self.basis.conj().T
            ops.append(math.sqrt(w) * clock_k)
        return Channel(ops)

    def __repr__(self) -> str:
        tag = "computational" if self.is_computational_basis else "custom"
        return f"PhaseDampingChannel(dim={self.dim}, lam={self.lam}, basis={tag})"


def phase_damp(ch: PhaseDampingChannel, rho: DensityMatrix) -> DensityMatrix:
    """Apply the phase-damping channel to a state."""
    mat = np.asarray(rho, dtype=complex)
    if mat.shape[0] != ch.dim:
        raise InvalidChannelError(
            f"channel expects dim {ch.dim}, state has dim {mat.shape[0]}")
    return DensityMatrix(hermitize(ch.apply_matrix(mat)))


def is_uniform_channel(ch: PhaseDampingChannel) -> bool:
    return ch.is_uniform()


def uniform_diag_expectation(psi: PureState, d_mat) -> complex:
    """<psi|D|psi> for a uniform psi and diagonal D, verified against Tr(D)/d.

    Accepts D as a full diagonal matrix or as its diagonal vector. Raises on
    a non-uniform psi (precondition) and on deviation from Tr(D)/d beyond
    1e-10 (the identity this operation exists to certify).
    """
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if not is_uniform_vector(v):
        raise InvalidStateError("psi is not uniform: amplitude moduli differ")
    d_arr = np.asarray(d_mat, dtype=complex)
    if d_arr.ndim == 2:
        off = d_arr - np.diag(np.diagonal(d_arr))
        if np.max(np.abs(off)) > 1e-12:
            raise ValueError("D must be diagonal")
        diag = np.diagonal(d_arr)
    else:
        diag = d_arr.reshape(-1)
    value = complex(np.sum(np.abs(v) ** 2 * diag))
    expected = complex(np.sum(diag) / v.size)
    if abs(value - expected) > 1e-10:
        raise ArithmeticError(
            f"diagonal expectation {value} deviates from Tr(D)/d = {expected}")
    return value
