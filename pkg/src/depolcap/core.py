"""Core linear algebra and quantum-information primitives.

Complex matrices are plain numpy arrays. The thin wrapper classes below add
validation (Hermiticity, positivity, trace and norm constraints) and freeze
the wrapped buffers so instances are immutable and safe to share. Entropies
are computed in nats throughout; :func:`nats_to_bits` is the one
presentation-layer conversion.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

# Validation tolerances, sized for double precision at dimensions <= ~64.
TAU_HERM = 1e-12
TAU_TRACE = 1e-10
TAU_TP = 1e-10
TAU_NORM = 1e-12
TAU_PSD = 1e-10

# Support detection for relative entropy: eigenvalues of the reference state
# at or below SUPPORT_EIG_CUTOFF count as null directions; more than
# SUPPORT_MASS_TOL of probability mass there signals a support violation.
SUPPORT_EIG_CUTOFF = 1e-12
SUPPORT_MASS_TOL = 1e-10

LN2 = math.log(2.0)


class InvalidStateError(ValueError):
    """A matrix violates the density-matrix constraints beyond tolerance."""


class InvalidChannelError(ValueError):
    """A Kraus set is not trace preserving, or dimensions do not match."""


class SupportError(ValueError):
    """An operation requires a full-support (strictly positive) state."""


def nats_to_bits(x: float) -> float:
    """Convert an entropy-like value from nats to bits."""
    return x / LN2


def hermitize(a: np.ndarray) -> np.ndarray:
    """Average away the anti-Hermitian rounding residue of a matrix product."""
    return 0.5 * (a + a.conj().T)


def herm_defect(a: np.ndarray) -> float:
    """Largest entrywise deviation of ``a`` from its own adjoint."""
    return float(np.max(np.abs(a - a.conj().T)))


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------

class DensityMatrix:
    """A state: Hermitian, positive semidefinite, unit trace."""

    def __init__(self, matrix) -> None:
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidStateError(f"expected a square matrix, got shape {m.shape}")
        if herm_defect(m) > TAU_HERM:
            raise InvalidStateError(
                f"matrix is not Hermitian: defect {herm_defect(m):.3e} > {TAU_HERM:.0e}")
        tr = m.trace()
        if abs(tr - 1.0) > TAU_TRACE:
            raise InvalidStateError(f"trace {tr} deviates from 1 beyond {TAU_TRACE:.0e}")
        w = np.linalg.eigvalsh(hermitize(m))
        if w[0] < -TAU_PSD:
            raise InvalidStateError(
                f"matrix is not PSD: min eigenvalue {w[0]:.3e} < -{TAU_PSD:.0e}")
        self.matrix = _freeze(m)
        self.dim: int = m.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.matrix.astype(dtype)
        return self.matrix

    def eigenvalues(self) -> np.ndarray:
        """Real spectrum, ascending, with tiny negatives clipped to zero."""
        return psd_eigenvalues(self.matrix)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class PureState:
    """A unit vector in C^d."""

    def __init__(self, amplitudes) -> None:
        v = np.array(amplitudes, dtype=complex).reshape(-1)
        if v.size < 1:
            raise InvalidStateError("empty amplitude vector")
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > TAU_NORM:
            raise InvalidStateError(f"norm {nrm} deviates from 1 beyond {TAU_NORM:.0e}")
        self.amplitudes = _freeze(v)
        self.dim: int = v.size

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.amplitudes.astype(dtype)
        return self.amplitudes

    def projector(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


class Channel:
    """A completely positive trace-preserving map in Kraus form.

    Complete positivity is automatic from the Kraus representation; trace
    preservation (sum K_i^dag K_i = I) is checked at construction. The
    superoperator matrix acting on row-major vectorized inputs is built on
    demand and cached.
    """

    def __init__(self, kraus_ops: Iterable[np.ndarray]) -> None:
        ops = tuple(np.array(k, dtype=complex) for k in kraus_ops)
        if not ops:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise InvalidChannelError("Kraus operators must share one 2-d shape")
        dim_out, dim_in = shape
        tp = sum(k.conj().T @ k for k in ops)
        defect = np.max(np.abs(tp - np.eye(dim_in)))
        if defect > TAU_TP:
            raise InvalidChannelError(
                f"Kraus set is not trace preserving: residual {defect:.3e} > {TAU_TP:.0e}")
        self.kraus_ops = tuple(_freeze(k) for k in ops)
        self.dim_in: int = dim_in
        self.dim_out: int = dim_out

    @cached_property
    def superoperator(self) -> np.ndarray:
        return kraus_superoperator(self.kraus_ops)

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Apply to a raw matrix without validating the result as a state."""
        return sum(k @ mat @ k.conj().T for k in self.kraus_ops)

    def adjoint_apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Apply the adjoint (Heisenberg-picture) map to a raw matrix."""
        return sum(k.conj().T @ mat @ k for k in self.kraus_ops)

    def choi(self) -> np.ndarray:
        return choi_matrix(self.apply_matrix, self.dim_in)

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        return apply_channel(self, rho)

    def __repr__(self) -> str:
        return (f"Channel(dim_in={self.dim_in}, dim_out={self.dim_out}, "
                f"kraus={len(self.kraus_ops)})")


class BipartiteState:
    """A state on C^d (x) C^d', tagged with its factor dimensions."""

    def __init__(self, dim1: int, dim2: int, state: DensityMatrix) -> None:
        if not isinstance(state, DensityMatrix):
            state = DensityMatrix(state)
        if dim1 * dim2 != state.dim:
            raise InvalidStateError(
                f"factor dims {dim1}x{dim2} do not match state dim {state.dim}")
        self.dim1 = int(dim1)
        self.dim2 = int(dim2)
        self.state = state

    def __array__(self, dtype=None, copy=None):
        return self.state.__array__(dtype)

    def __repr__(self) -> str:
        return f"BipartiteState(dim1={self.dim1}, dim2={self.dim2})"


# ---------------------------------------------------------------------------
# Spectral primitives
# ---------------------------------------------------------------------------

def psd_eigenvalues(a, tol: float = TAU_PSD) -> np.ndarray:
    """Eigenvalues of a Hermitian PSD matrix, ascending, clipped at zero.

    Eigenvalues in [-tol, 0) are rounding noise and are clipped to 0 so they
    cannot poison logarithms and fractional powers downstream. Anything below
    -tol indicates a genuinely invalid input and raises.
    """
    m = np.asarray(a, dtype=complex)
    w = np.linalg.eigvalsh(hermitize(m))
    if w.size and w[0] < -tol:
        raise InvalidStateError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    return np.clip(w, 0.0, None)


def matrix_power_psd(a, p: float) -> np.ndarray:
    """A^p for Hermitian PSD A via eigendecomposition, eigenvalues clipped at 0."""
    m = hermitize(np.asarray(a, dtype=complex))
    w, u = np.linalg.eigh(m)
    if w.size and w[0] < -TAU_PSD:
        raise InvalidStateError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    wp = np.clip(w, 0.0, None) ** p
    return (u * wp) @ u.conj().T


def von_neumann_entropy(rho) -> float:
    """Entropy -sum(lam ln lam) of a state, in nats, with 0 ln 0 = 0."""
    w = psd_eigenvalues(rho)
    nz = w[w > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def _p_norm_from_eigenvalues(w: np.ndarray, p: float) -> float:
    # No domain check; the formula itself is fine for any p > 0.
    return float(np.sum(w ** p) ** (1.0 / p))


def schatten_p_norm(a, p: float) -> float:
    """(Tr A^p)^(1/p) for PSD A and p >= 1."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    return _p_norm_from_eigenvalues(psd_eigenvalues(a), p)


def p_norm_derivative_at_1(a, h: float = 1e-4) -> float:
    """Central finite difference of p -> ||A||_p at p = 1.

    For a state this equals minus its entropy. The stencil needs values at
    p = 1 -/+ h; those are evaluated directly from the spectrum, bypassing
    the p >= 1 restriction of the public norm.
    """
    w = psd_eigenvalues(a)
    return (_p_norm_from_eigenvalues(w, 1.0 + h)
            - _p_norm_from_eigenvalues(w, 1.0 - h)) / (2.0 * h)


def relative_entropy(rho, omega) -> float:
    """Tr rho (ln rho - ln omega) in nats.

    Returns math.inf when rho carries more than SUPPORT_MASS_TOL of weight
    outside the support of omega (the divergent case is a distinguished
    value, not an error). Tiny negative results from rounding are clipped
    to zero.
    """
    r = hermitize(np.asarray(rho, dtype=complex))
    mu, u = np.linalg.eigh(hermitize(np.asarray(omega, dtype=complex)))
    if mu[0] < -TAU_PSD:
        raise InvalidStateError(f"reference state is not PSD: {mu[0]:.3e}")
    weights = np.real(np.einsum("ij,jk,ki->i", u.conj().T, r, u))
    null = mu <= SUPPORT_EIG_CUTOFF
    if float(np.sum(weights[null])) > SUPPORT_MASS_TOL:
        return math.inf
    cross = -float(np.sum(weights[~null] * np.log(mu[~null])))
    w = psd_eigenvalues(r)
    nz = w[w > 0.0]
    own = float(np.sum(nz * np.log(nz)))
    val = own + cross
    if -1e-12 < val < 0.0:
        return 0.0
    return val


# ---------------------------------------------------------------------------
# Composite-system operations
# ---------------------------------------------------------------------------

def ptrace_matrix(mat, dim1: int, dim2: int, keep: int) -> np.ndarray:
    """Partial trace of a (dim1*dim2)-square matrix over one tensor factor.

    ``keep`` selects the factor whose reduced matrix is returned (1 or 2).
    Works on arbitrary matrices, not just states.
    """
    m = np.asarray(mat, dtype=complex).reshape(dim1, dim2, dim1, dim2)
    if keep == 1:
        return np.einsum("ijkj->ik", m)
    if keep == 2:
        return np.einsum("ijil->jl", m)
    raise ValueError(f"keep must be 1 or 2, got {keep}")


def partial_trace(rho12: BipartiteState, keep: int) -> DensityMatrix:
    """Reduced density matrix of a bipartite state on the kept factor."""
    red = ptrace_matrix(rho12.state.matrix, rho12.dim1, rho12.dim2, keep)
    return DensityMatrix(hermitize(red))


def apply_channel(psi: Channel, rho: DensityMatrix) -> DensityMatrix:
    """Apply a channel to a state: sum_i K_i rho K_i^dag."""
    mat = np.asarray(rho, dtype=complex)
    if mat.shape[0] != psi.dim_in:
        raise InvalidChannelError(
            f"channel expects dim {psi.dim_in}, state has dim {mat.shape[0]}")
    return DensityMatrix(hermitize(psi.apply_matrix(mat)))


def tensor_channel(phi: Channel, psi: Channel) -> Channel:
    """Product channel phi (x) psi, with all pairwise Kraus tensor products."""
    ops = [np.kron(a, b) for a in phi.kraus_ops for b in psi.kraus_ops]
    return Channel(ops)


def identity_channel(dim: int) -> Channel:
    return Channel([np.eye(dim)])


# ---------------------------------------------------------------------------
# Superoperator and Choi representations
# ---------------------------------------------------------------------------
# Vectorization is row-major throughout: vec(rho) = rho.reshape(-1), so a map
# rho -> A rho B has superoperator kron(A, B.T).

def kraus_superoperator(kraus_ops: Sequence[np.ndarray]) -> np.ndarray:
    """Superoperator matrix sum_i K_i (x) conj(K_i) of a Kraus set."""
    return sum(np.kron(k, k.conj()) for k in kraus_ops)


def superoperator_from_action(apply_fn: Callable[[np.ndarray], np.ndarray],
                              dim: int) -> np.ndarray:
    """Superoperator of an arbitrary linear map given by its action.

    Columns are the vectorized images of the matrix units, so this works for
    maps that are not completely positive (no Kraus form required).
    """
    out_dim = np.asarray(apply_fn(np.eye(dim, dtype=complex))).shape[0]
    s = np.zeros((out_dim * out_dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            s[:, i * dim + j] = np.asarray(apply_fn(unit)).reshape(-1)
    return s


def choi_matrix(apply_fn: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Normalized Choi matrix (1/d) sum_ij fn(E_ij) (x) E_ij of a linear map.

    PSD exactly when the map is completely positive; unit trace when it is
    trace preserving.
    """
    blocks = []
    for i in range(dim):
        row = []
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            row.append(np.asarray(apply_fn(unit)))
        blocks.append(row)
    out_dim = blocks[0][0].shape[0]
    j_mat = np.zeros((out_dim * dim, out_dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            j_mat += np.kron(blocks[i][j], unit)
    return j_mat / dim


def min_choi_eigenvalue(apply_fn: Callable[[np.ndarray], np.ndarray], dim: int) -> float:
    """Smallest eigenvalue of the Choi matrix; negative flags a non-CP map."""
    j_mat = choi_matrix(apply_fn, dim)
    return float(np.linalg.eigvalsh(hermitize(j_mat))[0])


# ---------------------------------------------------------------------------
# Random generation (seedable, cross-run stable)
# ---------------------------------------------------------------------------
# All randomness flows through numpy's PCG64 via default_rng, so an integer
# seed reproduces results bit for bit across runs and platforms.

def rng_from_seed(seed) -> np.random.Generator:
    """Accept an int seed, a SeedSequence, None, or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rngs(root_seed: int, n: int) -> list[np.random.Generator]:
    """Independent per-trial generators derived from one root seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(root_seed).spawn(n)]


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols))
            + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2.0)


def random_pure_state(dim: int, seed=None) -> PureState:
    rng = rng_from_seed(seed)
    v = _ginibre(rng, dim, 1).reshape(-1)
    return PureState(v / np.linalg.norm(v))


def random_density_matrix(dim: int, seed=None, rank: int | None = None) -> DensityMatrix:
    """Ginibre-induced random state G G^dag / Tr(G G^dag)."""
    rng = rng_from_seed(seed)
    g = _ginibre(rng, dim, rank if rank is not None else dim)
    m = g @ g.conj().T
    return DensityMatrix(m / m.trace())


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    rng = rng_from_seed(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    """Haar-distributed isometry (rows x cols, rows >= cols), V^dag V = I."""
    if rows < cols:
        raise ValueError(f"isometry needs rows >= cols, got {rows} < {cols}")
    rng = rng_from_seed(seed)
    q, r = np.linalg.qr(_ginibre(rng, rows, cols))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_channel(dim_in: int, dim_out: int, env_dim: int, seed=None) -> Channel:
    """Random channel from a Haar isometry into system (x) environment.

    The isometry V maps C^dim_in into C^(dim_out * env_dim); tracing out the
    environment leaves env_dim Kraus operators K_e with sum K_e^dag K_e = I
    exactly (up to rounding), so the result is CPTP by construction.
    """
    v = random_isometry(dim_out * env_dim, dim_in, seed)
    ops = [v[e::env_dim, :] for e in range(env_dim)]
    return Channel(ops)


def random_bipartite_state(dim1: int, dim2: int, seed=None,
                           rank: int | None = None) -> BipartiteState:
    return BipartiteState(dim1, dim2, random_density_matrix(dim1 * dim2, seed, rank))


def basis_state(dim: int, index: int) -> PureState:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return PureState(v)


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)
