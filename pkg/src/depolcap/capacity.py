"""Classical-capacity machinery for channels at desk scale.

Three layers:

  * induced classical channels: an input ensemble and a POVM turn a quantum
    channel into a row-stochastic transition matrix whose Shannon capacity
    is computed by Blahut-Arimoto iteration with a duality-gap stopping
    rule;
  * the Holevo quantity chi* = sup over ensembles of
    S(Psi(rho_bar)) - sum pi_i S(Psi(rho_i)), computed by alternating
    maximization over at most d^2 pure states: a Blahut-Arimoto style
    reweighting for fixed states, gradient ascent to find states whose
    output relative entropy against the current average exceeds the
    ensemble value, and the equalization certificate
    sup_rho S(Psi(rho), Psi(rho_bar)) - chi < tol, which bounds the
    optimizer error directly (chi <= chi* <= sup);
  * inequality checks built on those quantities: the relative-entropy bound
    for depolarizing tensor factors, the output-entropy lower bound for
    uniform phase dampers, and the additivity gap of chi* across tensor
    products.

Entropic values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BipartiteState,
    Channel,
    DensityMatrix,
    InvalidStateError,
    PureState,
    SupportError,
    SUPPORT_EIG_CUTOFF,
    hermitize,
    psd_eigenvalues,
    relative_entropy,
    tensor_channel,
    von_neumann_entropy,
)
from .bounds import InequalityCheck, rho2_blocks, _channel_dim_in
from .depolarizing import DepolarizingChannel
from .optimize import maximize_over_pure_states
from .phase_damping import PhaseDampingChannel

PROB_SUM_TOL = 1e-12
POVM_TOL = 1e-10
ROW_SUM_TOL = 1e-10
ENTRY_TOL = 1e-12
LOG_FLOOR = 1e-18


def _as_kraus(channel) -> Channel:
    """Coerce a closed-form channel to its Kraus form for tensoring."""
    if isinstance(channel, Channel):
        return channel
    return channel.kraus_channel()


# ---------------------------------------------------------------------------
# Ensembles, POVMs, induced classical channels
# ---------------------------------------------------------------------------

class Ensemble:
    """Input states with probabilities; the encoder's codebook distribution."""

    def __init__(self, items) -> None:
        pairs = list(items)
        if not pairs:
            raise ValueError("ensemble needs at least one state")
        probs = np.array([float(p) for p, _ in pairs])
        if probs.min() < -PROB_SUM_TOL:
            raise ValueError(f"negative probability {probs.min()}")
        if abs(probs.sum() - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()}, expected 1")
        states = []
        for _, rho in pairs:
            states.append(rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho))
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise ValueError(f"mixed state dimensions {sorted(dims)}")
        self.probs = probs
        self.probs.setflags(write=False)
        self.states = tuple(states)
        self.dim = states[0].dim

    def __len__(self) -> int:
        return len(self.states)

    def average(self) -> DensityMatrix:
        avg = sum(p * np.asarray(s, dtype=complex)
                  for p, s in zip(self.probs, self.states))
        return DensityMatrix(hermitize(avg))

    @classmethod
    def uniform_basis(cls, dim: int) -> "Ensemble":
        items = []
        for i in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, i] = 1.0
            items.append((1.0 / dim, DensityMatrix(e)))
        return cls(items)


class Povm:
    """Positive operators summing to the identity."""

    def __init__(self, elements) -> None:
        ops = [np.asarray(e, dtype=complex) for e in elements]
        if not ops:
            raise ValueError("POVM needs at least one element")
        dim = ops[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for e in ops:
            if e.shape != (dim, dim):
                raise ValueError("POVM elements must share one square shape")
            w = np.linalg.eigvalsh(hermitize(e))
            if w[0] < -POVM_TOL:
                raise ValueError(f"POVM element has eigenvalue {w[0]:.3e}")
            total += e
        if np.max(np.abs(total - np.eye(dim))) > POVM_TOL:
            raise ValueError("POVM elements do not sum to the identity")
        self.elements = tuple(ops)
        self.dim = dim

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def basis(cls, dim: int) -> "Povm":
        eye = np.eye(dim, dtype=complex)
        return cls([np.outer(eye[:, i], eye[:, i].conj()) for i in range(dim)])

    @classmethod
    def random(cls, dim: int, n_elements: int, seed=None) -> "Povm":
        """Random POVM: Ginibre Grams whitened by their total."""
        from .core import rng_from_seed
        rng = rng_from_seed(seed)
        raws = []
        for _ in range(n_elements):
            g = (rng.standard_normal((dim, dim))
                 + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
            raws.append(g @ g.conj().T)
        total = sum(raws)
        w, u = np.linalg.eigh(hermitize(total))
        inv_half = (u * (1.0 / np.sqrt(np.clip(w, 1e-30, None)))) @ u.conj().T
        return cls([inv_half @ r @ inv_half for r in raws])


class ClassicalChannelMatrix:
    """Row-stochastic transition matrix of an induced classical channel."""

    def __init__(self, probs) -> None:
        p = np.array(probs, dtype=float)
        if p.ndim != 2:
            raise ValueError(f"expected a 2-d matrix, got shape {p.shape}")
        if p.min() < -ENTRY_TOL:
            raise ValueError(f"negative transition probability {p.min():.3e}")
        row_sums = p.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > ROW_SUM_TOL:
            raise ValueError("rows must sum to 1")
        self.probs = np.clip(p, 0.0, None)
        self.probs.setflags(write=False)
        self.rows, self.cols = p.shape


def transition_matrix(channel, ensemble: Ensemble, povm: Povm
                      ) -> ClassicalChannelMatrix:
    """p_ij = Tr[Psi(rho_i) E_j]."""
    if ensemble.dim != _channel_dim_in(channel):
        raise ValueError(f"ensemble dim {ensemble.dim} does not match channel")
    rows = []
    for rho in ensemble.states:
        out = channel.apply_matrix(np.asarray(rho, dtype=complex))
        if out.shape[0] != povm.dim:
            raise ValueError(f"POVM dim {povm.dim} does not match channel output")
        rows.append([float(np.real(np.trace(out @ e))) for e in povm.elements])
    return ClassicalChannelMatrix(rows)


def mutual_information(prior, t: ClassicalChannelMatrix) -> float:
    """I(X; Y) in nats of the joint distribution prior_i p_ij."""
    r = np.asarray(prior, dtype=float)
    if abs(r.sum() - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"prior sums to {r.sum()}, expected 1")
    p = t.probs
    q = r @ p
    total = 0.0
    for i in range(t.rows):
        if r[i] <= 0.0:
            continue
        row = p[i]
        mask = row > 0.0
        total += r[i] * float(np.sum(row[mask] * np.log(row[mask] / q[mask])))
    return max(total, 0.0)


@dataclass(frozen=True)
class BlahutArimotoResult:
    capacity: float
    prior: np.ndarray
    iterations: int
    duality_gap: float


def shannon_capacity_fixed(t: ClassicalChannelMatrix, gap_tol: float = 1e-9,
                           max_iter: int = 200_000) -> BlahutArimotoResult:
    """Shannon capacity of a fixed transition matrix by Blahut-Arimoto.

    Stops when the duality gap max_i D_i - sum_i r_i D_i falls below
    gap_tol, where D_i is the divergence of row i from the current output
    distribution; the objective is checked to be nondecreasing along the
    way (exact property of the iteration, up to roundoff).
    """
    p = t.probs
    r = np.full(t.rows, 1.0 / t.rows)
    last_value = -np.inf
    iterations = 0
    gap = np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        log_p = np.where(p > 0.0, np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    for iterations in range(1, max_iter + 1):
        q = r @ p
        log_q = np.log(np.where(q > 0.0, q, 1.0))
        d = np.einsum("ij,ij->i", p, log_p - np.where(p > 0.0, log_q, 0.0))
        value = float(r @ d)
        if value < last_value - 1e-12:
            raise AssertionError(
                f"objective decreased from {last_value} to {value}")
        last_value = value
        gap = float(d.max() - value)
        if gap < gap_tol:
            break
        r = r * np.exp(d - d.max())
        r = r / r.sum()
    return BlahutArimotoResult(capacity=last_value, prior=r,
                               iterations=iterations, duality_gap=gap)


def shannon_capacity_depolarizing(ch: DepolarizingChannel) -> float:
    """Shannon capacity of the depolarizing channel with the basis ensemble
    and basis measurement, cross-checked against the closed-form Holevo
    value (the two must agree to 1e-8)."""
    ensemble = Ensemble.uniform_basis(ch.dim)
    povm = Povm.basis(ch.dim)
    result = shannon_capacity_fixed(transition_matrix(ch, ensemble, povm))
    closed = ch.chi_star()
    if abs(result.capacity - closed) > 1e-8:
        raise ArithmeticError(
            f"capacity {result.capacity} deviates from the closed form {closed}")
    return result.capacity


# ---------------------------------------------------------------------------
# Holevo quantity
# ---------------------------------------------------------------------------

def holevo_of_ensemble(channel, ensemble: Ensemble) -> float:
    """S(Psi(rho_bar)) - sum_i pi_i S(Psi(rho_i)); nonnegative by concavity."""
    outs = [hermitize(channel.apply_matrix(np.asarray(s, dtype=complex)))
            for s in ensemble.states]
    avg = sum(p * o for p, o in zip(ensemble.probs, outs))
    value = von_neumann_entropy(avg) - sum(
        p * von_neumann_entropy(o) for p, o in zip(ensemble.probs, outs))
    return max(value, 0.0)


def holevo_relative_form(channel, ensemble: Ensemble) -> float:
    """sum_i pi_i S(Psi(rho_i), Psi(rho_bar)); equals holevo_of_ensemble."""
    outs = [hermitize(channel.apply_matrix(np.asarray(s, dtype=complex)))
            for s in ensemble.states]
    avg = hermitize(sum(p * o for p, o in zip(ensemble.probs, outs)))
    return sum(p * relative_entropy(o, avg)
               for p, o in zip(ensemble.probs, outs) if p > 0.0)


def _superoperator_of(channel) -> np.ndarray:
    s = channel.superoperator
    return s if isinstance(s, np.ndarray) else s()


def relative_entropy_objective(channel, sigma, floor: float = LOG_FLOOR):
    """Objective S(Psi(psi psi*), sigma) with gradient, for ascent over pure
    inputs; sigma's spectrum is floored so the value stays finite (and
    large) outside its support.

    The channel acts through its superoperator matrix: the objective sits in
    the optimizer's inner loop, and one matvec beats a sum over Kraus
    conjugations at these dimensions.
    """
    w, u = np.linalg.eigh(hermitize(np.asarray(sigma, dtype=complex)))
    log_sigma = (u * np.log(np.clip(w, floor, None))) @ u.conj().T
    superop = _superoperator_of(channel)
    adjoint_superop = superop.conj().T
    dim_out = int(round(math.sqrt(superop.shape[0])))
    dim_in = int(round(math.sqrt(superop.shape[1])))

    def objective(psi: np.ndarray):
        a = (superop @ np.outer(psi, psi.conj()).reshape(-1)).reshape(dim_out, dim_out)
        a = hermitize(a)
        wa, ua = np.linalg.eigh(a)
        wa = np.clip(wa, 0.0, None)
        log_wa = np.log(np.clip(wa, floor, None))
        own = float(np.sum(np.where(wa > floor, wa * log_wa, 0.0)))
        value = own - float(np.real(np.vdot(a, log_sigma)))
        log_a = (ua * log_wa) @ ua.conj().T
        back = (adjoint_superop @ (log_a - log_sigma).reshape(-1)).reshape(dim_in, dim_in)
        return value, back @ psi

    return objective


@dataclass(frozen=True)
class HolevoResult:
    """Output of the chi* optimizer.

    ``chi`` is the achieved ensemble value (a guaranteed lower bound on
    chi*); ``certificate_gap`` is sup_rho S(Psi(rho), Psi(rho_bar)) - chi,
    an upper bound on the remaining error. ``average_input`` is the
    optimizer's rho_bar, the reference state of the min-max representation.
    """

    chi: float
    probs: np.ndarray
    states: tuple[np.ndarray, ...]
    average_input: DensityMatrix
    average_output: DensityMatrix
    certificate_gap: float
    outer_iterations: int
    converged: bool

    def ensemble(self) -> Ensemble:
        items = [(p, PureState(s).projector())
                 for p, s in zip(self.probs, self.states) if p > 1e-12]
        total = sum(p for p, _ in items)
        return Ensemble([(p / total, rho) for p, rho in items])


def _seed_ints(root_seed: int, n: int) -> list[int]:
    ss = np.random.SeedSequence(root_seed)
    return [int(child.generate_state(1)[0]) for child in ss.spawn(n)]


def _weight_stats(probs: np.ndarray, outs: np.ndarray, owns: np.ndarray):
    """(value, divergences, sigma eigenvalues, sigma eigenvectors) of the
    ensemble value sum_i pi_i S(out_i, sigma) at sigma = sum_i pi_i out_i."""
    sigma = hermitize(np.tensordot(probs, outs, axes=1))
    w, u = np.linalg.eigh(sigma)
    wc = np.clip(w, LOG_FLOOR, None)
    log_sigma = (u * np.log(wc)) @ u.conj().T
    divs = owns - np.real(np.einsum("ikl,lk->i", outs, log_sigma))
    return float(probs @ divs), divs, wc, u


def _equalize_weights(probs: np.ndarray, outs: np.ndarray, owns: np.ndarray,
                      tol: float, max_rounds: int = 5000):
    """Maximize sum_i pi_i S(out_i, sigma(pi)) over the simplex for a fixed
    output list, by multiplicative reweighting with an exponent line search.

    The plain pi_i <- pi_i exp(D_i) update is monotone but decays weights
    that belong on the boundary only like 1/k; growing the exponent while
    the objective still improves restores a geometric rate. Returns
    (probs, value, divergences); max(divs) - value < tol certifies
    optimality on this support.
    """

    def evaluate(p):
        value, divs, _, _ = _weight_stats(p, outs, owns)
        return value, divs

    def search(p, step, t0):
        best = None
        t = t0
        while True:
            cand = p * np.exp(t * step)
            total = cand.sum()
            if not np.isfinite(total) or total <= 0.0:
                break
            cand = cand / total
            v, dv = evaluate(cand)
            if best is not None and v <= best[1]:
                break
            best = (cand, v, dv, t)
            if t > 1e12:
                break
            t *= 2.0
        return best

    value, divs = evaluate(probs)
    t = 1.0
    for _ in range(max_rounds):
        if divs.max() - value < tol:
            break
        step = divs - divs.max()
        best = search(probs, step, max(t * 0.5, 1.0))
        if (best is None or best[1] <= value) and t > 2.0:
            best = search(probs, step, 1.0)
        if best is None or best[1] < value - 1e-12:
            break
        probs, value, divs, t = best
    return probs, value, divs


def _polish_weights(probs: np.ndarray, outs: np.ndarray, owns: np.ndarray,
                    tol: float, max_rounds: int = 40):
    """Drive the weight optimality gap max_i D_i - sum_i pi_i D_i below tol
    by Newton steps on the simplex.

    The reweighting above converges in value, but the value is quadratically
    flat around the optimal output average, so a value-level gap of eps
    still leaves the average off by sqrt(eps) and inflates the relative
    entropy certificate at first order. The divergences themselves resolve
    that deviation linearly, and the Hessian of the ensemble value in the
    weights is available in closed form through the derivative of the
    matrix logarithm at sigma, so a few projected Newton steps reach the
    gap floor that plain reweighting cannot.
    """
    n = probs.size
    if n == 1:
        value, divs, _, _ = _weight_stats(probs, outs, owns)
        return probs, value, divs
    value, divs, wc, u = _weight_stats(probs, outs, owns)
    ones = np.ones(n)
    for _ in range(max_rounds):
        gap = divs.max() - value
        if gap < tol:
            break
        logw = np.log(wc)
        dw = wc[:, None] - wc[None, :]
        near = np.abs(dw) < 1e-12 * np.maximum(wc[:, None], wc[None, :])
        loewner = np.where(near, 2.0 / (wc[:, None] + wc[None, :]),
                           (logw[:, None] - logw[None, :]) / np.where(dw == 0.0, 1.0, dw))
        rotated = np.einsum("ba,ibc,cd->iad", u.conj(), outs, u)
        hess = -np.real(np.einsum("kl,ikl,jkl->ij", loewner,
                                  rotated.conj(), rotated))
        pinv = np.linalg.pinv(hess, rcond=1e-12, hermitian=True)
        denom = float(ones @ pinv @ ones)
        if abs(denom) > 1e-30:
            mu = float(ones @ pinv @ divs) / denom
        else:
            mu = float(divs.mean())
        delta = pinv @ (mu * ones - divs)
        delta = delta - delta.mean()
        norm = np.abs(delta).max()
        if norm < 1e-16:
            break
        # Longest simplex-feasible fraction of the Newton step.
        alpha = 1.0
        shrinking = delta < 0.0
        if shrinking.any():
            alpha = min(1.0, float(np.min(probs[shrinking] / -delta[shrinking])))
        accepted = False
        for _ in range(25):
            cand = np.clip(probs + alpha * delta, 0.0, None)
            cand = cand / cand.sum()
            v, dv, wcn, un = _weight_stats(cand, outs, owns)
            cand_gap = dv.max() - v
            if cand_gap < gap * (1.0 - 1e-4) or v > value + 1e-15:
                probs, value, divs, wc, u = cand, v, dv, wcn, un
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
    return probs, value, divs


def holevo_quantity(channel, seed: int = 0, cert_tol: float = 1e-7,
                    max_outer: int = 200, sup_restarts: int = 8,
                    final_restarts: int = 32, inner_iters: int = 500,
                    max_states: int | None = None) -> HolevoResult:
    """chi* by alternating maximization with an equalization certificate.

    The support holds at most d^2 pure states (enough for an optimal
    ensemble). Per round: Blahut-Arimoto style reweighting for the fixed
    support, then a multi-start ascent of S(Psi(rho), Psi(rho_bar)); if the
    best found state beats the ensemble value by less than cert_tol the
    ensemble is equalized and optimal to that tolerance, otherwise the
    state enters the support, displacing the lightest member when full.
    Non-convergence within max_outer rounds is reported, not raised.
    """
    dim = _channel_dim_in(channel)
    # d^2 states suffice for the optimum; the extra slots give iterates
    # room before any support member has to be evicted.
    cap = max_states if max_states is not None else dim * dim + dim
    seeds = _seed_ints(seed, max_outer + 2)
    rng = np.random.default_rng(seeds[0])

    states: list[np.ndarray] = []
    eye = np.eye(dim, dtype=complex)
    for i in range(min(dim, cap)):
        states.append(eye[:, i].copy())
    while len(states) < min(dim * dim, cap):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        states.append(v / np.linalg.norm(v))
    probs = np.full(len(states), 1.0 / len(states))

    def output_of(psi: np.ndarray) -> np.ndarray:
        return hermitize(channel.apply_matrix(np.outer(psi, psi.conj())))

    def own_entropy_term(out: np.ndarray) -> float:
        w = psd_eigenvalues(out)
        nz = w[w > 0.0]
        return float(np.sum(nz * np.log(nz)))

    outs = np.stack([output_of(s) for s in states])
    owns = np.array([own_entropy_term(o) for o in outs])

    chi = 0.0
    gap = np.inf
    converged = False
    outer = 0
    inner_tol = 1e-12
    for outer in range(1, max_outer + 1):
        probs, chi, divs = _equalize_weights(probs, outs, owns,
                                             max(inner_tol, 1e-9),
                                             max_rounds=inner_iters)
        probs, chi, divs = _polish_weights(probs, outs, owns, inner_tol)
        # Equalized weights below threshold are certified useless; drop them.
        keep = probs > 1e-12
        if not keep.all() and keep.any():
            states = [s for s, k in zip(states, keep) if k]
            outs = outs[keep]
            owns = owns[keep]
            probs = probs[keep] / probs[keep].sum()

        sigma = hermitize(np.tensordot(probs, outs, axes=1))
        objective = relative_entropy_objective(channel, sigma)

        # Move each support state uphill against the frozen average output
        # and adopt the moved support only when the re-equalized value
        # improves. Witness admission alone can limit-cycle: the search
        # returns a slightly shifted copy of an existing member, weight
        # oscillates between the twins, and the gap stalls; repositioning
        # the members themselves breaks the cycle.
        moved = [maximize_over_pure_states(objective, dim, restarts=0,
                                           extra_starts=[s],
                                           max_iter=200).state
                 for s in states]
        m_outs = np.stack([output_of(s) for s in moved])
        m_owns = np.array([own_entropy_term(o) for o in m_outs])
        m_probs, m_chi, m_divs = _equalize_weights(
            probs.copy(), m_outs, m_owns, max(inner_tol, 1e-9),
            max_rounds=inner_iters)
        m_probs, m_chi, m_divs = _polish_weights(m_probs, m_outs, m_owns,
                                                 inner_tol)
        if m_chi > chi:
            states, outs, owns = moved, m_outs, m_owns
            probs, chi, divs = m_probs, m_chi, m_divs
            sigma = hermitize(np.tensordot(probs, outs, axes=1))
            objective = relative_entropy_objective(channel, sigma)

        thin = np.linalg.eigh(sigma)[1][:, 0]
        # Mid-run witness searches only need to find some improving state;
        # start them from the heaviest support members. The final
        # certificate below re-checks from every member before convergence
        # is declared.
        heavy = np.argsort(probs)[::-1][:8]
        starts = [states[i] for i in heavy]
        if thin.size == dim:
            starts.append(thin)
        sup = maximize_over_pure_states(objective, dim, restarts=sup_restarts,
                                        seed=seeds[outer],
                                        extra_starts=starts, max_iter=600)
        gap = sup.value - chi
        if gap < cert_tol:
            final = maximize_over_pure_states(objective, dim,
                                              restarts=final_restarts,
                                              seed=seeds[-1],
                                              extra_starts=list(states) + starts)
            gap = max(gap, final.value - chi)
            if gap < cert_tol:
                converged = True
                break
            sup = final
        # Admit the witness into the support.
        witness = sup.state
        if len(states) >= cap:
            idx = int(np.argmin(probs))
            states.pop(idx)
            mask = np.ones(len(probs), dtype=bool)
            mask[idx] = False
            outs, owns = outs[mask], owns[mask]
            probs = probs[mask] / probs[mask].sum()
        states.append(witness)
        outs = np.concatenate([outs, output_of(witness)[None]])
        owns = np.append(owns, own_entropy_term(outs[-1]))
        probs = np.concatenate([probs * 0.95, [0.05]])

    if not converged:
        # The loop exited right after a witness admission, so the weights
        # are stale; re-equalize and re-certify so the returned ensemble,
        # its value, and the gap describe one consistent state.
        probs, chi, divs = _equalize_weights(probs, outs, owns,
                                             max(inner_tol, 1e-9),
                                             max_rounds=inner_iters)
        probs, chi, divs = _polish_weights(probs, outs, owns, inner_tol)
        keep = probs > 1e-12
        if not keep.all() and keep.any():
            states = [s for s, k in zip(states, keep) if k]
            outs = outs[keep]
            owns = owns[keep]
            probs = probs[keep] / probs[keep].sum()
        sigma = hermitize(np.tensordot(probs, outs, axes=1))
        final = maximize_over_pure_states(
            relative_entropy_objective(channel, sigma), dim,
            restarts=final_restarts, seed=seeds[-1],
            extra_starts=list(states))
        gap = final.value - chi
        converged = bool(gap < cert_tol)

    avg_input = hermitize(sum(p * np.outer(s, s.conj())
                              for p, s in zip(probs, states)))
    sigma = hermitize(np.tensordot(probs, outs, axes=1))
    return HolevoResult(chi=chi, probs=probs, states=tuple(states),
                        average_input=DensityMatrix(avg_input),
                        average_output=DensityMatrix(sigma),
                        certificate_gap=float(gap), outer_iterations=outer,
                        converged=converged)


@dataclass(frozen=True)
class CertificateResult:
    value: float
    witness: PureState


def opwsw_certificate(channel, omega, restarts: int = 64, seed: int = 0
                      ) -> CertificateResult:
    """sup over pure rho of S(Psi(rho), Psi(omega)) for a fixed reference.

    At the optimal average input this equals chi*; at any other reference
    it can only be larger (the min-max property). Requires Psi(omega) to
    have full support.
    """
    sigma = hermitize(channel.apply_matrix(np.asarray(omega, dtype=complex)))
    if np.linalg.eigvalsh(sigma)[0] <= SUPPORT_EIG_CUTOFF:
        raise SupportError("channel output of the reference state is rank deficient")
    dim = _channel_dim_in(channel)
    best = maximize_over_pure_states(relative_entropy_objective(channel, sigma),
                                     dim, restarts=restarts, seed=seed)
    return CertificateResult(value=best.value, witness=PureState(best.state))


# ---------------------------------------------------------------------------
# Inequality checks built on chi*
# ---------------------------------------------------------------------------

def tensor_relative_entropy_bound(dep: DepolarizingChannel, psi: Channel,
                                  tau12: BipartiteState,
                                  psi_result: HolevoResult | None = None,
                                  tolerance: float = 1e-6,
                                  seed: int = 0) -> InequalityCheck:
    """S((Delta (x) Psi) tau12, (I/d) (x) Psi(omega*)) <= chi*(Delta) + chi*(Psi).

    omega* and chi*(Psi) come from the Holevo optimizer (passed in to avoid
    recomputation across sweeps); chi*(Delta) is closed form.
    """
    if psi_result is None:
        psi_result = holevo_quantity(psi, seed=seed)
    d = dep.dim
    joint = tensor_channel(dep.kraus_channel(), _as_kraus(psi))
    out = hermitize(joint.apply_matrix(np.asarray(tau12, dtype=complex)))
    reference = np.kron(np.eye(d) / d, np.asarray(psi_result.average_output))
    lhs = relative_entropy(out, reference)
    rhs = dep.chi_star() + psi_result.chi
    return InequalityCheck(lhs=lhs, rhs=rhs, tolerance=tolerance)


@dataclass(frozen=True)
class EntropyLowerBoundCheck:
    lhs: float
    rhs: float
    tolerance: float
    x_values: np.ndarray
    block_sum_error: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - self.tolerance

    @property
    def x_uniform(self) -> bool:
        d = self.x_values.size
        return bool(np.max(np.abs(self.x_values - 1.0 / d)) < 1e-10)


def entropy_lower_bound_check(ph: PhaseDampingChannel, psi: Channel,
                              tau12: BipartiteState,
                              tolerance: float = 1e-8) -> EntropyLowerBoundCheck:
    """S((Phi (x) Psi) tau12) >= -chi*(Delta_lam) + ln d
    + (1/d) sum_i S(Psi(d tau2_i)).

    Preconditions: Phi uniform, and the first reduction of tau12 diagonal
    (rotate with diagonalize_first_factor first). Under those, each
    conditional block tau2_i carries trace exactly 1/d, which the returned
    x_values witness.
    """
    if not ph.is_uniform():
        raise InvalidStateError("phase-damping channel must be uniform")
    d, dp = tau12.dim1, tau12.dim2
    if ph.dim != d:
        raise InvalidStateError(f"channel dim {ph.dim} != first factor dim {d}")
    from .core import ptrace_matrix
    mat = np.asarray(tau12, dtype=complex)
    tau1 = ptrace_matrix(mat, d, dp, keep=1)
    off = tau1 - np.diag(np.diagonal(tau1))
    if np.max(np.abs(off)) > 1e-10:
        raise InvalidStateError("first reduction must be diagonal; rotate first")

    blocks = rho2_blocks(ph.basis, tau12)
    x_values = np.array([float(np.real(np.trace(b))) for b in blocks])
    tau2 = ptrace_matrix(mat, d, dp, keep=2)
    block_sum_error = float(np.max(np.abs(sum(blocks) - tau2)))

    joint = tensor_channel(ph.kraus_channel(), _as_kraus(psi))
    lhs = von_neumann_entropy(hermitize(joint.apply_matrix(mat)))

    chi_delta = DepolarizingChannel.unchecked(d, ph.lam).chi_star()
    branch = sum(von_neumann_entropy(hermitize(psi.apply_matrix(d * b)))
                 for b in blocks) / d
    rhs = -chi_delta + math.log(d) + branch
    return EntropyLowerBoundCheck(lhs=lhs, rhs=rhs, tolerance=tolerance,
                                  x_values=x_values,
                                  block_sum_error=block_sum_error)


@dataclass(frozen=True)
class AdditivityCheck:
    chi_product: float
    chi_delta: float
    chi_psi: float
    tolerance: float
    converged: bool

    @property
    def chi_sum(self) -> float:
        return self.chi_delta + self.chi_psi

    @property
    def gap(self) -> float:
        return self.chi_product - self.chi_sum

    @property
    def holds(self) -> bool:
        return abs(self.gap) <= self.tolerance


def chi_additivity_check(dep: DepolarizingChannel, psi: Channel,
                         seed: int = 0, tolerance: float = 1e-4,
                         factor_tol: float = 1e-7,
                         tensor_tol: float = 1e-6,
                         max_outer: int = 300) -> AdditivityCheck:
    """chi*(Delta (x) Psi) against chi*(Delta) + chi*(Psi), all three from
    the numeric optimizer."""
    if dep.dim * _channel_dim_in(psi) > 12:
        raise ValueError("tensor dimension above 12 is outside optimizer scope")
    delta_result = holevo_quantity(dep, seed=seed, cert_tol=factor_tol)
    psi_result = holevo_quantity(psi, seed=seed + 1, cert_tol=factor_tol)
    product = tensor_channel(dep.kraus_channel(), _as_kraus(psi))
    product_result = holevo_quantity(product, seed=seed + 2,
                                     cert_tol=tensor_tol, max_outer=max_outer)
    converged = (delta_result.converged and psi_result.converged
                 and product_result.converged)
    return AdditivityCheck(chi_product=product_result.chi,
                           chi_delta=delta_result.chi,
                           chi_psi=psi_result.chi,
                           tolerance=tolerance, converged=converged)
