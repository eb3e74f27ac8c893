"""Command-line front end.

Four subcommands over a shared configuration (dimensions, lambda grid,
p grid, trial counts, root seed):

  * measures   - closed-form noise measures of the depolarizing channel
  * decompose  - phase-damper decompositions and their identity checks
  * verify     - the randomized inequality suite
  * capacity   - the capacity chain, closed form vs two numeric routes

Reports are emitted as JSON or CSV; same config and seed give byte-identical
output apart from the timestamp field. Exit codes: 0 all checks passed,
1 at least one check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .bounds import (
    lieb_thirring_check,
    local_unitary_invariance_check,
    max_output_p_norm,
    multiplicativity_check,
    tensor_output_norm_bound,
)
from .capacity import (
    Ensemble,
    Povm,
    chi_additivity_check,
    holevo_quantity,
    shannon_capacity_fixed,
    tensor_relative_entropy_bound,
    transition_matrix,
)
from .core import (
    BipartiteState,
    Channel,
    hermitize,
    random_bipartite_state,
    random_channel,
    random_unitary,
    relative_entropy,
    schatten_p_norm,
    spawn_rngs,
    tensor_channel,
)
from .decomposition import (
    diophantine_solutions,
    full_decomposition,
    omega_split_check,
    phase_average_check,
)
from .depolarizing import DepolarizingChannel, lambda_min, min_choi_eig
from .phase_damping import PhaseDampingChannel, damping_lambda_min
from .report import (
    CheckRecord,
    ConfigError,
    Report,
    RunConfig,
    child_seed,
    deserialize_matrix,
    resolve_out_path,
    serialize_matrix,
)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

def cmd_measures(config: RunConfig) -> Report:
    """Tabulate S_min, nu_p over the p grid, and chi_star per (d, lambda)."""
    records = []
    tol = config.tolerance("measures_consistency")
    for d in config.dims:
        for lam in config.lambdas:
            ch = DepolarizingChannel.unchecked(d, lam)
            choi_eig = min_choi_eig(d, lam)
            cp = lambda_min(d) - 1e-12 <= lam <= 1.0 + 1e-12
            spectrum_ok = bool(np.all(ch.pure_output_spectrum() >= 0.0))
            s_min = ch.s_min() if spectrum_ok else math.nan
            chi = ch.chi_star() if spectrum_ok else math.nan
            gap = abs(chi - (math.log(d) - s_min)) if spectrum_ok else math.nan
            records.append(CheckRecord(
                "measures-consistency",
                inputs={"d": d, "lam": lam},
                values={"s_min": s_min, "chi_star": chi,
                        "consistency_gap": gap, "min_choi_eig": choi_eig,
                        "cp": cp},
                slack=(tol - gap) if spectrum_ok else None,
                passed=spectrum_ok and gap <= tol))
            for p in config.p_grid:
                nu = ch.nu_p(p) if spectrum_ok else math.nan
                records.append(CheckRecord(
                    "measures-closed-form",
                    inputs={"d": d, "lam": lam, "p": p},
                    values={"s_min": s_min, "nu_p": nu, "chi_star": chi,
                            "min_choi_eig": choi_eig, "cp": cp},
                    passed=spectrum_ok and math.isfinite(nu)))
    return Report("measures", config, records)


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------

def cmd_decompose(config: RunConfig) -> Report:
    """Build the phase-damper decomposition and check its structure.

    Per (d, lambda): reconstruction error, weight normalization,
    uniform-damper count, and the phase-average and omega-split
    identities behind the construction.
    """
    records = []
    rtol = config.tolerance("reconstruction")
    itol = config.tolerance("identity_checks")
    for d in config.dims:
        census = diophantine_solutions(d)
        records.append(CheckRecord(
            "diophantine-census",
            inputs={"d": d},
            values={"count": census.count,
                    "expected": census.expected_count,
                    "cross_branch": census.cross_branch_count},
            passed=(census.count == census.expected_count
                    and census.cross_branch_count == 0)))
        for lam in config.lambdas:
            try:
                deco = full_decomposition(d, lam)
            except ValueError as exc:
                records.append(CheckRecord(
                    "decomposition-reconstruction",
                    inputs={"d": d, "lam": lam},
                    values={"error": str(exc)},
                    passed=False))
                continue
            err = deco.reconstruction_error()
            expected_terms = 2 * d * d * (d + 1)
            convex_required = 0.0 <= lam <= 1.0
            uniform = deco.all_channels_uniform()
            ok = (err <= rtol
                  and abs(deco.weight_sum - 1.0) <= 1e-12
                  and uniform
                  and len(deco) == expected_terms
                  and (deco.is_convex or not convex_required))
            records.append(CheckRecord(
                "decomposition-reconstruction",
                inputs={"d": d, "lam": lam},
                values={"n_terms": len(deco),
                        "expected_terms": expected_terms,
                        "weight_sum": deco.weight_sum,
                        "reconstruction_error": err,
                        "convex": deco.is_convex,
                        "signed": not deco.is_convex,
                        "all_uniform": uniform},
                slack=rtol - err,
                passed=ok))
            split = omega_split_check(d, lam)
            records.append(CheckRecord(
                "omega-split",
                inputs={"d": d, "lam": lam},
                values={"distance": split.distance,
                        "weights": list(split.weights)},
                slack=itol - split.distance,
                passed=split.distance <= itol))
            avg = phase_average_check(d, lam)
            records.append(CheckRecord(
                "phase-average",
                inputs={"d": d, "lam": lam},
                values={"distance": avg.distance, "n_terms": avg.n_terms},
                slack=itol - avg.distance,
                passed=avg.distance <= itol))
    return Report("decompose", config, records)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _random_psd(dim: int, rng) -> np.ndarray:
    g = (rng.standard_normal((dim, dim))
         + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    return g @ g.conj().T


def _dep_ok(d: int, lam: float) -> bool:
    return lambda_min(d) - 1e-12 <= lam <= 1.0 + 1e-12


def cmd_verify(config: RunConfig) -> Report:
    """Run the randomized inequality suite over the configured grid.

    Families: the trace inequality on random matrix pairs, the tensor
    output-norm bound, unitary invariance of the output norm, norm
    multiplicativity under tensoring, the relative-entropy tensor bound
    with its saturating input, chi additivity for qubit factors, and
    the complete-positivity witness.
    """
    records = []
    root = config.seed
    trials = config.trials
    # Families built on a valid depolarizing channel run only for lambda
    # inside the admissible range of that dimension; out-of-range values
    # (reachable with the unchecked flag) still get their CP witness row.
    any_live = any(_dep_ok(d, lam)
                   for d in config.dims for lam in config.lambdas)

    for i_d, d in enumerate(config.dims):
        for i_l, lam in enumerate(config.lambdas):
            eig = min_choi_eig(d, lam)
            cp = _dep_ok(d, lam)
            records.append(CheckRecord(
                "cp-range-witness",
                inputs={"d": d, "lam": lam},
                values={"min_choi_eig": eig, "cp_expected": cp},
                passed=bool(eig >= -1e-10 if cp else eig < -1e-12)))

    lt_tol = config.tolerance("lieb_thirring")
    for i_d, d in enumerate(config.dims):
        for i_p, p in enumerate(config.p_grid):
            seed = child_seed(root, 1, i_d, i_p)
            min_slack, worst = math.inf, None
            for rng in spawn_rngs(seed, trials):
                a, b = _random_psd(d, rng), _random_psd(d, rng)
                chk = lieb_thirring_check(a, b, p)
                if chk.slack < min_slack:
                    min_slack, worst = chk.slack, (a, b)
            passed = min_slack >= -lt_tol
            witness = None if passed else {
                "check": "lieb-thirring", "inputs": {"dim": d, "p": p},
                "seed": seed,
                "matrices": {"a": serialize_matrix(worst[0]),
                             "b": serialize_matrix(worst[1])},
                "scalars": {"tolerance": lt_tol}}
            records.append(CheckRecord(
                "lieb-thirring",
                inputs={"dim": d, "p": p},
                values={"min_slack": min_slack, "trials": trials},
                slack=min_slack, passed=passed, seed=seed, witness=witness))

    # One random reference channel per second-factor dimension, reused by
    # the invariance, multiplicativity, and relative-entropy families.
    psis = {dp: random_channel(dp, dp, 2, seed=child_seed(root, 2, i))
            for i, dp in enumerate(config.dims)}

    nb_tol = config.tolerance("norm_bound")
    for i_d, d in enumerate(config.dims):
        for i_dp, dp in enumerate(config.dims):
            for i_l, lam in enumerate(config.lambdas):
                if not damping_lambda_min(d) - 1e-12 <= lam <= 1.0 + 1e-12:
                    continue
                ph = PhaseDampingChannel.unchecked(d, lam)
                for i_p, p in enumerate(config.p_grid):
                    seed = child_seed(root, 3, i_d, i_dp, i_l, i_p)
                    min_slack, worst = math.inf, None
                    for rng in spawn_rngs(seed, trials):
                        rho12 = random_bipartite_state(d, dp, seed=rng)
                        chk = tensor_output_norm_bound(ph, rho12, p)
                        if chk.slack < min_slack:
                            min_slack, worst = chk.slack, rho12
                    passed = min_slack >= -nb_tol
                    witness = None if passed else {
                        "check": "tensor-output-norm-bound",
                        "inputs": {"d": d, "dp": dp, "lam": lam, "p": p},
                        "seed": seed,
                        "matrices": {"rho12": serialize_matrix(np.asarray(worst))},
                        "scalars": {"tolerance": nb_tol}}
                    records.append(CheckRecord(
                        "tensor-output-norm-bound",
                        inputs={"d": d, "dp": dp, "lam": lam, "p": p},
                        values={"min_slack": min_slack, "trials": trials},
                        slack=min_slack, passed=passed, seed=seed,
                        witness=witness))

    inv_tol = config.tolerance("invariance")
    n_unitaries = min(trials, 20)
    for i_d, d in enumerate(config.dims):
        for i_dp, dp in enumerate(config.dims):
            psi = psis[dp]
            for i_l, lam in enumerate(config.lambdas):
                if not _dep_ok(d, lam):
                    continue
                dep = DepolarizingChannel(d, lam)
                for i_p, p in enumerate(config.p_grid):
                    seed = child_seed(root, 4, i_d, i_dp, i_l, i_p)
                    max_dev, worst = 0.0, None
                    for rng in spawn_rngs(seed, n_unitaries):
                        tau = random_bipartite_state(d, dp, seed=rng)
                        u = random_unitary(d, seed=rng)
                        chk = local_unitary_invariance_check(dep, psi, tau, u, p)
                        if abs(chk.difference) > max_dev:
                            max_dev, worst = abs(chk.difference), (tau, u)
                    passed = max_dev <= inv_tol
                    witness = None if passed else {
                        "check": "local-unitary-invariance",
                        "inputs": {"d": d, "dp": dp, "lam": lam, "p": p},
                        "seed": seed,
                        "matrices": {
                            "tau12": serialize_matrix(np.asarray(worst[0])),
                            "u": serialize_matrix(worst[1]),
                            "psi_kraus": [serialize_matrix(k)
                                          for k in psi.kraus_ops]},
                        "scalars": {"tolerance": inv_tol}}
                    records.append(CheckRecord(
                        "local-unitary-invariance",
                        inputs={"d": d, "dp": dp, "lam": lam, "p": p},
                        values={"max_deviation": max_dev,
                                "trials": n_unitaries},
                        slack=inv_tol - max_dev, passed=passed, seed=seed,
                        witness=witness))

    mult_tol = config.tolerance("multiplicativity")
    sat_tol = config.tolerance("product_saturation")
    psi_norms = {}
    if any_live:
        for i_dp, dp in enumerate(config.dims):
            for i_p, p in enumerate(config.p_grid):
                psi_norms[dp, p] = max_output_p_norm(
                    psis[dp], p, restarts=32,
                    seed=child_seed(root, 5, i_dp, i_p))
    for i_d, d in enumerate(config.dims):
        for i_dp, dp in enumerate(config.dims):
            psi = psis[dp]
            for i_l, lam in enumerate(config.lambdas):
                if not _dep_ok(d, lam):
                    continue
                dep = DepolarizingChannel(d, lam)
                for i_p, p in enumerate(config.p_grid):
                    seed = child_seed(root, 6, i_d, i_dp, i_l, i_p)
                    chk = multiplicativity_check(
                        dep, psi, p, trials=trials, seed=seed,
                        tolerance=mult_tol, product_tolerance=sat_tol,
                        psi_measure=psi_norms[dp, p])
                    passed = chk.holds and chk.product_attains
                    witness = None if passed else {
                        "check": "nu-p-multiplicativity",
                        "inputs": {"d": d, "dp": dp, "lam": lam, "p": p},
                        "seed": seed,
                        "matrices": {
                            "tau12": serialize_matrix(chk.worst_input),
                            "psi_kraus": [serialize_matrix(k)
                                          for k in psi.kraus_ops]},
                        "scalars": {"bound": chk.bound,
                                    "tolerance": mult_tol}}
                    records.append(CheckRecord(
                        "nu-p-multiplicativity",
                        inputs={"d": d, "dp": dp, "lam": lam, "p": p},
                        values={"max_norm": chk.max_norm, "bound": chk.bound,
                                "product_norm": chk.product_norm,
                                "saturation_gap": chk.product_norm - chk.bound,
                                "trials": trials},
                        slack=chk.bound + mult_tol - chk.max_norm,
                        passed=passed, seed=seed, witness=witness))

    re_tol = config.tolerance("relent_bound")
    re_sat_tol = config.tolerance("relent_saturation")
    holevo_cache, witness_cache = {}, {}
    if any_live:
        for i_dp, dp in enumerate(config.dims):
            res = holevo_quantity(psis[dp], seed=child_seed(root, 7, i_dp))
            holevo_cache[dp] = res
            # Saturating second factor: the heaviest support state of the
            # optimal ensemble, whose divergence from the average output
            # equals chi* by the equalization condition.
            ens = res.ensemble()
            witness_cache[dp] = np.asarray(
                ens.states[int(np.argmax(ens.probs))], dtype=complex)
    for i_d, d in enumerate(config.dims):
        for i_dp, dp in enumerate(config.dims):
            for i_l, lam in enumerate(config.lambdas):
                if not _dep_ok(d, lam):
                    continue
                psi, res = psis[dp], holevo_cache[dp]
                dep = DepolarizingChannel(d, lam)
                seed = child_seed(root, 9, i_d, i_dp, i_l)
                min_slack, worst = math.inf, None
                for rng in spawn_rngs(seed, trials):
                    tau = random_bipartite_state(d, dp, seed=rng)
                    chk = tensor_relative_entropy_bound(dep, psi, tau,
                                                        psi_result=res,
                                                        tolerance=re_tol)
                    if chk.slack < min_slack:
                        min_slack, worst = chk.slack, tau
                p0 = np.zeros((d, d), dtype=complex)
                p0[0, 0] = 1.0
                tau_prod = BipartiteState(d, dp, np.kron(p0, witness_cache[dp]))
                sat = tensor_relative_entropy_bound(dep, psi, tau_prod,
                                                    psi_result=res,
                                                    tolerance=re_tol)
                passed = (min_slack >= -re_tol
                          and abs(sat.slack) <= re_sat_tol)
                witness = None if passed else {
                    "check": "relative-entropy-tensor-bound",
                    "inputs": {"d": d, "dp": dp, "lam": lam},
                    "seed": seed,
                    "matrices": {
                        "tau12": serialize_matrix(np.asarray(worst)),
                        "psi_kraus": [serialize_matrix(k) for k in psi.kraus_ops],
                        "average_output": serialize_matrix(
                            np.asarray(res.average_output))},
                    "scalars": {"rhs": sat.rhs, "tolerance": re_tol}}
                records.append(CheckRecord(
                    "relative-entropy-tensor-bound",
                    inputs={"d": d, "dp": dp, "lam": lam},
                    values={"relent_min_slack": min_slack,
                            "relent_saturation_gap": sat.slack,
                            "trials": trials,
                            "certificate_gap": res.certificate_gap},
                    slack=min_slack, passed=passed, seed=seed,
                    witness=witness))

    add_tol = config.tolerance("additivity")
    live2 = sorted(lam for lam in config.lambdas if _dep_ok(2, lam))
    if 2 in config.dims and live2:
        lam_mid = live2[len(live2) // 2]
        partners = [("depolarizing", DepolarizingChannel(2, 0.7).kraus_channel()),
                    ("random-qubit", psis[2])]
        for i, (label, partner) in enumerate(partners):
            seed = child_seed(root, 10, i)
            chk = chi_additivity_check(DepolarizingChannel(2, lam_mid),
                                       partner, seed=seed,
                                       tolerance=add_tol, tensor_tol=1e-5)
            warning = None if chk.converged else "optimizer did not converge"
            passed = chk.holds and (chk.converged or not config.strict)
            records.append(CheckRecord(
                "chi-additivity",
                inputs={"d": 2, "lam": lam_mid, "partner": label},
                values={"chi_product": chk.chi_product,
                        "chi_delta": chk.chi_delta,
                        "chi_psi": chk.chi_psi,
                        "additivity_gap": chk.gap,
                        "converged": chk.converged},
                slack=add_tol - abs(chk.gap), passed=passed, seed=seed,
                warning=warning))

    return Report("verify", config, records)


# ---------------------------------------------------------------------------
# capacity
# ---------------------------------------------------------------------------

def cmd_capacity(config: RunConfig) -> Report:
    """Cross-check the capacity value along three independent routes.

    Per (d, lambda): the closed-form Holevo value, the Blahut-Arimoto
    capacity of the induced basis-to-basis transition matrix, and the
    ensemble optimizer, with pairwise gaps and a monotonicity scan.
    """
    records = []
    cap_tol = config.tolerance("capacity_chain")
    hol_tol = config.tolerance("holevo_agreement")
    for i_d, d in enumerate(config.dims):
        chain = []
        for i_l, lam in enumerate(sorted(config.lambdas)):
            if not _dep_ok(d, lam):
                records.append(CheckRecord(
                    "capacity-chain",
                    inputs={"d": d, "lam": lam},
                    values={"skipped": True},
                    passed=True,
                    warning="lambda outside the admissible range; skipped"))
                continue
            ch = DepolarizingChannel(d, lam)
            chi = ch.chi_star()
            s_min = ch.s_min()
            ba = shannon_capacity_fixed(
                transition_matrix(ch, Ensemble.uniform_basis(d), Povm.basis(d)))
            prior_dev = float(np.max(np.abs(ba.prior - 1.0 / d)))
            seed = child_seed(config.seed, 11, i_d, i_l)
            numeric = holevo_quantity(ch, seed=seed)
            capacity_gap = ba.capacity - chi
            holevo_gap = numeric.chi - chi
            warning = (None if numeric.converged
                       else "optimizer did not converge")
            passed = (abs(capacity_gap) <= cap_tol
                      and prior_dev <= cap_tol
                      and abs(chi - (math.log(d) - s_min)) <= 1e-12
                      and abs(holevo_gap) <= hol_tol
                      and (numeric.converged or not config.strict))
            chain.append((lam, chi))
            records.append(CheckRecord(
                "capacity-chain",
                inputs={"d": d, "lam": lam},
                values={"chi_closed": chi, "s_min": s_min,
                        "shannon_capacity": ba.capacity,
                        "holevo_chi": numeric.chi,
                        "capacity_gap": capacity_gap,
                        "holevo_gap": holevo_gap,
                        "certificate_gap": numeric.certificate_gap,
                        "prior_deviation": prior_dev,
                        "converged": numeric.converged},
                slack=cap_tol - abs(capacity_gap), passed=passed, seed=seed,
                warning=warning))
        nonneg = [(lam, chi) for lam, chi in chain if lam >= 0.0]
        if len(nonneg) >= 2:
            diffs = [b[1] - a[1] for a, b in zip(nonneg, nonneg[1:])]
            records.append(CheckRecord(
                "capacity-monotone",
                inputs={"d": d},
                values={"min_increment": min(diffs),
                        "grid_points": len(nonneg)},
                passed=min(diffs) >= -1e-12))
    return Report("capacity", config, records)


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def run_replay(path: str) -> tuple[dict, bool]:
    """Re-run a single serialized failure witness; returns (record, passed)."""
    with open(path) as fh:
        data = json.load(fh)
    name = data["check"]
    inputs = data["inputs"]
    mats = {k: (deserialize_matrix(v) if isinstance(v, dict)
                else [deserialize_matrix(x) for x in v])
            for k, v in data.get("matrices", {}).items()}
    scalars = data.get("scalars", {})

    if name == "lieb-thirring":
        chk = lieb_thirring_check(mats["a"], mats["b"], inputs["p"])
        values = {"lhs": chk.lhs, "rhs": chk.rhs}
        slack, passed = chk.slack, chk.slack >= -scalars["tolerance"]
    elif name == "tensor-output-norm-bound":
        ph = PhaseDampingChannel.unchecked(inputs["d"], inputs["lam"])
        rho12 = BipartiteState(inputs["d"], inputs["dp"], mats["rho12"])
        chk = tensor_output_norm_bound(ph, rho12, inputs["p"])
        values = {"lhs": chk.lhs, "rhs": chk.rhs}
        slack, passed = chk.slack, chk.slack >= -scalars["tolerance"]
    elif name == "local-unitary-invariance":
        dep = DepolarizingChannel(inputs["d"], inputs["lam"])
        psi = Channel(mats["psi_kraus"])
        tau = BipartiteState(inputs["d"], inputs["dp"], mats["tau12"])
        chk = local_unitary_invariance_check(dep, psi, tau, mats["u"],
                                             inputs["p"])
        values = {"value_a": chk.value_a, "value_b": chk.value_b}
        slack = scalars["tolerance"] - abs(chk.difference)
        passed = abs(chk.difference) <= scalars["tolerance"]
    elif name == "nu-p-multiplicativity":
        dep = DepolarizingChannel(inputs["d"], inputs["lam"])
        psi = Channel(mats["psi_kraus"])
        joint = tensor_channel(dep.kraus_channel(), psi)
        norm = schatten_p_norm(hermitize(joint.apply_matrix(mats["tau12"])),
                               inputs["p"])
        values = {"norm": norm, "bound": scalars["bound"]}
        slack = scalars["bound"] + scalars["tolerance"] - norm
        passed = slack >= 0.0
    elif name == "relative-entropy-tensor-bound":
        dep = DepolarizingChannel(inputs["d"], inputs["lam"])
        psi = Channel(mats["psi_kraus"])
        joint = tensor_channel(dep.kraus_channel(), psi)
        out = hermitize(joint.apply_matrix(mats["tau12"]))
        sigma = hermitize(mats["average_output"])
        reference = np.kron(np.eye(inputs["d"]) / inputs["d"], sigma)
        lhs = relative_entropy(out, reference)
        values = {"lhs": lhs, "rhs": scalars["rhs"]}
        slack = scalars["rhs"] - lhs
        passed = slack >= -scalars["tolerance"]
    else:
        raise ConfigError(f"witness file names unknown check {name!r}")

    record = {
        "tool": "depolcap",
        "version": __version__,
        "command": "replay",
        "check": name,
        "inputs": inputs,
        "seed": data.get("seed"),
        "values": values,
        "slack": slack,
        "passed": passed,
    }
    return record, passed


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

_COMMANDS = {
    "measures": cmd_measures,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "capacity": cmd_capacity,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depolcap",
        description="depolarizing-channel capacity toolkit")
    parser.add_argument("--version", action="version",
                        version=f"depolcap {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dims", type=int, nargs="+", metavar="D",
                        help="dimensions to sweep (2..6)")
    common.add_argument("--lambdas", type=float, nargs="+", metavar="L",
                        help="lambda grid")
    common.add_argument("--p-grid", type=float, nargs="+", dest="p_grid",
                        metavar="P", help="Schatten exponents (>= 1)")
    common.add_argument("--trials", type=int, help="Monte-Carlo trials per cell")
    common.add_argument("--seed", type=int, help="root seed")
    common.add_argument("--out", help="output file (see also DEPOLCAP_OUT_DIR)")
    common.add_argument("--format", choices=["json", "csv"], dest="fmt",
                        help="report format")
    common.add_argument("--bits", action="store_const", const=True,
                        help="display entropy-like values in bits")
    common.add_argument("--strict", action="store_const", const=True,
                        help="treat optimizer warnings as failures")
    common.add_argument("--unchecked-lambda", action="store_const", const=True,
                        dest="unchecked_lambda",
                        help="allow lambda values outside the admissible range")
    common.add_argument("--config", help="JSON config file (same keys as flags)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, parents=[common],
                           help=fn.__doc__.splitlines()[0].strip())
        if name == "verify":
            p.add_argument("--replay", metavar="WITNESS",
                           help="re-run a serialized failure witness file")
    return parser


_CONFIG_KEYS = ("dims", "lambdas", "p_grid", "trials", "seed", "out", "fmt",
                "bits", "strict", "unchecked_lambda", "tolerances")


def _load_config(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        aliases = {"format": "fmt"}
        for key, value in raw.items():
            key = aliases.get(key, key)
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return RunConfig(**merged)


def _emit(report: Report, config: RunConfig) -> None:
    path = resolve_out_path(config.out, report.command, config.fmt)
    text = report.render()
    if path is None:
        sys.stdout.write(text)
    else:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
        summary = report.summary()
        print(f"{report.command}: {summary['passed']}/{summary['total']} "
              f"checks passed -> {path}")
    for line in report.warnings:
        print(f"warning: {line}", file=sys.stderr)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify" and getattr(args, "replay", None):
            record, passed = run_replay(args.replay)
            sys.stdout.write(json.dumps(record, sort_keys=True, indent=2,
                                        allow_nan=False) + "\n")
            return 0 if passed else 1
        config = _load_config(args)
        report = _COMMANDS[args.command](config)
        _emit(report, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
