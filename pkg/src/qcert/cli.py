"""Command-line front end: Chernoff sweeps, certification sweeps, convergence scans.

Each command reads a TOML config, runs the sweep, and writes a CSV plus a
sidecar ``<out>.meta.json`` recording the full configuration, seed and package
version.  Output is byte-identical for identical (config, seed).

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import __version__
from .certify import CertificationConfig, Spec, run_trials
from .channels import (
    ErrorDistribution,
    PhaseGateParams,
    averaged_output_map,
    phase_gate_output_map,
)
from .chernoff import (
    classical_chernoff_phase_gate,
    dephasing_qcb,
    dephasing_qcb_small_eps,
    quantum_chernoff_bound,
)
from .config import (
    CertifyConfig,
    ChernoffConfig,
    ConvergenceConfig,
    load_toml,
    parse_certify,
    parse_chernoff,
    parse_convergence,
)
from .design import UtilityKind
from .exceptions import ConfigError, QcertError

CHERNOFF_HEADER = (
    "bound", "sweep_var", "sweep_value", "n_iterations", "epsilon", "width",
    "xi", "xi_per_iteration", "s_min",
)
CERTIFY_HEADER = ("x_c", "m", "utility", "criterion", "success", "std_error", "trials")
CONVERGENCE_HEADER = (
    "n0", "m", "mean_posterior_mean", "mean_posterior_variance",
    "fit_prefactor", "fit_exponent", "fit_prefactor_slope1",
)


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path: str, header: tuple[str, ...], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(v) for v in row) for row in rows)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_meta(path: str, command: str, cfg, seed: int | None, trials: int | None) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "trials": trials,
        "config": dataclasses.asdict(cfg),
    }
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# chernoff
# ---------------------------------------------------------------------------

def chernoff_rows(cfg: ChernoffConfig) -> list[tuple]:
    rows: list[tuple] = []
    sweep_values = cfg.sweep.values()
    eps_series = cfg.epsilon if cfg.epsilon else [None]

    for value in sweep_values:
        for n in cfg.n_iterations:
            for eps in eps_series:
                theta = value if cfg.sweep_var == "theta" else cfg.theta
                epsilon = value if cfg.sweep_var == "epsilon" else eps
                if cfg.bound == "phase_gate":
                    ideal = phase_gate_output_map(PhaseGateParams(theta))
                    faulty = phase_gate_output_map(PhaseGateParams(theta + epsilon))
                    res = quantum_chernoff_bound(
                        faulty(cfg.alpha, cfg.beta, n),
                        ideal(cfg.alpha, cfg.beta, n),
                        n_iterations=n,
                    )
                    row_eps, row_w, s_min = epsilon, None, res.s_min
                elif cfg.bound == "random_error":
                    width = value if cfg.sweep_var == "width" else cfg.width
                    alpha = value if cfg.sweep_var == "alpha" else cfg.alpha
                    dist = ErrorDistribution(
                        "uniform", width=width, quadrature_nodes=cfg.quadrature_nodes
                    )
                    ideal = phase_gate_output_map(PhaseGateParams(theta))
                    faulty = averaged_output_map(PhaseGateParams(theta), dist)
                    res = quantum_chernoff_bound(
                        faulty(alpha, cfg.beta, n),
                        ideal(alpha, cfg.beta, n),
                        n_iterations=n,
                    )
                    row_eps, row_w, s_min = None, width, res.s_min
                elif cfg.bound == "dephasing":
                    res = dephasing_qcb(value, epsilon, n)
                    row_eps, row_w, s_min = epsilon, None, res.s_min
                elif cfg.bound == "dephasing_small_eps":
                    per_iter = dephasing_qcb_small_eps(value, epsilon, n)
                    rows.append(
                        (cfg.bound, cfg.sweep_var, value, n, epsilon, None,
                         per_iter * n, per_iter, None)
                    )
                    continue
                else:  # classical_phase_gate
                    res = classical_chernoff_phase_gate(theta, epsilon, n)
                    row_eps, row_w, s_min = epsilon, None, res.s_min
                rows.append(
                    (cfg.bound, cfg.sweep_var, value, n, row_eps, row_w,
                     res.xi, res.per_iteration, s_min)
                )
    return rows


def cmd_chernoff(cfg: ChernoffConfig, out: str) -> None:
    write_csv(out, CHERNOFF_HEADER, chernoff_rows(cfg))


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

def _certification_config(
    cfg: CertifyConfig, center: float, m: int, utility: str, criterion: str
) -> CertificationConfig:
    return CertificationConfig(
        model=cfg.model,
        x_true=cfg.x_true,
        spec=Spec(center, cfg.half_width),
        prior_support=(cfg.prior_low, cfg.prior_high),
        n_particles=cfg.particles,
        n_actions=cfg.n0,
        batch_length=m,
        utility=UtilityKind(utility),
        criterion=criterion,
        dephasing_omega=cfg.omega,
        dephasing_t=cfg.t,
    )


def certify_rows(cfg: CertifyConfig, seed: int, trials: int, threads: int = 1) -> list[tuple]:
    combos = [
        (center, m, utility, criterion)
        for center in cfg.centers
        for m in cfg.m
        for utility in cfg.utilities
        for criterion in cfg.criteria
    ]
    row_seeds = np.random.SeedSequence(seed).spawn(len(combos))
    rows = []
    for (center, m, utility, criterion), row_seed in zip(combos, row_seeds):
        run_cfg = _certification_config(cfg, center, m, utility, criterion)
        records = run_trials(run_cfg, trials, row_seed, max_workers=threads)
        p = sum(r.success for r in records) / trials
        se = math.sqrt(p * (1.0 - p) / trials)
        rows.append((center, m, utility, criterion, p, se, trials))
    return rows


def cmd_certify(cfg: CertifyConfig, out: str, seed: int, trials: int, threads: int) -> None:
    write_csv(out, CERTIFY_HEADER, certify_rows(cfg, seed, trials, threads))


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

def power_law_fit(n0: np.ndarray, variance: np.ndarray, decades: float):
    """Least squares on log(var) vs log(n0) over the top ``decades`` of n0.

    Returns ``(prefactor, exponent, prefactor_slope1)`` where the last is the
    prefactor of a fit with the exponent pinned to -1.
    """
    mask = n0 >= n0.max() / 10.0**decades
    if mask.sum() < 2:
        mask = np.ones_like(n0, dtype=bool)
    logn = np.log(n0[mask].astype(float))
    logv = np.log(variance[mask])
    exponent, intercept = np.polyfit(logn, logv, 1)
    prefactor_slope1 = float(np.exp(np.mean(logv + logn)))
    return float(np.exp(intercept)), float(exponent), prefactor_slope1


def convergence_rows(
    cfg: ConvergenceConfig, seed: int, trials: int, threads: int = 1
) -> list[tuple]:
    rows = []
    m_seeds = np.random.SeedSequence(seed).spawn(len(cfg.m))
    for m, m_seed in zip(cfg.m, m_seeds):
        # round each requested budget to a whole number of m-batches
        n0_eff = sorted({m * max(1, round(n0 / m)) for n0 in cfg.n0_values})
        run_cfg = CertificationConfig(
            model=cfg.model,
            x_true=cfg.x_true,
            spec=Spec(cfg.x_true, 0.5 * (cfg.prior_high - cfg.prior_low)),
            prior_support=(cfg.prior_low, cfg.prior_high),
            n_particles=cfg.particles,
            n_actions=max(n0_eff),
            batch_length=m,
            utility=UtilityKind(cfg.utility),
        )
        records = run_trials(
            run_cfg, trials, m_seed, record_history=True, max_workers=threads
        )
        complete = [r for r in records if len(r.variance_history) == run_cfg.n_rounds]
        if not complete:
            raise QcertError("all convergence trials aborted on impoverishment")
        mean_hist = np.mean([r.mean_history for r in complete], axis=0)
        var_hist = np.mean([r.variance_history for r in complete], axis=0)
        n0_arr = np.array(n0_eff)
        means = np.array([mean_hist[n // m - 1] for n in n0_eff])
        variances = np.array([var_hist[n // m - 1] for n in n0_eff])
        prefactor, exponent, prefactor_slope1 = power_law_fit(
            n0_arr, variances, cfg.fit_decades
        )
        for n0, mean, var in zip(n0_eff, means, variances):
            rows.append((n0, m, float(mean), float(var), prefactor, exponent,
                         prefactor_slope1))
    return rows


def cmd_convergence(cfg: ConvergenceConfig, out: str, seed: int, trials: int, threads: int) -> None:
    write_csv(out, CONVERGENCE_HEADER, convergence_rows(cfg, seed, trials, threads))


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcert",
        description="Chernoff bounds and adaptive Bayesian certification of qubit channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("chernoff", "sweep a Chernoff bound and write (sweep value, N, xi, xi/N, s_min) rows"),
        ("certify", "sweep certification success probability over spec centers and batch lengths"),
        ("convergence", "posterior mean/variance vs action budget, with power-law fit"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML configuration file")
        p.add_argument("--out", help="output CSV path (overrides config)")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        p.add_argument("--trials", type=int, help="trial count (overrides config)")
        p.add_argument("--threads", type=int, default=1, help="worker processes for trials")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = load_toml(args.config)
        if args.command == "chernoff":
            cfg = parse_chernoff(doc)
            out = args.out or cfg.out
            if not out:
                raise ConfigError("no output path: pass --out or set 'out' in the config")
            cmd_chernoff(cfg, out)
            write_meta(out, "chernoff", cfg, None, None)
        elif args.command == "certify":
            cfg = parse_certify(doc)
            out = args.out or cfg.out
            if not out:
                raise ConfigError("no output path: pass --out or set 'out' in the config")
            seed = args.seed if args.seed is not None else cfg.seed
            trials = args.trials if args.trials is not None else cfg.trials
            if trials < 1:
                raise ConfigError(f"trials must be >= 1, got {trials}")
            cmd_certify(cfg, out, seed, trials, args.threads)
            write_meta(out, "certify", cfg, seed, trials)
        else:
            cfg = parse_convergence(doc)
            out = args.out or cfg.out
            if not out:
                raise ConfigError("no output path: pass --out or set 'out' in the config")
            seed = args.seed if args.seed is not None else cfg.seed
            trials = args.trials if args.trials is not None else cfg.trials
            if trials < 1:
                raise ConfigError(f"trials must be >= 1, got {trials}")
            cmd_convergence(cfg, out, seed, trials, args.threads)
            write_meta(out, "convergence", cfg, seed, trials)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except QcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
