"""Reproducible experiment runner.

Subcommands: analyze, simulate, optimize, compare-mac, validate.  Configs are
JSON (a file path or a named preset); every run embeds the resolved config
and seed as `#` comment lines at the top of the CSV so results are
self-describing.  All dB fields are converted to linear exactly once here,
at parse time; the computational modules never see dB.

Exit codes: 0 ok, 1 validation failure, 2 config error, 3 numerical error,
4 solver infeasible / no root.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys

import numpy as np

from . import __version__, analysis, mcsim, validate as validate_mod
from .errors import (
    ConfigError,
    DomainError,
    InfeasibleError,
    NoRootError,
    NonConvergenceError,
    NumericalInstabilityError,
    PppMimoError,
)
from .schemes import NetworkParams, SchemeSpec, gamma_params, registry_code

_NET_FIELDS = ("lambda", "p", "alpha", "r_tr", "rho", "beta")


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _from_db(x: float) -> float:
    return 10.0 ** (x / 10.0)


def _axis_values(spec) -> np.ndarray:
    """Resolve an axis spec to linear values.

    Accepts a bare number (linear), {"value": v, "scale": "linear"|"dB"},
    {"values": [...], "scale": ...} or
    {"start", "stop", "points", "scale": "linear"|"log"|"dB"}.
    """
    if isinstance(spec, (int, float)):
        return np.array([float(spec)])
    if not isinstance(spec, dict):
        raise ConfigError(f"bad axis spec: {spec!r}")
    scale = spec.get("scale", "linear")
    if "value" in spec:
        v = float(spec["value"])
        return np.array([_from_db(v) if scale == "dB" else v])
    if "values" in spec:
        vals = np.asarray([float(v) for v in spec["values"]])
        return _from_db(vals) if scale == "dB" else vals
    try:
        start, stop, points = float(spec["start"]), float(spec["stop"]), int(spec["points"])
    except KeyError as exc:
        raise ConfigError(f"axis spec missing {exc}") from exc
    if points < 1:
        raise ConfigError("axis needs at least one point")
    if scale == "linear":
        return np.linspace(start, stop, points)
    if scale == "log":
        return np.geomspace(start, stop, points)
    if scale == "dB":
        return _from_db(np.linspace(start, stop, points))
    raise ConfigError(f"unknown axis scale {scale!r}")


def _net_grid(net_cfg: dict):
    """Cartesian product over the network axes, row order = grid index order."""
    if not isinstance(net_cfg, dict):
        raise ConfigError("'net' must be an object")
    unknown = set(net_cfg) - set(_NET_FIELDS)
    if unknown:
        raise ConfigError(f"unknown net fields: {sorted(unknown)}")
    axes = []
    for name in _NET_FIELDS:
        if name not in net_cfg:
            raise ConfigError(f"net field {name!r} missing")
        axes.append(_axis_values(net_cfg[name]))
    rows = []
    for lam in axes[0]:
        for p in axes[1]:
            for alpha in axes[2]:
                for r_tr in axes[3]:
                    for rho in axes[4]:
                        for beta in axes[5]:
                            rows.append(
                                NetworkParams(
                                    intensity=float(lam), p=float(p), alpha=float(alpha),
                                    r_tr=float(r_tr), rho=float(rho), beta=float(beta),
                                )
                            )
    return rows


def _scheme(cfg: dict) -> SchemeSpec:
    try:
        variant = cfg["variant"]
        n_rx = int(cfg["N"])
        if variant == "ostbc":
            code = registry_code(cfg["code"])
            return SchemeSpec.ostbc(code, n_rx)
        return SchemeSpec(variant, int(cfg["M"]), n_rx)
    except (KeyError, TypeError, DomainError) as exc:
        raise ConfigError(f"bad scheme spec {cfg!r}: {exc}") from exc


def _load_config(arg: str) -> dict:
    if arg in PRESETS:
        return json.loads(json.dumps(PRESETS[arg]))  # deep copy
    try:
        with open(arg) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config {arg!r} is neither a preset nor a readable file") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {arg!r} is not valid JSON: {exc}") from exc


def _worker_count() -> int:
    raw = os.environ.get("PPP_MIMO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"PPP_MIMO_THREADS must be an integer, got {raw!r}")


def _map_ordered(fn, items):
    """Map preserving order; grid points may run on a small thread pool."""
    workers = _worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_csv(path, command, config, seed, header, rows):
    lines = [
        f"# ppp-mimo {__version__} command={command}",
        f"# config={json.dumps(config, sort_keys=True)}",
        f"# seed={seed}",
        ",".join(header),
    ]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _net_columns(net: NetworkParams):
    return [net.intensity, net.p, net.alpha, net.r_tr, net.rho, net.beta]


_NET_HEADER = ["lambda", "p", "alpha", "r_tr", "rho", "beta"]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_analyze(cfg: dict, quick: bool):
    if "table" in cfg:
        return _run_table(int(cfg["table"]))
    schemes = [_scheme(s) for s in cfg.get("schemes", [])]
    if not schemes:
        raise ConfigError("analyze needs a non-empty 'schemes' list")
    nets = _net_grid(cfg["net"])
    epsilons = _axis_values(cfg["epsilon"]) if "epsilon" in cfg else None
    header = ["scheme"] + _NET_HEADER + ["outage", "throughput"]
    if epsilons is not None:
        header += ["epsilon", "tc_small_eps", "tc_exact_zf_full"]
    rows = []
    for spec in schemes:
        glp_cache = {}

        def point(net, spec=spec, glp_cache=glp_cache):
            key = (net.rho, net.r_tr, net.alpha)
            if key not in glp_cache:
                glp_cache[key] = gamma_params(spec, net)
            glp = glp_cache[key]
            f = analysis.outage_cdf(analysis.OutageQuery(glp, net))
            thr = glp.zeta * net.p * net.intensity * (1.0 - f)
            base = [spec.label()] + _net_columns(net) + [f, thr]
            if epsilons is None:
                return [base]
            out = []
            for eps in epsilons:
                tc = analysis.tc_small_eps(analysis.TcQuery(glp, float(eps), net))
                tc_exact = (
                    analysis.tc_exact_zf_full(spec.N, float(eps), net)
                    if spec.variant == "sm-zf" and spec.M == spec.N
                    else math.nan
                )
                out.append(base + [float(eps), tc, tc_exact])
            return out

        for chunk in _map_ordered(point, nets):
            rows.extend(chunk)
    return header, rows


def _run_table(which: int):
    """Reproduce one of the printed validity-threshold tables."""
    if which == 2:
        spec = SchemeSpec.sm_mrc(1, 3)
        header = ["rho_db", "beta_db", "inv_lambda_min"]
        rows = []
        for rho_db in (2.0, 5.0, 10.0, 20.0):
            for beta_db in (1.0, 2.0, 5.0, 10.0, 20.0):
                net = NetworkParams(
                    intensity=1e-3, p=1.0, alpha=2.1, r_tr=5.0,
                    rho=_from_db(rho_db), beta=_from_db(beta_db),
                )
                glp = gamma_params(spec, net)
                lam = analysis.dense_validity_threshold(analysis.OutageQuery(glp, net))
                rows.append([rho_db, beta_db, 1.0 / lam])
        return header, rows
    if which == 3:
        spec = SchemeSpec.sm_mrc(1, 3)
        kind, alpha, densities = "high_beta", 4.0, (100.0, 50.0, 20.0, 12.5, 10.0)
        rhos = (2.0, 5.0, 10.0, 15.0)
    elif which == 4:
        spec = SchemeSpec.sm_mrc(4, 4)
        # the printed header repeats Table III's densities, but the tabulated
        # values correspond to this grid (see the acceptance suite)
        kind, alpha, densities = "low_beta", 3.0, (100.0, 50.0, 20.0, 10.0, 5.0)
        rhos = (10.0, 15.0, 20.0, 25.0, 30.0)
    else:
        raise ConfigError(f"table must be 2, 3 or 4, got {which}")
    header = ["rho_db", "inv_lambda", "beta_boundary_db"]
    rows = []
    for rho_db in rhos:
        for inv_lam in densities:
            net = NetworkParams(
                intensity=1.0 / inv_lam, p=1.0, alpha=alpha, r_tr=5.0,
                rho=_from_db(rho_db), beta=1.0,
            )
            glp = gamma_params(spec, net)
            beta = analysis.asymptotic_validity_threshold(kind, analysis.OutageQuery(glp, net))
            rows.append([rho_db, inv_lam, 10.0 * math.log10(beta)])
    return header, rows


def _sim_config(cfg: dict, seed, quick: bool, row_index: int) -> mcsim.SimConfig:
    sim = dict(cfg.get("sim", {}))
    trials = int(sim.get("trials", 10000))
    if quick:
        trials = min(trials, 2000)
    base_seed = seed if seed is not None else int(sim.get("seed", 0))
    row_seed = int(
        np.random.SeedSequence(entropy=base_seed, spawn_key=(row_index,)).generate_state(
            1, np.uint64
        )[0]
    )
    return mcsim.SimConfig(
        trials=trials,
        seed=row_seed,
        truncation_tol=float(sim.get("truncation_tol", 1e-3)),
        max_radius_override=sim.get("max_radius_override"),
        compensate_far_field=bool(sim.get("compensate_far_field", True)),
    )


def run_simulate(cfg: dict, seed, quick: bool):
    if cfg.get("protocol") == "ca":
        return _run_simulate_ca(cfg, seed, quick)
    schemes = [_scheme(s) for s in cfg.get("schemes", [])]
    if not schemes:
        raise ConfigError("simulate needs a non-empty 'schemes' list")
    method = cfg.get("sim", {}).get("method", "fast")
    nets = _net_grid(cfg["net"])
    header = (
        ["scheme"] + _NET_HEADER
        + ["outage_analytic", "outage_sim", "std_error", "trials", "seed"]
    )
    jobs = [
        (spec, net, i * len(nets) + j)
        for i, spec in enumerate(schemes)
        for j, net in enumerate(nets)
    ]

    def point(job):
        spec, net, idx = job
        sim_cfg = _sim_config(cfg, seed, quick, idx)
        glp = gamma_params(spec, net)
        f = analysis.outage_cdf(analysis.OutageQuery(glp, net))
        est = mcsim.simulate_outage(spec, net, sim_cfg, method=method)
        return (
            [spec.label()] + _net_columns(net)
            + [f, est.value, est.std_error, est.trials, est.seed]
        )

    return header, _map_ordered(point, jobs)


def _run_simulate_ca(cfg: dict, seed, quick: bool):
    nets = _net_grid(cfg["net"])
    guards = _axis_values(cfg.get("r_gz", {"start": 0.5, "stop": 8.0, "points": 10, "scale": "log"}))
    header = _NET_HEADER + [
        "r_gz", "bound", "bound_dense", "throughput_sim", "std_error", "trials", "seed",
    ]
    jobs = [
        (net, float(r), i * len(guards) + j)
        for i, net in enumerate(nets)
        for j, r in enumerate(guards)
    ]

    def point(job):
        net, r_gz, idx = job
        sim_cfg = _sim_config(cfg, seed, quick, idx)
        bound = analysis.ca_throughput_bound(net.intensity, r_gz, net)
        dense = analysis.ca_throughput_bound(math.inf, r_gz, net)
        est = mcsim.simulate_ca(net.intensity, r_gz, net, sim_cfg)
        return _net_columns(net) + [
            r_gz, bound, dense, est.value, est.std_error, est.trials, est.seed,
        ]

    return header, _map_ordered(point, jobs)


def run_optimize(cfg: dict, quick: bool):
    task = cfg.get("task")
    nets = _net_grid(cfg["net"])
    if task == "lambda_opt_zf":
        n_rx = int(cfg["N"])
        header = _NET_HEADER + ["lambda_opt", "throughput_at_opt"]
        rows = []
        for net in nets:
            lam = analysis.lambda_opt_zf(n_rx, net)
            thr = analysis.throughput(SchemeSpec.sm_zf(n_rx, n_rx), net.replace(intensity=lam))
            rows.append(_net_columns(net) + [lam, thr])
        return header, rows
    if task == "n_opt_zf":
        header = _NET_HEADER + ["n_opt", "throughput_at_opt", "throughput_minus", "throughput_plus"]
        rows = []
        for net in nets:
            n_opt = analysis.n_opt_zf(net)

            def thr(n):
                if n < 1:
                    return math.nan
                return analysis.throughput(SchemeSpec.sm_zf(n, n), net)

            rows.append(_net_columns(net) + [n_opt, thr(n_opt), thr(n_opt - 1), thr(n_opt + 1)])
        return header, rows
    if task == "m_opt_lowbeta":
        receiver = cfg.get("receiver", "mrc")
        n_rx = int(cfg["N"])
        header = _NET_HEADER + ["m_opt", "throughput_at_opt", "throughput_minus", "throughput_plus"]
        rows = []
        for net in nets:
            m_opt = analysis.m_opt_lowbeta(receiver, n_rx, net)
            variant = SchemeSpec.sm_mrc if receiver == "mrc" else SchemeSpec.sm_zf

            def thr(m):
                if not 1 <= m <= n_rx:
                    return math.nan
                return analysis.throughput(variant(m, n_rx), net)

            rows.append(_net_columns(net) + [m_opt, thr(m_opt), thr(m_opt - 1), thr(m_opt + 1)])
        return header, rows
    if task == "kappa_star":
        receiver = cfg.get("receiver", "zf")
        n_rx = int(cfg["N"])
        header = _NET_HEADER + ["m_star"]
        return header, [
            _net_columns(net) + [analysis.kappa_star(receiver, net, n_rx)] for net in nets
        ]
    if task == "ca_optimal_guard":
        header = _NET_HEADER + ["r_gz_opt", "bound_at_opt"]
        rows = []
        for net in nets:
            r_star = analysis.ca_optimal_guard(net.intensity, net)
            rows.append(
                _net_columns(net)
                + [r_star, analysis.ca_throughput_bound(net.intensity, r_star, net)]
            )
        return header, rows
    raise ConfigError(f"unknown optimize task {task!r}")


def run_compare_mac(cfg: dict, quick: bool):
    n_list = [int(n) for n in cfg.get("N_list", [2, 3, 4])]
    base = _net_grid(cfg["net"])
    if len(base) != 1:
        raise ConfigError("compare-mac expects scalar net fields plus lambda/p axes")
    net0 = base[0]
    lams = _axis_values(cfg["lambda"])
    probs = _axis_values(cfg["p"])
    header = ["lambda", "p"] + [f"aloha_wins_N{n}" for n in n_list]
    wins = {}
    for n_rx in n_list:
        spec = SchemeSpec.sm_mrc(1, n_rx)
        wins[n_rx] = analysis.aloha_vs_ca_region(spec, lams, probs, net0)
    rows = []
    for i, lam in enumerate(lams):
        for j, p in enumerate(probs):
            rows.append([float(lam), float(p)] + [bool(wins[n][i, j]) for n in n_list])
    return header, rows


def run_validate(quick: bool):
    results = validate_mod.run_validation(quick=quick)
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
        if not ok:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} invariants passed")
    return failed == 0


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _sm_sweep(variant):
    return {
        "schemes": [{"variant": variant, "M": m, "N": 4} for m in (1, 2, 4)],
        "net": {
            "lambda": {"start": 1e-4, "stop": 0.05, "points": 40, "scale": "log"},
            "p": 1.0, "alpha": 3.1, "r_tr": 2.0,
            "rho": {"value": 25, "scale": "dB"},
            "beta": {"values": [-3, 3], "scale": "dB"},
        },
    }


def _ostbc_outage(code, n_rx, lam):
    return {
        "schemes": [{"variant": "ostbc", "code": code, "N": n_rx}],
        "net": {
            "lambda": lam, "p": 1.0, "alpha": 3.5, "r_tr": 5.0,
            "rho": {"value": 10, "scale": "dB"},
            "beta": {"start": -30, "stop": 0, "points": 13, "scale": "dB"},
        },
        "sim": {"trials": 20000, "seed": 7, "truncation_tol": 0.05},
    }


PRESETS = {
    "fig1": _sm_sweep("sm-mrc"),
    "fig2": _sm_sweep("sm-zf"),
    "fig3": {
        "task": "n_opt_zf",
        "net": {
            "lambda": {"start": 1e-5, "stop": 0.1, "points": 30, "scale": "log"},
            "p": 1.0, "alpha": 4.0, "r_tr": 3.0,
            "rho": {"value": 25, "scale": "dB"},
            "beta": {"value": 0, "scale": "dB"},
        },
    },
    "fig4": _ostbc_outage("g4_rate34", 4, 0.1),
    "fig5": _ostbc_outage("g3_rate34", 3, 0.05),
    "fig6": _ostbc_outage("d4_rate12", 4, 0.1),
    "fig7": {
        "schemes": [
            {"variant": "ostbc", "code": "cyclic1", "N": 4},
            {"variant": "ostbc", "code": "alamouti", "N": 4},
            {"variant": "ostbc", "code": "g3_rate34", "N": 4},
        ],
        "net": {
            "lambda": {"start": 1e-4, "stop": 0.05, "points": 40, "scale": "log"},
            "p": 1.0, "alpha": 3.1, "r_tr": 2.0,
            "rho": {"value": 25, "scale": "dB"},
            "beta": {"values": [-3, 3], "scale": "dB"},
        },
    },
    "fig8": {
        "schemes": [
            {"variant": "sm-mrc", "M": 1, "N": 4},
            {"variant": "sm-mrc", "M": 4, "N": 4},
            {"variant": "sm-zf", "M": 4, "N": 4},
            {"variant": "ostbc", "code": "g4_rate34", "N": 4},
            {"variant": "ostbc", "code": "cyclic4", "N": 4},
        ],
        "net": {
            "lambda": {"start": 1e-4, "stop": 0.1, "points": 40, "scale": "log"},
            "p": 1.0, "alpha": 3.3, "r_tr": 2.0,
            "rho": {"value": 25, "scale": "dB"},
            "beta": {"value": 2, "scale": "dB"},
        },
    },
    "fig9": {
        "schemes": [
            {"variant": "ostbc", "code": "cyclic4", "N": 4},
            {"variant": "ostbc", "code": "d4_rate12", "N": 4},
            {"variant": "ostbc", "code": "g4_rate34", "N": 4},
        ],
        "net": {
            "lambda": {"start": 1e-4, "stop": 0.05, "points": 40, "scale": "log"},
            "p": 1.0, "alpha": 3.1, "r_tr": 3.0,
            "rho": {"value": 20, "scale": "dB"},
            "beta": {"values": [-3, 3], "scale": "dB"},
        },
    },
    "fig10": {
        "schemes": [
            {"variant": "sm-mrc", "M": 1, "N": 4},
            {"variant": "sm-mrc", "M": 4, "N": 4},
            {"variant": "sm-zf", "M": 4, "N": 4},
            {"variant": "ostbc", "code": "alamouti", "N": 4},
            {"variant": "ostbc", "code": "g4_rate34", "N": 4},
        ],
        "net": {
            "lambda": 0.01, "p": 1.0, "alpha": 2.5, "r_tr": 3.0,
            "rho": {"value": 20, "scale": "dB"},
            "beta": {"start": -20, "stop": 20, "points": 41, "scale": "dB"},
        },
    },
    "fig11": {
        "schemes": [{"variant": "sm-mrc", "M": m, "N": 4} for m in (1, 2, 4)],
        "net": {
            "lambda": {"start": 1e-5, "stop": 0.05, "points": 40, "scale": "log"},
            "p": 1.0, "alpha": 4.23, "r_tr": 3.0,
            "rho": {"value": 30, "scale": "dB"},
            "beta": {"value": 3, "scale": "dB"},
        },
    },
    "fig12": {
        "schemes": [{"variant": "sm-zf", "M": 4, "N": 4}],
        "net": {
            "lambda": 1.0, "p": 1.0, "alpha": 4.0, "r_tr": 3.0,
            "rho": {"value": 35, "scale": "dB"},
            "beta": {"value": 3, "scale": "dB"},
        },
        "epsilon": {"start": 0.005, "stop": 0.3, "points": 30, "scale": "linear"},
    },
    "fig13": {
        "schemes": [{"variant": "sm-zf", "M": m, "N": 4} for m in (1, 2, 3, 4)],
        "net": {
            "lambda": 1.0, "p": 1.0,
            "alpha": {"start": 2.1, "stop": 6.0, "points": 40, "scale": "linear"},
            "r_tr": 3.0,
            "rho": {"value": 60, "scale": "dB"},
            "beta": {"value": 3, "scale": "dB"},
        },
        "epsilon": 1e-4,
    },
    "fig14": {
        "protocol": "ca",
        "net": {
            "lambda": {"values": [0.03, 0.1, 0.5]}, "p": 1.0, "alpha": 4.0, "r_tr": 1.5,
            "rho": {"value": 10, "scale": "dB"},
            "beta": {"value": 5, "scale": "dB"},
        },
        "r_gz": {"start": 0.5, "stop": 8.0, "points": 12, "scale": "log"},
        "sim": {"trials": 8000, "seed": 14},
    },
    "fig15": {
        "N_list": [2, 3, 4],
        "net": {
            "lambda": 1.0, "p": 1.0, "alpha": 3.0, "r_tr": 2.0,
            "rho": {"value": 10, "scale": "dB"},
            "beta": {"value": 5, "scale": "dB"},
        },
        "lambda": {"start": 1e-4, "stop": 1.0, "points": 50, "scale": "log"},
        "p": {"start": 0.02, "stop": 1.0, "points": 50, "scale": "linear"},
    },
    "table2": {"table": 2},
    "table3": {"table": 3},
    "table4": {"table": 4},
}

_PRESET_COMMAND = {
    "fig1": "analyze", "fig2": "analyze", "fig3": "optimize", "fig4": "simulate",
    "fig5": "simulate", "fig6": "simulate", "fig7": "analyze", "fig8": "analyze",
    "fig9": "analyze", "fig10": "analyze", "fig11": "analyze", "fig12": "analyze",
    "fig13": "analyze", "fig14": "simulate", "fig15": "compare-mac",
    "table2": "analyze", "table3": "analyze", "table4": "analyze",
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ppp-mimo",
        description="Outage/throughput/capacity analysis of multi-antenna "
        "Poisson ad hoc networks, with Monte Carlo validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "simulate", "optimize", "compare-mac"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON config file or preset name")
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--out", default=None)
        cmd.add_argument("--quick", action="store_true")
        if name == "analyze":
            cmd.add_argument("--table", type=int, choices=(2, 3, 4))
    val = sub.add_parser("validate")
    val.add_argument("--quick", action="store_true")
    val.add_argument("--config", default=None, help="ignored; accepted for uniformity")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        return 0 if run_validate(quick=args.quick) else 1
    try:
        if args.command == "analyze" and getattr(args, "table", None):
            config = {"table": args.table}
        else:
            if not args.config:
                raise ConfigError("--config (file or preset name) is required")
            config = _load_config(args.config)
            expected = _PRESET_COMMAND.get(args.config)
            if expected and expected != args.command:
                raise ConfigError(
                    f"preset {args.config!r} belongs to the {expected!r} command"
                )
        seed = args.seed
        if args.command == "analyze":
            header, rows = run_analyze(config, args.quick)
        elif args.command == "simulate":
            header, rows = run_simulate(config, seed, args.quick)
        elif args.command == "optimize":
            header, rows = run_optimize(config, args.quick)
        else:
            header, rows = run_compare_mac(config, args.quick)
        _write_csv(args.out, args.command, config, seed, header, rows)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalInstabilityError, NonConvergenceError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (NoRootError, InfeasibleError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 4
    except PppMimoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
