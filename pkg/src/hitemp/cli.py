"""Command-line entry point: matrix sampling, spectra, rate tables, partition
ratio sweeps and the Monte Carlo experiments, with stable CSV output formats.

All CSV output is locale-independent: '.' decimal separator, '\\n' line
endings, 17 significant digits.  Infinite markers render as 'inf'/'-inf',
undefined values as 'nan'.  Exit codes: 0 success, 1 assertion failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys

from . import __version__
from .analytic import evaluate_rate
from .experiments import (
    ExperimentConfig,
    run_esd_check,
    run_tail_sweep,
    run_tailbound_check,
)
from .model import RegimeSchedule, make_params
from .partition import compare_ratios
from .sampler import SeededStream, dump_matrix, load_matrix, sample_matrix
from . import eig as eigmod


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(path, header: list, rows: list) -> None:
    text = ",".join(header) + "\n" + "".join(
        ",".join(_fmt(v) for v in row) + "\n" for row in rows)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _parse_grid(text: str) -> list:
    """Either 'start:step:stop' (inclusive) or a comma-separated list."""
    if ":" in text:
        start, step, stop = (float(p) for p in text.split(":"))
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid {text!r}")
        count = int(round((stop - start) / step)) + 1
        return [start + i * step for i in range(count)]
    return [float(p) for p in text.split(",") if p]


def _parse_n_list(text: str) -> list:
    return [int(float(p)) for p in text.split(",") if p]


def _resolve_workers(flag_value, config_value) -> int:
    if flag_value is not None:
        return int(flag_value)
    if config_value is not None:
        return int(config_value)
    env = os.environ.get("HITEMP_WORKERS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _schedule_from_args(args, config: dict) -> RegimeSchedule:
    name = args.schedule if args.schedule is not None else None
    if name is None and "schedule" in config:
        return RegimeSchedule.from_dict(config["schedule"])
    if name is None:
        raise ValueError("a --schedule is required (invlogsq, invlog, power, const)")
    c = args.c if args.c is not None else 1.0
    if name == "invlogsq":
        return RegimeSchedule.inverse_log_power(c, 2.0, name="invlogsq")
    if name == "invlog":
        p = args.p if args.p is not None else 1.0
        return RegimeSchedule.inverse_log_power(c, p)
    if name == "power":
        if args.gamma is None:
            raise ValueError("--schedule power requires --gamma")
        return RegimeSchedule.power_decay(c, args.gamma)
    if name == "const":
        return RegimeSchedule.constant(c)
    raise ValueError(f"unknown schedule {name!r}")


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "config" in data and isinstance(data["config"], dict):
        return data["config"]  # a run manifest round-trips as a config
    return data


def _experiment_config(args) -> ExperimentConfig:
    """CLI flags override config-file values override defaults."""
    config = _load_config_file(args.config)
    schedule = _schedule_from_args(args, config)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        if key in config:
            return config[key]
        return default

    n_values = pick(args.n, "n_values", None)
    if n_values is None:
        raise ValueError("--n is required")
    return ExperimentConfig(
        schedule=schedule,
        n_values=tuple(n_values),
        replicas=int(pick(args.replicas, "replicas", 1000)),
        x_grid=tuple(pick(getattr(args, "x", None), "x_grid", ())),
        t_grid=tuple(pick(getattr(args, "t", None), "t_grid", ())),
        m_grid=tuple(pick(getattr(args, "m_grid", None), "m_grid", ())),
        master_seed=int(pick(args.seed, "master_seed", 20260101)),
        solver_tol=float(pick(args.tol, "solver_tol", 1e-12)),
        workers=_resolve_workers(args.workers, config.get("workers")),
        plus_one_alpha=bool(pick(
            True if getattr(args, "plus_one_alpha", False) else None,
            "plus_one_alpha", False)),
    )


def _write_manifest(path, cfg: ExperimentConfig, outputs: list) -> None:
    if path is None:
        return
    manifest = {
        "tool_version": __version__,
        "master_seed": cfg.master_seed,
        "timestamp": datetime.datetime.now(tz=datetime.timezone.utc).isoformat(),
        "config": cfg.to_dict(),
        "outputs": [o for o in outputs if o not in (None, "-")],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_summary(path, checks) -> None:
    if path is None:
        return
    payload = {
        "passed": all(c.passed for c in checks),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _add_experiment_flags(sp, with_x=False, with_t=False, with_m=False):
    sp.add_argument("--schedule", help="invlogsq | invlog | power | const")
    sp.add_argument("--c", type=float, help="schedule coefficient")
    sp.add_argument("--p", type=float, help="log-power exponent (invlog)")
    sp.add_argument("--gamma", type=float, help="decay exponent (power)")
    sp.add_argument("--n", type=_parse_n_list, help="comma list of ensemble sizes")
    sp.add_argument("--replicas", type=int)
    sp.add_argument("--seed", type=int, help="master seed")
    sp.add_argument("--tol", type=float, help="eigensolver tolerance")
    sp.add_argument("--workers", type=int, help="worker processes (env HITEMP_WORKERS, then core count)")
    sp.add_argument("--plus-one-alpha", action="store_true", help="use alpha = 1 + n*beta/2")
    sp.add_argument("--config", help="JSON config file or run manifest")
    sp.add_argument("--out", help="CSV output path (default stdout)")
    sp.add_argument("--summary", help="JSON pass/fail summary path")
    sp.add_argument("--manifest", help="run-manifest JSON path")
    if with_x:
        sp.add_argument("--x", type=_parse_grid, help="x grid 'a:step:b' or comma list")
    if with_t:
        sp.add_argument("--t", type=_parse_grid, help="t grid 'a:step:b' or comma list")
    if with_m:
        sp.add_argument("--m-grid", dest="m_grid", type=_parse_grid, help="threshold grid")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hitemp",
        description="Gaussian beta-ensemble at high temperature: sampling, spectra and rate diagnostics.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="emit one tridiagonal matrix dump")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--seed", type=int, default=20260101)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--plus-one-alpha", action="store_true")
    sp.add_argument("--out", required=True, help="dump file path")

    sp = sub.add_parser("eig", help="spectrum of a dumped matrix, one eigenvalue per line")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("rate", help="rate-function table over an x grid")
    sp.add_argument("--x", type=_parse_grid, required=True)
    sp.add_argument("--method", choices=["closed_form", "quadrature"], default="closed_form")
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("partition", help="partition-ratio comparison sweep")
    sp.add_argument("--schedule", required=True)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--n", type=_parse_n_list, required=True)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("tail", help="largest-particle tail bound check")
    _add_experiment_flags(sp, with_t=True)

    sp = sub.add_parser("sweep", help="LDP tail sweep: empirical rate vs J")
    _add_experiment_flags(sp, with_x=True)

    sp = sub.add_parser("esd", help="empirical-spectral-measure convergence check")
    _add_experiment_flags(sp)

    sp = sub.add_parser("check", help="run the acceptance suite")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--quick", action="store_true",
                    help="reduced replica counts; smoke mode, not the official gate")
    return ap


SWEEP_HEADER = ["n", "beta", "x", "p_hat", "stderr", "j_hat", "j_theory", "rel_err"]
PARTITION_HEADER = ["lemma", "n", "beta", "exact", "asymptotic", "gap"]
TAIL_HEADER = ["n", "beta", "t", "q_hat", "stderr", "log_bound", "pass"]
ESD_HEADER = ["n", "beta", "w1_mean", "ks_mean", "energy_norm", "energy_paper"]


def _cmd_sample(args) -> int:
    params = make_params(args.n, args.beta, plus_one_alpha=args.plus_one_alpha)
    tri = sample_matrix(params, SeededStream(args.seed, args.stream))
    dump_matrix(tri, args.out)
    return 0


def _cmd_eig(args) -> int:
    tri = load_matrix(args.matrix)
    spec = eigmod.full_spectrum(tri, args.tol)
    text = "".join(f"{v:.17g}\n" for v in spec.eigenvalues)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    return 0


def _cmd_rate(args) -> int:
    rows = []
    for x in args.x:
        ev = evaluate_rate(x, method=args.method)
        rows.append([ev.x, ev.J, ev.phi])
    _write_csv(args.out, ["x", "J", "phi"], rows)
    return 0


def _cmd_partition(args) -> int:
    schedule = _schedule_from_args(args, {})
    rows = []
    comparisons = [compare_ratios(n, schedule.beta(n)) for n in args.n]
    for which in (0, 1):  # all shift rows, then all perturbed rows
        for comp in comparisons:
            r = comp[which]
            rows.append([r.lemma, r.n, r.beta, r.exact_log_ratio,
                         r.asymptotic_log_ratio, r.gap])
    _write_csv(args.out, PARTITION_HEADER, rows)
    return 0


def _cmd_tail(args) -> int:
    cfg = _experiment_config(args)
    report = run_tailbound_check(cfg)
    rows = [[r.n, r.beta, r.t, r.q_hat, r.stderr, r.log_bound, r.passed]
            for r in report.rows]
    _write_csv(args.out, TAIL_HEADER, rows)
    _write_summary(args.summary, report.checks)
    _write_manifest(args.manifest, cfg, [args.out])
    return 0 if all(c.passed for c in report.checks) else 1


def _cmd_sweep(args) -> int:
    cfg = _experiment_config(args)
    rows = [[r.n, r.beta, r.x, r.p_hat, r.stderr, r.j_hat, r.j_theory, r.rel_err]
            for r in run_tail_sweep(cfg)]
    _write_csv(args.out, SWEEP_HEADER, rows)
    _write_manifest(args.manifest, cfg, [args.out])
    return 0


def _cmd_esd(args) -> int:
    cfg = _experiment_config(args)
    report = run_esd_check(cfg)
    rows = [[r.n, r.beta, r.w1_mean, r.ks_mean, r.energy_norm_mean, r.energy_paper_mean]
            for r in report.rows]
    _write_csv(args.out, ESD_HEADER, rows)
    _write_summary(args.summary, report.checks)
    _write_manifest(args.manifest, cfg, [args.out])
    return 0 if all(c.passed for c in report.checks) else 1


def _cmd_check(args) -> int:
    from .acceptance import run_all

    workers = _resolve_workers(args.workers, None)
    results = run_all(workers=workers, quick=args.quick, log=print)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "sample": _cmd_sample,
        "eig": _cmd_eig,
        "rate": _cmd_rate,
        "partition": _cmd_partition,
        "tail": _cmd_tail,
        "sweep": _cmd_sweep,
        "esd": _cmd_esd,
        "check": _cmd_check,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"hitemp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
