"""Monte Carlo campaigns confronting simulation with the analytic statements:
largest-particle concentration at 2, the empirical tail rate against the rate
function, the partition-function tail bound, the trace identity, an
exponential-tightness scan, and empirical-measure convergence.

Replica r always consumes stream_index = r of the cell's master seed, chunks
are a fixed function of (replicas, n), and every lane of the batched solver
stops on its own bracket, so outputs are byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import eig
from .analytic import energy_I, rate_J
from .measures import DiscreteMeasure, ks_to_semicircle, w1_to_semicircle
from .model import EnsembleParams, RegimeSchedule, make_params
from .partition import log_tail_bound
from .sampler import SeededStream, sample_matrix

_CHUNK_ELEMS = 2_000_000
_MIN_TASKS = 8  # worker-count independent task granularity


@dataclass(frozen=True)
class ExperimentConfig:
    """Immutable description of one Monte Carlo campaign."""

    schedule: RegimeSchedule
    n_values: tuple
    replicas: int
    x_grid: tuple = ()
    t_grid: tuple = ()
    m_grid: tuple = ()
    master_seed: int = 20260101
    solver_tol: float = 1e-12
    workers: int = 1
    plus_one_alpha: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "x_grid", tuple(float(x) for x in self.x_grid))
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        object.__setattr__(self, "m_grid", tuple(float(m) for m in self.m_grid))
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.solver_tol <= 0:
            raise ValueError("solver_tol must be positive")
        if not self.n_values:
            raise ValueError("n_values must be nonempty")

    def params_for(self, n: int) -> EnsembleParams:
        return make_params(n, self.schedule.beta(n), plus_one_alpha=self.plus_one_alpha)

    def cell_seed(self, n: int) -> int:
        # distinct Philox key block per ensemble size within one campaign
        return (self.master_seed + n) & ((1 << 64) - 1)

    def to_dict(self) -> dict:
        return {
            "schedule": self.schedule.to_dict(),
            "n_values": list(self.n_values),
            "replicas": self.replicas,
            "x_grid": list(self.x_grid),
            "t_grid": list(self.t_grid),
            "m_grid": list(self.m_grid),
            "master_seed": self.master_seed,
            "solver_tol": self.solver_tol,
            "workers": self.workers,
            "plus_one_alpha": self.plus_one_alpha,
        }

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            schedule=RegimeSchedule.from_dict(d["schedule"]),
            n_values=tuple(d["n_values"]),
            replicas=int(d["replicas"]),
            x_grid=tuple(d.get("x_grid", ())),
            t_grid=tuple(d.get("t_grid", ())),
            m_grid=tuple(d.get("m_grid", ())),
            master_seed=int(d.get("master_seed", 20260101)),
            solver_tol=float(d.get("solver_tol", 1e-12)),
            workers=int(d.get("workers", 1)),
            plus_one_alpha=bool(d.get("plus_one_alpha", False)),
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


# ---------------------------------------------------------------------------
# replica chunking and worker tasks
# ---------------------------------------------------------------------------

def _chunks(replicas: int, n: int):
    size = max(1, min(_CHUNK_ELEMS // max(n, 1), math.ceil(replicas / _MIN_TASKS)))
    return [(s, min(size, replicas - s)) for s in range(0, replicas, size)]


def _sample_block(params: EnsembleParams, seed: int, start: int, count: int):
    diags = np.empty((count, params.n))
    offs = np.empty((count, params.n - 1))
    for j in range(count):
        m = sample_matrix(params, SeededStream(seed, start + j))
        diags[j] = m.diag
        offs[j] = m.offdiag
    return diags, offs


def _task_lambda_max(args):
    params, seed, start, count, tol = args
    diags, offs = _sample_block(params, seed, start, count)
    return eig.lambda_max_batch(diags, offs, tol)


def _task_second_moment(args):
    params, seed, start, count = args
    diags, offs = _sample_block(params, seed, start, count)
    return (np.sum(diags**2, axis=1) + 2.0 * np.sum(offs**2, axis=1)) / params.n


def _task_first_moment(args):
    params, seed, start, count = args
    diags, _ = _sample_block(params, seed, start, count)
    return np.mean(diags, axis=1)  # (1/n) sum lambda_i = (1/n) trace


def _task_abs_tail(args):
    params, seed, start, count, t_grid = args
    diags, offs = _sample_block(params, seed, start, count)
    out = np.empty((count, len(t_grid)))
    for j, t in enumerate(t_grid):
        out[:, j] = eig.counts_abs_at_or_above(diags, offs, t) / params.n
    return out


def _task_measure_stats(args):
    params, seed, start, count, tol = args
    diags, offs = _sample_block(params, seed, start, count)
    spectra = eig.batch_spectra(diags, offs, tol)
    out = np.empty((count, 4))
    for j in range(count):
        mu = DiscreteMeasure(spectra[j])
        out[j, 0] = w1_to_semicircle(mu)
        out[j, 1] = ks_to_semicircle(mu)
        out[j, 2] = energy_I(mu, "normalized")
        out[j, 3] = energy_I(mu, "paper")
    return out


def _pmap(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _gather(fn, tasks, workers: int) -> np.ndarray:
    return np.concatenate(_pmap(fn, tasks, workers), axis=0)


def lambda_max_sample(cfg: ExperimentConfig, n: int) -> np.ndarray:
    """Per-replica largest eigenvalues for one ensemble size, replica order."""
    params = cfg.params_for(n)
    seed = cfg.cell_seed(n)
    tasks = [(params, seed, s, c, cfg.solver_tol) for s, c in _chunks(cfg.replicas, n)]
    return _gather(_task_lambda_max, tasks, cfg.workers)


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentRow:
    n: int
    beta: float
    alpha: float
    mean: float
    stderr: float
    exact: float
    z_score: float


@dataclass(frozen=True)
class MomentReport:
    rows: list
    first_moment_rows: list
    checks: list


def run_moment_check(cfg: ExperimentConfig) -> MomentReport:
    """Compare the Monte Carlo mean of (1/n) sum lambda_i^2 with its exact value.

    The per-replica statistic is evaluated through the trace identity
    sum lambda^2 = sum diag^2 + 2 sum offdiag^2, which holds exactly for every
    tridiagonal realization; the exact expectation is (1 + beta*(n-1)/2)/alpha.
    """
    rows, first_rows, checks = [], [], []
    for n in cfg.n_values:
        params = cfg.params_for(n)
        seed = cfg.cell_seed(n)
        tasks = [(params, seed, s, c) for s, c in _chunks(cfg.replicas, n)]
        vals = _gather(_task_second_moment, tasks, cfg.workers)
        exact = (1.0 + params.beta * (n - 1) / 2.0) / params.alpha
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1) / math.sqrt(cfg.replicas))
        z = (mean - exact) / stderr if stderr > 0 else 0.0
        rows.append(MomentRow(n, params.beta, params.alpha, mean, stderr, exact, z))
        checks.append(CheckResult(
            f"second_moment_within_4_stderr[n={n}]", abs(z) <= 4.0,
            f"mean={mean:.6g} exact={exact:.6g} z={z:.2f}"))

        firsts = _gather(_task_first_moment, tasks, cfg.workers)
        fmean = float(firsts.mean())
        fse = float(firsts.std(ddof=1) / math.sqrt(cfg.replicas))
        fz = fmean / fse if fse > 0 else 0.0
        first_rows.append(MomentRow(n, params.beta, params.alpha, fmean, fse, 0.0, fz))
        checks.append(CheckResult(
            f"first_moment_within_4_stderr[n={n}]", abs(fz) <= 4.0,
            f"mean={fmean:.3g} z={fz:.2f}"))
    return MomentReport(rows, first_rows, checks)


@dataclass(frozen=True)
class TailRow:
    """One (n, beta, x) cell of the tail sweep."""

    n: int
    beta: float
    x: float
    p_hat: float
    stderr: float
    j_hat: float          # -log(p_hat)/(n*beta); +inf marker when p_hat = 0
    j_theory: float
    rel_err: float        # (j_hat - j_theory)/j_theory; nan marker when undefined
    wilson_low: float | None = None
    wilson_high: float | None = None


def _wilson(p_hat: float, r: int, z: float = 1.959963984540054):
    denom = 1.0 + z * z / r
    center = (p_hat + z * z / (2 * r)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / r + z * z / (4 * r * r)) / denom
    return center - half, center + half


def default_x_grid(n: int, beta: float, candidates=(2.1, 2.2, 2.3, 2.4, 2.5, 2.75, 3.0)) -> tuple:
    """Default sweep grid, capped so target tails stay observable:
    keep x with J(x)*n*beta <= 9."""
    nb = n * beta
    return tuple(x for x in candidates if rate_J(x) * nb <= 9.0)


def run_tail_sweep(cfg: ExperimentConfig) -> list[TailRow]:
    """Estimate P(lambda_max >= x) and the finite-n rate surrogate j_hat."""
    if not cfg.x_grid:
        raise ValueError("tail sweep needs a nonempty x_grid")
    if any(x <= 2.0 for x in cfg.x_grid):
        raise ValueError("x_grid values must exceed the bulk edge 2")
    rows = []
    for n in cfg.n_values:
        beta = cfg.schedule.beta(n)
        lam = lambda_max_sample(cfg, n)
        nb = n * beta
        for x in cfg.x_grid:
            p_hat = float(np.mean(lam >= x))
            stderr = math.sqrt(p_hat * (1 - p_hat) / cfg.replicas)
            j_theory = rate_J(x)
            if p_hat > 0.0:
                j_hat = -math.log(p_hat) / nb
                rel = (j_hat - j_theory) / j_theory
            else:
                j_hat = math.inf   # undersampled-tail marker
                rel = math.nan
            wl, wh = (None, None)
            if p_hat < 1e-3:
                wl, wh = _wilson(p_hat, cfg.replicas)
            rows.append(TailRow(n, beta, x, p_hat, stderr, j_hat, j_theory, rel, wl, wh))
    return rows


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    beta: float
    median_lambda_max: float
    fractions: dict  # eps -> fraction of replicas with |lambda_max - 2| > eps


@dataclass(frozen=True)
class ConvergenceReport:
    rows: list
    checks: list


def run_convergence_check(cfg: ExperimentConfig,
                          eps_values=(0.1, 0.15, 0.2)) -> ConvergenceReport:
    """Concentration of lambda_max at the bulk edge 2 along the schedule."""
    rows = []
    for n in cfg.n_values:
        beta = cfg.schedule.beta(n)
        lam = lambda_max_sample(cfg, n)
        fr = {eps: float(np.mean(np.abs(lam - 2.0) > eps)) for eps in eps_values}
        rows.append(ConvergenceRow(n, beta, float(np.median(lam)), fr))
    checks = []
    for eps in eps_values:
        seq = [r.fractions[eps] for r in rows]
        checks.append(CheckResult(
            f"fractions_nonincreasing_in_n[eps={eps}]",
            all(b <= a for a, b in zip(seq, seq[1:])),
            f"{seq}"))
    for r in rows:
        seq = [r.fractions[eps] for eps in sorted(eps_values)]
        checks.append(CheckResult(
            f"fractions_nested_in_eps[n={r.n}]",
            all(b <= a for a, b in zip(seq, seq[1:])),
            f"{seq}"))
    return ConvergenceReport(rows, checks)


@dataclass(frozen=True)
class TailboundRow:
    n: int
    beta: float
    t: float
    q_hat: float
    stderr: float
    log_bound: float
    passed: bool


@dataclass(frozen=True)
class TailboundReport:
    rows: list
    checks: list


def run_tailbound_check(cfg: ExperimentConfig) -> TailboundReport:
    """Empirical q(t) = E[#{i: |lambda_i| >= t}]/n against the analytic bound.

    By exchangeability q(t) equals P(|lambda_1| >= t), the quantity the bound
    controls.
    """
    if not cfg.t_grid:
        raise ValueError("tail-bound check needs a nonempty t_grid")
    rows, checks = [], []
    for n in cfg.n_values:
        params = cfg.params_for(n)
        seed = cfg.cell_seed(n)
        tasks = [(params, seed, s, c, cfg.t_grid) for s, c in _chunks(cfg.replicas, n)]
        fracs = _gather(_task_abs_tail, tasks, cfg.workers)
        for j, t in enumerate(cfg.t_grid):
            col = fracs[:, j]
            q_hat = float(col.mean())
            stderr = float(col.std(ddof=1) / math.sqrt(cfg.replicas)) if cfg.replicas > 1 else 0.0
            lb = log_tail_bound(n, params.alpha, params.beta, t)
            ok = q_hat <= math.exp(lb) + 3.0 * stderr
            rows.append(TailboundRow(n, params.beta, t, q_hat, stderr, lb, ok))
            checks.append(CheckResult(
                f"tail_bound_respected[n={n},t={t:g}]", ok,
                f"q_hat={q_hat:.3g} bound={math.exp(lb):.3g}"))
    return TailboundReport(rows, checks)


@dataclass(frozen=True)
class TightnessRow:
    n: int
    beta: float
    M: float
    empirical_rate: float | None  # log(p_hat)/(n*beta) when p_hat > 0
    surrogate_rate: float         # [log n + log_tail_bound]/(n*beta)


@dataclass(frozen=True)
class TightnessReport:
    rows: list
    checks: list


def run_tightness_scan(cfg: ExperimentConfig) -> TightnessReport:
    """Exponential-tightness scan over the threshold grid.

    Where the event lambda_max > M is still observable the empirical decay
    rate is reported; everywhere the union-bound surrogate
    (log n + log tail bound)/(n*beta) is reported and must strictly decrease.
    """
    if not cfg.m_grid:
        raise ValueError("tightness scan needs a nonempty m_grid")
    rows, checks = [], []
    for n in cfg.n_values:
        params = cfg.params_for(n)
        nb = n * params.beta
        lam = lambda_max_sample(cfg, n)
        surr = []
        for M in cfg.m_grid:
            p_hat = float(np.mean(lam > M))
            emp = math.log(p_hat) / nb if p_hat > 0 else None
            s = (math.log(n) + log_tail_bound(n, params.alpha, params.beta, M)) / nb
            surr.append(s)
            rows.append(TightnessRow(n, params.beta, M, emp, s))
        checks.append(CheckResult(
            f"surrogate_strictly_decreasing[n={n}]",
            all(b < a for a, b in zip(surr, surr[1:])),
            f"first={surr[0]:.3f} last={surr[-1]:.3f}"))
    return TightnessReport(rows, checks)


@dataclass(frozen=True)
class EsdRow:
    n: int
    beta: float
    w1_mean: float
    ks_mean: float
    energy_norm_mean: float
    energy_paper_mean: float


@dataclass(frozen=True)
class EsdReport:
    rows: list
    checks: list


def run_esd_check(cfg: ExperimentConfig) -> EsdReport:
    """Empirical-spectral-measure convergence diagnostics along the schedule."""
    rows = []
    for n in cfg.n_values:
        params = cfg.params_for(n)
        seed = cfg.cell_seed(n)
        tasks = [(params, seed, s, c, cfg.solver_tol) for s, c in _chunks(cfg.replicas, n)]
        stats = _gather(_task_measure_stats, tasks, cfg.workers)
        rows.append(EsdRow(
            n, params.beta,
            float(stats[:, 0].mean()), float(stats[:, 1].mean()),
            float(stats[:, 2].mean()), float(stats[:, 3].mean())))
    w1_seq = [r.w1_mean for r in rows]
    checks = [CheckResult(
        "w1_strictly_decreasing_in_n",
        all(b < a for a, b in zip(w1_seq, w1_seq[1:])),
        f"{[f'{v:.4f}' for v in w1_seq]}")]
    return EsdReport(rows, checks)
