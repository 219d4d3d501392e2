"""Acceptance suite: one callable per criterion, each with pinned parameters
and tolerances, plus an orchestrator that prints one PASS/FAIL line each.

Every criterion checks an implementation against an independent route:
closed forms against adaptive quadrature, bisection spectra against
characteristic-polynomial roots, Monte Carlo against exact identities or
analytic bounds.  Runs are seeded and deterministic for a fixed worker count
(and, for the determinism criterion itself, across worker counts).
"""

from __future__ import annotations

import io
import math
import os
import tempfile
import time
from contextlib import redirect_stdout
from dataclasses import dataclass

import numpy as np

from . import cli, eig
from .analytic import energy_I, log_potential_semicircle, log_potential_semicircle_quad, rate_J, rate_J_quad
from .experiments import ExperimentConfig, lambda_max_sample, run_esd_check, run_moment_check, run_tail_sweep, run_tailbound_check
from .model import RegimeSchedule
from .partition import compare_ratios, log_Z, technical_gap
from .quadrature import QuadratureSpec, adaptive_quad
from .sampler import TridiagonalMatrix


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(index, name, passed, detail, t0) -> CriterionResult:
    return CriterionResult(index, name, bool(passed), detail, time.time() - t0)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def charpoly_eigenvalues(diag: np.ndarray, offdiag: np.ndarray) -> np.ndarray:
    """Spectrum from the explicitly expanded characteristic polynomial.

    Three-term recurrence in coefficient space,
    p_k = (a_k - x) p_{k-1} - b_{k-1}^2 p_{k-2}, then companion-matrix roots.
    Independent of the Sturm bisection path it cross-checks.
    """
    from numpy.polynomial import polynomial as P

    p_prev = np.array([1.0])
    p = np.array([diag[0], -1.0])
    for k in range(1, diag.size):
        term = P.polymul(np.array([diag[k], -1.0]), p)
        term[: p_prev.size] -= offdiag[k - 1] ** 2 * p_prev
        p_prev, p = p, term
    roots = np.polynomial.polynomial.polyroots(p)
    return np.sort(roots.real)


def log_z2_quadrature_oracle(alpha: float, beta: float) -> float:
    """log of the two-particle partition function by nested adaptive
    quadrature with a split at the |l1 - l2| kink."""
    spec_in = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12)
    spec_out = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11)
    lim = math.sqrt(2.0 * 700.0 / alpha)  # exp(-alpha/2 x^2) below 1e-304 outside
    lim = min(lim, 12.0 / math.sqrt(alpha) + 8.0)

    def inner(l1: float) -> float:
        f = lambda l2: math.exp(-0.5 * alpha * l2 * l2) * abs(l1 - l2) ** beta
        return adaptive_quad(f, -lim, lim, spec_in, points=(l1,))

    outer = lambda l1: math.exp(-0.5 * alpha * l1 * l1) * inner(l1)
    return math.log(adaptive_quad(outer, -lim, lim, spec_out))


def log_z3_hermite_oracle(alpha: float, beta: float) -> float:
    """log of the three-particle partition function for even integer beta
    via tensor Gauss-Hermite, exact because |Delta|^beta is a polynomial."""
    if beta != int(beta) or int(beta) % 2:
        raise ValueError("Hermite oracle needs even integer beta")
    deg = 3 * int(beta) // 2 + 2
    nodes, weights = np.polynomial.hermite.hermgauss(deg * 2)
    # physicists' rule integrates exp(-x^2); rescale to exp(-alpha/2 x^2)
    scale = math.sqrt(2.0 / alpha)
    x = nodes * scale
    w = weights * scale
    total = 0.0
    for i, xi in enumerate(x):
        for j, xj in enumerate(x):
            d_ij = abs(xi - xj) ** beta
            for k, xk in enumerate(x):
                total += w[i] * w[j] * w[k] * d_ij * abs(xi - xk) ** beta * abs(xj - xk) ** beta
    return math.log(total)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_1_rate_exactness(**_) -> CriterionResult:
    t0 = time.time()
    ok = rate_J(2.0) == 0.0
    worst = 0.0
    for x in (2.01, 2.5, 3.0, 5.0):
        worst = max(worst,
                    abs(log_potential_semicircle(x) - log_potential_semicircle_quad(x)),
                    abs(rate_J(x) - rate_J_quad(x)))
    ok = ok and worst <= 1e-8
    return _result(1, "rate-function exactness", ok,
                   f"J(2)={rate_J(2.0)!r}, worst closed-vs-quadrature gap {worst:.2e} (tol 1e-8)", t0)


def criterion_2_selberg(**_) -> CriterionResult:
    t0 = time.time()
    gauss_gap = max(abs(log_Z(1, a, b) - 0.5 * math.log(2.0 * math.pi / a))
                    for a, b in ((1.0, 1.0), (5.0, 0.1)))
    quad_gap = abs(log_Z(2, 2.0, 1.0) - log_z2_quadrature_oracle(2.0, 1.0))
    ok = gauss_gap <= 1e-12 and quad_gap <= 1e-6
    return _result(2, "Selberg partition correctness", ok,
                   f"n=1 gap {gauss_gap:.2e} (tol 1e-12), n=2 quadrature gap {quad_gap:.2e} (tol 1e-6)", t0)


def criterion_3_ratio_asymptotics(**_) -> CriterionResult:
    t0 = time.time()
    gaps = {"shift": [], "perturbed": []}
    for n in (10**3, 10**4, 10**5, 10**6):
        beta = 1.0 / math.log(n) ** 2
        s, p = compare_ratios(n, beta)
        gaps["shift"].append(abs(s.gap))
        gaps["perturbed"].append(abs(p.gap))
    ok = all(
        all(b < a for a, b in zip(seq, seq[1:])) and seq[-1] <= 0.05
        for seq in gaps.values())
    return _result(3, "partition-ratio asymptotics", ok,
                   f"shift gaps {[f'{g:.4f}' for g in gaps['shift']]}, "
                   f"perturbed gaps {[f'{g:.4f}' for g in gaps['perturbed']]} (final <= 0.05)", t0)


def criterion_4_eigensolver_oracle(**_) -> CriterionResult:
    t0 = time.time()
    rng = np.random.Generator(np.random.Philox(key=40404))
    worst_eig = 0.0
    count_mismatches = 0
    for _i in range(50):
        diag = rng.normal(size=8)
        offdiag = np.abs(rng.normal(size=7))
        tri = TridiagonalMatrix(diag, offdiag)
        ours = eig.full_spectrum(tri, 1e-12).eigenvalues
        oracle = charpoly_eigenvalues(diag, offdiag)
        worst_eig = max(worst_eig, float(np.max(np.abs(ours - oracle))))
        lo, hi = eig.gershgorin(tri)
        shifts = []
        while len(shifts) < 20:
            s = rng.uniform(lo - 0.5, hi + 0.5)
            if np.min(np.abs(oracle - s)) > 1e-6:  # stay off root neighborhoods
                shifts.append(s)
        for s in shifts:
            if eig.sturm_count(tri, s) != int(np.sum(oracle < s)):
                count_mismatches += 1
    ok = worst_eig <= 1e-9 and count_mismatches == 0
    return _result(4, "eigensolver oracle equivalence", ok,
                   f"worst eigenvalue gap {worst_eig:.2e} (tol 1e-9), "
                   f"{count_mismatches} Sturm count mismatches over 1000 shifts", t0)


def criterion_5_trace_identity(workers=1, quick=False, **_) -> CriterionResult:
    t0 = time.time()
    replicas = 200 if quick else 2000
    cfg = ExperimentConfig(
        schedule=RegimeSchedule.constant(0.05), n_values=(500,), replicas=replicas,
        master_seed=50505, workers=workers)
    report = run_moment_check(cfg)
    row = report.rows[0]
    ok = abs(row.z_score) <= 4.0
    return _result(5, "trace identity Monte Carlo", ok,
                   f"mean={row.mean:.6f} exact={row.exact:.6f} z={row.z_score:.2f} "
                   f"(|z| <= 4, {replicas} replicas)", t0)


def criterion_6_convergence(workers=1, quick=False, **_) -> CriterionResult:
    t0 = time.time()
    replicas = 100 if quick else 500
    cfg = ExperimentConfig(
        schedule=RegimeSchedule.constant(0.1), n_values=(500, 2000), replicas=replicas,
        master_seed=60606, workers=workers)
    fracs = {}
    for n in cfg.n_values:
        lam = lambda_max_sample(cfg, n)
        fracs[n] = float(np.mean(np.abs(lam - 2.0) > 0.15))
    ok = fracs[2000] <= 0.05 and fracs[2000] <= fracs[500]
    return _result(6, "convergence in probability", ok,
                   f"frac(|lmax-2|>0.15): n=500 {fracs[500]:.3f}, n=2000 {fracs[2000]:.3f} "
                   f"(<= 0.05 and monotone)", t0)


def criterion_7_ldp_rate(workers=1, quick=False, **_) -> CriterionResult:
    t0 = time.time()
    replicas = 5000 if quick else 100_000
    cfg = ExperimentConfig(
        schedule=RegimeSchedule.constant(0.05), n_values=(200, 400), replicas=replicas,
        x_grid=(2.5,), master_seed=70707, workers=workers)
    rows = run_tail_sweep(cfg)
    by_n = {r.n: r for r in rows}
    j = rate_J(2.5)
    err200 = abs(by_n[200].j_hat - j)
    err400 = abs(by_n[400].j_hat - j)
    ok = err200 / j <= 0.5 and err400 < err200
    return _result(7, "empirical LDP rate", ok,
                   f"J(2.5)={j:.4f}; j_hat n=200 {by_n[200].j_hat:.4f} (rel {err200 / j:.2f} <= 0.5), "
                   f"n=400 {by_n[400].j_hat:.4f}; |err| shrinks: {err400 < err200}", t0)


def criterion_8_tail_bound(workers=1, quick=False, **_) -> CriterionResult:
    t0 = time.time()
    replicas = 5000 if quick else 100_000
    cfg = ExperimentConfig(
        schedule=RegimeSchedule.constant(0.2), n_values=(50,), replicas=replicas,
        t_grid=(2.5, 3.0), master_seed=80808, workers=workers)
    report = run_tailbound_check(cfg)
    ok = all(r.passed for r in report.rows)
    detail = "; ".join(
        f"t={r.t:g}: q_hat={r.q_hat:.3g} <= bound {math.exp(r.log_bound):.3g}" for r in report.rows)
    return _result(8, "tail-bound validity", ok, detail, t0)


def criterion_9_esd_convergence(workers=1, quick=False, **_) -> CriterionResult:
    t0 = time.time()
    replicas = 6 if quick else 50
    cfg = ExperimentConfig(
        schedule=RegimeSchedule.constant(0.1), n_values=(250, 1000, 4000), replicas=replicas,
        master_seed=90909, workers=workers)
    report = run_esd_check(cfg)
    w1 = [r.w1_mean for r in report.rows]
    energy = report.rows[-1].energy_norm_mean
    ok = all(b < a for a, b in zip(w1, w1[1:])) and w1[-1] <= 0.05 and abs(energy) <= 0.02
    return _result(9, "ESD convergence", ok,
                   f"W1 means {[f'{v:.4f}' for v in w1]} (decreasing, final <= 0.05); "
                   f"energy(normalized) at n=4000 {energy:.4f} (|.| <= 0.02)", t0)


def criterion_10_property_suite(workers=1, quick=False, **_) -> CriterionResult:
    t0 = time.time()
    rng = np.random.Generator(np.random.Philox(key=101010))

    triples = 10_000 if quick else 100_000
    a = rng.normal(0.0, 3.0, size=triples)
    b = rng.normal(0.0, 3.0, size=triples)
    betas = rng.uniform(0.0, 2.0, size=triples)
    betas[betas == 0.0] = 1.0
    neg = sum(1 for i in range(triples) if technical_gap(a[i], b[i], betas[i]) < 0.0)

    mono_bad = 0
    for _i in range(1000):
        n = int(rng.integers(2, 12))
        tri = TridiagonalMatrix(rng.normal(size=n), np.abs(rng.normal(size=n - 1)))
        lo, hi = eig.gershgorin(tri)
        x, y = sorted(rng.uniform(lo - 1.0, hi + 1.0, size=2))
        if eig.sturm_count(tri, x) > eig.sturm_count(tri, y):
            mono_bad += 1

    argv = ["sweep", "--schedule", "const", "--c", "0.1", "--n", "100",
            "--replicas", "60", "--x", "2.2,2.4", "--seed", "1234"]
    outputs = []
    for w in ("1", "2"):
        with tempfile.NamedTemporaryFile(suffix=".csv", delete=False) as tmp:
            path = tmp.name
        code = cli.main(argv + ["--workers", w, "--out", path])
        with open(path, "rb") as fh:
            outputs.append(fh.read())
        os.unlink(path)
        assert code == 0
    identical = outputs[0] == outputs[1]

    ok = neg == 0 and mono_bad == 0 and identical
    return _result(10, "inequality/monotonicity/determinism suite", ok,
                   f"{neg} negative gaps over {triples} triples; {mono_bad} Sturm monotonicity "
                   f"violations; worker-count CSV identical: {identical}", t0)


_CRITERIA = (
    criterion_1_rate_exactness,
    criterion_2_selberg,
    criterion_3_ratio_asymptotics,
    criterion_4_eigensolver_oracle,
    criterion_5_trace_identity,
    criterion_6_convergence,
    criterion_7_ldp_rate,
    criterion_8_tail_bound,
    criterion_9_esd_convergence,
    criterion_10_property_suite,
)


def run_all(workers: int | None = None, quick: bool = False, log=None) -> list:
    """Run all criteria in order, optionally logging one line per criterion."""
    workers = workers or os.cpu_count() or 1
    results = []
    for fn in _CRITERIA:
        res = fn(workers=workers, quick=quick)
        results.append(res)
        if log is not None:
            status = "PASS" if res.passed else "FAIL"
            log(f"[{status}] criterion {res.index}: {res.name} — {res.detail} ({res.seconds:.1f}s)")
    return results
