"""Random generation of the tridiagonal beta-ensemble matrix.

The n-particle ensemble with scale alpha is realized as the symmetric
tridiagonal matrix with diagonal g_i / sqrt(alpha), g_i ~ N(0,1), and
off-diagonal X_{n-i} / sqrt(2*alpha), X_j ~ chi(j*beta), all entries
independent.  In the high-temperature regime the chi shapes j*beta sit far
below 1, so chi variates are produced in log space by an exact shape-boosted
gamma sampler and only exponentiated when matrix entries are formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import EnsembleParams

_U64 = (1 << 64) - 1


class SeededStream:
    """A reproducible variate stream addressed by (master_seed, stream_index).

    Backed by the counter-based Philox generator keyed with the 128-bit value
    master_seed + stream_index * 2^64, so distinct stream indices select
    distinct cipher keys and are non-overlapping by construction.  A stream
    instance is stateful and must not be shared across threads; streams with
    different indices may be consumed concurrently.
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        if stream_index < 0:
            raise ValueError(f"stream_index must be nonnegative, got {stream_index}")
        self.master_seed = int(master_seed) & _U64
        self.stream_index = int(stream_index)
        key = self.master_seed + (self.stream_index << 64)
        self.rng = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self):
        return f"SeededStream(master_seed={self.master_seed}, stream_index={self.stream_index})"


def gaussian(stream: SeededStream, size=None):
    """Standard normal variates from the stream."""
    return stream.rng.standard_normal(size)


def _gamma_shape_ge_one(shape, rng) -> np.ndarray:
    """Marsaglia-Tsang rejection sampler for Gamma(shape, 1), shape >= 1."""
    shape = np.asarray(shape, dtype=float)
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(shape.shape, dtype=float)
    pending = np.arange(out.size)
    d_flat = d.ravel()
    c_flat = c.ravel()
    out_flat = out.ravel()
    while pending.size:
        x = rng.standard_normal(pending.size)
        v = (1.0 + c_flat[pending] * x) ** 3
        u = rng.random(pending.size)
        ok = v > 0.0
        quick = u < 1.0 - 0.0331 * x**4
        with np.errstate(divide="ignore", invalid="ignore"):
            slow = np.log(u) < 0.5 * x * x + d_flat[pending] * (1.0 - v + np.log(np.where(ok, v, 1.0)))
        accept = ok & (quick | slow)
        idx = pending[accept]
        out_flat[idx] = d_flat[idx] * v[accept]
        pending = pending[~accept]
    return out


def log_chi(k, stream: SeededStream, size=None):
    """log of a chi(k) variate, exact for every shape k > 0.

    chi(k)^2 is Gamma(k/2, scale 2).  The Gamma(k/2) variate is obtained by
    the shape boost G_a = G_{a+1} * U^(1/a) with a = k/2, taken in log space
    so the U^(2/k) factor cannot underflow before it has to.
    """
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr <= 0) or not np.all(np.isfinite(k_arr)):
        raise ValueError("chi requires every shape k > 0")
    scalar = k_arr.ndim == 0 and size is None
    if size is not None:
        k_arr = np.broadcast_to(k_arr, (size,) if np.isscalar(size) else size)
    elif k_arr.ndim == 0:
        k_arr = k_arr.reshape(())
    g_boost = _gamma_shape_ge_one(np.atleast_1d(k_arr) / 2.0 + 1.0, stream.rng)
    # log U with U ~ Uniform(0,1]: log1p(-random()) never hits -inf
    log_u = np.log1p(-stream.rng.random(g_boost.shape))
    log_gamma_var = np.log(g_boost) + (2.0 / np.atleast_1d(k_arr)) * log_u
    out = 0.5 * (math.log(2.0) + log_gamma_var)
    out = out.reshape(k_arr.shape)
    return float(out) if scalar else out


def chi(k, stream: SeededStream, size=None):
    """chi(k) variates (square roots of Gamma(k/2, scale 2) variates)."""
    return np.exp(log_chi(k, stream, size=size))


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as diagonal and off-diagonal arrays."""

    diag: np.ndarray
    offdiag: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        offdiag = np.asarray(self.offdiag, dtype=float)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)
        if self.validate:
            if diag.ndim != 1 or diag.size < 2:
                raise ValueError("diag must be a 1-d array of length >= 2")
            if offdiag.shape != (diag.size - 1,):
                raise ValueError("offdiag must have length n-1")
            if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
                raise ValueError("matrix entries must be finite")
            if np.any(offdiag < 0):
                raise ValueError("offdiag entries must be nonnegative (scaled chi variates)")

    @property
    def n(self) -> int:
        return self.diag.size

    def reversed(self) -> "TridiagonalMatrix":
        """Index-reversed copy; shares the spectrum with the original."""
        return TridiagonalMatrix(self.diag[::-1].copy(), self.offdiag[::-1].copy())

    def trace_h2(self) -> float:
        """Trace of the square: sum diag^2 + 2 sum offdiag^2 = sum lambda_i^2."""
        return float(np.dot(self.diag, self.diag) + 2.0 * np.dot(self.offdiag, self.offdiag))


def sample_matrix(params: EnsembleParams, stream: SeededStream) -> TridiagonalMatrix:
    """Draw one tridiagonal realization of the ensemble.

    diag[i] = g/sqrt(alpha); offdiag[0..n-2] = X_{n-1},...,X_1 scaled by
    1/sqrt(2*alpha), with X_j ~ chi(j*beta).  Draw order (normals first,
    then the chi block) is part of the reproducibility contract.
    """
    n, alpha, beta = params.n, params.alpha, params.beta
    g = stream.rng.standard_normal(n)
    diag = g / math.sqrt(alpha)
    shapes = np.arange(n - 1, 0, -1, dtype=float) * beta
    log_x = log_chi(shapes, stream)
    offdiag = np.exp(log_x - 0.5 * math.log(2.0 * alpha))
    return TridiagonalMatrix(diag, offdiag, validate=False)


def dump_matrix(tri: TridiagonalMatrix, path) -> None:
    """Write the plain-text dump: n, then diag, then offdiag, 17 sig digits."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{tri.n}\n")
        fh.write(" ".join(f"{v:.17g}" for v in tri.diag) + "\n")
        fh.write(" ".join(f"{v:.17g}" for v in tri.offdiag) + "\n")


def load_matrix(path) -> TridiagonalMatrix:
    """Read a matrix written by dump_matrix."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().split("\n")
    n = int(lines[0].strip())
    diag = np.array([float(v) for v in lines[1].split()], dtype=float)
    offdiag = np.array([float(v) for v in lines[2].split()], dtype=float)
    if diag.size != n:
        raise ValueError(f"dump header says n={n} but diag has {diag.size} entries")
    return TridiagonalMatrix(diag, offdiag)
