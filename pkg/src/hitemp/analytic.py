"""Semicircle law, logarithmic potentials, the largest-particle rate function
and the empirical-measure energy functional.

Closed forms carry the load; every one of them has a quadrature twin built on
the substitution y = 2 sin(theta) (which absorbs the square-root edge factor)
plus an explicit split at the logarithmic singularity.  Extended-real results
are returned as explicit +-inf markers and never fed back into arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureSpec, adaptive_quad


class _Semicircle:
    """Marker object selecting the semicircle law as a potential's measure."""

    def __repr__(self):
        return "SEMICIRCLE"


SEMICIRCLE = _Semicircle()


def semicircle_pdf(x):
    """Density sqrt(4 - x^2)/(2*pi) on [-2, 2], zero outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) <= 2.0
    out[inside] = np.sqrt(4.0 - x[inside] ** 2) / (2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def semicircle_cdf(x):
    """Distribution function: 1/2 + x*sqrt(4-x^2)/(4*pi) + asin(x/2)/pi."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -2.0, 2.0)
    out = 0.5 + xc * np.sqrt(4.0 - xc**2) / (4.0 * math.pi) + np.arcsin(xc / 2.0) / math.pi
    out = np.where(x <= -2.0, 0.0, np.where(x >= 2.0, 1.0, out))
    return float(out) if out.ndim == 0 else out


def semicircle_cdf_antiderivative(x):
    """Antiderivative of the cdf, normalized so it vanishes at -2.

    Used by the exact piecewise Wasserstein computation: polynomial plus
    arcsine terms, S(x) = x/2 - (4-x^2)^(3/2)/(12*pi)
    + (x*asin(x/2) + sqrt(4-x^2))/pi on [-2,2], S(-2)=0, S(2)=2.
    """
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -2.0, 2.0)
    s = (
        xc / 2.0
        - (4.0 - xc**2) ** 1.5 / (12.0 * math.pi)
        + (xc * np.arcsin(xc / 2.0) + np.sqrt(4.0 - xc**2)) / math.pi
    )
    s = np.where(x < -2.0, 0.0, s)
    s = np.where(x > 2.0, 2.0 + (x - 2.0), s)  # cdf is 1 beyond the edge
    return float(s) if s.ndim == 0 else s


def log_potential_semicircle(x: float) -> float:
    """Integral of log|x - y| against the semicircle law, in closed form.

    x^2/4 - 1/2 inside [-2, 2]; outside, the same minus
    |x|*sqrt(x^2-4)/4 - log((|x| + sqrt(x^2-4))/2).
    """
    ax = abs(float(x))
    if ax <= 2.0:
        return ax * ax / 4.0 - 0.5
    root = math.sqrt(ax * ax - 4.0)
    return ax * ax / 4.0 - 0.5 - (ax * root / 4.0 - math.log((ax + root) / 2.0))


def log_potential_semicircle_quad(x: float, spec: QuadratureSpec | None = None) -> float:
    """Quadrature twin of log_potential_semicircle.

    After y = 2 sin(theta) the integrand is log|x - 2 sin(theta)| weighted by
    (2/pi) cos^2(theta); the remaining log singularity at theta = asin(x/2)
    is handled by an explicit split.
    """
    spec = spec or QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11)
    x = float(x)

    def integrand(theta):
        diff = x - 2.0 * math.sin(theta)
        if diff == 0.0:
            return 0.0  # removable in the integral; node never lands here after split
        return math.log(abs(diff)) * (2.0 / math.pi) * math.cos(theta) ** 2

    points = ()
    if abs(x) < 2.0:
        points = (math.asin(x / 2.0),)
    return adaptive_quad(integrand, -math.pi / 2.0, math.pi / 2.0, spec, points=points)


def _atoms_of(mu) -> np.ndarray:
    atoms = getattr(mu, "atoms", mu)
    return np.asarray(atoms, dtype=float)


def phi(z: float, mu) -> float:
    """Log-potential field phi(z, mu) = int log|z - y| dmu(y) - z^2/4.

    mu is either the SEMICIRCLE marker or anything carrying equal-weight
    atoms (a DiscreteMeasure or a plain array).  Returns -inf when z sits
    exactly on an atom.
    """
    z = float(z)
    if mu is SEMICIRCLE:
        return log_potential_semicircle(z) - z * z / 4.0
    atoms = _atoms_of(mu)
    diffs = np.abs(z - atoms)
    if np.any(diffs == 0.0):
        return -math.inf
    return float(np.mean(np.log(diffs))) - z * z / 4.0


def phi_n(z: float, mu, n: int) -> float:
    """phi with the finite-n quadratic factor n/(n-1); phi_n <= phi pointwise."""
    if n < 2:
        raise ValueError(f"phi_n requires n >= 2, got {n}")
    base = phi(z, mu)
    if base == -math.inf:
        return -math.inf
    z = float(z)
    return base - (n / (n - 1.0) - 1.0) * z * z / 4.0


def rate_J(x: float) -> float:
    """Large-deviation rate of the largest particle at speed n*beta.

    +inf below 2; for x >= 2 the closed form
    x*sqrt(x^2-4)/4 - log((x + sqrt(x^2-4))/2), which is exactly
    -phi(x, semicircle) - 1/2 and vanishes at the edge x = 2.
    """
    x = float(x)
    if x < 2.0:
        return math.inf
    root = math.sqrt(x * x - 4.0)
    return x * root / 4.0 - math.log((x + root) / 2.0)


def rate_J_quad(x: float, spec: QuadratureSpec | None = None) -> float:
    """Quadrature twin of rate_J: -phi(x, sigma) - 1/2 with the integral done
    numerically."""
    x = float(x)
    if x < 2.0:
        return math.inf
    return x * x / 4.0 - 0.5 - log_potential_semicircle_quad(x, spec)


@dataclass(frozen=True)
class RateEvaluation:
    """One rate-function evaluation: location, J, phi and the method used."""

    x: float
    J: float  # +inf marker when x < 2
    phi: float
    method: str  # "closed_form" | "quadrature"


def evaluate_rate(x: float, method: str = "closed_form",
                  spec: QuadratureSpec | None = None) -> RateEvaluation:
    """Bundle (x, J(x), phi(x, sigma)) with provenance."""
    x = float(x)
    if method == "closed_form":
        phi_val = log_potential_semicircle(x) - x * x / 4.0
    elif method == "quadrature":
        phi_val = log_potential_semicircle_quad(x, spec) - x * x / 4.0
    else:
        raise ValueError(f"unknown method {method!r}")
    j = math.inf if x < 2.0 else -phi_val - 0.5
    if method == "closed_form":
        j = rate_J(x)  # algebraically simplified branch, exact at x = 2
    return RateEvaluation(x=x, J=j, phi=phi_val, method=method)


def _offdiag_log_mean(atoms: np.ndarray) -> float:
    """Mean of log|x_i - x_j| over ordered off-diagonal pairs.

    -inf (as a marker) if two atoms coincide exactly.
    """
    m = atoms.size
    total = 0.0
    with np.errstate(divide="ignore"):
        for i in range(1, m):
            diffs = atoms[i] - atoms[:i]
            if np.any(diffs == 0.0):
                return -math.inf
            total += float(np.sum(np.log(diffs)))
    return 2.0 * total / (m * (m - 1.0))


def energy_I(mu, variant: str = "normalized") -> float:
    """Empirical-measure energy functional over off-diagonal atom pairs.

    variant "paper" evaluates mean[(x^2+y^2)/2] - mean[log|x-y|]/2 - 3/8,
    which takes the value 3/4 at the semicircle law; variant "normalized"
    replaces (x^2+y^2)/2 by (x^2+y^2)/8 so the semicircle sits at 0.
    Diagonal pairs are excluded and the double sum is divided by m(m-1).
    Coincident atoms make the log term -inf, so the result is the +inf marker.
    """
    atoms = np.sort(_atoms_of(mu))
    m = atoms.size
    if m < 2:
        raise ValueError("energy_I needs a measure with at least 2 atoms")
    if variant not in ("paper", "normalized"):
        raise ValueError(f"unknown variant {variant!r}")
    m2 = float(np.mean(atoms**2))
    log_mean = _offdiag_log_mean(atoms)
    if log_mean == -math.inf:
        return math.inf
    quad_term = m2 if variant == "paper" else m2 / 4.0
    return quad_term - 0.5 * log_mean - 0.375
