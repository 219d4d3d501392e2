import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitemp import eig
from hitemp.acceptance import charpoly_eigenvalues
from hitemp.sampler import SeededStream, TridiagonalMatrix, sample_matrix
from hitemp.model import make_params


def tri(diag, offdiag):
    return TridiagonalMatrix(np.asarray(diag, float), np.asarray(offdiag, float))


def test_sturm_count_diagonal_matrix():
    t = tri([1.0, 2.0, 3.0], [0.0, 0.0])
    assert eig.sturm_count(t, 2.5) == 2


def test_sturm_count_outside_gershgorin():
    t = tri([1.0, -2.0, 0.5], [0.3, 1.1])
    lo, hi = eig.gershgorin(t)
    assert eig.sturm_count(t, lo - 1e-9) == 0
    assert eig.sturm_count(t, hi + 1e-9) == 3


def test_sturm_count_two_by_two():
    assert eig.sturm_count(tri([0.0, 0.0], [1.0]), 0.0) == 1  # eigenvalues +-1


def test_sturm_count_stability_at_coincident_shift():
    # a shift landing exactly on an eigenvalue must stay between the counts
    # a hair below and above it (the safeguarded pivot counts it as "<=")
    t = tri([1.0, 2.0, 3.0], [0.0, 0.0])
    h = 1e-9
    assert eig.sturm_count(t, 2.0 - h) <= eig.sturm_count(t, 2.0) <= eig.sturm_count(t, 2.0 + h)


def test_gershgorin_examples():
    assert eig.gershgorin(tri([5.0, 5.0], [0.0])) == (5.0, 5.0)
    assert eig.gershgorin(tri([0.0, 0.0], [1.0])) == (-1.0, 1.0)
    assert eig.gershgorin(tri([1.0, 2.0, 3.0], [1.0, 1.0])) == (0.0, 4.0)


def test_lambda_max_two_by_two():
    assert eig.lambda_max(tri([0.0, 0.0], [1.0]), 1e-12) == pytest.approx(1.0, abs=1e-12)
    assert eig.lambda_min(tri([0.0, 0.0], [1.0]), 1e-12) == pytest.approx(-1.0, abs=1e-12)


def test_lambda_max_three_by_three():
    # characteristic polynomial lambda^3 - 2 lambda = 0 -> extremes +-sqrt(2)
    t = tri([0.0, 0.0, 0.0], [1.0, 1.0])
    assert eig.lambda_max(t, 1e-12) == pytest.approx(math.sqrt(2), abs=1e-11)
    assert eig.lambda_min(t, 1e-12) == pytest.approx(-math.sqrt(2), abs=1e-11)


def test_lambda_max_matches_charpoly_oracle():
    rng = np.random.Generator(np.random.Philox(key=8))
    for _ in range(10):
        diag = rng.normal(size=8)
        off = np.abs(rng.normal(size=7))
        t = tri(diag, off)
        oracle = charpoly_eigenvalues(diag, off)
        assert eig.lambda_max(t, 1e-12) == pytest.approx(oracle[-1], abs=1e-9)


def test_invalid_tol():
    t = tri([0.0, 0.0], [1.0])
    with pytest.raises(ValueError):
        eig.lambda_max(t, -1e-9)
    with pytest.raises(ValueError):
        eig.full_spectrum(t, 0.0)


def test_full_spectrum_diagonal():
    got = eig.full_spectrum(tri([3.0, 1.0, 2.0], [0.0, 0.0]), 1e-12).eigenvalues
    assert got == pytest.approx([1.0, 2.0, 3.0], abs=1e-11)


def test_full_spectrum_two_by_two():
    got = eig.full_spectrum(tri([0.0, 0.0], [1.0]), 1e-12).eigenvalues
    assert got == pytest.approx([-1.0, 1.0], abs=1e-11)


def test_full_spectrum_trace_conservation():
    t = sample_matrix(make_params(80, 0.2), SeededStream(1, 0))
    tol = 1e-11
    spec = eig.full_spectrum(t, tol)
    norm = max(np.max(np.abs(t.diag)), np.max(t.offdiag))
    assert abs(spec.eigenvalues.sum() - t.diag.sum()) <= t.n * tol + 1e-10 * norm
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    lo, hi = eig.gershgorin(t)
    assert spec.eigenvalues[0] >= lo - tol and spec.eigenvalues[-1] <= hi + tol


def test_consistency_count_at_lambda_max():
    t = sample_matrix(make_params(30, 0.4), SeededStream(2, 0))
    tol = 1e-10
    lm = eig.lambda_max(t, tol)
    assert eig.sturm_count(t, lm + 2 * tol) == t.n


def _cubic_eigenvalues(d0, d1, d2, e0, e1):
    """Closed-form roots of the 3x3 characteristic polynomial, integer entries.

    Exact integer discriminant logic resolves multiple roots (where the
    trigonometric formula is ill-conditioned); simple roots use the standard
    trigonometric solution of the depressed cubic.
    """
    a2 = -(d0 + d1 + d2)
    a1 = d0 * d1 + d0 * d2 + d1 * d2 - e0 * e0 - e1 * e1
    a0 = -(d0 * d1 * d2 - d0 * e1 * e1 - d2 * e0 * e0)
    disc = 18 * a2 * a1 * a0 - 4 * a2**3 * a0 + a2 * a2 * a1 * a1 - 4 * a1**3 - 27 * a0 * a0
    d_zero = a2 * a2 - 3 * a1
    if disc == 0:
        if d_zero == 0:
            return np.full(3, -a2 / 3.0)
        double = (9 * a0 - a2 * a1) / (2.0 * d_zero)
        simple = (4 * a2 * a1 - 9 * a0 - a2**3) / float(d_zero)
        return np.sort([double, double, simple])
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    m = 2.0 * math.sqrt(-p / 3.0)
    theta = math.acos(max(-1.0, min(1.0, 3.0 * q / (p * m)))) / 3.0
    shift = -a2 / 3.0
    roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
    return np.sort(roots)


def test_all_integer_three_by_three_against_cubic_formula():
    vals = range(-2, 3)
    for d0, d1, d2 in itertools.product(vals, repeat=3):
        for e0, e1 in itertools.product((0, 1, 2), repeat=2):
            t = tri([d0, d1, d2], [e0, e1])
            got = eig.full_spectrum(t, 1e-12).eigenvalues
            want = _cubic_eigenvalues(d0, d1, d2, e0, e1)
            assert np.max(np.abs(got - want)) <= 1e-9, (d0, d1, d2, e0, e1)


@settings(max_examples=60, deadline=None)
@given(
    diag=st.lists(st.floats(-5, 5), min_size=2, max_size=10),
    seed=st.integers(0, 2**31),
    x=st.floats(-8, 8),
    y=st.floats(-8, 8),
)
def test_sturm_monotone_in_shift(diag, seed, x, y):
    rng = np.random.default_rng(seed)
    off = rng.uniform(0.0, 3.0, size=len(diag) - 1)
    t = tri(diag, off)
    lo, hi = sorted((x, y))
    assert eig.sturm_count(t, lo) <= eig.sturm_count(t, hi)


def test_batch_matches_scalar_paths():
    rng = np.random.Generator(np.random.Philox(key=77))
    diags = rng.normal(size=(6, 12))
    offs = np.abs(rng.normal(size=(6, 11)))
    lm = eig.lambda_max_batch(diags, offs, 1e-11)
    spectra = eig.batch_spectra(diags, offs, 1e-11)
    for i in range(6):
        t = tri(diags[i], offs[i])
        assert lm[i] == eig.lambda_max(t, 1e-11)
        assert np.array_equal(spectra[i], eig.full_spectrum(t, 1e-11).eigenvalues)


def test_batch_lane_independence():
    # a lane's result must not depend on what else is in the batch
    rng = np.random.Generator(np.random.Philox(key=78))
    diags = rng.normal(size=(5, 9))
    offs = np.abs(rng.normal(size=(5, 8)))
    full = eig.lambda_max_batch(diags, offs, 1e-11)
    solo = eig.lambda_max_batch(diags[2:3], offs[2:3], 1e-11)
    assert full[2] == solo[0]


def test_counts_abs_at_or_above():
    t = tri([1.0, 2.0, 3.0], [0.0, 0.0])
    d = t.diag[None, :]
    o = t.offdiag[None, :]
    assert eig.counts_abs_at_or_above(d, o, 2.5)[0] == 1
    assert eig.counts_abs_at_or_above(d, o, 0.5)[0] == 3
    assert eig.counts_abs_at_or_above(d, o, 10.0)[0] == 0
