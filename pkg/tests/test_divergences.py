import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from convexsplit import divergences as dv
from convexsplit import linalg as la
from convexsplit import testkit as tk

seeds = st.integers(0, 2**32 - 1)
P0 = np.diag([1.0, 0.0])
HALF = np.eye(2) / 2
Q34 = np.diag([0.75, 0.25])


def test_relative_entropy_examples(rng):
    r = tk.random_density(3, seed=rng)
    assert dv.relative_entropy(r, r) == pytest.approx(0, abs=1e-12)
    assert dv.relative_entropy(P0, HALF) == pytest.approx(math.log(2))
    assert dv.relative_entropy(HALF, P0) == math.inf


@given(seeds)
def test_klein(seed):
    rng = np.random.default_rng(seed)
    r, s = tk.random_density(3, seed=rng), tk.random_density(3, seed=rng)
    assert dv.relative_entropy(r, s) >= -1e-12
    assert dv.relative_entropy_variance(r, s) >= -1e-12


def test_variance_examples(rng):
    r = tk.random_density(3, seed=rng)
    assert dv.relative_entropy_variance(r, r) == pytest.approx(0, abs=1e-12)
    d = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    want = 0.75 * math.log(1.5) ** 2 + 0.25 * math.log(0.5) ** 2 - d * d
    assert dv.relative_entropy_variance(Q34, HALF) == pytest.approx(want)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9, 1.5, 2.0, 3.0])
def test_renyi_bit_examples(alpha):
    assert dv.petz_renyi(P0, HALF, alpha) == pytest.approx(math.log(2))
    assert dv.sandwiched_renyi(P0, HALF, alpha) == pytest.approx(math.log(2))


def test_renyi_alpha_one_rejected():
    with pytest.raises(ValueError):
        dv.petz_renyi(HALF, HALF, 1.0)
    with pytest.raises(ValueError):
        dv.sandwiched_renyi(HALF, HALF, 1.0)


def test_sandwiched_support_violation():
    assert dv.sandwiched_renyi(HALF, P0, 1.5) == math.inf
    assert dv.petz_renyi(HALF, P0, 2.0) == math.inf


@given(seeds)
def test_petz_monotone_in_alpha_commuting(seed):
    rng = np.random.default_rng(seed)
    p, q = np.diag(rng.dirichlet(np.ones(4))), np.diag(rng.dirichlet(np.ones(4)))
    vals = [dv.petz_renyi(p, q, a) for a in (0.2, 0.5, 0.8, 0.999, 1.001, 1.5, 2.0, 3.0)]
    assert np.all(np.diff(vals) >= -1e-10)


@given(seeds)
def test_sandwiched_below_petz(seed):
    rng = np.random.default_rng(seed)
    r, s = tk.random_density(3, seed=rng), tk.random_density(3, seed=rng)
    for a in (1.2, 1.5, 2.0):
        assert dv.sandwiched_renyi(r, s, a) <= dv.petz_renyi(r, s, a) + 1e-9
    p, q = np.diag(rng.dirichlet(np.ones(3))), np.diag(rng.dirichlet(np.ones(3)))
    assert dv.sandwiched_renyi(p, q, 1.7) == pytest.approx(dv.petz_renyi(p, q, 1.7), abs=1e-10)


@pytest.mark.parametrize("eps", np.arange(1, 10) / 10)
def test_dh_identical_states(eps, rng):
    r = tk.random_density(3, seed=rng)
    assert dv.hypothesis_testing_divergence(r, r, eps) == pytest.approx(-math.log(1 - eps), abs=1e-10)


def test_dh_bit_example():
    t = dv.neyman_pearson_test(P0, HALF, 0.5)
    assert t.value == pytest.approx(math.log(4), abs=1e-10)
    assert np.allclose(t.test, np.diag([0.5, 0]), atol=1e-10)


def _dh_brute(p, q, eps):
    # the optimal commuting test is a likelihood-ratio threshold test with
    # one fractional weight on the boundary ratio
    ratio = np.where(q > 0, p / np.where(q > 0, q, 1), np.inf)
    best = math.inf
    for t in np.unique(ratio):
        above, at = ratio > t, ratio == t
        need = (1 - eps) - p[above].sum()
        mass = p[at].sum()
        if need < -1e-15 or need > mass + 1e-15:
            continue
        kappa = need / mass if mass > 0 else 0.0
        best = min(best, q[above].sum() + kappa * q[at].sum())
    return -math.log(best)


@given(seeds, st.floats(0.05, 0.95))
def test_dh_matches_commuting_search(seed, eps):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    assert dv.hypothesis_testing_divergence(np.diag(p), np.diag(q), eps) == pytest.approx(
        _dh_brute(p, q, eps), abs=1e-8)


@given(seeds, st.floats(0.05, 0.95))
def test_dh_certificate_and_dpi(seed, eps):
    rng = np.random.default_rng(seed)
    r, s = tk.random_density(3, seed=rng), tk.random_density(3, seed=rng)
    t = dv.neyman_pearson_test(r, s, eps)
    la.check_test(t.test)
    assert -math.log(np.trace(s @ t.test).real) == pytest.approx(t.value, abs=1e-10)
    assert np.trace(r @ t.test).real == pytest.approx(1 - eps, abs=1e-10)
    assert dv.hypothesis_testing_divergence(la.pinching(s, r), s, eps) <= t.value + 1e-8
    assert t.value >= -math.log(1 - eps) - 1e-10


@given(seeds)
def test_dh_monotone_in_eps(seed):
    rng = np.random.default_rng(seed)
    r, s = tk.random_density(3, seed=rng), tk.random_density(3, seed=rng)
    vals = [dv.hypothesis_testing_divergence(r, s, e) for e in np.linspace(0.05, 0.95, 10)]
    assert np.all(np.diff(vals) >= -1e-10)


def test_dh_eps_range():
    with pytest.raises(ValueError):
        dv.hypothesis_testing_divergence(HALF, HALF, 0.0)
    with pytest.raises(ValueError):
        dv.info_spectrum_divergence(HALF, HALF, 1.0)


def test_info_spectrum_examples(rng):
    assert dv.info_spectrum_divergence(Q34, HALF, 0.3) == pytest.approx(math.log(1.5), abs=1e-8)
    r = tk.random_density(3, seed=rng)
    for eps in (0.1, 0.5, 0.9):
        assert dv.info_spectrum_divergence(r, r, eps) == pytest.approx(0, abs=1e-8)


@given(seeds)
def test_info_spectrum_monotone_in_eps(seed):
    rng = np.random.default_rng(seed)
    p, q = np.diag(rng.dirichlet(np.ones(4))), np.diag(rng.dirichlet(np.ones(4)))
    vals = [dv.info_spectrum_divergence(p, q, e) for e in np.linspace(0.05, 0.95, 8)]
    assert np.all(np.diff(vals) >= -1e-8)


def test_inverse_normal_cdf():
    assert dv.inverse_normal_cdf(0.5) == pytest.approx(0, abs=1e-15)
    for e in (2.0**-20, 0.01, 0.2, 0.3):  # 1 - e exact in binary
        assert dv.inverse_normal_cdf(e) == pytest.approx(-dv.inverse_normal_cdf(1 - e), abs=1e-12)
    # oracle: integrate the Gaussian density up to the returned point
    x = dv.inverse_normal_cdf(0.975)
    mass = 0.5 + quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), 0, x, epsabs=1e-14)[0]
    assert mass == pytest.approx(0.975, abs=1e-12)
    assert x == pytest.approx(1.959964, abs=1e-5)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            dv.inverse_normal_cdf(bad)


def test_renyi_continuity_near_one(rng):
    for _ in range(20):
        r, s = tk.random_density(3, seed=rng), tk.random_density(3, seed=rng)
        r, s = 0.9 * r + 0.1 * np.eye(3) / 3, 0.9 * s + 0.1 * np.eye(3) / 3
        d = dv.relative_entropy(r, s)
        for a in (0.999, 1.001):
            assert abs(dv.petz_renyi(r, s, a) - d) <= 1e-2
            assert abs(dv.sandwiched_renyi(r, s, a) - d) <= 1e-2
