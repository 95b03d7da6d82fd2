import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convexsplit import divergences as dv
from convexsplit import information as info
from convexsplit import linalg as la
from convexsplit import testkit as tk

from conftest import BIT

seeds = st.integers(0, 2**32 - 1)


def _product(rng, dA=2, dB=2):
    a, b = tk.random_density(dA, seed=rng), tk.random_density(dB, seed=rng)
    return a, b, np.kron(a, b)


def test_generalized_mutual_information(rng):
    a, b, prod = _product(rng)
    assert info.generalized_mutual_information(prod, a, (2, 2)) == pytest.approx(0, abs=1e-12)
    bit = tk.classical_embed(BIT)
    assert info.generalized_mutual_information(bit, np.eye(2) / 2, (2, 2)) == pytest.approx(math.log(2))
    r = tk.random_bipartite(2, 3, rng)
    assert info.mutual_information(r, (2, 3)) >= -1e-12


def test_sandwiched_information_product(rng):
    a, b, prod = _product(rng)
    res = info.sandwiched_renyi_information(prod, a, 1.5, (2, 2))
    assert res.value == pytest.approx(0, abs=1e-9)
    assert np.allclose(res.sigma_star, b, atol=1e-6)


def test_sandwiched_information_bit_scan():
    bit = tk.classical_embed(BIT)
    res = info.sandwiched_renyi_information(bit, np.eye(2) / 2, 2.0, (2, 2))
    # oracle: D_2(p || u x q) = log sum_a p(a,a)^2 / (1/2 q_a), scanned over q
    qs = np.linspace(0.01, 0.99, 9801)
    scan = np.log(0.25 / (0.5 * qs) + 0.25 / (0.5 * (1 - qs))).min()
    assert scan == pytest.approx(math.log(2), abs=1e-12)
    assert res.value == pytest.approx(scan, abs=1e-6)


@settings(max_examples=15)
@given(seeds, st.sampled_from([1.2, 1.5, 2.0]))
def test_sandwiched_information_below_feasible_point(seed, alpha):
    rng = np.random.default_rng(seed)
    r = tk.random_bipartite(2, 2, rng)
    t = tk.random_density(2, seed=rng)
    res = info.sandwiched_renyi_information(r, t, alpha, (2, 2))
    rho_B = la.partial_trace(r, (2, 2), [1])
    assert res.converged
    assert res.value <= dv.sandwiched_renyi(r, np.kron(t, rho_B), alpha) + 1e-9


def test_petz_up_information(rng):
    _, _, prod = _product(rng)
    assert info.petz_up_information(prod, 0.7, (2, 2)) == pytest.approx(0, abs=1e-12)
    bit = tk.classical_embed(BIT)
    assert info.petz_up_information(bit, 0.5, (2, 2)) == pytest.approx(math.log(2))


@given(seeds)
def test_petz_up_monotone_commuting(seed):
    rng = np.random.default_rng(seed)
    p = tk.classical_embed(rng.dirichlet(np.ones(4)).reshape(2, 2))
    vals = [info.petz_up_information(p, a, (2, 2)) for a in (0.2, 0.5, 0.8, 1.2, 1.6, 2.0)]
    assert np.all(np.diff(vals) >= -1e-10)


def test_doubly_minimized_product(rng):
    a, b, prod = _product(rng)
    res = info.doubly_minimized_info(prod, 1.5, (2, 2))
    assert res.converged and res.residual <= 1e-10
    assert res.value == pytest.approx(0, abs=1e-10)
    assert np.allclose(res.tau_star, a, atol=1e-8)
    assert np.allclose(res.sigma_star, b, atol=1e-8)


@settings(max_examples=10)
@given(seeds, st.sampled_from([1.25, 1.5, 2.0]))
def test_doubly_minimized_certificate(seed, alpha):
    r = tk.random_bipartite(2, 2, seed)
    res = info.doubly_minimized_info(r, alpha, (2, 2))
    assert res.converged and res.residual <= info.FP_TOL
    assert np.all(np.diff(res.history) <= 1e-10)
    rho_A = la.partial_trace(r, (2, 2), [0])
    assert res.value <= info.sandwiched_renyi_information(r, rho_A, alpha, (2, 2)).value + 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_doubly_minimized_additive(seed):
    rng = np.random.default_rng(seed)
    r, w = tk.random_bipartite(2, 2, rng), tk.random_bipartite(2, 2, rng)
    joint = la.permute_factors(np.kron(r, w), (2, 2, 2, 2), (0, 2, 1, 3))
    a = 1.5
    lhs = info.doubly_minimized_info(joint, a, (4, 4)).value
    rhs = info.doubly_minimized_info(r, a, (2, 2)).value + info.doubly_minimized_info(w, a, (2, 2)).value
    assert lhs == pytest.approx(rhs, abs=1e-6)


def test_rank_deficient_input_reports_perturbation():
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    res = info.doubly_minimized_info(np.outer(bell, bell).astype(complex), 2.0, (2, 2))
    assert res.perturbation > 0
    assert np.isfinite(res.value)


def test_hypothesis_testing_information_product(rng):
    a, b, prod = _product(rng)
    for eps in (0.1, 0.3):
        h = info.hypothesis_testing_information(prod, a, eps, (2, 2))
        assert h.certified
        assert h.value == pytest.approx(-math.log(1 - eps), abs=1e-6)


@settings(max_examples=8)
@given(seeds)
def test_hypothesis_testing_information_grid(seed):
    rng = np.random.default_rng(seed)
    r, t = tk.random_bipartite(2, 2, rng), tk.random_density(2, seed=rng)
    rho_B = la.partial_trace(r, (2, 2), [1])
    h = info.hypothesis_testing_information(r, t, 0.2, (2, 2))
    assert h.value <= h.grid_value + 1e-12
    assert h.value <= dv.hypothesis_testing_divergence(r, np.kron(t, rho_B), 0.2) + 1e-9


def test_hypothesis_testing_information_upper_mode(rng):
    r = tk.random_bipartite(2, 3, rng)
    t = la.partial_trace(r, (2, 3), [0])
    h = info.hypothesis_testing_information(r, t, 0.2, (2, 3))
    assert not h.certified
    rho_B = la.partial_trace(r, (2, 3), [1])
    assert h.value == pytest.approx(dv.hypothesis_testing_divergence(r, np.kron(t, rho_B), 0.2))


@given(seeds, st.sampled_from([-1.0, -0.5, -0.1]))
def test_log_convexity(seed, s):
    rng = np.random.default_rng(seed)
    t1, t2, s1, s2 = (tk.random_density(2, seed=rng) for _ in range(4))
    k = tk.random_psd(4, rng)

    def lf(t, g):
        return math.log(np.trace(k @ la.mpow(np.kron(t, g), s)).real)

    assert lf((t1 + t2) / 2, (s1 + s2) / 2) <= 0.5 * lf(t1, s1) + 0.5 * lf(t2, s2) + 1e-9


@given(seeds, st.floats(1.05, 2.0))
def test_joint_convexity(seed, a):
    rng = np.random.default_rng(seed)
    r = tk.random_bipartite(2, 2, rng)
    t1, t2, s1, s2 = (tk.random_density(2, seed=rng) for _ in range(4))

    def f(t, g):
        return dv.sandwiched_renyi(r, np.kron(t, g), a)

    assert f((t1 + t2) / 2, (s1 + s2) / 2) <= 0.5 * (f(t1, s1) + f(t2, s2)) + 1e-9
