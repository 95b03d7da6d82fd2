import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from convexsplit import linalg as la
from convexsplit import testkit as tk

X = np.array([[0, 1], [1, 0]], dtype=complex)
seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 5)


def test_tensor_examples():
    assert np.allclose(la.tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(la.tensor(np.diag([1, 0]), np.diag([0.5, 0.5])), np.diag([0.5, 0.5, 0, 0]))
    xx = la.tensor(X, X)
    assert np.allclose(xx @ xx, np.eye(4))


def test_partial_trace_examples(rng):
    r, s = tk.random_density(2, seed=rng), tk.random_density(3, seed=rng)
    assert np.allclose(la.partial_trace(np.kron(r, s), (2, 3), [0]), r, atol=1e-12)
    assert np.allclose(la.partial_trace(np.kron(r, s), (2, 3), [1]), s, atol=1e-12)
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert np.allclose(la.partial_trace(np.outer(bell, bell), (2, 2), [0]), np.eye(2) / 2)


def test_partial_trace_bad_index():
    with pytest.raises(ValueError):
        la.partial_trace(np.eye(4), (2, 2), [2])


@given(seeds)
def test_partial_trace_preserves_trace(seed):
    x = tk.random_hermitian(12, seed)
    for keep in ([0], [1], [2], [0, 2]):
        assert abs(np.trace(la.partial_trace(x, (2, 3, 2), keep)) - np.trace(x)) < 1e-10


def test_spectral_fn_examples(rng):
    assert np.allclose(la.spectral_fn(np.diag([4.0, 1.0]), np.sqrt), np.diag([2, 1]))
    inv = la.spectral_fn(np.diag([0.5, 0.0]), lambda v: 1 / v, support_only=True)
    assert np.allclose(inv, np.diag([2, 0]))
    h = tk.random_hermitian(4, rng)
    prod = la.spectral_fn(h, np.exp) @ la.spectral_fn(h, lambda v: np.exp(-v))
    assert np.allclose(prod, np.eye(4), atol=1e-10)


def test_schatten_norm_examples(rng):
    assert la.schatten_norm(np.diag([1.0, -1.0]), 1) == pytest.approx(2)
    assert la.schatten_norm(tk.random_density(3, seed=rng), 1) == pytest.approx(1, abs=1e-12)
    assert la.schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5)
    with pytest.raises(ValueError):
        la.schatten_norm(np.eye(2), 0.5)


def test_trace_distance_examples(rng):
    r = tk.random_density(3, seed=rng)
    assert la.trace_distance(r, r) == pytest.approx(0, abs=1e-14)
    assert la.trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1)
    assert la.trace_distance(np.diag([1.0, 0]), np.diag([0.5, 0.5])) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        la.trace_distance(np.eye(2) / 2, np.eye(3) / 3)


def test_purified_distance_examples(rng):
    r = tk.random_density(3, seed=rng)
    assert la.purified_distance(r, r) == pytest.approx(0, abs=1e-7)
    assert la.purified_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1)
    assert la.fidelity(np.eye(2) / 2, np.diag([1.0, 0])) == pytest.approx(math.sqrt(0.5))


@given(seeds, dims)
def test_trace_distance_is_a_metric(seed, d):
    rng = np.random.default_rng(seed)
    r, s, o = (tk.random_density(d, seed=rng) for _ in range(3))
    assert la.trace_distance(r, s) <= la.trace_distance(r, o) + la.trace_distance(o, s) + 1e-10
    u = tk.random_unitary(d, rng)
    rot = la.trace_distance(u @ r @ u.conj().T, u @ s @ u.conj().T)
    assert abs(rot - la.trace_distance(r, s)) < 1e-10
    assert 0 <= la.purified_distance(r, s) <= 1


def test_positive_part_projector(rng):
    assert np.allclose(la.positive_part_projector(np.diag([2.0, 0]), np.eye(2)), np.diag([1, 0]))
    a = tk.random_psd(4, rng)
    assert np.allclose(la.positive_part_projector(a, a), 0)
    b = tk.random_psd(4, rng)
    p = la.positive_part_projector(a, b)
    w = np.linalg.eigvalsh(a - b)
    assert np.trace((a - b) @ p).real == pytest.approx(w[w > 0].sum(), abs=1e-10)


def test_nc_minimal_examples(rng):
    r = tk.random_density(3, seed=rng)
    assert la.nc_minimal_trace(r, r) == pytest.approx(1)
    assert la.nc_minimal_trace(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(0)


@given(seeds)
def test_nc_minimal_matches_threshold_tests(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.random(4) * 2, rng.random(4) * 2
    tests = np.array(np.meshgrid(*[[0, 1]] * 4)).reshape(4, -1).T
    brute = min(float(a @ (1 - t) + b @ t) for t in tests)
    assert la.nc_minimal_trace(np.diag(a), np.diag(b)) == pytest.approx(brute, abs=1e-10)


@given(seeds)
def test_nc_minimal_fact_items(seed):
    rng = np.random.default_rng(seed)
    a, b = tk.random_psd(4, rng), tk.random_psd(4, rng)
    m = la.nc_minimal_trace(a, b)
    # upper bound by Tr A^{1-s} B^s
    for s in np.arange(1, 10) / 10:
        assert m <= np.trace(la.mpow(a, 1 - s) @ la.mpow(b, s)).real + 1e-10
    # lower bound through the quotient
    assert m >= np.trace(a @ la.nc_quotient(b, a + b, 0.5)).real - 1e-10
    # monotone under partial trace
    ta, tb = la.partial_trace(a, (2, 2), [0]), la.partial_trace(b, (2, 2), [0])
    assert m <= la.nc_minimal_trace(ta, tb) + 1e-10
    # monotone in each argument
    assert m <= la.nc_minimal_trace(a + tk.random_psd(4, rng, 0.2), b) + 1e-10


def test_pinching_examples():
    assert np.allclose(la.pinching(np.eye(2), X), X)
    assert la.spec_count(np.eye(3)) == 1
    l = np.array([[1.0, 2 + 1j], [2 - 1j, 3.0]])
    assert np.allclose(la.pinching(np.diag([1.0, 2.0]), l), np.diag([1, 3]))
    assert la.spec_count(np.diag([1.0, 1.0 + 1e-12, 2.0])) == 2


@given(seeds, dims)
def test_pinching_inequality(seed, d):
    rng = np.random.default_rng(seed)
    h = tk.random_hermitian(d, rng)
    l = tk.random_psd(d, rng)
    gap = la.pinching(h, l) - l / la.spec_count(h)
    assert np.linalg.eigvalsh(la.hermitian_part(gap))[0] >= -1e-10


def test_nc_quotient_examples(rng):
    r = tk.random_density(3, seed=rng)
    for g in (0.0, 0.3, 1.0):
        assert np.allclose(la.nc_quotient(r, np.eye(3), g), r)
    q = la.nc_quotient(np.diag([1.0, 2.0]), np.diag([4.0, 0.5]), 0.5)
    assert np.allclose(q, np.diag([0.25, 4.0]))


@given(seeds)
def test_nc_quotient_eigenvalues_at_most_one(seed):
    rng = np.random.default_rng(seed)
    a, b = tk.random_psd(3, rng), tk.random_psd(3, rng)
    ev = np.linalg.eigvals(la.nc_quotient(a, a + b, 0.5)).real
    assert ev.max() <= 1 + 1e-10


def test_weighted_norm_examples(rng):
    s = tk.random_density(3, seed=rng)
    w = np.linalg.eigvalsh(s)
    for p in (1.0, 1.5, 2.0):
        assert la.weighted_lp_norm(s, p, 0.3, s) == pytest.approx(np.sum(w ** (p + 1)) ** (1 / p))
        x = tk.random_hermitian(3, rng)
        assert la.weighted_lp_norm(x, p, 0.5, np.eye(3) / 3) == pytest.approx(3 ** (-1 / p) * la.schatten_norm(x, p))


@given(seeds)
def test_weighted_norm_nondecreasing_in_p(seed):
    rng = np.random.default_rng(seed)
    s = tk.random_density(3, seed=rng)
    x = tk.random_hermitian(3, rng)
    vals = [la.weighted_lp_norm(x, p, 0.5, s) for p in np.linspace(1, 3, 9)]
    assert np.all(np.diff(vals) >= -1e-10)


def test_geometric_mean(rng):
    x, y = tk.random_density(3, seed=rng), tk.random_density(3, seed=rng)
    assert np.allclose(la.geometric_mean(x, x), x)
    assert np.allclose(la.geometric_mean(np.diag([1.0, 4.0]), np.diag([9.0, 1.0])), np.diag([3, 2]))
    assert np.allclose(la.geometric_mean(x, y), la.geometric_mean(y, x), atol=1e-10)


@given(seeds, st.integers(2, 8))
def test_eig_roundtrip(seed, d):
    h = tk.random_hermitian(d, seed)
    e = la.eig(h)
    assert np.all(np.diff(e.values) >= 0)
    assert np.linalg.norm(e.recompose() - h) <= 1e-9 * np.linalg.norm(h)
    assert np.allclose(e.vectors.conj().T @ e.vectors, np.eye(d), atol=1e-10)


def test_validation_errors():
    with pytest.raises(ValueError):
        la.check_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        la.check_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        la.check_density(np.diag([0.6, 0.6]))
    with pytest.raises(ValueError):
        la.check_test(np.diag([1.2, 0]))
    with pytest.raises(ValueError):
        la.as_operator(np.eye(4), (2, 3))
    # tiny negative eigenvalues are clamped on read
    r = la.check_density(np.diag([1 + 5e-11, -5e-11]))
    assert np.linalg.eigvalsh(r)[0] >= 0


@given(seeds)
def test_cq_trace_distance_invariance(seed):
    s = tk.random_cq(3, (2,), seed)
    dense, px = s.to_dense(), s.classical()
    for x in range(s.n):
        e = np.zeros((s.n, s.n))
        e[x, x] = 1
        lhs = la.schatten_norm(dense - np.kron(e, s.conditionals[x]), 1)
        assert lhs == pytest.approx(la.schatten_norm(px - e, 1), abs=1e-10)
