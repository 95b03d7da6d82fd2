import numpy as np
import pytest
from hypothesis import given, strategies as st

from convexsplit import linalg as la
from convexsplit import testkit as tk
from convexsplit.convex_split import ConvexSplitInstance, covering_error_exact

from conftest import BIT


def test_random_density_properties():
    pure = tk.random_density(4, rank=1, seed=1)
    assert np.trace(pure @ pure).real == pytest.approx(1, abs=1e-10)
    for seed in range(5):
        assert abs(np.trace(tk.random_density(3, seed=seed)) - 1) < 1e-12
    assert np.array_equal(tk.random_density(3, seed=7), tk.random_density(3, seed=7))
    assert not np.array_equal(tk.random_density(3, seed=7), tk.random_density(3, seed=8))
    with pytest.raises(ValueError):
        tk.random_density(3, rank=4, seed=0)
    with pytest.raises(ValueError):
        tk.random_density(3, rank=0, seed=0)


def test_random_bipartite():
    r = tk.random_bipartite(2, 3, seed=3)
    la.check_density(r, (2, 3))
    la.check_density(la.partial_trace(r, (2, 3), [0]))
    la.check_density(la.partial_trace(r, (2, 3), [1]))
    assert np.linalg.eigvalsh(r)[0] > 0
    prod = np.kron(la.partial_trace(r, (2, 3), [0]), la.partial_trace(r, (2, 3), [1]))
    assert la.trace_distance(r, prod) > 0


def test_generator_independent_streams():
    rng = np.random.default_rng(0)
    a = tk.random_density(2, seed=rng)
    b = tk.random_density(2, seed=rng)
    assert not np.allclose(a, b)


def test_classical_embed():
    assert np.allclose(tk.classical_embed(np.full((2, 2), 0.25)), np.eye(4) / 4)
    assert np.allclose(tk.classical_embed(BIT), np.diag([0.5, 0, 0, 0.5]))
    with pytest.raises(ValueError):
        tk.classical_embed([[1.2, -0.2], [0, 0]])


def test_covering_oracle_anchors():
    q = np.array([0.5, 0.5])
    assert tk.classical_covering_oracle(BIT, q, 1) == pytest.approx(0.5)
    assert tk.classical_covering_oracle(BIT, q, 2) == pytest.approx(0.25)
    prod = np.outer([0.3, 0.7], [0.6, 0.4])
    for M in range(1, 5):
        assert tk.classical_covering_oracle(prod, [0.3, 0.7], M) == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError):
        tk.classical_covering_oracle(BIT, q, 30)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_oracle_matches_spectral(seed, M):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(4)).reshape(2, 2)
    q = rng.dirichlet(np.ones(2))
    inst = ConvexSplitInstance(tk.classical_embed(p), np.diag(q).astype(complex), M)
    assert covering_error_exact(inst) == pytest.approx(tk.classical_covering_oracle(p, q, M), abs=1e-10)


def test_cq_state_validation():
    with pytest.raises(ValueError):
        tk.CqState([0.5, 0.6], [np.eye(2) / 2] * 2)
    with pytest.raises(ValueError):
        tk.CqState([1.0], [np.eye(2) / 2] * 2)
    s = tk.random_cq(3, (2, 2), seed=0)
    assert s.full_dims == (3, 2, 2)
    assert abs(np.trace(s.to_dense()) - 1) < 1e-12
    red = s.reduce([1])
    assert red.dims == (2,)
    assert np.allclose(red.marginal(), la.partial_trace(s.marginal(), (2, 2), [1]))
