"""Seeded random instances and brute-force classical oracles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .linalg import check_density

ENUMERATION_BUDGET = 10**7


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_density(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Hilbert-Schmidt-induced random density matrix ``G G^† / Tr(G G^†)``."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_bipartite(dA: int, dB: int, seed=None) -> np.ndarray:
    """Full-rank random state on ``A ⊗ B``."""
    return random_density(dA * dB, seed=seed)


def random_psd(dim: int, seed=None, scale: float = 1.0) -> np.ndarray:
    """Random positive semidefinite matrix with trace ``scale * dim`` on average."""
    rng = _rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (g @ g.conj().T) / dim


def random_hermitian(dim: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_unitary(dim: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure(dim: int, seed=None) -> np.ndarray:
    """Random unit state vector."""
    rng = _rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_probability(n: int, seed=None) -> np.ndarray:
    return _rng(seed).dirichlet(np.ones(n))


@dataclass(frozen=True)
class CqState:
    """Classical-quantum state ``sum_x p(x) |x><x| ⊗ rho_x``.

    ``dims`` describes the quantum part; the classical register is
    prepended as factor 0 by :meth:`to_dense`.
    """

    probs: np.ndarray
    conditionals: tuple
    dims: tuple

    def __init__(self, probs, conditionals, dims: Sequence[int] | None = None):
        probs = np.asarray(probs, dtype=float)
        if probs.ndim != 1 or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
            raise ValueError("probs must be a probability vector")
        if len(conditionals) != len(probs):
            raise ValueError("one conditional state per symbol is required")
        side = np.asarray(conditionals[0]).shape[0]
        dims = (side,) if dims is None else tuple(int(d) for d in dims)
        conds = tuple(check_density(c, dims) for c in conditionals)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "conditionals", conds)
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.probs)

    def to_dense(self) -> np.ndarray:
        n, d = self.n, self.conditionals[0].shape[0]
        out = np.zeros((n * d, n * d), dtype=complex)
        for x, (p, c) in enumerate(zip(self.probs, self.conditionals)):
            out[x * d:(x + 1) * d, x * d:(x + 1) * d] = p * c
        return out

    @property
    def full_dims(self) -> tuple:
        return (self.n,) + self.dims

    def marginal(self) -> np.ndarray:
        """Average quantum state ``sum_x p(x) rho_x``."""
        return sum(p * c for p, c in zip(self.probs, self.conditionals))

    def classical(self) -> np.ndarray:
        return np.diag(self.probs).astype(complex)

    def reduce(self, keep: Sequence[int]) -> "CqState":
        """Partial trace of the quantum part, keeping factors ``keep``."""
        from .linalg import partial_trace

        conds = [partial_trace(c, self.dims, keep) for c in self.conditionals]
        return CqState(self.probs, conds, [self.dims[k] for k in sorted(keep)])


def random_cq(n: int, dims: Sequence[int], seed=None) -> CqState:
    rng = _rng(seed)
    d = int(np.prod(dims))
    probs = random_probability(n, rng)
    return CqState(probs, [random_density(d, seed=rng) for _ in range(n)], dims)


def classical_embed(p) -> np.ndarray:
    """Diagonal density operator of a joint probability table.

    The table's shape gives the tensor dims.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("probability table has negative mass")
    if abs(p.sum() - 1) > 1e-12:
        raise ValueError("probability table does not sum to 1")
    return np.diag(p.ravel()).astype(complex)


def classical_covering_oracle(p_AB, q_A, M: int) -> float:
    """Total variation between the classical convex-split mixture and the product.

    Enumerates all ``|A|^M |B|`` outcomes.
    """
    p_AB = np.asarray(p_AB, dtype=float)
    q_A = np.asarray(q_A, dtype=float)
    nA, nB = p_AB.shape
    if M < 1:
        raise ValueError("M must be at least 1")
    if nA**M * nB > ENUMERATION_BUDGET:
        raise ValueError("enumeration budget exceeded")
    p_B = p_AB.sum(axis=0)
    # axes: a_1, ..., a_M, b
    mix = np.zeros((nA,) * M + (nB,))
    for m in range(M):
        factors = [q_A] * M
        term = reduce(np.multiply.outer, [f for k, f in enumerate(factors) if k != m], np.ones(()))
        term = np.multiply.outer(term, p_AB)  # axes: others..., a_m, b
        mix += np.moveaxis(term, M - 1, m)
    mix /= M
    prod = np.multiply.outer(reduce(np.multiply.outer, [q_A] * M, np.ones(())), p_B)
    return 0.5 * float(np.abs(mix - prod).sum())
