"""Optimized information quantities and the alternating fixed-point solver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .divergences import (
    neyman_pearson_curves,
    type2_from_curves,
    hypothesis_testing_divergence,
    petz_renyi,
    relative_entropy,
    sandwiched_renyi,
)
from .linalg import hermitian_part, mpow, partial_trace

FP_TOL = 1e-9
MAX_ITERS = 5000
RANK_MIX = 1e-12
BLOCH_STEP = 0.1

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def split_dims(rho: np.ndarray, tau: np.ndarray | None = None, dims: Sequence[int] | None = None) -> tuple[int, int]:
    """Resolve ``(dA, dB)`` from explicit dims or from the size of ``tau``."""
    n = rho.shape[0]
    if dims is not None:
        dA, dB = (int(d) for d in dims)
    elif tau is not None:
        dA = tau.shape[0]
        dB = n // dA
    else:
        raise ValueError("dims are required when tau is not given")
    if dA * dB != n:
        raise ValueError(f"dims ({dA}, {dB}) do not match side {n}")
    return dA, dB


def marginals(rho: np.ndarray, dims: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    return partial_trace(rho, dims, [0]), partial_trace(rho, dims, [1])


def generalized_mutual_information(rho: np.ndarray, tau: np.ndarray, dims: Sequence[int] | None = None) -> float:
    """``D(rho_AB || tau_A ⊗ rho_B)``; the mutual information when ``tau = rho_A``."""
    dA, dB = split_dims(rho, tau, dims)
    rho_B = partial_trace(rho, (dA, dB), [1])
    return relative_entropy(rho, np.kron(tau, rho_B))


def mutual_information(rho: np.ndarray, dims: Sequence[int]) -> float:
    rho_A, _ = marginals(rho, dims)
    return generalized_mutual_information(rho, rho_A, dims)


def petz_up_information(rho: np.ndarray, alpha: float, dims: Sequence[int]) -> float:
    """Petz divergence of ``rho_AB`` against the product of its marginals."""
    rho_A, rho_B = marginals(rho, dims)
    return petz_renyi(rho, np.kron(rho_A, rho_B), alpha)


@dataclass(frozen=True)
class FixedPointResult:
    value: float
    tau_star: np.ndarray
    sigma_star: np.ndarray
    residual: float
    iterations: int
    converged: bool
    perturbation: float = 0.0
    history: tuple = field(default=(), repr=False)


def _regularize(rho: np.ndarray) -> tuple[np.ndarray, float]:
    if np.linalg.eigvalsh(hermitian_part(rho))[0] > RANK_MIX:
        return rho, 0.0
    d = len(rho)
    return (rho + RANK_MIX * np.eye(d)) / (1 + RANK_MIX * d), RANK_MIX


def _normalize(x: np.ndarray) -> np.ndarray:
    x = hermitian_part(x)
    return x / np.trace(x).real


class _Objective:
    """Evaluates ``Q^alpha`` with ``Q = (tau⊗sigma)^s rho (tau⊗sigma)^s``."""

    def __init__(self, rho, dims, alpha):
        self.rho, self.dims, self.alpha = rho, tuple(dims), alpha
        self.s = (1 - alpha) / (2 * alpha)

    def power(self, tau, sigma):
        w = np.kron(mpow(tau, self.s), mpow(sigma, self.s))
        return mpow(hermitian_part(w @ self.rho @ w), self.alpha)

    def value(self, qa) -> float:
        return math.log(np.trace(qa).real) / (self.alpha - 1)

    def marginal(self, qa, side: int) -> np.ndarray:
        """Normalized ``Tr_B Q^alpha`` (side 0) or ``Tr_A Q^alpha`` (side 1)."""
        return _normalize(partial_trace(qa, self.dims, [side]))


def _defect(x: np.ndarray, target: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(hermitian_part(x - target))).sum())


def _block_update(x: np.ndarray, grad_marginal: np.ndarray, alpha: float) -> np.ndarray:
    # the fixed point x ∝ marginal is preserved; for commuting inputs this
    # lands on the block minimizer in one step
    h = mpow(x, (alpha - 1) / 2)
    return _normalize(mpow(hermitian_part(h @ grad_marginal @ h), 1 / alpha))


def _descend(obj: _Objective, tau, sigma, side, beta, f0, qa0):
    """One damped, backtracked update of tau (side 0) or sigma (side 1)."""
    current = tau if side == 0 else sigma
    cand = _block_update(current, obj.marginal(qa0, side), obj.alpha)
    b = beta
    for _ in range(40):
        trial = _normalize((1 - b) * current + b * cand)
        t, s = (trial, sigma) if side == 0 else (tau, trial)
        qa = obj.power(t, s)
        f = obj.value(qa)
        # compare Tr Q^alpha itself: 1/(alpha-1) would amplify rounding near alpha=1
        if np.trace(qa).real <= np.trace(qa0).real * (1 + 1e-14):
            return t, s, f, qa, True
        b /= 2
    return tau, sigma, f0, qa0, False


def _solve(rho, dims, alpha, tau0, sigma0, sides, tol, max_iters):
    if alpha <= 1:
        raise ValueError("the fixed-point solver needs alpha > 1")
    rho, pert = _regularize(rho)
    obj = _Objective(rho, dims, alpha)
    tau, sigma = _normalize(tau0), _normalize(sigma0)
    qa = obj.power(tau, sigma)
    f = obj.value(qa)
    history = [f]
    residual = math.inf
    it = 0
    for it in range(max_iters + 1):
        residual = max(_defect(x, obj.marginal(qa, k)) for k, x in ((0, tau), (1, sigma)) if k in sides)
        if residual <= tol or it == max_iters:
            break
        beta = 1.0 if residual < 1e-4 else 0.5
        moved = False
        for side in sides:
            tau, sigma, f, qa, ok = _descend(obj, tau, sigma, side, beta, f, qa)
            moved |= ok
        history.append(f)
        if not moved:
            break
    return FixedPointResult(f, tau, sigma, residual, it, residual <= tol, pert, tuple(history))


def sandwiched_renyi_information(
    rho: np.ndarray,
    tau: np.ndarray,
    alpha: float,
    dims: Sequence[int] | None = None,
    sigma0: np.ndarray | None = None,
    tol: float = FP_TOL,
    max_iters: int = MAX_ITERS,
) -> FixedPointResult:
    """``inf_sigma D*_alpha(rho_AB || tau_A ⊗ sigma_B)`` for ``alpha > 1``.

    Iterates the sigma fixed-point equation with tau held fixed. Every
    returned ``sigma_star`` is feasible, so ``value`` is an upper bound on
    the infimum even when ``converged`` is false.
    """
    dA, dB = split_dims(rho, tau, dims)
    if sigma0 is None:
        sigma0 = partial_trace(rho, (dA, dB), [1])
        sigma0 = _regularize(sigma0)[0]
    res = _solve(rho, (dA, dB), alpha, tau, sigma0, (1,), tol, max_iters)
    # report the objective against the caller's rho and tau
    value = sandwiched_renyi(rho, np.kron(tau, res.sigma_star), alpha)
    return FixedPointResult(value, tau, res.sigma_star, res.residual, res.iterations, res.converged,
                            res.perturbation, res.history)


def doubly_minimized_info(
    rho: np.ndarray,
    alpha: float,
    dims: Sequence[int],
    tol: float = FP_TOL,
    max_iters: int = MAX_ITERS,
    start: tuple[np.ndarray, np.ndarray] | None = None,
) -> FixedPointResult:
    """``inf_{tau, sigma} D*_alpha(rho_AB || tau_A ⊗ sigma_B)`` for ``alpha > 1``.

    Alternates damped updates of tau and sigma (each backtracked so the
    objective never increases) from the marginals until both fixed-point
    equations hold to ``tol`` in trace norm.
    """
    dims = split_dims(rho, None, dims)
    if start is None:
        rr = _regularize(rho)[0]
        start = marginals(rr, dims)
    return _solve(rho, dims, alpha, start[0], start[1], (0, 1), tol, max_iters)


def sandwiched_renyi_information_curve(
    rho: np.ndarray, tau: np.ndarray, alphas: Sequence[float], dims: Sequence[int] | None = None
) -> list[FixedPointResult]:
    """I*_alpha over a grid of alphas, warm-starting each solve from the previous one."""
    out = []
    sigma = None
    for a in alphas:
        r = sandwiched_renyi_information(rho, tau, a, dims, sigma0=sigma)
        sigma = r.sigma_star
        out.append(r)
    return out


def doubly_minimized_curve(rho: np.ndarray, alphas: Sequence[float], dims: Sequence[int]) -> list[FixedPointResult]:
    out = []
    start = None
    for a in alphas:
        r = doubly_minimized_info(rho, a, dims, start=start)
        start = (r.tau_star, r.sigma_star)
        out.append(r)
    return out


def bloch_state(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 0.5 * (np.eye(2) + np.tensordot(r, PAULI, axes=1))


def bloch_grid(step: float = BLOCH_STEP, shrink: float = 0.999) -> np.ndarray:
    ticks = np.round(np.arange(-1, 1 + step / 2, step), 12)
    pts = np.stack(np.meshgrid(ticks, ticks, ticks, indexing="ij"), -1).reshape(-1, 3)
    return shrink * pts[np.linalg.norm(pts, axis=1) <= 1 + 1e-12]


@dataclass(frozen=True)
class HypothesisTestingInfo:
    value: float
    sigma: np.ndarray
    certified: bool
    grid_value: float = math.nan


def hypothesis_testing_information_many(
    rho: np.ndarray,
    tau: np.ndarray,
    eps_values: Sequence[float],
    dims: Sequence[int] | None = None,
    certified: bool | None = None,
    grid_step: float = BLOCH_STEP,
) -> list[HypothesisTestingInfo]:
    """``inf_sigma D_h^eps(rho_AB || tau_A ⊗ sigma_B)`` for several eps.

    For a qubit B the infimum is searched over the Bloch ball: a coarse
    grid seeds a Nelder-Mead refinement. The type-II error is concave in
    sigma, so this is a concave maximization and a local optimum is
    global. The grid pass is shared by all eps. Larger B falls back to
    ``sigma_B = rho_B``, which only gives an upper bound
    (``certified=False``).
    """
    dA, dB = split_dims(rho, tau, dims)
    rho_B = partial_trace(rho, (dA, dB), [1])
    if certified is None:
        certified = dB == 2
    if not certified or dB != 2:
        return [HypothesisTestingInfo(hypothesis_testing_divergence(rho, np.kron(tau, rho_B), e), rho_B, False)
                for e in eps_values]

    pts = bloch_grid(grid_step)
    sigmas = 0.5 * (np.eye(2)[None] + np.einsum("nk,kij->nij", pts, PAULI))
    stack = np.einsum("ij,nkl->nikjl", tau, sigmas).reshape(len(pts), 2 * dA, 2 * dA)
    g, t2 = neyman_pearson_curves(rho, stack)

    out = []
    for eps in eps_values:
        best = pts[int(np.argmax(type2_from_curves(g, t2, eps)))]

        def f(x, eps=eps):
            n = np.linalg.norm(x)
            x = x / n if n > 1 else x
            return hypothesis_testing_divergence(rho, np.kron(tau, bloch_state(x)), eps)

        grid_value = f(best)
        simplex = np.vstack([best, best + np.diag([grid_step / 2] * 3)])
        res = minimize(f, best, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-6, "fatol": 1e-11, "maxiter": 1000})
        x = res.x if res.fun < grid_value else best
        n = np.linalg.norm(x)
        x = x / n if n > 1 else x
        out.append(HypothesisTestingInfo(float(min(res.fun, grid_value)), bloch_state(x), True, float(grid_value)))
    return out


def hypothesis_testing_information(
    rho: np.ndarray,
    tau: np.ndarray,
    eps: float,
    dims: Sequence[int] | None = None,
    certified: bool | None = None,
    grid_step: float = BLOCH_STEP,
) -> HypothesisTestingInfo:
    """``inf_sigma D_h^eps(rho_AB || tau_A ⊗ sigma_B)``; see :func:`hypothesis_testing_information_many`."""
    return hypothesis_testing_information_many(rho, tau, [eps], dims, certified, grid_step)[0]
