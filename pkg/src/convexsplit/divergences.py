"""Two-argument divergences between density operators (natural logarithms).

Support violations give ``math.inf`` instead of raising, since bound
evaluators compare against infinity as a matter of course.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .linalg import BOUNDARY_TOL, eig, hermitian_part, logm_psd, mpow, support_projector

NP_MAX_ITERS = 200
NP_TOL = 1e-12
NP_BOUNDARY_RTOL = 1e-9
DS_GRID = 400


def _support_violated(rho: np.ndarray, sigma: np.ndarray) -> bool:
    perp = np.eye(len(sigma)) - support_projector(sigma)
    return np.trace(perp @ rho).real > 1e-10


def _check_pair(rho, sigma):
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    return rho, sigma


def _check_alpha(alpha: float):
    if alpha <= 0 or alpha == 1:
        raise ValueError("alpha must be positive and different from 1 (use relative_entropy)")


def _check_eps(eps: float):
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")


def relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Umegaki relative entropy ``Tr rho (log rho - log sigma)``."""
    rho, sigma = _check_pair(rho, sigma)
    if _support_violated(rho, sigma):
        return math.inf
    w = np.linalg.eigvalsh(hermitian_part(rho))
    w = w[w > 1e-300]
    return float(np.sum(w * np.log(w)) - np.trace(rho @ logm_psd(sigma)).real)


def relative_entropy_variance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Second central moment ``Tr rho (log rho - log sigma)^2 - D^2``."""
    rho, sigma = _check_pair(rho, sigma)
    if _support_violated(rho, sigma):
        return math.inf
    l = logm_psd(rho) - logm_psd(sigma)
    d = np.trace(rho @ l).real
    return float(max(np.trace(rho @ l @ l).real - d**2, 0.0))


def petz_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """Petz divergence ``log Tr[rho^a sigma^(1-a)] / (a - 1)``."""
    rho, sigma = _check_pair(rho, sigma)
    _check_alpha(alpha)
    if alpha > 1 and _support_violated(rho, sigma):
        return math.inf
    q = np.trace(mpow(rho, alpha) @ mpow(sigma, 1 - alpha)).real
    if q <= 0:
        return math.inf
    return float(np.log(q) / (alpha - 1))


def sandwiched_quasi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """``Tr[(sigma^s rho sigma^s)^alpha]`` with ``s = (1-alpha)/(2 alpha)``."""
    s = mpow(sigma, (1 - alpha) / (2 * alpha))
    w = np.linalg.eigvalsh(hermitian_part(s @ rho @ s))
    w = np.clip(w, 0, None)
    return float(np.sum(w**alpha))


def sandwiched_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """Sandwiched divergence ``log Tr[(sigma^s rho sigma^s)^alpha] / (alpha - 1)``."""
    rho, sigma = _check_pair(rho, sigma)
    _check_alpha(alpha)
    if alpha > 1 and _support_violated(rho, sigma):
        return math.inf
    q = sandwiched_quasi(rho, sigma, alpha)
    if q <= 0:
        return math.inf
    return float(np.log(q) / (alpha - 1))


@dataclass(frozen=True)
class NeymanPearsonTest:
    """Optimal test for the hypothesis-testing divergence.

    ``test`` is ``{rho - t sigma > 0} + kappa * P0`` where ``P0`` projects
    onto the (numerically) null eigenspace of ``rho - t sigma``. If the
    bisection runs out of resolution before a boundary eigenspace shows up,
    ``test`` is the mixture ``kappa * P(t) + (1 - kappa) * P(t_hi)`` of the
    two bracketing projectors instead.
    """

    threshold: float
    kappa: float
    test: np.ndarray
    type1: float  # Tr rho T
    type2: float  # Tr sigma T
    value: float


def _np_split(rho, sigma, t):
    w, u = eig(rho - t * sigma)
    btol = NP_BOUNDARY_RTOL * max(np.abs(w).max(initial=0.0), 1e-300)
    pos = w > btol
    zero = np.abs(w) <= btol
    diag_rho = (u.conj() * (rho @ u)).sum(axis=0).real
    return u, pos, zero, diag_rho[pos].sum(), diag_rho[zero].sum()


def _projector(u, mask):
    v = u[:, mask]
    return v @ v.conj().T


def neyman_pearson_test(rho: np.ndarray, sigma: np.ndarray, eps: float) -> NeymanPearsonTest:
    """Optimal test of ``sup {-log Tr sigma T : Tr rho T >= 1 - eps}``.

    ``g(t) = Tr rho {rho - t sigma > 0}`` is nonincreasing in ``t``, so the
    threshold is found by bracketing ``g(t) = 1 - eps`` in ``log t``
    (regula falsi with the Illinois modification, falling back to
    bisection). A jump of ``g`` is resolved by putting fractional weight on
    the null eigenspace of ``rho - t sigma``.
    """
    rho, sigma = _check_pair(rho, sigma)
    _check_eps(eps)
    rho, sigma = hermitian_part(rho), hermitian_part(sigma)
    target = 1 - eps

    def finish(t, kappa, test):
        type1 = np.trace(rho @ test).real
        type2 = np.trace(sigma @ test).real
        value = -math.log(type2) if type2 > 0 else math.inf
        return NeymanPearsonTest(float(t), float(kappa), test, float(type1), float(type2), value)

    def attempt(logt):
        t = math.exp(logt)
        u, pos, zero, gp, g0 = _np_split(rho, sigma, t)
        if gp >= target and gp - target <= NP_TOL:
            return finish(t, 0.0, _projector(u, pos)), gp - target
        if gp <= target <= gp + g0:
            kappa = (target - gp) / g0 if g0 > 0 else 0.0
            return finish(t, kappa, _projector(u, pos) + kappa * _projector(u, zero)), 0.0
        return None, (gp - target if gp > target else gp + g0 - target)

    ws = np.linalg.eigvalsh(sigma)
    wr = np.linalg.eigvalsh(rho)
    pos_s = ws[ws > 1e-10 * max(ws.max(), 1e-300)]
    if len(pos_s) == 0:
        return finish(0.0, 0.0, target * np.eye(len(rho)))
    b = math.log(2 * max(wr.max(), 1e-300) / pos_s.min())
    n_eval = 0
    while True:
        res, fb = attempt(b)
        n_eval += 1
        if res is not None:
            return res
        if fb < 0:
            break
        if n_eval > 60:
            # rho keeps weight outside supp sigma: the type-II error can be driven to zero
            perp = np.eye(len(rho)) - support_projector(sigma)
            return NeymanPearsonTest(math.inf, 0.0, perp, float(np.trace(rho @ perp).real), 0.0, math.inf)
        b += math.log(4)
    a = b
    while True:
        a -= math.log(4)
        res, fa = attempt(a)
        n_eval += 1
        if res is not None:
            return res
        if fa > 0:
            break
        if a < -690:
            return finish(0.0, 0.0, support_projector(rho))
    last, stalls = 0, 0
    for _ in range(NP_MAX_ITERS):
        width = b - a
        c = b - fb * (b - a) / (fb - fa)
        if stalls >= 2 or not a < c < b:
            c, stalls = 0.5 * (a + b), 0
        res, fc = attempt(c)
        if res is not None:
            return res
        if fc > 0:
            a, fa = c, fc
            if last == 1:
                fb /= 2
            last = 1
        else:
            b, fb = c, fc
            if last == -1:
                fa /= 2
            last = -1
        stalls = stalls + 1 if b - a > 0.5 * width else 0
        if b - a <= 1e-15 * max(1.0, abs(b)):
            break
    # mix the two bracketing projectors to meet the constraint exactly
    u_lo, pos_lo, _, g_lo, _ = _np_split(rho, sigma, math.exp(a))
    u_hi, pos_hi, _, g_hi, _ = _np_split(rho, sigma, math.exp(b))
    lam = (target - g_hi) / (g_lo - g_hi) if g_lo > g_hi else 1.0
    test = lam * _projector(u_lo, pos_lo) + (1 - lam) * _projector(u_hi, pos_hi)
    return finish(math.exp(a), lam, test)


def hypothesis_testing_divergence(rho: np.ndarray, sigma: np.ndarray, eps: float) -> float:
    """``D_h^eps(rho || sigma) = sup {-log Tr sigma T : Tr rho T >= 1 - eps, 0 <= T <= 1}``."""
    return neyman_pearson_test(rho, sigma, eps).value


def neyman_pearson_curves(rho: np.ndarray, sigmas: np.ndarray, n_t: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``(Tr rho P_t, Tr sigma P_t)`` with ``P_t = {rho - t sigma > 0}`` on a log grid of t.

    Works on a stack of positive definite sigmas at once. Columns are
    ordered by increasing t, with both end columns exact limits
    (``P = 1`` and ``P = 0``) so every type-I level is bracketed.
    """
    rho = hermitian_part(rho)
    sigmas = np.asarray(sigmas)
    n = len(sigmas)
    wr = np.linalg.eigvalsh(rho)
    ws = np.linalg.eigvalsh(sigmas)
    lo = np.log(1e-3 * wr[wr > 1e-12 * wr.max()].min() / ws[:, -1].max())
    hi = np.log(4 * wr.max() / max(ws[:, 0].min(), 1e-14))
    ts = np.exp(np.linspace(lo, hi, n_t))
    g = np.empty((n, n_t + 2))
    s = np.empty((n, n_t + 2))
    g[:, 0], s[:, 0] = 1.0, 1.0
    g[:, -1], s[:, -1] = 0.0, 0.0
    for j, t in enumerate(ts, start=1):
        w, u = np.linalg.eigh(rho[None] - t * sigmas)
        pos = w > 0
        g[:, j] = np.where(pos, (u.conj() * (rho @ u)).sum(axis=1).real, 0).sum(axis=1)
        s[:, j] = np.where(pos, (u.conj() * (sigmas @ u)).sum(axis=1).real, 0).sum(axis=1)
    return g, s


def type2_from_curves(g: np.ndarray, s: np.ndarray, eps: float) -> np.ndarray:
    """Type-II error of the best mixture of sampled tests meeting ``Tr rho T >= 1 - eps``.

    An upper bound on the optimal type-II error for each row, so
    ``-log`` of it is a lower estimate of the hypothesis-testing divergence.
    """
    target = 1 - eps
    n, k = g.shape
    # g is nonincreasing along each row; last feasible column
    j = np.clip((g >= target).sum(axis=1) - 1, 0, k - 2)
    rows = np.arange(n)
    g0, g1 = g[rows, j], g[rows, j + 1]
    s0, s1 = s[rows, j], s[rows, j + 1]
    denom = g0 - g1
    lam = np.clip(np.where(denom > 0, (target - g1) / np.where(denom > 0, denom, 1), 1.0), 0, 1)
    return lam * s0 + (1 - lam) * s1


def _ds_h(rho, sigma, c):
    w, u = eig(rho - c * sigma)
    pos = w > BOUNDARY_TOL * max(1.0, np.abs(w).max(initial=0.0))
    diag_rho = np.einsum("ij,ik,kj->j", u.conj(), rho, u).real
    return 1 - diag_rho[pos].sum()


def info_spectrum_divergence(rho: np.ndarray, sigma: np.ndarray, eps: float) -> float:
    """``D_s^eps(rho || sigma) = sup {log c : Tr rho {rho <= c sigma} <= eps}``."""
    rho, sigma = _check_pair(rho, sigma)
    _check_eps(eps)
    rho, sigma = hermitian_part(rho), hermitian_part(sigma)
    wr = np.linalg.eigvalsh(rho)
    ws = np.linalg.eigvalsh(sigma)
    rpos = wr[wr > 1e-10 * wr.max()]
    spos = ws[ws > 1e-10 * max(ws.max(), 1e-300)]
    if len(spos) == 0:
        return math.inf
    lo = np.log(rpos.min() / spos.max() / 2)
    hi = np.log(2 * rpos.max() / spos.min())
    grid = np.exp(np.linspace(lo, hi, DS_GRID))
    feas = np.array([_ds_h(rho, sigma, c) <= eps for c in grid])
    k = 0
    while not feas.any() and k < 60:
        grid = grid / 2**8
        feas = np.array([_ds_h(rho, sigma, c) <= eps for c in grid])
        k += 1
    if not feas.any():
        return -math.inf
    i = int(np.nonzero(feas)[0].max())
    if i == len(grid) - 1:
        c = grid[-1]
        for _ in range(60):
            c *= 4
            if _ds_h(rho, sigma, c) > eps:
                break
        else:
            return math.inf
        a, b = c / 4, c
    else:
        a, b = grid[i], grid[i + 1]
    for _ in range(100):
        m = math.sqrt(a * b)
        if _ds_h(rho, sigma, m) <= eps:
            a = m
        else:
            b = m
        if b - a <= 1e-15 * b:
            break
    return float(math.log(a))


def inverse_normal_cdf(eps: float) -> float:
    """Quantile of the standard normal distribution."""
    if not 0 < eps < 1:
        raise ValueError("probability must lie strictly between 0 and 1")
    return float(ndtri(eps))
