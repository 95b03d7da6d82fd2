"""Convex-split states, their covering error, and the bounds around it.

A convex-split instance is a bipartite state ``rho_AB``, a reference state
``tau_A`` and a copy number ``M``. The convex-split state lives on
``A_1 ... A_M B`` (B last) and is the uniform mixture over ``m`` of
``rho`` on ``A_m B`` with ``tau`` on every other A slot. Its covering
error is the trace distance to ``tau^{⊗M} ⊗ rho_B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .divergences import hypothesis_testing_divergence, petz_renyi
from .information import (
    hypothesis_testing_information_many,
    sandwiched_renyi_information_curve,
)
from .linalg import (
    check_density,
    mpow,
    nc_minimal_trace,
    partial_trace,
    permute_factors,
    pinching,
    positive_part_projector,
    schatten_norm,
    spec_count,
    support_projector,
    tensor,
    trace_norm_hermitian,
)
from .testkit import _rng

MAX_TOTAL_DIM = 4096
ALPHA_EXPONENT = np.linspace(1.001, 2.0, 50)
ALPHA_STRONG = np.linspace(0.501, 0.999, 50)
C_GRID = np.geomspace(1e-3, 1e3, 30)


class DimensionBudgetError(ValueError):
    """The convex-split state would exceed the dense dimension budget."""


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    params: dict = field(default_factory=dict)
    valid: bool = True
    notes: str = ""


@dataclass(frozen=True)
class ConvexSplitInstance:
    rho_AB: np.ndarray
    tau_A: np.ndarray
    M: int = 1
    max_total_dim: int = MAX_TOTAL_DIM

    def __post_init__(self):
        tau = check_density(self.tau_A)
        dA = tau.shape[0]
        n = np.asarray(self.rho_AB).shape[0]
        if n % dA:
            raise ValueError(f"rho side {n} is not a multiple of dA={dA}")
        rho = check_density(self.rho_AB, (dA, n // dA))
        if self.M < 1:
            raise ValueError("M must be at least 1")
        rho_A = partial_trace(rho, (dA, n // dA), [0])
        perp = np.eye(dA) - support_projector(tau)
        if np.trace(perp @ rho_A).real > 1e-10:
            raise ValueError("tau_A must be invertible on the support of rho_A")
        object.__setattr__(self, "rho_AB", rho)
        object.__setattr__(self, "tau_A", tau)

    @property
    def dA(self) -> int:
        return self.tau_A.shape[0]

    @property
    def dB(self) -> int:
        return self.rho_AB.shape[0] // self.dA

    @property
    def dims(self) -> tuple[int, int]:
        return self.dA, self.dB

    @property
    def total_dim(self) -> int:
        return self.dA**self.M * self.dB

    @property
    def rho_B(self) -> np.ndarray:
        return partial_trace(self.rho_AB, self.dims, [1])

    def at(self, M: int) -> "ConvexSplitInstance":
        return replace(self, M=M)

    def check_budget(self):
        if self.total_dim > self.max_total_dim:
            raise DimensionBudgetError(
                f"dA^M dB = {self.total_dim} exceeds max_total_dim = {self.max_total_dim}")


def _embed_sum(x: np.ndarray, filler: np.ndarray, dA: int, dB: int, M: int) -> np.ndarray:
    """``sum_m`` of ``x`` on ``A_m B`` tensored with ``filler`` on the other A slots."""
    base = tensor(x, *([filler] * (M - 1)))
    old_dims = [dA, dB] + [dA] * (M - 1)
    out = np.zeros((dA**M * dB,) * 2, dtype=complex)
    for m in range(M):
        order = [0 if k == m else 2 + (k if k < m else k - 1) for k in range(M)] + [1]
        out += permute_factors(base, old_dims, order)
    return out


def build_convex_split_state(inst: ConvexSplitInstance) -> np.ndarray:
    """The convex-split state on ``A_1 ... A_M B``."""
    inst.check_budget()
    return _embed_sum(inst.rho_AB, inst.tau_A, inst.dA, inst.dB, inst.M) / inst.M


def product_target(inst: ConvexSplitInstance) -> np.ndarray:
    return tensor(*([inst.tau_A] * inst.M), inst.rho_B)


def covering_error_exact(inst: ConvexSplitInstance) -> float:
    """Trace distance between the convex-split state and ``tau^{⊗M} ⊗ rho_B``."""
    omega = build_convex_split_state(inst)
    omega -= product_target(inst)
    return 0.5 * trace_norm_hermitian(omega)


def theta_map(x: np.ndarray, tau: np.ndarray, M: int, dims: Sequence[int] | None = None,
              max_total_dim: int = MAX_TOTAL_DIM) -> np.ndarray:
    """Average over slots of ``x`` minus its tau-conditional expectation.

    ``Θ(x) = (1/M) sum_m [x on A_m B  -  1_{A_m} ⊗ Tr_A[x (tau ⊗ 1)] on B]``,
    identities on the remaining A slots.
    """
    dA = tau.shape[0]
    dB = x.shape[0] // dA if dims is None else int(dims[1])
    if dA**M * dB > max_total_dim:
        raise DimensionBudgetError(f"dA^M dB = {dA**M * dB} exceeds max_total_dim = {max_total_dim}")
    cond = partial_trace(x @ np.kron(tau, np.eye(dB)), (dA, dB), [1])
    centered = x - np.kron(np.eye(dA), cond)
    return _embed_sum(centered, np.eye(dA), dA, dB, M) / M


def covering_error_via_theta(inst: ConvexSplitInstance, sigma: np.ndarray, gamma: float) -> float:
    """Covering error through the weighted-norm form of Θ.

    ``½ ||Θ(rho / (tau ⊗ sigma))||_{1, gamma, tau^{⊗M} ⊗ sigma}``; equal to
    :func:`covering_error_exact` whenever ``supp rho_B ⊆ supp sigma``.
    """
    inst.check_budget()
    w = np.kron(inst.tau_A, sigma)
    x = mpow(w, gamma - 1) @ inst.rho_AB @ mpow(w, -gamma)
    th = theta_map(x, inst.tau_A, inst.M, inst.dims, inst.max_total_dim)
    left = tensor(*([mpow(inst.tau_A, 1 - gamma)] * inst.M), mpow(sigma, 1 - gamma))
    right = tensor(*([mpow(inst.tau_A, gamma)] * inst.M), mpow(sigma, gamma))
    return 0.5 * schatten_norm(left @ th @ right, 1)


def map_norm_constant(M: int, p: float) -> float:
    return 2 ** (2 / p - 1) * M ** ((1 - p) / p)


def _weighted_norm(x, left, right, p):
    z = left @ x @ right
    if p == 2:
        return float(np.linalg.norm(z))
    return schatten_norm(z, p)


def map_norm_sweep(tau: np.ndarray, sigma: np.ndarray, M: int, ps: Sequence[float],
                   gammas: Sequence[float], trials: int = 200, seed=None) -> dict:
    """Largest observed ``||Θ(x)|| / ||x||`` for every ``(p, gamma)`` pair.

    The same random operators serve all pairs, so ``Θ(x)`` is built once per
    trial. Returns a dict keyed by ``(p, gamma)``.
    """
    ps, gammas = [float(p) for p in ps], [float(g) for g in gammas]
    if any(not 1 <= p <= 2 for p in ps):
        raise ValueError("p must lie in [1, 2]")
    rng = _rng(seed)
    dA, dB = tau.shape[0], sigma.shape[0]
    weights = {}
    for p in ps:
        for g in gammas:
            a, b = (1 - g) / p, g / p
            weights[p, g] = (np.kron(mpow(tau, a), mpow(sigma, a)), np.kron(mpow(tau, b), mpow(sigma, b)),
                             tensor(*([mpow(tau, a)] * M), mpow(sigma, a)),
                             tensor(*([mpow(tau, b)] * M), mpow(sigma, b)))
    worst = dict.fromkeys(weights, 0.0)
    d = dA * dB
    budget = max(MAX_TOTAL_DIM, dA**M * dB)
    for _ in range(trials):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        th = theta_map(x, tau, M, (dA, dB), max_total_dim=budget)
        for (p, g), (l1, r1, lM, rM) in weights.items():
            ratio = _weighted_norm(th, lM, rM, p) / _weighted_norm(x, l1, r1, p)
            worst[p, g] = max(worst[p, g], ratio)
    out = {}
    for (p, g), w in worst.items():
        bound = map_norm_constant(M, p)
        out[p, g] = BoundReport("map_norm", w, {"bound": bound, "M": M, "p": p, "gamma": g, "trials": trials},
                                w <= bound + 1e-9)
    return out


def map_norm_check(tau: np.ndarray, sigma: np.ndarray, M: int, p: float, gamma: float,
                   trials: int = 200, seed=None) -> BoundReport:
    """Largest observed ``||Θ(x)|| / ||x||`` in the weighted ``(p, gamma)`` norms over random x."""
    return map_norm_sweep(tau, sigma, M, [p], [gamma], trials, seed)[float(p), float(gamma)]


def exponent_upper_bound(inst: ConvexSplitInstance, alphas: Sequence[float] = ALPHA_EXPONENT,
                         info: Sequence | None = None) -> BoundReport:
    """``min_alpha 2^(2/alpha - 2) exp(-((alpha-1)/alpha)(log M - I*_alpha(rho||tau)))``.

    ``info`` may carry precomputed sandwiched Rényi informations (one per
    alpha) so that sweeps over M reuse them.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 1) or np.any(alphas > 2):
        raise ValueError("alpha grid must lie in [1, 2]")
    if info is None:
        info = sandwiched_renyi_information_curve(inst.rho_AB, inst.tau_A, alphas, inst.dims)
    ivals = np.array([r.value for r in info])
    logM = math.log(inst.M)
    expo = (alphas - 1) / alphas * (logM - ivals)
    vals = 2 ** (2 / alphas - 2) * np.exp(-expo)
    k = int(np.argmin(vals))
    converged = all(r.converged for r in info)
    return BoundReport("exponent_upper", float(vals[k]),
                       {"alpha_star": float(alphas[k]), "exponent": float(expo.max()),
                        "alpha_exponent": float(alphas[int(np.argmax(expo))])},
                       converged, "" if converged else "sandwiched information solver did not converge")


def strong_converse_lower_bound(inst: ConvexSplitInstance, alphas: Sequence[float] = ALPHA_STRONG,
                                petz: Sequence[float] | None = None) -> BoundReport:
    """``max_alpha 1 - 4 exp(-((1-alpha)/alpha)(D_{2-1/alpha}(rho || tau⊗rho_B) - log M))``.

    Negative values are reported clamped to 0, with the raw maximum in
    ``params["raw"]``.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 0.5) or np.any(alphas > 1):
        raise ValueError("alpha grid must lie in [1/2, 1]")
    if petz is None:
        ref = np.kron(inst.tau_A, inst.rho_B)
        petz = [petz_renyi(inst.rho_AB, ref, 2 - 1 / a) for a in alphas]
    petz = np.asarray(petz, dtype=float)
    expo = (1 - alphas) / alphas * (petz - math.log(inst.M))
    vals = 1 - 4 * np.exp(-expo)
    k = int(np.argmax(vals))
    return BoundReport("strong_converse_lower", float(max(vals[k], 0.0)),
                       {"alpha_star": float(alphas[k]), "raw": float(vals[k]), "exponent": float(expo.max())})


def oneshot_converse_lower_bound(inst: ConvexSplitInstance, c_grid: Sequence[float] = C_GRID) -> BoundReport:
    """``max_c 1 - (1+c) Tr[rho_AB ∧ (1 + 1/c) M tau_A ⊗ rho_B]``."""
    ref = np.kron(inst.tau_A, inst.rho_B)
    vals = np.array([1 - (1 + c) * nc_minimal_trace(inst.rho_AB, (1 + 1 / c) * inst.M * ref) for c in c_grid])
    k = int(np.argmax(vals))
    return BoundReport("oneshot_converse_lower", float(vals[k]), {"c_star": float(c_grid[k])})


def spectrum_size(inst: ConvexSplitInstance) -> int:
    """``|spec(tau_A)| * |B|``."""
    return spec_count(inst.tau_A) * inst.dB


def direct_bound_components(inst: ConvexSplitInstance, c: float, sigma: np.ndarray | None = None,
                            exact: bool = True) -> BoundReport:
    """Pinched tail mass plus ``sqrt(c nu / M)``.

    ``Tr[rho {P[rho] > c tau⊗sigma}] + sqrt(c nu / M)`` where ``P`` pinches
    with respect to ``tau⊗sigma`` and ``nu = |spec(tau)| |B|``.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    sigma = inst.rho_B if sigma is None else sigma
    ref = np.kron(inst.tau_A, sigma)
    pinched = pinching(ref, inst.rho_AB)
    tail = float(np.trace(inst.rho_AB @ positive_part_projector(pinched, c * ref)).real)
    nu = spectrum_size(inst)
    root = math.sqrt(c * nu / inst.M)
    params = {"c": c, "tail": tail, "root": root, "nu": nu}
    valid, notes = True, ""
    if exact:
        if inst.total_dim <= inst.max_total_dim:
            delta = covering_error_exact(inst)
            params["delta_exact"] = delta
            valid = delta <= tail + root + 1e-9
        else:
            notes = "exact covering error not computed (dimension budget)"
    return BoundReport("direct_components", tail + root, params, valid, notes)


def sample_complexity_exact(rho: np.ndarray, tau: np.ndarray, eps: float, M_max: int,
                            max_total_dim: int = MAX_TOTAL_DIM) -> int | None:
    """Smallest ``M <= M_max`` with covering error at most ``eps``; ``None`` if none.

    Every M is scanned in order; monotonicity in M is not assumed. M values
    beyond the dimension budget are not scanned.
    """
    inst = ConvexSplitInstance(rho, tau, 1, max_total_dim)
    for M in range(1, M_max + 1):
        cur = inst.at(M)
        if cur.total_dim > max_total_dim:
            break
        if covering_error_exact(cur) <= eps:
            return M
    return None


def delta_grid_upper(eps: float, n: int = 30) -> np.ndarray:
    return np.geomspace(1e-3 * eps / 3, 0.999 * eps / 3, n)


def delta_grid_lower(eps: float, n: int = 30) -> np.ndarray:
    return np.geomspace(1e-3 * (1 - eps), 0.999 * (1 - eps), n)


def sample_complexity_bounds(rho: np.ndarray, tau: np.ndarray, eps: float,
                             delta_grid: Sequence[float] | None = None,
                             c_grid: Sequence[float] = C_GRID,
                             lower_delta_grid: Sequence[float] | None = None,
                             certified: bool | None = None) -> tuple[BoundReport, BoundReport]:
    """Upper and lower bounds on ``log M_eps``, the log of the sample complexity.

    Upper: ``min_delta I_h^{1-eps+3delta}(rho||tau) + log(nu^2/delta^4)``
    over ``0 < delta < eps/3``. Lower: ``max_{c,delta}
    D_h^{1-eps-delta}(rho||tau⊗rho_B) - log((2+c+1/c)/(c eps - c + (1+c) delta))``
    over pairs with a positive denominator.
    """
    inst = ConvexSplitInstance(rho, tau, 1)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    nu = spectrum_size(inst)

    deltas = np.asarray(delta_grid if delta_grid is not None else delta_grid_upper(eps), dtype=float)
    deltas = deltas[(deltas > 0) & (deltas < eps / 3)]
    if len(deltas):
        infos = hypothesis_testing_information_many(rho, tau, 1 - eps + 3 * deltas, inst.dims, certified)
        vals = np.array([h.value for h in infos]) + np.log(nu**2 / deltas**4)
        k = int(np.argmin(vals))
        upper = BoundReport("sample_complexity_upper", float(vals[k]),
                            {"delta_star": float(deltas[k]), "certified": infos[k].certified, "nu": nu})
    else:
        upper = BoundReport("sample_complexity_upper", math.inf, {}, False, "empty delta grid")

    ldeltas = np.asarray(lower_delta_grid if lower_delta_grid is not None else delta_grid_lower(eps), dtype=float)
    ldeltas = ldeltas[(ldeltas > 0) & (ldeltas < 1 - eps)]
    ref = np.kron(tau, inst.rho_B)
    best, arg = -math.inf, None
    for d in ldeltas:
        dh = hypothesis_testing_divergence(rho, ref, 1 - eps - d)
        for c in c_grid:
            den = c * eps - c + (1 + c) * d
            if den <= 0:
                continue
            v = dh - math.log((2 + c + 1 / c) / den)
            if v > best:
                best, arg = v, (float(c), float(d))
    if arg is None:
        lower = BoundReport("sample_complexity_lower", -math.inf, {}, False, "no feasible (c, delta) pair")
    else:
        lower = BoundReport("sample_complexity_lower", float(best), {"c_star": arg[0], "delta_star": arg[1]})
    return upper, lower
