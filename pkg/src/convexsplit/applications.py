"""Error and rate bounds for protocols built on packing and convex splitting.

Every evaluator returns the right-hand side of an achievability bound; no
codebook or decoder is simulated. Rates are in nats. Classical registers
are handled through :class:`~convexsplit.testkit.CqState`, whose
direct-sum structure keeps Petz quantities blockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .convex_split import (
    ALPHA_EXPONENT,
    ALPHA_STRONG,
    BoundReport,
    ConvexSplitInstance,
    covering_error_exact,
)
from .divergences import inverse_normal_cdf, relative_entropy_variance
from .information import (
    hypothesis_testing_information,
    mutual_information,
    petz_up_information,
    sandwiched_renyi_information_curve,
    split_dims,
)
from .linalg import check_density, mpow, partial_trace, permute_factors
from .testkit import CqState

ALPHA_PACKING = ALPHA_STRONG
K_GRID_POINTS = 50
KRAUS_TOL = 1e-10
MARGINAL_TOL = 1e-8
PROTOCOLS = ("wiretap", "secret_key", "msg_compression", "meas_compression", "state_info")


@dataclass(frozen=True)
class ProtocolBound:
    """Error bound of one protocol, split into the terms that add up to it.

    ``components`` maps term names (``packing``, ``covering``, ``uhlmann``)
    to nonnegative values with ``epsilon_bound`` their exact sum.
    ``exponents`` holds the optimized exponent behind each term.
    """

    protocol: str
    epsilon_bound: float
    components: dict
    exponents: dict
    positivity_region: bool
    params: dict = field(default_factory=dict)
    valid: bool = True
    notes: str = ""

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")


def f_uhlmann(u: float) -> float:
    """``sqrt(2u - u^2)``, evaluated at ``min(u, 1)`` so it stays in [0, 1]."""
    u = min(max(float(u), 0.0), 1.0)
    return math.sqrt(2 * u - u * u)


def uhlmann_overlap(psi: np.ndarray, phi: np.ndarray, dims: Sequence[int]) -> tuple[float, np.ndarray]:
    """Best overlap ``max_U |<psi|(1 ⊗ U)|phi>|`` and the maximizing unitary on the second factor.

    By Uhlmann's theorem the overlap equals the fidelity of the first
    marginals.
    """
    dA, dB = (int(d) for d in dims)
    P, F = np.asarray(psi).reshape(dA, dB), np.asarray(phi).reshape(dA, dB)
    w = P.conj().T @ F
    us, s, vh = np.linalg.svd(w)
    # (1 ⊗ U) phi has coefficient matrix F U^T; U^T = (us vh)^† maximizes the overlap
    ut = (us @ vh).conj().T
    return float(s.sum()), ut.T


# information quantities -------------------------------------------------


def _dense(state, dims=None) -> tuple[np.ndarray, tuple[int, int], np.ndarray]:
    """``(rho, (dA, dB), rho_A)`` for a cq state or a dense bipartite state."""
    if isinstance(state, CqState):
        d = int(np.prod(state.dims))
        return state.to_dense(), (state.n, d), state.classical()
    rho = check_density(state)
    if dims is None:
        raise ValueError("dims are required for a dense state")
    dA, dB = split_dims(rho, None, dims)
    return rho, (dA, dB), partial_trace(rho, (dA, dB), [0])


def cq_petz_up(state: CqState, beta: float) -> float:
    """``D_beta(rho_XB || rho_X ⊗ rho_B)`` summed block by block."""
    if beta == 1:
        return cq_mutual_information(state)
    rho_B = state.marginal()
    rb = mpow(rho_B, 1 - beta)
    total = sum(p * np.trace(mpow(c, beta) @ rb).real for p, c in zip(state.probs, state.conditionals) if p > 0)
    return math.log(total) / (beta - 1)


def _entropy(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-(w * np.log(w)).sum())


def cq_mutual_information(state: CqState) -> float:
    """``S(rho_B) - sum_x p(x) S(rho_x)``."""
    return _entropy(state.marginal()) - sum(p * _entropy(c) for p, c in zip(state.probs, state.conditionals))


def information(state, dims=None) -> float:
    """Mutual information ``I(A:B)`` of a cq or dense bipartite state."""
    if isinstance(state, CqState):
        return cq_mutual_information(state)
    return mutual_information(check_density(state), dims)


def information_variance(state, dims=None) -> float:
    """``V(rho_AB || rho_A ⊗ rho_B)``."""
    rho, (dA, dB), rho_A = _dense(state, dims)
    rho_B = partial_trace(rho, (dA, dB), [1])
    return relative_entropy_variance(rho, np.kron(rho_A, rho_B))


def petz_up_curve(state, alphas: Sequence[float] = ALPHA_PACKING, dims=None) -> np.ndarray:
    """``I^↑_{2-1/alpha}`` over the grid."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 0.5) or np.any(alphas > 1):
        raise ValueError("packing alpha grid must lie in [1/2, 1]")
    if isinstance(state, CqState):
        return np.array([cq_petz_up(state, 2 - 1 / a) for a in alphas])
    rho = check_density(state)
    return np.array([petz_up_information(rho, 2 - 1 / a, dims) for a in alphas])


def sandwiched_info_curve(state, alphas: Sequence[float] = ALPHA_EXPONENT, dims=None) -> list:
    """``I*_alpha(A:B)`` with the A-reference fixed to the A-marginal."""
    rho, dd, rho_A = _dense(state, dims)
    return sandwiched_renyi_information_curve(rho, rho_A, np.asarray(alphas, dtype=float), dd)


# exponents ----------------------------------------------------------------


def packing_exponent(ivals: Sequence[float], alphas: Sequence[float], log_rate: float) -> tuple[float, float]:
    """``max_alpha ((1-alpha)/alpha)(I^↑_{2-1/alpha} - log_rate)`` and its argmax."""
    alphas = np.asarray(alphas, dtype=float)
    e = (1 - alphas) / alphas * (np.asarray(ivals) - log_rate)
    k = int(np.argmax(e))
    return float(e[k]), float(alphas[k])


def covering_exponent(ivals: Sequence[float], alphas: Sequence[float], log_rate: float) -> tuple[float, float]:
    """``max_alpha ((alpha-1)/alpha)(log_rate - I*_alpha)`` and its argmax."""
    alphas = np.asarray(alphas, dtype=float)
    e = (alphas - 1) / alphas * (log_rate - np.asarray(ivals))
    k = int(np.argmax(e))
    return float(e[k]), float(alphas[k])


def packing_exponent_bound(state, logM: float, alphas: Sequence[float] = ALPHA_PACKING,
                           dims=None, ivals: Sequence[float] | None = None) -> BoundReport:
    """Packing error bound ``exp(-max_alpha ((1-alpha)/alpha)(I^↑_{2-1/alpha} - log M))``.

    A bound of 1 or more carries no information and is flagged
    ``vacuous`` in ``params``.
    """
    ivals = petz_up_curve(state, alphas, dims) if ivals is None else np.asarray(ivals)
    e, a = packing_exponent(ivals, alphas, logM)
    value = math.exp(-e)
    return BoundReport("packing_exponent", value, {"alpha_star": a, "exponent": e, "logM": logM,
                                                   "vacuous": value >= 1})


def covering_exponent_bound(state, logK: float, alphas: Sequence[float] = ALPHA_EXPONENT,
                            dims=None, info: Sequence | None = None) -> BoundReport:
    """Covering error bound ``exp(-max_alpha ((alpha-1)/alpha)(log K - I*_alpha))``."""
    info = sandwiched_info_curve(state, alphas, dims) if info is None else info
    e, a = covering_exponent([r.value for r in info], alphas, logK)
    converged = all(r.converged for r in info)
    value = math.exp(-e)
    return BoundReport("covering_exponent", value,
                       {"alpha_star": a, "exponent": e, "logK": logK, "vacuous": value >= 1,
                        "max_residual": max(r.residual for r in info)},
                       converged, "" if converged else "sandwiched information solver did not converge")


def packing_capacity_bound(state, eps: float, delta: float, dims=None,
                           certified: bool | None = None) -> BoundReport:
    """One-shot packing rate ``I_h^{eps-delta}(A:B) - log(1/delta)``."""
    if not 0 < delta < eps < 1:
        raise ValueError("need 0 < delta < eps < 1")
    rho, dd, rho_A = _dense(state, dims)
    h = hypothesis_testing_information(rho, rho_A, eps - delta, dd, certified)
    return BoundReport("packing_capacity", h.value + math.log(delta),
                       {"eps": eps, "delta": delta, "I_h": h.value, "certified": h.certified})


# wiretap and secret key ---------------------------------------------------


def _split_cq(state: CqState) -> tuple[CqState, CqState]:
    if not isinstance(state, CqState) or len(state.dims) != 2:
        raise ValueError("expected a cq state with quantum factors (B, E)")
    return state.reduce([0]), state.reduce([1])


def witness_logk(ivals_up, alphas_p, ivals_star, alphas_c, logM: float, i_low: float, i_high: float,
                 points: int = K_GRID_POINTS) -> dict:
    """Scan ``log K`` over ``[i_low, i_high]`` for the best pair of exponents.

    The grid has ``points`` evenly spaced values of log K plus the point
    that splits the slack ``i_high - i_low - log M`` equally between the
    two constraints. Returns the log K maximizing the smaller exponent,
    both exponents there, and whether any grid point makes both positive.
    """
    grid = np.linspace(i_low, i_high, points)
    # K >= 1, so the equalizing point is clipped at log K = 0
    grid = np.append(grid, max(0.5 * (i_low + i_high - logM), 0.0))
    best = None
    for lk in grid:
        ep = packing_exponent(ivals_up, alphas_p, logM + lk)[0]
        ec = covering_exponent(ivals_star, alphas_c, lk)[0]
        score = min(ep, ec)
        if best is None or score > best[0]:
            best = (score, float(lk), ep, ec)
    return {"logK": best[1], "packing_exponent": best[2], "covering_exponent": best[3],
            "positive": bool(best[0] > 0)}


def _two_term(state: CqState, logM: float, logK: float | None, alphas_packing, alphas_covering,
              protocol: str) -> ProtocolBound:
    xb, xe = _split_cq(state)
    iu = petz_up_curve(xb, alphas_packing)
    info = sandwiched_info_curve(xe, alphas_covering)
    istar = [r.value for r in info]
    i_b, i_e = float(cq_mutual_information(xb)), float(cq_mutual_information(xe))
    wit = witness_logk(iu, alphas_packing, istar, alphas_covering, logM, i_e, i_b)
    if logK is None:
        # pick log K minimizing the bound over the witness grid
        grid = np.clip(np.append(np.linspace(i_e, i_b, K_GRID_POINTS), wit["logK"]), 0, None)
        sums = [math.exp(-packing_exponent(iu, alphas_packing, logM + lk)[0])
                + math.exp(-covering_exponent(istar, alphas_covering, lk)[0]) for lk in grid]
        logK = float(grid[int(np.argmin(sums))])
    pk = packing_exponent_bound(xb, logM + logK, alphas_packing, ivals=iu)
    cv = covering_exponent_bound(xe, logK, alphas_covering, info=info)
    comps = {"packing": pk.value, "covering": cv.value}
    return ProtocolBound(
        protocol, pk.value + cv.value, comps,
        {"packing": pk.params["exponent"], "covering": cv.params["exponent"]},
        bool(logM < i_b - i_e),
        {"logM": logM, "logK": logK, "I_XB": i_b, "I_XE": i_e,
         "alpha_packing": pk.params["alpha_star"], "alpha_covering": cv.params["alpha_star"],
         "witness": wit},
        cv.valid, cv.notes)


def wiretap_bound(state: CqState, logM: float, logK: float | None = None,
                  alphas_packing: Sequence[float] = ALPHA_PACKING,
                  alphas_covering: Sequence[float] = ALPHA_EXPONENT) -> ProtocolBound:
    """Privacy error bound: packing term on ``(X:B)`` at rate ``log MK`` plus covering term on ``(X:E)`` at ``log K``.

    Parameters
    ----------
    state : cq state with quantum factors ``(B, E)``.
    logM, logK : message and randomization rates in nats. When ``logK`` is
        omitted it is chosen on the witness grid to minimize the bound.
    """
    if logM < 0 or (logK is not None and logK < 0):
        raise ValueError("rates must be nonnegative")
    return _two_term(state, logM, logK, alphas_packing, alphas_covering, "wiretap")


def secret_key_bound(state: CqState, logM: float, logK: float | None = None,
                     alphas_packing: Sequence[float] = ALPHA_PACKING,
                     alphas_covering: Sequence[float] = ALPHA_EXPONENT) -> ProtocolBound:
    """Key distillation shares the wiretap bound; only the protocol tag differs."""
    if logM < 0 or (logK is not None and logK < 0):
        raise ValueError("rates must be nonnegative")
    return _two_term(state, logM, logK, alphas_packing, alphas_covering, "secret_key")


def _as_grid(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def wiretap_rate(state: CqState, eps1: float, eps2: float, delta1, delta2,
                 certified: bool | None = None) -> BoundReport:
    """One-shot achievable private rate.

    ``I_h^{eps1-delta1}(X:B) - I_h^{1-eps2+3 delta2}(X:E) - log(1/delta1)
    - log(nu^2/delta2^4)`` with ``nu = |E|``. ``delta1`` and ``delta2`` may be
    grids, in which case the best pair is reported.
    """
    if not (eps1 > 0 and eps2 > 0 and eps1 + eps2 < 1):
        raise ValueError("need eps1, eps2 > 0 and eps1 + eps2 < 1")
    d1, d2 = _as_grid(delta1), _as_grid(delta2)
    d1, d2 = d1[(d1 > 0) & (d1 < eps1)], d2[(d2 > 0) & (d2 < eps2 / 3)]
    if not len(d1) or not len(d2):
        raise ValueError("infeasible delta: need 0 < delta1 < eps1 and 0 < delta2 < eps2/3")
    xb, xe = _split_cq(state)
    nu = xe.dims[0]
    rb, db, pb = _dense(xb)
    re, de, pe = _dense(xe)
    hb = [hypothesis_testing_information(rb, pb, eps1 - d, db, certified) for d in d1]
    he = [hypothesis_testing_information(re, pe, 1 - eps2 + 3 * d, de, certified) for d in d2]
    vb = np.array([h.value for h in hb]) + np.log(d1)
    ve = np.array([h.value for h in he]) + np.log(nu**2 / d2**4)
    i, j = int(np.argmax(vb)), int(np.argmin(ve))
    return BoundReport("wiretap_rate", float(vb[i] - ve[j]),
                       {"delta1": float(d1[i]), "delta2": float(d2[j]), "I_h_B": hb[i].value,
                        "I_h_E": he[j].value, "nu": nu,
                        "certified": hb[i].certified and he[j].certified})


def default_c_log(d: int) -> float:
    """Default slack constant ``2(d - 1)`` for the ``O(log n)`` term."""
    return 2.0 * (d - 1)


def second_order_rate(n: int, I_B: float, V_B: float, I_E: float, V_E: float, eps1: float, eps2: float,
                      c_log: float | None = None, d: int = 2) -> float:
    """``n(I_B - I_E) + sqrt(n V_B) Φ^{-1}(eps1) + sqrt(n V_E) Φ^{-1}(eps2) - c_log log n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0 < eps1 < 1 and 0 < eps2 < 1):
        raise ValueError("eps1 and eps2 must lie in (0, 1)")
    c_log = default_c_log(d) if c_log is None else c_log
    return (n * (I_B - I_E) + math.sqrt(n * V_B) * inverse_normal_cdf(eps1)
            + math.sqrt(n * V_E) * inverse_normal_cdf(eps2) - c_log * math.log(n))


# message compression ------------------------------------------------------


def msg_compression_exponent(psi: np.ndarray, dims: Sequence[int], r: float, n: int = 1,
                             alphas: Sequence[float] = ALPHA_EXPONENT, curve: Sequence | None = None,
                             M: int | None = None, tau_C: np.ndarray | None = None) -> BoundReport:
    """``sqrt(2) exp(-n max_alpha ((alpha-1)/(2 alpha))(r - I↓↓_alpha(C:RB)))``.

    ``dims`` is ``(dC, dRB)``. With ``M`` and ``tau_C`` given, the one-shot
    value ``f(Δ_M)`` from the exact covering error is added to ``params``.
    """
    from .information import doubly_minimized_curve

    if r < 0:
        raise ValueError("rate must be nonnegative")
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 1) or np.any(alphas > 2):
        raise ValueError("alpha grid must lie in (1, 2]")
    psi = check_density(psi)
    curve = doubly_minimized_curve(psi, alphas, dims) if curve is None else curve
    ivals = np.array([c.value for c in curve])
    e = (alphas - 1) / (2 * alphas) * (r - ivals)
    k = int(np.argmax(e))
    value = math.sqrt(2) * math.exp(-n * e[k])
    converged = all(c.converged for c in curve)
    params = {"alpha_star": float(alphas[k]), "exponent": float(n * e[k]), "r": r, "n": n,
              "I_dd": float(ivals[k]), "vacuous": value >= math.sqrt(2) - 1e-15,
              "max_residual": max(c.residual for c in curve)}
    if M is not None and tau_C is not None:
        delta = covering_error_exact(ConvexSplitInstance(psi, tau_C, M))
        params["delta_exact"] = delta
        params["oneshot"] = f_uhlmann(delta)
    return BoundReport("msg_compression_exponent", value, params, converged,
                       "" if converged else "doubly minimized solver did not converge")


# measurement compression --------------------------------------------------


def measurement_state(rho_A: np.ndarray, povm: Sequence[np.ndarray], p_x_given_u) -> CqState:
    """Markov state ``theta_{U R X}`` of a POVM decomposition.

    ``povm`` is ``{Pi^u}`` on A and ``p_x_given_u[u, x]`` post-processes the
    outcome. The conditional state for ``u`` lives on ``R ⊗ X`` with
    ``R`` the canonical purifying system of ``rho_A``. Outcomes of zero
    probability are dropped.
    """
    rho_A = check_density(rho_A)
    d = rho_A.shape[0]
    pxu = np.asarray(p_x_given_u, dtype=float)
    if pxu.shape[0] != len(povm) or np.any(pxu < 0) or np.any(np.abs(pxu.sum(1) - 1) > 1e-12):
        raise ValueError("p_x_given_u must be a stochastic matrix with one row per POVM element")
    if np.max(np.abs(sum(povm) - np.eye(d))) > KRAUS_TOL:
        raise ValueError("POVM elements do not sum to the identity")
    w, u = np.linalg.eigh(rho_A)
    # |phi> = sum_i sqrt(w_i) |i>_R |e_i>_A
    phi = np.einsum("i,ai->ia", np.sqrt(np.clip(w, 0, None)), u).reshape(-1)
    phi_op = np.outer(phi, phi.conj())
    probs, conds = [], []
    for k, pi in enumerate(povm):
        t = partial_trace(np.kron(np.eye(d), pi) @ phi_op, (d, d), [0])
        p = float(np.trace(t).real)
        if p <= 1e-15:
            continue
        probs.append(p)
        conds.append(np.kron(t / p, np.diag(pxu[k]).astype(complex)))
    probs = np.array(probs)
    return CqState(probs / probs.sum(), conds, (d, pxu.shape[1]))


def measurement_compression_bound(theta: CqState, logM: float, logL: float,
                                  alphas: Sequence[float] = ALPHA_EXPONENT,
                                  pairing: str = "proof") -> ProtocolBound:
    """Measurement simulation error bound.

    With ``pairing="proof"`` (the default) the bound is
    ``Δ(log ML; U:RX) + f(Δ(log L; U:R))``; ``pairing="statement"`` swaps
    the two rates. Each Δ is replaced by its covering exponent bound.

    Parameters
    ----------
    theta : cq state over U with quantum factors ``(R, X)``.
    logM, logL : shared-randomness and communication rates in nats.
    """
    if pairing not in ("proof", "statement"):
        raise ValueError("pairing must be 'proof' or 'statement'")
    if logM < 0 or logL < 0:
        raise ValueError("rates must be nonnegative")
    if len(theta.dims) != 2:
        raise ValueError("expected conditionals on (R, X)")
    ur = theta.reduce([0])
    info_rx = sandwiched_info_curve(theta, alphas)
    info_r = sandwiched_info_curve(ur, alphas)
    big, small = (logM + logL, logL) if pairing == "proof" else (logL, logM + logL)
    c1 = covering_exponent_bound(theta, big, alphas, info=info_rx)
    c2 = covering_exponent_bound(ur, small, alphas, info=info_r)
    uh = f_uhlmann(c2.value)
    i_rx, i_r = float(cq_mutual_information(theta)), float(cq_mutual_information(ur))
    inside = bool(big > i_rx and small > i_r)
    valid = c1.valid and c2.valid
    return ProtocolBound("meas_compression", c1.value + uh, {"covering": c1.value, "uhlmann": uh},
                         {"covering": c1.params["exponent"], "uhlmann": c2.params["exponent"]},
                         inside,
                         {"logM": logM, "logL": logL, "pairing": pairing, "I_URX": i_rx, "I_UR": i_r,
                          "inner_covering": c2.value},
                         valid, "" if valid else "sandwiched information solver did not converge")


def measurement_rate_region(theta: CqState, eps1: float, eps2: float, delta1: float, delta2: float,
                            dA: int, certified: bool | None = None) -> dict:
    """Smallest ``log L`` and ``log ML`` of the one-shot achievable region.

    ``log L >= I_h^{1-sqrt(2 eps1)+3 delta1}(U:R) + log(|A|^2/delta1^4)`` and
    ``log ML >= I_h^{1-eps2+3 delta2}(U:RX) + log(|A|^2/delta2^4)``.
    """
    r1 = math.sqrt(2 * eps1)
    if not (0 < delta1 < r1 / 3 and 0 < delta2 < eps2 / 3):
        raise ValueError("infeasible delta: need delta1 < sqrt(2 eps1)/3 and delta2 < eps2/3")
    ur = theta.reduce([0])
    rho_r, d_r, p_r = _dense(ur)
    rho_rx, d_rx, p_rx = _dense(theta)
    h1 = hypothesis_testing_information(rho_r, p_r, 1 - r1 + 3 * delta1, d_r, certified)
    h2 = hypothesis_testing_information(rho_rx, p_rx, 1 - eps2 + 3 * delta2, d_rx, certified)
    return {"logL_min": h1.value + math.log(dA**2 / delta1**4),
            "logML_min": h2.value + math.log(dA**2 / delta2**4),
            "certified_L": h1.certified, "certified_ML": h2.certified,
            "epsilon": eps1 + math.sqrt(2 * eps2)}


# channel with state information --------------------------------------------


def check_kraus(kraus: Sequence[np.ndarray], tol: float = KRAUS_TOL) -> list[np.ndarray]:
    """Validate that a Kraus list is trace preserving."""
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    if not ks:
        raise ValueError("empty Kraus list")
    d_in = ks[0].shape[1]
    if any(k.shape != ks[0].shape for k in ks):
        raise ValueError("Kraus operators must share one shape")
    defect = np.max(np.abs(sum(k.conj().T @ k for k in ks) - np.eye(d_in)))
    if defect > tol:
        raise ValueError(f"channel is not trace preserving (defect {defect:.3g})")
    return ks


def apply_channel(theta: np.ndarray, dims: Sequence[int], kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Output on ``R ⊗ B`` of a channel ``AS -> B`` applied to ``theta_{ARS}``."""
    dA, dR, dS = (int(d) for d in dims)
    ks = check_kraus(kraus)
    if ks[0].shape[1] != dA * dS:
        raise ValueError("Kraus input dimension does not match A ⊗ S")
    x = permute_factors(theta, (dA, dR, dS), (1, 0, 2))
    eye = np.eye(dR)
    return sum(np.kron(eye, k) @ x @ np.kron(eye, k).conj().T for k in ks)


def state_info_coding_bound(theta: np.ndarray, dims: Sequence[int], kraus: Sequence[np.ndarray],
                            vartheta_S: np.ndarray, logM: float, logK: float | None = None,
                            alphas_packing: Sequence[float] = ALPHA_PACKING,
                            alphas_covering: Sequence[float] = ALPHA_EXPONENT) -> ProtocolBound:
    """Coding error with state information at the encoder.

    Packing term on ``(R:B)`` of the channel output at rate ``log MK`` plus
    ``f`` of the covering term on ``(R:S)`` of ``theta`` at ``log K``.

    Parameters
    ----------
    theta : state on ``A ⊗ R ⊗ S`` with ``dims = (dA, dR, dS)``.
    kraus : Kraus operators of the channel ``A ⊗ S -> B``.
    vartheta_S : channel state marginal; must equal ``theta_S``.
    """
    if logM < 0 or (logK is not None and logK < 0):
        raise ValueError("rates must be nonnegative")
    dA, dR, dS = (int(d) for d in dims)
    theta = check_density(theta, dims)
    theta_S = partial_trace(theta, dims, [2])
    gap = float(np.max(np.abs(theta_S - np.asarray(vartheta_S))))
    if gap > MARGINAL_TOL:
        raise ValueError(f"theta_S differs from the channel state marginal by {gap:.3g}")
    out = apply_channel(theta, dims, kraus)
    dB = out.shape[0] // dR
    theta_RS = partial_trace(theta, dims, [1, 2])
    iu = petz_up_curve(out, alphas_packing, (dR, dB))
    info = sandwiched_info_curve(theta_RS, alphas_covering, (dR, dS))
    istar = [r.value for r in info]
    i_b, i_s = float(mutual_information(out, (dR, dB))), float(mutual_information(theta_RS, (dR, dS)))
    wit = witness_logk(iu, alphas_packing, istar, alphas_covering, logM, i_s, i_b)
    if logK is None:
        grid = np.append(np.linspace(max(i_s, 0.0), max(i_b, 0.0), K_GRID_POINTS), max(wit["logK"], 0.0))
        sums = [math.exp(-packing_exponent(iu, alphas_packing, logM + lk)[0])
                + f_uhlmann(math.exp(-covering_exponent(istar, alphas_covering, lk)[0])) for lk in grid]
        logK = float(grid[int(np.argmin(sums))])
    pk = packing_exponent_bound(out, logM + logK, alphas_packing, (dR, dB), ivals=iu)
    cv = covering_exponent_bound(theta_RS, logK, alphas_covering, (dR, dS), info=info)
    uh = f_uhlmann(cv.value)
    return ProtocolBound("state_info", pk.value + uh, {"packing": pk.value, "uhlmann": uh},
                         {"packing": pk.params["exponent"], "uhlmann": cv.params["exponent"]},
                         bool(logM < i_b - i_s),
                         {"logM": logM, "logK": logK, "I_RB": i_b, "I_RS": i_s, "inner_covering": cv.value,
                          "witness": wit},
                         cv.valid, cv.notes)
