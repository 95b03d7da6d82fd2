"""Randomized property suites behind ``convexsplit verify``.

Each property draws seeded random instances, measures how far the
checked inequality or identity is from being violated, and passes when
the worst violation stays within its tolerance in :data:`TOLERANCES`.
The instance behind the worst violation is kept as a counterexample.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import applications as apps
from . import convex_split as cs
from . import divergences as dv
from . import information as info
from . import linalg as la
from . import testkit as tk
from .io import encode_operator, to_jsonable

TOLERANCES = {
    "eig_roundtrip": 1e-9,
    "eig_unitary": 1e-10,
    "trace_distance_triangle": 1e-10,
    "trace_distance_unitary": 1e-10,
    "nc_minimal_infimum": 1e-10,
    "nc_minimal_order": 1e-10,
    "nc_minimal_partial_trace": 1e-10,
    "nc_minimal_upper": 1e-10,
    "nc_minimal_lower": 1e-10,
    "pinching_inequality": 1e-10,
    "cq_trace_distance": 1e-10,
    "dh_pinching_dpi": 1e-8,
    "dh_monotone_eps": 1e-10,
    "dh_certificate": 1e-10,
    "dh_floor": 1e-10,
    "renyi_continuity": 1e-2,
    "divergences_vanish": 1e-9,
    "fixed_point_certificate": 1e-9,
    "monotone_descent": 1e-10,
    "log_convexity": 1e-9,
    "joint_convexity": 1e-9,
    "formulation_identity": 1e-8,
    "bound_sandwich": 1e-9,
    "commuting_reduction": 1e-10,
    "positivity_threshold": 0.0,
    "component_additivity": 1e-12,
    "positivity_region": 0.0,
    "uhlmann_conversion": 1e-8,
    "kraus_validation": 0.0,
}


@dataclass
class PropertyResult:
    suite: str
    name: str
    passed: bool
    trials: int
    worst: float
    tolerance: float
    seconds: float
    counterexample: dict | None = None

    def row(self) -> dict:
        return {"suite": self.suite, "property": self.name, "passed": self.passed, "trials": self.trials,
                "worst": self.worst, "tolerance": self.tolerance, "seconds": round(self.seconds, 3)}


class _Worst:
    """Tracks the largest violation and the instance that produced it."""

    def __init__(self):
        self.value = -math.inf
        self.instance = None

    def see(self, v: float, **instance):
        v = float(v)
        if math.isnan(v):
            v = math.inf
        if v > self.value:
            self.value, self.instance = v, instance


def _op(x, dims=None):
    return encode_operator(x, dims, kind=None)


def _psd_pair(rng, d):
    return tk.random_psd(d, rng), tk.random_psd(d, rng)


# core ------------------------------------------------------------------


def p_eig_roundtrip(rng, n, w):
    for _ in range(n):
        h = tk.random_hermitian(int(rng.integers(2, 9)), rng)
        e = la.eig(h)
        w.see(np.linalg.norm(e.recompose() - h) / np.linalg.norm(h), H=_op(h))


def p_eig_unitary(rng, n, w):
    for _ in range(n):
        h = tk.random_hermitian(int(rng.integers(2, 9)), rng)
        u = la.eig(h).vectors
        w.see(np.max(np.abs(u.conj().T @ u - np.eye(len(h)))), H=_op(h))


def p_trace_distance_triangle(rng, n, w):
    for _ in range(n):
        d = int(rng.integers(2, 6))
        r, s, o = (tk.random_density(d, seed=rng) for _ in range(3))
        w.see(la.trace_distance(r, s) - la.trace_distance(r, o) - la.trace_distance(o, s),
              rho=_op(r), sigma=_op(s), omega=_op(o))


def p_trace_distance_unitary(rng, n, w):
    for _ in range(n):
        d = int(rng.integers(2, 6))
        r, s, u = tk.random_density(d, seed=rng), tk.random_density(d, seed=rng), tk.random_unitary(d, rng)
        rot = la.trace_distance(u @ r @ u.conj().T, u @ s @ u.conj().T)
        w.see(abs(rot - la.trace_distance(r, s)), rho=_op(r), sigma=_op(s))


def p_nc_minimal_infimum(rng, n, w):
    # commuting case: the infimum runs over 0/1 diagonal tests
    for _ in range(n):
        a, b = rng.random(4) * 2, rng.random(4) * 2
        tests = np.array(np.meshgrid(*[[0, 1]] * 4)).reshape(4, -1).T
        brute = min(float(a @ (1 - t) + b @ t) for t in tests)
        w.see(abs(la.nc_minimal_trace(np.diag(a), np.diag(b)) - brute), a=a.tolist(), b=b.tolist())


def p_nc_minimal_order(rng, n, w):
    for _ in range(n):
        a, b = _psd_pair(rng, 3)
        a2, b2 = a + tk.random_psd(3, rng, 0.3), b + tk.random_psd(3, rng, 0.3)
        w.see(la.nc_minimal_trace(a, b) - la.nc_minimal_trace(a2, b2), A=_op(a), B=_op(b))


def p_nc_minimal_partial_trace(rng, n, w):
    for _ in range(n):
        a, b = _psd_pair(rng, 4)
        ta, tb = la.partial_trace(a, (2, 2), [0]), la.partial_trace(b, (2, 2), [0])
        w.see(la.nc_minimal_trace(a, b) - la.nc_minimal_trace(ta, tb), A=_op(a, (2, 2)), B=_op(b, (2, 2)))


def p_nc_minimal_upper(rng, n, w):
    for _ in range(n):
        a, b = _psd_pair(rng, 3)
        m = la.nc_minimal_trace(a, b)
        for s in np.arange(1, 10) / 10:
            w.see(m - np.trace(la.mpow(a, 1 - s) @ la.mpow(b, s)).real, A=_op(a), B=_op(b), s=float(s))


def p_nc_minimal_lower(rng, n, w):
    for _ in range(n):
        a, b = _psd_pair(rng, 3)
        q = la.nc_quotient(b, a + b, 0.5)
        w.see(np.trace(a @ q).real - la.nc_minimal_trace(a, b), A=_op(a), B=_op(b))


def p_pinching_inequality(rng, n, w):
    for k in range(n):
        d = int(rng.integers(2, 6))
        if k % 2:
            # degenerate spectrum exercises the clustering
            vals = rng.integers(0, 2, d).astype(float)
            u = tk.random_unitary(d, rng)
            h = (u * vals) @ u.conj().T
        else:
            h = tk.random_hermitian(d, rng)
        l = tk.random_psd(d, rng)
        gap = la.pinching(h, l) - l / la.spec_count(h)
        w.see(-np.linalg.eigvalsh(la.hermitian_part(gap))[0], H=_op(h), L=_op(l))


def p_cq_trace_distance(rng, n, w):
    for _ in range(n):
        st = tk.random_cq(int(rng.integers(2, 5)), (2,), rng)
        dense, px = st.to_dense(), st.classical()
        for x in range(st.n):
            e = np.zeros((st.n, st.n))
            e[x, x] = 1
            lhs = la.schatten_norm(dense - np.kron(e, st.conditionals[x]), 1)
            rhs = la.schatten_norm(px - e, 1)
            w.see(abs(lhs - rhs), probs=st.probs.tolist(), x=x)


# divergences -----------------------------------------------------------


def _pair(rng, d=None):
    d = int(rng.integers(2, 5)) if d is None else d
    return tk.random_density(d, seed=rng), tk.random_density(d, seed=rng)


def p_dh_pinching_dpi(rng, n, w):
    for _ in range(n):
        r, s = _pair(rng)
        eps = float(rng.uniform(0.05, 0.95))
        gap = dv.hypothesis_testing_divergence(la.pinching(s, r), s, eps) - dv.hypothesis_testing_divergence(r, s, eps)
        w.see(gap, rho=_op(r), sigma=_op(s), eps=eps)


def p_dh_monotone_eps(rng, n, w):
    for _ in range(n):
        r, s = _pair(rng)
        e1, e2 = sorted(rng.uniform(0.05, 0.95, 2))
        gap = dv.hypothesis_testing_divergence(r, s, e1) - dv.hypothesis_testing_divergence(r, s, e2)
        w.see(gap, rho=_op(r), sigma=_op(s), eps=[float(e1), float(e2)])


def p_dh_certificate(rng, n, w):
    for _ in range(n):
        r, s = _pair(rng)
        eps = float(rng.uniform(0.05, 0.95))
        t = dv.neyman_pearson_test(r, s, eps)
        la.check_test(t.test)
        err = max(abs(-math.log(np.trace(s @ t.test).real) - t.value),
                  abs(np.trace(r @ t.test).real - (1 - eps)))
        w.see(err, rho=_op(r), sigma=_op(s), eps=eps)


def p_dh_floor(rng, n, w):
    for _ in range(n):
        r, s = _pair(rng)
        eps = float(rng.uniform(0.05, 0.95))
        w.see(-math.log(1 - eps) - dv.hypothesis_testing_divergence(r, s, eps), rho=_op(r), sigma=_op(s), eps=eps)


def p_renyi_continuity(rng, n, w):
    # the gap is about 5e-4 times the relative entropy variance, so the pairs
    # are kept well conditioned by a 10% maximally mixed admixture
    for _ in range(n):
        r, s = _pair(rng)
        d = len(r)
        r, s = 0.9 * r + 0.1 * np.eye(d) / d, 0.9 * s + 0.1 * np.eye(d) / d
        d = dv.relative_entropy(r, s)
        for a in (0.999, 1.001):
            w.see(max(abs(dv.petz_renyi(r, s, a) - d), abs(dv.sandwiched_renyi(r, s, a) - d)),
                  rho=_op(r), sigma=_op(s), alpha=a)


def p_divergences_vanish(rng, n, w):
    for _ in range(n):
        r = tk.random_density(int(rng.integers(2, 5)), seed=rng)
        vals = [dv.relative_entropy(r, r), dv.petz_renyi(r, r, 0.5), dv.petz_renyi(r, r, 1.5),
                dv.sandwiched_renyi(r, r, 0.75), dv.sandwiched_renyi(r, r, 2.0)]
        w.see(max(abs(v) for v in vals), rho=_op(r))


# information -----------------------------------------------------------


def p_fixed_point_certificate(rng, n, w):
    for _ in range(n):
        r = tk.random_bipartite(2, 2, rng)
        a = float(rng.choice([1.25, 1.5, 2.0]))
        res = info.doubly_minimized_info(r, a, (2, 2))
        w.see(res.residual if res.converged else math.inf, rho=_op(r, (2, 2)), alpha=a)


def p_monotone_descent(rng, n, w):
    for _ in range(n):
        r = tk.random_bipartite(2, 2, rng)
        a = float(rng.uniform(1.05, 2.0))
        h = np.array(info.doubly_minimized_info(r, a, (2, 2)).history)
        w.see(float(np.max(np.diff(h), initial=0.0)), rho=_op(r, (2, 2)), alpha=a)


def p_log_convexity(rng, n, w):
    for _ in range(n):
        t1, t2, s1, s2 = (tk.random_density(2, seed=rng) for _ in range(4))
        k = tk.random_psd(4, rng)
        s = float(rng.choice([-1.0, -0.5, -0.1]))

        def lf(t, g):
            return math.log(np.trace(k @ la.mpow(np.kron(t, g), s)).real)

        gap = lf((t1 + t2) / 2, (s1 + s2) / 2) - 0.5 * lf(t1, s1) - 0.5 * lf(t2, s2)
        w.see(gap, tau=_op(t1), tau2=_op(t2), sigma=_op(s1), sigma2=_op(s2), K=_op(k), s=s)


def p_joint_convexity(rng, n, w):
    for _ in range(n):
        r = tk.random_bipartite(2, 2, rng)
        a = float(rng.uniform(1.05, 2.0))
        t1, t2, s1, s2 = (tk.random_density(2, seed=rng) for _ in range(4))

        def f(t, g):
            return dv.sandwiched_renyi(r, np.kron(t, g), a)

        w.see(f((t1 + t2) / 2, (s1 + s2) / 2) - 0.5 * (f(t1, s1) + f(t2, s2)), rho=_op(r, (2, 2)), alpha=a)


# convex split ----------------------------------------------------------


def _instance(rng, M=None):
    r = tk.random_bipartite(2, 2, rng)
    t = tk.random_density(2, seed=rng)
    M = int(rng.choice([1, 2, 3, 4])) if M is None else M
    return cs.ConvexSplitInstance(r, t, M)


def _inst_record(inst):
    return {"rho_AB": _op(inst.rho_AB, inst.dims), "tau_A": _op(inst.tau_A), "M": inst.M}


def p_formulation_identity(rng, n, w):
    for _ in range(n):
        inst = _instance(rng)
        delta = cs.covering_error_exact(inst)
        for sigma in (inst.rho_B, tk.random_density(2, seed=rng)):
            for g in (0.0, 0.5, 1.0):
                w.see(abs(cs.covering_error_via_theta(inst, sigma, g) - delta), gamma=g, sigma=_op(sigma),
                      **_inst_record(inst))


def p_bound_sandwich(rng, n, w):
    for _ in range(n):
        inst = _instance(rng)
        d = cs.covering_error_exact(inst)
        up = cs.exponent_upper_bound(inst).value
        lo = cs.oneshot_converse_lower_bound(inst).value
        sc = cs.strong_converse_lower_bound(inst).value
        w.see(max(d - up, lo - d, sc - d), **_inst_record(inst))


def p_commuting_reduction(rng, n, w):
    for _ in range(n):
        p = rng.dirichlet(np.ones(4)).reshape(2, 2)
        q = rng.dirichlet(np.ones(2))
        M = int(rng.integers(1, 6))
        inst = cs.ConvexSplitInstance(tk.classical_embed(p), np.diag(q).astype(complex), M)
        w.see(abs(cs.covering_error_exact(inst) - tk.classical_covering_oracle(p, q, M)),
              p=p.tolist(), q=q.tolist(), M=M)


def p_positivity_threshold(rng, n, w):
    # violation 1 when an exponent has the wrong sign, 0 otherwise
    for _ in range(n):
        inst = _instance(rng, 1)
        i = info.generalized_mutual_information(inst.rho_AB, inst.tau_A, inst.dims)
        curve = info.sandwiched_renyi_information_curve(inst.rho_AB, inst.tau_A, cs.ALPHA_EXPONENT, inst.dims)
        ref = np.kron(inst.tau_A, inst.rho_B)
        petz = [dv.petz_renyi(inst.rho_AB, ref, 2 - 1 / a) for a in cs.ALPHA_STRONG]
        for side in (+1, -1):
            logm = i + side * 0.05
            if logm < 0:
                continue
            up = max((a - 1) / a * (logm - r.value) for a, r in zip(cs.ALPHA_EXPONENT, curve))
            sc = max((1 - a) / a * (p - logm) for a, p in zip(cs.ALPHA_STRONG, petz))
            ok = (up > 0 and sc <= 0) if side > 0 else (up <= 0 and sc > 0)
            w.see(0.0 if ok else 1.0, logM=logm, I=i, **_inst_record(inst))


# applications ----------------------------------------------------------


def p_component_additivity(rng, n, w):
    for _ in range(n):
        st = tk.random_cq(2, (2, 2), rng)
        b = apps.wiretap_bound(st, float(rng.uniform(0, 0.3)), float(rng.uniform(0, 0.5)))
        neg = -min(b.components.values())
        w.see(max(abs(b.epsilon_bound - sum(b.components.values())), neg), probs=st.probs.tolist())


def _correlated_cq(rng):
    # strongly correlated X-B with a noisier copy on E keeps the region nonempty
    probs = rng.dirichlet(np.ones(2))
    conds = []
    for x in range(2):
        b = np.diag([0.95, 0.05] if x == 0 else [0.05, 0.95])
        u = tk.random_unitary(2, rng)
        e = 0.5 * np.eye(2) + 0.2 * (u @ np.diag([1, -1]) @ u.conj().T) * (1 if x == 0 else -1)
        conds.append(np.kron(b, e))
    return tk.CqState(probs, conds, (2, 2))


def p_positivity_region(rng, n, w):
    for _ in range(n):
        st = _correlated_cq(rng)
        xb, xe = st.reduce([0]), st.reduce([1])
        iu = apps.petz_up_curve(xb)
        istar = [r.value for r in apps.sandwiched_info_curve(xe)]
        ib, ie = apps.cq_mutual_information(xb), apps.cq_mutual_information(xe)
        gap = ib - ie
        if gap <= 0.1:
            continue
        inside = apps.witness_logk(iu, apps.ALPHA_PACKING, istar, cs.ALPHA_EXPONENT, gap - 0.05, ie, ib)
        bad = 0.0 if inside["positive"] else 1.0
        logm = gap + 0.05
        for lk in np.linspace(ie, ib, apps.K_GRID_POINTS):
            ep = apps.packing_exponent(iu, apps.ALPHA_PACKING, logm + lk)[0]
            ec = apps.covering_exponent(istar, cs.ALPHA_EXPONENT, lk)[0]
            if ep > 0 and ec > 0:
                bad = 1.0
        w.see(bad, probs=st.probs.tolist(), I_XB=ib, I_XE=ie)


def p_uhlmann_conversion(rng, n, w):
    for _ in range(n):
        psi, phi = tk.random_pure(4, rng), tk.random_pure(4, rng)
        pa = la.partial_trace(np.outer(psi, psi.conj()), (2, 2), [0])
        fa = la.partial_trace(np.outer(phi, phi.conj()), (2, 2), [0])
        u = la.trace_distance(pa, fa)
        _, U = apps.uhlmann_overlap(psi, phi, (2, 2))
        aligned = np.kron(np.eye(2), U) @ phi
        pd = math.sqrt(max(0.0, 1 - abs(np.vdot(psi, aligned)) ** 2))
        w.see(pd - apps.f_uhlmann(u), psi=to_jsonable(psi), phi=to_jsonable(phi))


def p_kraus_validation(rng, n, w):
    for _ in range(n):
        v = tk.random_unitary(4, rng)[:, :2]  # isometry C^2 -> C^2 ⊗ C^2
        kraus = [v[2 * k:2 * k + 2, :] for k in range(2)]
        ok_tp = True
        try:
            apps.check_kraus(kraus)
        except ValueError:
            ok_tp = False
        rejected = False
        try:
            apps.check_kraus([1.01 * k for k in kraus])
        except ValueError:
            rejected = True
        w.see(0.0 if ok_tp and rejected else 1.0, kraus=[to_jsonable(k) for k in kraus])


# suites ----------------------------------------------------------------

# (name, function, trial scale); the scale divides the requested trial count
SUITES: dict[str, list[tuple[str, Callable, int]]] = {
    "core": [
        ("eig_roundtrip", p_eig_roundtrip, 1),
        ("eig_unitary", p_eig_unitary, 1),
        ("trace_distance_triangle", p_trace_distance_triangle, 1),
        ("trace_distance_unitary", p_trace_distance_unitary, 1),
        ("nc_minimal_infimum", p_nc_minimal_infimum, 1),
        ("nc_minimal_order", p_nc_minimal_order, 1),
        ("nc_minimal_partial_trace", p_nc_minimal_partial_trace, 1),
        ("nc_minimal_upper", p_nc_minimal_upper, 1),
        ("nc_minimal_lower", p_nc_minimal_lower, 1),
        ("pinching_inequality", p_pinching_inequality, 1),
        ("cq_trace_distance", p_cq_trace_distance, 1),
    ],
    "divergences": [
        ("dh_pinching_dpi", p_dh_pinching_dpi, 1),
        ("dh_monotone_eps", p_dh_monotone_eps, 1),
        ("dh_certificate", p_dh_certificate, 1),
        ("dh_floor", p_dh_floor, 1),
        ("renyi_continuity", p_renyi_continuity, 1),
        ("divergences_vanish", p_divergences_vanish, 1),
    ],
    "info": [
        ("fixed_point_certificate", p_fixed_point_certificate, 2),
        ("monotone_descent", p_monotone_descent, 2),
        ("log_convexity", p_log_convexity, 1),
        ("joint_convexity", p_joint_convexity, 1),
    ],
    "convex-split": [
        ("formulation_identity", p_formulation_identity, 2),
        ("bound_sandwich", p_bound_sandwich, 4),
        ("commuting_reduction", p_commuting_reduction, 1),
        ("positivity_threshold", p_positivity_threshold, 4),
    ],
    "applications": [
        ("component_additivity", p_component_additivity, 10),
        ("positivity_region", p_positivity_region, 10),
        ("uhlmann_conversion", p_uhlmann_conversion, 1),
        ("kraus_validation", p_kraus_validation, 1),
    ],
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def run_property(suite: str, name: str, fn: Callable, trials: int, seed: int) -> PropertyResult:
    rng = np.random.default_rng([seed, sum(map(ord, suite + "/" + name))])
    w = _Worst()
    start = time.perf_counter()
    try:
        fn(rng, trials, w)
    except Exception as exc:  # a crash is a failure with its message as the counterexample
        w.see(math.inf, error=f"{type(exc).__name__}: {exc}")
    tol = TOLERANCES[name]
    worst = w.value if w.value > -math.inf else 0.0
    passed = worst <= tol
    return PropertyResult(suite, name, passed, trials, worst, tol, time.perf_counter() - start,
                          None if passed else to_jsonable(w.instance))


def run_suite(suite: str, trials: int = 100, seed: int = 0) -> list[PropertyResult]:
    if suite not in SUITE_NAMES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)}")
    names = list(SUITES) if suite == "all" else [suite]
    out = []
    for s in names:
        for name, fn, scale in SUITES[s]:
            out.append(run_property(s, name, fn, max(1, trials // scale), seed))
    return out
