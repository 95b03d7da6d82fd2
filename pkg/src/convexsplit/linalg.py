"""Dense Hermitian linear algebra on finite-dimensional operators.

Operators are plain ``numpy`` arrays. Functions that need the tensor
structure take an explicit ``dims`` sequence whose product equals the
matrix side, e.g. ``dims=(2, 3)`` for a qubit-qutrit operator.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
SUPPORT_RTOL = 1e-10
BOUNDARY_TOL = 1e-10
CLUSTER_RTOL = 1e-8


class SupportWarning(UserWarning):
    """Raised when an operator leaks outside the support it is divided by."""


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray

    def recompose(self) -> np.ndarray:
        u = self.vectors
        return (u * self.values) @ u.conj().T


def eig(h: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    w, u = np.linalg.eigh(hermitian_part(h))
    return EigenDecomposition(w, u)


def hermitian_part(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return (x + x.conj().T) / 2


def as_operator(x, dims: Sequence[int] | None = None) -> np.ndarray:
    """Cast to a complex square matrix, checking ``dims`` if given."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    if dims is not None and int(np.prod(dims)) != x.shape[0]:
        raise ValueError(f"dims {list(dims)} do not match side {x.shape[0]}")
    return x


def check_hermitian(x, dims: Sequence[int] | None = None) -> np.ndarray:
    x = as_operator(x, dims)
    err = np.max(np.abs(x - x.conj().T)) if x.size else 0.0
    if err > HERMITIAN_TOL:
        raise ValueError(f"operator is not Hermitian (deviation {err:.3g})")
    return hermitian_part(x)


def check_density(x, dims: Sequence[int] | None = None) -> np.ndarray:
    """Validate a density operator and clamp tiny negative eigenvalues."""
    x = check_hermitian(x, dims)
    w, u = np.linalg.eigh(x)
    if w[0] < -PSD_TOL:
        raise ValueError(f"operator is not positive (min eigenvalue {w[0]:.3g})")
    tr = w.sum()
    if abs(tr - 1) > TRACE_TOL:
        raise ValueError(f"trace is {tr:.12g}, expected 1")
    if w[0] < 0:
        x = (u * np.clip(w, 0, None)) @ u.conj().T
    return x


def check_psd(x, dims: Sequence[int] | None = None) -> np.ndarray:
    x = check_hermitian(x, dims)
    lo = np.linalg.eigvalsh(x)[0]
    if lo < -PSD_TOL * max(1.0, np.abs(x).max()):
        raise ValueError(f"operator is not positive (min eigenvalue {lo:.3g})")
    return x


def check_test(x, dims: Sequence[int] | None = None) -> np.ndarray:
    """Validate an operator 0 <= T <= 1."""
    x = check_hermitian(x, dims)
    w = np.linalg.eigvalsh(x)
    if w[0] < -PSD_TOL or w[-1] > 1 + PSD_TOL:
        raise ValueError(f"test eigenvalues outside [0, 1]: [{w[0]:.3g}, {w[-1]:.3g}]")
    return x


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of operators (left to right)."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def partial_trace(x: np.ndarray, dims: Sequence[int], keep: Sequence[int] | int) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    The kept factors stay in their original order.
    """
    dims = [int(d) for d in dims]
    x = as_operator(x, dims)
    keep = sorted({keep} if isinstance(keep, (int, np.integer)) else set(keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"factor index out of range for dims {dims}: {keep}")
    t = x.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # trace the highest index first so lower axis numbers stay valid
    for k in reversed(traced):
        cur = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + cur)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def permute_factors(x: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor ``i`` is old factor ``order[i]``."""
    dims = [int(d) for d in dims]
    n = len(dims)
    t = np.asarray(x).reshape(dims + dims)
    t = t.transpose(list(order) + [n + k for k in order])
    side = int(np.prod(dims))
    return t.reshape(side, side)


def support_tol(values: np.ndarray) -> float:
    return SUPPORT_RTOL * (np.max(np.abs(values)) if len(values) else 0.0)


def spectral_fn(h: np.ndarray, f: Callable[[np.ndarray], np.ndarray], support_only: bool = False) -> np.ndarray:
    """Apply a real function to the spectrum of a Hermitian matrix.

    Parameters
    ----------
    h : Hermitian matrix.
    f : vectorized real function.
    support_only : if set, eigenvalues with ``|λ| <= support_tol`` are
        mapped to 0 instead of being passed to ``f``.
    """
    w, u = eig(h)
    tol = support_tol(w)
    keep = np.abs(w) > tol if support_only else np.ones(len(w), dtype=bool)
    fw = np.zeros(len(w))
    with np.errstate(all="ignore"):
        fw[keep] = f(w[keep])
    if not np.all(np.isfinite(fw)):
        raise ValueError("function is undefined on part of the spectrum")
    return (u * fw) @ u.conj().T


def mpow(h: np.ndarray, s: float) -> np.ndarray:
    """Power of a positive semidefinite matrix.

    Negative powers are taken on the support (Moore-Penrose convention);
    zero powers give the support projector.
    """
    w, u = eig(h)
    tol = support_tol(w)
    if w[0] < -max(PSD_TOL, tol):
        raise ValueError(f"matrix is not positive (min eigenvalue {w[0]:.3g})")
    fw = np.zeros(len(w))
    pos = w > tol
    fw[pos] = w[pos] ** s
    return (u * fw) @ u.conj().T


def logm_psd(h: np.ndarray) -> np.ndarray:
    """Natural logarithm restricted to the support."""
    return spectral_fn(h, np.log, support_only=True)


def support_projector(h: np.ndarray) -> np.ndarray:
    return mpow(h, 0.0)


def schatten_norm(x: np.ndarray, p: float = 1.0) -> float:
    """Schatten p-norm through singular values; ``p=np.inf`` is the operator norm."""
    if p < 1:
        raise ValueError("Schatten norms need p >= 1")
    s = scipy.linalg.svdvals(np.asarray(x))
    if np.isinf(p):
        return float(s.max(initial=0.0))
    if p == 1:
        return float(s.sum())
    return float(np.sum(s**p) ** (1 / p))


def trace_norm_hermitian(x: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(hermitian_part(x))).sum())


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    return 0.5 * trace_norm_hermitian(rho - sigma)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity ``||sqrt(rho) sqrt(sigma)||_1``."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    return schatten_norm(mpow(rho, 0.5) @ mpow(sigma, 0.5), 1)


def purified_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``sqrt(1 - F^2)`` with the root fidelity ``F``."""
    f = min(fidelity(rho, sigma), 1.0)
    return float(np.sqrt(1 - f**2))


def positive_part_projector(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Projector onto the strictly positive eigenspace of ``a - b``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    w, u = eig(a - b)
    v = u[:, w > BOUNDARY_TOL * max(1.0, np.abs(w).max(initial=0.0))]
    return v @ v.conj().T


def nc_minimal_trace(a: np.ndarray, b: np.ndarray) -> float:
    """Trace of the noncommutative minimal ``(a + b - |a - b|) / 2``."""
    a, b = check_psd(a), check_psd(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(0.5 * (np.trace(a).real + np.trace(b).real - trace_norm_hermitian(a - b)))


def _clusters(w: np.ndarray, scale: float) -> list[np.ndarray]:
    tol = CLUSTER_RTOL * scale
    cuts = np.nonzero(np.diff(w) > tol)[0] + 1
    return np.split(np.arange(len(w)), cuts)


def spec_count(h: np.ndarray) -> int:
    """Number of distinct eigenvalues of ``h`` after clustering."""
    w = np.linalg.eigvalsh(hermitian_part(h))
    return len(_clusters(w, np.abs(w).max(initial=0.0)))


def pinching(h: np.ndarray, l: np.ndarray) -> np.ndarray:
    """Pinch ``l`` with the spectral projectors of ``h``."""
    w, u = eig(h)
    lt = u.conj().T @ np.asarray(l) @ u
    mask = np.zeros(lt.shape, dtype=bool)
    for idx in _clusters(w, np.abs(w).max(initial=0.0)):
        mask[np.ix_(idx, idx)] = True
    return u @ np.where(mask, lt, 0) @ u.conj().T


def support_leak(x: np.ndarray, y: np.ndarray) -> float:
    """Weight of ``x`` outside the support of ``y`` (trace norm, relative)."""
    perp = np.eye(len(y)) - support_projector(y)
    scale = max(schatten_norm(x, 1), 1e-300)
    return max(schatten_norm(perp @ x, 1), schatten_norm(x @ perp, 1)) / scale


def nc_quotient(x: np.ndarray, y: np.ndarray, gamma: float) -> np.ndarray:
    """Asymmetric quotient ``y^(gamma-1) x y^(-gamma)``, pseudo-inverse on supp y."""
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    if support_leak(x, y) > 1e-8:
        import warnings

        warnings.warn("numerator is not supported on the denominator's support", SupportWarning, stacklevel=2)
    return mpow(y, gamma - 1) @ np.asarray(x) @ mpow(y, -gamma)


def weighted_lp_norm(x: np.ndarray, p: float, gamma: float, sigma: np.ndarray) -> float:
    """Weighted norm ``(Tr |sigma^((1-gamma)/p) x sigma^(gamma/p)|^p)^(1/p)``."""
    if p < 1:
        raise ValueError("weighted norms need p >= 1")
    z = mpow(sigma, (1 - gamma) / p) @ np.asarray(x) @ mpow(sigma, gamma / p)
    return schatten_norm(z, p)


def geometric_mean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Operator geometric mean ``x # y`` of positive definite matrices."""
    wx = np.linalg.eigvalsh(hermitian_part(x))
    wy = np.linalg.eigvalsh(hermitian_part(y))
    if wx[0] <= 0 or wy[0] <= 0:
        raise ValueError("geometric mean needs positive definite inputs")
    xh = mpow(x, 0.5)
    xih = mpow(x, -0.5)
    return hermitian_part(xh @ mpow(hermitian_part(xih @ y @ xih), 0.5) @ xh)
