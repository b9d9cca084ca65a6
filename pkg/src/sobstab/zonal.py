"""Zonal (axially symmetric) spectral calculus on the unit sphere S^N.

A zonal function depends only on the latitude t = xi . pole, so every
integral over S^N reduces to one over t in (-1, 1) against the measure
|S^(N-1)| (1 - t^2)^((N-2)/2) dt.  This module provides:

  * Gauss-Jacobi quadrature for that measure (Golub-Welsch construction),
  * the orthonormal zonal-harmonic basis e_k (normalized ultraspherical
    polynomials with positive leading coefficient),
  * analysis/synthesis between node samples and coefficients,
  * L^p norms and the spectral quadratic form sum lambda_k a_k^2 that
    realizes the conformal operator norm ||.||_*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .specfun import SobolevParams, _sphere_area, eigenvalue

__all__ = [
    "QuadratureRule",
    "ZonalFunction",
    "gauss_jacobi_rule",
    "default_rule",
    "basis_eval",
    "analyze",
    "synthesize",
    "norm_star",
    "inner_star",
    "norm_lp",
    "lambdas",
    "constant",
    "basis_function",
    "to_json_dict",
    "from_json_dict",
]


def _recurrence_sq(N: int, n: int) -> float:
    # Squared off-diagonal coefficient b_n^2 of the monic three-term
    # recurrence for the weight (1-t^2)^((N-2)/2); n >= 1.
    if n == 1:
        return 1.0 / (N + 1.0)
    return n * (n + N - 2.0) / ((2.0 * n + N - 1.0) * (2.0 * n + N - 3.0))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss rule on (-1, 1) carrying the full latitudinal sphere measure.

    weights sum to |S^N|; nodes are strictly increasing and symmetric
    about 0.  Immutable; basis matrices are cached per truncation degree.
    """

    N: int
    nodes: np.ndarray
    weights: np.ndarray
    _basis_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def M(self) -> int:
        return self.nodes.size

    def basis(self, K: int) -> np.ndarray:
        """Matrix e_k(t_i), shape (K+1, M), cached."""
        E = self._basis_cache.get(K)
        if E is None:
            E = _basis_matrix(self.N, K, self.nodes)
            E.setflags(write=False)
            self._basis_cache[K] = E
        return E

    def integrate(self, samples: np.ndarray) -> float:
        """Integral over S^N of a zonal integrand given by node samples."""
        return float(self.weights @ np.asarray(samples, dtype=float))


@lru_cache(maxsize=None)
def gauss_jacobi_rule(N: int, M: int) -> QuadratureRule:
    """M-point Gauss rule for the weight |S^(N-1)| (1-t^2)^((N-2)/2) on (-1, 1).

    Golub-Welsch: eigenvalues of the symmetric tridiagonal recurrence
    matrix are the nodes, squared first eigenvector components (scaled by
    the total measure |S^N|) the weights.  Exact for polynomial integrands
    of degree <= 2M - 1.
    """
    if N < 1:
        raise ValueError(f"dimension N must be >= 1, got {N}")
    if M < 2:
        raise ValueError(f"rule size M must be >= 2, got {M}")
    off = np.sqrt([_recurrence_sq(N, n) for n in range(1, M)])
    nodes, vecs = eigh_tridiagonal(np.zeros(M), off)
    weights = _sphere_area(N) * vecs[0, :] ** 2
    # eigh returns sorted eigenvalues; enforce exact reflection symmetry
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(N, nodes, weights)


def default_rule(N: int, K: int) -> QuadratureRule:
    """Rule with the default node count M = 2K + 2 for truncation degree K."""
    return gauss_jacobi_rule(N, 2 * K + 2)


def _basis_matrix(N: int, K: int, t: np.ndarray) -> np.ndarray:
    # Orthonormal recurrence b_{k+1} e_{k+1} = t e_k - b_k e_{k-1};
    # coefficients are O(1/2), so the forward pass is stable for any K.
    t = np.asarray(t, dtype=float)
    out = np.empty((K + 1,) + t.shape)
    out[0] = 1.0 / math.sqrt(_sphere_area(N))
    if K >= 1:
        b_k = math.sqrt(_recurrence_sq(N, 1))
        out[1] = t * out[0] / b_k
        for k in range(1, K):
            b_next = math.sqrt(_recurrence_sq(N, k + 1))
            out[k + 1] = (t * out[k] - b_k * out[k - 1]) / b_next
            b_k = b_next
    return out


def basis_eval(N: int, k: int, t):
    """Orthonormal zonal harmonic e_k at latitude(s) t, |t| <= 1.

    Normalized so that the integral of e_k e_j over S^N is delta_kj, with
    positive leading coefficient (e_1 is a positive multiple of t).
    """
    if k < 0:
        raise ValueError(f"degree k must be >= 0, got {k}")
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0):
        raise ValueError("latitude outside [-1, 1]")
    vals = _basis_matrix(N, k, np.atleast_1d(arr))[k]
    return float(vals[0]) if arr.ndim == 0 else vals


@lru_cache(maxsize=None)
def _lambda_vector(N: int, s: float, K: int) -> np.ndarray:
    p = SobolevParams(N, s)
    lam = np.array([eigenvalue(p, k) for k in range(K + 1)])
    lam.setflags(write=False)
    return lam


def lambdas(params: SobolevParams, K: int) -> np.ndarray:
    """Eigenvalues lambda_0 .. lambda_K as a read-only vector."""
    return _lambda_vector(params.N, params.s, K)


@dataclass(frozen=True, eq=False)
class ZonalFunction:
    """Coefficients a_0..a_K in the orthonormal zonal basis, plus (N, s).

    Parseval: the L^2(S^N) norm is sqrt(sum a_k^2); the conformal-operator
    norm is ||u||_*^2 = sum lambda_k(s) a_k^2.
    """

    params: SobolevParams
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("coeffs must be a non-empty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def K(self) -> int:
        return self.coeffs.size - 1

    def _binary(self, other: "ZonalFunction", sign: float) -> "ZonalFunction":
        if self.params != other.params:
            raise ValueError("operands have different (N, s) parameters")
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n)
        a[: self.coeffs.size] = self.coeffs
        a[: other.coeffs.size] += sign * other.coeffs
        return ZonalFunction(self.params, a)

    def __add__(self, other: "ZonalFunction") -> "ZonalFunction":
        return self._binary(other, 1.0)

    def __sub__(self, other: "ZonalFunction") -> "ZonalFunction":
        return self._binary(other, -1.0)

    def __mul__(self, scalar: float) -> "ZonalFunction":
        return ZonalFunction(self.params, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ZonalFunction":
        return self * -1.0


def constant(params: SobolevParams, value: float, K: int) -> ZonalFunction:
    """The constant function `value` on S^N as a degree-K coefficient vector."""
    a = np.zeros(K + 1)
    a[0] = value * math.sqrt(_sphere_area(params.N))
    return ZonalFunction(params, a)


def basis_function(params: SobolevParams, k: int, K: int) -> ZonalFunction:
    """e_k as a ZonalFunction of truncation degree K >= k."""
    if k > K:
        raise ValueError(f"basis degree {k} exceeds truncation {K}")
    a = np.zeros(K + 1)
    a[k] = 1.0
    return ZonalFunction(params, a)


def analyze(params: SobolevParams, samples, rule: QuadratureRule, K: int) -> ZonalFunction:
    """Project node samples onto e_0..e_K: a_k = sum_i w_i f(t_i) e_k(t_i).

    Exact for zonal polynomials of degree <= K whenever M >= K + 1; fewer
    nodes than that cannot resolve degree K and is refused (aliasing).
    """
    if rule.N != params.N:
        raise ValueError(f"rule dimension {rule.N} != params dimension {params.N}")
    if rule.M <= K:
        raise ValueError(f"M={rule.M} nodes cannot resolve degree K={K} (need M >= K+1)")
    vals = np.asarray(samples, dtype=float)
    if vals.shape != (rule.M,):
        raise ValueError(f"expected {rule.M} samples, got shape {vals.shape}")
    if not np.all(np.isfinite(vals)):
        raise ValueError("samples must be finite")
    return ZonalFunction(params, rule.basis(K) @ (rule.weights * vals))


def synthesize(u: ZonalFunction, t):
    """Evaluate sum_k a_k e_k at latitude(s) t, |t| <= 1."""
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0):
        raise ValueError("latitude outside [-1, 1]")
    vals = u.coeffs @ _basis_matrix(u.params.N, u.K, np.atleast_1d(arr))
    return float(vals[0]) if arr.ndim == 0 else vals


def node_values(u: ZonalFunction, rule: QuadratureRule) -> np.ndarray:
    """Values of u at the rule's nodes (cached basis fast path)."""
    if rule.N != u.params.N:
        raise ValueError(f"rule dimension {rule.N} != params dimension {u.params.N}")
    return u.coeffs @ rule.basis(u.K)


def norm_star(u: ZonalFunction) -> float:
    """Spectral norm sqrt(sum lambda_k a_k^2) of the conformal quadratic form."""
    lam = lambdas(u.params, u.K)
    return math.sqrt(float(lam @ (u.coeffs * u.coeffs)))


def inner_star(u: ZonalFunction, v: ZonalFunction) -> float:
    """Spectral inner product sum lambda_k a_k b_k; the polarization of norm_star."""
    if u.params != v.params:
        raise ValueError("operands have different (N, s) parameters")
    n = min(u.coeffs.size, v.coeffs.size)
    lam = lambdas(u.params, n - 1)
    return float(lam @ (u.coeffs[:n] * v.coeffs[:n]))


def norm_l2(u: ZonalFunction) -> float:
    """L^2(S^N) norm via Parseval."""
    return float(np.linalg.norm(u.coeffs))


def norm_lp(u: ZonalFunction, p: float, rule: QuadratureRule) -> float:
    """L^p(S^N) norm by quadrature of |u|^p at the rule nodes; p >= 1."""
    if p < 1.0:
        raise ValueError(f"norm_lp requires p >= 1, got {p}")
    vals = np.abs(node_values(u, rule))
    return float((rule.weights @ vals**p) ** (1.0 / p))


def to_json_dict(u: ZonalFunction) -> dict:
    """JSON-ready form {N, s, K, coeffs}; field order is part of the schema."""
    return {
        "N": u.params.N,
        "s": u.params.s,
        "K": u.K,
        "coeffs": [float(c) for c in u.coeffs],
    }


def from_json_dict(d: dict) -> ZonalFunction:
    """Inverse of to_json_dict."""
    u = ZonalFunction(SobolevParams(int(d["N"]), float(d["s"])), np.asarray(d["coeffs"], dtype=float))
    if u.K != int(d["K"]):
        raise ValueError(f"K={d['K']} does not match {u.K + 1} coefficients")
    return u
