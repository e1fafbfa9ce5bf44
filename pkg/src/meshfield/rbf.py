"""Radial basis function interpolation and gradient evaluation.

Scattered source values are fitted with a kernel expansion
``s(x) = sum_j c_j phi(|x - x_j|)`` plus an optional constant-and-linear
polynomial tail; targets evaluate either the expansion itself or its
analytic gradient. A global fit solves one dense system over all source
points; the local mode solves a small system per target over a neighbor
set. Complex values are handled by fitting real and imaginary parts
separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve
from scipy.spatial import cKDTree

from .config import worker_count
from .errors import SingularKernelError

_RCOND_LIMIT = 1e-14


class _Kernel:
    """phi(r) and the gradient factor g(r) = phi'(r)/r."""

    name: str

    def __init__(self, epsilon: float):
        if epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        self.epsilon = epsilon

    def value(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad_factor(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class GaussianKernel(_Kernel):
    """phi(r) = exp(-(eps r)^2)."""

    name = "gaussian"

    def value(self, r):
        return np.exp(-((self.epsilon * r) ** 2))

    def grad_factor(self, r):
        return -2.0 * self.epsilon**2 * np.exp(-((self.epsilon * r) ** 2))


class MultiquadricKernel(_Kernel):
    """phi(r) = sqrt(1 + (eps r)^2)."""

    name = "multiquadric"

    def value(self, r):
        return np.sqrt(1.0 + (self.epsilon * r) ** 2)

    def grad_factor(self, r):
        return self.epsilon**2 / np.sqrt(1.0 + (self.epsilon * r) ** 2)


class WendlandC2Kernel(_Kernel):
    """Compactly supported phi(r) = (1 - eps r)_+^4 (4 eps r + 1)."""

    name = "wendland_c2"

    def value(self, r):
        u = self.epsilon * r
        return np.where(u < 1.0, (1.0 - u) ** 4 * (4.0 * u + 1.0), 0.0)

    def grad_factor(self, r):
        u = self.epsilon * r
        return np.where(u < 1.0, -20.0 * self.epsilon**2 * (1.0 - u) ** 3, 0.0)


_KERNELS = {
    "gaussian": GaussianKernel,
    "multiquadric": MultiquadricKernel,
    "wendland_c2": WendlandC2Kernel,
}


def make_kernel(name: str, epsilon: float) -> _Kernel:
    try:
        cls = _KERNELS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel '{name}'; choose from {sorted(_KERNELS)}"
        ) from None
    return cls(epsilon)


@dataclass
class RBFConfig:
    """Kernel fit parameters.

    ``smoothing`` adds a ridge term on the kernel diagonal; zero means
    pure interpolation. ``polynomial`` appends a constant-plus-linear
    tail to the expansion (None: off for value interpolation, on for
    gradients). The local mode takes the ``neighbors`` nearest source
    points per target, widened by all points within
    ``radius_factor * mean(neighbor distances)`` and topped up to
    ``min_neighbors``.
    """

    kernel: str = "gaussian"
    epsilon: float = 1.0
    smoothing: float = 0.0
    local: bool = False
    neighbors: int = 20
    min_neighbors: int = 5
    radius_factor: float = 1.5
    polynomial: bool | None = None

    def __post_init__(self):
        if self.kernel not in _KERNELS:
            raise ValueError(
                f"unknown kernel '{self.kernel}'; choose from {sorted(_KERNELS)}"
            )
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.smoothing < 0:
            raise ValueError("smoothing must be >= 0")
        if self.neighbors < 1:
            raise ValueError("neighbors must be >= 1")
        if self.min_neighbors < 1:
            raise ValueError("min_neighbors must be >= 1")
        if self.radius_factor <= 0:
            raise ValueError("radius_factor must be > 0")


def _pairwise_r(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.linalg.norm(diff, axis=2)


def _poly_block(points: np.ndarray) -> np.ndarray:
    """Constant + linear monomial matrix, one row per point."""
    return np.column_stack([np.ones(len(points)), points])


def _factor_checked(mat: np.ndarray):
    """LU-factor with an explicit reciprocal-condition estimate."""
    anorm = np.linalg.norm(mat, 1)
    lu, piv = lu_factor(mat)
    gecon = get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm)
    if info != 0 or not np.isfinite(rcond) or rcond < _RCOND_LIMIT:
        raise SingularKernelError(
            "kernel matrix is numerically singular (reciprocal condition "
            f"number {rcond:.2e}); increase smoothing or adjust epsilon"
        )
    return lu, piv


def _solve_system(kmat: np.ndarray, pblock: np.ndarray | None, rhs: np.ndarray):
    """Solve the (optionally polynomial-augmented) symmetric fit system.

    Returns (kernel coefficients, polynomial coefficients or None), one
    column per RHS column.
    """
    n = kmat.shape[0]
    if pblock is None:
        full = kmat
        b = rhs
    else:
        q = pblock.shape[1]
        full = np.zeros((n + q, n + q))
        full[:n, :n] = kmat
        full[:n, n:] = pblock
        full[n:, :n] = pblock.T
        b = np.vstack([rhs, np.zeros((q, rhs.shape[1]))])
    if np.iscomplexobj(b):
        lu, piv = _factor_checked(full)
        sol = lu_solve((lu, piv), b.real) + 1j * lu_solve((lu, piv), b.imag)
    else:
        lu, piv = _factor_checked(full)
        sol = lu_solve((lu, piv), b)
    if pblock is None:
        return sol, None
    return sol[:n], sol[n:]


def _fit_global(points: np.ndarray, values: np.ndarray, kernel: _Kernel,
                smoothing: float, poly: bool):
    kmat = kernel.value(_pairwise_r(points, points))
    kmat[np.diag_indices_from(kmat)] += smoothing
    pblock = _poly_block(points) if poly else None
    return _solve_system(kmat, pblock, values)


def _eval_values(targets, points, coef, pcoef, kernel):
    out = kernel.value(_pairwise_r(targets, points)) @ coef
    if pcoef is not None:
        out = out + _poly_block(targets) @ pcoef
    return out


def _eval_gradient(targets, points, coef, pcoef, kernel):
    """grad s(x) = sum_j c_j g(|x - x_j|) (x - x_j) + linear tail slope."""
    diff = targets[:, None, :] - points[None, :, :]  # (t, s, d)
    r = np.linalg.norm(diff, axis=2)
    g = kernel.grad_factor(r)  # (t, s)
    # (t, d, m): sum over sources of c_j * g * diff
    out = np.einsum("tsd,sm->tdm", diff * g[..., None], coef)
    if pcoef is not None:
        out = out + pcoef[1:, :][None, :, :]  # drop constant row
    return out


def _local_neighborhoods(points: np.ndarray, targets: np.ndarray, cfg: RBFConfig):
    """Per-target source index sets for the local fit."""
    n_src = len(points)
    k = min(cfg.neighbors, n_src)
    tree = cKDTree(points)
    dist, idx = tree.query(targets, k=k, workers=worker_count())
    dist = dist.reshape(len(targets), k)
    idx = idx.reshape(len(targets), k)
    radii = cfg.radius_factor * dist.mean(axis=1)
    ball = tree.query_ball_point(targets, r=radii, workers=worker_count())
    hoods = []
    for t in range(len(targets)):
        merged = np.union1d(idx[t], np.asarray(ball[t], dtype=np.int64))
        if merged.size < cfg.min_neighbors and merged.size < n_src:
            kk = min(cfg.min_neighbors, n_src)
            _, extra = tree.query(targets[t], k=kk)
            merged = np.union1d(merged, np.atleast_1d(extra))
        hoods.append(merged)
    return hoods


def _check_inputs(source_points, source_values, target_points):
    source_points = np.atleast_2d(np.asarray(source_points, dtype=float))
    target_points = np.atleast_2d(np.asarray(target_points, dtype=float))
    values = np.asarray(source_values)
    if values.ndim == 1:
        values = values[:, None]
        squeeze = True
    else:
        squeeze = False
    if len(values) != len(source_points):
        raise ValueError(
            f"{len(source_points)} source points but {len(values)} values"
        )
    if source_points.shape[1] != target_points.shape[1]:
        raise ValueError("source and target point dimensions differ")
    if not np.iscomplexobj(values):
        values = values.astype(float)
    return source_points, values, target_points, squeeze


def rbf_interpolate(
    source_points: np.ndarray,
    source_values: np.ndarray,
    target_points: np.ndarray,
    cfg: RBFConfig | None = None,
) -> np.ndarray:
    """Evaluate a kernel fit of scattered values at target points.

    Input values may be (n,) or (n, m); the output matches with n
    replaced by the target count. The polynomial tail defaults to off.
    """
    cfg = cfg or RBFConfig()
    pts, vals, tgt, squeeze = _check_inputs(source_points, source_values, target_points)
    kernel = make_kernel(cfg.kernel, cfg.epsilon)
    poly = False if cfg.polynomial is None else cfg.polynomial
    if cfg.local:
        out = np.zeros((len(tgt), vals.shape[1]), dtype=vals.dtype)
        for t, hood in enumerate(_local_neighborhoods(pts, tgt, cfg)):
            coef, pcoef = _fit_global(pts[hood], vals[hood], kernel,
                                      cfg.smoothing, poly)
            out[t] = _eval_values(tgt[t : t + 1], pts[hood], coef, pcoef, kernel)[0]
    else:
        coef, pcoef = _fit_global(pts, vals, kernel, cfg.smoothing, poly)
        out = _eval_values(tgt, pts, coef, pcoef, kernel)
    return out[:, 0] if squeeze else out


def rbf_gradient(
    source_points: np.ndarray,
    source_values: np.ndarray,
    target_points: np.ndarray,
    cfg: RBFConfig | None = None,
) -> np.ndarray:
    """Evaluate the analytic gradient of a kernel fit at target points.

    Returns (t, d) for (n,) input values and (t, d, m) for (n, m); the
    polynomial tail defaults to on so linear fields differentiate
    exactly.
    """
    cfg = cfg or RBFConfig()
    pts, vals, tgt, squeeze = _check_inputs(source_points, source_values, target_points)
    kernel = make_kernel(cfg.kernel, cfg.epsilon)
    poly = True if cfg.polynomial is None else cfg.polynomial
    if cfg.local:
        out = np.zeros((len(tgt), tgt.shape[1], vals.shape[1]), dtype=vals.dtype)
        for t, hood in enumerate(_local_neighborhoods(pts, tgt, cfg)):
            coef, pcoef = _fit_global(pts[hood], vals[hood], kernel,
                                      cfg.smoothing, poly)
            out[t] = _eval_gradient(tgt[t : t + 1], pts[hood], coef, pcoef, kernel)[0]
    else:
        coef, pcoef = _fit_global(pts, vals, kernel, cfg.smoothing, poly)
        out = _eval_gradient(tgt, pts, coef, pcoef, kernel)
    return out[:, :, 0] if squeeze else out
