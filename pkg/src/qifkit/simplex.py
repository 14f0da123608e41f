"""Utilities on the probability simplex: grids, projection, vertex families."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError


def simplex_grid(dim: int, resolution: int) -> np.ndarray:
    """All points of the simplex with coordinates that are multiples of
    1/resolution.  Rows are distributions.  Intended for dim <= 3; the grid
    size grows as resolution**(dim-1).
    """
    if dim < 1 or resolution < 1:
        raise ParameterError("dim and resolution must be positive")
    if dim == 1:
        return np.ones((1, 1))
    if dim == 2:
        t = np.arange(resolution + 1) / resolution
        return np.stack([t, 1.0 - t], axis=1)
    points = []
    for i in range(resolution + 1):
        rest = simplex_grid(dim - 1, resolution - i) * ((resolution - i) / resolution) \
            if resolution - i > 0 else np.zeros((1, dim - 1))
        first = np.full((rest.shape[0], 1), i / resolution)
        points.append(np.hstack([first, rest]))
    return np.vstack(points)


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - css) / np.arange(1, v.size + 1) > 0)[0][-1]
    lam = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + lam, 0.0)


def vertex_prior(dim: int, corner: int, n: int) -> np.ndarray:
    """Full-support prior concentrated on one corner: mass 1 - 1/n on
    ``corner`` and the remaining 1/n spread evenly over the other symbols.
    """
    if dim < 2:
        return np.ones(1)
    if n < 2:
        raise ParameterError("vertex prior needs n >= 2")
    p = np.full(dim, 1.0 / (n * (dim - 1)))
    p[corner] = 1.0 - 1.0 / n
    return p


def dirichlet_priors(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """Dirichlet(1, ..., 1) draws, rows are distributions."""
    return rng.dirichlet(np.ones(dim), size=count)


def projected_ascent(
    fun,
    start: np.ndarray,
    max_iterations: int = 300,
    tolerance: float = 1e-12,
    fd_step: float = 1e-6,
) -> tuple[float, np.ndarray]:
    """Maximize ``fun`` over the simplex by finite-difference projected
    gradient ascent with backtracking.  A local method: callers provide the
    multi-start.  Evaluations happen only at projected (feasible) points.
    """
    x = project_to_simplex(np.asarray(start, dtype=float))
    fx = float(fun(x))
    dim = x.size
    for _ in range(max_iterations):
        grad = np.zeros(dim)
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = fd_step
            up = float(fun(project_to_simplex(x + e)))
            dn = float(fun(project_to_simplex(x - e)))
            grad[i] = (up - dn) / (2.0 * fd_step)
        norm = float(np.linalg.norm(grad))
        if norm == 0.0 or not np.isfinite(norm):
            break
        step = 0.25
        improved = False
        for _ in range(40):
            cand = project_to_simplex(x + step * grad / norm)
            fc = float(fun(cand))
            if fc > fx + tolerance:
                x, fx = cand, fc
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return fx, x
