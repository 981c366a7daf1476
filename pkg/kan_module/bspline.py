from __future__ import annotations

from typing import Tuple

import numpy as np

from tensorcore_module.tensor import Tensor, make_result


def make_grid(grid_size: int, spline_order: int, grid_range: Tuple[float, float]) -> np.ndarray:
    """Uniform knots over grid_range, extended by `spline_order` knots on each side."""
    lo, hi = grid_range
    h = (hi - lo) / grid_size
    return lo + h * np.arange(-spline_order, grid_size + spline_order + 1, dtype=np.float64)


def bspline_basis(x: np.ndarray, grid: np.ndarray, order: int) -> np.ndarray:
    """Cox-de Boor recursion. Returns x.shape + (len(grid) - 1 - order,) basis values."""
    if order < 0:
        raise ValueError(f"spline order must be >= 0, got {order}")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("knot vector must be strictly increasing")
    x = np.asarray(x, dtype=np.float64)[..., None]
    bases = ((x >= grid[:-1]) & (x < grid[1:])).astype(np.float64)
    for k in range(1, order + 1):
        left = (x - grid[:-(k + 1)]) / (grid[k:-1] - grid[:-(k + 1)]) * bases[..., :-1]
        right = (grid[k + 1:] - x) / (grid[k + 1:] - grid[1:-k]) * bases[..., 1:]
        bases = left + right
    return bases


def bspline_basis_derivative(x: np.ndarray, grid: np.ndarray, order: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if order == 0:
        return np.zeros(x.shape + (len(grid) - 1,))
    lower = bspline_basis(x, grid, order - 1)
    k = order
    left = k / (grid[k:-1] - grid[:-(k + 1)]) * lower[..., :-1]
    right = k / (grid[k + 1:] - grid[1:-k]) * lower[..., 1:]
    return left - right


def bspline_features(x: Tensor, grid: np.ndarray, order: int) -> Tensor:
    """Differentiable basis expansion: (n, in) -> (n, in * num_bases), column blocks per input."""
    n, in_dim = x.shape
    bases = bspline_basis(x.data, grid, order)
    num_bases = bases.shape[-1]

    def grad_fn(g: np.ndarray):
        d = bspline_basis_derivative(x.data, grid, order)
        return ((g.reshape(n, in_dim, num_bases) * d).sum(axis=2),)

    return make_result(bases.reshape(n, in_dim * num_bases), (x,), grad_fn, "bspline_features")


def fit_coefficients(grid: np.ndarray, order: int, points: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares coefficients so that sum_k c_k B_k(points) matches `values`.

    `values` has shape (len(points), m); returns (num_bases, m).
    """
    design = bspline_basis(points, grid, order)
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    return coef
