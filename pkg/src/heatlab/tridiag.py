"""
Batched tridiagonal solves (Thomas algorithm).
"""

import numpy as np
from numba import njit

__all__ = ["solve_tridiagonal", "tridiag_matvec"]


def solve_tridiagonal(lower, diag, upper, rhs):
    """Solve ``A x = rhs`` for one or many tridiagonal systems.

    Parameters
    ----------
    lower, diag, upper : ndarray
        Sub-, main and super-diagonal, each of shape ``(N,)`` or ``(m, N)``.
        ``lower[..., 0]`` and ``upper[..., -1]`` are ignored.
    rhs : ndarray
        Right-hand side(s), shape ``(N,)`` or ``(m, N)``.  A single matrix
        may be paired with many right-hand sides.

    Returns
    -------
    ndarray with the shape of ``rhs``.

    No pivoting; the matrices this package builds are diagonally dominant.
    """
    rhs = np.asarray(rhs, dtype=float)
    single = rhs.ndim == 1
    d = np.atleast_2d(rhs)
    m, N = d.shape
    coeffs = []
    for arr in (lower, diag, upper):
        arr = np.asarray(arr, dtype=float)
        if arr.shape[-1] != N:
            raise ValueError("diagonal length does not match right-hand side")
        coeffs.append(np.ascontiguousarray(np.broadcast_to(np.atleast_2d(arr), (m, N))))
    out = np.empty((m, N))
    _thomas(coeffs[0], coeffs[1], coeffs[2], np.ascontiguousarray(d), out)
    return out[0] if single else out


@njit(cache=True)
def _thomas(a, b, c, d, x):
    m, N = d.shape
    cp = np.empty(N)
    for k in range(m):
        denom = b[k, 0]
        if denom == 0.0:
            raise ZeroDivisionError("singular tridiagonal system")
        cp[0] = c[k, 0] / denom
        x[k, 0] = d[k, 0] / denom
        for i in range(1, N):
            denom = b[k, i] - a[k, i] * cp[i - 1]
            if denom == 0.0:
                raise ZeroDivisionError("singular tridiagonal system")
            cp[i] = c[k, i] / denom
            x[k, i] = (d[k, i] - a[k, i] * x[k, i - 1]) / denom
        for i in range(N - 2, -1, -1):
            x[k, i] -= cp[i] * x[k, i + 1]


def tridiag_matvec(lower, diag, upper, x, axis=-1):
    """Apply a tridiagonal operator along ``axis`` (coefficients broadcast)."""
    x = np.moveaxis(np.asarray(x, dtype=float), axis, -1)
    y = diag * x
    y[..., 1:] += (lower * np.ones_like(x))[..., 1:] * x[..., :-1]
    y[..., :-1] += (upper * np.ones_like(x))[..., :-1] * x[..., 1:]
    return np.moveaxis(y, -1, axis)
