"""Compiled numerical kernels (numba, cached to disk on first use)."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def count_below(d, e2, sigma):
    """Number of eigenvalues of tridiag(d, e) below sigma.

    Sturm sign count from the LDL^T pivots; e2 holds the squared
    off-diagonal entries.  Tiny pivots are perturbed as in standard
    bisection codes.
    """
    n = d.shape[0]
    cnt = 0
    q = d[0] - sigma
    if q < 0.0:
        cnt += 1
    for i in range(1, n):
        if -1e-300 < q < 1e-300:
            q = 1e-300 if q >= 0.0 else -1e-300
        q = d[i] - sigma - e2[i - 1] / q
        if q < 0.0:
            cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def smallest_eigenvalue(d, e):
    """Smallest eigenvalue of a symmetric tridiagonal matrix.

    Bisection on the Sturm sign count starting from the Gershgorin
    bracket; runs to relative bracket width ~1e-14.
    """
    n = d.shape[0]
    lo = d[0]
    hi = d[0]
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        if d[i] - r < lo:
            lo = d[i] - r
        if d[i] + r > hi:
            hi = d[i] + r
    e2 = e * e
    for _ in range(260):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if count_below(d, e2, mid) >= 1:
            hi = mid
        else:
            lo = mid
        scale = abs(lo)
        if abs(hi) > scale:
            scale = abs(hi)
        if hi - lo <= 1e-14 * scale:
            break
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def solve_symmetric_tridiag(d, e, b):
    """Thomas solve of (tridiag(d, e)) x = b for the inverse iteration."""
    n = d.shape[0]
    beta = np.empty(n)
    rhs = np.empty(n)
    x = np.empty(n)
    beta[0] = d[0]
    rhs[0] = b[0]
    for i in range(1, n):
        m = e[i - 1] / beta[i - 1]
        beta[i] = d[i] - m * e[i - 1]
        rhs[i] = b[i] - m * rhs[i - 1]
    x[n - 1] = rhs[n - 1] / beta[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (rhs[i] - e[i] * x[i + 1]) / beta[i]
    return x
