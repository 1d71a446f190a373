"""Special functions shared by the characteristic-function and integration code.

Everything factorial-like is kept as a logarithm until the final combination,
since the Gaussian-Laguerre moment sums reach indices of order 4*(n1 + n2).
"""

import math

import numpy as np
from scipy.special import gammaln

_LOG_MAX = math.log(np.finfo(float).max)


def laguerre(n, k, x):
    """Associated Laguerre polynomial L_n^{(k)}(x) by upward recurrence.

    Parameters
    ----------
    n : int
        Degree, ``n >= 0``.
    k : int
        Association order, ``k >= -n``; ``k = 0`` gives the ordinary L_n.
    x : complex or array_like
        Evaluation point(s). Complex arguments are accepted.

    Returns
    -------
    complex or ndarray
        Same shape as ``x``.
    """
    _check_order(n, k)
    x = np.asarray(x)
    prev = np.ones_like(x, dtype=np.result_type(x, float))
    if n == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = 1.0 + k - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return cur[()] if np.ndim(cur) == 0 else cur


def laguerre_explicit(n, k, x):
    """L_n^{(k)}(x) from its explicit power sum, coefficients in log-space.

    Slower than :func:`laguerre` and prone to cancellation for large ``x``;
    kept as an independent check of the recurrence.
    """
    _check_order(n, k)
    x = np.asarray(x, dtype=np.result_type(x, float))
    out = np.zeros_like(x)
    for i in range(max(0, -k), n + 1):
        log_c = log_binomial(n + k, n - i) - math.lgamma(i + 1)
        out = out + (-1) ** i * math.exp(log_c) * x**i
    return out[()] if out.ndim == 0 else out


def _check_order(n, k):
    if n < 0 or int(n) != n:
        raise ValueError(f"Laguerre degree must be a non-negative integer, got {n}")
    if k < -n or int(k) != k:
        raise ValueError(f"Laguerre order must be an integer >= -n, got k={k}, n={n}")


def log_half_gamma(m):
    """ln Gamma((m + 1) / 2) for integer ``m >= 0`` (scalar or array)."""
    m = np.asarray(m)
    if np.any(m < 0):
        raise ValueError("half_gamma needs m >= 0")
    out = gammaln((m + 1) / 2.0)
    return float(out) if out.ndim == 0 else out


def half_gamma(m):
    """Gamma((m + 1) / 2), evaluated through its logarithm.

    >>> half_gamma(5)
    2.0
    """
    lg = log_half_gamma(m)
    if np.any(np.asarray(lg) > _LOG_MAX):
        raise OverflowError(f"Gamma(({m}+1)/2) exceeds the float range")
    out = np.exp(lg)
    return float(out) if np.ndim(out) == 0 else out


def log_binomial(n, r):
    """ln C(n, r) via log-gamma; accepts scalars or broadcastable arrays.

    Raises
    ------
    ValueError
        If ``r > n`` or either argument is negative.
    """
    n = np.asarray(n)
    r = np.asarray(r)
    if np.any(r > n) or np.any(r < 0) or np.any(n < 0):
        raise ValueError(f"log_binomial needs 0 <= r <= n, got n={n}, r={r}")
    out = gammaln(n + 1.0) - gammaln(r + 1.0) - gammaln(n - r + 1.0)
    if out.ndim == 0:
        # exact zero for the trivial cases instead of gammaln round-off
        return 0.0 if (r == 0 or r == n) else float(out)
    return out
