"""Banded Grassmann-Taksar-Heyman elimination.

States are eliminated from the last index down.  Fill-in of the censored
chain never leaves the original band, so the matrix is held as a dense
``(n, lower + upper + 1)`` band with ``band[i, j - i + lower] = rate(i -> j)``.
Only off-diagonal rates are ever read; pivots are off-diagonal row sums, so
the reduction is free of subtractions.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _reduce(band, lower, upper):
    n = band.shape[0]
    for k in range(n - 1, 0, -1):
        lo_j = max(0, k - lower)
        lo_i = max(0, k - upper)
        s = 0.0
        for j in range(lo_j, k):
            s += band[k, j - k + lower]
        if s <= 0.0:
            return k
        # scale column k (rates into k) by the pivot
        for i in range(lo_i, k):
            band[i, k - i + lower] /= s
        for i in range(lo_i, k):
            f = band[i, k - i + lower]
            if f == 0.0:
                continue
            for j in range(lo_j, k):
                if j != i:
                    band[i, j - i + lower] += f * band[k, j - k + lower]
    return 0


@njit(cache=True)
def _back_substitute(band, lower, upper):
    n = band.shape[0]
    x = np.zeros(n)
    x[0] = 1.0
    total = 1.0
    for k in range(1, n):
        acc = 0.0
        for i in range(max(0, k - upper), k):
            acc += x[i] * band[i, k - i + lower]
        x[k] = acc
        total += acc
    for k in range(n):
        x[k] /= total
    return x


def to_band(rows, cols, rates, n, lower, upper):
    band = np.zeros((n, lower + upper + 1))
    band[rows, cols - rows + lower] = rates
    return band


def gth_banded(band, lower, upper):
    """Stationary vector from a band of off-diagonal rates.

    Returns ``(x, k)``; ``k`` is nonzero when state ``k`` had no path to any
    lower-indexed state, i.e. the chain is not irreducible.
    """
    failed = _reduce(band, lower, upper)
    if failed:
        return None, failed
    return _back_substitute(band, lower, upper), 0
