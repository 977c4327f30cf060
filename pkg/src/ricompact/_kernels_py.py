"""Pure numpy versions of the compiled kernels (used when the extension is absent)."""

import math

import numpy as np


def hardy_sum(lam_t, lam_lo, lam_hi, values, j):
    """sum_i v_i * ((lam_t - lam_hi_i)_+^j - (lam_t - lam_lo_i)_+^j) / j!

    ``lam`` is a decreasing potential of 1/J, so the bracket is exactly the
    contribution of cell i to H^j_J f(t).
    """
    lam_t = np.asarray(lam_t, dtype=float)[:, None]
    with np.errstate(invalid="ignore"):
        a = np.clip(lam_t - np.asarray(lam_hi)[None, :], 0.0, None)
        b = np.clip(lam_t - np.asarray(lam_lo)[None, :], 0.0, None)
    a = np.nan_to_num(a, nan=0.0)
    b = np.nan_to_num(b, nan=0.0)
    return (a ** j - b ** j) @ np.asarray(values, dtype=float) / math.factorial(j)


def hardy_sum_batch(lam_t, lam_lo, lam_hi, values, j):
    """Same as :func:`hardy_sum` for a (nfunc, ncells) block of values."""
    lam_t = np.asarray(lam_t, dtype=float)[:, None]
    with np.errstate(invalid="ignore"):
        a = np.clip(lam_t - np.asarray(lam_hi)[None, :], 0.0, None)
        b = np.clip(lam_t - np.asarray(lam_lo)[None, :], 0.0, None)
    k = np.nan_to_num(a, nan=0.0) ** j - np.nan_to_num(b, nan=0.0) ** j
    return np.asarray(values, dtype=float) @ k.T / math.factorial(j)
