"""Pure-numpy implementation of the hot kernels.

Used when the compiled extension is unavailable. Both backends expose the
same three entry points operating on a flattened N-function descriptor:

    kind 0: power, exponent a        Phi(t) = t^a / a
    kind 1: log-power, exponent a    Phi(t) = t^(a+1) on [0,1], t^a (ln t + 1) beyond
    kind 2: tabulated density        exact piecewise quadrature of the
                                     piecewise-linear density (sb, vb) with
                                     precomputed cumulative integrals cum

All value arrays are nonnegative (singular values); overflow propagates as
inf rather than being clipped.
"""

from __future__ import annotations

import numpy as np

from ..errors import SolveError

BACKEND = "python"

KIND_POWER = 0
KIND_LOGPOWER = 1
KIND_TABLE = 2


def phi_many(kind, a, sb, vb, cum, t):
    """Evaluate Phi elementwise on a nonnegative array `t`."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore"):
        if kind == KIND_POWER:
            return t**a / a
        if kind == KIND_LOGPOWER:
            out = np.empty_like(t)
            low = t <= 1.0
            out[low] = t[low] ** (a + 1.0)
            hi = ~low
            th = t[hi]
            out[hi] = th**a * (np.log(th) + 1.0)
            return out
        if kind == KIND_TABLE:
            return _phi_table(sb, vb, cum, t)
    raise ValueError(f"unknown kernel kind {kind}")


def _phi_table(sb, vb, cum, t):
    m = len(sb) - 1
    out = np.zeros_like(t)
    inner = (t > 0.0) & (t < sb[m])
    if np.any(inner):
        ti = t[inner]
        j = np.clip(np.searchsorted(sb, ti, side="right") - 1, 0, m - 1)
        slope = (vb[j + 1] - vb[j]) / (sb[j + 1] - sb[j])
        dt = ti - sb[j]
        out[inner] = cum[j] + dt * (vb[j] + 0.5 * slope * dt)
    beyond = t >= sb[m]
    if np.any(beyond):
        slope = (vb[m] - vb[m - 1]) / (sb[m] - sb[m - 1])
        dt = t[beyond] - sb[m]
        out[beyond] = cum[m] + dt * (vb[m] + 0.5 * slope * dt)
    return out


def modular_sum(kind, a, sb, vb, cum, values, weights, scale):
    """Weighted sum of Phi over scaled values: sum_i w_i Phi(scale * s_i)."""
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.dot(weights, phi_many(kind, a, sb, vb, cum, values * scale)))


def bisect_scale(modular_at, lam0, rel_tol, max_iter):
    """Shared Luxemburg bracketing and bisection on a modular callable.

    `modular_at(lam)` must be continuous and strictly decreasing where it is
    finite, with limits +inf at 0+ and 0 at +inf; inf counts as "> 1".
    Returns (lam, achieved_modular, evaluations).
    """
    evals = 0
    lam_hi = lam0
    m = modular_at(lam_hi)
    evals += 1
    while not m <= 1.0:
        lam_hi *= 2.0
        if not np.isfinite(lam_hi):
            raise SolveError("upper bracket for the norm scale diverged")
        m = modular_at(lam_hi)
        evals += 1
    lam_lo = lam_hi
    while modular_at(lam_lo) < 1.0:
        evals += 1
        lam_lo *= 0.5
        if lam_lo < 1e-300 * lam_hi:
            # modular stays below 1 for arbitrarily small scales: not an
            # N-function modular of a nonzero element
            raise SolveError("lower bracket for the norm scale underflowed")
    evals += 1
    while lam_hi - lam_lo > rel_tol * lam_hi and evals < max_iter:
        mid = 0.5 * (lam_lo + lam_hi)
        if modular_at(mid) <= 1.0:
            lam_hi = mid
        else:
            lam_lo = mid
        evals += 1
    achieved = modular_at(lam_hi)
    return lam_hi, achieved, evals


def luxemburg_bisect(kind, a, sb, vb, cum, values, weights, lam0, rel_tol, max_iter):
    """Luxemburg scale for a fixed singular-value/weight profile."""

    def modular_at(lam):
        return modular_sum(kind, a, sb, vb, cum, values, weights, 1.0 / lam)

    return bisect_scale(modular_at, lam0, rel_tol, max_iter)
