"""Hot loops for the log-domain power iteration.

The iteration runs on a subgraph given by successor-position arrays (entries
-1 mean "edge absent / leaves the subgraph") and per-edge log weights.  Each
step produces a Collatz-Wielandt bracket for the log spectral radius from the
one-step growth ratios; a second bracket against a geometrically refreshed
checkpoint vector keeps the width shrinking like 1/k even when the matrix has
a poor (or periodic) spectral gap.  Both brackets are valid at every step, so
their intersection is reported.
"""

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

NEG_INF = float("-inf")


@njit(cache=True)
def _power_bracket_jit(s0, s1, lw0, lw1, tol, cap, stop_above):  # pragma: no cover - jit
    m = s0.shape[0]
    x = np.zeros(m)
    y = np.empty(m)
    offset = 0.0
    cp = np.zeros(m)
    cp_step = 0
    cp_offset = 0.0
    refresh_at = 8
    best_lo = -np.inf
    best_hi = np.inf
    for k in range(1, cap + 1):
        ymax = -np.inf
        r_lo = np.inf
        r_hi = -np.inf
        for i in range(m):
            a = lw0[i] + x[s0[i]] if s0[i] >= 0 else -np.inf
            b = lw1[i] + x[s1[i]] if s1[i] >= 0 else -np.inf
            if a < b:
                a, b = b, a
            v = a + math.log1p(math.exp(b - a)) if b > -np.inf else a
            y[i] = v
            r = v - x[i]
            if r < r_lo:
                r_lo = r
            if r > r_hi:
                r_hi = r
            if v > ymax:
                ymax = v
        offset += ymax
        for i in range(m):
            x[i] = y[i] - ymax
        lo = r_lo
        hi = r_hi
        if cp_step > 0:
            span = k - cp_step
            if span > 0:
                c_lo = np.inf
                c_hi = -np.inf
                for i in range(m):
                    d = (x[i] + offset) - (cp[i] + cp_offset)
                    if d < c_lo:
                        c_lo = d
                    if d > c_hi:
                        c_hi = d
                if c_lo / span > lo:
                    lo = c_lo / span
                if c_hi / span < hi:
                    hi = c_hi / span
        # every per-step bracket is valid, so their running intersection is too
        if lo > best_lo:
            best_lo = lo
        if hi < best_hi:
            best_hi = hi
        if best_lo > best_hi:  # fp noise in the intersection
            mid = 0.5 * (best_lo + best_hi)
            best_lo = mid
            best_hi = mid
        if best_hi - best_lo <= tol:
            return best_lo, best_hi, k, True
        if best_lo > stop_above:  # blow-up witnessed; caller stops anyway
            return best_lo, best_hi, k, False
        if k >= refresh_at:
            for i in range(m):
                cp[i] = x[i]
            cp_step = k
            cp_offset = offset
            refresh_at = 2 * k
    return best_lo, best_hi, cap, False


def _power_bracket_numpy(s0, s1, lw0, lw1, tol, cap, stop_above):
    m = len(s0)
    sentinel = m
    xs = np.empty(m + 1)
    s0m = np.where(s0 >= 0, s0, sentinel)
    s1m = np.where(s1 >= 0, s1, sentinel)
    x = np.zeros(m)
    offset = 0.0
    cp, cp_step, cp_offset = None, 0, 0.0
    refresh_at = 8
    best_lo, best_hi = -np.inf, np.inf
    for k in range(1, cap + 1):
        xs[:m] = x
        xs[m] = -np.inf
        y = np.logaddexp(lw0 + xs[s0m], lw1 + xs[s1m])
        r = y - x
        lo, hi = float(r.min()), float(r.max())
        ymax = float(y.max())
        offset += ymax
        x = y - ymax
        if cp is not None:
            span = k - cp_step
            d = (x + offset) - (cp + cp_offset)
            lo = max(lo, float(d.min()) / span)
            hi = min(hi, float(d.max()) / span)
        best_lo = max(best_lo, lo)
        best_hi = min(best_hi, hi)
        if best_lo > best_hi:
            best_lo = best_hi = 0.5 * (best_lo + best_hi)
        if best_hi - best_lo <= tol:
            return best_lo, best_hi, k, True
        if best_lo > stop_above:
            return best_lo, best_hi, k, False
        if k >= refresh_at:
            cp, cp_step, cp_offset = x.copy(), k, offset
            refresh_at = 2 * k
    return best_lo, best_hi, cap, False


def power_bracket(s0, s1, lw0, lw1, tol, cap, stop_above=np.inf):
    """Collatz-Wielandt bracket [lo, hi] for log rho, plus (iters, converged).

    ``stop_above`` ends the iteration early once the certified lower end
    exceeds it (blow-up witnessing); the returned bracket is still valid.
    """
    s0 = np.ascontiguousarray(s0, dtype=np.int64)
    s1 = np.ascontiguousarray(s1, dtype=np.int64)
    lw0 = np.ascontiguousarray(lw0, dtype=np.float64)
    lw1 = np.ascontiguousarray(lw1, dtype=np.float64)
    if HAVE_NUMBA:
        return _power_bracket_jit(s0, s1, lw0, lw1, float(tol), int(cap),
                                  float(stop_above))
    return _power_bracket_numpy(s0, s1, lw0, lw1, float(tol), int(cap),
                                float(stop_above))
