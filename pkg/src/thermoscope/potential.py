"""The singular potential 2*log|sin(pi(x-c))|, its truncations and brackets.

The potential is non-positive with a logarithmic pole at x = c and is the log
of the weight function g_c(x) = sin^2(pi(x-c)), the normalised two-preimage
weight of the doubling map.  Everything here is a pure function; the cylinder
bracket helpers are the discretisation used by the transfer and mean-cycle
machinery.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import numpy as np

from .errors import SingularCylinder
from .symbolic import TorusPoint, CylinderWord, as_point

PointLike = Union[TorusPoint, float]

NEG_INF = float("-inf")


def _reduced_delta(c: PointLike, x: PointLike) -> Tuple[float, bool]:
    """(x - c) mod 1 reduced to [-1/2, 1/2], plus an exact-zero flag.

    When both points carry exact dyadic representations the reduction is done
    in rational arithmetic, so hits of the pole are detected exactly.
    """
    cp, xp = as_point(c), as_point(x)
    if cp.is_exact and xp.is_exact:
        d = (xp.as_fraction() - cp.as_fraction()) % 1
        if d == 0:
            return 0.0, True
        if d > Fraction(1, 2):
            d -= 1
        return float(d), False
    d = (xp.value - cp.value) % 1.0
    if d > 0.5:
        d -= 1.0
    return d, d == 0.0


def psi(c: PointLike, x: PointLike) -> float:
    """2*log|sin(pi(x-c))|; -inf exactly at x = c."""
    d, at_pole = _reduced_delta(c, x)
    if at_pole:
        return NEG_INF
    return 2.0 * math.log(abs(math.sin(math.pi * d)))


def psi_truncated(c: PointLike, N: float, x: PointLike) -> float:
    """max(psi, -N): the continuous cut-off used by the full-shift route."""
    if N <= 0:
        raise ValueError("truncation level N must be positive")
    return max(psi(c, x), -N)


def g(c: PointLike, x: PointLike) -> float:
    """sin^2(pi(x-c)) = (1 - cos(2ps(x-c)))/2; exp(psi) everywhere."""
    d, _ = _reduced_delta(c, x)
    s = math.sin(math.pi * d)
    return s * s


def doubling_orbit(x: PointLike, n: int):
    """x, 2x, ..., 2^(n-1)x (mod 1), staying exact on exact dyadic input."""
    xp = as_point(x)
    if xp.is_exact:
        num, bits = xp.exact
        den = 1 << bits
        for _ in range(n):
            yield TorusPoint.from_dyadic(num, bits)
            num = (2 * num) % den
    else:
        val = xp.value
        for _ in range(n):
            yield TorusPoint(val)
            val = (2.0 * val) % 1.0


def birkhoff_sum(c: PointLike, x: PointLike, n: int) -> float:
    """Sum of the potential along the doubling orbit segment of length n."""
    if n < 1:
        raise ValueError("need n >= 1")
    total = 0.0
    for pt in doubling_orbit(x, n):
        v = psi(c, pt)
        if v == NEG_INF:
            return NEG_INF
        total += v
    return total


@dataclass(frozen=True)
class WeightBracket:
    """Exact infimum/supremum of t*psi over a cylinder (log domain)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"bracket out of order: {self.lo} > {self.hi}")


def _log_sin_pi(v: float) -> float:
    return 2.0 * math.log(math.sin(math.pi * v))


def psi_range_on_interval(va: float, vb: float) -> Tuple[float, float]:
    """(inf, sup) of 2*log sin(pi v) over [va, vb] with 0 < va <= vb < 1.

    The map is unimodal with maximum 0 at v = 1/2, so the extrema sit at the
    endpoints unless 1/2 is interior.
    """
    fa, fb = _log_sin_pi(va), _log_sin_pi(vb)
    if va <= 0.5 <= vb:
        return (min(fa, fb), 0.0)
    return (min(fa, fb), max(fa, fb))


def cylinder_weight_bracket(c: PointLike, w: CylinderWord, t: float) -> WeightBracket:
    """inf/sup of t*psi_c over the closed interval of the word.

    The closed interval must avoid c; cylinders whose closure touches the
    singularity raise SingularCylinder (the truncated route handles those).
    """
    cp = as_point(c)
    cells = 1 << w.depth
    cf = cp.as_fraction()
    a = Fraction(w.index, cells)
    b = a + Fraction(1, cells)
    da = (a - cf) % 1
    if da == 0 or da + (b - a) >= 1:
        raise SingularCylinder(
            f"c={cp.value} lies in the closed interval of word {w.symbols}")
    lo_psi, hi_psi = psi_range_on_interval(float(da), float(da + (b - a)))
    if t >= 0:
        return WeightBracket(t * lo_psi, t * hi_psi)
    return WeightBracket(t * hi_psi, t * lo_psi)


def psi_bracket_arrays(c: PointLike, depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """(inf, sup) of psi over every depth-n cylinder, vectorised.

    Cylinders whose closed interval contains c get inf = -inf and the correct
    finite sup (the farthest-point value, or 0 when the antipode v = 1/2 falls
    inside); these are exactly the cylinders the cut graph forbids, and the
    full-shift truncated route clips them at -N.
    """
    cp = as_point(c)
    n = 1 << depth
    width = 1.0 / n
    va = (np.arange(n, dtype=np.float64) / n - cp.value) % 1.0
    vb = va + width

    def f(v):
        return 2.0 * np.log(np.sin(np.pi * np.clip(v, 1e-300, 1.0)))

    singular = (va == 0.0) | (vb >= 1.0)
    reg_a = np.where(singular, 0.25, va)
    reg_b = np.where(singular, 0.75, vb)
    fa, fb = f(reg_a), f(reg_b)
    lo = np.minimum(fa, fb)
    hi = np.where((reg_a <= 0.5) & (0.5 <= reg_b), 0.0, np.maximum(fa, fb))
    # singular cells: closure contains c, so inf = -inf; the sup sits at an
    # interval endpoint unless the antipode v = 1/2 lies inside (tiny depths)
    if singular.any():
        idx = np.nonzero(singular)[0]
        sup = np.empty(len(idx))
        for j, k in enumerate(idx):
            ends = []
            if va[k] == 0.0:                       # c at the left edge: [0, vb]
                ends.append(_log_sin_pi(vb[k]))
                if vb[k] >= 0.5:
                    ends.append(0.0)
            else:                                  # wraps c: [va, 1] u [0, vb-1]
                ends.append(_log_sin_pi(va[k]))
                tail = vb[k] - 1.0
                if tail > 0.0:
                    ends.append(_log_sin_pi(tail))
                if va[k] <= 0.5 or tail >= 0.5:
                    ends.append(0.0)
            sup[j] = max(ends)
        lo[idx] = NEG_INF
        hi[idx] = sup
    return lo, hi


def weight_bracket_arrays(c: PointLike, depth: int, t: float,
                          truncation: float | None = None
                          ) -> Tuple[np.ndarray, np.ndarray]:
    """Per-cylinder (lo, hi) of t*psi (or t*max(psi, -N)) at a given depth."""
    lo_psi, hi_psi = psi_bracket_arrays(c, depth)
    if truncation is not None:
        if truncation <= 0:
            raise ValueError("truncation level must be positive")
        lo_psi = np.maximum(lo_psi, -truncation)
        hi_psi = np.maximum(hi_psi, -truncation)
    if t == 0:
        z = np.zeros_like(hi_psi)
        return z, z.copy()
    if t > 0:
        return t * lo_psi, t * hi_psi
    return t * hi_psi, t * lo_psi
