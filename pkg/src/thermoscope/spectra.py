"""Legendre duality: Birkhoff spectrum and L^q spectrum from the pressure.

The dimension spectrum of the potential's Birkhoff averages is the Legendre
transform of the pressure curve divided by log 2, on the open interval of
attainable averages; outside it is zero.  For averages at least -2 log 2 and
at distance Delta below the upper endpoint, the transform's infimum may be
restricted to t in [0, log2/Delta], which keeps every evaluation on a finite
grid.  The L^q spectrum equals pressure(q)/log 2 away from the exceptional
singularity position 1/2, where the measure degenerates to a point mass and
the spectrum vanishes identically.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .config import Config
from .ergodic import EndpointEstimate, endpoints
from .errors import DomainError, InsufficientCurve
from .symbolic import TorusPoint, as_point
from .transfer import PressureCurve, PressureEstimate, pressure, pressure_curve

LOG2 = math.log(2.0)
BETA_BASE = -2.0 * LOG2  # the Lebesgue-typical average; transform peaks here

DELTA_FLOOR = 0.05  # keeps the t-interval finite near the upper endpoint
GOLDEN_T_TOL = 1e-8

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f: Callable[[float], float], a: float, b: float,
                tol: float) -> Tuple[float, float]:
    """Golden-section minimum of a unimodal f on [a, b]."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    xm = 0.5 * (a + b)
    return xm, min(f1, f2, f(xm))


def legendre(curve: PressureCurve, beta: float, Delta: float,
             evaluator: Optional[Callable[[float], float]] = None) -> float:
    """min over t in [0, log2/Delta] of (p(t) - beta*t) from a sampled curve.

    The minimum over the sample knots is refined by golden-section search
    between the knots bracketing the argmin (valid because the pressure is
    convex).  By default the refinement runs on the piecewise-linear
    interpolant of the curve midpoints, which upper-bounds the convex curve,
    so the returned value is exact at knots and conservatively high between
    them; pass ``evaluator`` (t -> pressure value) to refine with fresh
    pressure evaluations instead.
    """
    if Delta <= 0:
        raise DomainError("Delta must be positive")
    if beta < BETA_BASE - 1e-12:
        raise DomainError(f"beta={beta} below the admissible range "
                          f"(needs beta >= {BETA_BASE})")
    t_max = LOG2 / Delta
    ts = curve.t_values
    mids = curve.midpoints
    if len(ts) < 2 or ts[0] > 1e-12 or ts[-1] < t_max - 1e-9:
        raise InsufficientCurve(
            f"curve must sample [0, {t_max:.4f}], has [{ts[0] if len(ts) else '-'},"
            f" {ts[-1] if len(ts) else '-'}]")
    sel = ts <= t_max + 1e-12
    tsel, msel = ts[sel], mids[sel]
    objective = msel - beta * tsel
    i = int(objective.argmin())
    lo_i, hi_i = max(i - 1, 0), min(i + 1, len(tsel) - 1)
    if evaluator is None:
        def f(t):
            # linear interpolation of the sampled midpoints
            return float(np.interp(t, tsel, msel)) - beta * t
    else:
        def f(t):
            return evaluator(t) - beta * t
    if hi_i == lo_i:
        return float(objective[i])
    _, val = _golden_min(f, float(tsel[lo_i]), float(tsel[hi_i]), GOLDEN_T_TOL)
    return float(min(val, objective[i]))


@dataclass
class SpectrumCurve:
    """Sampled spectrum values with per-sample bracket widths and flags."""

    c: TorusPoint
    kind: str  # birkhoff | lq | legendre
    samples: List[Tuple[float, float, float, str]] = field(default_factory=list)
    endpoints_used: Optional[EndpointEstimate] = None

    def to_csv(self) -> str:
        lines = ["argument,value,bracket_width,flag"]
        for arg, val, width, flag in self.samples:
            lines.append(f"{arg:.12g},{val:.12g},{width:.12g},{flag}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "c": self.c.value,
            "kind": self.kind,
            "samples": [
                {"argument": a, "value": v, "bracket_width": w, "flag": f}
                for a, v, w, f in self.samples
            ],
        })


def _default_curve_grid(t_max: float) -> List[float]:
    grid = [0.05 * k for k in range(21)]            # [0, 1] fine
    t = 1.0
    while t < min(4.0, t_max):
        t += 0.2
        grid.append(round(t, 10))
    while t < t_max:
        t += 0.5
        grid.append(round(min(t, t_max), 10))
    if grid[-1] < t_max:
        grid.append(t_max)
    return sorted(set(grid))


def birkhoff_spectrum(c, beta_grid, cfg: Config | None = None,
                      endpoint_depth: Optional[int] = None) -> SpectrumCurve:
    """Dimension spectrum of Birkhoff averages over a sorted grid of averages.

    Inside the endpoint interval the value is legendre(beta)/log2 with
    Delta = upper endpoint - beta (floored); outside it is zero.  Samples
    within the endpoint bracket widths are flagged 'uncertain'; the single
    sample at the lower endpoint itself is flagged (its value is not decided
    by the duality).  The exceptional position c = 1/2 (exact) is refused.
    """
    cfg = cfg or Config()
    c = as_point(c)
    if c.is_exactly(1, 1):
        raise DomainError("the spectrum-pressure identity excludes c = 1/2 "
                          "(the equilibrium measure degenerates to an atom)")
    betas = [float(b) for b in beta_grid]
    if any(b2 < b1 for b1, b2 in zip(betas, betas[1:])):
        raise DomainError("beta_grid must be sorted ascending")
    depth = endpoint_depth or min(cfg.depth_max, 12)
    ends = endpoints(c, depth, cfg)
    alpha_lo, alpha_hi = ends.alpha_bracket
    beta_lo, beta_hi = ends.beta_bracket
    alpha_mid, beta_mid = ends.alpha, ends.beta
    applicable = [b for b in betas
                  if b >= BETA_BASE and alpha_mid <= b < beta_mid]
    if applicable:
        t_max = max(LOG2 / max(beta_mid - b, DELTA_FLOOR) for b in applicable)
    else:
        t_max = 1.0
    curve = pressure_curve(c, _default_curve_grid(t_max), cfg)
    width_cap = max(e.width for _, e in curve.samples)
    out = SpectrumCurve(c=c, kind="birkhoff", endpoints_used=ends)
    for b in betas:
        flag = "ok"
        if abs(b - alpha_mid) <= (alpha_hi - alpha_lo) or \
           abs(b - beta_mid) <= (beta_hi - beta_lo):
            flag = "uncertain"  # within the endpoint bracket
        if b < alpha_mid or b >= beta_mid:
            out.samples.append((b, 0.0, 0.0, flag))
            continue
        if b < BETA_BASE:
            # attainable below the Lebesgue-typical average, but the
            # restricted transform does not apply there
            out.samples.append((b, float("nan"), 0.0, "outside-transform-range"))
            continue
        delta = max(beta_mid - b, DELTA_FLOOR)
        val = legendre(curve, b, delta) / LOG2
        out.samples.append((b, val, width_cap / LOG2, flag))
    return out


@dataclass(frozen=True)
class LqValue:
    """L^q spectrum value via the pressure identity."""

    c: TorusPoint
    q: float
    value: float
    divergent: bool
    converged: bool
    estimate: Optional[PressureEstimate] = None


def lq_via_pressure(c, q: float, cfg: Config | None = None) -> LqValue:
    """pressure(c, q)/log2, with the exact c = 1/2 override (identically 0)."""
    cfg = cfg or Config()
    c = as_point(c)
    if c.is_exactly(1, 1):
        return LqValue(c=c, q=q, value=0.0, divergent=False, converged=True)
    est = pressure(c, q, cfg)
    value = est.midpoint / LOG2 if not est.divergent else float("inf")
    return LqValue(c=c, q=q, value=value, divergent=est.divergent,
                   converged=est.converged, estimate=est)
