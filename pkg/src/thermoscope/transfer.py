"""Pressure computation via weighted transfer matrices on cut subshifts.

The depth-n pressure of t*psi_c is bracketed by the log spectral radii of two
weighted de Bruijn matrices: edges into a cylinder carry exp(inf) resp.
exp(sup) of t*psi over that cylinder.  The matrices are never materialised;
successors are shift-and-mask index arithmetic and the spectral radius comes
from log-domain power iteration with Collatz-Wielandt brackets (tiny strongly
connected components fall back to a balanced dense eigenvalue solve).

For t >= 0 the upper end is computed on the FULL shift (forbidden words kept,
sup weights everywhere), which dominates the limiting pressure itself, so the
reported bracket straddles both the depth-n value and the limit.  For t < 0
the sup weight is infinite on the singular cylinder, so the upper end uses
the cut graph and brackets the depth-n value only; divergence towards
+infinity is then witnessed by the lower end crossing a blow-up threshold and
is reported as "presumed infinite", never as a decided fact.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ._kernels import power_bracket
from .config import Config
from .errors import DegenerateGraph
from .potential import weight_bracket_arrays
from .symbolic import SftGraph, TorusPoint, as_point, build_sft, shared_sft, successors

LOG2 = math.log(2.0)

# strongly connected components at or below this size are solved densely;
# tiny components can be periodic, where the power bracket cannot tighten
DENSE_SCC_CAP = 64


@dataclass(frozen=True)
class PressureEstimate:
    """Bracketed pressure value at (c, t) with convergence/divergence flags."""

    c: TorusPoint
    t: float
    depth: int
    lower: float
    upper: float
    iterations: int = 0
    converged: bool = False
    divergent: bool = False

    def __post_init__(self):
        if not (self.lower <= self.upper or math.isnan(self.upper)):
            raise ValueError(f"bracket out of order: {self.lower} > {self.upper}")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass
class PressureCurve:
    """Samples of t -> pressure at a fixed singularity position."""

    c: TorusPoint
    samples: List[Tuple[float, PressureEstimate]] = field(default_factory=list)

    @property
    def t_values(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def midpoints(self) -> np.ndarray:
        return np.array([e.midpoint for _, e in self.samples])


def _max_plus_mean_and_potential(w: np.ndarray) -> Tuple[float, np.ndarray]:
    """Karp's maximum cycle mean and a balancing potential, dense max-plus.

    Used to precondition tiny dense blocks: with lam the max cycle mean and
    pi the returned potential, w[u,v] - lam + pi[v] - pi[u] <= O(eps), so the
    exponentiated matrix has entries <= ~1 and spectral radius ~ rho*e^-lam.
    """
    m = w.shape[0]
    d = np.full((m + 1, m), -np.inf)
    d[0] = 0.0
    for k in range(m):
        d[k + 1] = np.max(d[k][:, None] + w, axis=0)
    lam = -np.inf
    with np.errstate(invalid="ignore"):
        for v in range(m):
            if d[m, v] == -np.inf:
                continue
            vals = (d[m, v] - d[:m, v]) / (m - np.arange(m))
            lam = max(lam, np.nanmin(vals))
    shifted = w - lam
    pi = np.zeros(m)
    for _ in range(m):
        nxt = np.maximum(pi, np.max(shifted + pi[None, :], axis=1))
        if np.array_equal(nxt, pi):
            break
        pi = nxt
    return lam, pi


def _dense_log_radius(s0, s1, lw0, lw1) -> float:
    """log spectral radius of a small block via balanced dense eigvals."""
    m = len(s0)
    w = np.full((m, m), -np.inf)
    for i in range(m):
        if s0[i] >= 0:
            w[i, s0[i]] = max(w[i, s0[i]], lw0[i])
        if s1[i] >= 0:
            w[i, s1[i]] = max(w[i, s1[i]], lw1[i])
    lam, pi = _max_plus_mean_and_potential(w)
    if lam == -np.inf:
        return -np.inf
    balanced = np.exp(w - lam + pi[None, :] - pi[:, None])
    rho = float(np.abs(np.linalg.eigvals(balanced)).max())
    return lam + math.log(rho)


@dataclass(frozen=True)
class RadiusResult:
    lower: float
    upper: float
    iterations: int
    converged: bool


def _subgraph_radius(s0, s1, lw0, lw1, tol, cap,
                     stop_above=np.inf) -> RadiusResult:
    m = len(s0)
    if m == 1:
        best = -np.inf
        if s0[0] == 0:
            best = max(best, lw0[0])
        if s1[0] == 0:
            best = max(best, lw1[0])
        return RadiusResult(best, best, 0, True)
    if m <= DENSE_SCC_CAP:
        val = _dense_log_radius(s0, s1, lw0, lw1)
        eps = 1e-11 * max(1.0, abs(val)) if np.isfinite(val) else 0.0
        return RadiusResult(val - eps, val + eps, 0, True)
    lo, hi, iters, conv = power_bracket(s0, s1, lw0, lw1, tol, cap, stop_above)
    return RadiusResult(lo, hi, iters, conv)


def graph_log_radius(graph: SftGraph, node_logw: np.ndarray, tol: float,
                     cap: int, stop_above=np.inf) -> RadiusResult:
    """Bracket for log rho of the cut transfer matrix with target-cylinder
    weights ``node_logw`` (indexed by state)."""
    core = graph.core
    p0, p1 = graph.core_successors()
    logw_core = node_logw[core]
    lw0 = np.where(p0 >= 0, logw_core[np.where(p0 >= 0, p0, 0)], -np.inf)
    lw1 = np.where(p1 >= 0, logw_core[np.where(p1 >= 0, p1, 0)], -np.inf)
    sccs = graph.scc_list()
    if len(sccs) == 1:
        return _subgraph_radius(p0, p1, lw0, lw1, tol, cap, stop_above)
    lo = hi = -np.inf
    iters = 0
    conv = True
    for comp in sccs:
        pos = np.full(len(core), -1, dtype=np.int64)
        pos[comp] = np.arange(len(comp))
        cs0, cs1 = p0[comp], p1[comp]
        sub0 = np.where(cs0 >= 0, pos[np.where(cs0 >= 0, cs0, 0)], -1)
        sub1 = np.where(cs1 >= 0, pos[np.where(cs1 >= 0, cs1, 0)], -1)
        if np.all(sub0 < 0) and np.all(sub1 < 0):
            continue  # singleton without self-loop: no cycle here
        res = _subgraph_radius(sub0, sub1, lw0[comp], lw1[comp], tol, cap,
                               stop_above)
        lo = max(lo, res.lower)
        hi = max(hi, res.upper)
        iters += res.iterations
        conv = conv and res.converged
    if lo == -np.inf:
        raise DegenerateGraph("no cycle found in any strongly connected component")
    return RadiusResult(lo, hi, iters, conv)


def full_shift_log_radius(depth: int, node_logw: np.ndarray,
                          tol: float, cap: int) -> RadiusResult:
    """Same bracket on the full de Bruijn graph (no forbidden words)."""
    states = np.arange(1 << depth, dtype=np.int64)
    s0, s1 = successors(states, depth)
    return _subgraph_radius(s0, s1, node_logw[s0], node_logw[s1], tol, cap)


def pressure_sft(c, t: float, n: int, cfg: Config | None = None,
                 graph: SftGraph | None = None) -> PressureEstimate:
    """Bracket the depth-n pressure of t*psi_c on the cut-out subshift.

    Both ends live on the cut graph: lower weights edges by exp(inf t*psi)
    over the target cylinder, upper by exp(sup t*psi).  The depth-n pressure
    of the exact potential lies between them; t = 0 collapses the bracket to
    the plain adjacency spectral radius (subshift entropy).
    """
    cfg = cfg or Config()
    c = as_point(c)
    if graph is None:
        graph = shared_sft(c, n)
    lo_w, hi_w = weight_bracket_arrays(c, n, t)
    stop = cfg.blowup_threshold if t < 0 else np.inf
    low = graph_log_radius(graph, lo_w, cfg.power_iter_tol,
                           cfg.power_iter_cap, stop_above=stop)
    if t < 0 and low.lower > cfg.blowup_threshold:
        # blow-up witnessed: the caller flags divergence, no upper end needed
        return PressureEstimate(c=c, t=t, depth=n, lower=low.lower,
                                upper=math.inf, iterations=low.iterations,
                                converged=False, divergent=True)
    if t == 0:
        upp = low
    else:
        upp = graph_log_radius(graph, hi_w, cfg.power_iter_tol, cfg.power_iter_cap)
    return PressureEstimate(
        c=c, t=t, depth=n,
        lower=low.lower, upper=upp.upper,
        iterations=low.iterations + upp.iterations,
        converged=low.converged and upp.converged,
    )


def pressure_truncated(c, t: float, N: float, n: int,
                       cfg: Config | None = None) -> PressureEstimate:
    """Bracket the depth-n pressure of t*max(psi_c, -N) on the FULL shift.

    The truncation regularises the singular cylinders, so every cell carries
    finite inf/sup weights and no word is forbidden.
    """
    cfg = cfg or Config()
    c = as_point(c)
    lo_w, hi_w = weight_bracket_arrays(c, n, t, truncation=N)
    low = full_shift_log_radius(n, lo_w, cfg.power_iter_tol, cfg.power_iter_cap)
    upp = full_shift_log_radius(n, hi_w, cfg.power_iter_tol, cfg.power_iter_cap)
    return PressureEstimate(
        c=c, t=t, depth=n,
        lower=low.lower, upper=upp.upper,
        iterations=low.iterations + upp.iterations,
        converged=low.converged and upp.converged,
    )


def pressure(c, t: float, cfg: Config | None = None) -> PressureEstimate:
    """Depth-swept pressure estimate with geometric (ratio-2) extrapolation.

    Depth-n pressures approach the limit like 2^-n, so successive midpoints
    are Richardson-extrapolated; the reported bracket is the extrapolant plus
    a conservative error band (extrapolant movement + current bracket width).
    For t < 0 a lower bound crossing cfg.blowup_threshold stops the sweep and
    flags the estimate divergent ("presumed infinite").
    """
    cfg = cfg or Config()
    c = as_point(c)
    prev_mid: Optional[float] = None
    prev_extrap: Optional[float] = None
    total_iters = 0
    last: Optional[PressureEstimate] = None
    result: Optional[PressureEstimate] = None
    for n in range(cfg.depth_min, cfg.depth_max + 1):
        try:
            graph = shared_sft(c, n)
        except DegenerateGraph:
            continue
        est = pressure_sft(c, t, n, cfg, graph=graph)
        total_iters += est.iterations
        if est.divergent:
            return PressureEstimate(
                c=c, t=t, depth=n, lower=est.lower, upper=math.inf,
                iterations=total_iters, converged=False, divergent=True)
        mid = est.midpoint
        if prev_mid is not None:
            extrap = 2.0 * mid - prev_mid
            if prev_extrap is not None:
                err = abs(extrap - prev_extrap) + 0.5 * est.width
                result = PressureEstimate(
                    c=c, t=t, depth=n, lower=extrap - err, upper=extrap + err,
                    iterations=total_iters,
                    converged=bool(2 * err <= cfg.bracket_tol and est.converged),
                )
                if result.converged:
                    return result
            prev_extrap = extrap
        prev_mid = mid
        last = est
    if result is not None:
        return result
    if last is not None:  # not enough depths for extrapolation
        return PressureEstimate(c=c, t=t, depth=last.depth, lower=last.lower,
                                upper=last.upper, iterations=total_iters,
                                converged=False)
    raise DegenerateGraph(
        f"no usable depth in [{cfg.depth_min}, {cfg.depth_max}] for c={c.value}")


def pressure_curve(c, t_grid, cfg: Config | None = None) -> PressureCurve:
    """Pressure at each t of a strictly increasing grid; SFT graphs are built
    once per depth and shared across t.  Per-sample divergence never aborts
    the rest of the curve."""
    cfg = cfg or Config()
    c = as_point(c)
    ts = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_grid must be strictly increasing")
    curve = PressureCurve(c=c)
    for t in ts:
        curve.samples.append((t, pressure(c, t, cfg)))
    return curve
