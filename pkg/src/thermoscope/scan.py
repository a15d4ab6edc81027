"""Parameter scans over the singularity position at fixed t.

Scans exhibit the parameter regularity phenomenology: for t >= 0 the
pressure column varies continuously with the singularity position, while for
t < 0 the sweep may blow past the configured threshold at isolated grid
points, which the tables report as presumed-infinite rows (a numerical
witness, never a decided membership).  Endpoint scans track the continuous
upper endpoint and the only-semicontinuous lower endpoint the same way.
"""

import json
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .ergodic import EndpointEstimate, endpoints
from .symbolic import TorusPoint, as_point
from .transfer import PressureEstimate, pressure


def make_grid(n_uniform: int, focal_points: Sequence[float] = (),
              refine_levels: int = 8) -> List[TorusPoint]:
    """Uniform grid k/n plus dyadic refinements around focal points.

    Around every focal point f the grid gains f and f +- 2^-j for
    refine_levels values of j finer than the uniform spacing.
    """
    if n_uniform < 1:
        raise ValueError("need n_uniform >= 1")
    vals = {k / n_uniform for k in range(n_uniform)}
    base = max(2, int(math.ceil(math.log2(n_uniform))))
    for f in focal_points:
        f = float(f) % 1.0
        vals.add(f)
        for j in range(base + 1, base + 1 + refine_levels):
            step = 2.0 ** -j
            vals.add((f + step) % 1.0)
            vals.add((f - step) % 1.0)
    return [TorusPoint.from_float(v) for v in sorted(vals)]


@dataclass
class ScanDiagnostics:
    max_neighbor_gap: float
    neighbor_gaps: np.ndarray
    divergent_count: int
    unconverged_count: int

    def as_dict(self) -> dict:
        return {
            "max_neighbor_gap": self.max_neighbor_gap,
            "divergent_count": self.divergent_count,
            "unconverged_count": self.unconverged_count,
        }


@dataclass
class ScanTable:
    """Per-c rows of a fixed-t scan plus recomputable summary diagnostics."""

    t: Optional[float]
    c_grid: List[TorusPoint]
    rows: List
    kind: str = "pressure"  # pressure | endpoints

    def __post_init__(self):
        if len(self.rows) != len(self.c_grid):
            raise ValueError("rows must align 1:1 with c_grid")

    def diagnostics(self) -> ScanDiagnostics:
        if self.kind == "pressure":
            vals = np.array([r.midpoint if not r.divergent else np.nan
                             for r in self.rows])
            divergent = sum(r.divergent for r in self.rows)
            unconverged = sum((not r.converged) and (not r.divergent)
                              for r in self.rows)
        else:
            vals = np.array([r.beta for r in self.rows])
            divergent = sum(r.alpha_divergent for r in self.rows)
            unconverged = 0
        gaps = np.abs(np.diff(vals))
        finite = gaps[np.isfinite(gaps)]
        max_gap = float(finite.max()) if len(finite) else float("nan")
        return ScanDiagnostics(max_neighbor_gap=max_gap, neighbor_gaps=gaps,
                               divergent_count=int(divergent),
                               unconverged_count=int(unconverged))

    def to_csv(self) -> str:
        if self.kind == "pressure":
            lines = ["c,t,depth,lower,upper,converged,divergent"]
            for c, r in zip(self.c_grid, self.rows):
                upper = "" if r.divergent else f"{r.upper:.12g}"
                lines.append(
                    f"{c.value:.12g},{r.t:.12g},{r.depth},{r.lower:.12g},"
                    f"{upper},{str(r.converged).lower()},{str(r.divergent).lower()}")
        else:
            lines = ["c,depth,alpha_lower,alpha_upper,beta_lower,beta_upper,"
                     "alpha_divergent"]
            for c, r in zip(self.c_grid, self.rows):
                a_lo, a_hi = r.alpha_bracket
                b_lo, b_hi = r.beta_bracket
                lines.append(
                    f"{c.value:.12g},{r.depth},{a_lo:.12g},{a_hi:.12g},"
                    f"{b_lo:.12g},{b_hi:.12g},{str(r.alpha_divergent).lower()}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        rows = []
        if self.kind == "pressure":
            for c, r in zip(self.c_grid, self.rows):
                rows.append({
                    "c": c.value, "t": r.t, "depth": r.depth,
                    "lower": r.lower,
                    "upper": None if r.divergent else r.upper,
                    "converged": r.converged, "divergent": r.divergent,
                })
        else:
            for c, r in zip(self.c_grid, self.rows):
                rows.append({
                    "c": c.value, "depth": r.depth,
                    "alpha": list(r.alpha_bracket), "beta": list(r.beta_bracket),
                    "alpha_divergent": r.alpha_divergent,
                })
        return json.dumps({"t": self.t, "kind": self.kind, "rows": rows,
                           "diagnostics": self.diagnostics().as_dict()})

    def to_gnuplot(self) -> str:
        """Two columns (c, midpoint-or-NaN), ready for plotting."""
        lines = []
        for c, r in zip(self.c_grid, self.rows):
            if self.kind == "pressure":
                val = "nan" if r.divergent else f"{r.midpoint:.12g}"
            else:
                val = f"{r.beta:.12g}"
            lines.append(f"{c.value:.12g} {val}")
        return "\n".join(lines) + "\n"


def _pressure_row(args) -> PressureEstimate:
    cval, exact, t, cfg = args
    return pressure(TorusPoint(cval, exact), t, cfg)


def _endpoint_row(args) -> EndpointEstimate:
    cval, exact, depth, cfg, threshold = args
    return endpoints(TorusPoint(cval, exact), depth, cfg,
                     alpha_threshold=threshold)


def _run_rows(worker, jobs, workers: int):
    if workers <= 1 or len(jobs) < 4:
        return [worker(j) for j in jobs]
    with Pool(processes=workers) as pool:
        return pool.map(worker, jobs, chunksize=max(1, len(jobs) // (4 * workers)))


def scan_pressure(t: float, c_grid: Sequence, cfg: Config | None = None) -> ScanTable:
    """Pressure at each grid point; divergent cells are flagged, never fatal."""
    cfg = cfg or Config()
    grid = [as_point(c) for c in c_grid]
    vals = [c.value for c in grid]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("c_grid must be sorted and deduplicated")
    jobs = [(c.value, c.exact, t, cfg) for c in grid]
    rows = _run_rows(_pressure_row, jobs, cfg.effective_workers())
    return ScanTable(t=t, c_grid=grid, rows=rows, kind="pressure")


def scan_endpoints(c_grid: Sequence, cfg: Config | None = None,
                   depth: Optional[int] = None,
                   alpha_threshold: float = -40.0) -> ScanTable:
    """Endpoint estimates at each grid point."""
    cfg = cfg or Config()
    grid = [as_point(c) for c in c_grid]
    vals = [c.value for c in grid]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("c_grid must be sorted and deduplicated")
    d = depth or min(cfg.depth_max, 12)
    jobs = [(c.value, c.exact, d, cfg, alpha_threshold) for c in grid]
    rows = _run_rows(_endpoint_row, jobs, cfg.effective_workers())
    return ScanTable(t=None, c_grid=grid, rows=rows, kind="endpoints")


@dataclass
class SemicontinuityReport:
    """Discrete lower-semicontinuity diagnostic of a pressure scan.

    An interior grid point is flagged when its (finite) value exceeds both
    finite neighbours by more than slack = |t| * L(h) * h + bracket widths,
    with L(h) the local Lipschitz bound of the potential family outside an
    h-neighbourhood of the singularity.  Divergent neighbours make the check
    vacuous.  At fixed depth this is a diagnostic, not a theorem-level test.
    """

    t: float
    checked: int
    violations: List[Tuple[float, float]]  # (c, excess)
    slack_used: List[float]

    @property
    def violation_count(self) -> int:
        return len(self.violations)


def local_lipschitz_bound(h: float) -> float:
    """Lipschitz constant of the rotated potentials outside an h-ball of the
    singularity: sup |psi'| = 2 pi |cot(pi h)|."""
    return 2.0 * math.pi / math.tan(math.pi * min(h, 0.49))


def semicontinuity_report(table: ScanTable) -> SemicontinuityReport:
    if table.kind != "pressure":
        raise ValueError("semicontinuity report expects a pressure table")
    rows = table.rows
    cs = [c.value for c in table.c_grid]
    t = table.t
    violations = []
    slacks = []
    checked = 0
    for i in range(1, len(rows) - 1):
        r = rows[i]
        if r.divergent:
            continue
        left, right = rows[i - 1], rows[i + 1]
        neigh = []
        for rr in (left, right):
            neigh.append(math.inf if rr.divergent else rr.midpoint)
        floor = min(neigh)
        if not math.isfinite(floor):
            continue  # infinite neighbour dominates the min: vacuous
        checked += 1
        h = max(cs[i] - cs[i - 1], cs[i + 1] - cs[i])
        slack = abs(t) * local_lipschitz_bound(h) * h
        slack += r.width + max(rr.width for rr in (left, right)
                               if not rr.divergent)
        slacks.append(slack)
        excess = r.midpoint - floor - slack
        if excess > 0:
            violations.append((cs[i], float(excess)))
    return SemicontinuityReport(t=t, checked=checked, violations=violations,
                                slack_used=slacks)
