"""The equilibrium measure as a Riesz product, and its dyadic statistics.

The measure is the weak limit of the absolutely continuous densities
prod_{m<M} (1 - cos(2 pi (2^m x - c))); truncating at M factors and
integrating over dyadic cells gives mass tables whose moment sums carry the
L^q scaling.  The same family of sequences exp(2 pi i (c+1/2) * S_2(n))
(binary digit-sum S_2) has this measure as its diffraction, which gives an
independent autocorrelation cross-check.
"""

import json
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .config import Config
from .errors import BudgetExceeded, MassFloorViolation
from .symbolic import TorusPoint, as_point

MASS_FLOOR = 1e-12


def partial_density(c, M: int, x) -> float:
    """prod_{m=0}^{M-1} (1 - cos(2 pi (2^m x - c))); the empty product is 1."""
    if M < 0:
        raise ValueError("need M >= 0")
    cv = as_point(c).value
    xv = as_point(x).value
    out = 1.0
    arg = xv
    for _ in range(M):
        out *= 1.0 - math.cos(2.0 * math.pi * (arg - cv))
        arg = (2.0 * arg) % 1.0
    return out


def density_grid(c, M: int, grid_log2: int,
                 budget: int | None = None) -> np.ndarray:
    """Truncated density at the 2^grid_log2 cell midpoints, accumulated
    factor by factor (each factor just doubles the previous argument)."""
    if budget is not None and (1 << grid_log2) > budget:
        raise BudgetExceeded(
            f"density grid 2^{grid_log2} exceeds the quadrature budget {budget}")
    cv = as_point(c).value
    npts = 1 << grid_log2
    x = (np.arange(npts, dtype=np.float64) + 0.5) / npts
    dens = np.ones(npts)
    for _ in range(M):
        dens *= 1.0 - np.cos(2.0 * np.pi * (x - cv))
        x = (2.0 * x) % 1.0
    return dens


@dataclass
class MeasureTable:
    """Masses of the truncated measure on the 2^depth dyadic cells."""

    c: TorusPoint
    depth: int
    truncation: int
    masses: np.ndarray

    def __post_init__(self):
        if len(self.masses) != 1 << self.depth:
            raise ValueError("mass array length does not match depth")

    @property
    def left_endpoints(self) -> np.ndarray:
        return np.arange(1 << self.depth) / float(1 << self.depth)

    def to_csv(self) -> str:
        lines = ["depth,index,left_endpoint,mass"]
        lefts = self.left_endpoints
        for k, mass in enumerate(self.masses):
            lines.append(f"{self.depth},{k},{lefts[k]:.12g},{mass:.12g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "c": self.c.value,
            "depth": self.depth,
            "truncation": self.truncation,
            "masses": [float(v) for v in self.masses],
        })


def cylinder_masses(c, n: int, M: int, quad_points: int | None = None,
                    cfg: Config | None = None) -> MeasureTable:
    """Masses of the M-factor truncated measure on depth-n dyadic cells.

    Composite midpoint quadrature on a uniform grid; the default grid step
    2^-(M+2) puts four points under the fastest oscillating factor and, being
    a full uniform grid, integrates every harmonic of the degree-<2^M density
    exactly except multiples of the grid size, so the total mass is exact to
    rounding.
    """
    cfg = cfg or Config()
    c = as_point(c)
    if n < 1 or M < 0:
        raise ValueError("need n >= 1 and M >= 0")
    if quad_points is None:
        grid_log2 = max(n, M + 2)
    else:
        if quad_points < 1 or quad_points & (quad_points - 1):
            raise ValueError("quad_points per cell must be a power of two")
        grid_log2 = n + quad_points.bit_length() - 1
    dens = density_grid(c, M, grid_log2, budget=cfg.quad_budget)
    per_cell = 1 << (grid_log2 - n)
    masses = dens.reshape(1 << n, per_cell).mean(axis=1) / float(1 << n)
    return MeasureTable(c=c, depth=n, truncation=M, masses=masses)


def partition_sum(table: MeasureTable, q: float) -> float:
    """Sum of mass^q over the support cells of the table."""
    masses = table.masses
    support = masses > 0.0
    if q < 0 and bool((masses[support] < MASS_FLOOR).any()):
        raise MassFloorViolation(
            f"negative moment q={q} with cells below the {MASS_FLOOR} floor")
    return float(np.sum(masses[support] ** q))


@dataclass(frozen=True)
class LqFit:
    """Least-squares slope of log partition sums against n log 2."""

    q: float
    slope: float
    residual: float
    depths: Tuple[int, ...]
    log_sums: Tuple[float, ...]


def lq_direct(c, q: float, n_range: Sequence[int],
              cfg: Config | None = None) -> LqFit:
    """Direct moment-scaling estimate of the L^q spectrum.

    Builds a mass table per depth (truncation n + offset), fits
    log S_n(q) ~ slope * n log 2 + const and reports the rms residual.
    """
    cfg = cfg or Config()
    depths = sorted(int(n) for n in n_range)
    if len(depths) < 4:
        raise ValueError("need at least 4 depths for a slope")
    log_sums = []
    for n in depths:
        table = cylinder_masses(c, n, n + cfg.riesz_truncation_offset, cfg=cfg)
        log_sums.append(math.log(partition_sum(table, q)))
    xs = np.array(depths, dtype=float) * math.log(2.0)
    ys = np.array(log_sums)
    coeffs, res = np.polyfit(xs, ys, 1, full=True)[:2]
    rms = math.sqrt(res[0] / len(xs)) if len(res) else 0.0
    return LqFit(q=q, slope=float(coeffs[0]), residual=rms,
                 depths=tuple(depths), log_sums=tuple(log_sums))


def digit_sums(count: int) -> np.ndarray:
    """S_2(0..count-1): binary digit sums."""
    return np.bitwise_count(np.arange(count, dtype=np.uint64)).astype(np.int64)


def tm_sequence(c, count: int) -> np.ndarray:
    """First terms of the two-letter substitution-type sequence
    exp(2 pi i (c + 1/2) S_2(n))."""
    if count < 1:
        raise ValueError("need count >= 1")
    cv = as_point(c).value
    phase = 2.0 * np.pi * (cv + 0.5)
    return np.exp(1j * phase * digit_sums(count))


def empirical_autocorrelation(seq: np.ndarray, lags: int) -> np.ndarray:
    """gamma(k) = (1/N) sum_{n<N} seq[n+k] * conj(seq[n]) for k < lags."""
    n = len(seq) - lags + 1
    if n < 1:
        raise ValueError("sequence too short for the requested lags")
    out = np.empty(lags, dtype=complex)
    base = np.conj(seq[:n])
    for k in range(lags):
        out[k] = np.dot(seq[k:k + n], base) / n
    return out


def riesz_fourier_coefficients(c, M: int, lags: int,
                               cfg: Config | None = None) -> np.ndarray:
    """hat(mu)(k) = integral of e^{2 pi i k x} against the truncated density,
    k = 0..lags-1, by midpoint quadrature (exact for k below the grid size)."""
    cfg = cfg or Config()
    grid_log2 = M + 2
    while (1 << grid_log2) <= 4 * lags:
        grid_log2 += 1
    dens = density_grid(c, M, grid_log2, budget=cfg.quad_budget)
    npts = len(dens)
    x = (np.arange(npts, dtype=np.float64) + 0.5) / npts
    out = np.empty(lags, dtype=complex)
    for k in range(lags):
        out[k] = np.mean(dens * np.exp(2j * np.pi * k * x))
    return out


@dataclass(frozen=True)
class AutocorrelationReport:
    c: TorusPoint
    lags: int
    sample_length: int
    empirical: np.ndarray
    riesz: np.ndarray

    @property
    def max_discrepancy(self) -> float:
        return float(np.abs(self.empirical - self.riesz).max())


def autocorrelation_check(c, lags: int, sample_length: int,
                          truncation: int = 18,
                          cfg: Config | None = None) -> AutocorrelationReport:
    """Compare the sequence autocorrelation against the measure's Fourier
    coefficients (the diffraction identity), at lags 0..lags-1.

    ``sample_length`` should be a large power of two; the identity states
    gamma(k) equals hat(mu)(k) in the limit.
    """
    c = as_point(c)
    if sample_length < 2 or sample_length & (sample_length - 1):
        raise ValueError("sample_length must be a power of two >= 2")
    seq = tm_sequence(c, sample_length + lags)
    emp = empirical_autocorrelation(seq, lags)
    four = riesz_fourier_coefficients(c, truncation, lags, cfg)
    return AutocorrelationReport(c=c, lags=lags, sample_length=sample_length,
                                 empirical=emp, riesz=four)
