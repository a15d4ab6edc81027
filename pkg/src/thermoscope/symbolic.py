"""Dyadic symbolic dynamics for the doubling map.

Points on the torus, depth-n cylinder words, the forbidden word sets that cut
a shrinking neighbourhood of the singularity out of the full 2-shift, and the
resulting de Bruijn-indexed subshift graphs.

Conventions (fixed once, used everywhere): the ball around the singularity is
OPEN with radius 2^-(n+1); cylinders are half-open [k/2^n, (k+1)/2^n).  With
this pairing a cylinder is forbidden exactly when its CLOSED interval comes
strictly closer than the ball radius to c, so every allowed cylinder keeps the
singularity out of its closure.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, List

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DegenerateGraph

MAX_DEPTH = 30

# Dyadic rationals with denominator up to 2**EXACT_PROMOTION_BITS are stored
# exactly; beyond that a float behaves identically at every reachable depth.
EXACT_PROMOTION_BITS = 30


@dataclass(frozen=True)
class TorusPoint:
    """A point of [0,1), optionally tagged as an exact dyadic rational.

    ``exact`` is a pair (numerator, log2_denominator) with
    value == numerator / 2**log2_denominator bit-exactly.
    """

    value: float
    exact: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if not (0.0 <= self.value < 1.0):
            raise ValueError(f"torus point {self.value} outside [0,1)")
        if self.exact is not None:
            num, bits = self.exact
            if not (0 <= num < (1 << bits) or (num == 0 and bits == 0)):
                raise ValueError(f"bad dyadic pair {self.exact}")
            if float(num) / float(1 << bits) != self.value:
                raise ValueError("exact pair does not reproduce value")

    @staticmethod
    def from_float(x: float) -> "TorusPoint":
        x = float(x) % 1.0
        frac = Fraction(x)  # exact binary expansion of the double
        den = frac.denominator
        bits = den.bit_length() - 1
        if den == (1 << bits) and bits <= EXACT_PROMOTION_BITS:
            return TorusPoint(x, (frac.numerator, bits))
        return TorusPoint(x)

    @staticmethod
    def from_dyadic(numerator: int, log2_denominator: int) -> "TorusPoint":
        numerator %= 1 << log2_denominator
        # normalise away common powers of two
        while log2_denominator > 0 and numerator % 2 == 0:
            numerator //= 2
            log2_denominator -= 1
        return TorusPoint(numerator / float(1 << log2_denominator),
                          (numerator, log2_denominator))

    def as_fraction(self) -> Fraction:
        if self.exact is not None:
            return Fraction(self.exact[0], 1 << self.exact[1])
        return Fraction(self.value)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def is_exactly(self, numerator: int, log2_denominator: int) -> bool:
        """Exact-representation equality test (used for the c = 1/2 override)."""
        if self.exact is None:
            return False
        return self.as_fraction() == Fraction(numerator, 1 << log2_denominator)

    def __float__(self) -> float:
        return self.value


def as_point(x) -> TorusPoint:
    if isinstance(x, TorusPoint):
        return x
    return TorusPoint.from_float(float(x))


@dataclass(frozen=True)
class CylinderWord:
    """A binary word of length ``depth`` packed into the integer ``index``.

    The most significant bit of ``index`` is the first symbol; the associated
    dyadic interval is [index/2^depth, (index+1)/2^depth).
    """

    depth: int
    index: int

    def __post_init__(self):
        if not (1 <= self.depth <= MAX_DEPTH):
            raise ValueError(f"depth {self.depth} outside [1, {MAX_DEPTH}]")
        if not (0 <= self.index < (1 << self.depth)):
            raise ValueError(f"index {self.index} outside [0, 2^{self.depth})")

    @property
    def symbols(self) -> str:
        return format(self.index, f"0{self.depth}b")


def cylinder_interval(w: CylinderWord) -> Tuple[float, float]:
    """Half-open dyadic interval [k/2^n, (k+1)/2^n) of the word."""
    scale = float(1 << w.depth)
    return (w.index / scale, (w.index + 1) / scale)


def _torus_gap(u: Fraction, v: Fraction) -> Fraction:
    d = abs(u - v) % 1
    return min(d, 1 - d)


def forbidden_words(c: TorusPoint, n: int) -> List[CylinderWord]:
    """Length-n words whose dyadic interval meets the open ball of radius
    2^-(n+1) around c (wrap-around respected).  Always 1 or 2 words; the
    result is sorted by index.

    All comparisons are exact rational arithmetic, so boundary cases (dyadic
    c on a cylinder edge) are decided without floating-point ambiguity.
    """
    if n < 1:
        raise ValueError("depth must be >= 1")
    cf = c.as_fraction()
    cells = 1 << n
    radius = Fraction(1, 2 * cells)
    k_c = int(cf * cells)  # cell containing c
    out = []
    for k in (k_c - 1, k_c, k_c + 1):
        km = k % cells
        a = Fraction(km, cells)
        b = a + Fraction(1, cells)
        if a <= cf < b:
            dist = Fraction(0)
        else:
            dist = min(_torus_gap(cf, a), _torus_gap(cf, b))
        if dist < radius:
            out.append(km)
    return [CylinderWord(n, k) for k in sorted(set(out))]


def successors(states: np.ndarray, depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """De Bruijn successors (shift left, append 0/1) of packed words."""
    mask = (1 << depth) - 1
    s0 = (states << 1) & mask
    return s0, s0 | 1


@dataclass
class SftGraph:
    """Depth-n de Bruijn graph with the forbidden mask for the cut subshift.

    ``allowed`` marks surviving words; ``core`` is the subset of allowed
    states that lie on at least one directed cycle (computed by iterated
    in/out-degree trimming).  The spectral radius and all mean-cycle
    quantities live on the core, so callers work with ``core`` throughout.
    """

    depth: int
    c: TorusPoint
    allowed: np.ndarray
    forbidden: List[CylinderWord]
    core: np.ndarray
    strongly_connected: bool
    _sccs: Optional[List[np.ndarray]] = field(default=None, repr=False)

    @property
    def n_states(self) -> int:
        return 1 << self.depth

    @property
    def n_allowed(self) -> int:
        return int(self.allowed.sum())

    def core_successors(self) -> Tuple[np.ndarray, np.ndarray]:
        """Successor positions within ``core`` (-1 where the edge leaves it)."""
        pos = np.full(self.n_states, -1, dtype=np.int64)
        pos[self.core] = np.arange(len(self.core))
        s0, s1 = successors(self.core, self.depth)
        return pos[s0], pos[s1]

    def scc_list(self) -> List[np.ndarray]:
        """Strongly connected components of the core, as core-position arrays."""
        if self._sccs is None:
            p0, p1 = self.core_successors()
            m = len(self.core)
            rows, cols = [], []
            for p in (p0, p1):
                keep = p >= 0
                rows.append(np.nonzero(keep)[0])
                cols.append(p[keep])
            rows = np.concatenate(rows)
            cols = np.concatenate(cols)
            adj = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)),
                             shape=(m, m))
            n_comp, labels = connected_components(adj, directed=True,
                                                  connection="strong")
            comps = [np.nonzero(labels == i)[0] for i in range(n_comp)]
            # trimming already removed cycle-free states, so every component
            # of size 1 must carry a self-loop; keep them all
            self._sccs = comps
        return self._sccs


def _trim_to_core(allowed: np.ndarray, depth: int) -> np.ndarray:
    """Drop states that are on no directed cycle (no path in AND out)."""
    n = 1 << depth
    half = n >> 1
    alive = allowed.copy()
    idx = np.arange(n, dtype=np.int64)
    s0, s1 = successors(idx, depth)
    p0 = idx >> 1
    p1 = p0 | half
    while True:
        ok = alive & (alive[s0] | alive[s1]) & (alive[p0] | alive[p1])
        if ok.sum() == alive.sum():
            return ok
        alive = ok


def build_sft(c: TorusPoint, n: int) -> SftGraph:
    """Cut-out subshift graph at depth n.

    Raises DegenerateGraph when no cycle survives (possible only at tiny n);
    callers probing small depths should start at n >= 3.
    """
    c = as_point(c)
    forb = forbidden_words(c, n)
    allowed = np.ones(1 << n, dtype=bool)
    for w in forb:
        allowed[w.index] = False
    alive = _trim_to_core(allowed, n)
    core = np.nonzero(alive)[0].astype(np.int64)
    if len(core) == 0:
        raise DegenerateGraph(
            f"no cycle survives at depth {n} for c={c.value}; increase n")
    graph = SftGraph(depth=n, c=c, allowed=allowed, forbidden=forb, core=core,
                     strongly_connected=False)
    graph.strongly_connected = len(graph.scc_list()) == 1
    return graph


@lru_cache(maxsize=128)
def _cached_graph(key: Tuple, n: int) -> SftGraph:
    value, exact = key
    return build_sft(TorusPoint(value, exact), n)


def shared_sft(c: TorusPoint, n: int) -> SftGraph:
    """Memoised build_sft, so curve/scan sweeps reuse graphs per depth."""
    c = as_point(c)
    return _cached_graph((c.value, c.exact), n)
