"""Extremal Birkhoff averages via minimum/maximum mean cycles.

The infimum/supremum of the potential's integral over invariant measures of
the cut subshift is realised by periodic orbits, i.e. by directed cycles of
the de Bruijn graph with extremal mean edge weight.  Three routes are
implemented and cross-checked: Karp's dynamic program (small graphs), Howard
policy iteration (large graphs), and an exhaustive max-plus sweep over all
cycle lengths (the oracle: the best closed walk of each length <= |V| is
computed by max-plus matrix powers, and the optimal mean over all of them
equals the optimal simple-cycle mean).
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .errors import DegenerateGraph
from .potential import psi_bracket_arrays
from .symbolic import SftGraph, TorusPoint, as_point, shared_sft

KARP_STATE_CAP = 1100  # Karp's O(V^2) table is only run below this size

# agreement tolerance between the three mean-cycle routes
ROUTE_TOL = 1e-9


@dataclass(frozen=True)
class MeanCycle:
    value: float
    cycle: Tuple[int, ...]  # states, in walk order


@dataclass
class EdgeGraph:
    """A small directed graph with per-edge weights, CSR-like storage."""

    n_states: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @staticmethod
    def from_edges(n_states: int, edges: Sequence[Tuple[int, int, float]]) -> "EdgeGraph":
        if len(edges) == 0:
            return EdgeGraph(n_states, np.zeros(0, np.int64),
                             np.zeros(0, np.int64), np.zeros(0))
        src, dst, w = (np.asarray(a) for a in zip(*edges))
        return EdgeGraph(n_states, src.astype(np.int64), dst.astype(np.int64),
                         w.astype(np.float64))


def sft_edge_graph(graph: SftGraph, node_weights: np.ndarray) -> EdgeGraph:
    """Core subgraph with edge weight = weight of the TARGET cylinder.

    States are relabelled to core positions; ``node_weights`` is indexed by
    original state.
    """
    p0, p1 = graph.core_successors()
    w_core = node_weights[graph.core]
    src, dst = [], []
    for p in (p0, p1):
        keep = p >= 0
        src.append(np.nonzero(keep)[0])
        dst.append(p[keep])
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    return EdgeGraph(len(graph.core), src.astype(np.int64),
                     dst.astype(np.int64), w_core[dst])


def _scc_labels(g: EdgeGraph) -> np.ndarray:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    adj = csr_matrix((np.ones(len(g.src), np.int8), (g.src, g.dst)),
                     shape=(g.n_states, g.n_states))
    return connected_components(adj, directed=True, connection="strong")[1]


def karp_max_mean(g: EdgeGraph) -> MeanCycle:
    """Karp's maximum mean cycle, run per strongly connected component."""
    if g.n_states > KARP_STATE_CAP:
        raise ValueError(f"Karp table too large for {g.n_states} states")
    labels = _scc_labels(g)
    best: Optional[MeanCycle] = None
    for lab in range(labels.max() + 1):
        states = np.nonzero(labels == lab)[0]
        e_mask = (labels[g.src] == lab) & (labels[g.dst] == lab)
        if not e_mask.any():
            continue
        mc = _karp_component(states, g.src[e_mask], g.dst[e_mask],
                             g.weight[e_mask])
        if mc is not None and (best is None or mc.value > best.value):
            best = mc
    if best is None:
        raise DegenerateGraph("graph has no directed cycle")
    return best


def _karp_component(states, src, dst, w) -> Optional[MeanCycle]:
    m = len(states)
    pos = {s: i for i, s in enumerate(states)}
    es = np.array([pos[s] for s in src], dtype=np.int64)
    ed = np.array([pos[d] for d in dst], dtype=np.int64)
    d = np.full((m + 1, m), -np.inf)
    parent = np.full((m + 1, m), -1, dtype=np.int64)
    d[0, 0] = 0.0  # arbitrary source inside the component
    for k in range(m):
        cand = d[k, es] + w
        np.maximum.at(d[k + 1], ed, cand)
        improved = cand == d[k + 1, ed]
        parent[k + 1, ed[improved]] = es[improved]
    lam, v_star = -np.inf, -1
    for v in range(m):
        if d[m, v] == -np.inf:
            continue
        ks = np.nonzero(d[:m, v] > -np.inf)[0]
        val = np.min((d[m, v] - d[ks, v]) / (m - ks))
        if val > lam:
            lam, v_star = val, v
    if v_star < 0:
        return None
    # walk the parent chain of the length-m walk into v_star; scan its cycles
    # and return the one whose mean attains lam
    walk = [v_star]
    for k in range(m, 0, -1):
        walk.append(parent[k, walk[-1]])
    walk.reverse()  # length m+1, walk[i] -> walk[i+1]
    wmap = {}
    for u, v, wt in zip(src, dst, w):
        key = (pos[u], pos[v])
        wmap[key] = max(wmap.get(key, -np.inf), wt)
    seen = {}
    best_cycle, best_mean = None, -np.inf
    for i, s in enumerate(walk):
        if s in seen:
            cyc = walk[seen[s]:i]
            mean = sum(wmap[(cyc[j], cyc[(j + 1) % len(cyc)])]
                       for j in range(len(cyc))) / len(cyc)
            if mean > best_mean:
                best_mean, best_cycle = mean, cyc
            for t in walk[seen[s]:i]:
                seen.pop(t, None)
        seen[s] = i
    return MeanCycle(float(lam), tuple(int(states[s]) for s in best_cycle))


def howard_max_mean(g: EdgeGraph, tie_eps: float = 1e-12) -> MeanCycle:
    """Howard policy iteration for the maximum mean cycle.

    Each state keeps one outgoing edge (the policy); evaluation finds the
    policy's cycles and propagates (gain, bias) backwards; improvement
    switches to a successor with lexicographically larger (gain, bias+w),
    preferring the smaller state index on ties, so runs are deterministic.
    """
    m = g.n_states
    order = np.lexsort((g.dst, g.src))
    src, dst, w = g.src[order], g.dst[order], g.weight[order]
    out_start = np.searchsorted(src, np.arange(m))
    out_end = np.searchsorted(src, np.arange(m) + 1)
    has_out = out_end > out_start
    if not has_out.any():
        raise DegenerateGraph("graph has no edges")

    # policy stores an edge id per state (-1 where there is no out-edge)
    policy = np.where(has_out, out_start, -1)

    def evaluate(policy):
        gain = np.full(m, -np.inf)
        bias = np.zeros(m)
        color = np.zeros(m, dtype=np.int8)  # 0 new, 1 on stack, 2 done
        cycles = []
        for s in range(m):
            if color[s] or policy[s] < 0:
                continue
            path = []
            u = s
            while color[u] == 0 and policy[u] >= 0:
                color[u] = 1
                path.append(u)
                u = int(dst[policy[u]])
            if color[u] == 1:  # the walk closed on itself: a fresh cycle
                i = path.index(u)
                cyc = path[i:]
                gcyc = sum(w[policy[v]] for v in cyc) / len(cyc)
                cycles.append((gcyc, cyc))
                for v in cyc:
                    gain[v] = gcyc
                bias[cyc[-1]] = 0.0  # anchor; consistent around the cycle
                for v in reversed(cyc[:-1]):
                    bias[v] = w[policy[v]] - gcyc + bias[int(dst[policy[v]])]
            for v in reversed(path):
                color[v] = 2
                if gain[v] == -np.inf and policy[v] >= 0:
                    nxt = int(dst[policy[v]])
                    if gain[nxt] > -np.inf:
                        gain[v] = gain[nxt]
                        bias[v] = w[policy[v]] - gain[v] + bias[nxt]
        return gain, bias, cycles

    def better(key, ref):
        if key[0] > ref[0] + tie_eps:
            return True
        return key[0] > ref[0] - tie_eps and key[1] > ref[1] + tie_eps

    for _ in range(20 * m + 50):
        gain, bias, cycles = evaluate(policy)
        if not cycles:
            raise DegenerateGraph("policy graph has no cycle")
        changed = False
        for u in range(m):
            if not has_out[u]:
                continue
            best_e, best_key = -1, None
            for e in range(out_start[u], out_end[u]):
                v = int(dst[e])
                if gain[v] == -np.inf:
                    continue
                key = (gain[v], w[e] + bias[v])
                if best_key is None or better(key, best_key):
                    best_e, best_key = e, key
                # edges are sorted by successor index, so keeping the first
                # on ties prefers the smaller state index (deterministic runs)
            cur = policy[u]
            if best_e >= 0 and best_e != cur:
                if cur < 0:
                    policy[u] = best_e
                    changed = True
                else:
                    vc = int(dst[cur])
                    cur_key = (gain[vc], w[cur] + bias[vc])
                    if better(best_key, cur_key):
                        policy[u] = best_e
                        changed = True
        if not changed:
            break
    gain, bias, cycles = evaluate(policy)
    if not cycles:
        raise DegenerateGraph("policy graph has no cycle")
    gbest, cyc = max(cycles, key=lambda item: item[0])
    return MeanCycle(float(gbest), tuple(int(v) for v in cyc))


def maxplus_max_mean(g: EdgeGraph) -> MeanCycle:
    """Exhaustive optimum over all cycle lengths via max-plus matrix powers.

    For every L <= |V| the best closed walk of length L is found; every
    closed walk decomposes into simple cycles, so the best mean over all
    (L, walk) pairs equals the maximum simple-cycle mean.  Dense; oracle use
    only (|V| capped at 128).
    """
    m = g.n_states
    if m > 128:
        raise ValueError("max-plus oracle capped at 128 states")
    if len(g.src) == 0:
        raise DegenerateGraph("graph has no edges")
    a = np.full((m, m), -np.inf)
    np.maximum.at(a, (g.src, g.dst), g.weight)
    d_tab = [a.copy()]
    best_val, best_len = -np.inf, 0
    with np.errstate(invalid="ignore"):
        for length in range(1, m + 1):
            diag = np.diagonal(d_tab[length - 1])
            v = diag.max() / length
            if v > best_val + 1e-15:
                best_val, best_len = v, length
            if length < m:
                d_tab.append(np.max(d_tab[-1][:, :, None] + a[None, :, :], axis=1))
    if best_len == 0:
        raise DegenerateGraph("graph has no directed cycle")
    # witness: peel the best closed walk of the optimal length off the DP
    start = int(np.argmax(np.diagonal(d_tab[best_len - 1])))
    cycle = [start]
    u = start
    for k in range(best_len - 1, 0, -1):
        vals = a[u, :] + d_tab[k - 1][:, start]
        u = int(np.argmax(vals))
        cycle.append(u)
    return MeanCycle(float(best_val), tuple(cycle))


def simple_cycles_dfs(g: EdgeGraph, cap: int = 2_000_000) -> List[Tuple[Tuple[int, ...], float]]:
    """All simple cycles with their mean weights, via DFS with a visited set.

    Exponential; intended only for very small graphs in tests.
    """
    m = g.n_states
    adj: List[List[Tuple[int, float]]] = [[] for _ in range(m)]
    for s, d, wt in zip(g.src, g.dst, g.weight):
        adj[int(s)].append((int(d), float(wt)))
    out = []
    count = 0
    for root in range(m):
        stack = [(root, iter(adj[root]), 0.0)]
        path = [root]
        onpath = {root}
        sums = [0.0]
        while stack:
            u, it, _ = stack[-1]
            advanced = False
            for v, wt in it:
                count += 1
                if count > cap:
                    raise RuntimeError("cycle enumeration budget exceeded")
                if v == root:
                    total = sums[-1] + wt
                    out.append((tuple(path), total / len(path)))
                elif v > root and v not in onpath:
                    stack.append((v, iter(adj[v]), wt))
                    path.append(v)
                    onpath.add(v)
                    sums.append(sums[-1] + wt)
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                onpath.discard(path.pop())
                sums.pop()
    return out


def max_mean_cycle(g: EdgeGraph) -> MeanCycle:
    """Maximum mean cycle: Karp below the size cap, Howard above."""
    if g.n_states <= KARP_STATE_CAP:
        return karp_max_mean(g)
    return howard_max_mean(g)


def min_mean_cycle(g: EdgeGraph) -> MeanCycle:
    """Minimum mean cycle (negate weights, reuse the max machinery)."""
    neg = EdgeGraph(g.n_states, g.src, g.dst, -g.weight)
    mc = max_mean_cycle(neg)
    return MeanCycle(-mc.value, mc.cycle)


@dataclass(frozen=True)
class EndpointEstimate:
    """Depth-n brackets for the extremal Birkhoff averages alpha/beta."""

    c: TorusPoint
    depth: int
    alpha_bracket: Tuple[float, float]
    beta_bracket: Tuple[float, float]
    alpha_divergent: bool
    alpha_witness: Tuple[int, ...]
    beta_witness: Tuple[int, ...]

    @property
    def alpha(self) -> float:
        return 0.5 * (self.alpha_bracket[0] + self.alpha_bracket[1])

    @property
    def beta(self) -> float:
        return 0.5 * (self.beta_bracket[0] + self.beta_bracket[1])


def _endpoints_at_depth(c: TorusPoint, n: int) -> Tuple[Tuple[float, float],
                                                        Tuple[float, float],
                                                        Tuple[int, ...],
                                                        Tuple[int, ...]]:
    graph = shared_sft(c, n)
    lo_w, hi_w = psi_bracket_arrays(c, n)
    g_lo = sft_edge_graph(graph, lo_w)
    g_hi = sft_edge_graph(graph, hi_w)
    beta_lo = max_mean_cycle(g_lo)
    beta_hi = max_mean_cycle(g_hi)
    alpha_lo = min_mean_cycle(g_lo)
    alpha_hi = min_mean_cycle(g_hi)
    core = graph.core
    return ((alpha_lo.value, alpha_hi.value),
            (beta_lo.value, beta_hi.value),
            tuple(int(core[p]) for p in alpha_lo.cycle),
            tuple(int(core[p]) for p in beta_hi.cycle))


def endpoints(c, n: int, cfg: Config | None = None,
              alpha_threshold: float = -40.0) -> EndpointEstimate:
    """Endpoint estimates at depth n, with a blow-up check for alpha.

    alpha_divergent is set when the alpha lower end sits below
    ``alpha_threshold`` and kept decreasing over the last three depths, a
    numerical witness (not proof) of an infinite lower endpoint.
    """
    c = as_point(c)
    alpha_lo_hist = []
    result = None
    for depth in range(max(3, n - 2), n + 1):
        try:
            a_br, b_br, a_wit, b_wit = _endpoints_at_depth(c, depth)
        except DegenerateGraph:
            continue
        alpha_lo_hist.append(a_br[0])
        result = (depth, a_br, b_br, a_wit, b_wit)
    if result is None:
        raise DegenerateGraph(f"no usable depth at or below {n} for c={c.value}")
    depth, a_br, b_br, a_wit, b_wit = result
    decreasing = (len(alpha_lo_hist) >= 3
                  and alpha_lo_hist[-1] < alpha_lo_hist[-2] < alpha_lo_hist[-3])
    divergent = bool(a_br[0] < alpha_threshold and decreasing)
    return EndpointEstimate(c=c, depth=depth, alpha_bracket=a_br,
                            beta_bracket=b_br, alpha_divergent=divergent,
                            alpha_witness=a_wit, beta_witness=b_wit)


def cycle_mean(g: EdgeGraph, cycle: Sequence[int]) -> float:
    """Mean edge weight of a closed walk given as a state sequence."""
    wmap = {}
    for s, d, wt in zip(g.src, g.dst, g.weight):
        key = (int(s), int(d))
        wmap[key] = max(wmap.get(key, -np.inf), float(wt))
    total = 0.0
    k = len(cycle)
    for i in range(k):
        total += wmap[(cycle[i], cycle[(i + 1) % k])]
    return total / k
