"""Maximum cycle ratio and maximum cycle mean on a doubly weighted digraph.

Cycles are tuples of 0-based node indices with an implied closing edge,
rotated so the smallest node comes first.  ``None`` stands for "no cycle".
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import TooLarge

__all__ = [
    "CycleCertificate",
    "canonical_cycle",
    "strongly_connected_components",
    "enumerate_cycles",
    "positive_cycle_exists",
    "max_cycle_ratio",
    "max_cycle_mean",
]

RATIO = "ratio"
MEAN = "mean"


@dataclass(frozen=True)
class CycleCertificate:
    cycle: tuple
    value: float
    kind: str

    def recompute(self, g):
        return g.cycle_ratio(self.cycle) if self.kind == RATIO else g.cycle_mean(self.cycle)


def canonical_cycle(nodes):
    nodes = tuple(int(v) for v in nodes)
    k = nodes.index(min(nodes))
    return nodes[k:] + nodes[:k]


def _out_edges(g, nodes=None):
    keep = None if nodes is None else set(nodes)
    out = {v: [] for v in (range(g.m) if keep is None else sorted(keep))}
    for e in g.edges:
        if keep is None or (e.i in keep and e.j in keep):
            out[e.i].append(e)
    return out


def strongly_connected_components(g):
    """Node lists of the strongly connected components with at least one cycle."""
    if g.m == 0:
        return []
    mat = np.zeros((g.m, g.m), dtype=bool)
    for e in g.edges:
        mat[e.i, e.j] = True
    ncomp, labels = connected_components(mat, directed=True, connection="strong")
    comps = [sorted(np.flatnonzero(labels == c).tolist()) for c in range(ncomp)]
    # no self-loops, so singletons carry no cycle
    comps = [c for c in comps if len(c) > 1]
    return sorted(comps, key=lambda c: c[0])


def enumerate_cycles(g, max_nodes=10):
    """Every simple cycle once, smallest node first, in deterministic DFS order.

    Meant as a brute-force oracle for small graphs.
    """
    if g.m > max_nodes:
        raise TooLarge(f"{g.m} nodes exceeds enumeration guard of {max_nodes}")
    succ = {v: sorted(e.j for e in g.edges if e.i == v) for v in range(g.m)}
    cycles = []
    for start in range(g.m):
        path = [start]
        on_path = {start}

        def dfs(v):
            for w in succ[v]:
                if w == start:
                    cycles.append(tuple(path))
                elif w > start and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    dfs(w)
                    path.pop()
                    on_path.discard(w)

        dfs(start)
    return cycles


def _extract_cycle(pred, v, n):
    # walk back n steps to be sure to sit on the cycle
    for _ in range(n):
        v = pred[v]
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    cycle.reverse()
    return canonical_cycle(cycle)


def _bellman_ford_positive(nodes, out, weight, slack):
    """Cycle of positive total ``weight`` among ``nodes`` or ``None`` (longest-path relaxation)."""
    dist = {v: 0.0 for v in nodes}
    pred = {v: None for v in nodes}
    n = len(nodes)
    for it in range(2 * n + 1):
        changed = []
        for u in nodes:
            du = dist[u]
            for e in out[u]:
                cand = du + weight(e)
                if cand > dist[e.j] + slack * (1.0 + abs(dist[e.j])):
                    dist[e.j] = cand
                    pred[e.j] = u
                    changed.append(e.j)
        if not changed:
            return None
        if it >= n - 1:
            for v in changed:
                try:
                    return _extract_cycle(pred, v, n)
                except (KeyError, TypeError):
                    continue
    return None


def positive_cycle_exists(g, lam, slack=1e-13):
    """A simple cycle with ``w_plus(C) - lam * w_minus(C) > 0``, or ``None``.

    Such a cycle exists exactly when ``lam`` is below the maximum cycle ratio.
    """
    scale = max([1.0] + [abs(e.w_plus) + abs(lam * e.w_minus) for e in g.edges])

    def weight(e):
        return e.w_plus - lam * e.w_minus

    for comp in strongly_connected_components(g):
        out = _out_edges(g, comp)
        cycle = _bellman_ford_positive(comp, out, weight, slack * scale)
        if cycle is not None:
            value = g.cycle_gain(cycle) - lam * g.cycle_loss(cycle)
            if value > 0:
                return cycle
    return None


def max_cycle_ratio(g, tol=1e-9):
    """Maximum of ``w_plus(C) / w_minus(C)`` over cycles, with a witness cycle.

    Bisection on ``lam`` with positive-cycle detection until the bracket is
    narrower than ``tol``, followed by cycle-improvement steps (re-test at the
    witness ratio until no better cycle exists), so the returned value is the
    exact ratio of the returned cycle.

    Returns ``None`` when the graph has no cycle.

    Raises
    ------
    NonPositiveLoss
        If some edge has ``w_minus <= 0``.
    """
    g.require_positive_loss()
    comps = strongly_connected_components(g)
    if not comps:
        return None
    on_cycle = {v for c in comps for v in c}
    ratios = [e.w_plus / e.w_minus for e in g.edges if e.i in on_cycle and e.j in on_cycle]
    # a cycle ratio is a mediant of its edge ratios
    lo, hi = min(ratios) - 1.0, max(ratios) + 1.0
    witness = positive_cycle_exists(g, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        cycle = positive_cycle_exists(g, mid)
        if cycle is None:
            hi = mid
        else:
            lo, witness = mid, cycle
    value = g.cycle_ratio(witness)
    while True:
        better = positive_cycle_exists(g, value)
        if better is None or g.cycle_ratio(better) <= value:
            break
        witness, value = better, g.cycle_ratio(better)
    return CycleCertificate(witness, value, RATIO)


def _karp_component(g, comp):
    """Maximum cycle mean inside one strongly connected component (Karp)."""
    index = {v: k for k, v in enumerate(comp)}
    n = len(comp)
    out = _out_edges(g, comp)
    D = np.full((n + 1, n), -np.inf)
    P = np.full((n + 1, n), -1, dtype=int)
    D[0, 0] = 0.0
    for k in range(1, n + 1):
        for u in comp:
            du = D[k - 1, index[u]]
            if du == -np.inf:
                continue
            for e in out[u]:
                j = index[e.j]
                if du + e.w_plus > D[k, j]:
                    D[k, j] = du + e.w_plus
                    P[k, j] = index[u]
    best_val, best_v = -np.inf, None
    for v in range(n):
        if D[n, v] == -np.inf:
            continue
        worst = min((D[n, v] - D[k, v]) / (n - k) for k in range(n) if D[k, v] > -np.inf)
        if worst > best_val:
            best_val, best_v = worst, v
    # the walk of length n realising D[n, best_v] contains a critical cycle
    walk = [best_v]
    for k in range(n, 0, -1):
        walk.append(P[k, walk[-1]])
    walk.reverse()
    cycles = []
    seen = {}
    stack = []
    for v in walk:
        if v in seen:
            start = seen[v]
            cyc = stack[start:]
            cycles.append(cyc)
            for u in cyc:
                del seen[u]
            del stack[start:]
        seen[v] = len(stack)
        stack.append(v)
    best = max((canonical_cycle([comp[u] for u in c]) for c in cycles),
               key=lambda c: (g.cycle_mean(c), [-x for x in c]))
    return best_val, best


def max_cycle_mean(g):
    """Maximum of ``w_plus(C) / |C|`` over cycles (Karp per strongly connected component).

    Returns ``None`` when the graph has no cycle.  ``value`` is the exact mean
    of the returned witness cycle.
    """
    best = None
    for comp in strongly_connected_components(g):
        _, cycle = _karp_component(g, comp)
        value = g.cycle_mean(cycle)
        if best is None or value > best.value:
            best = CycleCertificate(cycle, value, MEAN)
    return best


def best_by_enumeration(g, kind=RATIO, max_nodes=10):
    """Brute-force optimum over :func:`enumerate_cycles`; for tests and small graphs."""
    score = g.cycle_ratio if kind == RATIO else g.cycle_mean
    best = None
    for c in enumerate_cycles(g, max_nodes):
        v = score(c)
        if best is None or v > best.value:
            best = CycleCertificate(c, v, kind)
    return best

