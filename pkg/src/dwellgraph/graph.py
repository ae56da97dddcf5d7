"""Admissible-transition digraphs and the doubly weighted switching graph.

Nodes are 0-based subsystem indices.  An edge ``(i, j)`` carries a gain
``w_plus = ln ||basis_j^-1 basis_i||`` and a loss ``w_minus = -ln ||factor_i||``
(``-ln rho_i`` for a diagonal factor).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MixedFormsInvalid, NonPositiveLoss
from .numerics import JORDAN, spectral_norm

log = logging.getLogger(__name__)

__all__ = [
    "Adjacency",
    "Edge",
    "SwitchingGraph",
    "fully_connected",
    "ring",
    "build_graph",
    "basis_gamma",
]


@dataclass(frozen=True)
class Adjacency:
    """Set of admissible transitions ``(i, j)``, ``i != j``, among ``m`` subsystems."""

    m: int
    edges: tuple

    def __init__(self, m, edges=()):
        m = int(m)
        if m < 1:
            raise ValueError("adjacency needs at least one node")
        clean = set()
        for e in edges:
            i, j = (int(x) for x in e)
            if not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"edge {(i, j)} out of range for {m} nodes")
            if i == j:
                raise ValueError(f"self-loop {(i, j)} is not an admissible transition")
            clean.add((i, j))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    def successors(self, i):
        return [j for a, j in self.edges if a == i]

    def __contains__(self, edge):
        return tuple(edge) in set(self.edges)

    def __len__(self):
        return len(self.edges)


def fully_connected(m):
    """All ordered pairs ``(i, j)`` with ``i != j``."""
    return Adjacency(m, [(i, j) for i in range(m) for j in range(m) if i != j])


def ring(m, two_sided=False):
    """Ring ``0 -> 1 -> ... -> m-1 -> 0``, optionally with the reverse edges too."""
    if m < 2:
        raise ValueError("a ring needs at least two nodes")
    edges = [(k, (k + 1) % m) for k in range(m)]
    if two_sided:
        edges += [(j, i) for i, j in edges]
    return Adjacency(m, edges)


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    w_plus: float
    w_minus: float


@dataclass(frozen=True)
class SwitchingGraph:
    """Doubly weighted digraph on ``m`` nodes; edges sorted by ``(i, j)``."""

    m: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(sorted((e if isinstance(e, Edge) else Edge(*e) for e in self.edges),
                             key=lambda e: (e.i, e.j)))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_lookup", {(e.i, e.j): e for e in edges})

    @classmethod
    def from_weights(cls, m, weights):
        """Build from ``{(i, j): (w_plus, w_minus)}``."""
        return cls(m, tuple(Edge(i, j, float(a), float(b)) for (i, j), (a, b) in weights.items()))

    def edge(self, i, j):
        return self._lookup[(i, j)]

    def successors(self, i):
        return [e.j for e in self.edges if e.i == i]

    @property
    def adjacency(self):
        return Adjacency(self.m, [(e.i, e.j) for e in self.edges])

    def _closed(self, cycle):
        cycle = list(cycle)
        return [self._lookup[(a, b)] for a, b in zip(cycle, cycle[1:] + cycle[:1])]

    def cycle_gain(self, cycle):
        return math.fsum(e.w_plus for e in self._closed(cycle))

    def cycle_loss(self, cycle):
        return math.fsum(e.w_minus for e in self._closed(cycle))

    def cycle_ratio(self, cycle):
        return self.cycle_gain(cycle) / self.cycle_loss(cycle)

    def cycle_mean(self, cycle):
        return self.cycle_gain(cycle) / len(cycle)

    def require_positive_loss(self):
        bad = [(e.i, e.j) for e in self.edges if not e.w_minus > 0]
        if bad:
            raise NonPositiveLoss(f"edges with w_minus <= 0: {bad}")


def transition_gain(form_i, form_j):
    """``ln ||basis_j^-1 basis_i||`` in the spectral norm."""
    return math.log(spectral_norm(np.linalg.solve(form_j.basis, form_i.basis)))


def build_graph(forms, adj):
    """Weighted switching graph of ``forms`` restricted to the edges of ``adj``.

    Raises
    ------
    DimensionMismatch
        If forms differ in dimension or their count differs from ``adj.m``.
    MixedFormsInvalid
        If any Jordan-kind form has ``factor_norm >= 1``.
    """
    forms = list(forms)
    if len(forms) != adj.m:
        raise DimensionMismatch(f"{len(forms)} forms for an adjacency on {adj.m} nodes")
    if len({f.n for f in forms}) > 1:
        raise DimensionMismatch("subsystem forms have different dimensions")
    for k, f in enumerate(forms):
        if f.kind == JORDAN and not f.factor_norm < 1.0:
            raise MixedFormsInvalid(
                f"subsystem {k}: ||J_eps|| = {f.factor_norm:.6g} >= 1; pick a smaller epsilon"
            )
        if not 0.0 < f.factor_norm < 1.0:
            raise NonPositiveLoss(f"subsystem {k}: factor norm {f.factor_norm:.6g} outside (0, 1)")
    unit = [np.allclose(np.linalg.norm(f.basis, axis=0), 1.0, atol=1e-12) for f in forms]
    edges = []
    for i, j in adj.edges:
        w_plus = transition_gain(forms[i], forms[j])
        # only unit-column bases promise a nonnegative gain; ||V_j^-1 V_i|| = 1
        # (unitary transition) rounds to tiny negative values
        if unit[i] and unit[j] and w_plus < -1e-12:
            log.warning("negative gain %.3g on edge (%d, %d)", w_plus, i, j)
        edges.append(Edge(i, j, w_plus, -math.log(forms[i].factor_norm)))
    return SwitchingGraph(adj.m, tuple(edges))


def basis_gamma(forms):
    """``max_{i,j} ||basis_i|| ||basis_j^-1||``, the transient constant of the norm bound."""
    forms = list(forms)
    if not forms:
        return 1.0
    big = max(spectral_norm(f.basis) for f in forms)
    inv = max(spectral_norm(f.basis_inv()) for f in forms)
    return big * inv
