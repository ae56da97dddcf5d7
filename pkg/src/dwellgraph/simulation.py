"""Switching signals, trajectories and Monte-Carlo checks of dwell certificates.

A signal is a list of switching instants ``t_0 = 0 < t_1 < ...`` with the
mode active on ``{t_k, ..., t_(k+1) - 1}``; consecutive modes must be an edge
of the governing adjacency.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SignalNotAdmissible
from .graph import basis_gamma, transition_gain

__all__ = [
    "SwitchingSignal",
    "Trajectory",
    "BoundCheck",
    "DecayStats",
    "validate_signal",
    "generate_signal",
    "cycle_signal",
    "simulate",
    "verify_bound",
    "empirical_decay",
]

MIN_DWELL = "min_dwell"
AVG_DWELL = "avg_dwell"


@dataclass(frozen=True)
class SwitchingSignal:
    switch_times: tuple
    modes: tuple
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "switch_times", tuple(int(t) for t in self.switch_times))
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if len(self.switch_times) != len(self.modes) or not self.modes:
            raise ValueError("need one mode per switching instant, and at least one")
        if self.switch_times[0] != 0:
            raise ValueError("first switching instant must be 0")

    @property
    def n_switches(self):
        return len(self.modes) - 1

    def mode_sequence(self, T=None):
        """Active mode at each ``t = 0 .. T-1``."""
        T = self.horizon if T is None else T
        seq = np.empty(T, dtype=int)
        bounds = list(self.switch_times[1:]) + [T]
        for start, stop, m in zip(self.switch_times, bounds, self.modes):
            seq[min(start, T):min(stop, T)] = m
        return seq

    def switch_count(self, t):
        """Number of switchings at instants ``<= t``."""
        return sum(1 for s in self.switch_times[1:] if s <= t)


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    norms: np.ndarray


@dataclass(frozen=True)
class BoundCheck:
    margins: np.ndarray
    violations: int
    gamma: float
    alpha: np.ndarray

    @property
    def ok(self):
        return self.violations == 0


@dataclass(frozen=True)
class DecayStats:
    max_ratio: float
    final_ratios: np.ndarray
    peak_amplification: np.ndarray
    violations: int
    trials: int
    seed: int

    def to_dict(self):
        return {
            "trials": self.trials,
            "seed": self.seed,
            "max_final_ratio": float(self.max_ratio),
            "max_peak_amplification": float(self.peak_amplification.max()),
            "mean_final_ratio": float(self.final_ratios.mean()),
            "bound_violations": int(self.violations),
        }


def validate_signal(signal, adj, tau=None, mode=MIN_DWELL, n0=0):
    """Re-check a signal against the graph and dwell constraints.

    Raises
    ------
    SignalNotAdmissible
    """
    times, modes = signal.switch_times, signal.modes
    if any(b <= a for a, b in zip(times, times[1:])):
        raise SignalNotAdmissible("switching instants must be strictly increasing")
    if any(not 0 <= m < adj.m for m in modes):
        raise SignalNotAdmissible("mode index out of range")
    edges = set(adj.edges)
    for a, b in zip(modes, modes[1:]):
        if (a, b) not in edges:
            raise SignalNotAdmissible(f"transition {a}->{b} is not an edge")
    if tau is None:
        return
    if mode == MIN_DWELL:
        gaps = np.diff(times)
        if gaps.size and gaps.min() < tau:
            raise SignalNotAdmissible(f"dwell {gaps.min()} shorter than {tau}")
    elif mode == AVG_DWELL:
        for k, t in enumerate(times[1:], start=1):
            # the count only jumps at switching instants
            if k > n0 + t / tau:
                raise SignalNotAdmissible(f"{k} switchings by t={t} exceeds {n0} + t/{tau}")
    else:
        raise ValueError(f"unknown mode {mode!r}")


def _as_rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def generate_signal(adj, mode=MIN_DWELL, tau=1, n0=0, horizon=100, seed=None,
                    switch_prob=1.0):
    """Random admissible switching signal over ``0 .. horizon-1``.

    ``min_dwell``: dwells drawn uniformly from ``{tau, ..., 3 tau}``.
    ``avg_dwell``: at each step switch (with probability ``switch_prob``)
    whenever doing so keeps ``N(t) <= n0 + t / tau``.  Successors are chosen
    uniformly; the start node uniformly among nodes with an outgoing edge.
    """
    rng = _as_rng(seed)
    succ = {i: adj.successors(i) for i in range(adj.m)}
    starts = [i for i in range(adj.m) if succ[i]]
    if not starts:
        return SwitchingSignal((0,), (int(rng.integers(adj.m)),), horizon)
    current = int(starts[rng.integers(len(starts))])
    times, modes = [0], [current]
    if mode == MIN_DWELL:
        t = 0
        while succ[current]:
            t += int(rng.integers(tau, 3 * tau + 1))
            if t >= horizon:
                break
            current = int(succ[current][rng.integers(len(succ[current]))])
            times.append(t)
            modes.append(current)
    elif mode == AVG_DWELL:
        count = 0
        for t in range(1, horizon):
            if not succ[current] or count + 1 > n0 + t / tau:
                continue
            if switch_prob < 1.0 and rng.random() >= switch_prob:
                continue
            current = int(succ[current][rng.integers(len(succ[current]))])
            times.append(t)
            modes.append(current)
            count += 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SwitchingSignal(tuple(times), tuple(modes), horizon)


def cycle_signal(cycle, tau, horizon):
    """Dwell exactly ``tau`` on each node of ``cycle``, looping: the harshest signal a
    minimum dwell certificate covers."""
    cycle = list(cycle)
    times = list(range(0, horizon, tau))
    modes = [cycle[k % len(cycle)] for k in range(len(times))]
    return SwitchingSignal(tuple(times), tuple(modes), horizon)


def simulate(matrices, signal, x0, T=None):
    """Iterate ``x(t+1) = A_sigma(t) x(t)`` for ``t = 0 .. T-1``."""
    mats = [np.asarray(A) for A in matrices]
    x = np.asarray(x0)
    n = x.shape[0]
    if any(A.shape != (n, n) for A in mats):
        raise DimensionMismatch("state and subsystem dimensions disagree")
    T = signal.horizon if T is None else int(T)
    if T < 0:
        raise ValueError("T must be non-negative")
    seq = signal.mode_sequence(T)
    states = np.empty((T + 1, n), dtype=np.result_type(x, *mats))
    states[0] = x
    for t in range(T):
        states[t + 1] = mats[seq[t]] @ states[t]
    return Trajectory(states, np.linalg.norm(states, axis=1))


def _alpha(forms, modes, tau, gains=None):
    """Running exponent ``alpha(n)`` of the norm bound, for n = 0 .. len(modes)-1."""
    alpha = np.zeros(len(modes))
    for k in range(1, len(modes)):
        a, b = modes[k - 1], modes[k]
        gain = gains[(a, b)] if gains is not None else transition_gain(forms[a], forms[b])
        alpha[k] = alpha[k - 1] + gain + tau * math.log(forms[a].factor_norm)
    return alpha


def _gain_table(forms, modes):
    pairs = set(zip(modes, modes[1:]))
    return {(a, b): transition_gain(forms[a], forms[b]) for a, b in pairs}


def _check_norms(norms, signal, alpha, gamma, x0_norm, tol=1e-9):
    T = len(norms) - 1
    bounds = list(signal.switch_times[1:]) + [T + 1]
    margins = []
    for n, (start, stop) in enumerate(zip(signal.switch_times, bounds)):
        if start > T:
            break
        seg = norms[start:min(stop, T + 1)]
        margins.append(gamma * math.exp(alpha[n]) * x0_norm + tol - seg.max())
    margins = np.asarray(margins)
    return margins, int(np.sum(margins < 0))


def verify_bound(forms, signal, trajectory, tau, gamma=None):
    """Check ``||x(t)|| <= gamma exp(alpha(n)) ||x(0)||`` on every dwell interval.

    ``alpha(n)`` sums, over the first ``n`` transitions ``i -> j``, the gain
    ``ln ||basis_j^-1 basis_i||`` plus ``tau ln ||factor_i||``; ``gamma`` is
    ``max ||basis_i|| ||basis_j^-1||``.  Returns per-interval margins (bound
    minus worst norm on the interval, with ``1e-9`` slack).

    Raises
    ------
    SignalNotAdmissible
        If some completed dwell is shorter than ``tau``.
    """
    gaps = np.diff(signal.switch_times)
    if gaps.size and gaps.min() < tau:
        raise SignalNotAdmissible(f"dwell {gaps.min()} shorter than {tau}")
    if any(b == a for a, b in zip(signal.modes, signal.modes[1:])):
        raise SignalNotAdmissible("consecutive modes must differ")
    gamma = basis_gamma(forms) if gamma is None else gamma
    alpha = _alpha(forms, signal.modes, tau, _gain_table(forms, signal.modes))
    margins, violations = _check_norms(trajectory.norms, signal, alpha, gamma,
                                       trajectory.norms[0])
    return BoundCheck(margins, violations, gamma, alpha)


def _initial_states(n, trials, rng):
    x0 = rng.standard_normal((trials, n))
    x0 /= np.linalg.norm(x0, axis=1, keepdims=True)
    k = min(n, trials)
    x0[:k] = np.eye(n)[:k]
    return x0


def empirical_decay(matrices, adj, tau, trials=100, horizon=None, seed=0, mode=MIN_DWELL,
                    n0=0, forms=None, adversarial_cycle=None):
    """Simulate random admissible signals from unit initial states.

    Trial ``k`` uses its own generator spawned from ``seed``.  The first ``n``
    initial states are the coordinate axes, the rest uniform on the sphere.
    When ``forms`` is given (minimum dwell mode only), every trajectory is
    also checked with :func:`verify_bound`.  ``adversarial_cycle`` replaces
    the random signals by :func:`cycle_signal` on that cycle.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mats = np.asarray([np.asarray(A, dtype=float) for A in matrices])
    n = mats.shape[1]
    horizon = 100 * tau if horizon is None else int(horizon)
    children = np.random.SeedSequence(seed).spawn(trials + 1)
    x0 = _initial_states(n, trials, np.random.default_rng(children[0]))

    signals = []
    for k in range(trials):
        if adversarial_cycle is not None:
            sig = cycle_signal(adversarial_cycle, tau, horizon)
        else:
            sig = generate_signal(adj, mode, tau, n0, horizon, np.random.default_rng(children[k + 1]))
        validate_signal(sig, adj, tau, mode, n0)
        signals.append(sig)

    seqs = np.stack([s.mode_sequence(horizon) for s in signals])
    X = x0.copy()
    norms = np.empty((trials, horizon + 1))
    norms[:, 0] = 1.0
    for t in range(horizon):
        X = np.einsum("kij,kj->ki", mats[seqs[:, t]], X)
        norms[:, t + 1] = np.linalg.norm(X, axis=1)

    violations = 0
    if forms is not None and mode == MIN_DWELL:
        gamma = basis_gamma(forms)
        gains = {}
        for sig, row in zip(signals, norms):
            for pair in set(zip(sig.modes, sig.modes[1:])) - gains.keys():
                gains[pair] = transition_gain(forms[pair[0]], forms[pair[1]])
            alpha = _alpha(forms, sig.modes, tau, gains)
            violations += _check_norms(row, sig, alpha, gamma, 1.0)[1]

    final = norms[:, -1]
    return DecayStats(float(final.max()), final, norms.max(axis=1), violations, trials,
                      seed if isinstance(seed, int) else -1)
