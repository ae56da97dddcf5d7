"""Dwell-time certificates from cycle optima of the switching graph.

Minimum dwell time: ``tau > nu(G)``, the maximum cycle ratio, using
eigenvector (non-defective) or epsilon-Jordan (defective) weights.  Average
dwell time: ``tau > mu(G) / (-ln r)`` with ``mu`` the maximum cycle mean of
the gains and ``r`` the largest spectral radius (or largest ``||J_eps||``).
Two-mode systems have a single cycle, so the bound reduces to a condition
number which can be shrunk by rescaling the eigenvectors.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .cycles import max_cycle_mean, max_cycle_ratio
from .errors import (Defective, EpsilonSearchFailed, MixedFormsInvalid, NotSchurStable,
                     Singular)
from .graph import Adjacency, basis_gamma, build_graph, fully_connected
from .numerics import (JORDAN, ModalForm, choose_epsilon, condition_number,
                       eigendecompose, jordan_decompose, perron_root, spectral_norm,
                       spectral_radius)

__all__ = [
    "DwellReport",
    "integer_dwell",
    "nondefective_forms",
    "jordan_forms",
    "min_dwell_nondefective",
    "min_dwell_defective",
    "avg_dwell",
    "equilibrate_condition",
    "bimodal_min_dwell_corollary1",
    "bimodal_min_dwell_corollary2",
    "bimodal_min_dwell_pnorm",
    "bimodal_avg_dwell",
    "analyze",
]

MINIMUM = "minimum"
AVERAGE = "average"

METHODS = ("theorem1", "theorem2", "corollary1", "corollary2", "pnorm_bimodal",
           "theorem3", "theorem3_defective", "average_bimodal")

# entries of |S||S^-1| below this fraction of its maximum are taken as structural zeros
BAUER_DROP_TOL = 1e-12
# entries of S, S^-1 within this multiple of their estimated rounding error likewise
BAUER_NOISE_FACTOR = 10.0
_UNIT = np.finfo(float).eps


def integer_dwell(bound):
    """Smallest integer strictly greater than ``bound``, and at least 1."""
    return max(1, math.floor(bound) + 1)


@dataclass
class DwellReport:
    mode: str
    method: str
    bound_real: float
    tau_int: int = field(init=False)
    critical_cycle: tuple = None
    rho_max: float = None
    j_max_norm: float = None
    gamma: float = 1.0
    scaling: tuple = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.bound_real = float(self.bound_real)
        self.tau_int = integer_dwell(self.bound_real)

    def to_dict(self):
        out = {
            "mode": self.mode,
            "method": self.method,
            "bound_real": self.bound_real,
            "tau_int": self.tau_int,
            "critical_cycle": None if self.critical_cycle is None else list(self.critical_cycle),
            "rho_max": self.rho_max,
            "j_max_norm": self.j_max_norm,
            "gamma": self.gamma,
            "scaling": None,
            "diagnostics": dict(self.diagnostics),
        }
        if self.scaling is not None:
            d_left, d_right = self.scaling
            out["scaling"] = {"D_left": np.real(np.diag(d_left)).tolist(),
                              "D_right": np.real(np.diag(d_right)).tolist()}
        return out


def _stable(matrices):
    out = []
    for k, A in enumerate(matrices):
        A = np.asarray(A, dtype=float)
        rho = spectral_radius(A)
        if rho >= 1.0:
            raise NotSchurStable(f"subsystem {k} has spectral radius {rho:.12g} >= 1",
                                 index=k, spectral_radius=rho)
        out.append(A)
    return out


def nondefective_forms(matrices, tol=1e-9):
    """Eigen-decompose every subsystem; raises ``Defective`` on the first failure."""
    forms = []
    for k, A in enumerate(_stable(matrices)):
        try:
            forms.append(eigendecompose(A, tol))
        except Defective as err:
            raise Defective(f"subsystem {k}: {err}") from err
    return forms


def jordan_forms(matrices, eps=None, tol=1e-9):
    """Epsilon-Jordan forms; ``eps`` is None (per-subsystem default), a scalar or a sequence."""
    matrices = _stable(matrices)
    if eps is None or np.isscalar(eps):
        eps = [eps] * len(matrices)
    return [jordan_decompose(A, e, tol) for A, e in zip(matrices, eps)]


def _no_cycle_note(cert):
    return {} if cert is not None else {"acyclic": "finitely many switchings along any walk"}


def _ratio_report(forms, adj, method, tol):
    g = build_graph(forms, adj)
    cert = max_cycle_ratio(g, tol)
    norms = [f.factor_norm for f in forms]
    return DwellReport(
        MINIMUM, method,
        0.0 if cert is None else cert.value,
        critical_cycle=None if cert is None else cert.cycle,
        rho_max=max(f.spectral_radius for f in forms),
        j_max_norm=max(norms) if method == "theorem2" else None,
        gamma=basis_gamma(forms),
        diagnostics=_no_cycle_note(cert),
    )


def min_dwell_nondefective(forms, adj, tol=1e-9):
    """Minimum dwell bound ``nu(G)`` for non-defective subsystems."""
    forms = list(forms)
    if any(f.kind == JORDAN for f in forms):
        raise ValueError("min_dwell_nondefective needs eigen-decomposition forms")
    return _ratio_report(forms, adj, "theorem1", tol)


def _epsilon_grid(matrices, k, tol):
    return [2.0 * choose_epsilon(A, tol) * 2.0 ** (-k) for A in matrices]


def min_dwell_defective(matrices, adj, eps=None, tol=1e-9, search=False):
    """Minimum dwell bound from epsilon-Jordan weights.

    ``eps`` is None (``(1 - rho_i) / 2`` per subsystem), a scalar, or one
    value per subsystem.  With ``search=True`` the grid
    ``eps_i = (1 - rho_i) 2^-k``, ``k = 1..10`` (shared ``k``) is scanned and
    the smallest bound kept.

    Raises
    ------
    EpsilonSearchFailed
        If no candidate makes every ``||J_eps|| < 1``.
    """
    matrices = _stable(matrices)
    candidates = [_epsilon_grid(matrices, k, tol) for k in range(1, 11)] if search else [eps]
    best = None
    for cand in candidates:
        try:
            forms = jordan_forms(matrices, cand, tol)
            report = _ratio_report(forms, adj, "theorem2", tol)
        except MixedFormsInvalid:
            continue
        report.diagnostics["epsilon"] = [f.epsilon for f in forms]
        report.diagnostics["factor_norms"] = [f.factor_norm for f in forms]
        if best is None or report.bound_real < best.bound_real:
            best = report
    if best is None:
        raise EpsilonSearchFailed("no epsilon candidate gives ||J_eps|| < 1 for all subsystems")
    return best


def avg_dwell(forms_or_matrices, adj, eps=None, tol=1e-9):
    """Average dwell bound ``mu(G) / (-ln r)``.

    Accepts modal forms or raw matrices; raw matrices are eigen-decomposed,
    falling back to epsilon-Jordan forms for all subsystems if any is
    defective.  ``r`` is the largest factor norm (spectral radius for
    non-defective forms).
    """
    items = list(forms_or_matrices)
    if items and all(isinstance(f, ModalForm) for f in items):
        forms = items
    else:
        try:
            forms = nondefective_forms(items, tol)
        except Defective:
            forms = jordan_forms(items, eps, tol)
    defective = any(f.kind == JORDAN for f in forms)
    g = build_graph(forms, adj)
    cert = max_cycle_mean(g)
    r = max(f.factor_norm for f in forms)
    mu = 0.0 if cert is None else cert.value
    report = DwellReport(
        AVERAGE, "theorem3_defective" if defective else "theorem3",
        mu / -math.log(r),
        critical_cycle=None if cert is None else cert.cycle,
        rho_max=max(f.spectral_radius for f in forms),
        j_max_norm=r if defective else None,
        gamma=basis_gamma(forms),
        diagnostics={"cycle_mean": mu, **_no_cycle_note(cert)},
    )
    if defective:
        report.diagnostics["epsilon"] = [f.epsilon for f in forms]
    return report


def equilibrate_condition(S, max_iters=1000, rel_tol=1e-10):
    """Two-sided diagonal scaling that lowers the spectral condition number of ``S``.

    Alternately scales columns and then rows to unit Euclidean norm and keeps
    the best iterate seen (the unscaled matrix included).

    Returns
    -------
    D_left, D_right : ndarray
        Positive diagonal matrices.
    kappa_min : float
        ``cond(D_left @ S @ D_right)``.
    """
    S = np.asarray(S)
    kappa = condition_number(S)
    n = S.shape[0]
    dl, dr = np.ones(n), np.ones(n)
    best = (kappa, dl.copy(), dr.copy())
    prev = kappa
    for _ in range(max_iters):
        M = S * dl[:, None] * dr[None, :]
        dr = dr / np.linalg.norm(M, axis=0)
        M = S * dl[:, None] * dr[None, :]
        dl = dl / np.linalg.norm(M, axis=1)
        # scalings are only defined up to a global factor
        g = math.exp(np.mean(np.log(dl)))
        dl, dr = dl / g, dr * g
        kappa = condition_number(S * dl[:, None] * dr[None, :])
        if kappa < best[0]:
            best = (kappa, dl.copy(), dr.copy())
        if abs(prev - kappa) <= rel_tol * kappa:
            break
        prev = kappa
    kappa, dl, dr = best
    return np.diag(dl), np.diag(dr), float(kappa)


@dataclass
class _Bimodal:
    forms: tuple
    S: np.ndarray
    rho: tuple
    norms: tuple

    @property
    def loss(self):
        return -math.log(self.rho[0] * self.rho[1])

    @property
    def rho_max(self):
        return max(self.rho)


def _bimodal(A1, A2, tol=1e-9):
    f1, f2 = nondefective_forms([A1, A2], tol)
    S = np.linalg.solve(f2.basis, f1.basis)
    return _Bimodal((f1, f2), S, (f1.spectral_radius, f2.spectral_radius),
                    (spectral_norm(A1), spectral_norm(A2)))


def _eigenvector_noise(form, a_norm):
    """Entrywise first-order rounding error of the computed eigenvector matrix.

    Perturbing ``A`` by ``u ||A||`` moves eigenvector ``k`` along eigenvector
    ``j`` by about ``u ||A|| ||w_j|| / |lam_k - lam_j|`` (``w_j`` the left
    eigenvector with ``w_j v_j = 1``).  Directions inside one eigenspace are
    free and carry no error.
    """
    V, W, lam = form.basis, form.basis_inv(), form.eigenvalues
    gap = np.abs(lam[:, None] - lam[None, :])
    coupling = np.zeros_like(gap)
    mask = gap > 0
    w_norms = np.linalg.norm(W, axis=1)
    coupling[mask] = (_UNIT * a_norm * w_norms[:, None] * np.ones_like(gap))[mask] / gap[mask]
    return np.abs(V) @ coupling + _UNIT * np.abs(V)


def _bauer_kappa(b):
    """``rho(|S| |S^-1|)``, the minimum 1- or infinity-norm condition number of
    ``S`` over diagonal scalings.

    The value is not Lipschitz at (permuted) triangular ``S``: rounding noise
    ``d`` in a structural zero moves it by about ``d ** (1/k)``.  Entries of
    ``S`` and ``S^-1`` below ``BAUER_NOISE_FACTOR`` times their estimated
    rounding error are therefore treated as zeros.  ``rho >= 1`` always holds
    since ``rho(|S||S^-1|) >= rho(S S^-1)``.
    """
    (f1, f2), S = b.forms, b.S
    S_inv = np.linalg.inv(S)
    W1, W2 = f1.basis_inv(), f2.basis_inv()
    E1 = _eigenvector_noise(f1, b.norms[0])
    E2 = _eigenvector_noise(f2, b.norms[1])
    # S = W2 V1 and S^-1 = W1 V2, to first order
    noise_S = np.abs(W2) @ E1 + np.abs(W2) @ E2 @ np.abs(S)
    noise_S_inv = np.abs(W1) @ E2 + np.abs(W1) @ E1 @ np.abs(S_inv)
    abs_S = np.where(np.abs(S) <= BAUER_NOISE_FACTOR * noise_S, 0.0, np.abs(S))
    abs_S_inv = np.where(np.abs(S_inv) <= BAUER_NOISE_FACTOR * noise_S_inv, 0.0,
                         np.abs(S_inv))
    return max(1.0, perron_root(abs_S @ abs_S_inv, BAUER_DROP_TOL))


def _norm_label(p):
    kind = {1: "1", "1": "1", np.inf: "inf", "inf": "inf"}.get(p, "spectral")
    return kind


def bimodal_min_dwell_corollary1(A1, A2, max_iters=1000, rel_tol=1e-10, tol=1e-9):
    """Two-mode minimum dwell bound with equilibrated eigenvector scaling.

    ``ln min kappa(D_L S D_R) / (-ln(rho_1 rho_2))`` with ``S = V_2^-1 V_1``;
    the minimum is approximated by :func:`equilibrate_condition`.
    """
    b = _bimodal(A1, A2, tol)
    d_left, d_right, kappa = equilibrate_condition(b.S, max_iters, rel_tol)
    f1, f2 = b.forms
    scaled = (f1.with_basis(f1.basis @ d_right),
              f2.with_basis(f2.basis @ np.linalg.inv(d_left)))
    return DwellReport(
        MINIMUM, "corollary1", math.log(kappa) / b.loss,
        critical_cycle=(0, 1), rho_max=b.rho_max, gamma=basis_gamma(scaled),
        scaling=(d_left, d_right),
        diagnostics={"kappa_unscaled": condition_number(b.S), "kappa_scaled": kappa},
    )


def bimodal_min_dwell_corollary2(A1, A2, p="inf", tol=1e-9):
    """Two-mode minimum dwell bound ``ln rho(|S||S^-1|) / (-ln(rho_1 rho_2))``.

    ``rho(|S||S^-1|)`` is the exact minimum of the 1- or infinity-norm
    condition number over diagonal row and column scalings, so ``p`` only
    labels the report.
    """
    b = _bimodal(A1, A2, tol)
    k = _bauer_kappa(b)
    return DwellReport(
        MINIMUM, "corollary2", math.log(k) / b.loss,
        critical_cycle=(0, 1), rho_max=b.rho_max, gamma=basis_gamma(b.forms),
        diagnostics={"norm": _norm_label(p), "kappa_min": k},
    )


def bimodal_min_dwell_pnorm(A1, A2, p="inf", tol=1e-9):
    """Two-mode minimum dwell bound with the unscaled p-norm condition number of ``S``."""
    b = _bimodal(A1, A2, tol)
    k = condition_number(b.S, p)
    return DwellReport(
        MINIMUM, "pnorm_bimodal", math.log(k) / b.loss,
        critical_cycle=(0, 1), rho_max=b.rho_max, gamma=basis_gamma(b.forms),
        diagnostics={"norm": _norm_label(p), "kappa": k},
    )


def bimodal_avg_dwell(A1, A2, p="spectral", scaled=False, tol=1e-9):
    """Two-mode average dwell bound ``ln K / (-2 ln rho_max)``.

    ``K`` is the condition number of ``S = V_2^-1 V_1`` in the chosen norm, or
    its minimum over diagonal scalings when ``scaled`` (Bauer's formula for
    p in {1, inf}, equilibration for the spectral norm).
    """
    b = _bimodal(A1, A2, tol)
    label = _norm_label(p)
    scaling = None
    if not scaled:
        k = condition_number(b.S, label)
    elif label == "spectral":
        d_left, d_right, k = equilibrate_condition(b.S)
        scaling = (d_left, d_right)
    else:
        k = _bauer_kappa(b)
    return DwellReport(
        AVERAGE, "average_bimodal", math.log(k) / (-2.0 * math.log(b.rho_max)),
        critical_cycle=(0, 1), rho_max=b.rho_max, gamma=basis_gamma(b.forms),
        scaling=scaling, diagnostics={"norm": label, "scaled": bool(scaled), "kappa": k},
    )


def _best(reports):
    if not reports:
        return None
    return min(reports, key=lambda r: (r.tau_int, r.bound_real, METHODS.index(r.method)))


def analyze(matrices, adj=None, mode="all", eps=None, eps_search=False, norm=None, tol=1e-9):
    """Run every applicable method and pick the smallest integer dwell per mode.

    Returns a dict with keys ``"forms"`` (modal forms used by the graph
    methods), ``"graph"``, ``"minimum"`` / ``"average"`` (lists of
    :class:`DwellReport`) and ``"winner"`` (``{mode: report}``).
    ``norm`` restricts the p-norm two-mode methods to one norm; by default
    both 1 and infinity are run.

    Raises
    ------
    NotSchurStable
        Naming the first unstable subsystem.
    """
    matrices = _stable(matrices)
    adj = fully_connected(len(matrices)) if adj is None else adj
    if not isinstance(adj, Adjacency):
        raise TypeError("adj must be an Adjacency")
    try:
        forms = nondefective_forms(matrices, tol)
        defective = False
    except Defective:
        forms = jordan_forms(matrices, eps, tol)
        defective = True

    want_min = mode in ("all", "min", MINIMUM)
    want_avg = mode in ("all", "avg", AVERAGE)
    pnorms = ["1", "inf"] if norm in (None, "spectral") else [_norm_label(norm)]
    bimodal = len(matrices) == 2 and not defective and len(adj) == 2
    out = {"forms": forms, "graph": build_graph(forms, adj), "minimum": [], "average": []}

    if want_min:
        if defective:
            out["minimum"].append(min_dwell_defective(matrices, adj, eps, tol, search=eps_search))
        else:
            out["minimum"].append(min_dwell_nondefective(forms, adj, tol))
        if bimodal:
            A1, A2 = matrices
            try:
                out["minimum"].append(bimodal_min_dwell_corollary1(A1, A2, tol=tol))
            except Singular:
                pass
            for p in pnorms:
                out["minimum"].append(bimodal_min_dwell_corollary2(A1, A2, p, tol))
                out["minimum"].append(bimodal_min_dwell_pnorm(A1, A2, p, tol))
    if want_avg:
        out["average"].append(avg_dwell(forms, adj, eps, tol))
        if bimodal:
            A1, A2 = matrices
            for p in ["spectral"] + pnorms:
                for scaled in (False, True):
                    out["average"].append(bimodal_avg_dwell(A1, A2, p, scaled, tol))
    out["winner"] = {m: _best(out[m]) for m in (MINIMUM, AVERAGE) if out[m]}
    return out
