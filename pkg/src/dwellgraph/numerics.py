"""Dense matrix primitives over real and complex scalars.

Everything here works on small dense ``numpy`` arrays (desk-scale systems,
``n`` up to about ten).  Eigen computations always run in complex arithmetic,
since complex-conjugate eigenvalue pairs make complex bases unavoidable.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ChainFailure, Defective, NotSchurStable, Singular

__all__ = [
    "NONDEFECTIVE",
    "JORDAN",
    "ModalForm",
    "spectral_norm",
    "spectral_radius",
    "p_norm",
    "condition_number",
    "abs_entrywise",
    "eigenvalue_clusters",
    "eigendecompose",
    "jordan_decompose",
    "choose_epsilon",
    "perron_root",
]

NONDEFECTIVE = "nondefective"
JORDAN = "jordan"

# smallest/largest singular value ratio below which a matrix counts as singular
BREAKDOWN = 1e-13
RECONSTRUCTION_TOL = 1e-8
_UNIT = np.finfo(float).eps


def _square(M, name="matrix", dtype=None):
    arr = np.asarray(M, dtype=dtype)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def _norm_kind(norm):
    if norm in ("spectral", 2, "2"):
        return "spectral"
    if norm in (1, "1"):
        return "1"
    if norm in (np.inf, "inf", "Inf", "infinity"):
        return "inf"
    raise ValueError(f"unsupported norm {norm!r}; use 'spectral', 1 or 'inf'")


def spectral_norm(M):
    """Largest singular value of ``M``."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def spectral_radius(M):
    """Largest eigenvalue modulus of a square matrix."""
    M = _square(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def p_norm(M, p):
    """Induced 1-norm (max column sum) or infinity-norm (max row sum)."""
    kind = _norm_kind(p)
    A = np.abs(np.asarray(M))
    if A.size == 0:
        return 0.0
    if kind == "1":
        return float(A.sum(axis=0).max())
    if kind == "inf":
        return float(A.sum(axis=1).max())
    raise ValueError("p_norm takes p in {1, 'inf'}; use spectral_norm for p=2")


def matrix_norm(M, norm="spectral"):
    """Dispatch to :func:`spectral_norm` or :func:`p_norm`."""
    kind = _norm_kind(norm)
    return spectral_norm(M) if kind == "spectral" else p_norm(M, kind)


def condition_number(M, norm="spectral"):
    """``||M|| * ||M^-1||`` in the chosen norm.

    Raises
    ------
    Singular
        If the smallest singular value is below ``BREAKDOWN`` times the largest.
    """
    kind = _norm_kind(norm)
    M = _square(M)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0 or s[-1] <= BREAKDOWN * s[0]:
        raise Singular("matrix is singular to working precision")
    if kind == "spectral":
        return float(s[0] / s[-1])
    return p_norm(M, kind) * p_norm(np.linalg.inv(M), kind)


def abs_entrywise(M):
    """Entrywise modulus ``|M|``."""
    return np.abs(np.asarray(M))


def perron_root(M, drop_tol=0.0):
    """Spectral radius of an entrywise nonnegative matrix.

    Computed block-wise over the irreducible components of the sparsity
    pattern, which is exact for nonnegative matrices and avoids the root-type
    sensitivity of reducible (e.g. triangular) matrices to rounding noise.
    Entries at or below ``drop_tol * max(M)`` are treated as structural zeros.
    """
    from scipy.sparse.csgraph import connected_components

    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    if np.any(M < 0):
        raise ValueError("perron_root expects a nonnegative matrix")
    pattern = M > drop_tol * M.max()
    ncomp, labels = connected_components(pattern, directed=True, connection="strong")
    rho = 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        block = np.where(pattern, M, 0.0)[np.ix_(idx, idx)]
        rho = max(rho, float(np.max(np.abs(np.linalg.eigvals(block)))))
    return rho


@dataclass(frozen=True, eq=False)
class ModalForm:
    """Decomposition ``A = basis @ factor @ inv(basis)`` of one subsystem.

    ``kind`` is :data:`NONDEFECTIVE` (``factor`` diagonal, ``basis`` made of
    unit-norm eigenvectors) or :data:`JORDAN` (``factor`` is the Jordan form
    with ``epsilon`` on the superdiagonal of every chain, ``basis`` the
    correspondingly scaled generalized eigenvectors).  ``chains`` lists the
    Jordan chain lengths in column order.
    """

    kind: str
    basis: np.ndarray
    factor: np.ndarray
    spectral_radius: float
    factor_norm: float
    epsilon: float = 0.0
    chains: tuple = ()

    @property
    def n(self):
        return self.basis.shape[0]

    @property
    def eigenvalues(self):
        return np.diag(self.factor).copy()

    @property
    def is_defective(self):
        return any(length > 1 for length in self.chains)

    def basis_inv(self):
        return np.linalg.inv(self.basis)

    def reconstruct(self):
        return self.basis @ self.factor @ np.linalg.inv(self.basis)

    def reconstruction_error(self, A):
        return spectral_norm(self.reconstruct() - np.asarray(A))

    def with_basis(self, basis):
        """Same form with ``basis`` replaced (e.g. columns rescaled)."""
        return replace(self, basis=np.asarray(basis, dtype=complex))


def _cluster_threshold(size, scale, rho):
    # perturbing a size-m Jordan block by u spreads its eigenvalues by ~u**(1/m)
    floor = 1e-7 * max(1.0, rho)
    return max(floor, 10.0 * (_UNIT * scale) ** (1.0 / size))


def _candidate_groups(w, scale, rho, alive):
    """Groups of nearest neighbours whose radius passes the size-dependent test."""
    alive = list(alive)
    out = []
    for i in alive:
        order = sorted(alive, key=lambda k: (abs(w[k] - w[i]), k))
        for m in range(2, len(alive) + 1):
            members = tuple(sorted(order[:m]))
            vals = w[list(members)]
            score = float(np.max(np.abs(vals - vals.mean()))) / _cluster_threshold(m, scale, rho)
            if score <= 1.0:
                out.append((-m, score, members))
    out = sorted(set(out))
    return [(members, score) for _, score, members in out]


def _modal_blocks(A, tol):
    """Split the spectrum of ``A`` into clusters with their eigenvector chains.

    Returns ``(w, blocks)`` where ``blocks`` is a list of
    ``(centroid, indices, chains)`` and each chain is a list of column vectors
    ``[p_0, p_1, ...]`` with ``(A - centroid) p_k = p_(k-1)``.  Larger groups
    are tried first; a group is kept only if its chains reproduce ``A`` on
    their span.
    """
    n = len(A)
    Ac = A.astype(complex)
    w, V = np.linalg.eig(Ac)
    scale = max(1.0, spectral_norm(A))
    rho = float(np.max(np.abs(w))) if n else 0.0
    alive = set(range(n))
    blocks = []
    progress = True
    while progress and len(alive) > 1:
        progress = False
        for members, _ in _candidate_groups(w, scale, rho, alive):
            centroid = complex(w[list(members)].mean())
            try:
                chains = _cluster_chains(Ac, centroid, len(members), tol, scale)
            except ChainFailure:
                continue
            blocks.append((centroid, members, chains))
            alive -= set(members)
            progress = True
            break
    for i in alive:
        blocks.append((complex(w[i]), (i,), [[V[:, i]]]))
    blocks.sort(key=lambda b: (-round(abs(b[0]), 12), -round(b[0].real, 12),
                               -round(b[0].imag, 12)))
    return w, blocks


def eigenvalue_clusters(A, tol=1e-9):
    """Group numerically coincident eigenvalues.

    A candidate group of size ``m`` must have radius (max distance to its
    centroid) below ``max(1e-7 * max(1, rho), 10 * (u * ||A||) ** (1/m))``,
    the root term tracking how far rounding splits a Jordan block of that
    size, and its generalized eigenvectors must reproduce ``A`` on their span.
    Returns ``[(centroid, indices), ...]`` sorted by decreasing modulus, then
    by real and imaginary part; indices refer to ``numpy.linalg.eig`` order.
    """
    A = _square(A, "A", dtype=float)
    _, blocks = _modal_blocks(A, tol)
    return [(c, idx) for c, idx, _ in blocks]


def _rank_atol(tol, scale, power=1):
    return tol * scale ** power


def _null_space(M, atol):
    """Orthonormal null-space basis (columns) and singular values of ``M``."""
    _, s, vh = np.linalg.svd(M)
    k = int(np.sum(s <= atol))
    return vh[len(s) - k:].conj().T, s


def _phase_scale(v):
    """Scalar making the largest-modulus entry of ``v`` real positive and ``||v|| = 1``."""
    k = int(np.argmax(np.abs(v)))
    return np.conj(v[k]) / (abs(v[k]) * np.linalg.norm(v))


def _schur_stable(A):
    w = np.linalg.eigvals(A.astype(complex)) if A.size else np.zeros(0, complex)
    rho = float(np.max(np.abs(w))) if w.size else 0.0
    if rho >= 1.0:
        raise NotSchurStable(f"spectral radius {rho:.12g} >= 1", spectral_radius=rho)
    return w, rho


def _check_reconstruction(A, basis, factor, exc):
    scale = max(1.0, spectral_norm(A))
    try:
        condition_number(basis)
    except Singular as err:
        raise exc("basis is numerically singular") from err
    err = spectral_norm(basis @ factor @ np.linalg.inv(basis) - A)
    if err > RECONSTRUCTION_TOL * scale:
        raise exc(f"reconstruction error {err:.3g} exceeds {RECONSTRUCTION_TOL:g}*max(1,||A||)")


def eigendecompose(A, tol=1e-9):
    """Eigen-decomposition ``A = V D V^-1`` with unit-norm eigenvector columns.

    Eigenvalues that coincide numerically are replaced by their cluster
    centroid and get an orthonormal eigenspace basis.  Each column is scaled
    so its largest-modulus entry is real positive.

    Raises
    ------
    NotSchurStable
        If the spectral radius is >= 1.
    Defective
        If a cluster has fewer independent eigenvectors than its size (use
        :func:`jordan_decompose` instead).
    """
    A = _square(A, "A", dtype=float)
    _schur_stable(A)
    _, blocks = _modal_blocks(A, tol)
    columns, values = [], []
    for centroid, idx, chains in blocks:
        if any(len(chain) > 1 for chain in chains):
            raise Defective(
                f"eigenvalue {centroid:.6g} has multiplicity {len(idx)} but "
                f"eigenspace dimension {len(chains)}"
            )
        for (v,) in chains:
            columns.append(v * _phase_scale(v))
            values.append(centroid)
    basis = np.column_stack(columns) if columns else np.zeros((0, 0), complex)
    factor = np.diag(np.asarray(values, dtype=complex))
    _check_reconstruction(A, basis, factor, Defective)
    rho = float(np.max(np.abs(values))) if values else 0.0
    return ModalForm(NONDEFECTIVE, basis, factor, rho, rho, 0.0, (1,) * len(values))


def _jordan_chains(N, tol, scale):
    """Chains ``[N^(L-1) t, ..., N t, t]`` spanning the space of a nilpotent-ish ``N``.

    Works top-down: for each length ``j`` pick new chain tops in
    ``ker N^j`` complementary to ``ker N^(j-1)`` and to the images of the
    longer chains already chosen.
    """
    m = N.shape[0]
    powers = [np.eye(m, dtype=complex)]
    for _ in range(m):
        powers.append(powers[-1] @ N)
    kernels = [np.zeros((m, 0), complex)]
    dims = [0]
    for j in range(1, m + 1):
        K, _ = _null_space(powers[j], _rank_atol(tol, scale, j))
        kernels.append(K)
        dims.append(K.shape[1])
        if dims[-1] == m:
            break
    if dims[-1] != m:
        raise ChainFailure(f"eigenvalue cluster of size {m} is not numerically nilpotent")
    if any(b < a for a, b in zip(dims, dims[1:])):
        raise ChainFailure("kernel dimensions of powers are not monotone")
    index = len(dims) - 1

    tops = []
    for j in range(index, 0, -1):
        longer = sum(1 for L, _ in tops if L > j)
        count = (dims[j] - dims[j - 1]) - longer
        if count < 0:
            raise ChainFailure("inconsistent Jordan structure")
        if count == 0:
            continue
        spans = [kernels[j - 1]] + [(powers[L - j] @ t)[:, None] for L, t in tops]
        Z = np.hstack(spans)
        if Z.shape[1]:
            u, s, _ = np.linalg.svd(Z, full_matrices=False)
            Qz = u[:, s > 1e-10 * max(1.0, s[0])]
            M = kernels[j] - Qz @ (Qz.conj().T @ kernels[j])
        else:
            M = kernels[j]
        u, s, _ = np.linalg.svd(M, full_matrices=False)
        if s.size < count or s[count - 1] <= 1e-8:
            raise ChainFailure("could not complete Jordan chains")
        tops.extend((j, u[:, k]) for k in range(count))

    chains = []
    for L, t in tops:
        chains.append([powers[L - 1 - l] @ t for l in range(L)])
    return chains


def _cluster_chains(Ac, centroid, m, tol, scale):
    """Chains of the generalized eigenspace of ``Ac`` at ``centroid`` (dimension ``m``)."""
    n = len(Ac)
    shifted = Ac - centroid * np.eye(n)
    _, _, vh = np.linalg.svd(np.linalg.matrix_power(shifted, m))
    W = vh[n - m:].conj().T
    N = W.conj().T @ shifted @ W
    chains = [[W @ c for c in chain] for chain in _jordan_chains(N, tol, scale)]
    # the chains must reproduce A on their span
    for chain in chains:
        norm = max(np.linalg.norm(v) for v in chain)
        resid = np.linalg.norm(shifted @ chain[0])
        for lower, upper in zip(chain, chain[1:]):
            resid = max(resid, np.linalg.norm(shifted @ upper - lower))
        if resid > 1e-8 * scale * norm:
            raise ChainFailure(f"chain residual {resid:.3g} too large at {centroid:.6g}")
    return chains


def _jordan_matrix(values, lengths, superdiag):
    J = np.diag(np.asarray(values, dtype=complex))
    pos = 0
    for L in lengths:
        for k in range(L - 1):
            J[pos + k, pos + k + 1] = superdiag
        pos += L
    return J


def jordan_decompose(A, eps=None, tol=1e-9):
    """Epsilon-scaled Jordan decomposition ``A = P_eps J_eps P_eps^-1``.

    Each chain ``p_0, p_1, ...`` (``p_0`` the eigenvector, normalized to unit
    length with the same phase convention as :func:`eigendecompose`) is scaled
    to ``p_0, eps p_1, eps^2 p_2, ...`` so that ``J_eps`` carries ``eps`` on
    the superdiagonal inside every chain.  ``eps`` defaults to
    :func:`choose_epsilon`.

    Raises
    ------
    NotSchurStable
    ChainFailure
        If chains cannot be built or the result does not reconstruct ``A``.
    """
    A = _square(A, "A", dtype=float)
    _schur_stable(A)
    _, blocks = _modal_blocks(A, tol)
    if eps is None:
        eps = (1.0 - _centroid_radius(blocks)) / 2.0
    if not eps > 0:
        raise ValueError("eps must be positive")
    columns, values, lengths = [], [], []
    for centroid, _, chains in blocks:
        for chain in chains:
            c0 = _phase_scale(chain[0])
            columns.extend(v * c0 for v in chain)
            values.extend([centroid] * len(chain))
            lengths.append(len(chain))

    P = np.column_stack(columns)
    _check_reconstruction(A, P, _jordan_matrix(values, lengths, 1.0), ChainFailure)

    powers = np.concatenate([eps ** np.arange(L) for L in lengths])
    P_eps = P * powers[None, :]
    J_eps = _jordan_matrix(values, lengths, eps)
    rho_form = float(np.max(np.abs(values))) if values else 0.0
    return ModalForm(JORDAN, P_eps, J_eps, rho_form, spectral_norm(J_eps),
                     float(eps), tuple(lengths))


def _centroid_radius(blocks):
    # cluster centroids are far more accurate than the raw eigenvalues of a
    # defective matrix, which rounding splits by about u**(1/m)
    return max((abs(c) for c, _, _ in blocks), default=0.0)


def choose_epsilon(A, tol=1e-9):
    """Default superdiagonal scale ``(1 - rho(A)) / 2``.

    Since the diagonal part of the Jordan form has norm ``rho(A)``, this
    keeps ``||J_eps|| <= rho(A) + eps < 1``.  ``rho`` is taken over the
    eigenvalue cluster centroids.
    """
    A = _square(A, "A", dtype=float)
    _schur_stable(A)
    _, blocks = _modal_blocks(A, tol)
    return (1.0 - _centroid_radius(blocks)) / 2.0
