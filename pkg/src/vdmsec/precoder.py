"""Vandermonde (null-space) precoders.

The confidential block ``V1`` spans (part of) the null space of the
eavesdropper's Toeplitz matrix ``T(g)``, the common block ``V0`` spans the
orthogonal complement of ``V1``. Two constructions of ``V1`` are offered:

``"svd"`` (default)
    Right singular vectors of ``T(g)`` belonging to its ``L`` zero singular
    values. Numerically robust for any size.
``"gram_schmidt"``
    Columns ``[1, a, a^2, ...]`` built from roots ``a`` of the eavesdropper
    polynomial, then orthonormalized by QR. The raw matrix is badly
    conditioned once roots leave the unit circle, so this path falls back to
    SVD (with a warning) on near-coincident roots, missing roots, or a
    nulling residual above tolerance.

Basis columns carry an arbitrary unit phase; compare subspaces, never entries.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelVector, ToeplitzChannel, linearly_independent, make_toeplitz
from .errors import (
    DegenerateChannelError,
    DimensionError,
    NotOrthonormalError,
    PropertyViolation,
    RankCertificateError,
)
from .linalg import RANK_RTOL, numerical_rank, orthonormality_residual, singular_values

ORTHO_TOL = 1e-10
NULLING_RTOL = 1e-10
ROOT_RESIDUAL_RTOL = 1e-8
COINCIDENT_ROOT_TOL = 1e-8


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray

    def __len__(self):
        return self.roots.size


@dataclass(frozen=True)
class VandermondePrecoder:
    """Column blocks ``V0, V1, ..., VK`` of a null-space precoder.

    Attributes
    ----------
    blocks : tuple of ndarray
        ``(V0, V1, ..., VK)``, each with ``dimension = N + L`` rows and
        orthonormal columns. ``V0`` carries the common message.
    rank_certificate : float or None
        Worst ratio ``sigma_min / sigma_max`` over the certified effective
        channels ``T(h_k) V_k`` (or subset unions); ranks are declared full
        when it exceeds ``RANK_RTOL``.
    mutually_orthogonal : bool
        When False (two confidential messages, each hidden from the other
        receiver), ``V1`` and ``V2`` may overlap and only ``V0`` is required
        to be orthogonal to the confidential blocks.
    """

    blocks: tuple
    rank_certificate: float = None
    mutually_orthogonal: bool = True
    method: str = "svd"
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        blocks = tuple(np.asarray(B, dtype=complex) for B in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        dims = {B.shape[0] for B in blocks}
        if len(dims) != 1:
            raise DimensionError("all precoder blocks need the same number of rows")
        for k, B in enumerate(blocks):
            if B.shape[1] and orthonormality_residual(B) > ORTHO_TOL:
                raise NotOrthonormalError(f"block V{k} does not have orthonormal columns")
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if not self.mutually_orthogonal and i > 0:
                    continue
                if blocks[i].shape[1] and blocks[j].shape[1]:
                    cross = np.linalg.norm(blocks[i].conj().T @ blocks[j])
                    if cross > ORTHO_TOL:
                        raise NotOrthonormalError(f"blocks V{i} and V{j} are not orthogonal")
        if self.mutually_orthogonal and sum(self.stream_counts) > self.dimension:
            raise DimensionError("more columns than transmit dimensions")

    @property
    def dimension(self):
        return self.blocks[0].shape[0]

    @property
    def stream_counts(self):
        return tuple(B.shape[1] for B in self.blocks)

    @property
    def V0(self):
        return self.blocks[0]

    @property
    def V1(self):
        return self.blocks[1]

    def __len__(self):
        return len(self.blocks)

    def __getitem__(self, k):
        return self.blocks[k]

    @property
    def matrix(self):
        return np.hstack(self.blocks)


def _descending_coefficients(g):
    # S(z) = sum_i g_i z^(L-i) with taps stored [g_L, ..., g_0]
    taps = g.taps if isinstance(g, ChannelVector) else np.asarray(g, dtype=complex)
    return taps[::-1]


def _poly_residuals(coeffs, roots):
    return np.abs(np.polyval(coeffs, roots))


def companion_matrix(coeffs):
    """Frobenius companion matrix of a polynomial with descending coefficients."""
    coeffs = np.asarray(coeffs, dtype=complex)
    d = coeffs.size - 1
    C = np.zeros((d, d), dtype=complex)
    C[0, :] = -coeffs[1:] / coeffs[0]
    C[np.arange(1, d), np.arange(d - 1)] = 1.0
    return C


def channel_roots(g):
    """Roots of the eavesdropper polynomial ``S(z) = sum_i g_i z^(L-i)``.

    Computed as eigenvalues of the companion matrix. Vanishing leading
    coefficients (``g_0 = 0``) lower the degree, so fewer than ``L`` roots are
    returned in that case; ``L = 0`` has no roots.
    """
    full = _descending_coefficients(g)
    nz = np.flatnonzero(full != 0)
    if nz.size == 0:
        raise DegenerateChannelError("all-zero channel vector")
    coeffs = full[nz[0]:]
    if coeffs.size <= 1:
        empty = np.zeros(0, dtype=complex)
        return RootSet(empty, np.zeros(0))
    roots = np.linalg.eigvals(companion_matrix(coeffs))
    # one Newton step tightens roots whose residual is marginal
    res = _poly_residuals(full, roots)
    bound = _root_bound(full, roots)
    bad = res > bound
    if np.any(bad):
        dp = np.polyder(coeffs)
        step = np.polyval(coeffs, roots[bad]) / np.polyval(dp, roots[bad])
        roots[bad] = roots[bad] - np.where(np.isfinite(step), step, 0)
        res = _poly_residuals(full, roots)
    return RootSet(roots, res)


def _root_bound(full_coeffs, roots):
    L = full_coeffs.size - 1
    return ROOT_RESIDUAL_RTOL * np.linalg.norm(full_coeffs) * np.maximum(1.0, np.abs(roots)) ** L


def raw_vandermonde(roots, dimension):
    """Matrix whose column ``j`` is ``[1, a_j, a_j^2, ..., a_j^(dimension-1)]``."""
    roots = roots.roots if isinstance(roots, RootSet) else np.asarray(roots, dtype=complex)
    return np.vander(roots, int(dimension), increasing=True).T


def _scaled_vandermonde(roots, dimension):
    # same column spans as raw_vandermonde, each column scaled to unit peak
    m = np.arange(dimension)
    cols = []
    for a in roots:
        if abs(a) <= 1.0:
            cols.append(a ** m)
        else:
            cols.append((1.0 / a) ** (dimension - 1 - m))
    return np.array(cols).T.reshape(dimension, len(roots))


def _near_coincident(roots):
    for i in range(roots.size):
        for j in range(i + 1, roots.size):
            dmod = abs(abs(roots[i]) - abs(roots[j]))
            dang = abs(np.angle(roots[i] / roots[j])) if roots[j] != 0 else abs(roots[i])
            if dmod < COINCIDENT_ROOT_TOL and dang < COINCIDENT_ROOT_TOL:
                return True
    return False


def _svd_null_basis(T, l):
    N = T.shape[0]
    _, s, Vh = np.linalg.svd(T, full_matrices=True)
    if s.size < N or s[-1] <= RANK_RTOL * s[0]:
        raise DegenerateChannelError("Toeplitz matrix is not full row rank")
    return Vh[N:N + l].conj().T


def null_space_basis(Tg, l, method="svd"):
    """Orthonormal ``(N+L) x l`` basis of a subspace of ``null(T(g))``.

    With ``method="svd"`` the first ``l`` null-space right singular vectors
    are returned. With ``method="gram_schmidt"`` the ``l`` roots closest to
    the unit circle are used (best-conditioned columns) and orthonormalized.

    Raises
    ------
    DimensionError
        If ``l > L`` or ``l < 0``.
    DegenerateChannelError
        If `Tg` is not full row rank.
    """
    if not isinstance(Tg, ToeplitzChannel):
        raise TypeError("Tg must be a ToeplitzChannel")
    N, L = Tg.N, Tg.L
    if int(l) != l or not 0 <= l <= L:
        raise DimensionError(f"need 0 <= l <= L={L}, got l={l}")
    l = int(l)
    T = Tg.matrix
    if numerical_rank(T) < N:
        raise DegenerateChannelError("Toeplitz matrix is not full row rank")
    if l == 0:
        return np.zeros((N + L, 0), dtype=complex)
    if method == "svd":
        return _svd_null_basis(T, l)
    if method != "gram_schmidt":
        raise ValueError(f"unknown null-space method {method!r}")

    rootset = channel_roots(T[0, :L + 1])
    roots = rootset.roots
    reason = None
    if roots.size < l:
        reason = f"only {roots.size} roots for {l} dimensions (leading taps vanish)"
    else:
        order = np.argsort(np.abs(np.log(np.maximum(np.abs(roots), 1e-300))), kind="stable")
        roots = roots[order[:l]]
        if _near_coincident(roots):
            reason = "near-coincident roots"
    if reason is None:
        Q, _ = np.linalg.qr(_scaled_vandermonde(roots, N + L))
        if np.linalg.norm(T @ Q) <= NULLING_RTOL * np.linalg.norm(T):
            return Q
        reason = "nulling residual above tolerance (ill-conditioned Vandermonde matrix)"
    warnings.warn(f"gram_schmidt null space: {reason}; falling back to SVD", RuntimeWarning, stacklevel=2)
    return _svd_null_basis(T, l)


def null_complement(V1, n_columns=None, observed_by=None):
    """Orthonormal basis ``V0`` of the orthogonal complement of ``span(V1)``.

    ``[V0, V1]`` is square unitary. `n_columns` keeps only part of the
    complement (fewer common streams than available dimensions). The kept
    directions are the strongest right singular directions of
    ``observed_by @ complement`` when a stacked channel matrix is given, and
    the leading complement columns otherwise.
    """
    V1 = np.asarray(V1, dtype=complex)
    n, l = V1.shape
    if l and orthonormality_residual(V1) > ORTHO_TOL:
        raise NotOrthonormalError("V1 must have orthonormal columns")
    if l == 0:
        V0 = np.eye(n, dtype=complex)
    else:
        U, _, _ = np.linalg.svd(V1, full_matrices=True)
        V0 = U[:, l:]
    return truncate_common(V0, n_columns, observed_by)


def truncate_common(V0, n_columns=None, observed_by=None):
    """Keep `n_columns` directions of ``span(V0)``; see :func:`null_complement`."""
    if n_columns is None or n_columns == V0.shape[1]:
        return V0
    if not 0 <= n_columns <= V0.shape[1]:
        raise DimensionError(f"complement has {V0.shape[1]} columns, asked for {n_columns}")
    if observed_by is None or n_columns == 0:
        return V0[:, :n_columns]
    _, _, Wh = np.linalg.svd(np.asarray(observed_by) @ V0, full_matrices=True)
    return V0 @ Wh[:n_columns].conj().T


def span_complement(A, rtol=RANK_RTOL):
    """Orthonormal basis of the orthogonal complement of the column span of `A`."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape[1] == 0:
        return np.eye(n, dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=True)
    r = int(np.count_nonzero(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return U[:, r:]


def rank_margin(A, scale=None):
    """``sigma_min(A) / scale`` (default ``scale = sigma_max(A)``; 1.0 for an empty matrix)."""
    s = singular_values(A)
    if s.size == 0:
        return 1.0
    scale = s[0] if scale is None else scale
    if scale == 0:
        return 0.0
    return float(s[-1] / scale)


def certify_rank(A, expected, label="T(h)V1", scale=None):
    """Check ``rank(A) == expected`` and return the singular-value margin.

    Singular values count when they exceed ``RANK_RTOL * scale``. Pass the
    spectral norm of the channel matrix as `scale` when `A` is that channel
    times an orthonormal block, so that an (almost) annihilated product is
    not mistaken for a full-rank one.
    """
    s = singular_values(A)
    ref = (s[0] if s.size else 0.0) if scale is None else scale
    rank = int(np.count_nonzero(s > RANK_RTOL * ref)) if ref > 0 else 0
    if rank != expected:
        raise RankCertificateError(f"rank({label}) = {rank}, expected {expected}")
    return rank_margin(A, ref) if expected else 1.0


def build_precoder(g, h, N, l, method="svd", n_common=None):
    """Vandermonde precoder ``(V0, V1)`` for one confidential and one common message.

    Parameters
    ----------
    g, h : ChannelVector
        Eavesdropper and legitimate channels (same ``L``, linearly independent).
    N : int
        Block length.
    l : int
        Number of confidential streams, ``0 <= l <= L``.
    method : {"svd", "gram_schmidt"}
        Null-space construction.
    n_common : int, optional
        Keep only this many columns in ``V0`` (default: all ``N + L - l``).

    Raises
    ------
    RankCertificateError
        If ``rank(T(h) V1) < min(l, N)``.
    PropertyViolation
        If ``T(g) V1`` is not numerically zero.
    """
    g = g if isinstance(g, ChannelVector) else ChannelVector(g)
    h = h if isinstance(h, ChannelVector) else ChannelVector(h)
    if g.L != h.L:
        raise DimensionError("h and g must have the same number of taps")
    if l and not linearly_independent(g, h):
        raise DegenerateChannelError("h and g are linearly dependent")
    Tg = make_toeplitz(g, N)
    Th = make_toeplitz(h, N)
    V1 = null_space_basis(Tg, l, method=method)
    nulling = float(np.linalg.norm(Tg.matrix @ V1))
    if nulling > NULLING_RTOL * np.linalg.norm(Tg.matrix):
        raise PropertyViolation(f"||T(g)V1|| = {nulling:.3e} exceeds nulling tolerance")
    # an N-row product cannot exceed rank N (MISO case N=1)
    margin = certify_rank(Th.matrix @ V1, min(V1.shape[1], N), scale=np.linalg.norm(Th.matrix, 2))
    V0 = null_complement(V1, n_columns=n_common, observed_by=np.vstack([Th.matrix, Tg.matrix]))
    return VandermondePrecoder(
        blocks=(V0, V1),
        rank_certificate=margin,
        method=method,
        diagnostics={"nulling_residual": nulling},
    )


def principal_angles(A, B):
    """Principal angles (radians, descending) between the column spans of `A` and `B`.

    Uses the sine form ``svd((I - Qa Qa^H) Qb)``, which stays accurate for
    angles near zero; both spans must have the same dimension.
    """
    Qa, _ = np.linalg.qr(A)
    Qb, _ = np.linalg.qr(B)
    residual = Qb - Qa @ (Qa.conj().T @ Qb)
    sin = np.linalg.svd(residual, compute_uv=False)
    return np.arcsin(np.clip(sin, 0.0, 1.0))
