"""Small dense linear-algebra helpers used across the package.

Numerical rank everywhere counts singular values above ``RANK_RTOL``
times a reference scale: ``sigma_max`` of the matrix itself, or of the
channel matrix when certifying a channel times an orthonormal block.
"""

import numpy as np

from .errors import DimensionError, NotPSDError

#: Relative singular-value threshold for numerical rank.
RANK_RTOL = 1e-10

HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-10


def hermitian(A):
    """Return the Hermitian part ``(A + A^H) / 2``."""
    A = np.asarray(A)
    return 0.5 * (A + A.conj().T)


def singular_values(A):
    A = np.asarray(A)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def numerical_rank(A, rtol=RANK_RTOL):
    """Number of singular values of `A` above ``rtol * sigma_max``."""
    s = singular_values(A)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def orthonormality_residual(Q):
    """Frobenius norm of ``Q^H Q - I``."""
    Q = np.asarray(Q)
    k = Q.shape[1]
    return float(np.linalg.norm(Q.conj().T @ Q - np.eye(k)))


def as_psd(S, size=None, name="S"):
    """Validate a Hermitian PSD matrix and return a cleaned copy.

    The matrix must be Hermitian to ``1e-12`` and have no eigenvalue below
    ``-1e-10`` (both relative to ``max(1, ||S||_2)``). The Hermitian part is
    returned with negative eigenvalues clipped to zero.

    Raises
    ------
    DimensionError
        If `S` is not square or does not have the requested size.
    NotPSDError
        If `S` is not Hermitian or has a significantly negative eigenvalue.
    """
    S = np.atleast_2d(np.asarray(S, dtype=complex))
    if S.size == 0:
        S = S.reshape(0, 0)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {S.shape}")
    if size is not None and S.shape[0] != size:
        raise DimensionError(f"{name} must be {size}x{size}, got {S.shape}")
    if S.size == 0:
        return S
    scale = max(1.0, float(np.linalg.norm(S, 2)))
    if np.linalg.norm(S - S.conj().T) > HERMITIAN_TOL * scale:
        raise NotPSDError(f"{name} is not Hermitian")
    w, U = np.linalg.eigh(hermitian(S))
    if w[0] < PSD_FLOOR * scale:
        raise NotPSDError(f"{name} has eigenvalue {w[0]:.3e} < 0")
    w = np.clip(w, 0.0, None)
    return (U * w) @ U.conj().T


def psd_sqrt(S):
    """Hermitian square root of a PSD matrix (eigenvalues clipped at 0)."""
    if S.size == 0:
        return S
    w, U = np.linalg.eigh(hermitian(S))
    return (U * np.sqrt(np.clip(w, 0.0, None))) @ U.conj().T


def log2det_eye_plus(A, S=None):
    """``log2 det(I + A S A^H)`` for PSD `S` (identity if omitted).

    Evaluated as ``log2 det(I_k + F^H A^H A F)`` with ``S = F F^H`` on the
    smaller side, through a Cholesky factor of the (positive definite)
    argument.
    """
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    if S is not None:
        A = A @ psd_sqrt(S)
    n, k = A.shape
    M = A.conj().T @ A if k <= n else A @ A.conj().T
    M = hermitian(M) + np.eye(min(n, k))
    L = np.linalg.cholesky(M)
    return float(2.0 * np.sum(np.log2(np.real(np.diag(L)))))
