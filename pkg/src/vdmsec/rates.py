"""Log-det rate functionals of the Vandermonde-precoded broadcast channel.

Every rate is in bits per channel use per dimension, i.e. ``log2`` with the
``1/(N+L)`` prefactor already applied.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .channel import ToeplitzChannel
from .errors import DimensionError
from .linalg import as_psd, hermitian, log2det_eye_plus, numerical_rank, psd_sqrt
from .precoder import VandermondePrecoder

BUDGET_TOL = 1e-9
GEIG_ONE_TOL = 1e-12


@dataclass(frozen=True)
class EffectiveChannels:
    """Precoded channels ``H0 = T(h)V0``, ``H1 = T(h)V1``, ``G0 = T(g)V0``.

    ``lambda_h1`` and ``lambda_g0`` are the squared singular values of
    ``H1`` and ``G0`` (descending, zero-padded to the block widths) and
    ``Vh1``/``Vg0`` the square unitary matrices of right singular vectors,
    so that ``H1^H H1 = Vh1 diag(lambda_h1) Vh1^H``. ``leak = T(g)V1`` is
    kept for the nulling diagnostic.
    """

    H0: np.ndarray
    H1: np.ndarray
    G0: np.ndarray
    leak: np.ndarray
    n_dims: int
    lambda_h1: np.ndarray = field(repr=False)
    Vh1: np.ndarray = field(repr=False)
    lambda_g0: np.ndarray = field(repr=False)
    Vg0: np.ndarray = field(repr=False)

    @property
    def l0(self):
        return self.H0.shape[1]

    @property
    def l(self):
        return self.H1.shape[1]

    @property
    def N(self):
        return self.H0.shape[0]


def _right_svd(A):
    n, k = A.shape
    if k == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    lam = np.zeros(k)
    lam[: s.size] = s**2
    return lam, Vh.conj().T


def effective_channels(Th, Tg, prec):
    """Form the effective channels of a two-block precoder.

    Raises
    ------
    DimensionError
        If the Toeplitz matrices and the precoder disagree in size.
    """
    if not isinstance(prec, VandermondePrecoder) or len(prec) != 2:
        raise DimensionError("effective_channels needs a (V0, V1) precoder")
    Thm = Th.matrix if isinstance(Th, ToeplitzChannel) else np.asarray(Th)
    Tgm = Tg.matrix if isinstance(Tg, ToeplitzChannel) else np.asarray(Tg)
    if Thm.shape != Tgm.shape or Thm.shape[1] != prec.dimension:
        raise DimensionError(
            f"T(h) {Thm.shape}, T(g) {Tgm.shape} and precoder dimension {prec.dimension} disagree"
        )
    V0, V1 = prec.blocks
    H0, H1, G0 = Thm @ V0, Thm @ V1, Tgm @ V0
    lam_h1, Vh1 = _right_svd(H1)
    lam_g0, Vg0 = _right_svd(G0)
    return EffectiveChannels(
        H0=H0,
        H1=H1,
        G0=G0,
        leak=Tgm @ V1,
        n_dims=prec.dimension,
        lambda_h1=lam_h1,
        Vh1=Vh1,
        lambda_g0=lam_g0,
        Vg0=Vg0,
    )


def h1_rank(eff):
    """Numerical rank of ``H1``; equals ``min(l, N)`` for a valid precoder."""
    return numerical_rank(eff.H1) if eff.H1.size else 0


@dataclass(frozen=True)
class CovarianceSet:
    """Input covariances ``S0, S1, ...`` sharing the trace budget ``P_bar``."""

    matrices: tuple
    budget: float

    def __post_init__(self):
        mats = tuple(as_psd(S, name=f"S{k}") for k, S in enumerate(self.matrices))
        object.__setattr__(self, "matrices", mats)
        if self.budget < 0:
            raise ValueError("power budget must be non-negative")
        if self.total_power > self.budget + BUDGET_TOL * max(1.0, self.budget):
            raise ValueError(f"total power {self.total_power:.6g} exceeds budget {self.budget:.6g}")

    @property
    def total_power(self):
        return float(sum(np.real(np.trace(S)) for S in self.matrices))

    def __getitem__(self, k):
        return self.matrices[k]

    def __len__(self):
        return len(self.matrices)


@dataclass(frozen=True)
class RateTuple:
    """Achieved rates ``(R0, R1, ..., RK)``; `extras` holds labelled sub-rates."""

    rates: tuple
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        rates = tuple(max(0.0, float(r)) if r > -1e-12 else float(r) for r in self.rates)
        if any(r < 0 for r in rates):
            raise ValueError(f"negative rate in {rates}")
        object.__setattr__(self, "rates", rates)

    @property
    def R0(self):
        return self.rates[0]

    @property
    def R1(self):
        return self.rates[1]

    def __getitem__(self, k):
        return self.rates[k]

    def __len__(self):
        return len(self.rates)

    def __iter__(self):
        return iter(self.rates)


def rate_R1(eff, S1):
    """Confidential rate ``log2|I + H1 S1 H1^H| / (N+L)``."""
    S1 = as_psd(S1, eff.l, "S1")
    return max(0.0, log2det_eye_plus(eff.H1, S1)) / eff.n_dims


def rate_R02(eff, S0):
    """Common rate seen by the eavesdropper, ``log2|I + G0 S0 G0^H| / (N+L)``."""
    S0 = as_psd(S0, eff.l0, "S0")
    return max(0.0, log2det_eye_plus(eff.G0, S0)) / eff.n_dims


def rate_R01(eff, S0, S1):
    """Common rate at the legitimate receiver (confidential signal as noise)."""
    S0 = as_psd(S0, eff.l0, "S0")
    S1 = as_psd(S1, eff.l, "S1")
    full = log2det_eye_plus(np.hstack([eff.H0, eff.H1]), sla.block_diag(S0, S1))
    return max(0.0, full - log2det_eye_plus(eff.H1, S1)) / eff.n_dims


def leakage(eff, S1):
    """``log2|I + T(g)V1 S1 V1^H T(g)^H|``: information the eavesdropper gets on V.

    Summed as ``log1p`` over eigenvalues so residuals far below machine
    epsilon are reported rather than rounded to zero.
    """
    S1 = as_psd(S1, eff.l, "S1")
    if eff.l == 0:
        return 0.0
    ev = np.linalg.eigvalsh(hermitian(eff.leak @ S1 @ eff.leak.conj().T))
    return float(np.sum(np.log1p(np.maximum(ev, 0.0))) / np.log(2.0))


def evaluate(eff, S0, S1):
    """All rates of a covariance pair as a RateTuple ``(min(R01, R02), R1)``."""
    r01 = rate_R01(eff, S0, S1)
    r02 = rate_R02(eff, S0)
    return RateTuple(
        (min(r01, r02), rate_R1(eff, S1)),
        extras={"R01": r01, "R02": r02, "leakage": leakage(eff, S1)},
    )


def equal_power_rates(Th, Tg, prec, P):
    """Rates with ``S0 = P I`` and ``S1 = P I`` (power `P` on every stream)."""
    eff = effective_channels(Th, Tg, prec)
    return evaluate(eff, P * np.eye(eff.l0), P * np.eye(eff.l))


def equal_power_secrecy_rate(eff, budget):
    """Secrecy rate with the whole budget spread evenly over the ``l`` streams of V1."""
    if eff.l == 0 or budget == 0:
        return 0.0
    return rate_R1(eff, (budget / eff.l) * np.eye(eff.l))


def generalized_eigenvalues(Th, Tg, S):
    """Eigenvalues of the pencil ``(I + R Th^H Th R, I + R Tg^H Tg R)``, ``R = S^(1/2)``.

    The pencil is reduced with the Cholesky factor of the second (positive
    definite) matrix and solved as a Hermitian eigenproblem.
    """
    Thm = Th.matrix if isinstance(Th, ToeplitzChannel) else np.asarray(Th)
    Tgm = Tg.matrix if isinstance(Tg, ToeplitzChannel) else np.asarray(Tg)
    n = Thm.shape[1]
    S = as_psd(S, n, "S")
    R = psd_sqrt(S)
    A = hermitian(np.eye(n) + R @ Thm.conj().T @ Thm @ R)
    B = hermitian(np.eye(n) + R @ Tgm.conj().T @ Tgm @ R)
    C = np.linalg.cholesky(B)
    X = sla.solve_triangular(C, A, lower=True)
    M = sla.solve_triangular(C, X.conj().T, lower=True)
    return np.linalg.eigvalsh(hermitian(M))


def fixed_covariance_secrecy_rate(Th, Tg, S):
    """MIMO wiretap secrecy rate of a fixed input covariance `S`.

    Sum of ``log2`` of the generalized eigenvalues above one, divided by
    ``N + L``.
    """
    phi = generalized_eigenvalues(Th, Tg, S)
    n = phi.size
    # eigenvalues within rounding of one carry no rate
    return float(np.sum(np.log2(phi[phi > 1.0 + GEIG_ONE_TOL]))) / n
