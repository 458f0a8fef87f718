"""Reference beamforming schemes for the comparison experiments.

* The optimal MISO wiretap beamformer: the matched filter projected onto
  the null space of the eavesdropper's Toeplitz matrix.
* The best single Vandermonde column for the same MISO link.
* Zero-forcing beamformers for the two-user MISO broadcast channel, each
  user's matched filter projected off the other user's channel.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelVector, linearly_independent, make_toeplitz
from .errors import DegenerateChannelError, DimensionError
from .precoder import null_space_basis

UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Beamformer:
    """A unit-norm transmit vector of length ``N + L``."""

    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=complex).ravel()
        if abs(np.linalg.norm(phi) - 1.0) > UNIT_NORM_TOL:
            raise ValueError("beamformer must have unit norm")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    def gain(self, h_row):
        """``|h phi|^2``."""
        return float(abs(np.asarray(h_row) @ self.phi) ** 2)


def _project_and_normalize(h_row, basis):
    """Normalized projection of ``h^H`` onto ``span(basis)`` and its gain ``||basis^H h^H||^2``."""
    coeff = basis.conj().T @ np.asarray(h_row).conj()
    gain = float(np.real(np.vdot(coeff, coeff)))
    if gain == 0.0:
        return None, 0.0
    phi = basis @ coeff
    return Beamformer(phi / np.linalg.norm(phi)), gain


def miso_optimal_beamformer(h_row, Tg):
    """Optimal secure beamformer ``argmax |h phi|^2`` s.t. ``T(g) phi = 0``, ``||phi|| = 1``.

    Returns
    -------
    beamformer : Beamformer or None
        None when the null space is trivial (``L = 0``) or `h_row` is
        orthogonal to it.
    gain : float
        ``||P_null h^H||^2``.
    """
    h_row = np.asarray(h_row, dtype=complex).ravel()
    if h_row.size != Tg.shape[1]:
        raise DimensionError(f"h_row has length {h_row.size}, expected {Tg.shape[1]}")
    basis = null_space_basis(Tg, Tg.L)
    if basis.shape[1] == 0:
        return None, 0.0
    return _project_and_normalize(h_row, basis)


def vandermonde_miso_gain(h_row, V1):
    """Best single-column gain ``max_i |h v_{1,i}|^2`` (0 for an empty ``V1``)."""
    V1 = np.asarray(V1)
    if V1.shape[1] == 0:
        return 0.0
    return float(np.max(np.abs(np.asarray(h_row) @ V1) ** 2))


def miso_rate(gain, P, n_dims):
    """``log2(1 + n_dims * P * gain) / n_dims``: a single beam carrying ``(N+L) P``."""
    return float(np.log2(1.0 + n_dims * P * gain)) / n_dims


def zf_two_user_beamformers(h1, h2, N=1):
    """Zero-forcing beamformers of the two-user MISO broadcast channel.

    User ``k`` transmits along its row ``h_k`` (first row of ``T(h_k)``)
    projected onto the null space of the other user's Toeplitz matrix.

    Returns
    -------
    (Beamformer or None, Beamformer or None), (float, float)
        The beamformers and per-user gains ``|h_k phi_k|^2``.

    Raises
    ------
    DegenerateChannelError
        If the channels are linearly dependent.
    """
    h1 = h1 if isinstance(h1, ChannelVector) else ChannelVector(h1)
    h2 = h2 if isinstance(h2, ChannelVector) else ChannelVector(h2)
    if h1.L != h2.L:
        raise DimensionError("h1 and h2 must have the same number of taps")
    if not linearly_independent(h1, h2):
        raise DegenerateChannelError("h1 and h2 are linearly dependent")
    T1, T2 = make_toeplitz(h1, N), make_toeplitz(h2, N)
    b1, c1 = _project_and_normalize(T1.matrix[0], null_space_basis(T2, T2.L))
    b2, c2 = _project_and_normalize(T2.matrix[0], null_space_basis(T1, T1.L))
    return (b1, b2), (c1, c2)
