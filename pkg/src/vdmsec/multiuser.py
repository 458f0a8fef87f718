"""Multiuser extensions of Vandermonde precoding.

Two settings are covered:

* ``K`` confidential messages plus a common message, all hidden from one
  external eavesdropper ``g``. The confidential blocks ``V1..VK`` are
  disjoint column subsets of one null-space basis of ``T(g)``.
* Two confidential messages, each hidden from the *other* legitimate
  receiver. ``V1`` lies in the null space of ``T(h2)`` and ``V2`` in that of
  ``T(h1)``; the two blocks are generally not orthogonal to each other.

Each setting comes with its degree-of-freedom region as a set of integer
stream-count tuples.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channel import ChannelVector, linearly_independent, make_toeplitz
from .errors import DegenerateChannelError, DimensionError, PropertyViolation
from .linalg import log2det_eye_plus
from .precoder import (
    NULLING_RTOL,
    VandermondePrecoder,
    certify_rank,
    null_complement,
    null_space_basis,
    span_complement,
    truncate_common,
)
from .rates import RateTuple

#: Above this many users the subset-rank certificate is sampled.
EXHAUSTIVE_SUBSET_K = 3
SAMPLED_SUBSETS = 64


@dataclass(frozen=True)
class DofTuple:
    """Integer stream counts ``(l0, l1, ..., lK)`` over ``n_dims = N + L`` dimensions."""

    stream_counts: tuple
    n_dims: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.stream_counts)
        if any(c < 0 for c in counts) or any(c != s for c, s in zip(counts, self.stream_counts)):
            raise ValueError(f"stream counts must be non-negative integers, got {self.stream_counts}")
        if self.n_dims < 1:
            raise ValueError("n_dims must be positive")
        object.__setattr__(self, "stream_counts", counts)

    @classmethod
    def from_normalized(cls, normalized, n_dims):
        counts = []
        for r in normalized:
            c = Fraction(r) * n_dims
            if c.denominator != 1:
                raise ValueError(f"{r} is not a multiple of 1/{n_dims}")
            counts.append(int(c))
        return cls(tuple(counts), n_dims)

    @property
    def normalized(self):
        """``r_k = l_k / (N + L)`` as exact fractions."""
        return tuple(Fraction(c, self.n_dims) for c in self.stream_counts)

    @property
    def l0(self):
        return self.stream_counts[0]

    def __iter__(self):
        return iter(self.stream_counts)

    def __len__(self):
        return len(self.stream_counts)

    def __getitem__(self, k):
        return self.stream_counts[k]


@dataclass(frozen=True)
class MultiuserInstance:
    """Channels of a multiuser broadcast setting.

    `g` is the external eavesdropper (None for the two-confidential-message
    variant). All channels share ``L`` and are linearly independent.
    """

    h_list: tuple
    N: int
    g: ChannelVector = None

    def __post_init__(self):
        hs = tuple(h if isinstance(h, ChannelVector) else ChannelVector(h) for h in self.h_list)
        g = self.g if self.g is None or isinstance(self.g, ChannelVector) else ChannelVector(self.g)
        object.__setattr__(self, "h_list", hs)
        object.__setattr__(self, "g", g)
        if not hs:
            raise DimensionError("need at least one legitimate receiver")
        chans = hs + ((g,) if g is not None else ())
        if len({c.L for c in chans}) != 1:
            raise DimensionError("all channels must have the same number of taps")
        if int(self.N) != self.N or self.N < 1:
            raise DimensionError("N must be a positive integer")
        if len(chans) > 1 and not linearly_independent(*chans):
            raise DegenerateChannelError("channel vectors are linearly dependent")

    @property
    def K(self):
        return len(self.h_list)

    @property
    def L(self):
        return self.h_list[0].L

    @property
    def n_dims(self):
        return self.N + self.L


def _subsets(K, rng):
    if K <= EXHAUSTIVE_SUBSET_K:
        for r in range(1, K + 1):
            yield from itertools.combinations(range(K), r)
        return
    for k in range(K):
        yield (k,)
    yield tuple(range(K))
    for _ in range(SAMPLED_SUBSETS):
        mask = rng.random(K) < 0.5
        if mask.any():
            yield tuple(np.flatnonzero(mask))


def round_robin_partition(n_columns, sizes):
    """Assign column indices ``0, 1, ...`` to groups in turn until each group is full."""
    if sum(sizes) > n_columns:
        raise DimensionError(f"{sum(sizes)} columns requested from {n_columns}")
    groups = [[] for _ in sizes]
    col = 0
    while any(len(gr) < s for gr, s in zip(groups, sizes)):
        for k, s in enumerate(sizes):
            if len(groups[k]) < s:
                groups[k].append(col)
                col += 1
    return groups


def kuser_precoder(inst, l_list, n_common=None, subset_seed=0):
    """Precoder ``(V0, V1, ..., VK)`` for ``K`` confidential messages and one common message.

    A full ``L``-column null-space basis of ``T(g)`` is split round-robin
    into the confidential blocks; ``V0`` spans the orthogonal complement of
    their union (optionally truncated to `n_common` columns). Every user ``k``
    and subset ``S`` of confidential blocks is certified to satisfy
    ``rank(T(h_k) [V_j]_{j in S}) = min(N, sum_{j in S} l_j)``; subsets are
    exhaustive for ``K <= 3`` and sampled (seeded by `subset_seed`) above.

    Raises
    ------
    DimensionError
        If ``sum(l_list) > L`` or the list length differs from ``K``.
    RankCertificateError
        If any subset loses rank.
    """
    if inst.g is None:
        raise DimensionError("kuser_precoder needs an eavesdropper channel")
    l_list = tuple(int(l) for l in l_list)
    if len(l_list) != inst.K or any(l < 0 for l in l_list):
        raise DimensionError(f"need {inst.K} non-negative stream counts, got {l_list}")
    if sum(l_list) > inst.L:
        raise DimensionError(f"sum of confidential streams {sum(l_list)} exceeds L={inst.L}")
    N = inst.N
    Tg = make_toeplitz(inst.g, N)
    basis = null_space_basis(Tg, inst.L)
    groups = round_robin_partition(inst.L, l_list)
    Vk = [basis[:, idx] for idx in groups]
    Th = [make_toeplitz(h, N).matrix for h in inst.h_list]
    V0 = null_complement(np.hstack(Vk), n_columns=n_common, observed_by=np.vstack([*Th, Tg.matrix]))

    nulling = max((float(np.linalg.norm(Tg.matrix @ V)) for V in Vk), default=0.0)
    if nulling > NULLING_RTOL * np.linalg.norm(Tg.matrix):
        raise PropertyViolation(f"||T(g)V_k|| = {nulling:.3e} exceeds nulling tolerance")
    rng = np.random.default_rng(subset_seed)
    scales = [np.linalg.norm(T, 2) for T in Th]
    margins = []
    for subset in _subsets(inst.K, rng):
        width = sum(l_list[j] for j in subset)
        if width == 0:
            continue
        stacked = np.hstack([Vk[j] for j in subset])
        for k, (T, sc) in enumerate(zip(Th, scales)):
            margins.append(certify_rank(T @ stacked, min(width, N), f"T(h{k + 1})V{list(subset)}", sc))
    return VandermondePrecoder(
        blocks=(V0, *Vk),
        rank_certificate=min(margins) if margins else None,
        diagnostics={"nulling_residual": nulling, "partition": groups},
    )


def _stack(blocks, n):
    blocks = list(blocks)
    return np.hstack(blocks) if blocks else np.zeros((n, 0), dtype=complex)


def kuser_equal_power_rates(inst, prec, P):
    """Rates ``(R0, R1, ..., RK)`` with power `P` on every stream.

    ``R0`` is the smallest common-message rate over the ``K`` receivers and
    the eavesdropper. ``R_k`` is the rate of block ``V_k`` at receiver ``k``
    with the other confidential blocks as interference. `extras` carries the
    eavesdropper leakage ``log2|I + P T(g) sum_k V_k V_k^H T(g)^H|``.
    """
    N, n = inst.N, inst.n_dims
    if prec.dimension != n or len(prec) != inst.K + 1:
        raise DimensionError("precoder does not match the instance")
    V0, Vs = prec.blocks[0], prec.blocks[1:]
    Tg = make_toeplitz(inst.g, N).matrix
    sp = np.sqrt(P)
    common = [log2det_eye_plus(sp * Tg @ V0)]
    private = []
    for k, h in enumerate(inst.h_list):
        T = sp * make_toeplitz(h, N).matrix
        others = [V for j, V in enumerate(Vs) if j != k]
        all_conf = log2det_eye_plus(T @ _stack(Vs, n))
        common.append(log2det_eye_plus(T @ _stack([V0, *Vs], n)) - all_conf)
        private.append(all_conf - log2det_eye_plus(T @ _stack(others, n)))
    leak = log2det_eye_plus(sp * Tg @ _stack(Vs, n))
    rates = [min(common) / n] + [r / n for r in private]
    return RateTuple(
        tuple(max(0.0, r) for r in rates),
        extras={"leakage": max(0.0, leak), "common_terms": tuple(c / n for c in common)},
    )


def kuser_dof_region(N, L, K):
    """All ``(l0, l1, ..., lK)`` with ``sum l_k <= L`` and ``l0 + sum l_k <= N``.

    Built constructively: for each confidential total ``s`` every composition
    of ``s`` into ``K`` parts is paired with ``l0 = 0 .. N - s``.
    """
    if not N > L >= 0 or K < 1:
        raise DimensionError(f"need N > L >= 0 and K >= 1, got N={N}, L={L}, K={K}")
    out = set()
    for s in range(min(L, N) + 1):
        for cuts in itertools.combinations_with_replacement(range(s + 1), K - 1):
            bounds = (0, *cuts, s)
            parts = tuple(bounds[i + 1] - bounds[i] for i in range(K))
            for l0 in range(N - s + 1):
                out.add(DofTuple((l0, *parts), N + L))
    return frozenset(out)


def two_user_precoder(h1, h2, N, l1, l2, n_common=None):
    """Precoder ``(V0, V1, V2)`` for two confidential messages hidden from each other.

    ``V1`` spans ``l1`` null directions of ``T(h2)``, ``V2`` spans ``l2`` null
    directions of ``T(h1)``, and ``V0`` the ``M = N + L - rank([V1 V2])``
    dimensional complement (optionally truncated to `n_common` columns).

    Raises
    ------
    DegenerateChannelError
        If `h1` and `h2` are linearly dependent.
    RankCertificateError
        If ``rank(T(h_k) V_k) < min(l_k, N)``.
    """
    inst = MultiuserInstance((h1, h2), N)
    T1, T2 = make_toeplitz(inst.h_list[0], N), make_toeplitz(inst.h_list[1], N)
    V1 = null_space_basis(T2, l1)
    V2 = null_space_basis(T1, l2)
    cross = (float(np.linalg.norm(T2.matrix @ V1)), float(np.linalg.norm(T1.matrix @ V2)))
    if cross[0] > NULLING_RTOL * np.linalg.norm(T2.matrix) or cross[1] > NULLING_RTOL * np.linalg.norm(T1.matrix):
        raise PropertyViolation(f"cross-nulling residuals {cross} exceed tolerance")
    margins = [
        certify_rank(T1.matrix @ V1, min(l1, N), "T(h1)V1", np.linalg.norm(T1.matrix, 2)),
        certify_rank(T2.matrix @ V2, min(l2, N), "T(h2)V2", np.linalg.norm(T2.matrix, 2)),
    ]
    V0 = span_complement(np.hstack([V1, V2]))
    M = V0.shape[1]
    V0 = truncate_common(V0, n_common, observed_by=np.vstack([T1.matrix, T2.matrix]))
    return VandermondePrecoder(
        blocks=(V0, V1, V2),
        rank_certificate=min(m for m, l in zip(margins, (l1, l2)) if l) if (l1 or l2) else None,
        mutually_orthogonal=False,
        diagnostics={"M": M, "cross_nulling": cross},
    )


def two_user_rates(h1, h2, prec, P):
    """Equal-power rates ``(R0, R1, R2)`` of the two-confidential-message precoder.

    Every used stream gets ``p = (N + L) P / (l0 + l1 + l2)``. `extras` holds
    the two cross-leakage terms ``log2|I + p T(h_j) V_k V_k^H T(h_j)^H|``.
    """
    h1 = h1 if isinstance(h1, ChannelVector) else ChannelVector(h1)
    h2 = h2 if isinstance(h2, ChannelVector) else ChannelVector(h2)
    n = prec.dimension
    N = n - h1.L
    V0, V1, V2 = prec.blocks
    total = sum(prec.stream_counts)
    if total == 0 or P == 0:
        return RateTuple((0.0, 0.0, 0.0), extras={"leakage": 0.0, "cross_leakage": (0.0, 0.0)})
    sp = np.sqrt(n * P / total)
    T1, T2 = sp * make_toeplitz(h1, N).matrix, sp * make_toeplitz(h2, N).matrix
    common, private = [], []
    for T, V in ((T1, V1), (T2, V2)):
        own = log2det_eye_plus(T @ V)
        common.append(log2det_eye_plus(T @ np.hstack([V0, V])) - own)
        private.append(own)
    cross = (max(0.0, log2det_eye_plus(T2 @ V1)), max(0.0, log2det_eye_plus(T1 @ V2)))
    return RateTuple(
        (max(0.0, min(common) / n), private[0] / n, private[1] / n),
        extras={"leakage": max(cross), "cross_leakage": cross},
    )


def two_user_dof_region(N, L):
    """All ``(l0, l1, l2)`` with ``l_k <= L`` and ``l0 + l_k <= N`` for ``k = 1, 2``."""
    if not N > L >= 0:
        raise DimensionError(f"need N > L >= 0, got N={N}, L={L}")
    return frozenset(
        DofTuple((l0, l1, l2), N + L)
        for l1 in range(L + 1)
        for l2 in range(L + 1)
        for l0 in range(N - max(l1, l2) + 1)
    )


def best_column_gains(h1, h2, N=1):
    """Best single-column gains ``max_i |h_k v_{k,i}|^2`` of the two-user precoder.

    The observation of receiver ``k`` is the first row of ``T(h_k)``;
    ``v_{1,i}`` are the columns of the full null-space basis of ``T(h2)`` and
    vice versa.
    """
    inst = MultiuserInstance((h1, h2), N)
    h1, h2 = inst.h_list
    _, V1, V2 = two_user_precoder(h1, h2, N, inst.L, inst.L).blocks
    r1 = make_toeplitz(h1, N).matrix[0]
    r2 = make_toeplitz(h2, N).matrix[0]
    return float(np.max(np.abs(r1 @ V1) ** 2)), float(np.max(np.abs(r2 @ V2) ** 2))


def power_split_rates(gains, total_power, n_dims, fractions):
    """Single-stream rate pairs ``log2(1 + p_k c_k) / n_dims`` with ``p1 = f * total``.

    Parameters
    ----------
    gains : (float, float)
        Beam gains ``c_1, c_2``.
    total_power : float
        ``p1 + p2``.
    n_dims : int
        Normalizing dimension count.
    fractions : array_like
        Share ``f`` of the power given to user 1, each in [0, 1].

    Returns
    -------
    ndarray, shape (len(fractions), 2)
    """
    f = np.asarray(fractions, dtype=float)
    if np.any((f < 0) | (f > 1)):
        raise ValueError("power fractions must lie in [0, 1]")
    c1, c2 = gains
    r1 = np.log2(1.0 + f * total_power * c1) / n_dims
    r2 = np.log2(1.0 + (1.0 - f) * total_power * c2) / n_dims
    return np.column_stack([r1, r2])
