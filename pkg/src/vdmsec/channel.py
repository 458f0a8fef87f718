"""Frequency-selective channel vectors and their banded Toeplitz matrices.

Tap ordering
------------
A channel vector stores its ``L + 1`` taps as ``[c_L, ..., c_1, c_0]``,
i.e. the *largest delay first*. This is the order in which taps appear,
left to right, on every row of the Toeplitz matrix::

    T(c) = [[c_L ... c_0  0  ...  0 ],
            [ 0  c_L ... c_0 ...  0 ],
            ...
            [ 0  ...  0  c_L ... c_0]]      (N x (N + L))

so that ``T(c) @ x`` equals the ``N`` interior outputs of the linear
convolution of ``[c_0, ..., c_L]`` with ``x`` (the first ``L`` outputs
fall into the guard interval and are discarded). Reversing the taps is the
classic bug here; use :meth:`ChannelVector.from_impulse_response` when
starting from the usual delay-ordered impulse response.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, DimensionError


@dataclass(frozen=True)
class ChannelVector:
    """An ``(L+1)``-tap complex channel, stored as ``[c_L, ..., c_0]``."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.atleast_1d(np.asarray(self.taps, dtype=complex))
        if taps.ndim != 1 or taps.size == 0:
            raise DimensionError("taps must be a non-empty 1-D sequence")
        if not np.any(taps != 0):
            raise DegenerateChannelError("all-zero channel vector")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @classmethod
    def from_impulse_response(cls, response):
        """Build from a delay-ordered response ``[c_0, c_1, ..., c_L]``."""
        return cls(np.asarray(response)[::-1])

    @property
    def L(self):
        return self.taps.size - 1

    @property
    def impulse_response(self):
        """Taps in delay order ``[c_0, ..., c_L]``."""
        return self.taps[::-1]

    def __len__(self):
        return self.taps.size

    def __eq__(self, other):
        if not isinstance(other, ChannelVector):
            return NotImplemented
        return np.array_equal(self.taps, other.taps)

    def __hash__(self):
        return hash(self.taps.tobytes())


@dataclass(frozen=True)
class ToeplitzChannel:
    """The ``N x (N+L)`` banded Toeplitz matrix of a channel vector."""

    N: int
    L: int
    matrix: np.ndarray

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, other):
        return self.matrix @ other


def make_toeplitz(c, N):
    """Build the ``N x (N+L)`` Toeplitz channel matrix of `c`.

    Row ``i`` holds ``[c_L, ..., c_0]`` in columns ``i .. i+L``.

    Parameters
    ----------
    c : ChannelVector or array_like
        Channel taps ordered ``[c_L, ..., c_0]``.
    N : int
        Block length (number of retained outputs), ``N >= 1``.

    Returns
    -------
    ToeplitzChannel
    """
    if not isinstance(c, ChannelVector):
        c = ChannelVector(c)
    if int(N) != N or N < 1:
        raise DimensionError(f"block length N must be a positive integer, got {N}")
    N = int(N)
    L = c.L
    T = np.zeros((N, N + L), dtype=complex)
    for j, tap in enumerate(c.taps):
        T[np.arange(N), np.arange(N) + j] = tap
    T.setflags(write=False)
    return ToeplitzChannel(N=N, L=L, matrix=T)


@dataclass(frozen=True)
class RngStream:
    """A reproducible random substream identified by ``(seed, index)``.

    Streams with different indices are statistically independent
    (``numpy.random.SeedSequence`` spawn keys), and the same pair always
    yields the same draws, regardless of which process consumes it.
    """

    seed: int
    index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.index) < 0:
            raise ValueError("stream index must be non-negative")

    def generator(self):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.index),))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, index):
        """A child stream; used to give each trial its own generator."""
        return RngStream(self.seed, index)


def _as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


def sample_channel(L, rng):
    """Draw an i.i.d. Rayleigh channel with ``L + 1`` taps of variance ``1/(L+1)``.

    Real and imaginary parts are independent ``N(0, 1/(2(L+1)))``.

    Parameters
    ----------
    L : int
        Delay spread, ``L >= 0``.
    rng : RngStream or numpy.random.Generator
        Passing an `RngStream` restarts its generator, so two calls with the
        same stream give the same channel; pass a Generator to draw a
        sequence of channels.
    """
    if int(L) != L or L < 0:
        raise DimensionError(f"L must be a non-negative integer, got {L}")
    gen = _as_generator(rng)
    scale = np.sqrt(0.5 / (L + 1))
    z = gen.standard_normal((2, int(L) + 1))
    return ChannelVector(scale * (z[0] + 1j * z[1]))


#: Smallest/largest singular value ratio below which stacked taps are dependent.
INDEPENDENCE_RTOL = 1e-8


def linearly_independent(*vectors, rtol=INDEPENDENCE_RTOL):
    """True if the tap vectors are linearly independent.

    The vectors are stacked as rows of a ``K x (L+1)`` matrix whose smallest
    singular value must exceed ``rtol`` times the largest.
    """
    taps = [v.taps if isinstance(v, ChannelVector) else np.asarray(v) for v in vectors]
    if len({t.size for t in taps}) != 1:
        raise DimensionError("channel vectors have different lengths")
    s = np.linalg.svd(np.vstack(taps), compute_uv=False)
    if len(taps) > s.size:
        return False
    return bool(s[-1] > rtol * s[0])
