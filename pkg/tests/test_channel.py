import numpy as np
import pytest

from oracles import toeplitz_by_convolution, toeplitz_dense
from vdmsec import ChannelVector, RngStream, make_toeplitz, sample_channel
from vdmsec.channel import linearly_independent
from vdmsec.errors import DegenerateChannelError, DimensionError
from vdmsec.linalg import numerical_rank


class TestChannelVector:
    def test_rejects_all_zero(self):
        with pytest.raises(DegenerateChannelError):
            ChannelVector([0, 0, 0])

    def test_rejects_empty(self):
        with pytest.raises(DimensionError):
            ChannelVector([])

    def test_delay_spread(self):
        assert ChannelVector([1, 2, 3]).L == 2
        assert ChannelVector([5]).L == 0

    def test_impulse_response_reverses_storage_order(self):
        c = ChannelVector.from_impulse_response([1, 2, 3])
        np.testing.assert_array_equal(c.taps, [3, 2, 1])
        np.testing.assert_array_equal(c.impulse_response, [1, 2, 3])

    def test_taps_are_read_only(self):
        c = ChannelVector([1, 2])
        with pytest.raises(ValueError):
            c.taps[0] = 3

    def test_equality_and_hash(self):
        assert ChannelVector([1, 2]) == ChannelVector([1.0, 2.0])
        assert hash(ChannelVector([1, 2])) == hash(ChannelVector([1, 2]))


class TestMakeToeplitz:
    def test_single_tap_is_identity(self):
        T = make_toeplitz(ChannelVector([1]), 3)
        np.testing.assert_array_equal(T.matrix, np.eye(3))

    def test_two_tap_band(self):
        T = make_toeplitz(ChannelVector([-1, 1]), 2)
        np.testing.assert_array_equal(T.matrix, [[-1, 1, 0], [0, -1, 1]])

    def test_shape_and_fields(self):
        T = make_toeplitz(ChannelVector([1, 2, 3]), 5)
        assert T.shape == (5, 7)
        assert (T.N, T.L) == (5, 2)

    def test_matches_entrywise_construction(self):
        taps = np.array([0.3 - 1j, 2 + 0.5j, -1, 0.25j])
        np.testing.assert_array_equal(make_toeplitz(ChannelVector(taps), 6).matrix, toeplitz_dense(taps, 6))

    def test_rejects_zero_block_length(self):
        with pytest.raises(DimensionError):
            make_toeplitz(ChannelVector([1, 1]), 0)

    def test_rejects_zero_channel(self):
        with pytest.raises(DegenerateChannelError):
            make_toeplitz([0, 0], 3)

    def test_accepts_plain_sequence(self):
        np.testing.assert_array_equal(make_toeplitz([1, 2], 1).matrix, [[1, 2]])

    def test_matmul_delegates(self):
        T = make_toeplitz(ChannelVector([1, 2]), 2)
        np.testing.assert_array_equal(T @ np.ones(3), [3, 3])

    def test_full_rank_at_64_16(self):
        c = sample_channel(16, RngStream(7))
        assert numerical_rank(make_toeplitz(c, 64).matrix) == 64

    @pytest.mark.parametrize("L", [1, 4, 16])
    @pytest.mark.parametrize("N", [4, 16, 64])
    def test_convolution_oracle(self, L, N):
        rng = np.random.default_rng(100 * L + N)
        for trial in range(5):
            c = sample_channel(L, rng)
            x = rng.standard_normal(N + L) + 1j * rng.standard_normal(N + L)
            y = make_toeplitz(c, N) @ x
            ref = toeplitz_by_convolution(c.taps, N, x)
            assert np.linalg.norm(y - ref) <= 1e-12 * np.linalg.norm(ref)

    @pytest.mark.parametrize("L", [1, 4, 16])
    @pytest.mark.parametrize("N", [4, 16, 64])
    def test_rank_equals_block_length(self, L, N):
        rng = np.random.default_rng(L * 1000 + N)
        for _ in range(100 // 9 + 1):
            assert numerical_rank(make_toeplitz(sample_channel(L, rng), N).matrix) == N


class TestRngStream:
    def test_reproducible(self):
        a = sample_channel(4, RngStream(123, 5))
        b = sample_channel(4, RngStream(123, 5))
        assert a == b

    def test_streams_differ(self):
        assert sample_channel(4, RngStream(123, 0)) != sample_channel(4, RngStream(123, 1))

    def test_substream(self):
        assert RngStream(9).substream(3) == RngStream(9, 3)

    def test_rejects_bad_seed(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            RngStream(2**64)
        with pytest.raises(ValueError):
            RngStream(0, -1)

    def test_generator_sequence_is_fixed(self):
        gen1 = RngStream(2024, 3).generator()
        gen2 = RngStream(2024, 3).generator()
        np.testing.assert_array_equal(gen1.standard_normal(8), gen2.standard_normal(8))


class TestSampleChannel:
    def test_single_tap_variance_one(self):
        rng = np.random.default_rng(0)
        taps = np.array([sample_channel(0, rng).taps[0] for _ in range(20000)])
        assert abs(np.mean(np.abs(taps) ** 2) - 1.0) < 0.03

    def test_per_tap_variance(self):
        gen = RngStream(11).generator()
        z = np.array([sample_channel(16, gen).taps for _ in range(100_000)])
        var = np.mean(np.abs(z) ** 2, axis=0)
        assert np.all(np.abs(var - 1 / 17) <= 0.02 / 17)

    def test_circular_symmetry(self):
        gen = RngStream(12).generator()
        z = np.array([sample_channel(3, gen).taps for _ in range(50_000)])
        re, im = np.mean(z.real**2, axis=0), np.mean(z.imag**2, axis=0)
        np.testing.assert_allclose(re, 1 / 8, rtol=0.03)
        np.testing.assert_allclose(im, 1 / 8, rtol=0.03)
        assert np.all(np.abs(np.mean(z**2, axis=0)) < 0.01)

    def test_rejects_negative_delay_spread(self):
        with pytest.raises(DimensionError):
            sample_channel(-1, RngStream(0))

    def test_rejects_unknown_rng(self):
        with pytest.raises(TypeError):
            sample_channel(2, 42)


class TestIndependence:
    def test_parallel_vectors(self):
        assert not linearly_independent(ChannelVector([1, 2]), ChannelVector([2, 4]))

    def test_generic_pair(self):
        assert linearly_independent(ChannelVector([1, 2]), ChannelVector([2, 1]))

    def test_more_vectors_than_taps(self):
        vs = [ChannelVector(v) for v in ([1, 0], [0, 1], [1, 1])]
        assert not linearly_independent(*vs)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            linearly_independent(ChannelVector([1, 2]), ChannelVector([1, 2, 3]))
