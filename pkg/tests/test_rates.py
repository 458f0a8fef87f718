from dataclasses import replace

import numpy as np
import pytest

from oracles import draw_pair, generalized_secrecy_oracle, instance, rates_by_determinant, slope_vs_log2p
from vdmsec import (
    ChannelVector,
    CovarianceSet,
    RateTuple,
    build_precoder,
    effective_channels,
    equal_power_rates,
    fixed_covariance_secrecy_rate,
    make_toeplitz,
    rate_R01,
    rate_R02,
    rate_R1,
)
from vdmsec.errors import DimensionError, NotPSDError
from vdmsec.linalg import as_psd, log2det_eye_plus
from vdmsec.rates import equal_power_secrecy_rate, evaluate, h1_rank, leakage


def random_psd(rng, n, trace=1.0):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    S = A @ A.conj().T
    return trace * S / np.trace(S).real


class TestLinalg:
    def test_log2det_against_slogdet(self):
        rng = np.random.default_rng(0)
        A = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
        S = random_psd(rng, 6, 3.0)
        ref = np.linalg.slogdet(np.eye(4) + A @ S @ A.conj().T)[1] / np.log(2)
        assert log2det_eye_plus(A, S) == pytest.approx(ref, rel=1e-12)
        ref_id = np.linalg.slogdet(np.eye(4) + A @ A.conj().T)[1] / np.log(2)
        assert log2det_eye_plus(A) == pytest.approx(ref_id, rel=1e-12)

    def test_log2det_empty(self):
        assert log2det_eye_plus(np.zeros((3, 0))) == 0.0

    def test_as_psd_clips_tiny_negative(self):
        S = np.diag([1.0, -1e-13])
        assert np.all(np.linalg.eigvalsh(as_psd(S)) >= 0)

    def test_as_psd_rejects_negative(self):
        with pytest.raises(NotPSDError):
            as_psd(np.diag([1.0, -1e-3]))

    def test_as_psd_rejects_non_hermitian(self):
        with pytest.raises(NotPSDError):
            as_psd(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_as_psd_checks_size(self):
        with pytest.raises(DimensionError):
            as_psd(np.eye(2), size=3)
        with pytest.raises(DimensionError):
            as_psd(np.ones((2, 3)))


class TestEffectiveChannels:
    def test_products(self):
        d = instance(8, 2, 0)
        eff, prec = d["eff"], d["prec"]
        np.testing.assert_allclose(eff.H0, d["Th"].matrix @ prec.V0)
        np.testing.assert_allclose(eff.H1, d["Th"].matrix @ prec.V1)
        np.testing.assert_allclose(eff.G0, d["Tg"].matrix @ prec.V0)
        assert (eff.l0, eff.l, eff.N, eff.n_dims) == (8, 2, 8, 10)

    def test_small_example(self):
        g, h = ChannelVector([-1, 1]), ChannelVector([1, 1])
        prec = build_precoder(g, h, 2, 1)
        eff = effective_channels(make_toeplitz(h, 2), make_toeplitz(g, 2), prec)
        # V1 = [1,1,1]/sqrt(3) up to phase, so |H1| = [2,2]/sqrt(3)
        np.testing.assert_allclose(np.abs(eff.H1.ravel()), [2 / np.sqrt(3)] * 2)
        assert h1_rank(eff) == 1

    def test_svd_reconstruction(self):
        eff = instance(16, 4, 1)["eff"]
        G = eff.G0.conj().T @ eff.G0
        assert np.linalg.norm(G - (eff.Vg0 * eff.lambda_g0) @ eff.Vg0.conj().T) <= 1e-10
        H = eff.H1.conj().T @ eff.H1
        assert np.linalg.norm(H - (eff.Vh1 * eff.lambda_h1) @ eff.Vh1.conj().T) <= 1e-10
        assert np.all(np.diff(eff.lambda_g0) <= 0) and np.all(eff.lambda_g0 >= 0)

    def test_no_confidential_streams(self):
        d = instance(4, 2, 0, l=0)
        eff = d["eff"]
        assert eff.H1.shape == (4, 0)
        r = evaluate(eff, np.eye(6), np.zeros((0, 0)))
        assert r.R1 == 0.0

    def test_h1_rank(self):
        assert h1_rank(instance(16, 4, 2, l=3)["eff"]) == 3

    def test_dimension_mismatch(self):
        d = instance(4, 2, 0)
        with pytest.raises(DimensionError):
            effective_channels(make_toeplitz(d["h"], 5), make_toeplitz(d["g"], 5), d["prec"])


class TestRateFunctions:
    def test_zero_covariances(self):
        eff = instance(4, 2, 0)["eff"]
        Z0, Z1 = np.zeros((4, 4)), np.zeros((2, 2))
        assert rate_R1(eff, Z1) == 0.0
        assert rate_R01(eff, Z0, Z1) == 0.0
        assert rate_R02(eff, Z0) == 0.0

    def test_R1_scaled_identity(self):
        eff = instance(8, 3, 4)["eff"]
        p = 2.5
        sig2 = np.linalg.svd(eff.H1, compute_uv=False) ** 2
        assert rate_R1(eff, p * np.eye(3)) == pytest.approx(np.sum(np.log2(1 + p * sig2)) / 11, rel=1e-12)

    def test_R01_without_confidential_power(self):
        eff = instance(8, 3, 4)["eff"]
        S0 = random_psd(np.random.default_rng(2), 8, 5.0)
        ref = np.linalg.slogdet(np.eye(8) + eff.H0 @ S0 @ eff.H0.conj().T)[1] / np.log(2) / 11
        assert rate_R01(eff, S0, np.zeros((3, 3))) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_against_determinants(self, seed):
        eff = instance(6, 2, seed)["eff"]
        rng = np.random.default_rng(seed)
        S0, S1 = random_psd(rng, 6, 20.0), random_psd(rng, 2, 5.0)
        r01, r02, r1 = rates_by_determinant(eff, S0, S1)
        assert rate_R01(eff, S0, S1) == pytest.approx(r01, rel=1e-10)
        assert rate_R02(eff, S0) == pytest.approx(r02, rel=1e-10)
        assert rate_R1(eff, S1) == pytest.approx(r1, rel=1e-10)

    def test_doubling_never_decreases(self):
        eff = instance(6, 2, 3)["eff"]
        rng = np.random.default_rng(5)
        S0, S1 = random_psd(rng, 6), random_psd(rng, 2)
        assert rate_R1(eff, 2 * S1) >= rate_R1(eff, S1)
        assert rate_R02(eff, 2 * S0) >= rate_R02(eff, S0)

    def test_rejects_non_psd(self):
        eff = instance(4, 2, 0)["eff"]
        with pytest.raises(NotPSDError):
            rate_R1(eff, -np.eye(2))

    def test_rejects_wrong_size(self):
        eff = instance(4, 2, 0)["eff"]
        with pytest.raises(DimensionError):
            rate_R1(eff, np.eye(3))

    def test_leakage_is_zero(self):
        eff = instance(16, 4, 6)["eff"]
        assert leakage(eff, 1e6 * 20 * np.eye(4) / 4) <= 1e-9

    def test_leakage_resolves_tiny_residuals(self):
        eff = instance(4, 2, 6)["eff"]
        A = 1e-12 * np.ones_like(eff.leak)
        S1 = 3.0 * np.eye(2)
        ref = np.trace(A @ S1 @ A.conj().T).real / np.log(2)
        assert leakage(replace(eff, leak=A), S1) == pytest.approx(ref, rel=1e-9)

    def test_evaluate_extras(self):
        eff = instance(4, 2, 1)["eff"]
        r = evaluate(eff, np.eye(4), np.eye(2))
        assert r.R0 == min(r.extras["R01"], r.extras["R02"])
        assert set(r.extras) == {"R01", "R02", "leakage"}


class TestEqualPower:
    def test_zero_power(self):
        d = instance(4, 2, 0)
        r = equal_power_rates(d["Th"], d["Tg"], d["prec"], 0.0)
        assert tuple(r) == (0.0, 0.0)

    def test_matches_identity_covariances(self):
        d = instance(8, 2, 2)
        r = equal_power_rates(d["Th"], d["Tg"], d["prec"], 3.0)
        r01, r02, r1 = rates_by_determinant(d["eff"], 3.0 * np.eye(8), 3.0 * np.eye(2))
        assert r.R0 == pytest.approx(min(r01, r02), rel=1e-10)
        assert r.R1 == pytest.approx(r1, rel=1e-10)

    def test_secrecy_rate_spreads_budget(self):
        eff = instance(8, 2, 2)["eff"]
        assert equal_power_secrecy_rate(eff, 10.0) == pytest.approx(rate_R1(eff, 5.0 * np.eye(2)))
        assert equal_power_secrecy_rate(eff, 0.0) == 0.0

    def test_slopes_at_64_16(self):
        snr = np.arange(30.0, 51.0, 5.0)
        R0, R1 = [], []
        for seed in range(3):
            d = instance(64, 16, seed)
            rows = [equal_power_rates(d["Th"], d["Tg"], d["prec"], 10 ** (s / 10)) for s in snr]
            R0.append([r.R0 for r in rows])
            R1.append([r.R1 for r in rows])
        assert slope_vs_log2p(snr, np.mean(R1, axis=0)) == pytest.approx(0.2, rel=0.05)
        assert slope_vs_log2p(snr, np.mean(R0, axis=0)) == pytest.approx(0.6, rel=0.05)


class TestFixedCovariance:
    def test_zero_covariance(self):
        d = instance(4, 2, 0)
        assert fixed_covariance_secrecy_rate(d["Th"], d["Tg"], np.zeros((6, 6))) == 0.0

    def test_identical_channels(self):
        d = instance(4, 2, 0)
        assert fixed_covariance_secrecy_rate(d["Th"], d["Th"], 5 * np.eye(6)) == 0.0

    @pytest.mark.parametrize("seed", range(4))
    def test_dense_pencil_oracle(self, seed):
        d = instance(2, 1, seed)
        S = random_psd(np.random.default_rng(seed), 3, 9.0)
        ref = generalized_secrecy_oracle(d["Th"].matrix, d["Tg"].matrix, S)
        assert fixed_covariance_secrecy_rate(d["Th"], d["Tg"], S) == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_rejects_non_psd(self):
        d = instance(2, 1, 0)
        with pytest.raises(NotPSDError):
            fixed_covariance_secrecy_rate(d["Th"], d["Tg"], -np.eye(3))


class TestContainers:
    def test_covariance_budget(self):
        with pytest.raises(ValueError):
            CovarianceSet((np.eye(2), np.eye(2)), 3.0)
        assert CovarianceSet((np.eye(2), np.eye(1)), 3.0).total_power == pytest.approx(3.0)

    def test_covariance_negative_budget(self):
        with pytest.raises(ValueError):
            CovarianceSet((np.zeros((1, 1)),), -1.0)

    def test_rate_tuple_rejects_negative(self):
        with pytest.raises(ValueError):
            RateTuple((1.0, -0.5))

    def test_rate_tuple_rounds_tiny_negative(self):
        assert RateTuple((-1e-15, 1.0)).R0 == 0.0

    def test_rate_tuple_sequence(self):
        r = RateTuple((1.0, 2.0, 3.0))
        assert len(r) == 3 and r[2] == 3.0 and list(r) == [1.0, 2.0, 3.0]
