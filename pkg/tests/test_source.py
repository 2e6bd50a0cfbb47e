import cmath
import math

import numpy as np
import pytest

from phaseqkd.linalg import inner_product
from phaseqkd.source import (
    Basis,
    SourceConfig,
    SourceKind,
    bb84_signal_P,
    bb84_signal_set,
    photon_statistics,
    sample_photon_number,
    single_photon_state,
)

MU_GRID = np.linspace(0.0, 1.0, 41)


def test_photon_statistics_vacuum():
    s = photon_statistics(0.0)
    assert (s.p0, s.p1, s.pM) == (1.0, 0.0, 0.0)


def test_photon_statistics_mu_01():
    s = photon_statistics(0.1)
    assert s.p0 == pytest.approx(0.9048374180359595, abs=1e-12)
    assert s.p1 == pytest.approx(0.09048374180359596, abs=1e-12)
    assert s.pM == pytest.approx(0.004678840160444397, abs=1e-12)
    assert s.pM <= 0.1**2 / 2


def test_multiphoton_at_secure_limit():
    assert photon_statistics(0.0240).pM <= 0.000288


@pytest.mark.parametrize("mu", MU_GRID)
def test_photon_statistics_sum_and_bound(mu):
    s = photon_statistics(mu)
    assert s.p0 + s.p1 + s.pM == pytest.approx(1.0, abs=1e-12)
    assert s.pM <= mu * mu / 2 + 1e-18


def test_negative_mu():
    with pytest.raises(ValueError):
        photon_statistics(-0.1)
    with pytest.raises(ValueError):
        bb84_signal_P(0, Basis.Z, -1.0)
    with pytest.raises(ValueError):
        SourceConfig(SourceKind.P, -1.0)


def test_sample_photon_number():
    rng = np.random.default_rng(2024)
    assert not np.any(sample_photon_number(0.0, rng, 1000))
    n = 10**6
    draws = sample_photon_number(0.1, rng, n)
    for observed, p in [(np.mean(draws == 0), math.exp(-0.1)),
                        (np.mean(draws >= 2), 1 - 1.1 * math.exp(-0.1))]:
        assert abs(observed - p) <= 3 * math.sqrt(p * (1 - p) / n)


class TestSinglePhoton:
    def test_z(self):
        for phi in (0.0, 0.3, 2.0):
            np.testing.assert_array_equal(single_photon_state(0, Basis.Z, phi).amplitudes, [1, 0])

    def test_plus(self):
        np.testing.assert_allclose(single_photon_state(0, Basis.X).amplitudes, [2**-0.5, 2**-0.5])

    def test_rotated_minus(self):
        s = single_photon_state(1, Basis.X, math.pi / 4).amplitudes
        np.testing.assert_allclose(
            s, [cmath.exp(1j * math.pi / 4) / math.sqrt(2), -cmath.exp(-1j * math.pi / 4) / math.sqrt(2)]
        )

    def test_bad_bit(self):
        with pytest.raises(ValueError):
            single_photon_state(2, Basis.Z)


class TestPhaseCoherentSignals:
    def test_zero_z(self):
        s = bb84_signal_P(0, Basis.Z, 0.1)
        np.testing.assert_allclose(s.amplitudes, [0.951229424500714, 0.300805163, 0.0], atol=1e-9)

    def test_plus(self):
        s = bb84_signal_P(0, Basis.X, 0.1)
        np.testing.assert_allclose(s.amplitudes, [0.951229424500714, 0.212701373, 0.212701373], atol=1e-9)

    def test_vacuum_limit(self):
        for s in bb84_signal_set(0.0, phi=0.7).values():
            np.testing.assert_array_equal(s.amplitudes, [1, 0, 0])

    @pytest.mark.parametrize("mu", MU_GRID)
    def test_norm_deficit_is_multiphoton(self, mu):
        for s in bb84_signal_set(mu, phi=0.4).values():
            assert s.norm2() + photon_statistics(mu).pM == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("mu", [0.01, 0.1, 0.5])
    def test_bit0_pair_overlaps_more(self, mu):
        sig = bb84_signal_set(mu)
        ov0 = abs(inner_product(sig[0, Basis.X], sig[0, Basis.Z]))
        ov1 = abs(inner_product(sig[1, Basis.X], sig[1, Basis.Z]))
        assert ov0 > ov1

    def test_theta_rotates_single_photon_part(self):
        s = bb84_signal_P(1, Basis.Z, 0.2, theta=0.5)
        assert s["PH1"] == pytest.approx(math.exp(-0.1) * math.sqrt(0.2) * cmath.exp(0.5j))
        assert s["VAC"] == pytest.approx(math.exp(-0.1))

    def test_alpha_real_positive(self):
        assert SourceConfig(SourceKind.P, 0.04).alpha == pytest.approx(0.2)
